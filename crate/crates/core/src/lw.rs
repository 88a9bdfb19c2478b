//! Lorenz-gauge Liénard-Wiechert potentials and the instantaneous
//! Coulomb-gauge scalar potential.

use crate::retarded::solve_retarded;
use crate::trajectory::Trajectory;
use crate::{Error, Result, Vec3};

/// Liénard-Wiechert potentials together with the retarded-time geometry
/// that the Coulomb-gauge formulas reuse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LwSample {
    pub t_ret: f64,
    pub phi: f64,
    pub a: Vec3,
    /// Unit vector from `R(t_ret)` to the observer.
    pub n: Vec3,
    pub beta: Vec3,
    /// Doppler factor `1 - β·n`.
    pub kappa: f64,
    /// `|r - R(t_ret)|`.
    pub dist: f64,
}

/// Evaluates the potentials for an already known retarded time.
pub fn lw_sample_at(traj: &Trajectory, t_ret: f64, r: Vec3, q: f64) -> Result<LwSample> {
    let sep = r - traj.position(t_ret);
    let dist = sep.norm();
    if dist == 0.0 {
        return Err(Error::ObserverOnCharge);
    }
    let n = sep / dist;
    let beta = traj.beta(t_ret);
    let kappa = 1.0 - beta.dot(n);
    let phi = q / (dist * kappa);
    Ok(LwSample {
        t_ret,
        phi,
        a: beta * phi,
        n,
        beta,
        kappa,
        dist,
    })
}

pub fn lw_sample(traj: &Trajectory, t: f64, r: Vec3, q: f64) -> Result<LwSample> {
    let sol = solve_retarded(traj, t, r)?;
    lw_sample_at(traj, sol.t_ret, r, q)
}

/// `Φ_C = q / |r - R(t)|` at the present time `t`.
pub fn phi_coulomb(traj: &Trajectory, t: f64, r: Vec3, q: f64) -> Result<f64> {
    let d = (r - traj.position(t)).norm();
    if d == 0.0 {
        return Err(Error::ObserverOnCharge);
    }
    Ok(q / d)
}
