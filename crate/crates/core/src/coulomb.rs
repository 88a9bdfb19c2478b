//! Coulomb-gauge vector potential, the simplified transverse projection of
//! the Lorenz-gauge potential, and the discrepancy between the two.

use crate::lw::{lw_sample_at, phi_coulomb, LwSample};
use crate::retarded::solve_retarded;
use crate::tail::{integrate_tail, potential_time_integral, TailOptions};
use crate::trajectory::Trajectory;
use crate::{Error, Result, Vec3};

/// Which unit vector the simplified projector removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NConvention {
    /// `n = (r - R(t_ret)) / |r - R(t_ret)|`
    #[default]
    Retarded,
    /// `n = (r - R(t)) / |r - R(t)|`
    Instantaneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalOptions {
    pub tail: TailOptions,
    pub n_convention: NConvention,
}

/// An observation event in either parametrisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservationEvent {
    /// Laboratory time and position.
    Lab { t: f64, r: Vec3 },
    /// Point at `radius · direction` on the light ray leaving the charge at `t_ret`.
    NullRay {
        t_ret: f64,
        direction: Vec3,
        radius: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedEvent {
    pub t: f64,
    pub r: Vec3,
    pub t_ret: f64,
}

impl ObservationEvent {
    pub fn resolve(&self, traj: &Trajectory) -> Result<ResolvedEvent> {
        match *self {
            ObservationEvent::Lab { t, r } => {
                let sol = solve_retarded(traj, t, r)?;
                Ok(ResolvedEvent {
                    t,
                    r,
                    t_ret: sol.t_ret,
                })
            }
            ObservationEvent::NullRay {
                t_ret,
                direction,
                radius,
            } => {
                let e = direction
                    .normalized()
                    .ok_or_else(|| Error::invalid("direction", "zero direction vector"))?;
                let r = e * radius;
                let t = t_ret + (r - traj.position(t_ret)).norm() / traj.c();
                Ok(ResolvedEvent { t, r, t_ret })
            }
        }
    }
}

/// Every potential at one event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSample {
    pub t: f64,
    pub r: Vec3,
    pub t_ret: f64,
    pub phi_l: f64,
    pub phi_c: f64,
    pub a_l: Vec3,
    pub a_c: Vec3,
    pub a_simplified: Vec3,
    pub delta_a: Vec3,
}

/// Local Liénard-Wiechert data plus `q c ∫ (r - R)/|r - R|³ dt'`.
struct Pieces {
    lw: LwSample,
    charge_tail: Vec3,
}

impl Pieces {
    fn at(
        traj: &Trajectory,
        t_ret: f64,
        t: f64,
        r: Vec3,
        q: f64,
        opts: &TailOptions,
    ) -> Result<Self> {
        let lw = lw_sample_at(traj, t_ret, r, q)?;
        let tail = integrate_tail(traj, t_ret, t, r, opts)?;
        Ok(Pieces {
            lw,
            charge_tail: tail.value * (q * traj.c()),
        })
    }

    fn solve(traj: &Trajectory, t: f64, r: Vec3, q: f64, opts: &TailOptions) -> Result<Self> {
        let sol = solve_retarded(traj, t, r)?;
        Pieces::at(traj, sol.t_ret, t, r, q, opts)
    }

    /// `q/d · (β - n)/κ + q c ∫ …`
    fn a_coulomb(&self, q: f64) -> Vec3 {
        let lw = &self.lw;
        (lw.beta - lw.n) * (q / (lw.dist * lw.kappa)) + self.charge_tail
    }

    /// `-q n/d + q c ∫ …`
    fn delta(&self, q: f64) -> Vec3 {
        -self.lw.n * (q / self.lw.dist) + self.charge_tail
    }
}

fn projector_direction(
    traj: &Trajectory,
    t: f64,
    r: Vec3,
    lw: &LwSample,
    conv: NConvention,
) -> Result<Vec3> {
    match conv {
        NConvention::Retarded => Ok(lw.n),
        NConvention::Instantaneous => (r - traj.position(t))
            .normalized()
            .ok_or(Error::ObserverOnCharge),
    }
}

pub fn a_coulomb(traj: &Trajectory, t: f64, r: Vec3, q: f64, opts: &EvalOptions) -> Result<Vec3> {
    Ok(Pieces::solve(traj, t, r, q, &opts.tail)?.a_coulomb(q))
}

/// `A_L - (n·A_L) n`.
pub fn a_simplified(traj: &Trajectory, t: f64, r: Vec3, q: f64, conv: NConvention) -> Result<Vec3> {
    let sol = solve_retarded(traj, t, r)?;
    let lw = lw_sample_at(traj, sol.t_ret, r, q)?;
    Ok(lw.a.reject(projector_direction(traj, t, r, &lw, conv)?))
}

/// Discrepancy evaluated directly as `-q n/d + q c ∫ …` (retarded `n`).
pub fn delta_a(traj: &Trajectory, t: f64, r: Vec3, q: f64, opts: &EvalOptions) -> Result<Vec3> {
    Ok(Pieces::solve(traj, t, r, q, &opts.tail)?.delta(q))
}

pub fn sample(
    traj: &Trajectory,
    event: ObservationEvent,
    q: f64,
    opts: &EvalOptions,
) -> Result<PotentialSample> {
    let ev = event.resolve(traj)?;
    sample_resolved(traj, ev, q, opts)
}

pub fn sample_resolved(
    traj: &Trajectory,
    ev: ResolvedEvent,
    q: f64,
    opts: &EvalOptions,
) -> Result<PotentialSample> {
    let ResolvedEvent { t, r, t_ret } = ev;
    let pieces = Pieces::at(traj, t_ret, t, r, q, &opts.tail)?;
    let a_c = pieces.a_coulomb(q);
    let n = projector_direction(traj, t, r, &pieces.lw, opts.n_convention)?;
    let a_simplified = pieces.lw.a.reject(n);
    let delta_a = match opts.n_convention {
        NConvention::Retarded => pieces.delta(q),
        NConvention::Instantaneous => a_c - a_simplified,
    };
    Ok(PotentialSample {
        t,
        r,
        t_ret,
        phi_l: pieces.lw.phi,
        phi_c: phi_coulomb(traj, t, r, q)?,
        a_l: pieces.lw.a,
        a_c,
        a_simplified,
        delta_a,
    })
}

/// `G(t, t_ret(t, r), r) = ∫_{t_ret}^{t} dt'/|r - R(t')|` with the retarded
/// time re-solved at `(t, r)`.
pub fn time_integral_g(traj: &Trajectory, t: f64, r: Vec3, opts: &TailOptions) -> Result<f64> {
    let sol = solve_retarded(traj, t, r)?;
    Ok(potential_time_integral(traj, sol.t_ret, t, r, opts))
}

/// Central-difference gradient of [`time_integral_g`] with step `h`.
pub fn grad_g_numeric(
    traj: &Trajectory,
    t: f64,
    r: Vec3,
    h: f64,
    opts: &TailOptions,
) -> Result<Vec3> {
    let mut g = [0.0; 3];
    for (k, gk) in g.iter_mut().enumerate() {
        let dr = match k {
            0 => Vec3::X,
            1 => Vec3::Y,
            _ => Vec3::Z,
        } * h;
        let fp = time_integral_g(traj, t, r + dr, opts)?;
        let fm = time_integral_g(traj, t, r - dr, opts)?;
        *gk = (fp - fm) / (2.0 * h);
    }
    Ok(Vec3::from_array(g))
}

/// Closed right-hand side of the gradient identity:
/// `(1/c)(r - R)/|r - R|² · κ⁻¹ - ∫ (r - R)/|r - R|³ dt'`.
pub fn grad_g_identity(
    traj: &Trajectory,
    t: f64,
    r: Vec3,
    opts: &TailOptions,
) -> Result<(Vec3, Vec3)> {
    let sol = solve_retarded(traj, t, r)?;
    let lw = lw_sample_at(traj, sol.t_ret, r, 1.0)?;
    let boundary = lw.n / (traj.c() * lw.dist * lw.kappa);
    let tail = integrate_tail(traj, sol.t_ret, t, r, opts)?.value;
    Ok((boundary, tail))
}

/// `A_C = A_L - q c ∇G` with `∇G` by central differences.
///
/// Independent cross-check of [`a_coulomb`]; not used in production paths.
pub fn a_coulomb_gradient_form(
    traj: &Trajectory,
    t: f64,
    r: Vec3,
    q: f64,
    h: f64,
    opts: &TailOptions,
) -> Result<Vec3> {
    let sol = solve_retarded(traj, t, r)?;
    let lw = lw_sample_at(traj, sol.t_ret, r, q)?;
    Ok(lw.a - grad_g_numeric(traj, t, r, h, opts)? * (q * traj.c()))
}

/// Six-point central-difference divergence of `A_C` at fixed `t`.
pub fn divergence_a_coulomb(
    traj: &Trajectory,
    t: f64,
    r: Vec3,
    q: f64,
    h: f64,
    opts: &EvalOptions,
) -> Result<f64> {
    let mut div = 0.0;
    for (k, axis) in [Vec3::X, Vec3::Y, Vec3::Z].into_iter().enumerate() {
        let ap = a_coulomb(traj, t, r + axis * h, q, opts)?;
        let am = a_coulomb(traj, t, r - axis * h, q, opts)?;
        div += (ap[k] - am[k]) / (2.0 * h);
    }
    Ok(div)
}
