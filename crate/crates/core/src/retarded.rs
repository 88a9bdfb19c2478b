//! Retarded-time condition `t - t_ret - |r - R(t_ret)|/c = 0` and the
//! derivatives of its solution with respect to the observation event.

use crate::trajectory::Trajectory;
use crate::{Error, Result, Vec3};

pub const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetardedSolution {
    pub t_ret: f64,
    /// `F(t, t_ret)` at the returned root.
    pub residual: f64,
    pub iterations: usize,
}

/// Residual tolerance `1e-12 · max(1, t - t_ret)`.
pub fn residual_tolerance(t: f64, t_ret: f64) -> f64 {
    1e-12 * (t - t_ret).max(1.0)
}

fn residual(traj: &Trajectory, t: f64, r: Vec3, s: f64) -> f64 {
    t - s - (r - traj.position(s)).norm() / traj.c()
}

/// Bracket `[lo, t]` with `F(lo) > 0 >= F(t)`.
///
/// `F(t - Δ) >= (1 - β_max) Δ - |r - R(t)|/c`, so any
/// `Δ > |r - R(t)| / (c (1 - β_max))` works.
pub fn default_bracket(traj: &Trajectory, t: f64, r: Vec3) -> (f64, f64) {
    let d_now = (r - traj.position(t)).norm();
    let span = d_now / (traj.c() * (1.0 - traj.max_speed_ratio())) + 1.0;
    (t - span, t)
}

pub fn solve_retarded(traj: &Trajectory, t: f64, r: Vec3) -> Result<RetardedSolution> {
    let (lo, hi) = default_bracket(traj, t, r);
    solve_retarded_bracketed(traj, t, r, lo, hi)
}

/// Safeguarded Newton iteration inside a sign-changing bracket.
///
/// `∂F/∂t_ret = -1 + β·n <= -(1 - β_max)`, so the root is unique and Newton
/// steps that leave the bracket are replaced by bisection.
pub fn solve_retarded_bracketed(
    traj: &Trajectory,
    t: f64,
    r: Vec3,
    lo: f64,
    hi: f64,
) -> Result<RetardedSolution> {
    if !(r.is_finite() && t.is_finite() && lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid("event", "non-finite observation event"));
    }
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let mut f_lo = residual(traj, t, r, lo);
    let f_hi = residual(traj, t, r, hi);
    if f_lo < 0.0 || f_hi > 0.0 {
        return Err(Error::invalid(
            "bracket",
            format!("F does not change sign on [{lo}, {hi}] ({f_lo:e}, {f_hi:e})"),
        ));
    }
    if f_hi == 0.0 {
        return Ok(RetardedSolution {
            t_ret: hi,
            residual: 0.0,
            iterations: 0,
        });
    }

    let c = traj.c();
    let mut s = 0.5 * (lo + hi);
    for it in 1..=MAX_ITERATIONS {
        let sep = r - traj.position(s);
        let d = sep.norm();
        let f = t - s - d / c;
        if f.abs() <= residual_tolerance(t, s) {
            return Ok(RetardedSolution {
                t_ret: s,
                residual: f,
                iterations: it,
            });
        }
        if f > 0.0 {
            lo = s;
            f_lo = f;
        } else {
            hi = s;
        }
        // bracket exhausted at floating-point resolution
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
            return Ok(RetardedSolution {
                t_ret: s,
                residual: f,
                iterations: it,
            });
        }
        let slope = if d > 0.0 {
            -1.0 + traj.beta(s).dot(sep / d)
        } else {
            -1.0
        };
        let newton = s - f / slope;
        s = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        residual: f_lo,
    })
}

fn separation(traj: &Trajectory, t_ret: f64, r: Vec3) -> Result<(Vec3, f64)> {
    let sep = r - traj.position(t_ret);
    let d = sep.norm();
    if d == 0.0 {
        return Err(Error::ObserverOnCharge);
    }
    Ok((sep, d))
}

/// `∂t_ret/∂t = (1 - β·n)^-1` evaluated at the retarded time.
pub fn dtret_dt(traj: &Trajectory, t_ret: f64, r: Vec3) -> Result<f64> {
    let (sep, d) = separation(traj, t_ret, r)?;
    Ok(1.0 / (1.0 - traj.beta(t_ret).dot(sep / d)))
}

/// `∇t_ret = -(r - R) / (c|r - R| - (r - R)·Ṙ)` evaluated at the retarded time.
pub fn grad_tret(traj: &Trajectory, t_ret: f64, r: Vec3) -> Result<Vec3> {
    let (sep, d) = separation(traj, t_ret, r)?;
    let denom = traj.c() * d - sep.dot(traj.velocity(t_ret));
    Ok(-sep / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::Heading;

    #[test]
    fn static_charge() {
        let s = Trajectory::stationary(1.0).unwrap();
        let sol = solve_retarded(&s, 20.0, Vec3::new(0.0, 0.0, 10.0)).unwrap();
        assert!((sol.t_ret - 10.0).abs() < 1e-12);
        assert_eq!(
            dtret_dt(&s, sol.t_ret, Vec3::new(3.0, 1.0, 0.0)).unwrap(),
            1.0
        );
        let g = grad_tret(&s, 10.0, Vec3::new(0.0, 0.0, 10.0)).unwrap();
        assert!((g - Vec3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn uniform_head_on() {
        // |100 - 0.5 s| = -s  =>  s = -200
        let u = Trajectory::uniform(Heading::Forward, 0.5, 1.0).unwrap();
        let r = Vec3::new(100.0, 0.0, 0.0);
        let sol = solve_retarded(&u, 0.0, r).unwrap();
        assert!((sol.t_ret + 200.0).abs() < 1e-10, "{sol:?}");
        assert!((dtret_dt(&u, -200.0, r).unwrap() - 2.0).abs() < 1e-14);
        let g = grad_tret(&u, -200.0, r).unwrap();
        assert!((g - Vec3::new(-2.0, 0.0, 0.0)).norm() < 1e-14);
    }

    fn bisect(traj: &Trajectory, t: f64, r: Vec3) -> f64 {
        let (mut lo, mut hi) = default_bracket(traj, t, r);
        while hi - lo > 1e-14 * hi.abs().max(1.0) {
            let m = 0.5 * (lo + hi);
            if residual(traj, t, r, m) > 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn oscillatory_matches_bisection() {
        // a = ω = 1 needs c > 1 to satisfy the strict subluminal bound
        let o = Trajectory::oscillatory(1.0, 1.0, 2.0).unwrap();
        let r = Vec3::new(0.0, 0.0, 50.0);
        let sol = solve_retarded(&o, 60.0, r).unwrap();
        let check = 60.0 - sol.t_ret - (sol.t_ret.sin().powi(2) + 2500.0).sqrt() / 2.0;
        assert!(check.abs() < 1e-12);
        assert!((sol.t_ret - bisect(&o, 60.0, r)).abs() < 1e-11);
    }

    #[test]
    fn oscillatory_slow_matches_bisection() {
        let o = Trajectory::oscillatory(1.0, 0.9, 1.0).unwrap();
        let r = Vec3::new(0.0, 0.0, 50.0);
        let sol = solve_retarded(&o, 60.0, r).unwrap();
        let check = 60.0 - sol.t_ret - ((sol.t_ret * 0.9).sin().powi(2) + 2500.0).sqrt();
        assert!(check.abs() < 1e-12);
        assert!((sol.t_ret - bisect(&o, 60.0, r)).abs() < 1e-11);
    }

    #[test]
    fn finite_difference_dtret_dt() {
        let o = Trajectory::oscillatory(1.0, 0.8, 1.0).unwrap();
        let r = Vec3::new(5.0, 4.0, 0.0);
        let t_ret = 0.3;
        let t = t_ret + (r - o.position(t_ret)).norm();
        let h = 1e-5;
        let fp = solve_retarded(&o, t + h, r).unwrap().t_ret;
        let fm = solve_retarded(&o, t - h, r).unwrap().t_ret;
        let fd = (fp - fm) / (2.0 * h);
        let an = dtret_dt(&o, t_ret, r).unwrap();
        assert!(((fd - an) / an).abs() < 1e-6, "{fd} vs {an}");
    }

    #[test]
    fn observer_on_charge() {
        let u = Trajectory::uniform(Heading::Forward, 0.5, 1.0).unwrap();
        assert_eq!(
            dtret_dt(&u, 2.0, Vec3::new(1.0, 0.0, 0.0)),
            Err(Error::ObserverOnCharge)
        );
        assert_eq!(
            grad_tret(&u, 2.0, Vec3::new(1.0, 0.0, 0.0)),
            Err(Error::ObserverOnCharge)
        );
    }

    #[test]
    fn bad_bracket_rejected() {
        let s = Trajectory::stationary(1.0).unwrap();
        assert!(solve_retarded_bracketed(&s, 20.0, Vec3::new(0.0, 0.0, 10.0), 15.0, 20.0).is_err());
    }
}
