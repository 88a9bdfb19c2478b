//! The non-local time integral `∫_{t_ret}^{t} (r - R(t')) / |r - R(t')|³ dt'`
//! that converts Lorenz-gauge potentials into Coulomb-gauge ones.
//!
//! The interval length grows like `r/c`, so far-zone evaluation relies on
//! structure of the orbit: closed forms for uniform motion, a single period
//! integral for oscillation, and subtraction of the uniform-motion integrand
//! for the combined orbit.

use crate::quadrature::{integrate, integrate_panels, Tolerance};
use crate::trajectory::{Heading, Motion, Trajectory};
use crate::{Error, Exec, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    ClosedForm,
    Adaptive,
    PeriodChunked,
    DifferenceTrick,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: Vec3,
    pub abs_error: f64,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailOptions {
    /// Relative accuracy requested from the quadrature.
    pub rel_tol: f64,
    /// Closest admissible approach between charge and observer.
    pub delta_min: f64,
    pub exec: Exec,
}

impl Default for TailOptions {
    fn default() -> Self {
        TailOptions {
            rel_tol: 1e-12,
            delta_min: 1e-9,
            exec: Exec::default(),
        }
    }
}

/// `(r - R(t')) / |r - R(t')|³`
#[inline]
pub fn integrand(traj: &Trajectory, r: Vec3, tp: f64) -> Vec3 {
    let sep = r - traj.position(tp);
    let d2 = sep.norm_squared();
    sep / (d2 * d2.sqrt())
}

/// Combined-orbit integrand minus the integrand of its uniform drift.
#[inline]
pub fn difference_integrand(traj: &Trajectory, r: Vec3, tp: f64) -> Vec3 {
    let drift = match traj.motion() {
        Motion::Uniform { heading, speed } | Motion::Combined { heading, speed, .. } => {
            heading.sign() * speed * tp
        }
        _ => 0.0,
    };
    let sep_u = r - Vec3::new(drift, 0.0, 0.0);
    let du2 = sep_u.norm_squared();
    integrand(traj, r, tp) - sep_u / (du2 * du2.sqrt())
}

/// Closed-form integral for `R_x = ε v t'`, observer at `radius · e`.
///
/// Algebraically identical to the textbook antiderivatives
/// `(1/εv)[1/S(t) - 1/S(t_ret)]` and
/// `-e_⊥/(r εv (1-e_x²)) [u/S]_{t_ret}^{t}` with `u = r e_x - εvt'`,
/// `S = √(u² + r²(1-e_x²))`, rearranged so that neither small `v` nor
/// near-axial `e` cancels catastrophically.
pub fn uniform_closed_form(
    v: f64,
    heading: Heading,
    e: Vec3,
    radius: f64,
    t_ret: f64,
    t: f64,
) -> Vec3 {
    if t == t_ret {
        return Vec3::ZERO;
    }
    let eps = heading.sign();
    let rho2 = e.y * e.y + e.z * e.z;
    let b = radius * rho2.sqrt();
    let u0 = radius * e.x - eps * v * t_ret;
    let u1 = radius * e.x - eps * v * t;
    let s0 = u0.hypot(b);
    let s1 = u1.hypot(b);
    let x = (t - t_ret) * (u0 + u1) / (s0 * s1 * (s0 + s1));
    if rho2 == 0.0 {
        return Vec3::new(x, 0.0, 0.0);
    }
    let perp = if v == 0.0 {
        // static limit of the expression below
        (t - t_ret) * radius / (s0 * s0 * s0)
    } else {
        let theta0 = u0.atan2(b);
        let dtheta = (b * (u1 - u0)).atan2(b * b + u0 * u1);
        let mid = theta0 + 0.5 * dtheta;
        -2.0 * mid.cos() * (0.5 * dtheta).sin() / (radius * rho2 * eps * v)
    };
    Vec3::new(x, perp * e.y, perp * e.z)
}

fn check_interval(t_ret: f64, t: f64) -> Result<()> {
    if !(t_ret.is_finite() && t.is_finite()) {
        return Err(Error::invalid("t", "non-finite integration limits"));
    }
    if t < t_ret {
        return Err(Error::invalid(
            "t",
            format!("upper limit {t} precedes retarded time {t_ret}"),
        ));
    }
    Ok(())
}

/// Lower bound on `|r_x - R_x(s)|` over `[lo, hi]` via the Lipschitz bound
/// `|Ṙ| <= c`, refined by bisection where the bound is inconclusive.
fn min_axial_gap(traj: &Trajectory, rx: f64, lo: f64, hi: f64, threshold: f64, depth: u32) -> f64 {
    let g_lo = rx - traj.position_x(lo);
    let g_hi = rx - traj.position_x(hi);
    if g_lo == 0.0 || g_hi == 0.0 || g_lo.signum() != g_hi.signum() {
        return 0.0;
    }
    let vmax = traj.max_speed_ratio() * traj.c();
    let bound = 0.5 * (g_lo.abs() + g_hi.abs() - vmax * (hi - lo));
    if bound > threshold || depth == 0 {
        return bound.max(0.0);
    }
    let mid = 0.5 * (lo + hi);
    min_axial_gap(traj, rx, lo, mid, threshold, depth - 1).min(min_axial_gap(
        traj,
        rx,
        mid,
        hi,
        threshold,
        depth - 1,
    ))
}

/// Fails when the charge comes within `delta_min` of the observer on `[t_ret, t]`.
pub fn check_clearance(
    traj: &Trajectory,
    r: Vec3,
    t_ret: f64,
    t: f64,
    delta_min: f64,
) -> Result<()> {
    let rho = r.y.hypot(r.z);
    if rho >= delta_min {
        return Ok(());
    }
    let (lo, hi) = match traj.period() {
        // one full period covers every position of a bounded oscillation
        Some(p) if matches!(traj.motion(), Motion::Oscillatory { .. }) && t - t_ret > p => {
            (t_ret, t_ret + p)
        }
        _ => (t_ret, t),
    };
    let gap = min_axial_gap(traj, r.x, lo, hi, delta_min, 48);
    let dist = gap.hypot(rho);
    if dist < delta_min {
        return Err(Error::ChargeCrossesObserver { distance: dist });
    }
    Ok(())
}

pub fn integrate_tail(
    traj: &Trajectory,
    t_ret: f64,
    t: f64,
    r: Vec3,
    opts: &TailOptions,
) -> Result<IntegralResult> {
    let strategy = match traj.motion() {
        Motion::Static | Motion::Uniform { .. } => Strategy::ClosedForm,
        Motion::Oscillatory { .. } if traj.period().is_some() => Strategy::PeriodChunked,
        Motion::Oscillatory { .. } => Strategy::ClosedForm,
        Motion::Combined { .. } if traj.period().is_some() => Strategy::DifferenceTrick,
        Motion::Combined { .. } => Strategy::ClosedForm,
    };
    integrate_tail_with(strategy, traj, t_ret, t, r, opts)
}

/// Evaluates the tail integral with an explicitly chosen strategy.
pub fn integrate_tail_with(
    strategy: Strategy,
    traj: &Trajectory,
    t_ret: f64,
    t: f64,
    r: Vec3,
    opts: &TailOptions,
) -> Result<IntegralResult> {
    check_interval(t_ret, t)?;
    check_clearance(traj, r, t_ret, t, opts.delta_min)?;
    match strategy {
        Strategy::ClosedForm => closed_form(traj, t_ret, t, r),
        Strategy::Adaptive => Ok(adaptive(traj, t_ret, t, r, opts)),
        Strategy::PeriodChunked => Ok(period_chunked_unchecked(traj, t_ret, t, r, opts)),
        Strategy::DifferenceTrick => Ok(difference_trick_unchecked(traj, t_ret, t, r, opts)),
    }
}

/// Closed forms for orbits that move uniformly (or not at all) on the
/// interval. Oscillatory orbits with zero amplitude or frequency are static.
fn closed_form(traj: &Trajectory, t_ret: f64, t: f64, r: Vec3) -> Result<IntegralResult> {
    let (v, heading) = match traj.motion() {
        Motion::Static => (0.0, Heading::Forward),
        Motion::Uniform { heading, speed } => (speed, heading),
        Motion::Oscillatory { .. } if traj.period().is_none() => (0.0, Heading::Forward),
        Motion::Combined { heading, speed, .. } if traj.period().is_none() => (speed, heading),
        m => {
            return Err(Error::invalid(
                "strategy",
                format!("no closed form for {} motion", m.name()),
            ))
        }
    };
    // a zero-amplitude oscillation still carries a constant offset of 0,
    // so the orbit is exactly R_x = ε v t'
    let radius = r.norm();
    let e = r.normalized().unwrap_or(Vec3::X);
    let value = uniform_closed_form(v, heading, e, radius, t_ret, t);
    let scale = (t - t_ret) / (radius * radius).max(f64::MIN_POSITIVE);
    Ok(IntegralResult {
        value,
        abs_error: 64.0 * f64::EPSILON * scale.max(value.norm()),
        strategy: Strategy::ClosedForm,
    })
}

fn panel_width(traj: &Trajectory, t_ret: f64, t: f64) -> f64 {
    let span = (t - t_ret).max(f64::MIN_POSITIVE);
    match traj.period() {
        Some(p) => (0.25 * p).min(span / 16.0).max(span / 4_000_000.0),
        None => span / 16.0,
    }
}

/// Brute-force adaptive quadrature over the whole interval.
///
/// Cost grows linearly with `t - t_ret`; used as a reference for the
/// structured strategies.
pub fn adaptive(
    traj: &Trajectory,
    t_ret: f64,
    t: f64,
    r: Vec3,
    opts: &TailOptions,
) -> IntegralResult {
    let est = integrate_panels(
        opts.exec,
        |tp| integrand(traj, r, tp),
        t_ret,
        t,
        panel_width(traj, t_ret, t),
        Tolerance::new(f64::MIN_POSITIVE, opts.rel_tol),
    );
    IntegralResult {
        value: est.value,
        abs_error: est.abs_error,
        strategy: Strategy::Adaptive,
    }
}

/// Oscillatory orbit: `t - t_ret = N·T + Δt`, the integral is `N` times a
/// single period integral plus the integral over the remaining `Δt`.
pub fn period_chunked(
    traj: &Trajectory,
    t_ret: f64,
    t: f64,
    r: Vec3,
    opts: &TailOptions,
) -> Result<IntegralResult> {
    if !matches!(traj.motion(), Motion::Oscillatory { .. }) || traj.period().is_none() {
        return Err(Error::invalid(
            "trajectory",
            "period chunking needs an oscillating orbit",
        ));
    }
    check_interval(t_ret, t)?;
    check_clearance(traj, r, t_ret, t, opts.delta_min)?;
    Ok(period_chunked_unchecked(traj, t_ret, t, r, opts))
}

fn period_chunked_unchecked(
    traj: &Trajectory,
    t_ret: f64,
    t: f64,
    r: Vec3,
    opts: &TailOptions,
) -> IntegralResult {
    let period = traj.period().expect("oscillating orbit");
    let span = t - t_ret;
    let n = (span / period).floor();
    let rest = (span - n * period).max(0.0);
    let f = |tp: f64| integrand(traj, r, tp);
    let tol = Tolerance::new(f64::MIN_POSITIVE, opts.rel_tol);
    let (mut value, mut abs_error) = (Vec3::ZERO, 0.0);
    if n > 0.0 {
        let one = integrate_panels(opts.exec, f, t_ret, t_ret + period, period / 8.0, tol);
        value = one.value * n;
        abs_error = one.abs_error * n;
    }
    // the integrand is T-periodic, so [t_ret + N T, t] maps onto [t_ret, t_ret + Δt]
    let (lo, hi) = if n > 0.0 {
        (t_ret, t_ret + rest)
    } else {
        (t_ret, t)
    };
    let tail = integrate_panels(opts.exec, f, lo, hi, period / 8.0, tol);
    IntegralResult {
        value: value + tail.value,
        abs_error: abs_error + tail.abs_error,
        strategy: Strategy::PeriodChunked,
    }
}

/// Combined orbit: closed-form uniform-drift integral plus the quadrature of
/// the difference integrand, whose oscillation amplitude decays like `t'⁻³`.
pub fn difference_trick(
    traj: &Trajectory,
    t_ret: f64,
    t: f64,
    r: Vec3,
    opts: &TailOptions,
) -> Result<IntegralResult> {
    if !matches!(traj.motion(), Motion::Combined { .. }) {
        return Err(Error::invalid(
            "trajectory",
            "difference trick needs a combined orbit",
        ));
    }
    check_interval(t_ret, t)?;
    check_clearance(traj, r, t_ret, t, opts.delta_min)?;
    Ok(difference_trick_unchecked(traj, t_ret, t, r, opts))
}

fn difference_trick_unchecked(
    traj: &Trajectory,
    t_ret: f64,
    t: f64,
    r: Vec3,
    opts: &TailOptions,
) -> IntegralResult {
    let Motion::Combined {
        heading,
        speed,
        amplitude,
        ..
    } = traj.motion()
    else {
        unreachable!("difference trick dispatched on a non-combined orbit")
    };
    let radius = r.norm();
    let e = r.normalized().unwrap_or(Vec3::X);
    let uniform = uniform_closed_form(speed, heading, e, radius, t_ret, t);
    if amplitude == 0.0 || t == t_ret {
        return IntegralResult {
            value: uniform,
            abs_error: 64.0 * f64::EPSILON * uniform.norm(),
            strategy: Strategy::DifferenceTrick,
        };
    }
    let width = traj.period().map_or((t - t_ret) / 16.0, |p| 0.5 * p);
    let scale = uniform
        .norm()
        .max((t - t_ret) / (radius + amplitude).powi(2));
    let residual = integrate_panels(
        opts.exec,
        |tp| difference_integrand(traj, r, tp),
        t_ret,
        t,
        width,
        Tolerance::new(opts.rel_tol * scale, opts.rel_tol),
    );
    IntegralResult {
        value: uniform + residual.value,
        abs_error: residual.abs_error + 64.0 * f64::EPSILON * uniform.norm(),
        strategy: Strategy::DifferenceTrick,
    }
}

/// `G = ∫_{t_ret}^{t} dt' / |r - R(t')|`, the scalar whose gradient links the
/// two gauges.
pub fn potential_time_integral(
    traj: &Trajectory,
    t_ret: f64,
    t: f64,
    r: Vec3,
    opts: &TailOptions,
) -> f64 {
    integrate_panels(
        opts.exec,
        |tp| 1.0 / (r - traj.position(tp)).norm(),
        t_ret,
        t,
        panel_width(traj, t_ret, t),
        Tolerance::new(f64::MIN_POSITIVE, opts.rel_tol.min(1e-13)),
    )
    .value
}

/// Plain adaptive integral without panelling; kept for short intervals.
pub fn adaptive_single(traj: &Trajectory, t_ret: f64, t: f64, r: Vec3, tol: Tolerance) -> Vec3 {
    integrate(|tp| integrand(traj, r, tp), t_ret, t, tol).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// The antiderivatives exactly as usually printed, no rearrangement.
    fn textbook_uniform(v: f64, eps: f64, e: Vec3, r: f64, t_ret: f64, t: f64) -> Vec3 {
        let s = |tt: f64| (r * r + tt * tt * v * v - 2.0 * r * eps * e.x * v * tt).sqrt();
        let x = (1.0 / (eps * v)) * (1.0 / s(t) - 1.0 / s(t_ret));
        let br = |tt: f64| (r * e.x - eps * v * tt) / s(tt);
        let pre = -1.0 / (r * eps * v * (1.0 - e.x * e.x));
        Vec3::new(
            x,
            pre * e.y * (br(t) - br(t_ret)),
            pre * e.z * (br(t) - br(t_ret)),
        )
    }

    #[test]
    fn static_constant_integrand() {
        let s = Trajectory::stationary(1.0).unwrap();
        let res = integrate_tail(
            &s,
            10.0,
            20.0,
            Vec3::new(0.0, 0.0, 10.0),
            &TailOptions::default(),
        )
        .unwrap();
        assert_eq!(res.strategy, Strategy::ClosedForm);
        assert!((res.value - Vec3::new(0.0, 0.0, 0.1)).norm() < 1e-16);
    }

    #[test]
    fn uniform_zero_interval() {
        let v = uniform_closed_form(0.5, Heading::Forward, Vec3::Z, 100.0, 3.0, 3.0);
        assert_eq!(v, Vec3::ZERO);
    }

    #[test]
    fn uniform_known_value() {
        let v = uniform_closed_form(0.5, Heading::Forward, Vec3::Z, 100.0, 0.0, 100.0);
        let expected =
            (1.0 / 0.5) * (1.0 / (100.0f64.powi(2) + 50.0f64.powi(2)).sqrt() - 1.0 / 100.0);
        assert!((v.x - expected).abs() < 1e-16);
        let u = Trajectory::uniform(Heading::Forward, 0.5, 1.0).unwrap();
        let brute = adaptive(
            &u,
            0.0,
            100.0,
            Vec3::new(0.0, 0.0, 100.0),
            &TailOptions::default(),
        );
        assert!((brute.value - v).norm() < 1e-12);
    }

    #[test]
    fn uniform_on_axis_transverse_vanishes() {
        let v = uniform_closed_form(0.4, Heading::Backward, Vec3::X, 50.0, -10.0, 40.0);
        assert_eq!(v.y, 0.0);
        assert_eq!(v.z, 0.0);
        // near-axis limit is continuous
        let e = Vec3::new(1.0, 1e-7, 0.0).normalized().unwrap();
        let w = uniform_closed_form(0.4, Heading::Backward, e, 50.0, -10.0, 40.0);
        assert!((w.x - v.x).abs() < 1e-12 * v.x.abs());
        assert!(w.y.abs() < 1e-8);
    }

    #[test]
    fn stable_form_matches_textbook_form() {
        for &(v, eps, ex) in &[
            (0.5, 1.0, 0.3),
            (0.2, -1.0, -0.7),
            (0.9, 1.0, 0.0),
            (0.05, -1.0, 0.95),
        ] {
            let ez = (1.0 - ex * ex) * 0.6f64;
            let ey = (1.0 - ex * ex - ez * ez).sqrt();
            let e = Vec3::new(ex, ey, ez);
            let heading = Heading::from_sign(eps).unwrap();
            let a = uniform_closed_form(v, heading, e, 37.0, -5.0, 60.0);
            let b = textbook_uniform(v, eps, e, 37.0, -5.0, 60.0);
            assert!((a - b).norm() < 1e-13 * b.norm(), "{a} vs {b}");
        }
    }

    #[test]
    fn period_chunked_without_full_periods_is_plain_quadrature() {
        let o = Trajectory::oscillatory(1.0, 1.0, 2.0).unwrap();
        let r = Vec3::new(2.0, 1.0, 3.0);
        let opts = TailOptions::default();
        let pc = period_chunked(&o, 0.0, 4.0, r, &opts).unwrap();
        let br = adaptive(&o, 0.0, 4.0, r, &opts);
        assert!((pc.value - br.value).norm() < 1e-13);
    }

    #[test]
    fn period_chunked_five_periods() {
        let o = Trajectory::oscillatory(1.0, 1.0, 2.0).unwrap();
        let r = Vec3::new(0.0, 0.0, 30.0);
        let opts = TailOptions::default();
        let pc = period_chunked(&o, 0.0, 10.0 * PI, r, &opts).unwrap();
        let one = adaptive_single(&o, 0.0, 2.0 * PI, r, Tolerance::new(1e-16, 1e-14));
        let br = adaptive(&o, 0.0, 10.0 * PI, r, &opts);
        assert!((pc.value - one * 5.0).norm() < 1e-10);
        assert!((pc.value - br.value).norm() < 1e-10);
    }

    #[test]
    fn difference_trick_degenerate_amplitude() {
        let c = Trajectory::combined(Heading::Forward, 0.5, 0.0, 1.0, 1.0).unwrap();
        let r = Vec3::new(3.0, 4.0, 12.0);
        let d = difference_trick(&c, -2.0, 30.0, r, &TailOptions::default()).unwrap();
        let e = r.normalized().unwrap();
        assert_eq!(
            d.value,
            uniform_closed_form(0.5, Heading::Forward, e, 13.0, -2.0, 30.0)
        );
    }

    #[test]
    fn difference_trick_matches_brute_force() {
        let c = Trajectory::combined(Heading::Forward, 0.5, 0.5, 0.8, 1.0).unwrap();
        let r = Vec3::new(5.0, -3.0, 20.0);
        let opts = TailOptions::default();
        let d = difference_trick(&c, 1.0, 60.0, r, &opts).unwrap();
        let b = adaptive(&c, 1.0, 60.0, r, &opts);
        assert!((d.value - b.value).norm() < 1e-9);
    }

    #[test]
    fn crossing_is_rejected() {
        let u = Trajectory::uniform(Heading::Forward, 0.5, 1.0).unwrap();
        let err = integrate_tail(
            &u,
            0.0,
            20.0,
            Vec3::new(5.0, 0.0, 0.0),
            &TailOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::ChargeCrossesObserver { .. }));
        let o = Trajectory::oscillatory(1.0, 0.5, 1.0).unwrap();
        let err = integrate_tail(
            &o,
            0.0,
            500.0,
            Vec3::new(0.5, 0.0, 0.0),
            &TailOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::ChargeCrossesObserver { .. }));
        // far enough along the axis: fine
        assert!(integrate_tail(
            &o,
            0.0,
            500.0,
            Vec3::new(2.0, 0.0, 0.0),
            &TailOptions::default()
        )
        .is_ok());
        assert!(integrate_tail(&u, 3.0, 1.0, Vec3::Z, &TailOptions::default()).is_err());
    }

    #[test]
    fn additivity() {
        let c = Trajectory::combined(Heading::Backward, 0.3, 0.4, 1.2, 1.0).unwrap();
        let r = Vec3::new(-4.0, 6.0, 2.0);
        let opts = TailOptions::default();
        let whole = integrate_tail(&c, 0.0, 25.0, r, &opts).unwrap().value;
        let a = integrate_tail(&c, 0.0, 11.3, r, &opts).unwrap().value;
        let b = integrate_tail(&c, 11.3, 25.0, r, &opts).unwrap().value;
        assert!((whole - (a + b)).norm() < 1e-10);
    }
}
