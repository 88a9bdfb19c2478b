//! Numerical arbitration between the printed leading-order coefficients and
//! their corrected variants, away from the special directions where the
//! variants coincide.

use std::f64::consts::FRAC_PI_2;

use lwgauge::asymptotics::{richardson_coefficient, sweep, NullRaySweep, SweepSpec};
use lwgauge::closed_forms::*;
use lwgauge::coulomb::EvalOptions;
use lwgauge::trajectory::{Heading, Trajectory};
use lwgauge::{Exec, Vec3};

fn run(traj: &Trajectory, t_ret: f64, e: Vec3) -> NullRaySweep {
    let spec = SweepSpec::default_for(traj, t_ret, e);
    sweep(traj, &spec, 1.0, &EvalOptions::default(), Exec::Parallel).unwrap()
}

fn extrapolate(
    s: &NullRaySweep,
    pick: impl Fn(&lwgauge::coulomb::PotentialSample) -> f64,
    power: f64,
) -> f64 {
    richardson_coefficient(&s.radii, &s.series(pick), power).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

const OBLIQUE: Vec3 = Vec3 {
    x: 0.6,
    y: 0.0,
    z: 0.8,
};

#[test]
fn uniform_radical_carries_heading() {
    let beta = 0.5;
    let traj = Trajectory::uniform(Heading::Backward, beta, 1.0).unwrap();
    let got = extrapolate(&run(&traj, 0.0, OBLIQUE), |p| p.a_c.x, -1.0);
    let resolved = uniform_ac_leading(1.0, beta, Heading::Backward, OBLIQUE, Errata::RESOLVED)
        .coeff
        .x;
    let printed = uniform_ac_leading(1.0, beta, Heading::Backward, OBLIQUE, Errata::AS_PRINTED)
        .coeff
        .x;
    assert!(rel(got, resolved) < 1e-6, "{got} vs {resolved}");
    assert!(rel(got, printed) > 0.05, "{got} vs {printed}");
}

#[test]
fn uniform_oracles_reflect_consistently() {
    for beta in [0.1, 0.4, 0.8] {
        for e in [
            OBLIQUE,
            Vec3::new(-0.3, 0.4, (0.75f64).sqrt()),
            Vec3::new(0.9, (0.19f64).sqrt(), 0.0),
        ] {
            let mirrored = Vec3::new(-e.x, e.y, e.z);
            for f in [
                |b, h, e| uniform_ac_leading(1.0, b, h, e, Errata::RESOLVED).coeff,
                |b, h, e| uniform_delta_leading(1.0, b, h, e).coeff,
            ] {
                let fwd: Vec3 = f(beta, Heading::Forward, e);
                let bwd: Vec3 = f(beta, Heading::Backward, mirrored);
                assert!((fwd.x + bwd.x).abs() < 1e-14, "{fwd} {bwd}");
                assert!((fwd.y - bwd.y).abs() < 1e-14 && (fwd.z - bwd.z).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn combined_denominator_as_printed() {
    let (beta, a, w, c, t_ret) = (0.3, 0.2, 1.0, 1.0, 0.0);
    let traj = Trajectory::combined(Heading::Forward, beta * c, a, w, c).unwrap();
    let got = extrapolate(&run(&traj, t_ret, OBLIQUE), |p| p.a_c.x, -1.0);
    let with = |d| {
        let errata = Errata {
            combined_denominator: d,
            ..Errata::RESOLVED
        };
        combined_ac_leading(1.0, beta, Heading::Forward, a, w, c, t_ret, OBLIQUE, errata)
            .coeff
            .x
    };
    let printed = with(CombinedDenominator::AsPrinted);
    let flipped = with(CombinedDenominator::Flipped);
    assert!(rel(got, printed) < 0.02, "{got} vs {printed}");
    assert!(rel(got, flipped) > 0.02, "{got} vs {flipped}");
}

#[test]
fn combined_delta_equals_uniform_off_axis() {
    let (beta, a, w) = (0.3, 0.2, 1.0);
    let traj = Trajectory::combined(Heading::Forward, beta, a, w, 1.0).unwrap();
    let s = run(&traj, 0.7, OBLIQUE);
    let want = uniform_delta_leading(1.0, beta, Heading::Forward, OBLIQUE).coeff;
    for k in [0, 2] {
        let got = extrapolate(&s, |p| p.delta_a[k], -1.0);
        assert!(
            rel(got, want[k]) < 0.02,
            "component {k}: {got} vs {}",
            want[k]
        );
    }
}

#[test]
fn oscillatory_ac_sign() {
    let (a, w, c, t_ret) = (1.0, 1.0, 2.0, 0.3);
    let traj = Trajectory::oscillatory(a, w, c).unwrap();
    let s = run(&traj, t_ret, OBLIQUE);
    let resolved = osc_ac_leading(1.0, a, w, c, t_ret, OBLIQUE, Errata::RESOLVED).coeff;
    let printed = osc_ac_leading(1.0, a, w, c, t_ret, OBLIQUE, Errata::AS_PRINTED).coeff;
    for k in [0, 2] {
        let got = extrapolate(&s, |p| p.a_c[k], -1.0);
        assert!(
            rel(got, resolved[k]) < 0.01,
            "component {k}: {got} vs {}",
            resolved[k]
        );
        assert!(
            rel(got, printed[k]) > 0.5,
            "component {k}: {got} vs {}",
            printed[k]
        );
    }
}

#[test]
fn oscillatory_delta_off_axis() {
    let (a, w, c) = (1.0, 1.0, 2.0);
    let t_ret = FRAC_PI_2 / w;
    let traj = Trajectory::oscillatory(a, w, c).unwrap();
    let s = run(&traj, t_ret, OBLIQUE);
    let resolved = osc_delta_leading(1.0, a, OBLIQUE, t_ret, w, Errata::RESOLVED).coeff;
    let printed = osc_delta_leading(1.0, a, OBLIQUE, t_ret, w, Errata::AS_PRINTED).coeff;
    for k in [0, 2] {
        let got = extrapolate(&s, |p| p.delta_a[k], -2.0);
        assert!(
            rel(got, resolved[k]) < 0.02,
            "component {k}: {got} vs {}",
            resolved[k]
        );
        assert!(
            rel(got, printed[k]) > 0.1,
            "component {k}: {got} vs {}",
            printed[k]
        );
    }
}

#[test]
fn oscillatory_delta_variants_agree_on_axis() {
    for t_ret in [0.2, 1.0, 2.5] {
        let p = osc_delta_leading(0.7, 1.3, Vec3::X, t_ret, 0.9, Errata::AS_PRINTED).coeff;
        let r = osc_delta_leading(0.7, 1.3, Vec3::X, t_ret, 0.9, Errata::RESOLVED).coeff;
        assert!((p - r).norm() < 1e-15);
    }
}
