//! Null-ray sweeps at fixed retarded time, power-law fits, Richardson
//! extrapolation of leading coefficients, and the order comparison between
//! the Coulomb-gauge potential and the discrepancy.

use std::io::{Read, Write};

use crate::coulomb::{sample_resolved, EvalOptions, ObservationEvent, PotentialSample};
use crate::retarded::solve_retarded;
use crate::trajectory::Trajectory;
use crate::{Error, Exec, Result, Vec3};

/// Column order of the sweep CSV.
pub const SWEEP_COLUMNS: [&str; 17] = [
    "r", "t", "t_ret", "phi_L", "phi_C", "ALx", "ALy", "ALz", "ACx", "ACy", "ACz", "dAx", "dAy",
    "dAz", "simX", "simY", "simZ",
];

pub const MIN_POINTS: usize = 8;
/// Fits with a larger log-log RMS residual are not clean power laws.
pub const MAX_RESIDUAL_RMS: f64 = 0.02;
/// Components below this fraction of the largest sampled magnitude are not fitted.
pub const MAGNITUDE_FLOOR: f64 = 1e-13;
pub const SAME_ORDER_GAP: f64 = 0.3;
pub const HIGHER_ORDER_GAP: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub t_ret: f64,
    pub direction: Vec3,
    pub r0: f64,
    pub growth: f64,
    pub count: usize,
}

impl SweepSpec {
    /// Four decades: `r0 = 10³ · L`, growth 2, twelve radii.
    pub fn default_for(traj: &Trajectory, t_ret: f64, direction: Vec3) -> Self {
        SweepSpec {
            t_ret,
            direction,
            r0: 1e3 * traj.characteristic_length(),
            growth: 2.0,
            count: 12,
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| self.r0 * self.growth.powi(k as i32))
            .collect()
    }

    pub fn validate(&self, traj: &Trajectory) -> Result<()> {
        if self.count < MIN_POINTS {
            return Err(Error::invalid(
                "sweep.count",
                format!("need at least {MIN_POINTS}, got {}", self.count),
            ));
        }
        if !(self.growth > 1.0 && self.growth.is_finite()) {
            return Err(Error::invalid(
                "sweep.growth",
                format!("must exceed 1, got {}", self.growth),
            ));
        }
        let near = 100.0 * traj.characteristic_length();
        if !(self.r0 >= near && self.r0.is_finite()) {
            return Err(Error::invalid(
                "sweep.r0",
                format!("{} lies inside the near zone (need >= {near})", self.r0),
            ));
        }
        if self.direction.normalized().is_none() {
            return Err(Error::invalid("sweep.direction", "zero direction vector"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullRaySweep {
    pub trajectory: Trajectory,
    pub spec: SweepSpec,
    pub direction: Vec3,
    pub radii: Vec<f64>,
    pub samples: Vec<PotentialSample>,
    /// Largest `|t_ret(t, r) - t_ret| / max(1, t - t_ret)` over the samples.
    pub closure_error: f64,
}

pub const CLOSURE_TOL: f64 = 1e-10;

pub fn sweep(
    traj: &Trajectory,
    spec: &SweepSpec,
    q: f64,
    opts: &EvalOptions,
    exec: Exec,
) -> Result<NullRaySweep> {
    spec.validate(traj)?;
    let direction = spec.direction.normalized().expect("validated");
    let radii = spec.radii();
    let evaluated = exec.map_slice(&radii, |&radius| -> Result<(PotentialSample, f64)> {
        let ev = ObservationEvent::NullRay {
            t_ret: spec.t_ret,
            direction,
            radius,
        }
        .resolve(traj)?;
        let back = solve_retarded(traj, ev.t, ev.r)?;
        let closure = (back.t_ret - spec.t_ret).abs() / (ev.t - ev.t_ret).max(1.0);
        Ok((sample_resolved(traj, ev, q, opts)?, closure))
    });
    let mut samples = Vec::with_capacity(radii.len());
    let mut closure_error: f64 = 0.0;
    for item in evaluated {
        let (s, c) = item?;
        samples.push(s);
        closure_error = closure_error.max(c);
    }
    Ok(NullRaySweep {
        trajectory: *traj,
        spec: *spec,
        direction,
        radii,
        samples,
        closure_error,
    })
}

impl NullRaySweep {
    pub fn closure_ok(&self) -> bool {
        self.closure_error <= CLOSURE_TOL
    }

    pub fn series(&self, pick: impl Fn(&PotentialSample) -> f64) -> Vec<f64> {
        self.samples.iter().map(pick).collect()
    }

    pub fn to_table(&self) -> SweepTable {
        let rows = self
            .radii
            .iter()
            .zip(&self.samples)
            .map(|(&r, s)| {
                vec![
                    r,
                    s.t,
                    s.t_ret,
                    s.phi_l,
                    s.phi_c,
                    s.a_l.x,
                    s.a_l.y,
                    s.a_l.z,
                    s.a_c.x,
                    s.a_c.y,
                    s.a_c.z,
                    s.delta_a.x,
                    s.delta_a.y,
                    s.delta_a.z,
                    s.a_simplified.x,
                    s.a_simplified.y,
                    s.a_simplified.z,
                ]
            })
            .collect();
        SweepTable {
            headers: SWEEP_COLUMNS.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }
}

/// Numeric table with named columns, read from or written to CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Comma-separated, `LowerExp` shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:e}")))
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers: Vec<String> = rdr
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let row = rec
                .iter()
                .enumerate()
                .map(|(col, field)| {
                    field.parse::<f64>().map_err(|_| {
                        Error::Parse(format!(
                            "row {}: column `{}` is not a number: {field:?}",
                            line + 2,
                            headers.get(col).map_or("?", String::as_str)
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(SweepTable { headers, rows })
    }
}

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        Error::Io(e.to_string())
    } else {
        Error::Parse(e.to_string())
    }
}

/// `|f(r)| ≈ coefficient · r^exponent` from least squares in log-log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    /// Signed: carries the common sign of the fitted values.
    pub coefficient: f64,
    pub r_window: (f64, f64),
    pub residual_rms: f64,
}

impl PowerLawFit {
    pub fn is_clean(&self) -> bool {
        self.residual_rms <= MAX_RESIDUAL_RMS
    }
}

pub fn fit_power_law(radii: &[f64], values: &[f64]) -> Result<PowerLawFit> {
    if radii.len() != values.len() {
        return Err(Error::DegenerateInput(format!(
            "{} radii but {} values",
            radii.len(),
            values.len()
        )));
    }
    if radii.len() < MIN_POINTS {
        return Err(Error::DegenerateInput(format!(
            "need at least {MIN_POINTS} points, got {}",
            radii.len()
        )));
    }
    if values.iter().chain(radii).any(|v| !v.is_finite()) || radii.iter().any(|&r| r <= 0.0) {
        return Err(Error::DegenerateInput(
            "non-finite value or non-positive radius".into(),
        ));
    }
    if values.contains(&0.0) {
        return Err(Error::DegenerateInput("zero value".into()));
    }
    let sign = values[0].signum();
    if values.iter().any(|v| v.signum() != sign) {
        return Err(Error::SignChange);
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("all radii equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - icpt - slope * x).powi(2))
        .sum();
    let lo = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().copied().fold(0.0, f64::max);
    Ok(PowerLawFit {
        exponent: slope,
        coefficient: sign * icpt.exp(),
        r_window: (lo, hi),
        residual_rms: (rss / n).sqrt(),
    })
}

/// Limit of `r^(-power) · f(r)` for geometrically spaced radii, assuming
/// corrections in integer powers of `1/r`.
///
/// Builds the Richardson table up to three eliminations and returns the
/// entry whose last two estimates agree best.
pub fn richardson_coefficient(radii: &[f64], values: &[f64], power: f64) -> Result<f64> {
    if radii.len() != values.len() || radii.len() < 3 {
        return Err(Error::DegenerateInput(
            "need at least 3 matching points".into(),
        ));
    }
    let g = radii[1] / radii[0];
    let geometric = radii
        .windows(2)
        .all(|w| ((w[1] / w[0]) - g).abs() <= 1e-9 * g);
    if g.is_nan() || g <= 1.0 || !geometric {
        return Err(Error::DegenerateInput(
            "radii must grow geometrically".into(),
        ));
    }
    let mut level: Vec<f64> = radii
        .iter()
        .zip(values)
        .map(|(r, v)| v * r.powf(-power))
        .collect();
    let spread = |l: &[f64]| {
        let n = l.len();
        (l[n - 1] - l[n - 2]).abs()
    };
    let mut best = (spread(&level), level[level.len() - 1]);
    for j in 1..=3 {
        if level.len() < 3 {
            break;
        }
        let gj = g.powi(j);
        level = level
            .windows(2)
            .map(|w| (gj * w[1] - w[0]) / (gj - 1.0))
            .collect();
        let s = spread(&level);
        if s < best.0 {
            best = (s, level[level.len() - 1]);
        }
    }
    let (spread, value) = best;
    if !value.is_finite() || spread > 0.1 * value.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::ExtrapolationDiverged);
    }
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderVerdict {
    SameOrder,
    HigherOrder,
    /// Exponent gap between the two thresholds.
    Inconclusive,
}

impl OrderVerdict {
    pub fn label(self) -> &'static str {
        match self {
            OrderVerdict::SameOrder => "SAME_ORDER",
            OrderVerdict::HigherOrder => "HIGHER_ORDER",
            OrderVerdict::Inconclusive => "INCONCLUSIVE",
        }
    }

    pub fn classify(ac_exponent: f64, delta_exponent: f64) -> Self {
        let gap = ac_exponent - delta_exponent;
        if gap.abs() < SAME_ORDER_GAP {
            OrderVerdict::SameOrder
        } else if gap >= HIGHER_ORDER_GAP {
            OrderVerdict::HigherOrder
        } else {
            OrderVerdict::Inconclusive
        }
    }
}

/// Fit outcome for one quantity; `Err` carries the reason it was skipped.
pub type FitOutcome = std::result::Result<PowerLawFit, String>;

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentVerdict {
    pub label: String,
    pub ac: FitOutcome,
    pub delta: FitOutcome,
    /// `None` when either fit was skipped.
    pub verdict: Option<OrderVerdict>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictReport {
    pub components: Vec<ComponentVerdict>,
    /// Comparison of `|A_C|` against `|Δ[A]|`.
    pub magnitude: ComponentVerdict,
}

impl VerdictReport {
    pub fn overall(&self) -> OrderVerdict {
        self.magnitude.verdict.unwrap_or(OrderVerdict::Inconclusive)
    }
}

/// Fits a series unless it sits below the magnitude floor.
pub fn fit_with_floor(radii: &[f64], values: &[f64], reference_max: f64) -> FitOutcome {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max < MAGNITUDE_FLOOR * reference_max || max == 0.0 {
        return Err("below magnitude floor".into());
    }
    fit_power_law(radii, values).map_err(|e| e.to_string())
}

pub fn compare_orders(
    label: &str,
    radii: &[f64],
    ac: &[f64],
    delta: &[f64],
    ac_ref: f64,
    delta_ref: f64,
) -> ComponentVerdict {
    let ac = fit_with_floor(radii, ac, ac_ref);
    let delta = fit_with_floor(radii, delta, delta_ref);
    let verdict = match (&ac, &delta) {
        (Ok(a), Ok(d)) => Some(OrderVerdict::classify(a.exponent, d.exponent)),
        _ => None,
    };
    ComponentVerdict {
        label: label.to_string(),
        ac,
        delta,
        verdict,
    }
}

/// Per-component and magnitude verdicts from raw columns.
pub fn verdict_from_columns(radii: &[f64], ac: [&[f64]; 3], delta: [&[f64]; 3]) -> VerdictReport {
    let n = radii.len();
    let norm = |cols: [&[f64]; 3]| -> Vec<f64> {
        (0..n)
            .map(|i| Vec3::new(cols[0][i], cols[1][i], cols[2][i]).norm())
            .collect()
    };
    let ac_mag = norm(ac);
    let delta_mag = norm(delta);
    let ac_ref = ac_mag.iter().fold(0.0f64, |m, v| m.max(*v));
    let delta_ref = delta_mag.iter().fold(0.0f64, |m, v| m.max(*v));
    let components = ["x", "y", "z"]
        .iter()
        .enumerate()
        .map(|(k, l)| compare_orders(l, radii, ac[k], delta[k], ac_ref, delta_ref))
        .collect();
    let magnitude = compare_orders("|.|", radii, &ac_mag, &delta_mag, ac_ref, delta_ref);
    VerdictReport {
        components,
        magnitude,
    }
}

pub fn same_order_verdict(sweep: &NullRaySweep) -> VerdictReport {
    let ac: Vec<Vec<f64>> = (0..3).map(|k| sweep.series(|s| s.a_c[k])).collect();
    let da: Vec<Vec<f64>> = (0..3).map(|k| sweep.series(|s| s.delta_a[k])).collect();
    verdict_from_columns(
        &sweep.radii,
        [&ac[0], &ac[1], &ac[2]],
        [&da[0], &da[1], &da[2]],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radii() -> Vec<f64> {
        (0..12).map(|k| 1e3 * 2f64.powi(k)).collect()
    }

    #[test]
    fn exact_power_laws() {
        let r = radii();
        let f = fit_power_law(&r, &r.iter().map(|x| 3.0 / x).collect::<Vec<_>>()).unwrap();
        assert!((f.exponent + 1.0).abs() < 1e-12);
        assert!((f.coefficient - 3.0).abs() < 1e-9);
        assert!(f.residual_rms < 1e-12);
        let f = fit_power_law(&r, &r.iter().map(|x| -2.0 / (x * x)).collect::<Vec<_>>()).unwrap();
        assert!((f.exponent + 2.0).abs() < 1e-12);
        assert!((f.coefficient + 2.0).abs() < 1e-9);
    }

    #[test]
    fn perturbed_power_law() {
        let r: Vec<f64> = (0..10)
            .map(|k| 1e3 * 2f64.powf(k as f64 * 10.0 / 9.0))
            .collect();
        let v: Vec<f64> = r.iter().map(|x| (3.0 + 1.0 / x) / x).collect();
        let f = fit_power_law(&r, &v).unwrap();
        assert!(f.exponent > -1.05 && f.exponent < -0.95);
    }

    #[test]
    fn fit_errors() {
        let r = radii();
        let mut v: Vec<f64> = r.iter().map(|x| 1.0 / x).collect();
        v[5] = -v[5];
        assert_eq!(fit_power_law(&r, &v), Err(Error::SignChange));
        assert!(matches!(
            fit_power_law(&r[..5], &v[..5]),
            Err(Error::DegenerateInput(_))
        ));
        v[5] = 0.0;
        assert!(matches!(
            fit_power_law(&r, &v),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn richardson_exact_and_corrected() {
        let r = radii();
        let v: Vec<f64> = r.iter().map(|x| 3.0 / x).collect();
        assert!((richardson_coefficient(&r, &v, -1.0).unwrap() - 3.0).abs() < 1e-12);
        let v: Vec<f64> = r
            .iter()
            .map(|x| (-0.7 + 40.0 / x + 900.0 / (x * x)) / x)
            .collect();
        assert!((richardson_coefficient(&r, &v, -1.0).unwrap() + 0.7).abs() < 1e-10);
        let r2: Vec<f64> = vec![1.0, 2.0, 3.5];
        assert!(richardson_coefficient(&r2, &[1.0, 1.0, 1.0], -1.0).is_err());
    }

    #[test]
    fn classification_thresholds() {
        assert_eq!(OrderVerdict::classify(-1.0, -1.02), OrderVerdict::SameOrder);
        assert_eq!(
            OrderVerdict::classify(-1.0, -2.0),
            OrderVerdict::HigherOrder
        );
        assert_eq!(
            OrderVerdict::classify(-1.0, -1.5),
            OrderVerdict::Inconclusive
        );
    }

    #[test]
    fn csv_round_trip() {
        let t = SweepTable {
            headers: vec!["r".into(), "ACx".into()],
            rows: vec![vec![1000.0, 0.1 + 0.2], vec![2000.0, -1e-300]],
        };
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = SweepTable::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, t);
        assert_eq!(
            back.column("ACx").unwrap()[0].to_bits(),
            (0.1f64 + 0.2).to_bits()
        );
        assert_eq!(
            back.column("nope"),
            Err(Error::MissingColumn("nope".into()))
        );
    }
}
