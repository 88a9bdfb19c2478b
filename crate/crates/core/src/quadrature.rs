//! Adaptive 21-point Gauss-Kronrod quadrature for scalar and vector
//! integrands, plus a panelled driver for long oscillatory intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use crate::{Exec, Vec3};

/// Values the quadrature can accumulate.
pub trait Integrable:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrable for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrable for Vec3 {
    fn zero() -> Self {
        Vec3::ZERO
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Default::default()
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value)
    }
}

/// One application of the 21-point Kronrod rule with the embedded 10-point
/// Gauss rule for the error estimate.
pub fn gk21<T: Integrable, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Estimate<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = T::zero();
    let mut resabs = fc.magnitude() * WGK[10];
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod = kronrod + (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }
    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((kronrod - gauss) * half).magnitude();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Estimate {
        value,
        abs_error: err,
        evaluations: 21,
    }
}

struct Segment<T> {
    a: f64,
    b: f64,
    est: Estimate<T>,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.est
            .abs_error
            .total_cmp(&o.est.abs_error)
            .then_with(|| o.a.total_cmp(&self.a))
    }
}

/// Globally adaptive bisection on `[a, b]`.
///
/// The returned value is summed in left-to-right segment order, so it only
/// depends on the inputs.
pub fn integrate<T: Integrable, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Estimate<T> {
    if a == b {
        return Estimate {
            value: T::zero(),
            abs_error: 0.0,
            evaluations: 0,
        };
    }
    let first = gk21(&f, a, b);
    let mut evaluations = first.evaluations;
    let mut total_err = first.abs_error;
    let mut total = first.value;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, est: first });
    let mut splits = 0;
    while total_err > tol.target(total.magnitude()) && splits < tol.max_subdivisions {
        let seg = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            heap.push(seg);
            break;
        }
        let left = gk21(&f, seg.a, mid);
        let right = gk21(&f, mid, seg.b);
        evaluations += 42;
        total = total - seg.est.value + left.value + right.value;
        total_err += left.abs_error + right.abs_error - seg.est.abs_error;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            est: left,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            est: right,
        });
        splits += 1;
    }
    let mut segs = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segs.iter().fold(T::zero(), |acc, s| acc + s.est.value);
    let abs_error = segs.iter().map(|s| s.est.abs_error).sum();
    Estimate {
        value,
        abs_error,
        evaluations,
    }
}

/// Splits `[a, b]` into panels no wider than `max_width`, integrates each
/// adaptively (possibly in parallel) and sums them in order.
///
/// The absolute tolerance is shared among panels in proportion to width.
pub fn integrate_panels<T, F>(
    exec: Exec,
    f: F,
    a: f64,
    b: f64,
    max_width: f64,
    tol: Tolerance,
) -> Estimate<T>
where
    T: Integrable,
    F: Fn(f64) -> T + Sync + Send,
{
    let len = b - a;
    if len == 0.0 {
        return integrate(f, a, b, tol);
    }
    let n = ((len.abs() / max_width).ceil() as usize).max(1);
    let h = len / n as f64;
    let panel_tol = Tolerance {
        abs: tol.abs / n as f64,
        rel: tol.rel,
        max_subdivisions: tol.max_subdivisions.min(200),
    };
    let parts = exec.map_range(n, |k| {
        let lo = a + k as f64 * h;
        let hi = if k + 1 == n {
            b
        } else {
            a + (k + 1) as f64 * h
        };
        integrate(&f, lo, hi, panel_tol)
    });
    let mut out = Estimate {
        value: T::zero(),
        abs_error: 0.0,
        evaluations: 0,
    };
    for p in parts {
        out.value = out.value + p.value;
        out.abs_error += p.abs_error;
        out.evaluations += p.evaluations;
    }
    out
}
