//! Leading-order far-zone coefficients along null rays, used as oracles for
//! the numerical sweeps.
//!
//! Several of the published expressions carry sign or placement slips. Each
//! one is exposed as a variant in [`Errata`]; the defaults are the variants
//! that agree with direct numerical extrapolation of the full potentials.

use crate::trajectory::Heading;
use crate::Vec3;

/// Below this value of `1 - e_x²` transverse components are taken as zero.
pub const TOL_AXIS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    UniformAc,
    UniformDelta,
    OscAc,
    OscDelta,
    CombinedAc,
    CombinedDelta,
}

/// `coeff · r^power` is the leading far-zone term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingOrder {
    pub coeff: Vec3,
    pub power: i32,
    pub case: CaseId,
}

impl LeadingOrder {
    pub fn at(&self, r: f64) -> Vec3 {
        self.coeff * r.powi(self.power)
    }
}

/// Radical in the uniform-motion `A_C^x` coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniformRadical {
    /// `√(1 + β² - 2β e_x)`
    AsPrinted,
    /// `√(1 + β² - 2εβ e_x)`, matching the transverse and discrepancy terms.
    WithHeading,
}

/// Sign of the `aω e_x cos(ωt_ret)` term in the combined-motion denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombinedDenominator {
    /// `c - cβε e_x - aω e_x cos(ωt_ret)`
    AsPrinted,
    /// `c - cβε e_x + aω e_x cos(ωt_ret)`
    Flipped,
}

/// Oscillatory `A_C` coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscillatoryAc {
    /// `x: -qaω(1-e_x²)cos / (c + aω cos e_x)`, `⊥: +qaω e_x e_⊥ cos / (…)`
    AsPrinted,
    /// `x: +qaω(1-e_x²)cos / (c - aω cos e_x)`, `⊥: -qaω e_x e_⊥ cos / (…)`
    Corrected,
}

/// Oscillatory discrepancy coefficient of `r⁻²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscillatoryDelta {
    /// `-2qa e_x e sin(ωt_ret)`
    AsPrinted,
    /// `qa sin(ωt_ret) (x̂ - 3 e_x e)`; coincides with the printed form on the axis.
    Corrected,
}

/// Second-order term of the `1/r` expansion of the oscillatory integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesSecondOrder {
    /// `-(3a²/2r²) sin²(ωt') (3 - 5e_x²)`; leaves an `r⁻²` remainder off the axis.
    AsPrinted,
    /// `-(3a²/2r²) sin²(ωt') e_x (3 - 5e_x²)`
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Errata {
    pub uniform_radical: UniformRadical,
    pub combined_denominator: CombinedDenominator,
    pub oscillatory_ac: OscillatoryAc,
    pub oscillatory_delta: OscillatoryDelta,
    pub series_second_order: SeriesSecondOrder,
}

impl Errata {
    pub const AS_PRINTED: Errata = Errata {
        uniform_radical: UniformRadical::AsPrinted,
        combined_denominator: CombinedDenominator::AsPrinted,
        oscillatory_ac: OscillatoryAc::AsPrinted,
        oscillatory_delta: OscillatoryDelta::AsPrinted,
        series_second_order: SeriesSecondOrder::AsPrinted,
    };

    /// Variants confirmed by numerical extrapolation.
    pub const RESOLVED: Errata = Errata {
        uniform_radical: UniformRadical::WithHeading,
        combined_denominator: CombinedDenominator::AsPrinted,
        oscillatory_ac: OscillatoryAc::Corrected,
        oscillatory_delta: OscillatoryDelta::Corrected,
        series_second_order: SeriesSecondOrder::Corrected,
    };
}

impl Default for Errata {
    fn default() -> Self {
        Errata::RESOLVED
    }
}

fn transverse(e: Vec3, scale: f64) -> (f64, f64) {
    if 1.0 - e.x * e.x < TOL_AXIS {
        (0.0, 0.0)
    } else {
        (scale * e.y, scale * e.z)
    }
}

/// Uniform drift `R_x = εβct`: leading `r⁻¹` coefficient of `A_C`.
pub fn uniform_ac_leading(
    q: f64,
    beta: f64,
    heading: Heading,
    e: Vec3,
    errata: Errata,
) -> LeadingOrder {
    let eps = heading.sign();
    let k = 1.0 - eps * beta * e.x;
    let signed_root = (1.0 + beta * beta - 2.0 * eps * beta * e.x).sqrt();
    let x_root = match errata.uniform_radical {
        UniformRadical::AsPrinted => (1.0 + beta * beta - 2.0 * beta * e.x).sqrt(),
        UniformRadical::WithHeading => signed_root,
    };
    let pre = q / (eps * beta);
    let x = -pre * ((1.0 - beta * beta) / k - 1.0 / x_root);
    let one_m = 1.0 - e.x * e.x;
    let (y, z) = transverse(
        e,
        pre * (e.x - eps * beta) / one_m * (1.0 / k - 1.0 / signed_root),
    );
    LeadingOrder {
        coeff: Vec3::new(x, y, z),
        power: -1,
        case: CaseId::UniformAc,
    }
}

/// Uniform drift: leading `r⁻¹` coefficient of the discrepancy.
pub fn uniform_delta_leading(q: f64, beta: f64, heading: Heading, e: Vec3) -> LeadingOrder {
    let eps = heading.sign();
    let root = (1.0 + beta * beta - 2.0 * eps * beta * e.x).sqrt();
    let pre = q / (eps * beta);
    let x = -pre * (1.0 + eps * beta * e.x - 1.0 / root);
    let one_m = 1.0 - e.x * e.x;
    let (y, z) = transverse(
        e,
        pre / one_m * (e.x - beta * eps * one_m + (eps * beta - e.x) / root),
    );
    LeadingOrder {
        coeff: Vec3::new(x, y, z),
        power: -1,
        case: CaseId::UniformDelta,
    }
}

/// Oscillation `R_x = a sin(ωt)`: leading `r⁻¹` coefficient of `A_C`.
pub fn osc_ac_leading(
    q: f64,
    a: f64,
    omega: f64,
    c: f64,
    t_ret: f64,
    e: Vec3,
    errata: Errata,
) -> LeadingOrder {
    let w = a * omega * (omega * t_ret).cos();
    let (sign, denom) = match errata.oscillatory_ac {
        OscillatoryAc::AsPrinted => (-1.0, c + w * e.x),
        OscillatoryAc::Corrected => (1.0, c - w * e.x),
    };
    let x = sign * q * w * (1.0 - e.x * e.x) / denom;
    let yz = -sign * q * w * e.x / denom;
    LeadingOrder {
        coeff: Vec3::new(x, yz * e.y, yz * e.z),
        power: -1,
        case: CaseId::OscAc,
    }
}

/// Oscillation: leading `r⁻²` coefficient of the discrepancy.
pub fn osc_delta_leading(
    q: f64,
    a: f64,
    e: Vec3,
    t_ret: f64,
    omega: f64,
    errata: Errata,
) -> LeadingOrder {
    let s = (omega * t_ret).sin();
    let coeff = match errata.oscillatory_delta {
        OscillatoryDelta::AsPrinted => e * (-2.0 * q * a * e.x * s),
        OscillatoryDelta::Corrected => (Vec3::X - e * (3.0 * e.x)) * (q * a * s),
    };
    LeadingOrder {
        coeff,
        power: -2,
        case: CaseId::OscDelta,
    }
}

/// Oscillation about a uniformly drifting centre: leading `r⁻¹` coefficient
/// of `A_C` (uniform part plus the oscillatory correction).
#[allow(clippy::too_many_arguments)]
pub fn combined_ac_leading(
    q: f64,
    beta: f64,
    heading: Heading,
    a: f64,
    omega: f64,
    c: f64,
    t_ret: f64,
    e: Vec3,
    errata: Errata,
) -> LeadingOrder {
    let eps = heading.sign();
    let uniform = uniform_ac_leading(q, beta, heading, e, errata).coeff;
    let w = a * omega * (omega * t_ret).cos();
    let k = 1.0 - beta * eps * e.x;
    let osc_term = match errata.combined_denominator {
        CombinedDenominator::AsPrinted => -w * e.x,
        CombinedDenominator::Flipped => w * e.x,
    };
    let denom = k * (c - c * beta * eps * e.x + osc_term);
    let x = q * w * (1.0 - e.x * e.x) / denom;
    let yz = -q * w * e.x / denom;
    LeadingOrder {
        coeff: uniform + Vec3::new(x, yz * e.y, yz * e.z),
        power: -1,
        case: CaseId::CombinedAc,
    }
}

/// Combined motion: the discrepancy has the same leading coefficient as
/// uniform drift at the same speed.
pub fn combined_delta_leading(q: f64, beta: f64, heading: Heading, e: Vec3) -> LeadingOrder {
    LeadingOrder {
        case: CaseId::CombinedDelta,
        ..uniform_delta_leading(q, beta, heading, e)
    }
}

/// Exact x-integrand `F(t', r)` of the oscillatory tail, scaled by `r²`.
pub fn exact_integrand(a: f64, omega: f64, e_x: f64, tp: f64, r: f64) -> f64 {
    let s = a / r * (omega * tp).sin();
    (e_x - s) / (1.0 - 2.0 * e_x * s + s * s).powf(1.5)
}

/// Three-term `1/r` expansion of [`exact_integrand`]; the remainder is `O(r⁻³)`.
pub fn series_integrand(a: f64, omega: f64, e_x: f64, tp: f64, r: f64) -> f64 {
    series_integrand_variant(a, omega, e_x, tp, r, SeriesSecondOrder::Corrected)
}

pub fn series_integrand_variant(
    a: f64,
    omega: f64,
    e_x: f64,
    tp: f64,
    r: f64,
    variant: SeriesSecondOrder,
) -> f64 {
    let s = (omega * tp).sin();
    let second = match variant {
        SeriesSecondOrder::AsPrinted => 3.0 - 5.0 * e_x * e_x,
        SeriesSecondOrder::Corrected => e_x * (3.0 - 5.0 * e_x * e_x),
    };
    e_x - a / r * s * (1.0 - 3.0 * e_x * e_x) - 1.5 * a * a / (r * r) * s * s * second
}
