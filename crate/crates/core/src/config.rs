//! Run configuration: a flat `section.key = value` text file.
//!
//! ```text
//! # uniform drift at half the speed of light
//! trajectory.kind = uniform
//! trajectory.epsilon = +1
//! trajectory.v = 0.5
//! physics.c = 1
//! sweep.direction = 0, 0, 1
//! ```
//!
//! Blank lines and `#` comments are ignored. Unknown or repeated keys are
//! errors, reported with their line number.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::asymptotics::{SweepSpec, MIN_POINTS};
use crate::closed_forms::{
    CombinedDenominator, Errata, OscillatoryAc, OscillatoryDelta, SeriesSecondOrder, UniformRadical,
};
use crate::coulomb::{EvalOptions, NConvention};
use crate::grid::GridSpec;
use crate::tail::TailOptions;
use crate::trajectory::{Heading, Motion, Trajectory};
use crate::{Error, Result, Vec3};

/// Accepted keys with a one-line description each.
pub const KEYS: &[(&str, &str)] = &[
    (
        "trajectory.kind",
        "static | uniform | oscillatory | combined",
    ),
    (
        "trajectory.epsilon",
        "drift direction, +1 or -1 (default +1)",
    ),
    ("trajectory.v", "drift speed"),
    ("trajectory.a", "oscillation amplitude"),
    ("trajectory.omega", "angular frequency"),
    ("physics.q", "charge (default 1)"),
    ("physics.c", "speed of light (default 1)"),
    (
        "sweep.t_ret",
        "retarded time held fixed along the ray (default 0)",
    ),
    (
        "sweep.direction",
        "ray direction e, three comma-separated numbers (default 0,0,1)",
    ),
    (
        "sweep.r0",
        "first radius (default 1000 x characteristic length)",
    ),
    ("sweep.growth", "radius ratio between samples (default 2)"),
    ("sweep.count", "number of radii (default 12)"),
    ("grid.dims", "nodes per axis, one or three integers"),
    ("grid.spacing", "node spacing, one or three numbers"),
    (
        "grid.origin",
        "position of node (0,0,0) (default: grid centred on 0)",
    ),
    (
        "grid.source",
        "source point for the simplified projection (default 0,0,0)",
    ),
    ("output.path", "default output file"),
    ("errata.eq36_epsilon_variant", "with_heading | printed"),
    ("errata.combined_denominator_sign", "printed | flipped"),
    ("errata.oscillatory_ac", "corrected | printed"),
    ("errata.oscillatory_delta", "corrected | printed"),
    ("errata.series_second_order", "corrected | printed"),
    ("n_convention", "retarded | instantaneous"),
    (
        "tail.rel_tol",
        "relative quadrature tolerance (default 1e-12)",
    ),
];

/// Unit vectors within this distance of length one are renormalised.
pub const DIRECTION_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub trajectory: Trajectory,
    pub q: f64,
    pub sweep: SweepSpec,
    pub grid: Option<GridSpec>,
    pub grid_source: Vec3,
    pub output: Option<PathBuf>,
    pub errata: Errata,
    pub eval: EvalOptions,
}

struct Entry {
    line: usize,
    value: String,
}

struct Raw(BTreeMap<String, Entry>);

impl Raw {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected `key = value`, found {body:?}"),
            })?;
            let key = key.trim();
            if !KEYS.iter().any(|(k, _)| *k == key) {
                return Err(Error::Config {
                    line,
                    message: format!("unknown key `{key}`"),
                });
            }
            let entry = Entry {
                line,
                value: value.trim().to_string(),
            };
            if let Some(prev) = map.insert(key.to_string(), entry) {
                return Err(Error::Config {
                    line,
                    message: format!("`{key}` already set on line {}", prev.line),
                });
            }
        }
        Ok(Raw(map))
    }

    fn line(&self, key: &str) -> usize {
        self.0.get(key).map_or(0, |e| e.line)
    }

    fn err(&self, key: &str, message: impl Into<String>) -> Error {
        Error::Config {
            line: self.line(key),
            message: format!("`{key}`: {}", message.into()),
        }
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| self.err(key, format!("cannot parse {:?}", e.value))),
        }
    }

    fn num(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.get::<f64>(key)?.unwrap_or(default);
        if !v.is_finite() {
            return Err(self.err(key, "must be finite"));
        }
        Ok(v)
    }

    fn list<T: std::str::FromStr + Copy>(&self, key: &str) -> Result<Option<[T; 3]>> {
        let Some(e) = self.0.get(key) else {
            return Ok(None);
        };
        let parts = e
            .value
            .split(',')
            .map(|s| s.trim().parse::<T>())
            .collect::<std::result::Result<Vec<T>, _>>()
            .map_err(|_| self.err(key, format!("cannot parse {:?}", e.value)))?;
        match parts[..] {
            [v] => Ok(Some([v; 3])),
            [a, b, c] => Ok(Some([a, b, c])),
            _ => Err(self.err(key, "expected one or three comma-separated values")),
        }
    }

    fn choice<T: Copy>(&self, key: &str, options: &[(&str, T)], default: T) -> Result<T> {
        let Some(e) = self.0.get(key) else {
            return Ok(default);
        };
        let want = e.value.to_ascii_lowercase();
        options
            .iter()
            .find(|(name, _)| *name == want)
            .map(|(_, v)| *v)
            .ok_or_else(|| {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                self.err(
                    key,
                    format!("expected one of {}, got {:?}", names.join(", "), e.value),
                )
            })
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw = Raw::parse(text)?;

        let kind = raw
            .0
            .get("trajectory.kind")
            .ok_or_else(|| Error::Config {
                line: 0,
                message: "`trajectory.kind` is required".into(),
            })?
            .value
            .to_ascii_lowercase();
        let eps = raw.num("trajectory.epsilon", 1.0)?;
        let heading =
            Heading::from_sign(eps).map_err(|e| raw.err("trajectory.epsilon", e.to_string()))?;
        let need = |key: &str| -> Result<f64> {
            if !raw.0.contains_key(key) {
                return Err(raw.err(
                    "trajectory.kind",
                    format!("`{kind}` motion requires `{key}`"),
                ));
            }
            raw.num(key, 0.0)
        };
        let motion = match kind.as_str() {
            "static" => Motion::Static,
            "uniform" => Motion::Uniform {
                heading,
                speed: need("trajectory.v")?,
            },
            "oscillatory" => Motion::Oscillatory {
                amplitude: need("trajectory.a")?,
                omega: need("trajectory.omega")?,
            },
            "combined" => Motion::Combined {
                heading,
                speed: need("trajectory.v")?,
                amplitude: need("trajectory.a")?,
                omega: need("trajectory.omega")?,
            },
            other => return Err(raw.err("trajectory.kind", format!("unknown kind {other:?}"))),
        };
        let c = raw.num("physics.c", 1.0)?;
        let trajectory = Trajectory::new(motion, c).map_err(|e| {
            let key = [
                "trajectory.v",
                "trajectory.a",
                "trajectory.omega",
                "physics.c",
            ]
            .into_iter()
            .find(|k| raw.0.contains_key(*k))
            .unwrap_or("trajectory.kind");
            raw.err(key, e.to_string())
        })?;
        let q = raw.num("physics.q", 1.0)?;

        let direction = raw
            .list::<f64>("sweep.direction")?
            .map_or(Vec3::Z, Vec3::from_array);
        let len = direction.norm();
        if len.is_nan() || (len - 1.0).abs() > DIRECTION_SLACK {
            return Err(raw.err(
                "sweep.direction",
                format!("|e| = {len} is not a unit vector"),
            ));
        }
        let defaults = SweepSpec::default_for(&trajectory, 0.0, Vec3::Z);
        let count = raw.get::<usize>("sweep.count")?.unwrap_or(defaults.count);
        if count < MIN_POINTS {
            return Err(raw.err(
                "sweep.count",
                format!("need at least {MIN_POINTS} radii, got {count}"),
            ));
        }
        let sweep = SweepSpec {
            t_ret: raw.num("sweep.t_ret", 0.0)?,
            direction: direction / len,
            r0: raw.num("sweep.r0", defaults.r0)?,
            growth: raw.num("sweep.growth", defaults.growth)?,
            count,
        };
        sweep.validate(&trajectory).map_err(|e| {
            let key = match e {
                Error::InvalidParameter { name, .. } => name,
                _ => "sweep.r0",
            };
            raw.err(key, e.to_string())
        })?;

        let grid = match (
            raw.list::<usize>("grid.dims")?,
            raw.list::<f64>("grid.spacing")?,
        ) {
            (None, None) => None,
            (Some(dims), Some(spacing)) => {
                let origin = match raw.list::<f64>("grid.origin")? {
                    Some(o) => Vec3::from_array(o),
                    None => {
                        -0.5 * Vec3::new(
                            spacing[0] * (dims[0] as f64 - 1.0),
                            spacing[1] * (dims[1] as f64 - 1.0),
                            spacing[2] * (dims[2] as f64 - 1.0),
                        )
                    }
                };
                Some(
                    GridSpec::new(dims, spacing, origin)
                        .map_err(|e| raw.err("grid.dims", e.to_string()))?,
                )
            }
            (Some(_), None) => return Err(raw.err("grid.dims", "`grid.spacing` must also be set")),
            (None, Some(_)) => return Err(raw.err("grid.spacing", "`grid.dims` must also be set")),
        };
        let grid_source = raw
            .list::<f64>("grid.source")?
            .map_or(Vec3::ZERO, Vec3::from_array);

        let errata = Errata {
            uniform_radical: raw.choice(
                "errata.eq36_epsilon_variant",
                &[
                    ("with_heading", UniformRadical::WithHeading),
                    ("printed", UniformRadical::AsPrinted),
                ],
                Errata::RESOLVED.uniform_radical,
            )?,
            combined_denominator: raw.choice(
                "errata.combined_denominator_sign",
                &[
                    ("printed", CombinedDenominator::AsPrinted),
                    ("flipped", CombinedDenominator::Flipped),
                ],
                Errata::RESOLVED.combined_denominator,
            )?,
            oscillatory_ac: raw.choice(
                "errata.oscillatory_ac",
                &[
                    ("corrected", OscillatoryAc::Corrected),
                    ("printed", OscillatoryAc::AsPrinted),
                ],
                Errata::RESOLVED.oscillatory_ac,
            )?,
            oscillatory_delta: raw.choice(
                "errata.oscillatory_delta",
                &[
                    ("corrected", OscillatoryDelta::Corrected),
                    ("printed", OscillatoryDelta::AsPrinted),
                ],
                Errata::RESOLVED.oscillatory_delta,
            )?,
            series_second_order: raw.choice(
                "errata.series_second_order",
                &[
                    ("corrected", SeriesSecondOrder::Corrected),
                    ("printed", SeriesSecondOrder::AsPrinted),
                ],
                Errata::RESOLVED.series_second_order,
            )?,
        };
        let n_convention = raw.choice(
            "n_convention",
            &[
                ("retarded", NConvention::Retarded),
                ("instantaneous", NConvention::Instantaneous),
            ],
            NConvention::default(),
        )?;
        let rel_tol = raw.num("tail.rel_tol", TailOptions::default().rel_tol)?;
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(raw.err("tail.rel_tol", "must lie in (0, 1)"));
        }
        let eval = EvalOptions {
            tail: TailOptions {
                rel_tol,
                ..TailOptions::default()
            },
            n_convention,
        };

        Ok(RunConfig {
            trajectory,
            q,
            sweep,
            grid,
            grid_source,
            output: raw.0.get("output.path").map(|e| PathBuf::from(&e.value)),
            errata,
            eval,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_config() {
        let cfg = RunConfig::parse(
            "# comment\ntrajectory.kind = uniform\ntrajectory.epsilon=-1\ntrajectory.v = 0.5\n\nsweep.direction = 0, 0.6, 0.8000001 # near unit\n",
        )
        .unwrap();
        assert_eq!(
            cfg.trajectory.motion(),
            Motion::Uniform {
                heading: Heading::Backward,
                speed: 0.5
            }
        );
        assert!((cfg.sweep.direction.norm() - 1.0).abs() < 1e-15);
        assert_eq!(cfg.sweep.count, 12);
        assert_eq!(cfg.sweep.r0, 1000.0);
        assert!(cfg.grid.is_none());
        assert_eq!(cfg.errata, Errata::RESOLVED);
    }

    #[test]
    fn superluminal_names_line() {
        let err =
            RunConfig::parse("trajectory.kind = uniform\ntrajectory.v = 1.5\nphysics.c = 1\n")
                .unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Config { line: 2, .. }), "{msg}");
        assert!(msg.contains("speed bound"), "{msg}");
    }

    #[test]
    fn line_precise_errors() {
        let cases = [
            ("trajectory.kind = static\nbogus = 1\n", 2),
            (
                "trajectory.kind = static\nphysics.q = 1\nphysics.q = 2\n",
                3,
            ),
            ("trajectory.kind = static\nsweep.direction = 0,0,2\n", 2),
            ("trajectory.kind = static\n\nsweep.count = 5\n", 3),
            ("trajectory.kind = static\nphysics.c = abc\n", 2),
            ("trajectory.kind = static\nno equals sign\n", 2),
            ("trajectory.kind = static\nn_convention = sideways\n", 2),
            (
                "trajectory.kind = static\ngrid.dims = 4\ngrid.spacing = 0.1\n",
                2,
            ),
        ];
        for (text, line) in cases {
            match RunConfig::parse(text) {
                Err(Error::Config { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn grid_defaults_to_centred() {
        let cfg = RunConfig::parse("trajectory.kind = static\ngrid.dims = 5\ngrid.spacing = 0.5\n")
            .unwrap();
        let g = cfg.grid.unwrap();
        assert_eq!(g.origin, Vec3::new(-1.0, -1.0, -1.0));
    }
}
