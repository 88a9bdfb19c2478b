//! Prescribed point-charge orbits along the x-axis.
//!
//! All orbits pass through the origin at `t = 0`. The light speed `c` is
//! carried by the trajectory so that the subluminal bound can be enforced
//! once, at construction.

use crate::{Error, Result, Vec3};

/// Direction of the drift for uniform and combined motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heading {
    Forward,
    Backward,
}

impl Heading {
    pub fn sign(self) -> f64 {
        match self {
            Heading::Forward => 1.0,
            Heading::Backward => -1.0,
        }
    }

    pub fn from_sign(eps: f64) -> Result<Self> {
        if eps == 1.0 {
            Ok(Heading::Forward)
        } else if eps == -1.0 {
            Ok(Heading::Backward)
        } else {
            Err(Error::invalid(
                "epsilon",
                format!("must be +1 or -1, got {eps}"),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Motion {
    Static,
    /// `R_x = ε v t`
    Uniform {
        heading: Heading,
        speed: f64,
    },
    /// `R_x = a sin(ω t)`
    Oscillatory {
        amplitude: f64,
        omega: f64,
    },
    /// `R_x = ε v t + a sin(ω t)`
    Combined {
        heading: Heading,
        speed: f64,
        amplitude: f64,
        omega: f64,
    },
}

impl Motion {
    pub fn name(&self) -> &'static str {
        match self {
            Motion::Static => "static",
            Motion::Uniform { .. } => "uniform",
            Motion::Oscillatory { .. } => "oscillatory",
            Motion::Combined { .. } => "combined",
        }
    }
}

/// Validated orbit together with the light speed it was checked against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    motion: Motion,
    c: f64,
    beta_max: f64,
}

impl Trajectory {
    pub fn new(motion: Motion, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid(
                "c",
                format!("must be positive and finite, got {c}"),
            ));
        }
        let nonneg = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(
                    name,
                    format!("must be finite and >= 0, got {v}"),
                ))
            }
        };
        let vmax = match motion {
            Motion::Static => 0.0,
            Motion::Uniform { speed, .. } => {
                nonneg("v", speed)?;
                speed
            }
            Motion::Oscillatory { amplitude, omega } => {
                nonneg("a", amplitude)?;
                nonneg("omega", omega)?;
                amplitude * omega
            }
            Motion::Combined {
                speed,
                amplitude,
                omega,
                ..
            } => {
                nonneg("v", speed)?;
                nonneg("a", amplitude)?;
                nonneg("omega", omega)?;
                speed + amplitude * omega
            }
        };
        let beta_max = vmax / c;
        if beta_max >= 1.0 {
            return Err(Error::Superluminal { ratio: beta_max });
        }
        Ok(Trajectory {
            motion,
            c,
            beta_max,
        })
    }

    pub fn stationary(c: f64) -> Result<Self> {
        Trajectory::new(Motion::Static, c)
    }

    pub fn uniform(heading: Heading, speed: f64, c: f64) -> Result<Self> {
        Trajectory::new(Motion::Uniform { heading, speed }, c)
    }

    pub fn oscillatory(amplitude: f64, omega: f64, c: f64) -> Result<Self> {
        Trajectory::new(Motion::Oscillatory { amplitude, omega }, c)
    }

    pub fn combined(
        heading: Heading,
        speed: f64,
        amplitude: f64,
        omega: f64,
        c: f64,
    ) -> Result<Self> {
        Trajectory::new(
            Motion::Combined {
                heading,
                speed,
                amplitude,
                omega,
            },
            c,
        )
    }

    pub fn motion(&self) -> Motion {
        self.motion
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Sufficient bound on `|Ṙ|/c`: `v/c`, `aω/c` or `(v + aω)/c`.
    pub fn max_speed_ratio(&self) -> f64 {
        self.beta_max
    }

    pub fn position_x(&self, t: f64) -> f64 {
        match self.motion {
            Motion::Static => 0.0,
            Motion::Uniform { heading, speed } => heading.sign() * speed * t,
            Motion::Oscillatory { amplitude, omega } => amplitude * (omega * t).sin(),
            Motion::Combined {
                heading,
                speed,
                amplitude,
                omega,
            } => heading.sign() * speed * t + amplitude * (omega * t).sin(),
        }
    }

    pub fn velocity_x(&self, t: f64) -> f64 {
        match self.motion {
            Motion::Static => 0.0,
            Motion::Uniform { heading, speed } => heading.sign() * speed,
            Motion::Oscillatory { amplitude, omega } => amplitude * omega * (omega * t).cos(),
            Motion::Combined {
                heading,
                speed,
                amplitude,
                omega,
            } => heading.sign() * speed + amplitude * omega * (omega * t).cos(),
        }
    }

    pub fn position(&self, t: f64) -> Vec3 {
        Vec3::new(self.position_x(t), 0.0, 0.0)
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        Vec3::new(self.velocity_x(t), 0.0, 0.0)
    }

    /// `Ṙ(t)/c`.
    pub fn beta(&self, t: f64) -> Vec3 {
        self.velocity(t) / self.c
    }

    /// Oscillation period `2π/ω`, if the orbit oscillates.
    pub fn period(&self) -> Option<f64> {
        match self.motion {
            Motion::Oscillatory { amplitude, omega }
            | Motion::Combined {
                amplitude, omega, ..
            } if omega > 0.0 && amplitude > 0.0 => Some(std::f64::consts::TAU / omega),
            _ => None,
        }
    }

    /// Length scale beyond which the far zone starts: `max(1, a, v/ω)`.
    pub fn characteristic_length(&self) -> f64 {
        let (a, v, w) = match self.motion {
            Motion::Static => (0.0, 0.0, 0.0),
            Motion::Uniform { speed, .. } => (0.0, speed, 0.0),
            Motion::Oscillatory { amplitude, omega } => (amplitude, 0.0, omega),
            Motion::Combined {
                speed,
                amplitude,
                omega,
                ..
            } => (amplitude, speed, omega),
        };
        let drift = if w > 0.0 { v / w } else { 0.0 };
        1f64.max(a).max(drift)
    }
}
