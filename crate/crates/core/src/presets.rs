//! Named initial densities.
//!
//! | name                 | density `rho0`                                                        |
//! |----------------------|-----------------------------------------------------------------------|
//! | `vacuum`             | `0`                                                                   |
//! | `two-bump`           | `h [exp(-((x-s)/w)^2) + exp(-((x+s)/w)^2)]`, capped at 1              |
//! | `radial-tumor`       | `1` for `r <= a`, smoothstep down to `rho_out` on `[a, a+w]`          |
//! | `uniform-nucleation` | `1 - c / nu` (so the limit variable starts at `u = c`)                |
//! | `merging`            | `1` on `|x - d| < a` and `|x + d| < a`, `rho_gap` for `|x| <= d - a`,  |
//! |                      | `rho_out` elsewhere                                                   |

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    Vacuum,
    TwoBump { height: f64, separation: f64, width: f64 },
    RadialTumor { radius: f64, width: f64, rho_out: f64 },
    UniformNucleation { c: f64 },
    Merging { distance: f64, half_width: f64, rho_gap: f64, rho_out: f64 },
}

impl Preset {
    pub const NAMES: [&'static str; 5] = ["vacuum", "two-bump", "radial-tumor", "uniform-nucleation", "merging"];

    /// The preset with its default parameters.
    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "vacuum" => Preset::Vacuum,
            "two-bump" => Preset::TwoBump {
                height: 0.6,
                separation: 0.35,
                width: 0.3,
            },
            "radial-tumor" => Preset::RadialTumor {
                radius: 0.6,
                width: 1.0,
                rho_out: 0.1,
            },
            "uniform-nucleation" => Preset::UniformNucleation { c: 0.1 },
            "merging" => Preset::Merging {
                distance: 0.5,
                half_width: 0.3,
                rho_gap: 0.9,
                rho_out: 0.5,
            },
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown preset '{other}' (expected one of {})",
                    Preset::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Vacuum => "vacuum",
            Preset::TwoBump { .. } => "two-bump",
            Preset::RadialTumor { .. } => "radial-tumor",
            Preset::UniformNucleation { .. } => "uniform-nucleation",
            Preset::Merging { .. } => "merging",
        }
    }

    /// Overrides one named parameter.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match (self, key) {
            (Preset::TwoBump { height, .. }, "height") => height,
            (Preset::TwoBump { separation, .. }, "separation") => separation,
            (Preset::TwoBump { width, .. }, "width") => width,
            (Preset::RadialTumor { radius, .. }, "radius") => radius,
            (Preset::RadialTumor { width, .. }, "width") => width,
            (Preset::RadialTumor { rho_out, .. }, "rho_out") => rho_out,
            (Preset::UniformNucleation { c }, "c") => c,
            (Preset::Merging { distance, .. }, "distance") => distance,
            (Preset::Merging { half_width, .. }, "half_width") => half_width,
            (Preset::Merging { rho_gap, .. }, "rho_gap") => rho_gap,
            (Preset::Merging { rho_out, .. }, "rho_out") => rho_out,
            (p, k) => {
                return Err(Error::InvalidParameter(format!(
                    "preset '{}' has no parameter '{k}'",
                    p.name()
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    /// Samples the preset on `grid`. `nu` is only used by `uniform-nucleation`.
    pub fn density(&self, grid: Grid, nu: f64) -> Result<Field> {
        self.check(nu)?;
        Field::from_fn(grid, 0.0, |x| match *self {
            Preset::Vacuum => 0.0,
            Preset::TwoBump {
                height,
                separation,
                width,
            } => {
                let b = |y: f64| (-(y / width).powi(2)).exp();
                (height * (b(x - separation) + b(x + separation))).min(1.0)
            }
            Preset::RadialTumor { radius, width, rho_out } => {
                let s = ((x - radius) / width).clamp(0.0, 1.0);
                1.0 - (1.0 - rho_out) * s * s * (3.0 - 2.0 * s)
            }
            Preset::UniformNucleation { c } => 1.0 - c / nu,
            Preset::Merging {
                distance,
                half_width,
                rho_gap,
                rho_out,
            } => {
                if (x - distance).abs() < half_width || (x + distance).abs() < half_width {
                    1.0
                } else if x.abs() <= distance - half_width {
                    rho_gap
                } else {
                    rho_out
                }
            }
        })
    }

    fn check(&self, nu: f64) -> Result<()> {
        let ok = match *self {
            Preset::Vacuum => true,
            Preset::TwoBump {
                height,
                separation,
                width,
            } => height >= 0.0 && separation >= 0.0 && width > 0.0,
            Preset::RadialTumor { radius, width, rho_out } => {
                radius >= 0.0 && width > 0.0 && (0.0..=1.0).contains(&rho_out)
            }
            Preset::UniformNucleation { c } => c >= 0.0 && c <= nu,
            Preset::Merging {
                distance,
                half_width,
                rho_gap,
                rho_out,
            } => {
                distance >= 0.0
                    && half_width > 0.0
                    && (0.0..=1.0).contains(&rho_gap)
                    && (0.0..=1.0).contains(&rho_out)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid parameters for preset {self:?}")))
        }
    }
}
