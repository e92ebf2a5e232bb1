//! Radial barriers for the density equation built around a radial profile
//! pair of the limit problem: an elliptic pressure profile `p0` on the ball
//! `r < a(t)` and a parabolic density `rho0` outside it.
//!
//! The composite barrier is
//!
//! ```text
//! u = s c_m - u_tilde        for r < a(t)
//! u = Phi(rho_hat)           for r > a(t)
//! ```
//!
//! with `-lap u_tilde = G(Psi^-1(-u_tilde)) + s f_m`, `u_tilde(a) = 0`, and
//! `rho_hat_t - nu lap rho_hat = rho_hat G(0) + s m^(-1/2)`,
//! `Phi(rho_hat) = s c_m` on `r = a(t)`. The sign `s` is `+1` for
//! subsolutions of the `u` equation and `-1` for supersolutions.

mod inner;
mod outer;
mod verify;

pub use inner::{build_inner_profile, solve_inner_bvp, InnerProfile};
pub use outer::{build_outer_profile, solve_moving_exterior, OuterProfile, OuterSpec};
pub use verify::{
    auto_barrier, distance_to_pair, verify_barrier, BarrierBundle, BarrierReport, PhaseReport, SampleReport,
};

use crate::elliptic::solve_pressure_profile;
use crate::error::{Error, Result};
use crate::grid::{Boundaries, Grid};
use crate::model::{GrowthLaw, ModelParams};

/// `f_m = A0 / nu * [p0 <= m^(-1/3)] + m^(-1/3)`.
pub fn forcing_profile(p0: f64, m: f64, a0: f64, nu: f64) -> f64 {
    let level = m.powf(-1.0 / 3.0);
    let indicator = if p0 <= level { a0 / nu } else { 0.0 };
    indicator + level
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarrierKind {
    Sub,
    Super,
}

impl BarrierKind {
    pub fn sign(self) -> f64 {
        match self {
            BarrierKind::Sub => 1.0,
            BarrierKind::Super => -1.0,
        }
    }
}

/// Parameters of a radial profile pair with a linearly moving interface
/// `a(t) = a0 - speed t`. The exterior density starts from
/// `rho_far + (1 - rho_far) exp(-(r - a0) / decay)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSpec {
    pub dim: u32,
    pub nu: f64,
    pub growth: GrowthLaw,
    pub a0: f64,
    pub speed: f64,
    pub t_end: f64,
    /// Number of verification times, evenly spaced in `(0, t_end]`.
    pub samples: usize,
    pub rho_far: f64,
    pub decay: f64,
    /// Width of the exterior computational layer.
    pub outer_width: f64,
    pub n_inner: usize,
    pub n_outer: usize,
    pub dt: f64,
}

impl PairSpec {
    /// Two-dimensional shrinking ball with a steep exterior layer.
    pub fn standard() -> Self {
        PairSpec {
            dim: 2,
            nu: 0.5,
            growth: GrowthLaw::Affine { g0: 1.0, p_max: 1.0 },
            a0: 2.0,
            speed: 0.5,
            t_end: 0.02,
            samples: 8,
            rho_far: 0.3,
            decay: 0.02,
            outer_width: 1.0,
            n_inner: 800,
            n_outer: 800,
            dt: 1e-5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.dim == 0 {
            return bad("dimension must be >= 1".into());
        }
        if !(self.nu > 0.0) {
            return bad(format!("nu must be > 0, got {}", self.nu));
        }
        if !(self.a0 > 0.0 && self.t_end > 0.0 && self.a0 - self.speed * self.t_end > 0.0) {
            return bad("interface radius must stay positive over [0, t_end]".into());
        }
        if self.samples == 0 || self.n_inner < 8 || self.n_outer < 8 {
            return bad("need at least one sample and 8 cells per phase".into());
        }
        if !(0.0..1.0).contains(&self.rho_far) || !(self.decay > 0.0) || !(self.outer_width > 0.0) {
            return bad("exterior profile needs 0 <= rho_far < 1, decay > 0, width > 0".into());
        }
        if !(self.dt > 0.0) || self.dt * self.growth.g0() >= 1.0 {
            return bad(format!("dt must satisfy 0 < dt G(0) < 1, got dt = {}", self.dt));
        }
        Ok(())
    }

    pub fn a_at(&self, t: f64) -> f64 {
        self.a0 - self.speed * t
    }

    pub fn a_dot(&self) -> f64 {
        -self.speed
    }

    /// Steps of size at most `dt` per sample interval.
    pub fn steps_per_sample(&self) -> usize {
        (self.t_end / self.samples as f64 / self.dt).ceil().max(1.0) as usize
    }

    pub fn sample_times(&self) -> Vec<f64> {
        (1..=self.samples)
            .map(|k| self.t_end * k as f64 / self.samples as f64)
            .collect()
    }

    pub fn inner_grid(&self, a: f64) -> Result<Grid> {
        Grid::radial(self.dim, a, self.n_inner)
    }

    pub fn initial_density(&self, s: f64) -> f64 {
        self.rho_far + (1.0 - self.rho_far) * (-s / self.decay).exp()
    }

    pub fn model(&self, m: f64) -> Result<ModelParams> {
        ModelParams::new(m, self.nu, self.growth, 0.0, 1.0)
    }
}

/// The limit profiles around which barriers are built.
#[derive(Debug, Clone)]
pub struct RadialProfilePair {
    pub spec: PairSpec,
    pub times: Vec<f64>,
    pub a: Vec<f64>,
    /// `p0` on the ball grid `[0, a(t)]` at each sample time.
    pub p0: Vec<Vec<f64>>,
    /// `rho0` on the exterior grid `[a(t), a(t) + width]`.
    pub rho0: OuterProfile,
}

impl RadialProfilePair {
    pub fn build(spec: PairSpec) -> Result<Self> {
        spec.validate()?;
        let times = spec.sample_times();
        let a: Vec<f64> = times.iter().map(|&t| spec.a_at(t)).collect();
        let p0 = a
            .iter()
            .map(|&ak| {
                let g = spec.inner_grid(ak)?;
                solve_pressure_profile(&g, Boundaries::far_field(0.0), spec.growth)
            })
            .collect::<Result<Vec<_>>>()?;
        let rho0 = solve_moving_exterior(
            &spec,
            &OuterSpec {
                boundary_value: 1.0,
                initial_shift: 0.0,
                forcing: 0.0,
            },
        )?;
        let pair = RadialProfilePair {
            spec,
            times,
            a,
            p0,
            rho0,
        };
        pair.check()?;
        Ok(pair)
    }

    fn check(&self) -> Result<()> {
        for (k, p) in self.p0.iter().enumerate() {
            if p.iter().any(|&v| !(v > 0.0)) {
                return Err(Error::ConstructionFailure(format!(
                    "pressure profile not positive inside the ball at t = {}",
                    self.times[k]
                )));
            }
        }
        for (k, r) in self.rho0.values.iter().enumerate() {
            if r.iter().any(|&v| !(v < 1.0)) {
                return Err(Error::ConstructionFailure(format!(
                    "exterior density reaches 1 at t = {}",
                    self.times[k]
                )));
            }
        }
        Ok(())
    }

    /// `|D p0|` at `r = a(t)` per sample, from a one-sided quadratic fit.
    pub fn pressure_slope(&self) -> Vec<f64> {
        self.p0
            .iter()
            .zip(&self.a)
            .map(|(p, &a)| {
                let h = a / self.spec.n_inner as f64;
                -one_sided_slope_inward(0.0, p, h)
            })
            .collect()
    }

    /// `nu |D rho0|` at `r = a(t)` per sample.
    pub fn density_flux(&self) -> Vec<f64> {
        let h = self.spec.outer_width / self.spec.n_outer as f64;
        self.rho0
            .values
            .iter()
            .map(|r| -self.spec.nu * one_sided_slope(1.0, r, h))
            .collect()
    }
}

/// Derivative at a boundary face from the face value `fb` and the first two
/// cells `f[0], f[1]` at distances `h/2, 3h/2` in the positive direction.
pub(crate) fn one_sided_slope(fb: f64, f: &[f64], h: f64) -> f64 {
    (-8.0 * fb + 9.0 * f[0] - f[1]) / (3.0 * h)
}

/// Same as [`one_sided_slope`] for the last cells of `f`, which lie in the
/// negative direction from the face; returns the derivative along `+r`.
pub(crate) fn one_sided_slope_inward(fb: f64, f: &[f64], h: f64) -> f64 {
    let n = f.len();
    (8.0 * fb - 9.0 * f[n - 1] + f[n - 2]) / (3.0 * h)
}

/// Value at a boundary face extrapolated from the three nearest cells.
pub(crate) fn extrapolate_to_face(f0: f64, f1: f64, f2: f64) -> f64 {
    (15.0 * f0 - 10.0 * f1 + 3.0 * f2) / 8.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forcing_examples() {
        assert!((forcing_profile(1.0, 1000.0, 4.0, 0.5) - 0.1).abs() < 1e-15);
        assert!((forcing_profile(0.0, 1000.0, 4.0, 0.5) - 8.1).abs() < 1e-14);
    }

    #[test]
    fn one_sided_formulas_exact_for_quadratics() {
        let h = 0.1;
        let f = |s: f64| 1.0 + 2.0 * s - 3.0 * s * s;
        let cells = [f(0.5 * h), f(1.5 * h), f(2.5 * h)];
        assert!((one_sided_slope(f(0.0), &cells, h) - 2.0).abs() < 1e-12);
        assert!((extrapolate_to_face(cells[0], cells[1], cells[2]) - f(0.0)).abs() < 1e-12);
        let back = [f(-2.5 * h), f(-1.5 * h), f(-0.5 * h)];
        assert!((one_sided_slope_inward(f(0.0), &back, h) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        let mut s = PairSpec::standard();
        assert!(s.validate().is_ok());
        s.speed = 1000.0;
        assert!(s.validate().is_err());
    }
}
