//! Model parameters, the growth law, and the algebraic maps between density,
//! pressure and the auxiliary variable `u`.
//!
//! With exponent `m` and viscosity `nu` the density equation is
//!
//! ```text
//! rho_t - lap(rho^m) - nu lap(rho) = rho G(p),    p = m/(m-1) rho^(m-1)
//! ```
//!
//! and the variable `u = Phi(rho) = -rho^m + nu (1 - rho)` interpolates between
//! the pressure (`u ~ -p` where the tissue is saturated) and the scaled
//! vacancy `nu (1 - rho)` where it is not. `Phi` is strictly decreasing, so
//! every map here is invertible on its natural range.

use crate::error::{Error, Result};

/// Stopping tolerance on `|Phi(rho) - u|` for the scalar inversions.
pub const INVERSION_TOL: f64 = 1e-12;
const INVERSION_MAX_ITER: usize = 200;

/// Cell multiplication rate as a function of pressure.
///
/// Every law satisfies `G(0) = g0 > 0`, `G(p_max) = 0` and `G' < 0`, except
/// [`GrowthLaw::Zero`] which switches growth off entirely (used for
/// conservation experiments).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthLaw {
    /// `G(p) = g0 (1 - p / p_max)`.
    Affine { g0: f64, p_max: f64 },
    /// `G(p) = g0 (p_max - p) / (p_max + p)`, a nonlinear decreasing law.
    Rational { g0: f64, p_max: f64 },
    Zero,
}

impl GrowthLaw {
    pub fn affine(g0: f64, p_max: f64) -> Result<Self> {
        Self::check(g0, p_max)?;
        Ok(GrowthLaw::Affine { g0, p_max })
    }

    pub fn rational(g0: f64, p_max: f64) -> Result<Self> {
        Self::check(g0, p_max)?;
        Ok(GrowthLaw::Rational { g0, p_max })
    }

    fn check(g0: f64, p_max: f64) -> Result<()> {
        if !(g0 > 0.0 && g0.is_finite()) {
            return Err(Error::InvalidParameter(format!("g0 must be > 0, got {g0}")));
        }
        if !(p_max > 0.0 && p_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "p_max must be > 0, got {p_max}"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn evaluate(&self, p: f64) -> f64 {
        match *self {
            GrowthLaw::Affine { g0, p_max } => g0 * (1.0 - p / p_max),
            GrowthLaw::Rational { g0, p_max } => g0 * (p_max - p) / (p_max + p),
            GrowthLaw::Zero => 0.0,
        }
    }

    #[inline]
    pub fn derivative(&self, p: f64) -> f64 {
        match *self {
            GrowthLaw::Affine { g0, p_max } => -g0 / p_max,
            GrowthLaw::Rational { g0, p_max } => -2.0 * g0 * p_max / ((p_max + p) * (p_max + p)),
            GrowthLaw::Zero => 0.0,
        }
    }

    /// `G(0)`.
    pub fn g0(&self) -> f64 {
        match *self {
            GrowthLaw::Affine { g0, .. } | GrowthLaw::Rational { g0, .. } => g0,
            GrowthLaw::Zero => 0.0,
        }
    }

    /// Homeostatic pressure; infinite for the zero law.
    pub fn p_max(&self) -> f64 {
        match *self {
            GrowthLaw::Affine { p_max, .. } | GrowthLaw::Rational { p_max, .. } => p_max,
            GrowthLaw::Zero => f64::INFINITY,
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, GrowthLaw::Affine { .. } | GrowthLaw::Zero)
    }
}

/// Full parameterization of the density equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Porous-medium exponent, `m > 1`.
    pub m: f64,
    /// Active-motion viscosity, `nu > 0`.
    pub nu: f64,
    pub growth: GrowthLaw,
    /// Lateral boundary density for bounded domains, `0 <= rho_l < 1`.
    pub rho_l: f64,
    /// Bound on the initial pressure.
    pub m0: f64,
}

impl ModelParams {
    pub fn new(m: f64, nu: f64, growth: GrowthLaw, rho_l: f64, m0: f64) -> Result<Self> {
        let params = ModelParams {
            m,
            nu,
            growth,
            rho_l,
            m0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 1.0 && self.m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "m must be > 1, got {}",
                self.m
            )));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "nu must be > 0 (nu = 0 is not supported), got {}",
                self.nu
            )));
        }
        if !(0.0..1.0).contains(&self.rho_l) {
            return Err(Error::InvalidParameter(format!(
                "rho_l must lie in [0, 1), got {}",
                self.rho_l
            )));
        }
        if !(self.m0 > 0.0 && self.m0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "M0 must be > 0, got {}",
                self.m0
            )));
        }
        Ok(())
    }

    pub fn with_m(&self, m: f64) -> Result<Self> {
        let mut p = *self;
        p.m = m;
        p.validate()?;
        Ok(p)
    }

    /// `Phi(rho) = -rho^m + nu (1 - rho)`.
    #[inline]
    pub fn phi(&self, rho: f64) -> f64 {
        -rho.powf(self.m) + self.nu * (1.0 - rho)
    }

    #[inline]
    fn phi_derivative(&self, rho: f64) -> f64 {
        -self.m * rho.powf(self.m - 1.0) - self.nu
    }

    /// Inverse of `Phi` restricted to densities in `[0, 1]`.
    pub fn phi_inverse(&self, u: f64) -> Result<f64> {
        let lo = self.phi(1.0);
        let hi = self.nu;
        if !(u >= lo - INVERSION_TOL && u <= hi + INVERSION_TOL) {
            return Err(Error::Range { value: u, lo, hi });
        }
        Ok(self.invert_phi_bracketed(u.clamp(lo, hi), 1.0))
    }

    /// Inverse of `Phi` on the whole half-line `rho >= 0`; admits any
    /// `u <= nu`, with `u < -1` mapping to densities above one.
    pub fn phi_inverse_unbounded(&self, u: f64) -> Result<f64> {
        if !(u <= self.nu + INVERSION_TOL) || !u.is_finite() {
            return Err(Error::Range {
                value: u,
                lo: f64::NEG_INFINITY,
                hi: self.nu,
            });
        }
        let u = u.min(self.nu);
        let mut upper = 1.0;
        while self.phi(upper) > u {
            upper *= 2.0;
        }
        Ok(self.invert_phi_bracketed(u, upper))
    }

    /// Safeguarded Newton on `[0, upper]`, where `Phi(0) >= u >= Phi(upper)`.
    fn invert_phi_bracketed(&self, u: f64, upper: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, upper);
        // Linear interpolation on the bracket as a start.
        let f_lo = self.phi(lo) - u;
        let f_hi = self.phi(hi) - u;
        if f_lo <= 0.0 {
            return lo;
        }
        if f_hi >= 0.0 {
            return hi;
        }
        let mut x = lo + (hi - lo) * f_lo / (f_lo - f_hi);
        for _ in 0..INVERSION_MAX_ITER {
            let f = self.phi(x) - u;
            if f.abs() <= INVERSION_TOL * 1e-2 {
                return x;
            }
            if f > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let step = f / self.phi_derivative(x);
            let mut next = x - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= f64::EPSILON * x.abs().max(1e-300) || hi - lo <= f64::EPSILON * hi
            {
                return next;
            }
            x = next;
        }
        x
    }

    /// `Psi(p) = Phi(rho(p))`.
    #[inline]
    pub fn psi(&self, p: f64) -> f64 {
        self.phi(density_of_pressure_unchecked(p, self.m))
    }

    /// Pressure whose `u` value is `u`; any `u <= nu` is admissible.
    pub fn psi_inverse(&self, u: f64) -> Result<f64> {
        let rho = self.phi_inverse_unbounded(u)?;
        Ok(pressure_of_density_unchecked(rho, self.m))
    }

    /// Nonlinear diffusivity `m rho^(m-1) + nu` of the density equation in
    /// divergence form.
    #[inline]
    pub fn effective_diffusivity(&self, rho: f64) -> f64 {
        self.m * rho.max(0.0).powf(self.m - 1.0) + self.nu
    }

    /// Diffused potential `rho^m + nu rho`, whose Laplacian drives the density.
    #[inline]
    pub fn potential(&self, rho: f64) -> f64 {
        rho.powf(self.m) + self.nu * rho
    }

    /// Barrier shift `c_m = Psi(nu / m^3)`.
    pub fn barrier_shift(&self) -> f64 {
        self.psi(self.nu / self.m.powi(3))
    }
}

pub fn pressure_of_density(rho: f64, m: f64) -> Result<f64> {
    if !(m > 1.0) {
        return Err(Error::InvalidParameter(format!("m must be > 1, got {m}")));
    }
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "density must be >= 0, got {rho}"
        )));
    }
    Ok(pressure_of_density_unchecked(rho, m))
}

pub fn density_of_pressure(p: f64, m: f64) -> Result<f64> {
    if !(m > 1.0) {
        return Err(Error::InvalidParameter(format!("m must be > 1, got {m}")));
    }
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "pressure must be >= 0, got {p}"
        )));
    }
    Ok(density_of_pressure_unchecked(p, m))
}

#[inline]
pub(crate) fn pressure_of_density_unchecked(rho: f64, m: f64) -> f64 {
    m / (m - 1.0) * rho.max(0.0).powf(m - 1.0)
}

#[inline]
pub(crate) fn density_of_pressure_unchecked(p: f64, m: f64) -> f64 {
    ((m - 1.0) * p.max(0.0) / m).powf(1.0 / (m - 1.0))
}

/// The graph `b(u) = max(u, 0)` of the limit problem.
#[inline]
pub fn b_graph(u: f64) -> f64 {
    u.max(0.0)
}
