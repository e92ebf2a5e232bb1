use super::outer::centered_slope;
use super::{
    build_inner_profile, build_outer_profile, extrapolate_to_face, one_sided_slope,
    one_sided_slope_inward, BarrierKind, InnerProfile, OuterProfile, RadialProfilePair,
};
use crate::error::{Error, Result};
use crate::grid::{Boundaries, Laplacian};
use crate::model::{pressure_of_density_unchecked, ModelParams};

/// Cells closer than this many cell widths to `r = a(t)` are left out of the
/// pointwise check.
pub const PATCH_CELLS: f64 = 3.0;

/// Pointwise inequality margins over one phase, all samples pooled. A margin
/// is positive where the required inequality holds.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReport {
    pub cells: usize,
    pub satisfied: usize,
    pub worst_margin: f64,
    pub worst_time: f64,
    pub worst_radius: f64,
}

impl PhaseReport {
    fn new() -> Self {
        PhaseReport {
            cells: 0,
            satisfied: 0,
            worst_margin: f64::INFINITY,
            worst_time: f64::NAN,
            worst_radius: f64::NAN,
        }
    }

    fn record(&mut self, margin: f64, tol: f64, t: f64, r: f64) {
        self.cells += 1;
        if margin >= -tol {
            self.satisfied += 1;
        }
        if margin < self.worst_margin || margin.is_nan() {
            self.worst_margin = margin;
            self.worst_time = t;
            self.worst_radius = r;
        }
    }

    pub fn fraction(&self) -> f64 {
        if self.cells == 0 {
            1.0
        } else {
            self.satisfied as f64 / self.cells as f64
        }
    }
}

/// Interface quantities at one sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport {
    pub time: f64,
    pub a: f64,
    /// `|D u|` just inside the interface.
    pub inner_slope: f64,
    /// `|D u|` just outside the interface.
    pub outer_slope: f64,
    /// Slope difference in the direction required by the barrier kind.
    pub gap: f64,
    /// `|u(a-) - u(a+)|` from one-sided extrapolation.
    pub jump: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierReport {
    pub kind: BarrierKind,
    pub m: f64,
    pub a0: f64,
    pub c_m: f64,
    pub tolerance: f64,
    pub required_fraction: f64,
    pub inner: PhaseReport,
    pub outer: PhaseReport,
    pub samples: Vec<SampleReport>,
    pub pass: bool,
}

impl BarrierReport {
    pub fn min_gap(&self) -> f64 {
        self.samples.iter().map(|s| s.gap).fold(f64::INFINITY, f64::min)
    }

    pub fn max_jump(&self) -> f64 {
        self.samples.iter().map(|s| s.jump).fold(0.0, f64::max)
    }

    pub fn worst_margin(&self) -> f64 {
        self.inner.worst_margin.min(self.outer.worst_margin)
    }
}

/// A composite barrier and, once verified, its residual report.
#[derive(Debug, Clone)]
pub struct BarrierBundle {
    pub kind: BarrierKind,
    pub m: f64,
    pub c_m: f64,
    pub a0: f64,
    pub inner: InnerProfile,
    pub outer: OuterProfile,
    pub report: Option<BarrierReport>,
}

impl BarrierBundle {
    pub fn build(pair: &RadialProfilePair, m: f64, a0: f64, kind: BarrierKind) -> Result<Self> {
        let outer = build_outer_profile(pair, m, kind)?;
        Self::with_outer(pair, m, a0, kind, outer)
    }

    fn with_outer(
        pair: &RadialProfilePair,
        m: f64,
        a0: f64,
        kind: BarrierKind,
        outer: OuterProfile,
    ) -> Result<Self> {
        let params = pair.spec.model(m)?;
        Ok(BarrierBundle {
            kind,
            m,
            c_m: params.barrier_shift(),
            a0,
            inner: build_inner_profile(pair, m, a0, kind)?,
            outer,
            report: None,
        })
    }

    /// Composite `u` inside the ball at sample `k`.
    pub fn inner_u(&self, k: usize) -> Vec<f64> {
        let s = self.kind.sign();
        self.inner.u_tilde[k].iter().map(|v| s * self.c_m - v).collect()
    }

    /// Composite `u` outside the ball at sample `k`.
    pub fn outer_u(&self, k: usize, params: &ModelParams) -> Vec<f64> {
        self.outer.values[k].iter().map(|&r| params.phi(r)).collect()
    }
}

/// Residual of the `u` equation
/// `u_t - (m rho^(m-1) + nu) lap u + (m rho^(m-1) + nu) rho G(p)`.
fn u_equation_residual(params: &ModelParams, u: f64, u_t: f64, lap_u: f64) -> Result<f64> {
    let rho = params.phi_inverse_unbounded(u)?;
    let p = pressure_of_density_unchecked(rho, params.m);
    let q = params.effective_diffusivity(rho);
    Ok(u_t - q * lap_u + q * rho * params.growth.evaluate(p))
}

/// Checks the differential inequality cell by cell in both phases (outside
/// the patching annulus) and the slope ordering across the interface.
/// Subsolutions need a nonpositive residual of the `u` equation,
/// supersolutions a nonnegative one.
pub fn verify_barrier(
    bundle: &BarrierBundle,
    pair: &RadialProfilePair,
    tolerance: f64,
    required_fraction: f64,
) -> Result<BarrierReport> {
    let spec = pair.spec;
    let params = spec.model(bundle.m)?;
    let s = bundle.kind.sign();
    let mut inner = PhaseReport::new();
    let mut outer = PhaseReport::new();
    let mut samples = Vec::new();

    for k in 0..pair.times.len() {
        let t = pair.times[k];
        let a = pair.a[k];

        // elliptic side
        let grid = bundle.inner.grid(k, spec.dim)?;
        let h = grid.dx();
        let ut = &bundle.inner.u_tilde[k];
        let u = bundle.inner_u(k);
        let lap = Laplacian::new(&grid, Boundaries::far_field(s * bundle.c_m));
        let mut lu = vec![0.0; u.len()];
        lap.apply(&u, &mut lu);
        for i in 0..u.len() {
            let r = grid.center(i);
            if a - r < PATCH_CELLS * h {
                continue;
            }
            let e = u_equation_residual(&params, u[i], -bundle.inner.u_tilde_t[k][i], lu[i])?;
            inner.record(-s * e, tolerance, t, r);
        }

        // parabolic side
        let o = &bundle.outer;
        let og = o.grid(k)?;
        let ds = o.ds();
        let rv = &o.values[k];
        let n = rv.len();
        let bc = o.boundaries();
        let olap = Laplacian::new(&og, bc);
        let mut lr = vec![0.0; n];
        olap.apply(rv, &mut lr);
        let rm: Vec<f64> = rv.iter().map(|r| r.max(0.0).powf(bundle.m)).collect();
        let mut lrm = vec![0.0; n];
        olap.apply_with(&rm, bc.map_values(|v| v.max(0.0).powf(bundle.m)), &mut lrm);
        let mut rs = vec![0.0; n];
        centered_slope(rv, o.boundary_value, ds, &mut rs);
        for i in 0..n {
            let sc = (i as f64 + 0.5) * ds;
            if sc < PATCH_CELLS * ds {
                continue;
            }
            let rho = rv[i];
            let rho_t = (rho - o.previous[k][i]) / o.dt - o.a_dot * rs[i];
            let p = pressure_of_density_unchecked(rho, bundle.m);
            let bracket = rho_t - lrm[i] - spec.nu * lr[i] - rho * spec.growth.evaluate(p);
            let e = -params.effective_diffusivity(rho) * bracket;
            outer.record(-s * e, tolerance, t, a + sc);
        }

        // interface
        let inner_slope = one_sided_slope_inward(0.0, ut, h).abs();
        let outer_slope = params.effective_diffusivity(o.boundary_value)
            * one_sided_slope(o.boundary_value, rv, ds).abs();
        let m_len = ut.len();
        let u_minus = s * bundle.c_m - extrapolate_to_face(ut[m_len - 1], ut[m_len - 2], ut[m_len - 3]);
        let u_plus = params.phi(extrapolate_to_face(rv[0], rv[1], rv[2]));
        samples.push(SampleReport {
            time: t,
            a,
            inner_slope,
            outer_slope,
            gap: s * (outer_slope - inner_slope),
            jump: (u_minus - u_plus).abs(),
        });
    }

    let pass = inner.fraction() >= required_fraction
        && outer.fraction() >= required_fraction
        && samples.iter().all(|x| x.gap > 0.0);
    Ok(BarrierReport {
        kind: bundle.kind,
        m: bundle.m,
        a0: bundle.a0,
        c_m: bundle.c_m,
        tolerance,
        required_fraction,
        inner,
        outer,
        samples,
        pass,
    })
}

/// Smallest `A0 = 2^k`, `k = -6..=12`, whose bundle passes verification.
pub fn auto_barrier(
    pair: &RadialProfilePair,
    m: f64,
    kind: BarrierKind,
    tolerance: f64,
    required_fraction: f64,
) -> Result<BarrierBundle> {
    let outer = build_outer_profile(pair, m, kind)?;
    let mut last = String::new();
    for k in -6..=12 {
        let a0 = 2f64.powi(k);
        // a candidate that cannot be built or evaluated counts as failing
        let attempt = BarrierBundle::with_outer(pair, m, a0, kind, outer.clone()).and_then(|mut bundle| {
            bundle.report = Some(verify_barrier(&bundle, pair, tolerance, required_fraction)?);
            Ok(bundle)
        });
        match attempt {
            Ok(bundle) if bundle.report.as_ref().is_some_and(|r| r.pass) => return Ok(bundle),
            Ok(bundle) => last = format!("worst margin {:e}", bundle.report.map_or(f64::NAN, |r| r.worst_margin())),
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::ConstructionFailure(format!(
        "no barrier constant up to 4096 passes; last candidate: {last}"
    )))
}

/// Largest deviation of the composite barrier from the limit profiles
/// `-p0` inside and `nu (1 - rho0)` outside, over all samples.
pub fn distance_to_pair(bundle: &BarrierBundle, pair: &RadialProfilePair) -> Result<f64> {
    let params = pair.spec.model(bundle.m)?;
    let nu = pair.spec.nu;
    let mut d = 0.0_f64;
    for k in 0..pair.times.len() {
        for (u, p) in bundle.inner_u(k).iter().zip(&pair.p0[k]) {
            d = d.max((u + p).abs());
        }
        for (u, r) in bundle.outer_u(k, &params).iter().zip(&pair.rho0.values[k]) {
            d = d.max((u - nu * (1.0 - r)).abs());
        }
    }
    Ok(d)
}
