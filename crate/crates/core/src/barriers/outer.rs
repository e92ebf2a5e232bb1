use super::{BarrierKind, PairSpec, RadialProfilePair};
use crate::error::{Error, Result};
use crate::grid::{Bc, Boundaries, Grid, Laplacian};
use crate::linalg::Tridiagonal;

/// Data of the exterior problem
/// `rho_t - nu lap rho = rho G(0) + forcing` on `r > a(t)` with
/// `rho = boundary_value` on `r = a(t)` and initial data shifted by
/// `initial_shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterSpec {
    pub boundary_value: f64,
    pub initial_shift: f64,
    pub forcing: f64,
}

/// Exterior density in the co-moving coordinate `s = r - a(t)`, stored at
/// each sample time together with the preceding time level.
#[derive(Debug, Clone)]
pub struct OuterProfile {
    pub dim: u32,
    pub times: Vec<f64>,
    pub a: Vec<f64>,
    pub a_dot: f64,
    pub width: f64,
    pub boundary_value: f64,
    pub forcing: f64,
    pub values: Vec<Vec<f64>>,
    pub previous: Vec<Vec<f64>>,
    /// Step between `previous` and `values`.
    pub dt: f64,
    /// Set when the density left `[0, 1]` at some time level.
    pub left_unit_interval: bool,
}

impl OuterProfile {
    pub fn n_cells(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn ds(&self) -> f64 {
        self.width / self.n_cells() as f64
    }

    /// Grid in the physical radius at sample `k`.
    pub fn grid(&self, k: usize) -> Result<Grid> {
        exterior_grid(self.dim, self.a[k], self.width, self.n_cells())
    }

    pub fn boundaries(&self) -> Boundaries {
        Boundaries::new(Bc::Dirichlet(self.boundary_value), Bc::ZeroFlux)
    }
}

pub(crate) fn exterior_grid(dim: u32, a: f64, width: f64, n: usize) -> Result<Grid> {
    Grid::new(crate::grid::Geometry::Radial { dim }, a, a + width, n)
}

/// Centered `d/ds` with the boundary closures of [`OuterProfile`]: odd
/// reflection about the Dirichlet value at `s = 0`, even reflection at the
/// far end.
pub(crate) fn centered_slope(f: &[f64], fb: f64, ds: f64, out: &mut [f64]) {
    let n = f.len();
    for i in 0..n {
        let w = if i == 0 { 2.0 * fb - f[0] } else { f[i - 1] };
        let e = if i + 1 == n { f[n - 1] } else { f[i + 1] };
        out[i] = (e - w) / (2.0 * ds);
    }
}

/// Backward-Euler solve of the exterior problem on the moving domain
/// `[a(t), a(t) + width]`, written in the co-moving coordinate so the mesh
/// is fixed: `R_t = nu lap R + a' R_s + R G(0) + forcing`.
pub fn solve_moving_exterior(spec: &PairSpec, o: &OuterSpec) -> Result<OuterProfile> {
    spec.validate()?;
    let n = spec.n_outer;
    let ds = spec.outer_width / n as f64;
    let per = spec.steps_per_sample();
    let h = spec.t_end / spec.samples as f64 / per as f64;
    let g0 = spec.growth.g0();
    let adot = spec.a_dot();
    let bc = Boundaries::new(Bc::Dirichlet(o.boundary_value), Bc::ZeroFlux);

    let mut r: Vec<f64> = (0..n)
        .map(|i| spec.initial_density((i as f64 + 0.5) * ds) + o.initial_shift)
        .collect();
    let mut out = OuterProfile {
        dim: spec.dim,
        times: Vec::new(),
        a: Vec::new(),
        a_dot: adot,
        width: spec.outer_width,
        boundary_value: o.boundary_value,
        forcing: o.forcing,
        values: Vec::new(),
        previous: Vec::new(),
        dt: h,
        left_unit_interval: r.iter().any(|v| !(0.0..=1.0).contains(v)),
    };
    let mut mat = Tridiagonal::zeros(n);
    let mut scratch = Vec::new();
    let mut t = 0.0;
    for _ in 0..spec.samples {
        for j in 0..per {
            t += h;
            let grid = exterior_grid(spec.dim, spec.a_at(t), spec.outer_width, n)?;
            let lap = Laplacian::new(&grid, bc);
            let mut rhs: Vec<f64> = r.iter().map(|v| v + h * o.forcing).collect();
            for i in 0..n {
                // -h [nu L + a' D_s + G(0)] R
                let adv = h * adot / (2.0 * ds);
                mat.diag[i] = 1.0 + h * spec.nu * (lap.west[i] + lap.east[i]) - h * g0;
                mat.lower[i] = -h * spec.nu * lap.west[i] + adv;
                mat.upper[i] = -h * spec.nu * lap.east[i] - adv;
            }
            // Dirichlet face: nu L carries west[0] R_b, D_s carries the ghost 2 R_b - R_0.
            let adv = h * adot / (2.0 * ds);
            rhs[0] += h * spec.nu * lap.west[0] * o.boundary_value - 2.0 * adv * o.boundary_value;
            mat.diag[0] -= adv;
            // Far end: even ghost R_N = R_{N-1}.
            mat.diag[n - 1] -= adv;
            let prev = r.clone();
            mat.solve_in_place(&mut rhs, &mut scratch)?;
            r = rhs;
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::NumericalBlowup {
                    time: t,
                    reason: "exterior profile".into(),
                });
            }
            if r.iter().any(|v| !(0.0..=1.0).contains(v)) {
                out.left_unit_interval = true;
            }
            if j + 1 == per {
                out.previous.push(prev);
            }
        }
        out.times.push(t);
        out.a.push(spec.a_at(t));
        out.values.push(r.clone());
    }
    Ok(out)
}

/// Exterior barrier density `rho_hat`: boundary value `Phi^-1(s c_m)`,
/// initial data `rho0 - 1 + Phi^-1(s c_m)` and extra source `s m^(-1/2)`.
pub fn build_outer_profile(pair: &RadialProfilePair, m: f64, kind: BarrierKind) -> Result<OuterProfile> {
    let params = pair.spec.model(m)?;
    let s = kind.sign();
    let rb = params.phi_inverse(s * params.barrier_shift())?;
    solve_moving_exterior(
        &pair.spec,
        &OuterSpec {
            boundary_value: rb,
            initial_shift: rb - 1.0,
            forcing: s * m.powf(-0.5),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> PairSpec {
        PairSpec {
            n_inner: 50,
            n_outer: 200,
            samples: 2,
            t_end: 0.05,
            dt: 1e-3,
            a0: 1.0,
            rho_far: 0.6,
            decay: 0.1,
            outer_width: 2.0,
            ..PairSpec::standard()
        }
    }

    #[test]
    fn discrete_equation_holds_in_eulerian_form() {
        let spec = small_spec();
        let o = OuterSpec {
            boundary_value: 1.0,
            initial_shift: 0.0,
            forcing: 0.1,
        };
        let prof = solve_moving_exterior(&spec, &o).unwrap();
        let k = 1;
        let g = prof.grid(k).unwrap();
        let lap = Laplacian::new(&g, prof.boundaries());
        let r = &prof.values[k];
        let mut lr = vec![0.0; r.len()];
        lap.apply(r, &mut lr);
        let mut rs = vec![0.0; r.len()];
        centered_slope(r, 1.0, prof.ds(), &mut rs);
        for i in 0..r.len() {
            let rt = (r[i] - prof.previous[k][i]) / prof.dt;
            let res = rt - prof.a_dot * rs[i] - spec.nu * lr[i] - r[i] * spec.growth.g0() - 0.1;
            assert!(res.abs() < 1e-9, "cell {i}: {res}");
        }
    }

    #[test]
    fn unperturbed_barrier_is_the_pair_profile() {
        let spec = small_spec();
        let pair = RadialProfilePair::build(spec).unwrap();
        let same = solve_moving_exterior(
            &spec,
            &OuterSpec {
                boundary_value: 1.0,
                initial_shift: 0.0,
                forcing: 0.0,
            },
        )
        .unwrap();
        assert_eq!(same.values, pair.rho0.values);
    }

    #[test]
    fn barrier_boundary_density_tends_to_one() {
        let spec = small_spec();
        let pair = RadialProfilePair::build(spec).unwrap();
        let mut prev = 0.0;
        for m in [10.0, 100.0, 1000.0] {
            let o = build_outer_profile(&pair, m, BarrierKind::Sub).unwrap();
            assert!(o.boundary_value > prev && o.boundary_value < 1.0);
            assert!(!o.left_unit_interval);
            prev = o.boundary_value;
        }
    }
}
