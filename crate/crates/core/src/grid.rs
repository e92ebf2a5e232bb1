//! Uniform cell-centered meshes on an interval, Cartesian or radial, and the
//! conservative finite-volume Laplacian shared by every solver.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Cartesian,
    /// Radially symmetric functions in `dim` space dimensions; the coordinate
    /// is the radius.
    Radial { dim: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub geometry: Geometry,
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
}

impl Grid {
    pub fn new(geometry: Geometry, x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::InvalidParameter("grid needs at least one cell".into()));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidParameter(format!(
                "grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if let Geometry::Radial { dim } = geometry {
            if dim == 0 {
                return Err(Error::InvalidParameter("radial dimension must be >= 1".into()));
            }
            if x_min < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "radial grid requires x_min >= 0, got {x_min}"
                )));
            }
        }
        Ok(Grid {
            geometry,
            x_min,
            x_max,
            n_cells,
        })
    }

    pub fn cartesian(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        Self::new(Geometry::Cartesian, x_min, x_max, n_cells)
    }

    pub fn radial(dim: u32, r_max: f64, n_cells: usize) -> Result<Self> {
        Self::new(Geometry::Radial { dim }, 0.0, r_max, n_cells)
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    #[inline]
    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    #[inline]
    pub fn face(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    /// Whether the left end is the symmetry center `r = 0` of a radial grid.
    pub fn has_origin(&self) -> bool {
        matches!(self.geometry, Geometry::Radial { .. }) && self.x_min == 0.0
    }

    /// Measure of face `i` (up to the constant surface factor of the sphere).
    #[inline]
    pub fn face_area(&self, i: usize) -> f64 {
        match self.geometry {
            Geometry::Cartesian => 1.0,
            Geometry::Radial { dim } => self.face(i).powi(dim as i32 - 1),
        }
    }

    /// Measure of cell `i`, consistent with [`Grid::face_area`].
    #[inline]
    pub fn cell_volume(&self, i: usize) -> f64 {
        match self.geometry {
            Geometry::Cartesian => self.dx(),
            Geometry::Radial { dim } => {
                let n = dim as i32;
                (self.face(i + 1).powi(n) - self.face(i).powi(n)) / dim as f64
            }
        }
    }

    pub fn cell_volumes(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.cell_volume(i)).collect()
    }

    /// Index of the cell containing `x` (clamped to the grid).
    pub fn locate(&self, x: f64) -> usize {
        let k = ((x - self.x_min) / self.dx()).floor();
        if k < 0.0 {
            0
        } else {
            (k as usize).min(self.n_cells - 1)
        }
    }
}

/// Cell samples of a scalar function at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub time: f64,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.n_cells {
            return Err(Error::InvalidData(format!(
                "field has {} values for {} cells",
                values.len(),
                grid.n_cells
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite value {} in cell {i}",
                values[i]
            )));
        }
        if !(time >= 0.0) {
            return Err(Error::InvalidData(format!("negative time {time}")));
        }
        Ok(Field { grid, values, time })
    }

    pub fn constant(grid: Grid, value: f64, time: f64) -> Self {
        Field {
            grid,
            values: vec![value; grid.n_cells],
            time,
        }
    }

    pub fn from_fn(grid: Grid, time: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.centers().into_iter().map(f).collect(), time)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            time: self.time,
        }
    }

    /// `sum_i V_i f_i`.
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v * self.grid.cell_volume(i))
            .sum()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_distance(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Piecewise-linear interpolation between cell centers, constant beyond.
    pub fn sample(&self, x: f64) -> f64 {
        let n = self.grid.n_cells;
        let s = (x - self.grid.x_min) / self.grid.dx() - 0.5;
        if s <= 0.0 {
            return self.values[0];
        }
        let k = s.floor() as usize;
        if k + 1 >= n {
            return self.values[n - 1];
        }
        let w = s - k as f64;
        (1.0 - w) * self.values[k] + w * self.values[k + 1]
    }
}

/// Boundary treatment at one end of the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bc {
    /// Prescribed value on the boundary face, imposed through a reflected
    /// ghost value `2 g - f_0`.
    Dirichlet(f64),
    ZeroFlux,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundaries {
    pub left: Bc,
    pub right: Bc,
}

impl Boundaries {
    pub fn new(left: Bc, right: Bc) -> Self {
        Boundaries { left, right }
    }

    pub fn zero_flux() -> Self {
        Self::new(Bc::ZeroFlux, Bc::ZeroFlux)
    }

    /// Symmetric at the left end (radial origin or mirror plane), Dirichlet on
    /// the right.
    pub fn far_field(value: f64) -> Self {
        Self::new(Bc::ZeroFlux, Bc::Dirichlet(value))
    }

    /// Same boundary types with every Dirichlet value passed through `f`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        let g = |bc: Bc| match bc {
            Bc::Dirichlet(v) => Bc::Dirichlet(f(v)),
            Bc::ZeroFlux => Bc::ZeroFlux,
        };
        Boundaries::new(g(self.left), g(self.right))
    }

    pub fn validate_for(&self, grid: &Grid) -> Result<()> {
        if grid.has_origin() && self.left != Bc::ZeroFlux {
            return Err(Error::InvalidParameter(
                "the radial origin must carry the symmetry (zero-flux) condition".into(),
            ));
        }
        Ok(())
    }
}

fn dirichlet_value(bc: Bc) -> f64 {
    match bc {
        Bc::Dirichlet(v) => v,
        Bc::ZeroFlux => 0.0,
    }
}

/// Conservative discrete Laplacian
///
/// ```text
/// (L f)_i = [A_{i+1/2} (f_{i+1} - f_i) - A_{i-1/2} (f_i - f_{i-1})] / (V_i dx)
/// ```
///
/// stored as west/east coupling coefficients per cell. Boundary faces use the
/// ghost-cell closures of [`Bc`].
#[derive(Debug, Clone)]
pub struct Laplacian {
    pub west: Vec<f64>,
    pub east: Vec<f64>,
    pub bc: Boundaries,
}

impl Laplacian {
    pub fn new(grid: &Grid, bc: Boundaries) -> Self {
        let n = grid.n_cells;
        let dx = grid.dx();
        let mut west = vec![0.0; n];
        let mut east = vec![0.0; n];
        for i in 0..n {
            let vol = grid.cell_volume(i);
            west[i] = grid.face_area(i) / (vol * dx);
            east[i] = grid.face_area(i + 1) / (vol * dx);
        }
        let close = |coef: &mut f64, bc: Bc| match bc {
            Bc::Dirichlet(_) => *coef *= 2.0,
            Bc::ZeroFlux => *coef = 0.0,
        };
        close(&mut west[0], bc.left);
        close(&mut east[n - 1], bc.right);
        Laplacian { west, east, bc }
    }

    pub fn len(&self) -> usize {
        self.west.len()
    }

    pub fn is_empty(&self) -> bool {
        self.west.is_empty()
    }

    /// Applies the operator, taking boundary values from `bc` (which may carry
    /// transformed values, e.g. the boundary potential of the density).
    pub fn apply_with(&self, f: &[f64], bc: Boundaries, out: &mut [f64]) {
        let n = f.len();
        let left = dirichlet_value(bc.left);
        let right = dirichlet_value(bc.right);
        for i in 0..n {
            let fw = if i == 0 { left } else { f[i - 1] };
            let fe = if i + 1 == n { right } else { f[i + 1] };
            out[i] = self.west[i] * (fw - f[i]) + self.east[i] * (fe - f[i]);
        }
    }

    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        self.apply_with(f, self.bc, out);
    }

    /// Largest diagonal magnitude, `max_i (west_i + east_i)`.
    pub fn max_diagonal(&self) -> f64 {
        self.west
            .iter()
            .zip(&self.east)
            .map(|(w, e)| w + e)
            .fold(0.0, f64::max)
    }
}
