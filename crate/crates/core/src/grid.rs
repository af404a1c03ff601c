//! Uniform cell-centered 1D grid, boundary-tagged fields and the discrete
//! operators shared by the field solvers.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    cells: usize,
    x_lo: f64,
    x_hi: f64,
    dx: f64,
}

impl Grid {
    pub const MIN_CELLS: usize = 8;

    pub fn new(cells: usize, x_lo: f64, x_hi: f64) -> Result<Self> {
        if cells < Self::MIN_CELLS {
            return Err(Error::config("grid.cells", format!("must be >= {}", Self::MIN_CELLS)));
        }
        if !(x_hi > x_lo) || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(Error::config("grid.x_hi", "must be > grid.x_lo"));
        }
        Ok(Self {
            cells,
            x_lo,
            x_hi,
            dx: (x_hi - x_lo) / cells as f64,
        })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    pub fn length(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    /// Cell center `x_i = x_lo + (i + ½) dx`.
    pub fn center(&self, i: usize) -> f64 {
        self.x_lo + (i as f64 + 0.5) * self.dx
    }

    /// Face `i` sits at `x_lo + i dx`, `i = 0..=cells`.
    pub fn face(&self, i: usize) -> f64 {
        self.x_lo + i as f64 * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells).map(|i| self.center(i)).collect()
    }

    /// Midpoint quadrature `Σ f_i dx`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.dx
    }
}

/// Boundary condition at one end of a field. Neumann values are the
/// x-derivative at the boundary face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Dirichlet(f64),
    Neumann(f64),
    NoFlux,
}

impl Boundary {
    fn slope(self) -> Option<f64> {
        match self {
            Boundary::Dirichlet(_) => None,
            Boundary::Neumann(g) => Some(g),
            Boundary::NoFlux => Some(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub values: Vec<f64>,
    pub lo: Boundary,
    pub hi: Boundary,
}

impl Field {
    pub fn new(values: Vec<f64>, lo: Boundary, hi: Boundary) -> Self {
        Self { values, lo, hi }
    }

    pub fn no_flux(values: Vec<f64>) -> Self {
        Self::new(values, Boundary::NoFlux, Boundary::NoFlux)
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        Self::no_flux(vec![value; grid.cells()])
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::no_flux(grid.centers().into_iter().map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        if self.values.len() != grid.cells() {
            return Err(Error::Dimension {
                what: "field length",
                expected: grid.cells(),
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Cell-centered gradient: central differences inside, second-order
/// one-sided stencils at the ends that use the boundary data.
pub fn gradient(grid: &Grid, f: &Field) -> Result<Field> {
    f.check(grid)?;
    let mut out = vec![0.0; grid.cells()];
    gradient_into(grid, &f.values, f.lo, f.hi, &mut out);
    Ok(Field::no_flux(out))
}

pub(crate) fn gradient_into(grid: &Grid, v: &[f64], lo: Boundary, hi: Boundary, out: &mut [f64]) {
    let n = v.len();
    let h = grid.dx();
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    out[0] = match lo {
        Boundary::Dirichlet(g) => (-4.0 * g + 3.0 * v[0] + v[1]) / (3.0 * h),
        other => {
            let s = other.slope().unwrap_or(0.0);
            0.5 * s + (v[1] - v[0]) / (2.0 * h)
        }
    };
    out[n - 1] = match hi {
        Boundary::Dirichlet(g) => (4.0 * g - 3.0 * v[n - 1] - v[n - 2]) / (3.0 * h),
        other => {
            let s = other.slope().unwrap_or(0.0);
            0.5 * s + (v[n - 1] - v[n - 2]) / (2.0 * h)
        }
    };
}

/// `(F_{i+1} − F_i)/dx` for face fluxes `F_0..=F_n`.
pub fn divergence_of_flux(grid: &Grid, flux: &[f64]) -> Result<Field> {
    if flux.len() != grid.cells() + 1 {
        return Err(Error::Dimension {
            what: "face flux length",
            expected: grid.cells() + 1,
            got: flux.len(),
        });
    }
    let h = grid.dx();
    Ok(Field::no_flux(flux.windows(2).map(|w| (w[1] - w[0]) / h).collect()))
}

/// Face fluxes `coeff_face ∂f/∂x` with arithmetic-mean face coefficients.
pub fn diffusive_face_flux(grid: &Grid, f: &Field, coeff: &[f64]) -> Result<Vec<f64>> {
    f.check(grid)?;
    let n = grid.cells();
    if coeff.len() != n {
        return Err(Error::Dimension {
            what: "coefficient length",
            expected: n,
            got: coeff.len(),
        });
    }
    let h = grid.dx();
    let v = &f.values;
    let mut flux = vec![0.0; n + 1];
    for i in 1..n {
        let c = 0.5 * (coeff[i - 1] + coeff[i]);
        if !(c > 0.0) {
            return Err(Error::NonpositiveCoefficient { face: i, value: c });
        }
        flux[i] = c * (v[i] - v[i - 1]) / h;
    }
    if !(coeff[0] > 0.0) {
        return Err(Error::NonpositiveCoefficient {
            face: 0,
            value: coeff[0],
        });
    }
    if !(coeff[n - 1] > 0.0) {
        return Err(Error::NonpositiveCoefficient {
            face: n,
            value: coeff[n - 1],
        });
    }
    flux[0] = match f.lo {
        Boundary::Dirichlet(g) => coeff[0] * (v[0] - g) / (0.5 * h),
        Boundary::Neumann(s) => coeff[0] * s,
        Boundary::NoFlux => 0.0,
    };
    flux[n] = match f.hi {
        Boundary::Dirichlet(g) => coeff[n - 1] * (g - v[n - 1]) / (0.5 * h),
        Boundary::Neumann(s) => coeff[n - 1] * s,
        Boundary::NoFlux => 0.0,
    };
    Ok(flux)
}

/// Conservative `div(coeff ∇f)`.
pub fn laplacian(grid: &Grid, f: &Field, coeff: &[f64]) -> Result<Field> {
    let flux = diffusive_face_flux(grid, f, coeff)?;
    divergence_of_flux(grid, &flux)
}

/// First-order upwind face fluxes `v_face f_upwind`. Boundary faces take the
/// interior value on outflow and the boundary value on inflow (zero-gradient
/// for Neumann/NoFlux tags).
pub fn upwind_face_flux(f: &Field, v_face: &[f64]) -> Vec<f64> {
    let n = f.values.len();
    let v = &f.values;
    let mut flux = vec![0.0; n + 1];
    for i in 1..n {
        let vf = v_face[i];
        flux[i] = vf * if vf >= 0.0 { v[i - 1] } else { v[i] };
    }
    let inflow_lo = match f.lo {
        Boundary::Dirichlet(g) => g,
        _ => v[0],
    };
    let inflow_hi = match f.hi {
        Boundary::Dirichlet(g) => g,
        _ => v[n - 1],
    };
    flux[0] = v_face[0] * if v_face[0] >= 0.0 { inflow_lo } else { v[0] };
    flux[n] = v_face[n] * if v_face[n] >= 0.0 { v[n - 1] } else { inflow_hi };
    flux
}

/// First-order upwind `div(f v)` for a cell-centered velocity.
pub fn upwind_advect(grid: &Grid, f: &Field, v: &Field) -> Result<Field> {
    f.check(grid)?;
    v.check(grid)?;
    let n = grid.cells();
    let mut v_face = vec![0.0; n + 1];
    for i in 1..n {
        v_face[i] = 0.5 * (v.values[i - 1] + v.values[i]);
    }
    v_face[0] = match v.lo {
        Boundary::Dirichlet(g) => g,
        _ => v.values[0],
    };
    v_face[n] = match v.hi {
        Boundary::Dirichlet(g) => g,
        _ => v.values[n - 1],
    };
    divergence_of_flux(grid, &upwind_face_flux(f, &v_face))
}
