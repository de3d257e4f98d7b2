//! Finite-difference convection-diffusion system
//!
//! ```text
//! [4u_ij - u_{i+1,j} - u_{i-1,j} - u_{i,j+1} - u_{i,j-1}] / h^2
//!   + C u_ij [u_{i+1,j} - u_{i-1,j} + u_{i,j+1} - u_{i,j-1}] / (2h) = f_ij
//! ```
//!
//! on the interior of a `(nu + 1) x (nu + 1)` grid with zero boundary
//! values. The forcing is manufactured from the discrete operator applied to
//! samples of `10 x y (1-x) (1-y) exp(x^4.5)`, so those samples solve the
//! discrete system exactly.
//!
//! Interior values are stored with `i` (the `x` index) varying fastest.

use std::io::{self, Write};

use super::{FixedPointProblem, ProblemError};

/// Interior values `u_ij`, `1 <= i, j <= nu - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nu: usize,
    values: Vec<f64>,
}

impl Grid {
    pub fn zeros(nu: usize) -> Self {
        let m = nu - 1;
        Self {
            nu,
            values: vec![0.0; m * m],
        }
    }

    /// Wraps a flattened interior vector of length `(nu - 1)^2`.
    pub fn from_vec(nu: usize, values: Vec<f64>) -> Result<Self, ProblemError> {
        let m = nu.saturating_sub(1);
        if values.len() != m * m {
            return Err(ProblemError::DimensionMismatch {
                expected: m * m,
                found: values.len(),
            });
        }
        Ok(Self { nu, values })
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    fn index(&self, i: usize, j: usize) -> usize {
        (j - 1) * (self.nu - 1) + (i - 1)
    }

    /// `u_ij`, zero on the boundary `i` or `j` in `{0, nu}`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == 0 || j == 0 || i >= self.nu || j >= self.nu {
            0.0
        } else {
            self.values[self.index(i, j)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.index(i, j);
        self.values[idx] = v;
    }

    /// One line per `j`, values over `i` separated by commas.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let m = self.nu - 1;
        for row in self.values.chunks(m) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Interior values as little-endian `f64`, same order as [`write_csv`](Self::write_csv).
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Copy with a one-cell zero border, `(nu + 1)^2` values.
    fn padded(&self) -> Padded {
        let side = self.nu + 1;
        let mut data = vec![0.0; side * side];
        let m = self.nu - 1;
        for j in 1..self.nu {
            let src = &self.values[(j - 1) * m..j * m];
            data[j * side + 1..j * side + 1 + m].copy_from_slice(src);
        }
        Padded { side, data }
    }
}

struct Padded {
    side: usize,
    data: Vec<f64>,
}

impl Padded {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.side + i]
    }

    #[inline]
    fn put(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.side + i] = v;
    }
}

/// `10 x y (1 - x) (1 - y) exp(x^4.5)`
pub fn exact_solution(x: f64, y: f64) -> f64 {
    10.0 * x * y * (1.0 - x) * (1.0 - y) * x.powf(4.5).exp()
}

fn sample_exact(nu: usize) -> Grid {
    let h = 1.0 / nu as f64;
    let mut g = Grid::zeros(nu);
    for j in 1..nu {
        for i in 1..nu {
            g.set(i, j, exact_solution(i as f64 * h, j as f64 * h));
        }
    }
    g
}

/// Left-hand side of the finite-difference equations (without `-f`).
fn discrete_operator(u: &Grid, c_coeff: f64) -> Grid {
    let nu = u.nu();
    let h = 1.0 / nu as f64;
    let p = u.padded();
    let mut out = Grid::zeros(nu);
    for j in 1..nu {
        for i in 1..nu {
            let c = p.at(i, j);
            let (e, w, n, s) = (p.at(i + 1, j), p.at(i - 1, j), p.at(i, j + 1), p.at(i, j - 1));
            let lap = (4.0 * c - e - w - n - s) / (h * h);
            let conv = c_coeff * c * (e - w + n - s) / (2.0 * h);
            out.set(i, j, lap + conv);
        }
    }
    out
}

/// Forcing that makes the sampled closed-form `u` the exact discrete solution.
///
/// # Panics
///
/// If `nu < 4`.
pub fn build_forcing(nu: usize, c_coeff: f64) -> Grid {
    assert!(nu >= 4, "nu must be at least 4");
    discrete_operator(&sample_exact(nu), c_coeff)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sweep {
    Jacobi,
    GaussSeidel,
}

impl Sweep {
    pub fn label(self) -> &'static str {
        match self {
            Sweep::Jacobi => "jacobi",
            Sweep::GaussSeidel => "gauss-seidel",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvectionDiffusionProblem {
    nu: usize,
    h: f64,
    c_coeff: f64,
    forcing: Grid,
    u_star: Grid,
    sweep: Sweep,
}

impl ConvectionDiffusionProblem {
    pub fn new(nu: usize, c_coeff: f64, sweep: Sweep) -> Result<Self, ProblemError> {
        if nu < 4 {
            return Err(ProblemError::GridTooSmall { nu });
        }
        Ok(Self {
            nu,
            h: 1.0 / nu as f64,
            c_coeff,
            forcing: build_forcing(nu, c_coeff),
            u_star: sample_exact(nu),
            sweep,
        })
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn c_coeff(&self) -> f64 {
        self.c_coeff
    }

    pub fn sweep(&self) -> Sweep {
        self.sweep
    }

    pub fn forcing(&self) -> &Grid {
        &self.forcing
    }

    pub fn u_star(&self) -> &Grid {
        &self.u_star
    }

    /// Residual of the finite-difference equations at every interior node.
    pub fn discrete_residual(&self, u: &Grid) -> Grid {
        let mut r = discrete_operator(u, self.c_coeff);
        for (ri, fi) in r.values.iter_mut().zip(&self.forcing.values) {
            *ri -= fi;
        }
        r
    }
}

/// Jacobi step for `-lap(u) = f - C u (u_x + u_y)`: every right-hand value
/// comes from the old grid.
pub fn jacobi_sweep(p: &ConvectionDiffusionProblem, u: &Grid) -> Grid {
    sweep(p, u, false)
}

/// Gauss-Seidel on the Laplacian, `j` outer and `i` inner. The west and
/// south neighbours come from the new grid; the convective term stays at
/// the old iterate.
pub fn gauss_seidel_sweep(p: &ConvectionDiffusionProblem, u: &Grid) -> Grid {
    sweep(p, u, true)
}

fn sweep(p: &ConvectionDiffusionProblem, u: &Grid, in_place: bool) -> Grid {
    let nu = p.nu;
    assert_eq!(u.nu(), nu);
    let h = p.h;
    let h2 = h * h;
    let old = u.padded();
    let mut new = old.padded_clone();
    for j in 1..nu {
        for i in 1..nu {
            let c = old.at(i, j);
            let (e, w, n, s) = (old.at(i + 1, j), old.at(i - 1, j), old.at(i, j + 1), old.at(i, j - 1));
            let conv = p.c_coeff * c * (e - w + n - s) / (2.0 * h);
            let f = p.forcing.values[(j - 1) * (nu - 1) + (i - 1)];
            let (w_lap, s_lap) = if in_place {
                (new.at(i - 1, j), new.at(i, j - 1))
            } else {
                (w, s)
            };
            new.put(i, j, 0.25 * (e + w_lap + n + s_lap + h2 * (f - conv)));
        }
    }
    let m = nu - 1;
    let mut out = Vec::with_capacity(m * m);
    for j in 1..nu {
        out.extend_from_slice(&new.data[j * new.side + 1..j * new.side + 1 + m]);
    }
    Grid { nu, values: out }
}

impl Padded {
    fn padded_clone(&self) -> Padded {
        Padded {
            side: self.side,
            data: self.data.clone(),
        }
    }
}

impl FixedPointProblem for ConvectionDiffusionProblem {
    fn dim(&self) -> usize {
        (self.nu - 1) * (self.nu - 1)
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let u = Grid {
            nu: self.nu,
            values: x.to_vec(),
        };
        match self.sweep {
            Sweep::Jacobi => jacobi_sweep(self, &u),
            Sweep::GaussSeidel => gauss_seidel_sweep(self, &u),
        }
        .into_vec()
    }

    fn known_solution(&self) -> Option<&[f64]> {
        Some(self.u_star.as_slice())
    }
}
