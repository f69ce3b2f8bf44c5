//! Matrix functions with `L∞(T)` entries, sampled at the `M`-th roots of
//! unity, and their least-squares lifting factorization.
//!
//! A lower step keeps row 0 and replaces every other row by its residual
//! after projecting (pointwise, in `C^N`) onto row 0. The multipliers are
//! therefore the projection coefficients
//!
//! ```text
//! L_i(z) = ⟨g₀(z), gᵢ(z)⟩ / ‖g₀(z)‖²,    ⟨u, v⟩ = Σ_j conj(u_j) v_j
//! ```
//!
//! which for `N = 2` is `L = (ĀC + B̄D)/(|A|² + |B|²)`. Upper steps project
//! onto the last row instead. Pointwise projection minimizes the mean square
//! of the replaced rows, so the total mean square never increases along a
//! chain.
//!
//! Integrals over `T` are replaced by means over the grid.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::cuntz::{grid_point, CuntzRep};
use crate::laurent::LaurentPoly;
use crate::polymat::PolyMatrix;
use crate::{Error, Result};

/// Default grid size.
pub const DEFAULT_GRID: usize = 256;

/// Squared row norm at or below which a projection is refused.
pub const DEGENERATE_TOL: f64 = 1e-24;

/// Samples of a function on the `M`-th roots of unity `z_k = exp(2πik/M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::GridMismatch);
        }
        Ok(GridFunction { samples })
    }

    pub fn constant(m: usize, c: Complex64) -> Self {
        GridFunction {
            samples: vec![c; m.max(1)],
        }
    }

    pub fn zero(m: usize) -> Self {
        Self::constant(m, Complex64::zero())
    }

    /// Samples `f(z_k)` for `k = 0..m`.
    pub fn from_fn(m: usize, f: impl Fn(Complex64) -> Complex64) -> Self {
        GridFunction {
            samples: (0..m.max(1)).map(|k| f(grid_point(k, m.max(1)))).collect(),
        }
    }

    pub fn from_poly(p: &LaurentPoly, m: usize) -> Self {
        Self::from_fn(m, |z| p.eval_at(z))
    }

    pub fn m(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn at(&self, k: usize) -> Complex64 {
        self.samples[k]
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Grid mean of `|f|²`, the discrete `‖f‖²` on `L²(T)`.
    pub fn mean_sq(&self) -> f64 {
        self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.m() as f64
    }

    pub fn max_diff(&self, other: &GridFunction) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Pointwise `self + c·other`.
    pub fn add_scaled(&self, c: Complex64, other: &GridFunction) -> GridFunction {
        GridFunction {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + c * b)
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridFunction {
        GridFunction {
            samples: self.samples.iter().map(|&c| f(c)).collect(),
        }
    }
}

/// `N × N` matrix of grid functions on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMatrix {
    n: usize,
    m: usize,
    entries: Vec<GridFunction>,
}

impl GridMatrix {
    /// Row-major entries.
    pub fn new(n: usize, entries: Vec<GridFunction>) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: n });
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        let m = entries[0].m();
        if entries.iter().any(|e| e.m() != m) {
            return Err(Error::GridMismatch);
        }
        Ok(GridMatrix { n, m, entries })
    }

    pub fn identity(n: usize, m: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| {
                let c = if k / n == k % n { 1.0 } else { 0.0 };
                GridFunction::constant(m, Complex64::new(c, 0.0))
            })
            .collect();
        GridMatrix { n, m: m.max(1), entries }
    }

    /// A constant matrix on an `m`-point grid.
    pub fn constant(rows: &[Vec<Complex64>], m: usize) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rows.iter().map(|r| r.len()).find(|&l| l != n).unwrap_or(0),
            });
        }
        let entries = rows
            .iter()
            .flatten()
            .map(|&c| GridFunction::constant(m, c))
            .collect();
        Self::new(n, entries)
    }

    /// Samples a polynomial matrix on the grid.
    pub fn from_poly_matrix(a: &PolyMatrix, m: usize) -> Self {
        let n = a.n();
        let m = m.max(1);
        let mut entries = vec![GridFunction::zero(m); n * n];
        for k in 0..m {
            let vals = a.eval_at(grid_point(k, m));
            for (e, v) in entries.iter_mut().zip(vals) {
                e.samples[k] = v;
            }
        }
        GridMatrix { n, m, entries }
    }

    /// Builds a matrix from its value at each grid point (row-major).
    pub fn from_points(n: usize, points: &[Vec<Complex64>]) -> Result<Self> {
        let m = points.len();
        if m == 0 {
            return Err(Error::GridMismatch);
        }
        let mut entries = vec![GridFunction::zero(m); n * n];
        for (k, p) in points.iter().enumerate() {
            if p.len() != n * n {
                return Err(Error::DimensionMismatch {
                    expected: n * n,
                    found: p.len(),
                });
            }
            for (e, &v) in entries.iter_mut().zip(p) {
                e.samples[k] = v;
            }
        }
        Self::new(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> &GridFunction {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: GridFunction) -> Result<()> {
        if f.m() != self.m {
            return Err(Error::GridMismatch);
        }
        self.entries[i * self.n + j] = f;
        Ok(())
    }

    pub fn entries(&self) -> &[GridFunction] {
        &self.entries
    }

    /// The matrix at grid point `k`, row-major.
    pub fn at(&self, k: usize) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.samples[k]).collect()
    }

    fn row_at(&self, i: usize, k: usize) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.n).map(move |j| self.entries[i * self.n + j].samples[k])
    }

    /// `det g(z_k)` for every grid point.
    pub fn det(&self) -> GridFunction {
        GridFunction {
            samples: (0..self.m).map(|k| det_dense(self.at(k), self.n)).collect(),
        }
    }

    /// `|det g(z_k) − 1| ≤ tol` at every grid point.
    pub fn is_sl(&self, tol: f64) -> bool {
        self.det()
            .samples
            .iter()
            .all(|d| (d - Complex64::new(1.0, 0.0)).norm() <= tol)
    }

    /// `Σ_j |g_ij(z_k)|²` is above [`DEGENERATE_TOL`] at every grid point.
    pub fn row_norm_positive(&self, i: usize) -> bool {
        self.degenerate_point(i).is_none()
    }

    fn degenerate_point(&self, i: usize) -> Option<usize> {
        (0..self.m).find(|&k| self.row_at(i, k).map(|c| c.norm_sqr()).sum::<f64>() <= DEGENERATE_TOL)
    }

    /// Pointwise product.
    pub fn matmul(&self, other: &GridMatrix) -> Result<GridMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.m != other.m {
            return Err(Error::GridMismatch);
        }
        let n = self.n;
        let mut out = GridMatrix {
            n,
            m: self.m,
            entries: vec![GridFunction::zero(self.m); n * n],
        };
        for k in 0..self.m {
            for i in 0..n {
                for j in 0..n {
                    let v = (0..n)
                        .map(|l| self.entries[i * n + l].samples[k] * other.entries[l * n + j].samples[k])
                        .sum();
                    out.entries[i * n + j].samples[k] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn max_diff(&self, other: &GridMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.max_diff(b))
            .fold(0.0, f64::max)
    }

    /// Largest `|⟨row_i(z_k), row_j(z_k)⟩|` over `i ≠ j` and grid points.
    pub fn max_row_inner(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.m {
            for i in 0..self.n {
                for j in i + 1..self.n {
                    let ip: Complex64 = self.row_at(i, k).zip(self.row_at(j, k)).map(|(a, b)| a.conj() * b).sum();
                    worst = worst.max(ip.norm());
                }
            }
        }
        worst
    }

    /// Largest off-diagonal sample magnitude.
    pub fn max_off_diagonal(&self) -> f64 {
        (0..self.n * self.n)
            .filter(|k| k / self.n != k % self.n)
            .map(|k| self.entries[k].max_abs())
            .fold(0.0, f64::max)
    }

    fn row(&self, i: usize) -> &[GridFunction] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }
}

fn det_dense(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let Some(p) = (c..n).max_by(|&x, &y| a[x * n + c].norm().total_cmp(&a[y * n + c].norm())) else {
            return Complex64::zero();
        };
        if a[p * n + c].is_zero() {
            return Complex64::zero();
        }
        if p != c {
            for j in 0..n {
                a.swap(p * n + j, c * n + j);
            }
            det = -det;
        }
        let piv = a[c * n + c];
        det *= piv;
        for r in c + 1..n {
            let f = a[r * n + c] / piv;
            for j in c..n {
                let v = a[c * n + j];
                a[r * n + j] -= f * v;
            }
        }
    }
    det
}

/// One factor of a grid chain.
///
/// `Lower(L)` is the identity with `L_i` at `(i, 0)` for `i = 1..N`;
/// `Upper(U)` has `U_i` at `(i, N−1)` for `i = 0..N−1`. For `N = 2` these are
/// the usual `[[1,0],[L,1]]` and `[[1,U],[0,1]]`.
#[derive(Debug, Clone, PartialEq)]
pub enum GridStep {
    Lower(Vec<GridFunction>),
    Upper(Vec<GridFunction>),
}

impl GridStep {
    pub fn multipliers(&self) -> &[GridFunction] {
        match self {
            GridStep::Lower(fs) | GridStep::Upper(fs) => fs,
        }
    }

    /// Largest multiplier sample, `max_i ‖L_i‖∞`.
    pub fn magnitude(&self) -> f64 {
        self.multipliers().iter().map(|f| f.max_abs()).fold(0.0, f64::max)
    }

    pub fn realize(&self, n: usize) -> Result<GridMatrix> {
        let fs = self.multipliers();
        if fs.len() != n - 1 {
            return Err(Error::BadArity {
                expected: n - 1,
                found: fs.len(),
            });
        }
        let m = fs.first().map_or(1, |f| f.m());
        let mut g = GridMatrix::identity(n, m);
        for (k, f) in fs.iter().enumerate() {
            match self {
                GridStep::Lower(_) => g.set(k + 1, 0, f.clone())?,
                GridStep::Upper(_) => g.set(k, n - 1, f.clone())?,
            }
        }
        Ok(g)
    }
}

/// Projects the rows in `targets` off row `pivot`, pointwise.
fn project_rows(g: &GridMatrix, pivot: usize, targets: &[usize]) -> Result<(Vec<GridFunction>, GridMatrix)> {
    if let Some(point) = g.degenerate_point(pivot) {
        return Err(Error::DegenerateRow { row: pivot, point });
    }
    let n = g.n;
    let m = g.m;
    let mut out = g.clone();
    let mut coeffs = Vec::with_capacity(targets.len());
    for &i in targets {
        let mut q = GridFunction::zero(m);
        for k in 0..m {
            let mut ip = Complex64::zero();
            let mut norm = 0.0;
            for (p, t) in g.row_at(pivot, k).zip(g.row_at(i, k)) {
                ip += p.conj() * t;
                norm += p.norm_sqr();
            }
            let c = ip / norm;
            q.samples[k] = c;
            for j in 0..n {
                let v = g.entries[i * n + j].samples[k] - c * g.entries[pivot * n + j].samples[k];
                out.entries[i * n + j].samples[k] = v;
            }
        }
        coeffs.push(q);
    }
    Ok((coeffs, out))
}

fn require_n(g: &GridMatrix, n: usize) -> Result<()> {
    if g.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.n,
        });
    }
    Ok(())
}

/// Least-squares lower factor of a `2 × 2` grid matrix: `g = [[1,0],[L,1]]·a1`
/// with the rows of `a1` pointwise orthogonal.
pub fn optimal_lower_2x2(g: &GridMatrix) -> Result<(GridFunction, GridMatrix)> {
    require_n(g, 2)?;
    let (mut ls, a1) = optimal_lower_nxn(g)?;
    Ok((ls.remove(0), a1))
}

/// Least-squares upper factor of a `2 × 2` grid matrix: `g = [[1,U],[0,1]]·a2`.
pub fn optimal_upper_2x2(g: &GridMatrix) -> Result<(GridFunction, GridMatrix)> {
    require_n(g, 2)?;
    let (mut us, a2) = optimal_upper_nxn(g)?;
    Ok((us.remove(0), a2))
}

/// `g = Lower(L)·g_new`, each row `i ≥ 1` of `g_new` pointwise orthogonal to
/// row 0.
pub fn optimal_lower_nxn(g: &GridMatrix) -> Result<(Vec<GridFunction>, GridMatrix)> {
    let targets: Vec<usize> = (1..g.n).collect();
    project_rows(g, 0, &targets)
}

/// `g = Upper(U)·g_new`, each row `i < N−1` of `g_new` pointwise orthogonal
/// to the last row.
///
/// The mirror image of [`optimal_lower_nxn`]; only the two-band case of this
/// step has a classical counterpart.
pub fn optimal_upper_nxn(g: &GridMatrix) -> Result<(Vec<GridFunction>, GridMatrix)> {
    let last = g.n - 1;
    let targets: Vec<usize> = (0..last).collect();
    project_rows(g, last, &targets)
}

/// Sum of grid-mean squares of `parts`.
pub fn norm_objective(parts: &[GridFunction]) -> f64 {
    parts.iter().map(|p| p.mean_sq()).sum()
}

/// Objective of the rows a lower (`lower = true`) or upper step replaces.
pub fn step_objective(g: &GridMatrix, lower: bool) -> f64 {
    let rows: Vec<usize> = if lower { (1..g.n).collect() } else { (0..g.n - 1).collect() };
    rows.iter().map(|&i| norm_objective(g.row(i))).sum()
}

/// What [`iterate_factorization`] observed.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    /// Mean square of the whole working matrix: before the first step, then
    /// after each recorded step.
    pub objective: Vec<f64>,
    /// Largest off-diagonal sample of the residual.
    pub max_off_diagonal: f64,
    /// Largest pointwise inner product between distinct residual rows.
    pub max_row_inner: f64,
    /// `false` when `max_steps` stopped the iteration.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFactorization {
    /// Leftmost first: `g = Π steps · residual`.
    pub steps: Vec<GridStep>,
    pub residual: GridMatrix,
    pub report: IterationReport,
}

impl GridFactorization {
    pub fn product(&self) -> Result<GridMatrix> {
        let n = self.residual.n;
        let mut acc = GridMatrix::identity(n, self.residual.m);
        for s in &self.steps {
            acc = acc.matmul(&s.realize(n)?)?;
        }
        acc.matmul(&self.residual)
    }
}

/// Tolerance of the `SL` check on entry to [`iterate_factorization`].
pub const SL_TOL: f64 = 1e-8;

/// Alternates optimal lower and upper steps, starting with lower.
///
/// A step is kept when it lowers the total mean square by more than `tol`.
/// Iteration stops after two consecutive steps that do not, or once
/// `max_steps` steps are kept.
pub fn iterate_factorization(g: &GridMatrix, max_steps: usize, tol: f64) -> Result<GridFactorization> {
    if !g.is_sl(SL_TOL) {
        return Err(Error::NotSl);
    }
    let total = |g: &GridMatrix| norm_objective(&g.entries);
    let mut work = g.clone();
    let mut objective = vec![total(&work)];
    let mut steps = Vec::new();
    let mut lower = true;
    let mut stalls = 0;
    let mut converged = false;
    while steps.len() < max_steps {
        let (multipliers, next) = if lower {
            optimal_lower_nxn(&work)?
        } else {
            optimal_upper_nxn(&work)?
        };
        let before = *objective.last().unwrap_or(&0.0);
        let after = total(&next);
        if before - after > tol {
            steps.push(if lower {
                GridStep::Lower(multipliers)
            } else {
                GridStep::Upper(multipliers)
            });
            objective.push(after);
            work = next;
            stalls = 0;
        } else {
            stalls += 1;
            if stalls == 2 {
                converged = true;
                break;
            }
        }
        lower = !lower;
    }
    let report = IterationReport {
        objective,
        max_off_diagonal: work.max_off_diagonal(),
        max_row_inner: work.max_row_inner(),
        converged,
    };
    Ok(GridFactorization {
        steps,
        residual: work,
        report,
    })
}

/// Result of [`diagonal_termination_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalCheck {
    pub is_diagonal: bool,
    /// `φ` with `g₀(z) = φ(z²)`, on the grid of `M/2` points.
    pub phi: Option<GridFunction>,
    /// `ψ` with `f₁(z) = z ψ(z²)`, on the grid of `M/2` points.
    pub psi: Option<GridFunction>,
}

/// Decides whether a `2 × 2` residual is diagonal.
///
/// The rows are merged into `g₀ = S₀A + S₁B` and `f₁ = S₀C + S₁D` on the full
/// grid; when the off-diagonal entries are within `tol`, `φ = S₀*g₀` and
/// `ψ = S₁*f₁` are returned on the coarse grid.
pub fn diagonal_termination_check(residual: &GridMatrix, rep: &CuntzRep, tol: f64) -> Result<DiagonalCheck> {
    require_n(residual, 2)?;
    if rep.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rep.n(),
        });
    }
    let m = residual.m;
    if !m.is_multiple_of(2) {
        return Err(Error::GridNotDivisible { m, n: 2 });
    }
    let samples = |i, j| residual.get(i, j).samples.clone();
    let g0 = rep.reconstruct_sampled(&[samples(0, 0), samples(0, 1)])?;
    let f1 = rep.reconstruct_sampled(&[samples(1, 0), samples(1, 1)])?;
    let off = residual.get(0, 1).max_abs().max(residual.get(1, 0).max_abs());
    let is_diagonal = off <= tol;
    if !is_diagonal {
        return Ok(DiagonalCheck {
            is_diagonal,
            phi: None,
            psi: None,
        });
    }
    Ok(DiagonalCheck {
        is_diagonal,
        phi: Some(GridFunction::new(rep.s_adjoint_sampled(0, &g0)?)?),
        psi: Some(GridFunction::new(rep.s_adjoint_sampled(1, &f1)?)?),
    })
}

/// Pointwise rotation `[[cos θ, −sin θ], [sin θ, cos θ]]`, unitary with
/// determinant 1 at every grid point.
pub fn rotation(theta: &GridFunction) -> GridMatrix {
    let m = theta.m();
    let c = theta.map(|t| Complex64::new(Float::cos(t.re), 0.0));
    let s = theta.map(|t| Complex64::new(Float::sin(t.re), 0.0));
    let minus_s = s.map(|v| -v);
    GridMatrix {
        n: 2,
        m,
        entries: vec![c.clone(), minus_s, s, c],
    }
}
