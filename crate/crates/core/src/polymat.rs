//! Square matrices over the Laurent polynomial ring and elementary lifting
//! steps.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use crate::laurent::{Degree, LaurentPoly};
use crate::{Error, Result};

/// `n × n` matrix of Laurent polynomials, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    n: usize,
    entries: Vec<LaurentPoly>,
}

impl PolyMatrix {
    pub fn new(n: usize, entries: Vec<LaurentPoly>) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: n });
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        Ok(PolyMatrix { n, entries })
    }

    pub fn from_rows(rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Self::new(n, entries)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = LaurentPoly::one();
        }
        m
    }

    pub(crate) fn zeros(n: usize) -> Self {
        PolyMatrix {
            n,
            entries: vec![LaurentPoly::zero(); n * n],
        }
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(diag: Vec<LaurentPoly>) -> Result<Self> {
        let n = diag.len();
        let mut m = Self::zeros(n.max(2));
        if n < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: n });
        }
        for (i, d) in diag.into_iter().enumerate() {
            m.entries[i * n + i] = d;
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: LaurentPoly) {
        self.entries[i * self.n + j] = p;
    }

    pub fn row(&self, i: usize) -> &[LaurentPoly] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[LaurentPoly] {
        &self.entries
    }

    pub fn matmul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = LaurentPoly::zero();
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.entries[i * n + j] = acc;
            }
        }
        Ok(out)
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> LaurentPoly {
        let idx: Vec<usize> = (0..self.n).collect();
        self.minor_det(&idx, &idx)
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> LaurentPoly {
        match rows.len() {
            1 => self.get(rows[0], cols[0]).clone(),
            2 => {
                let ad = self.get(rows[0], cols[0]) * self.get(rows[1], cols[1]);
                let bc = self.get(rows[0], cols[1]) * self.get(rows[1], cols[0]);
                &ad - &bc
            }
            _ => {
                let mut acc = LaurentPoly::zero();
                let sub_rows = &rows[1..];
                for (k, &c) in cols.iter().enumerate() {
                    let a = self.get(rows[0], c);
                    if a.is_zero() {
                        continue;
                    }
                    let sub_cols: Vec<usize> =
                        cols.iter().copied().filter(|&x| x != c).collect();
                    let term = a * &self.minor_det(sub_rows, &sub_cols);
                    acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
                }
                acc
            }
        }
    }

    /// True when `det ≡ 1`, judged coefficient-wise against
    /// `tol · max(1, Π_i Σ_j |A_ij|₁)`, a Hadamard-style bound on the size of
    /// the determinant's coefficients.
    pub fn is_sl(&self, tol: f64) -> bool {
        self.sl_defect() <= tol * self.det_scale()
    }

    /// Largest coefficient of `det − 1`.
    pub fn sl_defect(&self) -> f64 {
        self.det().max_coeff_diff(&LaurentPoly::one())
    }

    /// `max(1, Π_i Σ_j |A_ij|₁)`, the scale [`PolyMatrix::is_sl`] measures
    /// against.
    pub fn det_scale(&self) -> f64 {
        let mut scale = 1.0f64;
        for i in 0..self.n {
            let row_l1: f64 = self
                .row(i)
                .iter()
                .map(|p| p.coeffs().iter().map(|c| c.norm()).sum::<f64>())
                .sum();
            scale *= row_l1.max(1.0);
        }
        scale
    }

    /// Components `f_i(z) = Σ_j A_ij(z^N) z^j` of `A(z^N) b(z)` with
    /// `b(z) = (1, z, …, z^(N−1))ᵀ`.
    pub fn polyphase_apply(&self) -> Vec<LaurentPoly> {
        let n = self.n;
        (0..n)
            .map(|i| {
                (0..n).fold(LaurentPoly::zero(), |acc, j| {
                    &acc + &self.get(i, j).upsample(n, j as i64)
                })
            })
            .collect()
    }

    /// Pointwise evaluation, row-major.
    pub fn eval_at(&self, z: Complex64) -> Vec<Complex64> {
        self.entries.iter().map(|p| p.eval_at(z)).collect()
    }

    pub fn max_coeff_diff(&self, other: &PolyMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.max_coeff_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn max_degree(&self) -> Degree {
        self.entries
            .iter()
            .map(|p| p.degree())
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn max_span(&self) -> Degree {
        self.entries
            .iter()
            .map(|p| p.span())
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn is_ordinary(&self) -> bool {
        self.entries.iter().all(|p| p.is_ordinary())
    }

    pub fn trimmed(&self, tol: f64) -> PolyMatrix {
        PolyMatrix {
            n: self.n,
            entries: self.entries.iter().map(|p| p.trimmed(tol)).collect(),
        }
    }

    /// For 2×2 matrices: whether `α = A₀₀` or `δ = A₁₁` is a monomial.
    ///
    /// Reported as a diagnostic; the factorization does not rely on it.
    pub fn monomial_diagonal_diagnostic(&self) -> Option<bool> {
        (self.n == 2).then(|| self.get(0, 0).is_monomial() || self.get(1, 1).is_monomial())
    }

    /// True if every off-diagonal entry is zero and every diagonal entry is a
    /// monomial, i.e. the matrix is invertible over the Laurent ring with a
    /// diagonal inverse.
    pub fn is_monomial_diagonal(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let p = self.get(i, j);
                if i == j {
                    p.is_monomial()
                } else {
                    p.is_zero()
                }
            })
        })
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    LowerSubdiagonal,
    UpperSuperdiagonal,
    DiagonalScale,
    MonomialShift,
}

impl StepKind {
    pub fn name(self) -> &'static str {
        match self {
            StepKind::LowerSubdiagonal => "lower",
            StepKind::UpperSuperdiagonal => "upper",
            StepKind::DiagonalScale => "diagonal_scale",
            StepKind::MonomialShift => "monomial_shift",
        }
    }
}

/// One elementary factor of a lifting chain.
///
/// `Lower { offset: p, polys }` puts `polys[k]` at `(k + p, k)`;
/// `Upper { offset: p, polys }` puts it at `(k, k + p)`. Both carry `n − p`
/// polynomials and have a unit diagonal. `DiagonalScale(K)` realizes
/// `diag(K, K⁻¹, 1, …, 1)` and `MonomialShift(l)` realizes `z^l · I`.
#[derive(Debug, Clone, PartialEq)]
pub enum LiftingStep {
    Lower { offset: usize, polys: Vec<LaurentPoly> },
    Upper { offset: usize, polys: Vec<LaurentPoly> },
    DiagonalScale(Complex64),
    MonomialShift(i64),
}

impl LiftingStep {
    /// First-subdiagonal lower step `ℒ_N(L)`; `N = polys.len() + 1`.
    pub fn lower(polys: Vec<LaurentPoly>) -> Self {
        LiftingStep::Lower { offset: 1, polys }
    }

    /// First-superdiagonal upper step `𝒰_N(U)`; `N = polys.len() + 1`.
    pub fn upper(polys: Vec<LaurentPoly>) -> Self {
        LiftingStep::Upper { offset: 1, polys }
    }

    /// `I + q·e_(row,col)` as a lower or upper step of matching offset.
    pub fn elementary(n: usize, row: usize, col: usize, q: LaurentPoly) -> Result<Self> {
        if row == col || row >= n || col >= n {
            return Err(Error::BadOffset {
                offset: row.abs_diff(col),
                n,
            });
        }
        let offset = row.abs_diff(col);
        let mut polys = vec![LaurentPoly::zero(); n - offset];
        if row > col {
            polys[col] = q;
            Ok(LiftingStep::Lower { offset, polys })
        } else {
            polys[row] = q;
            Ok(LiftingStep::Upper { offset, polys })
        }
    }

    pub fn kind(&self) -> StepKind {
        match self {
            LiftingStep::Lower { .. } => StepKind::LowerSubdiagonal,
            LiftingStep::Upper { .. } => StepKind::UpperSuperdiagonal,
            LiftingStep::DiagonalScale(_) => StepKind::DiagonalScale,
            LiftingStep::MonomialShift(_) => StepKind::MonomialShift,
        }
    }

    /// Band count implied by a lower/upper step.
    pub fn implied_n(&self) -> Option<usize> {
        match self {
            LiftingStep::Lower { offset, polys } | LiftingStep::Upper { offset, polys } => {
                Some(polys.len() + offset)
            }
            _ => None,
        }
    }

    /// Nonzero off-diagonal entries `(row, col, poly)` of a lower/upper step.
    pub fn off_diagonal(&self) -> Vec<(usize, usize, &LaurentPoly)> {
        match self {
            LiftingStep::Lower { offset, polys } => polys
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(k, p)| (k + offset, k, p))
                .collect(),
            LiftingStep::Upper { offset, polys } => polys
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(k, p)| (k, k + offset, p))
                .collect(),
            _ => Vec::new(),
        }
    }

    fn check_arity(&self, n: usize) -> Result<()> {
        match self {
            LiftingStep::Lower { offset, polys } | LiftingStep::Upper { offset, polys } => {
                if *offset == 0 || *offset >= n {
                    return Err(Error::BadOffset { offset: *offset, n });
                }
                if polys.len() != n - offset {
                    return Err(Error::BadArity {
                        expected: n - offset,
                        found: polys.len(),
                    });
                }
                Ok(())
            }
            LiftingStep::DiagonalScale(k) if k.is_zero() => Err(Error::SingularScale),
            _ => Ok(()),
        }
    }

    /// The explicit `n × n` matrix of this step.
    pub fn realize(&self, n: usize) -> Result<PolyMatrix> {
        if n < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: n });
        }
        self.check_arity(n)?;
        let mut m = PolyMatrix::identity(n);
        match self {
            LiftingStep::Lower { .. } | LiftingStep::Upper { .. } => {
                for (i, j, p) in self.off_diagonal() {
                    m.set(i, j, p.clone());
                }
            }
            LiftingStep::DiagonalScale(k) => {
                m.set(0, 0, LaurentPoly::constant(*k));
                m.set(1, 1, LaurentPoly::constant(k.inv()));
            }
            LiftingStep::MonomialShift(l) => {
                for i in 0..n {
                    m.set(i, i, LaurentPoly::z_pow(*l));
                }
            }
        }
        Ok(m)
    }

    /// Closed-form inverse.
    ///
    /// Scales and shifts invert to scales and shifts. A lower/upper step
    /// whose nonzero entries never chain (no `k` with both slot `k` and slot
    /// `k + offset` occupied) is nilpotent of order two and inverts by
    /// negation. Otherwise the inverse `I − N + N² − …` picks up product terms
    /// and is returned as a general matrix.
    pub fn invert(&self) -> Result<StepInverse> {
        match self {
            LiftingStep::DiagonalScale(k) => {
                if k.is_zero() {
                    Err(Error::SingularScale)
                } else {
                    Ok(StepInverse::Step(LiftingStep::DiagonalScale(k.inv())))
                }
            }
            LiftingStep::MonomialShift(l) => Ok(StepInverse::Step(LiftingStep::MonomialShift(-l))),
            LiftingStep::Lower { offset, polys } | LiftingStep::Upper { offset, polys } => {
                let n = polys.len() + offset;
                self.check_arity(n)?;
                let chained = (0..polys.len().saturating_sub(*offset))
                    .any(|k| !polys[k].is_zero() && !polys[k + offset].is_zero());
                if !chained {
                    let negated = polys.iter().map(|p| -p).collect();
                    let step = match self {
                        LiftingStep::Lower { .. } => LiftingStep::Lower {
                            offset: *offset,
                            polys: negated,
                        },
                        _ => LiftingStep::Upper {
                            offset: *offset,
                            polys: negated,
                        },
                    };
                    return Ok(StepInverse::Step(step));
                }
                // nilpotent part N = realize − I
                let mut nil = self.realize(n)?;
                for i in 0..n {
                    nil.set(i, i, LaurentPoly::zero());
                }
                let mut inv = PolyMatrix::identity(n);
                let mut power = PolyMatrix::identity(n);
                for k in 1..n {
                    power = power.matmul(&nil)?;
                    for (slot, p) in inv.entries.iter_mut().zip(&power.entries) {
                        *slot = if k % 2 == 1 { &*slot - p } else { &*slot + p };
                    }
                }
                Ok(StepInverse::Matrix(inv))
            }
        }
    }
}

/// Result of [`LiftingStep::invert`].
#[derive(Debug, Clone, PartialEq)]
pub enum StepInverse {
    Step(LiftingStep),
    Matrix(PolyMatrix),
}

impl StepInverse {
    pub fn realize(&self, n: usize) -> Result<PolyMatrix> {
        match self {
            StepInverse::Step(s) => s.realize(n),
            StepInverse::Matrix(m) => {
                if m.n() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: m.n(),
                    });
                }
                Ok(m.clone())
            }
        }
    }
}

/// Realizes a step; free-function form of [`LiftingStep::realize`].
pub fn realize_step(step: &LiftingStep, n: usize) -> Result<PolyMatrix> {
    step.realize(n)
}

/// Free-function form of [`LiftingStep::invert`].
pub fn invert_step(step: &LiftingStep) -> Result<StepInverse> {
    step.invert()
}

/// Product of realized steps, leftmost first.
pub fn product_of_steps(steps: &[LiftingStep], n: usize) -> Result<PolyMatrix> {
    steps
        .iter()
        .try_fold(PolyMatrix::identity(n), |acc, s| acc.matmul(&s.realize(n)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn p(coeffs: &[f64]) -> LaurentPoly {
        LaurentPoly::from_real(coeffs)
    }

    fn z() -> LaurentPoly {
        LaurentPoly::z_pow(1)
    }

    fn m2(a: LaurentPoly, b: LaurentPoly, c: LaurentPoly, d: LaurentPoly) -> PolyMatrix {
        PolyMatrix::from_rows(vec![vec![a, b], vec![c, d]]).unwrap()
    }

    #[test]
    fn matmul_examples() {
        let a = m2(p(&[1.0, 2.0]), z(), p(&[3.0]), p(&[0.0, 0.0, 1.0]));
        assert_eq!(PolyMatrix::identity(2).matmul(&a).unwrap(), a);

        let step = LiftingStep::lower(vec![p(&[2.0, -1.0])]);
        let inv = step.invert().unwrap();
        let prod = step.realize(2).unwrap().matmul(&inv.realize(2).unwrap()).unwrap();
        assert_eq!(prod, PolyMatrix::identity(2));

        let lhs = m2(p(&[1.0]), p(&[]), z(), p(&[1.0]));
        let rhs = m2(p(&[1.0]), p(&[3.0]), p(&[]), p(&[1.0]));
        let prod = lhs.matmul(&rhs).unwrap();
        assert_eq!(prod, m2(p(&[1.0]), p(&[3.0]), z(), p(&[1.0, 3.0])));
        let w = Complex64::from_polar(1.0, 0.9);
        let direct = prod.eval_at(w);
        let (l, r) = (lhs.eval_at(w), rhs.eval_at(w));
        let expect = [
            l[0] * r[0] + l[1] * r[2],
            l[0] * r[1] + l[1] * r[3],
            l[2] * r[0] + l[3] * r[2],
            l[2] * r[1] + l[3] * r[3],
        ];
        for (a, b) in direct.iter().zip(expect) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn matmul_dimension_mismatch() {
        let e = PolyMatrix::identity(2).matmul(&PolyMatrix::identity(3));
        assert!(matches!(e, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn det_examples() {
        assert_eq!(PolyMatrix::identity(4).det(), LaurentPoly::one());
        let u = m2(p(&[1.0]), p(&[3.0, -2.0, 0.5]), p(&[]), p(&[1.0]));
        assert_eq!(u.det(), LaurentPoly::one());
        let a = m2(p(&[1.0]), p(&[3.0]), z(), p(&[1.0, 3.0]));
        assert_eq!(a.det(), LaurentPoly::one());
        assert!(a.is_sl(1e-12));
        let not_sl = m2(p(&[1.0]), p(&[3.0]), z(), p(&[1.0, 4.0]));
        assert!(!not_sl.is_sl(1e-12));
    }

    #[test]
    fn det_3x3_matches_pointwise() {
        let a = PolyMatrix::from_rows(vec![
            vec![p(&[1.0, 2.0]), z(), p(&[0.5])],
            vec![p(&[0.0, 1.0, 1.0]), p(&[2.0]), p(&[1.0, -1.0])],
            vec![p(&[3.0]), p(&[1.0, 0.0, 2.0]), z()],
        ])
        .unwrap();
        let d = a.det();
        let w = Complex64::from_polar(1.0, 2.1);
        let e = a.eval_at(w);
        let expect = e[0] * (e[4] * e[8] - e[5] * e[7]) - e[1] * (e[3] * e[8] - e[5] * e[6])
            + e[2] * (e[3] * e[7] - e[4] * e[6]);
        assert!((d.eval(w).unwrap() - expect).norm() < 1e-12);
    }

    #[test]
    fn realize_examples() {
        let s = LiftingStep::lower(vec![LaurentPoly::zero()]);
        assert_eq!(s.realize(2).unwrap(), PolyMatrix::identity(2));

        let s = LiftingStep::upper(vec![z()]);
        assert_eq!(
            s.realize(2).unwrap(),
            m2(p(&[1.0]), z(), p(&[]), p(&[1.0]))
        );

        let s = LiftingStep::lower(vec![z(), p(&[1.0])]);
        let expect = PolyMatrix::from_rows(vec![
            vec![p(&[1.0]), p(&[]), p(&[])],
            vec![z(), p(&[1.0]), p(&[])],
            vec![p(&[]), p(&[1.0]), p(&[1.0])],
        ])
        .unwrap();
        assert_eq!(s.realize(3).unwrap(), expect);

        assert_eq!(
            s.realize(4),
            Err(Error::BadArity {
                expected: 3,
                found: 2
            })
        );
    }

    #[test]
    fn realize_scale_and_shift() {
        let d = LiftingStep::DiagonalScale(c64(2.0, 0.0)).realize(3).unwrap();
        assert_eq!(d.get(0, 0), &p(&[2.0]));
        assert_eq!(d.get(1, 1), &p(&[0.5]));
        assert_eq!(d.get(2, 2), &p(&[1.0]));
        assert_eq!(d.det(), LaurentPoly::one());
        let s = LiftingStep::MonomialShift(-2).realize(3).unwrap();
        assert_eq!(s.det(), LaurentPoly::z_pow(-6));
        assert_eq!(
            LiftingStep::DiagonalScale(c64(0.0, 0.0)).realize(2),
            Err(Error::SingularScale)
        );
    }

    #[test]
    fn invert_examples() {
        let s = LiftingStep::upper(vec![p(&[3.0])]);
        assert_eq!(
            s.invert().unwrap(),
            StepInverse::Step(LiftingStep::upper(vec![p(&[-3.0])]))
        );
        let d = LiftingStep::DiagonalScale(c64(2.0, 0.0));
        assert_eq!(
            d.invert().unwrap(),
            StepInverse::Step(LiftingStep::DiagonalScale(c64(0.5, 0.0)))
        );
        assert_eq!(
            LiftingStep::DiagonalScale(c64(0.0, 0.0)).invert(),
            Err(Error::SingularScale)
        );

        // chained lower step: inverse picks up the L·M product term
        let s = LiftingStep::lower(vec![z(), p(&[1.0])]);
        let inv = s.invert().unwrap();
        assert!(matches!(inv, StepInverse::Matrix(_)));
        let expect = PolyMatrix::from_rows(vec![
            vec![p(&[1.0]), p(&[]), p(&[])],
            vec![-z(), p(&[1.0]), p(&[])],
            vec![z(), p(&[-1.0]), p(&[1.0])],
        ])
        .unwrap();
        assert_eq!(inv.realize(3).unwrap(), expect);
    }

    #[test]
    fn explicit_3x3_generator_inverses() {
        let (l, m, u, v) = (p(&[1.0, 2.0]), p(&[0.0, -1.0]), p(&[0.5, 0.0, 1.0]), p(&[3.0]));
        let lower = LiftingStep::lower(vec![l.clone(), m.clone()]);
        let lower_inv = PolyMatrix::from_rows(vec![
            vec![p(&[1.0]), p(&[]), p(&[])],
            vec![-&l, p(&[1.0]), p(&[])],
            vec![&l * &m, -&m, p(&[1.0])],
        ])
        .unwrap();
        assert_eq!(lower.invert().unwrap().realize(3).unwrap(), lower_inv);

        let upper = LiftingStep::upper(vec![u.clone(), v.clone()]);
        let upper_inv = PolyMatrix::from_rows(vec![
            vec![p(&[1.0]), -&u, &u * &v],
            vec![p(&[]), p(&[1.0]), -&v],
            vec![p(&[]), p(&[]), p(&[1.0])],
        ])
        .unwrap();
        assert_eq!(upper.invert().unwrap().realize(3).unwrap(), upper_inv);

        // corner generators are offset-2 steps; both lie in SL_3
        let corner_l = LiftingStep::Lower {
            offset: 2,
            polys: vec![l.clone()],
        };
        let corner_u = LiftingStep::Upper {
            offset: 2,
            polys: vec![u.clone()],
        };
        for s in [corner_l, corner_u] {
            let m = s.realize(3).unwrap();
            assert_eq!(m.det(), LaurentPoly::one());
            let inv = s.invert().unwrap().realize(3).unwrap();
            assert_eq!(m.matmul(&inv).unwrap(), PolyMatrix::identity(3));
        }
    }

    #[test]
    fn polyphase_apply_examples() {
        assert_eq!(PolyMatrix::identity(2).polyphase_apply(), vec![p(&[1.0]), z()]);
        let swap = m2(p(&[]), p(&[1.0]), p(&[1.0]), p(&[]));
        assert_eq!(swap.polyphase_apply(), vec![z(), p(&[1.0])]);
        let a = m2(p(&[1.0]), p(&[3.0]), z(), p(&[1.0, 3.0]));
        assert_eq!(
            a.polyphase_apply(),
            vec![p(&[1.0, 3.0]), p(&[0.0, 1.0, 1.0, 3.0])]
        );
    }

    #[test]
    fn monomial_diagnostic() {
        let a = m2(p(&[1.0]), p(&[3.0]), z(), p(&[1.0, 3.0]));
        assert_eq!(a.monomial_diagonal_diagnostic(), Some(true));
        assert_eq!(PolyMatrix::identity(3).monomial_diagonal_diagnostic(), None);
    }
}
