//! Factorization of `SL_N` Laurent polynomial matrices into lifting steps.
//!
//! The factorization is a Euclidean elimination driven by left
//! multiplication with elementary triangular matrices:
//!
//! 1. For each column, the nonzero entry of smallest degree (at or below the
//!    diagonal) is the pivot; every other entry in that part of the column is
//!    replaced by its remainder modulo the pivot. Each such row operation is
//!    recorded as a lifting step. Degrees strictly decrease until a single
//!    entry survives, which must be a unit (a constant, or a monomial for
//!    Laurent input) because the determinant is 1.
//! 2. If the survivor is not on the diagonal it is moved there with one
//!    upper and one lower step.
//! 3. The resulting unit upper-triangular-up-to-diagonal matrix is cleared
//!    above the diagonal by back substitution.
//! 4. The diagonal is folded into `diag(K, K⁻¹, 1, …, 1)` with additional
//!    lifting steps where needed.
//!
//! Adjacent steps of the same kind and offset are merged when their product is
//! again a single step, which recovers `ℒ_N(L)` / `𝒰_N(U)` shaped factors.
//! For `2 × 2` input the procedure alternates upper and lower steps and the
//! remainder degrees form a strictly decreasing sequence.
//!
//! For `N ≥ 3` floating point elimination can lose accuracy on unlucky pivot
//! orders. [`factor_nxn`] therefore retries on symmetric row/column
//! permutations and on the transpose, and if no variant reproduces the input
//! to `tol` it refines the coefficients of the best few chains by damped
//! Gauss–Newton on their fixed supports.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::One;

use crate::laurent::{Degree, LaurentPoly};
use crate::polymat::{LiftingStep, PolyMatrix, StepInverse};
use crate::{Error, Result};

/// Default tolerance for coefficient trimming and reconstruction checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// `steps[0] · steps[1] ⋯ steps[k−1] · residual`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftingChain {
    pub n: usize,
    pub steps: Vec<LiftingStep>,
    pub residual: PolyMatrix,
}

impl LiftingChain {
    pub fn identity(n: usize) -> Self {
        LiftingChain {
            n,
            steps: Vec::new(),
            residual: PolyMatrix::identity(n),
        }
    }

    /// Multiplies out the chain.
    pub fn product(&self) -> Result<PolyMatrix> {
        let mut acc = PolyMatrix::identity(self.n);
        for s in &self.steps {
            acc = acc.matmul(&s.realize(self.n)?)?;
        }
        acc.matmul(&self.residual)
    }

    /// Number of lower/upper steps.
    pub fn lifting_len(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, LiftingStep::Lower { .. } | LiftingStep::Upper { .. }))
            .count()
    }
}

/// Outcome of [`verify_chain`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    /// Largest coefficient difference between the multiplied-out chain and
    /// the original matrix.
    pub max_coeff_err: f64,
    /// For each step, the degree of the entries it eliminated once the step
    /// has been peeled off the left of the working matrix.
    pub degree_profile: Vec<Degree>,
    /// Largest coefficient of `det − 1` over the intermediate matrices.
    pub max_det_defect: f64,
    /// `max_coeff_err ≤ tol`.
    pub passed: bool,
}

/// Size function of the Euclidean ring in use: the degree for ordinary
/// polynomials, the span `deg − min_exp` for Laurent polynomials.
#[derive(Debug, Clone, Copy)]
enum Ring {
    Ordinary,
    Laurent,
}

impl Ring {
    fn of(a: &PolyMatrix) -> Self {
        if a.is_ordinary() {
            Ring::Ordinary
        } else {
            Ring::Laurent
        }
    }

    fn size(self, p: &LaurentPoly) -> Degree {
        match self {
            Ring::Ordinary => p.degree(),
            Ring::Laurent => p.span(),
        }
    }

    fn is_unit(self, p: &LaurentPoly) -> bool {
        match self {
            Ring::Ordinary => p.degree() == Degree::Finite(0),
            Ring::Laurent => p.is_monomial(),
        }
    }

    /// `f = g·q + r` with `size(r) < size(g)`.
    fn divrem(self, f: &LaurentPoly, g: &LaurentPoly, tol: f64) -> Result<(LaurentPoly, LaurentPoly)> {
        match self {
            Ring::Ordinary => f.divrem_tol(g, tol),
            Ring::Laurent => {
                if f.is_zero() {
                    return Ok((LaurentPoly::zero(), LaurentPoly::zero()));
                }
                let (lf, nf) = f.normalize_monomial()?;
                let (lg, ng) = g.normalize_monomial()?;
                let (q, r) = nf.divrem_tol(&ng, tol)?;
                Ok((q.shift(lf - lg), r.shift(lf)))
            }
        }
    }
}

/// Working matrix plus the steps peeled off so far.
///
/// Alongside each entry a running bound on its accumulated rounding error is
/// kept; coefficients below a multiple of that bound are treated as zero so
/// that degrees are read off reliably.
#[derive(Clone)]
struct Peeler {
    n: usize,
    ring: Ring,
    tol: f64,
    scale: f64,
    work: PolyMatrix,
    err: Vec<f64>,
    steps: Vec<LiftingStep>,
}

/// Multiple of the running error bound below which a coefficient is dropped.
const ERR_SAFETY: f64 = 1.0;

fn l1(p: &LaurentPoly) -> f64 {
    p.coeffs().iter().map(|c| c.norm()).sum()
}

/// Multipliers per source row, and the degree each column was cut to.
type RowQuotients = (Vec<(usize, LaurentPoly)>, Vec<i64>);

impl Peeler {
    fn new(a: &PolyMatrix, tol: f64) -> Self {
        Peeler {
            n: a.n(),
            ring: Ring::of(a),
            tol,
            scale: matrix_scale(a),
            work: a.clone(),
            err: a.entries().iter().map(|e| f64::EPSILON * e.max_abs()).collect(),
            steps: Vec::new(),
        }
    }

    fn threshold(&self, i: usize, j: usize) -> f64 {
        (ERR_SAFETY * self.err[i * self.n + j]).max(self.tol)
    }

    /// `row_target −= q · row_source` on the working matrix, recorded as the
    /// step `I + q·e_(target,source)` on the left.
    fn peel(&mut self, target: usize, source: usize, q: LaurentPoly) -> Result<()> {
        if q.is_zero() {
            return Ok(());
        }
        let q_l1 = l1(&q);
        let n = self.n;
        for j in 0..n {
            let s = self.work.get(source, j);
            if s.is_zero() {
                continue;
            }
            let t = self.work.get(target, j);
            let terms = q.coeffs().len().min(s.coeffs().len()) as f64 + 1.0;
            let e = self.err[target * n + j]
                + q_l1 * self.err[source * n + j]
                + f64::EPSILON * terms * (t.max_abs() + q_l1 * s.max_abs());
            self.err[target * n + j] = e;
            let updated = (t - &(&q * s)).trimmed(self.threshold(target, j));
            self.work.set(target, j, updated);
        }
        self.steps
            .push(LiftingStep::elementary(self.n, target, source, q)?);
        Ok(())
    }

    fn size(&self, i: usize, j: usize) -> Degree {
        self.ring.size(self.work.get(i, j))
    }

    /// Row in `rows` with the smallest nonzero entry in `col`; ties go to
    /// the largest leading coefficient, then the lowest index.
    fn pivot(&self, col: usize, rows: core::ops::Range<usize>) -> Option<usize> {
        let lead = |r: usize| self.work.get(r, col).leading().map_or(0.0, |c| c.norm());
        rows.filter(|&r| !self.work.get(r, col).is_zero())
            .min_by(|&a, &b| {
                self.size(a, col)
                    .cmp(&self.size(b, col))
                    .then(lead(b).total_cmp(&lead(a)))
                    .then(a.cmp(&b))
            })
    }

    fn row_degree(&self, i: usize) -> Degree {
        (0..self.n)
            .map(|j| self.work.get(i, j).degree())
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    /// Euclidean reduction of `target` against `pivot` in column `col`.
    fn reduce(&mut self, target: usize, pivot: usize, col: usize) -> Result<()> {
        let f = self.work.get(target, col).clone();
        let g = self.work.get(pivot, col).clone();
        let (q, r) = self.ring.divrem(&f, &g, self.tol)?;
        let before_other = (self.n == 2).then(|| {
            let other = 1 - col;
            (
                self.ring.size(self.work.get(pivot, other)),
                self.work.get(pivot, other).is_zero(),
            )
        });
        self.peel(target, pivot, q)?;
        // the column entry is the remainder by construction
        let r = r.trimmed(self.threshold(target, col));
        self.work.set(target, col, r.clone());
        if let Some((pivot_other, pivot_other_zero)) = before_other {
            // 2×2: for det ≡ 1 the same quotient must also shrink the other
            // column below the pivot row's entry there.
            let other = 1 - col;
            if !r.is_zero() && !pivot_other_zero && self.size(target, other) >= pivot_other {
                // rounding can leave small terms at or above the bound
                let bound = pivot_other.finite().unwrap_or(0);
                let entry = self.work.get(target, other);
                let excess = (bound..=entry.degree().finite().unwrap_or(bound))
                    .map(|e| entry.coeff(e).norm())
                    .fold(0.0, f64::max);
                if excess > NOISE_FLOOR * self.scale {
                    return Err(Error::InconsistentQuotient { column: other });
                }
                let kept = truncate_below(entry, bound);
                self.work.set(target, other, kept);
            }
        }
        Ok(())
    }

    fn row_degrees(&self) -> Result<Vec<i64>> {
        (0..self.n)
            .map(|i| self.row_degree(i).finite().ok_or(Error::NotSl))
            .collect()
    }

    fn total_degree(&self) -> i64 {
        (0..self.n)
            .map(|i| self.row_degree(i).finite().unwrap_or(0))
            .sum()
    }

    fn leading_row(&self, i: usize, d: i64) -> Vec<Complex64> {
        (0..self.n).map(|j| self.work.get(i, j).coeff(d)).collect()
    }

    /// Drops the coefficients of degree `≥ d` in row `t`, which must be
    /// rounding residue.
    fn clear_top(&mut self, t: usize, d: i64, row_scale: f64) -> Result<()> {
        for j in 0..self.n {
            let entry = self.work.get(t, j);
            if entry.degree() < Degree::Finite(d) {
                continue;
            }
            if entry.coeff(d).norm() > NOISE_FLOOR * row_scale {
                return Err(Error::InconsistentQuotient { column: j });
            }
            let kept = truncate_below(entry, d);
            self.work.set(t, j, kept);
        }
        Ok(())
    }

    /// `Σ (deg + 1)` over the entries of row `i`, zero entries counting 0.
    fn row_weight(&self, i: usize) -> i64 {
        (0..self.n)
            .map(|j| self.work.get(i, j).degree().finite().map_or(0, |d| d + 1))
            .sum()
    }

    /// Sum of row degrees, then weight.
    fn potential(&self) -> (i64, i64) {
        (self.total_degree(), self.weight())
    }

    fn weight(&self) -> i64 {
        (0..self.n).map(|i| self.row_weight(i)).sum()
    }

    /// Multipliers `q_s` making `row_t − Σ_s q_s·row_s` as light as possible,
    /// together with the degree each column of row `t` is cut to.
    ///
    /// The top coefficients of every column are asked to vanish, highest
    /// degree first; each request is a linear condition on the coefficients
    /// of the `q_s` and is kept while the accumulated system stays
    /// consistent. A column stops shrinking at its first inconsistent request.
    fn row_quotients(&self, t: usize, sources: &[usize], columns: Option<&[usize]>) -> Option<RowQuotients> {
        let n = self.n;
        let row_t: Vec<&LaurentPoly> = (0..n).map(|j| self.work.get(t, j)).collect();
        // (source, number of coefficients of q_s)
        let mut blocks: Vec<(usize, usize)> = Vec::new();
        for &s in sources.iter().filter(|&&s| s != t) {
            let dq = (0..n)
                .filter_map(|j| {
                    Some(row_t[j].degree().finite()? - self.work.get(s, j).degree().finite()?)
                })
                .max();
            if let Some(dq) = dq.filter(|&d| d >= 0) {
                blocks.push((s, dq as usize + 1));
            }
        }
        if blocks.is_empty() {
            return None;
        }
        let unknowns: usize = blocks.iter().map(|b| b.1).sum();
        let coeff_row = |j: usize, m: i64| -> Vec<Complex64> {
            let mut row = Vec::with_capacity(unknowns);
            for &(s, len) in &blocks {
                let g = self.work.get(s, j);
                row.extend((0..len).map(|k| g.coeff(m - k as i64)));
            }
            row
        };
        let row_scale = row_t.iter().map(|p| p.max_abs()).fold(1.0, f64::max);
        let mut system = Echelon::new(unknowns);
        // nothing may appear above the current degree of a column
        for (j, pj) in row_t.iter().enumerate() {
            let reach = blocks
                .iter()
                .filter_map(|&(s, len)| Some(self.work.get(s, j).degree().finite()? + len as i64 - 1))
                .max();
            let top = pj.degree().finite().unwrap_or(-1);
            if let Some(reach) = reach {
                for m in top + 1..=reach {
                    system.try_add(coeff_row(j, m), Complex64::new(0.0, 0.0), 0.0);
                }
            }
        }

        let mut requests: Vec<(i64, usize)> = Vec::new();
        for (j, pj) in row_t.iter().enumerate() {
            if let Some(top) = pj.degree().finite() {
                requests.extend((0..=top).map(|m| (m, j)));
            }
        }
        match columns {
            None => requests.sort_by_key(|&(m, j)| (core::cmp::Reverse(m), j)),
            Some(cols) => requests.sort_by_key(|&(m, j)| {
                (cols.iter().position(|&c| c == j).unwrap_or(n), core::cmp::Reverse(m))
            }),
        }

        let mut level: Vec<i64> = (0..n)
            .map(|j| row_t[j].degree().finite().map_or(0, |d| d + 1))
            .collect();
        let mut alive = vec![true; n];
        for (m, j) in requests {
            if !alive[j] {
                continue;
            }
            if system.try_add(coeff_row(j, m), row_t[j].coeff(m), DEPENDENCY_TOL * row_scale) {
                level[j] = m;
            } else {
                alive[j] = false;
            }
        }
        let x = system.solve();
        let mut quotients = Vec::new();
        let mut offset = 0;
        for &(s, len) in &blocks {
            let q = LaurentPoly::new(0, x[offset..offset + len].to_vec());
            offset += len;
            if !q.is_zero() {
                quotients.push((s, q));
            }
        }
        (!quotients.is_empty()).then_some((quotients, level))
    }

    /// Applies [`Peeler::row_quotients`] to row `t` on a copy; returns the
    /// copy when it is lighter.
    fn reduce_row(&self, t: usize, sources: &[usize]) -> Result<Option<Peeler>> {
        let mut best: Option<Peeler> = None;
        let mut orders: Vec<Option<Vec<usize>>> = vec![None];
        let n = self.n;
        for first in 0..n {
            orders.push(Some((0..n).map(|k| (first + k) % n).collect()));
        }
        for order in orders {
            if let Some(trial) = self.reduce_row_with(t, sources, order.as_deref())? {
                if best.as_ref().is_none_or(|b| trial.row_weight(t) < b.row_weight(t)) {
                    best = Some(trial);
                }
            }
        }
        Ok(best)
    }

    fn reduce_row_with(&self, t: usize, sources: &[usize], columns: Option<&[usize]>) -> Result<Option<Peeler>> {
        let Some((quotients, level)) = self.row_quotients(t, sources, columns) else {
            return Ok(None);
        };
        let before = self.row_weight(t);
        let mut trial = self.clone();
        for (s, q) in quotients {
            trial.peel(t, s, q)?;
        }
        let row_scale = (0..self.n)
            .map(|j| self.work.get(t, j).max_abs())
            .fold(1.0, f64::max);
        for (j, &cut) in level.iter().enumerate() {
            let e = trial.work.get(t, j);
            if e.degree() < Degree::Finite(cut) {
                continue;
            }
            let excess = (cut..=e.degree().finite().unwrap_or(cut))
                .map(|m| e.coeff(m).norm())
                .fold(0.0, f64::max);
            if excess > NOISE_FLOOR * row_scale {
                return Ok(None);
            }
            let kept = truncate_below(e, cut);
            trial.work.set(t, j, kept);
        }
        Ok((trial.row_weight(t) < before).then_some(trial))
    }

    /// Lowers degrees until the working matrix is constant. Valid for
    /// ordinary polynomial entries.
    ///
    /// Each round reduces the row that loses the most weight against all
    /// other rows; when no row improves, a single reduction on the leading
    /// coefficient matrix is applied instead.
    fn row_reduce(&mut self) -> Result<()> {
        let mut iterations = 0usize;
        let guard = iteration_guard(&self.work);
        loop {
            if self.total_degree() == 0 {
                self.row_degrees()?;
                return Ok(());
            }
            let total = self.potential();
            let mut best: Option<((i64, i64), Peeler)> = None;
            for trial in self.moves()? {
                let key = trial.potential();
                if key < total && best.as_ref().is_none_or(|(bk, _)| key < *bk) {
                    best = Some((key, trial));
                }
            }
            match best {
                Some((_, trial)) => *self = trial,
                _ => self.reduce_leading()?,
            }
            iterations += 1;
            if iterations > guard {
                return Err(Error::NonTerminating { iterations });
            }
        }
    }

    /// Candidate successors that lower the weight: a banded lower sweep and
    /// a banded upper sweep (each row against the rows above, resp. below),
    /// and, if neither helps, single-row reductions against all other rows.
    fn moves(&self) -> Result<Vec<Peeler>> {
        let n = self.n;
        let total = self.potential();
        let mut out = Vec::new();
        for upper in [false, true] {
            let mut trial = self.clone();
            let rows: Vec<usize> = if upper { (0..n - 1).rev().collect() } else { (1..n).collect() };
            for t in rows {
                let sources: Vec<usize> = if upper { (t + 1..n).collect() } else { (0..t).collect() };
                if let Some(next) = trial.reduce_row(t, &sources)? {
                    trial = next;
                }
            }
            if trial.potential() < total {
                out.push(trial);
            }
        }
        if out.is_empty() {
            let all: Vec<usize> = (0..n).collect();
            for t in 0..n {
                if let Some(trial) = self.reduce_row(t, &all)? {
                    if trial.potential() < total {
                        out.push(trial);
                    }
                }
            }
        }
        Ok(out)
    }

    /// One monomial row reduction driven by the leading coefficient matrix.
    ///
    /// A unimodular matrix whose rows have positive degree has a singular
    /// leading coefficient matrix, so some row of maximal degree among a
    /// dependent set can have its top coefficients cancelled by the others.
    fn reduce_leading(&mut self) -> Result<()> {
        let n = self.n;
        let degs = self.row_degrees()?;
        let lc: Vec<Vec<Complex64>> = (0..n).map(|i| self.leading_row(i, degs[i])).collect();
        let mut order: Vec<usize> = (0..n).filter(|&i| degs[i] > 0).collect();
        order.sort_by_key(|&i| (core::cmp::Reverse(degs[i]), i));
        for &t in &order {
            let sources: Vec<usize> = (0..n).filter(|&i| i != t && degs[i] <= degs[t]).collect();
            let vectors: Vec<&[Complex64]> = sources.iter().map(|&s| lc[s].as_slice()).collect();
            let Some(c) = combination(&vectors, &lc[t], DEPENDENCY_TOL) else {
                continue;
            };
            for (&s, &cs) in sources.iter().zip(&c) {
                if cs != Complex64::new(0.0, 0.0) {
                    self.peel(t, s, LaurentPoly::monomial(cs, degs[t] - degs[s]))?;
                }
            }
            let row_scale = lc[t].iter().map(|c| c.norm()).fold(1.0, f64::max);
            self.clear_top(t, degs[t], row_scale)?;
            return Ok(());
        }
        Err(Error::NotSl)
    }
}

/// Linear system assembled one equation at a time, kept in echelon form.
struct Echelon {
    unknowns: usize,
    /// (coefficients, right-hand side, pivot column)
    rows: Vec<(Vec<Complex64>, Complex64, usize)>,
    accepted: Vec<(Vec<Complex64>, Complex64)>,
}

impl Echelon {
    fn new(unknowns: usize) -> Self {
        Echelon {
            unknowns,
            rows: Vec::new(),
            accepted: Vec::new(),
        }
    }

    /// Adds `a·x = b` unless it contradicts the equations already present;
    /// returns whether the system is still consistent with it.
    fn try_add(&mut self, a: Vec<Complex64>, b: Complex64, b_tol: f64) -> bool {
        let ok = self.reduce_and_push(a.clone(), b, b_tol);
        if ok {
            self.accepted.push((a, b));
        }
        ok
    }

    fn reduce_and_push(&mut self, mut a: Vec<Complex64>, mut b: Complex64, b_tol: f64) -> bool {
        let a_scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (row, rb, p) in &self.rows {
            let f = a[*p] / row[*p];
            if f.norm() == 0.0 {
                continue;
            }
            for (x, y) in a.iter_mut().zip(row) {
                *x -= f * y;
            }
            b -= f * rb;
        }
        let (p, pv) = a
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.norm()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pv <= 1e-9 * a_scale || pv == 0.0 {
            return b.norm() <= b_tol;
        }
        self.rows.push((a, b, p));
        true
    }

    /// Solves the accepted equations afresh with complete pivoting.
    fn solve(&self) -> Vec<Complex64> {
        let (a, b): (Vec<_>, Vec<_>) = self.accepted.iter().cloned().unzip();
        let mut x = solve_pivoted(a.clone(), b.clone(), self.unknowns);
        for _ in 0..2 {
            let r: Vec<Complex64> = a
                .iter()
                .zip(&b)
                .map(|(row, bi)| bi - row.iter().zip(&x).map(|(c, xi)| c * xi).sum::<Complex64>())
                .collect();
            let dx = solve_pivoted(a.clone(), r, self.unknowns);
            for (xi, d) in x.iter_mut().zip(dx) {
                *xi += d;
            }
        }
        x
    }
}

/// Relative residual below which a leading coefficient vector is accepted as
/// a combination of others.
const DEPENDENCY_TOL: f64 = 1e-8;

/// Solves `Σ cᵢ vᵢ = target` by Gaussian elimination with complete pivoting;
/// free unknowns are set to zero. Returns `None` when the relative residual
/// exceeds `rel`.
fn combination(vectors: &[&[Complex64]], target: &[Complex64], rel: f64) -> Option<Vec<Complex64>> {
    let m = target.len();
    let rows: Vec<Vec<Complex64>> = (0..m).map(|i| vectors.iter().map(|v| v[i]).collect()).collect();
    let c = solve_pivoted(rows, target.to_vec(), vectors.len());
    let max_a = vectors.iter().flat_map(|v| v.iter()).map(|c| c.norm()).fold(0.0, f64::max);
    let scale = target.iter().map(|c| c.norm()).fold(max_a, f64::max);
    let residual = (0..m)
        .map(|i| (target[i] - vectors.iter().zip(&c).map(|(v, &ci)| ci * v[i]).sum::<Complex64>()).norm())
        .fold(0.0, f64::max);
    (residual <= rel * scale).then_some(c)
}

/// Gaussian elimination with complete pivoting on `a·x = b` (`a` given by
/// rows); unknowns outside the numerical rank are set to zero.
fn solve_pivoted(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>, k: usize) -> Vec<Complex64> {
    let m = b.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut perm: Vec<usize> = (0..k).collect();
    let max_a = a.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    let rank_tol = 1e-10 * max_a;
    let mut rank = 0;
    while rank < m.min(k) {
        let mut best = (rank, rank, 0.0);
        for (i, row) in a.iter().enumerate().skip(rank) {
            for (j, c) in row.iter().enumerate().skip(rank) {
                let v = c.norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= rank_tol {
            break;
        }
        a.swap(rank, best.0);
        b.swap(rank, best.0);
        for row in a.iter_mut() {
            row.swap(rank, best.1);
        }
        perm.swap(rank, best.1);
        let (head, tail) = a.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for (off, row) in tail.iter_mut().enumerate() {
            let f = row[rank] / pivot_row[rank];
            if f == zero {
                continue;
            }
            for j in rank..k {
                row[j] -= f * pivot_row[j];
            }
            let d = f * b[rank];
            b[rank + 1 + off] -= d;
        }
        rank += 1;
    }
    let mut x = vec![zero; k];
    for i in (0..rank).rev() {
        let mut acc = b[i];
        for j in i + 1..rank {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    let mut c = vec![zero; k];
    for (i, &p) in perm.iter().enumerate() {
        c[p] = x[i];
    }
    c
}

/// Relative size of a coefficient that is treated as rounding residue when a
/// degree bound is known to hold exactly.
const NOISE_FLOOR: f64 = 1e-6;

fn matrix_scale(a: &PolyMatrix) -> f64 {
    a.entries().iter().map(|e| e.max_abs()).fold(1.0, f64::max)
}

/// Drops every term of degree `≥ bound`.
fn truncate_below(p: &LaurentPoly, bound: i64) -> LaurentPoly {
    let coeffs = (p.min_exp()..bound.max(p.min_exp()))
        .map(|e| p.coeff(e))
        .collect();
    LaurentPoly::new(p.min_exp(), coeffs)
}

fn check_input(a: &PolyMatrix, tol: f64) -> Result<()> {
    if !a.is_sl(tol) {
        return Err(Error::NotSl);
    }
    Ok(())
}

/// Makes `A₀₀` nonzero and of minimal degree in column 0 using upper steps,
/// so that a Euclidean pass down the first column can start from row 0.
///
/// Returns the recorded steps (leftmost first) and the adjusted matrix, with
/// `a = Π steps · adjusted`.
pub fn degree_prepass(a: &PolyMatrix, tol: f64) -> Result<(Vec<LiftingStep>, PolyMatrix)> {
    check_input(a, tol)?;
    let mut p = Peeler::new(a, tol);
    prepass_in_place(&mut p)?;
    Ok((merge_steps(p.steps), p.work))
}

fn prepass_in_place(p: &mut Peeler) -> Result<()> {
    let n = p.n;
    let Some(k) = p.pivot(0, 0..n) else {
        return Err(Error::NotSl);
    };
    if k == 0 {
        return Ok(());
    }
    if !p.work.get(0, 0).is_zero() {
        p.reduce(0, k, 0)?;
    }
    if p.work.get(0, 0).is_zero() {
        // row_0 += row_k
        p.peel(0, k, LaurentPoly::constant(-Complex64::one()))?;
    }
    Ok(())
}

/// Factors a `2 × 2` matrix; see [`factor_nxn`].
pub fn factor_2x2(a: &PolyMatrix, tol: f64) -> Result<LiftingChain> {
    if a.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: a.n(),
        });
    }
    factor_nxn(a, tol)
}

/// Factors `a ∈ SL_N` into lifting steps and a residual
/// `diag(K, K⁻¹, 1, …, 1)` (the identity when `K = 1`).
///
/// `tol` controls coefficient trimming (relative to the magnitude of the
/// operands, with a floor of 1) and the determinant check.
pub fn factor_nxn(a: &PolyMatrix, tol: f64) -> Result<LiftingChain> {
    check_input(a, tol)?;
    let n = a.n();
    let bound = tol * matrix_scale(a);
    let mut first_err = None;
    let mut found: Vec<(f64, LiftingChain)> = Vec::new();
    for (idx, (perm, transposed)) in variants(n).into_iter().enumerate() {
        if idx >= SHORT_SEARCH && !found.is_empty() {
            break;
        }
        let b = permuted(a, &perm, transposed);
        let chain = eliminate(&b, tol).and_then(|(elems, diag)| {
            let (elems, diag) = undo_variant(elems, diag, &perm, transposed);
            assemble(n, elems, diag)
        });
        match chain {
            Ok(chain) => {
                let err = chain.product()?.max_coeff_diff(a);
                if err <= bound {
                    return Ok(chain);
                }
                found.push((err, chain));
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    // nothing was accurate enough: refine the most promising chains
    found.sort_by(|x, y| x.0.total_cmp(&y.0));
    found.truncate(POLISH_CANDIDATES);
    let mut best: Option<(f64, LiftingChain)> = None;
    for (err, chain) in found {
        let (chain, err) = polish(chain, err, a, bound)?;
        if err <= bound {
            return Ok(chain);
        }
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, chain));
        }
    }
    match (best, first_err) {
        (Some((_, chain)), _) => Ok(chain),
        (None, Some(e)) => Err(e),
        (None, None) => Err(Error::NotSl),
    }
}

/// Chains handed to [`polish`] when no variant meets the bound.
const POLISH_CANDIDATES: usize = 3;

/// Damping levels tried per round, relative to the largest Jacobian column.
const POLISH_DAMPING: [f64; 3] = [1e-10, 1e-7, 1e-4];

/// Gauss–Newton rounds in [`polish`].
const POLISH_ROUNDS: usize = 10;

/// Refines the step coefficients, on their current supports, towards
/// `product = a`.
///
/// The product is linear in each coefficient: moving the coefficient of
/// `z^e` at `(r, c)` in step `k` changes it by `z^e · P_k[:, r] ⊗ Q_k[c, :]`,
/// where `P_k` is the product of the steps before `k` and `Q_k` that of the
/// steps after it times the residual. Each round solves the damped normal
/// equations of that Jacobian and keeps the update only if the error drops.
fn polish(chain: LiftingChain, err: f64, a: &PolyMatrix, bound: f64) -> Result<(LiftingChain, f64)> {
    let n = chain.n;
    let mut best = (chain, err);
    for _ in 0..POLISH_ROUNDS {
        let mut improved = false;
        for next in gauss_newton_step(&best.0, a)? {
            let next_err = next.product()?.max_coeff_diff(a);
            if next_err < best.1 {
                best = (next, next_err);
                improved = true;
            }
        }
        if !improved {
            break;
        }
        if best.1 <= bound {
            break;
        }
    }
    debug_assert_eq!(best.0.n, n);
    Ok(best)
}

fn step_entry(step: &LiftingStep, p: usize) -> Option<(usize, usize)> {
    match step {
        LiftingStep::Lower { offset, .. } => Some((p + offset, p)),
        LiftingStep::Upper { offset, .. } => Some((p, p + offset)),
        _ => None,
    }
}

fn step_polys_mut(step: &mut LiftingStep) -> Option<&mut Vec<LaurentPoly>> {
    match step {
        LiftingStep::Lower { polys, .. } | LiftingStep::Upper { polys, .. } => Some(polys),
        _ => None,
    }
}

fn gauss_newton_step(chain: &LiftingChain, a: &PolyMatrix) -> Result<Vec<LiftingChain>> {
    let n = chain.n;
    let k_len = chain.steps.len();
    let mats = chain
        .steps
        .iter()
        .map(|s| s.realize(n))
        .collect::<Result<Vec<_>>>()?;
    let mut prefix = Vec::with_capacity(k_len + 1);
    prefix.push(PolyMatrix::identity(n));
    for m in &mats {
        let next = prefix[prefix.len() - 1].matmul(m)?;
        prefix.push(next);
    }
    let mut suffix = vec![chain.residual.clone(); k_len + 1];
    for k in (0..k_len).rev() {
        suffix[k] = mats[k].matmul(&suffix[k + 1])?;
    }
    let product = prefix[k_len].matmul(&chain.residual)?;

    // (step, poly index, exponent) and its Jacobian column, entry-wise
    let mut params: Vec<(usize, usize, i64)> = Vec::new();
    let mut columns: Vec<Vec<LaurentPoly>> = Vec::new();
    for (k, step) in chain.steps.iter().enumerate() {
        let polys = match step {
            LiftingStep::Lower { polys, .. } | LiftingStep::Upper { polys, .. } => polys,
            _ => continue,
        };
        for (p, poly) in polys.iter().enumerate() {
            let (Some((r, c)), Some(hi)) = (step_entry(step, p), poly.degree().finite()) else {
                continue;
            };
            let base: Vec<LaurentPoly> = (0..n * n)
                .map(|ij| prefix[k].get(ij / n, r) * suffix[k + 1].get(c, ij % n))
                .collect();
            for e in poly.min_exp()..=hi {
                params.push((k, p, e));
                columns.push(base.iter().map(|b| b.shift(e)).collect());
            }
        }
    }
    if params.is_empty() {
        return Ok(Vec::new());
    }

    // one equation per coefficient of each entry of product − a
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    let mut rhs: Vec<Complex64> = Vec::new();
    for ij in 0..n * n {
        let (i, j) = (ij / n, ij % n);
        let f = product.get(i, j) - a.get(i, j);
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for p in columns.iter().map(|col| &col[ij]).chain([&f]) {
            if let Some(d) = p.degree().finite() {
                lo = lo.min(p.min_exp());
                hi = hi.max(d);
            }
        }
        for e in lo..=hi {
            rows.push(columns.iter().map(|col| col[ij].coeff(e)).collect());
            rhs.push(-f.coeff(e));
        }
    }

    // Levenberg–Marquardt: damping rows μ·I appended to the system
    let u = params.len();
    let col_max = (0..u)
        .map(|x| num_traits::Float::sqrt(rows.iter().map(|r| r[x].norm_sqr()).sum::<f64>()))
        .fold(0.0, f64::max);
    let mut out = Vec::new();
    for damping in POLISH_DAMPING {
        let mu = damping * col_max;
        let mut aug = rows.clone();
        let mut b = rhs.clone();
        for x in 0..u {
            let mut r = vec![Complex64::new(0.0, 0.0); u];
            r[x] = Complex64::new(mu, 0.0);
            aug.push(r);
            b.push(Complex64::new(0.0, 0.0));
        }
        let delta = least_squares(aug, b, u);

        let mut next = chain.clone();
        for (&(k, p, e), d) in params.iter().zip(&delta) {
            let Some(polys) = step_polys_mut(&mut next.steps[k]) else {
                continue;
            };
            let q = &polys[p];
            let lo = q.min_exp().min(e);
            let hi = q.degree().finite().unwrap_or(e).max(e);
            let mut coeffs: Vec<Complex64> = (lo..=hi).map(|x| q.coeff(x)).collect();
            coeffs[(e - lo) as usize] += d;
            polys[p] = LaurentPoly::with_tol(lo, coeffs, 0.0);
        }
        out.push(next);
    }
    Ok(out)
}

/// Least-squares solution of `a·x ≈ b` (`a` given by rows) by Householder QR
/// with column pivoting; unknowns beyond the numerical rank are set to zero.
#[allow(clippy::needless_range_loop)] // column sweeps over row-major storage
fn least_squares(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>, u: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let m = a.len();
    let mut perm: Vec<usize> = (0..u).collect();
    let mut rank = 0;
    let mut r00 = 0.0;
    for k in 0..m.min(u) {
        let col_norm = |a: &Vec<Vec<Complex64>>, j: usize| (k..m).map(|i| a[i][j].norm_sqr()).sum::<f64>();
        let Some(p) = (k..u).max_by(|&x, &y| col_norm(&a, x).total_cmp(&col_norm(&a, y))) else {
            break;
        };
        if p != k {
            for row in a.iter_mut() {
                row.swap(k, p);
            }
            perm.swap(k, p);
        }
        let norm = num_traits::Float::sqrt(col_norm(&a, k));
        if k == 0 {
            r00 = norm;
        }
        if norm == 0.0 || norm <= 1e-14 * r00 {
            break;
        }
        let x0 = a[k][k];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        // v = x − α e₁; H = I − 2vvᴴ/(vᴴv)
        let mut v: Vec<Complex64> = (k..m).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let v2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        for j in k..u {
            let s: Complex64 = v.iter().zip(k..m).map(|(vi, i)| vi.conj() * a[i][j]).sum();
            let f = s * (2.0 / v2);
            for (vi, i) in v.iter().zip(k..m) {
                a[i][j] -= f * vi;
            }
        }
        let s: Complex64 = v.iter().zip(k..m).map(|(vi, i)| vi.conj() * b[i]).sum();
        let f = s * (2.0 / v2);
        for (vi, i) in v.iter().zip(k..m) {
            b[i] -= f * vi;
        }
        rank = k + 1;
    }
    let mut y = vec![zero; u];
    for k in (0..rank).rev() {
        let mut acc = b[k];
        for j in k + 1..rank {
            acc -= a[k][j] * y[j];
        }
        y[k] = acc / a[k][k];
    }
    let mut x = vec![zero; u];
    for (k, &p) in perm.iter().enumerate() {
        x[p] = y[k];
    }
    x
}

/// Elementary factors `(row, col, q)`, leftmost first, and the monomial
/// diagonal left over: `a = Π (I + q·e_(row,col)) · diag(d)`.
type Elimination = (Vec<(usize, usize, LaurentPoly)>, Vec<LaurentPoly>);

/// Variants tried by [`factor_nxn`] while some chain, however inaccurate,
/// is at hand; the search only continues to [`MAX_VARIANTS`] when every
/// attempt so far has failed outright.
const SHORT_SEARCH: usize = 12;

/// Most variants tried by [`factor_nxn`].
const MAX_VARIANTS: usize = 48;

/// Symmetric row/column permutations, each plain and transposed, identity
/// first. Elimination is path dependent; rounding that derails one ordering
/// usually spares another.
fn variants(n: usize) -> Vec<(Vec<usize>, bool)> {
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        perms.push(current.clone());
        if perms.len() * 2 >= MAX_VARIANTS || !next_permutation(&mut current) {
            break;
        }
    }
    perms
        .into_iter()
        .flat_map(|p| [(p.clone(), false), (p, true)])
        .collect()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap_or(i);
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// `b[i][j] = a[perm[i]][perm[j]]`, transposed on request.
fn permuted(a: &PolyMatrix, perm: &[usize], transposed: bool) -> PolyMatrix {
    let n = a.n();
    let mut b = PolyMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let e = a.get(perm[i], perm[j]).clone();
            if transposed {
                b.set(j, i, e);
            } else {
                b.set(i, j, e);
            }
        }
    }
    b
}

/// Maps a factorization of [`permuted`] back to one of the original.
fn undo_variant(
    elems: Vec<(usize, usize, LaurentPoly)>,
    diag: Vec<LaurentPoly>,
    perm: &[usize],
    transposed: bool,
) -> Elimination {
    let elems: Vec<_> = if transposed {
        // bᵀ = d·Π E(s,t,q) reversed; pushing d to the right rescales by d_s/d_t
        elems
            .into_iter()
            .rev()
            .map(|(t, s, q)| {
                let q = &(&q * &diag[s]) * &monomial_inverse(&diag[t]);
                (s, t, q)
            })
            .collect()
    } else {
        elems
    };
    let elems = elems
        .into_iter()
        .map(|(t, s, q)| (perm[t], perm[s], q))
        .collect();
    let mut out = vec![LaurentPoly::one(); diag.len()];
    for (i, d) in diag.into_iter().enumerate() {
        out[perm[i]] = d;
    }
    (elems, out)
}

fn assemble(n: usize, elems: Vec<(usize, usize, LaurentPoly)>, mut diag: Vec<LaurentPoly>) -> Result<LiftingChain> {
    let mut steps = elems
        .into_iter()
        .map(|(r, c, q)| LiftingStep::elementary(n, r, c, q))
        .collect::<Result<Vec<_>>>()?;
    // fold the diagonal into slots 0 and 1
    for i in (2..n).rev() {
        if diag[i].max_coeff_diff(&LaurentPoly::one()) == 0.0 {
            continue;
        }
        let d = diag[i].clone();
        push_diagonal_pair(&mut steps, n, i - 1, &monomial_inverse(&d))?;
        diag[i - 1] = &diag[i - 1] * &d;
        diag[i] = LaurentPoly::one();
    }
    let lead = &diag[0];
    let k = lead.coeff(lead.min_exp());
    if lead.min_exp() != 0 {
        push_diagonal_pair(&mut steps, n, 0, &LaurentPoly::z_pow(lead.min_exp()))?;
    }
    let residual = if (k - Complex64::one()).norm() == 0.0 {
        PolyMatrix::identity(n)
    } else {
        LiftingStep::DiagonalScale(k).realize(n)?
    };

    Ok(LiftingChain {
        n,
        steps: merge_steps(steps),
        residual,
    })
}

fn eliminate(a: &PolyMatrix, tol: f64) -> Result<Elimination> {
    let n = a.n();
    let mut p = Peeler::new(a, tol);
    match p.ring {
        Ring::Ordinary => p.row_reduce()?,
        Ring::Laurent => prepass_in_place(&mut p)?,
    }

    let guard = iteration_guard(a);
    for col in 0..n {
        let mut iterations = 0usize;
        loop {
            let Some(pivot) = p.pivot(col, col..n) else {
                return Err(Error::NotSl);
            };
            let others: Vec<usize> = (col..n)
                .filter(|&r| r != pivot && !p.work.get(r, col).is_zero())
                .collect();
            if others.is_empty() {
                if pivot != col {
                    // move the surviving unit onto the diagonal
                    p.peel(col, pivot, LaurentPoly::constant(-Complex64::one()))?;
                    p.work.set(col, col, p.work.get(pivot, col).clone());
                    p.peel(pivot, col, LaurentPoly::one())?;
                    p.work.set(pivot, col, LaurentPoly::zero());
                }
                break;
            }
            let pivot_size = p.size(pivot, col);
            for t in others {
                p.reduce(t, pivot, col)?;
                if p.size(t, col) >= pivot_size {
                    return Err(Error::NonTerminating { iterations });
                }
            }
            iterations += 1;
            if iterations > guard {
                return Err(Error::NonTerminating { iterations });
            }
        }
        if !p.ring.is_unit(p.work.get(col, col)) {
            return Err(Error::NonUnitPivot { column: col });
        }
    }

    // back substitution: clear above the diagonal, last column first
    for j in (1..n).rev() {
        let d_inv = monomial_inverse(p.work.get(j, j));
        for i in 0..j {
            let e = p.work.get(i, j).clone();
            if e.is_zero() {
                continue;
            }
            let q = &e * &d_inv;
            p.peel(i, j, q)?;
            p.work.set(i, j, LaurentPoly::zero());
        }
    }

    let diag = (0..n).map(|i| p.work.get(i, i).clone()).collect();
    let elems = p
        .steps
        .iter()
        .flat_map(|s| s.off_diagonal().into_iter().map(|(r, c, q)| (r, c, q.clone())))
        .collect();
    Ok((elems, diag))
}

fn iteration_guard(a: &PolyMatrix) -> usize {
    let total: i64 = a
        .entries()
        .iter()
        .map(|e| e.span().finite().unwrap_or(0) + 1)
        .sum();
    4 * (total as usize) + 8 * a.n()
}

fn monomial_inverse(d: &LaurentPoly) -> LaurentPoly {
    let e = d.min_exp();
    LaurentPoly::monomial(d.coeff(e).inv(), -e)
}

/// Appends lifting steps realizing `diag(u, u⁻¹)` on rows `(r, r+1)`:
/// `𝒰(u) ℒ(−u⁻¹) 𝒰(u) · 𝒰(−1) ℒ(1) 𝒰(−1)`.
fn push_diagonal_pair(steps: &mut Vec<LiftingStep>, n: usize, r: usize, u: &LaurentPoly) -> Result<()> {
    let u_inv = monomial_inverse(u);
    let minus_one = LaurentPoly::constant(-Complex64::one());
    let seq = [
        (r, r + 1, u.clone()),
        (r + 1, r, -&u_inv),
        (r, r + 1, u.clone()),
        (r, r + 1, minus_one.clone()),
        (r + 1, r, LaurentPoly::one()),
        (r, r + 1, minus_one),
    ];
    for (i, j, q) in seq {
        steps.push(LiftingStep::elementary(n, i, j, q)?);
    }
    Ok(())
}

/// Merges adjacent same-kind, same-offset steps whose product is again a
/// single step, i.e. `(I + N₁)(I + N₂) = I + N₁ + N₂` because `N₁N₂ = 0`.
pub fn merge_steps(steps: Vec<LiftingStep>) -> Vec<LiftingStep> {
    let mut out: Vec<LiftingStep> = Vec::with_capacity(steps.len());
    for step in steps {
        if let Some(prev) = out.last_mut() {
            if let Some(merged) = try_merge(prev, &step) {
                if merged.off_diagonal().is_empty() {
                    out.pop();
                } else {
                    *prev = merged;
                }
                continue;
            }
        }
        out.push(step);
    }
    out
}

fn try_merge(a: &LiftingStep, b: &LiftingStep) -> Option<LiftingStep> {
    let (oa, pa, ob, pb, lower) = match (a, b) {
        (
            LiftingStep::Lower { offset: oa, polys: pa },
            LiftingStep::Lower { offset: ob, polys: pb },
        ) => (oa, pa, ob, pb, true),
        (
            LiftingStep::Upper { offset: oa, polys: pa },
            LiftingStep::Upper { offset: ob, polys: pb },
        ) => (oa, pa, ob, pb, false),
        _ => return None,
    };
    if oa != ob || pa.len() != pb.len() {
        return None;
    }
    let cross = a
        .off_diagonal()
        .iter()
        .any(|&(_, ca, _)| b.off_diagonal().iter().any(|&(rb, _, _)| rb == ca));
    if cross {
        return None;
    }
    let polys = pa.iter().zip(pb).map(|(x, y)| x + y).collect();
    Some(if lower {
        LiftingStep::Lower { offset: *oa, polys }
    } else {
        LiftingStep::Upper { offset: *oa, polys }
    })
}

fn apply_inverse_left(step: &LiftingStep, w: &PolyMatrix) -> Result<PolyMatrix> {
    let n = w.n();
    match step.invert()? {
        StepInverse::Step(s) => s.realize(n)?.matmul(w),
        StepInverse::Matrix(m) => m.matmul(w),
    }
}

/// Multiplies the chain back out and compares it with `original`; also
/// replays the peeling to report the degree descent.
pub fn verify_chain(chain: &LiftingChain, original: &PolyMatrix, tol: f64) -> Result<ChainReport> {
    if chain.n != original.n() || chain.residual.n() != original.n() {
        return Err(Error::DimensionMismatch {
            expected: original.n(),
            found: chain.n,
        });
    }
    let product = chain.product()?;
    let max_coeff_err = product.max_coeff_diff(original);
    let ring = Ring::of(original);

    let mut work = original.clone();
    let mut degree_profile = Vec::with_capacity(chain.steps.len());
    let mut max_det_defect = work.sl_defect();
    for step in &chain.steps {
        work = apply_inverse_left(step, &work)?.trimmed(tol);
        max_det_defect = max_det_defect.max(work.sl_defect());
        let entries = step.off_diagonal();
        let d = if entries.is_empty() {
            work.max_degree()
        } else {
            entries
                .iter()
                .map(|&(r, c, _)| {
                    let pivot_col = (0..work.n()).find(|&j| !work.get(c, j).is_zero());
                    pivot_col.map_or(Degree::NegInfinity, |pc| ring.size(work.get(r, pc)))
                })
                .max()
                .unwrap_or(Degree::NegInfinity)
        };
        degree_profile.push(d);
    }
    Ok(ChainReport {
        max_coeff_err,
        degree_profile,
        max_det_defect,
        passed: max_coeff_err <= tol,
    })
}

/// Checks that the profile strictly decreases between successive steps of
/// the same kind. Steps with profile `≤ 0` act on constant entries (the tail
/// that realizes the residual) and are not compared.
pub fn profile_strictly_descends(chain: &LiftingChain, profile: &[Degree]) -> bool {
    let mut last_lower: Option<Degree> = None;
    let mut last_upper: Option<Degree> = None;
    for (step, &d) in chain.steps.iter().zip(profile) {
        if d <= Degree::Finite(0) {
            continue;
        }
        let slot = match step {
            LiftingStep::Lower { .. } => &mut last_lower,
            LiftingStep::Upper { .. } => &mut last_upper,
            _ => continue,
        };
        if let Some(prev) = *slot {
            if d >= prev {
                return false;
            }
        }
        *slot = Some(d);
    }
    true
}

/// Random lifting steps alternating lower/upper (first-(sub|super)diagonal,
/// all `N − 1` polynomials populated) with degrees in `0..=max_degree` and
/// coefficients uniform in the unit disk.
pub fn random_lifting_steps<R: rand::Rng + ?Sized>(
    n: usize,
    count: usize,
    max_degree: usize,
    rng: &mut R,
) -> Vec<LiftingStep> {
    let start_lower = rng.random_bool(0.5);
    (0..count)
        .map(|i| {
            let polys = (0..n - 1)
                .map(|_| random_poly(max_degree, rng))
                .collect();
            if (i % 2 == 0) == start_lower {
                LiftingStep::lower(polys)
            } else {
                LiftingStep::upper(polys)
            }
        })
        .collect()
}

/// Ordinary polynomial of degree `0..=max_degree`, coefficients uniform in
/// the unit disk; the leading coefficient is kept away from zero.
pub fn random_poly<R: rand::Rng + ?Sized>(max_degree: usize, rng: &mut R) -> LaurentPoly {
    let deg = rng.random_range(0..=max_degree);
    let mut coeffs: Vec<Complex64> = (0..=deg).map(|_| unit_disk(rng)).collect();
    while coeffs[deg].norm() < 0.1 {
        coeffs[deg] = unit_disk(rng);
    }
    LaurentPoly::new(0, coeffs)
}

fn unit_disk<R: rand::Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r = num_traits::Float::sqrt(rng.random::<f64>());
    let theta = rng.random_range(0.0..core::f64::consts::TAU);
    Complex64::from_polar(r, theta)
}

/// Random element of `SL_N` built as a product of `count` random lifting
/// steps; returns the matrix and the steps used.
pub fn random_sl_matrix<R: rand::Rng + ?Sized>(
    n: usize,
    count: usize,
    max_degree: usize,
    rng: &mut R,
) -> Result<(PolyMatrix, Vec<LiftingStep>)> {
    let steps = random_lifting_steps(n, count, max_degree, rng);
    let m = crate::polymat::product_of_steps(&steps, n)?;
    Ok((m, steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use alloc::vec;
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};

    fn p(coeffs: &[f64]) -> LaurentPoly {
        LaurentPoly::from_real(coeffs)
    }

    fn z() -> LaurentPoly {
        LaurentPoly::z_pow(1)
    }

    fn m2(a: LaurentPoly, b: LaurentPoly, c: LaurentPoly, d: LaurentPoly) -> PolyMatrix {
        PolyMatrix::from_rows(vec![vec![a, b], vec![c, d]]).unwrap()
    }

    fn assert_round_trip(chain: &LiftingChain, a: &PolyMatrix, tol: f64) -> ChainReport {
        let report = verify_chain(chain, a, tol).unwrap();
        assert!(report.passed, "err {} for\n{a}", report.max_coeff_err);
        report
    }

    #[test]
    fn identity_factors_to_empty_chain() {
        let chain = factor_2x2(&PolyMatrix::identity(2), DEFAULT_TOL).unwrap();
        assert!(chain.steps.is_empty());
        assert_eq!(chain.residual, PolyMatrix::identity(2));
        let chain = factor_nxn(&PolyMatrix::identity(3), DEFAULT_TOL).unwrap();
        assert!(chain.steps.is_empty());
        assert_eq!(chain.residual, PolyMatrix::identity(3));
    }

    #[test]
    fn lower_upper_product_2x2() {
        let a = m2(p(&[1.0]), p(&[3.0]), z(), p(&[1.0, 3.0]));
        let chain = factor_2x2(&a, DEFAULT_TOL).unwrap();
        assert_eq!(
            chain.steps,
            vec![LiftingStep::lower(vec![z()]), LiftingStep::upper(vec![p(&[3.0])])]
        );
        assert_eq!(chain.residual, PolyMatrix::identity(2));
        let report = assert_round_trip(&chain, &a, 1e-12);
        assert!(report.max_coeff_err <= 1e-12);
    }

    #[test]
    fn diagonal_input_is_terminal() {
        let a = m2(p(&[2.0]), p(&[]), p(&[]), p(&[0.5]));
        let chain = factor_2x2(&a, DEFAULT_TOL).unwrap();
        assert!(chain.steps.is_empty());
        assert_eq!(chain.residual, LiftingStep::DiagonalScale(c64(2.0, 0.0)).realize(2).unwrap());
    }

    #[test]
    fn rejects_non_sl() {
        let a = m2(p(&[1.0]), p(&[3.0]), z(), p(&[1.0, 4.0]));
        assert_eq!(factor_2x2(&a, DEFAULT_TOL), Err(Error::NotSl));
        assert_eq!(degree_prepass(&a, DEFAULT_TOL), Err(Error::NotSl));
        assert!(matches!(
            factor_2x2(&PolyMatrix::identity(3), DEFAULT_TOL),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn prepass_examples() {
        let a = m2(p(&[1.0]), p(&[3.0]), z(), p(&[1.0, 3.0]));
        let (steps, adjusted) = degree_prepass(&a, DEFAULT_TOL).unwrap();
        assert!(steps.is_empty());
        assert_eq!(adjusted, a);

        let (steps, adjusted) = degree_prepass(&PolyMatrix::identity(2), DEFAULT_TOL).unwrap();
        assert!(steps.is_empty());
        assert_eq!(adjusted, PolyMatrix::identity(2));

        // deg α = 2 > deg γ = 1: one upper step leaves deg(α − Uγ) < deg γ
        let upper = LiftingStep::upper(vec![p(&[1.0, 1.0])]).realize(2).unwrap();
        let lower = LiftingStep::lower(vec![p(&[0.0, 2.0])]).realize(2).unwrap();
        let a = upper.matmul(&lower).unwrap();
        assert_eq!(a.get(0, 0).degree(), Degree::Finite(2));
        let (steps, adjusted) = degree_prepass(&a, DEFAULT_TOL).unwrap();
        assert_eq!(steps.len(), 1);
        assert!(matches!(steps[0], LiftingStep::Upper { .. }));
        assert!(adjusted.get(0, 0).degree() < adjusted.get(1, 0).degree());
        let rebuilt = steps[0].realize(2).unwrap().matmul(&adjusted).unwrap();
        assert!(rebuilt.max_coeff_diff(&a) < 1e-12);
    }

    #[test]
    fn prepass_zero_pivot() {
        let a = m2(p(&[]), p(&[-1.0]), p(&[1.0]), p(&[0.0, 1.0]));
        let (steps, adjusted) = degree_prepass(&a, DEFAULT_TOL).unwrap();
        assert_eq!(steps.len(), 1);
        assert!(!adjusted.get(0, 0).is_zero());
        let chain = factor_2x2(&a, DEFAULT_TOL).unwrap();
        assert_round_trip(&chain, &a, 1e-12);
    }

    #[test]
    fn three_band_lower_upper() {
        let lower = LiftingStep::lower(vec![z(), p(&[1.0])]);
        let upper = LiftingStep::upper(vec![p(&[2.0]), p(&[0.0, 0.0, 1.0])]);
        let a = lower.realize(3).unwrap().matmul(&upper.realize(3).unwrap()).unwrap();
        let chain = factor_nxn(&a, DEFAULT_TOL).unwrap();
        assert_eq!(chain.steps, vec![lower, upper]);
        assert_eq!(chain.residual, PolyMatrix::identity(3));
        assert_round_trip(&chain, &a, 1e-12);
    }

    #[test]
    fn four_band_product() {
        let lower = LiftingStep::lower(vec![z(), LaurentPoly::zero(), p(&[0.0, 3.0])]);
        let upper = LiftingStep::upper(vec![p(&[1.0]), z(), LaurentPoly::zero()]);
        let a = lower.realize(4).unwrap().matmul(&upper.realize(4).unwrap()).unwrap();
        let chain = factor_nxn(&a, DEFAULT_TOL).unwrap();
        let report = assert_round_trip(&chain, &a, 1e-12);
        assert!(report.max_coeff_err <= 1e-12);
    }

    #[test]
    fn antidiagonal_and_scaled_inputs() {
        let a = m2(p(&[]), p(&[-0.5]), p(&[2.0]), p(&[]));
        let chain = factor_2x2(&a, DEFAULT_TOL).unwrap();
        assert_round_trip(&chain, &a, 1e-12);

        let scale = LiftingStep::DiagonalScale(c64(0.0, 3.0)).realize(3).unwrap();
        let lower = LiftingStep::lower(vec![z(), p(&[1.0, -1.0])]).realize(3).unwrap();
        let a = lower.matmul(&scale).unwrap();
        let chain = factor_nxn(&a, DEFAULT_TOL).unwrap();
        assert_round_trip(&chain, &a, 1e-12);

        // diag(1, 2, 1/2): the scale has to travel from slot 2 to slot 0
        let a = PolyMatrix::diagonal(vec![p(&[1.0]), p(&[2.0]), p(&[0.5])]).unwrap();
        let chain = factor_nxn(&a, DEFAULT_TOL).unwrap();
        assert_round_trip(&chain, &a, 1e-12);
    }

    #[test]
    fn laurent_entries() {
        let lower = LiftingStep::lower(vec![&LaurentPoly::z_pow(-2) + &z()]).realize(2).unwrap();
        let upper = LiftingStep::upper(vec![LaurentPoly::z_pow(-1)]).realize(2).unwrap();
        let shift = PolyMatrix::diagonal(vec![LaurentPoly::z_pow(3), LaurentPoly::z_pow(-3)]).unwrap();
        let a = lower.matmul(&upper).unwrap().matmul(&shift).unwrap();
        let chain = factor_2x2(&a, DEFAULT_TOL).unwrap();
        assert_round_trip(&chain, &a, 1e-12);
    }

    #[test]
    fn tampered_chain_is_detected() {
        let a = m2(p(&[1.0]), p(&[3.0]), z(), p(&[1.0, 3.0]));
        let mut chain = factor_2x2(&a, DEFAULT_TOL).unwrap();
        assert_eq!(verify_chain(&LiftingChain { n: 2, steps: vec![], residual: a.clone() }, &a, 0.0).unwrap().max_coeff_err, 0.0);
        if let LiftingStep::Upper { polys, .. } = &mut chain.steps[1] {
            polys[0] = &polys[0] + &LaurentPoly::constant(c64(1e-3, 0.0));
        }
        let report = verify_chain(&chain, &a, 1e-12).unwrap();
        assert!(report.max_coeff_err >= 1e-4);
        assert!(!report.passed);
    }

    #[test]
    fn merge_rules() {
        let a = LiftingStep::elementary(3, 1, 0, z()).unwrap();
        let b = LiftingStep::elementary(3, 2, 1, p(&[1.0])).unwrap();
        assert_eq!(
            merge_steps(vec![a.clone(), b.clone()]),
            vec![LiftingStep::lower(vec![z(), p(&[1.0])])]
        );
        // reversed order has a cross term and must stay separate
        assert_eq!(merge_steps(vec![b.clone(), a.clone()]).len(), 2);
        // same slot adds; cancelling slots vanish
        let c = LiftingStep::elementary(3, 1, 0, -z()).unwrap();
        assert!(merge_steps(vec![a, c]).is_empty());
    }

    #[test]
    fn random_round_trips_and_descent() {
        let mut rng = SmallRng::seed_from_u64(11);
        for n in [2usize, 3, 4] {
            for _ in 0..30 {
                let count = rng.random_range(1..=6);
                let (a, _) = random_sl_matrix(n, count, 4, &mut rng).unwrap();
                let chain = factor_nxn(&a, DEFAULT_TOL).unwrap();
                let report = verify_chain(&chain, &a, 1e-9).unwrap();
                assert!(report.passed, "n={n} err={}", report.max_coeff_err);
                if n == 2 {
                    assert!(profile_strictly_descends(&chain, &report.degree_profile));
                }
            }
        }
    }
}
