//! A factored polyphase matrix applied as an `N`-band filter bank.
//!
//! A signal `x` of length `N·P` is split into its polyphase components
//! `v_j[k] = x[N·k + j]`. A polynomial `q(z) = Σ q_e z^e` acts on a band as the
//! convolution `(q·b)[k] = Σ_e q_e b[k − e]`, with indices taken mod `P`
//! (periodic boundary) or out-of-range samples read as zero.
//!
//! [`analyze`] applies `A⁻¹` to the polyphase vector, one step at a time;
//! [`synthesize`] applies `A` and interleaves. Lifting steps only ever add a
//! filtered copy of a band to another, so the pair is exact under either
//! boundary policy.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::laurent::LaurentPoly;
use crate::liftfactor::LiftingChain;
use crate::polymat::{LiftingStep, PolyMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub samples: Vec<Complex64>,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>) -> Self {
        Signal { samples }
    }

    pub fn from_real(xs: &[f64]) -> Self {
        Signal::new(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `‖self − other‖∞`; a length difference counts as infinite.
    pub fn max_diff(&self, other: &Signal) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// The `N` band signals of one analysis, plus the length of the signal they
/// came from (before padding).
#[derive(Debug, Clone, PartialEq)]
pub struct BandSet {
    pub bands: Vec<Vec<Complex64>>,
    pub length: usize,
}

impl BandSet {
    pub fn n(&self) -> usize {
        self.bands.len()
    }

    pub fn max_diff(&self, other: &BandSet) -> f64 {
        if self.n() != other.n() || self.bands.iter().zip(&other.bands).any(|(a, b)| a.len() != b.len()) {
            return f64::INFINITY;
        }
        self.bands
            .iter()
            .flatten()
            .zip(other.bands.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Circular indexing within each band.
    #[default]
    Periodic,
    /// Samples outside a band read as zero.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Padding {
    /// Zero-pad to the next multiple of `N`.
    #[default]
    ZeroPad,
    /// Refuse lengths that are not a multiple of `N`.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BankOptions {
    pub boundary: Boundary,
    pub padding: Padding,
}

/// Polyphase components of `x`, padded according to `opts`.
pub fn split(x: &Signal, n: usize, opts: BankOptions) -> Result<BandSet> {
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 2, found: 0 });
    }
    let length = x.len();
    if !length.is_multiple_of(n) && opts.padding == Padding::Strict {
        return Err(Error::LengthMismatch { length, n });
    }
    let p = length.div_ceil(n);
    let mut bands = vec![vec![Complex64::zero(); p]; n];
    for (i, &s) in x.samples.iter().enumerate() {
        bands[i % n][i / n] = s;
    }
    Ok(BandSet { bands, length })
}

/// Interleaves the bands and drops the padding.
pub fn merge(b: &BandSet) -> Result<Signal> {
    let n = b.n();
    let p = band_len(b)?;
    let mut samples = vec![Complex64::zero(); n * p];
    for (j, band) in b.bands.iter().enumerate() {
        for (k, &s) in band.iter().enumerate() {
            samples[n * k + j] = s;
        }
    }
    samples.truncate(b.length.min(n * p));
    Ok(Signal::new(samples))
}

fn band_len(b: &BandSet) -> Result<usize> {
    let p = b.bands.first().map_or(0, |band| band.len());
    if let Some(bad) = b.bands.iter().find(|band| band.len() != p) {
        return Err(Error::LengthMismatch {
            length: bad.len(),
            n: b.n(),
        });
    }
    Ok(p)
}

/// `q` applied to one band.
fn filter(q: &LaurentPoly, band: &[Complex64], boundary: Boundary) -> Vec<Complex64> {
    let p = band.len();
    let mut out = vec![Complex64::zero(); p];
    if p == 0 {
        return out;
    }
    for (t, &c) in q.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = q.min_exp() + t as i64;
        for (k, o) in out.iter_mut().enumerate() {
            let src = k as i64 - e;
            let idx = match boundary {
                Boundary::Periodic => src.rem_euclid(p as i64) as usize,
                Boundary::Zero if src < 0 || src >= p as i64 => continue,
                Boundary::Zero => src as usize,
            };
            *o += c * band[idx];
        }
    }
    out
}

fn add_into(dst: &mut [Complex64], src: &[Complex64], sign: f64) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s * sign;
    }
}

/// `bands ← M·bands` for a general polynomial matrix.
fn apply_matrix(a: &PolyMatrix, bands: &[Vec<Complex64>], boundary: Boundary) -> Vec<Vec<Complex64>> {
    let n = a.n();
    let p = bands.first().map_or(0, |b| b.len());
    (0..n)
        .map(|i| {
            let mut out = vec![Complex64::zero(); p];
            for (j, band) in bands.iter().enumerate() {
                let q = a.get(i, j);
                if !q.is_zero() {
                    add_into(&mut out, &filter(q, band, boundary), 1.0);
                }
            }
            out
        })
        .collect()
}

fn scale_band(band: &mut [Complex64], c: Complex64) {
    for s in band.iter_mut() {
        *s *= c;
    }
}

/// `bands ← S·bands`.
fn step_forward(step: &LiftingStep, bands: &mut [Vec<Complex64>], boundary: Boundary) {
    match step {
        LiftingStep::Lower { .. } | LiftingStep::Upper { .. } => {
            // (I + N)v with every increment read from the old bands
            let updates: Vec<(usize, Vec<Complex64>)> = step
                .off_diagonal()
                .into_iter()
                .map(|(r, c, q)| (r, filter(q, &bands[c], boundary)))
                .collect();
            for (r, u) in updates {
                add_into(&mut bands[r], &u, 1.0);
            }
        }
        LiftingStep::DiagonalScale(k) => {
            scale_band(&mut bands[0], *k);
            scale_band(&mut bands[1], k.inv());
        }
        LiftingStep::MonomialShift(l) => {
            let z = LaurentPoly::z_pow(*l);
            for band in bands.iter_mut() {
                *band = filter(&z, band, boundary);
            }
        }
    }
}

/// `bands ← S⁻¹·bands`, by substitution for lower/upper steps.
fn step_inverse(step: &LiftingStep, bands: &mut [Vec<Complex64>], boundary: Boundary) {
    match step {
        LiftingStep::Lower { .. } | LiftingStep::Upper { .. } => {
            let mut entries = step.off_diagonal();
            // solve (I + N)w = v row by row, sources first
            let lower = matches!(step, LiftingStep::Lower { .. });
            entries.sort_by_key(|&(r, _, _)| if lower { r as i64 } else { -(r as i64) });
            for (r, c, q) in entries {
                let u = filter(q, &bands[c], boundary);
                add_into(&mut bands[r], &u, -1.0);
            }
        }
        LiftingStep::DiagonalScale(k) => {
            scale_band(&mut bands[0], k.inv());
            scale_band(&mut bands[1], *k);
        }
        LiftingStep::MonomialShift(l) => {
            let z = LaurentPoly::z_pow(-*l);
            for band in bands.iter_mut() {
                *band = filter(&z, band, boundary);
            }
        }
    }
}

fn residual_inverse(r: &PolyMatrix, bands: &mut [Vec<Complex64>], boundary: Boundary) -> Result<()> {
    if *r == PolyMatrix::identity(r.n()) {
        return Ok(());
    }
    if !r.is_monomial_diagonal() {
        return Err(Error::ResidualNotInvertible);
    }
    for (i, band) in bands.iter_mut().enumerate() {
        let d = r.get(i, i);
        let e = d.min_exp();
        let inv = LaurentPoly::monomial(Complex64::one() / d.coeff(e), -e);
        *band = filter(&inv, band, boundary);
    }
    Ok(())
}

fn check_chain(chain: &LiftingChain, n: usize) -> Result<()> {
    if chain.n != n || chain.residual.n() != n {
        return Err(Error::BandArityMismatch {
            expected: chain.n,
            found: n,
        });
    }
    Ok(())
}

/// Forward bank: `A·v` applied step by step, rightmost factor first.
pub fn apply_chain(chain: &LiftingChain, x: &Signal, opts: BankOptions) -> Result<BandSet> {
    let mut b = split(x, chain.n, opts)?;
    check_chain(chain, b.n())?;
    b.bands = apply_matrix(&chain.residual, &b.bands, opts.boundary);
    for step in chain.steps.iter().rev() {
        step_forward(step, &mut b.bands, opts.boundary);
    }
    Ok(b)
}

/// Analysis: polyphase split, then `A⁻¹` applied as the inverse steps,
/// leftmost factor first.
pub fn analyze(chain: &LiftingChain, x: &Signal, opts: BankOptions) -> Result<BandSet> {
    let mut b = split(x, chain.n, opts)?;
    check_chain(chain, b.n())?;
    for step in &chain.steps {
        step_inverse(step, &mut b.bands, opts.boundary);
    }
    residual_inverse(&chain.residual, &mut b.bands, opts.boundary)?;
    Ok(b)
}

/// Synthesis: `A` applied to the bands, then interleaving. Inverts
/// [`analyze`] for the same options.
pub fn synthesize(chain: &LiftingChain, b: &BandSet, opts: BankOptions) -> Result<Signal> {
    if b.n() != chain.n {
        return Err(Error::BandArityMismatch {
            expected: chain.n,
            found: b.n(),
        });
    }
    band_len(b)?;
    let mut bands = apply_matrix(&chain.residual, &b.bands, opts.boundary);
    for step in chain.steps.iter().rev() {
        step_forward(step, &mut bands, opts.boundary);
    }
    merge(&BandSet {
        bands,
        length: b.length,
    })
}

/// The unfactored action `A·v` on the polyphase components of `x`.
pub fn apply_matrix_direct(a: &PolyMatrix, x: &Signal, opts: BankOptions) -> Result<BandSet> {
    let mut b = split(x, a.n(), opts)?;
    b.bands = apply_matrix(a, &b.bands, opts.boundary);
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn chain(n: usize, steps: Vec<LiftingStep>) -> LiftingChain {
        LiftingChain {
            n,
            steps,
            residual: PolyMatrix::identity(n),
        }
    }

    fn re(xs: &[Complex64]) -> Vec<f64> {
        xs.iter().map(|c| c.re).collect()
    }

    #[test]
    fn identity_chain_is_a_split() {
        let x = Signal::from_real(&[1.0, 2.0, 3.0, 4.0]);
        let b = analyze(&chain(2, vec![]), &x, BankOptions::default()).unwrap();
        assert_eq!(re(&b.bands[0]), [1.0, 3.0]);
        assert_eq!(re(&b.bands[1]), [2.0, 4.0]);
        let y = synthesize(&chain(2, vec![]), &b, BankOptions::default()).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn constant_lower_subtracts() {
        let c = c64(0.5, 1.0);
        let ch = chain(2, vec![LiftingStep::lower(vec![LaurentPoly::constant(c)])]);
        let x = Signal::from_real(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = analyze(&ch, &x, BankOptions::default()).unwrap();
        let plain = split(&x, 2, BankOptions::default()).unwrap();
        for k in 0..3 {
            assert_eq!(b.bands[0][k], plain.bands[0][k]);
            assert!((b.bands[1][k] - (plain.bands[1][k] - c * plain.bands[0][k])).norm() < 1e-15);
        }
    }

    #[test]
    fn haar_annihilates_constants() {
        let ch = chain(
            2,
            vec![
                LiftingStep::lower(vec![LaurentPoly::one()]),
                LiftingStep::upper(vec![LaurentPoly::from_real(&[-0.5])]),
            ],
        );
        let x = Signal::from_real(&[1.0; 4]);
        let b = analyze(&ch, &x, BankOptions::default()).unwrap();
        assert!(b.bands[1].iter().all(|s| s.norm() < 1e-15));
        assert!(b.bands[0].iter().all(|s| (s - c64(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn delay_filter_round_trip() {
        let ch = chain(2, vec![LiftingStep::lower(vec![LaurentPoly::z_pow(1)])]);
        let x = Signal::from_real(&[3.0, -1.0, 4.0, 1.0, -5.0, 9.0, 2.0, 6.0]);
        for boundary in [Boundary::Periodic, Boundary::Zero] {
            let opts = BankOptions {
                boundary,
                ..Default::default()
            };
            let b = analyze(&ch, &x, opts).unwrap();
            assert!(synthesize(&ch, &b, opts).unwrap().max_diff(&x) < 1e-12);
        }
    }

    #[test]
    fn swap_matrix_swaps_bands() {
        let swap = PolyMatrix::from_rows(vec![
            vec![LaurentPoly::zero(), LaurentPoly::one()],
            vec![LaurentPoly::one(), LaurentPoly::zero()],
        ])
        .unwrap();
        let x = Signal::from_real(&[1.0, 2.0, 3.0, 4.0]);
        let b = apply_matrix_direct(&swap, &x, BankOptions::default()).unwrap();
        assert_eq!(re(&b.bands[0]), [2.0, 4.0]);
        assert_eq!(re(&b.bands[1]), [1.0, 3.0]);
    }

    #[test]
    fn padding_policies() {
        let x = Signal::from_real(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let strict = BankOptions {
            padding: Padding::Strict,
            ..Default::default()
        };
        assert_eq!(
            analyze(&chain(2, vec![]), &x, strict).unwrap_err(),
            Error::LengthMismatch { length: 5, n: 2 }
        );
        let b = analyze(&chain(2, vec![]), &x, BankOptions::default()).unwrap();
        assert_eq!(b.bands[1].len(), 3);
        assert_eq!(synthesize(&chain(2, vec![]), &b, BankOptions::default()).unwrap(), x);
    }

    #[test]
    fn multi_entry_steps_and_residual() {
        let z = LaurentPoly::z_pow(1);
        let ch = LiftingChain {
            n: 3,
            steps: vec![
                LiftingStep::lower(vec![z.clone(), LaurentPoly::one()]),
                LiftingStep::upper(vec![LaurentPoly::from_real(&[0.5, -1.0]), z.clone()]),
                LiftingStep::MonomialShift(2),
            ],
            residual: LiftingStep::DiagonalScale(c64(2.0, 1.0)).realize(3).unwrap(),
        };
        let x = Signal::new((0..24).map(|k| c64(k as f64, (k * k % 7) as f64)).collect());
        let opts = BankOptions::default();
        let b = analyze(&ch, &x, opts).unwrap();
        assert!(synthesize(&ch, &b, opts).unwrap().max_diff(&x) < 1e-12);
        let direct = apply_matrix_direct(&ch.product().unwrap(), &x, opts).unwrap();
        assert!(apply_chain(&ch, &x, opts).unwrap().max_diff(&direct) < 1e-12);
    }

    #[test]
    fn band_arity_is_checked() {
        let b = BandSet {
            bands: vec![vec![Complex64::zero(); 2]; 3],
            length: 6,
        };
        assert_eq!(
            synthesize(&chain(2, vec![]), &b, BankOptions::default()).unwrap_err(),
            Error::BandArityMismatch { expected: 2, found: 3 }
        );
    }
}
