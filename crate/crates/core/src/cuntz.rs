//! Representations of the Cuntz algebra `O_N` on `L²(T)`.
//!
//! In the monomial representation `S_j f(z) = z^j f(z^N)`: coefficient `a_k`
//! of `f` moves to exponent `N·k + j`, and `S_j*` keeps the coefficients at
//! exponents `≡ j (mod N)`. In a filtered representation
//! `S_j f(z) = m_j(z) f(z^N)` and
//! `S_j* f(z) = (1/N) Σ_{w^N = z} conj(m_j(w)) f(w)`, which on coefficients is
//! multiplication by the para-conjugate filter followed by `N`-fold
//! down-sampling.
//!
//! Sampled variants act on values at the `M`-th roots of unity and are used by
//! [`crate::gridfun`].

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;

use crate::laurent::LaurentPoly;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    /// `m_j(z) = z^j`.
    Monomial,
    /// Arbitrary filters `m_0 … m_(N−1)`.
    Filtered(Vec<LaurentPoly>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CuntzRep {
    n: usize,
    mode: Mode,
}

/// Worst deviations found by [`CuntzRep::verify_relations`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationReport {
    /// max over `j, k` of `|S_j* S_k f − δ_jk f|`, coefficient-wise.
    pub max_iso_err: f64,
    /// max of `|Σ_j S_j S_j* f − f|`, coefficient-wise.
    pub max_complete_err: f64,
}

/// The point `exp(2πi k / m)`.
pub fn grid_point(k: usize, m: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % m) as f64 / m as f64)
}

impl CuntzRep {
    pub fn monomial(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: n });
        }
        Ok(CuntzRep {
            n,
            mode: Mode::Monomial,
        })
    }

    pub fn filtered(filters: Vec<LaurentPoly>) -> Result<Self> {
        if filters.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: filters.len(),
            });
        }
        Ok(CuntzRep {
            n: filters.len(),
            mode: Mode::Filtered(filters),
        })
    }

    /// Two-band Haar pair `m_0 = (1 + z)/√2`, `m_1 = (1 − z)/√2`.
    pub fn haar() -> Self {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        CuntzRep {
            n: 2,
            mode: Mode::Filtered(vec![
                LaurentPoly::from_real(&[h, h]),
                LaurentPoly::from_real(&[h, -h]),
            ]),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    fn check_band(&self, j: usize) -> Result<()> {
        if j >= self.n {
            Err(Error::BadBand { band: j, n: self.n })
        } else {
            Ok(())
        }
    }

    /// The filter `m_j`.
    pub fn filter(&self, j: usize) -> Result<LaurentPoly> {
        self.check_band(j)?;
        Ok(match &self.mode {
            Mode::Monomial => LaurentPoly::z_pow(j as i64),
            Mode::Filtered(fs) => fs[j].clone(),
        })
    }

    /// `S_j f`.
    pub fn s_apply(&self, j: usize, f: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_band(j)?;
        Ok(match &self.mode {
            Mode::Monomial => f.upsample(self.n, j as i64),
            Mode::Filtered(fs) => &fs[j] * &f.substitute_power(self.n),
        })
    }

    /// `S_j* f`.
    pub fn s_adjoint(&self, j: usize, f: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_band(j)?;
        Ok(match &self.mode {
            Mode::Monomial => f.downsample(self.n, j),
            Mode::Filtered(fs) => (&fs[j].paraconj() * f).downsample(self.n, 0),
        })
    }

    /// `(S_0* f, …, S_(N−1)* f)`; only defined for the monomial representation.
    pub fn polyphase_split(&self, f: &LaurentPoly) -> Result<Vec<LaurentPoly>> {
        if self.mode != Mode::Monomial {
            return Err(Error::ModeUnsupported);
        }
        (0..self.n).map(|j| self.s_adjoint(j, f)).collect()
    }

    /// `Σ_j S_j parts[j]`.
    pub fn reconstruct(&self, parts: &[LaurentPoly]) -> Result<LaurentPoly> {
        if parts.len() != self.n {
            return Err(Error::BadArity {
                expected: self.n,
                found: parts.len(),
            });
        }
        parts
            .iter()
            .enumerate()
            .try_fold(LaurentPoly::zero(), |acc, (j, p)| {
                Ok(&acc + &self.s_apply(j, p)?)
            })
    }

    /// Checks `S_j* S_k = δ_jk I` and `Σ_j S_j S_j* = I` on random coefficient
    /// vectors (entries uniform in `[−1, 1]²`) of the given length.
    ///
    /// Failures are reported, not raised, so invalid filter systems can be
    /// inspected.
    pub fn verify_relations<R: Rng + ?Sized>(
        &self,
        trial_count: usize,
        length: usize,
        rng: &mut R,
    ) -> RelationReport {
        let mut report = RelationReport {
            max_iso_err: 0.0,
            max_complete_err: 0.0,
        };
        for _ in 0..trial_count {
            let coeffs: Vec<Complex64> = (0..length)
                .map(|_| {
                    Complex64::new(
                        rng.random_range(-1.0..=1.0),
                        rng.random_range(-1.0..=1.0),
                    )
                })
                .collect();
            let f = LaurentPoly::new(0, coeffs);
            for k in 0..self.n {
                let sk = self.s_apply(k, &f).expect("band in range");
                for j in 0..self.n {
                    let back = self.s_adjoint(j, &sk).expect("band in range");
                    let err = if j == k {
                        back.max_coeff_diff(&f)
                    } else {
                        back.max_abs()
                    };
                    report.max_iso_err = report.max_iso_err.max(err);
                }
            }
            let mut sum = LaurentPoly::zero();
            for j in 0..self.n {
                let part = self.s_adjoint(j, &f).expect("band in range");
                sum = &sum + &self.s_apply(j, &part).expect("band in range");
            }
            report.max_complete_err = report.max_complete_err.max(sum.max_coeff_diff(&f));
        }
        report
    }

    fn filter_samples(&self, j: usize, m: usize) -> Vec<Complex64> {
        match &self.mode {
            Mode::Monomial => (0..m).map(|k| grid_point(k * j, m)).collect(),
            Mode::Filtered(fs) => (0..m).map(|k| fs[j].eval_at(grid_point(k, m))).collect(),
        }
    }

    /// `S_j φ` on the `M`-point grid: `m_j(z_k) φ(z_k^N)`, where `z_k^N` is
    /// again a grid point.
    pub fn s_apply_sampled(&self, j: usize, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_band(j)?;
        let m = samples.len();
        let filt = self.filter_samples(j, m);
        Ok((0..m)
            .map(|k| filt[k] * samples[(k * self.n) % m])
            .collect())
    }

    /// `S_j* f` from samples on the `M`-point grid to the `M/N`-point grid:
    /// `(1/N) Σ_{z^N = w} conj(m_j(z)) f(z)`.
    pub fn s_adjoint_sampled(&self, j: usize, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_band(j)?;
        let m = samples.len();
        if m == 0 || !m.is_multiple_of(self.n) {
            return Err(Error::GridNotDivisible { m, n: self.n });
        }
        let coarse = m / self.n;
        let filt = self.filter_samples(j, m);
        let scale = 1.0 / self.n as f64;
        Ok((0..coarse)
            .map(|k| {
                let mut acc = Complex64::zero();
                for t in 0..self.n {
                    let idx = k + t * coarse;
                    acc += filt[idx].conj() * samples[idx];
                }
                acc * scale
            })
            .collect())
    }

    /// `Σ_j S_j parts[j]` on a common `M`-point grid.
    pub fn reconstruct_sampled(&self, parts: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
        if parts.len() != self.n {
            return Err(Error::BadArity {
                expected: self.n,
                found: parts.len(),
            });
        }
        let m = parts[0].len();
        if parts.iter().any(|p| p.len() != m) {
            return Err(Error::GridMismatch);
        }
        let mut out = vec![Complex64::zero(); m];
        for (j, part) in parts.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(self.s_apply_sampled(j, part)?) {
                *o += v;
            }
        }
        Ok(out)
    }
}
