//! Reproducible test inputs. Every generator takes a seed and draws from
//! ChaCha8, so a seed names the same corpus on every platform.

use polylift_core::filterbank::Signal;
use polylift_core::gridfun::{rotation, GridFunction, GridMatrix};
use polylift_core::liftfactor::random_sl_matrix;
use polylift_core::polymat::{LiftingStep, PolyMatrix};
use polylift_core::{Complex64, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `SL_N` matrix built as the product of `steps` random lifting steps with
/// entry degrees `≤ max_degree`; returns the steps used as well.
pub fn sl_matrix(n: usize, steps: usize, max_degree: usize, seed: u64) -> Result<(PolyMatrix, Vec<LiftingStep>)> {
    random_sl_matrix(n, steps, max_degree, &mut rng(seed))
}

/// Samples uniform in `[−1, 1]`, real unless `complex` is set.
pub fn signal(len: usize, complex: bool, seed: u64) -> Signal {
    let mut r = rng(seed);
    Signal::new(
        (0..len)
            .map(|_| {
                let re = r.random_range(-1.0..=1.0);
                let im = if complex { r.random_range(-1.0..=1.0) } else { 0.0 };
                Complex64::new(re, im)
            })
            .collect(),
    )
}

/// A random `SL_N` polynomial matrix sampled on `m` points of the circle.
pub fn sl_grid(n: usize, steps: usize, max_degree: usize, m: usize, seed: u64) -> Result<GridMatrix> {
    let (a, _) = sl_matrix(n, steps, max_degree, seed)?;
    Ok(GridMatrix::from_poly_matrix(&a, m))
}

/// Pointwise rotation by a random real trigonometric polynomial angle of
/// degree `≤ 3`: unitary with determinant 1 at every sample.
pub fn unitary_grid(m: usize, seed: u64) -> GridMatrix {
    let mut r = rng(seed);
    let coeffs: Vec<(f64, f64)> = (0..4)
        .map(|_| (r.random_range(-1.5..=1.5), r.random_range(-1.5..=1.5)))
        .collect();
    let theta = GridFunction::from_fn(m, |z| {
        let t = z.arg();
        let v: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| a * (k as f64 * t).cos() + b * (k as f64 * t).sin())
            .sum();
        Complex64::new(v, 0.0)
    });
    rotation(&theta)
}
