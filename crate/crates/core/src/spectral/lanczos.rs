//! Lanczos with full reorthogonalization and explicit locking.
//!
//! Each run builds a Krylov basis orthogonal to the already locked vectors
//! and locks only its top Ritz pair once the true residual meets the
//! tolerance. Locking one pair per run keeps exactly degenerate eigenvalues
//! from being skipped: the second copy is found by the next run inside the
//! orthogonal complement.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SpectralError;

/// Largest Krylov basis kept per run before an explicit restart.
pub(crate) const MAX_KRYLOV: usize = 320;

pub(crate) struct Converged {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn project_out(w: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(w, b);
        axpy(-c, b, w);
    }
}

/// Top `count` eigenpairs of the symmetric operator `apply`, descending.
pub(crate) fn top_pairs<F>(
    n: usize,
    count: usize,
    tol: f64,
    matvec_budget: usize,
    apply: F,
) -> Result<Vec<Converged>, SpectralError>
where
    F: Fn(&[f64], &mut [f64]),
{
    assert!(count <= n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1a2c_0000_0000 ^ n as u64);
    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut found: Vec<Converged> = Vec::with_capacity(count);
    let mut matvecs = 0usize;
    let mut restart: Option<Vec<f64>> = None;
    let mut ax = vec![0.0; n];

    while found.len() < count {
        if matvecs > matvec_budget {
            return Err(SpectralError::NoConvergence { found: found.len(), wanted: count, matvecs });
        }
        let mut v = restart
            .take()
            .unwrap_or_else(|| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        for _ in 0..2 {
            project_out(&mut v, &locked);
        }
        let mut len = norm(&v);
        if len < 1e-10 {
            v = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            project_out(&mut v, &locked);
            project_out(&mut v, &locked);
            len = norm(&v);
        }
        v.iter_mut().for_each(|x| *x /= len);

        let max_dim = (n - locked.len()).min(MAX_KRYLOV);
        let mut basis: Vec<Vec<f64>> = vec![v];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut scale = 0.0f64;

        loop {
            let j = basis.len() - 1;
            let mut w = vec![0.0; n];
            apply(&basis[j], &mut w);
            matvecs += 1;
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            axpy(-a, &basis[j], &mut w);
            if j > 0 {
                axpy(-beta[j - 1], &basis[j - 1], &mut w);
            }
            for _ in 0..2 {
                project_out(&mut w, &locked);
                project_out(&mut w, &basis);
            }
            let b = norm(&w);
            scale = scale.max(a.abs()).max(b);
            let steps = j + 1;
            let breakdown = b <= 1e-12 * scale.max(1.0);
            let exhausted = steps >= max_dim || matvecs > matvec_budget;
            let check_every = if steps < 100 { 8 } else { 24 };
            if breakdown || exhausted || steps.is_multiple_of(check_every) {
                let (theta, coeffs) = top_ritz(&alpha, &beta);
                let estimate = (b * coeffs[steps - 1]).abs();
                let target = tol * theta.abs().max(1.0);
                if breakdown || exhausted || estimate <= 0.1 * target {
                    let mut x = vec![0.0; n];
                    for (c, q) in coeffs.iter().zip(&basis) {
                        axpy(*c, q, &mut x);
                    }
                    project_out(&mut x, &locked);
                    let len = norm(&x);
                    x.iter_mut().for_each(|xi| *xi /= len);
                    apply(&x, &mut ax);
                    matvecs += 1;
                    let value = dot(&x, &ax);
                    let residual = ax.iter().zip(&x).map(|(p, q)| (p - value * q).powi(2)).sum::<f64>().sqrt();
                    if residual <= tol * value.abs().max(1.0) {
                        locked.push(x.clone());
                        found.push(Converged { value, vector: x, residual });
                    } else {
                        restart = Some(x);
                    }
                    break;
                }
            }
            beta.push(b);
            w.iter_mut().for_each(|wi| *wi /= b);
            basis.push(w);
        }
    }
    found.sort_by(|a, b| b.value.total_cmp(&a.value));
    Ok(found)
}

/// Largest eigenpair of the tridiagonal matrix with diagonal `alpha` and
/// off-diagonal `beta` (only the first `alpha.len() - 1` entries are used).
fn top_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (best, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty tridiagonal");
    (theta, eig.eigenvectors.column(best).iter().copied().collect())
}
