//! Adjacency spectra: a dense oracle, an iterative solver for extreme
//! eigenpairs, and checks built on them.

mod lanczos;
mod validate;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{edges_between, Coloring, Graph, GraphError, VertexSet};

pub use validate::{validate_planted_spectrum, PlantingMode, SpectrumReport, SpectrumSlack};

pub const DENSE_CAP: usize = 2048;
pub const DENSE_TOL: f64 = 1e-9;
/// Default residual tolerance for the iterative path.
pub const ITERATIVE_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("dense eigensolver limited to {cap} vertices, graph has {n}")]
    DenseCapExceeded { n: usize, cap: usize },
    #[error("requested {requested} eigenpairs of a {n}-vertex graph")]
    TooManyPairs { requested: usize, n: usize },
    #[error("eigensolver converged {found} of {wanted} pairs within {matvecs} matrix applications")]
    NoConvergence { found: usize, wanted: usize, matvecs: usize },
    #[error("dense eigenpair residual {residual:e} above tolerance")]
    Residual { residual: f64 },
    #[error("graph is not {0}-regular")]
    NotRegular(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    /// Position in the descending order, 0-based (`rank = 0` is `λ_1`).
    pub rank: usize,
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// Eigenpairs of an adjacency matrix sorted by rank. Complete after
/// [`full_spectrum_dense`], partial after [`extreme_eigenpairs`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub n: usize,
    pub pairs: Vec<EigenPair>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn by_rank(&self, rank: usize) -> Option<&EigenPair> {
        self.pairs.iter().find(|p| p.rank == rank)
    }

    /// `λ_i` with the 1-based index used in the literature.
    pub fn lambda(&self, i: usize) -> Option<f64> {
        self.by_rank(i - 1).map(|p| p.value)
    }

    /// The `count` most negative pairs, most negative last.
    pub fn bottom(&self, count: usize) -> Vec<&EigenPair> {
        (self.n - count..self.n).filter_map(|r| self.by_rank(r)).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.pairs.len() == self.n
    }
}

/// First coordinate with magnitude above noise is made positive.
fn normalize_sign(v: &mut [f64]) {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * peak.max(f64::MIN_POSITIVE)) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

pub(crate) fn residual(g: &Graph, value: f64, vector: &[f64]) -> f64 {
    let mut av = vec![0.0; g.n()];
    g.adjacency_apply(vector, &mut av);
    av.iter().zip(vector).map(|(a, v)| (a - value * v).powi(2)).sum::<f64>().sqrt()
}

pub fn adjacency_matrix(g: &Graph) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(g.n(), g.n());
    for (u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    a
}

/// All `n` eigenpairs, descending.
pub fn full_spectrum_dense(g: &Graph) -> Result<SpectralDecomposition, SpectralError> {
    let n = g.n();
    if n > DENSE_CAP {
        return Err(SpectralError::DenseCapExceeded { n, cap: DENSE_CAP });
    }
    let eig = SymmetricEigen::new(adjacency_matrix(g));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut pairs = Vec::with_capacity(n);
    for (rank, &col) in order.iter().enumerate() {
        let value = eig.eigenvalues[col];
        let mut vector: Vec<f64> = eig.eigenvectors.column(col).iter().copied().collect();
        normalize_sign(&mut vector);
        let res = residual(g, value, &vector);
        if res > DENSE_TOL * value.abs().max(1.0) {
            return Err(SpectralError::Residual { residual: res });
        }
        pairs.push(EigenPair { rank, value, vector, residual: res });
    }
    Ok(SpectralDecomposition { n, pairs })
}

/// The `num_high` largest and `num_low` most negative eigenpairs by
/// deflated Lanczos; the low end runs on `-A`. Budget: `10n` matrix
/// applications per requested pair.
pub fn extreme_eigenpairs(
    g: &Graph,
    num_low: usize,
    num_high: usize,
    tol: f64,
) -> Result<SpectralDecomposition, SpectralError> {
    let n = g.n();
    if num_low + num_high > n || n == 0 {
        return Err(SpectralError::TooManyPairs { requested: num_low + num_high, n });
    }
    let budget = |count: usize| count * 10 * n.max(40);
    let mut pairs = Vec::with_capacity(num_low + num_high);
    if num_high > 0 {
        let top = lanczos::top_pairs(n, num_high, tol, budget(num_high), |x, y| g.adjacency_apply(x, y))?;
        for (rank, c) in top.into_iter().enumerate() {
            pairs.push(EigenPair { rank, value: c.value, vector: c.vector, residual: c.residual });
        }
    }
    if num_low > 0 {
        let negated = |x: &[f64], y: &mut [f64]| {
            g.adjacency_apply(x, y);
            y.iter_mut().for_each(|v| *v = -*v);
        };
        let low = lanczos::top_pairs(n, num_low, tol, budget(num_low), negated)?;
        // low[0] is the most negative eigenvalue, rank n-1.
        for (i, c) in low.into_iter().enumerate() {
            pairs.push(EigenPair { rank: n - 1 - i, value: -c.value, vector: c.vector, residual: c.residual });
        }
    }
    for p in pairs.iter_mut() {
        normalize_sign(&mut p.vector);
    }
    pairs.sort_by_key(|p| p.rank);
    Ok(SpectralDecomposition { n, pairs })
}

/// `λ̂ = max(λ_2, |λ_n|)`.
pub fn lambda_expansion(g: &Graph) -> Result<f64, SpectralError> {
    let n = g.n();
    if n < 2 {
        return Err(SpectralError::TooManyPairs { requested: 2, n });
    }
    if n == 2 {
        let dense = full_spectrum_dense(g)?;
        return Ok(dense.pairs[1].value.max(dense.pairs[1].value.abs()));
    }
    let ext = extreme_eigenpairs(g, 1, 2, ITERATIVE_TOL)?;
    let l2 = ext.lambda(2).expect("rank 1 computed");
    let ln = ext.lambda(n).expect("rank n-1 computed");
    Ok(l2.max(ln.abs()))
}

/// Same as [`lambda_expansion`] through the dense oracle.
pub fn lambda_expansion_dense(g: &Graph) -> Result<f64, SpectralError> {
    let dense = full_spectrum_dense(g)?;
    let n = g.n();
    assert!(n >= 2);
    Ok(dense.pairs[1].value.max(dense.pairs[n - 1].value.abs()))
}

/// Unit vectors constant on each planted class: `x_0 ∝ 1` and, for
/// `j = 1..k-1`, `x_j` takes the value `p_j(c)` on class `c`, where
/// `p_1, …, p_{k-1}` is the Helmert-style orthogonal basis of the vectors in
/// `R^k` summing to zero (`p_1 = (k-1, -1, …, -1)`, `p_2 = (0, k-2, -1, …)`,
/// …). For `k = 3` these are `x̄ ∝ (2,-1,-1)` and `ȳ ∝ (0,1,-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorBasis {
    pub vectors: Vec<Vec<f64>>,
}

impl IndicatorBasis {
    pub fn from_partition(p: &Coloring) -> Self {
        let k = p.k() as usize;
        let profile = |j: usize, class: usize| -> f64 {
            if j == 0 {
                1.0
            } else if class + 1 < j {
                0.0
            } else if class + 1 == j {
                (k - j) as f64
            } else {
                -1.0
            }
        };
        let vectors = (0..k)
            .map(|j| {
                let mut v: Vec<f64> = (0..p.len())
                    .map(|i| match p.get(i) {
                        0 => 0.0,
                        c => profile(j, c as usize - 1),
                    })
                    .collect();
                let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if len > 0.0 {
                    v.iter_mut().for_each(|x| *x /= len);
                }
                v
            })
            .collect();
        IndicatorBasis { vectors }
    }

    /// Norm of the orthogonal projection of `x_j` onto the span of
    /// `subspace` (orthonormal vectors).
    pub fn projection_norm(&self, j: usize, subspace: &[&[f64]]) -> f64 {
        let x = &self.vectors[j];
        subspace
            .iter()
            .map(|e| x.iter().zip(e.iter()).map(|(a, b)| a * b).sum::<f64>().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Expander mixing check `|E(S,T) − d|S||T|/n| ≤ λ̂·√(|S||T|)` on a
/// `d`-regular graph.
pub fn mixing_discrepancy(g: &Graph, s: &VertexSet, t: &VertexSet, d: usize) -> Result<MixingCheck, SpectralError> {
    if g.regular_degree() != Some(d) {
        return Err(SpectralError::NotRegular(d));
    }
    let lambda = lambda_expansion(g)?;
    mixing_discrepancy_with(g, s, t, d, lambda)
}

/// [`mixing_discrepancy`] with a precomputed `λ̂`.
pub fn mixing_discrepancy_with(
    g: &Graph,
    s: &VertexSet,
    t: &VertexSet,
    d: usize,
    lambda_hat: f64,
) -> Result<MixingCheck, SpectralError> {
    if g.regular_degree() != Some(d) {
        return Err(SpectralError::NotRegular(d));
    }
    let e = edges_between(g, s, t)? as f64;
    let (ss, tt) = (s.len() as f64, t.len() as f64);
    let lhs = (e - d as f64 * ss * tt / g.n() as f64).abs();
    let rhs = lambda_hat * (ss * tt).sqrt();
    Ok(MixingCheck { lhs, rhs, holds: lhs <= rhs + 1e-9 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn octahedron() -> Graph {
        Graph::complete_multipartite(&[2, 2, 2])
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn dense_examples() {
        let k3 = full_spectrum_dense(&Graph::complete(3)).unwrap();
        assert!(close(&k3.eigenvalues(), &[2.0, -1.0, -1.0], 1e-9));
        let oct = full_spectrum_dense(&octahedron()).unwrap();
        assert!(close(&oct.eigenvalues(), &[4.0, 0.0, 0.0, 0.0, -2.0, -2.0], 1e-9));
        let empty = full_spectrum_dense(&Graph::empty(4)).unwrap();
        assert!(close(&empty.eigenvalues(), &[0.0; 4], 1e-12));
        assert!(matches!(
            full_spectrum_dense(&Graph::empty(DENSE_CAP + 1)),
            Err(SpectralError::DenseCapExceeded { .. })
        ));
    }

    #[test]
    fn octahedron_characteristic_polynomial() {
        // det(tI − A) = t^3 (t − 4)(t + 2)^2 for K_{2,2,2}; each eigenvalue
        // makes tI − A singular and nothing else does on a grid.
        let a = adjacency_matrix(&octahedron());
        let det = |t: f64| (DMatrix::identity(6, 6) * t - &a).determinant();
        let poly = |t: f64| t.powi(3) * (t - 4.0) * (t + 2.0).powi(2);
        for i in -30..=50 {
            let t = i as f64 * 0.17;
            assert!((det(t) - poly(t)).abs() <= 1e-8 * poly(t).abs().max(1.0), "t = {t}");
        }
    }

    #[test]
    fn extreme_examples() {
        let oct = extreme_eigenpairs(&octahedron(), 2, 0, ITERATIVE_TOL).unwrap();
        let vals = oct.eigenvalues();
        assert!(close(&vals, &[-2.0, -2.0], 1e-7), "{vals:?}");

        let k3 = extreme_eigenpairs(&Graph::complete(3), 0, 1, ITERATIVE_TOL).unwrap();
        assert!((k3.pairs[0].value - 2.0).abs() < 1e-8);
        let v = &k3.pairs[0].vector;
        let expect = 1.0 / 3f64.sqrt();
        assert!(v.iter().all(|x| (x - expect).abs() < 1e-7), "{v:?}");

        let two = Graph::complete(3).disjoint_union(&Graph::complete(3));
        let top = extreme_eigenpairs(&two, 0, 2, ITERATIVE_TOL).unwrap();
        assert!(close(&top.eigenvalues(), &[2.0, 2.0], 1e-7));

        assert!(matches!(
            extreme_eigenpairs(&Graph::complete(3), 2, 2, ITERATIVE_TOL),
            Err(SpectralError::TooManyPairs { .. })
        ));
    }

    #[test]
    fn lambda_examples() {
        assert!((lambda_expansion(&Graph::complete(4)).unwrap() - 1.0).abs() < 1e-8);
        assert!((lambda_expansion(&Graph::cycle(4)).unwrap() - 2.0).abs() < 1e-8);
        let two = Graph::complete(3).disjoint_union(&Graph::complete(3));
        assert!((lambda_expansion(&two).unwrap() - 2.0).abs() < 1e-8);
        assert!((lambda_expansion_dense(&two).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn mixing_examples() {
        let k4 = Graph::complete(4);
        let s = VertexSet::from_unsorted(vec![0, 1]);
        let t = VertexSet::from_unsorted(vec![2, 3]);
        let check = mixing_discrepancy(&k4, &s, &t, 3).unwrap();
        assert!((check.lhs - 1.0).abs() < 1e-12 && (check.rhs - 2.0).abs() < 1e-7 && check.holds);

        let all = VertexSet::all(4);
        let check = mixing_discrepancy(&k4, &all, &all, 3).unwrap();
        assert!(check.lhs.abs() < 1e-12 && check.holds);

        let c6 = Graph::cycle(6);
        let check = mixing_discrepancy(
            &c6,
            &VertexSet::from_unsorted(vec![0]),
            &VertexSet::from_unsorted(vec![3]),
            2,
        )
        .unwrap();
        assert!((check.lhs - 2.0 / 6.0).abs() < 1e-12 && (check.rhs - 2.0).abs() < 1e-7 && check.holds);

        assert!(matches!(
            mixing_discrepancy(&Graph::path(3), &all, &all, 2),
            Err(SpectralError::NotRegular(2))
        ));
    }

    #[test]
    fn indicator_basis_is_orthonormal() {
        let p = Coloring::new(4, vec![1, 2, 3, 4, 1, 2, 3, 4]).unwrap();
        let basis = IndicatorBasis::from_partition(&p);
        for i in 0..4 {
            for j in 0..4 {
                let d: f64 = basis.vectors[i].iter().zip(&basis.vectors[j]).map(|(a, b)| a * b).sum();
                assert!((d - f64::from(u8::from(i == j))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sign_convention() {
        let oct = full_spectrum_dense(&octahedron()).unwrap();
        for p in &oct.pairs {
            let first = p.vector.iter().find(|x| x.abs() > 1e-8).unwrap();
            assert!(*first > 0.0);
        }
    }
}
