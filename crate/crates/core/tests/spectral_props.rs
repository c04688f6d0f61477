use hostcolor::generators::gen_gnp;
use hostcolor::graph::Graph;
use hostcolor::spectral::{extreme_eigenpairs, full_spectrum_dense, lambda_expansion, lambda_expansion_dense, ITERATIVE_TOL};
use hostcolor::Seed;
use proptest::prelude::*;

fn host() -> impl Strategy<Value = Graph> {
    (8usize..70, 0.1f64..0.6, any::<u64>()).prop_map(|(n, frac, s)| gen_gnp(n, frac * (n - 1) as f64, &Seed::new(s)).unwrap())
}

fn triangles(g: &Graph) -> usize {
    g.edges().map(|(u, v)| g.neighbors(u).iter().filter(|&&w| w as usize > v && g.has_edge(v, w as usize)).count()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_identities(g in host()) {
        let spec = full_spectrum_dense(&g).unwrap();
        let l = spec.eigenvalues();
        let tol = 1e-8 * (1.0 + g.m() as f64);
        prop_assert!(l.iter().sum::<f64>().abs() < tol);
        prop_assert!((l.iter().map(|x| x * x).sum::<f64>() - 2.0 * g.m() as f64).abs() < tol);
        prop_assert!((l.iter().map(|x| x.powi(3)).sum::<f64>() - 6.0 * triangles(&g) as f64).abs() < tol * g.n() as f64);
        prop_assert!(l.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn iterative_matches_dense(g in host()) {
        let dense = full_spectrum_dense(&g).unwrap();
        let n = g.n();
        let iter = extreme_eigenpairs(&g, 2, 2, ITERATIVE_TOL).unwrap();
        for rank in [0, 1, n - 2, n - 1] {
            let (a, b) = (iter.by_rank(rank).unwrap(), dense.by_rank(rank).unwrap());
            prop_assert!((a.value - b.value).abs() < 1e-6, "rank {rank}: {} vs {}", a.value, b.value);
            // A·v = λ·v for the iterative vector.
            let mut av = vec![0.0; n];
            g.adjacency_apply(&a.vector, &mut av);
            let res = av.iter().zip(&a.vector).map(|(x, v)| (x - a.value * v).powi(2)).sum::<f64>().sqrt();
            prop_assert!(res < 1e-5 * (1.0 + a.value.abs()));
        }
        prop_assert!((lambda_expansion(&g).unwrap() - lambda_expansion_dense(&g).unwrap()).abs() < 1e-6);
    }
}
