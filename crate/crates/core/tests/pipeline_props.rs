use hostcolor::generators::{apply_planting, gen_gnp, random_partition};
use hostcolor::graph::{find_k_coloring, is_proper_total, Coloring, Graph, FREE};
use hostcolor::pipeline::{
    approx_distance, cautious_uncolor_ordered, safe_recolor, sparse_3_color, PipelineParams, SparseColorError,
    SweepOrder,
};
use hostcolor::Seed;
use proptest::prelude::*;

fn partial(n: usize, k: u32) -> impl Strategy<Value = Coloring> {
    prop::collection::vec(0..=k, n).prop_map(move |a| Coloring::new(k, a).unwrap())
}

/// Brute-force minimum over relabelings, with free matching only free.
fn distance_oracle(a: &Coloring, b: &Coloring) -> usize {
    let perms = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];
    perms
        .iter()
        .map(|p| {
            let relabel = |c: u32| if c == FREE { FREE } else { p[c as usize - 1] };
            (0..a.len()).filter(|&v| relabel(a.get(v)) != b.get(v)).count()
        })
        .min()
        .unwrap()
}

/// Planted instance from a gnp host and a uniform partition.
fn planted(n: usize, d: f64, seed: u64) -> (Graph, Coloring) {
    let s = Seed::new(seed);
    let host = gen_gnp(n, d.min((n - 1) as f64), &s.child("host")).unwrap();
    let p = random_partition(n, 3, &s.child("plant"));
    (apply_planting(&host, &p).unwrap(), p)
}

/// Graphs of maximum degree 3: every subgraph has average degree at most 3.
fn subcubic() -> impl Strategy<Value = Graph> {
    (1usize..40, prop::collection::vec((0usize..40, 0usize..40), 0..80)).prop_map(|(n, pairs)| {
        let mut deg = vec![0; n];
        let mut edges = std::collections::BTreeSet::new();
        for (u, v) in pairs {
            let (u, v) = (u % n, v % n);
            if u != v && deg[u] < 3 && deg[v] < 3 && edges.insert((u.min(v), u.max(v))) {
                deg[u] += 1;
                deg[v] += 1;
            }
        }
        Graph::from_edges(n, edges).unwrap()
    })
}

proptest! {
    #[test]
    fn approx_distance_is_a_pseudometric(
        (a, b, c) in (1usize..10).prop_flat_map(|n| (partial(n, 3), partial(n, 3), partial(n, 3)))
    ) {
        let d = |x: &Coloring, y: &Coloring| approx_distance(x, y, 3).unwrap();
        prop_assert_eq!(d(&a, &a), 0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        prop_assert_eq!(d(&a, &b), distance_oracle(&a, &b));
    }

    #[test]
    fn cautious_uncolor_ignores_sweep_order(n in 20usize..120, d in 4.0f64..15.0, seed in any::<u64>(), noise in 0.0f64..0.5) {
        let (g, p) = planted(n, d, seed);
        let mut rng = Seed::new(seed).child("noise").rng();
        let noisy = Coloring::new(3, (0..n).map(|v| {
            if rand::Rng::gen_bool(&mut rng, noise) { rand::Rng::gen_range(&mut rng, 0..=3) } else { p.get(v) }
        }).collect()).unwrap();
        let params = PipelineParams { eps: 0.1, ..Default::default() };
        let asc = cautious_uncolor_ordered(&g, &noisy, d, &params, SweepOrder::Ascending);
        let desc = cautious_uncolor_ordered(&g, &noisy, d, &params, SweepOrder::Descending);
        prop_assert_eq!(&asc, &desc);
        prop_assert!((0..n).all(|v| asc.is_free(v) || asc.get(v) == noisy.get(v)));
    }

    #[test]
    fn safe_recolor_keeps_agreement(n in 10usize..150, d in 2.0f64..20.0, seed in any::<u64>(), keep in 0.0f64..1.0) {
        let (g, p) = planted(n, d, seed);
        let mut rng = Seed::new(seed).child("keep").rng();
        let c = Coloring::new(3, (0..n).map(|v| if rand::Rng::gen_bool(&mut rng, keep) { p.get(v) } else { FREE }).collect()).unwrap();
        let out = safe_recolor(&g, &c);
        for v in 0..n {
            if !c.is_free(v) {
                prop_assert_eq!(out.get(v), c.get(v));
            }
            if !out.is_free(v) {
                prop_assert_eq!(out.get(v), p.get(v));
            }
        }
    }

    #[test]
    fn sparse_3_color_matches_search(g in subcubic()) {
        let exists = find_k_coloring(&g, 3, &Coloring::uncolored(g.n(), 3)).is_some();
        match sparse_3_color(&g) {
            Ok(c) => prop_assert!(is_proper_total(&g, &c)),
            Err(SparseColorError::NotThreeColorable(v)) => {
                prop_assert!(!exists);
                prop_assert_eq!(g.degree(v), 3);
            }
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
        prop_assert_eq!(exists, sparse_3_color(&g).is_ok());
    }
}
