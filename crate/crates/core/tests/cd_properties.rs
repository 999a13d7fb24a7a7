mod common;

use cdindex::{
    cd_decomposed, cd_original, score_breakdown, CdParams, CitationNetwork, DanglingPolicy,
};
use common::{oracle_cd, pid, RawGraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph_strategy(max_nodes: usize) -> impl Strategy<Value = RawGraph> {
    (any::<u64>(), any::<bool>()).prop_map(move |(seed, acausal)| {
        RawGraph::random(&mut ChaCha8Rng::seed_from_u64(seed), max_nodes, acausal)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn both_algorithms_match_brute_force(graph in graph_strategy(40), t in 1u32..7) {
        let net = graph.network();
        let params = CdParams::new(t).unwrap();
        for (id, _) in &graph.years {
            let id = pid(id);
            let original = cd_original(&net, &id, params).unwrap();
            let decomposed = cd_decomposed(&net, &id, params).unwrap();
            prop_assert_eq!(&original, &decomposed);

            let (sum, n, k) = oracle_cd(&graph, id.as_str(), t);
            prop_assert_eq!((original.numerator(), original.n, original.k), (sum, n, k));
            prop_assert_eq!(original.cd, (n > 0).then(|| sum as f64 / n as f64));
        }
    }

    #[test]
    fn pointwise_decomposition(graph in graph_strategy(40), t in 1u32..7) {
        let net = graph.network();
        let params = CdParams::new(t).unwrap();
        for (id, _) in &graph.years {
            for score in score_breakdown(&net, &pid(id), params).unwrap() {
                let s_prime = if score.cites_focal { -1 } else { 0 };
                let s_double = if score.cites_reference { -2 } else { 0 };
                prop_assert_eq!(score.score, s_prime + s_double + 2);
                prop_assert!(score.cites_focal || score.cites_reference);
            }
        }
    }

    #[test]
    fn result_invariants(graph in graph_strategy(60), t in 1u32..7) {
        let net = graph.network();
        let params = CdParams::new(t).unwrap();
        for (id, _) in &graph.years {
            let id = pid(id);
            let r = cd_decomposed(&net, &id, params).unwrap();
            prop_assert_eq!(r.n, r.n_disruptive + r.n_neutral + r.n_consolidating);
            match r.cd {
                None => prop_assert_eq!(r.n, 0),
                Some(cd) => {
                    prop_assert!((-1.0..=1.0).contains(&cd));
                    prop_assert_eq!(cd == 1.0, r.n_neutral == 0 && r.n_consolidating == 0);
                    prop_assert_eq!(cd == -1.0, r.n_consolidating == r.n);
                    if r.k == 0 {
                        prop_assert_eq!(cd, 1.0);
                    }
                }
            }

            let breakdown = score_breakdown(&net, &id, params).unwrap();
            prop_assert_eq!(breakdown.len() as u64, r.n);
            prop_assert!(breakdown.windows(2).all(|w| w[0].citer < w[1].citer));
            prop_assert!(breakdown.iter().all(|s| s.citer != id));
            let total: i64 = breakdown.iter().map(|s| s.score as i64).sum();
            prop_assert_eq!(total, r.numerator());
            if r.n > 0 {
                prop_assert_eq!(r.cd.unwrap(), total as f64 / r.n as f64);
            }
        }
    }

    #[test]
    fn citer_sets_grow_with_t(graph in graph_strategy(40), t in 1u32..6) {
        let net = graph.network();
        let small = CdParams::new(t).unwrap();
        let large = CdParams::new(t + 1).unwrap();
        for (id, _) in &graph.years {
            let a: Vec<_> = score_breakdown(&net, &pid(id), small).unwrap().into_iter().map(|s| s.citer).collect();
            let b: Vec<_> = score_breakdown(&net, &pid(id), large).unwrap().into_iter().map(|s| s.citer).collect();
            prop_assert!(a.iter().all(|c| b.contains(c)));
        }
    }

    #[test]
    fn duplicated_edges_change_nothing(graph in graph_strategy(40), dup_seed in any::<u64>()) {
        use rand::Rng;
        let net = graph.network();
        let mut rng = ChaCha8Rng::seed_from_u64(dup_seed);
        let mut records = graph.references_records();
        for rec in &mut records {
            let extra: Vec<_> = rec.references.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            rec.references.extend(extra);
        }
        // the citation direction, duplicated as well
        for rec in graph.citations_records() {
            let target = records.iter_mut().find(|r| r.id == rec.id).unwrap();
            target.citations.extend(rec.citations.iter().cloned());
            target.citations.extend(rec.citations.into_iter().filter(|_| rng.gen_bool(0.5)));
        }
        let dup = CitationNetwork::build(records, DanglingPolicy::Error).unwrap();
        prop_assert_eq!(&net, &dup);
        let params = CdParams::new(5).unwrap();
        for (id, _) in &graph.years {
            prop_assert_eq!(
                cd_decomposed(&net, &pid(id), params).unwrap(),
                cd_decomposed(&dup, &pid(id), params).unwrap()
            );
        }
    }
}

#[test]
fn reference_cited_by_many_counts_once() {
    let records = vec![
        cdindex::PublicationRecord::new(pid("f"), 2000)
            .with_references(["r1", "r2", "r3", "r4", "r5"].map(pid)),
        cdindex::PublicationRecord::new(pid("c"), 2001)
            .with_references(["r1", "r2", "r3", "r4", "r5"].map(pid)),
    ]
    .into_iter()
    .chain(
        ["r1", "r2", "r3", "r4", "r5"]
            .iter()
            .map(|r| cdindex::PublicationRecord::new(pid(r), 1990)),
    )
    .collect();
    let net = CitationNetwork::build(records, DanglingPolicy::Error).unwrap();
    let r = cd_decomposed(&net, &pid("f"), CdParams::new(1).unwrap()).unwrap();
    assert_eq!((r.n, r.n_neutral, r.cd), (1, 1, Some(0.0)));
}
