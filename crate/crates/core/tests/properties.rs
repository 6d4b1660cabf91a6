use catswarm::cso::{self, CsoParams, IterationObserver};
use catswarm::objective::Objective;
use catswarm::stats::{self, WilcoxonMethod};
use catswarm::suite;
use proptest::prelude::*;
use rand::SeedableRng;

/// Two-sided exact p by visiting every sign assignment. Ranks come from
/// pairwise counting rather than sorting.
fn enumerated_p(diffs: &[f64]) -> Option<f64> {
    let d: Vec<f64> = diffs.iter().copied().filter(|x| *x != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return None;
    }
    let mags: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    // doubled average rank = 2*less + equal + 1
    let ranks2: Vec<u64> = mags
        .iter()
        .map(|m| {
            let less = mags.iter().filter(|o| *o < m).count() as u64;
            let equal = mags.iter().filter(|o| *o == m).count() as u64;
            2 * less + equal + 1
        })
        .collect();
    let total: u64 = ranks2.iter().sum();
    let plus: u64 = (0..n).filter(|&i| d[i] > 0.0).map(|i| ranks2[i]).sum();
    let w = plus.min(total - plus);
    let mut at_most = 0u64;
    for mask in 0u64..(1 << n) {
        let s: u64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks2[i]).sum();
        if s <= w {
            at_most += 1;
        }
    }
    Some((2.0 * at_most as f64 / (1u64 << n) as f64).min(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn exact_wilcoxon_matches_enumeration(
        pairs in prop::collection::vec((-6i32..=6, -6i32..=6), 1..=12)
    ) {
        let a: Vec<f64> = pairs.iter().map(|p| p.0 as f64 * 0.5).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1 as f64 * 0.5).collect();
        let diffs: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let r = stats::wilcoxon_signed_rank(&a, &b).unwrap();
        match enumerated_p(&diffs) {
            Some(p) => {
                prop_assert_eq!(r.method, WilcoxonMethod::Exact);
                prop_assert_eq!(r.p_value, p);
            }
            None => {
                prop_assert_eq!(r.method, WilcoxonMethod::Degenerate);
                prop_assert_eq!(r.p_value, 1.0);
            }
        }
    }

    #[test]
    fn distinct_rank_row_sums_to_triangle(
        means in prop::collection::hash_set(-1000i64..1000, 2..9)
    ) {
        let row: Vec<Option<f64>> = means.iter().map(|&m| Some(m as f64)).collect();
        let k = row.len() as f64;
        let ranks = stats::rank_row(&row, true);
        prop_assert_eq!(ranks.iter().sum::<f64>(), k * (k + 1.0) / 2.0);
        let mut sorted = ranks.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assert_eq!(sorted, (1..=row.len()).map(|r| r as f64).collect::<Vec<_>>());
    }

    #[test]
    fn rank_row_sum_holds_with_ties_and_missing(
        row in prop::collection::vec(prop::option::of(-3i32..3), 2..8)
    ) {
        let row: Vec<Option<f64>> = row.iter().map(|m| m.map(f64::from)).collect();
        let k = row.len() as f64;
        let ranks = stats::rank_row(&row, true);
        prop_assert!((ranks.iter().sum::<f64>() - k * (k + 1.0) / 2.0).abs() < 1e-12);
        let worst_present = row.iter().zip(&ranks).filter(|(m, _)| m.is_some()).map(|(_, r)| *r).fold(0.0, f64::max);
        for (m, r) in row.iter().zip(&ranks) {
            if m.is_none() {
                prop_assert!(*r > worst_present);
            }
        }
    }

    #[test]
    fn rank_row_ignores_monotone_transforms(
        row in prop::collection::vec(-50.0f64..50.0, 2..8),
        scale in 0.01f64..100.0,
        shift in -1e3f64..1e3,
    ) {
        let base: Vec<Option<f64>> = row.iter().map(|&m| Some(m)).collect();
        let affine: Vec<Option<f64>> = row.iter().map(|&m| Some(m * scale + shift)).collect();
        let cubic: Vec<Option<f64>> = row.iter().map(|&m| Some(m.powi(3))).collect();
        let expo: Vec<Option<f64>> = row.iter().map(|&m| Some((m / 10.0).exp())).collect();
        let r = stats::rank_row(&base, true);
        // Affine maps may merge near-equal values through rounding; compare
        // only when the transform kept every pair's strict order.
        let order_kept = |t: &[Option<f64>]| {
            (0..row.len()).all(|i| (0..row.len()).all(|j| (row[i] < row[j]) == (t[i].unwrap() < t[j].unwrap())))
        };
        for t in [&affine, &cubic, &expo] {
            if order_kept(t) {
                prop_assert_eq!(&stats::rank_row(t, true), &r);
            }
        }
    }

    #[test]
    fn friedman_is_permutation_invariant(
        rows in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 4), 1..20),
        perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
    ) {
        let n = rows.len();
        let mut totals = vec![0.0; 4];
        for row in &rows {
            let ranks = stats::rank_row(&row.iter().map(|&m| Some(m)).collect::<Vec<_>>(), true);
            for (t, r) in totals.iter_mut().zip(ranks) {
                *t += r;
            }
        }
        let permuted: Vec<f64> = perm.iter().map(|&i| totals[i]).collect();
        let a = stats::friedman_statistic(&totals, n, 4);
        let b = stats::friedman_statistic(&permuted, n, 4);
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert!(a >= -1e-9);
    }
}

/// Records the worst bound or velocity violation seen during a run.
struct LimitWatch {
    lower: Vec<f64>,
    upper: Vec<f64>,
    v_max: Vec<f64>,
    violations: usize,
}

impl IterationObserver for LimitWatch {
    fn observe(&mut self, _: usize, cats: &[cso::Cat], _: &cso::BestRecord) {
        for c in cats {
            for d in 0..c.position.len() {
                if c.position[d] < self.lower[d] || c.position[d] > self.upper[d] || c.velocity[d].abs() > self.v_max[d] {
                    self.violations += 1;
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn runs_stay_in_bounds_with_monotone_traces(
        id in prop::sample::select(suite::IDS.to_vec()),
        seed in any::<u64>(),
        n_cats in 1usize..12,
        smp in 1usize..6,
        mr in 0.0f64..=1.0,
        spc in any::<bool>(),
    ) {
        let entry = suite::lookup(id).unwrap();
        let entry = if entry.is_scalable() { entry.with_dim(5).unwrap() } else { entry };
        let params = CsoParams { n_cats, smp, mr, spc, max_iters: 15, rng_seed: seed, ..Default::default() };
        let b = entry.bounds();
        let mut watch = LimitWatch {
            lower: b.lower.clone(),
            upper: b.upper.clone(),
            v_max: params.v_max.resolve(b),
            violations: 0,
        };
        let mut rng = cso::SwarmRng::seed_from_u64(seed);
        let out = cso::run_with(&params, &entry, &mut rng, |_| 1.0, &mut watch).unwrap();
        prop_assert_eq!(watch.violations, 0);
        prop_assert!(out.trace.best_fitness.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(*out.trace.best_fitness.last().unwrap(), out.best.fitness);
        prop_assert!(out.trace.total_evaluations() <= params.evaluation_bound());
        prop_assert!(b.contains(&out.best.position));
    }
}
