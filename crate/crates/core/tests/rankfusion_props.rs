#![allow(clippy::needless_range_loop)]

mod common;

use ld3::rankfusion::{
    borda_fuse, condorcet_fuse, cooccurrence, local_rankings, mc4_fuse, mc4_fuse_with_status,
    reciprocal_fuse, ws_coefficient, FusionMethod, GlobalRanking, LocalRankings,
};
use ld3::LabelVector;
use proptest::prelude::*;

fn window_strategy() -> impl Strategy<Value = (usize, Vec<Vec<u8>>)> {
    (2usize..9).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(prop::collection::vec(0u8..2, n), 0..40),
        )
    })
}

fn to_vectors(rows: &[Vec<u8>]) -> Vec<LabelVector> {
    rows.iter()
        .map(|r| LabelVector::new(r.clone()).unwrap())
        .collect()
}

fn is_permutation(order: &[usize], n: usize) -> bool {
    let mut seen = order.to_vec();
    seen.sort_unstable();
    seen == (0..n).collect::<Vec<_>>()
}

/// Every row ranks the other labels in the same strict order `base`.
fn unanimous(base: &[usize]) -> LocalRankings {
    let n = base.len();
    let rows: Vec<Vec<u32>> = (0..n)
        .map(|k| {
            let mut row = vec![0u32; n];
            let mut r = 0;
            for &label in base {
                if label != k {
                    r += 1;
                    row[label] = r;
                }
            }
            row
        })
        .collect();
    LocalRankings::from_rows(&rows).unwrap()
}

proptest! {
    #[test]
    fn cooccurrence_matches_recount((n, rows) in window_strategy()) {
        let m = cooccurrence(&to_vectors(&rows), n).unwrap();
        let expect = common::cooccurrence(&rows, n);
        prop_assert_eq!(m.to_rows(), expect);
        for i in 0..n {
            prop_assert_eq!(m.get(i, i), 0);
            for j in 0..n {
                prop_assert_eq!(m.get(i, j), m.get(j, i));
                prop_assert!(m.get(i, j) as usize <= rows.len());
            }
        }
    }

    #[test]
    fn local_ranks_match_recount((n, rows) in window_strategy()) {
        let lr = local_rankings(&cooccurrence(&to_vectors(&rows), n).unwrap());
        let expect = common::local_ranks(&common::cooccurrence(&rows, n));
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(lr.rank(i, j), expect[i][j]);
            }
        }
    }

    #[test]
    fn reciprocal_matches_exact_oracle((n, rows) in window_strategy()) {
        let lr = local_rankings(&cooccurrence(&to_vectors(&rows), n).unwrap());
        let r = reciprocal_fuse(&lr);
        let (scores, order) = common::reciprocal(&common::local_ranks(&common::cooccurrence(&rows, n)));
        prop_assert_eq!(&r.order, &order);
        for (s, exact) in r.scores.iter().zip(&scores) {
            let exact = *exact.numer() as f64 / *exact.denom() as f64;
            prop_assert!(*s > 0.0);
            prop_assert!((s - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn isolated_label_keeps_relative_order((n, rows) in window_strategy()) {
        let base = reciprocal_fuse(&local_rankings(&cooccurrence(&to_vectors(&rows), n).unwrap()));
        // an extra label that never fires: all-zero row and column
        let widened: Vec<Vec<u8>> = rows.iter().map(|r| { let mut r = r.clone(); r.push(0); r }).collect();
        let wide = reciprocal_fuse(&local_rankings(&cooccurrence(&to_vectors(&widened), n + 1).unwrap()));
        let restricted: Vec<usize> = wide.order.iter().copied().filter(|&l| l < n).collect();
        prop_assert_eq!(restricted, base.order);
    }

    #[test]
    fn all_fusions_return_permutations((n, rows) in window_strategy()) {
        let lr = local_rankings(&cooccurrence(&to_vectors(&rows), n).unwrap());
        for m in FusionMethod::ALL {
            let a = m.fuse(&lr);
            prop_assert!(is_permutation(&a.order, n), "{} {:?}", m, a.order);
            // deterministic, bit for bit
            let b = m.fuse(&lr);
            prop_assert_eq!(a.order, b.order);
            prop_assert_eq!(
                a.scores.iter().map(|s| s.to_bits()).collect::<Vec<_>>(),
                b.scores.iter().map(|s| s.to_bits()).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn unanimous_rankings_agree(base in (2usize..16).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())) {
        let lr = unanimous(&base);
        let first = FusionMethod::Reciprocal.fuse(&lr).order;
        for m in FusionMethod::ALL {
            prop_assert_eq!(&m.fuse(&lr).order, &first, "{}", m);
        }
        // two labels carry no ordering information (each row ranks only the other)
        if base.len() >= 3 {
            prop_assert_eq!(&first, &base);
        }
    }

    #[test]
    fn ws_identity_and_bounds(order in (2usize..40).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle()),
                              other_seed in any::<u64>()) {
        let r = GlobalRanking::from_order(order.clone()).unwrap();
        prop_assert_eq!(ws_coefficient(&r, &r).unwrap(), 1.0);
        let mut rng = common::SplitMix(other_seed);
        let mut other = order.clone();
        for i in (1..other.len()).rev() {
            other.swap(i, rng.below(i + 1));
        }
        let o = GlobalRanking::from_order(other.clone()).unwrap();
        let c = ws_coefficient(&r, &o).unwrap();
        prop_assert!(c > -1.0 && c <= 1.0, "{}", c);
        prop_assert!((c - common::ws(&order, &other)).abs() < 1e-12);
        prop_assert_eq!(c == 1.0, order == other);
    }
}

#[test]
fn ws_minimum_over_all_small_permutations() {
    // exhaustive: the infimum stays strictly above -1
    fn permute(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(k + 1, items, out);
            items.swap(k, i);
        }
    }
    for n in 2..=7 {
        let mut perms = Vec::new();
        permute(0, &mut (0..n).collect(), &mut perms);
        let identity = GlobalRanking::from_order((0..n).collect()).unwrap();
        let min = perms
            .iter()
            .map(|p| {
                ws_coefficient(&identity, &GlobalRanking::from_order(p.clone()).unwrap()).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(min > -1.0, "n={n}: {min}");
    }
}

/// Exact stationary distribution of the 3-state MC4 chain by Gaussian elimination.
fn stationary_3(p: [[f64; 3]; 3]) -> [f64; 3] {
    // solve pi (P - I) = 0 with sum(pi) = 1; replace the last equation by the sum
    let mut a = [[0.0f64; 4]; 3];
    for (j, row) in a.iter_mut().enumerate().take(2) {
        for i in 0..3 {
            row[i] = p[i][j] - if i == j { 1.0 } else { 0.0 };
        }
    }
    a[2] = [1.0, 1.0, 1.0, 1.0];
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for r in 0..3 {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..4 {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    [a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]]
}

#[test]
fn mc4_matches_exact_stationary_distribution() {
    let new_window = to_vectors(&[vec![1, 0, 1], vec![1, 1, 0], vec![1, 0, 1]]);
    let lr = local_rankings(&cooccurrence(&new_window, 3).unwrap());
    // with 3 labels each pair shares exactly one row: l1 beats l2 and l3, l3 beats l2
    let beats = |a: usize, b: usize| matches!((a, b), (0, 1) | (0, 2) | (2, 1));
    let eps = 1e-6;
    let mut p = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j && beats(j, i) {
                p[i][j] = 1.0 / 3.0;
            }
        }
        p[i][i] = 1.0 - (0..3).filter(|&j| j != i).map(|j| p[i][j]).sum::<f64>();
        for j in 0..3 {
            p[i][j] = (1.0 - eps) * p[i][j] + eps / 3.0;
        }
    }
    let exact = stationary_3(p);
    let (r, status) = mc4_fuse_with_status(&lr);
    assert!(status.converged);
    for k in 0..3 {
        assert!(
            (r.scores[k] - exact[k]).abs() < 1e-6,
            "{:?} vs {:?}",
            r.scores,
            exact
        );
    }
    assert!(exact[0] > exact[1] && exact[0] > exact[2]);
    assert_eq!(r.order[0], 0);
}

#[test]
fn fusion_examples_on_worked_windows() {
    let new_window = to_vectors(&[vec![1, 0, 1], vec![1, 1, 0], vec![1, 0, 1]]);
    let lr = local_rankings(&cooccurrence(&new_window, 3).unwrap());
    let borda = borda_fuse(&lr);
    assert!(borda.scores[0] > borda.scores[1]);
    assert_eq!(condorcet_fuse(&lr).order[0], 0);
    assert_eq!(mc4_fuse(&lr).order[0], 0);
}

#[test]
fn two_labels_follow_index_order() {
    // with two labels no row ranks both, so there is never a majority
    let lr = local_rankings(&cooccurrence(&to_vectors(&[vec![1, 1], vec![1, 0]]), 2).unwrap());
    for m in FusionMethod::ALL {
        assert_eq!(m.fuse(&lr).order, vec![0, 1], "{m}");
    }
}
