//! The acceptance gate: one test per criterion, each printing a verdict line.

use std::time::Instant;

use arbmatch::blocks::build_block_system;
use arbmatch::ffl::{run_ffl_with, FflOptions, VerifyLevel};
use arbmatch::instance::{
    build_arb_instance, depth_first_relabel, interval_instance, random_instance, ArbInstance,
    Arborescence,
};
use arbmatch::linalg;
use arbmatch::scarf_core::{run_scarf, OrdinalState, PivotRule};
use arbmatch::verify::{
    brute_force_stable_matchings, builtin_counterexample, is_extreme_point_q, q_membership,
    ConstraintKind, ConstraintStatus,
};
use arbmatch::{is_ordinal_basis, representation_vector, Matching};
use num::BigRational;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn verdict(criterion: usize, ok: bool, detail: &str) {
    let word = if ok { "pass" } else { "FAIL" };
    println!("criterion {}: {} ({})", criterion, word, detail);
    assert!(ok, "criterion {} failed: {}", criterion, detail);
}

/// The four-vertex worked example: a path-of-three with a side leaf, eight
/// hyperedges, used to freeze the exact block tables.
fn four_vertex_instance() -> ArbInstance {
    let tree = Arborescence::new(5, vec![(3, 1), (3, 2), (4, 3), (5, 4)], 5).unwrap();
    build_arb_instance(
        tree,
        vec![1, 2, 3, 4],
        vec![(3, 1), (3, 2), (4, 3), (5, 4), (4, 2), (4, 1), (5, 1), (5, 3)],
        vec![vec![6, 7, 1], vec![5, 2], vec![5, 6, 8, 7, 3], vec![7, 8, 4]],
    )
    .unwrap()
}

fn fast() -> FflOptions {
    FflOptions { verify: VerifyLevel::Off, cross_check_generic: false }
}

fn strict() -> FflOptions {
    FflOptions { verify: VerifyLevel::On, cross_check_generic: true }
}

#[test]
fn criterion_01_iteration_bound_and_monotone_separators() {
    let mut runs = 0usize;
    let mut max_iterations = 0usize;
    let mut schedule: Vec<(usize, usize)> = Vec::new();
    for idx in 0..800 {
        let n = 5 + idx % 76;
        schedule.push((n, (idx * 37) % (10 * n + 1)));
    }
    for idx in 0..150 {
        let n = 81 + (idx * 13) % 320;
        schedule.push((n, (idx * 101) % (10 * n + 1)));
    }
    for idx in 0..49 {
        let n = 401 + idx * 12;
        schedule.push((n, (idx * 257) % (10 * n + 1)));
    }
    schedule.push((1000, 10_000));
    for (run, &(n, extra)) in schedule.iter().enumerate() {
        let inst = random_instance(1_000 + run as u64, n, extra);
        let out = run_ffl_with(&inst, fast()).unwrap();
        assert!(out.iterations() <= n, "run {}: {} iterations on n={}", run, out.iterations(), n);
        assert!(
            out.separators.windows(2).all(|w| w[0] < w[1]),
            "run {}: separators not strictly increasing",
            run
        );
        max_iterations = max_iterations.max(out.iterations());
        runs += 1;
    }
    verdict(1, runs >= 1000, &format!("{} runs, max iterations {}", runs, max_iterations));
}

#[test]
fn criterion_02_outputs_match_the_brute_force_oracle() {
    let mut runs = 0usize;
    let mut failures = 0usize;
    for idx in 0..500u64 {
        let n = 2 + (idx as usize) % 7;
        let extra = (idx as usize) % (13 - n);
        let inst = random_instance(2_000 + idx, n, extra);
        assert!(inst.m() <= 12);
        let all = brute_force_stable_matchings(inst.system()).unwrap();
        let out = run_ffl_with(&inst, strict()).unwrap();
        if !all.iter().any(|mt| mt.edges() == out.matching.edges()) {
            failures += 1;
        }
        // The generic engine must land on an integral member as well.
        let bs = build_block_system(inst.system()).unwrap();
        let generic = run_scarf(&bs, PivotRule::default()).unwrap();
        let mut matching = Matching::empty(bs.m());
        for j in 1..=bs.m() {
            if generic.x[j] == linalg::rat(1) {
                matching.set(bs.edge_of_col(j), true);
            } else if generic.x[j] != linalg::rat(0) {
                failures += 1;
                break;
            }
        }
        if !all.iter().any(|mt| mt.edges() == matching.edges()) {
            failures += 1;
        }
        runs += 1;
    }
    verdict(2, runs >= 500 && failures == 0, &format!("{} runs, {} failures", runs, failures));
}

#[test]
fn criterion_03_worked_example_tables_are_exact() {
    let inst = four_vertex_instance();
    let bs = build_block_system(inst.system()).unwrap();
    let a_expected = vec![
        vec![1, 0, 0, 0, 0, 1, 1, 0],
        vec![0, 1, 0, 0, 1, 0, 0, 0],
        vec![0, 0, 1, 0, 1, 1, 1, 1],
        vec![0, 0, 0, 1, 0, 0, 1, 1],
    ];
    let c_expected = vec![
        vec![0, 7, 6, 5, 4, 2, 1, 3],
        vec![7, 0, 6, 5, 1, 4, 3, 2],
        vec![7, 6, 0, 5, 4, 3, 1, 2],
        vec![7, 6, 5, 0, 4, 3, 2, 1],
    ];
    let ok = bs.dense_a() == a_expected
        && bs.dense_c() == c_expected
        && (1..=8).all(|j| bs.c(0, j) == 9 - j as i64)
        && bs.c(0, 0) == 0
        && (1..=4).all(|i| bs.c(i, 0) == 9);
    verdict(3, ok, "incidence and ordinal tables match entry-for-entry");
}

#[test]
fn criterion_04_fractional_extreme_point_of_q() {
    let start = Instant::now();
    let (inst, point) = builtin_counterexample();
    let system = inst.system();
    let report = q_membership(system, &point).unwrap();
    let value_of = |kind: ConstraintKind| {
        report
            .checks
            .iter()
            .find(|c| c.kind == kind)
            .map(|c| (c.value.clone(), c.status))
            .unwrap()
    };
    let one = linalg::rat(1);
    let three_halves = linalg::rat(3) / linalg::rat(2);
    let mut ok = report.member;
    for e in [1usize, 2, 3] {
        let (value, status) = value_of(ConstraintKind::Dominance(e));
        ok &= value == one && status == ConstraintStatus::Tight;
    }
    for i in [1usize, 6, 9] {
        let (value, status) = value_of(ConstraintKind::Degree(i));
        ok &= value == one && status == ConstraintStatus::Tight;
    }
    for e in [4usize, 8] {
        let (value, status) = value_of(ConstraintKind::Dominance(e));
        ok &= value == three_halves && status == ConstraintStatus::Slack;
    }
    let extreme = is_extreme_point_q(system, &point).unwrap();
    ok &= extreme.member && extreme.extreme && extreme.tight_rank == 9;
    let zero = linalg::rat(0);
    ok &= point.x.iter().any(|v| v > &zero && v < &one);
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 1.0;
    verdict(
        4,
        ok,
        &format!("rank {}, slack value 3/2, {:?} elapsed", extreme.tight_rank, elapsed),
    );
}

#[test]
fn criterion_05_representations_equal_rational_solves() {
    let mut pairs = 0usize;
    for idx in 0..40u64 {
        let n = 2 + (idx as usize) % 9;
        let inst = random_instance(5_000 + idx, n, 2 + (idx as usize) % 7);
        let bs = build_block_system(inst.system()).unwrap();
        let outcome = run_scarf(&bs, PivotRule::default()).unwrap();
        let mut checked: Vec<(Vec<usize>, usize)> = Vec::new();
        let mut basis: Vec<usize> = (0..=bs.n()).collect();
        for it in &outcome.trace.iterations {
            checked.push((basis.clone(), it.entering));
            let pos = basis.iter().position(|&j| j == it.leaving).unwrap();
            basis.remove(pos);
            basis.push(it.entering);
            basis.sort_unstable();
        }
        let initial: Vec<usize> = (0..=bs.n()).collect();
        for j in bs.n() + 1..=bs.m() {
            checked.push((initial.clone(), j));
        }
        for (cols, j_t) in checked {
            let fast = representation_vector(&inst, &bs, &cols, j_t).unwrap();
            let a: Vec<Vec<BigRational>> = (0..=bs.n())
                .map(|i| cols.iter().map(|&j| linalg::rat(bs.a(i, j))).collect())
                .collect();
            let rhs: Vec<BigRational> = (0..=bs.n()).map(|i| linalg::rat(bs.a(i, j_t))).collect();
            let exact = linalg::solve(&a, &rhs).unwrap();
            let fast_rat: Vec<BigRational> = fast.iter().map(|&v| linalg::rat(v)).collect();
            assert_eq!(fast_rat, exact, "basis {:?}, entering {}", cols, j_t);
            pairs += 1;
        }
    }
    verdict(5, pairs >= 200, &format!("{} (basis, entering) pairs", pairs));
}

#[test]
fn criterion_06_ordinal_replacements_are_unique() {
    let mut pivots = 0usize;
    let mut instances: Vec<ArbInstance> = vec![four_vertex_instance()];
    for idx in 0..150u64 {
        let n = 2 + (idx as usize) % 4;
        instances.push(random_instance(6_000 + idx, n, (idx as usize) % 7));
    }
    for inst in &instances {
        let bs = build_block_system(inst.system()).unwrap();
        if bs.m() == bs.n() {
            continue;
        }
        let outcome = run_scarf(&bs, PivotRule::default()).unwrap();
        let mut o_cols: Vec<usize> = (1..=bs.n() + 1).collect();
        for it in &outcome.trace.iterations {
            let (j_l, j_star) = (it.leaving, it.entering_ordinal);
            let reduced: Vec<usize> = o_cols.iter().copied().filter(|&j| j != j_l).collect();
            for c in 0..=bs.m() {
                if reduced.contains(&c) {
                    continue;
                }
                let mut candidate = reduced.clone();
                candidate.push(c);
                candidate.sort_unstable();
                let completes = is_ordinal_basis(&bs, &candidate);
                assert_eq!(
                    completes,
                    c == j_star || c == j_l,
                    "column {} on removal of {}",
                    c,
                    j_l
                );
            }
            pivots += 1;
            o_cols = reduced;
            if j_star != 0 {
                o_cols.push(j_star);
                o_cols.sort_unstable();
            }
        }
    }
    verdict(6, pivots > 150, &format!("{} pivots checked exhaustively", pivots));
}

#[test]
fn criterion_07_utility_dynamics_at_every_pivot() {
    let mut pivots = 0usize;
    // Generic runs: recover the disliker of the leaving column by replay.
    for idx in 0..80u64 {
        let n = 2 + (idx as usize) % 7;
        let inst = random_instance(7_000 + idx, n, (idx as usize) % 8);
        let bs = build_block_system(inst.system()).unwrap();
        if bs.m() == bs.n() {
            continue;
        }
        let outcome = run_scarf(&bs, PivotRule::default()).unwrap();
        let mut state = OrdinalState::initial(&bs);
        for it in &outcome.trace.iterations {
            let i_l = (0..=bs.n()).find(|&i| state.disliked_col(i) == it.leaving).unwrap();
            let i_r = it.reference_row;
            let before = state.u().to_vec();
            let after = &it.utilities;
            assert!(after[i_l] > before[i_l], "disliker must strictly improve");
            assert!(after[i_r] < before[i_r], "reference row must strictly drop");
            for i in 0..=bs.n() {
                if i != i_l && i != i_r {
                    assert_eq!(after[i], before[i], "row {} must hold its utility", i);
                }
            }
            pivots += 1;
            let mut cols: Vec<usize> =
                state.cols().iter().copied().filter(|&j| j != it.leaving).collect();
            cols.push(if it.entering_ordinal == 0 { 0 } else { it.entering_ordinal });
            cols.sort_unstable();
            state = OrdinalState::for_cols(&bs, cols);
        }
    }
    // Engine runs: the separator row rises, row 0 drops.
    for idx in 0..40u64 {
        let inst = random_instance(7_500 + idx, 5 + (idx as usize) * 3, 8 + (idx as usize) * 2);
        let (relabeled, _) = depth_first_relabel(&inst);
        let bs = build_block_system(relabeled.system()).unwrap();
        if bs.m() == bs.n() {
            continue;
        }
        let out = run_ffl_with(&inst, strict()).unwrap();
        let mut before = OrdinalState::initial(&bs).u().to_vec();
        for (it, &sep) in out.trace.iterations.iter().zip(&out.separators) {
            let after = &it.utilities;
            assert!(after[sep] > before[sep]);
            assert!(after[0] < before[0]);
            for i in 1..=bs.n() {
                if i != sep {
                    assert_eq!(after[i], before[i]);
                }
            }
            before = after.clone();
            pivots += 1;
        }
    }
    verdict(7, pivots > 100, &format!("{} pivots, u moved exactly at i_l and i_r", pivots));
}

#[test]
fn criterion_08_pivot_classification_agrees() {
    let mut iterations = 0usize;
    for idx in 0..16u64 {
        let n = 5 + (idx as usize) * 13;
        let inst = random_instance(8_000 + idx, n, 3 * n);
        let out = run_ffl_with(&inst, FflOptions { verify: VerifyLevel::On, ..fast() }).unwrap();
        assert!(out.verified);
        iterations += out.iterations();
    }
    verdict(
        8,
        iterations > 0,
        &format!("all four conditions agreed at {} verified pivots", iterations),
    );
}

#[test]
fn criterion_09_nice_invariant_holds_each_iteration() {
    let mut iterations = 0usize;
    for idx in 0..16u64 {
        let n = 5 + (idx as usize) * 13; // up to n = 200
        let inst = random_instance(9_000 + idx, n, 4 * n);
        let out = run_ffl_with(&inst, FflOptions { verify: VerifyLevel::On, ..fast() }).unwrap();
        assert!(out.verified);
        iterations += out.iterations();
    }
    verdict(9, iterations > 0, &format!("niceness checked at {} iteration starts", iterations));
}

#[test]
fn criterion_10_large_run_performance() {
    let n = 10_000usize;
    // Interval hyperedges of span 2..=11 nodes on the path arborescence.
    let mut intervals: Vec<(usize, usize)> = Vec::new();
    for len in 1..=10usize {
        for lo in 1..=n - len {
            intervals.push((lo, lo + len));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    intervals.shuffle(&mut rng);
    intervals.truncate(90_000);
    let mut prefs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, &(lo, hi)) in intervals.iter().enumerate() {
        for v in lo..=hi {
            prefs[v - 1].push(idx + 1);
        }
    }
    for p in prefs.iter_mut() {
        p.shuffle(&mut rng);
    }
    let inst = interval_instance(n, &intervals, prefs).unwrap();
    assert_eq!(inst.n(), 10_000);
    assert_eq!(inst.m(), 100_000);
    let start = Instant::now();
    let out = run_ffl_with(&inst, fast()).unwrap();
    let elapsed = start.elapsed();
    let (m, n) = (inst.m(), inst.n());
    let ok = out.scanned_columns <= m + n
        && out.iterations() <= n
        && out.iterations() * out.scanned_columns <= 2 * n * m
        && elapsed.as_secs_f64() < 10.0;
    verdict(
        10,
        ok,
        &format!(
            "n={}, m={}, {} iterations, {} columns scanned, {:?}",
            n,
            m,
            out.iterations(),
            out.scanned_columns,
            elapsed
        ),
    );
}
