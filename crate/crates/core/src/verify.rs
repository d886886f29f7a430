//! Independent ground-truth checkers.
//!
//! Nothing here reuses engine machinery beyond the shared instance/block
//! types: stability is checked straight from the definition, the brute-force
//! oracle enumerates subsets, and polytope questions are settled with exact
//! rational rank computations. This is what the solvers are tested against.
//!
//! Stability: a (possibly fractional) assignment `x` of weights to
//! hyperedges is a stable matching when it respects the degree bounds
//! (`x(δ(i)) ≤ 1`, `x ≥ 0`) and every hyperedge `e` has a *witness*: a member
//! vertex `i` whose weakly-preferred weight `Σ {x_e′ : e′ ∈ δ(i), e′ ⪰_i e}`
//! is exactly 1.
//!
//! The fractional matching polytope `Q` relaxes the witness condition to the
//! *dominance* constraint `x(e^⪰) ≥ 1`, where `e^⪰` collects the hyperedges
//! weakly preferred to `e` by *some* member. Every stable `x` lies in `Q`,
//! but `Q` can have extreme points that are not stable matchings — see
//! [`builtin_counterexample`] for one with non-integral coordinates.

use num::{BigRational, One, Signed, Zero};
use thiserror::Error;

use crate::blocks::BlockSystem;
use crate::instance::{build_arb_instance, ArbInstance, Arborescence, PreferenceSystem};
use crate::linalg;
use crate::scarf_core;

/// How many hyperedges the brute-force oracle will enumerate over.
pub const BRUTE_FORCE_CAP: usize = 20;

/// Errors from the checkers.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("point has {got} coordinates but the system has {expected} hyperedges")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{m} hyperedges exceed the enumeration cap of {cap}")]
    TooLarge { m: usize, cap: usize },
}

// ---------------------------------------------------------------------------
// Points

/// An integral selection of hyperedges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// x[e] for e in 1..=m; slot 0 unused.
    x: Vec<bool>,
}

impl Matching {
    /// The empty selection over `m` hyperedges.
    pub fn empty(m: usize) -> Matching {
        Matching { x: vec![false; m + 1] }
    }

    /// Selection of the given hyperedge ids.
    pub fn from_edges(m: usize, edges: &[usize]) -> Matching {
        let mut mt = Matching::empty(m);
        for &e in edges {
            mt.set(e, true);
        }
        mt
    }

    /// Number of hyperedges the selection ranges over.
    pub fn m(&self) -> usize {
        self.x.len() - 1
    }

    pub fn contains(&self, e: usize) -> bool {
        self.x[e]
    }

    pub fn set(&mut self, e: usize, value: bool) {
        assert!(e >= 1 && e < self.x.len(), "hyperedge id {} out of range", e);
        self.x[e] = value;
    }

    /// Selected hyperedge ids, ascending.
    pub fn edges(&self) -> Vec<usize> {
        (1..self.x.len()).filter(|&e| self.x[e]).collect()
    }

    /// Whether the selected hyperedges are pairwise disjoint.
    pub fn is_matching(&self, system: &PreferenceSystem) -> bool {
        let mut covered = vec![false; system.n() + 1];
        for e in self.edges() {
            for &v in system.edge(e) {
                if covered[v] {
                    return false;
                }
                covered[v] = true;
            }
        }
        true
    }
}

/// A fractional assignment of weights to hyperedges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoint {
    /// `x[e]` for `e` in `1..=m`; slot 0 unused (zero).
    pub x: Vec<BigRational>,
}

impl RationalPoint {
    /// The all-zero point over `m` hyperedges.
    pub fn zeros(m: usize) -> RationalPoint {
        RationalPoint { x: vec![BigRational::zero(); m + 1] }
    }

    /// The 0/1 point of an integral selection.
    pub fn from_matching(mt: &Matching) -> RationalPoint {
        let mut p = RationalPoint::zeros(mt.m());
        for e in mt.edges() {
            p.x[e] = BigRational::one();
        }
        p
    }

    /// Number of hyperedges the point ranges over.
    pub fn m(&self) -> usize {
        self.x.len() - 1
    }
}

/// Reindex an engine solution (indexed by block-system columns, including
/// the artificial column 0) into a point over hyperedge ids.
pub fn point_from_columns(bs: &BlockSystem, x_cols: &[BigRational]) -> RationalPoint {
    let mut p = RationalPoint::zeros(bs.m());
    for e in 1..=bs.m() {
        p.x[e] = x_cols[bs.col_of_edge(e)].clone();
    }
    p
}

// ---------------------------------------------------------------------------
// Stability

/// Outcome of the witness search for one hyperedge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeCheck {
    /// The smallest member vertex whose weakly-preferred weight is exactly 1.
    Witness { edge: usize, vertex: usize },
    /// No member reaches 1; `sum` is the largest member's weakly-preferred weight.
    Violated { edge: usize, sum: BigRational },
}

/// Stability verdict with one check per hyperedge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub stable: bool,
    /// One entry per hyperedge, in id order.
    pub checks: Vec<EdgeCheck>,
    /// Vertices whose incident weight exceeds 1, with the offending load.
    pub overloaded: Vec<(usize, BigRational)>,
    /// Hyperedges with negative weight.
    pub negative: Vec<usize>,
}

impl StabilityReport {
    /// One line per hyperedge (`edge <id>: witness <vertex>` or
    /// `edge <id>: VIOLATED sum=<p>/<q>`), then any feasibility problems.
    pub fn render_lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .map(|c| match c {
                EdgeCheck::Witness { edge, vertex } => {
                    format!("edge {}: witness {}", edge, vertex)
                }
                EdgeCheck::Violated { edge, sum } => {
                    format!("edge {}: VIOLATED sum={}", edge, sum)
                }
            })
            .collect();
        for (v, load) in &self.overloaded {
            out.push(format!("vertex {}: load {} exceeds 1", v, load));
        }
        for e in &self.negative {
            out.push(format!("edge {}: negative weight", e));
        }
        out
    }
}

/// Check a fractional point for stability, straight from the definition.
pub fn is_fractional_stable(
    system: &PreferenceSystem,
    point: &RationalPoint,
) -> Result<StabilityReport, VerifyError> {
    if point.m() != system.m() {
        return Err(VerifyError::DimensionMismatch { expected: system.m(), got: point.m() });
    }
    let one = BigRational::one();
    let negative: Vec<usize> =
        (1..=system.m()).filter(|&e| point.x[e].is_negative()).collect();
    let mut overloaded = Vec::new();
    for i in 1..=system.n() {
        let load: BigRational = system.prefs_of(i).iter().map(|&e| point.x[e].clone()).sum();
        if load > one {
            overloaded.push((i, load));
        }
    }
    let mut checks = Vec::with_capacity(system.m());
    let mut stable = overloaded.is_empty() && negative.is_empty();
    for e in 1..=system.m() {
        let mut best: Option<BigRational> = None;
        let mut witness = None;
        for &i in system.edge(e) {
            // Weight on hyperedges i weakly prefers to e.
            let cutoff = system.rank(i, e).expect("members are incident");
            let sum: BigRational = system
                .prefs_of(i)
                .iter()
                .take(cutoff + 1)
                .map(|&f| point.x[f].clone())
                .sum();
            if sum == one {
                witness = Some(i);
                break;
            }
            if best.as_ref().is_none_or(|b| sum > *b) {
                best = Some(sum);
            }
        }
        match witness {
            Some(vertex) => checks.push(EdgeCheck::Witness { edge: e, vertex }),
            None => {
                stable = false;
                checks.push(EdgeCheck::Violated {
                    edge: e,
                    sum: best.expect("hyperedges are nonempty"),
                });
            }
        }
    }
    Ok(StabilityReport { stable, checks, overloaded, negative })
}

/// Check an integral selection for stability (it must also be a matching).
pub fn is_stable_matching(
    system: &PreferenceSystem,
    matching: &Matching,
) -> Result<StabilityReport, VerifyError> {
    if matching.m() != system.m() {
        return Err(VerifyError::DimensionMismatch { expected: system.m(), got: matching.m() });
    }
    is_fractional_stable(system, &RationalPoint::from_matching(matching))
}

/// Whether `cols` is simultaneously a feasible cardinal and an ordinal basis.
pub fn is_dominating_basis(bs: &BlockSystem, cols: &[usize]) -> bool {
    scarf_core::is_feasible_cardinal_basis(bs, cols) && scarf_core::is_ordinal_basis(bs, cols)
}

// ---------------------------------------------------------------------------
// Brute force

/// Enumerate every stable matching by trying all hyperedge subsets in
/// ascending bitmask order (bit `k` ↔ hyperedge `k+1`). Integer arithmetic
/// only: a matching is stable iff every hyperedge has a member whose chosen
/// hyperedge is weakly preferred.
pub fn brute_force_stable_matchings(
    system: &PreferenceSystem,
) -> Result<Vec<Matching>, VerifyError> {
    let m = system.m();
    let n = system.n();
    if m > BRUTE_FORCE_CAP {
        return Err(VerifyError::TooLarge { m, cap: BRUTE_FORCE_CAP });
    }
    let mut results = Vec::new();
    'masks: for mask in 0u64..(1u64 << m) {
        // chosen_rank[i] = preference position of i's selected hyperedge.
        let mut chosen_rank = vec![usize::MAX; n + 1];
        for e in 1..=m {
            if mask >> (e - 1) & 1 == 0 {
                continue;
            }
            for &v in system.edge(e) {
                if chosen_rank[v] != usize::MAX {
                    continue 'masks; // overlapping hyperedges
                }
                chosen_rank[v] = system.rank(v, e).expect("members are incident");
            }
        }
        for e in 1..=m {
            let witnessed = system
                .edge(e)
                .iter()
                .any(|&v| chosen_rank[v] <= system.rank(v, e).expect("members are incident"));
            if !witnessed {
                continue 'masks;
            }
        }
        let edges: Vec<usize> = (1..=m).filter(|&e| mask >> (e - 1) & 1 == 1).collect();
        results.push(Matching::from_edges(m, &edges));
    }
    Ok(results)
}

// ---------------------------------------------------------------------------
// The fractional matching polytope Q

/// Which constraint of `Q` a check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// `x(δ(i)) ≤ 1` for a vertex `i`.
    Degree(usize),
    /// `x(e^⪰) ≥ 1` for a hyperedge `e`.
    Dominance(usize),
    /// `x_e ≥ 0`.
    LowerBound(usize),
    /// `x_e ≤ 1`.
    UpperBound(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintStatus {
    Tight,
    Slack,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintCheck {
    pub kind: ConstraintKind,
    /// The constraint's left-hand-side value at the point.
    pub value: BigRational,
    pub status: ConstraintStatus,
}

/// Membership report for `Q`: all constraints with values and statuses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QReport {
    pub member: bool,
    pub checks: Vec<ConstraintCheck>,
}

impl QReport {
    /// Checks with a given status.
    pub fn with_status(&self, status: ConstraintStatus) -> Vec<&ConstraintCheck> {
        self.checks.iter().filter(|c| c.status == status).collect()
    }
}

/// The hyperedges some member of `e` weakly prefers to `e` (always contains
/// `e`), ascending.
pub fn dominators(system: &PreferenceSystem, e: usize) -> Vec<usize> {
    let mut set = vec![false; system.m() + 1];
    for &i in system.edge(e) {
        let cutoff = system.rank(i, e).expect("members are incident");
        for &f in system.prefs_of(i).iter().take(cutoff + 1) {
            set[f] = true;
        }
    }
    (1..=system.m()).filter(|&f| set[f]).collect()
}

/// Evaluate every constraint of `Q` at a point.
pub fn q_membership(
    system: &PreferenceSystem,
    point: &RationalPoint,
) -> Result<QReport, VerifyError> {
    if point.m() != system.m() {
        return Err(VerifyError::DimensionMismatch { expected: system.m(), got: point.m() });
    }
    let one = BigRational::one();
    let zero = BigRational::zero();
    let mut checks = Vec::new();
    for i in 1..=system.n() {
        let value: BigRational = system.prefs_of(i).iter().map(|&e| point.x[e].clone()).sum();
        let status = if value == one {
            ConstraintStatus::Tight
        } else if value < one {
            ConstraintStatus::Slack
        } else {
            ConstraintStatus::Violated
        };
        checks.push(ConstraintCheck { kind: ConstraintKind::Degree(i), value, status });
    }
    for e in 1..=system.m() {
        let value: BigRational =
            dominators(system, e).into_iter().map(|f| point.x[f].clone()).sum();
        let status = if value == one {
            ConstraintStatus::Tight
        } else if value > one {
            ConstraintStatus::Slack
        } else {
            ConstraintStatus::Violated
        };
        checks.push(ConstraintCheck { kind: ConstraintKind::Dominance(e), value, status });
    }
    for e in 1..=system.m() {
        let value = point.x[e].clone();
        let status = if value == zero {
            ConstraintStatus::Tight
        } else if value > zero {
            ConstraintStatus::Slack
        } else {
            ConstraintStatus::Violated
        };
        checks.push(ConstraintCheck { kind: ConstraintKind::LowerBound(e), value, status });
    }
    for e in 1..=system.m() {
        let value = point.x[e].clone();
        let status = if value == one {
            ConstraintStatus::Tight
        } else if value < one {
            ConstraintStatus::Slack
        } else {
            ConstraintStatus::Violated
        };
        checks.push(ConstraintCheck { kind: ConstraintKind::UpperBound(e), value, status });
    }
    let member = checks.iter().all(|c| c.status != ConstraintStatus::Violated);
    Ok(QReport { member, checks })
}

/// Extreme-point verdict: membership plus the rank of the tight constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremeReport {
    pub member: bool,
    /// Rank of the tight constraint rows; the point is extreme iff this
    /// equals the ambient dimension `m` (and the point is a member).
    pub tight_rank: usize,
    pub extreme: bool,
}

/// Decide whether a point is an extreme point of `Q` by computing the exact
/// rank of its tight constraint rows.
pub fn is_extreme_point_q(
    system: &PreferenceSystem,
    point: &RationalPoint,
) -> Result<ExtremeReport, VerifyError> {
    let report = q_membership(system, point)?;
    let m = system.m();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for check in &report.checks {
        if check.status != ConstraintStatus::Tight {
            continue;
        }
        let mut row = vec![BigRational::zero(); m];
        match check.kind {
            ConstraintKind::Degree(i) => {
                for &e in system.prefs_of(i) {
                    row[e - 1] = BigRational::one();
                }
            }
            ConstraintKind::Dominance(e) => {
                for f in dominators(system, e) {
                    row[f - 1] = BigRational::one();
                }
            }
            ConstraintKind::LowerBound(e) | ConstraintKind::UpperBound(e) => {
                row[e - 1] = BigRational::one();
            }
        }
        rows.push(row);
    }
    let tight_rank = linalg::rank(&rows);
    Ok(ExtremeReport { member: report.member, tight_rank, extreme: report.member && tight_rank == m })
}

// ---------------------------------------------------------------------------
// Built-in counterexample

/// An interval instance on nine path vertices whose polytope `Q` has a
/// non-integral extreme point.
///
/// The nine hyperedges are the intervals `e1=[4,7]`, `e2=[1,3]`, `e3=[6,9]`,
/// `f1=[1,5]`, `f2=[3,6]`, `f3=[7,9]`, `g1=[1,2]`, `g2=[6,7]`, `g3=[8,9]`
/// (ids 1–9 in that order; deliberately no singletons, so the system fails
/// [`PreferenceSystem::validate`] and is for the checkers, not the solvers).
/// The returned point puts weight ½ on `f1, f2, f3, g1, g2, g3`: it lies in
/// `Q`, and its tight constraints have full rank 9, so it is an extreme point
/// with fractional coordinates.
pub fn builtin_counterexample() -> (ArbInstance, RationalPoint) {
    let n = 9;
    let tree_arcs: Vec<(usize, usize)> = (1..=n).map(|i| (i + 1, i)).collect();
    let tree = Arborescence::new(n + 1, tree_arcs, n + 1).expect("path arborescence is valid");
    let inst = build_arb_instance(
        tree,
        (1..=n).collect(),
        vec![
            (8, 4),  // e1 = [4,7]
            (4, 1),  // e2 = [1,3]
            (10, 6), // e3 = [6,9]
            (6, 1),  // f1 = [1,5]
            (7, 3),  // f2 = [3,6]
            (10, 7), // f3 = [7,9]
            (3, 1),  // g1 = [1,2]
            (8, 6),  // g2 = [6,7]
            (10, 8), // g3 = [8,9]
        ],
        vec![
            vec![2, 7, 4],    // 1: e2 ≻ g1 ≻ f1
            vec![4, 2, 7],    // 2: f1 ≻ e2 ≻ g1
            vec![5, 4, 2],    // 3: f2 ≻ f1 ≻ e2
            vec![1, 5, 4],    // 4: e1 ≻ f2 ≻ f1
            vec![4, 1, 5],    // 5: f1 ≻ e1 ≻ f2
            vec![1, 5, 3, 8], // 6: e1 ≻ f2 ≻ e3 ≻ g2
            vec![6, 1, 3, 8], // 7: f3 ≻ e1 ≻ e3 ≻ g2
            vec![3, 9, 6],    // 8: e3 ≻ g3 ≻ f3
            vec![6, 3, 9],    // 9: f3 ≻ e3 ≻ g3
        ],
    )
    .expect("the built-in instance is structurally valid");
    let half = BigRational::new(1.into(), 2.into());
    let mut point = RationalPoint::zeros(9);
    for e in 4..=9 {
        point.x[e] = half.clone();
    }
    (inst, point)
}
