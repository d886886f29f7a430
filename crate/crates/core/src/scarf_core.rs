//! Generic pivoting engine over the augmented block system.
//!
//! The engine maintains two bases over columns `0..=m`: a *cardinal* basis
//! `B` (columns whose constraint submatrix is invertible and whose basic
//! solution of `A x = 1` is nonnegative) and an *ordinal* basis `O` (a column
//! set such that every column `k` satisfies `c(i, k) ≤ u_i` for some row `i`,
//! where `u_i = min_{j ∈ O} c(i, j)`). Starting from `B = {0, …, n}` and
//! `O = {1, …, n+1}`, each iteration lets the unique column of `O ∖ B` enter
//! `B`, removes the column the ratio test selects, and then performs the
//! ordinal replacement step that removes the same column from `O`. The loop
//! ends when the replacement returns column 0, at which point `B = O` is a
//! *dominating* basis and its basic solution restricted to columns `1..=m`
//! is a fractional stable matching.
//!
//! All arithmetic is exact (`BigRational`); the ratio test is lexicographic,
//! so every pivot is uniquely determined and cycling is impossible. The
//! ordinal replacement asserts its characteristic utility dynamics on every
//! pivot: the row that disliked the removed column strictly improves, the
//! reference row strictly drops, and no other row's utility moves.

use num::{BigRational, One, Signed, Zero};
use thiserror::Error;

use crate::blocks::BlockSystem;
use crate::linalg;

/// Errors from the generic engine.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScarfError {
    #[error("entering column {column} is unbounded: no basic variable blocks it")]
    Unbounded { column: usize },
    #[error("iteration limit of {limit} exceeded")]
    IterationLimitExceeded { limit: u64 },
}

/// Rule for choosing the column that leaves the cardinal basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Minimize `x_r / y_r` with ties broken by the lexicographic order of
    /// the scaled rows of the basis inverse. The minimizer is always unique,
    /// which makes runs deterministic and cycle-free.
    #[default]
    Lexicographic,
}

// ---------------------------------------------------------------------------
// Cardinal side

/// A feasible cardinal basis with its basic solution.
#[derive(Debug, Clone)]
pub struct CardinalState {
    /// Basic columns, ascending.
    basis: Vec<usize>,
    /// Basic solution over all columns 0..=m (nonbasic entries are zero).
    x: Vec<BigRational>,
    /// Inverse of the basis matrix, rows aligned with `basis` positions.
    inv: Vec<Vec<BigRational>>,
}

impl CardinalState {
    /// The initial basis: the artificial column plus all singleton columns,
    /// whose basis matrix is the identity.
    pub fn initial(bs: &BlockSystem) -> CardinalState {
        let n = bs.n();
        let mut x = vec![BigRational::zero(); bs.m() + 1];
        x[0..=n].fill(BigRational::one());
        CardinalState { basis: (0..=n).collect(), x, inv: linalg::identity(n + 1) }
    }

    /// Basic columns, ascending.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    /// The basic solution over all columns 0..=m.
    pub fn x(&self) -> &[BigRational] {
        &self.x
    }
}

fn basis_matrix(bs: &BlockSystem, basis: &[usize]) -> Vec<Vec<BigRational>> {
    (0..=bs.n())
        .map(|i| basis.iter().map(|&j| linalg::rat(bs.a(i, j))).collect())
        .collect()
}

fn entering_column(bs: &BlockSystem, j_t: usize) -> Vec<BigRational> {
    (0..=bs.n()).map(|i| linalg::rat(bs.a(i, j_t))).collect()
}

/// Representation `y = A_B^{-1} A_{j_t}` of the entering column, aligned with
/// `state.basis()` positions.
pub fn representation(bs: &BlockSystem, state: &CardinalState, j_t: usize) -> Vec<BigRational> {
    linalg::mat_vec(&state.inv, &entering_column(bs, j_t))
}

/// Basic columns that could leave when `j_t` enters (positive representation
/// coefficient), ascending.
pub fn leaving_candidates(bs: &BlockSystem, state: &CardinalState, j_t: usize) -> Vec<usize> {
    representation(bs, state, j_t)
        .iter()
        .enumerate()
        .filter(|(_, y)| y.is_positive())
        .map(|(k, _)| state.basis[k])
        .collect()
}

/// Pivot `j_t` into the cardinal basis; returns the new state and the column
/// that left. The leaving column is the unique lexicographic minimizer, and
/// the new basic solution is asserted feasible.
pub fn cardinal_pivot(
    bs: &BlockSystem,
    state: &CardinalState,
    j_t: usize,
    rule: PivotRule,
) -> Result<(CardinalState, usize), ScarfError> {
    let PivotRule::Lexicographic = rule;
    debug_assert!(!state.basis.contains(&j_t), "entering column is already basic");
    let y = representation(bs, state, j_t);
    // Lexicographic ratio test: minimize (x_r, row_r of the inverse) / y_r.
    let mut best: Option<(Vec<BigRational>, usize)> = None;
    for (k, yk) in y.iter().enumerate() {
        if !yk.is_positive() {
            continue;
        }
        let mut key = Vec::with_capacity(state.inv[k].len() + 1);
        key.push(&state.x[state.basis[k]] / yk);
        key.extend(state.inv[k].iter().map(|v| v / yk));
        match &best {
            Some((cur, _)) if *cur <= key => {
                assert_ne!(*cur, key, "lexicographic ratio test must be tie-free");
            }
            _ => best = Some((key, k)),
        }
    }
    let Some((_, k_out)) = best else {
        return Err(ScarfError::Unbounded { column: j_t });
    };
    let leaving = state.basis[k_out];
    let mut basis = state.basis.clone();
    basis[k_out] = j_t;
    basis.sort_unstable();
    let inv = linalg::inverse(&basis_matrix(bs, &basis))
        .expect("replacing along a nonzero coefficient keeps the basis invertible");
    let ones = vec![BigRational::one(); bs.n() + 1];
    let xb = linalg::mat_vec(&inv, &ones);
    let mut x = vec![BigRational::zero(); bs.m() + 1];
    for (k, &j) in basis.iter().enumerate() {
        assert!(!xb[k].is_negative(), "lexicographic pivoting preserves feasibility");
        x[j] = xb[k].clone();
    }
    Ok((CardinalState { basis, x, inv }, leaving))
}

/// Whether `cols` is a feasible cardinal basis: square, invertible, and with
/// a nonnegative basic solution of `A x = 1`.
pub fn is_feasible_cardinal_basis(bs: &BlockSystem, cols: &[usize]) -> bool {
    if cols.len() != bs.n() + 1 {
        return false;
    }
    let Some(inv) = linalg::inverse(&basis_matrix(bs, cols)) else {
        return false;
    };
    let ones = vec![BigRational::one(); bs.n() + 1];
    linalg::mat_vec(&inv, &ones).iter().all(|v| !v.is_negative())
}

// ---------------------------------------------------------------------------
// Ordinal side

/// An ordinal basis with its row utilities and disliked columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalState {
    /// Ordinal basis columns, ascending.
    cols: Vec<usize>,
    /// u[i] = min_{j ∈ O} c(i, j).
    u: Vec<i64>,
    /// dislike[i] = the column of O attaining u[i]; rows ↔ columns bijectively.
    dislike: Vec<usize>,
}

impl OrdinalState {
    /// The initial ordinal basis `{1, …, n+1}` (requires `m > n`).
    pub fn initial(bs: &BlockSystem) -> OrdinalState {
        OrdinalState::for_cols(bs, (1..=bs.n() + 1).collect())
    }

    /// Compute utilities and disliked columns for a given column set.
    pub fn for_cols(bs: &BlockSystem, cols: Vec<usize>) -> OrdinalState {
        let (u, dislike) = utilities(bs, &cols);
        OrdinalState { cols, u, dislike }
    }

    /// Ordinal basis columns, ascending.
    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    /// Row utilities: `u[i] = min_{j ∈ O} c(i, j)`.
    pub fn u(&self) -> &[i64] {
        &self.u
    }

    /// The column of `O` that row `i` dislikes (the row minimum).
    pub fn disliked_col(&self, i: usize) -> usize {
        self.dislike[i]
    }
}

fn utilities(bs: &BlockSystem, cols: &[usize]) -> (Vec<i64>, Vec<usize>) {
    let mut u = Vec::with_capacity(bs.n() + 1);
    let mut dislike = Vec::with_capacity(bs.n() + 1);
    for i in 0..=bs.n() {
        let j = *cols
            .iter()
            .min_by_key(|&&j| bs.c(i, j))
            .expect("ordinal bases are nonempty");
        u.push(bs.c(i, j));
        dislike.push(j);
    }
    (u, dislike)
}

/// Whether every column is "blocked" by `cols`: some row `i` has
/// `c(i, k) ≤ min_{j ∈ cols} c(i, j)` for each column `k`.
pub fn is_ordinal_basis(bs: &BlockSystem, cols: &[usize]) -> bool {
    if cols.len() != bs.n() + 1 {
        return false;
    }
    let (u, _) = utilities(bs, cols);
    (0..=bs.m()).all(|k| (0..=bs.n()).any(|i| bs.c(i, k) <= u[i]))
}

/// Result of one ordinal replacement step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalPivot {
    pub state: OrdinalState,
    /// The column that entered (0 when the run is complete).
    pub j_star: usize,
    /// The removed column's disliker now dislikes this reference column.
    pub j_r: usize,
    /// The row that disliked the reference column; its utility drops.
    pub i_r: usize,
}

/// Remove `j_l` from the ordinal basis and add the unique column that keeps
/// it an ordinal basis. Asserts the utility dynamics: the disliker of `j_l`
/// strictly improves, the reference row strictly drops, and every other row
/// keeps its utility and disliked column.
pub fn ordinal_pivot(bs: &BlockSystem, state: &OrdinalState, j_l: usize) -> OrdinalPivot {
    let n = bs.n();
    // The row that dislikes the departing column.
    let i_l = (0..=n)
        .find(|&i| state.dislike[i] == j_l)
        .expect("every ordinal-basis column is disliked by exactly one row");
    let remaining: Vec<usize> = state.cols.iter().copied().filter(|&j| j != j_l).collect();
    // Reference column: the departing disliker's new minimum.
    let j_r = *remaining
        .iter()
        .min_by_key(|&&j| bs.c(i_l, j))
        .expect("ordinal bases have more than one column");
    let i_r = (0..=n)
        .find(|&i| state.dislike[i] == j_r)
        .expect("the reference column is disliked by exactly one row");
    debug_assert_ne!(i_l, i_r, "distinct columns have distinct dislikers");
    // Utilities with j_l removed: only the disliker's minimum moves.
    let mut u_minus = state.u.clone();
    u_minus[i_l] = bs.c(i_l, j_r);
    // Candidate columns: outside the reduced basis and above every row's
    // reduced utility except the reference row's.
    let mut in_remaining = vec![false; bs.m() + 1];
    for &j in &remaining {
        in_remaining[j] = true;
    }
    let candidates: Vec<usize> = (0..=bs.m())
        .filter(|&k| !in_remaining[k])
        .filter(|&k| (0..=n).all(|i| i == i_r || bs.c(i, k) > u_minus[i]))
        .collect();
    let j_star = *candidates
        .iter()
        .max_by_key(|&&k| bs.c(i_r, k))
        .expect("the replacement column always exists");
    let mut cols = remaining;
    cols.push(j_star);
    cols.sort_unstable();
    let new_state = OrdinalState::for_cols(bs, cols);
    // Utility dynamics, asserted on every pivot.
    assert_eq!(new_state.dislike[i_l], j_r, "the disliker of j_l moves to the reference column");
    assert_eq!(new_state.dislike[i_r], j_star, "the reference row moves to the entering column");
    assert!(new_state.u[i_l] > state.u[i_l], "the disliker of j_l strictly improves");
    assert!(new_state.u[i_r] < state.u[i_r], "the reference row strictly drops");
    for i in 0..=n {
        if i != i_l && i != i_r {
            assert_eq!(new_state.u[i], state.u[i], "row {} must keep its utility", i);
            assert_eq!(new_state.dislike[i], state.dislike[i]);
        }
    }
    OrdinalPivot { state: new_state, j_star, j_r, i_r }
}

// ---------------------------------------------------------------------------
// The alternating loop

/// One iteration of the alternating loop, as recorded in the trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScarfIteration {
    /// Column that entered the cardinal basis (`j_t`).
    pub entering: usize,
    /// Column that left both bases (`j_l`).
    pub leaving: usize,
    /// Reference column of the ordinal step (`j_r`).
    pub reference_col: usize,
    /// Reference row of the ordinal step (`i_r`).
    pub reference_row: usize,
    /// Column that entered the ordinal basis (`j*`; 0 on the final iteration).
    pub entering_ordinal: usize,
    /// Row utilities after the ordinal step.
    pub utilities: Vec<i64>,
}

/// Iteration-by-iteration record of a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScarfTrace {
    pub iterations: Vec<ScarfIteration>,
}

impl ScarfTrace {
    /// Two lines per iteration: `C <j_t> -> <j_l>` for the cardinal pivot and
    /// `O <j_l> -> <j*> (ref <j_r>, row <i_r>)` for the ordinal one.
    pub fn render_lines(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(2 * self.iterations.len());
        for it in &self.iterations {
            out.push(format!("C {} -> {}", it.entering, it.leaving));
            out.push(format!(
                "O {} -> {} (ref {}, row {})",
                it.leaving, it.entering_ordinal, it.reference_col, it.reference_row
            ));
        }
        out
    }
}

/// A dominating basis and its extreme point.
#[derive(Debug, Clone)]
pub struct ScarfOutcome {
    /// The dominating basis (both cardinal and ordinal), ascending; always
    /// contains column 0.
    pub basis: Vec<usize>,
    /// The basic solution over columns 0..=m (`x[0] = 1` is artificial; the
    /// restriction to columns 1..=m is a fractional stable matching).
    pub x: Vec<BigRational>,
    pub trace: ScarfTrace,
}

/// Run the engine with the default iteration cap `2^min(m, 24)`.
pub fn run_scarf(bs: &BlockSystem, rule: PivotRule) -> Result<ScarfOutcome, ScarfError> {
    run_scarf_capped(bs, rule, 1u64 << bs.m().min(24))
}

/// Run the engine, failing with [`ScarfError::IterationLimitExceeded`] after
/// `cap` iterations.
pub fn run_scarf_capped(
    bs: &BlockSystem,
    rule: PivotRule,
    cap: u64,
) -> Result<ScarfOutcome, ScarfError> {
    let n = bs.n();
    // All-singleton systems: {0, …, n} is already dominating (every column
    // is basic), so the all-ones solution is the answer.
    if bs.m() == n {
        let state = CardinalState::initial(bs);
        return Ok(ScarfOutcome {
            basis: state.basis.clone(),
            x: state.x.clone(),
            trace: ScarfTrace::default(),
        });
    }
    let mut cardinal = CardinalState::initial(bs);
    let mut ordinal = OrdinalState::initial(bs);
    let mut trace = ScarfTrace::default();
    loop {
        if trace.iterations.len() as u64 >= cap {
            return Err(ScarfError::IterationLimitExceeded { limit: cap });
        }
        // The two bases differ in exactly one column each way: column 0 is
        // cardinal-only and the entering column is ordinal-only.
        let entering: Vec<usize> =
            ordinal.cols.iter().copied().filter(|j| !cardinal.basis.contains(j)).collect();
        debug_assert_eq!(entering.len(), 1, "O ∖ B must be a single column");
        debug_assert!(!ordinal.cols.contains(&0), "column 0 enters O only at termination");
        let j_t = entering[0];
        let (next_cardinal, j_l) = cardinal_pivot(bs, &cardinal, j_t, rule)?;
        assert_ne!(j_l, 0, "the artificial column never leaves the cardinal basis");
        debug_assert!(ordinal.cols.contains(&j_l), "the leaving column is in both bases");
        let step = ordinal_pivot(bs, &ordinal, j_l);
        trace.iterations.push(ScarfIteration {
            entering: j_t,
            leaving: j_l,
            reference_col: step.j_r,
            reference_row: step.i_r,
            entering_ordinal: step.j_star,
            utilities: step.state.u.clone(),
        });
        cardinal = next_cardinal;
        ordinal = step.state;
        if step.j_star == 0 {
            break;
        }
    }
    assert_eq!(cardinal.basis, ordinal.cols, "termination means the bases coincide");
    debug_assert!(is_feasible_cardinal_basis(bs, &cardinal.basis));
    debug_assert!(is_ordinal_basis(bs, &ordinal.cols));
    Ok(ScarfOutcome { basis: cardinal.basis.clone(), x: cardinal.x.clone(), trace })
}
