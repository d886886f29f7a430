//! The polynomial-time engine for arborescence instances.
//!
//! The generic engine pivots with rational arithmetic and may take
//! exponentially many steps. On arborescence instances a special leaving rule
//! — take the earliest forward arc of the pivot path, preferring one that
//! carries no selection — keeps every basis "nice": all paths from the root
//! are augmenting, the singleton columns from the current separator upward
//! stay basic, and the basic arcs split the vertices exactly like the
//! principal tree. Niceness forces the ordinal side into lockstep: the
//! entering column is always the rightmost ordinal column, the leaving column
//! is always the separator's singleton, and the replacement column is found
//! by a left-to-right scan whose cursor never retreats. The run therefore
//! finishes within `n` iterations and touches each column at most once during
//! all ordinal scans, with no rational arithmetic anywhere.

use thiserror::Error;

use crate::blocks::{build_block_system, BlockSystem};
use crate::instance::{depth_first_relabel, ArbInstance};
use crate::linalg;
use crate::network::{self, BasisTree, MarkedPath};
use crate::scarf_core::{self, ScarfIteration, ScarfTrace};
use crate::verify::{self, Matching};

/// Errors from the arborescence engine.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FflError {
    #[error("instance rejected: {0}")]
    InvalidInstance(String),
    #[error("pivot path has no forward arc; the instance data is corrupt")]
    NoForwardArc,
    #[error("rightmost ordinal column is a singleton; the pair is corrupt")]
    RightmostIsSingleton,
    #[error("principal tree is not an arborescence: {0}")]
    NotArborescence(String),
    #[error("solver invariant violated: {0}")]
    InvariantViolation(String),
}

/// How much per-iteration checking a run performs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum VerifyLevel {
    /// Verify when `n ≤ 200`, otherwise run fast.
    #[default]
    Auto,
    On,
    Off,
}

/// Run options.
#[derive(Debug, Clone, Copy, Default)]
pub struct FflOptions {
    pub verify: VerifyLevel,
    /// Also run the generic engine on the same instance and check its output
    /// (skipped when `n > 32`).
    pub cross_check_generic: bool,
}

/// Live state of a run: cardinal basis with its 0/1 solution and basis tree,
/// ordinal basis with incrementally maintained utilities, and the separator.
#[derive(Debug, Clone)]
pub struct FflState {
    /// Basis membership bits over columns `0..=m`.
    in_basis: Vec<bool>,
    /// Basic columns, ascending (always contains column 0).
    b_cols: Vec<usize>,
    /// The 0/1 extreme point over columns `0..=m` (`x[0]` is always set).
    x: Vec<bool>,
    tree: BasisTree,
    /// Ordinal basis columns, ascending.
    o_cols: Vec<usize>,
    /// u[i] = min over the ordinal columns of c(i, ·).
    u: Vec<i64>,
    /// The column attaining u[i]; rows ↔ ordinal columns bijectively.
    u_col: Vec<usize>,
    /// Block index of the rightmost ordinal column.
    separator: usize,
    /// Next column the ordinal scan will examine; never moves left.
    cursor: usize,
    /// Total columns examined by ordinal scans so far.
    scanned: usize,
}

impl FflState {
    /// The all-singleton start: basis `{0,…,n}`, ordinal basis `{1,…,n+1}`.
    pub fn initial(inst: &ArbInstance, bs: &BlockSystem) -> Result<FflState, FflError> {
        let (n, m) = (bs.n(), bs.m());
        debug_assert!(m > n, "trivial instances are handled before state setup");
        let mut in_basis = vec![false; m + 1];
        let mut x = vec![false; m + 1];
        for j in 0..=n {
            in_basis[j] = true;
            x[j] = true;
        }
        let b_cols: Vec<usize> = (0..=n).collect();
        let tree = network::basis_tree(inst, bs, &b_cols)
            .map_err(|e| FflError::InvariantViolation(e.to_string()))?;
        let o_cols: Vec<usize> = (1..=n + 1).collect();
        let separator = separator_of(&o_cols, bs)?;
        // Row 0 dislikes the rightmost column; every other row its singleton.
        let mut u = vec![0i64; n + 1];
        let mut u_col: Vec<usize> = (0..=n).collect();
        u[0] = bs.c(0, n + 1);
        u_col[0] = n + 1;
        Ok(FflState {
            in_basis,
            b_cols,
            x,
            tree,
            o_cols,
            u,
            u_col,
            separator,
            cursor: n + 2,
            scanned: 0,
        })
    }

    /// Basic columns, ascending.
    pub fn basis_cols(&self) -> &[usize] {
        &self.b_cols
    }

    /// The current 0/1 solution over columns `0..=m`.
    pub fn x(&self) -> &[bool] {
        &self.x
    }

    /// Ordinal basis columns, ascending.
    pub fn o_cols(&self) -> &[usize] {
        &self.o_cols
    }

    /// Row utilities over the current ordinal basis.
    pub fn u(&self) -> &[i64] {
        &self.u
    }

    /// The ordinal column row `i` likes least.
    pub fn disliked_col(&self, i: usize) -> usize {
        self.u_col[i]
    }

    /// Block index of the rightmost ordinal column.
    pub fn separator(&self) -> usize {
        self.separator
    }

    /// The spanning tree of the current basis.
    pub fn basis_tree(&self) -> &BasisTree {
        &self.tree
    }

    /// Total columns examined by ordinal scans so far.
    pub fn scanned_columns(&self) -> usize {
        self.scanned
    }
}

/// The leaving rule on a precomputed pivot path: the earliest forward arc
/// carrying no selection, or the earliest forward arc.
pub fn ffl_leaving_on_path(path: &MarkedPath, x: &[bool]) -> Result<usize, FflError> {
    if let Some(arc) = path.arcs.iter().find(|a| a.forward && !x[a.col]) {
        return Ok(arc.col);
    }
    path.arcs
        .iter()
        .find(|a| a.forward)
        .map(|a| a.col)
        .ok_or(FflError::NoForwardArc)
}

/// The leaving column when `j_t` enters the current basis.
pub fn ffl_leaving(
    inst: &ArbInstance,
    bs: &BlockSystem,
    state: &FflState,
    j_t: usize,
) -> Result<usize, FflError> {
    let (v, vp) = inst.edge_arc(bs.edge_of_col(j_t));
    ffl_leaving_on_path(&state.tree.path(v, vp), &state.x)
}

/// The block containing the rightmost column of an ordinal basis.
pub fn separator_of(o_cols: &[usize], bs: &BlockSystem) -> Result<usize, FflError> {
    let rightmost = *o_cols
        .iter()
        .max()
        .ok_or_else(|| FflError::InvariantViolation("empty ordinal basis".into()))?;
    bs.block_of_col(rightmost).ok_or(FflError::RightmostIsSingleton)
}

/// Result of one separator-driven ordinal step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparatorStep {
    /// `j_star` replaced the separator's singleton; the separator advanced.
    Next { j_star: usize },
    /// No replacement exists: the bases coincide and the run is complete.
    Done,
}

/// Remove the separator's singleton column from the ordinal basis and scan
/// left-to-right for its replacement. Only the separator row's utility can
/// rise and only row 0's can drop, so a column that fails the scan once
/// fails forever and the cursor never moves left.
pub fn ordinal_pivot_separator(
    bs: &BlockSystem,
    st: &mut FflState,
) -> Result<SeparatorStep, FflError> {
    let i = st.separator;
    let j_l = i; // the separator's singleton column
    let j_r = *st.o_cols.last().expect("ordinal basis is nonempty");
    if st.u_col[0] != j_r {
        return Err(FflError::InvariantViolation(format!(
            "row 0 must dislike the rightmost column {}, not {}",
            j_r, st.u_col[0]
        )));
    }
    if st.u_col[i] != j_l {
        return Err(FflError::InvariantViolation(format!(
            "separator row {} must dislike its own singleton, not column {}",
            i, st.u_col[i]
        )));
    }
    // With j_l gone, the separator row's minimum moves to the rightmost
    // column and strictly rises; all other rows keep their minima.
    let raised = bs.c(i, j_r);
    if raised <= st.u[i] {
        return Err(FflError::InvariantViolation(format!(
            "separator row {} utility must strictly rise ({} -> {})",
            i, st.u[i], raised
        )));
    }
    st.u[i] = raised;
    st.u_col[i] = j_r;
    let pos = st.o_cols.binary_search(&j_l).map_err(|_| {
        FflError::InvariantViolation(format!("separator singleton {} is not ordinal", j_l))
    })?;
    st.o_cols.remove(pos);
    // Scan for the first column every member ranks above its current
    // threshold. Non-members hold filler values that exceed every incident
    // threshold, so only members need checking.
    let mut j_star = 0;
    while st.cursor <= bs.m() {
        let k = st.cursor;
        st.cursor += 1;
        st.scanned += 1;
        debug_assert!(
            st.o_cols.binary_search(&k).is_err(),
            "the cursor stays right of the ordinal basis"
        );
        let edge = bs.system().edge(bs.edge_of_col(k));
        if edge.iter().all(|&w| bs.c(w, k) > st.u[w]) {
            j_star = k;
            break;
        }
    }
    if j_star == 0 {
        // The artificial column completes the ordinal basis: it wins row 0
        // outright and is worst for every other row, so only row 0 moves.
        st.o_cols.insert(0, 0);
        st.u[0] = bs.c(0, 0);
        st.u_col[0] = 0;
        return Ok(SeparatorStep::Done);
    }
    debug_assert!(j_star > j_r, "replacements appear strictly right of the old rightmost");
    st.o_cols.push(j_star);
    // Row 0 now dislikes the new rightmost column; its utility drops.
    debug_assert!(bs.c(0, j_star) < st.u[0]);
    st.u[0] = bs.c(0, j_star);
    st.u_col[0] = j_star;
    let next = bs.block_of_col(j_star).ok_or(FflError::RightmostIsSingleton)?;
    if next <= i {
        return Err(FflError::InvariantViolation(format!(
            "separator must strictly increase ({} -> {})",
            i, next
        )));
    }
    st.separator = next;
    Ok(SeparatorStep::Next { j_star })
}

/// Verdict of the three niceness conditions for a basis and separator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceReport {
    pub violations: Vec<String>,
}

impl NiceReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the three conditions that make a basis nice for separator `i`:
/// (i) every path from the root in the basis tree is augmenting for `x`,
/// (ii) the singleton columns `i..=n` are basic, and (iii) removing each of
/// their arcs from the basis tree splits the vertices exactly as removing
/// the same arc from the principal tree.
pub fn check_nice_basis(
    inst: &ArbInstance,
    bs: &BlockSystem,
    cols: &[usize],
    x: &[bool],
    i: usize,
) -> NiceReport {
    let mut violations = Vec::new();
    let tree = match network::basis_tree(inst, bs, cols) {
        Ok(t) => t,
        Err(e) => return NiceReport { violations: vec![format!("not a basis: {}", e)] },
    };
    let vc = inst.tree().vertex_count();
    let root = inst.tree().root();
    // (i) augmenting paths from the root to every vertex.
    for v in 1..=vc {
        if v != root && !network::is_augmenting(&tree.path(root, v), x) {
            violations.push(format!("path from the root to vertex {} is not augmenting", v));
        }
    }
    // (ii) singleton columns i..=n stay basic.
    for k in i..=bs.n() {
        if !cols.contains(&k) {
            violations.push(format!("singleton column {} is not basic", k));
        }
    }
    // (iii) identical bipartitions for each singleton arc i..=n.
    let below_basis = vertices_below(&tree, vc);
    let below_principal = principal_below(inst);
    for k in i..=bs.n() {
        if !cols.contains(&k) {
            continue; // already flagged under (ii)
        }
        if below_basis[k] != below_principal[k] {
            violations.push(format!(
                "arc of node {} splits the basis tree differently from the principal tree",
                k
            ));
        }
    }
    NiceReport { violations }
}

/// For each singleton column k basic in `tree`: the vertex set on the child
/// side of its arc (indexed by column; empty for non-basic singletons).
fn vertices_below(tree: &BasisTree, vc: usize) -> Vec<Vec<bool>> {
    let n = vc - 1;
    let mut below = vec![vec![false; vc + 1]; n + 1];
    for v in 1..=vc {
        // Walk v's parent chain; v lies below every singleton arc on it.
        let mut w = v;
        while let Some(col) = tree.parent_col(w) {
            if col <= n {
                below[col][v] = true;
            }
            w = tree.parent(w).expect("non-root vertices have parents");
        }
    }
    below
}

/// For each node k: the vertex set strictly below its principal arc.
fn principal_below(inst: &ArbInstance) -> Vec<Vec<bool>> {
    let tree = inst.tree();
    let vc = tree.vertex_count();
    let n = vc - 1;
    let mut below = vec![vec![false; vc + 1]; n + 1];
    for v in 1..=vc {
        let mut w = Some(v);
        while let Some(cur) = w {
            if let Some(node) = node_of_vertex(inst, cur) {
                below[node][v] = true;
            }
            w = tree.parent(cur);
        }
    }
    below
}

/// The node whose arc enters vertex `v`, if any.
fn node_of_vertex(inst: &ArbInstance, v: usize) -> Option<usize> {
    let arc = inst.tree().parent_arc(v)?;
    Some(inst.node_of_arc(arc))
}

/// Outcome of a run: the stable matching, the structured pivot trace with
/// one entry per iteration, and the per-run separator sequence.
#[derive(Debug, Clone)]
pub struct FflOutcome {
    pub matching: Matching,
    /// One entry per iteration; utilities are recorded in verify mode only.
    pub trace: ScarfTrace,
    /// The separator at each iteration, strictly increasing.
    pub separators: Vec<usize>,
    /// Total columns examined by ordinal scans (at most m across the run).
    pub scanned_columns: usize,
    /// Whether the per-iteration oracle checks ran.
    pub verified: bool,
}

impl FflOutcome {
    pub fn iterations(&self) -> usize {
        self.trace.iterations.len()
    }

    /// One line per iteration: `it=<k> sep=<i> jt=<col> jl=<col> j*=<col> nice=<ok|unchecked>`.
    pub fn trace_lines(&self) -> Vec<String> {
        let nice = if self.verified { "ok" } else { "unchecked" };
        self.trace
            .iterations
            .iter()
            .zip(&self.separators)
            .enumerate()
            .map(|(k, (it, sep))| {
                format!(
                    "it={} sep={} jt={} jl={} j*={} nice={}",
                    k + 1,
                    sep,
                    it.entering,
                    it.leaving,
                    it.entering_ordinal,
                    nice
                )
            })
            .collect()
    }
}

/// Solve an arborescence instance with default options.
pub fn run_ffl(inst: &ArbInstance) -> Result<FflOutcome, FflError> {
    run_ffl_with(inst, FflOptions::default())
}

/// Solve an arborescence instance. The instance is relabeled to depth-first
/// order internally; hyperedge ids are unchanged by relabeling, so the
/// matching needs no translation, but trace columns refer to the relabeled
/// block layout.
pub fn run_ffl_with(inst: &ArbInstance, opts: FflOptions) -> Result<FflOutcome, FflError> {
    let (inst, _labels) = depth_first_relabel(inst);
    let bs = build_block_system(inst.system())
        .map_err(|e| FflError::InvalidInstance(e.to_string()))?;
    let (n, m) = (bs.n(), bs.m());
    let verified = match opts.verify {
        VerifyLevel::On => true,
        VerifyLevel::Off => false,
        VerifyLevel::Auto => n <= 200,
    };
    if m == n {
        // Singletons only: everyone alone is the unique stable matching.
        let singles: Vec<usize> = (1..=n)
            .map(|i| inst.system().singleton_of(i).expect("validated system"))
            .collect();
        return Ok(FflOutcome {
            matching: Matching::from_edges(m, &singles),
            trace: ScarfTrace::default(),
            separators: Vec::new(),
            scanned_columns: 0,
            verified,
        });
    }
    let mut st = FflState::initial(&inst, &bs)?;
    let mut iterations: Vec<ScarfIteration> = Vec::new();
    let mut separators: Vec<usize> = Vec::new();
    loop {
        if iterations.len() >= n {
            return Err(FflError::InvariantViolation(format!(
                "run exceeded the {}-iteration bound",
                n
            )));
        }
        let sep = st.separator;
        let j_t = *st.o_cols.last().expect("ordinal basis is nonempty");
        debug_assert!(
            st.o_cols.iter().all(|&j| st.in_basis[j] || j == j_t),
            "the bases differ exactly in the entering column"
        );
        if verified {
            let nice = check_nice_basis(&inst, &bs, &st.b_cols, &st.x, sep);
            if !nice.ok() {
                return Err(FflError::InvariantViolation(format!(
                    "basis is not {}-nice: {}",
                    sep,
                    nice.violations.join("; ")
                )));
            }
        }
        // The entering arc shares its tail with the separator's arc, which is
        // the first arc of the pivot path and carries selection.
        let (v, vp) = inst.edge_arc(bs.edge_of_col(j_t));
        let f_sep = inst.node_arc(sep);
        if v != f_sep.0 {
            return Err(FflError::InvariantViolation(format!(
                "entering arc ({}, {}) does not share its tail with the separator arc ({}, {})",
                v, vp, f_sep.0, f_sep.1
            )));
        }
        let path = st.tree.path(v, vp);
        let first = path.arcs.first().ok_or(FflError::NoForwardArc)?;
        if first.col != sep || !first.forward {
            return Err(FflError::InvariantViolation(format!(
                "the pivot path must start with the separator's arc, found column {}",
                first.col
            )));
        }
        let j_l = ffl_leaving_on_path(&path, &st.x)?;
        if j_l != sep {
            return Err(FflError::InvariantViolation(format!(
                "leaving column {} is not the separator's singleton {}",
                j_l, sep
            )));
        }
        if st.x[j_t] || !st.x[j_l] || !network::is_augmenting(&path, &st.x) {
            return Err(FflError::InvariantViolation(format!(
                "pivot on column {} is not an augmenting step",
                j_t
            )));
        }
        let before = verified.then(|| (st.b_cols.clone(), st.x.clone()));
        // Cardinal step: toggle the path, select the entering column, and
        // swap the basis columns.
        for arc in &path.arcs {
            st.x[arc.col] = !arc.forward;
        }
        st.x[j_t] = true;
        let pos = st.b_cols.binary_search(&j_l).expect("leaving column is basic");
        st.b_cols.remove(pos);
        debug_assert!(st.b_cols.last().is_none_or(|&c| c < j_t));
        st.b_cols.push(j_t);
        st.in_basis[j_l] = false;
        st.in_basis[j_t] = true;
        st.tree = network::basis_tree(&inst, &bs, &st.b_cols)
            .map_err(|e| FflError::InvariantViolation(e.to_string()))?;
        if let Some((b_before, x_before)) = &before {
            verify_cardinal(&inst, &bs, b_before, x_before, &st, j_t)?;
        }
        // Ordinal step.
        let o_before = verified.then(|| st.o_cols.clone());
        let step = ordinal_pivot_separator(&bs, &mut st)?;
        let j_star = match step {
            SeparatorStep::Next { j_star } => j_star,
            SeparatorStep::Done => 0,
        };
        iterations.push(ScarfIteration {
            entering: j_t,
            leaving: j_l,
            reference_col: j_t,
            reference_row: 0,
            entering_ordinal: j_star,
            utilities: if verified { st.u.clone() } else { Vec::new() },
        });
        separators.push(sep);
        if let Some(o_before) = o_before {
            verify_ordinal(&bs, &o_before, j_l, j_t, j_star, &st)?;
        }
        if j_star == 0 {
            break;
        }
    }
    // The bases coincide now that the artificial column closed the ordinal one.
    if st.o_cols != st.b_cols {
        return Err(FflError::InvariantViolation(
            "terminal bases do not coincide".into(),
        ));
    }
    let mut matching = Matching::empty(m);
    for j in 1..=m {
        if st.x[j] {
            matching.set(bs.edge_of_col(j), true);
        }
    }
    assert_integral_stable(&inst, &matching)?;
    if verified && !verify::is_dominating_basis(&bs, &st.b_cols) {
        return Err(FflError::InvariantViolation(
            "terminal basis is not dominating".into(),
        ));
    }
    if opts.cross_check_generic && n <= 32 {
        cross_check_generic(&inst, &bs)?;
    }
    Ok(FflOutcome {
        matching,
        trace: ScarfTrace { iterations },
        separators,
        scanned_columns: st.scanned,
        verified,
    })
}

/// Verify-mode cardinal checks: the four degeneracy conditions must agree
/// and hold, and (on small instances) the combinatorial representation must
/// equal the rational solve.
fn verify_cardinal(
    inst: &ArbInstance,
    bs: &BlockSystem,
    b_before: &[usize],
    x_before: &[bool],
    st: &FflState,
    j_t: usize,
) -> Result<(), FflError> {
    let class = network::classify_pivot(inst, bs, b_before, x_before, &st.x, j_t)
        .map_err(|e| FflError::InvariantViolation(e.to_string()))?;
    if !class.consistent() || !class.non_degenerate {
        return Err(FflError::InvariantViolation(format!(
            "pivot on column {} classifies as {:?}",
            j_t, class.conditions
        )));
    }
    if bs.n() <= 32 {
        let fast = network::representation_vector(inst, bs, b_before, j_t)
            .map_err(|e| FflError::InvariantViolation(e.to_string()))?;
        let a: Vec<Vec<_>> = (0..=bs.n())
            .map(|i| b_before.iter().map(|&j| linalg::rat(bs.a(i, j))).collect())
            .collect();
        let rhs: Vec<_> = (0..=bs.n()).map(|i| linalg::rat(bs.a(i, j_t))).collect();
        let exact = linalg::solve(&a, &rhs)
            .ok_or_else(|| FflError::InvariantViolation("basis matrix is singular".into()))?;
        let fast_rat: Vec<_> = fast.iter().map(|&v| linalg::rat(v)).collect();
        if fast_rat != exact {
            return Err(FflError::InvariantViolation(format!(
                "representation of column {} disagrees with the rational solve",
                j_t
            )));
        }
    }
    Ok(())
}

/// Verify-mode ordinal check: the generic replacement step on the same pair
/// must pick the same reference column, reference row, and replacement, and
/// recomputing the utilities from scratch must match the incremental ones.
fn verify_ordinal(
    bs: &BlockSystem,
    o_before: &[usize],
    j_l: usize,
    j_t: usize,
    j_star: usize,
    st: &FflState,
) -> Result<(), FflError> {
    let oracle_state = scarf_core::OrdinalState::for_cols(bs, o_before.to_vec());
    let oracle = scarf_core::ordinal_pivot(bs, &oracle_state, j_l);
    if oracle.j_star != j_star || oracle.j_r != j_t || oracle.i_r != 0 {
        return Err(FflError::InvariantViolation(format!(
            "separator pivot (j*={}, ref {}, row 0) disagrees with the generic step \
             (j*={}, ref {}, row {})",
            j_star, j_t, oracle.j_star, oracle.j_r, oracle.i_r
        )));
    }
    let fresh = scarf_core::OrdinalState::for_cols(bs, st.o_cols.to_vec());
    if fresh.u() != st.u {
        return Err(FflError::InvariantViolation(
            "incremental utilities disagree with a fresh recomputation".into(),
        ));
    }
    for i in 0..=bs.n() {
        if fresh.disliked_col(i) != st.u_col[i] {
            return Err(FflError::InvariantViolation(format!(
                "row {} dislike disagrees with a fresh recomputation",
                i
            )));
        }
    }
    Ok(())
}

/// Integer-only stability check for a saturating 0/1 output: every vertex is
/// covered exactly once and every hyperedge has a member whose chosen edge
/// is weakly preferred to it.
fn assert_integral_stable(inst: &ArbInstance, matching: &Matching) -> Result<(), FflError> {
    let system = inst.system();
    let n = system.n();
    let mut chosen_rank = vec![usize::MAX; n + 1];
    for e in matching.edges() {
        for &w in system.edge(e) {
            if chosen_rank[w] != usize::MAX {
                return Err(FflError::InvariantViolation(format!(
                    "vertex {} is covered twice",
                    w
                )));
            }
            chosen_rank[w] = system.rank(w, e).expect("members rank their edges");
        }
    }
    if let Some(v) = (1..=n).find(|&v| chosen_rank[v] == usize::MAX) {
        return Err(FflError::InvariantViolation(format!("vertex {} is uncovered", v)));
    }
    for e in 1..=system.m() {
        let witnessed = system
            .edge(e)
            .iter()
            .any(|&w| chosen_rank[w] <= system.rank(w, e).expect("members rank their edges"));
        if !witnessed {
            return Err(FflError::InvariantViolation(format!(
                "output is blocked by hyperedge {}",
                e
            )));
        }
    }
    Ok(())
}

/// Run the generic engine on the same block system and check that it also
/// produces an integral stable matching.
fn cross_check_generic(inst: &ArbInstance, bs: &BlockSystem) -> Result<(), FflError> {
    let outcome = scarf_core::run_scarf(bs, scarf_core::PivotRule::default())
        .map_err(|e| FflError::InvariantViolation(format!("generic engine failed: {}", e)))?;
    let mut matching = Matching::empty(bs.m());
    for j in 1..=bs.m() {
        let w = &outcome.x[j];
        if w == &linalg::rat(1) {
            matching.set(bs.edge_of_col(j), true);
        } else if w != &linalg::rat(0) {
            return Err(FflError::InvariantViolation(format!(
                "generic engine produced a fractional weight {} on column {}",
                w, j
            )));
        }
    }
    assert_integral_stable(inst, &matching)
}
