//! Tree combinatorics that replace linear algebra on network matrices.
//!
//! Every hyperedge of an arborescence instance is encoded by a digraph arc
//! whose directed tree path spans the hyperedge, so the constraint matrix is
//! the network matrix of the principal tree. A column set (ignoring the
//! artificial column 0) is a cardinal basis exactly when its arcs form a
//! spanning tree `T_B` of the tree vertices, and the representation of an
//! entering column `a = (v, v′)` in such a basis reads off the `T_B`-path
//! from `v` to `v′`: `+1` on arcs traversed tail→head ("forward"), `-1` on
//! arcs traversed against their direction ("backward"), `0` off the path.
//! This module provides those paths, the resulting integer representation
//! vectors, and the degeneracy classification of cardinal pivots.

use thiserror::Error;

use crate::blocks::BlockSystem;
use crate::instance::ArbInstance;

/// Errors from basis-tree construction and pivot classification.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("columns do not form a basis: arcs of columns {cycle:?} close a cycle")]
    NotABasis { cycle: Vec<usize> },
    #[error("network invariant violated: {0}")]
    InvariantViolation(String),
}

// ---------------------------------------------------------------------------
// Plain spanning trees over arc lists

/// A rooted view of an undirected spanning tree given by directed arcs.
struct PlainTree {
    /// parent[v] = (parent vertex, arc index, arc tail, arc head).
    parent: Vec<Option<(usize, usize, usize, usize)>>,
    depth: Vec<usize>,
}

impl PlainTree {
    /// Root the spanning tree formed by `arcs` (as undirected edges) at
    /// `root`; `None` if they do not form a spanning tree.
    fn new(vertex_count: usize, arcs: &[(usize, usize)], root: usize) -> Option<PlainTree> {
        if arcs.len() + 1 != vertex_count {
            return None;
        }
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertex_count + 1];
        for (idx, &(t, h)) in arcs.iter().enumerate() {
            if t < 1 || t > vertex_count || h < 1 || h > vertex_count || t == h {
                return None;
            }
            adj[t].push((h, idx));
            adj[h].push((t, idx));
        }
        let mut parent = vec![None; vertex_count + 1];
        let mut depth = vec![usize::MAX; vertex_count + 1];
        depth[root] = 0;
        let mut stack = vec![root];
        let mut seen = 1;
        while let Some(v) = stack.pop() {
            for &(w, idx) in &adj[v] {
                if depth[w] == usize::MAX {
                    let (t, h) = arcs[idx];
                    parent[w] = Some((v, idx, t, h));
                    depth[w] = depth[v] + 1;
                    seen += 1;
                    stack.push(w);
                }
            }
        }
        // n arcs reaching all n+1 vertices from the root ⇒ tree.
        (seen == vertex_count).then_some(PlainTree { parent, depth })
    }

    /// Arc steps of the tree path from `from` to `to`: (arc index, forward).
    fn path(&self, from: usize, to: usize) -> Vec<(usize, bool)> {
        let mut up = Vec::new(); // steps climbing from `from`
        let mut down = Vec::new(); // steps climbing from `to`, to be reversed
        let (mut a, mut b) = (from, to);
        while a != b {
            if self.depth[a] >= self.depth[b] {
                let (p, idx, t, _) = self.parent[a].expect("deeper vertex has a parent");
                // Climbing a → p traverses the arc tail→head iff a is the tail.
                up.push((idx, t == a));
                a = p;
            } else {
                let (p, idx, t, _) = self.parent[b].expect("deeper vertex has a parent");
                // Walking p → b (path order) traverses tail→head iff p is the tail.
                down.push((idx, t == p));
                b = p;
            }
        }
        down.reverse();
        up.extend(down);
        up
    }
}

/// Check that the network matrices of two spanning trees over the same
/// vertex set are mutually inverse: writing each arc of `arcs2` in the basis
/// `arcs1` and vice versa, the product of the two ±1/0 matrices must be the
/// identity. Returns `false` when either arc list is not a spanning tree.
pub fn inverse_identity_check(
    vertex_count: usize,
    arcs1: &[(usize, usize)],
    arcs2: &[(usize, usize)],
) -> bool {
    let Some(t1) = PlainTree::new(vertex_count, arcs1, 1) else {
        return false;
    };
    let Some(t2) = PlainTree::new(vertex_count, arcs2, 1) else {
        return false;
    };
    let n = arcs1.len();
    let rep = |tree: &PlainTree, arcs: &[(usize, usize)]| -> Vec<Vec<i64>> {
        arcs.iter()
            .map(|&(tail, head)| {
                let mut row = vec![0i64; n];
                for (idx, forward) in tree.path(tail, head) {
                    row[idx] = if forward { 1 } else { -1 };
                }
                row
            })
            .collect()
    };
    // m1[j][k]: arc j of arcs2 written in basis arcs1; m2 the other way.
    let m1 = rep(&t1, arcs2);
    let m2 = rep(&t2, arcs1);
    for i in 0..n {
        for j in 0..n {
            let dot: i64 = (0..n).map(|k| m1[i][k] * m2[k][j]).sum();
            if dot != if i == j { 1 } else { 0 } {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Basis trees

/// The spanning tree of a cardinal basis, rooted at the principal root, with
/// each non-root vertex linked to its parent by the basis column whose arc
/// connects them.
#[derive(Debug, Clone)]
pub struct BasisTree {
    root: usize,
    /// parent[v] = (parent vertex, column, arc tail, arc head).
    parent: Vec<Option<(usize, usize, usize, usize)>>,
    depth: Vec<usize>,
}

/// Build the basis tree of `cols` (column 0, if present, is ignored); fails
/// with the closing cycle when the arcs are not independent.
pub fn basis_tree(
    inst: &ArbInstance,
    bs: &BlockSystem,
    cols: &[usize],
) -> Result<BasisTree, NetworkError> {
    let vc = inst.tree().vertex_count();
    let arcs: Vec<(usize, usize, usize)> = cols
        .iter()
        .filter(|&&j| j != 0)
        .map(|&j| {
            let (t, h) = inst.edge_arc(bs.edge_of_col(j));
            (j, t, h)
        })
        .collect();
    if arcs.len() != vc - 1 {
        return Err(NetworkError::InvariantViolation(format!(
            "a basis needs {} tree arcs, got {}",
            vc - 1,
            arcs.len()
        )));
    }
    // Union-find with cycle extraction on failure.
    let mut parent_uf: Vec<usize> = (0..=vc).collect();
    fn find(uf: &mut [usize], mut v: usize) -> usize {
        while uf[v] != v {
            uf[v] = uf[uf[v]];
            v = uf[v];
        }
        v
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vc + 1];
    for &(j, t, h) in &arcs {
        let (rt, rh) = (find(&mut parent_uf, t), find(&mut parent_uf, h));
        if rt == rh {
            // The partial forest already connects t and h: walk that path.
            let mut cycle = cycle_columns(&adj, t, h);
            cycle.push(j);
            cycle.sort_unstable();
            return Err(NetworkError::NotABasis { cycle });
        }
        parent_uf[rt] = rh;
        adj[t].push((h, j));
        adj[h].push((t, j));
    }
    let root = inst.tree().root();
    let mut parent = vec![None; vc + 1];
    let mut depth = vec![usize::MAX; vc + 1];
    depth[root] = 0;
    let mut stack = vec![root];
    let mut seen = 1;
    while let Some(v) = stack.pop() {
        for &(w, j) in &adj[v] {
            if depth[w] == usize::MAX {
                let (t, h) = inst.edge_arc(bs.edge_of_col(j));
                parent[w] = Some((v, j, t, h));
                depth[w] = depth[v] + 1;
                seen += 1;
                stack.push(w);
            }
        }
    }
    debug_assert_eq!(seen, vc, "acyclic with n arcs implies spanning");
    Ok(BasisTree { root, parent, depth })
}

/// Columns along the (unique) path between `a` and `b` in the partial forest.
fn cycle_columns(adj: &[Vec<(usize, usize)>], a: usize, b: usize) -> Vec<usize> {
    // BFS from a to b recording the incoming column per vertex.
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; adj.len()];
    let mut queue = std::collections::VecDeque::from([a]);
    prev[a] = Some((a, 0));
    while let Some(v) = queue.pop_front() {
        if v == b {
            break;
        }
        for &(w, j) in &adj[v] {
            if prev[w].is_none() {
                prev[w] = Some((v, j));
                queue.push_back(w);
            }
        }
    }
    let mut cols = Vec::new();
    let mut v = b;
    while v != a {
        let (p, j) = prev[v].expect("t and h are connected in the forest");
        cols.push(j);
        v = p;
    }
    cols
}

impl BasisTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// The parent of `v` in the basis tree (`None` at the root).
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v].map(|(p, _, _, _)| p)
    }

    /// The basis column connecting `v` to its parent (`None` at the root).
    pub fn parent_col(&self, v: usize) -> Option<usize> {
        self.parent[v].map(|(_, j, _, _)| j)
    }

    /// The marked tree path from `from` to `to`.
    pub fn path(&self, from: usize, to: usize) -> MarkedPath {
        let mut up = Vec::new();
        let mut down = Vec::new();
        let (mut a, mut b) = (from, to);
        while a != b {
            if self.depth[a] >= self.depth[b] {
                let (p, col, tail, head) = self.parent[a].expect("deeper vertex has a parent");
                up.push(PathArc { col, tail, head, forward: tail == a });
                a = p;
            } else {
                let (p, col, tail, head) = self.parent[b].expect("deeper vertex has a parent");
                down.push(PathArc { col, tail, head, forward: tail == p });
                b = p;
            }
        }
        down.reverse();
        up.extend(down);
        MarkedPath { arcs: up }
    }
}

/// The marked path from `v` to `v'` in a basis tree; free-function form of
/// [`BasisTree::path`].
pub fn tree_path(tree: &BasisTree, from: usize, to: usize) -> MarkedPath {
    tree.path(from, to)
}

/// One arc of a marked path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathArc {
    /// Basis column whose hyperedge arc this is.
    pub col: usize,
    pub tail: usize,
    pub head: usize,
    /// Whether the path traverses the arc tail→head.
    pub forward: bool,
}

/// A basis-tree path with traversal orientations, in path order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedPath {
    pub arcs: Vec<PathArc>,
}

impl MarkedPath {
    /// Columns of forward arcs, in path order.
    pub fn forward_cols(&self) -> Vec<usize> {
        self.arcs.iter().filter(|a| a.forward).map(|a| a.col).collect()
    }

    /// Columns of backward arcs, in path order.
    pub fn backward_cols(&self) -> Vec<usize> {
        self.arcs.iter().filter(|a| !a.forward).map(|a| a.col).collect()
    }
}

/// Representation of column `j_t` in the basis `cols`: one coefficient per
/// entry of `cols` (in the given order), `+1`/`-1` for forward/backward arcs
/// of the basis-tree path from `j_t`'s tail to its head, `0` elsewhere
/// (including the artificial column 0).
pub fn representation_vector(
    inst: &ArbInstance,
    bs: &BlockSystem,
    cols: &[usize],
    j_t: usize,
) -> Result<Vec<i64>, NetworkError> {
    let tree = basis_tree(inst, bs, cols)?;
    let (v, vp) = inst.edge_arc(bs.edge_of_col(j_t));
    let path = tree.path(v, vp);
    let mut coeff = vec![0i64; cols.len()];
    for arc in &path.arcs {
        let k = cols.iter().position(|&c| c == arc.col).expect("path arcs are basic");
        coeff[k] = if arc.forward { 1 } else { -1 };
    }
    Ok(coeff)
}

/// Whether the path can push the selection forward: every forward arc is
/// selected and every backward arc is not.
pub fn is_augmenting(path: &MarkedPath, x: &[bool]) -> bool {
    path.arcs.iter().all(|a| if a.forward { x[a.col] } else { !x[a.col] })
}

/// The mirror condition after a toggle: every forward arc unselected, every
/// backward arc selected.
pub fn is_descending(path: &MarkedPath, x: &[bool]) -> bool {
    path.arcs.iter().all(|a| if a.forward { !x[a.col] } else { x[a.col] })
}

/// The four equivalent non-degeneracy conditions of a cardinal pivot, each
/// evaluated independently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PivotClass {
    pub non_degenerate: bool,
    /// [solution changed, j_t flipped 0→1, path augmenting before,
    ///  path descending after] — these must all agree.
    pub conditions: [bool; 4],
}

impl PivotClass {
    /// Whether all four conditions coincide.
    pub fn consistent(&self) -> bool {
        self.conditions.iter().all(|&c| c == self.conditions[0])
    }
}

/// Classify a cardinal pivot on an integral solution: `x` before, `x_after`
/// after `j_t` entered the basis `cols`.
pub fn classify_pivot(
    inst: &ArbInstance,
    bs: &BlockSystem,
    cols: &[usize],
    x: &[bool],
    x_after: &[bool],
    j_t: usize,
) -> Result<PivotClass, NetworkError> {
    if x.len() != bs.m() + 1 || x_after.len() != bs.m() + 1 {
        return Err(NetworkError::InvariantViolation(format!(
            "selection vectors must have {} entries",
            bs.m() + 1
        )));
    }
    let tree = basis_tree(inst, bs, cols)?;
    let (v, vp) = inst.edge_arc(bs.edge_of_col(j_t));
    let path = tree.path(v, vp);
    let conditions = [
        x != x_after,
        !x[j_t] && x_after[j_t],
        is_augmenting(&path, x),
        is_descending(&path, x_after),
    ];
    Ok(PivotClass { non_degenerate: conditions[0], conditions })
}
