//! Domain model: hypergraphic preference systems given with their underlying
//! network (a principal arborescence plus one digraph arc per hyperedge),
//! validation, depth-first relabeling, random generation, and file I/O.
//!
//! Indexing convention used across the crate: entities carry 1-based ids
//! (vertices of the hypergraph are `1..=n`, hyperedges `1..=m`, tree vertices
//! `1..=n+1`, tree arcs `1..=n`), while constructor arguments are plain
//! positional lists whose element `k` describes entity `k+1`. Index 0 is
//! reserved for the artificial controlling row/column added by the solvers
//! and never appears in instances or files.

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Errors from instance constructors.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("vertex {vertex} out of range 1..={max}")]
    VertexOutOfRange { vertex: usize, max: usize },
    #[error("hyperedge {edge} is empty")]
    EmptyEdge { edge: usize },
    #[error("hyperedge {edge} lists vertex {vertex} twice")]
    RepeatedVertex { edge: usize, vertex: usize },
    #[error("preference list of vertex {vertex}: {reason}")]
    BadPreferences { vertex: usize, reason: String },
    #[error("not an arborescence: {0}")]
    NotATree(String),
    #[error("hyperedge {edge}: no directed tree path from {tail} to {head}")]
    NotDirectedPath { edge: usize, tail: usize, head: usize },
    #[error("interval {index} = [{lo}, {hi}] is not within 1..={n}")]
    BadInterval { index: usize, lo: usize, hi: usize, n: usize },
    #[error("node-to-arc map is not a bijection: {0}")]
    BadArcMap(String),
}

// ---------------------------------------------------------------------------
// PreferenceSystem

/// A hypergraph on vertices `1..=n` plus, for every vertex, a strict
/// preference order over its incident hyperedges (most preferred first).
///
/// Construction enforces structural integrity (indices in range, hyperedges
/// nonempty and duplicate-free, each preference list a permutation of the
/// incident hyperedges). Semantic expectations of the solvers — the singleton
/// `{i}` exists and is vertex `i`'s least preferred hyperedge, hyperedges are
/// pairwise distinct — are reported by [`PreferenceSystem::validate`] instead,
/// so that checkers can still operate on nonconforming systems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceSystem {
    n: usize,
    /// hyperedges[e] for e in 1..=m: sorted vertex list; slot 0 unused.
    hyperedges: Vec<Vec<usize>>,
    /// prefs[i] for i in 1..=n: incident hyperedge ids, most preferred first.
    prefs: Vec<Vec<usize>>,
    /// rank[i][e] = position of hyperedge e in prefs[i] (0 = most preferred).
    rank: Vec<HashMap<usize, usize>>,
    /// singleton[i] = id of the hyperedge {i}, if present.
    singleton: Vec<Option<usize>>,
}

impl PreferenceSystem {
    /// Build a system from positional lists: `hyperedges[k]` is the vertex set
    /// of hyperedge `k+1`, `prefs[k]` the preference list of vertex `k+1`.
    pub fn new(
        n: usize,
        hyperedges: Vec<Vec<usize>>,
        prefs: Vec<Vec<usize>>,
    ) -> Result<Self, InstanceError> {
        let m = hyperedges.len();
        let mut edges: Vec<Vec<usize>> = Vec::with_capacity(m + 1);
        edges.push(Vec::new());
        for (idx, mut e) in hyperedges.into_iter().enumerate() {
            let id = idx + 1;
            if e.is_empty() {
                return Err(InstanceError::EmptyEdge { edge: id });
            }
            e.sort_unstable();
            for w in e.windows(2) {
                if w[0] == w[1] {
                    return Err(InstanceError::RepeatedVertex { edge: id, vertex: w[0] });
                }
            }
            if e[0] < 1 || e[e.len() - 1] > n {
                let bad = if e[0] < 1 { e[0] } else { e[e.len() - 1] };
                return Err(InstanceError::VertexOutOfRange { vertex: bad, max: n });
            }
            edges.push(e);
        }
        if prefs.len() != n {
            return Err(InstanceError::BadPreferences {
                vertex: 0,
                reason: format!("expected {} preference lists, got {}", n, prefs.len()),
            });
        }
        let mut degree = vec![0usize; n + 1];
        for e in edges.iter().skip(1) {
            for &v in e {
                degree[v] += 1;
            }
        }
        let mut all_prefs: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
        all_prefs.push(Vec::new());
        all_prefs.extend(prefs);
        let mut rank: Vec<HashMap<usize, usize>> = vec![HashMap::new(); n + 1];
        for i in 1..=n {
            for (pos, &e) in all_prefs[i].iter().enumerate() {
                if e == 0 || e > m {
                    return Err(InstanceError::BadPreferences {
                        vertex: i,
                        reason: format!("unknown hyperedge id {}", e),
                    });
                }
                if edges[e].binary_search(&i).is_err() {
                    return Err(InstanceError::BadPreferences {
                        vertex: i,
                        reason: format!("hyperedge {} does not contain the vertex", e),
                    });
                }
                if rank[i].insert(e, pos).is_some() {
                    return Err(InstanceError::BadPreferences {
                        vertex: i,
                        reason: format!("hyperedge {} listed twice", e),
                    });
                }
            }
            if rank[i].len() != degree[i] {
                return Err(InstanceError::BadPreferences {
                    vertex: i,
                    reason: format!(
                        "lists {} of the {} incident hyperedges",
                        rank[i].len(),
                        degree[i]
                    ),
                });
            }
        }
        let mut singleton = vec![None; n + 1];
        for (e, verts) in edges.iter().enumerate().skip(1) {
            if verts.len() == 1 && singleton[verts[0]].is_none() {
                singleton[verts[0]] = Some(e);
            }
        }
        Ok(PreferenceSystem { n, hyperedges: edges, prefs: all_prefs, rank, singleton })
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of hyperedges.
    pub fn m(&self) -> usize {
        self.hyperedges.len() - 1
    }

    /// Sorted vertex set of hyperedge `e` (ids 1..=m).
    pub fn edge(&self, e: usize) -> &[usize] {
        &self.hyperedges[e]
    }

    /// Preference list of vertex `i`: incident hyperedges, most preferred first.
    pub fn prefs_of(&self, i: usize) -> &[usize] {
        &self.prefs[i]
    }

    /// Number of hyperedges incident to vertex `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.prefs[i].len()
    }

    /// Position of hyperedge `e` in vertex `i`'s preference list
    /// (0 = most preferred), or `None` if `e` is not incident to `i`.
    pub fn rank(&self, i: usize, e: usize) -> Option<usize> {
        self.rank[i].get(&e).copied()
    }

    /// Id of the singleton hyperedge `{i}`, if present.
    pub fn singleton_of(&self, i: usize) -> Option<usize> {
        self.singleton[i]
    }

    /// Whether hyperedge `e` is a singleton.
    pub fn is_singleton(&self, e: usize) -> bool {
        self.hyperedges[e].len() == 1
    }

    /// The largest vertex of hyperedge `e`.
    pub fn max_vertex(&self, e: usize) -> usize {
        *self.hyperedges[e].last().expect("hyperedges are nonempty")
    }

    /// Check the semantic expectations of the solvers and report every
    /// violation: each vertex's singleton must exist and be least preferred,
    /// and hyperedges must be pairwise distinct as sets.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut seen: HashMap<&[usize], usize> = HashMap::new();
        for e in 1..=self.m() {
            if let Some(first) = seen.insert(&self.hyperedges[e], e) {
                violations.push(format!(
                    "duplicate hyperedge {} (ids {} and {})",
                    render_edge(&self.hyperedges[e]),
                    first,
                    e
                ));
            }
        }
        for i in 1..=self.n {
            match self.singleton[i] {
                None => violations.push(format!("singleton absent at vertex {}", i)),
                Some(s) => {
                    if self.prefs[i].last() != Some(&s) {
                        violations
                            .push(format!("singleton of vertex {} is not least preferred", i));
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    /// Return a copy with every missing singleton appended as a new hyperedge,
    /// least preferred by its vertex. Existing hyperedges keep their ids.
    pub fn with_singletons_repaired(&self) -> PreferenceSystem {
        let mut edges: Vec<Vec<usize>> = self.hyperedges[1..].to_vec();
        let mut prefs: Vec<Vec<usize>> = self.prefs[1..].to_vec();
        for i in 1..=self.n {
            if self.singleton[i].is_none() {
                edges.push(vec![i]);
                prefs[i - 1].push(edges.len());
            }
        }
        PreferenceSystem::new(self.n, edges, prefs)
            .expect("repairing singletons preserves structural integrity")
    }
}

fn render_edge(e: &[usize]) -> String {
    let inner: Vec<String> = e.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Outcome of [`PreferenceSystem::validate`]: empty iff the system meets all
/// solver expectations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "ok")
        } else {
            write!(f, "{}", self.violations.join("\n"))
        }
    }
}

// ---------------------------------------------------------------------------
// Arborescence

/// A rooted directed tree on vertices `1..=n+1` whose arcs all point away from
/// the root (every vertex is reachable from the root by a directed path).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arborescence {
    vertex_count: usize,
    /// arcs[k] = (tail, head) for k in 1..=n; slot 0 unused.
    arcs: Vec<(usize, usize)>,
    root: usize,
    /// parent_arc[v] = id of the arc entering v (0 for the root).
    parent_arc: Vec<usize>,
    /// children[v] = child vertices of v, ascending.
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
}

impl Arborescence {
    /// Build and check an arborescence; `arcs[k]` is tree arc `k+1`.
    pub fn new(
        vertex_count: usize,
        arcs: Vec<(usize, usize)>,
        root: usize,
    ) -> Result<Self, InstanceError> {
        if vertex_count < 2 {
            return Err(InstanceError::NotATree(format!(
                "need at least 2 tree vertices, got {}",
                vertex_count
            )));
        }
        if arcs.len() != vertex_count - 1 {
            return Err(InstanceError::NotATree(format!(
                "{} vertices need {} arcs, got {}",
                vertex_count,
                vertex_count - 1,
                arcs.len()
            )));
        }
        if root < 1 || root > vertex_count {
            return Err(InstanceError::VertexOutOfRange { vertex: root, max: vertex_count });
        }
        let mut all_arcs = Vec::with_capacity(arcs.len() + 1);
        all_arcs.push((0, 0));
        all_arcs.extend(arcs);
        let mut parent_arc = vec![0usize; vertex_count + 1];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); vertex_count + 1];
        for (k, &(t, h)) in all_arcs.iter().enumerate().skip(1) {
            for v in [t, h] {
                if v < 1 || v > vertex_count {
                    return Err(InstanceError::VertexOutOfRange { vertex: v, max: vertex_count });
                }
            }
            if t == h {
                return Err(InstanceError::NotATree(format!("arc {} is a self-loop", k)));
            }
            if h == root {
                return Err(InstanceError::NotATree(format!("arc {} enters the root", k)));
            }
            if parent_arc[h] != 0 {
                return Err(InstanceError::NotATree(format!("two arcs enter vertex {}", h)));
            }
            parent_arc[h] = k;
            children[t].push(h);
        }
        for ch in children.iter_mut() {
            ch.sort_unstable();
        }
        // In-degrees are 0 at the root and 1 elsewhere, so reachability from
        // the root is the remaining condition (it rules out off-root cycles).
        let mut depth = vec![usize::MAX; vertex_count + 1];
        depth[root] = 0;
        let mut stack = vec![root];
        let mut seen = 1;
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                depth[c] = depth[v] + 1;
                seen += 1;
                stack.push(c);
            }
        }
        if seen != vertex_count {
            return Err(InstanceError::NotATree(
                "not every vertex is reachable from the root".to_string(),
            ));
        }
        Ok(Arborescence { vertex_count, arcs: all_arcs, root, parent_arc, children, depth })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of arcs (= vertex_count − 1).
    pub fn arc_count(&self) -> usize {
        self.vertex_count - 1
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Tree arc `k` as (tail, head), ids 1..=arc_count.
    pub fn arc(&self, k: usize) -> (usize, usize) {
        self.arcs[k]
    }

    /// Id of the arc entering `v`, or `None` for the root.
    pub fn parent_arc(&self, v: usize) -> Option<usize> {
        if v == self.root {
            None
        } else {
            Some(self.parent_arc[v])
        }
    }

    /// Parent vertex of `v`, or `None` for the root.
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent_arc(v).map(|k| self.arcs[k].0)
    }

    /// Child vertices of `v`, ascending.
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Distance from the root to `v`.
    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Arc ids of the directed path from `u` down to `v`, in path order, or
    /// `None` if `u` is not a (weak) ancestor of `v`. `u == v` yields `Some`
    /// of the empty path.
    pub fn directed_path(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        let mut arcs = Vec::new();
        let mut w = v;
        while w != u {
            let k = self.parent_arc(w)?;
            arcs.push(k);
            w = self.arcs[k].0;
        }
        arcs.reverse();
        Some(arcs)
    }

    /// Whether `u` is a weak ancestor of `v` (every vertex is its own ancestor).
    pub fn is_ancestor(&self, u: usize, v: usize) -> bool {
        let mut w = v;
        loop {
            if w == u {
                return true;
            }
            match self.parent(w) {
                Some(p) => w = p,
                None => return false,
            }
        }
    }
}

// ---------------------------------------------------------------------------
// ArbInstance

/// A preference system together with its underlying network: the principal
/// arborescence, the node ↔ tree-arc bijection, and one digraph arc per
/// hyperedge whose directed tree path spans exactly the hyperedge's nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArbInstance {
    system: PreferenceSystem,
    tree: Arborescence,
    /// arc_of_node[i] = tree-arc id carrying node i; slot 0 unused.
    arc_of_node: Vec<usize>,
    /// node_of_arc[k] = inverse of arc_of_node; slot 0 unused.
    node_of_arc: Vec<usize>,
    /// path_of[e] = digraph arc (tail, head) of hyperedge e; slot 0 unused.
    path_of: Vec<(usize, usize)>,
}

impl ArbInstance {
    pub fn system(&self) -> &PreferenceSystem {
        &self.system
    }

    pub fn tree(&self) -> &Arborescence {
        &self.tree
    }

    /// Number of hypergraph vertices (= tree arcs).
    pub fn n(&self) -> usize {
        self.system.n()
    }

    /// Number of hyperedges.
    pub fn m(&self) -> usize {
        self.system.m()
    }

    /// Tree-arc id carrying node `i`.
    pub fn arc_of_node(&self, i: usize) -> usize {
        self.arc_of_node[i]
    }

    /// Node carried by tree arc `k`.
    pub fn node_of_arc(&self, k: usize) -> usize {
        self.node_of_arc[k]
    }

    /// The tree arc carrying node `i`, as (tail, head).
    pub fn node_arc(&self, i: usize) -> (usize, usize) {
        self.tree.arc(self.arc_of_node[i])
    }

    /// The digraph arc (tail, head) whose tree path spans hyperedge `e`.
    pub fn edge_arc(&self, e: usize) -> (usize, usize) {
        self.path_of[e]
    }
}

/// Assemble an instance from its underlying network.
///
/// `arc_of_node[k]` is the tree-arc id carrying node `k+1`;
/// `hyperedge_arcs[k]` is the digraph arc of hyperedge `k+1`, whose tree path
/// must be directed (tail an ancestor of head); `prefs[k]` is the preference
/// list of node `k+1` over hyperedge ids. Hyperedge vertex sets are derived
/// from the arcs, so the caller never states them redundantly.
pub fn build_arb_instance(
    tree: Arborescence,
    arc_of_node: Vec<usize>,
    hyperedge_arcs: Vec<(usize, usize)>,
    prefs: Vec<Vec<usize>>,
) -> Result<ArbInstance, InstanceError> {
    let n = tree.arc_count();
    if arc_of_node.len() != n {
        return Err(InstanceError::BadArcMap(format!(
            "expected {} entries, got {}",
            n,
            arc_of_node.len()
        )));
    }
    let mut aon = vec![0usize; n + 1];
    let mut node_of_arc = vec![0usize; n + 1];
    for (idx, &k) in arc_of_node.iter().enumerate() {
        let i = idx + 1;
        if k < 1 || k > n {
            return Err(InstanceError::BadArcMap(format!("node {} maps to unknown arc {}", i, k)));
        }
        if node_of_arc[k] != 0 {
            return Err(InstanceError::BadArcMap(format!(
                "arcs assigned to both node {} and node {}",
                node_of_arc[k], i
            )));
        }
        aon[i] = k;
        node_of_arc[k] = i;
    }
    let mut edges = Vec::with_capacity(hyperedge_arcs.len());
    for (idx, &(v, vp)) in hyperedge_arcs.iter().enumerate() {
        let id = idx + 1;
        for w in [v, vp] {
            if w < 1 || w > tree.vertex_count() {
                return Err(InstanceError::VertexOutOfRange {
                    vertex: w,
                    max: tree.vertex_count(),
                });
            }
        }
        let path = tree
            .directed_path(v, vp)
            .filter(|p| !p.is_empty())
            .ok_or(InstanceError::NotDirectedPath { edge: id, tail: v, head: vp })?;
        let mut e: Vec<usize> = path.iter().map(|&k| node_of_arc[k]).collect();
        e.sort_unstable();
        edges.push(e);
    }
    let mut path_of = vec![(0, 0)];
    path_of.extend(hyperedge_arcs);
    let system = PreferenceSystem::new(n, edges, prefs)?;
    Ok(ArbInstance { system, tree, arc_of_node: aon, node_of_arc, path_of })
}

// ---------------------------------------------------------------------------
// Depth-first relabeling

/// The label maps produced by [`depth_first_relabel`] (old label → new label).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthFirstLabeling {
    /// `vertex_map[v]` = new label of tree vertex `v`; the root maps to `n+1`.
    pub vertex_map: Vec<usize>,
    /// `node_map[i]` = new index of node `i` (= new id of its tree arc).
    pub node_map: Vec<usize>,
}

/// Relabel an instance so that tree vertices are numbered by a post-order
/// walk from the root (ancestors get larger labels, the root gets n+1), tree
/// arc `i` is the arc entering vertex `i`, and node `i` rides arc `i`.
/// Children are visited in ascending original label, so the output is
/// deterministic. Hyperedge ids are unchanged.
pub fn depth_first_relabel(inst: &ArbInstance) -> (ArbInstance, DepthFirstLabeling) {
    let tree = inst.tree();
    let np1 = tree.vertex_count();
    let n = tree.arc_count();
    let mut vertex_map = vec![0usize; np1 + 1];
    let mut next = 1usize;
    // Iterative post-order: (vertex, next child position).
    let mut stack: Vec<(usize, usize)> = vec![(tree.root(), 0)];
    while let Some(top) = stack.last_mut() {
        let v = top.0;
        let kids = tree.children(v);
        if top.1 < kids.len() {
            let c = kids[top.1];
            top.1 += 1;
            stack.push((c, 0));
        } else {
            vertex_map[v] = next;
            next += 1;
            stack.pop();
        }
    }
    let mut node_map = vec![0usize; n + 1];
    for i in 1..=n {
        let (_, head) = inst.node_arc(i);
        node_map[i] = vertex_map[head];
    }
    let mut arcs = vec![(0usize, 0usize); n];
    for k in 1..=n {
        let (t, h) = tree.arc(k);
        arcs[vertex_map[h] - 1] = (vertex_map[t], vertex_map[h]);
    }
    let new_tree = Arborescence::new(np1, arcs, np1).expect("relabeling preserves the arborescence");
    let mut prefs = vec![Vec::new(); n];
    for i in 1..=n {
        prefs[node_map[i] - 1] = inst.system().prefs_of(i).to_vec();
    }
    let hyperedge_arcs: Vec<(usize, usize)> = (1..=inst.m())
        .map(|e| {
            let (v, vp) = inst.edge_arc(e);
            (vertex_map[v], vertex_map[vp])
        })
        .collect();
    let arc_of_node: Vec<usize> = (1..=n).collect();
    let relabeled = build_arb_instance(new_tree, arc_of_node, hyperedge_arcs, prefs)
        .expect("relabeling preserves instance validity");
    (relabeled, DepthFirstLabeling { vertex_map, node_map })
}

// ---------------------------------------------------------------------------
// Interval instances

/// Build an instance over interval hyperedges on the path `1 — 2 — … — n`.
///
/// The principal tree is the path arborescence with arcs `(i+1, i)` rooted at
/// `n+1`, and interval `[lo, hi]` becomes the digraph arc `(hi+1, lo)`.
/// `intervals[k]` gets hyperedge id `k+1`; for every vertex whose singleton
/// `[i, i]` is not among the given intervals, the singleton is appended (ids
/// continue past the intervals, in vertex order). `prefs[k]` lists vertex
/// `k+1`'s incident hyperedge ids, most preferred first; the auto-added
/// singleton may be omitted and is then appended least-preferred.
pub fn interval_instance(
    n: usize,
    intervals: &[(usize, usize)],
    prefs: Vec<Vec<usize>>,
) -> Result<ArbInstance, InstanceError> {
    for (idx, &(lo, hi)) in intervals.iter().enumerate() {
        if lo < 1 || hi > n || lo > hi {
            return Err(InstanceError::BadInterval { index: idx + 1, lo, hi, n });
        }
    }
    if prefs.len() != n {
        return Err(InstanceError::BadPreferences {
            vertex: 0,
            reason: format!("expected {} preference lists, got {}", n, prefs.len()),
        });
    }
    let mut singleton_id = vec![0usize; n + 1];
    let mut arcs: Vec<(usize, usize)> = Vec::with_capacity(intervals.len() + n);
    for (idx, &(lo, hi)) in intervals.iter().enumerate() {
        if lo == hi && singleton_id[lo] == 0 {
            singleton_id[lo] = idx + 1;
        }
        arcs.push((hi + 1, lo));
    }
    for i in 1..=n {
        if singleton_id[i] == 0 {
            arcs.push((i + 1, i));
            singleton_id[i] = arcs.len();
        }
    }
    let mut prefs = prefs;
    for (idx, p) in prefs.iter_mut().enumerate() {
        let s = singleton_id[idx + 1];
        if !p.contains(&s) {
            p.push(s);
        }
    }
    let tree_arcs: Vec<(usize, usize)> = (1..=n).map(|i| (i + 1, i)).collect();
    let tree = Arborescence::new(n + 1, tree_arcs, n + 1).expect("path arborescence is valid");
    build_arb_instance(tree, (1..=n).collect(), arcs, prefs)
}

// ---------------------------------------------------------------------------
// Random instances

/// Deterministically generate a random arborescence instance: a random tree
/// on `n+1` vertices with random labels, the `n` singleton hyperedges, up to
/// `extra_edges` additional hyperedges drawn without replacement from all
/// ancestor → descendant arcs of tree distance ≥ 2, and uniformly random
/// preferences with singletons least preferred.
///
/// The same `(seed, n, extra_edges)` always yields the same instance. When
/// the tree has fewer than `extra_edges` distinct candidate arcs, all of them
/// are used.
pub fn random_instance(seed: u64, n: usize, extra_edges: usize) -> ArbInstance {
    assert!(n >= 1, "instances need at least one vertex");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let np1 = n + 1;
    // Shape: generation slot 1 is the root; each later slot chains to its
    // predecessor half the time (for depth) and to a uniform earlier slot
    // otherwise (for branching).
    let mut parent_slot = vec![0usize; np1 + 1];
    for k in 2..=np1 {
        parent_slot[k] = if k == 2 || rng.gen_bool(0.5) { k - 1 } else { rng.gen_range(1..k) };
    }
    let mut labels: Vec<usize> = (1..=np1).collect();
    labels.shuffle(&mut rng);
    let arcs: Vec<(usize, usize)> =
        (2..=np1).map(|k| (labels[parent_slot[k] - 1], labels[k - 1])).collect();
    let root = labels[0];
    let tree = Arborescence::new(np1, arcs, root).expect("generated tree is an arborescence");
    let mut arc_of_node: Vec<usize> = (1..=n).collect();
    arc_of_node.shuffle(&mut rng);
    // Singleton hyperedge of node i spans exactly its tree arc.
    let mut hyperedge_arcs: Vec<(usize, usize)> =
        arc_of_node.iter().map(|&k| tree.arc(k)).collect();
    // Candidate non-singleton hyperedges: (ancestor, descendant) at distance ≥ 2.
    let mut pool: Vec<(usize, usize)> = Vec::new();
    for v in 1..=np1 {
        if v == root {
            continue;
        }
        let mut u = tree.parent(v).expect("non-root has a parent");
        while let Some(p) = tree.parent(u) {
            u = p;
            pool.push((u, v));
        }
    }
    pool.shuffle(&mut rng);
    pool.truncate(extra_edges);
    hyperedge_arcs.extend(&pool);
    // Incidence of the extra hyperedges, for preference building.
    let mut node_of_arc = vec![0usize; n + 1];
    for (idx, &k) in arc_of_node.iter().enumerate() {
        node_of_arc[k] = idx + 1;
    }
    let mut prefs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, &(u, v)) in pool.iter().enumerate() {
        let id = n + idx + 1;
        for k in tree.directed_path(u, v).expect("pool arcs span directed paths") {
            prefs[node_of_arc[k] - 1].push(id);
        }
    }
    for (idx, p) in prefs.iter_mut().enumerate() {
        p.shuffle(&mut rng);
        p.push(idx + 1); // singleton of node idx+1 has hyperedge id idx+1
    }
    build_arb_instance(tree, arc_of_node, hyperedge_arcs, prefs)
        .expect("generated instance is structurally valid")
}

// ---------------------------------------------------------------------------
// File format

/// Parse failure with 1-based line and column of the offending token.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Copy)]
struct Tok<'a> {
    line: usize,
    column: usize,
    text: &'a str,
}

struct Tokens<'a> {
    toks: Vec<Tok<'a>>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut toks = Vec::new();
        for (li, raw) in text.lines().enumerate() {
            let line = &raw[..raw.find('#').unwrap_or(raw.len())];
            let mut start = None;
            for (ci, ch) in line.char_indices() {
                if ch.is_whitespace() {
                    if let Some(s) = start.take() {
                        toks.push(Tok { line: li + 1, column: s + 1, text: &line[s..ci] });
                    }
                } else if start.is_none() {
                    start = Some(ci);
                }
            }
            if let Some(s) = start {
                toks.push(Tok { line: li + 1, column: s + 1, text: &line[s..] });
            }
        }
        Tokens { toks, pos: 0 }
    }

    fn peek(&self) -> Option<Tok<'a>> {
        self.toks.get(self.pos).copied()
    }

    fn next(&mut self, what: &str) -> Result<Tok<'a>, ParseError> {
        match self.toks.get(self.pos) {
            Some(&t) => {
                self.pos += 1;
                Ok(t)
            }
            None => {
                let (line, column) =
                    self.toks.last().map(|t| (t.line, t.column + t.text.len())).unwrap_or((1, 1));
                Err(ParseError { line, column, message: format!("expected {}, found end of input", what) })
            }
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Tok<'a>, ParseError> {
        let t = self.next(&format!("\"{}\"", kw))?;
        if t.text != kw {
            return Err(err_at(t, format!("expected keyword \"{}\", found \"{}\"", kw, t.text)));
        }
        Ok(t)
    }

    fn number(&mut self, what: &str) -> Result<(Tok<'a>, usize), ParseError> {
        let t = self.next(what)?;
        match t.text.parse::<usize>() {
            Ok(v) if v > 0 => Ok((t, v)),
            _ => Err(err_at(t, format!("expected {} (a positive integer), found \"{}\"", what, t.text))),
        }
    }
}

fn err_at(t: Tok<'_>, message: String) -> ParseError {
    ParseError { line: t.line, column: t.column, message }
}

/// Parse the line-oriented instance format (see [`serialize_instance`]).
/// `#` starts a comment; tokens are whitespace-separated.
pub fn parse_instance(text: &str) -> Result<ArbInstance, ParseError> {
    let mut toks = Tokens::new(text);
    let header = toks.keyword("arb")?;
    let (_, n) = toks.number("vertex count")?;
    let (_, m) = toks.number("hyperedge count")?;

    let mut vertex_ids: HashMap<usize, usize> = HashMap::new();
    for next_label in 1..=n + 1 {
        toks.keyword("vertex")?;
        let (t, v) = toks.number("vertex label")?;
        if vertex_ids.insert(v, next_label).is_some() {
            return Err(err_at(t, format!("vertex label {} declared twice", v)));
        }
    }
    let lookup_vertex = |ids: &HashMap<usize, usize>, t: Tok<'_>, v: usize| {
        ids.get(&v).copied().ok_or_else(|| err_at(t, format!("unknown vertex label {}", v)))
    };

    let mut arc_ids: HashMap<usize, usize> = HashMap::new();
    let mut arcs: Vec<(usize, usize)> = Vec::with_capacity(n);
    for next_id in 1..=n {
        toks.keyword("treearc")?;
        let (t, id) = toks.number("tree-arc id")?;
        if arc_ids.insert(id, next_id).is_some() {
            return Err(err_at(t, format!("tree-arc id {} declared twice", id)));
        }
        let (tt, tail) = toks.number("tail vertex")?;
        let (th, head) = toks.number("head vertex")?;
        arcs.push((lookup_vertex(&vertex_ids, tt, tail)?, lookup_vertex(&vertex_ids, th, head)?));
    }

    toks.keyword("root")?;
    let (rt, root_label) = toks.number("root label")?;
    let root = lookup_vertex(&vertex_ids, rt, root_label)?;

    let mut arc_of_node = vec![0usize; n];
    for _ in 0..n {
        toks.keyword("nodearc")?;
        let (ti, i) = toks.number("node index")?;
        if i > n {
            return Err(err_at(ti, format!("node index {} out of range 1..={}", i, n)));
        }
        let (ta, a) = toks.number("tree-arc id")?;
        let arc = *arc_ids
            .get(&a)
            .ok_or_else(|| err_at(ta, format!("unknown tree-arc id {}", a)))?;
        if arc_of_node[i - 1] != 0 {
            return Err(err_at(ti, format!("node {} assigned twice", i)));
        }
        arc_of_node[i - 1] = arc;
    }

    let mut edge_ids: HashMap<usize, usize> = HashMap::new();
    let mut hyperedge_arcs: Vec<(usize, usize)> = Vec::with_capacity(m);
    for next_id in 1..=m {
        toks.keyword("edge")?;
        let (t, id) = toks.number("hyperedge id")?;
        if edge_ids.insert(id, next_id).is_some() {
            return Err(err_at(t, format!("hyperedge id {} declared twice", id)));
        }
        let (tt, tail) = toks.number("tail vertex")?;
        let (th, head) = toks.number("head vertex")?;
        hyperedge_arcs
            .push((lookup_vertex(&vertex_ids, tt, tail)?, lookup_vertex(&vertex_ids, th, head)?));
    }

    let mut prefs: Vec<Option<Vec<usize>>> = vec![None; n];
    for _ in 0..n {
        let kw = toks.keyword("pref")?;
        let (ti, i) = toks.number("node index")?;
        if i > n {
            return Err(err_at(ti, format!("node index {} out of range 1..={}", i, n)));
        }
        if prefs[i - 1].is_some() {
            return Err(err_at(ti, format!("preference list of node {} given twice", i)));
        }
        let colon = toks.next("\":\"")?;
        if colon.text != ":" {
            return Err(err_at(colon, format!("expected \":\", found \"{}\"", colon.text)));
        }
        let mut list = Vec::new();
        while toks.peek().is_some_and(|t| t.line == kw.line) {
            let (t, id) = toks.number("hyperedge id")?;
            let e = *edge_ids
                .get(&id)
                .ok_or_else(|| err_at(t, format!("unknown hyperedge id {}", id)))?;
            list.push(e);
        }
        prefs[i - 1] = Some(list);
    }

    if let Some(t) = toks.peek() {
        return Err(err_at(t, format!("unexpected trailing input \"{}\"", t.text)));
    }

    let at_header = |e: InstanceError| ParseError {
        line: header.line,
        column: header.column,
        message: e.to_string(),
    };
    let tree = Arborescence::new(n + 1, arcs, root).map_err(at_header)?;
    build_arb_instance(
        tree,
        arc_of_node,
        hyperedge_arcs,
        prefs.into_iter().map(|p| p.expect("all preference lists were read")).collect(),
    )
    .map_err(at_header)
}

/// Serialize an instance into the line-oriented text format:
///
/// ```text
/// arb <n> <m>
/// vertex <label>            (n+1 lines)
/// treearc <id> <tail> <head>  (n lines)
/// root <label>
/// nodearc <node> <treearc>    (n lines)
/// edge <id> <tail> <head>     (m lines)
/// pref <node> : <edge ids most-preferred first>   (n lines)
/// ```
///
/// `parse_instance(serialize_instance(x))` reproduces `x` exactly.
pub fn serialize_instance(inst: &ArbInstance) -> String {
    let n = inst.n();
    let m = inst.m();
    let mut out = String::new();
    out.push_str(&format!("arb {} {}\n", n, m));
    for v in 1..=n + 1 {
        out.push_str(&format!("vertex {}\n", v));
    }
    for k in 1..=n {
        let (t, h) = inst.tree().arc(k);
        out.push_str(&format!("treearc {} {} {}\n", k, t, h));
    }
    out.push_str(&format!("root {}\n", inst.tree().root()));
    for i in 1..=n {
        out.push_str(&format!("nodearc {} {}\n", i, inst.arc_of_node(i)));
    }
    for e in 1..=m {
        let (t, h) = inst.edge_arc(e);
        out.push_str(&format!("edge {} {} {}\n", e, t, h));
    }
    for i in 1..=n {
        let ids: Vec<String> =
            inst.system().prefs_of(i).iter().map(|e| e.to_string()).collect();
        out.push_str(&format!("pref {} : {}\n", i, ids.join(" ")));
    }
    out
}

// ---------------------------------------------------------------------------

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Four-vertex worked example used throughout the crate's tests:
    /// edges {1},{2},{3},{4},{2,3},{1,3},{1,3,4},{3,4} (ids 1..8) on the
    /// arborescence 5 → 4 → 3 → {1, 2}.
    pub(crate) fn four_vertex_instance() -> ArbInstance {
        let tree = Arborescence::new(
            5,
            vec![(3, 1), (3, 2), (4, 3), (5, 4)],
            5,
        )
        .unwrap();
        build_arb_instance(
            tree,
            vec![1, 2, 3, 4],
            vec![(3, 1), (3, 2), (4, 3), (5, 4), (4, 2), (4, 1), (5, 1), (5, 3)],
            vec![
                vec![6, 7, 1],
                vec![5, 2],
                vec![5, 6, 8, 7, 3],
                vec![7, 8, 4],
            ],
        )
        .unwrap()
    }

    #[test]
    fn four_vertex_edges_derive_from_arcs() {
        let inst = four_vertex_instance();
        let sys = inst.system();
        assert_eq!(sys.m(), 8);
        assert_eq!(sys.edge(5), &[2, 3]);
        assert_eq!(sys.edge(6), &[1, 3]);
        assert_eq!(sys.edge(7), &[1, 3, 4]);
        assert_eq!(sys.edge(8), &[3, 4]);
        assert!(sys.validate().is_valid());
    }

    #[test]
    fn validate_reports_missing_singleton() {
        let sys = PreferenceSystem::new(
            2,
            vec![vec![2], vec![1, 2]],
            vec![vec![2], vec![2, 1]],
        )
        .unwrap();
        let report = sys.validate();
        assert!(report.violations.iter().any(|v| v == "singleton absent at vertex 1"));
    }

    #[test]
    fn validate_reports_duplicate_hyperedge() {
        let sys = PreferenceSystem::new(
            3,
            vec![vec![1], vec![2], vec![3], vec![1, 3], vec![1, 3]],
            vec![vec![4, 5, 1], vec![2], vec![5, 4, 3]],
        )
        .unwrap();
        let report = sys.validate();
        assert!(report.violations.iter().any(|v| v.contains("duplicate hyperedge")));
    }

    #[test]
    fn validate_reports_misplaced_singleton() {
        let sys = PreferenceSystem::new(
            2,
            vec![vec![1], vec![2], vec![1, 2]],
            vec![vec![1, 3], vec![3, 2]],
        )
        .unwrap();
        let report = sys.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v == "singleton of vertex 1 is not least preferred"));
    }

    #[test]
    fn repair_appends_missing_singletons() {
        let sys = PreferenceSystem::new(
            2,
            vec![vec![2], vec![1, 2]],
            vec![vec![2], vec![2, 1]],
        )
        .unwrap();
        let fixed = sys.with_singletons_repaired();
        assert!(fixed.validate().is_valid());
        assert_eq!(fixed.m(), 3);
        assert_eq!(fixed.edge(3), &[1]);
        assert_eq!(fixed.prefs_of(1), &[2, 3]);
    }

    #[test]
    fn preference_permutation_is_enforced() {
        let err = PreferenceSystem::new(
            2,
            vec![vec![1], vec![2], vec![1, 2]],
            vec![vec![3, 1], vec![2]], // vertex 2 omits edge 3
        )
        .unwrap_err();
        assert!(matches!(err, InstanceError::BadPreferences { vertex: 2, .. }));
    }

    #[test]
    fn arborescence_rejects_cycles_and_multi_entry() {
        let err = Arborescence::new(4, vec![(1, 2), (2, 3), (3, 2)], 1).unwrap_err();
        assert!(matches!(err, InstanceError::NotATree(_)));
        let err = Arborescence::new(4, vec![(1, 2), (2, 3), (4, 3)], 1).unwrap_err();
        assert!(matches!(err, InstanceError::NotATree(_)));
    }

    #[test]
    fn seven_vertex_network_with_three_paths() {
        // Six singleton arcs plus three longer paths: nine hyperedges total.
        let tree =
            Arborescence::new(7, vec![(7, 6), (6, 5), (5, 4), (6, 3), (3, 2), (2, 1)], 7).unwrap();
        let inst = build_arb_instance(
            tree,
            vec![6, 5, 3, 4, 2, 1],
            vec![
                (2, 1), // node 1
                (3, 2), // node 2
                (5, 4), // node 3
                (6, 3), // node 4
                (6, 5), // node 5
                (7, 6), // node 6
                (7, 4), // arcs (7,6),(6,5),(5,4) -> nodes {6,5,3}
                (6, 1), // arcs (6,3),(3,2),(2,1) -> nodes {4,2,1}
                (7, 2), // arcs (7,6),(6,3),(3,2) -> nodes {6,4,2}
            ],
            vec![
                vec![8, 1],
                vec![9, 8, 2],
                vec![7, 3],
                vec![8, 9, 4],
                vec![7, 5],
                vec![7, 9, 6],
            ],
        )
        .unwrap();
        assert_eq!(inst.m(), 9);
        assert_eq!(inst.system().edge(7), &[3, 5, 6]);
        assert_eq!(inst.system().edge(8), &[1, 2, 4]);
        assert_eq!(inst.system().edge(9), &[2, 4, 6]);
    }

    #[test]
    fn single_arc_instance() {
        let tree = Arborescence::new(2, vec![(2, 1)], 2).unwrap();
        let inst = build_arb_instance(tree, vec![1], vec![(2, 1)], vec![vec![1]]).unwrap();
        assert_eq!(inst.n(), 1);
        assert_eq!(inst.m(), 1);
        assert!(inst.system().validate().is_valid());
    }

    #[test]
    fn backward_arc_is_rejected() {
        let tree = Arborescence::new(3, vec![(3, 2), (2, 1)], 3).unwrap();
        let err =
            build_arb_instance(tree, vec![1, 2], vec![(2, 1), (3, 2), (1, 3)], vec![vec![1], vec![2]])
                .unwrap_err();
        assert_eq!(err, InstanceError::NotDirectedPath { edge: 3, tail: 1, head: 3 });
    }

    #[test]
    fn relabel_is_identity_on_depth_first_input() {
        let inst = four_vertex_instance();
        let (relabeled, labeling) = depth_first_relabel(&inst);
        assert_eq!(labeling.vertex_map[1..], [1, 2, 3, 4, 5]);
        assert_eq!(labeling.node_map[1..], [1, 2, 3, 4]);
        assert_eq!(relabeled, inst);
    }

    #[test]
    fn relabel_puts_deepest_vertex_first_on_a_path() {
        // r=1 -> a=2 -> b=3: b gets label 1, a gets 2, the root gets 3.
        let tree = Arborescence::new(3, vec![(1, 2), (2, 3)], 1).unwrap();
        let inst =
            build_arb_instance(tree, vec![1, 2], vec![(1, 2), (2, 3)], vec![vec![1], vec![2]])
                .unwrap();
        let (relabeled, labeling) = depth_first_relabel(&inst);
        assert_eq!(labeling.vertex_map[1..], [3, 2, 1]);
        assert_eq!(relabeled.tree().root(), 3);
        // Arc i enters vertex i and carries node i.
        for i in 1..=2 {
            assert_eq!(relabeled.node_arc(i).1, i);
        }
    }

    #[test]
    fn relabel_satisfies_depth_first_conditions_on_random_instance() {
        let inst = random_instance(11, 50, 60);
        let (relabeled, _) = depth_first_relabel(&inst);
        let t = relabeled.tree();
        for i in 1..=50 {
            assert_eq!(t.arc(i).1, i, "arc {} must enter vertex {}", i, i);
            assert_eq!(relabeled.arc_of_node(i), i);
        }
        for u in 1..=t.vertex_count() {
            for v in 1..=t.vertex_count() {
                if t.is_ancestor(u, v) {
                    assert!(u >= v, "ancestor {} must not precede descendant {}", u, v);
                }
            }
        }
    }

    #[test]
    fn interval_builds_path_spanning_edges() {
        let inst = interval_instance(4, &[(1, 3)], vec![vec![1], vec![1], vec![1], vec![]]).unwrap();
        assert_eq!(inst.m(), 5); // [1,3] plus four singletons
        assert_eq!(inst.system().edge(1), &[1, 2, 3]);
        assert_eq!(inst.edge_arc(1), (4, 1));
        assert!(inst.system().validate().is_valid());
    }

    #[test]
    fn interval_trivial_instance() {
        let inst = interval_instance(1, &[], vec![vec![]]).unwrap();
        assert_eq!(inst.m(), 1);
        assert_eq!(inst.system().edge(1), &[1]);
    }

    #[test]
    fn interval_rejects_bad_bounds() {
        let err = interval_instance(3, &[(2, 4)], vec![vec![], vec![1], vec![1]]).unwrap_err();
        assert_eq!(err, InstanceError::BadInterval { index: 1, lo: 2, hi: 4, n: 3 });
    }

    #[test]
    fn random_instance_is_deterministic_and_valid() {
        let a = random_instance(7, 5, 3);
        let b = random_instance(7, 5, 3);
        assert_eq!(serialize_instance(&a), serialize_instance(&b));
        assert!(a.system().validate().is_valid());
        assert_eq!(a.m(), 8);
    }

    #[test]
    fn random_instance_trivial() {
        let inst = random_instance(7, 1, 0);
        assert_eq!(inst.n(), 1);
        assert_eq!(inst.m(), 1);
    }

    #[test]
    fn serialize_parse_round_trip() {
        for inst in [four_vertex_instance(), random_instance(3, 12, 9)] {
            let text = serialize_instance(&inst);
            let back = parse_instance(&text).unwrap();
            assert_eq!(back, inst);
        }
    }

    #[test]
    fn parse_rejects_empty_input() {
        let err = parse_instance("").unwrap_err();
        assert!(err.message.contains("end of input"));
    }

    #[test]
    fn parse_names_unknown_keyword() {
        let err = parse_instance("arborescence 1 1\n").unwrap_err();
        assert!(err.message.contains("arborescence"), "message: {}", err.message);
        assert_eq!((err.line, err.column), (1, 1));
    }

    #[test]
    fn parse_reports_position_of_bad_token() {
        let text = "arb 1 1\nvertex 1\nvertex 2\ntreearc 1 2 x\n";
        let err = parse_instance(text).unwrap_err();
        assert_eq!((err.line, err.column), (4, 13));
    }

    #[test]
    fn parse_ignores_comments() {
        let inst = four_vertex_instance();
        let text = format!("# generated\n{}", serialize_instance(&inst));
        assert_eq!(parse_instance(&text).unwrap(), inst);
    }
}
