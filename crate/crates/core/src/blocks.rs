//! The block-partitioned constraint matrix `A` and ordinal matrix `C` that
//! the pivoting engines work on.
//!
//! Columns are indexed `0..=m`: column 0 is the artificial column of the
//! augmented system, columns `1..=n` are the singleton hyperedges `{1}..{n}`
//! in vertex order, and the remaining columns are grouped into blocks
//! `S_1, …, S_n`, where block `S_i` holds the non-singleton hyperedges whose
//! largest vertex is `i`, ordered most preferred by `i` first. Rows are
//! indexed `0..=n`: row 0 is the artificial controlling row, row `i ≥ 1` is
//! vertex `i`.
//!
//! Entries are synthesized on demand — the dense `C` would be prohibitively
//! large for big instances (it has `(n+1)(m+1)` entries), but any single
//! entry is computable in `O(log)` time from the preference ranks:
//!
//! * `c(i, i) = 0` and incident columns carry `deg(i) − rank − 1`, so lower
//!   values are preferred and the singleton is the row minimum;
//! * non-incident ("filler") entries descend from `m − 1` left to right, so
//!   they exceed every incident entry and keep row entries distinct;
//! * row 0 decreases left to right (`m + 1 − j`), and column 0 carries
//!   `m + 1`, the row maximum, everywhere else.

use std::fmt::Write as _;

use thiserror::Error;

use crate::instance::PreferenceSystem;

/// Errors from block-system construction.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlocksError {
    #[error("preference system fails validation: {0}")]
    InvalidSystem(String),
}

/// A preference system together with its column layout and on-demand views
/// of the augmented matrices `A` and `C`.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    system: PreferenceSystem,
    /// col_edge[j] = hyperedge id in column j; slot 0 is the artificial column.
    col_edge: Vec<usize>,
    /// edge_col[e] = column of hyperedge e; slot 0 unused.
    edge_col: Vec<usize>,
    /// blocks[i] = columns of block S_i, most preferred by i first; slot 0 unused.
    blocks: Vec<Vec<usize>>,
    /// block_of_col[j] = i when column j lies in S_i (non-singleton columns only).
    block_of_col: Vec<Option<usize>>,
    /// row_cols[i] = sorted columns incident to row i; slot 0 unused.
    row_cols: Vec<Vec<usize>>,
}

/// Group the non-singleton hyperedges into blocks `S_1..S_n` by their
/// largest vertex, each block ordered most preferred by that vertex first.
/// Returns hyperedge ids with slot 0 unused; `S_1` is always empty (an edge
/// whose largest vertex is 1 is the singleton `{1}`).
pub fn build_blocks(system: &PreferenceSystem) -> Result<Vec<Vec<usize>>, BlocksError> {
    let report = system.validate();
    if !report.is_valid() {
        return Err(BlocksError::InvalidSystem(report.violations.join("; ")));
    }
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); system.n() + 1];
    for e in 1..=system.m() {
        if !system.is_singleton(e) {
            buckets[system.max_vertex(e)].push(e);
        }
    }
    for (i, bucket) in buckets.iter_mut().enumerate().skip(1) {
        bucket.sort_by_key(|&e| system.rank(i, e).expect("max vertex is incident"));
    }
    Ok(buckets)
}

/// Build the block system; the preference system must pass
/// [`PreferenceSystem::validate`] (singletons present and least preferred,
/// no duplicate hyperedges), since the column layout depends on it.
pub fn build_block_system(system: &PreferenceSystem) -> Result<BlockSystem, BlocksError> {
    let buckets = build_blocks(system)?;
    let n = system.n();
    let m = system.m();
    let mut col_edge = Vec::with_capacity(m + 1);
    col_edge.push(0);
    for i in 1..=n {
        col_edge.push(system.singleton_of(i).expect("validated systems have singletons"));
    }
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut block_of_col = vec![None; m + 1];
    for i in 1..=n {
        for &e in &buckets[i] {
            col_edge.push(e);
            blocks[i].push(col_edge.len() - 1);
            block_of_col[col_edge.len() - 1] = Some(i);
        }
    }
    let mut edge_col = vec![0usize; m + 1];
    for (j, &e) in col_edge.iter().enumerate().skip(1) {
        edge_col[e] = j;
    }
    let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for i in 1..=n {
        let mut cols: Vec<usize> = system.prefs_of(i).iter().map(|&e| edge_col[e]).collect();
        cols.sort_unstable();
        row_cols[i] = cols;
    }
    Ok(BlockSystem { system: system.clone(), col_edge, edge_col, blocks, block_of_col, row_cols })
}

impl BlockSystem {
    pub fn system(&self) -> &PreferenceSystem {
        &self.system
    }

    /// Number of vertices (rows are 0..=n).
    pub fn n(&self) -> usize {
        self.system.n()
    }

    /// Number of hyperedges (columns are 0..=m).
    pub fn m(&self) -> usize {
        self.system.m()
    }

    /// Hyperedge in column `j` (j ≥ 1).
    pub fn edge_of_col(&self, j: usize) -> usize {
        self.col_edge[j]
    }

    /// Column of hyperedge `e`.
    pub fn col_of_edge(&self, e: usize) -> usize {
        self.edge_col[e]
    }

    /// Block index `i` with `j ∈ S_i`, or `None` for column 0 and singletons.
    pub fn block_of_col(&self, j: usize) -> Option<usize> {
        self.block_of_col[j]
    }

    /// Columns of block `S_i`, most preferred by `i` first.
    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    /// Sorted columns incident to row `i ≥ 1`.
    pub fn row_cols(&self, i: usize) -> &[usize] {
        &self.row_cols[i]
    }

    /// Whether row `i` is incident to column `j` in the augmented system.
    pub fn incident(&self, i: usize, j: usize) -> bool {
        if i == 0 || j == 0 {
            i == 0 && j == 0
        } else {
            self.system.rank(i, self.col_edge[j]).is_some()
        }
    }

    /// Entry `A[i][j]` of the augmented constraint matrix (0 or 1).
    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.incident(i, j) as i64
    }

    /// Entry `C[i][j]` of the augmented ordinal matrix.
    pub fn c(&self, i: usize, j: usize) -> i64 {
        let m = self.m();
        if i == 0 {
            return if j == 0 { 0 } else { (m + 1 - j) as i64 };
        }
        if j == 0 {
            return (m + 1) as i64;
        }
        match self.system.rank(i, self.col_edge[j]) {
            Some(pos) => (self.system.degree(i) - pos - 1) as i64,
            // Fillers descend left to right: m − (non-incident columns ≤ j).
            None => {
                let incident_le = self.row_cols[i].partition_point(|&c| c <= j);
                (m - (j - incident_le)) as i64
            }
        }
    }

    /// The unaugmented constraint matrix (rows 1..=n × columns 1..=m).
    /// Dense: only use on small instances.
    pub fn dense_a(&self) -> Vec<Vec<i64>> {
        (1..=self.n()).map(|i| (1..=self.m()).map(|j| self.a(i, j)).collect()).collect()
    }

    /// The unaugmented ordinal matrix (rows 1..=n × columns 1..=m).
    /// Dense: only use on small instances.
    pub fn dense_c(&self) -> Vec<Vec<i64>> {
        (1..=self.n()).map(|i| (1..=self.m()).map(|j| self.c(i, j)).collect()).collect()
    }

    /// Render the augmented constraint matrix as a labeled grid.
    pub fn dump_a(&self) -> String {
        self.dump(|i, j| self.a(i, j).to_string())
    }

    /// Render the augmented ordinal matrix as a labeled grid.
    pub fn dump_c(&self) -> String {
        self.dump(|i, j| self.c(i, j).to_string())
    }

    fn dump(&self, entry: impl Fn(usize, usize) -> String) -> String {
        let mut header: Vec<String> = vec!["row".to_string()];
        header.push("0".to_string());
        for j in 1..=self.m() {
            let verts: Vec<String> =
                self.system.edge(self.col_edge[j]).iter().map(|v| v.to_string()).collect();
            header.push(format!("{{{}}}", verts.join(",")));
        }
        let mut rows: Vec<Vec<String>> = vec![header];
        for i in 0..=self.n() {
            let mut row = vec![i.to_string()];
            for j in 0..=self.m() {
                row.push(entry(i, j));
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..=self.m() + 1)
            .map(|k| rows.iter().map(|r| r[k].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &rows {
            for (k, cell) in row.iter().enumerate() {
                if k > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{:>width$}", cell, width = widths[k]);
            }
            out.push('\n');
        }
        out
    }

    /// Comparator view of the ordinal matrix.
    pub fn ordinal_view(&self) -> OrdinalView<'_> {
        OrdinalView { bs: self }
    }
}

/// Row-wise comparisons on the ordinal matrix: row `i` ranks column `j` above
/// column `k` iff `c(i, j) > c(i, k)`. Entries within a row are distinct, so
/// every comparison is strict and argmin/argmax are unique.
#[derive(Clone, Copy)]
pub struct OrdinalView<'a> {
    bs: &'a BlockSystem,
}

impl OrdinalView<'_> {
    /// Whether row `i` ranks column `j` above column `k`.
    pub fn prefers(&self, i: usize, j: usize, k: usize) -> bool {
        self.bs.c(i, j) > self.bs.c(i, k)
    }

    /// The column of `cols` that row `i` ranks highest (maximum entry).
    pub fn best_col(&self, i: usize, cols: impl IntoIterator<Item = usize>) -> Option<usize> {
        cols.into_iter().max_by_key(|&j| self.bs.c(i, j))
    }

    /// The column of `cols` that row `i` ranks lowest (minimum entry) — the
    /// column the row "dislikes", in the sense the ordinal pivots use.
    pub fn worst_col(&self, i: usize, cols: impl IntoIterator<Item = usize>) -> Option<usize> {
        cols.into_iter().min_by_key(|&j| self.bs.c(i, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_vertex_blocks() -> BlockSystem {
        let inst = crate::instance::tests::four_vertex_instance();
        build_block_system(inst.system()).unwrap()
    }

    #[test]
    fn blocks_partition_the_path_edges_by_deepest_vertex() {
        let inst = crate::instance::tests::four_vertex_instance();
        let blocks = build_blocks(inst.system()).unwrap();
        assert_eq!(blocks, vec![vec![], vec![], vec![], vec![5, 6], vec![7, 8]]);
        // Vertex 2 has no singleton: construction succeeds, blocking fails.
        let incomplete =
            PreferenceSystem::new(2, vec![vec![1], vec![1, 2]], vec![vec![2, 1], vec![2]])
                .unwrap();
        assert!(build_blocks(&incomplete).is_err());
    }

    #[test]
    fn column_layout_follows_blocks() {
        let bs = four_vertex_blocks();
        // Singletons occupy columns 1..4; S_3 = {2,3},{1,3}; S_4 = {1,3,4},{3,4}.
        assert_eq!(
            (1..=8).map(|j| bs.edge_of_col(j)).collect::<Vec<_>>(),
            vec![1, 2, 3, 4, 5, 6, 7, 8]
        );
        assert!(bs.block(1).is_empty());
        assert!(bs.block(2).is_empty());
        assert_eq!(bs.block(3), &[5, 6]);
        assert_eq!(bs.block(4), &[7, 8]);
        for j in 0..=4 {
            assert_eq!(bs.block_of_col(j), None);
        }
        assert_eq!(bs.block_of_col(5), Some(3));
        assert_eq!(bs.block_of_col(6), Some(3));
        assert_eq!(bs.block_of_col(7), Some(4));
        assert_eq!(bs.block_of_col(8), Some(4));
    }

    #[test]
    fn four_vertex_matrices_match_hand_computation() {
        let bs = four_vertex_blocks();
        assert_eq!(
            bs.dense_a(),
            vec![
                vec![1, 0, 0, 0, 0, 1, 1, 0],
                vec![0, 1, 0, 0, 1, 0, 0, 0],
                vec![0, 0, 1, 0, 1, 1, 1, 1],
                vec![0, 0, 0, 1, 0, 0, 1, 1],
            ]
        );
        assert_eq!(
            bs.dense_c(),
            vec![
                vec![0, 7, 6, 5, 4, 2, 1, 3],
                vec![7, 0, 6, 5, 1, 4, 3, 2],
                vec![7, 6, 0, 5, 4, 3, 1, 2],
                vec![7, 6, 5, 0, 4, 3, 2, 1],
            ]
        );
    }

    #[test]
    fn augmented_row_and_column() {
        let bs = four_vertex_blocks();
        assert_eq!(bs.c(0, 0), 0);
        assert_eq!((1..=8).map(|j| bs.c(0, j)).collect::<Vec<_>>(), vec![8, 7, 6, 5, 4, 3, 2, 1]);
        for i in 1..=4 {
            assert_eq!(bs.c(i, 0), 9); // strictly above every other entry in the row
            assert_eq!(bs.a(i, 0), 0);
            assert_eq!(bs.a(0, i), 0);
        }
        assert_eq!(bs.a(0, 0), 1);
    }

    #[test]
    fn rows_have_distinct_entries_with_singleton_minimum() {
        let bs = four_vertex_blocks();
        for i in 0..=4 {
            let mut vals: Vec<i64> = (0..=8).map(|j| bs.c(i, j)).collect();
            vals.sort_unstable();
            vals.dedup();
            assert_eq!(vals.len(), 9, "row {} has repeated entries", i);
        }
        for i in 1..=4 {
            for j in 0..=8 {
                if j != i {
                    assert!(bs.c(i, i) < bs.c(i, j), "row {} must like its singleton best", i);
                }
            }
        }
    }

    #[test]
    fn ordinal_view_agrees_with_entries() {
        let bs = four_vertex_blocks();
        let view = bs.ordinal_view();
        for i in 0..=4 {
            for j in 0..=8 {
                for k in 0..=8 {
                    assert_eq!(view.prefers(i, j, k), bs.c(i, j) > bs.c(i, k));
                }
            }
            // Row i ≥ 1 ranks the artificial column highest and its own
            // singleton lowest; row 0 is the other way around.
            assert_eq!(view.best_col(i, 0..=8), Some(if i == 0 { 1 } else { 0 }));
            assert_eq!(view.worst_col(i, 0..=8), Some(if i == 0 { 0 } else { i }));
        }
        // Among row 3's incident columns {2,3} (col 5), {1,3} (col 6),
        // {3,4} (col 8): col 5 is ranked highest, col 8 lowest.
        assert_eq!(view.best_col(3, [5, 6, 8]), Some(5));
        assert_eq!(view.worst_col(3, [5, 6, 8]), Some(8));
    }

    #[test]
    fn invalid_system_is_rejected() {
        let sys = PreferenceSystem::new(2, vec![vec![2], vec![1, 2]], vec![vec![2], vec![2, 1]])
            .unwrap();
        let err = build_block_system(&sys).unwrap_err();
        let BlocksError::InvalidSystem(msg) = err;
        assert!(msg.contains("singleton absent at vertex 1"));
    }

    #[test]
    fn dump_labels_columns_with_vertex_sets() {
        let bs = four_vertex_blocks();
        let grid = bs.dump_c();
        let header = grid.lines().next().unwrap();
        assert!(header.contains("{2,3}"));
        assert!(header.contains("{1,3,4}"));
        let dumped_a = bs.dump_a();
        assert!(dumped_a.lines().count() == 6); // header + rows 0..=4
    }
}
