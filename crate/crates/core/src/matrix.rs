//! Node compatible matrix: pattern vertices (rows) by data vertices (columns).

use std::fmt;

use crate::graph::{LabeledGraph, Vertex};

/// Binary matrix of admissible node matches, stored as one bitset per row.
///
/// Rows and columns are addressed by 1-based vertex ids of the pattern and
/// data graph respectively.
#[derive(Clone, PartialEq, Eq)]
pub struct CompatibleMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    bits: Vec<u64>,
}

impl CompatibleMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        CompatibleMatrix {
            rows,
            cols,
            words,
            bits: vec![0; rows * words],
        }
    }

    /// The initial matrix: a pattern vertex may map to a data vertex iff the
    /// labels agree and the data vertex has at least the pattern vertex's
    /// degree.
    pub fn initial(pattern: &LabeledGraph, data: &LabeledGraph) -> Self {
        let mut m = Self::zeros(pattern.vertex_count(), data.vertex_count());
        for pv in pattern.vertices() {
            let degree = pattern.neighbors(pv).len();
            let label = pattern.label(pv);
            for dv in data.vertices() {
                if data.label(dv) == label && data.neighbors(dv).len() >= degree {
                    m.set(pv, dv);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn row_words(&self, pv: Vertex) -> &[u64] {
        let start = (pv as usize - 1) * self.words;
        &self.bits[start..start + self.words]
    }

    #[inline]
    fn row_words_mut(&mut self, pv: Vertex) -> &mut [u64] {
        let start = (pv as usize - 1) * self.words;
        &mut self.bits[start..start + self.words]
    }

    #[inline]
    pub fn get(&self, pv: Vertex, dv: Vertex) -> bool {
        let c = dv as usize - 1;
        self.row_words(pv)[c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, pv: Vertex, dv: Vertex) {
        let c = dv as usize - 1;
        self.row_words_mut(pv)[c / 64] |= 1 << (c % 64);
    }

    #[inline]
    pub fn clear(&mut self, pv: Vertex, dv: Vertex) {
        let c = dv as usize - 1;
        self.row_words_mut(pv)[c / 64] &= !(1 << (c % 64));
    }

    /// Zeroes column `dv` in every row.
    pub fn clear_column(&mut self, dv: Vertex) {
        let c = dv as usize - 1;
        let mask = !(1u64 << (c % 64));
        for r in 0..self.rows {
            self.bits[r * self.words + c / 64] &= mask;
        }
    }

    /// Leaves only `dv` set in row `pv` (which may clear it, if it was 0).
    pub fn keep_only(&mut self, pv: Vertex, dv: Vertex) {
        let keep = self.get(pv, dv);
        self.row_words_mut(pv).fill(0);
        if keep {
            self.set(pv, dv);
        }
    }

    pub fn row_count(&self, pv: Vertex) -> usize {
        self.row_words(pv).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_is_zero(&self, pv: Vertex) -> bool {
        self.row_words(pv).iter().all(|&w| w == 0)
    }

    pub fn column_is_zero(&self, dv: Vertex) -> bool {
        (1..=self.rows as Vertex).all(|pv| !self.get(pv, dv))
    }

    /// Data vertices set in row `pv`, ascending.
    pub fn row_ones(&self, pv: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.row_words(pv).iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros();
                w &= w - 1;
                Some((wi * 64 + bit as usize + 1) as Vertex)
            })
        })
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// True iff every 1 in `self` is also a 1 in `other`.
    pub fn is_subset_of(&self, other: &CompatibleMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }
}

impl fmt::Debug for CompatibleMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for pv in 1..=self.rows as Vertex {
            for dv in 1..=self.cols as Vertex {
                f.write_str(if self.get(pv, dv) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{complete_graph, random_labeled_graph};

    #[test]
    fn bit_ops_across_word_boundary() {
        let mut m = CompatibleMatrix::zeros(2, 130);
        m.set(1, 64);
        m.set(1, 65);
        m.set(1, 130);
        m.set(2, 65);
        assert_eq!(m.row_ones(1).collect::<Vec<_>>(), vec![64, 65, 130]);
        m.clear_column(65);
        assert_eq!(m.row_ones(1).collect::<Vec<_>>(), vec![64, 130]);
        assert!(m.row_is_zero(2));
        m.keep_only(1, 130);
        assert_eq!(m.row_count(1), 1);
        assert_eq!(m.count_ones(), 1);
    }

    #[test]
    fn identity_for_uniquely_labeled_self_match() {
        let g = complete_graph(5);
        let m = CompatibleMatrix::initial(&g, &g);
        for pv in g.vertices() {
            assert_eq!(m.row_ones(pv).collect::<Vec<_>>(), vec![pv]);
        }
    }

    #[test]
    fn initial_matches_predicate_cellwise() {
        for seed in 0..10 {
            let g1 = random_labeled_graph(5, 2.0, 3, seed).unwrap();
            let g2 = random_labeled_graph(15, 3.0, 3, seed + 100).unwrap();
            let m = CompatibleMatrix::initial(&g1, &g2);
            for pv in g1.vertices() {
                for dv in g2.vertices() {
                    let expect = g1.label(pv) == g2.label(dv) && g1.degree(pv).unwrap() <= g2.degree(dv).unwrap();
                    assert_eq!(m.get(pv, dv), expect);
                }
            }
        }
    }
}
