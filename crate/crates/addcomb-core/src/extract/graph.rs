//! The component graph on A: vertices are elements of A, and a1, a2 are
//! adjacent iff a1 + a2 lies in the given label set. Any two vertices in a
//! component differ by a sum of edge labels, so pairwise sums of a component
//! stay inside the span of the label set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::F2Set;

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) {
        let (mut a, mut b) = (self.find(x), self.find(y));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Summary of the label graph: component sizes partition |A| and the edge
/// count satisfies 2|E| = Σ_{s in labels, s != 0} |A(s)|.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentGraph {
    pub vertex_count: u64,
    pub edge_count: u64,
    /// sizes in the canonical order (descending size, then ascending minimum
    /// element); `components[0]` is the extracted component
    pub component_sizes: Vec<u64>,
    pub component_count: u64,
}

/// Builds the graph with edge labels `labels` (which must be a subset of 2A,
/// checked exactly), and returns the largest connected component (ties broken
/// by smallest minimum element) plus the graph summary. Self-loop labels
/// (s = 0) connect nothing and are skipped.
pub fn component_extract(a: &F2Set, labels: &F2Set) -> Result<(F2Set, ComponentGraph)> {
    if a.dim() != labels.dim() {
        return Err(Error::DimMismatch { left: a.dim(), right: labels.dim() });
    }
    if a.is_empty() {
        return Err(Error::EmptySet { op: "component_extract" });
    }
    let double = a.sumset(a)?;
    for &s in labels.bits() {
        if !double.contains_bits(s) {
            return Err(Error::NotContained {
                op: "component_extract",
                what: "label set",
                in_what: "2A",
                witness: format!("{s:0width$b}", width = a.dim() as usize),
            });
        }
    }

    let elems = a.bits();
    let index_of = |bits: u64| elems.binary_search(&bits).expect("member of A");
    let mut uf = UnionFind::new(elems.len());
    let mut edges: u64 = 0;
    for &s in labels.bits() {
        if s == 0 {
            continue;
        }
        for (i, &x) in elems.iter().enumerate() {
            let y = x ^ s;
            if y > x && a.contains_bits(y) {
                edges += 1;
                uf.union(i, index_of(y));
            }
        }
    }

    let mut groups: Vec<Vec<u64>> = vec![Vec::new(); elems.len()];
    for (i, &x) in elems.iter().enumerate() {
        let root = uf.find(i);
        groups[root].push(x);
    }
    let mut components: Vec<Vec<u64>> = groups.into_iter().filter(|g| !g.is_empty()).collect();
    // elements are visited in ascending order, so each group is sorted and
    // g[0] is its minimum
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));

    let summary = ComponentGraph {
        vertex_count: elems.len() as u64,
        edge_count: edges,
        component_sizes: components.iter().map(|c| c.len() as u64).collect(),
        component_count: components.len() as u64,
    };
    let largest = F2Set::from_sorted_unchecked(a.dim(), components[0].clone());
    Ok((largest, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(dim: u32, elems: &[u64]) -> F2Set {
        F2Set::from_bits(dim, elems.iter().copied()).unwrap()
    }

    #[test]
    fn full_label_set_connects_everything() {
        let a = set(3, &[0, 1, 2, 3]);
        let labels = a.sumset(&a).unwrap();
        let (b, g) = component_extract(&a, &labels).unwrap();
        assert_eq!(b, a);
        assert_eq!(g.component_count, 1);
    }

    #[test]
    fn empty_labels_give_singletons() {
        let a = set(3, &[1, 4, 6]);
        let labels = F2Set::empty(3).unwrap();
        let (b, g) = component_extract(&a, &labels).unwrap();
        assert_eq!(b, set(3, &[1])); // smallest element wins the tie
        assert_eq!(g.component_count, 3);
        assert_eq!(g.edge_count, 0);
    }

    #[test]
    fn single_label_pairs_up() {
        // labels {11} on A = {00,01,10,11}: components {00,11} and {01,10}
        let a = set(2, &[0b00, 0b01, 0b10, 0b11]);
        let labels = set(2, &[0b11]);
        let (b, g) = component_extract(&a, &labels).unwrap();
        assert_eq!(b, set(2, &[0b00, 0b11]));
        assert_eq!(g.component_sizes, vec![2, 2]);
        assert_eq!(g.edge_count, 2);
    }

    #[test]
    fn rejects_labels_outside_sumset() {
        let a = set(3, &[0, 1]);
        let labels = set(3, &[0b100]);
        assert!(matches!(component_extract(&a, &labels), Err(Error::NotContained { .. })));
    }

    #[test]
    fn edge_count_identity() {
        let a = set(4, &[0, 1, 2, 3, 5, 9, 14]);
        let double = a.sumset(&a).unwrap();
        let labels = set(4, &double.bits().iter().copied().filter(|&s| s % 3 == 0).collect::<Vec<_>>());
        let (_, g) = component_extract(&a, &labels).unwrap();
        let mass: u64 = labels
            .bits()
            .iter()
            .filter(|&&s| s != 0)
            .map(|&s| a.bits().iter().filter(|&&x| a.contains_bits(x ^ s)).count() as u64)
            .sum();
        assert_eq!(2 * g.edge_count, mass);
    }
}
