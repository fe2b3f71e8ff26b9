use num::bigint::BigUint;
use num::One;

use crate::error::{Error, Result};
use crate::gf2::set::F2Set;
use crate::gf2::vector::F2Vector;

/// A reduced row-echelon GF(2) basis of the linear span of a set.
///
/// Rows are stored with strictly decreasing leading-bit positions and are
/// fully back-reduced, so the basis is the unique canonical one for the
/// subspace. The span has exactly `2^rank` elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanBasis {
    dim: u32,
    rows: Vec<u64>,
}

impl SpanBasis {
    /// Gaussian elimination over the elements of `a`.
    pub fn from_set(a: &F2Set) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::EmptySet { op: "span_basis" });
        }
        Ok(Self::from_bits(a.dim(), a.bits().iter().copied()))
    }

    /// Builds a basis from raw bit patterns (no range checks).
    pub fn from_bits<I: IntoIterator<Item = u64>>(dim: u32, bits: I) -> Self {
        let mut basis = Self { dim, rows: Vec::new() };
        for b in bits {
            basis.insert(b);
        }
        basis
    }

    /// Inserts a vector, keeping the basis reduced. Returns true if the rank grew.
    pub(crate) fn insert(&mut self, bits: u64) -> bool {
        let v = self.reduce_bits(bits);
        if v == 0 {
            return false;
        }
        let lead = 63 - v.leading_zeros();
        let pos = self.rows.partition_point(|&r| (63 - r.leading_zeros()) > lead);
        self.rows.insert(pos, v);
        // back-reduce rows above the new pivot
        for i in 0..pos {
            if self.rows[i] >> lead & 1 == 1 {
                self.rows[i] ^= v;
            }
        }
        true
    }

    /// Reduces `bits` against the basis; 0 means the vector lies in the span.
    pub fn reduce_bits(&self, bits: u64) -> u64 {
        let mut v = bits;
        for &row in &self.rows {
            let lead = 63 - row.leading_zeros();
            if v >> lead & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    pub fn contains_bits(&self, bits: u64) -> bool {
        self.reduce_bits(bits) == 0
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn rank(&self) -> u32 {
        self.rows.len() as u32
    }

    /// |span| = 2^rank.
    pub fn span_size(&self) -> BigUint {
        BigUint::one() << self.rank()
    }

    /// The rows as vectors, leading bit descending.
    pub fn rows(&self) -> impl Iterator<Item = F2Vector> + '_ {
        let dim = self.dim;
        self.rows.iter().map(move |&r| F2Vector::new(r, dim).expect("invariant"))
    }

    pub fn row_bits(&self) -> &[u64] {
        &self.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(dim: u32, elems: &[u64]) -> F2Set {
        F2Set::from_bits(dim, elems.iter().copied()).unwrap()
    }

    #[test]
    fn two_independent_vectors() {
        let b = SpanBasis::from_set(&set(3, &[0b110, 0b011])).unwrap();
        assert_eq!(b.rank(), 2);
        assert_eq!(b.span_size(), BigUint::from(4u32));
    }

    #[test]
    fn zero_vector_spans_trivial_subspace() {
        let b = SpanBasis::from_set(&set(3, &[0])).unwrap();
        assert_eq!(b.rank(), 0);
        assert_eq!(b.span_size(), BigUint::one());
        assert!(b.contains_bits(0));
        assert!(!b.contains_bits(1));
    }

    #[test]
    fn unit_vectors_full_rank() {
        let b = SpanBasis::from_set(&set(4, &[0b1000, 0b0100, 0b0010, 0b0001])).unwrap();
        assert_eq!(b.rank(), 4);
        assert_eq!(b.span_size(), BigUint::from(16u32));
    }

    #[test]
    fn every_generator_reduces_to_zero() {
        let a = set(5, &[3, 9, 10, 21, 30]);
        let b = SpanBasis::from_set(&a).unwrap();
        for &x in a.bits() {
            assert!(b.contains_bits(x));
        }
    }

    #[test]
    fn rank_stable_under_rerun() {
        let a = set(5, &[3, 9, 10, 21, 30]);
        let b = SpanBasis::from_set(&a).unwrap();
        let rerun = SpanBasis::from_bits(5, b.row_bits().iter().copied().chain(a.bits().iter().copied()));
        assert_eq!(rerun.rank(), b.rank());
        assert_eq!(rerun.row_bits(), b.row_bits());
    }

    #[test]
    fn reduced_echelon_is_canonical() {
        // same subspace from two generating orders
        let b1 = SpanBasis::from_bits(4, [0b1100, 0b0110, 0b1010]);
        let b2 = SpanBasis::from_bits(4, [0b0110, 0b1010, 0b1100]);
        assert_eq!(b1.row_bits(), b2.row_bits());
    }
}
