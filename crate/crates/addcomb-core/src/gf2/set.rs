use std::collections::HashSet;
use std::fmt;

use num::rational::BigRational;

use crate::error::{Error, Result};
use crate::gf2::vector::{check_dim, F2Vector};
use crate::rat;

/// Dimension at or below which sets keep a dense 2^n-bit membership bitmap.
pub const DENSE_DIM_MAX: u32 = 20;

#[derive(Clone)]
enum Membership {
    Dense(Vec<u64>),
    Hashed(HashSet<u64>),
}

impl Membership {
    fn build(dim: u32, elems: &[u64]) -> Self {
        if dim <= DENSE_DIM_MAX {
            let words = (1usize << dim).div_ceil(64);
            let mut bitmap = vec![0u64; words];
            for &e in elems {
                bitmap[(e >> 6) as usize] |= 1 << (e & 63);
            }
            Membership::Dense(bitmap)
        } else {
            Membership::Hashed(elems.iter().copied().collect())
        }
    }

    #[inline]
    fn contains(&self, bits: u64) -> bool {
        match self {
            Membership::Dense(bitmap) => bitmap[(bits >> 6) as usize] >> (bits & 63) & 1 == 1,
            Membership::Hashed(set) => set.contains(&bits),
        }
    }
}

/// A finite subset of F2^n with O(1) membership and canonical
/// (ascending bit pattern) iteration order.
///
/// The element list is kept sorted and deduplicated; a dense bitmap backs
/// membership for n <= 20 and a hash set above that. Both representations
/// iterate through the same sorted list, so downstream output is
/// deterministic regardless of representation.
#[derive(Clone)]
pub struct F2Set {
    dim: u32,
    elems: Vec<u64>,
    membership: Membership,
}

impl F2Set {
    /// Builds a set from raw bit patterns, deduplicating and sorting.
    pub fn from_bits<I: IntoIterator<Item = u64>>(dim: u32, bits: I) -> Result<Self> {
        check_dim(dim)?;
        let mut elems: Vec<u64> = bits.into_iter().collect();
        for &e in &elems {
            if dim < 64 && e >> dim != 0 {
                return Err(Error::ElementOutOfRange { op: "F2Set::from_bits", elem: e, dim });
            }
        }
        elems.sort_unstable();
        elems.dedup();
        Ok(Self::from_sorted_unchecked(dim, elems))
    }

    pub fn from_vectors<I: IntoIterator<Item = F2Vector>>(dim: u32, vectors: I) -> Result<Self> {
        check_dim(dim)?;
        let mut elems = Vec::new();
        for v in vectors {
            if v.dim() != dim {
                return Err(Error::DimMismatch { left: dim, right: v.dim() });
            }
            elems.push(v.bits());
        }
        elems.sort_unstable();
        elems.dedup();
        Ok(Self::from_sorted_unchecked(dim, elems))
    }

    pub fn empty(dim: u32) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::from_sorted_unchecked(dim, Vec::new()))
    }

    /// Internal constructor: `elems` must already be sorted, deduplicated and
    /// within range.
    pub(crate) fn from_sorted_unchecked(dim: u32, elems: Vec<u64>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        let membership = Membership::build(dim, &elems);
        Self { dim, elems, membership }
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    #[inline]
    pub fn contains_bits(&self, bits: u64) -> bool {
        self.membership.contains(bits)
    }

    pub fn contains(&self, v: &F2Vector) -> bool {
        v.dim() == self.dim && self.contains_bits(v.bits())
    }

    /// Elements in ascending bit-pattern order.
    #[inline]
    pub fn bits(&self) -> &[u64] {
        &self.elems
    }

    pub fn iter_vectors(&self) -> impl Iterator<Item = F2Vector> + '_ {
        let dim = self.dim;
        self.elems.iter().map(move |&b| F2Vector::new(b, dim).expect("invariant"))
    }

    pub fn min_element(&self) -> Option<u64> {
        self.elems.first().copied()
    }

    pub fn is_subset_of(&self, other: &F2Set) -> bool {
        self.dim == other.dim && self.elems.iter().all(|&e| other.contains_bits(e))
    }

    fn check_same_dim(&self, other: &F2Set) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    /// The sumset {a + b : a in self, b in other}; with `other = self` this
    /// is the doubling 2A.
    pub fn sumset(&self, other: &F2Set) -> Result<F2Set> {
        self.check_same_dim(other)?;
        if self.is_empty() || other.is_empty() {
            return Err(Error::EmptySet { op: "sumset" });
        }
        if self.dim <= DENSE_DIM_MAX {
            let words = (1usize << self.dim).div_ceil(64);
            let mut bitmap = vec![0u64; words];
            for &a in &self.elems {
                for &b in &other.elems {
                    let s = a ^ b;
                    bitmap[(s >> 6) as usize] |= 1 << (s & 63);
                }
            }
            let mut out = Vec::new();
            for (w, &word) in bitmap.iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    let bit = word.trailing_zeros() as u64;
                    out.push((w as u64) << 6 | bit);
                    word &= word - 1;
                }
            }
            Ok(F2Set::from_sorted_unchecked(self.dim, out))
        } else {
            let mut out: Vec<u64> =
                self.elems.iter().flat_map(|&a| other.elems.iter().map(move |&b| a ^ b)).collect();
            out.sort_unstable();
            out.dedup();
            Ok(F2Set::from_sorted_unchecked(self.dim, out))
        }
    }

    /// The translate {a + x : a in self}.
    pub fn translate(&self, x: &F2Vector) -> Result<F2Set> {
        if x.dim() != self.dim {
            return Err(Error::DimMismatch { left: self.dim, right: x.dim() });
        }
        let mut out: Vec<u64> = self.elems.iter().map(|&a| a ^ x.bits()).collect();
        out.sort_unstable();
        Ok(F2Set::from_sorted_unchecked(self.dim, out))
    }

    /// The symmetry set A(s) = A ∩ (s + A) = {a in A : a + s in A}.
    ///
    /// Its size equals the number of ordered pairs (a1, a2) in A^2 with
    /// a1 + a2 = s.
    pub fn symmetry_set(&self, s: &F2Vector) -> Result<F2Set> {
        if s.dim() != self.dim {
            return Err(Error::DimMismatch { left: self.dim, right: s.dim() });
        }
        let sb = s.bits();
        let out: Vec<u64> = self.elems.iter().copied().filter(|&a| self.contains_bits(a ^ sb)).collect();
        Ok(F2Set::from_sorted_unchecked(self.dim, out))
    }

    /// The doubling constant K = |2A| / |A|, exactly.
    pub fn doubling(&self) -> Result<BigRational> {
        if self.is_empty() {
            return Err(Error::EmptySet { op: "doubling" });
        }
        let double = self.sumset(self)?;
        Ok(rat::ratio_u(double.len() as u64, self.len() as u64))
    }
}

impl PartialEq for F2Set {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.elems == other.elems
    }
}

impl Eq for F2Set {}

impl fmt::Debug for F2Set {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Set(n={}, {} elements)", self.dim, self.elems.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(dim: u32, elems: &[u64]) -> F2Set {
        F2Set::from_bits(dim, elems.iter().copied()).unwrap()
    }

    #[test]
    fn sumset_identity_element() {
        let zero = set(2, &[0]);
        let b = set(2, &[0b01, 0b10]);
        assert_eq!(zero.sumset(&b).unwrap(), b);
    }

    #[test]
    fn sumset_all_four() {
        let a = set(2, &[0b00, 0b01]);
        let b = set(2, &[0b00, 0b10]);
        assert_eq!(a.sumset(&b).unwrap(), set(2, &[0b00, 0b01, 0b10, 0b11]));
    }

    #[test]
    fn sumset_errors() {
        let a = set(2, &[0]);
        let b = set(3, &[0]);
        assert!(matches!(a.sumset(&b), Err(Error::DimMismatch { .. })));
        let e = F2Set::empty(2).unwrap();
        assert!(matches!(a.sumset(&e), Err(Error::EmptySet { .. })));
    }

    #[test]
    fn symmetry_set_examples() {
        // A = {00, 01, 10}
        let a = set(2, &[0b00, 0b01, 0b10]);
        let at = |s: u64| a.symmetry_set(&F2Vector::new(s, 2).unwrap()).unwrap();
        assert_eq!(at(0b00), a); // A(0) = A
        assert_eq!(at(0b11), set(2, &[0b01, 0b10]));
        assert_eq!(at(0b01), set(2, &[0b00, 0b01]));
    }

    #[test]
    fn doubling_examples() {
        // full subspace: K = 1
        let v = set(3, &[0, 1, 2, 3]);
        assert_eq!(v.doubling().unwrap(), rat::from_u64(1));
        // {00,01,10}: K = 4/3
        let a = set(2, &[0b00, 0b01, 0b10]);
        assert_eq!(a.doubling().unwrap(), rat::ratio_u(4, 3));
    }

    #[test]
    fn translate_preserves_cardinality() {
        let a = set(2, &[0b00, 0b01]);
        let t = a.translate(&F2Vector::new(0b11, 2).unwrap()).unwrap();
        assert_eq!(t, set(2, &[0b11, 0b10]));
        assert_eq!(t.len(), a.len());
        let id = a.translate(&F2Vector::zero(2).unwrap()).unwrap();
        assert_eq!(id, a);
    }

    #[test]
    fn dense_and_hashed_agree() {
        // same logical set at n = 20 (dense) vs n = 21 (hashed), low bits only
        let elems: Vec<u64> = (0..200u64).map(|i| i * 37 % 1024).collect();
        let dense = F2Set::from_bits(20, elems.iter().copied()).unwrap();
        let hashed = F2Set::from_bits(21, elems.iter().copied()).unwrap();
        assert_eq!(dense.bits(), hashed.bits());
        for x in 0..1024 {
            assert_eq!(dense.contains_bits(x), hashed.contains_bits(x));
        }
    }
}
