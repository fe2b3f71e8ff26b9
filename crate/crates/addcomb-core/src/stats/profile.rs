use std::collections::BTreeMap;

use num::rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{F2Set, DENSE_DIM_MAX};
use crate::par;
use crate::rat;
use crate::stats::wht;

/// How to compute a symmetry profile. Both methods return bit-identical
/// results; `Wht` needs a 2^n table and is capped at n <= 24.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileMethod {
    Naive,
    Wht,
}

/// The exact multiset {(s, |A(s)|) : s in 2A} for a base set A — the XOR
/// autocorrelation of the indicator of A.
///
/// Total mass is always |A|^2 and the mean fiber size over 2A is |A|/K.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryProfile {
    dim: u32,
    base_size: u64,
    /// (s, |A(s)|) in ascending s; exactly the s in 2A.
    fibers: Vec<(u64, u64)>,
}

impl SymmetryProfile {
    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// |A|
    pub fn base_size(&self) -> u64 {
        self.base_size
    }

    /// |2A|
    pub fn sumset_size(&self) -> u64 {
        self.fibers.len() as u64
    }

    /// K = |2A| / |A|
    pub fn doubling(&self) -> BigRational {
        rat::ratio_u(self.sumset_size(), self.base_size)
    }

    /// |A(s)|, zero when s is outside 2A.
    pub fn fiber(&self, s: u64) -> u64 {
        match self.fibers.binary_search_by_key(&s, |&(k, _)| k) {
            Ok(i) => self.fibers[i].1,
            Err(_) => 0,
        }
    }

    pub fn fibers(&self) -> &[(u64, u64)] {
        &self.fibers
    }

    /// Sum of all fiber sizes; equals |A|^2 exactly.
    pub fn total_mass(&self) -> u128 {
        self.fibers.iter().map(|&(_, c)| c as u128).sum()
    }

    /// Mean fiber size over s in 2A; equals |A|/K exactly.
    pub fn mean_fiber(&self) -> BigRational {
        BigRational::new(self.total_mass().into(), (self.sumset_size() as u128).into())
    }

    /// fiber size -> number of s in 2A attaining it.
    pub fn histogram(&self) -> BTreeMap<u64, u64> {
        let mut h = BTreeMap::new();
        for &(_, c) in &self.fibers {
            *h.entry(c).or_insert(0) += 1;
        }
        h
    }

    /// 2A as a set (the support of the profile).
    pub fn support_set(&self) -> F2Set {
        F2Set::from_sorted_unchecked(self.dim, self.fibers.iter().map(|&(s, _)| s).collect())
    }
}

/// Computes the exact symmetry profile of a nonempty set.
pub fn symmetry_profile(a: &F2Set, method: ProfileMethod) -> Result<SymmetryProfile> {
    if a.is_empty() {
        return Err(Error::EmptySet { op: "symmetry_profile" });
    }
    let fibers = match method {
        ProfileMethod::Wht => wht::xor_autocorrelation(a)?,
        ProfileMethod::Naive => naive_fiber_counts(a),
    };
    Ok(SymmetryProfile { dim: a.dim(), base_size: a.len() as u64, fibers })
}

/// Picks WHT when the dimension allows it, the naive kernel otherwise.
pub fn symmetry_profile_auto(a: &F2Set) -> Result<SymmetryProfile> {
    let method =
        if a.dim() <= wht::WHT_DIM_MAX { ProfileMethod::Wht } else { ProfileMethod::Naive };
    symmetry_profile(a, method)
}

/// Naive kernel: enumerate all ordered pairs (a1, a2) and count each sum.
/// Chunked so the parallel path merges per-chunk counts; merging is a
/// commutative sum, so results are identical to the sequential path.
pub fn naive_fiber_counts(a: &F2Set) -> Vec<(u64, u64)> {
    let elems = a.bits();
    if a.dim() <= DENSE_DIM_MAX {
        let len = 1usize << a.dim();
        let merged = merge_dense_counts(len, count_chunks_dense(elems, len));
        let mut out = Vec::new();
        for (s, &c) in merged.iter().enumerate() {
            if c > 0 {
                out.push((s as u64, c));
            }
        }
        out
    } else {
        let maps = par::map_slice(&chunk_starts(elems.len()), |&start| {
            let end = (start + par::PAIR_CHUNK).min(elems.len());
            let mut local: BTreeMap<u64, u64> = BTreeMap::new();
            for &x in &elems[start..end] {
                for &y in elems {
                    *local.entry(x ^ y).or_insert(0) += 1;
                }
            }
            local
        });
        let mut merged: BTreeMap<u64, u64> = BTreeMap::new();
        for m in maps {
            for (s, c) in m {
                *merged.entry(s).or_insert(0) += c;
            }
        }
        merged.into_iter().collect()
    }
}

/// Sequential-only naive kernel for the benchmark suite.
pub fn naive_fiber_counts_seq(a: &F2Set) -> Vec<(u64, u64)> {
    let elems = a.bits();
    if a.dim() <= DENSE_DIM_MAX {
        let len = 1usize << a.dim();
        let mut counts = vec![0u64; len];
        for &x in elems {
            for &y in elems {
                counts[(x ^ y) as usize] += 1;
            }
        }
        counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(s, &c)| (s as u64, c))
            .collect()
    } else {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for &x in elems {
            for &y in elems {
                *counts.entry(x ^ y).or_insert(0) += 1;
            }
        }
        counts.into_iter().collect()
    }
}

fn chunk_starts(len: usize) -> Vec<usize> {
    (0..len).step_by(par::PAIR_CHUNK).collect()
}

fn count_chunks_dense(elems: &[u64], len: usize) -> Vec<Vec<u64>> {
    par::map_slice(&chunk_starts(elems.len()), |&start| {
        let end = (start + par::PAIR_CHUNK).min(elems.len());
        let mut local = vec![0u64; len];
        for &x in &elems[start..end] {
            for &y in elems {
                local[(x ^ y) as usize] += 1;
            }
        }
        local
    })
}

fn merge_dense_counts(len: usize, partials: Vec<Vec<u64>>) -> Vec<u64> {
    let mut merged = vec![0u64; len];
    for p in partials {
        for (m, v) in merged.iter_mut().zip(p) {
            *m += v;
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(dim: u32, elems: &[u64]) -> F2Set {
        F2Set::from_bits(dim, elems.iter().copied()).unwrap()
    }

    #[test]
    fn subspace_profile_is_constant() {
        let v = set(3, &[0, 1, 2, 3, 4, 5, 6, 7]);
        let p = symmetry_profile(&v, ProfileMethod::Naive).unwrap();
        assert_eq!(p.sumset_size(), 8);
        assert!(p.fibers().iter().all(|&(_, c)| c == 8));
        assert_eq!(p.doubling(), rat::from_u64(1));
    }

    #[test]
    fn three_element_profile() {
        let a = set(2, &[0b00, 0b01, 0b10]);
        let p = symmetry_profile(&a, ProfileMethod::Naive).unwrap();
        assert_eq!(p.fibers(), &[(0, 3), (1, 2), (2, 2), (3, 2)]);
        assert_eq!(p.total_mass(), 9);
        assert_eq!(p.mean_fiber(), rat::ratio_u(9, 4));
    }

    #[test]
    fn naive_and_wht_agree() {
        let a = set(6, &[1, 5, 9, 17, 33, 48, 60, 63, 2]);
        let naive = symmetry_profile(&a, ProfileMethod::Naive).unwrap();
        let fast = symmetry_profile(&a, ProfileMethod::Wht).unwrap();
        assert_eq!(naive, fast);
    }

    #[test]
    fn naive_handles_hashed_representation() {
        // n = 22 is above the dense threshold
        let elems: Vec<u64> = (0..40u64).map(|i| i * 104729 % (1 << 22)).collect();
        let a = F2Set::from_bits(22, elems).unwrap();
        let p = symmetry_profile(&a, ProfileMethod::Naive).unwrap();
        assert_eq!(p.total_mass(), (a.len() as u128) * (a.len() as u128));
        let q = symmetry_profile(&a, ProfileMethod::Wht).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn seq_kernel_matches_dispatched_kernel() {
        let a = set(7, &[3, 19, 40, 77, 90, 101, 127]);
        assert_eq!(naive_fiber_counts(&a), naive_fiber_counts_seq(&a));
    }
}
