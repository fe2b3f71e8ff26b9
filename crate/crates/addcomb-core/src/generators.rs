//! Deterministic, seeded instance families.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`, a published design with
//! public test vectors) seeded via `seed_from_u64`, and all sampling uses the
//! explicit procedures below (masked rejection for bounded draws, partial
//! Fisher–Yates for without-replacement), so a given `GeneratorSpec` produces
//! a bit-identical set on every platform and in every run.

use num::rational::BigRational;
use num::{Signed, ToPrimitive};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::vector::check_dim;
use crate::gf2::F2Set;
use crate::rat;
use crate::report::rat_serde;

/// A reproducible description of a generated instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// {e_1, ..., e_t}: all vectors with exactly one 1 in the first t coordinates.
    WeightOnePrefix { n: u32, t: u32 },
    /// The span of the first d unit vectors: a full subspace, K = 1.
    Subspace { n: u32, d: u32 },
    /// A seeded uniform sample of ceil(density * 2^d) elements of that subspace.
    DenseSubspaceSample {
        n: u32,
        d: u32,
        #[serde(with = "rat_serde")]
        density: BigRational,
        seed: u64,
    },
    /// The subspace plus k seeded points outside it.
    SubspacePlusPoints { n: u32, d: u32, k: u64, seed: u64 },
    /// m distinct uniform elements of F2^n.
    Random { n: u32, m: u64, seed: u64 },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<F2Set> {
        match self {
            GeneratorSpec::WeightOnePrefix { n, t } => weight_one_prefix(*n, *t),
            GeneratorSpec::Subspace { n, d } => subspace(*n, *d),
            GeneratorSpec::DenseSubspaceSample { n, d, density, seed } => {
                dense_subspace_sample(*n, *d, density, *seed)
            }
            GeneratorSpec::SubspacePlusPoints { n, d, k, seed } => {
                subspace_plus_points(*n, *d, *k, *seed)
            }
            GeneratorSpec::Random { n, m, seed } => random_set(*n, *m, *seed),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            GeneratorSpec::WeightOnePrefix { .. } => "weight-one-prefix",
            GeneratorSpec::Subspace { .. } => "subspace",
            GeneratorSpec::DenseSubspaceSample { .. } => "dense-subspace",
            GeneratorSpec::SubspacePlusPoints { .. } => "subspace-plus-points",
            GeneratorSpec::Random { .. } => "random",
        }
    }
}

/// A = {a : exactly one 1 in the first t coordinates, zero elsewhere}.
/// |A| = t, |2A| = 1 + t(t-1)/2 and span(A) = 2^t.
pub fn weight_one_prefix(n: u32, t: u32) -> Result<F2Set> {
    check_dim(n)?;
    if t == 0 || t > n {
        return Err(Error::InvalidParameter(format!("t = {t} out of 1..={n}")));
    }
    F2Set::from_bits(n, (1..=t).map(|i| 1u64 << (n - i)))
}

/// The span of e_1..e_d: all bit patterns supported on the first d coordinates.
pub fn subspace(n: u32, d: u32) -> Result<F2Set> {
    check_dim(n)?;
    if d > n {
        return Err(Error::InvalidParameter(format!("d = {d} exceeds n = {n}")));
    }
    if d > 24 {
        return Err(Error::CapExceeded { op: "subspace", value: d as u64, cap: 24 });
    }
    let shift = n - d;
    F2Set::from_bits(n, (0..(1u64 << d)).map(|y| y << shift))
}

/// Seeded uniform sample (without replacement) of ceil(density * 2^d)
/// elements of the d-dimensional subspace.
pub fn dense_subspace_sample(n: u32, d: u32, density: &BigRational, seed: u64) -> Result<F2Set> {
    check_dim(n)?;
    if d > n || d > 24 {
        return Err(Error::InvalidParameter(format!("d = {d} out of range (<= n and <= 24)")));
    }
    if !density.is_positive() || density > &rat::from_u64(1) {
        return Err(Error::InvalidParameter(format!("density must lie in (0, 1], got {density}")));
    }
    let total = 1u64 << d;
    let count = rat::ceil_to_uint(&(density * rat::from_u64(total)))
        .to_u64()
        .expect("count <= 2^24");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = sample_without_replacement(&mut rng, total, count);
    let shift = n - d;
    F2Set::from_bits(n, picked.into_iter().map(|y| y << shift))
}

/// The d-dimensional subspace plus k seeded distinct points outside it.
pub fn subspace_plus_points(n: u32, d: u32, k: u64, seed: u64) -> Result<F2Set> {
    check_dim(n)?;
    if d >= n {
        return Err(Error::InvalidParameter(format!("need d < n, got d = {d}, n = {n}")));
    }
    if d > 24 {
        return Err(Error::CapExceeded { op: "subspace_plus_points", value: d as u64, cap: 24 });
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let outside = if n >= 64 {
        u64::MAX - (1u64 << d) + 1 // 2^64 - 2^d, saturating representation
    } else {
        (1u64 << n) - (1u64 << d)
    };
    if k > outside {
        return Err(Error::InvalidParameter(format!(
            "k = {k} points do not fit outside a {d}-dimensional subspace of F2^{n}"
        )));
    }
    let shift = n - d;
    let low_mask = if shift >= 64 { u64::MAX } else { (1u64 << shift) - 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<u64> = Vec::with_capacity(k as usize);
    while (points.len() as u64) < k {
        let x = sample_below_pow2(&mut rng, n);
        let in_subspace = x & low_mask == 0;
        if !in_subspace && !points.contains(&x) {
            points.push(x);
        }
    }
    let base = (0..(1u64 << d)).map(|y| y << shift);
    F2Set::from_bits(n, base.chain(points))
}

/// m distinct seeded-uniform elements of F2^n.
pub fn random_set(n: u32, m: u64, seed: u64) -> Result<F2Set> {
    check_dim(n)?;
    let space = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 }; // 2^n - 1
    if m == 0 || m - 1 > space {
        return Err(Error::InvalidParameter(format!("m = {m} out of 1..=2^{n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n <= 22 {
        let picked = sample_without_replacement(&mut rng, 1u64 << n, m);
        F2Set::from_bits(n, picked)
    } else {
        // rejection with a seen-set; m is far below 2^n in this regime
        let mut seen = std::collections::HashSet::with_capacity(m as usize);
        let mut out = Vec::with_capacity(m as usize);
        while (out.len() as u64) < m {
            let x = sample_below_pow2(&mut rng, n);
            if seen.insert(x) {
                out.push(x);
            }
        }
        F2Set::from_bits(n, out)
    }
}

/// Uniform draw from [0, 2^bits) by masking the next u64.
fn sample_below_pow2(rng: &mut ChaCha8Rng, bits: u32) -> u64 {
    let v = rng.next_u64();
    if bits >= 64 {
        v
    } else {
        v & ((1u64 << bits) - 1)
    }
}

/// Uniform draw from [0, bound) by masked rejection.
fn sample_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    // smallest all-ones mask covering bound - 1
    let mask = bound.next_power_of_two() - 1;
    loop {
        let v = rng.next_u64() & mask;
        if v < bound {
            return v;
        }
    }
}

/// First `count` entries of a partial Fisher–Yates shuffle of 0..total.
fn sample_without_replacement(rng: &mut ChaCha8Rng, total: u64, count: u64) -> Vec<u64> {
    debug_assert!(count <= total);
    let mut pool: Vec<u64> = (0..total).collect();
    for i in 0..count {
        let j = i + sample_below(rng, total - i);
        pool.swap(i as usize, j as usize);
    }
    pool.truncate(count as usize);
    pool
}
