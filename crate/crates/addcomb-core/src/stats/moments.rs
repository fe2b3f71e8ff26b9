//! Second-moment machinery over symmetry profiles.
//!
//! With β1..β4 uniform in A and s12 = β1+β2, s34 = β3+β4:
//!   Y = |A(s12) ∩ A(s34)|
//!   Z = Y, except 0 when |A(s12)| <= |A|/2K or |A(s34)| <= |A|/2K.
//!
//! E[Z] has the closed form Σ_a q(a)^2 with
//!   q(a) = (1/|A|^2) Σ { |A(s)| : s in a+A, |A(s)| > |A|/2K },
//! and E[Y^2] = Σ_{a1,a2} Pr[{a1,a2} ⊆ A(s12)]^2 where the inner probability
//! counts, via the pair bijection, Σ_{c1 in A(a1+a2)} |A(a1+c1)| pairs.
//! Quadruple-enumeration oracles for both are kept behind a size cap.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::Zero;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::gf2::{F2Set, F2Vector};
use crate::par;
use crate::report::{rat_serde, rat_serde_opt, CheckResult, RationalRepr};
use crate::stats::profile::SymmetryProfile;

/// Largest |A| for which the quadruple-enumeration oracles run.
pub const BRUTE_SET_MAX: usize = 24;

/// Largest |2A| for which the exact Pr[Z>0] fiber-pair enumeration runs.
pub const PR_Z_SUMSET_MAX: u64 = 4096;

/// Largest |A| for which the bijection check materializes both pair sets.
pub const BIJECTION_SET_MAX: usize = 512;

/// Guard for the u128 accumulators in the closed forms.
const MOMENT_SET_MAX: usize = 1 << 24;

/// |A(s)| > |A|/2K, the strict guard in Z's definition, as an integer test:
/// 2 * c * |2A| > |A|^2.
#[inline]
fn fiber_above_z_threshold(c: u64, base: u64, sumset: u64) -> bool {
    2 * c as u128 * sumset as u128 > (base as u128) * (base as u128)
}

fn check_moment_cap(a: &F2Set, op: &'static str) -> Result<()> {
    if a.len() > MOMENT_SET_MAX {
        return Err(Error::CapExceeded { op, value: a.len() as u64, cap: MOMENT_SET_MAX as u64 });
    }
    Ok(())
}

/// Exact E[Z] via the closed form E[Z] = Σ_a q(a)^2.
pub fn expectation_z(a: &F2Set, profile: &SymmetryProfile) -> Result<BigRational> {
    check_moment_cap(a, "expectation_z")?;
    if a.is_empty() {
        return Err(Error::EmptySet { op: "expectation_z" });
    }
    let base = profile.base_size();
    let sumset = profile.sumset_size();
    let elems = a.bits();
    // per-element numerators q(a) * |A|^2, each at most |A|^2
    let partials = par::map_slice(elems, |&x| {
        let mut q_num: u128 = 0;
        for &y in elems {
            let c = profile.fiber(x ^ y);
            if fiber_above_z_threshold(c, base, sumset) {
                q_num += c as u128;
            }
        }
        q_num * q_num
    });
    let sum: BigInt = partials.into_iter().map(BigInt::from).sum();
    let denom = BigInt::from(base).pow(4);
    Ok(BigRational::new(sum, denom))
}

/// Which route computes E[Y^2].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Y2Method {
    /// Pair-count identity route: O(|A|^3).
    Lemma4,
    /// Literal enumeration of all |A|^4 quadruples; capped at |A| <= 24.
    Brute,
}

/// Exact E[Y^2].
pub fn expectation_y2(a: &F2Set, profile: &SymmetryProfile, method: Y2Method) -> Result<BigRational> {
    match method {
        Y2Method::Lemma4 => expectation_y2_pair_counts(a, profile),
        Y2Method::Brute => Ok(quadruple_brute(a, profile)?.e_y2),
    }
}

fn expectation_y2_pair_counts(a: &F2Set, profile: &SymmetryProfile) -> Result<BigRational> {
    check_moment_cap(a, "expectation_y2")?;
    if a.is_empty() {
        return Err(Error::EmptySet { op: "expectation_y2" });
    }
    let elems = a.bits();
    let partials = par::map_slice(elems, |&a1| {
        // g[c1] = |A(a1 + c1)|
        let g: Vec<u64> = elems.iter().map(|&c1| profile.fiber(a1 ^ c1)).collect();
        let mut acc: u128 = 0;
        for &a2 in elems {
            let s = a1 ^ a2;
            // Σ_{c1 in A(a1+a2)} |A(a1+c1)|
            let mut n12: u128 = 0;
            for (i, &c1) in elems.iter().enumerate() {
                if a.contains_bits(c1 ^ s) {
                    n12 += g[i] as u128;
                }
            }
            acc += n12 * n12;
        }
        acc
    });
    let sum: BigInt = partials.into_iter().map(BigInt::from).sum();
    let denom = BigInt::from(profile.base_size()).pow(4);
    Ok(BigRational::new(sum, denom))
}

/// Results of the literal quadruple enumeration.
#[derive(Clone, Debug)]
pub struct BruteMoments {
    pub e_z: BigRational,
    pub e_y2: BigRational,
}

/// Enumerates all |A|^4 quadruples (via their sum pairs, with multiplicity)
/// and returns exact E[Z] and E[Y^2]. Capped at |A| <= 24 so fibers fit in a
/// u32 index mask.
pub fn quadruple_brute(a: &F2Set, profile: &SymmetryProfile) -> Result<BruteMoments> {
    if a.is_empty() {
        return Err(Error::EmptySet { op: "quadruple_brute" });
    }
    if a.len() > BRUTE_SET_MAX {
        return Err(Error::CapExceeded {
            op: "quadruple_brute",
            value: a.len() as u64,
            cap: BRUTE_SET_MAX as u64,
        });
    }
    let elems = a.bits();
    let base = profile.base_size();
    let sumset = profile.sumset_size();
    // for every ordered pair (β1, β2): the fiber mask of s = β1+β2 over A's
    // index space, its size, and the Z-guard bit
    struct PairInfo {
        mask: u32,
        above: bool,
    }
    let mut pairs = Vec::with_capacity(elems.len() * elems.len());
    for &b1 in elems {
        for &b2 in elems {
            let s = b1 ^ b2;
            let mut mask = 0u32;
            for (i, &x) in elems.iter().enumerate() {
                if a.contains_bits(x ^ s) {
                    mask |= 1 << i;
                }
            }
            let c = mask.count_ones() as u64;
            debug_assert_eq!(c, profile.fiber(s));
            pairs.push(PairInfo { mask, above: fiber_above_z_threshold(c, base, sumset) });
        }
    }
    let mut z_sum: u128 = 0;
    let mut y2_sum: u128 = 0;
    for p12 in &pairs {
        for p34 in &pairs {
            let y = (p12.mask & p34.mask).count_ones() as u128;
            y2_sum += y * y;
            if p12.above && p34.above {
                z_sum += y;
            }
        }
    }
    let denom = BigInt::from(base).pow(4);
    Ok(BruteMoments {
        e_z: BigRational::new(z_sum.into(), denom.clone()),
        e_y2: BigRational::new(y2_sum.into(), denom),
    })
}

/// Witness data for the pair-count bijection between
///   {(β1,β2) : {a1,a2} ⊆ A(β1+β2)}   and
///   {(c1,β2) : c1 in A(a1+a2), β2 in A(a1+c1)}
/// under (β1,β2) -> (a1+β1+β2, β2).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BijectionCheck {
    pub first_set_size: u64,
    pub second_set_size: u64,
    pub image_in_second: bool,
    pub injective: bool,
    pub preimage_in_first: bool,
    pub passed: bool,
}

pub fn lemma8_bijection_check(a: &F2Set, a1: &F2Vector, a2: &F2Vector) -> Result<BijectionCheck> {
    if !a.contains(a1) {
        return Err(Error::NotContained {
            op: "lemma8_bijection_check",
            what: "a1",
            in_what: "A",
            witness: a1.to_string(),
        });
    }
    if !a.contains(a2) {
        return Err(Error::NotContained {
            op: "lemma8_bijection_check",
            what: "a2",
            in_what: "A",
            witness: a2.to_string(),
        });
    }
    if a.len() > BIJECTION_SET_MAX {
        return Err(Error::CapExceeded {
            op: "lemma8_bijection_check",
            value: a.len() as u64,
            cap: BIJECTION_SET_MAX as u64,
        });
    }
    let (a1, a2) = (a1.bits(), a2.bits());
    let elems = a.bits();

    let mut first: BTreeSet<(u64, u64)> = BTreeSet::new();
    for &b1 in elems {
        for &b2 in elems {
            let s = b1 ^ b2;
            if a.contains_bits(a1 ^ s) && a.contains_bits(a2 ^ s) {
                first.insert((b1, b2));
            }
        }
    }

    let mut second: BTreeSet<(u64, u64)> = BTreeSet::new();
    for &c1 in elems {
        if !a.contains_bits(c1 ^ a1 ^ a2) {
            continue; // c1 not in A(a1+a2)
        }
        for &b2 in elems {
            if a.contains_bits(b2 ^ a1 ^ c1) {
                second.insert((c1, b2));
            }
        }
    }

    let mut image = BTreeSet::new();
    let mut image_in_second = true;
    for &(b1, b2) in &first {
        let mapped = (a1 ^ b1 ^ b2, b2);
        image_in_second &= second.contains(&mapped);
        image.insert(mapped);
    }
    let injective = image.len() == first.len();
    let preimage_in_first =
        second.iter().all(|&(c1, b2)| first.contains(&(a1 ^ b2 ^ c1, b2)));
    let sizes_equal = first.len() == second.len();

    Ok(BijectionCheck {
        first_set_size: first.len() as u64,
        second_set_size: second.len() as u64,
        image_in_second,
        injective,
        preimage_in_first,
        passed: image_in_second && injective && preimage_in_first && sizes_equal,
    })
}

/// The exact quantities of the second-moment step, all as rationals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentReport {
    pub base_size: u64,
    pub sumset_size: u64,
    #[serde(with = "rat_serde")]
    pub doubling: BigRational,
    #[serde(with = "rat_serde")]
    pub e_z: BigRational,
    #[serde(with = "rat_serde")]
    pub e_y2: BigRational,
    #[serde(with = "rat_serde")]
    pub pr_z_positive: BigRational,
    /// E[Z]^2 / E[Y^2]; zero when E[Y^2] = 0.
    #[serde(with = "rat_serde")]
    pub paley_zygmund_lower: BigRational,
    /// |A|/2K, the guard threshold in Z.
    #[serde(with = "rat_serde")]
    pub z_threshold: BigRational,
    /// L|A|/K when an L was supplied.
    #[serde(default, with = "rat_serde_opt", skip_serializing_if = "Option::is_none")]
    pub heavy_threshold: Option<BigRational>,
}

impl MomentReport {
    pub fn to_check(&self) -> CheckResult {
        let chain_ok = self.pr_z_positive >= self.paley_zygmund_lower;
        CheckResult::from_bool(
            "eq6-second-moment-chain",
            chain_ok,
            json!({
                "pr_z_positive": RationalRepr::from(&self.pr_z_positive),
                "paley_zygmund_lower": RationalRepr::from(&self.paley_zygmund_lower),
                "e_z": RationalRepr::from(&self.e_z),
                "e_y2": RationalRepr::from(&self.e_y2),
            }),
        )
    }
}

/// Exact Pr[Z > 0] by enumerating pairs of fibers with multiplicity,
/// plus the full moment report. Capped at |2A| <= 4096.
pub fn pr_z_positive(
    a: &F2Set,
    profile: &SymmetryProfile,
    heavy_l: Option<&BigRational>,
) -> Result<MomentReport> {
    if profile.sumset_size() > PR_Z_SUMSET_MAX {
        return Err(Error::CapExceeded {
            op: "pr_z_positive",
            value: profile.sumset_size(),
            cap: PR_Z_SUMSET_MAX,
        });
    }
    let base = profile.base_size();
    let sumset = profile.sumset_size();
    let elems = a.bits();
    let words = elems.len().div_ceil(64);

    // fibers above the Z guard, with index masks over A
    let qualifying: Vec<(u64, u64)> = profile
        .fibers()
        .iter()
        .copied()
        .filter(|&(_, c)| fiber_above_z_threshold(c, base, sumset))
        .collect();
    let masks: Vec<Vec<u64>> = par::map_slice(&qualifying, |&(s, _)| {
        let mut mask = vec![0u64; words];
        for (i, &x) in elems.iter().enumerate() {
            if a.contains_bits(x ^ s) {
                mask[i / 64] |= 1 << (i % 64);
            }
        }
        mask
    });

    let count: u128 = par::sum_chunks_u128(
        &(0..qualifying.len()).collect::<Vec<_>>(),
        8,
        |chunk| {
            let mut acc: u128 = 0;
            for &i in chunk {
                let (_, c1) = qualifying[i];
                for (j, &(_, c2)) in qualifying.iter().enumerate() {
                    let intersects =
                        masks[i].iter().zip(&masks[j]).any(|(&x, &y)| x & y != 0);
                    if intersects {
                        acc += c1 as u128 * c2 as u128;
                    }
                }
            }
            acc
        },
    );

    let denom = BigInt::from(base).pow(4);
    let pr = BigRational::new(count.into(), denom);
    let e_z = expectation_z(a, profile)?;
    let e_y2 = expectation_y2_pair_counts(a, profile)?;
    let pz = if e_y2.is_zero() {
        BigRational::zero()
    } else {
        &e_z * &e_z / &e_y2
    };
    let z_threshold =
        BigRational::new(BigInt::from(base) * BigInt::from(base), BigInt::from(2u32) * BigInt::from(sumset));
    let heavy_threshold = heavy_l.map(|l| heavy_fiber_threshold(profile, l));
    Ok(MomentReport {
        base_size: base,
        sumset_size: sumset,
        doubling: profile.doubling(),
        e_z,
        e_y2,
        pr_z_positive: pr,
        paley_zygmund_lower: pz,
        z_threshold,
        heavy_threshold,
    })
}

/// L|A|/K = L |A|^2 / |2A|.
pub fn heavy_fiber_threshold(profile: &SymmetryProfile, l: &BigRational) -> BigRational {
    let base = BigInt::from(profile.base_size());
    l * BigRational::new(&base * &base, BigInt::from(profile.sumset_size()))
}

/// |A|/2K = |A|^2 / (2 |2A|).
pub fn z_guard_threshold(profile: &SymmetryProfile) -> BigRational {
    let base = BigInt::from(profile.base_size());
    BigRational::new(&base * &base, BigInt::from(2 * profile.sumset_size()))
}

/// Re-exported for callers that need the strict guard test on raw counts.
pub fn fiber_is_above_z_guard(profile: &SymmetryProfile, count: u64) -> bool {
    fiber_above_z_threshold(count, profile.base_size(), profile.sumset_size())
}

impl From<&BijectionCheck> for CheckResult {
    fn from(b: &BijectionCheck) -> Self {
        CheckResult::from_bool("lemma8-pair-bijection", b.passed, json!(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;
    use crate::stats::profile::{symmetry_profile, ProfileMethod};

    fn set(dim: u32, elems: &[u64]) -> F2Set {
        F2Set::from_bits(dim, elems.iter().copied()).unwrap()
    }

    fn profile(a: &F2Set) -> SymmetryProfile {
        symmetry_profile(a, ProfileMethod::Naive).unwrap()
    }

    #[test]
    fn subspace_moments() {
        // A a subspace of size 8: Z = 8 always, Y = 8 always
        let v = set(3, &[0, 1, 2, 3, 4, 5, 6, 7]);
        let p = profile(&v);
        assert_eq!(expectation_z(&v, &p).unwrap(), rat::from_u64(8));
        assert_eq!(
            expectation_y2(&v, &p, Y2Method::Lemma4).unwrap(),
            rat::from_u64(64)
        );
        let report = pr_z_positive(&v, &p, None).unwrap();
        assert_eq!(report.pr_z_positive, rat::from_u64(1));
    }

    #[test]
    fn three_element_expectation_z() {
        // A = {00,01,10}: every fiber clears |A|/2K = 9/8, so q(a) = 7/9 for
        // each element and E[Z] = 3 (7/9)^2 = 49/27.
        let a = set(2, &[0b00, 0b01, 0b10]);
        let p = profile(&a);
        let e_z = expectation_z(&a, &p).unwrap();
        assert_eq!(e_z, rat::ratio_u(49, 27));
        // Lemma 6 bound |A|/16K^2 = 27/256
        assert!(e_z >= rat::ratio_u(27, 256));
        // closed form agrees with the quadruple oracle
        let brute = quadruple_brute(&a, &p).unwrap();
        assert_eq!(brute.e_z, e_z);
    }

    #[test]
    fn y2_routes_agree() {
        let a = set(2, &[0b00, 0b01, 0b10]);
        let p = profile(&a);
        let fast = expectation_y2(&a, &p, Y2Method::Lemma4).unwrap();
        let brute = expectation_y2(&a, &p, Y2Method::Brute).unwrap();
        assert_eq!(fast, brute);
    }

    #[test]
    fn brute_cap_enforced() {
        let a = set(6, &(0..32u64).collect::<Vec<_>>());
        let p = profile(&a);
        assert!(matches!(
            expectation_y2(&a, &p, Y2Method::Brute),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn bijection_example() {
        // A = {00,01,10}, a1 = 00, a2 = 01: both sets have 5 elements
        let a = set(2, &[0b00, 0b01, 0b10]);
        let v = |b| F2Vector::new(b, 2).unwrap();
        let check = lemma8_bijection_check(&a, &v(0b00), &v(0b01)).unwrap();
        assert!(check.passed);
        assert_eq!(check.first_set_size, 5);
        assert_eq!(check.second_set_size, 5);
    }

    #[test]
    fn bijection_degenerate_equal_arguments() {
        // a1 = a2: both sets have Σ_{c1 in A} |A(a1+c1)| elements
        let a = set(2, &[0b00, 0b01, 0b10]);
        let p = profile(&a);
        let v = |b| F2Vector::new(b, 2).unwrap();
        let check = lemma8_bijection_check(&a, &v(0b01), &v(0b01)).unwrap();
        assert!(check.passed);
        let expected: u64 = a.bits().iter().map(|&c1| p.fiber(0b01 ^ c1)).sum();
        assert_eq!(check.first_set_size, expected);
    }

    #[test]
    fn bijection_rejects_outsiders() {
        let a = set(2, &[0b00, 0b01, 0b10]);
        let v = |b| F2Vector::new(b, 2).unwrap();
        assert!(lemma8_bijection_check(&a, &v(0b11), &v(0b00)).is_err());
    }

    #[test]
    fn second_moment_chain_small_example() {
        let a = set(2, &[0b00, 0b01, 0b10]);
        let p = profile(&a);
        let report = pr_z_positive(&a, &p, Some(&rat::from_u64(2))).unwrap();
        assert!(report.pr_z_positive >= report.paley_zygmund_lower);
        assert!(report.to_check().passed());
        assert_eq!(report.heavy_threshold, Some(rat::ratio_u(9, 2)));
    }
}
