use num::bigint::BigInt;
use num::rational::BigRational;
use serde_json::json;

use crate::error::{Error, Result};
use crate::gf2::F2Set;
use crate::par;
use crate::rat;
use crate::report::{CheckResult, CheckStatus, RationalRepr};
use crate::stats::checks::heavy_fiber_hypothesis_holds;
use crate::stats::moments::heavy_fiber_threshold;
use crate::stats::profile::SymmetryProfile;
use crate::stats::moments::z_guard_threshold;

/// The elements of 2A whose fiber has "typical" size:
/// |A|/2K <= |A(s)| <= L|A|/K.
#[derive(Clone, Debug)]
pub struct TypicalSet {
    pub set: F2Set,
    pub lower: BigRational,
    pub upper: BigRational,
    /// |C| / |2A|
    pub density: BigRational,
}

pub fn typical_set(profile: &SymmetryProfile, l: &BigRational) -> TypicalSet {
    let lower = z_guard_threshold(profile);
    let upper = heavy_fiber_threshold(profile, l);
    let elems: Vec<u64> = profile
        .fibers()
        .iter()
        .filter(|&&(_, c)| {
            let c = rat::from_u64(c);
            c >= lower && c <= upper
        })
        .map(|&(s, _)| s)
        .collect();
    let density = rat::ratio_u(elems.len() as u64, profile.sumset_size());
    let set = F2Set::from_sorted_unchecked(profile.dim(), elems);
    TypicalSet { set, lower, upper, density }
}

/// Density bound |C|/|2A| >= 1/4L, asserted when the heavy-fiber hypothesis
/// holds for this L and K >= 2; reported unasserted otherwise.
pub fn typical_density_check(
    profile: &SymmetryProfile,
    ts: &TypicalSet,
    l: &BigRational,
) -> CheckResult {
    let k_ge_2 = profile.doubling() >= rat::from_u64(2);
    let hypothesis = heavy_fiber_hypothesis_holds(profile, l) && k_ge_2;
    let bound = BigRational::new(BigInt::from(1u32), BigInt::from(4u32)) / l;
    let holds = ts.density >= bound;
    let status = match (hypothesis, holds) {
        (true, true) => CheckStatus::Pass,
        (true, false) => CheckStatus::Fail,
        (false, _) => CheckStatus::NotAsserted,
    };
    let mut check = CheckResult::new(
        "typical-density-lower-bound",
        status,
        json!({
            "density": RationalRepr::from(&ts.density),
            "bound_quarter_over_l": RationalRepr::from(&bound),
            "k_ge_2": k_ge_2,
            "typical_size": ts.set.len(),
            "sumset_size": profile.sumset_size(),
        }),
    );
    if !hypothesis {
        check = check.note("hypothesis not satisfied (needs heavy-fiber bound and K >= 2), density reported only");
    }
    check
}

/// Exact Pr over ordered pairs (γ1, γ2) in C^2 that γ1 + γ2 lands in S.
pub fn pair_energy(c: &F2Set, s: &F2Set) -> Result<BigRational> {
    if c.dim() != s.dim() {
        return Err(Error::DimMismatch { left: c.dim(), right: s.dim() });
    }
    if c.is_empty() {
        return Err(Error::EmptySet { op: "pair_energy" });
    }
    let elems = c.bits();
    let count = par::sum_chunks_u128(elems, par::PAIR_CHUNK, |chunk| {
        let mut acc: u128 = 0;
        for &x in chunk {
            for &y in elems {
                if s.contains_bits(x ^ y) {
                    acc += 1;
                }
            }
        }
        acc
    });
    let m = c.len() as u128;
    Ok(BigRational::new(count.into(), (m * m).into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::profile::{symmetry_profile, ProfileMethod};

    fn set(dim: u32, elems: &[u64]) -> F2Set {
        F2Set::from_bits(dim, elems.iter().copied()).unwrap()
    }

    #[test]
    fn subspace_typical_set_is_everything() {
        let v = set(3, &[0, 1, 2, 3]);
        let p = symmetry_profile(&v, ProfileMethod::Naive).unwrap();
        let ts = typical_set(&p, &rat::from_u64(1));
        assert_eq!(ts.set, p.support_set());
        assert_eq!(ts.density, rat::from_u64(1));
    }

    #[test]
    fn three_element_typical_set() {
        // thresholds 9/8 and 9/2 at L = 2: every fiber of {3,2,2,2} qualifies
        let a = set(2, &[0b00, 0b01, 0b10]);
        let p = symmetry_profile(&a, ProfileMethod::Naive).unwrap();
        let ts = typical_set(&p, &rat::from_u64(2));
        assert_eq!(ts.lower, rat::ratio_u(9, 8));
        assert_eq!(ts.upper, rat::ratio_u(9, 2));
        assert_eq!(ts.set, p.support_set());
        assert_eq!(ts.density, rat::from_u64(1));
    }

    #[test]
    fn pair_energy_examples() {
        let v = set(4, &[0, 1, 2, 3]);
        assert_eq!(pair_energy(&v, &v).unwrap(), rat::from_u64(1));
        // C = unit vectors, S = {0}: only the 4 diagonal pairs land in S
        let c = set(4, &[0b1000, 0b0100, 0b0010, 0b0001]);
        let s0 = set(4, &[0]);
        assert_eq!(pair_energy(&c, &s0).unwrap(), rat::ratio_u(1, 4));
    }

    #[test]
    fn pair_energy_monotone_in_s() {
        let c = set(3, &[1, 3, 5, 6]);
        let s1 = set(3, &[0, 2]);
        let s2 = set(3, &[0, 2, 4, 7]);
        assert!(pair_energy(&c, &s1).unwrap() <= pair_energy(&c, &s2).unwrap());
    }
}
