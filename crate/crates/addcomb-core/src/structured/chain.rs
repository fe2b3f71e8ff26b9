//! The geometric level-set chain and pigeonhole doubling-ratio selection.
//!
//! Chain parameter: δ_j = min(2^j δ̂, 1) for j = 0..=r, where δ̂ is the upper
//! approximation of K^-ε and r is the largest integer with 2^r <= K^ε (so the
//! last exact term lies in (1/2, 1]). Along the chain some consecutive ratio
//! is at most K^((L+1)/(r-1)); the selected level set's span is certified
//! against 2^ceil(2 * 4^(L/ε)) |A+A|, with ceilings taken only in the
//! direction that loosens the bound.

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::SpanBasis;
use crate::par;
use crate::rat;
use crate::report::{rat_serde, rat_serde_opt};
use crate::stats::profile::SymmetryProfile;
use crate::structured::levels::{delta_hat, level_set};

/// Upper bound on the chain length; beyond this ε K-combinations are absurd
/// at desk scale.
const CHAIN_MAX: u32 = 4096;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainReport {
    #[serde(with = "rat_serde")]
    pub eps: BigRational,
    #[serde(with = "rat_serde")]
    pub l: BigRational,
    #[serde(with = "rat_serde")]
    pub doubling: BigRational,
    /// largest r with 2^r <= K^ε
    pub r: u32,
    /// r >= ε log2(K) / 2, exactly
    pub r_lower_ok: bool,
    #[serde(with = "rat_serde")]
    pub delta_hat: BigRational,
    /// |S(min(2^j δ̂, 1))| for j = 0..=r
    pub level_sizes: Vec<u64>,
    /// sizes never decrease along the chain
    pub monotone_ok: bool,
    /// smallest j in 1..=r-1 with |S_(j+1)| <= K^((L+1)/(r-1)) |S_j|
    pub chosen_j: Option<u32>,
    #[serde(default, with = "rat_serde_opt", skip_serializing_if = "Option::is_none")]
    pub chosen_ratio: Option<BigRational>,
    /// (L+1)/(r-1) <= 2L/ε, the premise under which the ratio bound is asserted
    pub ratio_premise: bool,
    /// chosen ratio <= 4^(L/ε); None when not asserted
    pub ratio_bound_ok: Option<bool>,
    pub selected_size: u64,
    pub selected_span_rank: Option<u32>,
    /// ceil(2 * 4^(L/ε)) as a decimal string; None when vacuously huge
    pub fr_exponent: Option<String>,
    /// span(S_j) <= 2^ceil(2 * 4^(L/ε)) |A+A|
    pub span_bound_ok: bool,
    pub span_bound_vacuous: bool,
}

/// Cap on numerators/denominators of ε and L (keeps all exact integer
/// exponentiations at sane sizes).
const EXPONENT_COMPONENT_MAX: u64 = 4096;

/// Largest r with 2^r <= K^ε, exactly: 2^(r q) b^p <= a^p for K = a/b, ε = p/q.
pub fn chain_length(profile: &SymmetryProfile, eps: &BigRational) -> Result<u32> {
    let (p, q) = rat::as_small_ratio(eps, EXPONENT_COMPONENT_MAX)?;
    let (p, q) = (p as u32, q as u32);
    let a = BigUint::from(profile.sumset_size()).pow(p);
    let b = BigUint::from(profile.base_size()).pow(p);
    if a <= b {
        return Err(Error::InvalidParameter(
            "chain requires doubling K > 1 (not a coset of a subspace)".into(),
        ));
    }
    let mut r: u32 = 0;
    while r < CHAIN_MAX && (&b << ((r + 1) * q) as u64) <= a {
        r += 1;
    }
    if r >= CHAIN_MAX {
        return Err(Error::CapExceeded { op: "chain_length", value: r as u64, cap: CHAIN_MAX as u64 });
    }
    Ok(r)
}

pub fn chain_select(
    profile: &SymmetryProfile,
    eps: &BigRational,
    l: &BigRational,
) -> Result<ChainReport> {
    let k = profile.doubling();
    if k == BigRational::one() {
        return Err(Error::InvalidParameter("chain_select requires K > 1".into()));
    }
    let (ep, eq) = rat::as_small_ratio(eps, EXPONENT_COMPONENT_MAX)?;
    let (ln, ld) = rat::as_small_ratio(l, EXPONENT_COMPONENT_MAX)?;
    let r = chain_length(profile, eps)?;
    if r < 2 {
        return Err(Error::InvalidParameter(format!(
            "chain too short (r = {r}): eps too small for this doubling constant"
        )));
    }
    let exponent_guard = |value: u64, what: &'static str| -> Result<u32> {
        u32::try_from(value).ok().filter(|&v| v <= 1 << 16).ok_or(Error::CapExceeded {
            op: what,
            value,
            cap: 1 << 16,
        })
    };

    // r >= ε log2 K / 2  <=>  2^(2 r q) b^p >= a^p
    let a_pow = BigUint::from(profile.sumset_size()).pow(ep as u32);
    let b_pow = BigUint::from(profile.base_size()).pow(ep as u32);
    let r_lower_ok = (&b_pow << (2 * r * eq as u32) as u64) >= a_pow;

    let dh = delta_hat(profile, eps)?;
    let deltas: Vec<BigRational> = (0..=r)
        .map(|j| (rat::from_u64(1u64 << j.min(63)) * &dh).min(BigRational::one()))
        .collect();
    let levels = par::map_slice(&deltas, |d| level_set(profile, d).map(|l| l.set));
    let mut sets = Vec::with_capacity(levels.len());
    for l in levels {
        sets.push(l?);
    }
    let sizes: Vec<u64> = sets.iter().map(|s| s.len() as u64).collect();
    let monotone_ok = sizes.windows(2).all(|w| w[0] <= w[1]);

    // pigeonhole: size_(j+1)^v base^u <= size_j^v sumset^u with u/v = (L+1)/(r-1)
    let u = exponent_guard(ln + ld, "chain pigeonhole exponent")?;
    let v = exponent_guard(ld * (r - 1) as u64, "chain pigeonhole exponent")?;
    let base = BigInt::from(profile.base_size());
    let sumset = BigInt::from(profile.sumset_size());
    let ratio_holds = |j: usize| -> bool {
        let s0 = BigInt::from(sizes[j]);
        let s1 = BigInt::from(sizes[j + 1]);
        s1.pow(v) * base.pow(u) <= s0.pow(v) * sumset.pow(u)
    };
    let chosen_j = (1..r).find(|&j| ratio_holds(j as usize));
    let chosen_ratio = chosen_j.and_then(|j| {
        let s0 = sizes[j as usize];
        let s1 = sizes[j as usize + 1];
        (s0 > 0).then(|| rat::ratio_u(s1, s0))
    });

    // premise (L+1)/(r-1) <= 2L/ε  <=>  ε(L+1) <= 2L(r-1)
    let ratio_premise =
        eps * (l + BigRational::one()) <= rat::from_u64(2) * l * rat::from_u64((r - 1) as u64);
    // ratio <= 4^(L/ε) = 4^(ln eq / (ld ep)):  s1^(ld ep) <= 4^(ln eq) s0^(ld ep)
    let vv = exponent_guard(ld * ep, "chain ratio exponent")?;
    let uu = exponent_guard(ln * eq, "chain ratio exponent")?;
    let ratio_bound_ok = if ratio_premise {
        chosen_j.map(|j| {
            let s0 = BigInt::from(sizes[j as usize]);
            let s1 = BigInt::from(sizes[j as usize + 1]);
            s1.pow(vv) <= BigInt::from(4u32).pow(uu) * s0.pow(vv)
        })
    } else {
        None
    };

    let (selected_size, selected_span_rank) = match chosen_j {
        Some(j) => {
            let set = &sets[j as usize];
            let rank = if set.is_empty() { None } else { Some(SpanBasis::from_set(set)?.rank()) };
            (sizes[j as usize], rank)
        }
        None => (0, None),
    };

    // ceil(2 * 4^(L/ε)): smallest M with M^(ld ep) >= 2^(ld ep + 2 ln eq)
    let fr_exp = rat::ceil_root_pow(&BigUint::from(2u32), vv + 2 * uu, vv, 4096);
    let (span_bound_ok, span_bound_vacuous) = match (&fr_exp, selected_span_rank) {
        (_, None) => (true, false), // empty selection: nothing to bound
        (None, Some(_)) => (true, true),
        (Some(m), Some(rank)) => {
            let log2_sumset = 63 - profile.sumset_size().leading_zeros();
            (BigUint::from(rank) <= m + BigUint::from(log2_sumset), false)
        }
    };

    Ok(ChainReport {
        eps: eps.clone(),
        l: l.clone(),
        doubling: k,
        r,
        r_lower_ok,
        delta_hat: dh,
        level_sizes: sizes,
        monotone_ok,
        chosen_j,
        chosen_ratio,
        ratio_premise,
        ratio_bound_ok,
        selected_size,
        selected_span_rank,
        fr_exponent: fr_exp.map(|m| m.to_string()),
        span_bound_ok,
        span_bound_vacuous,
    })
}

/// The chain's δ values (for containment checks): min(2^j δ̂, 1), j = 1..=r.
pub fn chain_deltas(profile: &SymmetryProfile, eps: &BigRational) -> Result<Vec<BigRational>> {
    let r = chain_length(profile, eps)?;
    let dh = delta_hat(profile, eps)?;
    Ok((1..=r)
        .map(|j| (rat::from_u64(1u64 << j.min(63)) * &dh).min(BigRational::one()))
        .collect())
}
