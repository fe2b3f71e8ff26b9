//! End-to-end structured-case extraction: the near-full-fiber set B through
//! a base point a*, exact containments, the geometric chain, and span
//! certification against the doubling-ratio bound.

use num::bigint::BigUint;
use num::rational::BigRational;
use num::{One, Signed};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::extract::pipeline::SetSummary;
use crate::gf2::{F2Set, F2Vector, SpanBasis};
use crate::rat;
use crate::report::{rat_serde, rat_serde_opt, CheckResult, RationalRepr};
use crate::stats::profile::{symmetry_profile_auto, SymmetryProfile};
use crate::structured::chain::{chain_deltas, chain_select, ChainReport};
use crate::structured::levels::{
    b_size_hypothesis_holds, containment_checks, delta_hat, eps_gate_check, scan_a_star,
    smallest_integer_l, structured_b,
};

const REPORT_SUBSET_MAX: usize = 4096;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructuredReport {
    pub input: SetSummary,
    #[serde(with = "rat_serde")]
    pub eps: BigRational,
    #[serde(with = "rat_serde")]
    pub l: BigRational,
    pub force: bool,
    /// binary rendering of the base point used
    pub a_star: Option<String>,
    /// true when a* came from the averaging scan rather than the caller
    pub a_star_scanned: bool,
    pub k1_fast_path: bool,
    #[serde(default, with = "rat_serde_opt", skip_serializing_if = "Option::is_none")]
    pub delta_hat: Option<BigRational>,
    pub checks: Vec<CheckResult>,
    pub gate_failures: Vec<String>,
    pub stopped_at: Option<String>,
    pub completed: bool,
    pub subset_size: Option<u64>,
    #[serde(default, with = "rat_serde_opt", skip_serializing_if = "Option::is_none")]
    pub subset_ratio: Option<BigRational>,
    /// smallest integer L' with |B| >= K^-L' |A|
    pub smallest_integer_l: Option<u32>,
    pub subset_span_rank: Option<u32>,
    pub subset_span_size: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset_elements: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainReport>,
}

impl StructuredReport {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn flagged_findings(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| c.is_flagged()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct StructuredOutcome {
    pub report: StructuredReport,
    pub subset: Option<F2Set>,
}

pub fn structured_pipeline(
    a: &F2Set,
    a_star: Option<F2Vector>,
    eps: &BigRational,
    l: &BigRational,
    force: bool,
) -> Result<StructuredOutcome> {
    if !eps.is_positive() || !l.is_positive() {
        return Err(Error::InvalidParameter("eps and L must be positive".into()));
    }
    let profile = symmetry_profile_auto(a)?;
    let mut report = StructuredReport {
        input: SetSummary::from_profile(&profile),
        eps: eps.clone(),
        l: l.clone(),
        force,
        a_star: None,
        a_star_scanned: false,
        k1_fast_path: false,
        delta_hat: None,
        checks: Vec::new(),
        gate_failures: Vec::new(),
        stopped_at: None,
        completed: false,
        subset_size: None,
        subset_ratio: None,
        smallest_integer_l: None,
        subset_span_rank: None,
        subset_span_size: None,
        subset_elements: None,
        chain: None,
    };

    // K = 1 (log K = 0): fast path B = A.
    if profile.sumset_size() == profile.base_size() {
        report.k1_fast_path = true;
        let basis = SpanBasis::from_set(a)?;
        let doubled = doubled_span_basis(a);
        report.checks.push(CheckResult::from_bool(
            "span-affine-doubling",
            basis.rank() <= doubled.rank() + 1,
            json!({ "rank_subset": basis.rank(), "rank_doubled": doubled.rank() }),
        ));
        finish_with_subset(&mut report, a, Some(&basis), &profile);
        report.completed = true;
        return Ok(StructuredOutcome { report, subset: Some(a.clone()) });
    }

    // Gate: ε > 10 / log2 K.
    let eps_check = eps_gate_check(&profile, eps)?;
    let eps_ok = eps_check.passed();
    report.checks.push(eps_check);
    if !eps_ok {
        report.gate_failures.push("eps-above-gate".into());
        if !force {
            report.stopped_at = Some("eps-above-gate".into());
            return Ok(StructuredOutcome { report, subset: None });
        }
    }

    let dh = delta_hat(&profile, eps)?;
    report.delta_hat = Some(dh.clone());

    // Base point: supplied or found by the averaging scan.
    let star = match a_star {
        Some(v) => {
            if v.dim() != a.dim() {
                return Err(Error::DimMismatch { left: a.dim(), right: v.dim() });
            }
            v
        }
        None => {
            report.a_star_scanned = true;
            scan_a_star(a, &profile, &dh).ok_or(Error::EmptySet { op: "structured_pipeline" })?
        }
    };
    report.a_star = Some(star.to_string());

    let b = structured_b(a, &profile, &star, &dh)?;
    let hypothesis = b_size_hypothesis_holds(&profile, b.len() as u64, l)?;
    report.checks.push(CheckResult::from_bool(
        "b-size-hypothesis",
        hypothesis,
        json!({
            "b_size": b.len(),
            "base_size": profile.base_size(),
            "l": RationalRepr::from(l),
            "condition": "|B| >= K^-L |A|",
        }),
    ));
    if !hypothesis {
        report.gate_failures.push("b-size-hypothesis".into());
        if !force {
            report.stopped_at = Some("b-size-hypothesis".into());
            return Ok(StructuredOutcome { report, subset: None });
        }
    }

    // Containments: B+B ⊆ S(2δ̂) and S(δ)+S(δ) ⊆ S(2δ) along the chain.
    let deltas = chain_deltas(&profile, eps).unwrap_or_default();
    report.checks.extend(containment_checks(&profile, &b, &dh, &deltas)?);

    // Chain and pigeonhole selection.
    match chain_select(&profile, eps, l) {
        Ok(chain) => {
            let mut chain_checks = vec![
                CheckResult::from_bool(
                    "chain-monotone",
                    chain.monotone_ok,
                    json!({ "level_sizes": chain.level_sizes }),
                ),
                CheckResult::from_bool(
                    "chain-r-lower-bound",
                    chain.r_lower_ok,
                    json!({ "r": chain.r, "condition": "r >= eps*log2(K)/2" }),
                ),
            ];
            // the pigeonhole j must exist whenever the size endpoints satisfy
            // the hypotheses; with a failing B-size gate it is unasserted
            if hypothesis {
                chain_checks.push(CheckResult::from_bool(
                    "chain-pigeonhole",
                    chain.chosen_j.is_some(),
                    json!({ "chosen_j": chain.chosen_j, "level_sizes": chain.level_sizes }),
                ));
            }
            if let Some(ok) = chain.ratio_bound_ok {
                chain_checks.push(CheckResult::from_bool(
                    "chain-ratio-bound",
                    ok,
                    json!({
                        "ratio": chain.chosen_ratio.as_ref().map(RationalRepr::from),
                        "bound": "4^(L/eps)",
                    }),
                ));
            }
            chain_checks.push(CheckResult::from_bool(
                "chain-selected-span-bound",
                chain.span_bound_ok,
                json!({
                    "selected_span_rank": chain.selected_span_rank,
                    "fr_exponent": chain.fr_exponent,
                    "sumset_size": profile.sumset_size(),
                    "vacuous": chain.span_bound_vacuous,
                }),
            ));
            report.checks.extend(chain_checks);

            // Span certification for B itself.
            if !b.is_empty() {
                let basis_b = SpanBasis::from_set(&b)?;
                let basis_2b = doubled_span_basis(&b);
                report.checks.push(CheckResult::from_bool(
                    "span-affine-doubling",
                    basis_b.rank() <= basis_2b.rank() + 1,
                    json!({ "rank_subset": basis_b.rank(), "rank_doubled": basis_2b.rank() }),
                ));
                if let Some(j) = chain.chosen_j {
                    // 2B ⊆ S(δ1) ⊆ S(δj): reduce the generators of span(2B)
                    let selected = crate::structured::levels::level_set(
                        &profile,
                        &level_delta(&dh, j),
                    )?;
                    if !selected.set.is_empty() {
                        let sel_basis = SpanBasis::from_set(&selected.set)?;
                        let b0 = b.min_element().expect("nonempty");
                        let violation =
                            b.bits().iter().find(|&&x| !sel_basis.contains_bits(b0 ^ x));
                        report.checks.push(CheckResult::from_bool(
                            "doubled-subset-in-selected-span",
                            violation.is_none(),
                            json!({
                                "chosen_j": j,
                                "violation": violation.map(|v| v.to_string()),
                            }),
                        ));
                        // final theorem-shaped bound: span(B) <= 2^(M+1) |A+A|
                        let final_ok = match chain.fr_exponent.as_ref() {
                            Some(m) => {
                                let m: BigUint = m.parse().expect("decimal");
                                let log2 = 63 - profile.sumset_size().leading_zeros();
                                BigUint::from(basis_b.rank()) <= m + BigUint::from(log2) + 1u32
                            }
                            None => true,
                        };
                        report.checks.push(CheckResult::from_bool(
                            "certified-span-bound",
                            final_ok,
                            json!({
                                "rank_subset": basis_b.rank(),
                                "exponent": chain.fr_exponent,
                                "sumset_size": profile.sumset_size(),
                                "bound": "2 * 2^ceil(2*4^(L/eps)) |A+A|",
                            }),
                        ));
                    }
                }
                finish_with_subset(&mut report, &b, Some(&basis_b), &profile);
            } else {
                finish_with_subset(&mut report, &b, None, &profile);
            }
            report.chain = Some(chain);
        }
        Err(err) => {
            report.gate_failures.push("chain-length".into());
            report
                .checks
                .push(CheckResult::from_bool("chain-length", false, json!({ "error": err.to_string() })));
            report.stopped_at = Some("chain-length".into());
            return Ok(StructuredOutcome { report, subset: Some(b) });
        }
    }

    report.completed = true;
    Ok(StructuredOutcome { report, subset: Some(b) })
}

fn level_delta(dh: &BigRational, j: u32) -> BigRational {
    (rat::from_u64(1u64 << j.min(63)) * dh).min(BigRational::one())
}

fn doubled_span_basis(subset: &F2Set) -> SpanBasis {
    let b0 = subset.min_element().unwrap_or(0);
    SpanBasis::from_bits(subset.dim(), subset.bits().iter().map(|&b| b0 ^ b))
}

fn finish_with_subset(
    report: &mut StructuredReport,
    subset: &F2Set,
    basis: Option<&SpanBasis>,
    profile: &SymmetryProfile,
) {
    report.subset_size = Some(subset.len() as u64);
    report.subset_ratio = Some(rat::ratio_u(subset.len() as u64, profile.base_size()));
    report.smallest_integer_l = smallest_integer_l(profile, subset.len() as u64);
    if let Some(basis) = basis {
        report.subset_span_rank = Some(basis.rank());
        report.subset_span_size = Some(basis.span_size().to_string());
    }
    if subset.len() <= REPORT_SUBSET_MAX {
        report.subset_elements = Some(subset.iter_vectors().map(|v| v.to_string()).collect());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn subspace_fast_path() {
        let v = generators::subspace(6, 4).unwrap();
        let out = structured_pipeline(&v, None, &rat::from_u64(4), &rat::from_u64(1), false).unwrap();
        assert!(out.report.k1_fast_path);
        assert!(out.report.completed);
        assert_eq!(out.subset.unwrap(), v);
    }

    #[test]
    fn subspace_plus_point_extracts_the_subspace() {
        // d = 12 leaves room between the gate (K^eps > 2^10) and the fiber
        // deficiency 1/|A| that B's threshold must absorb
        let a = generators::subspace_plus_points(14, 12, 1, 7).unwrap();
        let v = generators::subspace(14, 12).unwrap();
        let star = F2Vector::zero(14).unwrap();
        let out =
            structured_pipeline(&a, Some(star), &rat::from_u64(11), &rat::from_u64(1), false)
                .unwrap();
        assert!(out.report.completed, "stopped at {:?}", out.report.stopped_at);
        let b = out.subset.unwrap();
        assert_eq!(b, v, "B should be exactly the subspace, |B| = {}", b.len());
        assert!(out.report.all_checks_pass());
        assert!(out.report.chain.is_some());
    }

    #[test]
    fn scan_finds_a_good_base_point() {
        let a = generators::subspace_plus_points(14, 12, 1, 7).unwrap();
        let out =
            structured_pipeline(&a, None, &rat::from_u64(11), &rat::from_u64(1), false).unwrap();
        assert!(out.report.completed, "stopped at {:?}", out.report.stopped_at);
        assert!(out.report.a_star_scanned);
        assert_eq!(out.subset.unwrap().len(), 1 << 12);
    }

    #[test]
    fn adversarial_a_star_fails_gate() {
        let a = generators::subspace_plus_points(14, 12, 1, 7).unwrap();
        // a* with tiny fibers through nearly all of A
        let far = F2Vector::new(0b11, 14).unwrap();
        let out = structured_pipeline(
            &a,
            Some(far),
            &rat::from_u64(11),
            &rat::from_u64(1),
            false,
        )
        .unwrap();
        assert_eq!(out.report.stopped_at.as_deref(), Some("b-size-hypothesis"));
        assert!(out.subset.is_none());
    }

    #[test]
    fn eps_gate_refuses_small_eps() {
        let a = generators::subspace_plus_points(14, 12, 1, 7).unwrap();
        let out =
            structured_pipeline(&a, None, &rat::from_u64(2), &rat::from_u64(1), false).unwrap();
        assert_eq!(out.report.stopped_at.as_deref(), Some("eps-above-gate"));
    }
}
