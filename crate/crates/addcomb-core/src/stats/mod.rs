//! Exact symmetry-set statistics and the second-moment machinery:
//! profiles, fiber probabilities, E[Z], E[Y^2], Pr[Z>0] and the
//! pair-count bijection oracle.

pub mod checks;
pub mod moments;
pub mod profile;
pub mod wht;

pub use checks::{
    doubling_pow_neg8, fiber_conversion_check, freiman_ruzsa_check, heavy_fiber_hypothesis_holds,
    large_fiber_probability, lemma6_check, lemma7_check, markov_half_check, mass_identity_check,
    mean_identity_check, uniform_fiber_probability,
};
pub use moments::{
    expectation_y2, expectation_z, lemma8_bijection_check, pr_z_positive, quadruple_brute,
    BijectionCheck, BruteMoments, MomentReport, Y2Method, BIJECTION_SET_MAX, BRUTE_SET_MAX,
    PR_Z_SUMSET_MAX,
};
pub use profile::{
    naive_fiber_counts, naive_fiber_counts_seq, symmetry_profile, symmetry_profile_auto,
    ProfileMethod, SymmetryProfile,
};
pub use wht::{wht_in_place, wht_in_place_seq, xor_autocorrelation, xor_autocorrelation_seq, WHT_DIM_MAX};
