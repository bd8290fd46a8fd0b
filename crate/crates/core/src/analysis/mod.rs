//! Closed-form engine: large-system SINR, interference statistics over
//! Poisson user drops, the Gaussian SINR CDF and outage-constrained rates.

mod lemma;
mod qfunc;
mod rate;
mod stats;

pub use lemma::{asymptotic_sinr, dagger_members, lemma_terms, AsymptoticSinr, LemmaTerms};
pub use qfunc::{q_function, q_inverse};
pub use rate::{
    cdf_curve, empirical_cdf_curve, ks_distance, rate_threshold, sinr_cdf, RateEntry, RatePlan,
};
pub use stats::{
    interference_stats, region_mode_for, shadowing_moment, Provenance, SinrStats, VarianceForm,
};

