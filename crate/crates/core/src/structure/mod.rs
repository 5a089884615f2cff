//! Generalized Schmidt decompositions and 2-producibility certification.

mod certify;
mod gsd;

pub use certify::{
    certify_2producible, certify_tableau, default_chain, pairwise_gap_scan, Certificate,
    DistanceCheck, PairCounts, PairwiseScan, Refutation, Verdict, DEFAULT_THRESHOLD,
};
pub use gsd::{gsd_detect, gsd_values, GsdDetection, GsdForm, GsdValues};
