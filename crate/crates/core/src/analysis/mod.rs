//! Closed-form expressions and their numerical optimization.

pub mod bounds;
pub mod maxweight;
pub mod optimize;
pub mod randomized;

pub use bounds::{capacity_region_contains, capacity_region_excess, lower_bound};
pub use maxweight::{
    empty_queue_prob, mw_bound_terms, mw_upper_bound, one_slot_drift, q2_nonempty_prob, MwBoundTerms,
};
pub use optimize::{
    min_mw_upper_bound, minimize_on_simplex, optimize_randomized, optimize_uncoded, uncoded_optimum_closed_form,
    SimplexOptimum,
};
pub use randomized::{
    coding_beneficial, delivery_age_law, expected_delivery_age, inter_delivery_moments, inter_delivery_pmf,
    interdelivery_params, interdelivery_params_for, optimal_mu_symmetric, randomized_average_age, randomized_ewsaoi,
    randomized_ewsaoi_assembled, symmetric_ewsaoi, DeliveryAgeLaw, InterDeliveryParams,
};
