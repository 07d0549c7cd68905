//! Spectral computations for the almost Mathieu operator at rational
//! frequencies: periodic bands, Chambers sublevel sets, Green functions,
//! hyperbolic products, periodic interpolation and a Liouville frequency
//! construction.

pub mod alpha;
pub mod bands;
pub mod ddouble;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod greens;
pub mod interpolation;
pub mod mat2;
pub mod operator;
pub mod products;
pub mod rational;
pub mod resolvent;
pub mod scalar;
pub mod sets;

pub use error::{Error, Result};
pub use greens::{
    green_halfline, green_identities_check, lyapunov, surace_deviation, HalfLineGreen,
    LyapunovValue,
};
pub use mat2::{Mat2, Mat2C, Scaled, ScaledMat2};
pub use operator::{
    chambers_residual, delta, discriminant, monodromy, potential_eval, transfer_matrix,
    OperatorSpec, Potential,
};
pub use products::{
    align_phases, eigensystem_2x2, hypothesis_margins, product_growth, random_admissible_chain,
    HyperbolicFactor, LogComplex, ProductCertificate, Verdict,
};
pub use rational::{reduce_fraction, ReducedRational};
pub use scalar::{Dual, DualComplex, Scalar};
pub use sets::{set_measure, Band, Monotonicity, SpectralSet};
pub use bands::{
    band_edge_bound_check, holder_inclusion_check, ids_eval, jdelta_sets, last_wilkinson_sum,
    periodic_bands, sminus, sminus_points, spectral_union_s, spectrum_bands, ChambersLandscape,
    IdsEvaluator, JDeltaSets, JDeltaVariant, SminusPoints,
};
pub use interpolation::{
    build_intermediate, green_comparison, inverse_blocks, trace_margin_check, window_check,
    Branch, ComparisonReport, IntermediatePotential,
};
pub use experiments::{
    box_counting_dimension, butterfly_generate, cover_dimension_bound, measure_decay,
    ButterflyDataset, CoverFamily, DecayReport, ThetaMode,
};
pub use alpha::{
    construct_alpha, convergents, verify_conditions, AlphaCertificate, ContinuedFraction,
    LevelCertificate, Margin,
};
