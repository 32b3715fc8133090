//! Soliton equation, λ formulas, torse-forming classification and the
//! identity catalogue, all evaluated pointwise.

mod analysis;
mod identities;
mod lambda;
mod report;

pub use analysis::{
    LambdaSource, PointAnalysis, SolitonCheck, SolitonInstance, Tolerances, TorseFormingFit, VANISHING_NORM_SQ,
};
pub use identities::IdentityId;
pub use lambda::{
    almost_einstein_function_at, classify_field_at, identity_residual_at, lambda_candidate_at, lambda_theorem1_at,
    prop3_lambda_at, soliton_residual_at, solenoidal_lambda_at, ConstantClause, LambdaDeviation, LambdaReport,
    LambdaValue, Prop3Value,
};
pub use report::{rel_scalar, rel_tensor, IdentityReport, Part, Verdict};
