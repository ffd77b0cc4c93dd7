//! Robustness analysis: influence functions, efficiency, breakdown and
//! finite-sample bias of the dispersion-based estimators.

pub mod bias;
pub mod breakdown;
pub mod efficiency;
pub mod functional;
pub mod influence;
pub mod study;

pub use bias::{bias_curve, bias_curves, BiasConfig, BiasCurve, BiasPoint, ContaminationType};
pub use breakdown::cmad_breakdown_bound;
pub use efficiency::{are, are_curve, asymptotic_variance, fisher_information, AreCurve, ArePoint};
pub use influence::{if_curve, zeta_derivative, IfCurve, IfPoint, InfluenceFunction};
pub use study::{contamination_study, Estimator, FiveNumber, StudyConfig, StudyRow, StudyTable};
