//! Participation analysis and TLS loss-model fitting for vacuum-gap capacitors.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the `*F64` and
//! `*F32` aliases below pin the common types to a concrete width.

pub mod circuits;
pub mod fieldsolver;
pub mod fitting;
pub mod geometry;
pub mod lossmodels;
pub mod scalar;

pub use scalar::Real;

pub type GeometrySpecF64 = geometry::GeometrySpec<f64>;
pub type GeometrySpecF32 = geometry::GeometrySpec<f32>;
pub type RegionMapF64 = geometry::RegionMap<f64>;
pub type RegionMapF32 = geometry::RegionMap<f32>;
pub type InterfaceSetF64 = geometry::InterfaceSet<f64>;
pub type FieldSolutionF64 = fieldsolver::FieldSolution<f64>;
pub type FieldSolutionF32 = fieldsolver::FieldSolution<f32>;
pub type ThinLayerSpecF64 = fieldsolver::ThinLayerSpec<f64>;
pub type ParticipationReportF64 = fieldsolver::ParticipationReport<f64>;
pub type TlsPowerModelF64 = lossmodels::TlsPowerModel<f64>;
pub type TlsPowerModelF32 = lossmodels::TlsPowerModel<f32>;
pub type LossBudgetF64 = lossmodels::LossBudget<f64>;
pub type DoubleExpModelF64 = lossmodels::DoubleExpModel<f64>;
pub type DoubleExpModelF32 = lossmodels::DoubleExpModel<f32>;
pub type CoherentTlsModelF64 = lossmodels::CoherentTlsModel<f64>;
pub type DatasetF64 = fitting::Dataset<f64>;
pub type FitResultF64 = fitting::FitResult<f64>;
pub type FitResultF32 = fitting::FitResult<f32>;
pub type ResonanceTraceF64 = fitting::ResonanceTrace<f64>;
pub type TransmonParamsF64 = circuits::TransmonParams<f64>;
pub type ResonatorLcF64 = circuits::ResonatorLc<f64>;
