//! Planar quasi-static humanoid box-lifting feasibility toolkit.
//!
//! The crate decides whether a humanoid can lift a box with unknown physical
//! parameters, in three stages:
//!
//! 1. [`table`] builds a trajectory table over a discretized grid of box
//!    weight, COM location and gripping distance, solving one
//!    direct-transcription trajectory optimization per cell ([`trajopt`],
//!    backed by the [`nlp`] solver and the [`model`] statics).
//! 2. [`sim`] identifies a simulated box's parameters by repeated careful
//!    lift attempts with safety monitoring and posture adjustments.
//! 3. The estimates are mapped to conservative grid indices and the table
//!    is queried for a stored trajectory.
//!
//! The numerical core ([`model`], [`nlp`], [`trajopt`] and the geometry
//! helpers) is generic over the scalar type through [`scalar::Real`];
//! concrete `f64` aliases are exported below. Persistence and the simulator
//! are `f64` only.

pub mod geom;
pub mod model;
pub mod nlp;
pub mod scalar;
pub mod sim;
pub mod table;
pub mod trajopt;

pub use scalar::Real;

/// `f64` instantiations of the generic core types.
pub type Vec2 = geom::Vec2<f64>;
pub type BoxRect = geom::BoxRect<f64>;
pub type RobotModel = model::RobotModel<f64>;
pub type Link = model::Link<f64>;
pub type JointSpec = model::JointSpec<f64>;
pub type HandContactModel = model::HandContactModel<f64>;
pub type SupportPolygon = model::SupportPolygon<f64>;
pub type Configuration = model::Configuration<f64>;
pub type BoxAttachment = model::BoxAttachment<f64>;
pub type NlpProblem = nlp::NlpProblem<f64>;
pub type NlpOptions = nlp::NlpOptions<f64>;
pub type NlpSolution = nlp::NlpSolution<f64>;
pub type TrajOptWeights = trajopt::TrajOptWeights<f64>;
pub type Trajectory = trajopt::Trajectory<f64>;
pub type ValidationReport = trajopt::ValidationReport<f64>;
