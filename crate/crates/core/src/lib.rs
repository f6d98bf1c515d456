//! Axisymmetric Willmore flow with spontaneous curvature, discretised with
//! parametric finite elements on the generating curve.
//!
//! The generating curve lives in the meridian half plane `{(r, z) : r >= 0}`.
//! Open curves meet the axis at both ends and generate genus-0 surfaces;
//! periodic curves stay away from the axis and generate tori.
//!
//! ```
//! use wilflow::{run_simulation, RunConfig, SchemeKind, ShapeSpec};
//!
//! let cfg = RunConfig::new(ShapeSpec::Semicircle { radius: 1.0 }, -1.0, 32, 0.04, 0.2, SchemeKind::Linear);
//! let out = run_simulation(&cfg)?;
//! assert!(out.final_energy() < out.initial_energy);
//! # Ok::<(), wilflow::Error>(())
//! ```

pub mod analysis;
mod assembly;
pub mod error;
pub mod field;
pub mod init;
pub mod io;
pub mod mesh;
pub mod quadrature;
pub mod schemes;
pub mod simulation;
pub mod solver;

pub use assembly::{discrete_energy, dissipation, sqrt_jm, SqrtJField};
pub use error::{Error, Result};
pub use field::NodalField;
pub use init::InitialData;
pub use mesh::{build_curve, PolygonalCurve, ShapeSpec, Topology, Vec2};
pub use schemes::{SchemeKind, SchemeState, StepReport};
pub use simulation::{run_simulation, run_with_observer, RunConfig, RunOutput, Termination};
