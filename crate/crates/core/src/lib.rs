//! Invariant-zero analysis, zero-dynamics attack synthesis, simulation and
//! detection for the linear vehicle lateral-dynamics (bicycle) model.
//!
//! ```
//! use lateral_zda::{analysis, model};
//!
//! let m = model::build_model(model::VehicleParams::SUV, 5.0).unwrap();
//! let zeros = analysis::invariant_zeros(&m, model::OutputCase::LateralAccel).unwrap();
//! assert!((zeros[0].value.re + 775.3).abs() < 0.1);
//! ```

pub mod analysis;
pub mod attack;
pub mod cli;
pub mod detect;
pub mod error;
pub mod model;
pub mod scenario;
pub mod sim;
pub mod summary;
pub mod sweep;
pub mod trajectory_csv;

pub use error::{Error, Result};
