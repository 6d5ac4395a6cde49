//! Orbit-determination information content and dilution of precision for deep-space
//! optical beacon, X-ray pulsar and Earth-station range tracking.

pub mod catalog;
pub mod entry;
pub mod error;
pub mod geometry;
pub mod information;
pub mod kinematics;
pub mod measurements;
pub mod quadrature;
pub mod units;

pub use error::{NavError, Result};
pub use information::{DilutionResult, InfoMatrix4};
pub use kinematics::{OrbitConfig, Stm4};
pub use measurements::{MeasGradient, StmMode};
