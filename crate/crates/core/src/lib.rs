//! Spin-orbit-coupled trapped-atom accelerometer: trap dynamics, the pulse
//! engine for interferometer sequences, frequency response, thermal
//! averaging and the sensitivity budget.

pub mod cli;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod quadrature;
pub mod response;
pub mod sensitivity;
pub mod thermal;
pub mod units;

pub use error::{Error, Result};
