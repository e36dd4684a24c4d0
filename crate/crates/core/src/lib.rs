//! Weak measurements on a Mach-Zehnder interferometer with tunable
//! polarization and path phase: pre/postselected weak values of the
//! arm-resolved polarization components, computed analytically, through an
//! exact qubit-meter model, and by shot sampling.

pub mod dsl;
pub mod error;
pub mod observables;
pub mod optics;
pub mod scenarios;
pub mod state;
pub mod weak;

pub use error::{Error, Result};
pub use observables::{Arm, Observable};
pub use state::{Operator, StateVector, Subsystem, C64};
pub use weak::{Method, WeakValue};
