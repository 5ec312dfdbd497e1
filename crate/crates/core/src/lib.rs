//! Baseband equivalent modelling and digital predistortion for
//! mixed-signal transmitters with a nonlinear passband stage.

pub mod baseband;
pub mod dpd;
pub mod error;
pub mod experiments;
pub mod passband;
pub mod signal;

pub use num_complex::Complex64;

pub use baseband::{model_apply, model_from_ct, BasebandModel, MIndex, PulseKernel};
pub use dpd::{Compensator, CompensatorStructure, FittedCompensator};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, Plant};
pub use passband::{CtVolterraModel, DemodCorrection, ModulationParams, PassbandChain, System, VolterraTerm};
pub use signal::{evm_db, CtSignal, DtSignal, FreqResponse, Signal};
