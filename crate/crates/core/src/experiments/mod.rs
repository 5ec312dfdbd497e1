//! Signal sources, sweeps and output files.

mod config;
mod ofdm;
mod source;
mod sweep;

pub use config::{Backend, ExperimentConfig, StructureSpec};
pub use ofdm::{ofdm_demodulate, ofdm_modulate, ofdm_roundtrip, OfdmResult};
pub use source::{band_limited_frame, qam64_frame, qam64_source, VALIDATION_STREAM};
pub use sweep::{
    evaluate, frames, reproduce_table1, run_sweep, validation_evm, write_csv, write_sweep, write_table1, Evaluation,
    Plant, SweepRecord, Table1Record,
};
