use num_complex::Complex64;

use crate::dpd::{Compensator, CompensatorStructure, FittedCompensator};
use crate::error::{Error, Result};
use crate::experiments::config::ExperimentConfig;
use crate::experiments::source::{qam64_frame, VALIDATION_STREAM};
use crate::experiments::sweep::Plant;
use crate::passband::{CtVolterraModel, System};
use crate::signal::{dft, evm_db, idft, DtSignal, Signal};

/// Unitary inverse DFT over consecutive blocks of `n_carriers` symbols.
pub fn ofdm_modulate(u: &DtSignal, n_carriers: usize) -> Result<DtSignal> {
    blockwise(u, n_carriers, |b| {
        let s = (b.len() as f64).sqrt();
        idft(b).into_iter().map(|v| v * s).collect()
    })
}

/// Unitary DFT over consecutive blocks, undoing [`ofdm_modulate`].
pub fn ofdm_demodulate(w: &DtSignal, n_carriers: usize) -> Result<DtSignal> {
    blockwise(w, n_carriers, |b| {
        let s = 1.0 / (b.len() as f64).sqrt();
        dft(b).into_iter().map(|v| v * s).collect()
    })
}

fn blockwise(x: &DtSignal, n: usize, f: impl Fn(&[Complex64]) -> Vec<Complex64>) -> Result<DtSignal> {
    if n == 0 || !x.len().is_multiple_of(n) {
        return Err(Error::InvalidParams(format!("{n} carriers do not divide {} symbols", x.len())));
    }
    let out = x.samples().chunks(n).flat_map(f).collect();
    DtSignal::new(out, x.symbol_rate())
}

/// Symbol-domain EVM of the OFDM chain without and with a fitted compensator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmResult {
    pub evm_no_dpd_db: f64,
    pub evm_dpd_db: f64,
}

/// QAM symbols through blockwise IDFT, `S` and blockwise DFT.
///
/// The compensator acts on the time-domain OFDM signal and is fitted as a
/// post-inverse on a separate training frame.
pub fn ofdm_roundtrip(
    n_carriers: usize,
    model: &CtVolterraModel,
    cfg: &ExperimentConfig,
    structure: CompensatorStructure,
) -> Result<OfdmResult> {
    cfg.validate()?;
    let plant = Plant::new(model.clone(), cfg)?;
    let n = cfg.n_symbols;

    let u = qam64_frame(n, cfg.seed, VALIDATION_STREAM);
    let w = ofdm_modulate(&u, n_carriers)?;
    let plain = ofdm_demodulate(&plant.apply(&w)?, n_carriers)?;

    let train = ofdm_modulate(&qam64_frame(n, cfg.seed, 0), n_carriers)?;
    let fit = FittedCompensator::fit_inverse(structure, &train, &plant)?;
    let compensated = ofdm_demodulate(&plant.apply(&fit.compensate(&w)?)?, n_carriers)?;

    Ok(OfdmResult { evm_no_dpd_db: evm_db(&u, &plain)?, evm_dpd_db: evm_db(&u, &compensated)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::source::qam64_source;

    #[test]
    fn blocks_invert_and_preserve_power() {
        let u = qam64_source(64, 4);
        let w = ofdm_modulate(&u, 16).unwrap();
        assert!((w.norm() - u.norm()).abs() < 1e-12);
        let back = ofdm_demodulate(&w, 16).unwrap();
        assert!(evm_db(&u, &back).unwrap() < -280.0);
        assert!(ofdm_modulate(&u, 24).is_err());
    }
}
