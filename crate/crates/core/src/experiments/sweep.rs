use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::baseband::{model_from_ct, BasebandModel, PulseKernel};
use crate::dpd::{prune_significant, Compensator, FittedCompensator, IdealCompensator, NoCompensation};
use crate::error::{Error, Result};
use crate::experiments::config::{Backend, ExperimentConfig, StructureSpec};
use crate::experiments::source::{band_limited_frame, VALIDATION_STREAM};
use crate::passband::{CtVolterraModel, PassbandChain, System};
use crate::signal::{DtSignal, Signal, EVM_FLOOR_DB};

/// The system under test, evaluated by simulation or by its analytic equivalent.
#[derive(Debug, Clone)]
pub enum Plant {
    Oracle(PassbandChain),
    Model(BasebandModel),
}

impl Plant {
    pub fn new(model: CtVolterraModel, cfg: &ExperimentConfig) -> Result<Self> {
        let p = cfg.params()?;
        Ok(match cfg.backend {
            Backend::Oracle => Plant::Oracle(PassbandChain::new(model, p, cfg.n_symbols)?),
            Backend::Model => Plant::Model(model_from_ct(
                &model,
                &p,
                cfg.n_symbols,
                PulseKernel::Sampled { oversample: p.oversample() },
            )?),
        })
    }
}

impl System for Plant {
    fn apply(&self, w: &DtSignal) -> Result<DtSignal> {
        match self {
            Plant::Oracle(c) => c.simulate(w),
            Plant::Model(m) => m.apply(w),
        }
    }
}

/// One row of `evm_sweep.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub delta: f64,
    pub structure: String,
    pub evm_db: f64,
    pub n_coeffs: usize,
    pub n_significant: usize,
    pub runtime_s: f64,
}

/// One row of `table1.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Record {
    pub model: String,
    pub n_coeffs: usize,
    pub n_significant: usize,
}

/// Training and validation frames drawn from separate streams.
pub fn frames(cfg: &ExperimentConfig) -> (Vec<DtSignal>, Vec<DtSignal>) {
    let frame = |stream| band_limited_frame(cfg.n_symbols, cfg.seed, stream, cfg.source_upsample);
    let train = (0..cfg.train_frames as u64).map(frame).collect();
    let validate = (0..cfg.validate_frames as u64).map(|f| frame(VALIDATION_STREAM + f)).collect();
    (train, validate)
}

/// `EVM(u, S(C(u)))` pooled over several frames.
pub fn validation_evm(frames: &[DtSignal], compensator: &dyn Compensator, plant: &dyn System) -> Result<f64> {
    let (mut err, mut reference) = (0.0, 0.0);
    for u in frames {
        let out = plant.apply(&compensator.compensate(u)?)?;
        err += out.sub(u)?.norm().powi(2);
        reference += u.norm().powi(2);
    }
    if reference == 0.0 {
        return Err(Error::ZeroReference);
    }
    if err == 0.0 {
        return Ok(EVM_FLOOR_DB);
    }
    Ok((10.0 * (err / reference).log10()).max(EVM_FLOOR_DB))
}

/// Result of evaluating one compensator entry at one distortion level.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub record: SweepRecord,
    pub fit: Option<FittedCompensator>,
}

/// Fits (if needed), optionally prunes, and validates one entry.
pub fn evaluate(
    spec: StructureSpec,
    delta: f64,
    plant: &Plant,
    train: &[DtSignal],
    validate: &[DtSignal],
    prune: bool,
) -> Result<Evaluation> {
    let start = Instant::now();
    let (evm_db, n_coeffs, n_significant, fit) = match spec {
        StructureSpec::None => (validation_evm(validate, &NoCompensation, plant)?, 0, 0, None),
        StructureSpec::Ideal => {
            (validation_evm(validate, &IdealCompensator { system: plant.clone() }, plant)?, 0, 0, None)
        }
        StructureSpec::Fitted(s) => {
            let inputs = train.iter().map(|w| plant.apply(w)).collect::<Result<Vec<_>>>()?;
            let fit = FittedCompensator::fit_frames(s, &inputs, train)?;
            let fit = if prune { prune_significant(&fit, |c| validation_evm(validate, c, plant))?.0 } else { fit };
            let evm = validation_evm(validate, &fit, plant)?;
            (evm, fit.n_coeffs(), fit.n_significant(), Some(fit))
        }
    };
    let record = SweepRecord {
        delta,
        structure: spec.name(),
        evm_db,
        n_coeffs,
        n_significant,
        runtime_s: start.elapsed().as_secs_f64(),
    };
    log::info!("delta={delta} {}: {:.2} dB", record.structure, evm_db);
    Ok(Evaluation { record, fit })
}

/// Every `(delta, structure)` pair of the configuration, in configuration order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let specs = cfg.structure_specs()?;
    let (train, validate) = frames(cfg);
    let mut out = Vec::with_capacity(cfg.delta_list.len() * specs.len());
    for &delta in &cfg.delta_list {
        let plant = Plant::new(cfg.distortion(delta)?, cfg)?;
        for &spec in &specs {
            let mut rec = evaluate(spec, delta, &plant, &train, &validate, cfg.prune)?.record;
            if !cfg.record_runtime {
                rec.runtime_s = 0.0;
            }
            out.push(rec);
        }
    }
    Ok(out)
}

/// Coefficient counts before and after pruning at distortion `delta`.
pub fn reproduce_table1(cfg: &ExperimentConfig, delta: f64) -> Result<Vec<Table1Record>> {
    cfg.validate()?;
    let (train, validate) = frames(cfg);
    let plant = Plant::new(cfg.distortion(delta)?, cfg)?;
    let mut out = Vec::new();
    for spec in cfg.structure_specs()? {
        if let StructureSpec::Fitted(_) = spec {
            let rec = evaluate(spec, delta, &plant, &train, &validate, true)?.record;
            out.push(Table1Record { model: rec.structure, n_coeffs: rec.n_coeffs, n_significant: rec.n_significant });
        }
    }
    Ok(out)
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidConfig(format!("csv: {other:?}")),
    }
}

/// Runs the sweep and writes `evm_sweep.csv` into the output directory.
pub fn write_sweep(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let rows = run_sweep(cfg)?;
    let path = cfg.output_dir.join("evm_sweep.csv");
    write_csv(&path, &rows)?;
    Ok(path)
}

/// Runs the pruning experiment and writes `table1.csv` into the output directory.
pub fn write_table1(cfg: &ExperimentConfig, delta: f64) -> Result<PathBuf> {
    let rows = reproduce_table1(cfg, delta)?;
    let path = cfg.output_dir.join("table1.csv");
    write_csv(&path, &rows)?;
    Ok(path)
}
