use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bbeq_core::baseband::{model_from_ct, PulseKernel};
use bbeq_core::dpd::{prune_significant, CompensatorStructure, FittedCompensator};
use bbeq_core::experiments::{
    frames, ofdm_roundtrip, qam64_source, validation_evm, write_csv, write_sweep, write_table1, Backend,
    ExperimentConfig, Plant, StructureSpec,
};
use bbeq_core::{evm_db, model_apply, CtVolterraModel, PassbandChain, Signal, System};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "bbeq", version, about = "Baseband equivalents and predistortion for passband nonlinearities")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the passband chain on one 64QAM frame and dump input and output.
    Simulate {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 0.02)]
        delta: f64,
        /// CSV file for the samples.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the analytic baseband model with simulation on random models.
    ModelCheck {
        #[arg(long, default_value_t = 50)]
        models: usize,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        oversample: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Also write the model of the reference distortion to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Fit one compensator and export its coefficients.
    Fit {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// `proposed`, `volterra1..3` or an explicit `volterra(m1,m2,d)` / `proposed(m,d,p)`.
        #[arg(long, default_value = "proposed")]
        structure: String,
        #[arg(long, default_value_t = 0.02)]
        delta: f64,
        /// Coefficient file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// EVM of every structure over the distortion grid, written to evm_sweep.csv.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Coefficient counts before and after pruning, written to table1.csv.
    Table1 {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.02)]
        delta: f64,
    },
    /// OFDM frame through the chain with and without predistortion.
    OfdmDemo {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 64)]
        carriers: usize,
        #[arg(long, default_value_t = 0.02)]
        delta: f64,
        #[arg(long, default_value = "proposed")]
        structure: String,
    },
}

/// Overrides applied on top of the config file (or the built-in defaults).
#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// TOML file with experiment settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    f_symb: Option<f64>,
    /// Carrier to symbol rate ratio.
    #[arg(long = "carrier-ratio")]
    carrier_ratio: Option<usize>,
    #[arg(long)]
    oversample: Option<usize>,
    #[arg(long)]
    n_symbols: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    tau_over_t: Option<Vec<f64>>,
    /// Semicolon separated, since explicit structures contain commas.
    #[arg(long, value_delimiter = ';')]
    structures: Option<Vec<String>>,
    #[arg(long)]
    train_frames: Option<usize>,
    #[arg(long)]
    validate_frames: Option<usize>,
    /// Interpolate symbols by this factor with an ideal low-pass.
    #[arg(long)]
    source_upsample: Option<usize>,
    #[arg(long, value_parser = parse_backend)]
    backend: Option<Backend>,
    #[arg(long)]
    prune: bool,
    /// Write zero runtimes so reruns are byte-identical.
    #[arg(long)]
    no_runtime: bool,
}

fn parse_backend(s: &str) -> std::result::Result<Backend, String> {
    match s {
        "oracle" => Ok(Backend::Oracle),
        "model" => Ok(Backend::Model),
        _ => Err(format!("unknown backend '{s}' (oracle or model)")),
    }
}

impl ConfigArgs {
    fn resolve(&self, seed: Option<u64>, out: Option<&Path>) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident => $target:ident),*) => {$(
                if let Some(v) = self.$field.clone() { cfg.$target = v; }
            )*};
        }
        set!(f_symb => f_symb, carrier_ratio => carrier_ratio, oversample => oversample,
             n_symbols => n_symbols, deltas => delta_list, tau_over_t => tau_over_t,
             structures => structures, train_frames => train_frames,
             validate_frames => validate_frames, source_upsample => source_upsample,
             backend => backend);
        if let Some(s) = seed {
            cfg.seed = s;
        }
        if let Some(o) = out {
            cfg.output_dir = o.to_path_buf();
        }
        cfg.prune |= self.prune;
        if self.no_runtime {
            cfg.record_runtime = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn fitted(name: &str) -> Result<CompensatorStructure> {
    match StructureSpec::parse(name)? {
        StructureSpec::Fitted(s) => Ok(s),
        other => bail!("'{}' is not a fitted structure", other.name()),
    }
}

#[derive(Serialize)]
struct SampleRow {
    n: usize,
    w_re: f64,
    w_im: f64,
    v_re: f64,
    v_im: f64,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match cli.command {
        Command::Simulate { cfg, delta, out } => {
            let cfg = cfg.resolve(None, None)?;
            let chain = PassbandChain::new(cfg.distortion(delta)?, cfg.params()?, cfg.n_symbols)?;
            let w = qam64_source(cfg.n_symbols, cfg.seed);
            let v = chain.simulate(&w)?;
            let rows: Vec<SampleRow> = w
                .samples()
                .iter()
                .zip(v.samples())
                .enumerate()
                .map(|(n, (a, b))| SampleRow { n, w_re: a.re, w_im: a.im, v_re: b.re, v_im: b.im })
                .collect();
            write_csv(&out, &rows)?;
            println!("EVM {:.3} dB, samples written to {}", evm_db(&w, &v)?, out.display());
        }
        Command::ModelCheck { models, n, oversample, seed, tol, dump } => {
            let worst = model_check(models, n, oversample, seed)?;
            println!("worst relative error over {models} models: {worst:.3e} (tolerance {tol:.1e})");
            if let Some(path) = dump {
                let cfg = ExperimentConfig { oversample, n_symbols: n, ..ExperimentConfig::default() };
                let p = cfg.params()?;
                let model = model_from_ct(&cfg.distortion(0.02)?, &p, n, PulseKernel::Sampled { oversample })?;
                std::fs::write(&path, model.export())?;
            }
            if worst > tol {
                bail!("baseband model disagrees with simulation");
            }
        }
        Command::Fit { cfg, structure, delta, out } => {
            let cfg = cfg.resolve(None, None)?;
            let s = fitted(&structure)?;
            let (train, validate) = frames(&cfg);
            let plant = Plant::new(cfg.distortion(delta)?, &cfg)?;
            let inputs = train.iter().map(|w| plant.apply(w)).collect::<bbeq_core::Result<Vec<_>>>()?;
            let mut fit = FittedCompensator::fit_frames(s, &inputs, &train)?;
            if cfg.prune {
                fit = prune_significant(&fit, |c| validation_evm(&validate, c, &plant))?.0;
            }
            let evm = validation_evm(&validate, &fit, &plant)?;
            std::fs::write(&out, fit.export()).with_context(|| format!("writing {}", out.display()))?;
            println!(
                "{}: {} of {} coefficients significant, validation EVM {:.3} dB",
                StructureSpec::Fitted(s).name(),
                fit.n_significant(),
                fit.n_coeffs(),
                evm
            );
        }
        Command::Sweep { cfg, seed, out } => {
            let cfg = cfg.resolve(Some(seed), Some(&out))?;
            let path = write_sweep(&cfg)?;
            println!("wrote {}", path.display());
        }
        Command::Table1 { cfg, seed, out, delta } => {
            let cfg = cfg.resolve(Some(seed), Some(&out))?;
            let path = write_table1(&cfg, delta)?;
            println!("wrote {}", path.display());
        }
        Command::OfdmDemo { cfg, carriers, delta, structure } => {
            let cfg = cfg.resolve(None, None)?;
            let s = fitted(&structure)?;
            let r = ofdm_roundtrip(carriers, &cfg.distortion(delta)?, &cfg, s)?;
            println!("EVM without predistortion {:.3} dB, with {:.3} dB", r.evm_no_dpd_db, r.evm_dpd_db);
        }
    }
    Ok(())
}

/// Largest relative difference between the analytic model and simulation.
fn model_check(models: usize, n: usize, oversample: usize, seed: u64) -> Result<f64> {
    use bbeq_core::VolterraTerm;
    let mut state = seed;
    // A small LCG keeps the CLI free of extra dependencies; quality is irrelevant here.
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut worst = 0.0f64;
    for i in 0..models {
        let m = if i % 2 == 0 { 4 } else { 10 };
        let cfg = ExperimentConfig { carrier_ratio: m, oversample, n_symbols: n, ..ExperimentConfig::default() };
        let p = cfg.params()?;
        let dt = p.sample_period();
        let terms = (0..1 + (next() * 3.0) as usize)
            .map(|_| VolterraTerm {
                coeff: 0.4 * next() - 0.2,
                delays: (0..1 + (next() * 3.0) as usize)
                    .map(|_| ((next() * 2.0 * oversample as f64) as usize) as f64 * dt)
                    .collect(),
            })
            .collect();
        let f = CtVolterraModel::new(0.4 * next() - 0.2, terms)?;
        let w = bbeq_core::DtSignal::from_samples(
            (0..n).map(|_| bbeq_core::Complex64::new(2.0 * next() - 1.0, 2.0 * next() - 1.0)).collect(),
        )?;
        let oracle = PassbandChain::new(f.clone(), p, n)?.simulate(&w)?;
        let model = model_from_ct(&f, &p, n, PulseKernel::Sampled { oversample })?;
        let v = model_apply(&model, &w)?;
        if oracle.norm() > 0.0 {
            worst = worst.max(v.sub(&oracle)?.norm() / oracle.norm());
        }
    }
    Ok(worst)
}
