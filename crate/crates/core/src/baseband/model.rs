use std::fmt::Write as _;

use num_complex::Complex64;

use crate::baseband::mindex::{sigma_tilde, sign_vectors, MIndex};
use crate::baseband::pulse::{pulse_window, split_delays, DelaySplit, PulseKernel, PulseWindow};
use crate::error::{Error, Result};
use crate::passband::{CtVolterraModel, DemodCorrection, ModulationParams, System};
use crate::signal::{dft, dft_real, idft, signed_bin, DtSignal, FreqResponse, Signal};

/// Samples the reconstruction filter `G_m` on the `n`-point grid `Omega_k` in `[-pi, pi)`.
///
/// ```text
/// G_m(W) = j^N2  sum_{r_c} sum_{r_s}  prod(r_s) * P_m(W/T - w_c sigma(r) + w_c)
///                                     * exp(-j w_c [(r_c, P1 tau') + (r_s, P2 tau')])
/// ```
///
/// The usual `2^-d` from expanding the cosines and sines is cancelled by the
/// mixer's factor of two, and `P_m` is normalised by `T` to match the
/// un-scaled zero-order hold.
pub fn recon_filter(
    m: &MIndex,
    split: &DelaySplit,
    params: &ModulationParams,
    n: usize,
    kernel: PulseKernel,
) -> FreqResponse {
    let t = params.symbol_period();
    let window = pulse_window(m, &split.frac, t);
    if window.is_empty() {
        return FreqResponse::constant(Complex64::new(0.0, 0.0), n);
    }
    let carrier = params.carrier_ratio() as i64;
    let omega_c = params.omega_c();
    let frac_cos = m.project(1, &split.frac);
    let frac_sin = m.project(2, &split.frac);
    let lead = Complex64::i().powu(m.n2() as u32);

    // Each sign combination contributes a fixed phase, sign and carrier shift.
    let mut combos: Vec<(Complex64, i64)> = Vec::new();
    for r_c in sign_vectors(m.n1()) {
        for r_s in sign_vectors(m.n2()) {
            let sign: i64 = r_s.iter().map(|&v| v as i64).product();
            let dot: f64 = r_c.iter().zip(&frac_cos).map(|(&r, &x)| r as f64 * x).sum::<f64>()
                + r_s.iter().zip(&frac_sin).map(|(&r, &x)| r as f64 * x).sum::<f64>();
            let sigma = sigma_tilde(&r_c) + sigma_tilde(&r_s);
            let weight = lead * sign as f64 * Complex64::from_polar(1.0, -omega_c * dot);
            combos.push((weight, carrier * (1 - sigma)));
        }
    }
    let values = (0..n)
        .map(|k| {
            let kb = signed_bin(k, n);
            combos
                .iter()
                .map(|&(weight, shift)| weight * kernel.response(&window, t, kb + shift * n as i64, n))
                .sum()
        })
        .collect();
    FreqResponse::new(values)
}

/// `x_{m,k}[n]`: product of held in-phase/quadrature samples, circularly indexed.
///
/// Positions in `S1`/`S3` read sample `n - k_i - 1`, positions in `S2`/`S4` read `n - k_i`.
pub fn monomial_eval(w: &DtSignal, m: &MIndex, k: &[usize]) -> DtSignal {
    let values = monomial_values(w, m, k);
    w.with_samples(values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

fn monomial_values(w: &DtSignal, m: &MIndex, k: &[usize]) -> Vec<f64> {
    let n = w.len();
    let s = w.samples();
    let factors: Vec<(bool, usize)> = m
        .entries()
        .iter()
        .zip(k)
        .map(|(&mi, &ki)| {
            let lag = ki + usize::from(mi % 2 == 1);
            (mi <= 2, lag % n)
        })
        .collect();
    (0..n)
        .map(|i| {
            factors.iter().fold(1.0, |acc, &(in_phase, lag)| {
                let v = s[(i + n - lag) % n];
                acc * if in_phase { v.re } else { v.im }
            })
        })
        .collect()
}

/// One path of the equivalent model: a Volterra monomial followed by `coeff * G_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub coeff: f64,
    pub mindex: MIndex,
    pub k: Vec<usize>,
    pub window: PulseWindow,
    pub response: FreqResponse,
    /// Centred FIR approximation of `g_m` (first tap at lag `-(len - 1) / 2`).
    pub taps: Option<Vec<Complex64>>,
}

impl Branch {
    pub fn degree(&self) -> usize {
        self.mindex.degree()
    }

    /// Unit sample response of `G_m` truncated to `n_taps` taps centred on lag 0.
    pub fn fir_taps(&self, n_taps: usize) -> Vec<Complex64> {
        let g = idft(self.response.values());
        let n = g.len() as i64;
        let half = (n_taps as i64 - 1) / 2;
        (0..n_taps as i64).map(|t| g[(t - half).rem_euclid(n) as usize]).collect()
    }
}

/// Discrete-time equivalent `v = A sum_b coeff_b (x_b * g_b)` of a passband chain.
#[derive(Debug, Clone)]
pub struct BasebandModel {
    params: ModulationParams,
    kernel: PulseKernel,
    n: usize,
    candidates: usize,
    branches: Vec<Branch>,
    correction: DemodCorrection,
}

impl BasebandModel {
    pub fn params(&self) -> &ModulationParams {
        &self.params
    }

    pub fn kernel(&self) -> PulseKernel {
        self.kernel
    }

    pub fn grid_length(&self) -> usize {
        self.n
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Branches enumerated before empty windows were dropped.
    pub fn candidate_count(&self) -> usize {
        self.candidates
    }

    pub fn correction(&self) -> &DemodCorrection {
        &self.correction
    }

    /// Replaces every reconstruction filter by its `n_taps` FIR truncation.
    pub fn with_fir(&self, n_taps: usize) -> BasebandModel {
        let n = self.n;
        let half = (n_taps as i64 - 1) / 2;
        let branches = self
            .branches
            .iter()
            .map(|b| {
                let taps = b.fir_taps(n_taps.min(n));
                let mut g = vec![Complex64::new(0.0, 0.0); n];
                for (t, &v) in taps.iter().enumerate() {
                    g[(t as i64 - half).rem_euclid(n as i64) as usize] += v;
                }
                Branch { response: FreqResponse::new(dft(&g)), taps: Some(taps), ..b.clone() }
            })
            .collect();
        BasebandModel { branches, ..self.clone() }
    }

    /// Text dump, one branch per line.
    pub fn export(&self) -> String {
        let mut out = String::from("# bbeq baseband-model v1\n");
        let kernel = match self.kernel {
            PulseKernel::Continuous => "continuous".to_string(),
            PulseKernel::Sampled { oversample } => format!("sampled:{oversample}"),
        };
        let _ = writeln!(
            out,
            "# carrier_ratio={} oversample={} grid={} kernel={} candidates={} branches={}",
            self.params.carrier_ratio(),
            self.params.oversample(),
            self.n,
            kernel,
            self.candidates,
            self.branches.len()
        );
        let t = self.params.symbol_period();
        for b in &self.branches {
            let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(",");
            let _ = write!(
                out,
                "branch coeff={:e} m={} k={} window={:e},{:e}",
                b.coeff,
                join(&mut b.mindex.entries().iter().map(|v| v.to_string())),
                join(&mut b.k.iter().map(|v| v.to_string())),
                b.window.tau_min / t,
                b.window.tau_max / t,
            );
            if let Some(taps) = &b.taps {
                let _ = write!(out, " taps={}", join(&mut taps.iter().map(|c| format!("{:e}:{:e}", c.re, c.im))));
            }
            out.push('\n');
        }
        out
    }
}

/// A branch as read back from [`BasebandModel::export`].
#[derive(Debug, Clone, PartialEq)]
pub struct BranchRecord {
    pub coeff: f64,
    pub m: Vec<u8>,
    pub k: Vec<usize>,
    /// Window edges as fractions of the symbol period.
    pub window: (f64, f64),
    pub taps: Option<Vec<Complex64>>,
}

pub fn parse_model_dump(text: &str) -> Result<Vec<BranchRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "# bbeq baseband-model v1")) => {}
        _ => return Err(Error::Parse { line: 1, msg: "missing baseband-model v1 header".into() }),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
        let mut fields = line.split_whitespace();
        if fields.next() != Some("branch") {
            return Err(err("expected a branch record"));
        }
        let mut rec = BranchRecord { coeff: f64::NAN, m: vec![], k: vec![], window: (0.0, 0.0), taps: None };
        for field in fields {
            let (key, value) = field.split_once('=').ok_or_else(|| err("field without '='"))?;
            let num = |s: &str| s.parse::<f64>().map_err(|_| err("bad number"));
            match key {
                "coeff" => rec.coeff = num(value)?,
                "m" => rec.m = value.split(',').map(|v| v.parse().map_err(|_| err("bad m entry"))).collect::<Result<_>>()?,
                "k" => rec.k = value.split(',').map(|v| v.parse().map_err(|_| err("bad k entry"))).collect::<Result<_>>()?,
                "window" => {
                    let (a, b) = value.split_once(',').ok_or_else(|| err("window needs two values"))?;
                    rec.window = (num(a)?, num(b)?);
                }
                "taps" => {
                    let taps = value
                        .split(',')
                        .map(|c| {
                            let (re, im) = c.split_once(':').ok_or_else(|| err("tap needs re:im"))?;
                            Ok(Complex64::new(num(re)?, num(im)?))
                        })
                        .collect::<Result<_>>()?;
                    rec.taps = Some(taps);
                }
                _ => return Err(err("unknown field")),
            }
        }
        if rec.coeff.is_nan() || rec.m.len() != rec.k.len() {
            return Err(err("incomplete branch"));
        }
        out.push(rec);
    }
    Ok(out)
}

/// Builds the equivalent model of `D H F M` on an `n`-symbol frame.
///
/// Each degree-`d` term contributes one branch per `m` in `{1,2,3,4}^d`
/// whose pulse window is non-empty. The constant `b0` lies outside the
/// passband and contributes nothing.
pub fn model_from_ct(
    model: &CtVolterraModel,
    params: &ModulationParams,
    n: usize,
    kernel: PulseKernel,
) -> Result<BasebandModel> {
    let t = params.symbol_period();
    let mut branches = Vec::new();
    let mut candidates = 0;
    for term in &model.terms {
        let split = split_delays(&term.delays, t)?;
        let split = match kernel {
            // Snap fractional parts to the grid so window edges land on samples.
            PulseKernel::Sampled { .. } => {
                let dt = params.sample_period();
                let mut k = Vec::with_capacity(term.delays.len());
                let mut frac = Vec::with_capacity(term.delays.len());
                for &d in &term.delays {
                    let s = params.delay_samples(d)?;
                    k.push(s / params.oversample());
                    frac.push((s % params.oversample()) as f64 * dt);
                }
                DelaySplit { k, frac }
            }
            PulseKernel::Continuous => split,
        };
        for m in MIndex::enumerate(term.degree()) {
            candidates += 1;
            let window = pulse_window(&m, &split.frac, t);
            if window.is_empty() {
                continue;
            }
            let response = recon_filter(&m, &split, params, n, kernel);
            branches.push(Branch { coeff: term.coeff, mindex: m, k: split.k.clone(), window, response, taps: None });
        }
    }
    let correction = DemodCorrection::new(params, n, kernel)?;
    Ok(BasebandModel { params: *params, kernel, n, candidates, branches, correction })
}

/// Uncorrected sum `u = sum_b coeff_b (x_b * g_b)` in the frequency domain.
fn branch_sum_spectrum(model: &BasebandModel, w: &DtSignal) -> Vec<Complex64> {
    let mut u = vec![Complex64::new(0.0, 0.0); model.n];
    for b in &model.branches {
        let x = dft_real(&monomial_values(w, &b.mindex, &b.k));
        for ((acc, xv), g) in u.iter_mut().zip(&x).zip(b.response.values()) {
            *acc += xv * g * b.coeff;
        }
    }
    u
}

/// `v = A sum_b coeff_b (x_b * g_b)` with circular convolution.
pub fn model_apply(model: &BasebandModel, w: &DtSignal) -> Result<DtSignal> {
    if w.len() != model.n {
        return Err(Error::LengthMismatch { expected: model.n, actual: w.len() });
    }
    let u = branch_sum_spectrum(model, w);
    model.correction.apply_spectrum(&u, w.symbol_rate())
}

impl System for BasebandModel {
    fn apply(&self, w: &DtSignal) -> Result<DtSignal> {
        model_apply(self, w)
    }
}

/// Output of a single branch after the demodulator correction.
pub fn branch_output(model: &BasebandModel, index: usize, w: &DtSignal) -> Result<DtSignal> {
    let b = &model.branches[index];
    let x = dft_real(&monomial_values(w, &b.mindex, &b.k));
    let u: Vec<Complex64> = x.iter().zip(b.response.values()).map(|(xv, g)| xv * g * b.coeff).collect();
    model.correction.apply_spectrum(&u, w.symbol_rate())
}
