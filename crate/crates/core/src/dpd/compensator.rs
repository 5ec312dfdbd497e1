use std::fmt::Write as _;

use faer::Mat;
use num_complex::Complex64;

use crate::dpd::lstsq::{mat_vec, LeastSquares};
use crate::dpd::structure::{regressor_matrix, CompensatorStructure};
use crate::error::{Error, Result};
use crate::passband::System;
use crate::signal::{DtSignal, Signal};

/// A pre-distorter `C` applied ahead of the system.
pub trait Compensator {
    fn compensate(&self, w: &DtSignal) -> Result<DtSignal>;
}

/// Leaves the signal untouched.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoCompensation;

impl Compensator for NoCompensation {
    fn compensate(&self, w: &DtSignal) -> Result<DtSignal> {
        Ok(w.clone())
    }
}

/// `C(w) = 2 w - S(w)`.
#[derive(Debug, Clone)]
pub struct IdealCompensator<S> {
    pub system: S,
}

impl<S: System> Compensator for IdealCompensator<S> {
    fn compensate(&self, w: &DtSignal) -> Result<DtSignal> {
        w.scale(2.0).sub(&self.system.apply(w)?)
    }
}

/// `2 w - S(w)` for a one-off call.
pub fn ideal_compensator(w: &DtSignal, system: &(impl System + ?Sized)) -> Result<DtSignal> {
    w.scale(2.0).sub(&system.apply(w)?)
}

/// Real and imaginary output coefficients with their significance masks.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedCompensator {
    structure: CompensatorStructure,
    coeff_re: Vec<f64>,
    coeff_im: Vec<f64>,
    mask_re: Vec<bool>,
    mask_im: Vec<bool>,
}

impl FittedCompensator {
    pub fn from_parts(structure: CompensatorStructure, coeff_re: Vec<f64>, coeff_im: Vec<f64>) -> Result<Self> {
        let k = structure.n_columns();
        for len in [coeff_re.len(), coeff_im.len()] {
            if len != k {
                return Err(Error::LengthMismatch { expected: k, actual: len });
            }
        }
        Ok(Self { structure, mask_re: vec![true; k], mask_im: vec![true; k], coeff_re, coeff_im })
    }

    /// Least-squares fit of the map `input -> target`, one solve per output channel.
    pub fn fit(structure: CompensatorStructure, input: &DtSignal, target: &DtSignal) -> Result<Self> {
        Self::fit_frames(structure, std::slice::from_ref(input), std::slice::from_ref(target))
    }

    /// As [`FittedCompensator::fit`] with the rows of several periodic frames stacked.
    pub fn fit_frames(structure: CompensatorStructure, inputs: &[DtSignal], targets: &[DtSignal]) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::EmptySignal);
        }
        if inputs.len() != targets.len() {
            return Err(Error::LengthMismatch { expected: inputs.len(), actual: targets.len() });
        }
        for (i, t) in inputs.iter().zip(targets) {
            if i.len() != t.len() {
                return Err(Error::LengthMismatch { expected: i.len(), actual: t.len() });
            }
        }
        let blocks: Vec<Mat<f64>> = inputs.iter().map(|w| regressor_matrix(w, &structure)).collect();
        let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
        let mut x = Mat::<f64>::zeros(rows, structure.n_columns());
        let mut at = 0;
        for b in &blocks {
            x.get_mut(at..at + b.nrows(), ..).copy_from(b);
            at += b.nrows();
        }
        drop(blocks);
        let ls = LeastSquares::new(&x)?;
        log::info!("{structure}: rank {} of {}, condition {:.3e}", ls.rank(), x.ncols(), ls.condition());
        let re: Vec<f64> = targets.iter().flat_map(|t| t.re()).collect();
        let im: Vec<f64> = targets.iter().flat_map(|t| t.im()).collect();
        Self::from_parts(structure, ls.solve(&re)?, ls.solve(&im)?)
    }

    /// Fits a pre-inverse as the post-inverse of `system`: regressors from
    /// `v = S(w)`, target `w`.
    pub fn fit_inverse(structure: CompensatorStructure, w: &DtSignal, system: &(impl System + ?Sized)) -> Result<Self> {
        let v = system.apply(w)?;
        Self::fit(structure, &v, w)
    }

    pub fn structure(&self) -> &CompensatorStructure {
        &self.structure
    }

    pub fn coeff_re(&self) -> &[f64] {
        &self.coeff_re
    }

    pub fn coeff_im(&self) -> &[f64] {
        &self.coeff_im
    }

    pub fn mask_re(&self) -> &[bool] {
        &self.mask_re
    }

    pub fn mask_im(&self) -> &[bool] {
        &self.mask_im
    }

    pub fn n_coeffs(&self) -> usize {
        self.coeff_re.len() + self.coeff_im.len()
    }

    pub fn n_significant(&self) -> usize {
        self.mask_re.iter().chain(&self.mask_im).filter(|&&m| m).count()
    }

    /// All coefficients as `(channel, index, value)` with channel 0 = real.
    pub fn iter_coeffs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let re = self.coeff_re.iter().enumerate().map(|(i, &c)| (0, i, c));
        let im = self.coeff_im.iter().enumerate().map(|(i, &c)| (1, i, c));
        re.chain(im)
    }

    /// Copy with the given masks (`true` keeps a coefficient).
    pub fn with_masks(&self, mask_re: Vec<bool>, mask_im: Vec<bool>) -> Result<Self> {
        let k = self.coeff_re.len();
        for len in [mask_re.len(), mask_im.len()] {
            if len != k {
                return Err(Error::LengthMismatch { expected: k, actual: len });
            }
        }
        Ok(Self { mask_re, mask_im, ..self.clone() })
    }

    pub fn effective_re(&self) -> Vec<f64> {
        masked(&self.coeff_re, &self.mask_re)
    }

    pub fn effective_im(&self) -> Vec<f64> {
        masked(&self.coeff_im, &self.mask_im)
    }

    /// Text export, one coefficient per line.
    pub fn export(&self) -> String {
        let basis = self.structure.block_basis();
        let mut out = String::from("# bbeq compensator v1\n");
        let _ = writeln!(out, "# structure={} columns={}", self.structure, self.structure.n_columns());
        for (channel, idx, value) in self.iter_coeffs() {
            let (name, mask) = if channel == 0 { ("re", &self.mask_re) } else { ("im", &self.mask_im) };
            let _ = writeln!(
                out,
                "coeff block={} pattern={} channel={} value={:e} significant={}",
                idx / basis.len(),
                basis[idx % basis.len()].descriptor(),
                name,
                value,
                u8::from(mask[idx])
            );
        }
        out
    }

    /// Inverse of [`FittedCompensator::export`].
    pub fn import(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        if !matches!(lines.next(), Some((_, "# bbeq compensator v1"))) {
            return Err(Error::Parse { line: 1, msg: "missing compensator v1 header".into() });
        }
        let (_, meta) = lines.next().ok_or(Error::Parse { line: 2, msg: "missing structure line".into() })?;
        let structure: CompensatorStructure = meta
            .trim_start_matches('#')
            .split_whitespace()
            .find_map(|f| f.strip_prefix("structure="))
            .ok_or(Error::Parse { line: 2, msg: "missing structure".into() })?
            .parse()?;
        let basis = structure.block_basis();
        let k = structure.n_columns();
        let (mut re, mut im) = (Vec::with_capacity(k), Vec::with_capacity(k));
        let (mut mre, mut mim) = (Vec::with_capacity(k), Vec::with_capacity(k));
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
            let mut fields = line.split_whitespace();
            if fields.next() != Some("coeff") {
                return Err(err("expected a coeff record"));
            }
            let (mut block, mut pattern, mut channel, mut value, mut sig) = (None, None, None, None, None);
            for f in fields {
                let (key, v) = f.split_once('=').ok_or_else(|| err("field without '='"))?;
                match key {
                    "block" => block = Some(v.parse::<usize>().map_err(|_| err("bad block"))?),
                    "pattern" => pattern = Some(v),
                    "channel" => channel = Some(v),
                    "value" => value = Some(v.parse::<f64>().map_err(|_| err("bad value"))?),
                    "significant" => sig = Some(v == "1"),
                    _ => return Err(err("unknown field")),
                }
            }
            let (Some(block), Some(pattern), Some(channel), Some(value), Some(sig)) = (block, pattern, channel, value, sig)
            else {
                return Err(err("incomplete coeff record"));
            };
            let (coeffs, mask) = match channel {
                "re" => (&mut re, &mut mre),
                "im" => (&mut im, &mut mim),
                _ => return Err(err("channel must be re or im")),
            };
            let idx = coeffs.len();
            if idx >= k || idx / basis.len() != block || basis[idx % basis.len()].descriptor() != pattern {
                return Err(err("coefficient out of basis order"));
            }
            coeffs.push(value);
            mask.push(sig);
        }
        Self::from_parts(structure, re, im)?.with_masks(mre, mim)
    }
}

fn masked(c: &[f64], m: &[bool]) -> Vec<f64> {
    c.iter().zip(m).map(|(&v, &keep)| if keep { v } else { 0.0 }).collect()
}

impl Compensator for FittedCompensator {
    fn compensate(&self, w: &DtSignal) -> Result<DtSignal> {
        let x = regressor_matrix(w, &self.structure);
        let re = mat_vec(&x, &self.effective_re());
        let im = mat_vec(&x, &self.effective_im());
        let samples = re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect();
        DtSignal::new(samples, w.symbol_rate())
    }
}

/// `EVM(u, S(C(u)))` in dB.
pub fn closed_loop_evm(u: &DtSignal, compensator: &dyn Compensator, system: &(impl System + ?Sized)) -> Result<f64> {
    let out = system.apply(&compensator.compensate(u)?)?;
    crate::signal::evm_db(u, &out)
}
