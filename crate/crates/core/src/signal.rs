//! Signal containers, DFT helpers and the EVM metric.
//!
//! Every signal is one period of a periodic sequence. Frequency-domain
//! operations therefore act on DFT bins and convolution is circular.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// EVM reported when the error vector is exactly zero.
pub const EVM_FLOOR_DB: f64 = -300.0;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Forward DFT without normalisation.
pub fn dft(samples: &[Complex64]) -> Vec<Complex64> {
    let mut buf = samples.to_vec();
    if buf.is_empty() {
        return buf;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(&mut buf);
    buf
}

/// Inverse DFT including the `1/N` factor.
pub fn idft(spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut buf = spectrum.to_vec();
    if buf.is_empty() {
        return buf;
    }
    let n = buf.len();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    fft.process(&mut buf);
    let scale = 1.0 / n as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// DFT of a real sequence.
pub fn dft_real(samples: &[f64]) -> Vec<Complex64> {
    let buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    dft(&buf)
}

/// Signed bin index in `[-n/2, n/2)` for DFT bin `k` of an `n`-point grid.
pub fn signed_bin(k: usize, n: usize) -> i64 {
    let (k, n) = (k as i64, n as i64);
    if 2 * k >= n {
        k - n
    } else {
        k
    }
}

/// Principal-value DT frequency of bin `k`, in `[-pi, pi)`.
pub fn bin_frequency(k: usize, n: usize) -> f64 {
    2.0 * PI * signed_bin(k, n) as f64 / n as f64
}

pub fn l2_norm(samples: &[Complex64]) -> f64 {
    samples.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn check_samples(samples: &[Complex64]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::EmptySignal);
    }
    if let Some(i) = samples.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFiniteSample(i));
    }
    Ok(())
}

/// Access to the sample buffer shared by DT and CT signals.
pub trait Signal: Sized {
    fn samples(&self) -> &[Complex64];

    /// Same metadata, new samples of equal length.
    fn with_samples(&self, samples: Vec<Complex64>) -> Self;

    fn len(&self) -> usize {
        self.samples().len()
    }

    fn is_empty(&self) -> bool {
        self.samples().is_empty()
    }

    fn spectrum(&self) -> Vec<Complex64> {
        dft(self.samples())
    }

    fn norm(&self) -> f64 {
        l2_norm(self.samples())
    }
}

/// A finite complex baseband sequence (one period).
#[derive(Debug, Clone, PartialEq)]
pub struct DtSignal {
    samples: Vec<Complex64>,
    symbol_rate: f64,
}

impl DtSignal {
    pub fn new(samples: Vec<Complex64>, symbol_rate: f64) -> Result<Self> {
        check_samples(&samples)?;
        Ok(Self { samples, symbol_rate })
    }

    /// Unit symbol rate; convenient for purely discrete work.
    pub fn from_samples(samples: Vec<Complex64>) -> Result<Self> {
        Self::new(samples, 1.0)
    }

    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::LengthMismatch { expected: re.len(), actual: im.len() });
        }
        Self::from_samples(re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
    }

    pub fn zeros(n: usize, symbol_rate: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n], symbol_rate)
    }

    pub fn symbol_rate(&self) -> f64 {
        self.symbol_rate
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn re(&self) -> Vec<f64> {
        self.samples.iter().map(|v| v.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.samples.iter().map(|v| v.im).collect()
    }

    /// Circular shift: `out[n] = self[n - shift]`.
    pub fn circular_shift(&self, shift: isize) -> Self {
        let n = self.samples.len() as isize;
        let samples = (0..n)
            .map(|i| self.samples[(i - shift).rem_euclid(n) as usize])
            .collect();
        self.with_samples(samples)
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.with_samples(self.samples.iter().map(|v| v * factor).collect())
    }

    /// `self - other`, sample-wise.
    pub fn sub(&self, other: &DtSignal) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &DtSignal) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &DtSignal, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), actual: other.len() });
        }
        Ok(self.with_samples(self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect()))
    }
}

impl Signal for DtSignal {
    fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    fn with_samples(&self, samples: Vec<Complex64>) -> Self {
        assert_eq!(samples.len(), self.samples.len(), "sample count must be preserved");
        Self { samples, symbol_rate: self.symbol_rate }
    }
}

/// Uniformly oversampled stand-in for a continuous-time signal.
///
/// Holds `oversample * n_symbols` samples at `sample_rate = oversample * symbol_rate`.
/// Real-valued signals keep a zero imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct CtSignal {
    samples: Vec<Complex64>,
    sample_rate: f64,
    oversample: usize,
    n_symbols: usize,
}

impl CtSignal {
    pub fn new(samples: Vec<Complex64>, sample_rate: f64, oversample: usize, n_symbols: usize) -> Result<Self> {
        check_samples(&samples)?;
        if oversample == 0 || samples.len() != oversample * n_symbols {
            return Err(Error::LengthMismatch { expected: oversample * n_symbols, actual: samples.len() });
        }
        Ok(Self { samples, sample_rate, oversample, n_symbols })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|v| v.im == 0.0)
    }
}

impl Signal for CtSignal {
    fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    fn with_samples(&self, samples: Vec<Complex64>) -> Self {
        assert_eq!(samples.len(), self.samples.len(), "sample count must be preserved");
        Self { samples, ..*self }
    }
}

/// Frequency response sampled on the DFT grid of a companion signal.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqResponse {
    values: Vec<Complex64>,
}

impl FreqResponse {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn constant(value: Complex64, grid_length: usize) -> Self {
        Self { values: vec![value; grid_length] }
    }

    /// Samples `h(Omega)` at the principal-value bin frequencies in `[-pi, pi)`.
    pub fn from_fn(grid_length: usize, h: impl Fn(f64) -> Complex64) -> Self {
        Self { values: (0..grid_length).map(|k| h(bin_frequency(k, grid_length))).collect() }
    }

    pub fn grid_length(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Bin-wise product.
    pub fn compose(&self, other: &FreqResponse) -> Result<FreqResponse> {
        if self.grid_length() != other.grid_length() {
            return Err(Error::LengthMismatch { expected: self.grid_length(), actual: other.grid_length() });
        }
        Ok(FreqResponse::new(self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect()))
    }
}

/// Multiplies the spectrum of `signal` by `response` bin by bin.
pub fn apply_freq_response<S: Signal>(signal: &S, response: &FreqResponse) -> Result<S> {
    if signal.len() != response.grid_length() {
        return Err(Error::LengthMismatch { expected: signal.len(), actual: response.grid_length() });
    }
    let mut spec = signal.spectrum();
    for (s, h) in spec.iter_mut().zip(response.values()) {
        *s *= h;
    }
    Ok(signal.with_samples(idft(&spec)))
}

/// `20 log10(||actual - reference|| / ||reference||)`, floored at [`EVM_FLOOR_DB`].
pub fn evm_db(reference: &DtSignal, actual: &DtSignal) -> Result<f64> {
    if reference.len() != actual.len() {
        return Err(Error::LengthMismatch { expected: reference.len(), actual: actual.len() });
    }
    let ref_norm = reference.norm();
    if ref_norm == 0.0 {
        return Err(Error::ZeroReference);
    }
    let err = reference
        .samples()
        .iter()
        .zip(actual.samples())
        .map(|(a, b)| (b - a).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if err == 0.0 {
        return Ok(EVM_FLOOR_DB);
    }
    Ok((20.0 * (err / ref_norm).log10()).max(EVM_FLOOR_DB))
}
