//! Delay splitting, pulse windows and their Fourier transforms.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::baseband::MIndex;
use crate::error::{Error, Result};

/// `tau = k T + frac` with integer `k` and `frac` in `[0, T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaySplit {
    pub k: Vec<usize>,
    pub frac: Vec<f64>,
}

/// Splits every delay into whole symbol periods plus a fractional remainder.
pub fn split_delays(tau: &[f64], symbol_period: f64) -> Result<DelaySplit> {
    let mut k = Vec::with_capacity(tau.len());
    let mut frac = Vec::with_capacity(tau.len());
    for &t in tau {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidDelay(t));
        }
        let mut whole = (t / symbol_period).floor();
        let mut rest = t - whole * symbol_period;
        // floor can land one period short when t is an exact multiple that
        // does not divide cleanly in floating point.
        if rest >= symbol_period {
            whole += 1.0;
            rest -= symbol_period;
        }
        k.push(whole as usize);
        frac.push(rest.max(0.0));
    }
    Ok(DelaySplit { k, frac })
}

/// Support `[tau_min, tau_max)` of the product pulse within one symbol period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseWindow {
    pub tau_min: f64,
    pub tau_max: f64,
}

impl PulseWindow {
    pub fn full(symbol_period: f64) -> Self {
        Self { tau_min: 0.0, tau_max: symbol_period }
    }

    pub fn is_empty(&self) -> bool {
        self.tau_min >= self.tau_max
    }

    pub fn width(&self) -> f64 {
        (self.tau_max - self.tau_min).max(0.0)
    }

    /// Fourier transform of the indicator of `[tau_min, tau_max)`.
    pub fn ft(&self, omega: f64) -> Complex64 {
        if self.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        if omega == 0.0 {
            return Complex64::new(self.width(), 0.0);
        }
        let j = Complex64::i();
        ((-j * omega * self.tau_min).exp() - (-j * omega * self.tau_max).exp()) / (j * omega)
    }

    /// Transform of the same window sampled every `dt` seconds (rectangle-rule
    /// weights, so `dt * sum_s exp(-j omega s dt)`).
    pub fn ft_sampled(&self, omega: f64, dt: f64) -> Complex64 {
        if self.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let a = (self.tau_min / dt).round() as i64;
        let b = (self.tau_max / dt).round() as i64;
        let x = omega * dt;
        let sum = dirichlet(x.rem_euclid(2.0 * PI), a, b - a);
        sum * dt
    }
}

/// `sum_{s=a}^{a+n-1} exp(-j x s)` for `x` reduced to `[0, 2 pi)`.
fn dirichlet(x: f64, a: i64, n: i64) -> Complex64 {
    if n <= 0 {
        return Complex64::new(0.0, 0.0);
    }
    if x == 0.0 {
        return Complex64::new(n as f64, 0.0);
    }
    let ratio = (n as f64 * x / 2.0).sin() / (x / 2.0).sin();
    Complex64::from_polar(ratio, -x * (a as f64 + (n - 1) as f64 / 2.0))
}

/// Window of the product pulse for index `m` and fractional delays `frac`.
///
/// Factors in `S2 ∪ S4` switch on at their delay, factors in `S1 ∪ S3` switch off.
pub fn pulse_window(m: &MIndex, frac: &[f64], symbol_period: f64) -> PulseWindow {
    let tau_min = m.undelayed().map(|i| frac[i]).fold(0.0_f64, f64::max);
    let tau_max = m.delayed().map(|i| frac[i]).fold(symbol_period, f64::min);
    PulseWindow { tau_min, tau_max }
}

/// How the zero-order-hold pulse is transformed.
///
/// `Sampled` matches the oversampled simulation grid exactly; `Continuous`
/// uses the ideal rectangle transform and only agrees with the grid as the
/// oversampling factor grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseKernel {
    Continuous,
    Sampled { oversample: usize },
}

impl PulseKernel {
    /// Normalised transform `P(omega) / T` of `window` at `omega T = 2 pi kappa / n`.
    ///
    /// `kappa` is an integer bin on an `n`-point symbol-rate grid, so the
    /// carrier offsets used by the demodulator and the reconstruction
    /// filters stay exact.
    pub fn response(&self, window: &PulseWindow, symbol_period: f64, kappa: i64, n: usize) -> Complex64 {
        if window.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        match *self {
            PulseKernel::Continuous => {
                let a = window.tau_min / symbol_period;
                let b = window.tau_max / symbol_period;
                let y = 2.0 * PI * kappa as f64 / n as f64;
                if kappa == 0 {
                    return Complex64::new(b - a, 0.0);
                }
                let half = (b - a) / 2.0;
                Complex64::from_polar(2.0 * (y * half).sin() / y, -y * (a + half))
            }
            PulseKernel::Sampled { oversample } => {
                let l = oversample as i64;
                let a = (window.tau_min / symbol_period * l as f64).round() as i64;
                let b = (window.tau_max / symbol_period * l as f64).round() as i64;
                sampled_rect(kappa, n as i64 * l, a, b - a) / l as f64
            }
        }
    }
}

/// `sum_{s=a}^{a+len-1} exp(-j 2 pi kappa s / grid)` with integer phase reduction.
fn sampled_rect(kappa: i64, grid: i64, a: i64, len: i64) -> Complex64 {
    if len <= 0 {
        return Complex64::new(0.0, 0.0);
    }
    let r = kappa.rem_euclid(grid);
    if r == 0 {
        return Complex64::new(len as f64, 0.0);
    }
    let (r, g) = (r as i128, grid as i128);
    let num = ((len as i128 * r).rem_euclid(2 * g)) as f64 * PI / g as f64;
    let den = r as f64 * PI / g as f64;
    let ratio = num.sin() / den.sin();
    // phase = -2 pi r (a + (len-1)/2) / grid, reduced exactly over 2*grid.
    let phase_num = (r * (2 * a as i128 + len as i128 - 1)).rem_euclid(2 * g);
    let phase = -(phase_num as f64) * PI / g as f64;
    Complex64::from_polar(ratio, phase)
}
