//! Oversampled simulation of the passband chain: zero-order hold, mixer,
//! continuous-time Volterra nonlinearity, ideal band-pass and the ideal
//! demodulator.
//!
//! The "continuous" signals live on a periodic grid of `L` samples per
//! symbol, so the ideal filters are exact DFT masks and delays must fall on
//! grid points. This chain is the oracle every analytic result is checked
//! against.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::baseband::{PulseKernel, PulseWindow};
use crate::error::{Error, Result};
use crate::signal::{dft, dft_real, idft, signed_bin, CtSignal, DtSignal, FreqResponse, Signal};

/// Below this magnitude the demodulator correction determinant is treated as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

/// Relative tolerance (in grid samples) for accepting a delay as on-grid.
const GRID_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationParams {
    /// Symbol interval `T` in seconds.
    symbol_period: f64,
    /// Carrier-to-symbol-rate ratio `M`.
    carrier_ratio: usize,
    /// Grid samples per symbol `L`.
    oversample: usize,
}

impl ModulationParams {
    pub fn new(symbol_period: f64, carrier_ratio: usize, oversample: usize) -> Result<Self> {
        if !(symbol_period.is_finite() && symbol_period > 0.0) {
            return Err(Error::InvalidParams(format!("symbol period must be positive, got {symbol_period}")));
        }
        if carrier_ratio == 0 {
            return Err(Error::InvalidParams("carrier ratio must be at least 1".into()));
        }
        if oversample < 2 * carrier_ratio + 2 {
            return Err(Error::InvalidParams(format!(
                "oversample factor {oversample} cannot represent carrier ratio {carrier_ratio} (need >= {})",
                2 * carrier_ratio + 2
            )));
        }
        Ok(Self { symbol_period, carrier_ratio, oversample })
    }

    /// Symbol period `1 / f_symb`, carrier `f_c = M f_symb`.
    pub fn from_rates(symbol_rate: f64, carrier_ratio: usize, oversample: usize) -> Result<Self> {
        Self::new(1.0 / symbol_rate, carrier_ratio, oversample)
    }

    pub fn symbol_period(&self) -> f64 {
        self.symbol_period
    }

    pub fn carrier_ratio(&self) -> usize {
        self.carrier_ratio
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn sample_period(&self) -> f64 {
        self.symbol_period / self.oversample as f64
    }

    pub fn sample_rate(&self) -> f64 {
        self.oversample as f64 / self.symbol_period
    }

    /// Carrier `omega_c = 2 pi M / T`.
    pub fn omega_c(&self) -> f64 {
        2.0 * PI * self.carrier_ratio as f64 / self.symbol_period
    }

    /// Baseband half-width `omega_b = pi / T`.
    pub fn omega_b(&self) -> f64 {
        PI / self.symbol_period
    }

    /// Image offset of the demodulator correction, `4 pi M`.
    pub fn theta(&self) -> f64 {
        4.0 * PI * self.carrier_ratio as f64
    }

    /// Converts a delay in seconds to whole grid samples, rejecting off-grid values.
    pub fn delay_samples(&self, tau: f64) -> Result<usize> {
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::InvalidDelay(tau));
        }
        let exact = tau / self.sample_period();
        let nearest = exact.round();
        if (exact - nearest).abs() > GRID_TOLERANCE * nearest.max(1.0) {
            return Err(Error::OffGridDelay { delay: tau, nearest: nearest * self.sample_period() });
        }
        Ok(nearest as usize)
    }
}

/// One product term `coeff * prod_i x(t - delays[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolterraTerm {
    pub coeff: f64,
    pub delays: Vec<f64>,
}

impl VolterraTerm {
    pub fn degree(&self) -> usize {
        self.delays.len()
    }
}

/// `y(t) = b0 + sum_k b_k prod_i x(t - t_{k,i})`.
#[derive(Debug, Clone, PartialEq)]
pub struct CtVolterraModel {
    pub b0: f64,
    pub terms: Vec<VolterraTerm>,
}

impl CtVolterraModel {
    pub fn new(b0: f64, terms: Vec<VolterraTerm>) -> Result<Self> {
        if !b0.is_finite() {
            return Err(Error::InvalidModel("constant term must be finite".into()));
        }
        for (k, term) in terms.iter().enumerate() {
            if term.delays.is_empty() {
                return Err(Error::InvalidModel(format!("term {k} has degree 0")));
            }
            if !term.coeff.is_finite() {
                return Err(Error::InvalidModel(format!("term {k} has a non-finite coefficient")));
            }
            if let Some(&bad) = term.delays.iter().find(|t| !t.is_finite() || **t < 0.0) {
                return Err(Error::InvalidDelay(bad));
            }
        }
        Ok(Self { b0, terms })
    }

    /// `y = x`.
    pub fn identity() -> Self {
        Self { b0: 0.0, terms: vec![VolterraTerm { coeff: 1.0, delays: vec![0.0] }] }
    }

    /// `y(t) = x(t) - delta * x(t - tau_1) x(t - tau_2) x(t - tau_3)`.
    pub fn cubic_distortion(delta: f64, taus: [f64; 3]) -> Result<Self> {
        Self::new(
            0.0,
            vec![
                VolterraTerm { coeff: 1.0, delays: vec![0.0] },
                VolterraTerm { coeff: -delta, delays: taus.to_vec() },
            ],
        )
    }

    /// Largest term degree.
    pub fn degree(&self) -> usize {
        self.terms.iter().map(VolterraTerm::degree).max().unwrap_or(0)
    }

    /// Largest delay.
    pub fn depth(&self) -> f64 {
        self.terms.iter().flat_map(|t| t.delays.iter().copied()).fold(0.0, f64::max)
    }

    /// Moves every delay to the nearest grid point; returns the largest shift in seconds.
    pub fn snap_to_grid(&self, params: &ModulationParams) -> (CtVolterraModel, f64) {
        let dt = params.sample_period();
        let mut worst = 0.0_f64;
        let terms = self
            .terms
            .iter()
            .map(|t| VolterraTerm {
                coeff: t.coeff,
                delays: t
                    .delays
                    .iter()
                    .map(|&d| {
                        let snapped = (d / dt).round() * dt;
                        worst = worst.max((snapped - d).abs());
                        snapped
                    })
                    .collect(),
            })
            .collect();
        (CtVolterraModel { b0: self.b0, terms }, worst)
    }
}

/// Zero-order hold onto the grid: each symbol is held for `L` samples.
pub fn zoh(u: &DtSignal, params: &ModulationParams) -> CtSignal {
    let l = params.oversample();
    let samples = u.samples().iter().flat_map(|&v| std::iter::repeat_n(v, l)).collect();
    CtSignal::new(samples, params.sample_rate(), l, u.len()).expect("held samples are finite")
}

/// `x(t) = 2 Re[exp(j omega_c t) x0(t)]`.
pub fn mixer(x0: &CtSignal, params: &ModulationParams) -> CtSignal {
    let (l, m) = (params.oversample(), params.carrier_ratio());
    let samples = x0
        .samples()
        .iter()
        .enumerate()
        .map(|(s, &v)| {
            let carrier = Complex64::from_polar(1.0, 2.0 * PI * ((m * s) % l) as f64 / l as f64);
            Complex64::new(2.0 * (carrier * v).re, 0.0)
        })
        .collect();
    x0.with_samples(samples)
}

/// Applies the Volterra model with circular delays on the periodic grid.
pub fn ct_volterra(x: &CtSignal, model: &CtVolterraModel, params: &ModulationParams) -> Result<CtSignal> {
    let len = x.len();
    let lags: Vec<Vec<usize>> = model
        .terms
        .iter()
        .map(|t| t.delays.iter().map(|&d| params.delay_samples(d).map(|r| r % len)).collect())
        .collect::<Result<_>>()?;
    let xs = x.samples();
    let samples = (0..len)
        .map(|s| {
            let mut acc = Complex64::new(model.b0, 0.0);
            for (term, lag) in model.terms.iter().zip(&lags) {
                let prod = lag.iter().fold(Complex64::new(1.0, 0.0), |p, &r| p * xs[(s + len - r) % len]);
                acc += prod * term.coeff;
            }
            acc
        })
        .collect();
    Ok(x.with_samples(samples))
}

/// Grid bin `kappa` lies in the half-open passband `omega_c - omega_b <= |omega| < omega_c + omega_b`.
fn in_passband(kappa: i64, n_symbols: i64, carrier_ratio: i64) -> bool {
    let offset = kappa.abs() - carrier_ratio * n_symbols;
    -n_symbols <= 2 * offset && 2 * offset < n_symbols
}

/// Ideal band-pass around the carrier as a DFT mask.
pub fn ideal_bandpass(y: &CtSignal, params: &ModulationParams) -> CtSignal {
    let len = y.len();
    let n = y.n_symbols() as i64;
    let m = params.carrier_ratio() as i64;
    let mut spec = y.spectrum();
    for (k, v) in spec.iter_mut().enumerate() {
        if !in_passband(signed_bin(k, len), n, m) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    let real = y.is_real();
    let mut out = idft(&spec);
    if real {
        for v in &mut out {
            v.im = 0.0;
        }
    }
    y.with_samples(out)
}

/// The linear correction `A` that undoes the zero-order-hold shaping and the
/// image folded in from `-omega_c`.
///
/// `Re(s) = A_rr Re(w) + A_ri Im(w)` and `Im(s) = A_ir Re(w) + A_ii Im(w)`
/// with `A_rr = (P0 - Pi) Q`, `A_ir = A_ri = -Pq Q`, `A_ii = (P0 + Pi) Q` and
/// `Q = 1 / (P0^2 - Pi^2 - Pq^2)`. On an even-length grid the `Omega = -pi`
/// bin is its own mirror; there the relation is solved as a real 2x2 system.
#[derive(Debug, Clone, PartialEq)]
pub struct DemodCorrection {
    a_rr: FreqResponse,
    a_ri: FreqResponse,
    a_ii: FreqResponse,
    nyquist: Option<[[f64; 2]; 2]>,
}

/// Zero-order-hold pulse transforms `(P0, P+, P-)` at DT bin `k` of `n`.
fn zoh_images(params: &ModulationParams, kernel: PulseKernel, k: usize, n: usize) -> [Complex64; 3] {
    let full = PulseWindow::full(params.symbol_period());
    let t = params.symbol_period();
    let kb = signed_bin(k, n);
    let shift = 2 * (params.carrier_ratio() * n) as i64;
    [
        kernel.response(&full, t, kb, n),
        kernel.response(&full, t, kb + shift, n),
        kernel.response(&full, t, kb - shift, n),
    ]
}

impl DemodCorrection {
    pub fn new(params: &ModulationParams, n: usize, kernel: PulseKernel) -> Result<Self> {
        let j = Complex64::i();
        let mut a_rr = Vec::with_capacity(n);
        let mut a_ri = Vec::with_capacity(n);
        let mut a_ii = Vec::with_capacity(n);
        let nyquist_bin = n.is_multiple_of(2).then_some(n / 2);
        let mut nyquist = None;
        for k in 0..n {
            let [p0, pp, pm] = zoh_images(params, kernel, k, n);
            if Some(k) == nyquist_bin {
                // U = P0 W + P+ conj(W) with W = a + jb real-valued parts.
                let alpha = p0 + pp;
                let beta = j * (p0 - pp);
                let det = alpha.re * beta.im - beta.re * alpha.im;
                if det.abs() < SINGULAR_TOLERANCE {
                    return Err(Error::SingularCorrection { bin: k });
                }
                nyquist = Some([[beta.im / det, -beta.re / det], [-alpha.im / det, alpha.re / det]]);
                a_rr.push(Complex64::new(0.0, 0.0));
                a_ri.push(Complex64::new(0.0, 0.0));
                a_ii.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let pi = (pp + pm) / 2.0;
            let pq = (pp - pm) / (2.0 * j);
            let det = p0 * p0 - pi * pi - pq * pq;
            if det.norm() < SINGULAR_TOLERANCE {
                return Err(Error::SingularCorrection { bin: k });
            }
            let q = det.inv();
            a_rr.push((p0 - pi) * q);
            a_ri.push(-pq * q);
            a_ii.push((p0 + pi) * q);
        }
        Ok(Self {
            a_rr: FreqResponse::new(a_rr),
            a_ri: FreqResponse::new(a_ri),
            a_ii: FreqResponse::new(a_ii),
            nyquist,
        })
    }

    pub fn grid_length(&self) -> usize {
        self.a_rr.grid_length()
    }

    pub fn a_rr(&self) -> &FreqResponse {
        &self.a_rr
    }

    pub fn a_ri(&self) -> &FreqResponse {
        &self.a_ri
    }

    pub fn a_ii(&self) -> &FreqResponse {
        &self.a_ii
    }

    /// Applies the correction in the frequency domain given `DFT(u)`.
    pub fn apply_spectrum(&self, u_spec: &[Complex64], symbol_rate: f64) -> Result<DtSignal> {
        let n = self.grid_length();
        if u_spec.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: u_spec.len() });
        }
        let u = idft(u_spec);
        let re: Vec<f64> = u.iter().map(|v| v.re).collect();
        let im: Vec<f64> = u.iter().map(|v| v.im).collect();
        let (rs, is) = (dft_real(&re), dft_real(&im));
        let mut out_re = Vec::with_capacity(n);
        let mut out_im = Vec::with_capacity(n);
        for k in 0..n {
            let (arr, ari, aii) = (self.a_rr.values()[k], self.a_ri.values()[k], self.a_ii.values()[k]);
            out_re.push(arr * rs[k] + ari * is[k]);
            out_im.push(ari * rs[k] + aii * is[k]);
        }
        if let Some(inv) = self.nyquist {
            let k = n / 2;
            let (ur, ui) = (rs[k].re, is[k].re);
            out_re[k] = Complex64::new(inv[0][0] * ur + inv[0][1] * ui, 0.0);
            out_im[k] = Complex64::new(inv[1][0] * ur + inv[1][1] * ui, 0.0);
        }
        let (sr, si) = (idft(&out_re), idft(&out_im));
        DtSignal::new(sr.iter().zip(&si).map(|(a, b)| Complex64::new(a.re, b.re)).collect(), symbol_rate)
    }

    pub fn apply(&self, u: &DtSignal) -> Result<DtSignal> {
        self.apply_spectrum(&u.spectrum(), u.symbol_rate())
    }
}

/// Dual mix, ideal low-pass and symbol-rate sampling; returns `u` before correction.
pub fn demodulate_uncorrected(z: &CtSignal, params: &ModulationParams) -> Result<DtSignal> {
    let (l, m) = (params.oversample(), params.carrier_ratio());
    let n = z.n_symbols();
    let mixed: Vec<Complex64> = z
        .samples()
        .iter()
        .enumerate()
        .map(|(s, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * ((m * s) % l) as f64 / l as f64))
        .collect();
    let mut spec = dft(&mixed);
    let len = spec.len();
    for (k, v) in spec.iter_mut().enumerate() {
        let kb = signed_bin(k, len);
        if !(-(n as i64) <= 2 * kb && 2 * kb < n as i64) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    let lowpassed = idft(&spec);
    DtSignal::new((0..n).map(|i| lowpassed[i * l]).collect(), 1.0 / params.symbol_period())
}

/// The ideal demodulator `A E H0 Xc`.
pub fn demodulate(z: &CtSignal, params: &ModulationParams) -> Result<DtSignal> {
    let correction = DemodCorrection::new(params, z.n_symbols(), PulseKernel::Sampled { oversample: params.oversample() })?;
    correction.apply(&demodulate_uncorrected(z, params)?)
}

/// `v = D H F M w`, evaluated by brute force on the oversampled grid.
pub fn simulate_s(w: &DtSignal, model: &CtVolterraModel, params: &ModulationParams) -> Result<DtSignal> {
    PassbandChain::new(model.clone(), *params, w.len())?.simulate(w)
}

/// A map from one `N`-symbol frame to another.
pub trait System {
    fn apply(&self, w: &DtSignal) -> Result<DtSignal>;
}

/// A reusable oracle for one model, parameter set and frame length.
#[derive(Debug, Clone)]
pub struct PassbandChain {
    model: CtVolterraModel,
    params: ModulationParams,
    correction: DemodCorrection,
}

impl PassbandChain {
    pub fn new(model: CtVolterraModel, params: ModulationParams, n_symbols: usize) -> Result<Self> {
        for t in &model.terms {
            for &d in &t.delays {
                params.delay_samples(d)?;
            }
        }
        let correction = DemodCorrection::new(&params, n_symbols, PulseKernel::Sampled { oversample: params.oversample() })?;
        Ok(Self { model, params, correction })
    }

    pub fn model(&self) -> &CtVolterraModel {
        &self.model
    }

    pub fn params(&self) -> &ModulationParams {
        &self.params
    }

    pub fn n_symbols(&self) -> usize {
        self.correction.grid_length()
    }

    pub fn simulate(&self, w: &DtSignal) -> Result<DtSignal> {
        if w.len() != self.n_symbols() {
            return Err(Error::LengthMismatch { expected: self.n_symbols(), actual: w.len() });
        }
        let x = mixer(&zoh(w, &self.params), &self.params);
        let y = ct_volterra(&x, &self.model, &self.params)?;
        let z = ideal_bandpass(&y, &self.params);
        let u = demodulate_uncorrected(&z, &self.params)?;
        let v = self.correction.apply(&u)?;
        DtSignal::new(v.into_samples(), w.symbol_rate())
    }
}

impl System for PassbandChain {
    fn apply(&self, w: &DtSignal) -> Result<DtSignal> {
        self.simulate(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{evm_db, l2_norm};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params() -> ModulationParams {
        ModulationParams::new(1.0, 2, 8).unwrap()
    }

    fn test_input(n: usize) -> DtSignal {
        DtSignal::from_samples((0..n).map(|i| c((i as f64 * 1.7).sin(), (i as f64 * 0.9 + 0.3).cos())).collect()).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModulationParams::new(1.0, 10, 21).is_err());
        assert!(ModulationParams::new(1.0, 10, 22).is_ok());
        assert!(ModulationParams::new(1.0, 0, 22).is_err());
        assert!(ModulationParams::new(-1.0, 1, 22).is_err());
        let p = ModulationParams::from_rates(2e6, 10, 1000).unwrap();
        assert!((p.omega_c() - 2.0 * PI * 20e6).abs() < 1e-3);
        assert!((p.theta() - 40.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn delays_must_be_on_grid() {
        let p = ModulationParams::new(1.0, 10, 100).unwrap();
        assert_eq!(p.delay_samples(0.3).unwrap(), 30);
        assert!(matches!(p.delay_samples(0.305), Err(Error::OffGridDelay { .. })));
        let p64 = ModulationParams::new(1.0, 10, 64).unwrap();
        let model = CtVolterraModel::cubic_distortion(0.02, [0.2, 0.3, 0.4]).unwrap();
        assert!(PassbandChain::new(model.clone(), p64, 16).is_err());
        let (snapped, err) = model.snap_to_grid(&p64);
        assert!(err > 0.0 && err <= 0.5 / 64.0);
        assert!(PassbandChain::new(snapped, p64, 16).is_ok());
    }

    #[test]
    fn zoh_examples() {
        let p = ModulationParams::new(1.0, 2, 10).unwrap();
        let mut u = vec![c(0.0, 0.0); 3];
        u[0] = c(1.0, 0.0);
        let x0 = zoh(&DtSignal::from_samples(u).unwrap(), &p);
        assert_eq!(x0.len(), 30);
        assert!(x0.samples()[..10].iter().all(|v| *v == c(1.0, 0.0)));
        assert!(x0.samples()[10..].iter().all(|v| *v == c(0.0, 0.0)));

        let x0 = zoh(&DtSignal::from_samples(vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap(), &p);
        assert!(x0.samples()[..10].iter().all(|v| v.re == 1.0));
        assert!(x0.samples()[10..].iter().all(|v| v.re == -1.0));
    }

    #[test]
    fn mixer_examples() {
        let p = params();
        let ones = zoh(&DtSignal::from_samples(vec![c(1.0, 0.0); 4]).unwrap(), &p);
        let x = mixer(&ones, &p);
        let js = mixer(&ones.with_samples(vec![c(0.0, 1.0); 32]), &p);
        for s in 0..32 {
            let t = s as f64 * p.sample_period();
            assert!((x.samples()[s].re - 2.0 * (p.omega_c() * t).cos()).abs() < 1e-12);
            assert!((js.samples()[s].re + 2.0 * (p.omega_c() * t).sin()).abs() < 1e-12);
        }
        assert!(x.is_real());
        let zero = mixer(&ones.with_samples(vec![c(0.0, 0.0); 32]), &p);
        assert!(zero.samples().iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn volterra_examples() {
        let p = params();
        let x = mixer(&zoh(&test_input(4), &p), &p);
        let y = ct_volterra(&x, &CtVolterraModel::identity(), &p).unwrap();
        assert_eq!(y, x);

        let constant = x.with_samples(vec![c(0.5, 0.0); 32]);
        let model = CtVolterraModel::new(0.25, vec![VolterraTerm { coeff: 2.0, delays: vec![0.125, 0.0, 0.5] }]).unwrap();
        let y = ct_volterra(&constant, &model, &p).unwrap();
        assert!(y.samples().iter().all(|v| (v.re - (0.25 + 2.0 * 0.125)).abs() < 1e-15));
        assert!(ct_volterra(&x, &model, &p).unwrap().is_real());
    }

    #[test]
    fn volterra_delay_is_circular() {
        let p = params();
        let x = mixer(&zoh(&test_input(4), &p), &p);
        let model = CtVolterraModel::new(0.0, vec![VolterraTerm { coeff: 1.0, delays: vec![3.0 * p.sample_period()] }]).unwrap();
        let y = ct_volterra(&x, &model, &p).unwrap();
        for s in 0..32 {
            assert_eq!(y.samples()[s], x.samples()[(s + 32 - 3) % 32]);
        }
    }

    #[test]
    fn model_validation() {
        assert!(CtVolterraModel::new(0.0, vec![VolterraTerm { coeff: 1.0, delays: vec![] }]).is_err());
        assert!(CtVolterraModel::new(0.0, vec![VolterraTerm { coeff: 1.0, delays: vec![-0.1] }]).is_err());
        let m = CtVolterraModel::cubic_distortion(0.1, [0.2, 0.3, 0.4]).unwrap();
        assert_eq!(m.degree(), 3);
        assert!((m.depth() - 0.4).abs() < 1e-15);
    }

    fn tone(p: &ModulationParams, n: usize, bin: f64) -> CtSignal {
        let len = n * p.oversample();
        let samples = (0..len).map(|s| c((2.0 * PI * bin * s as f64 / len as f64).cos(), 0.0)).collect();
        CtSignal::new(samples, p.sample_rate(), p.oversample(), n).unwrap()
    }

    #[test]
    fn bandpass_examples() {
        let p = ModulationParams::new(1.0, 2, 14).unwrap();
        let n = 8;
        let carrier_bin = (p.carrier_ratio() * n) as f64;
        let x = tone(&p, n, carrier_bin);
        let y = ideal_bandpass(&x, &p);
        assert!(l2_norm(&y.samples().iter().zip(x.samples()).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-12);
        let far = ideal_bandpass(&tone(&p, n, 3.0 * carrier_bin), &p);
        assert!(far.norm() < 1e-12);
        let dc = ideal_bandpass(&x.with_samples(vec![c(1.0, 0.0); n * 14]), &p);
        assert!(dc.norm() < 1e-12);
    }

    #[test]
    fn bandpass_is_idempotent() {
        let p = params();
        let y = ct_volterra(
            &mixer(&zoh(&test_input(8), &p), &p),
            &CtVolterraModel::cubic_distortion(0.3, [0.0, 0.25, 0.5]).unwrap(),
            &p,
        )
        .unwrap();
        let once = ideal_bandpass(&y, &p);
        let twice = ideal_bandpass(&once, &p);
        let diff: Vec<_> = once.samples().iter().zip(twice.samples()).map(|(a, b)| a - b).collect();
        assert!(l2_norm(&diff) <= 1e-14 * once.norm());
    }

    #[test]
    fn demodulator_inverts_modulator() {
        let p = params();
        for n in [7usize, 8] {
            let w = test_input(n);
            let v = demodulate(&ideal_bandpass(&mixer(&zoh(&w, &p), &p), &p), &p).unwrap();
            assert!(evm_db(&w, &v).unwrap() < -160.0, "n={n}");
        }
    }

    #[test]
    fn demodulating_zero_gives_zero() {
        let p = params();
        let z = mixer(&zoh(&DtSignal::zeros(8, 1.0).unwrap(), &p), &p);
        let v = demodulate(&z, &p).unwrap();
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn constant_term_is_removed() {
        let p = params();
        let model = CtVolterraModel::new(0.7, vec![]).unwrap();
        let v = simulate_s(&test_input(8), &model, &p).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn correction_is_hermitian_off_nyquist() {
        let p = ModulationParams::new(1.0, 3, 10).unwrap();
        let n = 16;
        let a = DemodCorrection::new(&p, n, PulseKernel::Sampled { oversample: 10 }).unwrap();
        for k in 1..n {
            if k == n / 2 {
                continue;
            }
            for h in [a.a_rr(), a.a_ri(), a.a_ii()] {
                assert!((h.values()[k] - h.values()[n - k].conj()).norm() < 1e-12);
            }
        }
    }
}
