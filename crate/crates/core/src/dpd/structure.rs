use std::fmt;
use std::str::FromStr;

use faer::Mat;
use num_complex::Complex64;

use crate::dpd::basis::{basis_size, enumerate_basis, ExponentPattern};
use crate::error::{Error, Result};
use crate::signal::{dft_real, idft, DtSignal, FreqResponse, Signal};

/// Compensator families that are fitted by least squares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompensatorStructure {
    /// `sum_k c_k prod_l i[n-l]^alpha_l prod_l q[n-l]^beta_l` over lags `-m1..=m2`.
    PlainVolterra { m1: usize, m2: usize, d: usize },
    /// Blocks `V_0..V_order`, each a Volterra basis over lags `0..=memory`,
    /// followed by the fixed filters `H_j`.
    ProposedLv { memory: usize, degree: usize, order: usize },
}

impl CompensatorStructure {
    pub fn blocks(&self) -> usize {
        match *self {
            CompensatorStructure::PlainVolterra { .. } => 1,
            CompensatorStructure::ProposedLv { order, .. } => order + 1,
        }
    }

    /// Patterns of a single block.
    pub fn block_basis(&self) -> Vec<ExponentPattern> {
        match *self {
            CompensatorStructure::PlainVolterra { m1, m2, d } => enumerate_basis(m1, m2, d),
            CompensatorStructure::ProposedLv { memory, degree, .. } => enumerate_basis(0, memory, degree),
        }
    }

    /// Regressor columns per output channel.
    pub fn n_columns(&self) -> usize {
        let per_block = match *self {
            CompensatorStructure::PlainVolterra { m1, m2, d } => basis_size(m1, m2, d),
            CompensatorStructure::ProposedLv { memory, degree, .. } => basis_size(0, memory, degree),
        };
        per_block as usize * self.blocks()
    }

    /// Coefficients fitted for both the real and imaginary outputs.
    pub fn n_coeffs(&self) -> usize {
        2 * self.n_columns()
    }
}

impl fmt::Display for CompensatorStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CompensatorStructure::PlainVolterra { m1, m2, d } => write!(f, "volterra({m1},{m2},{d})"),
            CompensatorStructure::ProposedLv { memory, degree, order } => {
                write!(f, "proposed({memory},{degree},{order})")
            }
        }
    }
}

impl FromStr for CompensatorStructure {
    type Err = Error;

    /// Parses `volterra(m1,m2,d)` or `proposed(m,d,p)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("unrecognised structure '{s}'"));
        let s = s.trim();
        let (name, rest) = s.split_once('(').ok_or_else(bad)?;
        let args: Vec<usize> = rest
            .strip_suffix(')')
            .ok_or_else(bad)?
            .split(',')
            .map(|a| a.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [a, b, c] = args[..] else { return Err(bad()) };
        let structure = match name.trim() {
            "volterra" => CompensatorStructure::PlainVolterra { m1: a, m2: b, d: c },
            "proposed" => CompensatorStructure::ProposedLv { memory: a, degree: b, order: c },
            _ => return Err(bad()),
        };
        let degree = match structure {
            CompensatorStructure::PlainVolterra { d, .. } => d,
            CompensatorStructure::ProposedLv { degree, .. } => degree,
        };
        if degree == 0 || degree > u8::MAX as usize {
            return Err(Error::InvalidConfig(format!("degree must be in 1..=255, got {degree}")));
        }
        Ok(structure)
    }
}

/// `H_j(e^{jW})`: `j W` for `j == 1`, `W^j` for even `j`, `j W^j` for other odd `j`,
/// with `W` in `[-pi, pi)`.
pub fn block_filter(j: usize, n: usize) -> FreqResponse {
    FreqResponse::from_fn(n, |w| {
        let mag = w.powi(j as i32);
        if j % 2 == 1 {
            Complex64::new(0.0, mag)
        } else {
            Complex64::new(mag, 0.0)
        }
    })
}

/// `prod_l i[n-l]^alpha_l q[n-l]^beta_l` for every `n`, circularly indexed.
pub fn evaluate_pattern(i: &[f64], q: &[f64], pattern: &ExponentPattern) -> Vec<f64> {
    let n = i.len();
    let mut out = vec![1.0; n];
    for (src, exps) in [(i, &pattern.alpha), (q, &pattern.beta)] {
        for (slot, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let lag = pattern.lag(slot).rem_euclid(n as isize) as usize;
            for (t, o) in out.iter_mut().enumerate() {
                *o *= src[(t + n - lag) % n].powi(e as i32);
            }
        }
    }
    out
}

/// Real `N x columns` regressor matrix of `structure` driven by `w`.
///
/// Columns are grouped by block; within a block they follow [`enumerate_basis`].
pub fn regressor_matrix(w: &DtSignal, structure: &CompensatorStructure) -> Mat<f64> {
    let n = w.len();
    let cols = structure.n_columns();
    if n < cols {
        log::warn!("regressor has {n} rows but {cols} columns; the fit is underdetermined");
    }
    let (i, q) = (w.re(), w.im());
    let basis = structure.block_basis();
    let raw: Vec<Vec<f64>> = basis.iter().map(|p| evaluate_pattern(&i, &q, p)).collect();
    let mut x = Mat::<f64>::zeros(n, cols);
    for block in 0..structure.blocks() {
        let filter = (block > 0).then(|| block_filter(block, n));
        for (c, col) in raw.iter().enumerate() {
            let target = block * basis.len() + c;
            match &filter {
                None => {
                    for (r, &v) in col.iter().enumerate() {
                        x[(r, target)] = v;
                    }
                }
                Some(h) => {
                    let spec: Vec<Complex64> = dft_real(col).iter().zip(h.values()).map(|(a, b)| a * b).collect();
                    for (r, v) in idft(&spec).iter().enumerate() {
                        x[(r, target)] = v.re;
                    }
                }
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn names_round_trip() {
        for s in ["volterra(0,2,5)", "proposed(1,3,2)"] {
            assert_eq!(s.parse::<CompensatorStructure>().unwrap().to_string(), s);
        }
        assert!("volterra(0,2)".parse::<CompensatorStructure>().is_err());
        assert!("proposed(1,0,2)".parse::<CompensatorStructure>().is_err());
        assert!("cubic(1,2,3)".parse::<CompensatorStructure>().is_err());
    }

    #[test]
    fn table_counts() {
        let p = CompensatorStructure::ProposedLv { memory: 1, degree: 3, order: 2 };
        assert_eq!(p.n_coeffs(), 210);
        assert_eq!(CompensatorStructure::PlainVolterra { m1: 0, m2: 2, d: 5 }.n_coeffs(), 924);
        assert_eq!(CompensatorStructure::PlainVolterra { m1: 0, m2: 4, d: 5 }.n_coeffs(), 6006);
        assert_eq!(CompensatorStructure::PlainVolterra { m1: 2, m2: 2, d: 5 }.n_coeffs(), 6006);
    }

    fn tone(n: usize, k0: usize) -> DtSignal {
        let w0 = 2.0 * PI * k0 as f64 / n as f64;
        DtSignal::from_samples((0..n).map(|t| Complex64::new((w0 * t as f64).cos(), 0.3)).collect()).unwrap()
    }

    #[test]
    fn simple_columns() {
        let n = 32;
        let w = tone(n, 3);
        let s = CompensatorStructure::ProposedLv { memory: 1, degree: 1, order: 1 };
        let x = regressor_matrix(&w, &s);
        assert_eq!((x.nrows(), x.ncols()), (n, 10));
        // Block 0: constant column, then i0.
        for r in 0..n {
            assert_eq!(x[(r, 0)], 1.0);
            assert_eq!(x[(r, 1)], w.re()[r]);
        }
        // Block 1, i0 column: derivative-like filter turns cos into -w0 sin.
        let w0 = 2.0 * PI * 3.0 / n as f64;
        for r in 0..n {
            let want = -w0 * (w0 * r as f64).sin();
            assert!((x[(r, 6)] - want).abs() < 1e-12);
            assert!(x[(r, 5)].abs() < 1e-12, "H1 removes DC");
        }
    }

    #[test]
    fn lags_are_circular() {
        let w = DtSignal::from_samples((0..5).map(|t| Complex64::new(t as f64, -(t as f64))).collect()).unwrap();
        let p = ExponentPattern { m1: 1, m2: 1, alpha: vec![1, 0, 0], beta: vec![0, 0, 1] };
        let v = evaluate_pattern(&w.re(), &w.im(), &p);
        // i[n+1] * q[n-1]
        for (t, &got) in v.iter().enumerate() {
            assert_eq!(got, ((t + 1) % 5) as f64 * -(((t + 4) % 5) as f64));
        }
    }
}
