//! Monomial bases over a window of in-phase/quadrature lags.

/// Exponents of one basis monomial.
///
/// `alpha[i]` and `beta[i]` are the powers of `i[n - l]` and `q[n - l]` for
/// lag `l = i - m1`, so the window covers lags `-m1..=m2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentPattern {
    pub m1: usize,
    pub m2: usize,
    pub alpha: Vec<u8>,
    pub beta: Vec<u8>,
}

impl ExponentPattern {
    pub fn degree(&self) -> usize {
        self.alpha.iter().chain(&self.beta).map(|&e| e as usize).sum()
    }

    pub fn window_len(&self) -> usize {
        self.m1 + self.m2 + 1
    }

    /// Lag of slot `i`.
    pub fn lag(&self, i: usize) -> isize {
        i as isize - self.m1 as isize
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    /// Compact text form, e.g. `i0^2*q1` (empty product is `1`).
    pub fn descriptor(&self) -> String {
        let mut parts = Vec::new();
        for (name, exps) in [("i", &self.alpha), ("q", &self.beta)] {
            for (slot, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let lag = self.lag(slot);
                let var = format!("{name}{lag}");
                parts.push(if e == 1 { var } else { format!("{var}^{e}") });
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Every pattern of total degree `<= d` over lags `-m1..=m2`, constant first.
///
/// Graded lexicographic order: by degree, then by exponent vector
/// `(alpha, beta)` in decreasing lexicographic order.
pub fn enumerate_basis(m1: usize, m2: usize, d: usize) -> Vec<ExponentPattern> {
    let w = m1 + m2 + 1;
    let nvars = 2 * w;
    let mut out = Vec::with_capacity(basis_size(m1, m2, d).min(1 << 24) as usize);
    let mut exps = vec![0u8; nvars];
    for g in 0..=d {
        compositions(&mut exps, 0, g, &mut |e| {
            out.push(ExponentPattern { m1, m2, alpha: e[..w].to_vec(), beta: e[w..].to_vec() });
        });
    }
    out
}

fn compositions(exps: &mut [u8], pos: usize, remaining: usize, emit: &mut impl FnMut(&[u8])) {
    if pos == exps.len() - 1 {
        exps[pos] = remaining as u8;
        emit(exps);
        return;
    }
    for e in (0..=remaining).rev() {
        exps[pos] = e as u8;
        compositions(exps, pos + 1, remaining - e, emit);
    }
    exps[pos] = 0;
}

/// `n choose k` without overflow for the sizes used here.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of patterns produced by [`enumerate_basis`].
pub fn basis_size(m1: usize, m2: usize, d: usize) -> u128 {
    let nvars = 2 * (m1 + m2 + 1) as u64;
    binomial(nvars + d as u64, d as u64)
}
