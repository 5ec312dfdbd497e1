use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::signal::{dft, idft, signed_bin, DtSignal, Signal};

const LEVELS: [f64; 8] = [-7.0, -5.0, -3.0, -1.0, 1.0, 3.0, 5.0, 7.0];

/// Stream offset separating validation frames from training frames.
pub const VALIDATION_STREAM: u64 = 1 << 32;

/// `n` i.i.d. 64QAM symbols with unit average power.
pub fn qam64_source(n: usize, seed: u64) -> DtSignal {
    qam64_frame(n, seed, 0)
}

/// As [`qam64_source`] on an independent ChaCha stream.
pub fn qam64_frame(n: usize, seed: u64, stream: u64) -> DtSignal {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let scale = 1.0 / 42f64.sqrt();
    let samples = (0..n)
        .map(|_| {
            let i = LEVELS[rng.random_range(0..8)];
            let q = LEVELS[rng.random_range(0..8)];
            Complex64::new(i * scale, q * scale)
        })
        .collect();
    DtSignal::from_samples(samples).expect("n >= 1")
}

/// 64QAM symbols at `1/upsample` of the sample rate, interpolated by an ideal
/// low-pass so only the central `n / upsample` bins are occupied.
///
/// The samples at multiples of `upsample` are the symbols themselves and the
/// average power stays one. `upsample == 1` is [`qam64_frame`].
pub fn band_limited_frame(n: usize, seed: u64, stream: u64, upsample: usize) -> DtSignal {
    assert!(upsample >= 1 && n.is_multiple_of(upsample), "upsample must divide the frame length");
    let symbols = qam64_frame(n / upsample, seed, stream);
    if upsample == 1 {
        return symbols;
    }
    let short = dft(symbols.samples());
    let m = short.len();
    let mut long = vec![Complex64::new(0.0, 0.0); n];
    for (k, &v) in short.iter().enumerate() {
        let b = signed_bin(k, m);
        long[b.rem_euclid(n as i64) as usize] = v * upsample as f64;
    }
    DtSignal::from_samples(idft(&long)).expect("n >= 1")
}
