use crate::dpd::compensator::FittedCompensator;
use crate::error::Result;

/// Outcome of [`prune_significant`].
#[derive(Debug, Clone, PartialEq)]
pub struct PruneReport {
    /// Validation EVM with every coefficient kept.
    pub best_evm_db: f64,
    /// Validation EVM of the returned mask.
    pub pruned_evm_db: f64,
    /// Largest EVM accepted, `best + 0.01 |best|`.
    pub allowed_evm_db: f64,
    /// Coefficients with magnitude below this were zeroed.
    pub threshold: f64,
    pub n_significant: usize,
    pub evaluations: usize,
}

/// Relative EVM increase tolerated when zeroing small coefficients.
pub const PRUNE_TOLERANCE: f64 = 0.01;

/// Zeroes the smallest coefficients (both channels ranked together) while the
/// validation EVM stays within `1%` of the full fit, in dB.
///
/// `evm_db` evaluates a candidate on validation data. The number of zeroed
/// coefficients is found by bisection, so only masks that were actually
/// evaluated and accepted can be returned.
pub fn prune_significant(
    fit: &FittedCompensator,
    mut evm_db: impl FnMut(&FittedCompensator) -> Result<f64>,
) -> Result<(FittedCompensator, PruneReport)> {
    let k = fit.coeff_re().len();
    let mut order: Vec<(f64, usize)> = fit.iter_coeffs().map(|(ch, i, c)| (c.abs(), ch * k + i)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let masked = |zeroed: usize| {
        let mut keep = vec![true; 2 * k];
        for &(_, idx) in &order[..zeroed] {
            keep[idx] = false;
        }
        let im = keep.split_off(k);
        fit.with_masks(keep, im)
    };

    let full = masked(0)?;
    let best = evm_db(&full)?;
    let allowed = best + PRUNE_TOLERANCE * best.abs();
    let mut evaluations = 1;
    let mut accept = |zeroed: usize| -> Result<Option<(FittedCompensator, f64)>> {
        let cand = masked(zeroed)?;
        let e = evm_db(&cand)?;
        evaluations += 1;
        Ok((e <= allowed).then_some((cand, e)))
    };

    let total = order.len();
    let (mut lo, mut hi) = (0, total);
    let mut kept = (full, best);
    if let Some(all) = accept(total)? {
        lo = total;
        kept = all;
    } else {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            match accept(mid)? {
                Some(c) => {
                    lo = mid;
                    kept = c;
                }
                None => hi = mid,
            }
        }
    }
    let threshold = if lo == 0 { 0.0 } else if lo == total { f64::INFINITY } else { order[lo].0 };
    let (pruned, pruned_evm) = kept;
    let report = PruneReport {
        best_evm_db: best,
        pruned_evm_db: pruned_evm,
        allowed_evm_db: allowed,
        threshold,
        n_significant: pruned.n_significant(),
        evaluations,
    };
    log::info!(
        "{}: kept {} of {} coefficients, EVM {:.3} dB (best {:.3}, allowed {:.3})",
        fit.structure(),
        report.n_significant,
        total,
        pruned_evm,
        best,
        allowed
    );
    Ok((pruned, report))
}
