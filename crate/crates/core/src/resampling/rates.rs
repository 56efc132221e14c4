use super::{Bins, RateMode};

/// Per-bin sampling amounts: `keep` is the fraction of a normal bin that
/// survives under-sampling, `over` the number of new rows for a rare bin as
/// a multiple of its size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinRates {
    pub keep: f64,
    pub over: f64,
}

/// `⌊rate·n⌋`, tolerant to rounding just below an integer.
pub fn scaled_count(rate: f64, n: usize) -> usize {
    (rate * n as f64 + 1e-9).floor().max(0.0) as usize
}

/// Resolves a rate mode into per-bin amounts (aligned with `bins.all()`).
///
/// * balance: every bin targets the mean bin size `m = N / #bins`;
/// * extreme: bin `B` targets `N·(1/|B|) / Σ_j (1/|B_j|)`, i.e. `m²/|B|`
///   rescaled so the total stays `N`;
/// * explicit: the given fractions apply to every bin of the relevant status.
///
/// Rare bins are only ever grown and normal bins only ever shrunk.
pub fn resolve_rates(mode: RateMode, bins: &Bins) -> Vec<BinRates> {
    let n = bins.total_rows() as f64;
    let inv_sum: f64 = bins.all().iter().map(|b| 1.0 / b.len() as f64).sum();
    bins.all()
        .iter()
        .map(|bin| {
            let size = bin.len() as f64;
            let target = match mode {
                RateMode::Balance => n / bins.len() as f64,
                RateMode::Extreme => n * (1.0 / size) / inv_sum,
                RateMode::Explicit { under, over } => {
                    return if bin.rare {
                        BinRates { keep: 1.0, over }
                    } else {
                        BinRates { keep: under, over: 0.0 }
                    };
                }
            };
            if bin.rare {
                BinRates {
                    keep: 1.0,
                    over: (target / size - 1.0).max(0.0),
                }
            } else {
                BinRates {
                    keep: (target / size).min(1.0),
                    over: 0.0,
                }
            }
        })
        .collect()
}
