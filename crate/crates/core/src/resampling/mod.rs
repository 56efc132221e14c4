//! Resampling strategies for imbalanced regression.
//!
//! All threshold-based strategies work on [`Bins`]: maximal runs of rows
//! that, sorted by target, share the same rare/normal status. Normal bins
//! are under-sampled, rare bins are over-sampled (by replication or by
//! synthesising new rows); rare rows are never dropped. WERCS instead
//! draws rows with probabilities proportional to `φ` and `1 − φ`.
//!
//! Every strategy is a pure function of its inputs and an [`RngStream`].

mod bins;
mod distance;
mod rates;
mod strategies;
mod synth;
mod wercs;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, RngStream};
use crate::error::{Error, Result};
use crate::relevance::RelevanceFunction;

pub use bins::{make_bins, Bin, Bins};
pub use distance::{distance, DistanceSchema};
pub use rates::{resolve_rates, scaled_count, BinRates};
pub use strategies::{gaussian_noise, random_oversample, random_undersample, smogn, smoter};
pub use synth::gen_synth_cases;
pub use wercs::wercs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "SMT")]
    SmoteR,
    #[serde(rename = "RO")]
    RandomOver,
    #[serde(rename = "RU")]
    RandomUnder,
    #[serde(rename = "GN")]
    GaussianNoise,
    #[serde(rename = "SG")]
    Smogn,
    #[serde(rename = "WERCS")]
    Wercs,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::SmoteR,
        Strategy::RandomOver,
        Strategy::RandomUnder,
        Strategy::GaussianNoise,
        Strategy::Smogn,
        Strategy::Wercs,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Strategy::SmoteR => "SMT",
            Strategy::RandomOver => "RO",
            Strategy::RandomUnder => "RU",
            Strategy::GaussianNoise => "GN",
            Strategy::Smogn => "SG",
            Strategy::Wercs => "WERCS",
        }
    }

    fn uses_neighbours(self) -> bool {
        matches!(self, Strategy::SmoteR | Strategy::Smogn)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown strategy `{s}`")))
    }
}

/// How under/over-sampling amounts are chosen per bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateMode {
    /// Every bin is moved toward the mean bin size.
    Balance,
    /// Bin sizes are inverted: bin `B` targets a size proportional to `1/|B|`.
    Extreme,
    /// `under` is the kept fraction of each normal bin, `over` the number of
    /// new rows per rare bin as a multiple of its size.
    Explicit { under: f64, over: f64 },
}

impl fmt::Display for RateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateMode::Balance => f.write_str("balance"),
            RateMode::Extreme => f.write_str("extreme"),
            RateMode::Explicit { under, over } => write!(f, "u={under},o={over}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResampleSpec {
    pub strategy: Strategy,
    /// Relevance threshold `t_R`; ignored by WERCS.
    pub threshold: f64,
    pub rates: RateMode,
    /// Neighbour count (SMT, SG).
    pub k: usize,
    /// Perturbation amplitude (GN) or perturbation cap (SG).
    pub delta: f64,
}

impl ResampleSpec {
    pub fn new(strategy: Strategy) -> Self {
        ResampleSpec {
            strategy,
            threshold: 0.8,
            rates: match strategy {
                Strategy::Wercs => RateMode::Explicit { under: 0.5, over: 0.5 },
                _ => RateMode::Balance,
            },
            k: 5,
            delta: 0.02,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.strategy != Strategy::Wercs && !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "threshold {} is outside (0, 1]",
                self.threshold
            )));
        }
        if self.strategy.uses_neighbours() && self.k == 0 {
            return Err(Error::InvalidSpec("k must be at least 1".into()));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidSpec(format!("delta {} must be ≥ 0", self.delta)));
        }
        match (self.strategy, self.rates) {
            (Strategy::Wercs, RateMode::Explicit { under, over }) => {
                if !((0.0..=1.0).contains(&under) && (0.0..=1.0).contains(&over)) {
                    return Err(Error::InvalidSpec(format!(
                        "WERCS rates u = {under}, o = {over} must lie in [0, 1]"
                    )));
                }
            }
            (Strategy::Wercs, mode) => {
                return Err(Error::InvalidSpec(format!(
                    "WERCS needs explicit u and o, got `{mode}`"
                )))
            }
            (_, RateMode::Explicit { under, over })
                if !((0.0..=1.0).contains(&under) && over >= 0.0 && over.is_finite()) =>
            {
                return Err(Error::InvalidSpec(format!(
                    "explicit rates need 0 ≤ u ≤ 1 and o ≥ 0 (got u = {under}, o = {over})"
                )));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Where an output row came from, as an index into the input dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowOrigin {
    Original(usize),
    Replica(usize),
    Interpolated { seed: usize, neighbor: usize },
    Perturbed { seed: usize },
}

impl RowOrigin {
    /// Input rows this output row was derived from.
    pub fn sources(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            RowOrigin::Original(i) | RowOrigin::Replica(i) | RowOrigin::Perturbed { seed: i } => (i, None),
            RowOrigin::Interpolated { seed, neighbor } => (seed, Some(neighbor)),
        };
        std::iter::once(a).chain(b)
    }

    pub fn is_synthetic(&self) -> bool {
        !matches!(self, RowOrigin::Original(_))
    }
}

/// A resampled dataset with the provenance of each of its rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    pub data: Dataset,
    pub origins: Vec<RowOrigin>,
}

/// Runs the strategy named in `spec`.
pub fn resample(d: &Dataset, rel: &RelevanceFunction, spec: &ResampleSpec, rng: RngStream) -> Result<Resampled> {
    match spec.strategy {
        Strategy::SmoteR => smoter(d, rel, spec, rng),
        Strategy::RandomOver => random_oversample(d, rel, spec, rng),
        Strategy::RandomUnder => random_undersample(d, rel, spec, rng),
        Strategy::GaussianNoise => gaussian_noise(d, rel, spec, rng),
        Strategy::Smogn => smogn(d, rel, spec, rng),
        Strategy::Wercs => wercs(d, rel, spec, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_ids_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.id().parse::<Strategy>().unwrap(), s);
            assert_eq!(s.id().to_lowercase().parse::<Strategy>().unwrap(), s);
        }
        assert!("foo".parse::<Strategy>().is_err());
    }

    #[test]
    fn spec_validation() {
        let mut spec = ResampleSpec::new(Strategy::SmoteR);
        assert!(spec.validate().is_ok());
        spec.k = 0;
        assert!(spec.validate().is_err());
        let mut w = ResampleSpec::new(Strategy::Wercs);
        assert!(w.validate().is_ok());
        w.rates = RateMode::Balance;
        assert!(w.validate().is_err());
        w.rates = RateMode::Explicit { under: 0.3, over: 1.2 };
        assert!(w.validate().is_err());
        let mut g = ResampleSpec::new(Strategy::GaussianNoise);
        g.delta = -0.1;
        assert!(g.validate().is_err());
        g.delta = 0.1;
        g.rates = RateMode::Explicit { under: 0.5, over: 3.0 };
        assert!(g.validate().is_ok());
        g.threshold = 0.0;
        assert!(g.validate().is_err());
    }
}
