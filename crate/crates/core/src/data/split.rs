use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{Dataset, RngStream};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub repeat: usize,
    pub fold: usize,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Repeated k-fold partition of `d`'s row indices.
///
/// Each repeat shuffles the indices and cuts them into `k` folds whose
/// sizes differ by at most one (the first `N mod k` folds get the extra
/// row). Train indices are returned in ascending order.
pub fn kfold_split(d: &Dataset, k: usize, repeats: usize, rng: RngStream) -> Result<Vec<Split>> {
    kfold_indices(d.len(), k, repeats, rng)
}

pub(crate) fn kfold_indices(n: usize, k: usize, repeats: usize, rng: RngStream) -> Result<Vec<Split>> {
    if k < 2 {
        return Err(Error::InvalidSplit(format!("k = {k} must be at least 2")));
    }
    if k > n {
        return Err(Error::InvalidSplit(format!("k = {k} exceeds the {n} available rows")));
    }
    let mut rng = rng.rng();
    let mut splits = Vec::with_capacity(k * repeats);
    for repeat in 0..repeats {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let base = n / k;
        let extra = n % k;
        let mut start = 0;
        for fold in 0..k {
            let size = base + usize::from(fold < extra);
            let mut test = order[start..start + size].to_vec();
            test.sort_unstable();
            let mut train: Vec<usize> = order[..start].iter().chain(&order[start + size..]).copied().collect();
            train.sort_unstable();
            splits.push(Split {
                repeat,
                fold,
                train,
                test,
            });
            start += size;
        }
    }
    Ok(splits)
}
