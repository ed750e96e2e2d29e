//! Rank correlation and the evaluation metrics built on it.

use serde::{Deserialize, Serialize};

use crate::clustering::{ClusterPartition, ClusterRankResult};
use crate::dataset::RatingDataset;
use crate::error::{Error, Result};
use crate::{scores_by_id, Scores};

/// Treatment of tied pairs in [`kendall_tau_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieHandling {
    /// `(C - D) / (C + D)`; pairs tied in either vector count for neither.
    #[default]
    Exclude,
    /// Kendall's tau-b.
    TauB,
}

/// `(C - D) / (C + D)` over all index pairs, tied pairs excluded.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    kendall_tau_with(x, y, TieHandling::Exclude)
}

pub fn kendall_tau_with(x: &[f64], y: &[f64], ties: TieHandling) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::UndefinedMetric(format!(
            "vectors have different lengths ({} and {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::UndefinedMetric(format!("need at least 2 items, got {n}")));
    }
    let (mut concordant, mut discordant) = (0u64, 0u64);
    let (mut tied_x, mut tied_y) = (0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[j] - x[i];
            let dy = y[j] - y[i];
            if dx == 0.0 || dy == 0.0 {
                tied_x += u64::from(dx == 0.0);
                tied_y += u64::from(dy == 0.0);
                continue;
            }
            if (dx > 0.0) == (dy > 0.0) {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let signed = concordant as f64 - discordant as f64;
    match ties {
        TieHandling::Exclude => {
            let total = concordant + discordant;
            if total == 0 {
                return Err(Error::UndefinedMetric("every pair is tied".into()));
            }
            Ok(signed / total as f64)
        }
        TieHandling::TauB => {
            let pairs = (n * (n - 1) / 2) as u64;
            let den = ((pairs - tied_x) as f64 * (pairs - tied_y) as f64).sqrt();
            if den == 0.0 {
                return Err(Error::UndefinedMetric("a vector is constant".into()));
            }
            Ok(signed / den)
        }
    }
}

/// Kendall tau over the items present in both rankings.
pub fn kendall_tau_scores(a: &Scores, b: &Scores) -> Result<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = a.iter().filter_map(|(k, &va)| b.get(k).map(|&vb| (va, vb))).unzip();
    kendall_tau(&x, &y)
}

/// Cluster-size-weighted mean of per-cluster taus. Clusters whose tau is
/// undefined drop out of both the sum and the normalizer.
pub fn generalized_tau(entries: &[(usize, Option<f64>)]) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0usize);
    for &(size, tau) in entries {
        if let Some(t) = tau {
            num += size as f64 * t;
            den += size;
        }
    }
    if den == 0 {
        return Err(Error::UndefinedMetric("no cluster has a defined tau".into()));
    }
    Ok(num / den as f64)
}

/// Per-item mean of normalized ratings; `None` for unrated items.
pub fn arithmetic_average(d: &RatingDataset) -> Vec<Option<f64>> {
    (0..d.num_items())
        .map(|j| {
            let n = d.item_degree(j);
            (n > 0).then(|| d.item_ratings(j).map(|r| r.value).sum::<f64>() / n as f64)
        })
        .collect()
}

pub fn arithmetic_average_scores(d: &RatingDataset) -> Scores {
    scores_by_id(d.items(), &arithmetic_average(d))
}

/// Kendall tau of `rankings` against the arithmetic average of `d`.
pub fn effectiveness(rankings: &Scores, d: &RatingDataset) -> Result<f64> {
    kendall_tau_scores(rankings, &arithmetic_average_scores(d))
}

/// Kendall tau between rankings computed on clean and attacked data, over
/// the items both contain. Pass displayed rankings for clustered runs.
pub fn robustness(clean: &Scores, attacked: &Scores) -> Result<f64> {
    kendall_tau_scores(clean, attacked)
}

/// Effectiveness of each community against the arithmetic average of its own
/// members' ratings, as `(size, tau)`. `None` marks communities with too few
/// distinguishable items.
pub fn cluster_effectiveness(
    d: &RatingDataset,
    partition: &ClusterPartition,
    result: &ClusterRankResult,
) -> Vec<(usize, Option<f64>)> {
    result
        .per_cluster
        .iter()
        .map(|run| {
            let sub = d.restrict_users(&partition.components()[run.cluster]);
            (run.size, effectiveness(&run.rankings, &sub).ok())
        })
        .collect()
}
