//! Seeded synthetic rating data with planted taste groups.
//!
//! Every item has a latent quality per taste group, drawn uniformly over the
//! rating scale. Groups agree on ordinary items and split on "controversial"
//! ones, where the second group mirrors the first around the middle of the
//! scale. Users belong to one group, rate a popularity-skewed sample of items
//! and report their group's quality plus Gaussian noise, rounded to the grid.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::dataset::{RatingDataset, RatingScale, RawRating};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantedModes {
    pub users: usize,
    pub items: usize,
    /// Share of users in the first taste group.
    pub majority_share: f64,
    /// Concentration of latent qualities at one end of the scale: the
    /// distance from the far end is `(r_max - r_min) * u^(1 / concentration)`
    /// for uniform `u`, so 1 is uniform and larger values pile qualities up
    /// at the end chosen by `lean`.
    pub concentration: f64,
    /// End of the scale the qualities lean toward. `Top` gives the J-shaped
    /// distributions common in product reviews.
    pub lean: Lean,
    /// Share of items on which the groups disagree.
    pub controversial_share: f64,
    /// Mean number of ratings per user (at least 5 are always drawn).
    pub mean_ratings: f64,
    /// Zipf exponent of item popularity.
    pub popularity_skew: f64,
    /// Standard deviation of rating noise, in raw rating steps.
    pub noise: f64,
    pub scale: RatingScale,
    pub seed: u64,
}

impl Default for PlantedModes {
    /// 500 users and 100 items in two groups (80/20) that disagree on a
    /// tenth of the items. Qualities pile up at the bottom of the scale, the
    /// mirror image of a J-shaped review catalogue.
    fn default() -> Self {
        PlantedModes {
            users: 500,
            items: 100,
            majority_share: 0.8,
            concentration: 8.0,
            lean: Lean::Bottom,
            controversial_share: 0.1,
            mean_ratings: 9.0,
            popularity_skew: 0.8,
            noise: 0.3,
            scale: RatingScale::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lean {
    #[default]
    Top,
    Bottom,
}

/// Group membership and reference ratings behind a generated dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// Taste group (0 or 1) of each user id, in generation order.
    pub groups: Vec<(String, u8)>,
    /// Latent quality per item id: `(group 0, group 1)`.
    pub references: Vec<(String, f64, f64)>,
}

impl PlantedModes {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn generate(&self) -> Result<RatingDataset> {
        Ok(self.generate_with_truth()?.0)
    }

    pub fn generate_with_truth(&self) -> Result<(RatingDataset, GroundTruth)> {
        if self.items == 0 || self.users == 0 {
            return Err(Error::config("synthetic data needs at least one user and one item"));
        }
        if !(0.0..=1.0).contains(&self.majority_share) || !(0.0..=1.0).contains(&self.controversial_share) {
            return Err(Error::config("shares must lie in [0, 1]"));
        }
        if self.concentration.is_nan() || self.concentration <= 0.0 {
            return Err(Error::config("concentration must be positive"));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::config("noise must be a finite non-negative deviation"));
        }
        let (lo, hi) = (self.scale.r_min(), self.scale.r_max());
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);

        let width = self.items.to_string().len();
        let item_ids: Vec<String> = (0..self.items).map(|j| format!("item{j:0width$}")).collect();
        let (lo_f, hi_f) = (f64::from(lo), f64::from(hi));
        let references: Vec<(f64, f64)> = (0..self.items)
            .map(|_| {
                let x = (hi_f - lo_f) * rng.random::<f64>().powf(1.0 / self.concentration);
                let a = match self.lean {
                    Lean::Top => lo_f + x,
                    Lean::Bottom => hi_f - x,
                };
                let b = if rng.random_bool(self.controversial_share) {
                    lo_f + hi_f - a
                } else {
                    a
                };
                (a, b)
            })
            .collect();
        let noise = Normal::new(0.0, self.noise).map_err(|e| Error::config(e.to_string()))?;
        let weights: Vec<f64> = (0..self.items)
            .map(|j| 1.0 / ((j + 1) as f64).powf(self.popularity_skew))
            .collect();
        let index: Vec<usize> = (0..self.items).collect();
        let extra = Poisson::new((self.mean_ratings - 5.0).max(1e-9)).map_err(|e| Error::config(e.to_string()))?;

        let width = self.users.to_string().len();
        let mut records = Vec::new();
        let mut groups = Vec::with_capacity(self.users);
        for u in 0..self.users {
            let id = format!("user{u:0width$}");
            let group = u8::from(!rng.random_bool(self.majority_share));
            let n = (5 + extra.sample(&mut rng) as usize).min(self.items);
            let chosen: Vec<usize> = index
                .choose_multiple_weighted(&mut rng, n, |&j| weights[j])
                .map_err(|e| Error::config(e.to_string()))?
                .copied()
                .collect();
            for j in chosen {
                let reference = if group == 0 { references[j].0 } else { references[j].1 };
                let raw = (reference + noise.sample(&mut rng)).round().clamp(lo_f, hi_f) as u32;
                records.push(RawRating::new(id.clone(), item_ids[j].clone(), raw, u as i64));
            }
            groups.push((id, group));
        }
        let dataset = RatingDataset::from_records(self.scale, records)?;
        let references = item_ids
            .into_iter()
            .zip(references)
            .map(|(id, (a, b))| (id, a, b))
            .collect();
        Ok((dataset, GroundTruth { groups, references }))
    }
}
