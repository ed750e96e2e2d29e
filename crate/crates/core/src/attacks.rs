//! Spam and attack injection.
//!
//! Every generator returns a new dataset that contains the original ratings
//! untouched plus the ratings of freshly created users. Injected ratings carry
//! timestamp 0.
//!
//! Randomness comes from ChaCha8 seeded with [`AttackSpec::seed`] through
//! `SeedableRng::seed_from_u64`; attacker `i` draws from stream `i` of that
//! generator, so each attacker's choices depend only on the seed and its
//! position.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::dataset::{RatingDataset, RawRating};
use crate::error::{Error, Result};
use crate::Scores;

/// Largest accepted attacker fraction.
pub const MAX_FRACTION: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    /// Uniformly random ratings on popularity-sampled items.
    RandomSpam,
    /// Extreme rating on the target, the opposite extreme on random fillers.
    LoveHate,
    /// Consensus-mimicking ratings on popular fillers, extreme on the target.
    ReputationAttack,
}

impl std::str::FromStr for AttackKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-spam" | "random" => Ok(AttackKind::RandomSpam),
            "love-hate" => Ok(AttackKind::LoveHate),
            "reputation-attack" | "reputation" => Ok(AttackKind::ReputationAttack),
            _ => Err(Error::config(format!("unknown attack kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Push,
    #[default]
    Nuke,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttackSpec {
    pub kind: AttackKind,
    /// Random spam: share of the user count. Targeted attacks: share of the
    /// target's rater count.
    pub fraction: f64,
    pub direction: Direction,
    pub filler_count: usize,
    /// Mean of the Poisson part of a spammer's rating count.
    pub poisson_lambda: f64,
    pub seed: u64,
}

impl Default for AttackSpec {
    fn default() -> Self {
        AttackSpec {
            kind: AttackKind::RandomSpam,
            fraction: 0.0,
            direction: Direction::Nuke,
            filler_count: 9,
            poisson_lambda: 5.0,
            seed: 0,
        }
    }
}

impl AttackSpec {
    pub fn new(kind: AttackKind, fraction: f64, seed: u64) -> Self {
        AttackSpec {
            kind,
            fraction,
            seed,
            ..Default::default()
        }
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=MAX_FRACTION).contains(&self.fraction) {
            return Err(Error::config(format!(
                "attack fraction must lie in [0, {MAX_FRACTION}], got {}",
                self.fraction
            )));
        }
        if self.kind != AttackKind::RandomSpam && self.filler_count == 0 {
            return Err(Error::config("filler_count must be positive"));
        }
        if !(self.poisson_lambda > 0.0 && self.poisson_lambda.is_finite()) {
            return Err(Error::config("poisson_lambda must be positive"));
        }
        Ok(())
    }

    fn expect_kind(&self, kind: AttackKind) -> Result<()> {
        self.validate()?;
        if self.kind != kind {
            return Err(Error::config(format!("expected a {kind:?} spec, got {:?}", self.kind)));
        }
        Ok(())
    }
}

/// Item with the most raters, lowest id on ties. `None` for a dataset
/// without ratings.
pub fn most_voted_item(d: &RatingDataset) -> Option<usize> {
    (0..d.num_items())
        .filter(|&j| d.item_degree(j) > 0)
        .max_by(|&a, &b| d.item_degree(a).cmp(&d.item_degree(b)).then(b.cmp(&a)))
}

/// `count` user ids starting with `prefix` that do not occur in `d`.
fn fresh_ids(d: &RatingDataset, prefix: &str, count: usize) -> Vec<String> {
    let mut prefix = prefix.to_string();
    loop {
        let ids: Vec<String> = (0..count).map(|i| format!("{prefix}{i:06}")).collect();
        if ids.iter().all(|id| d.user_index(id).is_none()) {
            return ids;
        }
        prefix.push('_');
    }
}

fn attacker_rng(seed: u64, attacker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attacker as u64);
    rng
}

/// Result of an injection.
#[derive(Debug, Clone, PartialEq)]
pub struct Attacked {
    pub dataset: RatingDataset,
    pub attackers: Vec<String>,
    /// Targeted item id, for targeted attacks.
    pub target: Option<String>,
}

/// Adds `floor(fraction * |U|)` spammers. Each rates `1 + Poisson(lambda)`
/// distinct items (capped by the number of rated items), drawn with
/// probability proportional to their rating counts, uniformly on the rating
/// grid.
pub fn random_spam(d: &RatingDataset, spec: &AttackSpec) -> Result<Attacked> {
    spec.expect_kind(AttackKind::RandomSpam)?;
    let n_spam = (spec.fraction * d.num_users() as f64).floor() as usize;
    let candidates: Vec<usize> = (0..d.num_items()).filter(|&j| d.item_degree(j) > 0).collect();
    if n_spam == 0 || candidates.is_empty() {
        return Ok(Attacked {
            dataset: d.clone(),
            attackers: vec![],
            target: None,
        });
    }
    let poisson = Poisson::new(spec.poisson_lambda).map_err(|e| Error::config(e.to_string()))?;
    let scale = d.scale();
    let ids = fresh_ids(d, "spammer_", n_spam);
    let mut records = Vec::new();
    for (i, id) in ids.iter().enumerate() {
        let mut rng = attacker_rng(spec.seed, i);
        let n = (1 + poisson.sample(&mut rng) as usize).min(candidates.len());
        let picked = candidates
            .choose_multiple_weighted(&mut rng, n, |&j| d.item_degree(j) as f64)
            .map_err(|e| Error::Attack(e.to_string()))?;
        let mut picked: Vec<usize> = picked.copied().collect();
        picked.sort_unstable();
        for j in picked {
            let raw = rng.random_range(scale.r_min()..=scale.r_max());
            records.push(RawRating::new(id.clone(), d.items()[j].clone(), raw, 0));
        }
    }
    Ok(Attacked {
        dataset: d.with_records(records)?,
        attackers: ids,
        target: None,
    })
}

fn targeted_setup(d: &RatingDataset, spec: &AttackSpec) -> Result<(usize, usize, Vec<usize>)> {
    let target = most_voted_item(d).ok_or_else(|| Error::Attack("dataset has no ratings".into()))?;
    let n_att = (spec.fraction * d.item_degree(target) as f64).floor() as usize;
    let others: Vec<usize> = (0..d.num_items()).filter(|&j| j != target).collect();
    if others.len() < spec.filler_count {
        return Err(Error::Attack(format!(
            "need {} filler items besides the target, only {} exist",
            spec.filler_count,
            others.len()
        )));
    }
    Ok((target, n_att, others))
}

fn extremes(d: &RatingDataset, direction: Direction) -> (u32, u32) {
    let s = d.scale();
    match direction {
        Direction::Nuke => (s.r_min(), s.r_max()),
        Direction::Push => (s.r_max(), s.r_min()),
    }
}

/// Attackers hit the most-voted item with the extreme rating for
/// `direction` and give `filler_count` random other items the opposite
/// extreme. Attacker count is `floor(fraction * raters of target)`.
pub fn love_hate(d: &RatingDataset, spec: &AttackSpec) -> Result<Attacked> {
    spec.expect_kind(AttackKind::LoveHate)?;
    let (target, n_att, others) = targeted_setup(d, spec)?;
    let (target_raw, filler_raw) = extremes(d, spec.direction);
    let ids = fresh_ids(d, "attacker_", n_att);
    let mut records = Vec::new();
    for (i, id) in ids.iter().enumerate() {
        let mut rng = attacker_rng(spec.seed, i);
        records.push(RawRating::new(id.clone(), d.items()[target].clone(), target_raw, 0));
        for &j in others.choose_multiple(&mut rng, spec.filler_count) {
            records.push(RawRating::new(id.clone(), d.items()[j].clone(), filler_raw, 0));
        }
    }
    Ok(Attacked {
        dataset: d.with_records(records)?,
        attackers: ids,
        target: Some(d.items()[target].clone()),
    })
}

/// Attackers rate the `filler_count` most popular non-target items with the
/// grid rating nearest to their displayed ranking, then hit the most-voted
/// item with the extreme rating for `direction`.
///
/// `displayed` is what an outside user can see: the bipartite rankings, or
/// the aggregated displayed rankings of a clustered run.
pub fn reputation_attack(d: &RatingDataset, spec: &AttackSpec, displayed: &Scores) -> Result<Attacked> {
    spec.expect_kind(AttackKind::ReputationAttack)?;
    let (target, n_att, mut others) = targeted_setup(d, spec)?;
    others.sort_by(|&a, &b| d.item_degree(b).cmp(&d.item_degree(a)).then(a.cmp(&b)));
    others.truncate(spec.filler_count);
    others.sort_unstable();
    let scale = d.scale();
    let fillers: Vec<(String, u32)> = others
        .iter()
        .map(|&j| {
            let id = &d.items()[j];
            let shown = displayed
                .get(id)
                .ok_or_else(|| Error::Attack(format!("no displayed ranking for filler {id:?}")))?;
            Ok((id.clone(), scale.nearest_raw(*shown)))
        })
        .collect::<Result<_>>()?;
    let (target_raw, _) = extremes(d, spec.direction);
    let ids = fresh_ids(d, "attacker_", n_att);
    let mut records = Vec::new();
    for id in &ids {
        records.push(RawRating::new(id.clone(), d.items()[target].clone(), target_raw, 0));
        for (item, raw) in &fillers {
            records.push(RawRating::new(id.clone(), item.clone(), *raw, 0));
        }
    }
    Ok(Attacked {
        dataset: d.with_records(records)?,
        attackers: ids,
        target: Some(d.items()[target].clone()),
    })
}

/// Dispatches on `spec.kind`. Reputation attacks need the displayed
/// rankings.
pub fn apply_attack(d: &RatingDataset, spec: &AttackSpec, displayed: Option<&Scores>) -> Result<Attacked> {
    match spec.kind {
        AttackKind::RandomSpam => random_spam(d, spec),
        AttackKind::LoveHate => love_hate(d, spec),
        AttackKind::ReputationAttack => {
            let shown = displayed.ok_or_else(|| Error::config("reputation attack needs displayed rankings"))?;
            reputation_attack(d, spec, shown)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::RatingScale;
    use crate::metrics::arithmetic_average_scores;

    fn base() -> RatingDataset {
        let mut recs = Vec::new();
        for u in 0..20 {
            for j in 0..12 {
                if (u + j) % 3 != 0 || j == 0 {
                    recs.push(RawRating::new(
                        format!("u{u:02}"),
                        format!("o{j:02}"),
                        1 + ((u * 7 + j) % 5) as u32,
                        1,
                    ));
                }
            }
        }
        RatingDataset::from_records(RatingScale::default(), recs).unwrap()
    }

    fn originals_kept(before: &RatingDataset, after: &RatingDataset) -> bool {
        let after: std::collections::HashSet<_> = after
            .to_records()
            .into_iter()
            .map(|r| (r.user, r.item, r.rating, r.timestamp))
            .collect();
        before
            .to_records()
            .into_iter()
            .all(|r| after.contains(&(r.user, r.item, r.rating, r.timestamp)))
    }

    #[test]
    fn most_voted_tie_breaks_low() {
        let d = RatingDataset::from_records(
            RatingScale::default(),
            [
                RawRating::new("a", "o5", 3, 0),
                RawRating::new("b", "o5", 3, 0),
                RawRating::new("a", "o1", 3, 0),
                RawRating::new("b", "o1", 3, 0),
                RawRating::new("a", "o3", 3, 0),
            ],
        )
        .unwrap();
        assert_eq!(d.items()[most_voted_item(&d).unwrap()], "o1");
        assert_eq!(most_voted_item(&base()), Some(0));
        assert_eq!(most_voted_item(&RatingDataset::empty(RatingScale::default())), None);
    }

    #[test]
    fn zero_fraction_is_identity() {
        let d = base();
        for kind in [
            AttackKind::RandomSpam,
            AttackKind::LoveHate,
            AttackKind::ReputationAttack,
        ] {
            let shown = arithmetic_average_scores(&d);
            let out = apply_attack(&d, &AttackSpec::new(kind, 0.0, 1), Some(&shown)).unwrap();
            assert_eq!(out.dataset, d);
            assert!(out.attackers.is_empty());
        }
    }

    #[test]
    fn fraction_out_of_range() {
        let d = base();
        assert!(matches!(
            random_spam(&d, &AttackSpec::new(AttackKind::RandomSpam, -0.1, 1)),
            Err(Error::Config(_))
        ));
        assert!(random_spam(&d, &AttackSpec::new(AttackKind::RandomSpam, 0.9, 1)).is_err());
        assert!(love_hate(&d, &AttackSpec::new(AttackKind::RandomSpam, 0.5, 1)).is_err());
    }

    #[test]
    fn random_spam_shape_and_determinism() {
        let d = base();
        let spec = AttackSpec::new(AttackKind::RandomSpam, 0.5, 42);
        let a = random_spam(&d, &spec).unwrap();
        let b = random_spam(&d, &spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.attackers.len(), 10);
        assert!(originals_kept(&d, &a.dataset));
        for id in &a.attackers {
            assert!(d.user_index(id).is_none());
            let u = a.dataset.user_index(id).unwrap();
            assert!(a.dataset.user_degree(u) >= 1);
            assert!(a.dataset.user_ratings(u).iter().all(|r| r.timestamp == 0));
        }
        let other = random_spam(&d, &AttackSpec::new(AttackKind::RandomSpam, 0.5, 43)).unwrap();
        assert_ne!(a.dataset, other.dataset);
    }

    #[test]
    fn attacker_ids_avoid_collisions() {
        let mut recs = base().to_records();
        recs.push(RawRating::new("attacker_000000", "o01", 3, 0));
        let d = RatingDataset::from_records(RatingScale::default(), recs).unwrap();
        let out = love_hate(&d, &AttackSpec::new(AttackKind::LoveHate, 0.5, 1)).unwrap();
        assert!(out.attackers.iter().all(|id| d.user_index(id).is_none()));
    }

    #[test]
    fn love_hate_nuke_lowers_target() {
        let d = base();
        let spec = AttackSpec::new(AttackKind::LoveHate, 0.5, 9);
        let out = love_hate(&d, &spec).unwrap();
        let target = out.target.clone().unwrap();
        assert_eq!(out.attackers.len(), 10);
        let before = arithmetic_average_scores(&d)[&target];
        let after = arithmetic_average_scores(&out.dataset)[&target];
        assert!(after < before);
        for id in &out.attackers {
            let u = out.dataset.user_index(id).unwrap();
            let rated = out.dataset.user_ratings(u);
            assert_eq!(rated.len(), 10);
            for r in rated {
                let item = &out.dataset.items()[r.item];
                assert_eq!(r.raw, if *item == target { 1 } else { 5 });
            }
        }
        let push = love_hate(&d, &spec.with_direction(Direction::Push)).unwrap();
        assert!(arithmetic_average_scores(&push.dataset)[&target] > before);
    }

    #[test]
    fn love_hate_needs_enough_fillers() {
        let d = RatingDataset::from_records(
            RatingScale::default(),
            (0..4).map(|j| RawRating::new("a", format!("o{j}"), 3, 0)),
        )
        .unwrap();
        assert!(matches!(
            love_hate(&d, &AttackSpec::new(AttackKind::LoveHate, 0.5, 1)),
            Err(Error::Attack(_))
        ));
    }

    #[test]
    fn reputation_attack_mimics_displayed() {
        let d = base();
        let mut shown = arithmetic_average_scores(&d);
        let spec = AttackSpec::new(AttackKind::ReputationAttack, 0.5, 0);
        let popular_filler = "o01".to_string();
        shown.insert(popular_filler.clone(), 0.78);
        let out = reputation_attack(&d, &spec, &shown).unwrap();
        let target = out.target.clone().unwrap();
        assert!(originals_kept(&d, &out.dataset));
        let u = out.dataset.user_index(&out.attackers[0]).unwrap();
        let rated = out.dataset.user_ratings(u);
        assert_eq!(rated.len(), 10);
        for r in rated {
            let item = &out.dataset.items()[r.item];
            if *item == target {
                assert_eq!(r.raw, 1);
            } else {
                assert_eq!(r.raw, d.scale().nearest_raw(shown[item]));
            }
        }
        assert!(rated
            .iter()
            .any(|r| out.dataset.items()[r.item] == popular_filler && r.raw == 4));
        assert!(matches!(
            reputation_attack(&d, &spec, &Scores::new()),
            Err(Error::Attack(_))
        ));
    }
}
