//! Iterative reputation-based ranking on the user-item bipartite graph.
//!
//! Rankings are reputation-weighted averages of each item's ratings;
//! reputations are one minus a decayed penalty on the user's disagreement with
//! the current rankings. The two updates alternate from a uniform initial
//! reputation until the rankings stop moving in the sup norm.

use serde::{Deserialize, Serialize};

use crate::dataset::RatingDataset;
use crate::error::{Error, Result};

/// Floor applied to per-item reputation sums before dividing.
pub const DENOMINATOR_FLOOR: f64 = 1e-9;

/// How a user's per-item disagreements are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    #[default]
    Average,
    Max,
    Min,
}

/// Penalty scale as a function of how many items a user rated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decay {
    #[default]
    Constant,
    Exponential,
    Logistic,
}

/// Normalizer used by the ranking update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenominatorGuard {
    /// `max(sum of rater reputations, DENOMINATOR_FLOOR)`: a plain weighted
    /// average.
    #[default]
    Floor,
    /// `max(sum of rater reputations, 1)`. Makes the map contractive for any
    /// `lambda < 1`, at the cost of shrinking rankings of items whose raters'
    /// reputations sum below one.
    UnitFloor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankerConfig {
    /// Penalty magnitude, in `[0, 1)`.
    pub lambda: f64,
    /// Disagreement exponent.
    pub p: u32,
    pub aggregation: Aggregation,
    pub decay: Decay,
    /// Logistic floor, in `(0, 1)`. Only read by [`Decay::Logistic`].
    pub upsilon: f64,
    /// Logistic midpoint. Only read by [`Decay::Logistic`].
    pub s: u32,
    /// Sup-norm tolerance on successive rankings.
    pub epsilon: f64,
    pub max_iters: usize,
    pub initial_reputation: f64,
    pub guard: DenominatorGuard,
}

impl Default for RankerConfig {
    fn default() -> Self {
        Self::bwa(0.3)
    }
}

impl RankerConfig {
    /// Bipartite weighted average: average disagreement, constant decay.
    pub fn bwa(lambda: f64) -> Self {
        RankerConfig {
            lambda,
            p: 1,
            aggregation: Aggregation::Average,
            decay: Decay::Constant,
            upsilon: 0.5,
            s: 5,
            epsilon: 1e-9,
            max_iters: 1000,
            initial_reputation: 1.0,
            guard: DenominatorGuard::Floor,
        }
    }

    /// `lambda = 0`: every reputation stays at one and rankings are plain
    /// arithmetic averages.
    pub fn arithmetic_average() -> Self {
        Self::bwa(0.0)
    }

    /// Largest `lambda` (exclusive) for which the unguarded update is a
    /// contraction on ratings with normalized range `delta_norm`.
    pub fn lambda_bound(delta_norm: f64) -> f64 {
        1.0 / (1.0 + delta_norm)
    }

    pub fn validate(&self, delta_norm: f64) -> Result<()> {
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(Error::config(format!("lambda must lie in [0, 1), got {}", self.lambda)));
        }
        if self.guard == DenominatorGuard::Floor && self.lambda >= Self::lambda_bound(delta_norm) {
            return Err(Error::config(format!(
                "lambda {} is not below 1/(1+{delta_norm}) = {:.6}; enable the unit-floor guard to use it",
                self.lambda,
                Self::lambda_bound(delta_norm)
            )));
        }
        if self.p == 0 {
            return Err(Error::config("p must be a positive integer"));
        }
        if self.decay == Decay::Logistic && !(self.upsilon > 0.0 && self.upsilon < 1.0) {
            return Err(Error::config(format!(
                "upsilon must lie in (0, 1), got {}",
                self.upsilon
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::config("epsilon must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::config("max_iters must be positive"));
        }
        if !(self.initial_reputation > 0.0 && self.initial_reputation <= 1.0) {
            return Err(Error::config(format!(
                "initial_reputation must lie in (0, 1], got {}",
                self.initial_reputation
            )));
        }
        Ok(())
    }
}

/// Penalty scale for a user who rated `x` items; always in `[0, lambda]`.
pub fn decay(kind: Decay, x: usize, lambda: f64, upsilon: f64, s: u32) -> f64 {
    let x = x as f64;
    match kind {
        Decay::Constant => lambda,
        Decay::Exponential => lambda * (1.0 - (-x / 2.0).exp()),
        Decay::Logistic => {
            let sigmoid = 1.0 / (1.0 + (f64::from(s) - x).exp());
            lambda * (1.0 - (1.0 - upsilon) * sigmoid)
        }
    }
}

/// Reputation-weighted average of every item's ratings.
///
/// `reputations` is indexed by user. Items nobody rated come back as `None`.
pub fn ranking_step(d: &RatingDataset, reputations: &[f64], guard: DenominatorGuard) -> Result<Vec<Option<f64>>> {
    assert_eq!(reputations.len(), d.num_users(), "one reputation per user");
    let mut out = Vec::with_capacity(d.num_items());
    for j in 0..d.num_items() {
        if d.item_degree(j) == 0 {
            out.push(None);
            continue;
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for r in d.item_ratings(j) {
            let c = reputations[r.user];
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Numerical(format!(
                    "reputation of user {:?} is {c}, expected a value in (0, 1]",
                    d.users()[r.user]
                )));
            }
            num += r.value * c;
            den += c;
        }
        let den = match guard {
            DenominatorGuard::Floor => den.max(DENOMINATOR_FLOOR),
            DenominatorGuard::UnitFloor => den.max(1.0),
        };
        out.push(Some(num / den));
    }
    Ok(out)
}

/// One reputation update against the current rankings. Users without ratings
/// come back as `None`.
pub fn reputation_step(d: &RatingDataset, rankings: &[Option<f64>], cfg: &RankerConfig) -> Result<Vec<Option<f64>>> {
    assert_eq!(rankings.len(), d.num_items(), "one ranking slot per item");
    let p = cfg.p as i32;
    let mut out = Vec::with_capacity(d.num_users());
    for u in 0..d.num_users() {
        let rated = d.user_ratings(u);
        if rated.is_empty() {
            out.push(None);
            continue;
        }
        let mut acc = match cfg.aggregation {
            Aggregation::Average => 0.0,
            Aggregation::Max => f64::NEG_INFINITY,
            Aggregation::Min => f64::INFINITY,
        };
        for r in rated {
            let rank = rankings[r.item]
                .ok_or_else(|| Error::Numerical(format!("item {:?} has no ranking", d.items()[r.item])))?;
            let dis = (r.value - rank).abs().powi(p);
            acc = match cfg.aggregation {
                Aggregation::Average => acc + dis,
                Aggregation::Max => acc.max(dis),
                Aggregation::Min => acc.min(dis),
            };
        }
        if cfg.aggregation == Aggregation::Average {
            acc /= rated.len() as f64;
        }
        let f = decay(cfg.decay, rated.len(), cfg.lambda, cfg.upsilon, cfg.s);
        out.push(Some(1.0 - f * acc));
    }
    Ok(out)
}

/// Reputations and rankings at some iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct RankState {
    /// Indexed by user; `None` for users without ratings.
    pub reputations: Vec<Option<f64>>,
    /// Indexed by item; `None` for items without raters.
    pub rankings: Vec<Option<f64>>,
    pub iteration: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointOutcome {
    pub state: RankState,
    pub converged: bool,
    /// Number of reputation/ranking refinements after the initial ranking.
    pub iterations: usize,
    /// Sup-norm change of the rankings at each refinement.
    pub diffs: Vec<f64>,
}

impl FixedPointOutcome {
    /// Largest ratio between consecutive ranking changes, skipping the
    /// first `skip` ratios. `None` when fewer than two nonzero changes exist.
    pub fn contraction_ratio(&self, skip: usize) -> Option<f64> {
        self.diffs
            .windows(2)
            .skip(skip)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
    }
}

fn sup_diff(a: &[Option<f64>], b: &[Option<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .filter_map(|(x, y)| Some((x.as_ref()? - y.as_ref()?).abs()))
        .fold(0.0, f64::max)
}

fn check_finite(v: &[Option<f64>], what: &str) -> Result<()> {
    match v.iter().flatten().find(|x| !x.is_finite()) {
        Some(x) => Err(Error::Numerical(format!("non-finite {what} value {x}"))),
        None => Ok(()),
    }
}

/// Alternates ranking and reputation updates from a uniform reputation.
///
/// The first ranking is computed from the initial reputations; each later
/// refinement updates reputations, then rankings, and stops once the
/// rankings moved less than `cfg.epsilon` in the sup norm.
pub fn run_fixed_point(d: &RatingDataset, cfg: &RankerConfig) -> Result<FixedPointOutcome> {
    cfg.validate(d.scale().delta_norm())?;
    if d.is_empty() {
        return Err(Error::Domain("cannot rank an empty dataset".into()));
    }
    let mut c = vec![cfg.initial_reputation; d.num_users()];
    let mut rankings = ranking_step(d, &c, cfg.guard)?;
    check_finite(&rankings, "ranking")?;
    let mut reputations: Vec<Option<f64>> = (0..d.num_users())
        .map(|u| (d.user_degree(u) > 0).then_some(cfg.initial_reputation))
        .collect();
    let mut diffs = Vec::new();
    let mut converged = false;
    while diffs.len() < cfg.max_iters {
        reputations = reputation_step(d, &rankings, cfg)?;
        check_finite(&reputations, "reputation")?;
        for (slot, rep) in c.iter_mut().zip(&reputations) {
            if let Some(rep) = rep {
                *slot = *rep;
            }
        }
        let next = ranking_step(d, &c, cfg.guard)?;
        check_finite(&next, "ranking")?;
        let diff = sup_diff(&next, &rankings);
        diffs.push(diff);
        rankings = next;
        if diff < cfg.epsilon {
            converged = true;
            break;
        }
    }
    let iterations = diffs.len();
    Ok(FixedPointOutcome {
        state: RankState {
            reputations,
            rankings,
            iteration: iterations,
        },
        converged,
        iterations,
        diffs,
    })
}

/// Iterations needed to shrink a unit error below `epsilon` at contraction
/// rate `eta`: `ceil(ln epsilon / ln eta)`.
///
/// Quotients within `1e-9` of an integer are taken as that integer, so exact
/// powers such as `eta = 0.1, epsilon = 1e-3` give 3 rather than 4.
pub fn iteration_bound(eta: f64, epsilon: f64) -> Result<usize> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!(
            "contraction factor must lie in (0, 1), got {eta}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("tolerance must lie in (0, 1), got {epsilon}")));
    }
    let q = epsilon.ln() / eta.ln();
    let nearest = q.round();
    let k = if (q - nearest).abs() < 1e-9 { nearest } else { q.ceil() };
    Ok((k as usize).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{RatingScale, RawRating};

    fn ds(recs: &[(&str, &str, u32)]) -> RatingDataset {
        RatingDataset::from_records(
            RatingScale::default(),
            recs.iter().map(|&(u, o, r)| RawRating::new(u, o, r, 0)),
        )
        .unwrap()
    }

    #[test]
    fn ranking_step_uniform_is_average() {
        let d = ds(&[("a", "x", 5), ("b", "x", 1), ("c", "x", 3), ("a", "y", 3)]);
        let r = ranking_step(&d, &[0.7; 3], DenominatorGuard::Floor).unwrap();
        assert!((r[0].unwrap() - 0.6).abs() < 1e-15);
        assert!((r[1].unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn ranking_step_weighted() {
        let d = ds(&[("a", "x", 5), ("b", "x", 1)]);
        let r = ranking_step(&d, &[0.9, 0.1], DenominatorGuard::Floor).unwrap();
        assert!((r[0].unwrap() - 0.92).abs() < 1e-12);
    }

    #[test]
    fn ranking_step_unrated_item_absent() {
        let d = RatingDataset::from_parts(
            RatingScale::default(),
            [],
            ["lonely".to_string()],
            [RawRating::new("a", "x", 3, 0)],
        )
        .unwrap();
        let r = ranking_step(&d, &[1.0], DenominatorGuard::Floor).unwrap();
        assert_eq!(r[d.item_index("lonely").unwrap()], None);
        assert!((r[d.item_index("x").unwrap()].unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn ranking_step_rejects_zero_reputation() {
        let d = ds(&[("a", "x", 5), ("b", "x", 1)]);
        assert!(matches!(
            ranking_step(&d, &[0.0, 0.0], DenominatorGuard::Floor),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn unit_floor_guard_shrinks_light_items() {
        let d = ds(&[("a", "x", 5)]);
        let r = ranking_step(&d, &[0.5], DenominatorGuard::UnitFloor).unwrap();
        assert!((r[0].unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reputation_step_examples() {
        let d = ds(&[("a", "x", 5)]);
        let mut cfg = RankerConfig::bwa(0.3);
        let c = reputation_step(&d, &[Some(0.2)], &cfg).unwrap();
        assert!((c[0].unwrap() - 0.76).abs() < 1e-12);
        let c = reputation_step(&d, &[Some(1.0)], &cfg).unwrap();
        assert_eq!(c[0], Some(1.0));
        cfg.lambda = 0.0;
        let c = reputation_step(&d, &[Some(0.2)], &cfg).unwrap();
        assert_eq!(c[0], Some(1.0));
    }

    #[test]
    fn reputation_step_aggregations() {
        let d = ds(&[("a", "x", 5), ("a", "y", 3), ("a", "z", 1)]);
        let r = [Some(0.6), Some(0.6), Some(0.6)];
        let mut cfg = RankerConfig::bwa(0.5);
        // disagreements 0.4, 0.0, 0.4
        let avg = reputation_step(&d, &r, &cfg).unwrap()[0].unwrap();
        assert!((avg - (1.0 - 0.5 * 0.8 / 3.0)).abs() < 1e-12);
        cfg.aggregation = Aggregation::Max;
        let max = reputation_step(&d, &r, &cfg).unwrap()[0].unwrap();
        assert!((max - 0.8).abs() < 1e-12);
        cfg.aggregation = Aggregation::Min;
        assert_eq!(reputation_step(&d, &r, &cfg).unwrap()[0], Some(1.0));
        cfg.aggregation = Aggregation::Average;
        cfg.p = 2;
        let sq = reputation_step(&d, &r, &cfg).unwrap()[0].unwrap();
        assert!((sq - (1.0 - 0.5 * 0.32 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn reputation_step_user_without_ratings() {
        let d = RatingDataset::from_parts(
            RatingScale::default(),
            ["idle".to_string()],
            [],
            [RawRating::new("a", "x", 3, 0)],
        )
        .unwrap();
        let c = reputation_step(&d, &[Some(0.6)], &RankerConfig::default()).unwrap();
        assert_eq!(c[d.user_index("idle").unwrap()], None);
    }

    #[test]
    fn decay_values() {
        assert_eq!(decay(Decay::Constant, 17, 0.3, 0.5, 5), 0.3);
        assert_eq!(decay(Decay::Exponential, 0, 0.3, 0.5, 5), 0.0);
        assert!((decay(Decay::Logistic, 4, 1.0, 0.2, 4) - 0.6).abs() < 1e-15);
        let e = decay(Decay::Exponential, 2, 1.0, 0.5, 5);
        assert!((e - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        for x in 0..40 {
            for kind in [Decay::Constant, Decay::Exponential, Decay::Logistic] {
                let f = decay(kind, x, 0.4, 0.3, 6);
                assert!((0.0..=0.4).contains(&f));
            }
        }
    }

    #[test]
    fn iteration_bound_examples() {
        assert_eq!(iteration_bound(0.5, 0.5).unwrap(), 1);
        assert_eq!(iteration_bound(0.1, 0.001).unwrap(), 3);
        assert_eq!(iteration_bound(0.9, 1e-6).unwrap(), 132);
        assert!(matches!(iteration_bound(1.0, 0.1), Err(Error::Domain(_))));
        assert!(iteration_bound(1.5, 0.1).is_err());
        assert!(iteration_bound(0.5, 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        let delta = 0.8;
        assert!(RankerConfig::bwa(0.3).validate(delta).is_ok());
        assert!(RankerConfig::bwa(0.56).validate(delta).is_err());
        let mut guarded = RankerConfig::bwa(0.9);
        guarded.guard = DenominatorGuard::UnitFloor;
        assert!(guarded.validate(delta).is_ok());
        assert!(RankerConfig::bwa(1.0).validate(delta).is_err());
        let bad = RankerConfig {
            decay: Decay::Logistic,
            upsilon: 1.0,
            ..Default::default()
        };
        assert!(bad.validate(delta).is_err());
        let bad = RankerConfig {
            initial_reputation: 0.0,
            ..Default::default()
        };
        assert!(bad.validate(delta).is_err());
    }

    #[test]
    fn lambda_zero_converges_after_one_refinement() {
        let d = ds(&[("a", "x", 5), ("b", "x", 2), ("b", "y", 4), ("c", "y", 1)]);
        let out = run_fixed_point(&d, &RankerConfig::arithmetic_average()).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
        assert!((out.state.rankings[0].unwrap() - 0.7).abs() < 1e-15);
        assert!((out.state.rankings[1].unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_dataset_rejected() {
        let d = RatingDataset::empty(RatingScale::default());
        assert!(matches!(
            run_fixed_point(&d, &RankerConfig::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn max_iters_reports_nonconvergence() {
        let d = ds(&[
            ("a", "x", 5),
            ("b", "x", 1),
            ("a", "y", 1),
            ("b", "y", 4),
            ("c", "y", 5),
            ("c", "x", 2),
        ]);
        let mut cfg = RankerConfig::bwa(0.5);
        cfg.max_iters = 2;
        cfg.epsilon = 1e-15;
        let out = run_fixed_point(&d, &cfg).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 2);
    }
}
