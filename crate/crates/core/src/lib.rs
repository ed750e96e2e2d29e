//! Reputation-based ranking for rating networks, with user clustering.
//!
//! The crate ranks items from user ratings by alternating two updates: item
//! rankings are reputation-weighted rating averages, and user reputations
//! shrink with disagreement against the current rankings. On top of that
//! bipartite ranker, users can be grouped into communities of similar raters
//! ([`clustering`]) so that every community gets its own ranking, and new
//! visitors see a size-weighted blend.
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`dataset`] | CSV ingestion, normalization, k-core filtering, statistics |
//! | [`ranker`] | the fixed-point ranking/reputation iteration |
//! | [`similarity`] | linear, Kolmogorov and compression similarity of users |
//! | [`clustering`] | similarity graph, connected components, per-cluster ranking |
//! | [`metrics`] | Kendall tau, generalized tau, effectiveness, robustness |
//! | [`attacks`] | random spam, love/hate and reputation attacks |
//! | [`experiment`] | the `rank`, `attack-eval` and `stats` commands |
//! | [`synthetic`] | seeded datasets with planted taste groups |
//!
//! ```
//! use clusterrank::dataset::{parse_ratings, RatingScale};
//! use clusterrank::ranker::{run_fixed_point, RankerConfig};
//!
//! let csv = "alice,book,5,1\nbob,book,1,2\nbob,film,4,3\ncarol,film,4,4\ncarol,book,5,5\n";
//! let d = parse_ratings(csv.as_bytes(), RatingScale::default()).unwrap();
//! let out = run_fixed_point(&d, &RankerConfig::bwa(0.3)).unwrap();
//! assert!(out.converged);
//! // bob disagrees on "book", so his 1-star rating weighs less than in a plain mean
//! assert!(out.state.rankings[0].unwrap() > (1.0 + 0.2 + 1.0) / 3.0);
//! ```

use std::collections::BTreeMap;

pub mod attacks;
pub mod clustering;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod ranker;
pub mod similarity;
pub mod synthetic;

pub use error::{Error, Result};

/// Scores keyed by user or item id.
pub type Scores = BTreeMap<String, f64>;

/// Pairs ids with the defined entries of an index-aligned vector.
pub fn scores_by_id(ids: &[String], values: &[Option<f64>]) -> Scores {
    ids.iter()
        .zip(values)
        .filter_map(|(id, v)| v.map(|v| (id.clone(), v)))
        .collect()
}
