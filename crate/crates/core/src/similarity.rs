//! User-user similarity over shared rated items.
//!
//! Three measures are provided. All of them are similarities (larger means
//! more alike) in `[0, 1]`, and all of them are exactly zero for users that
//! share no rated item:
//!
//! * linear (LD): confidence-weighted one-minus mean absolute rating gap,
//! * Kolmogorov (KD): `1 / (1 + |C(u) - C(v)|)` on compressed profile sizes,
//! * compression (CD): one minus the normalized compression distance.
//!
//! Profiles are ASCII strings `item:raw;` sorted by item id, compressed with
//! raw DEFLATE at level 9 (`flate2`'s `miniz_oxide` backend).

use std::io::Write;

use flate2::write::DeflateEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};

use crate::dataset::RatingDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "ld")]
    Linear,
    #[serde(rename = "kd")]
    Kolmogorov,
    #[serde(rename = "cd")]
    Compression,
}

impl Measure {
    pub fn label(self) -> &'static str {
        match self {
            Measure::Linear => "LD",
            Measure::Kolmogorov => "KD",
            Measure::Compression => "CD",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ld" | "linear" => Ok(Measure::Linear),
            "kd" | "kolmogorov" => Ok(Measure::Kolmogorov),
            "cd" | "compression" => Ok(Measure::Compression),
            _ => Err(Error::config(format!("unknown similarity measure {s:?}"))),
        }
    }
}

/// Deterministic lossless byte compressors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Compressor {
    /// Raw DEFLATE (no zlib/gzip framing) at maximum compression.
    #[default]
    Deflate,
}

impl Compressor {
    /// Output length for empty input.
    pub const fn empty_length(self) -> usize {
        match self {
            // a single final fixed-Huffman block holding only end-of-block
            Compressor::Deflate => 2,
        }
    }

    /// Upper bound on the output length for `n` input bytes. Incompressible
    /// data goes out as stored blocks with five header bytes each; the
    /// encoder never stores more than 16 KiB per block.
    pub fn max_length(self, n: usize) -> usize {
        match self {
            Compressor::Deflate => n + 5 * n.div_ceil(16_384).max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimilarityConfig {
    pub measure: Measure,
    /// Shared-item count up to which LD is scaled down by `1/theta`.
    pub theta: u32,
    pub compressor: Compressor,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig {
            measure: Measure::Linear,
            theta: 3,
            compressor: Compressor::Deflate,
        }
    }
}

impl SimilarityConfig {
    pub fn new(measure: Measure) -> Self {
        SimilarityConfig {
            measure,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta == 0 {
            return Err(Error::config("theta must be at least 1"));
        }
        Ok(())
    }
}

pub fn try_compressed_length(bytes: &[u8], compressor: Compressor) -> Result<usize> {
    match compressor {
        Compressor::Deflate => {
            let mut enc = DeflateEncoder::new(Vec::with_capacity(bytes.len() / 2 + 8), Compression::best());
            enc.write_all(bytes).map_err(Error::Compressor)?;
            Ok(enc.finish().map_err(Error::Compressor)?.len())
        }
    }
}

/// Compressed size of `bytes` in bytes.
pub fn compressed_length(bytes: &[u8], compressor: Compressor) -> usize {
    try_compressed_length(bytes, compressor).expect("in-memory compression does not fail")
}

/// Canonical byte encoding of a user's ratings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UserProfile(Vec<u8>);

impl UserProfile {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Encodes `user`'s ratings as `item:raw;` pairs in item-id order.
pub fn encode_profile(d: &RatingDataset, user: usize) -> Result<UserProfile> {
    let rated = d.user_ratings(user);
    if rated.is_empty() {
        return Err(Error::NoRatings(d.users()[user].clone()));
    }
    let mut out = Vec::with_capacity(rated.len() * 8);
    // user_ratings is sorted by item index, which follows item-id order
    for r in rated {
        write!(out, "{}:{};", d.items()[r.item], r.raw).expect("writing to a Vec");
    }
    Ok(UserProfile(out))
}

/// Walks the shared items of two users, yielding their normalized ratings.
fn shared_ratings<'a>(d: &'a RatingDataset, u: usize, v: usize) -> impl Iterator<Item = (f64, f64)> + 'a {
    let (mut a, mut b) = (d.user_ratings(u).iter().peekable(), d.user_ratings(v).iter().peekable());
    std::iter::from_fn(move || loop {
        let (x, y) = (a.peek()?, b.peek()?);
        match x.item.cmp(&y.item) {
            std::cmp::Ordering::Less => {
                a.next();
            }
            std::cmp::Ordering::Greater => {
                b.next();
            }
            std::cmp::Ordering::Equal => {
                let pair = (x.value, y.value);
                a.next();
                b.next();
                return Some(pair);
            }
        }
    })
}

pub fn shared_item_count(d: &RatingDataset, u: usize, v: usize) -> usize {
    shared_ratings(d, u, v).count()
}

/// LD from the shared-item count and the summed absolute gap of normalized
/// ratings.
pub fn linear_from_sums(shared: usize, abs_gap_sum: f64, delta_norm: f64, theta: u32) -> f64 {
    if shared == 0 {
        return 0.0;
    }
    let confidence = if shared <= theta as usize {
        1.0 / f64::from(theta)
    } else {
        1.0
    };
    let mean_gap = abs_gap_sum / (shared as f64 * delta_norm);
    (confidence * (1.0 - mean_gap)).clamp(0.0, 1.0)
}

/// Linear similarity on normalized ratings, with gaps scaled by the
/// normalized rating range.
pub fn linear_distance(d: &RatingDataset, u: usize, v: usize, theta: u32) -> f64 {
    let (mut n, mut sum) = (0usize, 0.0);
    for (x, y) in shared_ratings(d, u, v) {
        n += 1;
        sum += (x - y).abs();
    }
    linear_from_sums(n, sum, d.scale().delta_norm(), theta)
}

/// KD from two compressed lengths.
pub fn kolmogorov_from_lengths(cu: usize, cv: usize) -> f64 {
    1.0 / (1.0 + cu.abs_diff(cv) as f64)
}

/// CD from the compressed lengths of both profiles and of their
/// concatenation, clamped to `[0, 1]`.
pub fn compression_from_lengths(cu: usize, cv: usize, cuv: usize) -> f64 {
    let (lo, hi) = (cu.min(cv) as f64, cu.max(cv) as f64);
    if hi == 0.0 {
        return 1.0;
    }
    (1.0 - (cuv as f64 - lo) / hi).clamp(0.0, 1.0)
}

/// CD between two arbitrary byte strings, without the shared-item rule.
pub fn compression_similarity_bytes(a: &[u8], b: &[u8], compressor: Compressor) -> Result<f64> {
    let mut ab = Vec::with_capacity(a.len() + b.len());
    ab.extend_from_slice(a);
    ab.extend_from_slice(b);
    Ok(compression_from_lengths(
        try_compressed_length(a, compressor)?,
        try_compressed_length(b, compressor)?,
        try_compressed_length(&ab, compressor)?,
    ))
}

pub fn kolmogorov_distance(d: &RatingDataset, u: usize, v: usize, compressor: Compressor) -> Result<f64> {
    if shared_item_count(d, u, v) == 0 {
        return Ok(0.0);
    }
    let cu = try_compressed_length(encode_profile(d, u)?.as_bytes(), compressor)?;
    let cv = try_compressed_length(encode_profile(d, v)?.as_bytes(), compressor)?;
    Ok(kolmogorov_from_lengths(cu, cv))
}

/// CD of two users. The concatenation puts the lower-indexed user first, so
/// the value does not depend on argument order.
pub fn compression_distance(d: &RatingDataset, u: usize, v: usize, compressor: Compressor) -> Result<f64> {
    if shared_item_count(d, u, v) == 0 {
        return Ok(0.0);
    }
    let (first, second) = if u <= v { (u, v) } else { (v, u) };
    compression_similarity_bytes(
        encode_profile(d, first)?.as_bytes(),
        encode_profile(d, second)?.as_bytes(),
        compressor,
    )
}

/// Similarity of `u` and `v` under `cfg.measure`.
pub fn similarity(d: &RatingDataset, u: usize, v: usize, cfg: &SimilarityConfig) -> Result<f64> {
    match cfg.measure {
        Measure::Linear => Ok(linear_distance(d, u, v, cfg.theta)),
        Measure::Kolmogorov => kolmogorov_distance(d, u, v, cfg.compressor),
        Measure::Compression => compression_distance(d, u, v, cfg.compressor),
    }
}

/// Per-user profiles and compressed lengths, computed once for repeated
/// pairwise queries.
#[derive(Debug, Clone)]
pub struct ProfileCache {
    profiles: Vec<Option<UserProfile>>,
    lengths: Vec<usize>,
    compressor: Compressor,
}

impl ProfileCache {
    pub fn new(d: &RatingDataset, compressor: Compressor) -> Result<Self> {
        let mut profiles = Vec::with_capacity(d.num_users());
        let mut lengths = Vec::with_capacity(d.num_users());
        for u in 0..d.num_users() {
            if d.user_degree(u) == 0 {
                profiles.push(None);
                lengths.push(0);
                continue;
            }
            let p = encode_profile(d, u)?;
            lengths.push(try_compressed_length(p.as_bytes(), compressor)?);
            profiles.push(Some(p));
        }
        Ok(ProfileCache {
            profiles,
            lengths,
            compressor,
        })
    }

    pub fn compressed_length(&self, u: usize) -> usize {
        self.lengths[u]
    }

    /// KD for two users already known to share an item.
    pub fn kolmogorov(&self, u: usize, v: usize) -> f64 {
        kolmogorov_from_lengths(self.lengths[u], self.lengths[v])
    }

    /// CD for two users already known to share an item.
    pub fn compression(&self, u: usize, v: usize) -> Result<f64> {
        let (first, second) = if u <= v { (u, v) } else { (v, u) };
        let (Some(a), Some(b)) = (&self.profiles[first], &self.profiles[second]) else {
            return Ok(0.0);
        };
        let mut ab = Vec::with_capacity(a.len() + b.len());
        ab.extend_from_slice(a.as_bytes());
        ab.extend_from_slice(b.as_bytes());
        let cuv = try_compressed_length(&ab, self.compressor)?;
        Ok(compression_from_lengths(self.lengths[first], self.lengths[second], cuv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{RatingScale, RawRating};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ds(recs: &[(&str, &str, u32)]) -> RatingDataset {
        RatingDataset::from_records(
            RatingScale::default(),
            recs.iter().map(|&(u, o, r)| RawRating::new(u, o, r, 0)),
        )
        .unwrap()
    }

    fn idx(d: &RatingDataset, u: &str) -> usize {
        d.user_index(u).unwrap()
    }

    #[test]
    fn profile_encoding() {
        let d = ds(&[
            ("a", "o2", 4),
            ("a", "o1", 5),
            ("b", "o1", 5),
            ("b", "o2", 4),
            ("c", "o1", 3),
        ]);
        let pa = encode_profile(&d, idx(&d, "a")).unwrap();
        assert_eq!(pa.as_bytes(), b"o1:5;o2:4;");
        assert_eq!(pa, encode_profile(&d, idx(&d, "b")).unwrap());
        assert_eq!(encode_profile(&d, idx(&d, "c")).unwrap().as_bytes(), b"o1:3;");
    }

    #[test]
    fn profile_of_silent_user_is_an_error() {
        let d = RatingDataset::from_parts(
            RatingScale::default(),
            ["ghost".to_string()],
            [],
            [RawRating::new("a", "o1", 3, 0)],
        )
        .unwrap();
        assert!(matches!(encode_profile(&d, idx(&d, "ghost")), Err(Error::NoRatings(_))));
    }

    #[test]
    fn linear_examples() {
        let d = ds(&[
            ("a", "o1", 5),
            ("b", "o2", 5),
            ("c", "o1", 4),
            ("d", "o1", 4),
            ("e", "x1", 2),
            ("e", "x2", 3),
            ("e", "x3", 4),
            ("e", "x4", 5),
            ("f", "x1", 2),
            ("f", "x2", 3),
            ("f", "x3", 4),
            ("f", "x4", 5),
        ]);
        assert_eq!(linear_distance(&d, idx(&d, "a"), idx(&d, "b"), 3), 0.0);
        let one_shared = linear_distance(&d, idx(&d, "c"), idx(&d, "d"), 3);
        assert!((one_shared - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(linear_distance(&d, idx(&d, "e"), idx(&d, "f"), 3), 1.0);
        // rating gap 0.2 on one item, delta 0.8: (1/3) * (1 - 0.25)
        let gap = linear_distance(&d, idx(&d, "a"), idx(&d, "c"), 3);
        assert!((gap - 0.25).abs() < 1e-12);
    }

    #[test]
    fn kolmogorov_examples() {
        let d = ds(&[
            ("a", "o1", 5),
            ("a", "o2", 4),
            ("b", "o1", 5),
            ("b", "o2", 4),
            ("c", "z", 1),
        ]);
        let (a, b, c) = (idx(&d, "a"), idx(&d, "b"), idx(&d, "c"));
        assert_eq!(kolmogorov_distance(&d, a, b, Compressor::Deflate).unwrap(), 1.0);
        assert_eq!(kolmogorov_distance(&d, a, c, Compressor::Deflate).unwrap(), 0.0);
        assert_eq!(kolmogorov_from_lengths(10, 13), 0.25);
        assert_eq!(kolmogorov_from_lengths(13, 10), 0.25);
    }

    #[test]
    fn compression_zero_for_disjoint() {
        let d = ds(&[("a", "o1", 5), ("b", "o2", 5)]);
        assert_eq!(compression_distance(&d, 0, 1, Compressor::Deflate).unwrap(), 0.0);
    }

    fn long_profile_dataset(items: usize) -> RatingDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let recs: Vec<RawRating> = (0..items)
            .map(|j| RawRating::new("a", format!("item{:04}", j * 7 + 3), rng.random_range(1..=5), 0))
            .chain([RawRating::new("b", "item0003", 3, 0)])
            .collect();
        RatingDataset::from_records(RatingScale::default(), recs).unwrap()
    }

    #[test]
    fn compression_self_similarity_is_high() {
        // DEFLATE adds a few bytes when the profile is repeated; measured CD
        // of a profile against itself is >= 0.8 from roughly 8 ratings on.
        for n in [8, 12, 20, 40, 80] {
            let d = long_profile_dataset(n);
            let a = idx(&d, "a");
            let cd = compression_distance(&d, a, a, Compressor::Deflate).unwrap();
            assert!(cd >= 0.8, "n={n}: {cd}");
        }
        // Short profiles fall below that: `o1:3;` compresses to 7 bytes and
        // its doubling to 9.
        let d = ds(&[("a", "o1", 3)]);
        let cd = compression_distance(&d, 0, 0, Compressor::Deflate).unwrap();
        assert!((cd - (1.0 - 2.0 / 7.0)).abs() < 1e-12);
    }

    #[test]
    fn compression_of_random_bytes_is_low() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for len in [256, 1000, 4096] {
            let a: Vec<u8> = (0..len).map(|_| rng.random()).collect();
            let b: Vec<u8> = (0..len).map(|_| rng.random()).collect();
            let cd = compression_similarity_bytes(&a, &b, Compressor::Deflate).unwrap();
            assert!(cd <= 0.2, "len={len}: {cd}");
        }
    }

    #[test]
    fn compressed_length_facts() {
        let c = Compressor::Deflate;
        assert_eq!(compressed_length(b"", c), 2);
        assert_eq!(c.empty_length(), 2);
        let x: Vec<u8> = b"o1:5;o2:4;o3:3;o4:1;".iter().copied().cycle().take(200).collect();
        let xx = [x.as_slice(), x.as_slice()].concat();
        assert!(compressed_length(&xx, c) < 2 * compressed_length(&x, c));
        assert_eq!(compressed_length(&x, c), compressed_length(&x, c));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [0usize, 1, 10, 100, 1000, 70_000] {
            let r: Vec<u8> = (0..n).map(|_| rng.random()).collect();
            let len = compressed_length(&r, c);
            assert!(len <= c.max_length(n), "n={n} len={len}");
        }
        // incompressible input pays the stored-block header
        let r: Vec<u8> = (0..1000).map(|_| rng.random()).collect();
        assert_eq!(compressed_length(&r, c), 1005);
    }

    #[test]
    fn measure_parsing() {
        assert_eq!("LD".parse::<Measure>().unwrap(), Measure::Linear);
        assert_eq!("kd".parse::<Measure>().unwrap(), Measure::Kolmogorov);
        assert_eq!("compression".parse::<Measure>().unwrap(), Measure::Compression);
        assert!("xx".parse::<Measure>().is_err());
    }

    fn arb_pair() -> impl Strategy<Value = RatingDataset> {
        (
            prop::collection::btree_map(0u8..12, 1u32..=5, 1..10),
            prop::collection::btree_map(0u8..12, 1u32..=5, 1..10),
        )
            .prop_map(|(a, b)| {
                let recs = a
                    .into_iter()
                    .map(|(o, r)| RawRating::new("a", format!("o{o:02}"), r, 0))
                    .chain(
                        b.into_iter()
                            .map(|(o, r)| RawRating::new("b", format!("o{o:02}"), r, 0)),
                    );
                RatingDataset::from_records(RatingScale::default(), recs).unwrap()
            })
    }

    proptest! {
        #[test]
        fn symmetric_bounded_and_zero_law(d in arb_pair(), theta in 1u32..6) {
            let c = Compressor::Deflate;
            let shared = shared_item_count(&d, 0, 1);
            let ld = linear_distance(&d, 0, 1, theta);
            prop_assert_eq!(ld, linear_distance(&d, 1, 0, theta));
            let kd = kolmogorov_distance(&d, 0, 1, c).unwrap();
            prop_assert_eq!(kd, kolmogorov_distance(&d, 1, 0, c).unwrap());
            let cd = compression_distance(&d, 0, 1, c).unwrap();
            prop_assert_eq!(cd, compression_distance(&d, 1, 0, c).unwrap());
            for s in [ld, kd, cd] {
                prop_assert!((0.0..=1.0).contains(&s));
            }
            if shared == 0 {
                prop_assert_eq!((ld, kd, cd), (0.0, 0.0, 0.0));
            } else {
                prop_assert!(kd > 0.0);
            }
        }

        #[test]
        fn linear_decreases_under_offset(
            base in prop::collection::vec(1u32..=3, 1..8),
            offset in 1u32..=2,
        ) {
            let a = base.iter().enumerate().map(|(j, &r)| RawRating::new("a", format!("o{j}"), r, 0));
            let same = base.iter().enumerate().map(|(j, &r)| RawRating::new("b", format!("o{j}"), r, 0));
            let shifted = base.iter().enumerate().map(|(j, &r)| RawRating::new("b", format!("o{j}"), r + offset, 0));
            let d0 = RatingDataset::from_records(RatingScale::default(), a.clone().chain(same)).unwrap();
            let d1 = RatingDataset::from_records(RatingScale::default(), a.chain(shifted)).unwrap();
            prop_assert!(linear_distance(&d1, 0, 1, 3) < linear_distance(&d0, 0, 1, 3));
        }
    }
}
