//! Rating datasets: ingestion, normalization and core filtering.
//!
//! Input files are line-oriented `user,item,rating,timestamp` records with no
//! header. Raw integer ratings on `[r_min, r_max]` are normalized by dividing
//! by `r_max`, so every stored value lies in `]0, 1]`.
//!
//! User and item identifiers are kept sorted (byte-wise string order); their
//! position in that order is the index used by every vector in the crate.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::io::{Read, Write};
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bounds of the raw integer rating grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScaleRepr", into = "ScaleRepr")]
pub struct RatingScale {
    r_min: u32,
    r_max: u32,
}

#[derive(Serialize, Deserialize)]
struct ScaleRepr {
    r_min: u32,
    r_max: u32,
}

impl TryFrom<ScaleRepr> for RatingScale {
    type Error = Error;
    fn try_from(r: ScaleRepr) -> Result<Self> {
        RatingScale::new(r.r_min, r.r_max)
    }
}

impl From<RatingScale> for ScaleRepr {
    fn from(s: RatingScale) -> Self {
        ScaleRepr {
            r_min: s.r_min,
            r_max: s.r_max,
        }
    }
}

impl Default for RatingScale {
    /// The 1..=5 star scale.
    fn default() -> Self {
        RatingScale { r_min: 1, r_max: 5 }
    }
}

impl RatingScale {
    pub fn new(r_min: u32, r_max: u32) -> Result<Self> {
        if r_min == 0 || r_min >= r_max {
            return Err(Error::config(format!(
                "rating scale requires 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        Ok(RatingScale { r_min, r_max })
    }

    pub fn r_min(&self) -> u32 {
        self.r_min
    }

    pub fn r_max(&self) -> u32 {
        self.r_max
    }

    /// Width of the normalized range, `(r_max - r_min) / r_max`.
    pub fn delta_norm(&self) -> f64 {
        f64::from(self.r_max - self.r_min) / f64::from(self.r_max)
    }

    pub fn contains(&self, raw: u32) -> bool {
        (self.r_min..=self.r_max).contains(&raw)
    }

    pub fn normalize(&self, raw: u32) -> f64 {
        f64::from(raw) / f64::from(self.r_max)
    }

    /// Normalized lowest rating.
    pub fn floor(&self) -> f64 {
        self.normalize(self.r_min)
    }

    /// Allowed raw ratings in ascending order.
    pub fn raw_grid(&self) -> impl Iterator<Item = u32> {
        self.r_min..=self.r_max
    }

    /// Raw rating whose normalized value is closest to `x`; ties go to the
    /// lower rating.
    pub fn nearest_raw(&self, x: f64) -> u32 {
        let mut best = self.r_min;
        let mut best_dist = f64::INFINITY;
        for raw in self.raw_grid() {
            let dist = (self.normalize(raw) - x).abs();
            // Strict comparison keeps the lower grid point on ties. The
            // tolerance absorbs rounding in values that sit on a midpoint.
            if dist < best_dist - 1e-12 {
                best = raw;
                best_dist = dist;
            }
        }
        best
    }
}

/// One record as it appears in a ratings file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRating {
    pub user: String,
    pub item: String,
    pub rating: u32,
    pub timestamp: i64,
}

impl RawRating {
    pub fn new(user: impl Into<String>, item: impl Into<String>, rating: u32, timestamp: i64) -> Self {
        RawRating {
            user: user.into(),
            item: item.into(),
            rating,
            timestamp,
        }
    }
}

/// A stored rating, referring to users and items by index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rating {
    pub user: usize,
    pub item: usize,
    pub raw: u32,
    /// Normalized rating in `]0, 1]`.
    pub value: f64,
    pub timestamp: i64,
}

/// Immutable sparse user x item rating set.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingDataset {
    scale: RatingScale,
    users: Vec<String>,
    items: Vec<String>,
    // sorted by (user, item)
    ratings: Vec<Rating>,
    user_offsets: Vec<usize>,
    // rating indices per item, ascending by user
    by_item: Vec<Vec<usize>>,
}

impl RatingDataset {
    pub fn empty(scale: RatingScale) -> Self {
        RatingDataset {
            scale,
            users: Vec::new(),
            items: Vec::new(),
            ratings: Vec::new(),
            user_offsets: vec![0],
            by_item: Vec::new(),
        }
    }

    /// Builds a dataset from raw records. Duplicate `(user, item)` pairs keep
    /// the record with the latest timestamp (the later record on equal
    /// timestamps).
    pub fn from_records<I>(scale: RatingScale, records: I) -> Result<Self>
    where
        I: IntoIterator<Item = RawRating>,
    {
        Self::from_parts(
            scale,
            std::iter::empty::<String>(),
            std::iter::empty::<String>(),
            records,
        )
    }

    /// Like [`RatingDataset::from_records`], but also registers users and
    /// items that may carry no rating at all.
    pub fn from_parts<U, O, I>(scale: RatingScale, users: U, items: O, records: I) -> Result<Self>
    where
        U: IntoIterator<Item = String>,
        O: IntoIterator<Item = String>,
        I: IntoIterator<Item = RawRating>,
    {
        let mut user_ids = Interner::default();
        let mut item_ids = Interner::default();
        users.into_iter().for_each(|u| {
            user_ids.intern(u);
        });
        items.into_iter().for_each(|o| {
            item_ids.intern(o);
        });
        // (user, item, timestamp, position, raw); the last entry of each
        // (user, item) run after sorting is the one to keep
        let mut rows: Vec<(usize, usize, i64, usize, u32)> = Vec::new();
        for (n, rec) in records.into_iter().enumerate() {
            if !scale.contains(rec.rating) {
                return Err(Error::RatingOutOfRange {
                    line: n as u64 + 1,
                    rating: i64::from(rec.rating),
                    min: scale.r_min,
                    max: scale.r_max,
                });
            }
            let u = user_ids.intern(rec.user);
            let o = item_ids.intern(rec.item);
            rows.push((u, o, rec.timestamp, n, rec.rating));
        }
        let (users, user_rank) = user_ids.into_sorted();
        let (items, item_rank) = item_ids.into_sorted();
        for row in &mut rows {
            row.0 = user_rank[row.0];
            row.1 = item_rank[row.1];
        }
        rows.sort_unstable();
        let mut ratings: Vec<Rating> = Vec::with_capacity(rows.len());
        for (k, &(user, item, timestamp, _, raw)) in rows.iter().enumerate() {
            if rows.get(k + 1).is_some_and(|next| next.0 == user && next.1 == item) {
                continue;
            }
            ratings.push(Rating {
                user,
                item,
                raw,
                value: scale.normalize(raw),
                timestamp,
            });
        }
        Ok(Self::assemble(scale, users, items, ratings))
    }
}

/// Assigns dense indices to ids in first-seen order.
#[derive(Default)]
struct Interner {
    index: HashMap<String, usize>,
    ids: Vec<String>,
}

impl Interner {
    fn intern(&mut self, id: String) -> usize {
        if let Some(&i) = self.index.get(&id) {
            return i;
        }
        let i = self.ids.len();
        self.index.insert(id.clone(), i);
        self.ids.push(id);
        i
    }

    /// Sorted ids and, for each first-seen index, its sorted position.
    fn into_sorted(self) -> (Vec<String>, Vec<usize>) {
        let mut order: Vec<usize> = (0..self.ids.len()).collect();
        order.sort_unstable_by(|&a, &b| self.ids[a].cmp(&self.ids[b]));
        let mut rank = vec![0; order.len()];
        for (pos, &i) in order.iter().enumerate() {
            rank[i] = pos;
        }
        let mut ids = self.ids;
        let sorted = order.iter().map(|&i| std::mem::take(&mut ids[i])).collect();
        (sorted, rank)
    }
}

impl RatingDataset {
    fn assemble(scale: RatingScale, users: Vec<String>, items: Vec<String>, ratings: Vec<Rating>) -> Self {
        let mut user_offsets = vec![0; users.len() + 1];
        for r in &ratings {
            user_offsets[r.user + 1] += 1;
        }
        for i in 0..users.len() {
            user_offsets[i + 1] += user_offsets[i];
        }
        let mut by_item = vec![Vec::new(); items.len()];
        for (k, r) in ratings.iter().enumerate() {
            by_item[r.item].push(k);
        }
        RatingDataset {
            scale,
            users,
            items,
            ratings,
            user_offsets,
            by_item,
        }
    }

    pub fn scale(&self) -> RatingScale {
        self.scale
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn ratings(&self) -> &[Rating] {
        &self.ratings
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn num_ratings(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    pub fn user_index(&self, id: &str) -> Option<usize> {
        self.users.binary_search_by(|u| u.as_str().cmp(id)).ok()
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.items.binary_search_by(|o| o.as_str().cmp(id)).ok()
    }

    fn user_range(&self, user: usize) -> Range<usize> {
        self.user_offsets[user]..self.user_offsets[user + 1]
    }

    /// Ratings given by `user`, ascending by item.
    pub fn user_ratings(&self, user: usize) -> &[Rating] {
        &self.ratings[self.user_range(user)]
    }

    /// Ratings received by `item`, ascending by user.
    pub fn item_ratings(&self, item: usize) -> impl ExactSizeIterator<Item = &Rating> + '_ {
        self.by_item[item].iter().map(move |&k| &self.ratings[k])
    }

    pub fn item_degree(&self, item: usize) -> usize {
        self.by_item[item].len()
    }

    pub fn user_degree(&self, user: usize) -> usize {
        self.user_range(user).len()
    }

    pub fn to_records(&self) -> Vec<RawRating> {
        self.ratings
            .iter()
            .map(|r| RawRating {
                user: self.users[r.user].clone(),
                item: self.items[r.item].clone(),
                rating: r.raw,
                timestamp: r.timestamp,
            })
            .collect()
    }

    /// Returns a copy extended by `extra` records. Existing `(user, item)`
    /// pairs follow the usual latest-timestamp rule.
    pub fn with_records(&self, extra: impl IntoIterator<Item = RawRating>) -> Result<Self> {
        let mut records = self.to_records();
        records.extend(extra);
        Self::from_parts(
            self.scale,
            self.users.iter().cloned(),
            self.items.iter().cloned(),
            records,
        )
    }

    /// Sub-dataset induced by a set of user indices: those users and every
    /// item at least one of them rated.
    pub fn restrict_users(&self, members: &[usize]) -> Self {
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        let mut item_map = vec![usize::MAX; self.items.len()];
        for &u in &members {
            for r in self.user_ratings(u) {
                item_map[r.item] = 0;
            }
        }
        let mut items = Vec::new();
        for (j, slot) in item_map.iter_mut().enumerate() {
            if *slot == 0 {
                *slot = items.len();
                items.push(self.items[j].clone());
            }
        }
        let mut ratings = Vec::new();
        let mut users = Vec::with_capacity(members.len());
        for (new_u, &u) in members.iter().enumerate() {
            users.push(self.users[u].clone());
            for r in self.user_ratings(u) {
                ratings.push(Rating {
                    user: new_u,
                    item: item_map[r.item],
                    ..*r
                });
            }
        }
        Self::assemble(self.scale, users, items, ratings)
    }

    /// Writes the dataset in the input format, one record per line.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        for r in &self.ratings {
            w.write_record([
                self.users[r.user].as_str(),
                self.items[r.item].as_str(),
                &r.raw.to_string(),
                &r.timestamp.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

/// Parses `user,item,rating,timestamp` lines. LF and CRLF line endings are
/// accepted, blank lines are skipped.
pub fn parse_ratings<R: Read>(source: R, scale: RatingScale) -> Result<RatingDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse {
                line,
                msg: e.to_string(),
            }
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 4 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 4 fields, found {}", row.len()),
            });
        }
        let parse_int = |field: &str, what: &str| -> Result<i64> {
            field.parse::<i64>().map_err(|_| Error::Parse {
                line,
                msg: format!("{what} {field:?} is not an integer"),
            })
        };
        if row[0].is_empty() || row[1].is_empty() {
            return Err(Error::Parse {
                line,
                msg: "empty user or item identifier".into(),
            });
        }
        let rating = parse_int(&row[2], "rating")?;
        let timestamp = parse_int(&row[3], "timestamp")?;
        if rating < i64::from(scale.r_min) || rating > i64::from(scale.r_max) {
            return Err(Error::RatingOutOfRange {
                line,
                rating,
                min: scale.r_min,
                max: scale.r_max,
            });
        }
        records.push(RawRating::new(&row[0], &row[1], rating as u32, timestamp));
    }
    RatingDataset::from_records(scale, records)
}

pub fn load_ratings(path: &Path, scale: RatingScale) -> Result<RatingDataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_ratings(std::io::BufReader::new(file), scale)
}

/// Which side of the bipartite graph the core condition applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoreMode {
    #[default]
    BothSides,
    UsersOnly,
}

/// Peels users (and, in [`CoreMode::BothSides`], items) with fewer than `k`
/// ratings until nothing changes. Users and items left without ratings are
/// dropped.
pub fn k_core_filter(d: &RatingDataset, k: usize, mode: CoreMode) -> RatingDataset {
    let k = k.max(1);
    let mut user_deg: Vec<usize> = (0..d.num_users()).map(|u| d.user_degree(u)).collect();
    let mut item_deg: Vec<usize> = (0..d.num_items()).map(|j| d.item_degree(j)).collect();
    let mut user_alive = vec![true; d.num_users()];
    let mut item_alive = vec![true; d.num_items()];
    let mut alive = vec![true; d.num_ratings()];

    // (is_user, index)
    let mut queue: VecDeque<(bool, usize)> = VecDeque::new();
    for (u, &deg) in user_deg.iter().enumerate() {
        if deg < k {
            queue.push_back((true, u));
        }
    }
    if mode == CoreMode::BothSides {
        for (j, &deg) in item_deg.iter().enumerate() {
            if deg < k {
                queue.push_back((false, j));
            }
        }
    }
    while let Some((is_user, idx)) = queue.pop_front() {
        if is_user {
            if !user_alive[idx] {
                continue;
            }
            user_alive[idx] = false;
            for pos in d.user_range(idx) {
                if !alive[pos] {
                    continue;
                }
                alive[pos] = false;
                let j = d.ratings[pos].item;
                item_deg[j] -= 1;
                if mode == CoreMode::BothSides && item_alive[j] && item_deg[j] < k {
                    queue.push_back((false, j));
                }
            }
        } else {
            if !item_alive[idx] {
                continue;
            }
            item_alive[idx] = false;
            for &pos in &d.by_item[idx] {
                if !alive[pos] {
                    continue;
                }
                alive[pos] = false;
                let u = d.ratings[pos].user;
                user_deg[u] -= 1;
                if user_alive[u] && user_deg[u] < k {
                    queue.push_back((true, u));
                }
            }
        }
    }

    let kept: Vec<RawRating> = d
        .ratings
        .iter()
        .zip(&alive)
        .filter(|(_, &a)| a)
        .map(|(r, _)| RawRating {
            user: d.users[r.user].clone(),
            item: d.items[r.item].clone(),
            rating: r.raw,
            timestamp: r.timestamp,
        })
        .collect();
    RatingDataset::from_records(d.scale, kept).expect("ratings were already validated")
}

/// Size summary of a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub users: usize,
    pub items: usize,
    pub ratings: usize,
    /// Rating count per item id.
    pub ratings_per_item: BTreeMap<String, usize>,
}

impl DatasetStats {
    /// Number of items per rating count.
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for &c in self.ratings_per_item.values() {
            *h.entry(c).or_insert(0) += 1;
        }
        h
    }
}

pub fn dataset_stats(d: &RatingDataset) -> DatasetStats {
    DatasetStats {
        users: d.num_users(),
        items: d.num_items(),
        ratings: d.num_ratings(),
        ratings_per_item: d
            .items
            .iter()
            .enumerate()
            .map(|(j, id)| (id.clone(), d.item_degree(j)))
            .collect(),
    }
}
