//! Similarity graph, user communities and per-community ranking.
//!
//! Users are linked when their similarity is strictly above `alpha`; the
//! connected components of that graph are ranked independently, and an
//! item's displayed ranking is the size-weighted average of its rankings in
//! the communities that rated it.

use std::io::Write;

use log::warn;
use rayon::prelude::*;

use crate::dataset::RatingDataset;
use crate::error::{Error, Result};
use crate::ranker::{run_fixed_point, RankerConfig};
use crate::similarity::{linear_from_sums, Measure, ProfileCache, SimilarityConfig};
use crate::{scores_by_id, Scores};

/// Similarity of every user pair sharing at least one item, `u < v`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSimilarities {
    num_users: usize,
    pairs: Vec<(usize, usize, f64)>,
}

impl PairSimilarities {
    pub fn pairs(&self) -> &[(usize, usize, f64)] {
        &self.pairs
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    /// Keeps the pairs whose similarity is strictly above `alpha`.
    pub fn threshold(&self, alpha: f64) -> SimilarityGraph {
        let mut adjacency = vec![Vec::new(); self.num_users];
        for &(u, v, s) in &self.pairs {
            if s > alpha {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        SimilarityGraph { adjacency, alpha }
    }
}

/// Computes the similarity of every pair of users with a common item.
///
/// Candidate pairs come from an item-to-raters index, so users with disjoint
/// histories are never compared.
pub fn pairwise_similarities(d: &RatingDataset, cfg: &SimilarityConfig) -> Result<PairSimilarities> {
    cfg.validate()?;
    let cache = match cfg.measure {
        Measure::Linear => None,
        Measure::Kolmogorov | Measure::Compression => Some(ProfileCache::new(d, cfg.compressor)?),
    };
    let delta = d.scale().delta_norm();
    let n = d.num_users();
    let per_user: Vec<Vec<(usize, usize, f64)>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0usize; n], vec![0.0f64; n], Vec::new()),
            |(count, gap, touched), u| -> Result<Vec<(usize, usize, f64)>> {
                for r in d.user_ratings(u) {
                    for other in d.item_ratings(r.item) {
                        if other.user <= u {
                            continue;
                        }
                        if count[other.user] == 0 {
                            touched.push(other.user);
                        }
                        count[other.user] += 1;
                        gap[other.user] += (r.value - other.value).abs();
                    }
                }
                touched.sort_unstable();
                let mut out = Vec::with_capacity(touched.len());
                for &v in touched.iter() {
                    let s = match (cfg.measure, &cache) {
                        (Measure::Linear, _) => linear_from_sums(count[v], gap[v], delta, cfg.theta),
                        (Measure::Kolmogorov, Some(c)) => c.kolmogorov(u, v),
                        (Measure::Compression, Some(c)) => c.compression(u, v)?,
                        _ => unreachable!("profile cache exists for compression measures"),
                    };
                    out.push((u, v, s));
                    count[v] = 0;
                    gap[v] = 0.0;
                }
                touched.clear();
                Ok(out)
            },
        )
        .collect::<Result<_>>()?;
    Ok(PairSimilarities {
        num_users: n,
        pairs: per_user.into_iter().flatten().collect(),
    })
}

/// Undirected user graph with an edge wherever similarity exceeds `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    adjacency: Vec<Vec<usize>>,
    alpha: f64,
}

impl SimilarityGraph {
    /// Builds a graph from explicit edges; self-loops are dropped.
    pub fn from_edges(num_users: usize, edges: impl IntoIterator<Item = (usize, usize)>, alpha: f64) -> Self {
        let mut adjacency = vec![Vec::new(); num_users];
        for (u, v) in edges {
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        SimilarityGraph { adjacency, alpha }
    }

    pub fn num_users(&self) -> usize {
        self.adjacency.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }
}

pub fn build_similarity_graph(d: &RatingDataset, cfg: &SimilarityConfig, alpha: f64) -> Result<SimilarityGraph> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::config(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(pairwise_similarities(d, cfg)?.threshold(alpha))
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Users split into disjoint communities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPartition {
    // each sorted ascending; ordered by smallest member
    components: Vec<Vec<usize>>,
    assignment: Vec<usize>,
}

impl ClusterPartition {
    /// Normalizes arbitrary disjoint, covering groups into canonical order.
    pub fn from_components(num_users: usize, mut components: Vec<Vec<usize>>) -> Result<Self> {
        let mut assignment = vec![usize::MAX; num_users];
        components.retain(|c| !c.is_empty());
        for c in &mut components {
            c.sort_unstable();
        }
        components.sort_unstable_by_key(|c| c[0]);
        for (k, c) in components.iter().enumerate() {
            for &u in c {
                if u >= num_users || assignment[u] != usize::MAX {
                    return Err(Error::Domain(format!("user {u} is out of range or assigned twice")));
                }
                assignment[u] = k;
            }
        }
        if assignment.contains(&usize::MAX) {
            return Err(Error::Domain("components do not cover every user".into()));
        }
        Ok(ClusterPartition { components, assignment })
    }

    /// Everybody in one community.
    pub fn single(num_users: usize) -> Self {
        let components = if num_users == 0 {
            vec![]
        } else {
            vec![(0..num_users).collect()]
        };
        ClusterPartition {
            components,
            assignment: vec![0; num_users],
        }
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    pub fn cluster_of(&self, user: usize) -> usize {
        self.assignment[user]
    }

    /// Index of the biggest community (lowest index on ties).
    pub fn largest(&self) -> Option<usize> {
        (0..self.components.len())
            .rev()
            .max_by_key(|&k| self.components[k].len())
    }

    /// True when every community of `self` lies inside a community of
    /// `coarser`.
    pub fn refines(&self, coarser: &ClusterPartition) -> bool {
        self.assignment.len() == coarser.assignment.len()
            && self
                .components
                .iter()
                .all(|c| c.iter().all(|&u| coarser.assignment[u] == coarser.assignment[c[0]]))
    }

    /// Writes `user_id,cluster_id` rows with a header, ordered by user.
    pub fn write_csv<W: Write>(&self, d: &RatingDataset, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["user_id", "cluster_id"])?;
        for (u, &k) in self.assignment.iter().enumerate() {
            w.write_record([d.users()[u].as_str(), &k.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

/// Maximal connected components; isolated users become singletons.
pub fn connected_components(g: &SimilarityGraph) -> ClusterPartition {
    let n = g.num_users();
    let mut sets = DisjointSets::new(n);
    for (u, v) in g.edges() {
        sets.union(u, v);
    }
    // Scanning users in ascending order makes each component's first member
    // its smallest, which fixes the component order.
    let mut root_slot = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    let assignment: Vec<usize> = (0..n)
        .map(|u| {
            let root = sets.find(u);
            if root_slot[root] == usize::MAX {
                root_slot[root] = components.len();
                components.push(Vec::new());
            }
            let k = root_slot[root];
            components[k].push(u);
            k
        })
        .collect();
    ClusterPartition { components, assignment }
}

/// Ranking run over one community's induced sub-dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterRun {
    /// Index into the partition's components.
    pub cluster: usize,
    /// Number of users in the community.
    pub size: usize,
    pub rankings: Scores,
    pub reputations: Scores,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterRankResult {
    pub per_cluster: Vec<ClusterRun>,
    /// Size-weighted average over the communities that rated each item.
    pub displayed: Scores,
}

impl ClusterRankResult {
    pub fn converged(&self) -> bool {
        self.per_cluster.iter().all(|c| c.converged)
    }

    pub fn max_iterations(&self) -> usize {
        self.per_cluster.iter().map(|c| c.iterations).max().unwrap_or(0)
    }

    pub fn run_for(&self, cluster: usize) -> Option<&ClusterRun> {
        self.per_cluster.iter().find(|c| c.cluster == cluster)
    }

    /// All user reputations; each user appears in exactly one community.
    pub fn reputations(&self) -> Scores {
        self.per_cluster.iter().flat_map(|c| c.reputations.clone()).collect()
    }
}

/// Displayed ranking of `item`: `sum(|M| r^M) / sum(|M|)` over the runs
/// whose community rated it.
pub fn aggregate_displayed(per_cluster: &[ClusterRun], item: &str) -> Option<f64> {
    let (mut num, mut den) = (0.0, 0usize);
    for run in per_cluster {
        if let Some(&r) = run.rankings.get(item) {
            num += run.size as f64 * r;
            den += run.size;
        }
    }
    (den > 0).then(|| num / den as f64)
}

pub fn displayed_rankings(per_cluster: &[ClusterRun]) -> Scores {
    let mut acc: std::collections::BTreeMap<&str, (f64, usize)> = Default::default();
    for run in per_cluster {
        for (item, &r) in &run.rankings {
            let e = acc.entry(item.as_str()).or_insert((0.0, 0));
            e.0 += run.size as f64 * r;
            e.1 += run.size;
        }
    }
    acc.into_iter()
        .map(|(k, (num, den))| (k.to_string(), num / den as f64))
        .collect()
}

/// Ranks every community separately and aggregates the displayed ranking.
pub fn cluster_rank(d: &RatingDataset, partition: &ClusterPartition, cfg: &RankerConfig) -> Result<ClusterRankResult> {
    cluster_rank_filtered(d, partition, cfg, 1)
}

/// [`cluster_rank`] restricted to communities with at least
/// `min_cluster_size` users.
pub fn cluster_rank_filtered(
    d: &RatingDataset,
    partition: &ClusterPartition,
    cfg: &RankerConfig,
    min_cluster_size: usize,
) -> Result<ClusterRankResult> {
    cfg.validate(d.scale().delta_norm())?;
    let runs: Vec<Option<ClusterRun>> = partition
        .components()
        .par_iter()
        .enumerate()
        .map(|(k, members)| -> Result<Option<ClusterRun>> {
            if members.len() < min_cluster_size {
                return Ok(None);
            }
            let sub = d.restrict_users(members);
            if sub.is_empty() {
                warn!("cluster {k} has no ratings; skipped");
                return Ok(None);
            }
            let out = run_fixed_point(&sub, cfg)?;
            Ok(Some(ClusterRun {
                cluster: k,
                size: members.len(),
                rankings: scores_by_id(sub.items(), &out.state.rankings),
                reputations: scores_by_id(sub.users(), &out.state.reputations),
                iterations: out.iterations,
                converged: out.converged,
            }))
        })
        .collect::<Result<_>>()?;
    let per_cluster: Vec<ClusterRun> = runs.into_iter().flatten().collect();
    let displayed = displayed_rankings(&per_cluster);
    Ok(ClusterRankResult { per_cluster, displayed })
}

/// Similarity graph, communities and their rankings in one call.
#[derive(Debug, Clone)]
pub struct MultipartiteOutcome {
    pub graph: SimilarityGraph,
    pub partition: ClusterPartition,
    pub result: ClusterRankResult,
}

pub fn rank_multipartite(
    d: &RatingDataset,
    sim: &SimilarityConfig,
    alpha: f64,
    cfg: &RankerConfig,
    min_cluster_size: usize,
) -> Result<MultipartiteOutcome> {
    let graph = build_similarity_graph(d, sim, alpha)?;
    let partition = connected_components(&graph);
    let result = cluster_rank_filtered(d, &partition, cfg, min_cluster_size)?;
    Ok(MultipartiteOutcome {
        graph,
        partition,
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{RatingScale, RawRating};
    use crate::ranker::run_fixed_point;

    fn ds(recs: &[(&str, &str, u32)]) -> RatingDataset {
        RatingDataset::from_records(
            RatingScale::default(),
            recs.iter().map(|&(u, o, r)| RawRating::new(u, o, r, 0)),
        )
        .unwrap()
    }

    fn twins() -> RatingDataset {
        ds(&[
            ("a", "o1", 5),
            ("a", "o2", 4),
            ("a", "o3", 3),
            ("a", "o4", 2),
            ("b", "o1", 5),
            ("b", "o2", 4),
            ("b", "o3", 3),
            ("b", "o4", 2),
            ("c", "o1", 1),
        ])
    }

    #[test]
    fn threshold_is_strict() {
        let d = twins();
        let sim = SimilarityConfig::default();
        let g = build_similarity_graph(&d, &sim, 0.8).unwrap();
        assert!(g.has_edge(0, 1));
        assert_eq!(g.num_edges(), 1);
        let g = build_similarity_graph(&d, &sim, 1.0).unwrap();
        assert_eq!(g.num_edges(), 0);
        assert!(build_similarity_graph(&d, &sim, 1.5).is_err());
    }

    #[test]
    fn pair_similarities_match_direct_measures() {
        let d = ds(&[
            ("a", "o1", 5),
            ("a", "o2", 4),
            ("b", "o1", 2),
            ("b", "o2", 4),
            ("b", "o3", 1),
            ("c", "o3", 3),
            ("d", "o9", 3),
        ]);
        for measure in [Measure::Linear, Measure::Kolmogorov, Measure::Compression] {
            let cfg = SimilarityConfig::new(measure);
            let pairs = pairwise_similarities(&d, &cfg).unwrap();
            // d shares nothing with anybody
            assert_eq!(pairs.pairs().len(), 2);
            for &(u, v, s) in pairs.pairs() {
                let direct = crate::similarity::similarity(&d, u, v, &cfg).unwrap();
                assert!((s - direct).abs() < 1e-12, "{measure:?} {u} {v}");
            }
        }
    }

    #[test]
    fn components_basic() {
        let g = SimilarityGraph::from_edges(4, [], 0.5);
        assert_eq!(connected_components(&g).len(), 4);
        let g = SimilarityGraph::from_edges(3, [(0, 1), (1, 2)], 0.5);
        let p = connected_components(&g);
        assert_eq!(p.components(), [vec![0, 1, 2]]);
        let g = SimilarityGraph::from_edges(5, [(4, 1), (3, 0)], 0.5);
        let p = connected_components(&g);
        assert_eq!(p.components(), [vec![0, 3], vec![1, 4], vec![2]]);
        assert_eq!(p.largest(), Some(0));
    }

    #[test]
    fn partition_validation() {
        assert!(ClusterPartition::from_components(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(ClusterPartition::from_components(3, vec![vec![0, 1]]).is_err());
        let p = ClusterPartition::from_components(3, vec![vec![2], vec![1, 0]]).unwrap();
        assert_eq!(p.components(), [vec![0, 1], vec![2]]);
        assert!(p.refines(&ClusterPartition::single(3)));
        assert!(!ClusterPartition::single(3).refines(&p));
    }

    #[test]
    fn single_cluster_matches_bipartite() {
        let d = twins();
        let cfg = RankerConfig::default();
        let res = cluster_rank(&d, &ClusterPartition::single(d.num_users()), &cfg).unwrap();
        let bip = run_fixed_point(&d, &cfg).unwrap();
        let expected = scores_by_id(d.items(), &bip.state.rankings);
        assert_eq!(res.displayed.len(), expected.len());
        for (item, r) in &expected {
            assert!((res.displayed[item] - r).abs() < 1e-15, "{item}");
        }
        assert_eq!(res.per_cluster[0].iterations, bip.iterations);
    }

    #[test]
    fn singleton_clusters_echo_own_ratings() {
        let d = ds(&[("a", "o1", 5), ("a", "o2", 2), ("b", "o2", 4)]);
        let parts = ClusterPartition::from_components(2, vec![vec![0], vec![1]]).unwrap();
        let res = cluster_rank(&d, &parts, &RankerConfig::default()).unwrap();
        assert_eq!(res.per_cluster[0].rankings["o1"], 1.0);
        assert!((res.per_cluster[0].rankings["o2"] - 0.4).abs() < 1e-15);
        assert!((res.per_cluster[1].rankings["o2"] - 0.8).abs() < 1e-15);
        // equal sizes: plain mean
        assert!((res.displayed["o2"] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn weighted_displayed_ranking() {
        let run = |size, r: f64| ClusterRun {
            cluster: 0,
            size,
            rankings: Scores::from([("j".to_string(), r)]),
            reputations: Scores::new(),
            iterations: 0,
            converged: true,
        };
        let runs = [run(3, 0.4), run(1, 0.8)];
        assert!((aggregate_displayed(&runs, "j").unwrap() - 0.5).abs() < 1e-15);
        assert!((aggregate_displayed(&runs[..1], "j").unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(aggregate_displayed(&runs, "missing"), None);
        assert!((displayed_rankings(&runs)["j"] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn min_cluster_size_filter() {
        let d = twins();
        let mp = rank_multipartite(&d, &SimilarityConfig::default(), 0.8, &RankerConfig::default(), 2).unwrap();
        assert_eq!(mp.partition.len(), 2);
        assert_eq!(mp.result.per_cluster.len(), 1);
        assert_eq!(mp.result.per_cluster[0].size, 2);
    }

    #[test]
    fn partition_csv() {
        let d = twins();
        let g = build_similarity_graph(&d, &SimilarityConfig::default(), 0.8).unwrap();
        let mut buf = Vec::new();
        connected_components(&g).write_csv(&d, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "user_id,cluster_id\na,0\nb,0\nc,1\n");
    }
}
