//! Splits users into communities at several thresholds and compares the
//! displayed ranking with the single bipartite ranking.
//!
//! Usage: `cargo run --example cluster_ranking [ld|kd|cd]`

use clusterrank::clustering::rank_multipartite;
use clusterrank::metrics::{cluster_effectiveness, generalized_tau, kendall_tau_scores};
use clusterrank::ranker::{run_fixed_point, RankerConfig};
use clusterrank::scores_by_id;
use clusterrank::similarity::{Measure, SimilarityConfig};
use clusterrank::synthetic::{Lean, PlantedModes};

fn main() -> clusterrank::Result<()> {
    let measure: Measure = std::env::args().nth(1).as_deref().unwrap_or("ld").parse()?;
    let gen = PlantedModes {
        users: 200,
        items: 40,
        majority_share: 0.6,
        controversial_share: 1.0,
        lean: Lean::Top,
        concentration: 4.0,
        noise: 0.0,
        ..Default::default()
    };
    let (d, truth) = gen.generate_with_truth()?;
    let cfg = RankerConfig::bwa(0.3);
    let bipartite = run_fixed_point(&d, &cfg)?;
    let flat = scores_by_id(d.items(), &bipartite.state.rankings);
    let sim = SimilarityConfig::new(measure);

    println!(
        "{} users, {} items, {} ratings; measure {}",
        d.num_users(),
        d.num_items(),
        d.num_ratings(),
        measure.label()
    );
    println!(
        "{:>6}{:>10}{:>10}{:>12}{:>10}",
        "alpha", "clusters", "largest", "tau vs flat", "gen. tau"
    );
    for alpha in [0.0, 0.5, 0.7, 0.8, 0.9, 0.95] {
        let out = rank_multipartite(&d, &sim, alpha, &cfg, 1)?;
        let largest = out.partition.sizes().into_iter().max().unwrap_or(0);
        let tau = kendall_tau_scores(&out.result.displayed, &flat)?;
        let gtau = generalized_tau(&cluster_effectiveness(&d, &out.partition, &out.result))
            .map_or("NA".into(), |t| format!("{t:.3}"));
        println!(
            "{alpha:>6.2}{:>10}{largest:>10}{tau:>12.3}{gtau:>10}",
            out.partition.len()
        );
    }

    // a controversial item: each group sees its own reference in its cluster
    let out = rank_multipartite(&d, &sim, 0.9, &cfg, 1)?;
    let (item, q0, q1) = truth.references.iter().find(|(_, a, b)| (a - b).abs() > 2.0).unwrap();
    println!("\n{item}: group references {q0:.2} / {q1:.2}");
    for run in out.result.per_cluster.iter().filter(|r| r.size >= 10) {
        if let Some(r) = run.rankings.get(item) {
            println!("  cluster {} ({} users) ranks it {r:.3}", run.cluster, run.size);
        }
    }
    println!(
        "  displayed {:.3}, bipartite {:.3}",
        out.result.displayed[item], flat[item]
    );
    Ok(())
}
