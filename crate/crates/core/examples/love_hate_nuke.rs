//! Love/hate attack on the most-voted item: how far each method's ranking
//! of the target moves, and whether the honest majority's cluster notices.
//!
//! Usage: `cargo run --example love_hate_nuke [fraction] [push|nuke]`
//!
//! The synthetic catalogue crowds the bottom of the scale, so pushing the
//! target moves it much further than nuking it.

use clusterrank::attacks::{AttackKind, AttackSpec, Direction};
use clusterrank::dataset::RatingDataset;
use clusterrank::experiment::{evaluate_attacks, ExperimentConfig, Method};
use clusterrank::similarity::Measure;
use clusterrank::synthetic::PlantedModes;

fn main() -> clusterrank::Result<()> {
    let mut args = std::env::args().skip(1);
    let fraction: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let directions = match args.next().as_deref() {
        Some("push") => vec![Direction::Push],
        Some("nuke") => vec![Direction::Nuke],
        _ => vec![Direction::Push, Direction::Nuke],
    };
    let d = PlantedModes::default().generate()?;
    for direction in directions {
        report(&d, fraction, direction)?;
    }
    Ok(())
}

fn report(d: &RatingDataset, fraction: f64, direction: Direction) -> clusterrank::Result<()> {
    let cfg = ExperimentConfig {
        attack: Some(AttackSpec::new(AttackKind::LoveHate, fraction, 0).with_direction(direction)),
        methods: vec![Method::Average, Method::Bwa, Method::Clustered(Measure::Linear)],
        ..Default::default()
    };
    let rows = evaluate_attacks(&cfg, d)?;

    let fmt = |x: Option<f64>| x.map_or("NA".to_string(), |v| format!("{v:.4}"));
    println!(
        "{direction:?} at fraction {fraction}: {} attackers on {}",
        rows[0].attackers,
        rows[0].target.as_deref().unwrap_or("?")
    );
    println!(
        "{:<6}{:>10}{:>10}{:>10}{:>14}{:>14}",
        "method", "clean", "attacked", "shift", "cluster clean", "cluster att."
    );
    for r in &rows {
        let shift = r.target_clean.zip(r.target_attacked).map(|(a, b)| b - a);
        println!(
            "{:<6}{:>10}{:>10}{:>10}{:>14}{:>14}",
            r.method.label(),
            fmt(r.target_clean),
            fmt(r.target_attacked),
            fmt(shift),
            fmt(r.target_cluster_clean),
            fmt(r.target_cluster_attacked),
        );
    }
    println!();
    Ok(())
}
