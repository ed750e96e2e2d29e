//! Reputation attack: attackers first copy the displayed rankings of popular
//! items to earn reputation, then nuke the most-voted item. Each method is
//! attacked with its own displayed rankings.
//!
//! Usage: `cargo run --release --example reputation_attack [fillers]`

use clusterrank::attacks::{AttackKind, AttackSpec};
use clusterrank::experiment::{evaluate_attacks, ExperimentConfig, Method};
use clusterrank::similarity::Measure;
use clusterrank::synthetic::PlantedModes;

fn main() -> clusterrank::Result<()> {
    let fillers: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(9);
    let d = PlantedModes::default().generate()?;
    let cfg = ExperimentConfig {
        attack: Some(AttackSpec {
            filler_count: fillers,
            ..AttackSpec::new(AttackKind::ReputationAttack, 0.0, 0)
        }),
        sweep: Some(vec![0.1, 0.25, 0.5]),
        methods: vec![Method::Average, Method::Bwa, Method::Clustered(Measure::Linear)],
        ..Default::default()
    };
    let rows = evaluate_attacks(&cfg, &d)?;

    println!("{fillers} fillers; target {}", rows[0].target.as_deref().unwrap_or("?"));
    println!(
        "{:<6}{:>9}{:>10}{:>10}{:>10}{:>12}",
        "method", "fraction", "attackers", "clean", "attacked", "robustness"
    );
    for r in &rows {
        println!(
            "{:<6}{:>9}{:>10}{:>10.4}{:>10.4}{:>12.4}",
            r.method.label(),
            r.fraction,
            r.attackers,
            r.target_clean.unwrap_or(f64::NAN),
            r.target_attacked.unwrap_or(f64::NAN),
            r.robustness.unwrap_or(f64::NAN),
        );
    }
    Ok(())
}
