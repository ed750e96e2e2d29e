//! Robustness of each method under random spam, averaged over seeds.
//!
//! Usage: `cargo run --release --example random_spam_sweep [seeds]`

use clusterrank::attacks::{AttackKind, AttackSpec};
use clusterrank::experiment::{evaluate_attacks, ExperimentConfig, Method};
use clusterrank::synthetic::PlantedModes;

fn main() -> clusterrank::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let fractions = [0.25, 0.5, 0.75];
    let cfg = ExperimentConfig {
        attack: Some(AttackSpec::new(AttackKind::RandomSpam, 0.0, 0)),
        sweep: Some(fractions.to_vec()),
        ..Default::default()
    };

    let mut sums = vec![[0.0; 3]; cfg.methods.len()];
    for seed in 0..seeds {
        let d = PlantedModes::default().with_seed(seed).generate()?;
        let rows = evaluate_attacks(&ExperimentConfig { seed, ..cfg.clone() }, &d)?;
        for row in rows {
            let m = cfg.methods.iter().position(|&m| m == row.method).unwrap();
            let f = fractions.iter().position(|&f| f == row.fraction).unwrap();
            sums[m][f] += row.robustness.unwrap_or(f64::NAN);
        }
    }

    println!("mean robustness over {seeds} seeds");
    println!("{:<6}{:>10}{:>10}{:>10}", "method", "0.25", "0.5", "0.75");
    for (m, row) in cfg.methods.iter().zip(&sums) {
        print!("{:<6}", Method::label(*m));
        for s in row {
            print!("{:>10.4}", s / seeds as f64);
        }
        println!();
    }
    Ok(())
}
