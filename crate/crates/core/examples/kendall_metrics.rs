//! Kendall tau with and without ties, and the metrics built on it.
//!
//! Usage: `cargo run --example kendall_metrics`

use clusterrank::attacks::{random_spam, AttackKind, AttackSpec};
use clusterrank::metrics::{effectiveness, kendall_tau, kendall_tau_with, robustness, TieHandling};
use clusterrank::ranker::{run_fixed_point, RankerConfig};
use clusterrank::scores_by_id;
use clusterrank::synthetic::PlantedModes;

fn main() -> clusterrank::Result<()> {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0];
    println!("identical      {:+.3}", kendall_tau(&x, &x)?);
    println!("reversed       {:+.3}", kendall_tau(&x, &[5.0, 4.0, 3.0, 2.0, 1.0])?);
    println!("one swap       {:+.3}", kendall_tau(&x, &[2.0, 1.0, 3.0, 4.0, 5.0])?);

    let tied = [1.0, 1.0, 2.0, 3.0, 3.0];
    for ties in [TieHandling::Exclude, TieHandling::TauB] {
        println!(
            "{:<15}{:+.3}",
            format!("ties {ties:?}"),
            kendall_tau_with(&tied, &x, ties)?
        );
    }
    match kendall_tau(&[1.0, 1.0], &[1.0, 2.0]) {
        Ok(t) => println!("all tied       {t}"),
        Err(e) => println!("all tied       {e}"),
    }

    let d = PlantedModes::default().generate()?;
    let cfg = RankerConfig::bwa(0.3);
    let clean = scores_by_id(d.items(), &run_fixed_point(&d, &cfg)?.state.rankings);
    println!("\neffectiveness of BWA vs the mean: {:.4}", effectiveness(&clean, &d)?);
    for f in [0.1, 0.25, 0.5] {
        let att = random_spam(&d, &AttackSpec::new(AttackKind::RandomSpam, f, 7))?;
        let dirty = scores_by_id(
            att.dataset.items(),
            &run_fixed_point(&att.dataset, &cfg)?.state.rankings,
        );
        println!("robustness at {f:.2} spam: {:.4}", robustness(&clean, &dirty)?);
    }
    Ok(())
}
