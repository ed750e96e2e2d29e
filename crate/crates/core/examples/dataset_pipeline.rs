//! Loads a ratings CSV, applies a k-core filter and prints the counts.
//! Without arguments a synthetic file is written to a temporary path first.
//!
//! Usage: `cargo run --example dataset_pipeline [ratings.csv] [k]`

use clusterrank::dataset::{dataset_stats, k_core_filter, load_ratings, CoreMode, RatingScale};
use clusterrank::synthetic::PlantedModes;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = match args.next() {
        Some(p) => p.into(),
        None => {
            let p = std::env::temp_dir().join("clusterrank_pipeline.csv");
            let d = PlantedModes::default().generate()?;
            d.write_csv(std::fs::File::create(&p)?)?;
            p
        }
    };
    let k: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);

    let d = load_ratings(&path, RatingScale::default())?;
    println!("{}", path.display());
    for (label, data) in [
        ("raw".to_string(), d.clone()),
        (format!("{k}-core"), k_core_filter(&d, k, CoreMode::BothSides)),
        (format!("{k}-core users"), k_core_filter(&d, k, CoreMode::UsersOnly)),
    ] {
        let s = dataset_stats(&data);
        println!(
            "{label:<14} users {:>6}  items {:>6}  ratings {:>8}",
            s.users, s.items, s.ratings
        );
    }

    let s = dataset_stats(&d);
    println!("\nratings per item (count: items)");
    for (count, items) in s.histogram().into_iter().take(12) {
        println!("{count:>5}: {}", "#".repeat(items.min(60)));
    }
    Ok(())
}
