//! Linear, Kolmogorov and compression similarity between a few users of a
//! synthetic dataset with two taste groups.
//!
//! Usage: `cargo run --example similarity_measures`

use clusterrank::similarity::{
    compression_distance, encode_profile, kolmogorov_distance, linear_distance, shared_item_count, Compressor,
};
use clusterrank::synthetic::PlantedModes;

fn main() -> clusterrank::Result<()> {
    let gen = PlantedModes {
        users: 40,
        items: 30,
        controversial_share: 0.5,
        mean_ratings: 20.0,
        ..Default::default()
    };
    let (d, truth) = gen.generate_with_truth()?;
    let group = |u: usize| truth.groups.iter().find(|(id, _)| id == &d.users()[u]).unwrap().1;

    // first two users of each group
    let mut picks: Vec<usize> = (0..d.num_users()).filter(|&u| group(u) == 0).take(2).collect();
    picks.extend((0..d.num_users()).filter(|&u| group(u) == 1).take(2));

    for &u in &picks {
        let p = encode_profile(&d, u)?;
        println!(
            "{} (group {}): {} ratings, profile {} bytes",
            d.users()[u],
            group(u),
            d.user_degree(u),
            p.len()
        );
    }
    println!("\n{:<18}{:>7}{:>8}{:>8}{:>8}", "pair", "shared", "LD", "KD", "CD");
    for (a, &u) in picks.iter().enumerate() {
        for &v in &picks[a + 1..] {
            println!(
                "{:<18}{:>7}{:>8.3}{:>8.3}{:>8.3}",
                format!("{}-{}", d.users()[u], d.users()[v]),
                shared_item_count(&d, u, v),
                linear_distance(&d, u, v, 3),
                kolmogorov_distance(&d, u, v, Compressor::Deflate)?,
                compression_distance(&d, u, v, Compressor::Deflate)?,
            );
        }
    }
    Ok(())
}
