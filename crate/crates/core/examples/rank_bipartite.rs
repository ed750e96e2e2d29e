//! Ranks a tiny ratings table with the reputation iteration and with the
//! plain per-item mean.
//!
//! Usage: `cargo run --example rank_bipartite [lambda]`

use clusterrank::dataset::{parse_ratings, RatingScale};
use clusterrank::metrics::arithmetic_average;
use clusterrank::ranker::{run_fixed_point, RankerConfig};

const RATINGS: &str = "\
ann,dune,5,1
ann,heat,4,2
ann,alien,2,3
bob,dune,5,4
bob,heat,4,5
bob,alien,1,6
cat,dune,4,7
cat,heat,5,8
cat,alien,2,9
troll,dune,1,10
troll,heat,1,11
troll,alien,5,12
";

fn main() -> clusterrank::Result<()> {
    let lambda: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.3);
    let d = parse_ratings(RATINGS.as_bytes(), RatingScale::default())?;
    let out = run_fixed_point(&d, &RankerConfig::bwa(lambda))?;
    let mean = arithmetic_average(&d);

    println!(
        "lambda {lambda}: converged {} after {} iterations",
        out.converged, out.iterations
    );
    if let Some(eta) = out.contraction_ratio(1) {
        println!("observed contraction ratio {eta:.3}");
    }
    println!("\n{:<8}{:>10}{:>10}", "item", "mean", "bwa");
    for (j, id) in d.items().iter().enumerate() {
        println!(
            "{id:<8}{:>10.4}{:>10.4}",
            mean[j].unwrap(),
            out.state.rankings[j].unwrap()
        );
    }
    println!("\n{:<8}{:>10}", "user", "reputation");
    for (i, id) in d.users().iter().enumerate() {
        println!("{id:<8}{:>10.4}", out.state.reputations[i].unwrap());
    }
    Ok(())
}
