//! Plants five patterns into random data, mines them back and scores the result.
//!
//! Run with `cargo run --release --example mine_synthetic -- [seed] [--no-miss] [--no-lsh]`.

use mvpattern::miner::{mine, MinerConfig};
use mvpattern::synth::{cover_misses, evaluate, generate_dataset, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seed = args.iter().find_map(|a| a.parse().ok()).unwrap_or(1);
    let spec = SyntheticSpec {
        seed,
        ..SyntheticSpec::default()
    };
    let (data, truth) = generate_dataset(&spec)?;
    let cfg = MinerConfig {
        enable_miss_codes: !args.iter().any(|a| a == "--no-miss"),
        enable_lsh: !args.iter().any(|a| a == "--no-lsh"),
        seed,
        ..MinerConfig::default()
    };
    let result = mine(&data, &cfg)?;
    let eval = evaluate(&result.patterns(), &cover_misses(&result.covers), &truth);

    println!("planted:");
    for p in &truth.patterns {
        println!("  {}", p.display(data.schema()));
    }
    println!("mined:");
    for e in result.table.entries() {
        println!(
            "  usage {:>3}  {}",
            e.stats.usage,
            e.pattern.display(data.schema())
        );
    }
    let r = &result.report;
    println!(
        "|P| = {}  dL% = {:.1}  misses = {}  t = {:.2}s  evaluated = {}",
        r.pattern_count, r.delta_l_percent, r.miss_count, r.runtime_secs, r.candidates_evaluated
    );
    println!(
        "recovered {}/{}  misses detected {}/{}  spurious {}",
        eval.recovered_patterns,
        eval.planted_patterns,
        eval.detected_misses,
        eval.planted_misses,
        eval.spurious_patterns
    );
    Ok(())
}
