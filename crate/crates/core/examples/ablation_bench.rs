//! Runs the four ablations (miss codes on/off, pair filter on/off) on one
//! synthetic dataset and prints a run report.
//!
//! Run with `cargo run --release --example ablation_bench -- [seed] [--full-size]`.
//! The default dataset draws from 50 values per attribute so the unfiltered
//! runs finish in seconds; `--full-size` uses 100, where they take about a
//! minute each.

use mvpattern::io::{report_table, ReportRow};
use mvpattern::miner::{mine, MinerConfig};
use mvpattern::synth::{cover_misses, evaluate, generate_dataset, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seed = args.iter().find_map(|a| a.parse().ok()).unwrap_or(1);
    let spec = SyntheticSpec {
        values_per_attribute: if args.iter().any(|a| a == "--full-size") {
            100
        } else {
            50
        },
        seed,
        ..SyntheticSpec::default()
    };
    let (data, truth) = generate_dataset(&spec)?;
    println!(
        "|S| = {}, |s| = {}, |A| = {}, |V_k| = {}, seed {seed}",
        spec.num_sequences, spec.sequence_length, spec.num_attributes, spec.values_per_attribute
    );

    let mut rows = Vec::new();
    for (name, miss, filter) in [
        ("full", true, true),
        ("no-miss", false, true),
        ("no-lsh", true, false),
        ("none", false, false),
    ] {
        let cfg = MinerConfig {
            enable_miss_codes: miss,
            enable_lsh: filter,
            seed,
            ..MinerConfig::default()
        };
        let result = mine(&data, &cfg)?;
        let eval = evaluate(&result.patterns(), &cover_misses(&result.covers), &truth);
        println!(
            "{name:<8} recovered {}/{}  misses {}/{}  candidates evaluated {}",
            eval.recovered_patterns,
            eval.planted_patterns,
            eval.detected_misses,
            eval.planted_misses,
            result.report.candidates_evaluated
        );
        rows.push(ReportRow::from_report(name, &result.report, miss));
    }
    print!("{}", report_table(&rows).render());
    Ok(())
}
