//! Loads rallies in the four-attribute table-tennis schema, mines tactics and
//! writes them as a pattern file.
//!
//! Run with `cargo run --release --example table_tennis -- [dataset] [patterns-out]`.

use std::path::PathBuf;

use mvpattern::io::{format_patterns, parse_dataset, PatternFile};
use mvpattern::miner::{mine, MinerConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let input = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/table_tennis.txt")
    });
    let data = parse_dataset(&input)?;
    let schema = data.schema();
    for attr in schema.attributes() {
        println!("{:<7} {:>2} values", attr.name(), attr.values().len());
    }
    println!(
        "{} rallies, {} strokes",
        data.num_sequences(),
        data.total_events()
    );

    let result = mine(&data, &MinerConfig::default())?;
    let r = &result.report;
    println!(
        "|P| = {}, ΔL% = {:.2}, miss = {}, t = {:.2}s",
        r.pattern_count, r.delta_l_percent, r.miss_count, r.runtime_secs
    );
    for e in result.table.entries() {
        println!("usage {:>3}: {}", e.stats.usage, e.pattern.display(schema));
    }

    let file = PatternFile::from_mining(schema, &result);
    match args.next() {
        Some(out) => {
            mvpattern::io::write_patterns(&file, out.as_ref())?;
            println!("patterns written to {out}");
        }
        None => print!("{}", format_patterns(&file)?),
    }
    Ok(())
}
