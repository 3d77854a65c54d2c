//! Finds occurrences of a two-attribute pattern under gap and miss budgets and
//! checks them against the exhaustive search.
//!
//! Run with `cargo run --example match_occurrences`.

use mvpattern::matcher::{brute_force_occurrences, search_occurrences};
use mvpattern::model::{Event, Pattern, Schema};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let schema = Schema::new([
        ("stroke", vec!["serve", "push", "flick", "attack", "block"]),
        ("zone", vec!["short", "long", "middle", "net"]),
    ])?;
    let ev = |stroke: &str, zone: &str| -> Event {
        Event::new(vec![
            (stroke != "*").then(|| schema.value_id(0, stroke).unwrap()),
            (zone != "*").then(|| schema.value_id(1, zone).unwrap()),
        ])
    };

    // 6 values, so one of them may be missing in an occurrence
    let pattern = Pattern::new(vec![
        ev("serve", "short"),
        ev("push", "short"),
        ev("attack", "long"),
    ])?;
    let seq = vec![
        ev("serve", "short"),
        ev("push", "short"),
        ev("attack", "long"),
        ev("block", "middle"),
        ev("serve", "short"),
        ev("flick", "net"),
        ev("push", "short"),
        ev("attack", "middle"),
    ];

    println!("pattern: {}", pattern.display(&schema));
    println!(
        "budgets: {} gaps, {} misses",
        pattern.max_gaps(),
        pattern.max_misses()
    );
    let found = search_occurrences(&pattern, &seq);
    for occ in &found {
        let misses: Vec<String> = occ
            .misses()
            .iter()
            .map(|&(e, k)| format!("e{} {}", e, schema.attribute(k).name()))
            .collect();
        println!(
            "  events {:?}  gaps {}  misses [{}]",
            occ.events(),
            occ.gaps(),
            misses.join(", ")
        );
    }
    assert_eq!(found, brute_force_occurrences(&pattern, &seq)?);
    println!("exhaustive search agrees on {} occurrences", found.len());
    Ok(())
}
