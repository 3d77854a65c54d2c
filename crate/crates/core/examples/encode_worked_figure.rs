//! Covers a five-event sequence with two patterns, one of them missing a
//! value and the other skipping an event, then prints the code stream and the
//! cost of every code.
//!
//! Run with `cargo run --example encode_worked_figure`.

use mvpattern::codetable::CodeTable;
use mvpattern::cover::{cover_sequence, decode, encode_cover, CodeToken};
use mvpattern::model::{Event, EventDataset, Pattern, Schema};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let schema = Schema::new([
        ("a1", vec!["a", "d", "g", "j", "m"]),
        ("a2", vec!["b", "e", "h", "k", "n", "x"]),
        ("a3", vec!["c", "f", "i", "l", "y"]),
    ])?;
    let ev = |names: [&str; 3]| -> Event {
        Event::new(
            names
                .iter()
                .enumerate()
                .map(|(k, n)| (*n != "*").then(|| schema.value_id(k, n).unwrap()))
                .collect(),
        )
    };
    let seq = vec![
        ev(["a", "b", "c"]),
        ev(["d", "x", "f"]),
        ev(["g", "h", "i"]),
        ev(["j", "k", "l"]),
        ev(["m", "n", "y"]),
    ];
    let p1 = Pattern::new(vec![
        ev(["a", "b", "c"]),
        ev(["d", "e", "f"]),
        ev(["g", "h", "i"]),
    ])?;
    let p2 = Pattern::new(vec![
        ev(["*", "x", "*"]),
        ev(["j", "k", "l"]),
        ev(["m", "n", "*"]),
    ])?;

    let mut table = CodeTable::standard(&schema);
    let id1 = table.insert(p1.clone(), 1)?;
    let id2 = table.insert(p2.clone(), 1)?;
    println!("p1 = {}", p1.display(&schema));
    println!("p2 = {}", p2.display(&schema));

    let cover = cover_sequence(&table, &seq);
    for a in cover.assignments() {
        let name = if a.pattern == id1 { "p1" } else { "p2" };
        println!(
            "{name}: events {:?}, gaps {}, misses {:?}",
            a.occurrence.events(),
            a.occurrence.gaps(),
            a.occurrence.misses()
        );
    }
    for &(e, k, v) in cover.singleton_fills() {
        println!("singleton {} at e{}", schema.value_name(k, v), e + 1);
    }

    let stream = encode_cover(&seq, &table, &cover)?;
    let data = EventDataset::new(schema.clone(), vec![seq.clone()])?;
    let total = mvpattern::cover::total_description_length(&data, &mut table);
    let lengths = table.code_lengths()?;
    let name = |id| {
        if id == id1 {
            "p1"
        } else if id == id2 {
            "p2"
        } else {
            "?"
        }
    };
    println!("code stream:");
    for t in &stream.tokens {
        let (label, bits) = match *t {
            CodeToken::Pattern(id) => (
                format!("pattern {}", name(id)),
                lengths.pattern(id)?.pattern,
            ),
            CodeToken::Gap(id) => (format!("gap {}", name(id)), lengths.pattern(id)?.gap),
            CodeToken::Fill(id) => (format!("fill {}", name(id)), lengths.pattern(id)?.fill),
            CodeToken::Miss(id, k) => (
                format!("miss {} at {}", name(id), schema.attribute(k).name()),
                lengths.pattern(id)?.miss,
            ),
            CodeToken::Singleton(g) => {
                let (k, v) = table.singletons().cell(g);
                (
                    format!("singleton {}", schema.value_name(k, v)),
                    Some(lengths.singleton(g)?),
                )
            }
        };
        println!("  {label:<16} {:>6.3} bits", bits.unwrap_or(0.0));
    }
    println!("total description length {total:.3} bits");
    assert_eq!(decode(&stream, &table, seq.len())?, seq);
    println!("decoded stream reproduces the sequence");
    Ok(())
}
