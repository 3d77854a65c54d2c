//! Combines two three-attribute patterns at every alignment, including the
//! alignment where their values conflict, and ranks the candidates.
//!
//! Run with `cargo run --example candidate_generation`.

use mvpattern::candidates::{combine, generate_candidates};
use mvpattern::model::{Event, Pattern, Schema};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let schema = Schema::new([
        ("a1", vec!["u", "w"]),
        ("a2", vec!["x", "y", "z"]),
        ("a3", vec!["q", "r"]),
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
    let p1 = Pattern::new(vec![ev(["u", "z", "q"]), ev(["w", "x", "*"])])?;
    let p2 = Pattern::new(vec![ev(["*", "y", "r"]), ev(["u", "*", "*"])])?;
    println!("p1 = {}", p1.display(&schema));
    println!("p2 = {}", p2.display(&schema));

    println!("combinations:");
    for c in combine(&p1, &p2) {
        println!(
            "  |p| {}  ||p|| {}  {}",
            c.len(),
            c.size(),
            c.display(&schema)
        );
    }

    // self-pairs are combined too, so repeats of each pattern appear
    let pool = vec![(p1, 12), (p2, 7)];
    let ranked = generate_candidates(&pool, |_, _| true);
    println!(
        "{} candidates, first eight in evaluation order:",
        ranked.len()
    );
    for c in ranked.iter().take(8) {
        println!(
            "  est. support {:>2}  {}",
            c.estimated_support,
            c.pattern.display(&schema)
        );
    }
    Ok(())
}
