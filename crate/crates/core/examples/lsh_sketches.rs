//! Builds segment weight maps for a few patterns, sketches them with
//! consistent weighted sampling and compares estimated against exact
//! similarity, then filters the pairs.
//!
//! Run with `cargo run --release --example lsh_sketches`.

use mvpattern::lsh::{
    promising_pairs, segment_offsets, weighted_jaccard, PairThreshold, PositionSketch, WeightMap,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lens = [45, 30, 12];
    let (offsets, segments) = segment_offsets(&lens, 20);
    println!("sequence lengths {lens:?} -> segment offsets {offsets:?}, {segments} segments");

    let maps: Vec<(&str, WeightMap)> = vec![
        (
            "serve",
            [(0, 3), (1, 2), (3, 1), (5, 2)].into_iter().collect(),
        ),
        (
            "receive",
            [(0, 2), (1, 2), (3, 1), (5, 1)].into_iter().collect(),
        ),
        ("smash", [(2, 4), (4, 1)].into_iter().collect()),
        ("lob", [(2, 3), (4, 2), (5, 1)].into_iter().collect()),
    ];
    let sketches: Vec<Option<PositionSketch>> = maps
        .iter()
        .map(|(_, w)| PositionSketch::new(w.clone(), 256, 7).ok())
        .collect();

    println!("{:<8} {:<8} {:>6} {:>9}", "a", "b", "exact", "estimate");
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            let (a, b) = (sketches[i].as_ref().unwrap(), sketches[j].as_ref().unwrap());
            println!(
                "{:<8} {:<8} {:>6.3} {:>9.3}",
                maps[i].0,
                maps[j].0,
                weighted_jaccard(&maps[i].1, &maps[j].1),
                a.similarity(b)?
            );
        }
    }

    for threshold in [
        PairThreshold::Similarity(0.3),
        PairThreshold::MinCooccur(4.0),
    ] {
        let kept: Vec<String> = promising_pairs(&sketches, threshold)?
            .into_iter()
            .filter(|(i, j)| i != j)
            .map(|(i, j)| format!("{}+{}", maps[i].0, maps[j].0))
            .collect();
        println!("{threshold:?}: {}", kept.join(", "));
    }
    Ok(())
}
