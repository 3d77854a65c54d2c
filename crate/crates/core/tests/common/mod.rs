//! Fixtures shared by the integration and acceptance targets.

use mvpattern::model::{Event, Pattern, Schema};

fn schema() -> Schema {
    Schema::new([
        ("a1", vec!["a", "d", "g", "j", "m"]),
        ("a2", vec!["b", "e", "h", "k", "n", "x"]),
        ("a3", vec!["c", "f", "i", "l", "y"]),
    ])
    .unwrap()
}

fn event(schema: &Schema, names: [&str; 3]) -> Event {
    Event::new(
        names
            .iter()
            .enumerate()
            .map(|(k, n)| (*n != "*").then(|| schema.value_id(k, n).unwrap()))
            .collect(),
    )
}

pub struct Fixture {
    pub schema: Schema,
    pub seq: Vec<Event>,
    pub p1: Pattern,
    pub p2: Pattern,
}

// p1 spans e1..e3 and expects `e` where the sequence has `x`; p2 starts on
// that `x`, skips e3 and ends on e5, whose last value `y` is left over.
pub fn fixture() -> Fixture {
    let schema = schema();
    let ev = |n| event(&schema, n);
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
    ])
    .unwrap();
    let p2 = Pattern::new(vec![
        ev(["*", "x", "*"]),
        ev(["j", "k", "l"]),
        ev(["m", "n", "*"]),
    ])
    .unwrap();
    Fixture {
        schema,
        seq,
        p1,
        p2,
    }
}
