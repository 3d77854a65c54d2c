//! Hand-built covers of small sequences with known interpretations.

use mvpattern::codetable::CodeTable;
use mvpattern::cover::{cover_sequence, decode, encode_cover, CodeToken};
use mvpattern::matcher::search_occurrences;
use mvpattern::model::{Event, Pattern, Schema};

mod common;

use common::fixture;

#[test]
fn occurrences_of_both_patterns() {
    let f = fixture();
    let o1 = search_occurrences(&f.p1, &f.seq);
    assert_eq!(o1.len(), 1);
    assert_eq!(o1[0].events(), &[0, 1, 2]);
    assert_eq!(o1[0].misses(), &[(1, 1)]);
    assert_eq!(o1[0].gaps(), 0);

    let o2 = search_occurrences(&f.p2, &f.seq);
    assert_eq!(o2.len(), 1);
    assert_eq!(o2[0].events(), &[1, 3, 4]);
    assert_eq!(o2[0].gaps(), 1);
    assert!(o2[0].misses().is_empty());
}

#[test]
fn cover_and_code_stream() {
    let f = fixture();
    let mut table = CodeTable::standard(&f.schema);
    let id1 = table.insert(f.p1.clone(), 1).unwrap();
    let id2 = table.insert(f.p2.clone(), 1).unwrap();

    let cover = cover_sequence(&table, &f.seq);
    let a = cover.assignments();
    assert_eq!(a.len(), 2);
    assert_eq!(
        (a[0].pattern, a[0].occurrence.events()),
        (id1, &[0, 1, 2][..])
    );
    assert_eq!(a[0].occurrence.misses(), &[(1, 1)]);
    assert_eq!(
        (a[1].pattern, a[1].occurrence.events()),
        (id2, &[1, 3, 4][..])
    );
    assert_eq!(a[1].occurrence.gaps(), 1);
    let y = f.schema.value_id(2, "y").unwrap();
    assert_eq!(cover.singleton_fills(), &[(4, 2, y)]);

    let stream = encode_cover(&f.seq, &table, &cover).unwrap();
    let g_y = table.singletons().index(2, y);
    assert_eq!(
        stream.tokens,
        vec![
            CodeToken::Pattern(id1),
            CodeToken::Fill(id1),
            CodeToken::Miss(id1, 1),
            CodeToken::Fill(id1),
            CodeToken::Pattern(id2),
            CodeToken::Gap(id2),
            CodeToken::Fill(id2),
            CodeToken::Fill(id2),
            CodeToken::Singleton(g_y),
        ]
    );
    assert_eq!(decode(&stream, &table, f.seq.len()).unwrap(), f.seq);
}

#[test]
fn interleaving_patterns_share_events() {
    let schema = Schema::new([("a1", vec!["a", "c", "r"]), ("a2", vec!["u", "v", "q"])]).unwrap();
    let ev = |a: &str, b: &str| {
        Event::new(vec![
            (a != "*").then(|| schema.value_id(0, a).unwrap()),
            (b != "*").then(|| schema.value_id(1, b).unwrap()),
        ])
    };
    let seq = vec![ev("a", "u"), ev("c", "q"), ev("r", "v")];
    let p1 = Pattern::new(vec![ev("*", "u"), ev("*", "v")]).unwrap();
    let p2 = Pattern::new(vec![ev("a", "*"), ev("c", "*")]).unwrap();
    let mut table = CodeTable::standard(&schema);
    let id1 = table.insert(p1, 1).unwrap();
    let id2 = table.insert(p2, 1).unwrap();

    let cover = cover_sequence(&table, &seq);
    let spans: Vec<_> = cover
        .assignments()
        .iter()
        .map(|a| (a.pattern, a.occurrence.events().to_vec()))
        .collect();
    assert!(spans.contains(&(id1, vec![0, 2])));
    assert!(spans.contains(&(id2, vec![0, 1])));
    assert_eq!(cover.singleton_fills().len(), 2);

    let stream = encode_cover(&seq, &table, &cover).unwrap();
    assert_eq!(decode(&stream, &table, seq.len()).unwrap(), seq);
}
