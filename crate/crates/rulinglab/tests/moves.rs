mod common;

use common::*;
use rulinglab::mcs::{DiagramItem, Move, Side};

#[test]
fn basic_moves_preserve_the_composite() {
    let mut r = rng(3);
    let mut seen = [0usize; 5];
    for _ in 0..1000 {
        let d = random_diagram(&mut r);
        for (ty, base, mv) in basic_moves(&mut r, &d) {
            checked_apply(&base, &mv);
            seen[ty] += 1;
        }
    }
    assert!(seen.iter().all(|&c| c > 100), "{seen:?}");
}

#[test]
fn incorporate_and_extract_preserve_the_composite() {
    let mut r = rng(5);
    for _ in 0..1000 {
        let (d, start, len, side) = collection_diagram(&mut r);
        let out = checked_apply(&d, &Move::Incorporate { start, len, side });
        let lo = start - (side == Side::Left) as usize;
        let grown = out.items.len() - (d.items.len() - len - 1);
        assert!(collection_ordered(&out.items[lo..lo + grown]), "{out:?}");

        let index = rand::Rng::gen_range(&mut r, 0..len);
        let out_side = if index % 2 == 0 { Side::Left } else { Side::Right };
        let ext = checked_apply(&d, &Move::Extract { start, len, index, side: out_side });
        let new_len = ext.items.len() - (d.items.len() - len);
        let rest = match out_side {
            Side::Left => &ext.items[start + 1..start + new_len],
            Side::Right => &ext.items[start..start + new_len - 1],
        };
        assert!(collection_ordered(rest));
        let moved = match out_side {
            Side::Left => ext.items[start],
            Side::Right => ext.items[start + new_len - 1],
        };
        assert_eq!(moved, d.items[start + index]);
    }
}

#[test]
fn random_move_sequences() {
    let mut r = rng(9);
    for _ in 0..200 {
        let mut d = random_diagram(&mut r);
        let start = d.composite();
        for _ in 0..10 {
            let moves = basic_moves(&mut r, &d);
            // Only moves on the diagram itself; the others change it first.
            let own: Vec<_> = moves.into_iter().filter(|(_, b, _)| *b == d).collect();
            if own.is_empty() {
                break;
            }
            let (_, _, mv) = own[rand::Rng::gen_range(&mut r, 0..own.len())];
            d = checked_apply(&d, &mv);
        }
        assert_eq!(d.composite(), start);
        assert!(d.items.iter().all(|i| !matches!(i, DiagramItem::Handleslide(h) if h.top >= h.bottom)));
    }
}

#[test]
fn inapplicable_moves_are_rejected() {
    let mut r = rng(1);
    let d = random_diagram(&mut r);
    assert!(d.apply_move(&Move::Merge { at: d.items.len() + 3 }).is_err());
    assert!(d.apply_move(&Move::Interchange { at: d.items.len() }).is_err());
}
