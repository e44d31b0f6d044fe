//! Seeded random candidate and valid geometric types, for tests and fuzzing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{GeometricType, Kind, Sign, SlotRef, Transition};
use crate::paths::GPath;
use crate::symbolic;

fn sign<R: Rng + ?Sized>(rng: &mut R) -> Sign {
    if rng.gen() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Random counts in `1..=max_slots` summing to `total`, if possible.
fn composition<R: Rng + ?Sized>(rng: &mut R, n: usize, total: usize, max_slots: usize) -> Option<Vec<usize>> {
    if total < n || total > n * max_slots {
        return None;
    }
    let mut out = vec![1; n];
    let mut left = total - n;
    while left > 0 {
        let i = rng.gen_range(0..n);
        if out[i] < max_slots {
            out[i] += 1;
            left -= 1;
        }
    }
    Some(out)
}

fn slots(counts: &[usize], kind: Kind) -> Vec<SlotRef> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| (1..=c).map(move |s| SlotRef { kind, rect: i + 1, slot: s }))
        .collect()
}

/// A valid type with `n ≤ max_n` rectangles and at most `max_slots` slots of each kind per rectangle.
pub fn random_valid<R: Rng + ?Sized>(rng: &mut R, max_n: usize, max_slots: usize) -> GeometricType {
    let n = rng.gen_range(1..=max_n);
    let h: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=max_slots)).collect();
    let total = h.iter().sum();
    let v = composition(rng, n, total, max_slots).expect("h itself is such a composition");
    let mut targets = slots(&v, Kind::V);
    targets.shuffle(rng);
    let maps = slots(&h, Kind::H)
        .into_iter()
        .zip(targets)
        .map(|(s, t)| Transition { h: (s.rect, s.slot), v: (t.rect, t.slot), sign: sign(rng) })
        .collect();
    GeometricType::new(n, h, v, maps)
}

/// A valid type whose transition matrix is irreducible.
pub fn random_irreducible<R: Rng + ?Sized>(rng: &mut R, max_n: usize, max_slots: usize) -> GeometricType {
    loop {
        let g = random_valid(rng, max_n, max_slots);
        if symbolic::transition_matrix(&g).is_ok_and(|m| symbolic::is_irreducible(&m.m)) {
            return g;
        }
    }
}

/// Arbitrary candidate data: often valid, otherwise broken in one or more
/// of the ways validation looks for.
pub fn random_candidate<R: Rng + ?Sized>(rng: &mut R, max_n: usize, max_slots: usize) -> GeometricType {
    if rng.gen_bool(0.4) {
        return random_valid(rng, max_n, max_slots);
    }
    let n = rng.gen_range(1..=max_n);
    let h: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=max_slots)).collect();
    let total: usize = h.iter().sum();
    let v = if rng.gen() {
        composition(rng, n, total, max_slots).expect("h itself is such a composition")
    } else {
        (0..n).map(|_| rng.gen_range(1..=max_slots)).collect()
    };
    let targets = slots(&v, Kind::V);
    let mut maps: Vec<Transition> = slots(&h, Kind::H)
        .into_iter()
        .map(|s| {
            let t = targets[rng.gen_range(0..targets.len())];
            Transition { h: (s.rect, s.slot), v: (t.rect, t.slot), sign: sign(rng) }
        })
        .collect();
    if rng.gen_bool(0.1) && !maps.is_empty() {
        maps.remove(rng.gen_range(0..maps.len()));
    }
    GeometricType::new(n, h, v, maps)
}

/// A random walk of `len` steps from rectangle `start` over a valid `g`.
pub fn random_gpath<R: Rng + ?Sized>(rng: &mut R, g: &GeometricType, start: usize, len: usize) -> GPath {
    let tables = g.tables().expect("valid type");
    let mut cur = start;
    let mut steps = Vec::with_capacity(len);
    for _ in 0..len {
        let kind = if rng.gen() { Kind::H } else { Kind::V };
        let s = SlotRef { kind, rect: cur, slot: rng.gen_range(1..=g.slots(kind, cur)) };
        cur = tables.neighbor_type(s);
        steps.push((s, cur));
    }
    GPath::new(start, steps)
}
