//! Equality and equivalence of geometric types, generator moves, classes
//! and canonical forms.
//!
//! A witness `(σ, ε, c)` sends rectangle `i` to `σ(i)`, reverses the H-slot
//! order of `i` when `ε_i = -1` and the V-slot order when `c·ε_i = -1`.
//! Equality is the special case `ε ≡ +1`, `c = +1`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::MoveError;
use crate::format::serialize;
use crate::model::{GeometricType, Kind, Sign, SlotRef, Tables, Transition};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EquivalenceWitness {
    /// `sigma[i-1]` is the image of rectangle `i`.
    pub sigma: Vec<usize>,
    pub eps: Vec<Sign>,
    #[serde(rename = "eps_prime")]
    pub eps_prime: Vec<Sign>,
}

impl EquivalenceWitness {
    pub fn identity(n: usize) -> Self {
        Self::from_parts((1..=n).collect(), vec![Sign::Plus; n], Sign::Plus)
    }

    /// Witness with `ε′ = c·ε`.
    pub fn from_parts(sigma: Vec<usize>, eps: Vec<Sign>, c: Sign) -> Self {
        let eps_prime = eps.iter().map(|&e| e * c).collect();
        EquivalenceWitness { sigma, eps, eps_prime }
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    /// The global sign `c` with `ε′ = c·ε`, if consistent.
    pub fn global_sign(&self) -> Option<Sign> {
        let c = *self.eps.first()? * *self.eps_prime.first()?;
        self.eps.iter().zip(&self.eps_prime).all(|(&a, &b)| a * b == c).then_some(c)
    }

    pub fn is_equality(&self) -> bool {
        self.eps.iter().chain(&self.eps_prime).all(|s| s.is_plus())
    }

    /// Image of a slot of the source type `g`.
    pub fn map_slot(&self, g: &GeometricType, s: SlotRef) -> SlotRef {
        let i = s.rect;
        let (count, e) = match s.kind {
            Kind::H => (g.h_of(i), self.eps[i - 1]),
            Kind::V => (g.v_of(i), self.eps_prime[i - 1]),
        };
        let slot = if e.is_plus() { s.slot } else { count + 1 - s.slot };
        SlotRef { kind: s.kind, rect: self.sigma[i - 1], slot }
    }

    /// The type obtained by pushing `g` through the witness.
    pub fn apply(&self, g: &GeometricType) -> GeometricType {
        let n = g.n();
        let mut h = vec![0; n];
        let mut v = vec![0; n];
        for i in 1..=n {
            h[self.sigma[i - 1] - 1] = g.h_of(i);
            v[self.sigma[i - 1] - 1] = g.v_of(i);
        }
        let maps = g
            .maps()
            .iter()
            .map(|t| {
                let hs = self.map_slot(g, SlotRef::h(t.h.0, t.h.1));
                let vs = self.map_slot(g, SlotRef::v(t.v.0, t.v.1));
                let sign = self.eps[t.h.0 - 1] * self.eps[t.v.0 - 1] * t.sign;
                Transition { h: (hs.rect, hs.slot), v: (vs.rect, vs.slot), sign }
            })
            .collect();
        GeometricType::new(n, h, v, maps)
    }

    /// Witness in the opposite direction.
    pub fn inverse(&self) -> Self {
        let n = self.n();
        let mut sigma = vec![0; n];
        let mut eps = vec![Sign::Plus; n];
        let mut eps_prime = vec![Sign::Plus; n];
        for i in 0..n {
            let j = self.sigma[i] - 1;
            sigma[j] = i + 1;
            eps[j] = self.eps[i];
            eps_prime[j] = self.eps_prime[i];
        }
        EquivalenceWitness { sigma, eps, eps_prime }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Self) -> Self {
        let n = self.n();
        let mut sigma = vec![0; n];
        let mut eps = vec![Sign::Plus; n];
        let mut eps_prime = vec![Sign::Plus; n];
        for i in 0..n {
            let j = self.sigma[i] - 1;
            sigma[i] = next.sigma[j];
            eps[i] = self.eps[i] * next.eps[j];
            eps_prime[i] = self.eps_prime[i] * next.eps_prime[j];
        }
        EquivalenceWitness { sigma, eps, eps_prime }
    }

    /// Checks every defining condition of a witness from `g1` to `g2`.
    pub fn verify(&self, g1: &GeometricType, g2: &GeometricType) -> bool {
        let n = g1.n();
        if g2.n() != n || self.n() != n || self.eps.len() != n || self.eps_prime.len() != n {
            return false;
        }
        if self.global_sign().is_none() {
            return false;
        }
        let mut seen = vec![false; n];
        for (i, &s) in self.sigma.iter().enumerate() {
            if s == 0 || s > n || std::mem::replace(&mut seen[s - 1], true) {
                return false;
            }
            if (g1.h_of(i + 1), g1.v_of(i + 1)) != (g2.h_of(s), g2.v_of(s)) {
                return false;
            }
        }
        g1.maps().iter().all(|t| {
            let hs = self.map_slot(g1, SlotRef::h(t.h.0, t.h.1));
            let vs = self.map_slot(g1, SlotRef::v(t.v.0, t.v.1));
            match g2.return_image(hs) {
                Ok((img, u)) => img == vs && u == self.eps[t.h.0 - 1] * self.eps[t.v.0 - 1] * t.sign,
                Err(_) => false,
            }
        })
    }
}

impl fmt::Display for EquivalenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let signs = |v: &[Sign]| v.iter().map(|s| s.to_string()).collect::<String>();
        let sigma: Vec<String> = self.sigma.iter().map(|s| s.to_string()).collect();
        write!(f, "sigma=[{}] eps={} eps'={}", sigma.join(","), signs(&self.eps), signs(&self.eps_prime))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum GeneratorMove {
    /// Relabel rectangle `i` as `sigma[i-1]`.
    Reindex(Vec<usize>),
    /// Rotate rectangle `i` by a half turn.
    FlipBoth(usize),
    /// Reverse the V-slot order in every rectangle.
    FlipAllStable,
    /// Reverse the H-slot order in every rectangle.
    FlipAllUnstable,
}

impl GeneratorMove {
    /// Witness realizing the move on `g`.
    pub fn witness(&self, g: &GeometricType) -> Result<EquivalenceWitness, MoveError> {
        let n = g.n();
        let id: Vec<usize> = (1..=n).collect();
        match self {
            GeneratorMove::Reindex(sigma) => {
                let mut sorted = sigma.clone();
                sorted.sort_unstable();
                if sorted != id {
                    return Err(MoveError::IllegalMove(format!("{sigma:?} is not a permutation of 1..={n}")));
                }
                for (i, &s) in sigma.iter().enumerate() {
                    if (g.h_of(i + 1), g.v_of(i + 1)) != (g.h_of(s), g.v_of(s)) {
                        return Err(MoveError::IllegalMove(format!(
                            "rectangles {} and {s} have different (h, v) pairs",
                            i + 1
                        )));
                    }
                }
                Ok(EquivalenceWitness::from_parts(sigma.clone(), vec![Sign::Plus; n], Sign::Plus))
            }
            GeneratorMove::FlipBoth(i) => {
                if *i == 0 || *i > n {
                    return Err(MoveError::IllegalMove(format!("rectangle {i} outside 1..={n}")));
                }
                let mut eps = vec![Sign::Plus; n];
                eps[i - 1] = Sign::Minus;
                Ok(EquivalenceWitness::from_parts(id, eps, Sign::Plus))
            }
            GeneratorMove::FlipAllStable => Ok(EquivalenceWitness::from_parts(id, vec![Sign::Plus; n], Sign::Minus)),
            GeneratorMove::FlipAllUnstable => {
                Ok(EquivalenceWitness::from_parts(id, vec![Sign::Minus; n], Sign::Minus))
            }
        }
    }
}

pub fn apply_move(g: &GeometricType, m: &GeneratorMove) -> Result<GeometricType, MoveError> {
    g.ensure_valid()?;
    Ok(m.witness(g)?.apply(g))
}

/// Every generator move legal on `g`: half turns, the two global flips and
/// transpositions of rectangles with equal `(h, v)`.
pub fn generator_moves(g: &GeometricType) -> Vec<GeneratorMove> {
    let n = g.n();
    let mut out: Vec<GeneratorMove> = (1..=n).map(GeneratorMove::FlipBoth).collect();
    out.push(GeneratorMove::FlipAllStable);
    out.push(GeneratorMove::FlipAllUnstable);
    for a in 1..=n {
        for b in a + 1..=n {
            if (g.h_of(a), g.v_of(a)) == (g.h_of(b), g.v_of(b)) {
                let mut s: Vec<usize> = (1..=n).collect();
                s.swap(a - 1, b - 1);
                out.push(GeneratorMove::Reindex(s));
            }
        }
    }
    out
}

struct Search<'a> {
    g1: &'a GeometricType,
    g2: &'a GeometricType,
    t1: Tables,
    t2: Tables,
    c: Sign,
    equality: bool,
}

#[derive(Clone)]
struct Partial {
    sigma: Vec<Option<usize>>,
    eps: Vec<Sign>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn pair1(&self, i: usize) -> (usize, usize) {
        (self.g1.h_of(i), self.g1.v_of(i))
    }

    fn pair2(&self, i: usize) -> (usize, usize) {
        (self.g2.h_of(i), self.g2.v_of(i))
    }

    fn assign(&self, p: &mut Partial, i: usize, a: usize, e: Sign, queue: &mut Vec<usize>) -> bool {
        match p.sigma[i - 1] {
            Some(b) => b == a && p.eps[i - 1] == e,
            None => {
                if p.used[a - 1] || self.pair1(i) != self.pair2(a) || (self.equality && !e.is_plus()) {
                    return false;
                }
                p.sigma[i - 1] = Some(a);
                p.eps[i - 1] = e;
                p.used[a - 1] = true;
                queue.push(i);
                true
            }
        }
    }

    /// Assigns `i ↦ (a, e)` and everything it forces.
    fn propagate(&self, p: &mut Partial, i: usize, a: usize, e: Sign) -> bool {
        let mut queue = Vec::new();
        if !self.assign(p, i, a, e, &mut queue) {
            return false;
        }
        while let Some(i) = queue.pop() {
            let a = p.sigma[i - 1].expect("queued rectangles are assigned");
            let ei = p.eps[i - 1];
            let hi = self.g1.h_of(i);
            for k in 1..=hi {
                let (j, l, u) = self.t1.phi(i, k);
                let k2 = if ei.is_plus() { k } else { hi + 1 - k };
                let (b, l2, u2) = self.t2.phi(a, k2);
                let ej = u2 * ei * u;
                if !self.assign(p, j, b, ej, &mut queue) {
                    return false;
                }
                let vj = self.g1.v_of(j);
                let want = if (ej * self.c).is_plus() { l } else { vj + 1 - l };
                if l2 != want {
                    return false;
                }
            }
            let vi = self.g1.v_of(i);
            for l in 1..=vi {
                let (j, k, u) = self.t1.inv(i, l);
                let l2 = if (ei * self.c).is_plus() { l } else { vi + 1 - l };
                let (b, k2, u2) = self.t2.inv(a, l2);
                let ej = u2 * ei * u;
                if !self.assign(p, j, b, ej, &mut queue) {
                    return false;
                }
                let hj = self.g1.h_of(j);
                let want = if ej.is_plus() { k } else { hj + 1 - k };
                if k2 != want {
                    return false;
                }
            }
        }
        true
    }

    fn run(&self, p: Partial, out: &mut dyn FnMut(EquivalenceWitness) -> bool) -> bool {
        let Some(i) = p.sigma.iter().position(Option::is_none).map(|k| k + 1) else {
            let sigma = p.sigma.iter().map(|s| s.expect("complete")).collect();
            return out(EquivalenceWitness::from_parts(sigma, p.eps.clone(), self.c));
        };
        let signs: &[Sign] = if self.equality { &[Sign::Plus] } else { &[Sign::Plus, Sign::Minus] };
        for a in 1..=self.g2.n() {
            if p.used[a - 1] || self.pair1(i) != self.pair2(a) {
                continue;
            }
            for &e in signs {
                let mut q = p.clone();
                if self.propagate(&mut q, i, a, e) && !self.run(q, out) {
                    return false;
                }
            }
        }
        true
    }
}

/// Calls `out` on every witness from `g1` to `g2` until it returns `false`.
/// With `equality` only witnesses with all signs `+1` are produced.
pub fn for_each_witness(
    g1: &GeometricType,
    g2: &GeometricType,
    equality: bool,
    out: &mut dyn FnMut(EquivalenceWitness) -> bool,
) {
    let n = g1.n();
    if g2.n() != n || !g1.is_valid() || !g2.is_valid() {
        return;
    }
    let mut p1: Vec<_> = (1..=n).map(|i| (g1.h_of(i), g1.v_of(i))).collect();
    let mut p2: Vec<_> = (1..=n).map(|i| (g2.h_of(i), g2.v_of(i))).collect();
    p1.sort_unstable();
    p2.sort_unstable();
    if p1 != p2 {
        return;
    }
    let (Ok(t1), Ok(t2)) = (g1.tables(), g2.tables()) else {
        return;
    };
    let cs: &[Sign] = if equality { &[Sign::Plus] } else { &[Sign::Plus, Sign::Minus] };
    for &c in cs {
        let s = Search { g1, g2, t1: t1.clone(), t2: t2.clone(), c, equality };
        let p = Partial { sigma: vec![None; n], eps: vec![Sign::Plus; n], used: vec![false; n] };
        if !s.run(p, out) {
            return;
        }
    }
}

pub fn all_witnesses(g1: &GeometricType, g2: &GeometricType, equality: bool) -> Vec<EquivalenceWitness> {
    let mut out = Vec::new();
    for_each_witness(g1, g2, equality, &mut |w| {
        out.push(w);
        true
    });
    out
}

fn first_witness(g1: &GeometricType, g2: &GeometricType, equality: bool) -> Option<EquivalenceWitness> {
    let mut found = None;
    for_each_witness(g1, g2, equality, &mut |w| {
        found = Some(w);
        false
    });
    found
}

/// Equality up to relabeling rectangles.
pub fn is_equal(g1: &GeometricType, g2: &GeometricType) -> Option<EquivalenceWitness> {
    first_witness(g1, g2, true)
}

pub fn is_equivalent(g1: &GeometricType, g2: &GeometricType) -> Option<EquivalenceWitness> {
    first_witness(g1, g2, false)
}

/// Relabelings whose rectangle lines come out sorted; every other
/// relabeling serializes to a strictly larger text.
fn sorted_relabelings(g: &GeometricType) -> Vec<Vec<usize>> {
    let n = g.n();
    let key = |i: usize| format!("h={} v={}", g.h_of(i), g.v_of(i));
    let mut order: Vec<usize> = (1..=n).collect();
    order.sort_by_key(|&i| key(i));
    // groups of equal keys occupy consecutive new labels
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(gr) if key(gr[0]) == key(i) => gr.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let mut out = vec![vec![0; n]];
    let mut next = 1;
    for gr in groups {
        let labels: Vec<usize> = (next..next + gr.len()).collect();
        next += gr.len();
        let perms = permutations(&labels);
        out = out
            .into_iter()
            .flat_map(|s| {
                let gr = &gr;
                perms.iter().map(move |p| {
                    let mut s = s.clone();
                    for (&old, &new) in gr.iter().zip(p) {
                        s[old - 1] = new;
                    }
                    s
                })
            })
            .collect();
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(k);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn sign_vectors(n: usize) -> impl Iterator<Item = Vec<Sign>> {
    (0..1u32 << n).map(move |mask| {
        (0..n)
            .map(|i| if mask & (1 << i) == 0 { Sign::Plus } else { Sign::Minus })
            .collect()
    })
}

/// Canonical representative of the equality class of `g`.
pub fn equality_key(g: &GeometricType) -> String {
    sorted_relabelings(g)
        .into_iter()
        .map(|s| serialize(&EquivalenceWitness::from_parts(s, vec![Sign::Plus; g.n()], Sign::Plus).apply(g)))
        .min()
        .unwrap_or_default()
}

/// Every member of the equivalence class of `g`, one per equality class,
/// sorted by serialized text.
pub fn enumerate_class(g: &GeometricType) -> Vec<GeometricType> {
    let n = g.n();
    let id: Vec<usize> = (1..=n).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for c in [Sign::Plus, Sign::Minus] {
        for eps in sign_vectors(n) {
            let m = EquivalenceWitness::from_parts(id.clone(), eps, c).apply(g);
            if seen.insert(equality_key(&m)) {
                out.push(m);
            }
        }
    }
    out.sort_by_cached_key(serialize);
    out
}

/// The canonical form together with every witness from `g` onto it.
pub fn canonical_witnesses(g: &GeometricType) -> (GeometricType, Vec<EquivalenceWitness>) {
    let n = g.n();
    let mut best: Option<(String, GeometricType)> = None;
    let mut witnesses = Vec::new();
    let relabelings = sorted_relabelings(g);
    for c in [Sign::Plus, Sign::Minus] {
        for eps in sign_vectors(n) {
            for s in &relabelings {
                let w = EquivalenceWitness::from_parts(s.clone(), eps.clone(), c);
                let m = w.apply(g);
                let text = serialize(&m);
                match &best {
                    Some((b, _)) if *b < text => {}
                    Some((b, _)) if *b == text => witnesses.push(w),
                    _ => {
                        best = Some((text, m));
                        witnesses = vec![w];
                    }
                }
            }
        }
    }
    let (_, canon) = best.expect("at least the identity relabeling");
    witnesses.sort();
    witnesses.dedup();
    (canon, witnesses)
}

pub fn canonical_form(g: &GeometricType) -> GeometricType {
    canonical_witnesses(g).0
}
