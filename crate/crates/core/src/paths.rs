//! Rectangle paths: in a geometric type (`GPath`) and in an explored patch
//! (`PlanePath`), the B and C homotopies, bounded reduction of closed
//! paths, and transport along equivalence witnesses.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::cover::{ArcCycle, Orientation, Patch, RectId, Side};
use crate::equivalence::EquivalenceWitness;
use crate::error::{CoverError, PathError};
use crate::model::{GeometricType, Kind, SlotRef};

/// Rectangle path in a geometric type: `i0, s0, i1, s1, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GPath {
    start: usize,
    steps: Vec<(SlotRef, usize)>,
}

impl GPath {
    pub fn new(start: usize, steps: Vec<(SlotRef, usize)>) -> Self {
        GPath { start, steps }
    }

    pub fn trivial(start: usize) -> Self {
        GPath { start, steps: Vec::new() }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.steps.last().map_or(self.start, |s| s.1)
    }

    pub fn steps(&self) -> impl Iterator<Item = (SlotRef, usize)> + '_ {
        self.steps.iter().copied()
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.start == self.end()
    }

    /// Rectangle indices `i0, i1, …`.
    pub fn types(&self) -> Vec<usize> {
        std::iter::once(self.start).chain(self.steps.iter().map(|s| s.1)).collect()
    }

    /// Checks that every slot belongs to the current rectangle and leads to the next one.
    pub fn validate(&self, g: &GeometricType) -> Result<(), PathError> {
        let tables = g.tables().map_err(CoverError::from)?;
        if self.start == 0 || self.start > g.n() {
            return Err(PathError::Malformed(format!("rectangle {} out of range", self.start)));
        }
        let mut cur = self.start;
        for (k, (s, next)) in self.steps().enumerate() {
            if s.rect != cur || !g.contains(s) {
                return Err(PathError::Malformed(format!("step {k}: slot {s} does not belong to rectangle {cur}")));
            }
            let reached = tables.neighbor_type(s);
            if reached != next {
                return Err(PathError::Malformed(format!("step {k}: slot {s} leads to {reached}, not {next}")));
            }
            cur = next;
        }
        Ok(())
    }

    /// The same path walked backwards.
    pub fn reversed(&self, g: &GeometricType) -> Result<GPath, PathError> {
        let tables = g.tables().map_err(CoverError::from)?;
        let types = self.types();
        let steps = self
            .steps
            .iter()
            .enumerate()
            .rev()
            .map(|(k, &(s, _))| (tables.back_slot(s), types[k]))
            .collect();
        Ok(GPath { start: self.end(), steps })
    }

    /// A closed path restarted after its first `k` steps.
    pub fn rotated(&self, k: usize) -> GPath {
        debug_assert!(self.is_closed());
        if self.steps.is_empty() {
            return self.clone();
        }
        let k = k % self.steps.len();
        let start = if k == 0 { self.start } else { self.steps[k - 1].1 };
        let steps = self.steps[k..].iter().chain(&self.steps[..k]).copied().collect();
        GPath { start, steps }
    }

    /// Smallest rotation of a closed path; other paths are returned unchanged.
    pub fn rotation_canonical(&self) -> GPath {
        if !self.is_closed() {
            return self.clone();
        }
        (0..self.steps.len().max(1)).map(|k| self.rotated(k)).min().expect("at least one rotation")
    }
}

/// Image of `q` under a witness from `g1`: rectangles by `σ`, slots by the slot bijection.
pub fn transport(w: &EquivalenceWitness, g1: &GeometricType, q: &GPath) -> GPath {
    GPath {
        start: w.sigma[q.start - 1],
        steps: q.steps().map(|(s, i)| (w.map_slot(g1, s), w.sigma[i - 1])).collect(),
    }
}

/// Sequence of rectangles of a patch, consecutive ones related by a recorded edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PlanePath {
    rects: Vec<RectId>,
}

impl PlanePath {
    pub fn trivial(r: RectId) -> Self {
        PlanePath { rects: vec![r] }
    }

    pub fn new(patch: &Patch, rects: Vec<RectId>) -> Result<Self, PathError> {
        if rects.is_empty() {
            return Err(PathError::Malformed("empty path".into()));
        }
        for w in rects.windows(2) {
            if patch.slot_between(w[0], w[1]).is_none() {
                return Err(PathError::Malformed(format!("{} and {} are not neighbours", w[0], w[1])));
            }
        }
        Ok(PlanePath { rects })
    }

    fn unchecked(rects: Vec<RectId>) -> Self {
        PlanePath { rects }
    }

    pub fn rects(&self) -> &[RectId] {
        &self.rects
    }

    pub fn first(&self) -> RectId {
        self.rects[0]
    }

    pub fn last(&self) -> RectId {
        *self.rects.last().expect("paths are non-empty")
    }

    pub fn len(&self) -> usize {
        self.rects.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.rects.len() == 1
    }

    pub fn is_closed(&self) -> bool {
        self.first() == self.last()
    }

    pub fn is_trivial(&self) -> bool {
        self.rects.len() == 1
    }

    /// Whether the path starts at `origin`.
    pub fn is_centered(&self, origin: RectId) -> bool {
        self.first() == origin
    }

    pub fn reversed(&self) -> PlanePath {
        PlanePath { rects: self.rects.iter().rev().copied().collect() }
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn then(&self, other: &PlanePath) -> Result<PlanePath, PathError> {
        if self.last() != other.first() {
            return Err(PathError::Malformed("paths do not meet".into()));
        }
        let mut rects = self.rects.clone();
        rects.extend_from_slice(&other.rects[1..]);
        Ok(PlanePath { rects })
    }
}

/// One step of a JSON path: the rectangle id and the slot that reached it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStep(pub Option<RectId>, pub Option<String>);

/// The `(rect-id, slot-label)` form of a path; the first step has no slot.
pub fn path_steps(patch: &Patch, p: &PlanePath) -> Vec<PathStep> {
    let mut out = vec![PathStep(Some(p.first()), None)];
    for w in p.rects.windows(2) {
        let s = patch.slot_between(w[0], w[1]).expect("path edges are recorded");
        out.push(PathStep(Some(w[1]), Some(s.to_string())));
    }
    out
}

/// Follows `(rect-id, slot-label)` steps from their first rectangle,
/// checking any ids that are given.
pub fn path_from_steps(patch: &mut Patch, steps: &[PathStep]) -> Result<PlanePath, PathError> {
    let first = steps.first().ok_or_else(|| PathError::Malformed("empty path".into()))?;
    let start = first.0.ok_or_else(|| PathError::Malformed("first step needs a rectangle id".into()))?;
    patch.rect(start)?;
    let mut rects = vec![start];
    for (k, PathStep(id, slot)) in steps.iter().enumerate().skip(1) {
        let label = slot.as_ref().ok_or_else(|| PathError::Malformed(format!("step {k} has no slot")))?;
        let s: SlotRef = label.parse().map_err(PathError::Malformed)?;
        let next = patch.extend(*rects.last().expect("non-empty"), s)?;
        if id.is_some_and(|i| i != next) {
            return Err(PathError::Malformed(format!("step {k} reaches {next}, not {}", id.unwrap_or(next))));
        }
        rects.push(next);
    }
    Ok(PlanePath { rects })
}

/// Reads each rectangle's type and each step's slot label.
pub fn project(patch: &Patch, p: &PlanePath) -> Result<GPath, PathError> {
    let start = patch.rect(p.first())?.ty;
    let mut steps = Vec::with_capacity(p.len());
    for w in p.rects.windows(2) {
        let s = patch
            .slot_between(w[0], w[1])
            .ok_or_else(|| PathError::Malformed(format!("{} and {} are not neighbours", w[0], w[1])))?;
        steps.push((s, patch.rect(w[1])?.ty));
    }
    Ok(GPath::new(start, steps))
}

/// The plane path starting at `start` whose steps follow `q`.
pub fn lift(patch: &mut Patch, q: &GPath, start: RectId) -> Result<PlanePath, PathError> {
    let ty = patch.rect(start)?.ty;
    if ty != q.start() {
        return Err(PathError::Malformed(format!("path starts at type {}, rectangle has type {ty}", q.start())));
    }
    let mut rects = vec![start];
    for (k, (s, next)) in q.steps().enumerate() {
        let r = patch.extend(*rects.last().expect("non-empty"), s)?;
        let got = patch.rect(r)?.ty;
        if got != next {
            return Err(PathError::Malformed(format!("step {k}: slot {s} reaches type {got}, not {next}")));
        }
        rects.push(r);
    }
    Ok(PlanePath { rects })
}

/// The unique monotone chain from `from` to `to`, when `to` is a
/// predecessor or successor of some generation of `from`.
pub fn monotone_chain(patch: &mut Patch, from: RectId, to: RectId) -> Result<PlanePath, PathError> {
    let (gf, gt) = (patch.rect(from)?.chart.generation, patch.rect(to)?.chart.generation);
    if from == to {
        return Ok(PlanePath::trivial(from));
    }
    let kind = match gt.cmp(&gf) {
        std::cmp::Ordering::Greater => Kind::V,
        std::cmp::Ordering::Less => Kind::H,
        std::cmp::Ordering::Equal => return Err(PathError::NotComparable(from, to)),
    };
    let target = patch.rect(to)?.placement.clone();
    let mut rects = vec![from];
    let mut cur = from;
    for _ in 0..gf.abs_diff(gt) {
        let ty = patch.rect(cur)?.ty;
        let mut next = None;
        for s in 1..=patch.geometric_type().slots(kind, ty) {
            let n = patch.extend(cur, SlotRef { kind, rect: ty, slot: s })?;
            let pl = &patch.rect(n)?.placement;
            let (inner, outer) = match kind {
                Kind::V => (&target.x, &pl.x),
                Kind::H => (&target.y, &pl.y),
            };
            if outer.lo <= inner.lo && inner.hi <= outer.hi && pl.interiors_overlap(&target) {
                next = Some(n);
                break;
            }
        }
        cur = next.ok_or(PathError::NotComparable(from, to))?;
        rects.push(cur);
    }
    if cur != to {
        return Err(PathError::NotComparable(from, to));
    }
    Ok(PlanePath { rects })
}

/// Deletes `r_{k+1}, r_{k+2}` when `r_k = r_{k+2}`.
pub fn homotopy_b(p: &PlanePath, k: usize) -> Result<PlanePath, PathError> {
    if k + 2 >= p.rects.len() || p.rects[k] != p.rects[k + 2] {
        return Err(PathError::NotBReducible(k));
    }
    let mut rects = p.rects.clone();
    rects.drain(k + 1..k + 3);
    Ok(PlanePath { rects })
}

/// Inserts the back-and-forth step `r_k, n, r_k` at position `k`.
pub fn insert_b(patch: &Patch, p: &PlanePath, k: usize, n: RectId) -> Result<PlanePath, PathError> {
    let r = *p.rects.get(k).ok_or_else(|| PathError::Malformed(format!("no position {k}")))?;
    if patch.slot_between(r, n).is_none() {
        return Err(PathError::Malformed(format!("{r} and {n} are not neighbours")));
    }
    let mut rects = p.rects.clone();
    rects.splice(k + 1..k + 1, [n, r]);
    Ok(PlanePath { rects })
}

/// Applies B-cancellations until none is left; returns the positions used.
pub fn b_closure(p: &PlanePath) -> (PlanePath, Vec<usize>) {
    let mut out: Vec<RectId> = Vec::with_capacity(p.rects.len());
    let mut used = Vec::new();
    for &r in &p.rects {
        out.push(r);
        while out.len() >= 3 && out[out.len() - 1] == out[out.len() - 3] {
            used.push(out.len() - 3);
            out.truncate(out.len() - 2);
        }
    }
    (PlanePath { rects: out }, used)
}

/// The two cycles at one arc point with a common base rectangle.
#[derive(Debug, Clone, Serialize)]
pub struct CSite {
    pub positive: ArcCycle,
    pub negative: ArcCycle,
}

impl CSite {
    pub fn new(patch: &mut Patch, x: &crate::field::Alg, y: &crate::field::Alg, l0: RectId) -> Result<Self, CoverError> {
        Ok(CSite {
            positive: patch.arc_point_cycle(x, y, l0, Orientation::Positive)?,
            negative: patch.arc_point_cycle(x, y, l0, Orientation::Negative)?,
        })
    }

    fn cycle(&self, o: Orientation) -> &ArcCycle {
        match o {
            Orientation::Positive => &self.positive,
            Orientation::Negative => &self.negative,
        }
    }

    /// The canonical loop: one cycle's associated path, then the other's backwards.
    pub fn c_loop(&self) -> Result<PlanePath, PathError> {
        let pos = PlanePath::unchecked(self.positive.path.clone());
        let neg = PlanePath::unchecked(self.negative.path.clone()).reversed();
        pos.then(&neg).map_err(|_| PathError::NotClosed)
    }

    pub fn closes(&self) -> bool {
        self.positive.rects[4] == self.negative.rects[4]
    }
}

/// Replaces an occurrence of the associated path of `(L0, …, Lk)` of the
/// `from` cycle by that of the other cycle, or the reverse occurrence by the
/// reversed replacement.
pub fn homotopy_c(p: &PlanePath, site: &CSite, from: Orientation, k: usize) -> Result<PlanePath, PathError> {
    if !(1..=4).contains(&k) {
        return Err(PathError::NotCApplicable(format!("k = {k} outside 1..=4")));
    }
    let to = match from {
        Orientation::Positive => Orientation::Negative,
        Orientation::Negative => Orientation::Positive,
    };
    let old = site.cycle(from).prefix(k);
    let new = site.cycle(to).prefix(k);
    if old.last() != new.last() {
        return Err(PathError::NotCApplicable(format!("the two cycles differ at L{k}")));
    }
    if let Some(i) = find(&p.rects, old) {
        let mut rects = p.rects[..i].to_vec();
        rects.extend_from_slice(new);
        rects.extend_from_slice(&p.rects[i + old.len()..]);
        return Ok(PlanePath { rects });
    }
    let old_rev: Vec<RectId> = old.iter().rev().copied().collect();
    if let Some(i) = find(&p.rects, &old_rev) {
        let mut rects = p.rects[..i].to_vec();
        rects.extend(new.iter().rev());
        rects.extend_from_slice(&p.rects[i + old.len()..]);
        return Ok(PlanePath { rects });
    }
    Err(PathError::NotCApplicable("no occurrence of the half-cycle in the path".into()))
}

fn find(hay: &[RectId], needle: &[RectId]) -> Option<usize> {
    if needle.len() > hay.len() {
        return None;
    }
    (0..=hay.len() - needle.len()).find(|&i| &hay[i..i + needle.len()] == needle)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "move", rename_all = "lowercase")]
pub enum Move {
    /// Reparametrization; no effect on the rectangle sequence.
    A,
    B { at: usize },
    C { site: usize, from: Orientation, k: usize },
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum Reduction {
    Trivial { moves: Vec<Move> },
    Exhausted { depth: usize, remaining: PlanePath },
}

impl Reduction {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Reduction::Trivial { .. })
    }
}

pub const DEFAULT_C_DEPTH: usize = 8;

/// Searches for A/B/C moves taking a closed path to the trivial path:
/// B-closure first, then iterative deepening over C-moves at arc points on
/// the sides of rectangles in the path.
pub struct Reducer<'a> {
    patch: &'a mut Patch,
    sites: Vec<CSite>,
    by_rect: HashMap<RectId, Vec<usize>>,
}

impl<'a> Reducer<'a> {
    pub fn new(patch: &'a mut Patch) -> Self {
        Reducer { patch, sites: Vec::new(), by_rect: HashMap::new() }
    }

    pub fn sites(&self) -> &[CSite] {
        &self.sites
    }

    /// C-sites found on the sides of `r`, computed once.
    fn sites_of(&mut self, r: RectId) -> Result<Vec<usize>, PathError> {
        if let Some(ids) = self.by_rect.get(&r) {
            return Ok(ids.clone());
        }
        let mut ids = Vec::new();
        for side in Side::ALL {
            let points = match self.patch.arc_points(r, side) {
                Ok(p) => p,
                Err(e @ CoverError::Budget { .. }) => return Err(e.into()),
                Err(_) => continue,
            };
            for a in points {
                let Some(l0) = self.patch.cycle_base(&a) else { continue };
                match CSite::new(self.patch, &a.x, &a.y, l0) {
                    Ok(site) => {
                        ids.push(self.sites.len());
                        self.sites.push(site);
                    }
                    Err(e @ CoverError::Budget { .. }) => return Err(e.into()),
                    Err(_) => {}
                }
            }
        }
        self.by_rect.insert(r, ids.clone());
        Ok(ids)
    }

    pub fn reduce(&mut self, p: &PlanePath, depth: usize) -> Result<Reduction, PathError> {
        if !p.is_closed() {
            return Err(PathError::NotClosed);
        }
        let (q, used) = b_closure(p);
        let mut moves: Vec<Move> = used.into_iter().map(|at| Move::B { at }).collect();
        if q.is_trivial() {
            return Ok(Reduction::Trivial { moves });
        }
        let starts = if q == *p { vec![q.clone()] } else { vec![p.clone(), q.clone()] };
        for d in 1..=depth {
            for (n, s) in starts.iter().enumerate() {
                let mut seen = HashSet::new();
                let mut trail = Vec::new();
                if self.dfs(s, d, &mut seen, &mut trail)? {
                    if n == 0 && starts.len() > 1 {
                        moves.clear();
                    }
                    moves.extend(trail);
                    return Ok(Reduction::Trivial { moves });
                }
            }
        }
        Ok(Reduction::Exhausted { depth, remaining: q })
    }

    fn dfs(
        &mut self,
        p: &PlanePath,
        depth: usize,
        seen: &mut HashSet<PlanePath>,
        trail: &mut Vec<Move>,
    ) -> Result<bool, PathError> {
        if depth == 0 || !seen.insert(p.clone()) {
            return Ok(false);
        }
        let mut tried = HashSet::new();
        for &r in &p.rects {
            for site in self.sites_of(r)? {
                if !tried.insert(site) {
                    continue;
                }
                if self.try_site(p, site, depth, seen, trail)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn try_site(
        &mut self,
        p: &PlanePath,
        site: usize,
        depth: usize,
        seen: &mut HashSet<PlanePath>,
        trail: &mut Vec<Move>,
    ) -> Result<bool, PathError> {
        for from in [Orientation::Positive, Orientation::Negative] {
            for k in 1..=4 {
                let Ok(next) = homotopy_c(p, &self.sites[site], from, k) else { continue };
                debug_assert_eq!((next.first(), next.last()), (p.first(), p.last()));
                let (closed, used) = b_closure(&next);
                let mark = trail.len();
                trail.push(Move::C { site, from, k });
                trail.extend(used.into_iter().map(|at| Move::B { at }));
                if closed.is_trivial() || self.dfs(&closed, depth - 1, seen, trail)? {
                    return Ok(true);
                }
                trail.truncate(mark);
            }
        }
        Ok(false)
    }
}

/// [`Reducer::reduce`] with a fresh site cache.
pub fn reduce(patch: &mut Patch, p: &PlanePath, depth: usize) -> Result<Reduction, PathError> {
    Reducer::new(patch).reduce(p, depth)
}
