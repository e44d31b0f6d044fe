//! Desk-scale model of the lifted Markovian family.
//!
//! Every rectangle of the family is stored with an affine chart from the
//! natural coordinates of its type into one developed plane:
//! `X = σλ^{-g}·x + ax`, `Y = σλ^{g}·y + ay`. Predecessors and successors
//! are obtained by composing with the return maps of the Perron layout,
//! so all placements are exact in `Q(λ)`.
//!
//! Two rectangles are identified when they have the same type, chart sign
//! and placement, and the closing loop has zero winding around every
//! detected boundary-periodic point. Winding is measured along the
//! polyline through the centres of consecutive rectangles and of their
//! intersections, against a horizontal half-line from each periodic point.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::CoverError;
use crate::field::{Alg, NumberField};
use crate::layout::{layout, Interval, LayoutMode, ReturnMap};
use crate::model::{GeometricType, Kind, Sign, SlotRef, Tables};

pub type RectId = usize;

/// Environment variable overriding [`Budget`]: `rects` or `rects,depth`.
pub const BUDGET_ENV: &str = "GEOMTYPE_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_rects: usize,
    pub max_depth: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_rects: 10_000, max_depth: 32 }
    }
}

impl Budget {
    /// Defaults, overridden by `GEOMTYPE_BUDGET` when it parses.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV).ok().and_then(|s| Self::parse(&s)).unwrap_or_default()
    }

    pub fn parse(s: &str) -> Option<Self> {
        let mut parts = s.split(',').map(str::trim);
        let rects = parts.next()?.parse().ok()?;
        let depth = match parts.next() {
            Some(d) => d.parse().ok()?,
            None => Budget::default().max_depth,
        };
        parts.next().is_none().then_some(Budget { max_rects: rects, max_depth: depth })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Top, Side::Bottom, Side::Left, Side::Right];

    /// Top and bottom sides are stable segments.
    pub fn is_stable(self) -> bool {
        matches!(self, Side::Top | Side::Bottom)
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Top => Side::Bottom,
            Side::Bottom => Side::Top,
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Top => "top",
            Side::Bottom => "bottom",
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl FromStr for Side {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "top" => Ok(Side::Top),
            "bottom" => Ok(Side::Bottom),
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(format!("unknown side `{other}`")),
        }
    }
}

/// Axis-aligned closed rectangle in developed coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Placement {
    pub x: Interval,
    pub y: Interval,
}

impl Placement {
    pub fn interiors_overlap(&self, other: &Placement) -> bool {
        self.x.overlaps(&other.x) && self.y.overlaps(&other.y)
    }

    pub fn intersect(&self, other: &Placement) -> Option<Placement> {
        Some(Placement { x: self.x.intersect(&other.x)?, y: self.y.intersect(&other.y)? })
    }

    pub fn center(&self) -> (Alg, Alg) {
        ((&self.x.lo + &self.x.hi).half(), (&self.y.lo + &self.y.hi).half())
    }

    /// The coordinate interval along a side: `x` for stable sides, `y` otherwise.
    pub fn along(&self, side: Side) -> &Interval {
        if side.is_stable() {
            &self.x
        } else {
            &self.y
        }
    }

    /// The coordinate of the line carrying `side`.
    pub fn line(&self, side: Side) -> &Alg {
        match side {
            Side::Top => &self.y.hi,
            Side::Bottom => &self.y.lo,
            Side::Left => &self.x.lo,
            Side::Right => &self.x.hi,
        }
    }

    /// Whether `self` reaches strictly beyond the line of `side` of a rectangle.
    fn crosses(&self, side: Side, line: &Alg) -> bool {
        match side {
            Side::Top => &self.y.hi > line,
            Side::Bottom => &self.y.lo < line,
            Side::Left => &self.x.lo < line,
            Side::Right => &self.x.hi > line,
        }
    }

    fn approx(&self) -> [f64; 4] {
        [self.x.lo.to_f64(), self.x.hi.to_f64(), self.y.lo.to_f64(), self.y.hi.to_f64()]
    }

    /// Quadrants of `(px, py)` whose germs lie in the rectangle, as a bit mask.
    /// Quadrant 0 is `(+,+)`, then counter-clockwise.
    pub fn quadrants(&self, px: &Alg, py: &Alg) -> u8 {
        let right = &self.x.lo <= px && px < &self.x.hi;
        let left = &self.x.lo < px && px <= &self.x.hi;
        let up = &self.y.lo <= py && py < &self.y.hi;
        let down = &self.y.lo < py && py <= &self.y.hi;
        (right && up) as u8 | ((left && up) as u8) << 1 | ((left && down) as u8) << 2 | ((right && down) as u8) << 3
    }
}

/// Affine chart from natural coordinates of a type into the developed plane.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Chart {
    pub sign: Sign,
    pub generation: i32,
    pub sx: Alg,
    pub sy: Alg,
    pub ax: Alg,
    pub ay: Alg,
}

impl Chart {
    fn identity(field: &Arc<NumberField>) -> Self {
        Chart {
            sign: Sign::Plus,
            generation: 0,
            sx: field.one(),
            sy: field.one(),
            ax: field.zero(),
            ay: field.zero(),
        }
    }

    pub fn apply(&self, x: &Alg, y: &Alg) -> (Alg, Alg) {
        (&(&self.sx * x) + &self.ax, &(&self.sy * y) + &self.ay)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverRect {
    pub id: RectId,
    #[serde(rename = "type")]
    pub ty: usize,
    pub chart: Chart,
    pub placement: Placement,
    /// The rectangle and slot through which this one was first reached.
    pub parent: Option<(RectId, SlotRef)>,
    pub depth: usize,
    /// An older rectangle with identical type and placement that was kept
    /// distinct (degenerate self-return or a different sheet).
    pub shadow_of: Option<RectId>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Guard {
    pub x: Alg,
    pub y: Alg,
    #[serde(skip)]
    fx: f64,
    #[serde(skip)]
    fy: f64,
}

/// One point where the crossing recursion becomes periodic.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicHit {
    /// Position along the side; `None` when the return is an isometry (`λ = 1`).
    pub position: Option<Alg>,
    /// Slots from the base rectangle to the start of the period.
    pub prefix: Vec<SlotRef>,
    pub period: Vec<SlotRef>,
    /// The rectangle ending the first period; its chain repeats the prefix end.
    pub tail: RectId,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossingResult {
    pub base: RectId,
    pub side: Side,
    /// Crossing rectangles, sorted along the side. With periodic points
    /// these form one fundamental domain per periodic point.
    pub rects: Vec<RectId>,
    /// Chain of slots from the base to each entry of `rects`.
    pub chains: Vec<Vec<SlotRef>>,
    pub periodic: Vec<PeriodicHit>,
}

impl CrossingResult {
    pub fn is_periodic(&self) -> bool {
        !self.periodic.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.periodic.iter().any(|p| p.position.is_none())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArcPoint {
    pub x: Alg,
    pub y: Alg,
    pub base: RectId,
    pub side: Side,
    /// Crossing (or tail) rectangles with a side through the point.
    pub incident: Vec<RectId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CycleChecks {
    pub l2_l0_disjoint: bool,
    pub l3_l1_disjoint: bool,
    pub l4_l2_disjoint: bool,
    pub l4_l0_meet: bool,
}

impl CycleChecks {
    pub fn all(&self) -> bool {
        self.l2_l0_disjoint && self.l3_l1_disjoint && self.l4_l2_disjoint && self.l4_l0_meet
    }
}

/// A cycle `(L0, …, L4)` around a boundary arc point.
#[derive(Debug, Clone, Serialize)]
pub struct ArcCycle {
    pub x: Alg,
    pub y: Alg,
    pub orientation: Orientation,
    pub rects: [RectId; 5],
    /// The associated rectangle path: monotone chains joining consecutive `L_k`.
    pub path: Vec<RectId>,
    /// Index of each `L_k` in `path`.
    pub marks: [usize; 5],
    pub checks: CycleChecks,
}

impl ArcCycle {
    /// The associated path of `(L0, …, Lk)`.
    pub fn prefix(&self, k: usize) -> &[RectId] {
        &self.path[..=self.marks[k]]
    }
}

#[derive(Clone)]
struct Node {
    ty: usize,
    chart: Chart,
    path: Vec<SlotRef>,
}

struct Search {
    crossing: Vec<Node>,
    periodic: Vec<(Option<Alg>, usize, Node)>,
}

/// Explored region of the lifted family.
pub struct Patch {
    g: GeometricType,
    tables: Tables,
    field: Arc<NumberField>,
    lambda: Alg,
    inv_lambda: Alg,
    isometric: bool,
    natural: Vec<(Alg, Alg)>,
    /// Return map of `H_i^k`, indexed `[i-1][k-1]`.
    maps: Vec<Vec<ReturnMap>>,
    /// Periodic positions along each natural side, per type.
    natural_periodic: Vec<BTreeMap<Side, Vec<Alg>>>,
    budget: Budget,
    rects: Vec<CoverRect>,
    approx: Vec<[f64; 4]>,
    edges: BTreeMap<(RectId, SlotRef), RectId>,
    index: HashMap<(usize, Sign, Placement), Vec<RectId>>,
    guards: Vec<Guard>,
    guard_index: HashMap<(Alg, Alg), usize>,
    windings: Vec<BTreeMap<usize, i64>>,
    identifications: Vec<(RectId, SlotRef, RectId)>,
    crossing_cache: HashMap<(RectId, Side), CrossingResult>,
}

impl fmt::Debug for Patch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Patch")
            .field("rects", &self.rects.len())
            .field("edges", &self.edges.len())
            .field("guards", &self.guards.len())
            .finish()
    }
}

/// Fresh patch holding one rectangle of type `ty` at its layout position.
pub fn origin(g: &GeometricType, ty: usize) -> Result<(Patch, RectId), CoverError> {
    origin_with_budget(g, ty, Budget::from_env())
}

pub fn origin_with_budget(g: &GeometricType, ty: usize, budget: Budget) -> Result<(Patch, RectId), CoverError> {
    let mut patch = Patch::new(g, budget)?;
    if ty == 0 || ty > g.n() {
        return Err(CoverError::NoSuchType(ty));
    }
    let chart = Chart::identity(&patch.field);
    let id = patch.create(ty, chart, None)?;
    Ok((patch, id))
}

impl Patch {
    pub fn new(g: &GeometricType, budget: Budget) -> Result<Self, CoverError> {
        g.ensure_valid()?;
        let lay = layout(g, LayoutMode::Perron)?;
        let tables = g.tables()?;
        let lambda = lay.lambda.clone().expect("perron layout is exact");
        let inv_lambda = lambda.inverse().expect("λ ≥ 1");
        let isometric = lambda == lay.field.one();
        let maps = (1..=g.n())
            .map(|i| (1..=g.h_of(i)).map(|k| lay.return_map(g, i, k)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let natural = lay.rects.iter().map(|r| (r.width.clone(), r.height.clone())).collect();
        let mut patch = Patch {
            g: g.clone(),
            tables,
            field: lay.field.clone(),
            lambda,
            inv_lambda,
            isometric,
            natural,
            maps,
            natural_periodic: Vec::new(),
            budget,
            rects: Vec::new(),
            approx: Vec::new(),
            edges: BTreeMap::new(),
            index: HashMap::new(),
            guards: Vec::new(),
            guard_index: HashMap::new(),
            windings: Vec::new(),
            identifications: Vec::new(),
            crossing_cache: HashMap::new(),
        };
        let mut natural_periodic = Vec::with_capacity(g.n());
        for i in 1..=g.n() {
            let mut per_side = BTreeMap::new();
            for side in Side::ALL {
                let chart = Chart::identity(&patch.field);
                let found = patch.search(i, &chart, side, None)?;
                let mut points: Vec<Alg> = found.periodic.into_iter().filter_map(|(p, _, _)| p).collect();
                points.sort();
                points.dedup();
                per_side.insert(side, points);
            }
            natural_periodic.push(per_side);
        }
        patch.natural_periodic = natural_periodic;
        Ok(patch)
    }

    pub fn geometric_type(&self) -> &GeometricType {
        &self.g
    }

    pub fn lambda(&self) -> &Alg {
        &self.lambda
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    /// Whether `λ = 1`, in which case placements never identify rectangles.
    pub fn is_isometric(&self) -> bool {
        self.isometric
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn rects(&self) -> &[CoverRect] {
        &self.rects
    }

    pub fn rect(&self, id: RectId) -> Result<&CoverRect, CoverError> {
        self.rects.get(id).ok_or(CoverError::UnknownRect(id))
    }

    pub fn guards(&self) -> &[Guard] {
        &self.guards
    }

    pub fn identifications(&self) -> &[(RectId, SlotRef, RectId)] {
        &self.identifications
    }

    pub fn edges(&self) -> impl Iterator<Item = (RectId, SlotRef, RectId)> + '_ {
        self.edges.iter().map(|(&(a, s), &b)| (a, s, b))
    }

    /// Known neighbour of `r` through `slot`, without extending.
    pub fn neighbor(&self, r: RectId, slot: SlotRef) -> Option<RectId> {
        self.edges.get(&(r, slot)).copied()
    }

    /// The slot of `a` realizing a recorded edge `a → b`.
    pub fn slot_between(&self, a: RectId, b: RectId) -> Option<SlotRef> {
        let ty = self.rects.get(a)?.ty;
        [Kind::V, Kind::H].into_iter().find_map(|kind| {
            (1..=self.g.slots(kind, ty))
                .map(|s| SlotRef { kind, rect: ty, slot: s })
                .find(|&s| self.neighbor(a, s) == Some(b))
        })
    }

    /// Periodic positions along a natural side of type `ty`.
    pub fn natural_periodic(&self, ty: usize, side: Side) -> &[Alg] {
        &self.natural_periodic[ty - 1][&side]
    }

    /// Path of rectangles from the origin to `r` along first-reach edges.
    pub fn provenance(&self, r: RectId) -> Result<Vec<RectId>, CoverError> {
        let mut out = vec![r];
        let mut cur = self.rect(r)?;
        while let Some((p, _)) = cur.parent {
            out.push(p);
            cur = &self.rects[p];
        }
        out.reverse();
        Ok(out)
    }

    pub fn placement_of(&self, ty: usize, chart: &Chart) -> Placement {
        let (w, t) = &self.natural[ty - 1];
        let zero = self.field.zero();
        let (x0, y0) = chart.apply(&zero, &zero);
        let (x1, y1) = chart.apply(w, t);
        let iv = |a: Alg, b: Alg| if a <= b { Interval::new(a, b) } else { Interval::new(b, a) };
        Placement { x: iv(x0, x1), y: iv(y0, y1) }
    }

    fn step_chart(&self, ty: usize, chart: &Chart, slot: SlotRef) -> (usize, Chart) {
        let l = &self.lambda;
        let il = &self.inv_lambda;
        match slot.kind {
            Kind::V => {
                let (j, k, _) = self.tables.inv(ty, slot.slot);
                let f = &self.maps[j - 1][k - 1];
                let s = self.field.int(f.sign.value() as i64);
                let next = Chart {
                    sign: chart.sign * f.sign,
                    generation: chart.generation + 1,
                    sx: &(&chart.sx * &s) * il,
                    sy: &(&chart.sy * &s) * l,
                    ax: &(&chart.sx * &f.cx) + &chart.ax,
                    ay: &(&chart.sy * &f.cy) + &chart.ay,
                };
                (j, next)
            }
            Kind::H => {
                let f = &self.maps[ty - 1][slot.slot - 1];
                let s = self.field.int(f.sign.value() as i64);
                let sx = &(&chart.sx * &s) * l;
                let sy = &(&chart.sy * &s) * il;
                let next = Chart {
                    sign: chart.sign * f.sign,
                    generation: chart.generation - 1,
                    ax: &chart.ax - &(&sx * &f.cx),
                    ay: &chart.ay - &(&sy * &f.cy),
                    sx,
                    sy,
                };
                (f.to, next)
            }
        }
    }

    fn check_slot(&self, r: RectId, slot: SlotRef) -> Result<usize, CoverError> {
        let ty = self.rect(r)?.ty;
        if slot.rect != ty || slot.slot == 0 || slot.slot > self.g.slots(slot.kind, ty) {
            return Err(CoverError::ForeignSlot(slot, ty));
        }
        Ok(ty)
    }

    /// The neighbour of `r` through `slot`: a predecessor for V-slots, a
    /// successor for H-slots. Reuses a known rectangle when identification
    /// applies.
    pub fn extend(&mut self, r: RectId, slot: SlotRef) -> Result<RectId, CoverError> {
        let ty = self.check_slot(r, slot)?;
        if let Some(id) = self.neighbor(r, slot) {
            return Ok(id);
        }
        let (ty2, chart) = self.step_chart(ty, &self.rects[r].chart, slot);
        let placement = self.placement_of(ty2, &chart);
        let back = self.tables.back_slot(slot);
        let key = (ty2, chart.sign, placement);
        let candidates = self.index.get(&key).cloned().unwrap_or_default();
        if !self.isometric {
            for &c in &candidates {
                if self.edges.get(&(c, back)).is_some_and(|&b| b != r) {
                    continue;
                }
                if self.closes_flat(r, c) {
                    self.edges.insert((r, slot), c);
                    self.edges.entry((c, back)).or_insert(r);
                    self.identifications.push((r, slot, c));
                    return Ok(c);
                }
            }
        }
        let id = self.create(ty2, chart, Some((r, slot)))?;
        self.rects[id].shadow_of = candidates.first().copied();
        Ok(id)
    }

    fn create(&mut self, ty: usize, chart: Chart, parent: Option<(RectId, SlotRef)>) -> Result<RectId, CoverError> {
        if self.rects.len() >= self.budget.max_rects {
            return Err(CoverError::Budget { what: "rectangles", limit: self.budget.max_rects });
        }
        let placement = self.placement_of(ty, &chart);
        let id = self.rects.len();
        let depth = parent.map_or(0, |(p, _)| self.rects[p].depth + 1);
        let winding = match parent {
            Some((p, _)) => {
                let mut w = self.windings[p].clone();
                self.approx.push(placement.approx());
                self.rects.push(CoverRect {
                    id,
                    ty,
                    chart: chart.clone(),
                    placement: placement.clone(),
                    parent,
                    depth,
                    shadow_of: None,
                });
                for gid in 0..self.guards.len() {
                    let c = self.link_crossing(gid, p, id);
                    if c != 0 {
                        *w.entry(gid).or_insert(0) += c;
                        if w[&gid] == 0 {
                            w.remove(&gid);
                        }
                    }
                }
                w
            }
            None => {
                self.approx.push(placement.approx());
                self.rects.push(CoverRect {
                    id,
                    ty,
                    chart: chart.clone(),
                    placement: placement.clone(),
                    parent,
                    depth,
                    shadow_of: None,
                });
                BTreeMap::new()
            }
        };
        self.windings.push(winding);
        if let Some((p, slot)) = parent {
            self.edges.insert((p, slot), id);
            self.edges.entry((id, self.tables.back_slot(slot))).or_insert(p);
        }
        self.index.entry((ty, chart.sign, placement)).or_default().push(id);
        self.register_guards(id)?;
        Ok(id)
    }

    fn register_guards(&mut self, id: RectId) -> Result<(), CoverError> {
        let r = &self.rects[id];
        let (w, t) = self.natural[r.ty - 1].clone();
        let zero = self.field.zero();
        let mut points = Vec::new();
        for (side, positions) in &self.natural_periodic[r.ty - 1] {
            for p in positions {
                let (x, y) = match side {
                    Side::Top => (p, &t),
                    Side::Bottom => (p, &zero),
                    Side::Left => (&zero, p),
                    Side::Right => (&w, p),
                };
                points.push(r.chart.apply(x, y));
            }
        }
        for (x, y) in points {
            if self.guard_index.contains_key(&(x.clone(), y.clone())) {
                continue;
            }
            let gid = self.guards.len();
            self.guard_index.insert((x.clone(), y.clone()), gid);
            let (fx, fy) = (x.to_f64(), y.to_f64());
            self.guards.push(Guard { x, y, fx, fy });
            for rid in 0..self.rects.len() {
                if let Some((p, _)) = self.rects[rid].parent {
                    let c = self.windings[p].get(&gid).copied().unwrap_or(0) + self.link_crossing(gid, p, rid);
                    if c != 0 {
                        self.windings[rid].insert(gid, c);
                    }
                }
            }
            for k in 0..self.identifications.len() {
                let (a, _, b) = self.identifications[k];
                let lhs = self.windings[a].get(&gid).copied().unwrap_or(0) + self.link_crossing(gid, a, b);
                let rhs = self.windings[b].get(&gid).copied().unwrap_or(0);
                if lhs != rhs {
                    let g = &self.guards[gid];
                    return Err(CoverError::WindingGuard(format!(
                        "({}, {}) separates the identification of rectangle {b} reached from {a}",
                        g.fx, g.fy
                    )));
                }
            }
        }
        Ok(())
    }

    /// Signed crossings of guard `gid` by the link `c(a) → c(a∩b) → c(b)`.
    fn link_crossing(&self, gid: usize, a: RectId, b: RectId) -> i64 {
        let g = &self.guards[gid];
        let (fa, fb) = (self.approx[a], self.approx[b]);
        let fi = [fa[0].max(fb[0]), fa[1].min(fb[1]), fa[2].max(fb[2]), fa[3].min(fb[3])];
        let c = |r: [f64; 4]| ((r[0] + r[1]) / 2.0, (r[2] + r[3]) / 2.0);
        let pts = [c(fa), c(fi), c(fb)];
        let ys = pts.iter().map(|p| p.1);
        let (ymin, ymax) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
        let xmax = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-9 * (1.0 + g.fx.abs() + g.fy.abs() + xmax.abs());
        if ymax < g.fy - tol || ymin > g.fy + tol || xmax < g.fx - tol {
            return 0;
        }
        if let Some(c) = ray_crossing_f64(g, pts[0], pts[1], tol).zip(ray_crossing_f64(g, pts[1], pts[2], tol)) {
            return c.0 + c.1;
        }
        let pa = &self.rects[a].placement;
        let pb = &self.rects[b].placement;
        let Some(pi) = pa.intersect(pb) else { return 0 };
        let exact = [pa.center(), pi.center(), pb.center()];
        ray_crossing(g, &exact[0], &exact[1]) + ray_crossing(g, &exact[1], &exact[2])
    }

    /// Whether the loop `origin ⇝ a → b ⇜ origin` has zero winding around every guard.
    fn closes_flat(&self, a: RectId, b: RectId) -> bool {
        let mut expect = self.windings[a].clone();
        for gid in 0..self.guards.len() {
            let c = self.link_crossing(gid, a, b);
            if c != 0 {
                let e = expect.entry(gid).or_insert(0);
                *e += c;
                if *e == 0 {
                    expect.remove(&gid);
                }
            }
        }
        expect == self.windings[b]
    }

    /// Whether two explored rectangles meet: their developed interiors
    /// overlap and they lie on the same sheet around every guard.
    pub fn interiors_meet(&self, a: RectId, b: RectId) -> Result<bool, CoverError> {
        let (pa, pb) = (&self.rect(a)?.placement, &self.rect(b)?.placement);
        Ok(pa.interiors_overlap(pb) && (self.isometric || self.closes_flat(a, b)))
    }

    /// Breadth-first exploration of every slot up to `depth` steps from `from`.
    pub fn explore(&mut self, from: RectId, depth: usize) -> Result<(), CoverError> {
        self.rect(from)?;
        let mut seen = std::collections::HashSet::from([from]);
        let mut frontier = vec![from];
        for _ in 0..depth {
            let mut next = Vec::new();
            for r in frontier {
                let ty = self.rects[r].ty;
                for kind in [Kind::V, Kind::H] {
                    for s in 1..=self.g.slots(kind, ty) {
                        let n = self.extend(r, SlotRef { kind, rect: ty, slot: s })?;
                        if seen.insert(n) {
                            next.push(n);
                        }
                    }
                }
            }
            frontier = next;
        }
        Ok(())
    }

    fn search(&self, ty: usize, chart: &Chart, side: Side, target: Option<&Alg>) -> Result<Search, CoverError> {
        let base = self.placement_of(ty, chart);
        let line = base.line(side).clone();
        let mut out = Search { crossing: Vec::new(), periodic: Vec::new() };
        let root = Node { ty, chart: chart.clone(), path: Vec::new() };
        let mut stack = vec![(ty, chart.sign, chart.clone())];
        self.search_rec(&root, side, &line, target, &mut stack, &mut out)?;
        Ok(out)
    }

    fn search_rec(
        &self,
        node: &Node,
        side: Side,
        line: &Alg,
        target: Option<&Alg>,
        stack: &mut Vec<(usize, Sign, Chart)>,
        out: &mut Search,
    ) -> Result<(), CoverError> {
        if stack.len() > self.budget.max_depth {
            return Err(CoverError::Budget { what: "chain depth", limit: self.budget.max_depth });
        }
        let kind = if side.is_stable() { Kind::V } else { Kind::H };
        for s in 1..=self.g.slots(kind, node.ty) {
            let slot = SlotRef { kind, rect: node.ty, slot: s };
            let (ty, chart) = self.step_chart(node.ty, &node.chart, slot);
            let pl = self.placement_of(ty, &chart);
            if target.is_some_and(|x| !pl.along(side).contains(x)) {
                continue;
            }
            let mut path = node.path.clone();
            path.push(slot);
            let child = Node { ty, chart, path };
            if pl.crosses(side, line) {
                out.crossing.push(child);
                continue;
            }
            if let Some(pos) = stack.iter().position(|(t, sg, _)| *t == ty && *sg == child.chart.sign) {
                let a = &stack[pos].2;
                let (sa, aa, sc, ac) = if side.is_stable() {
                    (&a.sx, &a.ax, &child.chart.sx, &child.chart.ax)
                } else {
                    (&a.sy, &a.ay, &child.chart.sy, &child.chart.ay)
                };
                let alpha = sc / sa;
                let beta = ac - &(&alpha * aa);
                let one = self.field.one();
                let position = (alpha != one).then(|| &beta / &(&one - &alpha));
                // A targeted search only stops at the periodic point itself;
                // elsewhere the nested chain shrinks away from it.
                let passes = matches!((target, &position), (Some(x), Some(p)) if x != p);
                if !passes {
                    out.periodic.push((position, pos, child));
                    continue;
                }
            }
            stack.push((ty, child.chart.sign, child.chart.clone()));
            self.search_rec(&child, side, line, target, stack, out)?;
            stack.pop();
        }
        Ok(())
    }

    fn materialize(&mut self, base: RectId, path: &[SlotRef]) -> Result<Vec<RectId>, CoverError> {
        let mut out = vec![base];
        let mut cur = base;
        for &s in path {
            cur = self.extend(cur, s)?;
            out.push(cur);
        }
        Ok(out)
    }

    /// Crossing predecessors (stable sides) or crossing successors (unstable
    /// sides) of `r` with respect to `side`.
    pub fn crossing(&mut self, r: RectId, side: Side) -> Result<CrossingResult, CoverError> {
        if let Some(c) = self.crossing_cache.get(&(r, side)) {
            return Ok(c.clone());
        }
        let (ty, chart) = {
            let rr = self.rect(r)?;
            (rr.ty, rr.chart.clone())
        };
        let found = self.search(ty, &chart, side, None)?;
        let mut entries = Vec::new();
        for node in &found.crossing {
            let id = *self.materialize(r, &node.path)?.last().expect("non-empty");
            entries.push((self.rects[id].placement.along(side).lo.clone(), id, node.path.clone()));
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut periodic = Vec::new();
        for (position, pos, node) in found.periodic {
            let tail = *self.materialize(r, &node.path)?.last().expect("non-empty");
            periodic.push(PeriodicHit {
                position,
                prefix: node.path[..pos].to_vec(),
                period: node.path[pos..].to_vec(),
                tail,
            });
        }
        let result = CrossingResult {
            base: r,
            side,
            rects: entries.iter().map(|e| e.1).collect(),
            chains: entries.into_iter().map(|e| e.2).collect(),
            periodic,
        };
        self.crossing_cache.insert((r, side), result.clone());
        Ok(result)
    }

    /// Crossing predecessors of `r` for its top or bottom side.
    pub fn crossing_predecessors(&mut self, r: RectId, side: Side) -> Result<CrossingResult, CoverError> {
        if !side.is_stable() {
            return Err(CoverError::Inconsistent(format!("crossing predecessors need a stable side, got {side}")));
        }
        self.crossing(r, side)
    }

    /// Crossing successors of `r` for its left or right side.
    pub fn crossing_successors(&mut self, r: RectId, side: Side) -> Result<CrossingResult, CoverError> {
        if side.is_stable() {
            return Err(CoverError::Inconsistent(format!("crossing successors need an unstable side, got {side}")));
        }
        self.crossing(r, side)
    }

    /// Crossing rectangles of `r` for `side` whose closure contains the point
    /// at coordinate `at` along the side, each with its monotone chain from `r`.
    pub fn crossing_at(&mut self, r: RectId, side: Side, at: &Alg) -> Result<Vec<Vec<RectId>>, CoverError> {
        let (ty, chart) = {
            let rr = self.rect(r)?;
            (rr.ty, rr.chart.clone())
        };
        let found = self.search(ty, &chart, side, Some(at))?;
        if let Some((Some(p), _, _)) = found.periodic.first() {
            return Err(CoverError::Inconsistent(format!("point {} on the {side} side is periodic", p.to_f64())));
        }
        found.crossing.iter().map(|n| self.materialize(r, &n.path)).collect()
    }

    /// Boundary arc points on `side` of `r`: endpoints of crossing (and tail)
    /// rectangles inside the closed side, excluding periodic points.
    pub fn arc_points(&mut self, r: RectId, side: Side) -> Result<Vec<ArcPoint>, CoverError> {
        let res = self.crossing(r, side)?;
        let base = self.rects[r].placement.clone();
        let span = base.along(side).clone();
        let line = base.line(side).clone();
        let periodic: Vec<&Alg> = res.periodic.iter().filter_map(|p| p.position.as_ref()).collect();
        let mut points: BTreeMap<Alg, Vec<RectId>> = BTreeMap::new();
        let involved = res.rects.iter().copied().chain(res.periodic.iter().map(|p| p.tail));
        for id in involved {
            let iv = self.rects[id].placement.along(side).clone();
            for end in [iv.lo, iv.hi] {
                if span.contains(&end) && !periodic.contains(&&end) {
                    let inc = points.entry(end).or_default();
                    if !inc.contains(&id) {
                        inc.push(id);
                    }
                }
            }
        }
        Ok(points
            .into_iter()
            .map(|(along, mut incident)| {
                incident.sort_unstable();
                let (x, y) = if side.is_stable() { (along, line.clone()) } else { (line.clone(), along) };
                ArcPoint { x, y, base: r, side, incident }
            })
            .collect())
    }

    /// The positive or negative cycle around `(px, py)` starting from `l0`.
    pub fn arc_point_cycle(
        &mut self,
        px: &Alg,
        py: &Alg,
        l0: RectId,
        orientation: Orientation,
    ) -> Result<ArcCycle, CoverError> {
        let mask = self.rect(l0)?.placement.quadrants(px, py);
        let q0 = pair_start(mask).ok_or_else(|| {
            CoverError::NotAQuadrantPair(format!(
                "({}, {}) is not inside a side of rectangle {l0}",
                px.to_f64(),
                py.to_f64()
            ))
        })?;
        let mut rects = [l0; 5];
        let mut path = vec![l0];
        let mut marks = [0; 5];
        for k in 1..=4 {
            let cur = rects[k - 1];
            let cur_mask = self.rects[cur].placement.quadrants(px, py);
            let side = side_of_pair(pair_start(cur_mask).expect("each step keeps a quadrant pair"));
            let at = if side.is_stable() { px } else { py };
            let want = match orientation {
                Orientation::Positive => (q0 + k) % 4,
                Orientation::Negative => (q0 + 4 - k % 4) % 4,
            };
            let want_mask = (1u8 << want) | (1u8 << ((want + 1) % 4));
            let chains = self.crossing_at(cur, side, at)?;
            let picks: Vec<&Vec<RectId>> = chains
                .iter()
                .filter(|c| self.rects[*c.last().expect("non-empty")].placement.quadrants(px, py) == want_mask)
                .collect();
            if picks.len() != 1 {
                return Err(CoverError::NotAQuadrantPair(format!(
                    "step {k}: {} candidates cover the required quadrants",
                    picks.len()
                )));
            }
            let chain = picks[0].clone();
            path.extend_from_slice(&chain[1..]);
            rects[k] = *chain.last().expect("non-empty");
            marks[k] = path.len() - 1;
        }
        let checks = CycleChecks {
            l2_l0_disjoint: !self.interiors_meet(rects[2], rects[0])?,
            l3_l1_disjoint: !self.interiors_meet(rects[3], rects[1])?,
            l4_l2_disjoint: !self.interiors_meet(rects[4], rects[2])?,
            l4_l0_meet: self.interiors_meet(rects[4], rects[0])?,
        };
        Ok(ArcCycle { x: px.clone(), y: py.clone(), orientation, rects, path, marks, checks })
    }

    /// A base rectangle for cycles at `p`: the base of `p` when `p` lies
    /// inside its side, otherwise an incident crossing rectangle.
    pub fn cycle_base(&self, p: &ArcPoint) -> Option<RectId> {
        std::iter::once(p.base)
            .chain(p.incident.iter().copied())
            .find(|&r| pair_start(self.rects[r].placement.quadrants(&p.x, &p.y)).is_some())
    }

    /// Rectangles that are not tiled by their predecessors and successors.
    pub fn cover_axiom_violations(&mut self, r: RectId) -> Result<Vec<String>, CoverError> {
        let ty = self.rect(r)?.ty;
        let base = self.rects[r].placement.clone();
        let mut problems = Vec::new();
        for kind in [Kind::V, Kind::H] {
            let mut pieces = Vec::new();
            for s in 1..=self.g.slots(kind, ty) {
                let n = self.extend(r, SlotRef { kind, rect: ty, slot: s })?;
                let pl = &self.rects[n].placement;
                let (along, across, base_along, base_across) = match kind {
                    Kind::V => (&pl.x, &pl.y, &base.x, &base.y),
                    Kind::H => (&pl.y, &pl.x, &base.y, &base.x),
                };
                if !(across.lo <= base_across.lo && base_across.hi <= across.hi) {
                    problems.push(format!("neighbour {n} of {r} does not span it"));
                }
                let Some(i) = along.intersect(base_along) else {
                    problems.push(format!("neighbour {n} of {r} misses it"));
                    continue;
                };
                pieces.push(i);
            }
            let span = match kind {
                Kind::V => &base.x,
                Kind::H => &base.y,
            };
            if !tiles(span, &mut pieces) {
                problems.push(format!("{kind:?}-neighbours of {r} do not tile it"));
            }
        }
        Ok(problems)
    }

    /// Pairs of explored rectangles whose intersection is not Markovian.
    pub fn markov_violations(&self) -> Vec<(RectId, RectId)> {
        let mut out = Vec::new();
        for a in 0..self.rects.len() {
            for b in a + 1..self.rects.len() {
                let (fa, fb) = (self.approx[a], self.approx[b]);
                if fa[1] <= fb[0] - 1e-12 || fb[1] <= fa[0] - 1e-12 || fa[3] <= fb[2] - 1e-12 || fb[3] <= fa[2] - 1e-12 {
                    continue;
                }
                if !self.interiors_meet(a, b).unwrap_or(false) {
                    continue;
                }
                let (pa, pb) = (&self.rects[a].placement, &self.rects[b].placement);
                let i = pa.intersect(pb).expect("interiors overlap");
                let ok = (i.y == pa.y && i.x == pb.x) || (i.y == pb.y && i.x == pa.x);
                if !ok {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Replays every identification: the chart reached through the edge
    /// must equal the chart of the identified rectangle.
    pub fn identifications_sound(&self) -> bool {
        self.identifications.iter().all(|&(a, slot, b)| {
            let (_, chart) = self.step_chart(self.rects[a].ty, &self.rects[a].chart, slot);
            chart == self.rects[b].chart
        })
    }

    pub fn dump(&self) -> PatchDump {
        PatchDump {
            modulus: self.field.modulus().coeffs().iter().map(|c| c.to_string()).collect(),
            lambda: self.lambda.clone(),
            lambda_approx: self.lambda.to_f64(),
            rects: self
                .rects
                .iter()
                .map(|r| RectDump {
                    id: r.id,
                    ty: r.ty,
                    sign: r.chart.sign,
                    generation: r.chart.generation,
                    x: r.placement.x.clone(),
                    y: r.placement.y.clone(),
                    approx: self.approx[r.id],
                    shadow_of: r.shadow_of,
                })
                .collect(),
            edges: self.edges().map(|(from, slot, to)| EdgeDump { from, slot, to }).collect(),
            guards: self.guards.clone(),
        }
    }
}

/// Floating-point [`ray_crossing`]; `None` when too close to call.
fn ray_crossing_f64(g: &Guard, p: (f64, f64), q: (f64, f64), tol: f64) -> Option<i64> {
    if (p.1 - g.fy).abs() <= tol || (q.1 - g.fy).abs() <= tol {
        return None;
    }
    let (above_p, above_q) = (p.1 > g.fy, q.1 > g.fy);
    if above_p == above_q {
        return Some(0);
    }
    let xi = p.0 + (g.fy - p.1) * (q.0 - p.0) / (q.1 - p.1);
    if (xi - g.fx).abs() <= tol {
        return None;
    }
    Some(match (xi > g.fx, above_q) {
        (false, _) => 0,
        (true, true) => 1,
        (true, false) => -1,
    })
}

fn ray_crossing(g: &Guard, p: &(Alg, Alg), q: &(Alg, Alg)) -> i64 {
    let above_p = p.1 > g.y;
    let above_q = q.1 > g.y;
    if above_p == above_q {
        return 0;
    }
    let xi = &p.0 + &(&(&(&g.y - &p.1) * &(&q.0 - &p.0)) / &(&q.1 - &p.1));
    if xi > g.x {
        if above_q {
            1
        } else {
            -1
        }
    } else {
        0
    }
}

/// Index `q` such that `mask` is exactly quadrants `{q, q+1}`.
fn pair_start(mask: u8) -> Option<usize> {
    (0..4).find(|&q| mask == (1 << q) | (1 << ((q + 1) % 4)))
}

/// The side of a rectangle covering quadrant pair `{q, q+1}` that carries the point.
fn side_of_pair(q: usize) -> Side {
    match q {
        0 => Side::Bottom,
        1 => Side::Right,
        2 => Side::Top,
        _ => Side::Left,
    }
}

/// Whether `pieces` tile `span` with pairwise disjoint interiors.
pub fn tiles(span: &Interval, pieces: &mut [Interval]) -> bool {
    pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
    let mut cur = &span.lo;
    for p in pieces.iter() {
        if &p.lo != cur || p.hi <= p.lo {
            return false;
        }
        cur = &p.hi;
    }
    cur == &span.hi
}

#[derive(Debug, Clone, Serialize)]
pub struct RectDump {
    pub id: RectId,
    #[serde(rename = "type")]
    pub ty: usize,
    pub sign: Sign,
    pub generation: i32,
    pub x: Interval,
    pub y: Interval,
    pub approx: [f64; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shadow_of: Option<RectId>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeDump {
    pub from: RectId,
    pub slot: SlotRef,
    pub to: RectId,
}

/// JSON view of a patch; field elements are coefficient vectors in powers of `λ`.
#[derive(Debug, Clone, Serialize)]
pub struct PatchDump {
    pub modulus: Vec<String>,
    pub lambda: Alg,
    pub lambda_approx: f64,
    pub rects: Vec<RectDump>,
    pub edges: Vec<EdgeDump>,
    pub guards: Vec<Guard>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;
    use crate::model::named;

    fn q(f: &Arc<NumberField>, a: i64, b: i64) -> Alg {
        Alg::rational(f, Rational::new(a.into(), b.into()))
    }

    fn iv(f: &Arc<NumberField>, a: (i64, i64), b: (i64, i64)) -> Interval {
        Interval::new(q(f, a.0, a.1), q(f, b.0, b.1))
    }

    #[test]
    fn origin_placements() {
        let (p, r) = origin(&named::full2(), 1).unwrap();
        assert_eq!(p.len(), 1);
        let f = p.field().clone();
        assert_eq!(p.rect(r).unwrap().placement.x, iv(&f, (0, 1), (1, 1)));
        let (p, r) = origin(&named::gold(), 2).unwrap();
        let lay = layout(&named::gold(), LayoutMode::Perron).unwrap();
        let pl = &p.rect(r).unwrap().placement;
        assert_eq!(pl.x.len(), lay.rect(2).width);
        assert_eq!(pl.y.len(), lay.rect(2).height);
        assert!(matches!(origin(&named::gold(), 3), Err(CoverError::NoSuchType(3))));
    }

    #[test]
    fn full2_predecessor_is_left_half_and_twice_as_tall() {
        let (mut p, r0) = origin(&named::full2(), 1).unwrap();
        let f = p.field().clone();
        let pr = p.extend(r0, SlotRef::v(1, 1)).unwrap();
        let pl = p.rect(pr).unwrap().placement.clone();
        assert_eq!(pl.x, iv(&f, (0, 1), (1, 2)));
        assert_eq!(pl.y, iv(&f, (0, 1), (2, 1)));
        let back = p.extend(pr, SlotRef::h(1, 1)).unwrap();
        assert_eq!(back, r0);
        assert_eq!(p.slot_between(pr, r0), Some(SlotRef::h(1, 1)));
    }

    #[test]
    fn successor_of_predecessor_through_other_slot_is_identified() {
        let (mut p, r0) = origin(&named::cat(), 1).unwrap();
        p.explore(r0, 2).unwrap();
        assert!(!p.identifications().is_empty());
        assert!(p.identifications_sound());
    }

    #[test]
    fn triv_self_return_is_flagged_not_identified() {
        let (mut p, r0) = origin(&named::triv(), 1).unwrap();
        assert!(p.is_isometric());
        let a = p.extend(r0, SlotRef::v(1, 1)).unwrap();
        assert_ne!(a, r0);
        assert_eq!(p.rect(a).unwrap().placement, p.rect(r0).unwrap().placement);
        assert_eq!(p.rect(a).unwrap().shadow_of, Some(r0));
        let b = p.extend(a, SlotRef::v(1, 1)).unwrap();
        assert_ne!(b, r0);
        assert_eq!(p.extend(a, SlotRef::h(1, 1)).unwrap(), r0);
        let res = p.crossing_predecessors(r0, Side::Top).unwrap();
        assert!(res.is_degenerate());
        assert!(res.rects.is_empty());
        let pts = p.arc_points(r0, Side::Top).unwrap();
        assert_eq!(pts.len(), 2);
    }

    #[test]
    fn full2_top_is_periodic_with_period_one() {
        let (mut p, r0) = origin(&named::full2(), 1).unwrap();
        let f = p.field().clone();
        let res = p.crossing_predecessors(r0, Side::Top).unwrap();
        assert_eq!(res.rects.len(), 1);
        assert_eq!(res.periodic.len(), 1);
        let hit = &res.periodic[0];
        assert_eq!(hit.position, Some(f.one()));
        assert_eq!(hit.period, vec![SlotRef::v(1, 2)]);
        assert!(hit.prefix.is_empty());
        let pl = &p.rect(res.rects[0]).unwrap().placement;
        assert_eq!(pl.x, iv(&f, (0, 1), (1, 2)));
        let pts = p.arc_points(r0, Side::Top).unwrap();
        let xs: Vec<Alg> = pts.iter().map(|a| a.x.clone()).collect();
        assert_eq!(xs, vec![f.zero(), q(&f, 1, 2)]);
        assert_eq!(p.natural_periodic(1, Side::Top), &[f.one()]);
        assert_eq!(p.natural_periodic(1, Side::Bottom), &[f.zero()]);
        assert!(!p.guards().is_empty());
    }

    #[test]
    fn crossing_families_tile_their_side() {
        for g in [named::full2(), named::gold(), named::cat()] {
            let (mut p, r0) = origin(&g, 1).unwrap();
            for side in Side::ALL {
                let res = p.crossing(r0, side).unwrap();
                let base = p.rect(r0).unwrap().placement.along(side).clone();
                let mut pieces: Vec<Interval> = res
                    .rects
                    .iter()
                    .chain(res.periodic.iter().map(|h| &h.tail))
                    .map(|&id| p.rect(id).unwrap().placement.along(side).clone())
                    .collect();
                assert!(tiles(&base, &mut pieces), "{side}");
            }
        }
    }

    #[test]
    fn explored_rectangles_satisfy_cover_axioms() {
        for g in [named::full2(), named::gold(), named::cat()] {
            let (mut p, r0) = origin(&g, 1).unwrap();
            p.explore(r0, 2).unwrap();
            for r in 0..p.len() {
                assert!(p.cover_axiom_violations(r).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn cat_development_is_markovian() {
        let (mut p, r0) = origin(&named::cat(), 1).unwrap();
        p.explore(r0, 3).unwrap();
        assert!(p.markov_violations().is_empty());
        assert!(p.identifications_sound());
    }

    #[test]
    fn cat_cycles_are_reverses() {
        let (mut p, r0) = origin(&named::cat(), 1).unwrap();
        for side in [Side::Top, Side::Bottom] {
            for a in p.arc_points(r0, side).unwrap() {
                let l0 = p.cycle_base(&a).unwrap();
                let pos = p.arc_point_cycle(&a.x, &a.y, l0, Orientation::Positive).unwrap();
                let neg = p.arc_point_cycle(&a.x, &a.y, l0, Orientation::Negative).unwrap();
                assert!(pos.checks.all() && neg.checks.all());
                assert_eq!(
                    [neg.rects[1], neg.rects[2], neg.rects[3], neg.rects[4]],
                    [pos.rects[3], pos.rects[2], pos.rects[1], pos.rects[4]]
                );
            }
        }
    }

    #[test]
    fn full2_cycles_exist_but_do_not_close_up() {
        // FULL2 has no realization as a Markovian family: the negative cycle
        // at this arc point never comes back around, and the two cycles end
        // at different rectangles.
        let (mut p, r0) = origin(&named::full2(), 1).unwrap();
        let f = p.field().clone();
        let (x, y) = (q(&f, 1, 2), f.one());
        let pos = p.arc_point_cycle(&x, &y, r0, Orientation::Positive).unwrap();
        let neg = p.arc_point_cycle(&x, &y, r0, Orientation::Negative).unwrap();
        assert!(pos.checks.all());
        assert!(!neg.checks.l4_l0_meet);
        assert_ne!(pos.rects[3], neg.rects[1]);
        assert_ne!(pos.rects[4], neg.rects[4]);
    }

    #[test]
    fn corner_is_not_a_quadrant_pair() {
        let (mut p, r0) = origin(&named::full2(), 1).unwrap();
        let f = p.field().clone();
        let e = p.arc_point_cycle(&f.zero(), &f.one(), r0, Orientation::Positive).unwrap_err();
        assert!(matches!(e, CoverError::NotAQuadrantPair(_)));
        let e = p.arc_point_cycle(&q(&f, 1, 2), &q(&f, 1, 2), r0, Orientation::Positive).unwrap_err();
        assert!(matches!(e, CoverError::NotAQuadrantPair(_)));
    }

    #[test]
    fn budget_is_enforced() {
        let (mut p, r0) = origin_with_budget(&named::full2(), 1, Budget { max_rects: 5, max_depth: 32 }).unwrap();
        assert!(matches!(p.explore(r0, 4), Err(CoverError::Budget { .. })));
        assert_eq!(Budget::parse("50,7"), Some(Budget { max_rects: 50, max_depth: 7 }));
        assert_eq!(Budget::parse("50").map(|b| b.max_depth), Some(32));
        assert_eq!(Budget::parse("x"), None);
    }

    #[test]
    fn foreign_slot_is_rejected() {
        let (mut p, r0) = origin(&named::gold(), 2).unwrap();
        assert!(matches!(p.extend(r0, SlotRef::v(1, 1)), Err(CoverError::ForeignSlot(..))));
        assert!(matches!(p.extend(r0, SlotRef::v(2, 2)), Err(CoverError::ForeignSlot(..))));
    }
}
