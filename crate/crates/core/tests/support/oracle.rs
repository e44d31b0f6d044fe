//! Floating-point affine development, written independently of the exact
//! cover model, used as an oracle for crossing families. Shared by the
//! core integration tests and the acceptance run.

use geomtype::cover::{origin, tiles, Patch, RectId, Side};
use geomtype::model::{GeometricType, Kind, Sign, SlotRef};

/// Affine chart `(x, y) ↦ (sx·x + ax, sy·y + ay)`.
#[derive(Debug, Clone, Copy)]
struct Affine {
    sx: f64,
    ax: f64,
    sy: f64,
    ay: f64,
}

impl Affine {
    const ID: Affine = Affine { sx: 1.0, ax: 0.0, sy: 1.0, ay: 0.0 };

    fn then_inner(&self, f: &Affine) -> Affine {
        Affine { sx: self.sx * f.sx, ax: self.sx * f.ax + self.ax, sy: self.sy * f.sy, ay: self.sy * f.ay + self.ay }
    }

    fn inverse(&self) -> Affine {
        Affine { sx: 1.0 / self.sx, ax: -self.ax / self.sx, sy: 1.0 / self.sy, ay: -self.ay / self.sy }
    }

    fn image(&self, w: f64, h: f64) -> [f64; 4] {
        let (x0, x1) = (self.ax, self.sx * w + self.ax);
        let (y0, y1) = (self.ay, self.sy * h + self.ay);
        [x0.min(x1), x0.max(x1), y0.min(y1), y0.max(y1)]
    }
}

struct Oracle {
    g: GeometricType,
    lambda: f64,
    w: Vec<f64>,
    t: Vec<f64>,
    /// Return map of each H-slot, `rect i → its image V-slot`.
    ret: Vec<Vec<(usize, Affine)>>,
}

fn power_iteration(m: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let n = m.len();
    let mut v = vec![1.0 / n as f64; n];
    let mut lambda = 0.0;
    for _ in 0..5000 {
        // M + I has the same Perron vector and is aperiodic.
        let mut next: Vec<f64> = (0..n).map(|i| v[i] + (0..n).map(|j| m[i][j] * v[j]).sum::<f64>()).collect();
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= s);
        lambda = s - 1.0;
        v = next;
    }
    (lambda, v)
}

impl Oracle {
    fn new(g: &GeometricType) -> Self {
        let n = g.n();
        let mut m = vec![vec![0.0; n]; n];
        for tr in g.maps() {
            m[tr.h.0 - 1][tr.v.0 - 1] += 1.0;
        }
        let (lambda, t) = power_iteration(&m);
        let mt: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect();
        let (_, w) = power_iteration(&mt);
        let h_slot = |i: usize, k: usize| {
            let mut y = 0.0;
            for kk in 1..k {
                let tr = g.maps().iter().find(|tr| tr.h == (i, kk)).unwrap();
                y += t[tr.v.0 - 1] / lambda;
            }
            let tr = g.maps().iter().find(|tr| tr.h == (i, k)).unwrap();
            (y, y + t[tr.v.0 - 1] / lambda)
        };
        let v_slot = |j: usize, l: usize| {
            let mut x = 0.0;
            for ll in 1..l {
                let tr = g.maps().iter().find(|tr| tr.v == (j, ll)).unwrap();
                x += w[tr.h.0 - 1] / lambda;
            }
            let tr = g.maps().iter().find(|tr| tr.v == (j, l)).unwrap();
            (x, x + w[tr.h.0 - 1] / lambda)
        };
        let mut ret = vec![Vec::new(); n];
        for i in 1..=n {
            for k in 1..=g.h_of(i) {
                let tr = g.maps().iter().find(|tr| tr.h == (i, k)).unwrap();
                let (y0, y1) = h_slot(i, k);
                let (x0, x1) = v_slot(tr.v.0, tr.v.1);
                let f = match tr.sign {
                    Sign::Plus => Affine { sx: 1.0 / lambda, ax: x0, sy: lambda, ay: -lambda * y0 },
                    Sign::Minus => Affine { sx: -1.0 / lambda, ax: x1, sy: -lambda, ay: lambda * y1 },
                };
                ret[i - 1].push((tr.v.0, f));
            }
        }
        Oracle { g: g.clone(), lambda, w, t, ret }
    }

    /// Type and chart reached from `(ty, c)` through `slot`.
    fn step(&self, ty: usize, c: &Affine, slot: SlotRef) -> (usize, Affine) {
            match slot.kind {
            Kind::V => {
                let tr = self.g.maps().iter().find(|tr| tr.v == (ty, slot.slot)).unwrap();
                let (i, k) = tr.h;
                (i, c.then_inner(&self.ret[i - 1][k - 1].1))
            }
            Kind::H => {
                let (j, f) = self.ret[ty - 1][slot.slot - 1];
                (j, c.then_inner(&f.inverse()))
            }
        }
    }

    fn placement(&self, ty: usize, c: &Affine) -> [f64; 4] {
        c.image(self.w[ty - 1], self.t[ty - 1])
    }

    fn replay(&self, ty: usize, c: Affine, chain: &[SlotRef]) -> (usize, Affine) {
        chain.iter().fold((ty, c), |(t, c), &s| self.step(t, &c, s))
    }
}

fn chain_from_origin(p: &Patch, r: RectId) -> Vec<SlotRef> {
    let mut out = Vec::new();
    let mut cur = r;
    while let Some((parent, slot)) = p.rect(cur).unwrap().parent {
        out.push(slot);
        cur = parent;
    }
    out.reverse();
    out
}

fn close(a: &[f64; 4], b: &[f64; 4]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-8 * (1.0 + x.abs()))
}

fn along(pl: &[f64; 4], side: Side) -> (f64, f64) {
    if side.is_stable() {
        (pl[0], pl[1])
    } else {
        (pl[2], pl[3])
    }
}

fn beyond(pl: &[f64; 4], base: &[f64; 4], side: Side) -> bool {
    let eps = 1e-9;
    match side {
        Side::Top => pl[3] > base[3] + eps,
        Side::Bottom => pl[2] < base[2] - eps,
        Side::Left => pl[0] < base[0] - eps,
        Side::Right => pl[1] > base[1] + eps,
    }
}

/// Descends from the base towards `s` along the side until a rectangle
/// crosses it or `max` steps are taken; reports whether it crossed.
fn descend(o: &Oracle, ty: usize, c: Affine, side: Side, s: f64, max: usize) -> Option<(Vec<SlotRef>, bool)> {
    let base = o.placement(ty, &c);
    let kind = if side.is_stable() { Kind::V } else { Kind::H };
    let (mut t, mut ch) = (ty, c);
    let mut chain = Vec::new();
    for _ in 0..max {
        let mut next = None;
        for k in 1..=o.g.slots(kind, t) {
            let slot = SlotRef { kind, rect: t, slot: k };
            let (t2, c2) = o.step(t, &ch, slot);
            let (lo, hi) = along(&o.placement(t2, &c2), side);
            if lo < s && s < hi {
                next = Some((slot, t2, c2));
            }
        }
        let (slot, t2, c2) = next?;
        chain.push(slot);
        if beyond(&o.placement(t2, &c2), &base, side) {
            return Some((chain, true));
        }
        (t, ch) = (t2, c2);
    }
    Some((chain, false))
}

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

/// Develops `g` to `depth` from the origin and checks the crossing families
/// of a sample of rectangles against the oracle. Returns the number of
/// sample points checked.
pub fn check_crossings(g: &GeometricType, depth: usize) -> Result<usize, String> {
    let o = Oracle::new(g);
    let (mut p, r0) = origin(g, 1).map_err(|e| e.to_string())?;
    ensure((o.lambda - p.lambda().to_f64()).abs() < 1e-9, "expansion factors differ")?;
    p.explore(r0, depth).map_err(|e| e.to_string())?;
    let mut checked = 0;
    let bases: Vec<RectId> = (0..p.len()).step_by((p.len() / 12).max(1)).collect();
    for r in bases {
        let (ty, c) = o.replay(1, Affine::ID, &chain_from_origin(&p, r));
        let base = o.placement(ty, &c);
        let exact = p.rect(r).unwrap().placement.clone();
        let fx = |a: &geomtype::field::Alg| a.to_f64();
        ensure(close(&base, &[fx(&exact.x.lo), fx(&exact.x.hi), fx(&exact.y.lo), fx(&exact.y.hi)]), format!("placement of {r}"))?;
        for side in Side::ALL {
            let res = p.crossing(r, side).map_err(|e| e.to_string())?;
            let mut pieces = Vec::new();
            for (id, chain) in res.rects.iter().zip(&res.chains) {
                let (t2, c2) = o.replay(ty, c, chain);
                let pl = o.placement(t2, &c2);
                let e = &p.rect(*id).unwrap().placement;
                ensure(close(&pl, &[fx(&e.x.lo), fx(&e.x.hi), fx(&e.y.lo), fx(&e.y.hi)]), format!("placement of crossing {id}"))?;
                ensure(beyond(&pl, &base, side), format!("{id} does not cross {side} of {r}"))?;
                pieces.push((along(&pl, side), chain.clone(), true));
            }
            for h in &res.periodic {
                let chain: Vec<SlotRef> = h.prefix.iter().chain(&h.period).copied().collect();
                let (t2, c2) = o.replay(ty, c, &chain);
                pieces.push((along(&o.placement(t2, &c2), side), chain, false));
            }
            let mut spans: Vec<_> = pieces
                .iter()
                .map(|&((lo, hi), _, _)| (lo, hi))
                .collect();
            spans.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (lo, hi) = along(&base, side);
            ensure((spans[0].0 - lo).abs() < 1e-9 && (spans.last().unwrap().1 - hi).abs() < 1e-9, format!("{side} of {r}: ends not covered"))?;
            ensure(spans.windows(2).all(|w| (w[0].1 - w[1].0).abs() < 1e-9), format!("{side} of {r}: gap or overlap"))?;
            let mut exact_pieces: Vec<_> = res
                .rects
                .iter()
                .chain(res.periodic.iter().map(|h| &h.tail))
                .map(|&id| p.rect(id).unwrap().placement.along(side).clone())
                .collect();
            ensure(tiles(exact.along(side), &mut exact_pieces), format!("{side} of {r} is not tiled exactly"))?;
            for k in 0..16 {
                let s = lo + (hi - lo) * (k as f64 + 0.37) / 16.0;
                let Some((_, want, crossing)) = pieces.iter().find(|((a, b), _, _)| *a + 1e-9 < s && s < *b - 1e-9) else {
                    continue;
                };
                let (got, crossed) = descend(&o, ty, c, side, s, want.len()).ok_or_else(|| format!("no child of {r} contains {s}"))?;
                ensure(&got == want && crossed == *crossing, format!("descent to {s} on {side} of {r}"))?;
                checked += 1;
            }
        }
    }
    Ok(checked)
}
