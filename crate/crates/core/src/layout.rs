//! Geometrisation: placing every rectangle and slot in the plane.
//!
//! In Perron mode rectangle `i` is `[0, w_i] × [0, t_i]` with `w`, `t` the
//! left and right Perron vectors, and slots tile their rectangle without
//! gaps. The return map `H_i^k → φ(H_i^k)` is then affine with linear part
//! `±diag(1/λ, λ)`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::SymbolicError;
use crate::field::{Alg, NumberField, Rational};
use crate::model::{GeometricType, Kind, Sign, SlotRef};
use crate::symbolic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutMode {
    Perron,
    Uniform,
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    pub lo: Alg,
    pub hi: Alg,
}

impl Interval {
    pub fn new(lo: Alg, hi: Alg) -> Self {
        Interval { lo, hi }
    }

    pub fn len(&self) -> Alg {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Alg) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Whether the open interiors meet.
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = std::cmp::max(&self.lo, &other.lo).clone();
        let hi = std::cmp::min(&self.hi, &other.hi).clone();
        (lo <= hi).then(|| Interval::new(lo, hi))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RectLayout {
    pub width: Alg,
    pub height: Alg,
    /// Vertical extent of each H-slot, bottom to top.
    pub h_slots: Vec<Interval>,
    /// Horizontal extent of each V-slot, left to right.
    pub v_slots: Vec<Interval>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Layout {
    pub mode: LayoutMode,
    #[serde(skip)]
    pub field: Arc<NumberField>,
    /// Expansion factor; exact in Perron mode only.
    pub lambda: Option<Alg>,
    pub lambda_approx: f64,
    pub rects: Vec<RectLayout>,
}

/// Affine map `(x, y) ↦ (s·x/λ + cx, s·λ·y + cy)` from rectangle `from`
/// onto its image V-slot in rectangle `to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnMap {
    pub from: usize,
    pub to: usize,
    pub sign: Sign,
    pub cx: Alg,
    pub cy: Alg,
}

impl Layout {
    pub fn rect(&self, i: usize) -> &RectLayout {
        &self.rects[i - 1]
    }

    pub fn slot(&self, s: SlotRef) -> &Interval {
        let r = self.rect(s.rect);
        match s.kind {
            Kind::H => &r.h_slots[s.slot - 1],
            Kind::V => &r.v_slots[s.slot - 1],
        }
    }

    /// Return map of `H_i^k` (Perron mode).
    pub fn return_map(&self, g: &GeometricType, i: usize, k: usize) -> Result<ReturnMap, SymbolicError> {
        let lambda = self
            .lambda
            .as_ref()
            .ok_or_else(|| SymbolicError::Model(crate::error::ModelError::Invalid("uniform layout has no return map".into())))?;
        let (v, sign) = g.return_image(SlotRef::h(i, k))?;
        let hy = self.slot(SlotRef::h(i, k));
        let vx = self.slot(v);
        let (cx, cy) = match sign {
            Sign::Plus => (vx.lo.clone(), -(lambda * &hy.lo)),
            Sign::Minus => (vx.hi.clone(), lambda * &hy.hi),
        };
        Ok(ReturnMap { from: i, to: v.rect, sign, cx, cy })
    }
}

/// Lay out `g` in the requested mode.
pub fn layout(g: &GeometricType, mode: LayoutMode) -> Result<Layout, SymbolicError> {
    match mode {
        LayoutMode::Perron => perron_layout(g),
        LayoutMode::Uniform => uniform_layout(g),
    }
}

fn perron_layout(g: &GeometricType) -> Result<Layout, SymbolicError> {
    let p = symbolic::perron(g)?;
    let e = p.exact()?;
    let lambda = e.lambda.clone();
    let inv_l = lambda.inverse().expect("λ ≥ 1");
    let tables = g.tables()?;
    let mut rects = Vec::with_capacity(g.n());
    for i in 1..=g.n() {
        let mut y = e.field.zero();
        let mut h_slots = Vec::new();
        for k in 1..=g.h_of(i) {
            let (j, _, _) = tables.phi(i, k);
            let next = &y + &(&e.t[j - 1] * &inv_l);
            h_slots.push(Interval::new(y, next.clone()));
            y = next;
        }
        let mut x = e.field.zero();
        let mut v_slots = Vec::new();
        for l in 1..=g.v_of(i) {
            let (src, _, _) = tables.inv(i, l);
            let next = &x + &(&e.w[src - 1] * &inv_l);
            v_slots.push(Interval::new(x, next.clone()));
            x = next;
        }
        debug_assert_eq!(y, e.t[i - 1]);
        debug_assert_eq!(x, e.w[i - 1]);
        rects.push(RectLayout { width: e.w[i - 1].clone(), height: e.t[i - 1].clone(), h_slots, v_slots });
    }
    Ok(Layout {
        mode: LayoutMode::Perron,
        field: e.field.clone(),
        lambda: Some(lambda),
        lambda_approx: p.lambda,
        rects,
    })
}

fn gapped(field: &Arc<NumberField>, m: usize) -> Vec<Interval> {
    let d = (2 * m + 1) as i64;
    (1..=m as i64)
        .map(|k| {
            let q = |a: i64| Alg::rational(field, Rational::new(a.into(), d.into()));
            Interval::new(q(2 * k - 1), q(2 * k))
        })
        .collect()
}

fn uniform_layout(g: &GeometricType) -> Result<Layout, SymbolicError> {
    g.ensure_valid()?;
    let field = NumberField::rationals();
    let tm = symbolic::transition_matrix(g)?;
    let rects = (1..=g.n())
        .map(|i| RectLayout {
            width: field.one(),
            height: field.one(),
            h_slots: gapped(&field, g.h_of(i)),
            v_slots: gapped(&field, g.v_of(i)),
        })
        .collect();
    Ok(Layout {
        mode: LayoutMode::Uniform,
        field,
        lambda: None,
        lambda_approx: symbolic::spectral_radius(&tm.m),
        rects,
    })
}

/// Linear part of one return map, as exact ratios.
#[derive(Debug, Clone, Serialize)]
pub struct AffineCheck {
    pub slot: SlotRef,
    /// Image width over source width; `1/λ` when affine.
    pub width_ratio: Alg,
    /// Image height over source height; `λ` when affine.
    pub height_ratio: Alg,
    pub exact: bool,
}

/// For every H-slot, compare how the return map scales width and height
/// against `1/λ` and `λ`, exactly.
pub fn check_return_maps(g: &GeometricType, lay: &Layout) -> Result<Vec<AffineCheck>, SymbolicError> {
    let lambda = match &lay.lambda {
        Some(l) => l.clone(),
        None => Alg::rational(&lay.field, Rational::from_float(lay.lambda_approx).unwrap_or_default()),
    };
    let inv_l = lambda.inverse().expect("λ ≥ 1");
    let mut out = Vec::new();
    for i in 1..=g.n() {
        for k in 1..=g.h_of(i) {
            let s = SlotRef::h(i, k);
            let (v, _) = g.return_image(s)?;
            let width_ratio = &lay.slot(v).len() / &lay.rect(i).width;
            let height_ratio = &lay.rect(v.rect).height / &lay.slot(s).len();
            let exact = width_ratio == inv_l && height_ratio == lambda;
            out.push(AffineCheck { slot: s, width_ratio, height_ratio, exact });
        }
    }
    Ok(out)
}
