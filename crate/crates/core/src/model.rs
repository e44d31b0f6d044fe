//! Geometric types: the finite data `(n, h, v, φ, u)` and its validation.
//!
//! Rectangles are numbered `1..=n`. Rectangle `i` carries `h[i-1]` horizontal
//! slots `H_i^1..` ordered bottom to top and `v[i-1]` vertical slots `V_i^1..`
//! ordered left to right. `φ` sends every H-slot to a V-slot, and `u` records
//! whether that return map preserves or reverses orientation.

use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    H,
    V,
}

impl Kind {
    pub fn other(self) -> Kind {
        match self {
            Kind::H => Kind::V,
            Kind::V => Kind::H,
        }
    }
}

/// Orientation sign in `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i32(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_value(v).ok_or_else(|| serde::de::Error::custom("sign must be 1 or -1"))
    }
}

/// A slot `H_rect^slot` or `V_rect^slot`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotRef {
    pub kind: Kind,
    pub rect: usize,
    pub slot: usize,
}

impl SlotRef {
    pub fn h(rect: usize, slot: usize) -> Self {
        SlotRef { kind: Kind::H, rect, slot }
    }

    pub fn v(rect: usize, slot: usize) -> Self {
        SlotRef { kind: Kind::V, rect, slot }
    }
}

impl fmt::Display for SlotRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            Kind::H => 'H',
            Kind::V => 'V',
        };
        write!(f, "{k}{}.{}", self.rect, self.slot)
    }
}

impl FromStr for SlotRef {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut chars = s.chars();
        let kind = match chars.next() {
            Some('H') => Kind::H,
            Some('V') => Kind::V,
            _ => return Err(format!("slot reference must start with H or V: {s:?}")),
        };
        let rest = chars.as_str();
        let (a, b) = rest
            .split_once('.')
            .ok_or_else(|| format!("slot reference needs <rect>.<slot>: {s:?}"))?;
        let rect = a.parse::<usize>().map_err(|_| format!("bad rectangle index in {s:?}"))?;
        let slot = b.parse::<usize>().map_err(|_| format!("bad slot index in {s:?}"))?;
        Ok(SlotRef { kind, rect, slot })
    }
}

impl Serialize for SlotRef {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SlotRef {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One entry `φ(H_i^j) = V_k^l` with sign `u(H_i^j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub h: (usize, usize),
    pub v: (usize, usize),
    pub sign: Sign,
}

/// Candidate geometric type. Any data is accepted; [`GeometricType::validate`]
/// decides whether it is a geometric type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeometricType {
    n: usize,
    h: Vec<usize>,
    v: Vec<usize>,
    maps: Vec<Transition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoRectangles,
    LengthMismatch { h: usize, v: usize, n: usize },
    ZeroSlots { rect: usize, which: Kind },
    SumMismatch { h: usize, v: usize },
    SlotOutOfRange { slot: SlotRef },
    DuplicateSource { slot: SlotRef },
    DuplicateTarget { slot: SlotRef },
    MissingSource { slot: SlotRef },
    MissingTarget { slot: SlotRef },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoRectangles => write!(f, "n must be positive"),
            Violation::LengthMismatch { h, v, n } => {
                write!(f, "expected {n} rectangles, got {h} h-counts and {v} v-counts")
            }
            Violation::ZeroSlots { rect, which } => {
                write!(f, "rectangle {rect} has no {which:?}-slots")
            }
            Violation::SumMismatch { h, v } => write!(f, "sum mismatch: sum h = {h} != sum v = {v}"),
            Violation::SlotOutOfRange { slot } => write!(f, "{slot} is out of range"),
            Violation::DuplicateSource { slot } => write!(f, "{slot} is mapped more than once"),
            Violation::DuplicateTarget { slot } => write!(f, "{slot} is hit more than once"),
            Violation::MissingSource { slot } => write!(f, "{slot} has no image"),
            Violation::MissingTarget { slot } => write!(f, "{slot} is not hit"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return writeln!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

impl GeometricType {
    /// Builds a candidate type. Maps are kept sorted by source slot.
    pub fn new(n: usize, h: Vec<usize>, v: Vec<usize>, mut maps: Vec<Transition>) -> Self {
        maps.sort();
        GeometricType { n, h, v, maps }
    }

    /// Builds and validates.
    pub fn checked(
        n: usize,
        h: Vec<usize>,
        v: Vec<usize>,
        maps: Vec<Transition>,
    ) -> Result<Self, ModelError> {
        let g = GeometricType::new(n, h, v, maps);
        g.ensure_valid()?;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &[usize] {
        &self.h
    }

    pub fn v(&self) -> &[usize] {
        &self.v
    }

    /// Slot count of rectangle `i` (1-based).
    pub fn h_of(&self, i: usize) -> usize {
        self.h[i - 1]
    }

    pub fn v_of(&self, i: usize) -> usize {
        self.v[i - 1]
    }

    pub fn slots(&self, kind: Kind, i: usize) -> usize {
        match kind {
            Kind::H => self.h_of(i),
            Kind::V => self.v_of(i),
        }
    }

    pub fn maps(&self) -> &[Transition] {
        &self.maps
    }

    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();
        if self.n == 0 {
            out.push(Violation::NoRectangles);
        }
        if self.h.len() != self.n || self.v.len() != self.n {
            out.push(Violation::LengthMismatch { h: self.h.len(), v: self.v.len(), n: self.n });
            return ValidationReport { violations: out };
        }
        for i in 1..=self.n {
            if self.h_of(i) == 0 {
                out.push(Violation::ZeroSlots { rect: i, which: Kind::H });
            }
            if self.v_of(i) == 0 {
                out.push(Violation::ZeroSlots { rect: i, which: Kind::V });
            }
        }
        let sh: usize = self.h.iter().sum();
        let sv: usize = self.v.iter().sum();
        if sh != sv {
            out.push(Violation::SumMismatch { h: sh, v: sv });
        }
        let mut seen_h = vec![Vec::new(); self.n];
        let mut seen_v = vec![Vec::new(); self.n];
        for i in 0..self.n {
            seen_h[i] = vec![0usize; self.h[i]];
            seen_v[i] = vec![0usize; self.v[i]];
        }
        for t in &self.maps {
            let hs = SlotRef::h(t.h.0, t.h.1);
            let vs = SlotRef::v(t.v.0, t.v.1);
            if self.contains(hs) {
                seen_h[t.h.0 - 1][t.h.1 - 1] += 1;
            } else {
                out.push(Violation::SlotOutOfRange { slot: hs });
            }
            if self.contains(vs) {
                seen_v[t.v.0 - 1][t.v.1 - 1] += 1;
            } else {
                out.push(Violation::SlotOutOfRange { slot: vs });
            }
        }
        for i in 0..self.n {
            for (j, &c) in seen_h[i].iter().enumerate() {
                let s = SlotRef::h(i + 1, j + 1);
                match c {
                    0 => out.push(Violation::MissingSource { slot: s }),
                    1 => {}
                    _ => out.push(Violation::DuplicateSource { slot: s }),
                }
            }
            for (j, &c) in seen_v[i].iter().enumerate() {
                let s = SlotRef::v(i + 1, j + 1);
                match c {
                    0 => out.push(Violation::MissingTarget { slot: s }),
                    1 => {}
                    _ => out.push(Violation::DuplicateTarget { slot: s }),
                }
            }
        }
        ValidationReport { violations: out }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    pub fn ensure_valid(&self) -> Result<(), ModelError> {
        let r = self.validate();
        if r.is_valid() {
            Ok(())
        } else {
            Err(ModelError::Invalid(r.violations[0].to_string()))
        }
    }

    /// Whether `s` names an existing slot.
    pub fn contains(&self, s: SlotRef) -> bool {
        s.rect >= 1
            && s.rect <= self.n
            && s.rect <= self.h.len()
            && s.rect <= self.v.len()
            && s.slot >= 1
            && s.slot <= self.slots(s.kind, s.rect)
    }

    /// `(φ(r), u(r))` for an H-slot.
    pub fn return_image(&self, r: SlotRef) -> Result<(SlotRef, Sign), ModelError> {
        if r.kind != Kind::H {
            return Err(ModelError::Kind { expected: Kind::H, got: r });
        }
        self.maps
            .binary_search_by(|t| t.h.cmp(&(r.rect, r.slot)))
            .ok()
            .map(|k| {
                let t = self.maps[k];
                (SlotRef::v(t.v.0, t.v.1), t.sign)
            })
            .ok_or(ModelError::NoSuchSlot(r))
    }

    /// `(φ⁻¹(r), u(φ⁻¹(r)))` for a V-slot.
    pub fn return_preimage(&self, r: SlotRef) -> Result<(SlotRef, Sign), ModelError> {
        if r.kind != Kind::V {
            return Err(ModelError::Kind { expected: Kind::V, got: r });
        }
        self.maps
            .iter()
            .find(|t| t.v == (r.rect, r.slot))
            .map(|t| (SlotRef::h(t.h.0, t.h.1), t.sign))
            .ok_or(ModelError::NoSuchSlot(r))
    }

    /// Dense lookup tables; requires a valid type.
    pub fn tables(&self) -> Result<Tables, ModelError> {
        self.ensure_valid()?;
        let mut phi: Vec<Vec<(usize, usize, Sign)>> =
            self.h.iter().map(|&k| vec![(0, 0, Sign::Plus); k]).collect();
        let mut inv: Vec<Vec<(usize, usize, Sign)>> =
            self.v.iter().map(|&k| vec![(0, 0, Sign::Plus); k]).collect();
        for t in &self.maps {
            phi[t.h.0 - 1][t.h.1 - 1] = (t.v.0, t.v.1, t.sign);
            inv[t.v.0 - 1][t.v.1 - 1] = (t.h.0, t.h.1, t.sign);
        }
        Ok(Tables { phi, inv })
    }
}

/// Dense `φ` and `φ⁻¹` for a valid type, 0-based outer indices, 1-based values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tables {
    phi: Vec<Vec<(usize, usize, Sign)>>,
    inv: Vec<Vec<(usize, usize, Sign)>>,
}

impl Tables {
    /// `φ(H_i^k) = V_j^l` as `(j, l, u)`.
    pub fn phi(&self, i: usize, k: usize) -> (usize, usize, Sign) {
        self.phi[i - 1][k - 1]
    }

    /// `φ⁻¹(V_j^l) = H_i^k` as `(i, k, u)`.
    pub fn inv(&self, j: usize, l: usize) -> (usize, usize, Sign) {
        self.inv[j - 1][l - 1]
    }

    /// Rectangle type reached from a rectangle of type `from` through `slot`:
    /// a V-slot leads to the predecessor's type, an H-slot to the successor's.
    pub fn neighbor_type(&self, slot: SlotRef) -> usize {
        match slot.kind {
            Kind::H => self.phi(slot.rect, slot.slot).0,
            Kind::V => self.inv(slot.rect, slot.slot).0,
        }
    }

    /// The slot of the neighbor through which one steps back.
    pub fn back_slot(&self, slot: SlotRef) -> SlotRef {
        match slot.kind {
            Kind::H => {
                let (j, l, _) = self.phi(slot.rect, slot.slot);
                SlotRef::v(j, l)
            }
            Kind::V => {
                let (i, k, _) = self.inv(slot.rect, slot.slot);
                SlotRef::h(i, k)
            }
        }
    }
}

/// Named small types used throughout tests and examples.
pub mod named {
    use super::*;

    fn t(h: (usize, usize), v: (usize, usize), sign: Sign) -> Transition {
        Transition { h, v, sign }
    }

    /// One rectangle, one slot.
    pub fn triv() -> GeometricType {
        GeometricType::new(1, vec![1], vec![1], vec![t((1, 1), (1, 1), Sign::Plus)])
    }

    /// One rectangle, two parallel slots: the full two-shift.
    pub fn full2() -> GeometricType {
        GeometricType::new(
            1,
            vec![2],
            vec![2],
            vec![t((1, 1), (1, 1), Sign::Plus), t((1, 2), (1, 2), Sign::Plus)],
        )
    }

    /// Two rectangles with transition matrix `[[1,1],[1,0]]`.
    pub fn gold() -> GeometricType {
        GeometricType::new(
            2,
            vec![2, 1],
            vec![2, 1],
            vec![
                t((1, 1), (1, 1), Sign::Plus),
                t((1, 2), (2, 1), Sign::Plus),
                t((2, 1), (1, 2), Sign::Plus),
            ],
        )
    }

    /// Two-square Markov partition of the toral automorphism `[[2,1],[1,1]]`,
    /// with transition matrix `[[2,1],[1,1]]`.
    pub fn cat() -> GeometricType {
        GeometricType::new(
            2,
            vec![3, 2],
            vec![3, 2],
            vec![
                t((1, 1), (1, 1), Sign::Plus),
                t((2, 1), (1, 2), Sign::Plus),
                t((1, 2), (1, 3), Sign::Plus),
                t((2, 2), (2, 1), Sign::Plus),
                t((1, 3), (2, 2), Sign::Plus),
            ],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    #[test]
    fn named_types_are_valid() {
        for g in [triv(), full2(), gold(), cat()] {
            assert!(g.is_valid(), "{g:?}");
        }
    }

    #[test]
    fn sum_mismatch_is_reported() {
        let g = GeometricType::new(
            1,
            vec![2],
            vec![1],
            vec![Transition { h: (1, 1), v: (1, 1), sign: Sign::Plus }],
        );
        let r = g.validate();
        assert!(r.violations.contains(&Violation::SumMismatch { h: 2, v: 1 }));
    }

    #[test]
    fn return_image_and_inverse() {
        let g = full2();
        assert_eq!(g.return_image(SlotRef::h(1, 2)).unwrap(), (SlotRef::v(1, 2), Sign::Plus));
        let g = gold();
        assert_eq!(g.return_preimage(SlotRef::v(1, 2)).unwrap(), (SlotRef::h(2, 1), Sign::Plus));
        assert!(matches!(g.return_image(SlotRef::v(1, 1)), Err(ModelError::Kind { .. })));
        assert!(matches!(g.return_preimage(SlotRef::h(1, 1)), Err(ModelError::Kind { .. })));
    }

    #[test]
    fn slot_ref_text_roundtrip() {
        for s in [SlotRef::h(1, 2), SlotRef::v(13, 4)] {
            assert_eq!(s.to_string().parse::<SlotRef>().unwrap(), s);
        }
        assert!("X1.2".parse::<SlotRef>().is_err());
    }

    #[test]
    fn sign_algebra() {
        assert_eq!(Sign::Minus * Sign::Minus, Sign::Plus);
        assert_eq!(-Sign::Plus, Sign::Minus);
    }
}
