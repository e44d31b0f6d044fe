//! Prong arithmetic under surgery along a periodic orbit.
//!
//! A periodic orbit with `n` prongs and rotation offset `k` carries the
//! vector `(n − k, n)`. A surgery matrix `A = (a b; c d)` acts on it by
//! `(n₂ − k₂, n₂) = (a(n₁−k₁) − c·n₁, −b(n₁−k₁) + d·n₁)`.

use num_integer::Integer;
use serde::Serialize;

use crate::error::SurgeryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ProngData {
    pub n: i64,
    pub k: i64,
}

impl ProngData {
    /// Checks `n ≥ 2` and normalizes `k` into `1..=n` by `k ← ((k − 1) mod n) + 1`.
    pub fn new(n: i64, k: i64) -> Result<Self, SurgeryError> {
        if n < 2 {
            return Err(SurgeryError::Prongs(n));
        }
        Ok(ProngData { n, k: (k - 1).rem_euclid(n) + 1 })
    }

    pub fn gcd(&self) -> i64 {
        self.n.gcd(&self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SurgeryMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl SurgeryMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, SurgeryError> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(SurgeryError::Det(det));
        }
        Ok(SurgeryMatrix { a, b, c, d })
    }

    pub const IDENTITY: SurgeryMatrix = SurgeryMatrix { a: 1, b: 0, c: 0, d: 1 };

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &SurgeryMatrix) -> SurgeryMatrix {
        SurgeryMatrix {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn inverse(&self) -> SurgeryMatrix {
        SurgeryMatrix { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ProngResult {
    Valid { n2: i64, k2: i64, gcd: i64 },
    /// The new orbit would be a 1-prong, which cannot occur.
    OneProng { n2: i64, k2: i64 },
    Invalid { n2: i64, k2: i64, reason: String },
}

impl ProngResult {
    pub fn data(&self) -> Option<ProngData> {
        match self {
            ProngResult::Valid { n2, k2, .. } => Some(ProngData { n: *n2, k: *k2 }),
            _ => None,
        }
    }

    pub fn raw(&self) -> (i64, i64) {
        match self {
            ProngResult::Valid { n2, k2, .. }
            | ProngResult::OneProng { n2, k2 }
            | ProngResult::Invalid { n2, k2, .. } => (*n2, *k2),
        }
    }
}

/// Whether `P = p_exp·p + m_exp·m` is the meridian/parallel relation for `p`,
/// i.e. `(m_exp, p_exp) = (−(n−k)/gcd(n,k), n/gcd(n,k))`.
pub fn meridian_parallel_check(p: ProngData, m_exp: i64, p_exp: i64) -> Result<bool, SurgeryError> {
    let g = p.gcd();
    if g == 0 || (p.n - p.k) % g != 0 || p.n % g != 0 {
        return Err(SurgeryError::Format { n: p.n, k: p.k });
    }
    Ok(m_exp == -(p.n - p.k) / g && p_exp == p.n / g)
}

pub fn prong_after_surgery(p: ProngData, m: SurgeryMatrix) -> Result<ProngResult, SurgeryError> {
    if m.det() != 1 {
        return Err(SurgeryError::Det(m.det()));
    }
    let r = p.n - p.k;
    let n2 = -m.b * r + m.d * p.n;
    let k2 = n2 - (m.a * r - m.c * p.n);
    Ok(if n2 == 1 {
        ProngResult::OneProng { n2, k2 }
    } else if n2 < 2 {
        ProngResult::Invalid { n2, k2, reason: format!("prong count {n2} is below 2") }
    } else if k2 < 1 || k2 > n2 {
        ProngResult::Invalid { n2, k2, reason: format!("offset {k2} outside 1..={n2}") }
    } else {
        ProngResult::Valid { n2, k2, gcd: n2.gcd(&k2) }
    })
}

/// `gcd(n₁, k₁) = gcd(n₂, k₂)`; `None` unless the surgery gives a valid orbit.
pub fn gcd_invariance_check(p: ProngData, m: SurgeryMatrix) -> Result<Option<bool>, SurgeryError> {
    Ok(prong_after_surgery(p, m)?.data().map(|q| q.gcd() == p.gcd()))
}
