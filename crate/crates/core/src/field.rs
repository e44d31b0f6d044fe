//! Exact arithmetic in a simple real extension `Q(λ)`.
//!
//! Elements are coefficient vectors reduced modulo the minimal polynomial of
//! `λ`. Signs are decided exactly: zero is detected symbolically and a nonzero
//! element is evaluated on a rational isolating interval of `λ` that is
//! refined until the sign is forced.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::FieldError;

/// Rational numbers with arbitrary precision.
pub type Rational = BigRational;

/// Dense univariate polynomial over `Q`, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.0.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![Rational::zero(); n];
        for (k, c) in self.0.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in other.0.iter().enumerate() {
            out[k] += c;
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        Poly::new(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::default();
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::default(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = &r[k] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.0.iter().enumerate() {
                r[k - dd + j] -= &c * dc;
            }
            q[k - dd] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    pub fn monic(&self) -> Poly {
        let l = self.leading();
        if l.is_zero() {
            return self.clone();
        }
        self.scale(&l.recip())
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Square-free part `p / gcd(p, p')`, monic.
    pub fn squarefree(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    fn sturm_chain(&self) -> Vec<Poly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.scale(&-Rational::one()));
        }
        chain
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_roots(&self, a: &Rational, b: &Rational) -> usize {
        let chain = self.sturm_chain();
        sign_changes(&chain, a).saturating_sub(sign_changes(&chain, b))
    }

    /// Rational upper bound on the absolute value of every root (Cauchy).
    pub fn root_bound(&self) -> Rational {
        let lead = self.leading().abs();
        let mut m = Rational::zero();
        for c in &self.0[..self.0.len().saturating_sub(1)] {
            let q = c.abs() / &lead;
            if q > m {
                m = q;
            }
        }
        m + Rational::one()
    }

    /// Largest real root isolated to an interval `(lo, hi]` of width below `2^-bits`.
    pub fn largest_real_root(&self, bits: u32) -> Option<(Rational, Rational)> {
        let sf = self.squarefree();
        let hi0 = sf.root_bound();
        let lo0 = -hi0.clone();
        if sf.count_roots(&lo0, &hi0) == 0 {
            return None;
        }
        let (mut lo, mut hi) = (lo0, hi0);
        let eps = Rational::new(BigInt::one(), BigInt::one() << bits);
        let two = Rational::from_integer(2.into());
        while &hi - &lo > eps {
            let mid = (&lo + &hi) / &two;
            if sf.count_roots(&mid, &hi) >= 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some((lo, hi))
    }
}

fn sign_changes(chain: &[Poly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in chain {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// A real number field `Q(λ)` given by the minimal polynomial of `λ` and a
/// rational isolating interval for the chosen real root.
#[derive(Debug)]
pub struct NumberField {
    modulus: Poly,
    lo: Rational,
    hi: Rational,
}

impl NumberField {
    /// Field generated by the real root of `modulus` that lies in `(lo, hi]`.
    ///
    /// `modulus` must be irreducible over `Q`; this is the caller's
    /// responsibility and is not checked beyond square-freeness.
    pub fn new(modulus: Poly, lo: Rational, hi: Rational) -> Result<Arc<Self>, FieldError> {
        let modulus = modulus.monic();
        let d = modulus.degree().ok_or(FieldError::DegenerateModulus)?;
        if d == 0 {
            return Err(FieldError::DegenerateModulus);
        }
        if modulus.gcd(&modulus.derivative()).degree() != Some(0) {
            return Err(FieldError::NotSquarefree);
        }
        if modulus.count_roots(&lo, &hi) != 1 {
            return Err(FieldError::NotIsolated);
        }
        let (lo, hi) = if d == 1 {
            let r = -modulus.coeffs()[0].clone();
            (r.clone(), r)
        } else {
            let mut lo = lo;
            let mut hi = hi;
            let eps = Rational::new(BigInt::one(), BigInt::one() << 96u32);
            let two = Rational::from_integer(2.into());
            while &hi - &lo > eps {
                let mid = (&lo + &hi) / &two;
                if modulus.count_roots(&mid, &hi) == 1 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (lo, hi)
        };
        Ok(Arc::new(NumberField { modulus, lo, hi }))
    }

    /// The rationals, presented as `Q(1)`.
    pub fn rationals() -> Arc<Self> {
        let one = Rational::one();
        NumberField::new(Poly::from_ints(&[-1, 1]), Rational::zero(), one)
            .expect("x - 1 is a valid modulus")
    }

    /// Field generated by the largest real root of an integer polynomial factor.
    pub fn from_largest_root(modulus: Poly) -> Result<Arc<Self>, FieldError> {
        let (lo, hi) = modulus
            .largest_real_root(64)
            .ok_or(FieldError::NotIsolated)?;
        NumberField::new(modulus, lo, hi)
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap_or(0)
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    /// The generator `λ` as an element.
    pub fn generator(self: &Arc<Self>) -> Alg {
        if self.degree() == 1 {
            Alg::rational(self, -self.modulus.coeffs()[0].clone())
        } else {
            Alg::from_poly(self, Poly::new(vec![Rational::zero(), Rational::one()]))
        }
    }

    pub fn zero(self: &Arc<Self>) -> Alg {
        Alg::rational(self, Rational::zero())
    }

    pub fn one(self: &Arc<Self>) -> Alg {
        Alg::rational(self, Rational::one())
    }

    pub fn int(self: &Arc<Self>, k: i64) -> Alg {
        Alg::rational(self, Rational::from_integer(k.into()))
    }

    /// Approximation of `λ`.
    pub fn approx(&self) -> f64 {
        ((&self.lo + &self.hi) / Rational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    fn same(&self, other: &NumberField) -> bool {
        std::ptr::eq(self, other) || self.modulus == other.modulus && self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Element of a [`NumberField`].
#[derive(Clone)]
pub struct Alg {
    c: Vec<Rational>,
    field: Arc<NumberField>,
}

impl Alg {
    pub fn rational(field: &Arc<NumberField>, q: Rational) -> Alg {
        let mut c = vec![Rational::zero(); field.degree()];
        c[0] = q;
        Alg { c, field: field.clone() }
    }

    pub fn from_poly(field: &Arc<NumberField>, p: Poly) -> Alg {
        let r = if field.degree() == 1 {
            Poly::new(vec![p.eval(&-field.modulus.coeffs()[0].clone())])
        } else {
            p.rem(&field.modulus)
        };
        let mut c = r.0;
        c.resize(field.degree(), Rational::zero());
        Alg { c, field: field.clone() }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    /// Coordinates in the power basis `1, λ, …, λ^(d-1)`.
    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Some(&self.c[0])
        } else {
            None
        }
    }

    fn poly(&self) -> Poly {
        Poly::new(self.c.clone())
    }

    /// Exact sign, `-1`, `0` or `1`.
    pub fn signum(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if let Some(q) = self.as_rational() {
            return if q.is_positive() { 1 } else { -1 };
        }
        let p = self.poly();
        let modulus = &self.field.modulus;
        let mut lo = self.field.lo.clone();
        let mut hi = self.field.hi.clone();
        let two = Rational::from_integer(2.into());
        loop {
            let (a, b) = interval_eval(&p, &lo, &hi);
            if a.is_positive() {
                return 1;
            }
            if b.is_negative() {
                return -1;
            }
            let mid = (&lo + &hi) / &two;
            if modulus.eval(&mid).is_zero() {
                // only possible for a rational root, excluded for degree > 1
                return if p.eval(&mid).is_positive() { 1 } else { -1 };
            }
            if modulus.count_roots(&mid, &hi) == 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Alg {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn inverse(&self) -> Option<Alg> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(Alg::rational(&self.field, q.recip()));
        }
        // extended Euclid on (a, modulus)
        let (mut r0, mut r1) = (self.field.modulus.clone(), self.poly());
        let (mut s0, mut s1) = (Poly::default(), Poly::new(vec![Rational::one()]));
        while r1.degree().is_some_and(|d| d > 0) {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r1.is_zero() {
            return None;
        }
        let inv = s1.scale(&r1.coeffs()[0].recip());
        Some(Alg::from_poly(&self.field, inv))
    }

    pub fn pow(&self, e: i32) -> Alg {
        let base = if e < 0 {
            self.inverse().expect("negative power of zero")
        } else {
            self.clone()
        };
        let mut acc = Alg::rational(&self.field, Rational::one());
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            k >>= 1;
        }
        acc
    }

    pub fn half(&self) -> Alg {
        let h = Rational::new(BigInt::one(), BigInt::from(2));
        Alg { c: self.c.iter().map(|x| x * &h).collect(), field: self.field.clone() }
    }

    pub fn to_f64(&self) -> f64 {
        let mid = (&self.field.lo + &self.field.hi) / Rational::from_integer(2.into());
        self.poly().eval(&mid).to_f64().unwrap_or(f64::NAN)
    }

    /// Coefficients rendered as `p/q` strings.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.c.iter().map(|x| x.to_string()).collect()
    }

    fn check(&self, other: &Alg) {
        debug_assert!(self.field.same(&other.field), "mixing elements of different fields");
    }
}

fn interval_mul(a: &(Rational, Rational), b: &(Rational, Rational)) -> (Rational, Rational) {
    let p = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    let mut lo = p[0].clone();
    let mut hi = p[0].clone();
    for x in &p[1..] {
        if *x < lo {
            lo = x.clone();
        }
        if *x > hi {
            hi = x.clone();
        }
    }
    (lo, hi)
}

fn interval_eval(p: &Poly, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    let x = (lo.clone(), hi.clone());
    let mut acc = (Rational::zero(), Rational::zero());
    for c in p.coeffs().iter().rev() {
        let m = interval_mul(&acc, &x);
        acc = (m.0 + c, m.1 + c);
    }
    acc
}

impl PartialEq for Alg {
    fn eq(&self, other: &Self) -> bool {
        self.check(other);
        self.c == other.c
    }
}

impl Eq for Alg {}

impl Hash for Alg {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

impl PartialOrd for Alg {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Alg {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.c == other.c {
            return Ordering::Equal;
        }
        match (self - other).signum() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

/// Serialized as the coefficient vector in the power basis of `λ`.
impl serde::Serialize for Alg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&self.coeff_strings(), s)
    }
}

impl fmt::Debug for Alg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Alg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let mut first = true;
        for (k, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*L")?,
                _ => write!(f, "({c})*L^{k}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Alg> for &'a Alg {
    type Output = Alg;
    fn add(self, rhs: &'a Alg) -> Alg {
        self.check(rhs);
        Alg {
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect(),
            field: self.field.clone(),
        }
    }
}

impl<'a> Sub<&'a Alg> for &'a Alg {
    type Output = Alg;
    fn sub(self, rhs: &'a Alg) -> Alg {
        self.check(rhs);
        Alg {
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect(),
            field: self.field.clone(),
        }
    }
}

impl<'a> Mul<&'a Alg> for &'a Alg {
    type Output = Alg;
    fn mul(self, rhs: &'a Alg) -> Alg {
        self.check(rhs);
        if self.field.degree() == 1 {
            return Alg::rational(&self.field, &self.c[0] * &rhs.c[0]);
        }
        Alg::from_poly(&self.field, self.poly().mul(&rhs.poly()))
    }
}

impl<'a> Div<&'a Alg> for &'a Alg {
    type Output = Alg;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &'a Alg) -> Alg {
        self * &rhs.inverse().expect("division by zero in number field")
    }
}

impl Neg for &Alg {
    type Output = Alg;
    fn neg(self) -> Alg {
        Alg { c: self.c.iter().map(|a| -a).collect(), field: self.field.clone() }
    }
}

impl Neg for Alg {
    type Output = Alg;
    fn neg(self) -> Alg {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Alg> for Alg {
            type Output = Alg;
            fn $m(self, rhs: Alg) -> Alg {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Alg> for Alg {
            type Output = Alg;
            fn $m(self, rhs: &'a Alg) -> Alg {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Alg> for &'a Alg {
            type Output = Alg;
            fn $m(self, rhs: Alg) -> Alg {
                self.$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Arc<NumberField> {
        NumberField::from_largest_root(Poly::from_ints(&[-1, -1, 1])).unwrap()
    }

    #[test]
    fn golden_ratio_identities() {
        let f = golden();
        let l = f.generator();
        assert_eq!(&l * &l, &l + &f.one());
        assert_eq!(l.inverse().unwrap(), &l - &f.one());
        assert!((l.to_f64() - 1.618_033_988_749_895).abs() < 1e-15);
    }

    #[test]
    fn exact_signs_near_zero() {
        let f = golden();
        let l = f.generator();
        // F(30) * λ - F(31) is tiny and negative for even index
        let fib30 = f.int(832_040);
        let fib31 = f.int(1_346_269);
        let x = &(&fib30 * &l) - &fib31;
        assert_eq!(x.signum(), -1);
        let y = &(&f.int(1_346_269) * &l) - &f.int(2_178_309);
        assert_eq!(y.signum(), 1);
    }

    #[test]
    fn rational_field_behaves_like_q() {
        let f = NumberField::rationals();
        let a = f.int(3);
        let b = f.int(4);
        assert_eq!((&a / &b).as_rational().unwrap(), &Rational::new(3.into(), 4.into()));
        assert!(a < b);
    }

    #[test]
    fn powers_and_inverse_roundtrip() {
        let f = NumberField::from_largest_root(Poly::from_ints(&[-1, -1, 0, 1])).unwrap();
        let l = f.generator();
        for e in -6..=6 {
            assert_eq!(&l.pow(e) * &l.pow(-e), f.one());
        }
    }

    #[test]
    fn largest_root_isolation() {
        let p = Poly::from_ints(&[-2, 0, 1]);
        let (lo, hi) = p.largest_real_root(40).unwrap();
        let s = 2f64.sqrt();
        assert!(lo.to_f64().unwrap() <= s && s <= hi.to_f64().unwrap());
    }
}
