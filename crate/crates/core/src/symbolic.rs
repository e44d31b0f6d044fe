//! Symbolic dynamics of a geometric type: transition matrices, irreducibility,
//! Perron data, entropy and closed-word counts.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::SymbolicError;
use crate::field::{Alg, NumberField, Poly, Rational};
use crate::model::GeometricType;

/// Highest minimal-polynomial degree handled with exact arithmetic.
pub const MAX_EXACT_DEGREE: usize = 4;

/// `M[i][j]` counts H-slots of rectangle `i` sent into rectangle `j`; `Mu`
/// weights each by its sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionMatrix {
    #[serde(rename = "M")]
    pub m: Vec<Vec<i64>>,
    #[serde(rename = "Mu")]
    pub mu: Vec<Vec<i64>>,
}

pub fn transition_matrix(g: &GeometricType) -> Result<TransitionMatrix, SymbolicError> {
    g.ensure_valid()?;
    let n = g.n();
    let mut m = vec![vec![0i64; n]; n];
    let mut mu = vec![vec![0i64; n]; n];
    for t in g.maps() {
        m[t.h.0 - 1][t.v.0 - 1] += 1;
        mu[t.h.0 - 1][t.v.0 - 1] += i64::from(t.sign.value());
    }
    Ok(TransitionMatrix { m, mu })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Structure {
    pub irreducible: bool,
    pub primitive: bool,
}

#[allow(clippy::needless_range_loop)]
fn reachability(m: &[Vec<i64>]) -> Vec<Vec<bool>> {
    let n = m.len();
    let mut r: Vec<Vec<bool>> = m.iter().map(|row| row.iter().map(|&x| x > 0).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

pub fn is_irreducible(m: &[Vec<i64>]) -> bool {
    let r = reachability(m);
    r.iter().all(|row| row.iter().all(|&x| x))
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] {
                for j in 0..n {
                    out[i][j] |= b[k][j];
                }
            }
        }
    }
    out
}

pub fn structure(g: &GeometricType) -> Result<Structure, SymbolicError> {
    let tm = transition_matrix(g)?;
    let n = g.n();
    let irreducible = is_irreducible(&tm.m);
    let base: Vec<Vec<bool>> = tm.m.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
    let e = n * n - 2 * n + 2;
    let mut acc = base.clone();
    for _ in 1..e {
        acc = bool_mul(&acc, &base);
    }
    let primitive = acc.iter().all(|r| r.iter().all(|&x| x));
    Ok(Structure { irreducible, primitive })
}

/// Characteristic polynomial `det(xI - M)` by Faddeev–LeVerrier.
pub fn charpoly(m: &[Vec<i64>]) -> Poly {
    let n = m.len();
    let a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::from(1);
    let mut mk = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigInt::zero();
                for l in 0..n {
                    s += &a[i][l] * &mk[l][j];
                }
                next[i][j] = s;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        let mut tr = BigInt::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &next[l][i];
            }
        }
        coeffs[n - k] = -tr / BigInt::from(k);
        mk = next;
    }
    Poly::new(coeffs.into_iter().map(Rational::from_integer).collect())
}

/// Spectral radius of a nonnegative integer matrix, isolated to `2^-bits`.
pub fn spectral_radius_interval(m: &[Vec<i64>], bits: u32) -> (Rational, Rational) {
    charpoly(m)
        .largest_real_root(bits)
        .expect("a nonnegative matrix has its spectral radius as a real eigenvalue")
}

pub fn spectral_radius(m: &[Vec<i64>]) -> f64 {
    let (lo, hi) = spectral_radius_interval(m, 80);
    ((lo + hi) / Rational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
}

/// Topological entropy of the symbolic system, `log ρ(M)`.
pub fn entropy(g: &GeometricType) -> Result<f64, SymbolicError> {
    let tm = transition_matrix(g)?;
    Ok(spectral_radius(&tm.m).ln())
}

fn mat_mul_u128(a: &[Vec<u128>], b: &[Vec<u128>], period: usize) -> Result<Vec<Vec<u128>>, SymbolicError> {
    let n = a.len();
    let mut out = vec![vec![0u128; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                let p = a[i][k].checked_mul(b[k][j]).ok_or(SymbolicError::Overflow(period))?;
                out[i][j] = out[i][j].checked_add(p).ok_or(SymbolicError::Overflow(period))?;
            }
        }
    }
    Ok(out)
}

/// Number of closed edge paths of length `period` in the transition digraph, `trace(M^period)`.
pub fn count_closed_words(g: &GeometricType, period: usize) -> Result<u128, SymbolicError> {
    if period == 0 || period > 12 {
        return Err(SymbolicError::Period(period));
    }
    let tm = transition_matrix(g)?;
    let base: Vec<Vec<u128>> = tm.m.iter().map(|r| r.iter().map(|&x| x as u128).collect()).collect();
    let mut acc = base.clone();
    for _ in 1..period {
        acc = mat_mul_u128(&acc, &base, period)?;
    }
    Ok((0..g.n()).map(|i| acc[i][i]).sum())
}

/// Minimal polynomial over `Q` of the spectral radius of `m`.
///
/// Candidate factors are products of `(x - λ)` with subsets of the other
/// roots of the square-free characteristic polynomial; the first one with
/// integer coefficients that divides exactly is the minimal polynomial.
pub fn minimal_polynomial(m: &[Vec<i64>]) -> Poly {
    let sf = charpoly(m).squarefree();
    let d = sf.degree().unwrap_or(0);
    let lambda = spectral_radius(m);
    if d <= 1 {
        return sf;
    }
    // companion matrix of the monic square-free part
    let c = sf.coeffs();
    let comp = DMatrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -c[i].to_f64().unwrap_or(0.0)
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut roots: Vec<(f64, f64)> = comp.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    if let Some(k) = roots
        .iter()
        .enumerate()
        .min_by(|a, b| {
            let da = (a.1 .0 - lambda).hypot(a.1 .1);
            let db = (b.1 .0 - lambda).hypot(b.1 .1);
            da.total_cmp(&db)
        })
        .map(|(k, _)| k)
    {
        roots.remove(k);
    }
    let others = roots.len();
    let mut masks: Vec<u32> = (0..(1u32 << others)).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        // product over complex numbers, lowest degree first
        let mut p: Vec<(f64, f64)> = vec![(-lambda, 0.0), (1.0, 0.0)];
        for (k, &(re, im)) in roots.iter().enumerate() {
            if mask & (1 << k) == 0 {
                continue;
            }
            let mut q = vec![(0.0, 0.0); p.len() + 1];
            for (i, &(a, b)) in p.iter().enumerate() {
                q[i + 1].0 += a;
                q[i + 1].1 += b;
                q[i].0 -= a * re - b * im;
                q[i].1 -= a * im + b * re;
            }
            p = q;
        }
        let near_int = p
            .iter()
            .all(|&(a, b)| b.abs() < 1e-6 && (a - a.round()).abs() < 1e-6 * (1.0 + a.abs()));
        if !near_int {
            continue;
        }
        let cand = Poly::new(
            p.iter()
                .map(|&(a, _)| Rational::from_integer(BigInt::from(a.round() as i64)))
                .collect(),
        );
        if sf.rem(&cand).is_zero() {
            return cand;
        }
    }
    sf
}

#[derive(Debug, Clone)]
pub struct ExactPerron {
    pub field: Arc<NumberField>,
    pub lambda: Alg,
    /// Left eigenvector, `Mᵀw = λw`, summing to 1.
    pub w: Vec<Alg>,
    /// Right eigenvector, `Mt = λt`, summing to 1.
    pub t: Vec<Alg>,
}

#[derive(Debug, Clone)]
pub struct PerronData {
    pub lambda: f64,
    pub w: Vec<f64>,
    pub t: Vec<f64>,
    pub minimal_polynomial: Poly,
    pub exact: Option<ExactPerron>,
}

impl PerronData {
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact(&self) -> Result<&ExactPerron, SymbolicError> {
        self.exact
            .as_ref()
            .ok_or(SymbolicError::DegreeTooLarge(self.minimal_polynomial.degree().unwrap_or(0)))
    }
}

#[allow(clippy::needless_range_loop)]
fn kernel_vector(mut a: Vec<Vec<Alg>>) -> Option<Vec<Alg>> {
    let rows = a.len();
    let cols = a.first()?.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inverse()?;
        for j in 0..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let delta = &f * &a[r][j];
                    a[i][j] = &a[i][j] - &delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let field = a[0][0].field().clone();
    let mut x = vec![field.zero(); cols];
    x[free] = field.one();
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = -&a[row][free];
    }
    Some(x)
}

fn normalized(v: Vec<Alg>) -> Option<Vec<Alg>> {
    let field = v[0].field().clone();
    let s = v.iter().fold(field.zero(), |acc, x| &acc + x);
    let inv = s.inverse()?;
    Some(v.iter().map(|x| x * &inv).collect())
}

fn power_iteration(m: &[Vec<i64>], transpose: bool) -> Vec<f64> {
    let n = m.len();
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..10_000 {
        let mut y = x.clone(); // (M + I) x
        for i in 0..n {
            for j in 0..n {
                let e = if transpose { m[j][i] } else { m[i][j] } as f64;
                y[i] += e * x[j];
            }
        }
        let s: f64 = y.iter().sum();
        y.iter_mut().for_each(|v| *v /= s);
        let diff = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = y;
        if diff < 1e-16 {
            break;
        }
    }
    x
}

/// Perron data of an irreducible transition matrix.
pub fn perron(g: &GeometricType) -> Result<PerronData, SymbolicError> {
    let tm = transition_matrix(g)?;
    perron_of(&tm.m)
}

pub fn perron_of(m: &[Vec<i64>]) -> Result<PerronData, SymbolicError> {
    if !is_irreducible(m) {
        return Err(SymbolicError::Reducible);
    }
    let n = m.len();
    let lambda_f = spectral_radius(m);
    let minpoly = minimal_polynomial(m);
    let deg = minpoly.degree().unwrap_or(0);
    let mut exact = None;
    if deg <= MAX_EXACT_DEGREE {
        let field = NumberField::from_largest_root(minpoly.clone())?;
        let lambda = field.generator();
        let build = |transpose: bool| -> Option<Vec<Alg>> {
            let a: Vec<Vec<Alg>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let e = if transpose { m[j][i] } else { m[i][j] };
                            let x = field.int(e);
                            if i == j {
                                &x - &lambda
                            } else {
                                x
                            }
                        })
                        .collect()
                })
                .collect();
            normalized(kernel_vector(a)?)
        };
        if let (Some(w), Some(t)) = (build(true), build(false)) {
            if w.iter().chain(&t).all(Alg::is_positive) {
                exact = Some(ExactPerron { field: field.clone(), lambda, w, t });
            }
        }
    }
    let (w, t) = match &exact {
        Some(e) => (e.w.iter().map(Alg::to_f64).collect(), e.t.iter().map(Alg::to_f64).collect()),
        None => (power_iteration(m, true), power_iteration(m, false)),
    };
    Ok(PerronData { lambda: lambda_f, w, t, minimal_polynomial: minpoly, exact })
}

/// `‖Mt − λt‖∞` for floating Perron data.
pub fn perron_residual(m: &[Vec<i64>], p: &PerronData) -> f64 {
    let n = m.len();
    (0..n)
        .map(|i| {
            let mt: f64 = (0..n).map(|j| m[i][j] as f64 * p.t[j]).sum();
            (mt - p.lambda * p.t[i]).abs()
        })
        .fold(0.0, f64::max)
}
