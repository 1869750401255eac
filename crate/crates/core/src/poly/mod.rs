//! Multivariate polynomials with complex coefficients.
//!
//! A [`Polynomial`] stores its nonzero terms keyed by [`MultiIndex`]. The
//! symbol of a constant-coefficient operator `P(D)` is such a polynomial,
//! and every analysis in this crate evaluates it at real points.

mod rh;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};

pub use rh::{check_rh_uniformity, poly_rh_constant, reduced_rh_quotient, RhConstantEstimate};

/// Exponent vector of a monomial `ξ^α = ξ_1^{α_1} ⋯ ξ_n^{α_n}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α|`, the total degree of the monomial.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// All multi-indices of length `dim` with order at most `degree`, in
    /// graded lexicographic order.
    pub fn up_to_degree(dim: usize, degree: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for total in 0..=degree {
            let mut current = vec![0u32; dim];
            compositions(dim, total, 0, &mut current, &mut out);
        }
        out
    }

    fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &xi)| xi.powi(a as i32))
            .product()
    }
}

fn compositions(
    dim: usize,
    remaining: u32,
    axis: usize,
    current: &mut [u32],
    out: &mut Vec<MultiIndex>,
) {
    if dim == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if axis + 1 == dim {
        current[axis] = remaining;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for a in (0..=remaining).rev() {
        current[axis] = a;
        compositions(dim, remaining - a, axis + 1, current, out);
    }
    current[axis] = 0;
}

/// A polynomial `P(ξ) = Σ c_α ξ^α` in `dim` real variables.
///
/// Only nonzero coefficients are stored, so the zero polynomial has no
/// terms and degree 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolynomialDoc", into = "PolynomialDoc")]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: impl Into<Complex64>) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::zero(dim), c.into());
        p
    }

    /// `c · ξ^α`.
    pub fn monomial(exponents: Vec<u32>, c: impl Into<Complex64>) -> Self {
        let alpha = MultiIndex::new(exponents);
        let mut p = Self::zero(alpha.dim());
        p.add_term(alpha, c.into());
        p
    }

    /// The coordinate function `ξ_axis`.
    pub fn variable(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        Self::monomial(e, 1.0)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs. Repeated
    /// multi-indices are summed.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        if dim == 0 {
            return Err(invalid("dim", "polynomial dimension must be positive"));
        }
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            check_dim(dim, e.len())?;
            p.add_term(MultiIndex::new(e), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, alpha: MultiIndex, c: Complex64) {
        let sum = self.terms.get(&alpha).copied().unwrap_or_default() + c;
        if sum == Complex64::new(0.0, 0.0) {
            self.terms.remove(&alpha);
        } else {
            self.terms.insert(alpha, sum);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Complex64 {
        self.terms
            .get(&MultiIndex::new(exponents.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    pub fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        check_dim(self.dim, xi.len())?;
        Ok(self.eval_unchecked(xi))
    }

    /// Evaluation without the length check; callers guarantee `xi.len() == dim`.
    pub(crate) fn eval_unchecked(&self, xi: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(alpha, c)| c * alpha.monomial(xi))
            .sum()
    }

    /// Returns `Q` with `Q(ξ) = P(δξ + σ₀)`.
    pub fn translate_dilate(&self, delta: f64, shift: &[f64]) -> Result<Polynomial> {
        check_dim(self.dim, shift.len())?;
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid(
                "delta",
                format!("dilation must be positive, got {delta}"),
            ));
        }
        let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (alpha, &c) in &self.terms {
            // (δξ_j + σ_j)^{a} = Σ_k C(a,k) δ^k σ_j^{a-k} ξ_j^k, one factor per axis
            let factors: Vec<Vec<(u32, f64)>> = alpha
                .exponents()
                .iter()
                .zip(shift)
                .map(|(&a, &s)| {
                    (0..=a)
                        .map(|k| {
                            (
                                k,
                                binomial(a, k) * delta.powi(k as i32) * s.powi((a - k) as i32),
                            )
                        })
                        .filter(|&(_, w)| w != 0.0)
                        .collect()
                })
                .collect();
            let mut partial: Vec<(Vec<u32>, f64)> = vec![(Vec::with_capacity(self.dim), 1.0)];
            for axis in factors {
                partial = partial
                    .into_iter()
                    .flat_map(|(e, w)| {
                        axis.iter().map(move |&(k, wk)| {
                            let mut e = e.clone();
                            e.push(k);
                            (e, w * wk)
                        })
                    })
                    .collect();
            }
            for (e, w) in partial {
                *acc.entry(MultiIndex::new(e)).or_default() += c * w;
            }
        }
        acc.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        Ok(Polynomial {
            dim: self.dim,
            terms: acc,
        })
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (alpha, c) in &self.terms {
            out.add_term(alpha.clone(), c * s);
        }
        out
    }

    /// Parses the structured-text format
    /// `{"dim": n, "terms": [{"alpha": [...], "re": x, "im": y}, ...]}`.
    pub fn from_json(text: &str) -> Result<Polynomial> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polynomial serializes")
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (alpha, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            for (j, &a) in alpha.exponents().iter().enumerate() {
                match a {
                    0 => {}
                    1 => write!(f, "·ξ{}", j + 1)?,
                    _ => write!(f, "·ξ{}^{}", j + 1, a)?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim, "polynomial dimensions differ");
        let mut out = self.clone();
        for (alpha, &c) in &rhs.terms {
            out.add_term(alpha.clone(), c);
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim, "polynomial dimensions differ");
        let mut out = Polynomial::zero(self.dim);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &rhs.terms {
                let e = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
                out.add_term(MultiIndex(e), ca * cb);
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct PolynomialDoc {
    dim: usize,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    alpha: Vec<u32>,
    re: f64,
    im: f64,
}

impl TryFrom<PolynomialDoc> for Polynomial {
    type Error = Error;

    fn try_from(doc: PolynomialDoc) -> Result<Self> {
        Polynomial::from_terms(
            doc.dim,
            doc.terms
                .into_iter()
                .map(|t| (t.alpha, Complex64::new(t.re, t.im))),
        )
    }
}

impl From<Polynomial> for PolynomialDoc {
    fn from(p: Polynomial) -> Self {
        PolynomialDoc {
            dim: p.dim,
            terms: p
                .terms
                .into_iter()
                .map(|(alpha, c)| TermDoc {
                    alpha: alpha.0,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}
