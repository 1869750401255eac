//! Weights and Muckenhoupt-type quotients over cubes.
//!
//! All averages are tensor midpoint means over a [`Cube`]. Blow-up is a
//! legitimate answer here (the weight is not in the class), so the
//! estimators report it in band as `f64::INFINITY` rather than as an error.

mod family;
mod quotient;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::poly::Polynomial;

pub use family::{
    critical_exponent, sup_ap_quotient, ApReport, CriticalExponent, CubeFamily, CubeQuotient,
    BLOWUP_THRESHOLD, CONTRACTION_LIMIT, P_MAX,
};
pub use quotient::{
    a1_quotient, ap_quotient, decay_integral, doubling_quotient, reverse_holder_quotient,
};

/// How a [`Weight`] is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFamily {
    /// `|P(x)|`.
    PolynomialModulus(Polynomial),
    /// `|x|^alpha` with the Euclidean norm.
    Power { alpha: f64 },
    /// The constant `c > 0`.
    Constant { c: f64 },
    /// Pointwise product of the factors.
    Product(Vec<Weight>),
    /// `base(x)^exponent`. Produced by [`dual_weight`] for families without
    /// a closed form under powers.
    Powered { base: Box<Weight>, exponent: f64 },
}

/// A nonnegative function on `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightDoc", into = "WeightDoc")]
pub struct Weight {
    dim: usize,
    family: WeightFamily,
}

impl Weight {
    pub fn power(dim: usize, alpha: f64) -> Result<Self> {
        positive_dim(dim)?;
        if !alpha.is_finite() {
            return Err(invalid("alpha", "exponent must be finite"));
        }
        Ok(Weight {
            dim,
            family: WeightFamily::Power { alpha },
        })
    }

    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        positive_dim(dim)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid(
                "c",
                format!("constant weight must be positive, got {c}"),
            ));
        }
        Ok(Weight {
            dim,
            family: WeightFamily::Constant { c },
        })
    }

    pub fn poly_modulus(poly: Polynomial) -> Self {
        Weight {
            dim: poly.dim(),
            family: WeightFamily::PolynomialModulus(poly),
        }
    }

    pub fn product(factors: Vec<Weight>) -> Result<Self> {
        let dim = factors
            .first()
            .map(Weight::dim)
            .ok_or_else(|| invalid("factors", "product needs at least one factor"))?;
        for f in &factors {
            check_dim(dim, f.dim)?;
        }
        Ok(Weight {
            dim,
            family: WeightFamily::Product(factors),
        })
    }

    pub fn powered(base: Weight, exponent: f64) -> Result<Self> {
        if !exponent.is_finite() {
            return Err(invalid("exponent", "must be finite"));
        }
        Ok(Weight {
            dim: base.dim,
            family: WeightFamily::Powered {
                base: Box::new(base),
                exponent,
            },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    /// Value at `x`; `+inf` at poles. Callers check the length.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.family {
            WeightFamily::PolynomialModulus(p) => p.eval_unchecked(x).norm(),
            WeightFamily::Power { alpha } => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                r.powf(*alpha)
            }
            WeightFamily::Constant { c } => *c,
            WeightFamily::Product(fs) => fs.iter().map(|f| f.eval(x)).product(),
            WeightFamily::Powered { base, exponent } => base.eval(x).powf(*exponent),
        }
    }

    pub fn eval_checked(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.eval(x))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("weight serializes")
    }
}

fn positive_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(invalid("dim", "dimension must be positive"))
    } else {
        Ok(())
    }
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(invalid("p", format!("need 1 < p < inf, got {p}")))
    }
}

/// The dual weight `w^{-1/(p-1)}`, which lies in `A_{p'}` whenever `w` lies
/// in `A_p`.
pub fn dual_weight(w: &Weight, p: f64) -> Result<Weight> {
    check_p(p)?;
    Ok(raise(w, -1.0 / (p - 1.0)))
}

fn raise(w: &Weight, e: f64) -> Weight {
    let family = match &w.family {
        WeightFamily::Power { alpha } => WeightFamily::Power { alpha: alpha * e },
        WeightFamily::Constant { c } => WeightFamily::Constant { c: c.powf(e) },
        WeightFamily::Product(fs) => {
            WeightFamily::Product(fs.iter().map(|f| raise(f, e)).collect())
        }
        WeightFamily::Powered { base, exponent } => WeightFamily::Powered {
            base: base.clone(),
            exponent: exponent * e,
        },
        WeightFamily::PolynomialModulus(_) => WeightFamily::Powered {
            base: Box::new(w.clone()),
            exponent: e,
        },
    };
    Weight { dim: w.dim, family }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
enum WeightDoc {
    Power { dim: usize, alpha: f64 },
    Constant { dim: usize, c: f64 },
    Polymod { poly: Polynomial },
    Product { factors: Vec<Weight> },
    Powered { base: Box<Weight>, exponent: f64 },
}

impl TryFrom<WeightDoc> for Weight {
    type Error = Error;

    fn try_from(doc: WeightDoc) -> Result<Self> {
        match doc {
            WeightDoc::Power { dim, alpha } => Weight::power(dim, alpha),
            WeightDoc::Constant { dim, c } => Weight::constant(dim, c),
            WeightDoc::Polymod { poly } => Ok(Weight::poly_modulus(poly)),
            WeightDoc::Product { factors } => Weight::product(factors),
            WeightDoc::Powered { base, exponent } => Weight::powered(*base, exponent),
        }
    }
}

impl From<Weight> for WeightDoc {
    fn from(w: Weight) -> Self {
        match w.family {
            WeightFamily::Power { alpha } => WeightDoc::Power { dim: w.dim, alpha },
            WeightFamily::Constant { c } => WeightDoc::Constant { dim: w.dim, c },
            WeightFamily::PolynomialModulus(poly) => WeightDoc::Polymod { poly },
            WeightFamily::Product(factors) => WeightDoc::Product { factors },
            WeightFamily::Powered { base, exponent } => WeightDoc::Powered { base, exponent },
        }
    }
}
