use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::quadrature::{Cube, QuadratureSpec};

use super::quotient::{ap_means, quotient_from_means};
use super::{check_p, Weight};

/// Quotients above this are treated as blown up.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

/// A refinement sequence of means counts as convergent when each increment
/// is at most this fraction of the previous one.
pub const CONTRACTION_LIMIT: f64 = 0.98;

/// Upper end of the exponent search.
pub const P_MAX: f64 = 64.0;

/// A finite family of cubes over which a supremum is sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeFamily {
    label: String,
    cubes: Vec<Cube>,
}

impl CubeFamily {
    pub fn from_cubes(label: impl Into<String>, cubes: Vec<Cube>) -> Result<Self> {
        let dim = cubes
            .first()
            .map(Cube::dim)
            .ok_or_else(|| invalid("family", "cube family must be nonempty"))?;
        for c in &cubes {
            check_dim(dim, c.dim())?;
        }
        Ok(CubeFamily {
            label: label.into(),
            cubes,
        })
    }

    /// Origin-centered cubes with the given halfwidths.
    pub fn centered(dim: usize, halfwidths: &[f64]) -> Result<Self> {
        let cubes = halfwidths
            .iter()
            .map(|&h| Cube::centered(dim, h))
            .collect::<Result<Vec<_>>>()?;
        Self::from_cubes(format!("centered, {} halfwidths", halfwidths.len()), cubes)
    }

    /// Dyadic family: halfwidths `2^k` for `k` in `kmin..=kmax`, centers on
    /// the lattice `2^k Z^n` with at most `centers_per_side` steps from the
    /// origin per axis and inside the window `[-2^kmax, 2^kmax]^n`.
    ///
    /// The origin and the coordinate hyperplanes, where the built-in weight
    /// families vanish or blow up, are lattice points at every scale.
    pub fn dyadic(dim: usize, kmin: i32, kmax: i32, centers_per_side: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim", "dimension must be positive"));
        }
        if kmin > kmax {
            return Err(invalid("kmin", format!("kmin {kmin} exceeds kmax {kmax}")));
        }
        let window = 2f64.powi(kmax);
        let mut cubes = Vec::new();
        for k in kmin..=kmax {
            let h = 2f64.powi(k);
            let steps = ((window / h).floor() as usize).min(centers_per_side) as i64;
            let side: Vec<i64> = (-steps..=steps).collect();
            let mut idx = vec![0usize; dim];
            loop {
                let center = idx.iter().map(|&i| side[i] as f64 * h).collect();
                cubes.push(Cube::new(center, h)?);
                let mut axis = dim;
                loop {
                    if axis == 0 {
                        break;
                    }
                    axis -= 1;
                    idx[axis] += 1;
                    if idx[axis] < side.len() {
                        break;
                    }
                    idx[axis] = 0;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
        Self::from_cubes(
            format!("dyadic, k in [{kmin}, {kmax}], {centers_per_side} centers per side"),
            cubes,
        )
    }

    /// Default dyadic family: `k` in `[-10, 10]`, 8/4/2 centers per side in
    /// dimension 1/2/3+.
    pub fn default_for_dim(dim: usize) -> Result<Self> {
        let per_side = match dim {
            1 => 8,
            2 => 4,
            _ => 2,
        };
        Self::dyadic(dim, -10, 10, per_side)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn dim(&self) -> usize {
        self.cubes[0].dim()
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    /// Index pairs `(outer, inner)` with `inner ⊆ outer`, in family order.
    pub fn nested_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, outer) in self.cubes.iter().enumerate() {
            for (j, inner) in self.cubes.iter().enumerate() {
                if outer.contains(inner) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Quotient of one cube of the family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeQuotient {
    pub cube: Cube,
    #[serde(with = "crate::flag")]
    pub quotient: f64,
}

/// Sampled `A_p` constant of a weight over a cube family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApReport {
    pub p: f64,
    #[serde(with = "crate::flag")]
    pub sup_quotient: f64,
    pub worst_cube: Cube,
    pub cubes_examined: usize,
    /// Cubes whose quotient blew up or failed to settle under refinement.
    pub diverging_cubes: usize,
    pub quadrature: QuadratureSpec,
    pub family: String,
    #[serde(skip)]
    pub entries: Vec<CubeQuotient>,
}

impl ApReport {
    pub fn is_finite(&self) -> bool {
        self.sup_quotient.is_finite()
    }
}

/// Per-cube quotient at the base resolution, or `+inf` when the weight is
/// not integrable enough on the cube.
///
/// The means of `w` and of the dual weight are recomputed with 2x and 4x
/// the nodes. An integrable singularity makes successive increments shrink
/// geometrically; a non-integrable one makes them stall or grow.
fn refined_quotient(w: &Weight, cube: &Cube, p: f64, q: &QuadratureSpec) -> f64 {
    let levels: Vec<(f64, f64)> = [1, 2, 4]
        .iter()
        .map(|&f| ap_means(w, cube, p, &q.refined(f)))
        .collect();
    let quotients: Vec<f64> = levels
        .iter()
        .map(|&(a, d)| quotient_from_means(a, d, p))
        .collect();
    if quotients
        .iter()
        .any(|v| !(v.is_finite() && *v <= BLOWUP_THRESHOLD))
    {
        return f64::INFINITY;
    }
    let settles = |s: [f64; 3]| {
        let (d1, d2) = (s[1] - s[0], s[2] - s[1]);
        d2.abs() <= 1e-12 * s[2].abs() || d2.abs() <= CONTRACTION_LIMIT * d1.abs()
    };
    let mw = [levels[0].0, levels[1].0, levels[2].0];
    let md = [levels[0].1, levels[1].1, levels[2].1];
    if settles(mw) && settles(md) {
        quotients[0]
    } else {
        f64::INFINITY
    }
}

/// Largest quotient over the family. Ties go to the first cube in family
/// order.
pub fn sup_ap_quotient(
    w: &Weight,
    family: &CubeFamily,
    p: f64,
    q: &QuadratureSpec,
) -> Result<ApReport> {
    check_p(p)?;
    q.validate()?;
    check_dim(w.dim(), family.dim())?;
    let values: Vec<f64> = family
        .cubes
        .par_iter()
        .map(|c| refined_quotient(w, c, p, q))
        .collect();
    let mut best = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    Ok(ApReport {
        p,
        sup_quotient: values[best],
        worst_cube: family.cubes[best].clone(),
        cubes_examined: values.len(),
        diverging_cubes: values.iter().filter(|v| v.is_infinite()).count(),
        quadrature: *q,
        family: family.label.clone(),
        entries: family
            .cubes
            .iter()
            .zip(&values)
            .map(|(c, &quotient)| CubeQuotient {
                cube: c.clone(),
                quotient,
            })
            .collect(),
    })
}

/// Result of the exponent bisection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalExponent {
    /// Smallest exponent found at which the sampled supremum is finite.
    pub exponent: f64,
    /// Largest exponent found at which it is not.
    pub lower_bound: f64,
    pub tol: f64,
    pub steps: usize,
}

/// Bisects `p` over `(1, 64]` for the smallest exponent at which
/// [`sup_ap_quotient`] is finite.
pub fn critical_exponent(
    w: &Weight,
    family: &CubeFamily,
    q: &QuadratureSpec,
    tol: f64,
) -> Result<CriticalExponent> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(invalid("tol", format!("must be positive, got {tol}")));
    }
    let finite = |p: f64| sup_ap_quotient(w, family, p, q).map(|r| r.is_finite());
    if !finite(P_MAX)? {
        return Err(Error::NeverFinite { p_max: P_MAX });
    }
    let (mut lo, mut hi) = (1.0f64, P_MAX);
    let mut steps = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if finite(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    Ok(CriticalExponent {
        exponent: hi,
        lower_bound: lo,
        tol,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_family_shape() {
        let f = CubeFamily::dyadic(1, -2, 2, 3).unwrap();
        // k = -2..2: 7 centers each, except k = 1 (5) and k = 2 (3)
        assert_eq!(f.len(), 7 + 7 + 7 + 5 + 3);
        assert!(f.cubes().iter().all(|c| c.center()[0].abs() <= 4.0));
        let f2 = CubeFamily::dyadic(2, 0, 0, 1).unwrap();
        assert_eq!(f2.len(), 9);
        assert!(CubeFamily::from_cubes("empty", vec![]).is_err());
    }

    #[test]
    fn constant_sup_is_one() {
        let w = Weight::constant(1, 1.0).unwrap();
        let f = CubeFamily::dyadic(1, -3, 3, 2).unwrap();
        let r = sup_ap_quotient(&w, &f, 2.0, &QuadratureSpec::midpoint(16).unwrap()).unwrap();
        assert!((r.sup_quotient - 1.0).abs() < 1e-14);
        assert_eq!(r.worst_cube, f.cubes()[0]);
        assert_eq!(r.diverging_cubes, 0);
    }

    #[test]
    fn report_serializes_infinity_as_flag() {
        let w = Weight::power(1, 2.0).unwrap();
        let f = CubeFamily::centered(1, &[1.0]).unwrap();
        let r = sup_ap_quotient(&w, &f, 2.5, &QuadratureSpec::default_for_dim(1)).unwrap();
        assert_eq!(r.sup_quotient, f64::INFINITY);
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains(r#""sup_quotient":"inf""#), "{text}");
        let back: ApReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.sup_quotient, f64::INFINITY);
    }

    #[test]
    fn never_finite_is_reported() {
        // |x|^{-3} is not locally integrable in one dimension
        let w = Weight::power(1, -3.0).unwrap();
        let f = CubeFamily::centered(1, &[1.0]).unwrap();
        let e = critical_exponent(&w, &f, &QuadratureSpec::default_for_dim(1), 0.01);
        assert_eq!(e, Err(Error::NeverFinite { p_max: P_MAX }));
    }
}
