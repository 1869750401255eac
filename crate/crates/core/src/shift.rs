//! Shifts `ξ₀ ∈ Q₀ = [-1/2, 1/2]^n` that keep the divisors `P(ξ₀ + m)` away
//! from zero on the integer lattice.
//!
//! A shift is certified by the smallest constant `C` with
//! `|P(ξ₀+m)|^{-1/(p-1)} ≤ C (1+|m|)^{np'}` for every `m` in a finite window
//! `|m|_∞ ≤ M`, where `1/p + 1/p' = 1` and `|m|` is the Euclidean norm.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::poly::Polynomial;
use crate::weights::check_p;

/// Window `{m ∈ Z^n : |m|_∞ ≤ M}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeWindow(u32);

impl LatticeWindow {
    pub const DEFAULT: LatticeWindow = LatticeWindow(50);

    pub fn new(max_norm: u32) -> Result<Self> {
        if max_norm == 0 {
            return Err(invalid("M", "lattice window must have M >= 1"));
        }
        Ok(LatticeWindow(max_norm))
    }

    pub fn max_norm(self) -> u32 {
        self.0
    }

    /// Lattice points in lexicographic order.
    pub fn points(self, dim: usize) -> Vec<Vec<i64>> {
        let m = i64::from(self.0);
        let side = (2 * m + 1) as usize;
        let total = side.pow(dim as u32);
        (0..total)
            .map(|mut flat| {
                let mut point = vec![0i64; dim];
                for axis in (0..dim).rev() {
                    point[axis] = (flat % side) as i64 - m;
                    flat /= side;
                }
                point
            })
            .collect()
    }
}

/// Conjugate exponent `p' = p/(p-1)`.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

fn euclid(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

/// Precomputed lattice points and their `(1+|m|)^{-np'}` factors.
struct Window {
    points: Vec<Vec<i64>>,
    decay: Vec<f64>,
}

impl Window {
    fn new(dim: usize, p: f64, window: LatticeWindow) -> Self {
        let np = dim as f64 * conjugate(p);
        let points = window.points(dim);
        let decay = points
            .iter()
            .map(|m| (1.0 + euclid(m.iter().map(|&v| v as f64))).powf(-np))
            .collect();
        Window { points, decay }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct DivisorScan {
    c9: f64,
    argmax: Vec<i64>,
    min_divisor: f64,
}

fn scan(poly: &Polynomial, p: f64, xi0: &[f64], win: &Window) -> Result<DivisorScan> {
    let e = -1.0 / (p - 1.0);
    let mut x = vec![0.0; xi0.len()];
    let mut best = DivisorScan {
        c9: f64::NEG_INFINITY,
        argmax: Vec::new(),
        min_divisor: f64::INFINITY,
    };
    for (m, decay) in win.points.iter().zip(&win.decay) {
        for ((xj, s), mj) in x.iter_mut().zip(xi0).zip(m) {
            *xj = s + *mj as f64;
        }
        let d = poly.eval_unchecked(&x).norm();
        if d == 0.0 {
            return Err(Error::ZeroDivisor { m: m.clone() });
        }
        best.min_divisor = best.min_divisor.min(d);
        let term = d.powf(e) * decay;
        if term > best.c9 {
            best.c9 = term;
            best.argmax = m.clone();
        }
    }
    Ok(best)
}

fn check_shift_args(poly: &Polynomial, p: f64, xi0: &[f64]) -> Result<()> {
    check_p(p)?;
    check_dim(poly.dim(), xi0.len())
}

/// `Σ_{|m|_∞ ≤ M} |P(ξ₀+m)|^{-1/(p-1)} (1+|ξ₀+m|)^{-np'}`, or `+inf` when
/// some divisor is exactly zero.
pub fn lattice_sum(poly: &Polynomial, p: f64, xi0: &[f64], window: LatticeWindow) -> Result<f64> {
    check_shift_args(poly, p, xi0)?;
    let e = -1.0 / (p - 1.0);
    let np = poly.dim() as f64 * conjugate(p);
    let mut x = vec![0.0; xi0.len()];
    let mut total = 0.0;
    for m in window.points(poly.dim()) {
        for ((xj, s), mj) in x.iter_mut().zip(xi0).zip(&m) {
            *xj = s + *mj as f64;
        }
        let d = poly.eval_unchecked(&x).norm();
        if d == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += d.powf(e) * (1.0 + euclid(x.iter().copied())).powf(-np);
    }
    Ok(total)
}

/// Smallest `C` with `|P(ξ₀+m)|^{-1/(p-1)} ≤ C (1+|m|)^{np'}` on the window.
pub fn eq9_constant(poly: &Polynomial, p: f64, xi0: &[f64], window: LatticeWindow) -> Result<f64> {
    check_shift_args(poly, p, xi0)?;
    Ok(scan(poly, p, xi0, &Window::new(poly.dim(), p, window))?.c9)
}

/// A shift with its realized constant on a window, rechecked on the doubled
/// window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftCertificate {
    pub poly: Polynomial,
    pub xi0: Vec<f64>,
    pub p: f64,
    pub pprime: f64,
    #[serde(rename = "M")]
    pub window: LatticeWindow,
    #[serde(rename = "C9")]
    pub c9: f64,
    /// Lattice point where `c9` is attained.
    pub argmax: Vec<i64>,
    pub lattice_sum: f64,
    pub min_divisor: f64,
    #[serde(rename = "recheck_M")]
    pub recheck_window: LatticeWindow,
    #[serde(rename = "recheck_C9")]
    pub recheck_c9: f64,
    /// The recheck found a larger constant than `c9`.
    pub window_limited: bool,
}

impl ShiftCertificate {
    /// Computes the certificate fields for a given shift, including the
    /// mandatory recheck on the window `2M`.
    pub fn issue(poly: &Polynomial, p: f64, xi0: &[f64], window: LatticeWindow) -> Result<Self> {
        check_shift_args(poly, p, xi0)?;
        if xi0.iter().any(|v| v.is_nan() || v.abs() > 0.5) {
            return Err(invalid(
                "xi0",
                format!("shift {xi0:?} lies outside [-1/2, 1/2]^n"),
            ));
        }
        let s = scan(poly, p, xi0, &Window::new(poly.dim(), p, window))?;
        Self::assemble(poly, p, xi0, window, s)
    }

    fn assemble(
        poly: &Polynomial,
        p: f64,
        xi0: &[f64],
        window: LatticeWindow,
        s: DivisorScan,
    ) -> Result<Self> {
        let recheck_window = LatticeWindow(window.0 * 2);
        let recheck_c9 = eq9_constant(poly, p, xi0, recheck_window)?;
        Ok(ShiftCertificate {
            poly: poly.clone(),
            xi0: xi0.to_vec(),
            p,
            pprime: conjugate(p),
            window,
            c9: s.c9,
            argmax: s.argmax,
            lattice_sum: lattice_sum(poly, p, xi0, window)?,
            min_divisor: s.min_divisor,
            recheck_window,
            recheck_c9,
            window_limited: exceeds(recheck_c9, s.c9),
        })
    }

    pub fn dim(&self) -> usize {
        self.xi0.len()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cert: ShiftCertificate =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        check_dim(cert.poly.dim(), cert.xi0.len())?;
        check_p(cert.p)?;
        Ok(cert)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

fn exceeds(new: f64, old: f64) -> bool {
    new > old * (1.0 + 1e-9)
}

/// Scans candidate shifts and returns the one with the smallest realized
/// constant.
///
/// Candidates are the closed grid `-1/2 + i/grid` (both faces of `Q₀`
/// included) together with one seeded random point in every grid cell.
/// Ties go to the lexicographically smallest shift.
pub fn find_shift(
    poly: &Polynomial,
    p: f64,
    window: LatticeWindow,
    grid: usize,
    seed: u64,
) -> Result<ShiftCertificate> {
    check_p(p)?;
    if grid < 8 {
        return Err(invalid(
            "grid",
            format!("need at least 8 points per axis, got {grid}"),
        ));
    }
    let dim = poly.dim();
    let mut candidates = tensor_points(dim, grid + 1, |i, _| -0.5 + i as f64 / grid as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter: Vec<f64> = (0..grid.pow(dim as u32) * dim)
        .map(|_| rng.gen::<f64>())
        .collect();
    candidates.extend(tensor_points(dim, grid, |i, k| {
        -0.5 + (i as f64 + jitter[k]) / grid as f64
    }));

    let win = Window::new(dim, p, window);
    let scans: Vec<Option<DivisorScan>> = candidates
        .par_iter()
        .map(|xi0| scan(poly, p, xi0, &win).ok())
        .collect();
    let mut best: Option<usize> = None;
    for (i, s) in scans.iter().enumerate() {
        let Some(s) = s else { continue };
        let better = match best {
            None => true,
            Some(b) => {
                let cur = scans[b].as_ref().expect("best is a valid scan");
                s.c9 < cur.c9 || (s.c9 == cur.c9 && candidates[i] < candidates[b])
            }
        };
        if better {
            best = Some(i);
        }
    }
    let best = best.ok_or(Error::AllShiftsBad)?;
    let s = scans[best].clone().expect("best is a valid scan");
    ShiftCertificate::assemble(poly, p, &candidates[best], window, s)
}

/// Tensor grid of `per_axis^dim` points; `coord(i, k)` maps the axis index
/// `i` and the flat coordinate counter `k` to a value.
fn tensor_points(
    dim: usize,
    per_axis: usize,
    coord: impl Fn(usize, usize) -> f64,
) -> Vec<Vec<f64>> {
    let total = per_axis.pow(dim as u32);
    (0..total)
        .map(|flat| {
            let mut rest = flat;
            let mut x = vec![0.0; dim];
            for axis in (0..dim).rev() {
                x[axis] = coord(rest % per_axis, flat * dim + axis);
                rest /= per_axis;
            }
            x
        })
        .collect()
}

/// Outcome of re-evaluating a certificate on a larger window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Recheck {
    pub window: LatticeWindow,
    pub c9: f64,
    /// The larger window needs a larger constant than the certificate's.
    pub window_limited: bool,
}

pub fn recheck_certificate(cert: &ShiftCertificate, larger: LatticeWindow) -> Result<Recheck> {
    if larger <= cert.window {
        return Err(invalid(
            "M2",
            format!("recheck window {} must exceed {}", larger.0, cert.window.0),
        ));
    }
    let c9 = eq9_constant(&cert.poly, cert.p, &cert.xi0, larger)?;
    Ok(Recheck {
        window: larger,
        c9,
        window_limited: exceeds(c9, cert.c9),
    })
}

/// Fraction of `samples` uniform shifts in `Q₀` whose realized constant is at
/// most `threshold`. Shifts hitting a zero divisor count as bad.
pub fn good_shift_fraction(
    poly: &Polynomial,
    p: f64,
    window: LatticeWindow,
    threshold: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    check_p(p)?;
    if samples < 100 {
        return Err(invalid(
            "samples",
            format!("need at least 100, got {samples}"),
        ));
    }
    let dim = poly.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shifts: Vec<Vec<f64>> = (0..samples)
        .map(|_| (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect())
        .collect();
    let win = Window::new(dim, p, window);
    let good = shifts
        .par_iter()
        .filter(|xi0| matches!(scan(poly, p, xi0, &win), Ok(s) if s.c9 <= threshold))
        .count();
    Ok(good as f64 / samples as f64)
}
