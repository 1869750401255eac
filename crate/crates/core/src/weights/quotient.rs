use crate::error::{check_dim, invalid, Error, Result};
use crate::quadrature::{Cube, QuadratureSpec};

use super::{check_p, Weight, BLOWUP_THRESHOLD};

/// Midpoint means of `w` and of `w^{-1/(p-1)}` over the cube. A mean is
/// `+inf` as soon as one node value is not finite.
pub(crate) fn ap_means(w: &Weight, cube: &Cube, p: f64, q: &QuadratureSpec) -> (f64, f64) {
    let e = -1.0 / (p - 1.0);
    let (mut sw, mut sd) = (0.0, 0.0);
    let mut count = 0usize;
    q.for_each_node(&cube.as_box(), |x| {
        let v = w.eval(x);
        sw += if v.is_finite() { v } else { f64::INFINITY };
        let d = v.powf(e);
        sd += if d.is_finite() { d } else { f64::INFINITY };
        count += 1;
    });
    let n = count as f64;
    (sw / n, sd / n)
}

pub(crate) fn quotient_from_means(mean_w: f64, mean_dual: f64, p: f64) -> f64 {
    let qv = mean_w * mean_dual.powf(p - 1.0);
    if qv.is_nan() {
        f64::INFINITY
    } else {
        qv
    }
}

/// Discrete `A_p` quotient `(avg w)(avg w^{-1/(p-1)})^{p-1}` on one cube.
///
/// Never below 1 up to rounding: this is Hölder's inequality for the
/// discrete mean. `+inf` when some node is a zero or a pole of `w`.
pub fn ap_quotient(w: &Weight, cube: &Cube, p: f64, q: &QuadratureSpec) -> Result<f64> {
    check_p(p)?;
    check_dim(w.dim(), cube.dim())?;
    q.validate()?;
    let (mw, md) = ap_means(w, cube, p, q);
    Ok(quotient_from_means(mw, md, p))
}

/// Discrete `A_1` quotient: node mean over node minimum.
///
/// Values above [`BLOWUP_THRESHOLD`] are reported as `+inf`.
pub fn a1_quotient(w: &Weight, cube: &Cube, q: &QuadratureSpec) -> Result<f64> {
    check_dim(w.dim(), cube.dim())?;
    q.validate()?;
    let (mut sum, mut min) = (0.0, f64::INFINITY);
    let mut count = 0usize;
    q.for_each_node(&cube.as_box(), |x| {
        let v = w.eval(x);
        sum += if v.is_nan() { f64::INFINITY } else { v };
        min = min.min(v);
        count += 1;
    });
    if min <= 0.0 {
        return Err(Error::ZeroInfimum);
    }
    let qv = (sum / count as f64) / min;
    Ok(if qv.is_finite() && qv <= BLOWUP_THRESHOLD {
        qv
    } else {
        f64::INFINITY
    })
}

/// `∫_outer w / ((s/t)^{np} ∫_inner w)` with `s`, `t` the outer and inner
/// halfwidths. Accepts `p >= 1`.
pub fn doubling_quotient(
    w: &Weight,
    outer: &Cube,
    inner: &Cube,
    p: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    check_dim(w.dim(), outer.dim())?;
    check_dim(w.dim(), inner.dim())?;
    q.validate()?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid(
            "p",
            format!("doubling order must be >= 1, got {p}"),
        ));
    }
    if !outer.contains(inner) {
        return Err(Error::NotContained);
    }
    let mass_outer = outer.volume() * mean(w, outer, q, |v| v);
    let mass_inner = inner.volume() * mean(w, inner, q, |v| v);
    if mass_inner == 0.0 {
        return Err(Error::ZeroMass);
    }
    let n = w.dim() as f64;
    let growth = (outer.halfwidth() / inner.halfwidth()).powf(n * p);
    let qv = mass_outer / (growth * mass_inner);
    Ok(if qv.is_nan() { f64::INFINITY } else { qv })
}

/// `(avg w^r)^{1/r} / avg w`.
pub fn reverse_holder_quotient(w: &Weight, cube: &Cube, r: f64, q: &QuadratureSpec) -> Result<f64> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(invalid("r", format!("need 1 < r < inf, got {r}")));
    }
    check_dim(w.dim(), cube.dim())?;
    q.validate()?;
    let (mut s1, mut sr) = (0.0, 0.0);
    let mut count = 0usize;
    q.for_each_node(&cube.as_box(), |x| {
        let v = w.eval(x);
        s1 += v;
        sr += v.powf(r);
        count += 1;
    });
    let n = count as f64;
    let (m1, mr) = (s1 / n, sr / n);
    if m1 == 0.0 {
        return Err(Error::ZeroMass);
    }
    let qv = mr.powf(1.0 / r) / m1;
    Ok(if qv.is_finite() { qv } else { f64::INFINITY })
}

fn mean(w: &Weight, cube: &Cube, q: &QuadratureSpec, f: impl Fn(f64) -> f64) -> f64 {
    let mut s = 0.0;
    let mut count = 0usize;
    q.for_each_node(&cube.as_box(), |x| {
        s += f(w.eval(x));
        count += 1;
    });
    s / count as f64
}

/// `∫_{|x|_∞ ≤ R} w(x) (1+|x|)^{-np} dx`, summed over the core cube
/// `[-1,1]^n` and the dyadic shells `2^{k-1} ≤ |x|_∞ ≤ 2^k`.
///
/// Each shell is split into `3^n - 1` boxes carrying a midpoint grid. The
/// last shell is clipped to `[-R,R]^n` by weighting every cell with the
/// measure of its intersection with that cube, which keeps the result
/// nondecreasing in `R` exactly.
pub fn decay_integral(w: &Weight, p: f64, radius: f64, q: &QuadratureSpec) -> Result<f64> {
    q.validate()?;
    if !(radius >= 1.0 && radius.is_finite()) {
        return Err(invalid(
            "radius",
            format!("truncation radius must be >= 1, got {radius}"),
        ));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid("p", format!("must be positive, got {p}")));
    }
    let n = w.dim();
    let decay = n as f64 * p;
    let integrand = |x: &[f64]| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        w.eval(x) / (1.0 + r).powf(decay)
    };

    let mut total = clipped_box_integral(&vec![(-1.0, 1.0); n], radius, q, &integrand);
    let mut inner = 1.0f64;
    while inner < radius {
        let outer = 2.0 * inner;
        let pieces = [(-outer, -inner), (-inner, inner), (inner, outer)];
        let mut choice = vec![0usize; n];
        loop {
            if choice.iter().any(|&c| c != 1) {
                let bounds: Vec<(f64, f64)> = choice.iter().map(|&c| pieces[c]).collect();
                total += clipped_box_integral(&bounds, radius, q, &integrand);
            }
            // odometer over {0,1,2}^n
            let mut axis = 0;
            while axis < n && choice[axis] == 2 {
                choice[axis] = 0;
                axis += 1;
            }
            if axis == n {
                break;
            }
            choice[axis] += 1;
        }
        inner = outer;
    }
    Ok(if total.is_nan() { f64::INFINITY } else { total })
}

fn clipped_box_integral(
    bounds: &[(f64, f64)],
    radius: f64,
    q: &QuadratureSpec,
    f: &impl Fn(&[f64]) -> f64,
) -> f64 {
    let nodes = q.nodes_per_axis;
    // per axis: (midpoint, clipped cell length)
    let axes: Vec<Vec<(f64, f64)>> = bounds
        .iter()
        .map(|&(lo, hi)| {
            let h = (hi - lo) / nodes as f64;
            (0..nodes)
                .map(|i| {
                    let a = lo + h * i as f64;
                    let b = a + h;
                    let len = (b.min(radius) - a.max(-radius)).max(0.0);
                    (a + 0.5 * h, len)
                })
                .filter(|&(_, len)| len > 0.0)
                .collect()
        })
        .collect();
    let coords: Vec<Vec<f64>> = axes
        .iter()
        .map(|a| a.iter().map(|c| c.0).collect())
        .collect();
    let mut total = 0.0;
    crate::quadrature::for_each_tensor_point(&coords, |x, idx| {
        let vol: f64 = idx.iter().enumerate().map(|(j, &i)| axes[j][i].1).product();
        total += vol * f(x);
    });
    total
}
