//! Periodic grid functions on `[0, 2π)^n` and their Fourier coefficients.
//!
//! Coefficients use the normalization `f̂(m) = N^{-1} Σ_x f(x) e^{-i⟨m,x⟩}`,
//! so a constant `c` has `f̂(0) = c`, a single exponential has coefficient 1,
//! and `Σ_m |f̂(m)|²` equals the mean of `|f|²` over the grid.
//!
//! Frequency-domain samples are stored in FFT order: along an axis of size
//! `N`, storage index `k` holds the mode `k` for `k < N/2` and `k - N`
//! otherwise, so resolved modes satisfy `-N/2 ≤ m_j < N/2`.

mod solve;

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use solve::{
    apply_conjugated, apriori_constant, default_eps_min, solve_conjugated, verify_estimate,
    verify_solution, SolveReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Physical,
    Frequency,
}

impl Domain {
    fn name(self) -> &'static str {
        match self {
            Domain::Physical => "physical",
            Domain::Frequency => "frequency",
        }
    }
}

/// Complex samples on a uniform periodic grid, row-major with the last axis
/// fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridDoc", into = "GridDoc")]
pub struct GridFunction {
    sizes: Vec<usize>,
    values: Vec<Complex64>,
    domain: Domain,
}

/// Sobolev index `s` of `H^s(T^n)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SobolevIndex(pub f64);

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(invalid("sizes", "grid must have at least one axis"));
    }
    if let Some(s) = sizes.iter().find(|s| !s.is_power_of_two() || **s < 2) {
        return Err(invalid(
            "sizes",
            format!("axis size {s} is not a power of two >= 2"),
        ));
    }
    Ok(())
}

impl GridFunction {
    pub fn new(sizes: Vec<usize>, values: Vec<Complex64>, domain: Domain) -> Result<Self> {
        check_sizes(&sizes)?;
        let total: usize = sizes.iter().product();
        if values.len() != total {
            return Err(invalid(
                "values",
                format!("expected {total} samples, got {}", values.len()),
            ));
        }
        Ok(GridFunction {
            sizes,
            values,
            domain,
        })
    }

    pub fn zeros(sizes: Vec<usize>, domain: Domain) -> Result<Self> {
        let total = sizes.iter().product();
        Self::new(sizes, vec![Complex64::default(); total], domain)
    }

    /// Samples `f` at the grid points `x_j = 2π i_j / N_j`.
    pub fn sample<F: Fn(&[f64]) -> Complex64>(sizes: Vec<usize>, f: F) -> Result<Self> {
        check_sizes(&sizes)?;
        let axes: Vec<Vec<f64>> = sizes
            .iter()
            .map(|&n| (0..n).map(|i| TAU * i as f64 / n as f64).collect())
            .collect();
        let mut values = Vec::with_capacity(sizes.iter().product());
        crate::quadrature::for_each_tensor_point(&axes, |x, _| values.push(f(x)));
        Self::new(sizes, values, Domain::Physical)
    }

    /// `e^{i⟨m,x⟩}` sampled on the grid.
    pub fn plane_wave(sizes: Vec<usize>, m: &[i64]) -> Result<Self> {
        if m.len() != sizes.len() {
            return Err(Error::DimensionMismatch {
                expected: sizes.len(),
                got: m.len(),
            });
        }
        let m = m.to_vec();
        Self::sample(sizes, move |x| {
            let phase: f64 = x.iter().zip(&m).map(|(xj, &mj)| xj * mj as f64).sum();
            Complex64::from_polar(1.0, phase)
        })
    }

    /// Frequency-domain function from `(mode, coefficient)` pairs. Modes
    /// must be resolved by the grid.
    pub fn from_modes<I>(sizes: Vec<usize>, modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        let mut g = Self::zeros(sizes, Domain::Frequency)?;
        for (m, c) in modes {
            let idx = g.index_of(&m).ok_or_else(|| {
                invalid("mode", format!("{m:?} is not resolved by {:?}", g.sizes))
            })?;
            g.values[idx] += c;
        }
        Ok(g)
    }

    /// Random coefficients, uniform in the unit square, on the modes with
    /// `|m|_∞ ≤ band`; returned in the physical domain.
    pub fn band_limited(sizes: Vec<usize>, band: i64, seed: u64) -> Result<Self> {
        check_sizes(&sizes)?;
        if let Some(&n) = sizes.iter().find(|&&n| band >= (n / 2) as i64) {
            return Err(invalid(
                "band",
                format!("band {band} is not resolved by axis size {n}"),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Self::zeros(sizes, Domain::Frequency)?;
        for k in 0..g.values.len() {
            if g.mode(k).iter().all(|m| m.abs() <= band) {
                g.values[k] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        g.to_physical()
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Frequency of the storage index `flat` (meaningful in the frequency
    /// domain).
    pub fn mode(&self, flat: usize) -> Vec<i64> {
        let mut rest = flat;
        let mut m = vec![0i64; self.sizes.len()];
        for axis in (0..self.sizes.len()).rev() {
            let n = self.sizes[axis];
            let k = rest % n;
            rest /= n;
            m[axis] = if k < n / 2 {
                k as i64
            } else {
                k as i64 - n as i64
            };
        }
        m
    }

    /// Storage index of the mode `m`, if it is resolved.
    pub fn index_of(&self, m: &[i64]) -> Option<usize> {
        if m.len() != self.sizes.len() {
            return None;
        }
        let mut flat = 0usize;
        for (&mj, &n) in m.iter().zip(&self.sizes) {
            let half = (n / 2) as i64;
            if mj < -half || mj >= half {
                return None;
            }
            let k = if mj < 0 {
                (mj + n as i64) as usize
            } else {
                mj as usize
            };
            flat = flat * n + k;
        }
        Some(flat)
    }

    fn expect(&self, domain: Domain) -> Result<()> {
        if self.domain == domain {
            Ok(())
        } else {
            Err(Error::WrongDomainTag {
                expected: domain.name(),
                found: self.domain.name(),
            })
        }
    }

    pub fn to_frequency(&self) -> Result<GridFunction> {
        self.expect(Domain::Physical)?;
        let mut values = self.values.clone();
        fft_nd(&self.sizes, &mut values, FftDirection::Forward);
        let scale = 1.0 / values.len() as f64;
        values.iter_mut().for_each(|v| *v *= scale);
        Ok(GridFunction {
            sizes: self.sizes.clone(),
            values,
            domain: Domain::Frequency,
        })
    }

    pub fn to_physical(&self) -> Result<GridFunction> {
        self.expect(Domain::Frequency)?;
        let mut values = self.values.clone();
        fft_nd(&self.sizes, &mut values, FftDirection::Inverse);
        Ok(GridFunction {
            sizes: self.sizes.clone(),
            values,
            domain: Domain::Physical,
        })
    }

    /// Frequency view, transforming only if needed.
    pub fn frequency_view(&self) -> GridFunction {
        match self.domain {
            Domain::Frequency => self.clone(),
            Domain::Physical => self.to_frequency().expect("domain checked"),
        }
    }

    pub(crate) fn with_domain(&self, domain: Domain) -> GridFunction {
        match (self.domain, domain) {
            (a, b) if a == b => self.clone(),
            (_, Domain::Frequency) => self.to_frequency().expect("domain checked"),
            (_, Domain::Physical) => self.to_physical().expect("domain checked"),
        }
    }

    pub(crate) fn map_modes(&self, f: impl Fn(&[i64], Complex64) -> Complex64) -> GridFunction {
        let mut out = self.clone();
        for (k, v) in out.values.iter_mut().enumerate() {
            *v = f(&self.mode(k), *v);
        }
        out
    }

    /// `sqrt(mean |f|²)` over the physical grid.
    pub fn l2_norm(&self) -> f64 {
        let phys = self.with_domain(Domain::Physical);
        (phys.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / phys.values.len() as f64).sqrt()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid serializes")
    }
}

/// `(Σ_m |f̂(m)|² (1+|m|²)^s)^{1/2}` over the resolved modes.
pub fn sobolev_norm(f: &GridFunction, s: SobolevIndex) -> f64 {
    let freq = f.frequency_view();
    freq.values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let m2: f64 = freq.mode(k).iter().map(|&m| (m * m) as f64).sum();
            v.norm_sqr() * (1.0 + m2).powf(s.0)
        })
        .sum::<f64>()
        .sqrt()
}

fn fft_nd(sizes: &[usize], data: &mut [Complex64], direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let total = data.len();
    let mut stride = total;
    let mut line = Vec::new();
    for &n in sizes {
        stride /= n;
        let fft = planner.plan_fft(n, direction);
        let block = n * stride;
        for start in (0..total).step_by(block) {
            for offset in 0..stride {
                line.clear();
                line.extend((0..n).map(|i| data[start + offset + i * stride]));
                fft.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    data[start + offset + i * stride] = *v;
                }
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GridDoc {
    dim: usize,
    sizes: Vec<usize>,
    domain_tag: Domain,
    /// Interleaved `re, im` pairs in storage order.
    samples: Vec<f64>,
}

impl TryFrom<GridDoc> for GridFunction {
    type Error = Error;

    fn try_from(doc: GridDoc) -> Result<Self> {
        if doc.dim != doc.sizes.len() {
            return Err(Error::DimensionMismatch {
                expected: doc.dim,
                got: doc.sizes.len(),
            });
        }
        if !doc.samples.len().is_multiple_of(2) {
            return Err(Error::Format("odd number of interleaved samples".into()));
        }
        let values = doc
            .samples
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        GridFunction::new(doc.sizes, values, doc.domain_tag)
    }
}

impl From<GridFunction> for GridDoc {
    fn from(g: GridFunction) -> Self {
        GridDoc {
            dim: g.sizes.len(),
            samples: g.values.iter().flat_map(|v| [v.re, v.im]).collect(),
            sizes: g.sizes,
            domain_tag: g.domain,
        }
    }
}
