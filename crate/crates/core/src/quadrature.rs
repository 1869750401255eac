//! Axis-parallel cubes and tensor-product midpoint quadrature over them.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Closed cube `center + [-halfwidth, halfwidth]^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    center: Vec<f64>,
    halfwidth: f64,
}

impl Cube {
    pub fn new(center: Vec<f64>, halfwidth: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(invalid("center", "cube must have positive dimension"));
        }
        if !(halfwidth > 0.0 && halfwidth.is_finite()) {
            return Err(invalid(
                "halfwidth",
                format!("must be positive and finite, got {halfwidth}"),
            ));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(invalid("center", "coordinates must be finite"));
        }
        Ok(Cube { center, halfwidth })
    }

    /// Cube centered at the origin.
    pub fn centered(dim: usize, halfwidth: f64) -> Result<Self> {
        Self::new(vec![0.0; dim], halfwidth)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    pub fn volume(&self) -> f64 {
        (2.0 * self.halfwidth).powi(self.dim() as i32)
    }

    /// Componentwise containment of `inner` in `self`, up to rounding.
    pub fn contains(&self, inner: &Cube) -> bool {
        let slack = 1e-12 * self.halfwidth;
        self.dim() == inner.dim()
            && self.center.iter().zip(&inner.center).all(|(co, ci)| {
                ci - inner.halfwidth >= co - self.halfwidth - slack
                    && ci + inner.halfwidth <= co + self.halfwidth + slack
            })
    }

    pub(crate) fn as_box(&self) -> Vec<(f64, f64)> {
        self.center
            .iter()
            .map(|&c| (c - self.halfwidth, c + self.halfwidth))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureRule {
    Midpoint,
}

/// Tensor quadrature with `nodes_per_axis` nodes along each coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes_per_axis: usize,
    pub rule: QuadratureRule,
}

impl QuadratureSpec {
    pub fn midpoint(nodes_per_axis: usize) -> Result<Self> {
        let q = QuadratureSpec {
            nodes_per_axis,
            rule: QuadratureRule::Midpoint,
        };
        q.validate()?;
        Ok(q)
    }

    /// 64 nodes per axis in one dimension, 32 in two, 12 in three.
    pub fn default_for_dim(dim: usize) -> Self {
        let nodes_per_axis = match dim {
            0 | 1 => 64,
            2 => 32,
            _ => 12,
        };
        QuadratureSpec {
            nodes_per_axis,
            rule: QuadratureRule::Midpoint,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < 2 {
            return Err(invalid(
                "nodes_per_axis",
                format!("need at least 2, got {}", self.nodes_per_axis),
            ));
        }
        Ok(())
    }

    /// Same rule with the node count multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        QuadratureSpec {
            nodes_per_axis: self.nodes_per_axis * factor,
            rule: self.rule,
        }
    }

    /// Midpoint nodes of one axis interval `[lo, hi]`.
    pub(crate) fn axis_nodes(&self, lo: f64, hi: f64) -> Vec<f64> {
        let n = self.nodes_per_axis;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        (0..n)
            .map(|i| mid + half * ((2 * i + 1) as f64 / n as f64 - 1.0))
            .collect()
    }

    /// Calls `f` at every tensor node of the box, in row-major order.
    pub(crate) fn for_each_node<F: FnMut(&[f64])>(&self, bounds: &[(f64, f64)], mut f: F) {
        let axes: Vec<Vec<f64>> = bounds
            .iter()
            .map(|&(lo, hi)| self.axis_nodes(lo, hi))
            .collect();
        for_each_tensor_point(&axes, |x, _| f(x));
    }
}

/// Visits every point of the tensor grid `axes[0] × axes[1] × ⋯` with its
/// multi-index, last axis fastest.
pub(crate) fn for_each_tensor_point<F: FnMut(&[f64], &[usize])>(axes: &[Vec<f64>], mut f: F) {
    if axes.iter().any(Vec::is_empty) {
        return;
    }
    let dim = axes.len();
    let mut idx = vec![0usize; dim];
    let mut x: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    loop {
        f(&x, &idx);
        let mut axis = dim;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < axes[axis].len() {
                x[axis] = axes[axis][idx[axis]];
                break;
            }
            idx[axis] = 0;
            x[axis] = axes[axis][0];
        }
    }
}
