//! The Grenander estimator: left derivative of the least concave majorant of the ECDF.

use crate::model::{MixtureOfUniforms, Sample, StepDensityView};

/// Distinct sorted observations with their cumulative proportions. `(0, 0)` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct EcdfPoints {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl EcdfPoints {
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn fs(&self) -> &[f64] {
        &self.fs
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.fs.iter().copied())
    }

    /// Right-continuous ECDF value at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        match self.xs.partition_point(|&t| t <= x) {
            0 => 0.0,
            k => self.fs[k - 1],
        }
    }
}

/// Piecewise-linear concave function through `(0, 0)` and `(X_(n), 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveMajorant {
    vertices: Vec<(f64, f64)>,
}

impl ConcaveMajorant {
    /// Vertices including the origin.
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Slopes of the successive linear pieces, strictly decreasing.
    pub fn slopes(&self) -> Vec<f64> {
        self.vertices.windows(2).map(|p| slope(p[0], p[1])).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let last = *self.vertices.last().unwrap();
        if x >= last.0 {
            return last.1;
        }
        let k = self.vertices.partition_point(|v| v.0 < x);
        let (a, b) = (self.vertices[k - 1], self.vertices[k]);
        a.1 + slope(a, b) * (x - a.0)
    }
}

fn slope(a: (f64, f64), b: (f64, f64)) -> f64 {
    (b.1 - a.1) / (b.0 - a.0)
}

/// Ties pooled; each cumulative proportion is an exact `count / n`.
pub fn empirical_cdf(data: &Sample) -> EcdfPoints {
    let n = data.len() as f64;
    let mut xs: Vec<f64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for (i, &x) in data.values().iter().enumerate() {
        if xs.last() == Some(&x) {
            *counts.last_mut().unwrap() = i + 1;
        } else {
            xs.push(x);
            counts.push(i + 1);
        }
    }
    let fs = counts.into_iter().map(|c| c as f64 / n).collect();
    EcdfPoints { xs, fs }
}

/// Upper hull of `{(0,0)} ∪ ecdf` in one left-to-right scan.
///
/// A vertex is removed whenever the slope into it does not exceed the slope out of
/// it, so the slopes of the result are strictly decreasing as computed.
pub fn least_concave_majorant(ecdf: &EcdfPoints) -> ConcaveMajorant {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(ecdf.len() + 1);
    hull.push((0.0, 0.0));
    for p in ecdf.points() {
        while hull.len() >= 2 {
            let b = hull[hull.len() - 1];
            let a = hull[hull.len() - 2];
            if slope(a, b) <= slope(b, p) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    ConcaveMajorant { vertices: hull }
}

/// The Grenander estimator as a canonical mixture of uniforms.
///
/// Knots sit at the hull vertices, heights are the hull slopes, and the largest
/// location is always `X_(n)`.
pub fn grenander_fit(data: &Sample) -> MixtureOfUniforms {
    let lcm = least_concave_majorant(&empirical_cdf(data));
    let knots: Vec<f64> = lcm.vertices[1..].iter().map(|v| v.0).collect();
    let view = StepDensityView::new(knots, lcm.slopes()).expect("hull slopes form a valid step density");
    MixtureOfUniforms::from_step(&view).expect("hull step density converts to a mixture")
}
