use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Pure trusted hidden states as unit Bloch vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenGrid {
    points: Vec<[f64; 3]>,
    /// Index of the exact contact point, when present (always the last point).
    contact_index: Option<usize>,
    /// Number of Fibonacci layers merged into the grid.
    layers: usize,
    base: usize,
}

fn golden_angle() -> f64 {
    PI * (3.0 - 5f64.sqrt())
}

// Fibonacci spiral with an azimuthal offset; offset 0 is the plain lattice.
fn fibonacci(n: usize, offset: f64) -> impl Iterator<Item = [f64; 3]> {
    let ga = golden_angle();
    (0..n).map(move |i| {
        let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
        let rho = (1.0 - z * z).max(0.0).sqrt();
        let phi = ga * i as f64 + offset;
        [rho * phi.cos(), rho * phi.sin(), z]
    })
}

fn unit(v: [f64; 3]) -> Result<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

impl HiddenGrid {
    /// `n` Fibonacci-sphere points, with `contact_dir` appended exactly when requested.
    pub fn build(n: usize, include_contact: bool, contact_dir: [f64; 3]) -> Result<Self> {
        if n < 6 {
            return Err(Error::InvalidParameter(format!("grid needs at least 6 points, got {n}")));
        }
        let mut points: Vec<[f64; 3]> = fibonacci(n, 0.0).collect();
        let contact_index = if include_contact {
            points.push(unit(contact_dir)?);
            Some(points.len() - 1)
        } else {
            None
        };
        Ok(Self {
            points,
            contact_index,
            layers: 1,
            base: n,
        })
    }

    /// Doubles the point count while keeping every existing point.
    ///
    /// Layer `k` is the base spiral rotated in azimuth by `2 pi` times the
    /// base-2 radical inverse of `k`, so each refinement is a superset of the
    /// previous grid.
    pub fn refined(&self) -> Self {
        let mut points: Vec<[f64; 3]> = self.sphere_points().to_vec();
        for k in self.layers..2 * self.layers {
            points.extend(fibonacci(self.base, layer_offset(k)));
        }
        let contact_index = self.contact_index.map(|i| {
            points.push(self.points[i]);
            points.len() - 1
        });
        Self {
            points,
            contact_index,
            layers: 2 * self.layers,
            base: self.base,
        }
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn includes_contact_atom(&self) -> bool {
        self.contact_index.is_some()
    }

    pub fn contact_index(&self) -> Option<usize> {
        self.contact_index
    }

    fn sphere_points(&self) -> &[[f64; 3]] {
        match self.contact_index {
            Some(i) => &self.points[..i],
            None => &self.points,
        }
    }

    /// Largest angle (radians) from any point to its nearest neighbour.
    pub fn max_nearest_neighbor_angle(&self) -> f64 {
        let pts = &self.points;
        (0..pts.len())
            .map(|i| {
                (0..pts.len())
                    .filter(|&j| j != i)
                    .map(|j| dot(pts[i], pts[j]).clamp(-1.0, 1.0).acos())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

// Van der Corput offsets: 0, pi, pi/2, 3pi/2, pi/4, ...
fn layer_offset(k: usize) -> f64 {
    let mut k = k;
    let mut f = 0.5;
    let mut x = 0.0;
    while k > 0 {
        if k & 1 == 1 {
            x += f;
        }
        k >>= 1;
        f *= 0.5;
    }
    2.0 * PI * x
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
