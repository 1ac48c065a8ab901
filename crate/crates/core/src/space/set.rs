use serde::{Deserialize, Serialize};

use super::Iterate;
use crate::error::{Error, Result};

/// A closed convex set with a cheap Euclidean projection.
///
/// Sets act on the flat `[x; y]` layout of an [`Iterate`]; a `Product` splits
/// that buffer into consecutive blocks, one per factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibleSet {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Product(Vec<FeasibleSet>),
}

impl FeasibleSet {
    pub fn new_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let set = FeasibleSet::Box { lower, upper };
        set.validate()?;
        Ok(set)
    }

    /// `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new_box(vec![lo; dim], vec![hi; dim])
    }

    pub fn new_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let set = FeasibleSet::Ball { center, radius };
        set.validate()?;
        Ok(set)
    }

    pub fn product(parts: Vec<FeasibleSet>) -> Result<Self> {
        let set = FeasibleSet::Product(parts);
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FeasibleSet::Box { lower, upper } => {
                if lower.len() != upper.len() {
                    return Err(Error::Dimension {
                        expected: lower.len(),
                        got: upper.len(),
                    });
                }
                for (i, (l, u)) in lower.iter().zip(upper).enumerate() {
                    if l.is_nan() || u.is_nan() || l > u {
                        return Err(Error::Config(format!(
                            "box bounds out of order at coordinate {i}: [{l}, {u}]"
                        )));
                    }
                }
                Ok(())
            }
            FeasibleSet::Ball { center, radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::Config(format!(
                        "ball radius must be positive, got {radius}"
                    )));
                }
                if center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Config("ball center must be finite".into()));
                }
                Ok(())
            }
            FeasibleSet::Product(parts) => {
                if parts.is_empty() {
                    return Err(Error::Config(
                        "product set needs at least one factor".into(),
                    ));
                }
                parts.iter().try_for_each(FeasibleSet::validate)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Box { lower, .. } => lower.len(),
            FeasibleSet::Ball { center, .. } => center.len(),
            FeasibleSet::Product(parts) => parts.iter().map(FeasibleSet::dim).sum(),
        }
    }

    pub fn project(&self, z: &Iterate) -> Result<Iterate> {
        if z.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: z.dim(),
            });
        }
        let mut out = z.clone();
        self.project_in_place(out.as_mut_slice());
        Ok(out)
    }

    /// Projects a flat buffer in place. The caller guarantees `v.len() == self.dim()`.
    pub fn project_in_place(&self, v: &mut [f64]) {
        debug_assert_eq!(v.len(), self.dim());
        match self {
            FeasibleSet::Box { lower, upper } => {
                for ((vi, l), u) in v.iter_mut().zip(lower).zip(upper) {
                    *vi = vi.clamp(*l, *u);
                }
            }
            FeasibleSet::Ball { center, radius } => {
                let dist = v
                    .iter()
                    .zip(center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>()
                    .sqrt();
                if dist > *radius {
                    let shrink = radius / dist;
                    for (vi, c) in v.iter_mut().zip(center) {
                        *vi = c + (*vi - c) * shrink;
                    }
                }
            }
            FeasibleSet::Product(parts) => {
                let mut offset = 0;
                for part in parts {
                    let d = part.dim();
                    part.project_in_place(&mut v[offset..offset + d]);
                    offset += d;
                }
            }
        }
    }

    /// Smallest `D` with `sup_{z∈Z} ½‖z‖² ≤ D²`.
    pub fn diameter_bound(&self) -> Result<f64> {
        Ok(self.half_sup_norm_sq()?.sqrt())
    }

    fn half_sup_norm_sq(&self) -> Result<f64> {
        match self {
            FeasibleSet::Box { lower, upper } => {
                let mut sup = 0.0;
                for (l, u) in lower.iter().zip(upper) {
                    if !l.is_finite() || !u.is_finite() {
                        return Err(Error::Config("unbounded box has no finite diameter".into()));
                    }
                    sup += (l * l).max(u * u);
                }
                Ok(0.5 * sup)
            }
            FeasibleSet::Ball { center, radius } => {
                let reach = center.iter().map(|c| c * c).sum::<f64>().sqrt() + radius;
                Ok(0.5 * reach * reach)
            }
            FeasibleSet::Product(parts) => parts.iter().map(FeasibleSet::half_sup_norm_sq).sum(),
        }
    }

    /// How far `v` sits outside the set (0 for members).
    ///
    /// Box: largest per-coordinate excess. Ball: excess distance beyond the radius.
    pub fn violation(&self, v: &[f64]) -> f64 {
        match self {
            FeasibleSet::Box { lower, upper } => v
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(x, (l, u))| (l - x).max(x - u).max(0.0))
                .fold(0.0, f64::max),
            FeasibleSet::Ball { center, radius } => {
                let dist = v
                    .iter()
                    .zip(center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>()
                    .sqrt();
                (dist - radius).max(0.0)
            }
            FeasibleSet::Product(parts) => {
                let mut offset = 0;
                let mut worst = 0.0f64;
                for part in parts {
                    let d = part.dim();
                    worst = worst.max(part.violation(&v[offset..offset + d]));
                    offset += d;
                }
                worst
            }
        }
    }

    pub fn contains(&self, z: &Iterate, tol: f64) -> bool {
        z.dim() == self.dim() && self.violation(z.as_slice()) <= tol
    }
}
