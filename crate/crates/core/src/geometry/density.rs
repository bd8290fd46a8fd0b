use serde::{Deserialize, Serialize};

use super::{hex_area, in_hexagon, Point};
use crate::{Error, Result};

/// Named user-density maps (users per square meter).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityKind {
    Constant {
        lambda: f64,
    },
    /// `base + peak * exp(-|l - center|^2 / (2 spread^2))`.
    Hotspot {
        base: f64,
        peak: f64,
        center: Point,
        spread: f64,
    },
    /// `lambda` inside the target (origin) hexagon, zero elsewhere.
    TargetCellOnly {
        lambda: f64,
        cell_radius: f64,
    },
}

/// Spatially varying density of active users with declared bounds
/// `lower <= lambda(l) <= upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMap {
    kind: DensityKind,
    lower: f64,
    upper: f64,
}

impl DensityMap {
    pub fn new(kind: DensityKind) -> Result<Self> {
        let (lower, upper) = match &kind {
            DensityKind::Constant { lambda } => (*lambda, *lambda),
            DensityKind::Hotspot {
                base, peak, spread, ..
            } => {
                if !(*spread > 0.0) || *peak < 0.0 {
                    return Err(Error::Config(format!(
                        "hotspot needs spread > 0 and peak >= 0 (spread {spread}, peak {peak})"
                    )));
                }
                (*base, base + peak)
            }
            DensityKind::TargetCellOnly {
                lambda,
                cell_radius,
            } => {
                if !(*cell_radius > 0.0) {
                    return Err(Error::Config("cell radius must be positive".into()));
                }
                (0.0, *lambda)
            }
        };
        if !(lower >= 0.0) || !upper.is_finite() {
            return Err(Error::Config(format!(
                "density bounds [{lower}, {upper}] must be finite and non-negative"
            )));
        }
        Ok(DensityMap { kind, lower, upper })
    }

    pub fn constant(lambda: f64) -> Result<Self> {
        Self::new(DensityKind::Constant { lambda })
    }

    /// Constant density giving `users_per_cell` active users per hexagon on average.
    pub fn per_cell_mean(users_per_cell: f64, cell_radius: f64) -> Result<Self> {
        Self::constant(users_per_cell / hex_area(cell_radius))
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn lower_bound(&self) -> f64 {
        self.lower
    }

    pub fn upper_bound(&self) -> f64 {
        self.upper
    }

    pub fn evaluate(&self, p: Point) -> f64 {
        match &self.kind {
            DensityKind::Constant { lambda } => *lambda,
            DensityKind::Hotspot {
                base,
                peak,
                center,
                spread,
            } => {
                let d2 = {
                    let d = p.distance(center);
                    d * d
                };
                base + peak * (-d2 / (2.0 * spread * spread)).exp()
            }
            DensityKind::TargetCellOnly {
                lambda,
                cell_radius,
            } => {
                if in_hexagon(*cell_radius, p) {
                    *lambda
                } else {
                    0.0
                }
            }
        }
    }

    /// Evaluates and checks the declared bounds.
    pub fn evaluate_checked(&self, p: Point) -> Result<f64> {
        let v = self.evaluate(p);
        if v < self.lower || v > self.upper || !v.is_finite() {
            return Err(Error::DensityBounds {
                x: p.x,
                y: p.y,
                value: v,
                lower: self.lower,
                upper: self.upper,
            });
        }
        Ok(v)
    }

    pub fn is_zero(&self) -> bool {
        self.upper == 0.0
    }
}
