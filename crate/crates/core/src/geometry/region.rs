use std::f64::consts::{FRAC_PI_3, TAU};

use serde::{Deserialize, Serialize};

use super::quadrature::gauss_legendre_on;
use super::{hex_boundary_radius, in_hexagon, NetworkLayout, Point};
use crate::{Error, Result};

pub const DEFAULT_RADIAL_NODES: usize = 256;
pub const DEFAULT_ANGULAR_NODES: usize = 128;
/// Default truncation radius in units of the cell radius.
pub const DEFAULT_R_MAX_FACTOR: f64 = 20.0;

/// Which part of the plane is integrated over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RegionMode {
    /// Everything outside the target hexagon.
    OutsideTargetCell,
    /// Everything farther than `r_co` from the target BS.
    OutsideRadius { r_co: f64 },
}

/// One polar quadrature node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadNode {
    pub point: Point,
    pub radius: f64,
    /// Area weight, including the polar Jacobian.
    pub weight: f64,
}

/// Serializable summary of a region and its quadrature resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDescriptor {
    #[serde(flatten)]
    pub mode: RegionMode,
    pub cell_radius: f64,
    pub r_max: f64,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

/// Region outside the target cell or cooperation disk, truncated at `r_max`,
/// with a tensor-product quadrature rule.
///
/// Radius is integrated with Gauss–Legendre in `ln r`. For the annulus the
/// angle uses the trapezoid rule; outside the hexagon each 60 degree sector
/// gets its own Gauss–Legendre rule so that the kinks of the hexagon boundary
/// fall on sector edges.
#[derive(Debug, Clone)]
pub struct RegionSpec {
    descriptor: RegionDescriptor,
    nodes: Vec<QuadNode>,
}

/// Region of `mode` truncated at `r_max`, with the default resolution.
pub fn integration_region(layout: &NetworkLayout, mode: RegionMode, r_max: f64) -> Result<RegionSpec> {
    RegionSpec::new(layout.cell_radius(), mode, r_max)
}

impl RegionSpec {
    pub fn new(cell_radius: f64, mode: RegionMode, r_max: f64) -> Result<Self> {
        Self::with_resolution(
            cell_radius,
            mode,
            r_max,
            DEFAULT_RADIAL_NODES,
            DEFAULT_ANGULAR_NODES,
        )
    }

    pub fn with_resolution(
        cell_radius: f64,
        mode: RegionMode,
        r_max: f64,
        radial_nodes: usize,
        angular_nodes: usize,
    ) -> Result<Self> {
        if radial_nodes == 0 || angular_nodes == 0 {
            return Err(Error::Config("quadrature needs at least one node per axis".into()));
        }
        if !(cell_radius > 0.0) {
            return Err(Error::Config(format!("cell radius {cell_radius} must be positive")));
        }
        let inner = match mode {
            RegionMode::OutsideRadius { r_co } => {
                if !(r_co > 0.0) {
                    return Err(Error::Config(format!("cooperation radius {r_co} must be positive")));
                }
                r_co
            }
            RegionMode::OutsideTargetCell => cell_radius,
        };
        if !(r_max > inner) || !r_max.is_finite() {
            return Err(Error::Config(format!(
                "truncation radius {r_max} must exceed the inner radius {inner}"
            )));
        }

        let mut nodes = Vec::with_capacity(radial_nodes * angular_nodes);
        let mut push_ray = |phi: f64, w_phi: f64, r_in: f64| {
            for (u, w_u) in gauss_legendre_on(radial_nodes, r_in.ln(), r_max.ln()) {
                let r = u.exp();
                nodes.push(QuadNode {
                    point: Point::polar(r, phi),
                    radius: r,
                    weight: w_phi * w_u * r * r,
                });
            }
        };
        match mode {
            RegionMode::OutsideRadius { r_co } => {
                let w = TAU / angular_nodes as f64;
                for k in 0..angular_nodes {
                    push_ray(k as f64 * w, w, r_co);
                }
            }
            RegionMode::OutsideTargetCell => {
                let per_sector = angular_nodes.div_ceil(6);
                for s in 0..6 {
                    let a = s as f64 * FRAC_PI_3;
                    for (phi, w) in gauss_legendre_on(per_sector, a, a + FRAC_PI_3) {
                        push_ray(phi, w, hex_boundary_radius(cell_radius, phi));
                    }
                }
            }
        }

        Ok(RegionSpec {
            descriptor: RegionDescriptor {
                mode,
                cell_radius,
                r_max,
                radial_nodes,
                angular_nodes,
            },
            nodes,
        })
    }

    pub fn mode(&self) -> RegionMode {
        self.descriptor.mode
    }

    pub fn r_max(&self) -> f64 {
        self.descriptor.r_max
    }

    pub fn descriptor(&self) -> &RegionDescriptor {
        &self.descriptor
    }

    pub fn nodes(&self) -> &[QuadNode] {
        &self.nodes
    }

    pub fn contains(&self, p: Point) -> bool {
        let r = p.norm();
        if r > self.descriptor.r_max {
            return false;
        }
        match self.descriptor.mode {
            RegionMode::OutsideRadius { r_co } => r > r_co,
            RegionMode::OutsideTargetCell => !in_hexagon(self.descriptor.cell_radius, p),
        }
    }

    /// Integral of `f` over the region.
    pub fn integrate<F: Fn(&QuadNode) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n)).sum()
    }

    /// Upper bound on `∫_{|l| > r_max} lambda · c · |l|^-p ds` for `p > 2`.
    pub fn power_tail(&self, lambda: f64, c: f64, p: f64) -> f64 {
        if p <= 2.0 {
            return f64::INFINITY;
        }
        TAU * lambda * c * self.descriptor.r_max.powf(2.0 - p) / (p - 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hex_area;
    use std::f64::consts::PI;

    #[test]
    fn membership() {
        let r = RegionSpec::new(500.0, RegionMode::OutsideRadius { r_co: 700.0 }, 10_000.0).unwrap();
        assert!(r.contains(Point::new(800.0, 0.0)));
        assert!(!r.contains(Point::new(600.0, 0.0)));
        let h = RegionSpec::new(500.0, RegionMode::OutsideTargetCell, 10_000.0).unwrap();
        assert!(h.contains(Point::new(0.0, 450.0)));
        assert!(!h.contains(Point::new(480.0, 0.0)));
    }

    #[test]
    fn area_outside_target_cell() {
        let r = RegionSpec::new(500.0, RegionMode::OutsideTargetCell, 5000.0).unwrap();
        let area = r.integrate(|_| 1.0);
        let exact = PI * 5000.0 * 5000.0 - hex_area(500.0);
        assert!((area / exact - 1.0).abs() < 1e-6, "{area} {exact}");
    }

    #[test]
    fn power_law_closed_form() {
        let s = 3.76;
        let r = RegionSpec::new(500.0, RegionMode::OutsideRadius { r_co: 700.0 }, 10_000.0).unwrap();
        let q = r.integrate(|n| n.radius.powf(-s));
        let exact = TAU * (700f64.powf(2.0 - s) - 10_000f64.powf(2.0 - s)) / (s - 2.0);
        assert!((q / exact - 1.0).abs() < 1e-8, "{q} {exact}");
    }

    #[test]
    fn tail_bound_matches_integral_beyond() {
        let r = RegionSpec::new(500.0, RegionMode::OutsideRadius { r_co: 700.0 }, 5000.0).unwrap();
        let tail = r.power_tail(2.0, 3.0, 3.76);
        assert!((tail - 2.0 * 3.0 * TAU * 5000f64.powf(-1.76) / 1.76).abs() < 1e-18);
        assert!(r.power_tail(1.0, 1.0, 2.0).is_infinite());
    }

    #[test]
    fn rejects_inverted_radii() {
        assert!(RegionSpec::new(500.0, RegionMode::OutsideRadius { r_co: 700.0 }, 600.0).is_err());
        assert!(RegionSpec::new(500.0, RegionMode::OutsideTargetCell, 400.0).is_err());
    }

    #[test]
    fn descriptor_serializes_with_mode_tag() {
        let r = RegionSpec::with_resolution(500.0, RegionMode::OutsideRadius { r_co: 700.0 }, 2000.0, 8, 6)
            .unwrap();
        let json = serde_json::to_string(r.descriptor()).unwrap();
        assert!(json.contains("\"mode\":\"outside_radius\""), "{json}");
        assert_eq!(r.nodes().len(), 48);
    }
}
