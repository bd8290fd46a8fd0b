use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};

use super::Point;
use crate::{Error, Result};

/// Largest number of hexagonal rings accepted by [`build_hex_layout`].
pub const MAX_RINGS: usize = 20;

/// Area of a regular hexagon with circumradius `cell_radius`.
pub fn hex_area(cell_radius: f64) -> f64 {
    1.5 * 3f64.sqrt() * cell_radius * cell_radius
}

/// Distance from the centre of a flat-topped hexagon to its boundary along
/// direction `angle`. Vertices sit at multiples of 60 degrees.
pub fn hex_boundary_radius(cell_radius: f64, angle: f64) -> f64 {
    let apothem = 0.5 * 3f64.sqrt() * cell_radius;
    let off_normal = angle.rem_euclid(FRAC_PI_3) - FRAC_PI_6;
    apothem / off_normal.cos()
}

/// Whether `p` (relative to the hexagon centre) lies inside the flat-topped hexagon.
pub fn in_hexagon(cell_radius: f64, p: Point) -> bool {
    let r = p.norm();
    r == 0.0 || r <= hex_boundary_radius(cell_radius, p.angle())
}

/// Base-station positions of a full hexagonal grid around the target BS.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout {
    bs_positions: Vec<Point>,
    cell_radius: f64,
    rings: usize,
}

/// Builds `1 + 3·rings·(rings+1)` flat-topped hexagonal cells with the
/// target BS at the origin, ordered ring by ring and counter-clockwise.
pub fn build_hex_layout(cell_radius: f64, rings: usize) -> Result<NetworkLayout> {
    if !(cell_radius > 0.0) || !cell_radius.is_finite() {
        return Err(Error::Config(format!(
            "cell radius must be positive, got {cell_radius}"
        )));
    }
    if rings > MAX_RINGS {
        return Err(Error::TooManyRings(rings));
    }
    let k = rings as i64;
    let mut cells: Vec<(i64, f64, Point)> = Vec::new();
    for q in -k..=k {
        for r in -k..=k {
            let s = -q - r;
            let ring = q.abs().max(r.abs()).max(s.abs());
            if ring > k {
                continue;
            }
            let p = Point::new(
                1.5 * cell_radius * q as f64,
                3f64.sqrt() * cell_radius * (r as f64 + 0.5 * q as f64),
            );
            let angle = if ring == 0 {
                0.0
            } else {
                p.angle().rem_euclid(std::f64::consts::TAU)
            };
            cells.push((ring, angle, p));
        }
    }
    cells.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(NetworkLayout {
        bs_positions: cells.into_iter().map(|c| c.2).collect(),
        cell_radius,
        rings,
    })
}

impl NetworkLayout {
    pub fn bs_positions(&self) -> &[Point] {
        &self.bs_positions
    }

    pub fn num_cells(&self) -> usize {
        self.bs_positions.len()
    }

    pub fn cell_radius(&self) -> f64 {
        self.cell_radius
    }

    pub fn rings(&self) -> usize {
        self.rings
    }

    /// Radius of the smallest origin-centred disk covering every cell.
    pub fn bounding_radius(&self) -> f64 {
        self.bs_positions
            .iter()
            .map(Point::norm)
            .fold(0.0, f64::max)
            + self.cell_radius
    }

    /// Index of the closest BS; ties go to the lower index.
    pub fn nearest_bs(&self, p: Point) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, bs) in self.bs_positions.iter().enumerate() {
            let d = bs.distance(&p);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    pub fn in_cell(&self, cell: usize, p: Point) -> bool {
        in_hexagon(self.cell_radius, p.sub(&self.bs_positions[cell]))
    }

    /// Whether `p` lies inside the union of all hexagons.
    pub fn in_network(&self, p: Point) -> bool {
        self.in_cell(self.nearest_bs(p), p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let l = build_hex_layout(500.0, 0).unwrap();
        assert_eq!(l.bs_positions(), &[Point::ORIGIN]);
    }

    #[test]
    fn first_ring_at_sqrt3_radius() {
        let l = build_hex_layout(500.0, 1).unwrap();
        assert_eq!(l.num_cells(), 7);
        assert_eq!(l.bs_positions()[0], Point::ORIGIN);
        for p in &l.bs_positions()[1..] {
            assert!((p.norm() - 866.025_403_784_438_6).abs() < 1e-9);
        }
    }

    #[test]
    fn ring_count_formula_and_spacing() {
        for rings in 0..=5 {
            let l = build_hex_layout(500.0, rings).unwrap();
            assert_eq!(l.num_cells(), 1 + 3 * rings * (rings + 1));
            let min_spacing = 3f64.sqrt() * 500.0 - 1e-9;
            for (i, a) in l.bs_positions().iter().enumerate() {
                for b in &l.bs_positions()[i + 1..] {
                    assert!(a.distance(b) >= min_spacing);
                }
            }
        }
        assert_eq!(build_hex_layout(500.0, 2).unwrap().num_cells(), 19);
    }

    #[test]
    fn rejects_huge_layouts() {
        assert!(matches!(
            build_hex_layout(500.0, 21),
            Err(Error::TooManyRings(21))
        ));
        assert!(build_hex_layout(0.0, 1).is_err());
    }

    #[test]
    fn hex_boundary() {
        assert!((hex_boundary_radius(500.0, 0.0) - 500.0).abs() < 1e-9);
        assert!((hex_boundary_radius(500.0, FRAC_PI_6) - 433.012_701_892_219_3).abs() < 1e-9);
        assert!(in_hexagon(500.0, Point::new(499.0, 0.0)));
        assert!(!in_hexagon(500.0, Point::new(0.0, 440.0)));
    }

    #[test]
    fn hex_membership_agrees_with_nearest_bs_inside_grid() {
        let l = build_hex_layout(500.0, 2).unwrap();
        for i in 0..40 {
            for j in 0..40 {
                let p = Point::new(-1000.0 + 50.0 * i as f64 + 0.3, -1000.0 + 50.0 * j as f64 + 0.7);
                let n = l.nearest_bs(p);
                if l.bs_positions()[n].norm() < 1.0 {
                    assert!(l.in_cell(0, p), "{p:?}");
                }
                if l.in_cell(0, p) {
                    assert_eq!(n, 0, "{p:?}");
                }
            }
        }
    }
}
