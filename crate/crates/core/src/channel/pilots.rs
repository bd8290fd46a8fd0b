use std::f64::consts::PI;

use super::FrameConfig;
use crate::geometry::UserDrop;
use crate::linalg::C64;
use crate::{Error, Result};

pub(crate) fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Unit-modulus Zadoff-Chu sequence of length `len` and root `root`.
pub fn zadoff_chu(root: usize, len: usize) -> Vec<C64> {
    let odd = (len % 2) as u128;
    (0..len)
        .map(|n| {
            let n = n as u128;
            // reduce the phase index exactly before converting to an angle
            let k = (root as u128 * n * (n + odd)) % (2 * len as u128);
            C64::from_polar(1.0, -PI * k as f64 / len as f64)
        })
        .collect()
}

/// Pilot sequences for every user of a drop.
///
/// Cell `c` uses Zadoff-Chu root `c + 1`; user `k` of a cell uses the root
/// sequence cyclically shifted by `k`. Within a cell the pilots are
/// orthogonal and across cells every pair has correlation magnitude
/// `sqrt(L_p)` per unit symbol power.
#[derive(Debug, Clone)]
pub struct PilotBook {
    len: usize,
    tx_power: f64,
    pilots: Vec<Vec<C64>>,
}

pub fn build_pilot_book(config: &FrameConfig, drop: &UserDrop) -> Result<PilotBook> {
    let len = config.pilot_len;
    if !is_prime(len) {
        return Err(Error::NonPrimePilotLength(len));
    }
    if drop.num_cells() > len - 1 {
        return Err(Error::NotEnoughRoots {
            cells: drop.num_cells(),
            len,
            available: len - 1,
        });
    }
    let roots: Vec<Vec<C64>> = (0..drop.num_cells())
        .map(|c| zadoff_chu(c + 1, len))
        .collect();
    let mut pilots = Vec::with_capacity(drop.num_users());
    for u in drop.users() {
        if u.index_in_cell >= len {
            return Err(Error::CellOverload {
                cell: u.cell,
                count: u.index_in_cell + 1,
                limit: len,
            });
        }
        let base = &roots[u.cell];
        pilots.push((0..len).map(|n| base[(n + u.index_in_cell) % len]).collect());
    }
    Ok(PilotBook {
        len,
        tx_power: config.tx_power,
        pilots,
    })
}

impl PilotBook {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.pilots.is_empty()
    }

    /// Unit-power pilot of user `u`.
    pub fn pilot(&self, u: usize) -> &[C64] {
        &self.pilots[u]
    }

    /// Pilot of user `u` at transmit power, `sqrt(P) · pilot(u)`.
    pub fn physical(&self, u: usize) -> Vec<C64> {
        let s = self.tx_power.sqrt();
        self.pilots[u].iter().map(|z| z * s).collect()
    }

    /// Inner product `x_a x_b^H` of the physical pilots.
    pub fn correlation(&self, a: usize, b: usize) -> C64 {
        self.pilots[a]
            .iter()
            .zip(&self.pilots[b])
            .map(|(x, y)| x * y.conj())
            .sum::<C64>()
            * self.tx_power
    }

    /// Worst relative violation of the correlation structure over all user
    /// pairs, given the cell of each user.
    pub fn correlation_defect(&self, cells: &[usize]) -> f64 {
        let lp = self.len as f64;
        let mut worst: f64 = 0.0;
        for a in 0..self.pilots.len() {
            for b in a..self.pilots.len() {
                let c = self.correlation(a, b).norm();
                let (expect, scale) = if a == b {
                    (lp * self.tx_power, lp * self.tx_power)
                } else if cells[a] == cells[b] {
                    (0.0, lp * self.tx_power)
                } else {
                    (lp.sqrt() * self.tx_power, lp.sqrt() * self.tx_power)
                };
                worst = worst.max((c - expect).abs() / scale);
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_hex_layout, Point};

    #[test]
    fn primality() {
        let primes: Vec<usize> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
    }

    #[test]
    fn zadoff_chu_is_cazac() {
        let x = zadoff_chu(7, 31);
        assert!(x.iter().all(|z| (z.norm() - 1.0).abs() < 1e-14));
        for shift in 1..31 {
            let c: C64 = (0..31).map(|n| x[n] * x[(n + shift) % 31].conj()).sum();
            assert!(c.norm() < 1e-12);
        }
    }

    fn two_cell_drop() -> (FrameConfig, UserDrop) {
        let layout = build_hex_layout(500.0, 1).unwrap();
        let pos = [
            Point::new(100.0, 0.0),
            Point::new(-50.0, 80.0),
            Point::new(900.0, 400.0),
            Point::new(-700.0, -500.0),
        ];
        let shadow = vec![vec![0.0; 7]; 4];
        let drop = UserDrop::from_parts(&layout, &pos, &shadow, 3.76).unwrap();
        (FrameConfig::default(), drop)
    }

    #[test]
    fn correlation_invariants() {
        let (cfg, drop) = two_cell_drop();
        let book = build_pilot_book(&cfg, &drop).unwrap();
        let cells: Vec<usize> = drop.users().iter().map(|u| u.cell).collect();
        assert!(book.correlation_defect(&cells) < 1e-9);
        let p = cfg.tx_power;
        assert!((book.correlation(0, 0).norm() - 31.0 * p).abs() < 1e-9 * p);
        assert!(book.correlation(0, 1).norm() < 1e-9 * p);
        assert!((book.correlation(0, 2).norm() / 31.0 - p / 31f64.sqrt()).abs() < 1e-9 * p);
        let phys = book.physical(0);
        assert!((phys[0].norm() - p.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_composite_length() {
        let (mut cfg, drop) = two_cell_drop();
        cfg.pilot_len = 32;
        assert!(matches!(
            build_pilot_book(&cfg, &drop),
            Err(Error::NonPrimePilotLength(32))
        ));
        cfg.pilot_len = 5;
        assert!(matches!(
            build_pilot_book(&cfg, &drop),
            Err(Error::NotEnoughRoots { cells: 7, .. })
        ));
    }
}
