use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use super::{DensityMap, NetworkLayout, Point};
use crate::{Error, Result};

/// Link distances below this are clamped before applying the pathloss law.
pub const MIN_LINK_DISTANCE: f64 = 1.0;

/// Region in which the Poisson process is realised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingWindow {
    /// Origin-centred disk of radius [`NetworkLayout::bounding_radius`].
    BoundingDisk,
    /// Union of the layout's hexagons.
    HexUnion,
}

/// Large-scale propagation and admission parameters of a drop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropSettings {
    pub pathloss_exponent: f64,
    /// Standard deviation of log-normal shadowing, in dB.
    pub shadowing_db: f64,
    /// Pilot length; no cell may hold more active users than this.
    pub max_users_per_cell: usize,
    pub window: SamplingWindow,
}

/// One active user with its large-scale coefficients toward every BS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRecord {
    pub position: Point,
    pub cell: usize,
    pub index_in_cell: usize,
    /// Linear large-scale gain toward each BS, `10^(shadowing/10) * d^-sigma`.
    pub rho: Vec<f64>,
    /// Shadowing draw toward each BS, in dB.
    pub shadowing_db: Vec<f64>,
}

/// One realisation of the user point process with association and
/// large-scale fading. The target user, when present, is user 0 of cell 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserDrop {
    num_cells: usize,
    pathloss_exponent: f64,
    users: Vec<UserRecord>,
}

fn gain(distance: f64, shadowing_db: f64, pathloss_exponent: f64) -> f64 {
    10f64.powf(shadowing_db / 10.0) * distance.max(MIN_LINK_DISTANCE).powf(-pathloss_exponent)
}

fn shadowing_row<R: Rng>(rng: &mut R, cells: usize, std_db: f64) -> Vec<f64> {
    if std_db == 0.0 {
        return vec![0.0; cells];
    }
    let normal = Normal::new(0.0, std_db).expect("finite shadowing std");
    (0..cells).map(|_| normal.sample(rng)).collect()
}

/// Samples active users by thinning a homogeneous process of intensity
/// `density.upper_bound()`, associates each to its nearest BS and draws
/// independent shadowing toward every BS.
pub fn sample_user_drop(
    layout: &NetworkLayout,
    density: &DensityMap,
    settings: &DropSettings,
    seed: u64,
) -> Result<UserDrop> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let disk = layout.bounding_radius();
    let upper = density.upper_bound();
    let mean = upper * std::f64::consts::PI * disk * disk;
    let candidates = if mean > 0.0 {
        Poisson::new(mean)
            .map_err(|e| Error::Config(format!("poisson mean {mean}: {e}")))?
            .sample(&mut rng) as usize
    } else {
        0
    };

    let mut positions = Vec::new();
    for _ in 0..candidates {
        let r = disk * rng.random::<f64>().sqrt();
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        let p = Point::polar(r, phi);
        let accept: f64 = rng.random();
        let lambda = density.evaluate_checked(p)?;
        if accept * upper >= lambda {
            continue;
        }
        if settings.window == SamplingWindow::HexUnion && !layout.in_network(p) {
            continue;
        }
        positions.push(p);
    }

    let mut drop = UserDrop {
        num_cells: layout.num_cells(),
        pathloss_exponent: settings.pathloss_exponent,
        users: Vec::with_capacity(positions.len()),
    };
    let mut counts = vec![0usize; layout.num_cells()];
    for p in positions {
        let cell = layout.nearest_bs(p);
        let shadow = shadowing_row(&mut rng, layout.num_cells(), settings.shadowing_db);
        drop.users.push(UserRecord {
            position: p,
            cell,
            index_in_cell: counts[cell],
            rho: drop_gains(layout, p, &shadow, settings.pathloss_exponent),
            shadowing_db: shadow,
        });
        counts[cell] += 1;
    }
    drop.check_load(settings.max_users_per_cell)?;
    Ok(drop)
}

fn drop_gains(layout: &NetworkLayout, p: Point, shadow: &[f64], sigma: f64) -> Vec<f64> {
    layout
        .bs_positions()
        .iter()
        .zip(shadow)
        .map(|(bs, &s)| gain(p.distance(bs), s, sigma))
        .collect()
}

impl UserDrop {
    /// Builds a drop from explicit positions and shadowing rows (dB, one per BS).
    pub fn from_parts(
        layout: &NetworkLayout,
        positions: &[Point],
        shadowing_db: &[Vec<f64>],
        pathloss_exponent: f64,
    ) -> Result<Self> {
        if positions.len() != shadowing_db.len() {
            return Err(Error::Dimension(format!(
                "{} positions but {} shadowing rows",
                positions.len(),
                shadowing_db.len()
            )));
        }
        let mut counts = vec![0usize; layout.num_cells()];
        let mut users = Vec::with_capacity(positions.len());
        for (p, shadow) in positions.iter().zip(shadowing_db) {
            if shadow.len() != layout.num_cells() {
                return Err(Error::Dimension(format!(
                    "shadowing row has {} entries for {} cells",
                    shadow.len(),
                    layout.num_cells()
                )));
            }
            let cell = layout.nearest_bs(*p);
            users.push(UserRecord {
                position: *p,
                cell,
                index_in_cell: counts[cell],
                rho: drop_gains(layout, *p, shadow, pathloss_exponent),
                shadowing_db: shadow.clone(),
            });
            counts[cell] += 1;
        }
        Ok(UserDrop {
            num_cells: layout.num_cells(),
            pathloss_exponent,
            users,
        })
    }

    /// Inserts a target user at `(distance, 0)` as user 0 of cell 0.
    ///
    /// Its shadowing toward the target BS is 0 dB so that `rho_target(0)` is
    /// the deterministic pathloss `distance^-sigma`; shadowing toward the other
    /// BSs is drawn from `seed`.
    pub fn with_planted_target(
        mut self,
        layout: &NetworkLayout,
        distance: f64,
        settings: &DropSettings,
        seed: u64,
    ) -> Result<Self> {
        let p = Point::new(distance, 0.0);
        if layout.nearest_bs(p) != 0 {
            return Err(Error::Config(format!(
                "target distance {distance} m lies outside the target cell"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut shadow = shadowing_row(&mut rng, layout.num_cells(), settings.shadowing_db);
        shadow[0] = 0.0;
        for u in self.users.iter_mut().filter(|u| u.cell == 0) {
            u.index_in_cell += 1;
        }
        self.users.insert(
            0,
            UserRecord {
                position: p,
                cell: 0,
                index_in_cell: 0,
                rho: drop_gains(layout, p, &shadow, settings.pathloss_exponent),
                shadowing_db: shadow,
            },
        );
        self.check_load(settings.max_users_per_cell)?;
        Ok(self)
    }

    fn check_load(&self, limit: usize) -> Result<()> {
        for (cell, &count) in self.cell_counts().iter().enumerate() {
            if count > limit {
                return Err(Error::CellOverload { cell, count, limit });
            }
        }
        Ok(())
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn pathloss_exponent(&self) -> f64 {
        self.pathloss_exponent
    }

    pub fn users(&self) -> &[UserRecord] {
        &self.users
    }

    pub fn user(&self, u: usize) -> &UserRecord {
        &self.users[u]
    }

    /// Large-scale gain from user `u` to BS `bs`.
    pub fn rho(&self, u: usize, bs: usize) -> f64 {
        self.users[u].rho[bs]
    }

    /// Large-scale gain from user `u` to the target BS.
    pub fn rho_target(&self, u: usize) -> f64 {
        self.users[u].rho[0]
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_cells];
        for u in &self.users {
            counts[u.cell] += 1;
        }
        counts
    }

    /// Users of `cell`, ordered by in-cell index.
    pub fn cell_members(&self, cell: usize) -> Vec<usize> {
        let mut members: Vec<usize> = (0..self.users.len())
            .filter(|&u| self.users[u].cell == cell)
            .collect();
        members.sort_by_key(|&u| self.users[u].index_in_cell);
        members
    }

    /// User 0 of the target cell, if the target cell is not empty.
    pub fn target_user(&self) -> Option<usize> {
        self.users
            .iter()
            .position(|u| u.cell == 0 && u.index_in_cell == 0)
    }

    /// Out-of-cell users within `radius` of the target BS.
    pub fn cooperative_set(&self, radius: f64) -> Vec<usize> {
        (0..self.users.len())
            .filter(|&u| self.users[u].cell != 0 && self.users[u].position.norm() <= radius)
            .collect()
    }
}
