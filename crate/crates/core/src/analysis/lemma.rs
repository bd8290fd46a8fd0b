use crate::channel::{FrameConfig, Scheme};
use crate::detector::SINR_CAP;
use crate::geometry::UserDrop;

/// Ingredients of the large-system SINR of the target user in one block:
/// the interference functional
/// `E = sum over users outside Φ† of [rho/(M rho11) + rho²/(L† rho11²)]`,
/// the size of the estimated set `Φ†` and the estimation length `L†`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaTerms {
    pub functional: f64,
    pub set_size: usize,
    pub l_dagger: usize,
}

/// Asymptotic SINR, capped at [`SINR_CAP`] when there is no interference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticSinr {
    pub value: f64,
    pub capped: bool,
}

impl LemmaTerms {
    /// `|Φ†| / L† + 1`.
    pub fn scale(&self) -> f64 {
        self.set_size as f64 / self.l_dagger as f64 + 1.0
    }

    pub fn sinr(&self) -> AsymptoticSinr {
        let denom = self.scale() * self.functional;
        if denom > 0.0 {
            AsymptoticSinr {
                value: 1.0 / denom,
                capped: false,
            }
        } else {
            AsymptoticSinr {
                value: SINR_CAP,
                capped: true,
            }
        }
    }
}

/// Membership of each drop user in `Φ†` for block `block` (1-based): the
/// target cell, plus the cooperative set once the block is cooperative.
pub fn dagger_members(drop: &UserDrop, config: &FrameConfig, block: usize, scheme: Scheme) -> Vec<bool> {
    let mut member: Vec<bool> = drop.users().iter().map(|u| u.cell == 0).collect();
    if config.is_cooperative_block(block, scheme) {
        for u in drop.cooperative_set(config.coop_radius) {
            member[u] = true;
        }
    }
    member
}

/// Evaluates the interference functional of the drop for a target with
/// large-scale gain `rho_target`.
pub fn lemma_terms(
    rho_target: f64,
    drop: &UserDrop,
    config: &FrameConfig,
    block: usize,
    scheme: Scheme,
) -> LemmaTerms {
    let member = dagger_members(drop, config, block, scheme);
    let l_dagger = config.dagger_len(block, scheme);
    let m = config.antennas as f64;
    let l = l_dagger as f64;
    let functional = (0..drop.num_users())
        .filter(|&u| !member[u])
        .map(|u| {
            let ratio = drop.rho_target(u) / rho_target;
            ratio / m + ratio * ratio / l
        })
        .sum();
    LemmaTerms {
        functional,
        set_size: member.iter().filter(|&&b| b).count(),
        l_dagger,
    }
}

/// Large-system SINR of the target user in block `block` (1-based).
pub fn asymptotic_sinr(
    rho_target: f64,
    drop: &UserDrop,
    config: &FrameConfig,
    block: usize,
    scheme: Scheme,
) -> AsymptoticSinr {
    lemma_terms(rho_target, drop, config, block, scheme).sinr()
}
