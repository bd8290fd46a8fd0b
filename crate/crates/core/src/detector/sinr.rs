use serde::{Deserialize, Serialize};

use super::{DetectorState, TargetWeights};
use crate::channel::FrameConfig;
use crate::geometry::UserDrop;
use crate::linalg::{mul_adjoint_left, scale_rows, CMatrix, Hpd, C64};
use crate::Result;

/// SINR reported when signal is present but every impairment term vanishes.
pub const SINR_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionMode {
    NonCooperative,
    Cooperative,
}

impl DetectionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DetectionMode::NonCooperative => "non_cooperative",
            DetectionMode::Cooperative => "cooperative",
        }
    }
}

/// How the expectations over unknown channels are taken in the SINR terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conditioning {
    /// Every channel is conditioned on the full estimate matrix. Estimates are
    /// linear in all channels, so each `h_u` given `Ĥ` is Gaussian with mean
    /// `Ĥ β_u` and per-antenna variance `v_u`.
    #[default]
    Exact,
    /// Channels are treated as independent of the combiner:
    /// `E|w^H h|² = rho ‖w‖²` and `E|w^H Δh|² = δ ‖w‖²`.
    Independent,
}

/// Per-block SINR of the target user and its impairment terms (linear power).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSinrRecord {
    pub block: usize,
    pub sinr: f64,
    pub signal: f64,
    /// Residual intra-set interference from the other estimated users.
    pub intra: f64,
    /// Leakage through channel estimation errors of the estimated users.
    pub estimation_error: f64,
    /// Interference from users that are not estimated.
    pub inter: f64,
    pub noise: f64,
    pub mode: DetectionMode,
    /// Set when the impairments vanish and `sinr` holds [`SINR_CAP`].
    pub capped: bool,
}

impl BlockSinrRecord {
    pub fn from_terms(
        block: usize,
        mode: DetectionMode,
        signal: f64,
        intra: f64,
        estimation_error: f64,
        inter: f64,
        noise: f64,
    ) -> Self {
        let denom = intra + estimation_error + inter + noise;
        let (sinr, capped) = if denom > 0.0 {
            (signal / denom, false)
        } else {
            (if signal > 0.0 { SINR_CAP } else { 0.0 }, signal > 0.0)
        };
        BlockSinrRecord {
            block,
            sinr,
            signal,
            intra,
            estimation_error,
            inter,
            noise,
            mode,
            capped,
        }
    }

    pub fn impairments(&self) -> f64 {
        self.intra + self.estimation_error + self.inter + self.noise
    }

    pub fn sinr_db(&self) -> f64 {
        10.0 * self.sinr.log10()
    }
}

/// Conditional moments of every user's channel given the estimates, seen
/// through one combining vector.
pub(crate) struct Posterior {
    /// `β_u^H p`: the conditional-mean part of `w^H h_u` is `conj(r_u)`.
    pub r: Vec<C64>,
    /// Per-antenna conditional variance `v_u`.
    pub v: Vec<f64>,
}

pub(crate) fn posterior(
    state: &DetectorState,
    rho: &[f64],
    noise: f64,
    weights: &TargetWeights,
) -> Result<Posterior> {
    let c = &state.effective;
    let q = &state.q_tilde;
    let k = c.ncols();
    let mut rc = c.clone();
    scale_rows(&mut rc, rho);
    let mut g = mul_adjoint_left(&c.as_view(), &rc.as_view())
        + mul_adjoint_left(&q.as_view(), &q.as_view()) * C64::new(noise, 0.0);
    g = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    // equilibrate before factoring: diagonal entries span many decades
    let d: Vec<f64> = (0..k).map(|i| 1.0 / g[(i, i)].re.sqrt()).collect();
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] *= d[i] * d[j];
        }
    }
    let chol = Hpd::new(g, "estimate covariance")?;
    let mut rhs: CMatrix = rc.adjoint();
    scale_rows(&mut rhs, &d);
    let mut beta = chol.solve(&rhs);
    scale_rows(&mut beta, &d);

    let r_vec = beta.adjoint() * &weights.p;
    let users = c.nrows();
    let mut v = Vec::with_capacity(users);
    for u in 0..users {
        let explained: C64 = (0..k).map(|j| c[(u, j)] * beta[(j, u)]).sum();
        v.push((rho[u] - rho[u] * explained.re).max(0.0));
    }
    Ok(Posterior {
        r: r_vec.iter().copied().collect(),
        v,
    })
}

/// Signal, intra-set, estimation-error, inter-set and noise terms of the
/// target user's SINR for the block detected by `state`.
pub fn sinr_decomposition(
    state: &DetectorState,
    drop: &UserDrop,
    config: &FrameConfig,
    conditioning: Conditioning,
) -> Result<BlockSinrRecord> {
    let noise_var = config.noise_to_power();
    let tw = state.combiner.target_weights(state.target);
    let w2 = tw.w_norm_sqr;
    let p = &tw.p;
    let set = state.estimated_users();
    let mut in_set = vec![false; drop.num_users()];
    for &u in &set {
        in_set[u] = true;
    }

    let signal = p[state.target].norm_sqr();
    let intra: f64 = (0..set.len())
        .filter(|&k| k != state.target)
        .map(|k| p[k].norm_sqr())
        .sum();
    let (estimation_error, inter) = match conditioning {
        Conditioning::Independent => {
            let deltas: f64 = state.delta_in.iter().chain(&state.delta_co).sum();
            let outside: f64 = (0..drop.num_users())
                .filter(|&u| !in_set[u])
                .map(|u| drop.rho_target(u))
                .sum();
            (deltas * w2, outside * w2)
        }
        Conditioning::Exact => {
            let rho: Vec<f64> = (0..drop.num_users()).map(|u| drop.rho_target(u)).collect();
            let post = posterior(state, &rho, noise_var, &tw)?;
            let est: f64 = set
                .iter()
                .enumerate()
                .map(|(k, &u)| (p[k] - post.r[u]).norm_sqr() + post.v[u] * w2)
                .sum();
            let inter: f64 = (0..drop.num_users())
                .filter(|&u| !in_set[u])
                .map(|u| post.r[u].norm_sqr() + post.v[u] * w2)
                .sum();
            (est, inter)
        }
    };
    Ok(BlockSinrRecord::from_terms(
        state.block,
        state.mode,
        signal,
        intra,
        estimation_error,
        inter,
        noise_var * w2,
    ))
}
