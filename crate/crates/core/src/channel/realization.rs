use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{build_pilot_book, FrameConfig};
use crate::geometry::UserDrop;
use crate::linalg::{complex_normal, complex_normal_matrix, mul, CMatrix, C64};
use crate::{Error, Result};

/// Small-scale channels, symbols and noise of one frame as seen by the target BS.
///
/// `h` is `M × U` with column `u` drawn from `CN(0, rho_u I)` (gain toward the
/// target BS), `x` is `U × (L_p + L)` with unit-power pilots followed by
/// `CN(0, 1)` data, and `z` is `M × (L_p + L)` physical noise of variance
/// `sigma_z^2`. The received signal is `sqrt(P) H X + Z`.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    h: CMatrix,
    x: CMatrix,
    z: CMatrix,
    tx_power: f64,
}

/// Draws one frame. Channel columns are drawn first, then data symbols, then
/// noise, all column by column from one stream seeded by `seed`.
pub fn sample_channels(config: &FrameConfig, drop: &UserDrop, seed: u64) -> Result<ChannelRealization> {
    config.validate()?;
    let book = build_pilot_book(config, drop)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = config.antennas;
    let users = drop.num_users();
    let total = config.frame_len();

    let mut h = CMatrix::zeros(m, users);
    for u in 0..users {
        let rho = drop.rho_target(u);
        for r in 0..m {
            h[(r, u)] = complex_normal(&mut rng, rho);
        }
    }
    let mut x = CMatrix::zeros(users, total);
    for u in 0..users {
        for (n, s) in book.pilot(u).iter().enumerate() {
            x[(u, n)] = *s;
        }
    }
    for n in config.pilot_len..total {
        for u in 0..users {
            x[(u, n)] = complex_normal(&mut rng, 1.0);
        }
    }
    let z = complex_normal_matrix(&mut rng, m, total, config.noise_power);
    Ok(ChannelRealization {
        h,
        x,
        z,
        tx_power: config.tx_power,
    })
}

/// Physical received signal `Y^{m,n}` over blocks `m..=n`, block 0 being the pilot.
pub fn received_signal(
    realization: &ChannelRealization,
    config: &FrameConfig,
    m: usize,
    n: usize,
) -> Result<CMatrix> {
    let blocks = config.num_blocks();
    if m > n || n > blocks {
        return Err(Error::BlockRange {
            start: m,
            end: n,
            blocks,
        });
    }
    let start = if m == 0 { 0 } else { config.est_len(m - 1) };
    let cols = start..config.est_len(n);
    let mut y = realization.normalized_signal(cols.clone());
    y *= C64::new(realization.tx_power.sqrt(), 0.0);
    Ok(y)
}

impl ChannelRealization {
    /// Builds a realization from explicit matrices.
    pub fn from_parts(h: CMatrix, x: CMatrix, z: CMatrix, tx_power: f64) -> Result<Self> {
        if h.ncols() != x.nrows() || h.nrows() != z.nrows() || x.ncols() != z.ncols() {
            return Err(Error::Dimension(format!(
                "H {}x{}, X {}x{}, Z {}x{}",
                h.nrows(),
                h.ncols(),
                x.nrows(),
                x.ncols(),
                z.nrows(),
                z.ncols()
            )));
        }
        Ok(ChannelRealization { h, x, z, tx_power })
    }

    pub fn antennas(&self) -> usize {
        self.h.nrows()
    }

    pub fn num_users(&self) -> usize {
        self.h.ncols()
    }

    pub fn frame_len(&self) -> usize {
        self.x.ncols()
    }

    pub fn h(&self) -> &CMatrix {
        &self.h
    }

    pub fn x(&self) -> &CMatrix {
        &self.x
    }

    pub fn z(&self) -> &CMatrix {
        &self.z
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    /// Copy in which only the listed users transmit.
    pub fn with_users(&self, keep: &[usize]) -> Self {
        let mut h = CMatrix::zeros(self.h.nrows(), self.h.ncols());
        for &u in keep {
            h.set_column(u, &self.h.column(u));
        }
        ChannelRealization {
            h,
            x: self.x.clone(),
            z: self.z.clone(),
            tx_power: self.tx_power,
        }
    }

    /// Copy with the noise removed.
    pub fn noiseless(&self) -> Self {
        ChannelRealization {
            h: self.h.clone(),
            x: self.x.clone(),
            z: CMatrix::zeros(self.z.nrows(), self.z.ncols()),
            tx_power: self.tx_power,
        }
    }

    /// `Y / sqrt(P) = H X + Z / sqrt(P)` over the given columns.
    pub fn normalized_signal(&self, cols: Range<usize>) -> CMatrix {
        let n = cols.len();
        let mut y = mul(&self.h.as_view(), &self.x.columns(cols.start, n));
        y += self.z.columns(cols.start, n) * C64::new(1.0 / self.tx_power.sqrt(), 0.0);
        y
    }

    /// `X^{0,cols} Q` for a `cols × K` matrix `Q`.
    pub fn symbols_times(&self, cols: usize, q: &CMatrix) -> CMatrix {
        mul(&self.x.columns(0, cols), &q.as_view())
    }

    /// `Y^{0,cols} Q / sqrt(P)` given `effective = X^{0,cols} Q`, without
    /// forming `Y`.
    pub fn project(&self, cols: usize, q: &CMatrix, effective: &CMatrix) -> CMatrix {
        let mut out = mul(&self.h.as_view(), &effective.as_view());
        out += mul(&self.z.columns(0, cols), &q.as_view()) * C64::new(1.0 / self.tx_power.sqrt(), 0.0);
        out
    }

    /// `S Y / sqrt(P)` over the given columns, for a `K × M` matrix `S`.
    pub fn apply_rows(&self, s: &CMatrix, cols: Range<usize>) -> CMatrix {
        let n = cols.len();
        let sh = mul(&s.as_view(), &self.h.as_view());
        let mut out = mul(&sh.as_view(), &self.x.columns(cols.start, n));
        out += mul(&s.as_view(), &self.z.columns(cols.start, n)) * C64::new(1.0 / self.tx_power.sqrt(), 0.0);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_hex_layout, Point};
    use crate::linalg::relative_distance;

    fn setup() -> (FrameConfig, UserDrop) {
        let layout = build_hex_layout(500.0, 1).unwrap();
        let pos = [Point::new(100.0, 0.0), Point::new(-800.0, 300.0)];
        let drop = UserDrop::from_parts(&layout, &pos, &vec![vec![0.0; 7]; 2], 3.76).unwrap();
        let mut cfg = FrameConfig::default();
        cfg.antennas = 8;
        (cfg, drop)
    }

    #[test]
    fn deterministic_and_shaped() {
        let (cfg, drop) = setup();
        let a = sample_channels(&cfg, &drop, 4).unwrap();
        let b = sample_channels(&cfg, &drop, 4).unwrap();
        assert_eq!(a.h(), b.h());
        assert_eq!(a.z(), b.z());
        assert_eq!(a.x().shape(), (2, 531));
        assert_ne!(a.h(), sample_channels(&cfg, &drop, 5).unwrap().h());
    }

    #[test]
    fn block_range_checks() {
        let (cfg, drop) = setup();
        let r = sample_channels(&cfg, &drop, 1).unwrap();
        assert_eq!(received_signal(&r, &cfg, 0, 5).unwrap().ncols(), 531);
        assert_eq!(received_signal(&r, &cfg, 2, 3).unwrap().ncols(), 200);
        assert!(matches!(
            received_signal(&r, &cfg, 0, 6),
            Err(Error::BlockRange { .. })
        ));
        assert!(received_signal(&r, &cfg, 3, 2).is_err());
    }

    #[test]
    fn factored_products_match_dense() {
        let (cfg, drop) = setup();
        let r = sample_channels(&cfg, &drop, 2).unwrap();
        let q = complex_normal_matrix(&mut ChaCha8Rng::seed_from_u64(1), 131, 3, 1.0);
        let y = r.normalized_signal(0..131);
        let eff = r.symbols_times(131, &q);
        assert!(relative_distance(&r.project(131, &q, &eff), &(&y * &q)) < 1e-12);
        let s = complex_normal_matrix(&mut ChaCha8Rng::seed_from_u64(2), 3, 8, 1.0);
        let dense = &s * r.normalized_signal(131..231);
        assert!(relative_distance(&r.apply_rows(&s, 131..231), &dense) < 1e-12);
    }
}
