//! Three-node linear topology under Rayleigh block fading.
//!
//! The AP, relay and source sit on a line with the relay between the other
//! two, so `d_AR = d_AS - d_SR`. Every link has an exponentially distributed
//! power gain (Rayleigh amplitude) whose mean follows the path-loss law
//! `1e-3 * d^-alpha`, i.e. 30 dB of attenuation at the 1 m reference distance.
//!
//! Draws are counter-based: the fading of block `i` under seed `s` comes from
//! its own ChaCha stream, so it does not depend on which other blocks were
//! sampled before it or on which thread sampled it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Attenuation at the 1 m reference distance (30 dB).
pub const REFERENCE_GAIN: f64 = 1e-3;

/// Geometry, noise, harvesting efficiency and power budgets of the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    /// AP to source distance in meters.
    pub d_as: f64,
    /// Source to relay distance in meters, strictly inside `(0, d_as)`.
    pub d_sr: f64,
    /// Path-loss exponent, in `[2, 5]`.
    pub alpha: f64,
    /// Energy harvesting efficiency, in `(0, 1)`.
    pub eta: f64,
    /// Receiver noise power in dBm.
    pub n0_dbm: f64,
    /// AP peak transmit power in watts.
    pub p_a_max: f64,
    /// Relay peak transmit power in watts.
    pub p_r_max: f64,
    /// Average-to-peak power ratio shared by the AP and the relay.
    pub mu: f64,
    /// When set, `h_AS = h_SA` and `h_RS = h_SR` within a block.
    pub reciprocal_channels: bool,
}

impl Default for NetworkConfig {
    /// The reference scenario: 10 m AP-source spacing with the relay halfway,
    /// free-space path loss, -80 dBm noise, 50% harvesting efficiency and
    /// 1 W average power at `mu = 0.5`.
    fn default() -> Self {
        NetworkConfig {
            d_as: 10.0,
            d_sr: 5.0,
            alpha: 2.0,
            eta: 0.5,
            n0_dbm: -80.0,
            p_a_max: 2.0,
            p_r_max: 2.0,
            mu: 0.5,
            reciprocal_channels: true,
        }
    }
}

impl NetworkConfig {
    /// Sets equal average power `p_avg` for AP and relay at ratio `mu`,
    /// deriving the peaks as `p_avg / mu`.
    pub fn with_average_power(mut self, p_avg: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(Error::domain("mu", mu));
        }
        if !(p_avg > 0.0 && p_avg.is_finite()) {
            return Err(Error::domain("average power", p_avg));
        }
        self.mu = mu;
        self.p_a_max = p_avg / mu;
        self.p_r_max = p_avg / mu;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.d_as > 0.0 && self.d_as.is_finite()) {
            return bad(format!("d_as must be positive, got {}", self.d_as));
        }
        if !(self.d_sr > 0.0 && self.d_sr < self.d_as) {
            return bad(format!(
                "d_sr must lie in (0, d_as = {}), got {}",
                self.d_as, self.d_sr
            ));
        }
        if !(2.0..=5.0).contains(&self.alpha) {
            return bad(format!("alpha must lie in [2, 5], got {}", self.alpha));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return bad(format!("eta must lie in (0, 1), got {}", self.eta));
        }
        if !self.n0_dbm.is_finite() {
            return bad(format!("n0_dbm must be finite, got {}", self.n0_dbm));
        }
        for (name, p) in [("p_a_max", self.p_a_max), ("p_r_max", self.p_r_max)] {
            if !(p > 0.0 && p.is_finite()) {
                return bad(format!("{name} must be positive, got {p}"));
            }
        }
        // mu = 0 is kept legal: it pins tau1 to 0 and every optimum to zero.
        if !(0.0..=1.0).contains(&self.mu) {
            return bad(format!("mu must lie in [0, 1], got {}", self.mu));
        }
        Ok(())
    }

    /// AP to relay distance on the line.
    pub fn d_ar(&self) -> f64 {
        self.d_as - self.d_sr
    }

    pub fn p_a_avg(&self) -> f64 {
        self.mu * self.p_a_max
    }

    pub fn p_r_avg(&self) -> f64 {
        self.mu * self.p_r_max
    }

    /// Noise power in watts.
    pub fn noise(&self) -> f64 {
        noise_watts(self.n0_dbm)
    }
}

/// Mean channel power gain at distance `d` meters: `1e-3 * d^-alpha`.
pub fn mean_gain(d: f64, alpha: f64) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::domain("distance", d));
    }
    if !(2.0..=5.0).contains(&alpha) {
        return Err(Error::domain("path-loss exponent", alpha));
    }
    Ok(REFERENCE_GAIN * d.powf(-alpha))
}

/// Converts dBm to watts.
pub fn noise_watts(n0_dbm: f64) -> f64 {
    10f64.powf((n0_dbm - 30.0) / 10.0)
}

/// Channel power gains of one block. `h_xy` is the gain from `x` to `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    pub h_as: f64,
    pub h_rs: f64,
    pub h_sa: f64,
    pub h_sr: f64,
    pub h_ra: f64,
}

impl ChannelRealization {
    pub fn new(h_as: f64, h_rs: f64, h_sa: f64, h_sr: f64, h_ra: f64) -> Result<Self> {
        let ch = ChannelRealization {
            h_as,
            h_rs,
            h_sa,
            h_sr,
            h_ra,
        };
        for g in ch.gains() {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::domain("channel gain", g));
            }
        }
        Ok(ch)
    }

    /// Same gain on every link.
    pub fn uniform(h: f64) -> Result<Self> {
        Self::new(h, h, h, h, h)
    }

    /// Gains in the order `[h_as, h_rs, h_sa, h_sr, h_ra]`.
    pub fn gains(&self) -> [f64; 5] {
        [self.h_as, self.h_rs, self.h_sa, self.h_sr, self.h_ra]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ChannelRealization {
            h_as: self.h_as * factor,
            h_rs: self.h_rs * factor,
            h_sa: self.h_sa * factor,
            h_sr: self.h_sr * factor,
            h_ra: self.h_ra * factor,
        }
    }
}

/// Unit-mean small-scale fading of one block, before path loss.
///
/// Kept separate from [`ChannelRealization`] so sweeps over geometry can
/// reuse the same fading and only rescale by the per-link mean gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitFading {
    pub as_: f64,
    pub rs: f64,
    pub sa: f64,
    pub sr: f64,
    pub ra: f64,
}

impl UnitFading {
    /// Draws the fading of block `block_index` under `seed`.
    ///
    /// Reciprocal channels take three draws (A-S pair, S-R pair, R-A link);
    /// otherwise five independent draws.
    pub fn sample(seed: u64, block_index: u64, reciprocal: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block_index);
        let mut draw = || unit_exponential(rng.gen::<f64>());
        if reciprocal {
            let as_ = draw();
            let sr = draw();
            let ra = draw();
            UnitFading {
                as_,
                rs: sr,
                sa: as_,
                sr,
                ra,
            }
        } else {
            let as_ = draw();
            let sa = draw();
            let rs = draw();
            let sr = draw();
            let ra = draw();
            UnitFading { as_, rs, sa, sr, ra }
        }
    }

    /// Applies the path-loss means of `config`'s geometry.
    pub fn realize(&self, config: &NetworkConfig) -> Result<ChannelRealization> {
        let g_as = mean_gain(config.d_as, config.alpha)?;
        let g_sr = mean_gain(config.d_sr, config.alpha)?;
        let g_ar = mean_gain(config.d_ar(), config.alpha)?;
        Ok(ChannelRealization {
            h_as: self.as_ * g_as,
            h_rs: self.rs * g_sr,
            h_sa: self.sa * g_as,
            h_sr: self.sr * g_sr,
            h_ra: self.ra * g_ar,
        })
    }
}

/// Inverse CDF of the unit-mean exponential for `u` in `[0, 1)`.
fn unit_exponential(u: f64) -> f64 {
    -(-u).ln_1p()
}

/// Channel gains of block `block_index` for `config`, fully determined by
/// `(seed, block_index)`.
pub fn sample_realization(
    config: &NetworkConfig,
    seed: u64,
    block_index: u64,
) -> Result<ChannelRealization> {
    config.validate()?;
    UnitFading::sample(seed, block_index, config.reciprocal_channels).realize(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mean_gain_reference_points() {
        assert_relative_eq!(mean_gain(1.0, 2.0).unwrap(), 1e-3, max_relative = 1e-15);
        assert_relative_eq!(mean_gain(10.0, 2.0).unwrap(), 1e-5, max_relative = 1e-15);
        assert_relative_eq!(mean_gain(5.0, 2.0).unwrap(), 4e-5, max_relative = 1e-15);
    }

    #[test]
    fn mean_gain_rejects_bad_distance() {
        assert!(matches!(mean_gain(0.0, 2.0), Err(Error::Domain { .. })));
        assert!(matches!(mean_gain(-1.0, 2.0), Err(Error::Domain { .. })));
        assert!(mean_gain(1.0, 6.0).is_err());
    }

    #[test]
    fn noise_conversion() {
        assert_relative_eq!(noise_watts(-80.0), 1e-11, max_relative = 1e-12);
        assert_relative_eq!(noise_watts(0.0), 1e-3, max_relative = 1e-12);
        assert_relative_eq!(noise_watts(30.0), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn sample_mean_matches_path_loss() {
        let cfg = NetworkConfig::default();
        let n = 100_000u64;
        let mut sum = [0.0f64; 5];
        for i in 0..n {
            let ch = sample_realization(&cfg, 2024, i).unwrap();
            for (s, g) in sum.iter_mut().zip(ch.gains()) {
                assert!(g >= 0.0);
                *s += g;
            }
        }
        let means = [1e-5, 4e-5, 1e-5, 4e-5, 4e-5];
        for (s, m) in sum.iter().zip(means) {
            let rel = (s / n as f64 - m).abs() / m;
            assert!(rel < 0.02, "relative error {rel}");
        }
    }

    #[test]
    fn reciprocity_flag() {
        let cfg = NetworkConfig::default();
        let ch = sample_realization(&cfg, 1, 3).unwrap();
        assert_eq!(ch.h_rs.to_bits(), ch.h_sr.to_bits());
        assert_eq!(ch.h_as.to_bits(), ch.h_sa.to_bits());

        let cfg = NetworkConfig {
            reciprocal_channels: false,
            ..cfg
        };
        let ch = sample_realization(&cfg, 1, 3).unwrap();
        assert_ne!(ch.h_rs, ch.h_sr);
        assert_ne!(ch.h_as, ch.h_sa);
    }

    #[test]
    fn deterministic_per_block() {
        let cfg = NetworkConfig::default();
        let a = sample_realization(&cfg, 42, 7).unwrap();
        let _ = sample_realization(&cfg, 42, 8).unwrap();
        let b = sample_realization(&cfg, 42, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_realization(&cfg, 43, 7).unwrap());
    }

    #[test]
    fn config_validation() {
        let ok = NetworkConfig::default();
        assert!(ok.validate().is_ok());
        assert!(NetworkConfig { d_sr: 10.0, ..ok }.validate().is_err());
        assert!(NetworkConfig { d_sr: 0.0, ..ok }.validate().is_err());
        assert!(NetworkConfig { eta: 1.0, ..ok }.validate().is_err());
        assert!(NetworkConfig { mu: 1.5, ..ok }.validate().is_err());
        assert!(NetworkConfig { p_r_max: 0.0, ..ok }.validate().is_err());
        assert!(NetworkConfig { mu: 0.0, ..ok }.validate().is_ok());
        assert_relative_eq!(ok.d_ar(), 5.0);
        assert_relative_eq!(ok.p_a_avg(), 1.0);
    }
}
