//! Optimal time and power allocation for the E-C protocol.
//!
//! With `E_X = tau1 * P_X` the problem becomes concave in the energies, and
//! both downlink transmitters run at peak power. Without the average-power
//! limits the best split is
//!
//! ```text
//! tau1 = (z - 1) / (A + z - 1),   z ln z - z + 1 = A,
//! A    = eta * (P_A_max h_AS + P_R_max h_RS) * h_SA / N0
//! ```
//!
//! and the average-power limits cap `tau1` at `mu`, since past that point
//! the energy stops growing while the uplink keeps shrinking.

use crate::channel::{ChannelRealization, NetworkConfig};
use crate::error::{Error, Result};
use crate::protocols::{ec_throughput, EcAllocation};
use crate::search::bisect_increasing;

/// Result of [`optimize_ec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcOptimum {
    pub alloc: EcAllocation,
    pub throughput: f64,
    /// Root of `z ln z - z + 1 = A`.
    pub z_star: f64,
    /// Downlink fraction before the `mu` cap is applied.
    pub tau1_uncapped: f64,
    /// Whether `tau1` was clipped to `mu`.
    pub capped: bool,
}

/// `(1 + w) ln(1 + w) - w`, i.e. `z ln z - z + 1` at `z = 1 + w`.
///
/// Near `w = 0` the direct form cancels to `w^2 / 2`; the alternating series
/// `sum_{k>=2} (-w)^k / (k (k - 1))` is used there instead.
fn excess(w: f64) -> f64 {
    if w < 0.05 {
        let mut term = -w;
        let mut sum = 0.0;
        for k in 2..24 {
            term *= -w;
            let kf = k as f64;
            sum += term / (kf * (kf - 1.0));
        }
        sum
    } else {
        (1.0 + w) * w.ln_1p() - w
    }
}

/// Solves `z ln z - z + 1 = a` for `z - 1 >= 0`.
fn solve_z_minus_one(a: f64) -> Result<f64> {
    if a.is_nan() || a < 0.0 || a.is_infinite() {
        return Err(Error::domain("z-equation constant", a));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while excess(hi) < a {
        hi *= 2.0;
    }
    Ok(bisect_increasing(excess, a, 0.0, hi, 4.0 * f64::EPSILON, 200))
}

/// Unique `z >= 1` with `z ln z - z + 1 = a_const`.
pub fn solve_z(a_const: f64) -> Result<f64> {
    solve_z_minus_one(a_const).map(|w| 1.0 + w)
}

/// The constant `A` of the E-C time-split equation, evaluated at peak powers.
pub fn ec_snr_constant(config: &NetworkConfig, ch: &ChannelRealization) -> f64 {
    config.eta * (config.p_a_max * ch.h_as + config.p_r_max * ch.h_rs) * ch.h_sa / config.noise()
}

/// Unconstrained optimal downlink fraction `(z - 1) / (A + z - 1)`; zero for
/// `A = 0`, where nothing can be harvested or delivered.
pub fn optimal_tau1_uncapped(a_const: f64) -> Result<f64> {
    let w = solve_z_minus_one(a_const)?;
    if w == 0.0 {
        return Ok(0.0);
    }
    Ok(w / (a_const + w))
}

/// Globally optimal E-C allocation for one channel realization.
///
/// The AP and relay always transmit at their peak powers; only the time
/// split depends on the channel.
pub fn optimize_ec(config: &NetworkConfig, ch: &ChannelRealization) -> Result<EcOptimum> {
    config.validate()?;
    let a_const = ec_snr_constant(config, ch);
    let w = solve_z_minus_one(a_const)?;
    let tau1_uncapped = if w == 0.0 { 0.0 } else { w / (a_const + w) };
    let capped = tau1_uncapped > config.mu;
    let tau1 = tau1_uncapped.min(config.mu);
    let alloc = EcAllocation {
        p_a: config.p_a_max,
        p_r: config.p_r_max,
        tau1,
        tau2: 1.0 - tau1,
    };
    Ok(EcOptimum {
        alloc,
        throughput: ec_throughput(config, ch, &alloc)?,
        z_star: 1.0 + w,
        tau1_uncapped,
        capped,
    })
}
