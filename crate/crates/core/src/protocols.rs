//! SNR and throughput of the two harvest-then-transmit protocols.
//!
//! Both protocols split a unit-length block into a downlink phase `tau1`, in
//! which the AP and relay charge the source, and an uplink phase `tau2`.
//!
//! * E-C (energy cooperation): the relay only helps charge the source; the
//!   source then transmits alone for `tau2`.
//! * D-C (dual cooperation): the relay charges the source, and the uplink is
//!   halved. The source transmits for `tau2 / 2`, the relay amplifies and
//!   forwards for `tau2 / 2`, and the AP combines both copies with MRC.
//!
//! The source spends all harvested energy in its uplink slot; nothing carries
//! over between blocks.

use std::fmt;

use crate::channel::{ChannelRealization, NetworkConfig};
use crate::error::{Error, Result};

/// Tolerance used by the feasibility checks: absolute on time fractions,
/// relative on powers.
pub const FEAS_TOL: f64 = 1e-9;

/// A constraint of the allocation problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    NonNegative,
    TimeBudget,
    ApPeakPower,
    RelayPeakPower,
    ApAveragePower,
    RelayAveragePower,
}

impl Constraint {
    pub fn tag(&self) -> &'static str {
        match self {
            Constraint::NonNegative => "non-negative",
            Constraint::TimeBudget => "time-budget",
            Constraint::ApPeakPower => "ap-peak-power",
            Constraint::RelayPeakPower => "relay-peak-power",
            Constraint::ApAveragePower => "ap-average-power",
            Constraint::RelayAveragePower => "relay-average-power",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// E-C decision variables.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EcAllocation {
    /// AP downlink power (W).
    pub p_a: f64,
    /// Relay downlink power (W).
    pub p_r: f64,
    pub tau1: f64,
    pub tau2: f64,
}

/// D-C decision variables.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DcAllocation {
    /// AP downlink power (W).
    pub p_a: f64,
    /// Relay downlink power (W).
    pub p_r_d: f64,
    /// Relay forwarding power in the second uplink slot (W).
    pub p_r_u: f64,
    pub tau1: f64,
    pub tau2: f64,
}

fn le_rel(value: f64, bound: f64) -> bool {
    value <= bound * (1.0 + FEAS_TOL)
}

fn check_time(tau1: f64, tau2: f64) -> Result<(), Constraint> {
    if !(tau1 >= -FEAS_TOL && tau2 >= -FEAS_TOL) {
        return Err(Constraint::NonNegative);
    }
    if tau1 + tau2 > 1.0 + FEAS_TOL {
        return Err(Constraint::TimeBudget);
    }
    Ok(())
}

/// Checks peak, average, time and sign constraints of an E-C allocation.
pub fn ec_feasible(config: &NetworkConfig, alloc: &EcAllocation) -> Result<(), Constraint> {
    if !(alloc.p_a >= 0.0 && alloc.p_r >= 0.0) {
        return Err(Constraint::NonNegative);
    }
    check_time(alloc.tau1, alloc.tau2)?;
    if !le_rel(alloc.p_a, config.p_a_max) {
        return Err(Constraint::ApPeakPower);
    }
    if !le_rel(alloc.p_r, config.p_r_max) {
        return Err(Constraint::RelayPeakPower);
    }
    if !le_rel(alloc.tau1 * alloc.p_a, config.p_a_avg()) {
        return Err(Constraint::ApAveragePower);
    }
    if !le_rel(alloc.tau1 * alloc.p_r, config.p_r_avg()) {
        return Err(Constraint::RelayAveragePower);
    }
    Ok(())
}

/// Checks the D-C constraints. The relay's average budget covers both its
/// downlink transmission and its `tau2 / 2` forwarding slot.
pub fn dc_feasible(config: &NetworkConfig, alloc: &DcAllocation) -> Result<(), Constraint> {
    if !(alloc.p_a >= 0.0 && alloc.p_r_d >= 0.0 && alloc.p_r_u >= 0.0) {
        return Err(Constraint::NonNegative);
    }
    check_time(alloc.tau1, alloc.tau2)?;
    if !le_rel(alloc.p_a, config.p_a_max) {
        return Err(Constraint::ApPeakPower);
    }
    if !le_rel(alloc.p_r_d, config.p_r_max) || !le_rel(alloc.p_r_u, config.p_r_max) {
        return Err(Constraint::RelayPeakPower);
    }
    if !le_rel(alloc.tau1 * alloc.p_a, config.p_a_avg()) {
        return Err(Constraint::ApAveragePower);
    }
    let relay_energy = alloc.tau1 * alloc.p_r_d + 0.5 * alloc.tau2 * alloc.p_r_u;
    if !le_rel(relay_energy, config.p_r_avg()) {
        return Err(Constraint::RelayAveragePower);
    }
    Ok(())
}

/// Energy the source harvests over a unit block; noise is not harvested.
pub fn harvested_energy(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    p_a: f64,
    p_r_dl: f64,
    tau1: f64,
) -> f64 {
    config.eta * tau1 * (p_a * ch.h_as + p_r_dl * ch.h_rs)
}

/// Uplink SNR of the E-C protocol at the AP.
pub fn ec_snr(config: &NetworkConfig, ch: &ChannelRealization, alloc: &EcAllocation) -> f64 {
    if alloc.tau1 <= 0.0 || alloc.tau2 <= 0.0 {
        return 0.0;
    }
    let energy = harvested_energy(config, ch, alloc.p_a, alloc.p_r, alloc.tau1);
    energy * ch.h_sa / (alloc.tau2 * config.noise())
}

/// E-C throughput in bps/Hz without checking feasibility.
pub fn ec_throughput_unchecked(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    alloc: &EcAllocation,
) -> f64 {
    let snr = ec_snr(config, ch, alloc);
    if snr <= 0.0 {
        return 0.0;
    }
    alloc.tau2 * snr.ln_1p() / std::f64::consts::LN_2
}

/// E-C throughput `tau2 * log2(1 + snr)` in bps/Hz.
pub fn ec_throughput(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    alloc: &EcAllocation,
) -> Result<f64> {
    ec_feasible(config, alloc).map_err(Error::Infeasible)?;
    Ok(ec_throughput_unchecked(config, ch, alloc))
}

/// The four SNRs of one D-C block.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DcSnr {
    /// Direct link, source to AP.
    pub sa: f64,
    /// Source to relay.
    pub sr: f64,
    /// Relay to AP.
    pub ra: f64,
    /// End-to-end SNR of the amplify-and-forward path.
    pub sra: f64,
}

impl DcSnr {
    /// MRC output SNR.
    pub fn combined(&self) -> f64 {
        self.sa + self.sra
    }
}

/// End-to-end SNR of a two-hop amplify-and-forward link.
pub fn relay_path_snr(snr_sr: f64, snr_ra: f64) -> f64 {
    let den = snr_sr + snr_ra + 1.0;
    if snr_sr <= 0.0 || snr_ra <= 0.0 {
        return 0.0;
    }
    snr_sr * snr_ra / den
}

/// SNR components of the D-C protocol. All zero when `tau2 = 0`.
pub fn dc_snr_components(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    alloc: &DcAllocation,
) -> DcSnr {
    if alloc.tau2 <= 0.0 {
        return DcSnr::default();
    }
    let n0 = config.noise();
    // The source burns E_S over tau2 / 2, i.e. at power 2 E_S / tau2.
    let source_power = if alloc.tau1 > 0.0 {
        2.0 * harvested_energy(config, ch, alloc.p_a, alloc.p_r_d, alloc.tau1) / alloc.tau2
    } else {
        0.0
    };
    let sa = source_power * ch.h_sa / n0;
    let sr = source_power * ch.h_sr / n0;
    let ra = alloc.p_r_u * ch.h_ra / n0;
    DcSnr {
        sa,
        sr,
        ra,
        sra: relay_path_snr(sr, ra),
    }
}

/// D-C throughput in bps/Hz without checking feasibility.
pub fn dc_throughput_unchecked(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    alloc: &DcAllocation,
) -> f64 {
    if alloc.tau1 <= 0.0 || alloc.tau2 <= 0.0 {
        return 0.0;
    }
    let snr = dc_snr_components(config, ch, alloc).combined();
    0.5 * alloc.tau2 * snr.ln_1p() / std::f64::consts::LN_2
}

/// D-C throughput `(tau2 / 2) * log2(1 + snr_sa + snr_sra)` in bps/Hz.
pub fn dc_throughput(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    alloc: &DcAllocation,
) -> Result<f64> {
    dc_feasible(config, alloc).map_err(Error::Infeasible)?;
    Ok(dc_throughput_unchecked(config, ch, alloc))
}
