//! Optimal allocation for the D-C protocol.
//!
//! The uplink always takes the rest of the block (`tau2 = 1 - tau1`), and
//! with energies `E_A = tau1 P_A`, `E_D = tau1 P_R^D`, `E_U = tau2 P_R^U / 2`
//! the throughput grows in each energy. For a fixed `tau1` the inner problem
//! therefore splits three ways:
//!
//! 1. `tau1 <= 2 mu - 1`: the relay's two peak limits fit inside its average
//!    budget, so every energy sits at its peak bound.
//! 2. `2 mu - 1 < tau1 <= mu`: the relay budget binds, `E_D + E_U = P_R^avg`,
//!    and only the ratio `t = E_U / E_D` is free. The derivative of the SNR
//!    in `t` has the sign of a quadratic, so the best `t` is one of the
//!    interval ends or one of at most two stationary points.
//! 3. `tau1 > mu`: both average budgets bind and extra downlink time only
//!    shortens the uplink. Never optimal; kept for checking that claim.
//!
//! The outer search over `tau1 in [0, mu]` is a uniform grid followed by
//! golden-section refinement around the best grid point.

use crate::channel::{ChannelRealization, NetworkConfig};
use crate::error::{Error, Result};
use crate::protocols::{dc_throughput_unchecked, DcAllocation};
use crate::search::golden_section_max;

/// Points of the uniform outer grid on `[0, mu]`.
pub const OUTER_GRID_POINTS: usize = 1001;
/// Final bracket width of the golden-section refinement.
pub const OUTER_REFINE_TOL: f64 = 1e-6;
/// Slack on the case boundaries of the inner solvers.
const CASE_TOL: f64 = 1e-12;

/// Which inner case produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerCase {
    /// Relay peak limits bind (`tau1 <= 2 mu - 1`).
    PeakLimited,
    /// Relay average budget binds (`2 mu - 1 < tau1 <= mu`).
    AverageLimited,
    /// Both average budgets bind (`tau1 > mu`); never optimal.
    Saturated,
}

impl InnerCase {
    pub fn id(&self) -> u8 {
        match self {
            InnerCase::PeakLimited => 1,
            InnerCase::AverageLimited => 2,
            InnerCase::Saturated => 3,
        }
    }
}

/// Best block-normalized energies for a fixed `tau1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcInnerSolution {
    pub tau1: f64,
    pub e_a: f64,
    pub e_r_d: f64,
    pub e_r_u: f64,
    /// Chosen `E_U / E_D` ratio; `None` when it is not a free variable.
    /// `Some(INFINITY)` means the whole relay budget goes to the uplink.
    pub t_star: Option<f64>,
    pub case: InnerCase,
    /// Throughput in bps/Hz.
    pub objective: f64,
}

impl DcInnerSolution {
    fn zero(tau1: f64, case: InnerCase) -> Self {
        DcInnerSolution {
            tau1,
            e_a: 0.0,
            e_r_d: 0.0,
            e_r_u: 0.0,
            t_star: None,
            case,
            objective: 0.0,
        }
    }

    /// Powers realizing these energies with `tau2 = 1 - tau1`.
    pub fn allocation(&self) -> DcAllocation {
        let tau2 = 1.0 - self.tau1;
        let per_dl = |e: f64| if self.tau1 > 0.0 { e / self.tau1 } else { 0.0 };
        DcAllocation {
            p_a: per_dl(self.e_a),
            p_r_d: per_dl(self.e_r_d),
            p_r_u: if tau2 > 0.0 { 2.0 * self.e_r_u / tau2 } else { 0.0 },
            tau1: self.tau1,
            tau2,
        }
    }
}

/// SNR of the relay-budget-bound case as a function of `t = E_U / E_D`:
///
/// ```text
/// g(t) = a + b/(t+1) + (c + d/(t+1)) (e t/(t+1)) / (c + d/(t+1) + e t/(t+1) + 1)
/// ```
///
/// `dg/dt` is a positive multiple of `A t^2 + B t + C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticCoeffs {
    /// Direct link, AP-harvested part.
    pub a: f64,
    /// Direct link, relay-harvested part.
    pub b: f64,
    /// Source-relay hop, AP-harvested part.
    pub c: f64,
    /// Source-relay hop, relay-harvested part.
    pub d: f64,
    /// Relay-AP hop.
    pub e: f64,
    pub quad_a: f64,
    pub quad_b: f64,
    pub quad_c: f64,
    /// `quad_b^2 - 4 quad_a quad_c`.
    pub delta: f64,
}

impl QuadraticCoeffs {
    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64) -> Self {
        let quad_a = c * e - 2.0 * b * c - 2.0 * b * e - b - d * e - b * c * c - b * e * e
            + c * c * e
            - d * e * e
            - 2.0 * b * c * e;
        let quad_b = 2.0 * c * e - 4.0 * b * c - 2.0 * b * d - 2.0 * b * e - 2.0 * b
            - 2.0 * b * c * c
            + 2.0 * c * c * e
            - 2.0 * b * c * d
            - 2.0 * b * c * e
            - 2.0 * b * d * e
            + 2.0 * c * d * e;
        let quad_c = c * e - 2.0 * b * c - 2.0 * b * d - b + d * e - b * c * c - b * d * d
            + c * c * e
            + d * d * e
            - 2.0 * b * c * d
            + 2.0 * c * d * e;
        QuadraticCoeffs {
            a,
            b,
            c,
            d,
            e,
            quad_a,
            quad_b,
            quad_c,
            delta: quad_b * quad_b - 4.0 * quad_a * quad_c,
        }
    }

    /// Coefficients for downlink fraction `tau1` with AP energy `e_a` and the
    /// relay budget split along `t`.
    fn for_block(config: &NetworkConfig, ch: &ChannelRealization, tau1: f64, e_a: f64) -> Self {
        let scale = 2.0 / ((1.0 - tau1) * config.noise());
        let relay = config.p_r_avg();
        let eta = config.eta;
        QuadraticCoeffs::new(
            scale * eta * e_a * ch.h_as * ch.h_sa,
            scale * eta * relay * ch.h_rs * ch.h_sa,
            scale * eta * e_a * ch.h_as * ch.h_sr,
            scale * eta * relay * ch.h_rs * ch.h_sr,
            scale * relay * ch.h_ra,
        )
    }

    /// `g(t)`; `t = INFINITY` gives the limit `a + c e / (c + e + 1)`.
    pub fn gamma(&self, t: f64) -> f64 {
        let (s, y) = if t.is_infinite() {
            (0.0, 1.0)
        } else {
            (1.0 / (t + 1.0), t / (t + 1.0))
        };
        let x = self.c + self.d * s;
        let z = self.e * y;
        let relayed = if x > 0.0 && z > 0.0 { x * z / (x + z + 1.0) } else { 0.0 };
        self.a + self.b * s + relayed
    }

    /// `A t^2 + B t + C`.
    pub fn derivative_sign_poly(&self, t: f64) -> f64 {
        (self.quad_a * t + self.quad_b) * t + self.quad_c
    }

    /// Real roots of `A t^2 + B t + C`, falling back to the linear root when
    /// `A = 0`.
    pub fn stationary_points(&self) -> Vec<f64> {
        let (qa, qb, qc) = (self.quad_a, self.quad_b, self.quad_c);
        if qa == 0.0 {
            return if qb != 0.0 { vec![-qc / qb] } else { Vec::new() };
        }
        if self.delta < 0.0 {
            return Vec::new();
        }
        let sq = self.delta.sqrt();
        // q = -(B + sign(B) sqrt(delta)) / 2 avoids cancellation; the roots
        // are q / A and C / q, the same pair as (-B +- sqrt(delta)) / (2A).
        let q = -0.5 * (qb + qb.signum() * sq);
        if q == 0.0 {
            return vec![0.0];
        }
        vec![q / qa, qc / q]
    }

    /// Maximizes `g` over `[t_lo, t_hi]` (`t_hi` may be infinite) by
    /// comparing the ends with the interior stationary points. Ties go to
    /// the smallest `t`.
    pub fn maximize(&self, t_lo: f64, t_hi: f64) -> (f64, f64) {
        let mut best = (t_lo, self.gamma(t_lo));
        let mut consider = |t: f64| {
            let g = self.gamma(t);
            if g > best.1 || (g == best.1 && t < best.0) {
                best = (t, g);
            }
        };
        for t in self.stationary_points() {
            if t.is_finite() && t >= t_lo && t <= t_hi {
                consider(t);
            }
        }
        consider(t_hi);
        best
    }
}

/// Range of `t = E_U / E_D` allowed by the relay's peak limits when its
/// average budget is spent exactly.
pub fn relay_split_bounds(mu: f64, tau1: f64) -> (f64, f64) {
    let t_lo = ((mu - tau1) / tau1).max(0.0);
    let t_hi = if tau1 > 1.0 - 2.0 * mu {
        (1.0 - tau1) / (2.0 * mu - 1.0 + tau1)
    } else {
        f64::INFINITY
    };
    (t_lo, t_hi)
}

fn finish(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    mut sol: DcInnerSolution,
) -> DcInnerSolution {
    sol.objective = dc_throughput_unchecked(config, ch, &sol.allocation());
    sol
}

/// Inner solution when the relay's peak limits bind: all energies at their
/// peak bounds. Requires `mu >= 0.5` and `0 <= tau1 <= 2 mu - 1`.
pub fn dc_inner_case1(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    tau1: f64,
) -> Result<DcInnerSolution> {
    if !(tau1 >= 0.0 && tau1 <= 2.0 * config.mu - 1.0 + CASE_TOL) {
        return Err(Error::CaseDispatch { case: 1, tau1 });
    }
    if tau1 == 0.0 {
        return Ok(DcInnerSolution::zero(tau1, InnerCase::PeakLimited));
    }
    Ok(finish(
        config,
        ch,
        DcInnerSolution {
            tau1,
            e_a: tau1 * config.p_a_max,
            e_r_d: tau1 * config.p_r_max,
            e_r_u: 0.5 * (1.0 - tau1) * config.p_r_max,
            t_star: None,
            case: InnerCase::PeakLimited,
            objective: 0.0,
        },
    ))
}

fn split_relay_budget(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    tau1: f64,
    e_a: f64,
    case: InnerCase,
) -> DcInnerSolution {
    if tau1 >= 1.0 {
        return DcInnerSolution::zero(tau1, case);
    }
    let coeffs = QuadraticCoeffs::for_block(config, ch, tau1, e_a);
    let (t_lo, t_hi) = relay_split_bounds(config.mu, tau1);
    let (t_star, _) = coeffs.maximize(t_lo, t_hi);
    let relay = config.p_r_avg();
    let (e_r_d, e_r_u) = if t_star.is_infinite() {
        (0.0, relay)
    } else {
        (relay / (t_star + 1.0), t_star * relay / (t_star + 1.0))
    };
    finish(
        config,
        ch,
        DcInnerSolution {
            tau1,
            e_a,
            e_r_d,
            e_r_u,
            t_star: Some(t_star),
            case,
            objective: 0.0,
        },
    )
}

/// Inner solution when the relay's average budget binds. Requires
/// `max(0, 2 mu - 1) <= tau1 <= mu`; `tau1 = 0` yields the zero solution.
pub fn dc_inner_case2(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    tau1: f64,
) -> Result<DcInnerSolution> {
    let lower = (2.0 * config.mu - 1.0).max(0.0);
    if !(tau1 >= lower - CASE_TOL && tau1 <= config.mu + CASE_TOL) {
        return Err(Error::CaseDispatch { case: 2, tau1 });
    }
    if tau1 <= 0.0 {
        return Ok(DcInnerSolution::zero(0.0, InnerCase::AverageLimited));
    }
    Ok(split_relay_budget(
        config,
        ch,
        tau1,
        tau1 * config.p_a_max,
        InnerCase::AverageLimited,
    ))
}

/// Inner solution for `mu < tau1 <= 1`, where both average budgets bind.
pub fn dc_inner_saturated(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    tau1: f64,
) -> Result<DcInnerSolution> {
    if !(tau1 > config.mu && tau1 <= 1.0) {
        return Err(Error::CaseDispatch { case: 3, tau1 });
    }
    Ok(split_relay_budget(
        config,
        ch,
        tau1,
        config.p_a_avg(),
        InnerCase::Saturated,
    ))
}

/// Best energies for any `tau1 in [0, 1]`.
pub fn dc_inner(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    tau1: f64,
) -> Result<DcInnerSolution> {
    if !(0.0..=1.0).contains(&tau1) {
        return Err(Error::domain("tau1", tau1));
    }
    if config.mu >= 0.5 && tau1 <= 2.0 * config.mu - 1.0 {
        dc_inner_case1(config, ch, tau1)
    } else if tau1 <= config.mu {
        dc_inner_case2(config, ch, tau1)
    } else {
        dc_inner_saturated(config, ch, tau1)
    }
}

/// Result of [`optimize_dc`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcOptimum {
    pub alloc: DcAllocation,
    pub throughput: f64,
    pub inner: DcInnerSolution,
    /// Best point of the uniform outer grid, before refinement.
    pub grid_tau1: f64,
}

/// Optimal D-C allocation for one channel realization.
pub fn optimize_dc(config: &NetworkConfig, ch: &ChannelRealization) -> Result<DcOptimum> {
    config.validate()?;
    let mu = config.mu;
    let objective = |tau1: f64| {
        dc_inner(config, ch, tau1.clamp(0.0, mu))
            .map(|s| s.objective)
            .unwrap_or(0.0)
    };

    let steps = OUTER_GRID_POINTS - 1;
    let grid = |k: usize| mu * k as f64 / steps as f64;
    let mut best_k = 0;
    let mut best_v = objective(0.0);
    for k in 1..=steps {
        let v = objective(grid(k));
        if v > best_v {
            best_k = k;
            best_v = v;
        }
    }
    let grid_tau1 = grid(best_k);

    let mut tau1 = grid_tau1;
    if best_v > 0.0 {
        let lo = grid(best_k.saturating_sub(1));
        let hi = grid((best_k + 1).min(steps));
        let (t, v) = golden_section_max(objective, lo, hi, OUTER_REFINE_TOL);
        if v > best_v || (v == best_v && t < tau1) {
            tau1 = t;
        }
    }

    let inner = dc_inner(config, ch, tau1)?;
    if inner.objective <= 0.0 {
        // Nothing gets through for any split; report the canonical zero.
        let alloc = DcAllocation {
            p_a: config.p_a_max,
            p_r_d: config.p_r_max,
            p_r_u: 0.0,
            tau1: 0.0,
            tau2: 1.0,
        };
        return Ok(DcOptimum {
            alloc,
            throughput: 0.0,
            inner: dc_inner(config, ch, 0.0)?,
            grid_tau1: 0.0,
        });
    }
    Ok(DcOptimum {
        alloc: inner.allocation(),
        throughput: inner.objective,
        inner,
        grid_tau1,
    })
}
