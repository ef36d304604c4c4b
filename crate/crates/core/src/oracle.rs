//! Exhaustive grid-search optimizers used as ground truth for the solvers.
//!
//! These make no use of the structural results the solvers rely on (peak
//! powers, `tau1 + tau2 = 1` for E-C, the D-C case split). Every grid point
//! goes through the same feasibility checks as any caller's allocation, and
//! ties are broken in favour of the lexicographically first grid point.

use crate::channel::{ChannelRealization, NetworkConfig};
use crate::error::{Error, Result};
use crate::protocols::{dc_feasible, ec_feasible, relay_path_snr, DcAllocation, EcAllocation};
use crate::solver_dc::QuadraticCoeffs;

/// Resolution of the oracle grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Points per time dimension, spanning `[0, 1]`.
    pub n_tau: usize,
    /// Points per power dimension, spanning `[0, P_max]`.
    pub n_power: usize,
    /// Upper cap for unbounded ratio scans.
    pub t_cap: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_tau: 101,
            n_power: 41,
            t_cap: 1e4,
        }
    }
}

impl GridSpec {
    pub fn new(n_tau: usize, n_power: usize) -> Result<Self> {
        let g = GridSpec {
            n_tau,
            n_power,
            ..GridSpec::default()
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tau < 2 {
            return Err(Error::domain("n_tau", self.n_tau as f64));
        }
        if self.n_power < 2 {
            return Err(Error::domain("n_power", self.n_power as f64));
        }
        if self.t_cap.is_nan() || self.t_cap <= 0.0 {
            return Err(Error::domain("t_cap", self.t_cap));
        }
        Ok(())
    }

    /// The grid with `2n - 1` points per dimension, which contains this one.
    pub fn refined(&self) -> Self {
        GridSpec {
            n_tau: 2 * self.n_tau - 1,
            n_power: 2 * self.n_power - 1,
            t_cap: self.t_cap,
        }
    }

    fn taus(&self) -> Vec<f64> {
        linspace(1.0, self.n_tau)
    }

    fn powers(&self, p_max: f64) -> Vec<f64> {
        linspace(p_max, self.n_power)
    }
}

fn linspace(hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect()
}

/// Best grid point found by an oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult<A> {
    pub alloc: A,
    pub throughput: f64,
    /// Feasible grid points evaluated.
    pub evaluated: u64,
}

/// Running argmax keyed by (value, lexicographic index).
struct Best<A> {
    value: f64,
    index: u64,
    alloc: A,
}

impl<A> Best<A> {
    fn offer(&mut self, value: f64, index: u64, alloc: impl FnOnce() -> A) {
        if value > self.value || (value == self.value && index < self.index) {
            self.value = value;
            self.index = index;
            self.alloc = alloc();
        }
    }
}

/// Number of leading grid values `x` for which `ok(x)` holds, for a
/// predicate that is monotone (true then false) along the grid.
fn feasible_prefix(grid: &[f64], ok: impl Fn(f64) -> bool) -> usize {
    grid.iter().take_while(|&&x| ok(x)).count()
}

/// Exhaustive E-C search over `(p_a, p_r, tau1, tau2)`.
pub fn oracle_ec(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    grid: &GridSpec,
) -> Result<OracleResult<EcAllocation>> {
    config.validate()?;
    grid.validate()?;
    let taus = grid.taus();
    let pa = grid.powers(config.p_a_max);
    let pr = grid.powers(config.p_r_max);
    let (np, nt) = (grid.n_power as u64, grid.n_tau as u64);
    let index = |i: usize, j: usize, k: usize, l: usize| {
        ((i as u64 * np + j as u64) * nt + k as u64) * nt + l as u64
    };
    // Received downlink power for every (p_a, p_r) pair.
    let rx: Vec<f64> = pa
        .iter()
        .flat_map(|&a| pr.iter().map(move |&r| a * ch.h_as + r * ch.h_rs))
        .collect();
    let n0 = config.noise();

    let mut best = Best {
        value: f64::NEG_INFINITY,
        index: u64::MAX,
        alloc: EcAllocation::default(),
    };
    let mut evaluated = 0u64;
    for (k, &tau1) in taus.iter().enumerate() {
        for (l, &tau2) in taus.iter().enumerate() {
            let at = |p_a: f64, p_r: f64| EcAllocation { p_a, p_r, tau1, tau2 };
            if ec_feasible(config, &at(0.0, 0.0)).is_err() {
                continue;
            }
            // Feasibility is separable and monotone in each power.
            let na = feasible_prefix(&pa, |p| ec_feasible(config, &at(p, 0.0)).is_ok());
            let nr = feasible_prefix(&pr, |p| ec_feasible(config, &at(0.0, p)).is_ok());
            evaluated += (na * nr) as u64;
            if tau1 == 0.0 || tau2 == 0.0 {
                // Zero throughput everywhere; only the first point can win a tie.
                best.offer(0.0, index(0, 0, k, l), || at(pa[0], pr[0]));
                continue;
            }
            let gain = config.eta * tau1 * ch.h_sa / (tau2 * n0);
            for i in 0..na {
                for j in 0..nr {
                    let v = tau2 * (gain * rx[i * pr.len() + j]).ln_1p() / std::f64::consts::LN_2;
                    best.offer(v, index(i, j, k, l), || at(pa[i], pr[j]));
                }
            }
        }
    }
    Ok(OracleResult {
        alloc: best.alloc,
        throughput: best.value.max(0.0),
        evaluated,
    })
}

/// Exhaustive D-C search over `(p_a, p_r_d, p_r_u, tau1)` with
/// `tau2 = 1 - tau1`.
pub fn oracle_dc(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    grid: &GridSpec,
) -> Result<OracleResult<DcAllocation>> {
    config.validate()?;
    grid.validate()?;
    let taus = grid.taus();
    let pa = grid.powers(config.p_a_max);
    let pr = grid.powers(config.p_r_max);
    let np = grid.n_power as u64;
    let index = |i: usize, j: usize, l: usize, k: usize| {
        ((i as u64 * np + j as u64) * np + l as u64) * grid.n_tau as u64 + k as u64
    };
    let n0 = config.noise();

    let mut best = Best {
        value: f64::NEG_INFINITY,
        index: u64::MAX,
        alloc: DcAllocation::default(),
    };
    let mut evaluated = 0u64;
    for (k, &tau1) in taus.iter().enumerate() {
        let tau2 = 1.0 - tau1;
        let at = |p_a: f64, p_r_d: f64, p_r_u: f64| DcAllocation {
            p_a,
            p_r_d,
            p_r_u,
            tau1,
            tau2,
        };
        let na = feasible_prefix(&pa, |p| dc_feasible(config, &at(p, 0.0, 0.0)).is_ok());
        // For each relay downlink power, how many uplink powers still fit.
        let nu: Vec<usize> = pr
            .iter()
            .map(|&d| {
                if dc_feasible(config, &at(0.0, d, 0.0)).is_err() {
                    0
                } else {
                    feasible_prefix(&pr, |u| dc_feasible(config, &at(0.0, d, u)).is_ok())
                }
            })
            .collect();
        let idle = tau1 == 0.0 || tau2 == 0.0;
        for (i, &p_a) in pa.iter().enumerate().take(na) {
            for (j, &n_up) in nu.iter().enumerate() {
                evaluated += n_up as u64;
                if n_up == 0 {
                    continue;
                }
                if idle {
                    best.offer(0.0, index(i, j, 0, k), || at(p_a, pr[j], pr[0]));
                    continue;
                }
                let harvested = config.eta * tau1 * (p_a * ch.h_as + pr[j] * ch.h_rs);
                let source_power = 2.0 * harvested / tau2;
                let sa = source_power * ch.h_sa / n0;
                let sr = source_power * ch.h_sr / n0;
                for (l, &p_u) in pr.iter().enumerate().take(n_up) {
                    let snr = sa + relay_path_snr(sr, p_u * ch.h_ra / n0);
                    let v = 0.5 * tau2 * snr.ln_1p() / std::f64::consts::LN_2;
                    best.offer(v, index(i, j, l, k), || at(p_a, pr[j], p_u));
                }
            }
        }
    }
    Ok(OracleResult {
        alloc: best.alloc,
        throughput: best.value.max(0.0),
        evaluated,
    })
}

/// Throughput of the E-C optimum moved onto the oracle grid: the best
/// feasible neighbour of its `tau1` among the grid times, with `tau2 = 1 - tau1`
/// and peak powers (which are grid points). The oracle can do no worse.
pub fn ec_optimum_on_grid(
    config: &NetworkConfig,
    ch: &ChannelRealization,
    tau1: f64,
    grid: &GridSpec,
) -> f64 {
    let steps = (grid.n_tau - 1) as f64;
    let below = (tau1 * steps).floor() as usize;
    [below, below + 1]
        .into_iter()
        .filter(|&k| k < grid.n_tau)
        .map(|k| EcAllocation {
            p_a: config.p_a_max,
            p_r: config.p_r_max,
            tau1: k as f64 / steps,
            tau2: (grid.n_tau - 1 - k) as f64 / steps,
        })
        .filter_map(|a| crate::protocols::ec_throughput(config, ch, &a).ok())
        .fold(0.0, f64::max)
}

/// Solver and oracle throughputs for one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    pub block: u64,
    pub ec_solver: f64,
    pub ec_oracle: f64,
    /// E-C optimum re-evaluated on the oracle grid.
    pub ec_on_grid: f64,
    pub dc_solver: f64,
    pub dc_oracle: f64,
}

/// Relative slack allowed between solvers and oracles.
pub const ORACLE_REL_TOL: f64 = 1e-3;

impl OracleComparison {
    pub fn run(
        config: &NetworkConfig,
        seed: u64,
        block: u64,
        grid: &GridSpec,
    ) -> Result<Self> {
        let ch = crate::channel::sample_realization(config, seed, block)?;
        let ec = crate::solver_ec::optimize_ec(config, &ch)?;
        let dc = crate::solver_dc::optimize_dc(config, &ch)?;
        Ok(OracleComparison {
            block,
            ec_solver: ec.throughput,
            ec_oracle: oracle_ec(config, &ch, grid)?.throughput,
            ec_on_grid: ec_optimum_on_grid(config, &ch, ec.alloc.tau1, grid),
            dc_solver: dc.throughput,
            dc_oracle: oracle_dc(config, &ch, grid)?.throughput,
        })
    }

    /// E-C solver is at least the grid best and within the on-grid bound.
    pub fn ec_ok(&self) -> bool {
        self.ec_solver >= self.ec_oracle * (1.0 - 1e-12)
            && self.ec_oracle >= self.ec_on_grid * (1.0 - 1e-12)
            && self.ec_solver - self.ec_on_grid <= ORACLE_REL_TOL * self.ec_solver
    }

    pub fn dc_ok(&self) -> bool {
        self.dc_solver >= self.dc_oracle * (1.0 - ORACLE_REL_TOL)
    }
}

/// Dense scan of the D-C relay-split SNR over `[t_lo, min(t_hi, t_cap)]`,
/// uniform in `ln(1 + t)` with both ends included. Returns `(t, max)`.
pub fn scan_relay_split(
    coeffs: &QuadraticCoeffs,
    t_lo: f64,
    t_hi: f64,
    n_points: usize,
    t_cap: f64,
) -> (f64, f64) {
    let hi = t_hi.min(t_cap).max(t_lo);
    let (u_lo, u_hi) = (t_lo.ln_1p(), hi.ln_1p());
    let mut best = (t_lo, f64::NEG_INFINITY);
    for i in 0..n_points.max(2) {
        let t = if i == 0 {
            t_lo
        } else if i == n_points.max(2) - 1 {
            hi
        } else {
            (u_lo + (u_hi - u_lo) * i as f64 / (n_points - 1) as f64).exp_m1()
        };
        let g = coeffs.gamma(t);
        if g > best.1 {
            best = (t, g);
        }
    }
    best
}
