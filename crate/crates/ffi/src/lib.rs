//! C ABI over the `wpcoop` solvers.
//!
//! Every fallible function returns a [`WpcStatus`] and writes its result
//! through an out-pointer. On failure a human-readable message is available
//! from [`wpc_last_error_message`] on the same thread.
//!
//! Configurations and sweep results are opaque handles owned by the caller
//! and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wpcoop::experiments::{run_sweep, SweepKind, SweepRow, SweepSpec};
use wpcoop::protocols::{dc_throughput, ec_throughput, DcAllocation, EcAllocation};
use wpcoop::{
    optimize_dc, optimize_ec, sample_realization, ChannelRealization, Error, NetworkConfig,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpcStatus {
    Ok = 0,
    NullPointer = 1,
    /// A number is out of range or the configuration is inconsistent.
    InvalidArgument = 2,
    /// An allocation violates a time or power constraint.
    Infeasible = 3,
    /// A row index past the end of a sweep.
    OutOfRange = 4,
    /// Unexpected failure, including a caught panic.
    Internal = 5,
}

/// Physical parameters of the three-node network.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpcNetworkParams {
    /// AP to source distance in metres.
    pub d_as: f64,
    /// Source to relay distance in metres; the relay sits on the AP-source line.
    pub d_sr: f64,
    pub alpha: f64,
    /// Energy-harvesting efficiency.
    pub eta: f64,
    pub n0_dbm: f64,
    pub p_a_max: f64,
    pub p_r_max: f64,
    /// Average-to-peak power ratio.
    pub mu: f64,
    pub reciprocal_channels: bool,
}

/// Power gains of one fading block.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpcGains {
    pub h_as: f64,
    pub h_rs: f64,
    pub h_sa: f64,
    pub h_sr: f64,
    pub h_ra: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpcEcAllocation {
    pub p_a: f64,
    pub p_r: f64,
    pub tau1: f64,
    pub tau2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpcDcAllocation {
    pub p_a: f64,
    pub p_r_d: f64,
    pub p_r_u: f64,
    pub tau1: f64,
    pub tau2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpcEcResult {
    pub alloc: WpcEcAllocation,
    pub throughput: f64,
    pub z_star: f64,
    pub tau1_uncapped: f64,
    pub capped: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpcDcResult {
    pub alloc: WpcDcAllocation,
    pub throughput: f64,
    /// Inner case that produced the optimum: 1, 2 or 3.
    pub inner_case: u8,
    /// Relay uplink-to-downlink energy ratio; NaN when not a free variable.
    pub t_star: f64,
}

/// Protocol selector for sweep rows.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpcProtocol {
    Ec = 0,
    Dc = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpcSweepRow {
    pub sweep_value: f64,
    pub mu: f64,
    pub protocol: WpcProtocol,
    pub mean_throughput: f64,
    pub std_error: f64,
    pub n: u64,
    pub seed: u64,
}

/// Validated network configuration.
pub struct WpcConfig(NetworkConfig);

/// Rows of a finished sweep.
pub struct WpcSweep(Vec<SweepRow>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: WpcStatus, msg: impl Into<String>) -> WpcStatus {
    set_last_error(msg.into());
    status
}

fn from_error(err: Error) -> WpcStatus {
    let status = match err {
        Error::Infeasible(_) => WpcStatus::Infeasible,
        Error::Domain { .. } | Error::InvalidConfig(_) | Error::InvalidSweep(_) => {
            WpcStatus::InvalidArgument
        }
        _ => WpcStatus::Internal,
    };
    fail(status, err.to_string())
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), WpcStatus>) -> WpcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WpcStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(WpcStatus::Internal, "panic inside wpcoop"),
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, WpcStatus> {
    p.as_ref()
        .ok_or_else(|| fail(WpcStatus::NullPointer, format!("{name} is null")))
}

unsafe fn write<T>(p: *mut T, name: &str, value: T) -> Result<(), WpcStatus> {
    if p.is_null() {
        return Err(fail(WpcStatus::NullPointer, format!("{name} is null")));
    }
    p.write(value);
    Ok(())
}

fn gains_in(g: &WpcGains) -> Result<ChannelRealization, WpcStatus> {
    ChannelRealization::new(g.h_as, g.h_rs, g.h_sa, g.h_sr, g.h_ra).map_err(from_error)
}

fn gains_out(ch: &ChannelRealization) -> WpcGains {
    WpcGains {
        h_as: ch.h_as,
        h_rs: ch.h_rs,
        h_sa: ch.h_sa,
        h_sr: ch.h_sr,
        h_ra: ch.h_ra,
    }
}

/// Message describing the most recent failure on this thread, or null if
/// none occurred. The pointer stays valid until the next failing call on
/// the same thread.
#[no_mangle]
pub extern "C" fn wpc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn wpc_status_name(status: WpcStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        WpcStatus::Ok => b"ok\0",
        WpcStatus::NullPointer => b"null pointer\0",
        WpcStatus::InvalidArgument => b"invalid argument\0",
        WpcStatus::Infeasible => b"infeasible allocation\0",
        WpcStatus::OutOfRange => b"index out of range\0",
        WpcStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}

/// Default network parameters.
#[no_mangle]
pub extern "C" fn wpc_network_params_default() -> WpcNetworkParams {
    let c = NetworkConfig::default();
    WpcNetworkParams {
        d_as: c.d_as,
        d_sr: c.d_sr,
        alpha: c.alpha,
        eta: c.eta,
        n0_dbm: c.n0_dbm,
        p_a_max: c.p_a_max,
        p_r_max: c.p_r_max,
        mu: c.mu,
        reciprocal_channels: c.reciprocal_channels,
    }
}

/// Validates `params` and stores a new configuration handle in `*out`.
///
/// # Safety
/// `params` must point to a valid `WpcNetworkParams` and `out` to writable
/// storage for one pointer. Release the handle with [`wpc_config_free`].
#[no_mangle]
pub unsafe extern "C" fn wpc_config_new(
    params: *const WpcNetworkParams,
    out: *mut *mut WpcConfig,
) -> WpcStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let cfg = NetworkConfig {
            d_as: p.d_as,
            d_sr: p.d_sr,
            alpha: p.alpha,
            eta: p.eta,
            n0_dbm: p.n0_dbm,
            p_a_max: p.p_a_max,
            p_r_max: p.p_r_max,
            mu: p.mu,
            reciprocal_channels: p.reciprocal_channels,
        };
        cfg.validate().map_err(from_error)?;
        write(out, "out", Box::into_raw(Box::new(WpcConfig(cfg))))
    })
}

/// Like [`wpc_config_new`] but with both peak powers set to `p_avg / mu`.
///
/// # Safety
/// Same contract as [`wpc_config_new`].
#[no_mangle]
pub unsafe extern "C" fn wpc_config_with_average_power(
    params: *const WpcNetworkParams,
    p_avg: f64,
    mu: f64,
    out: *mut *mut WpcConfig,
) -> WpcStatus {
    guard(|| {
        let p = *deref(params, "params")?;
        let WpcNetworkParams { d_as, d_sr, alpha, eta, n0_dbm, reciprocal_channels, .. } = p;
        let cfg = NetworkConfig {
            d_as,
            d_sr,
            alpha,
            eta,
            n0_dbm,
            reciprocal_channels,
            ..NetworkConfig::default()
        }
        .with_average_power(p_avg, mu)
        .map_err(from_error)?;
        cfg.validate().map_err(from_error)?;
        write(out, "out", Box::into_raw(Box::new(WpcConfig(cfg))))
    })
}

/// Releases a configuration handle. Null is ignored.
///
/// # Safety
/// `config` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wpc_config_free(config: *mut WpcConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Draws the gains of fading block `block` under `seed`.
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wpc_sample_gains(
    config: *const WpcConfig,
    seed: u64,
    block: u64,
    out: *mut WpcGains,
) -> WpcStatus {
    guard(|| {
        let cfg = &deref(config, "config")?.0;
        let ch = sample_realization(cfg, seed, block).map_err(from_error)?;
        write(out, "out", gains_out(&ch))
    })
}

/// Optimal E-C allocation for one block.
///
/// # Safety
/// `config` must be a live handle, `gains` valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wpc_optimize_ec(
    config: *const WpcConfig,
    gains: *const WpcGains,
    out: *mut WpcEcResult,
) -> WpcStatus {
    guard(|| {
        let cfg = &deref(config, "config")?.0;
        let ch = gains_in(deref(gains, "gains")?)?;
        let opt = optimize_ec(cfg, &ch).map_err(from_error)?;
        let a = opt.alloc;
        write(
            out,
            "out",
            WpcEcResult {
                alloc: WpcEcAllocation {
                    p_a: a.p_a,
                    p_r: a.p_r,
                    tau1: a.tau1,
                    tau2: a.tau2,
                },
                throughput: opt.throughput,
                z_star: opt.z_star,
                tau1_uncapped: opt.tau1_uncapped,
                capped: opt.capped,
            },
        )
    })
}

/// Optimal D-C allocation for one block.
///
/// # Safety
/// `config` must be a live handle, `gains` valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wpc_optimize_dc(
    config: *const WpcConfig,
    gains: *const WpcGains,
    out: *mut WpcDcResult,
) -> WpcStatus {
    guard(|| {
        let cfg = &deref(config, "config")?.0;
        let ch = gains_in(deref(gains, "gains")?)?;
        let opt = optimize_dc(cfg, &ch).map_err(from_error)?;
        let a = opt.alloc;
        write(
            out,
            "out",
            WpcDcResult {
                alloc: WpcDcAllocation {
                    p_a: a.p_a,
                    p_r_d: a.p_r_d,
                    p_r_u: a.p_r_u,
                    tau1: a.tau1,
                    tau2: a.tau2,
                },
                throughput: opt.throughput,
                inner_case: opt.inner.case.id(),
                t_star: opt.inner.t_star.unwrap_or(f64::NAN),
            },
        )
    })
}

/// E-C throughput of a given allocation; fails with `Infeasible` if it
/// breaks a constraint.
///
/// # Safety
/// All pointers must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wpc_ec_throughput(
    config: *const WpcConfig,
    gains: *const WpcGains,
    alloc: *const WpcEcAllocation,
    out: *mut f64,
) -> WpcStatus {
    guard(|| {
        let cfg = &deref(config, "config")?.0;
        let ch = gains_in(deref(gains, "gains")?)?;
        let a = deref(alloc, "alloc")?;
        let alloc = EcAllocation {
            p_a: a.p_a,
            p_r: a.p_r,
            tau1: a.tau1,
            tau2: a.tau2,
        };
        write(out, "out", ec_throughput(cfg, &ch, &alloc).map_err(from_error)?)
    })
}

/// D-C throughput of a given allocation; fails with `Infeasible` if it
/// breaks a constraint.
///
/// # Safety
/// All pointers must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wpc_dc_throughput(
    config: *const WpcConfig,
    gains: *const WpcGains,
    alloc: *const WpcDcAllocation,
    out: *mut f64,
) -> WpcStatus {
    guard(|| {
        let cfg = &deref(config, "config")?.0;
        let ch = gains_in(deref(gains, "gains")?)?;
        let a = deref(alloc, "alloc")?;
        let alloc = DcAllocation {
            p_a: a.p_a,
            p_r_d: a.p_r_d,
            p_r_u: a.p_r_u,
            tau1: a.tau1,
            tau2: a.tau2,
        };
        write(out, "out", dc_throughput(cfg, &ch, &alloc).map_err(from_error)?)
    })
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], WpcStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(WpcStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn sweep_into(
    kind: SweepKind,
    base: &WpcConfig,
    values: &[f64],
    mus: &[f64],
    realizations: usize,
    seed: u64,
) -> Result<*mut WpcSweep, WpcStatus> {
    let spec = SweepSpec {
        kind,
        sweep_values: values.to_vec(),
        mu_values: mus.to_vec(),
        base: base.0,
        n_realizations: realizations,
        seed,
    };
    let rows = run_sweep(&spec).map_err(from_error)?;
    Ok(Box::into_raw(Box::new(WpcSweep(rows))))
}

/// Monte Carlo mean throughput of both protocols for every average power in
/// `powers` and every ratio in `mus`. Geometry and noise come from `base`.
///
/// # Safety
/// `powers` and `mus` must point to `n_powers` and `n_mus` doubles, `base`
/// must be a live handle and `out` writable. Release the result with
/// [`wpc_sweep_free`].
#[no_mangle]
pub unsafe extern "C" fn wpc_sweep_power(
    base: *const WpcConfig,
    powers: *const f64,
    n_powers: usize,
    mus: *const f64,
    n_mus: usize,
    realizations: usize,
    seed: u64,
    out: *mut *mut WpcSweep,
) -> WpcStatus {
    guard(|| {
        let powers = slice(powers, n_powers, "powers")?;
        let mus = slice(mus, n_mus, "mus")?;
        let base = deref(base, "base")?;
        let handle = sweep_into(SweepKind::Power, base, powers, mus, realizations, seed)?;
        write(out, "out", handle)
    })
}

/// Like [`wpc_sweep_power`] but over source-relay distances, keeping the
/// average powers of `base`.
///
/// # Safety
/// Same contract as [`wpc_sweep_power`].
#[no_mangle]
pub unsafe extern "C" fn wpc_sweep_distance(
    base: *const WpcConfig,
    distances: *const f64,
    n_distances: usize,
    mus: *const f64,
    n_mus: usize,
    realizations: usize,
    seed: u64,
    out: *mut *mut WpcSweep,
) -> WpcStatus {
    guard(|| {
        let distances = slice(distances, n_distances, "distances")?;
        let mus = slice(mus, n_mus, "mus")?;
        let base = deref(base, "base")?;
        let handle = sweep_into(SweepKind::Distance, base, distances, mus, realizations, seed)?;
        write(out, "out", handle)
    })
}

/// Number of rows in a sweep; zero for null.
///
/// # Safety
/// `sweep` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wpc_sweep_len(sweep: *const WpcSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.0.len())
}

/// Copies row `index` into `*out`. Rows are ordered by protocol (E-C
/// first), then `mu`, then sweep value.
///
/// # Safety
/// `sweep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wpc_sweep_row(
    sweep: *const WpcSweep,
    index: usize,
    out: *mut WpcSweepRow,
) -> WpcStatus {
    guard(|| {
        let rows = &deref(sweep, "sweep")?.0;
        let r = rows.get(index).ok_or_else(|| {
            fail(
                WpcStatus::OutOfRange,
                format!("row {index} of a sweep with {} rows", rows.len()),
            )
        })?;
        write(
            out,
            "out",
            WpcSweepRow {
                sweep_value: r.sweep_value,
                mu: r.mu,
                protocol: match r.protocol {
                    wpcoop::experiments::Protocol::Ec => WpcProtocol::Ec,
                    wpcoop::experiments::Protocol::Dc => WpcProtocol::Dc,
                },
                mean_throughput: r.mean_throughput,
                std_error: r.std_error,
                n: r.n as u64,
                seed: r.seed,
            },
        )
    })
}

/// Releases a sweep handle. Null is ignored.
///
/// # Safety
/// `sweep` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wpc_sweep_free(sweep: *mut WpcSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}
