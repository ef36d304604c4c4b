use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use wpcoop::experiments::{
    run_distance_sweep, run_power_sweep, with_workers, write_csv, write_csv_to, Protocol,
    SweepKind, SweepRow, SweepSpec, DEFAULT_MUS, DEFAULT_POWERS,
};
use wpcoop::oracle::{OracleComparison, ORACLE_REL_TOL};
use wpcoop::{optimize_dc, optimize_ec, sample_realization, Error, GridSpec, NetworkConfig};

#[derive(Parser)]
#[command(name = "wpcoop", version, about = "Wireless-powered cooperative relaying: optimize, sweep, validate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one channel realization and print the allocation.
    Optimize {
        #[arg(long, value_parser = parse_protocol)]
        protocol: Protocol,
        /// Block index of the realization under --seed.
        #[arg(long, default_value_t = 0)]
        block: u64,
        #[command(flatten)]
        net: NetArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Average throughput versus average transmit power.
    SweepPower(SweepArgs),
    /// Average throughput versus source-relay distance (--d-sr, repeatable).
    SweepDistance(SweepArgs),
    /// Compare both solvers against the brute-force grid oracles.
    Validate {
        /// Number of realizations.
        #[arg(long, default_value_t = 200)]
        n: u64,
        #[arg(long, default_value_t = 101)]
        grid_tau: usize,
        #[arg(long, default_value_t = 41)]
        grid_power: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        net: NetArgs,
    },
}

#[derive(Args)]
struct NetArgs {
    /// AP to source distance (m).
    #[arg(long, default_value_t = 10.0)]
    d_as: f64,
    /// Source to relay distance (m); repeatable for sweep-distance.
    #[arg(long)]
    d_sr: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    #[arg(long, default_value_t = -80.0, allow_hyphen_values = true)]
    n0_dbm: f64,
    /// Average-to-peak power ratio; repeatable for sweeps.
    #[arg(long)]
    mu: Vec<f64>,
    /// Average power of AP and relay (W); repeatable for sweep-power.
    #[arg(long)]
    p_avg: Vec<f64>,
    /// Draw all five link gains independently.
    #[arg(long)]
    non_reciprocal: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long, default_value_t = 5000)]
    realizations: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    s.parse()
}

fn single(name: &str, values: &[f64], default: f64) -> Result<f64, String> {
    match values {
        [] => Ok(default),
        [v] => Ok(*v),
        _ => Err(format!("--{name} takes a single value for this command")),
    }
}

impl NetArgs {
    /// Configuration with single-valued flags resolved.
    fn config(&self, p_avg: f64, mu: f64, d_sr: f64) -> Result<NetworkConfig, String> {
        let cfg = NetworkConfig {
            d_as: self.d_as,
            d_sr,
            alpha: self.alpha,
            eta: self.eta,
            n0_dbm: self.n0_dbm,
            reciprocal_channels: !self.non_reciprocal,
            ..NetworkConfig::default()
        }
        .with_average_power(p_avg, mu)
        .map_err(|e| e.to_string())?;
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    fn single_config(&self) -> Result<NetworkConfig, String> {
        self.config(
            single("p-avg", &self.p_avg, 1.0)?,
            single("mu", &self.mu, 0.5)?,
            single("d-sr", &self.d_sr, 5.0)?,
        )
    }
}

fn run_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(n) => with_workers(n, f),
        None => f(),
    }
}

fn optimize(protocol: Protocol, net: &NetArgs, seed: u64, block: u64) -> Result<(), String> {
    let cfg = net.single_config()?;
    let ch = sample_realization(&cfg, seed, block).map_err(|e| e.to_string())?;
    println!("protocol: {protocol}");
    println!("seed: {seed}");
    println!("block: {block}");
    println!(
        "gains: h_as={:e} h_rs={:e} h_sa={:e} h_sr={:e} h_ra={:e}",
        ch.h_as, ch.h_rs, ch.h_sa, ch.h_sr, ch.h_ra
    );
    match protocol {
        Protocol::Ec => {
            let opt = optimize_ec(&cfg, &ch).map_err(|e| e.to_string())?;
            println!("throughput: {}", opt.throughput);
            println!("tau1: {}", opt.alloc.tau1);
            println!("tau2: {}", opt.alloc.tau2);
            println!("p_a: {}", opt.alloc.p_a);
            println!("p_r: {}", opt.alloc.p_r);
            println!("z_star: {}", opt.z_star);
            println!("tau1_uncapped: {}", opt.tau1_uncapped);
            println!("capped: {}", opt.capped);
        }
        Protocol::Dc => {
            let opt = optimize_dc(&cfg, &ch).map_err(|e| e.to_string())?;
            println!("throughput: {}", opt.throughput);
            println!("tau1: {}", opt.alloc.tau1);
            println!("tau2: {}", opt.alloc.tau2);
            println!("p_a: {}", opt.alloc.p_a);
            println!("p_r_d: {}", opt.alloc.p_r_d);
            println!("p_r_u: {}", opt.alloc.p_r_u);
            println!("case: {}", opt.inner.case.id());
            match opt.inner.t_star {
                Some(t) => println!("t_star: {t}"),
                None => println!("t_star: none"),
            }
        }
    }
    Ok(())
}

fn sweep(kind: SweepKind, args: &SweepArgs) -> Result<(), String> {
    let net = &args.net;
    let mu_values = if net.mu.is_empty() {
        match kind {
            SweepKind::Power => DEFAULT_MUS.to_vec(),
            SweepKind::Distance => vec![0.5],
        }
    } else {
        net.mu.clone()
    };
    let (sweep_values, base) = match kind {
        SweepKind::Power => {
            let powers = if net.p_avg.is_empty() {
                DEFAULT_POWERS.to_vec()
            } else {
                net.p_avg.clone()
            };
            (powers, net.config(1.0, 0.5, single("d-sr", &net.d_sr, 5.0)?)?)
        }
        SweepKind::Distance => {
            let dists = if net.d_sr.is_empty() {
                (1..=9).map(f64::from).collect()
            } else {
                net.d_sr.clone()
            };
            // Geometry is overridden per point; only the average power matters.
            let p_avg = single("p-avg", &net.p_avg, 2.0)?;
            (dists, net.config(p_avg, 1.0, 0.5 * net.d_as)?)
        }
    };
    let spec = SweepSpec {
        kind,
        sweep_values,
        mu_values,
        base,
        n_realizations: args.realizations,
        seed: args.seed,
    };
    let rows: Vec<SweepRow> = run_pool(args.workers, || match kind {
        SweepKind::Power => run_power_sweep(&spec),
        SweepKind::Distance => run_distance_sweep(&spec),
    })
    .map_err(|e: Error| e.to_string())?;
    match &args.out {
        Some(path) => write_csv(&rows, path).map_err(|e| e.to_string()),
        None => write_csv_to(&rows, std::io::stdout().lock()).map_err(|e| e.to_string()),
    }
}

fn validate(
    n: u64,
    grid: GridSpec,
    seed: u64,
    workers: Option<usize>,
    net: &NetArgs,
) -> Result<bool, String> {
    grid.validate().map_err(|e| e.to_string())?;
    let cfg = net.single_config()?;
    let start = Instant::now();
    let results: Vec<OracleComparison> = run_pool(workers, || {
        (0..n)
            .into_par_iter()
            .map(|b| OracleComparison::run(&cfg, seed, b, &grid))
            .collect::<Result<_, _>>()
    })
    .map_err(|e: Error| e.to_string())?;

    let worst = |gap: &dyn Fn(&OracleComparison) -> f64| {
        results.iter().map(gap).fold(f64::NEG_INFINITY, f64::max)
    };
    let ec_fail: Vec<u64> = results.iter().filter(|r| !r.ec_ok()).map(|r| r.block).collect();
    let dc_fail: Vec<u64> = results.iter().filter(|r| !r.dc_ok()).map(|r| r.block).collect();
    let rel = |a: f64, b: f64| if a > 0.0 { (a - b) / a } else { 0.0 };
    println!(
        "grid: n_tau={} n_power={}; realizations: {n}; seed: {seed}; tolerance: {ORACLE_REL_TOL:e}",
        grid.n_tau, grid.n_power
    );
    println!(
        "EC: {} / {n} pass; max (solver - oracle) / solver = {:.3e}; max (solver - on-grid) / solver = {:.3e}",
        n - ec_fail.len() as u64,
        worst(&|r| rel(r.ec_solver, r.ec_oracle)),
        worst(&|r| rel(r.ec_solver, r.ec_on_grid)),
    );
    println!(
        "DC: {} / {n} pass; max (oracle - solver) / oracle = {:.3e}",
        n - dc_fail.len() as u64,
        worst(&|r| rel(r.dc_oracle, r.dc_solver)).max(0.0),
    );
    println!("elapsed: {:.1} s", start.elapsed().as_secs_f64());
    if !ec_fail.is_empty() {
        eprintln!("error: EC solver below oracle for blocks {ec_fail:?}");
    }
    if !dc_fail.is_empty() {
        eprintln!("error: DC solver below oracle for blocks {dc_fail:?}");
    }
    Ok(ec_fail.is_empty() && dc_fail.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Optimize {
            protocol,
            block,
            net,
            seed,
        } => optimize(*protocol, net, *seed, *block).map(|_| true),
        Command::SweepPower(args) => sweep(SweepKind::Power, args).map(|_| true),
        Command::SweepDistance(args) => sweep(SweepKind::Distance, args).map(|_| true),
        Command::Validate {
            n,
            grid_tau,
            grid_power,
            seed,
            workers,
            net,
        } => {
            let grid = GridSpec {
                n_tau: *grid_tau,
                n_power: *grid_power,
                ..GridSpec::default()
            };
            validate(*n, grid, *seed, *workers, net)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
