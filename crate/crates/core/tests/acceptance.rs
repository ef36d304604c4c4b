//! Acceptance suite. Runs every criterion, prints one `PASS`/`FAIL` line per
//! criterion and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use wpcoop::experiments::{
    run_distance_sweep, run_power_sweep, with_workers, write_csv_to, Protocol, SweepKind,
    SweepRow, SweepSpec, DEFAULT_MUS, DEFAULT_POWERS,
};
use wpcoop::oracle::{ec_optimum_on_grid, scan_relay_split, ORACLE_REL_TOL};
use wpcoop::protocols::{
    dc_feasible, dc_throughput, ec_feasible, ec_throughput, relay_path_snr, DcAllocation,
    EcAllocation,
};
use wpcoop::solver_dc::{dc_inner, dc_inner_case1, dc_inner_case2, QuadraticCoeffs};
use wpcoop::solver_ec::{ec_snr_constant, optimal_tau1_uncapped, solve_z};
use wpcoop::{
    optimize_dc, optimize_ec, oracle_dc, oracle_ec, sample_realization, GridSpec, NetworkConfig,
};

const SEED: u64 = 2024;
const ORACLE_REALIZATIONS: u64 = 200;
const MC_REALIZATIONS: usize = 5000;

type Outcome = Result<String, String>;

fn base_config() -> NetworkConfig {
    NetworkConfig::default().with_average_power(1.0, 0.5).unwrap()
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ec_oracle() -> Outcome {
    let cfg = base_config();
    let grid = GridSpec::default();
    let gaps: Vec<Result<f64, String>> = (0..ORACLE_REALIZATIONS)
        .into_par_iter()
        .map(|b| {
            let ch = sample_realization(&cfg, SEED, b).unwrap();
            let solver = optimize_ec(&cfg, &ch).unwrap();
            let oracle = oracle_ec(&cfg, &ch, &grid).unwrap().throughput;
            let on_grid = ec_optimum_on_grid(&cfg, &ch, solver.alloc.tau1, &grid);
            let t = solver.throughput;
            check(
                t >= oracle * (1.0 - 1e-12),
                format!("block {b}: solver {t} < oracle {oracle}"),
            )?;
            check(
                oracle >= on_grid * (1.0 - 1e-12) && t - on_grid <= ORACLE_REL_TOL * t,
                format!("block {b}: solver {t} oracle {oracle} on-grid {on_grid}"),
            )?;
            Ok(if t > 0.0 { (t - oracle) / t } else { 0.0 })
        })
        .collect();
    let mut worst = 0.0f64;
    for g in gaps {
        worst = worst.max(g?);
    }
    Ok(format!("{ORACLE_REALIZATIONS} realizations, max excess over grid {worst:.2e}"))
}

fn dc_oracle() -> Outcome {
    let cfg = base_config();
    let grid = GridSpec::default();
    let gaps: Vec<Result<f64, String>> = (0..ORACLE_REALIZATIONS)
        .into_par_iter()
        .map(|b| {
            let ch = sample_realization(&cfg, SEED, b).unwrap();
            let solver = optimize_dc(&cfg, &ch).unwrap().throughput;
            let oracle = oracle_dc(&cfg, &ch, &grid).unwrap().throughput;
            check(
                solver >= oracle * (1.0 - ORACLE_REL_TOL),
                format!("block {b}: solver {solver} oracle {oracle}"),
            )?;
            Ok(if oracle > 0.0 { (oracle - solver) / oracle } else { 0.0 })
        })
        .collect();
    let mut worst = 0.0f64;
    for g in gaps {
        worst = worst.max(g?);
    }
    Ok(format!(
        "{ORACLE_REALIZATIONS} realizations, max shortfall {worst:.2e} (limit {ORACLE_REL_TOL:e})"
    ))
}

fn ec_structure() -> Outcome {
    let cfg = base_config();
    let mut capped = 0;
    for b in 0..ORACLE_REALIZATIONS {
        let ch = sample_realization(&cfg, SEED, b).unwrap();
        let opt = optimize_ec(&cfg, &ch).unwrap();
        check(
            opt.alloc.p_a == cfg.p_a_max && opt.alloc.p_r == cfg.p_r_max,
            format!("block {b}: powers not at peak"),
        )?;
        let tau1 = optimal_tau1_uncapped(ec_snr_constant(&cfg, &ch)).unwrap();
        check(
            opt.alloc.tau1 == tau1.min(cfg.mu),
            format!("block {b}: tau1 {} vs min({tau1}, mu)", opt.alloc.tau1),
        )?;
        capped += opt.capped as usize;
    }
    Ok(format!("{ORACLE_REALIZATIONS} realizations, {capped} capped at mu"))
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo.log10()..hi.log10()))
}

fn relay_split_candidates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut sign_checks = 0;
    for i in 0..100 {
        let mut p = || log_uniform(&mut rng, 1e-3, 1e3);
        let q = QuadraticCoeffs::new(p(), p(), p(), p(), p());
        let t_hi = log_uniform(&mut rng, 1e-2, 1e3);
        let (_, cand) = q.maximize(0.0, t_hi);
        let (_, scan) = scan_relay_split(&q, 0.0, t_hi, 10_000, f64::INFINITY);
        let rel = (cand - scan).abs() / scan;
        check(
            cand >= scan * (1.0 - 1e-12) && rel <= 1e-6,
            format!("tuple {i}: candidates {cand} vs scan {scan}"),
        )?;
        worst = worst.max(rel);
        for _ in 0..100 {
            let t = rng.gen_range(0.0..t_hi);
            let h = 1e-6 * t.max(1e-6);
            let fd = (q.gamma(t + h) - q.gamma((t - h).max(0.0))) / (t + h - (t - h).max(0.0));
            let poly = q.derivative_sign_poly(t);
            let scale = (q.quad_a * t * t).abs() + (q.quad_b * t).abs() + q.quad_c.abs();
            if poly.abs() < 1e-6 * scale || fd.abs() < 1e-9 * q.gamma(t) / t.max(1e-6) {
                continue;
            }
            check(
                (fd > 0.0) == (poly > 0.0),
                format!("tuple {i}: derivative sign mismatch at t = {t}"),
            )?;
            sign_checks += 1;
        }
    }
    check(sign_checks >= 9_000, format!("only {sign_checks} resolvable sign checks"))?;
    Ok(format!("100 tuples, max rel gap {worst:.2e}, {sign_checks} sign checks"))
}

fn saturated_never_better() -> Outcome {
    let cfg = base_config();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    for b in 0..100 {
        let ch = sample_realization(&cfg, SEED, b).unwrap();
        let at_mu = dc_inner(&cfg, &ch, cfg.mu).unwrap().objective;
        for _ in 0..20 {
            let tau1 = cfg.mu + (1.0 - cfg.mu) * (1.0 - rng.gen::<f64>());
            let v = dc_inner(&cfg, &ch, tau1).unwrap().objective;
            check(
                v <= at_mu + 1e-9,
                format!("block {b}: value {v} at tau1 {tau1} exceeds {at_mu} at mu"),
            )?;
        }
    }
    Ok("100 realizations x 20 downlink fractions".into())
}

fn sweep_spec(kind: SweepKind, values: Vec<f64>, mus: Vec<f64>, base: NetworkConfig) -> SweepSpec {
    SweepSpec {
        kind,
        sweep_values: values,
        mu_values: mus,
        base,
        n_realizations: MC_REALIZATIONS,
        seed: SEED,
    }
}

fn curve(rows: &[SweepRow], protocol: Protocol, mu: f64) -> Vec<&SweepRow> {
    rows.iter()
        .filter(|r| r.protocol == protocol && r.mu == mu)
        .collect()
}

fn mean_at(rows: &[SweepRow], protocol: Protocol, mu: f64, x: f64) -> f64 {
    rows.iter()
        .find(|r| r.protocol == protocol && r.mu == mu && r.sweep_value == x)
        .map(|r| r.mean_throughput)
        .unwrap()
}

fn power_trends() -> Outcome {
    let spec = sweep_spec(
        SweepKind::Power,
        DEFAULT_POWERS.to_vec(),
        DEFAULT_MUS.to_vec(),
        base_config(),
    );
    let rows = run_power_sweep(&spec).map_err(|e| e.to_string())?;
    for protocol in [Protocol::Ec, Protocol::Dc] {
        for mu in DEFAULT_MUS {
            let c = curve(&rows, protocol, mu);
            check(c.len() == DEFAULT_POWERS.len(), "missing sweep rows")?;
            for w in c.windows(2) {
                check(
                    w[1].mean_throughput > w[0].mean_throughput,
                    format!(
                        "{protocol} mu={mu}: not increasing between {} and {} W",
                        w[0].sweep_value, w[1].sweep_value
                    ),
                )?;
            }
        }
        for p in DEFAULT_POWERS {
            let (lo, mid, hi) = (
                mean_at(&rows, protocol, 0.35, p),
                mean_at(&rows, protocol, 0.5, p),
                mean_at(&rows, protocol, 0.8, p),
            );
            check(
                hi <= mid && mid <= lo,
                format!("{protocol} at {p} W: mu ordering {lo} {mid} {hi}"),
            )?;
        }
    }
    let (ec_low, dc_low) = (
        mean_at(&rows, Protocol::Ec, 0.5, 0.1),
        mean_at(&rows, Protocol::Dc, 0.5, 0.1),
    );
    let (ec_high, dc_high) = (
        mean_at(&rows, Protocol::Ec, 0.5, 5.0),
        mean_at(&rows, Protocol::Dc, 0.5, 5.0),
    );
    check(dc_low > ec_low, format!("0.1 W: DC {dc_low} <= EC {ec_low}"))?;
    check(ec_high > dc_high, format!("5 W: EC {ec_high} <= DC {dc_high}"))?;
    Ok(format!(
        "0.1 W: DC {dc_low:.3} > EC {ec_low:.3}; 5 W: EC {ec_high:.3} > DC {dc_high:.3}"
    ))
}

fn distance_trends() -> Outcome {
    let distances: Vec<f64> = (1..=9).map(f64::from).collect();
    let mut summary = Vec::new();
    for (p_avg, winner) in [(2.0, Protocol::Ec), (0.4, Protocol::Dc)] {
        let base = NetworkConfig::default().with_average_power(p_avg, 0.5).unwrap();
        let spec = sweep_spec(SweepKind::Distance, distances.clone(), vec![0.5], base);
        let rows = run_distance_sweep(&spec).map_err(|e| e.to_string())?;
        for protocol in [Protocol::Ec, Protocol::Dc] {
            let c = curve(&rows, protocol, 0.5);
            check(c.len() == distances.len(), "missing sweep rows")?;
            for w in c.windows(2) {
                let slack = w[0].std_error.max(w[1].std_error);
                check(
                    w[1].mean_throughput <= w[0].mean_throughput + slack,
                    format!(
                        "{protocol} at {p_avg} W: increases from {} to {} m",
                        w[0].sweep_value, w[1].sweep_value
                    ),
                )?;
            }
        }
        let ec = mean_at(&rows, Protocol::Ec, 0.5, 5.0);
        let dc = mean_at(&rows, Protocol::Dc, 0.5, 5.0);
        let ok = match winner {
            Protocol::Ec => ec > dc,
            Protocol::Dc => dc > ec,
        };
        check(ok, format!("{p_avg} W at 5 m: EC {ec} DC {dc}, expected {winner} ahead"))?;
        summary.push(format!("{p_avg} W at 5 m: EC {ec:.3} DC {dc:.3}"));
    }
    Ok(summary.join("; "))
}

fn csv_bytes(spec: &SweepSpec, workers: usize) -> Vec<u8> {
    let rows = with_workers(workers, || run_power_sweep(spec)).unwrap();
    let mut out = Vec::new();
    write_csv_to(&rows, &mut out).unwrap();
    out
}

fn determinism() -> Outcome {
    let spec = SweepSpec {
        n_realizations: 500,
        ..sweep_spec(
            SweepKind::Power,
            DEFAULT_POWERS.to_vec(),
            DEFAULT_MUS.to_vec(),
            base_config(),
        )
    };
    let one = csv_bytes(&spec, 1);
    let four = csv_bytes(&spec, 4);
    check(one == four, "CSV differs between 1 and 4 workers")?;
    check(one == csv_bytes(&spec, 3), "CSV differs between 1 and 3 workers")?;
    Ok(format!("{} identical bytes across 1, 3 and 4 workers", one.len()))
}

fn unit_properties() -> Outcome {
    // Root of the time-split equation.
    check(solve_z(0.0).unwrap() == 1.0, "z(0) != 1")?;
    let e = std::f64::consts::E;
    check((solve_z(1.0).unwrap() - e).abs() <= 1e-12 * e, "z(1) != e")?;
    let z10 = solve_z(10.0).unwrap();
    check(z10 > 8.1 && z10 < 8.2, format!("z(10) = {z10}"))?;
    let mut prev = 1.0;
    for k in 0..=140 {
        let z = solve_z(10f64.powf(-6.0 + 0.1 * k as f64)).unwrap();
        check(z >= prev, "z not monotone")?;
        prev = z;
    }

    // Relay path below both hops.
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    for _ in 0..10_000 {
        let (sr, ra) = (log_uniform(&mut rng, 1e-6, 1e6), log_uniform(&mut rng, 1e-6, 1e6));
        check(relay_path_snr(sr, ra) <= sr.min(ra), format!("sra > min at {sr}, {ra}"))?;
    }

    // Solver outputs feasible; nothing delivered without harvesting.
    for mu in [0.2, 0.35, 0.5, 0.8, 1.0] {
        let cfg = NetworkConfig::default().with_average_power(1.0, mu).unwrap();
        for b in 0..50 {
            let ch = sample_realization(&cfg, SEED, b).unwrap();
            let ec = optimize_ec(&cfg, &ch).unwrap();
            let dc = optimize_dc(&cfg, &ch).unwrap();
            check(ec_feasible(&cfg, &ec.alloc).is_ok(), format!("EC infeasible mu={mu} b={b}"))?;
            check(dc_feasible(&cfg, &dc.alloc).is_ok(), format!("DC infeasible mu={mu} b={b}"))?;
            let ec0 = EcAllocation {
                tau1: 0.0,
                tau2: 1.0,
                ..ec.alloc
            };
            let dc0 = DcAllocation {
                tau1: 0.0,
                tau2: 1.0,
                ..dc.alloc
            };
            check(ec_throughput(&cfg, &ch, &ec0).unwrap() == 0.0, "EC nonzero at tau1 = 0")?;
            check(dc_throughput(&cfg, &ch, &dc0).unwrap() == 0.0, "DC nonzero at tau1 = 0")?;
        }
    }

    // Inner cases meet at tau1 = 2 mu - 1.
    for mu in [0.55, 0.75, 0.9] {
        let cfg = NetworkConfig::default().with_average_power(1.0, mu).unwrap();
        let tau1 = 2.0 * mu - 1.0;
        for b in 0..20 {
            let ch = sample_realization(&cfg, SEED, b).unwrap();
            let v1 = dc_inner_case1(&cfg, &ch, tau1).unwrap().objective;
            let v2 = dc_inner_case2(&cfg, &ch, tau1).unwrap().objective;
            check((v1 - v2).abs() <= 1e-9, format!("mu={mu} b={b}: {v1} vs {v2}"))?;
        }
    }
    Ok("z examples and monotonicity, 10^4 relay-path tuples, feasibility, zero downlink, case continuity".into())
}

fn main() -> ExitCode {
    let total = Instant::now();
    let mut failures = 0;
    let mut report = |id: u32, name: &str, limit: Option<Duration>, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limit) {
            if elapsed > limit {
                outcome = Err(format!("took {elapsed:.1?}, limit {limit:?}"));
            }
        }
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failures += outcome.is_err() as usize;
        println!("[{tag}] {id}. {name} ({:.1} s): {detail}", elapsed.as_secs_f64());
    };

    report(1, "E-C solver vs grid oracle", Some(Duration::from_secs(60)), &mut ec_oracle);
    report(2, "D-C solver vs grid oracle", Some(Duration::from_secs(30 * 60)), &mut dc_oracle);
    report(3, "E-C peak power and capped time split", None, &mut ec_structure);
    report(4, "D-C relay-split candidate set", None, &mut relay_split_candidates);
    report(5, "D-C downlink beyond mu never helps", None, &mut saturated_never_better);
    report(6, "throughput vs average power trends", Some(Duration::from_secs(600)), &mut power_trends);
    report(7, "throughput vs relay distance trends", Some(Duration::from_secs(600)), &mut distance_trends);
    report(8, "sweep CSV independent of worker count", None, &mut determinism);
    report(9, "unit and property checks", None, &mut unit_properties);

    println!(
        "acceptance: {} passed, {failures} failed in {:.1} s",
        9 - failures,
        total.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
