//! Seeded Monte Carlo sweeps over average power or relay position.
//!
//! Realization `i` always uses the fading drawn from `(seed, i)`, whatever
//! the protocol, `mu` or sweep value; geometry only rescales that fading by
//! the path-loss means. Curves are therefore paired-sample comparisons.
//! Realizations run on the current rayon pool and are reduced in index
//! order, so the output does not depend on the number of workers.

use std::cmp::Ordering;
use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{NetworkConfig, UnitFading};
use crate::error::{Error, Result};
use crate::solver_dc::optimize_dc;
use crate::solver_ec::optimize_ec;

pub const CSV_HEADER: [&str; 7] = [
    "sweep_value",
    "mu",
    "protocol",
    "mean_throughput",
    "std_error",
    "n",
    "seed",
];

/// Average powers (W) swept by default.
pub const DEFAULT_POWERS: [f64; 10] = [0.05, 0.1, 0.2, 0.4, 0.8, 1.2, 1.6, 2.0, 3.0, 5.0];
/// Average-to-peak ratios swept by default.
pub const DEFAULT_MUS: [f64; 3] = [0.35, 0.5, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Protocol {
    Ec,
    Dc,
}

impl Protocol {
    pub const ALL: [Protocol; 2] = [Protocol::Ec, Protocol::Dc];

    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::Ec => "EC",
            Protocol::Dc => "DC",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "EC" | "E-C" => Ok(Protocol::Ec),
            "DC" | "D-C" => Ok(Protocol::Dc),
            _ => Err(format!("unknown protocol {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Sweep values are the common average power of AP and relay (W).
    Power,
    /// Sweep values are the source-relay distance (m).
    Distance,
}

/// Description of one sweep.
///
/// For power sweeps the peaks follow each point as `p_avg / mu`. For
/// distance sweeps the average powers of `base` (`mu * p_max`) stay fixed
/// and the peaks again follow `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub sweep_values: Vec<f64>,
    pub mu_values: Vec<f64>,
    pub base: NetworkConfig,
    pub n_realizations: usize,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSweep(msg));
        if self.n_realizations == 0 {
            return bad("need at least one realization".into());
        }
        if self.sweep_values.is_empty() {
            return bad("no sweep values".into());
        }
        if self.sweep_values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return bad("sweep values must be positive and finite".into());
        }
        if self.sweep_values.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sweep values must be strictly increasing".into());
        }
        if self.mu_values.is_empty() {
            return bad("no mu values".into());
        }
        if let Some(mu) = self.mu_values.iter().find(|m| !(**m > 0.0 && **m <= 1.0)) {
            return bad(format!("mu must lie in (0, 1], got {mu}"));
        }
        self.base.validate()
    }

    /// Network configuration at one sweep point.
    pub fn config_at(&self, sweep_value: f64, mu: f64) -> Result<NetworkConfig> {
        let cfg = match self.kind {
            SweepKind::Power => self.base.with_average_power(sweep_value, mu)?,
            SweepKind::Distance => {
                if !(sweep_value > 0.0 && sweep_value < self.base.d_as) {
                    return Err(Error::domain("d_sr", sweep_value));
                }
                NetworkConfig {
                    d_sr: sweep_value,
                    mu,
                    p_a_max: self.base.p_a_avg() / mu,
                    p_r_max: self.base.p_r_avg() / mu,
                    ..self.base
                }
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One CSV record: Monte Carlo mean of the optimized throughput.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub mu: f64,
    pub protocol: Protocol,
    pub mean_throughput: f64,
    /// Sample standard deviation over `sqrt(n)`.
    pub std_error: f64,
    pub n: usize,
    pub seed: u64,
}

fn row_order(a: &SweepRow, b: &SweepRow) -> Ordering {
    a.protocol
        .cmp(&b.protocol)
        .then(a.mu.total_cmp(&b.mu))
        .then(a.sweep_value.total_cmp(&b.sweep_value))
}

/// Mean and standard error, accumulated in slice order.
fn mean_and_std_error(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs a sweep of either kind on the current rayon pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let points: Vec<(f64, f64, NetworkConfig)> = spec
        .sweep_values
        .iter()
        .flat_map(|&v| spec.mu_values.iter().map(move |&mu| (v, mu)))
        .map(|(v, mu)| spec.config_at(v, mu).map(|cfg| (v, mu, cfg)))
        .collect::<Result<_>>()?;

    // per_block[i][2 * p + k]: protocol k at point p for realization i.
    let per_block: Vec<Vec<f64>> = (0..spec.n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let fading = UnitFading::sample(spec.seed, i, spec.base.reciprocal_channels);
            let mut out = Vec::with_capacity(2 * points.len());
            for (_, _, cfg) in &points {
                let ch = fading.realize(cfg)?;
                out.push(optimize_ec(cfg, &ch)?.throughput);
                out.push(optimize_dc(cfg, &ch)?.throughput);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(2 * points.len());
    let mut samples = vec![0.0; spec.n_realizations];
    for (p, &(sweep_value, mu, _)) in points.iter().enumerate() {
        for (k, protocol) in Protocol::ALL.into_iter().enumerate() {
            for (s, block) in samples.iter_mut().zip(&per_block) {
                *s = block[2 * p + k];
            }
            let (mean_throughput, std_error) = mean_and_std_error(&samples);
            rows.push(SweepRow {
                sweep_value,
                mu,
                protocol,
                mean_throughput,
                std_error,
                n: spec.n_realizations,
                seed: spec.seed,
            });
        }
    }
    rows.sort_by(row_order);
    Ok(rows)
}

/// Average throughput versus the common average power of AP and relay.
pub fn run_power_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.kind != SweepKind::Power {
        return Err(Error::InvalidSweep("expected a power sweep".into()));
    }
    run_sweep(spec)
}

/// Average throughput versus source-relay distance.
pub fn run_distance_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.kind != SweepKind::Distance {
        return Err(Error::InvalidSweep("expected a distance sweep".into()));
    }
    run_sweep(spec)
}

/// Runs `f` on a dedicated pool with `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `rows` as CSV, sorted by protocol, then `mu`, then sweep value.
pub fn write_csv_to<W: io::Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut sorted = rows.to_vec();
    sorted.sort_by(row_order);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &sorted {
        w.write_record([
            fmt_f64(r.sweep_value),
            fmt_f64(r.mu),
            r.protocol.to_string(),
            fmt_f64(r.mean_throughput),
            fmt_f64(r.std_error),
            r.n.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv_to(rows, io::BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let parse_err = |msg: String| Error::Parse {
        path: path.to_path_buf(),
        msg,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    if rdr.headers().map_err(csv_err)? != CSV_HEADER.as_slice() {
        return Err(parse_err("unexpected header".into()));
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let rec = record.map_err(csv_err)?;
        let field = |i: usize| rec.get(i).unwrap_or_default();
        let float = |i: usize| {
            field(i)
                .parse::<f64>()
                .map_err(|e| parse_err(format!("{}: {e}", CSV_HEADER[i])))
        };
        let int = |i: usize| {
            field(i)
                .parse::<u64>()
                .map_err(|e| parse_err(format!("{}: {e}", CSV_HEADER[i])))
        };
        rows.push(SweepRow {
            sweep_value: float(0)?,
            mu: float(1)?,
            protocol: field(2).parse().map_err(parse_err)?,
            mean_throughput: float(3)?,
            std_error: float(4)?,
            n: int(5)? as usize,
            seed: int(6)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_realization;
    use proptest::prelude::*;

    fn power_spec(n: usize) -> SweepSpec {
        SweepSpec {
            kind: SweepKind::Power,
            sweep_values: vec![0.1, 1.0],
            mu_values: vec![0.5],
            base: NetworkConfig::default(),
            n_realizations: n,
            seed: 3,
        }
    }

    #[test]
    fn single_realization_equals_solvers() {
        let rows = run_power_sweep(&power_spec(1)).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            let cfg = NetworkConfig::default().with_average_power(r.sweep_value, r.mu).unwrap();
            let ch = sample_realization(&cfg, 3, 0).unwrap();
            let want = match r.protocol {
                Protocol::Ec => optimize_ec(&cfg, &ch).unwrap().throughput,
                Protocol::Dc => optimize_dc(&cfg, &ch).unwrap().throughput,
            };
            assert_eq!(r.mean_throughput, want);
            assert_eq!(r.std_error, 0.0);
        }
    }

    #[test]
    fn rows_sorted() {
        let rows = run_power_sweep(&power_spec(2)).unwrap();
        let keys: Vec<_> = rows.iter().map(|r| (r.protocol, r.sweep_value)).collect();
        assert_eq!(
            keys,
            vec![
                (Protocol::Ec, 0.1),
                (Protocol::Ec, 1.0),
                (Protocol::Dc, 0.1),
                (Protocol::Dc, 1.0)
            ]
        );
    }

    #[test]
    fn spec_validation() {
        let mut s = power_spec(1);
        s.sweep_values = vec![1.0, 0.5];
        assert!(matches!(run_sweep(&s), Err(Error::InvalidSweep(_))));
        let mut s = power_spec(0);
        assert!(run_sweep(&s).is_err());
        s.n_realizations = 1;
        s.mu_values = vec![0.0];
        assert!(run_sweep(&s).is_err());
        assert!(run_distance_sweep(&power_spec(1)).is_err());

        let far = SweepSpec {
            kind: SweepKind::Distance,
            sweep_values: vec![5.0, 10.0],
            ..power_spec(1)
        };
        assert!(matches!(run_distance_sweep(&far), Err(Error::Domain { .. })));
    }

    #[test]
    fn distance_sweep_holds_average_power() {
        let spec = SweepSpec {
            kind: SweepKind::Distance,
            sweep_values: vec![2.0, 8.0],
            mu_values: vec![0.25],
            base: NetworkConfig::default().with_average_power(0.4, 0.5).unwrap(),
            n_realizations: 1,
            seed: 0,
        };
        let cfg = spec.config_at(2.0, 0.25).unwrap();
        assert!((cfg.p_a_avg() - 0.4).abs() < 1e-15);
        assert_eq!(cfg.p_a_max, 1.6);
        assert_eq!(cfg.d_sr, 2.0);
    }

    #[test]
    fn std_error_formula() {
        let (m, se) = mean_and_std_error(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((se - sd / 2.0).abs() < 1e-15);
    }

    #[test]
    fn empty_rows_write_header_only() {
        let mut buf = Vec::new();
        write_csv_to(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "sweep_value,mu,protocol,mean_throughput,std_error,n,seed\n"
        );
    }

    #[test]
    fn seventeen_significant_digits() {
        let row = SweepRow {
            sweep_value: 0.1,
            mu: 0.5,
            protocol: Protocol::Dc,
            mean_throughput: 1.0 / 3.0,
            std_error: 0.0,
            n: 5000,
            seed: 7,
        };
        let mut buf = Vec::new();
        write_csv_to(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert_eq!(
            line,
            "1.0000000000000001e-1,5.0000000000000000e-1,DC,3.3333333333333331e-1,0.0000000000000000e0,5000,7"
        );
    }

    #[test]
    fn io_errors_carry_path() {
        let err = write_csv(&[], "/nonexistent-dir/out.csv").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
    }

    fn row() -> impl Strategy<Value = SweepRow> {
        (
            (1e-3f64..10.0),
            (0.01f64..=1.0),
            prop_oneof![Just(Protocol::Ec), Just(Protocol::Dc)],
            (0.0f64..20.0),
            (0.0f64..1.0),
            1usize..100_000,
            any::<u64>(),
        )
            .prop_map(|(sweep_value, mu, protocol, mean_throughput, std_error, n, seed)| SweepRow {
                sweep_value,
                mu,
                protocol,
                mean_throughput,
                std_error,
                n,
                seed,
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn csv_round_trip(mut rows in proptest::collection::vec(row(), 0..20)) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("rows.csv");
            write_csv(&rows, &path).unwrap();
            rows.sort_by(row_order);
            prop_assert_eq!(read_csv(&path).unwrap(), rows);
        }
    }
}
