//! Norm sweeps over (generator, function, eps) with the per-row certificate check.

use std::io::{Read, Write};

use hinfcalc::calculus::construct_ga;
use hinfcalc::funcspec::sup_norm;
use hinfcalc::linops::{matrix_exponential, operator_norm};
use hinfcalc::{CMat, CertificateEngine, FrequencyGrid};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{family_of, ExperimentConfig};
use crate::CliError;

/// Slack allowed on the certificate bound.
pub const CERTIFICATE_SLACK: f64 = 1.01;

pub const SWEEP_CSV_HEADER: [&str; 11] = [
    "family",
    "n",
    "g_id",
    "eps",
    "norm",
    "sup_norm",
    "log_ratio",
    "sqrtlog_ratio",
    "certificate",
    "kappa",
    "kappa_star",
];

/// One row: `norm = ‖g(A)e^{Aε}‖`, ratios against `(1 + |log ε|)` and
/// `(1 + |log ε|^{1/2})`, and `certificate = 2κ(ε)κ*(ε)`, which bounds
/// `‖g(A)e^{2Aε}‖ / ‖g‖∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub family: String,
    pub n: usize,
    pub g_id: String,
    pub eps: f64,
    pub norm: f64,
    pub sup_norm: f64,
    pub log_ratio: f64,
    pub sqrtlog_ratio: f64,
    pub certificate: f64,
    pub kappa: f64,
    pub kappa_star: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    /// `‖g(A)e^{2Aε}‖` per row, the quantity the certificate bounds.
    pub doubled_norms: Vec<f64>,
    /// Rows where the certificate bound fails.
    pub breaches: Vec<String>,
    pub warnings: Vec<String>,
}

impl SweepOutcome {
    pub fn passed(&self) -> bool {
        self.breaches.is_empty()
    }
}

pub fn log_ratio(norm: f64, sup: f64, eps: f64) -> f64 {
    norm / (sup * (1.0 + eps.ln().abs()))
}

pub fn sqrtlog_ratio(norm: f64, sup: f64, eps: f64) -> f64 {
    norm / (sup * (1.0 + eps.ln().abs().sqrt()))
}

struct EpsEntry {
    kappa: f64,
    kappa_star: f64,
    semigroup: CMat,
    doubled: CMat,
}

struct Block {
    records: Vec<SweepRecord>,
    doubled: Vec<f64>,
    breaches: Vec<String>,
    warnings: Vec<String>,
}

/// Full factorial sweep. Rows come out in (generator, function, eps) order
/// regardless of scheduling.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutcome, CliError> {
    cfg.validate()?;
    let generators = cfg.generators()?;
    let functions = cfg.functions()?;
    if cfg.eps.is_empty() {
        return Ok(SweepOutcome::default());
    }
    let freq = FrequencyGrid::default();
    let sups: Vec<f64> = functions.iter().map(|(_, g)| sup_norm(g, &freq).value).collect();

    // Per generator and eps: κ(ε), κ*(ε), e^{Aε}, e^{2Aε}.
    let tables: Vec<Vec<EpsEntry>> = generators
        .par_iter()
        .map(|a| {
            let engine = CertificateEngine::new(a)?;
            cfg.eps
                .iter()
                .map(|&e| {
                    Ok(EpsEntry {
                        kappa: engine.kappa(e)?,
                        kappa_star: engine.kappa_star(e)?,
                        semigroup: matrix_exponential(a, e)?,
                        doubled: matrix_exponential(a, 2.0 * e)?,
                    })
                })
                .collect::<hinfcalc::Result<Vec<_>>>()
        })
        .collect::<hinfcalc::Result<_>>()?;

    let pairs: Vec<(usize, usize)> = (0..generators.len())
        .flat_map(|i| (0..functions.len()).map(move |j| (i, j)))
        .collect();
    let blocks = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<Block, CliError> {
            let a = &generators[i];
            let (g_id, g) = &functions[j];
            let grid = cfg.grid_for(a)?;
            let calc = construct_ga(a, g, &grid)?;
            let mut block = Block {
                records: Vec::with_capacity(cfg.eps.len()),
                doubled: Vec::with_capacity(cfg.eps.len()),
                breaches: Vec::new(),
                warnings: calc
                    .warnings
                    .iter()
                    .map(|w| format!("{} {g_id}: {w}", a.label()))
                    .collect(),
            };
            let sup = sups[j];
            for (&eps, entry) in cfg.eps.iter().zip(&tables[i]) {
                let (kappa, kappa_star) = (entry.kappa, entry.kappa_star);
                let norm = operator_norm(&(&calc.ga * &entry.semigroup))?;
                let doubled = operator_norm(&(&calc.ga * &entry.doubled))?;
                let certificate = 2.0 * kappa * kappa_star;
                if doubled > sup * certificate * CERTIFICATE_SLACK {
                    block.breaches.push(format!(
                        "{} {g_id} eps={eps:e}: ‖g(A)e^(2Aε)‖ = {doubled:e} exceeds {sup:e} × {certificate:e}",
                        a.label()
                    ));
                }
                block.records.push(SweepRecord {
                    family: family_of(a),
                    n: a.dim(),
                    g_id: g_id.clone(),
                    eps,
                    norm,
                    sup_norm: sup,
                    log_ratio: log_ratio(norm, sup, eps),
                    sqrtlog_ratio: sqrtlog_ratio(norm, sup, eps),
                    certificate,
                    kappa,
                    kappa_star,
                });
                block.doubled.push(doubled);
            }
            Ok(block)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = SweepOutcome::default();
    for b in blocks {
        out.records.extend(b.records);
        out.doubled_norms.extend(b.doubled);
        out.breaches.extend(b.breaches);
        out.warnings.extend(b.warnings);
    }
    Ok(out)
}

pub fn write_csv(records: &[SweepRecord], out: impl Write) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(SWEEP_CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(records: &[SweepRecord]) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    String::from_utf8(buf).map_err(|e| CliError::Invalid(e.to_string()))
}

pub fn read_csv(input: impl Read) -> Result<Vec<SweepRecord>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != SWEEP_CSV_HEADER {
        return Err(CliError::Invalid(format!("unexpected sweep CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(CliError::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(generators: &[&str], functions: &[&str], eps: Vec<f64>) -> ExperimentConfig {
        ExperimentConfig {
            generators: generators.iter().map(|s| s.to_string()).collect(),
            functions: functions.iter().map(|s| s.to_string()).collect(),
            eps,
            n_samples: Some(1 << 12),
            ..Default::default()
        }
    }

    #[test]
    fn empty_eps_gives_header_only() {
        let out = run_sweep(&cfg(&["diag:-1"], &["one"], vec![])).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(csv_string(&out.records).unwrap(), SWEEP_CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn scalar_certificate_column() {
        let eps = vec![1e-4, 1e-2, 0.1];
        let out = run_sweep(&cfg(&["diag:-1"], &["one", "cayley"], eps.clone())).unwrap();
        assert!(out.passed(), "{:?}", out.breaches);
        assert_eq!(out.records.len(), 6);
        for r in &out.records {
            assert!((r.certificate - (-2.0 * r.eps).exp()).abs() <= 1e-6);
            assert_eq!((r.family.as_str(), r.n), ("diag", 1));
        }
        let one = &out.records[0];
        assert!((one.norm - (-1e-4f64).exp()).abs() <= 1e-3);
        assert!((one.log_ratio - one.norm / (1.0 + (1e-4f64).ln().abs())).abs() < 1e-15);
    }

    #[test]
    fn self_adjoint_rows_are_bounded() {
        let out = run_sweep(&cfg(&["laplacian:6"], &["blaschke5", "cayley"], vec![1e-5, 1e-3, 0.1])).unwrap();
        assert!(out.passed());
        for r in &out.records {
            assert!(r.norm <= r.sup_norm * (1.0 + 1e-3), "{r:?}");
        }
    }

    #[test]
    fn csv_round_trip_and_quoting() {
        let out = run_sweep(&cfg(&["diag:-1,-2"], &["blaschke(-1,2)"], vec![1e-3])).unwrap();
        let text = csv_string(&out.records).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_CSV_HEADER.join(","));
        assert!(lines.next().unwrap().starts_with("diag,2,\"blaschke(-1,2)\",0.001,"));
        assert_eq!(read_csv(text.as_bytes()).unwrap(), out.records);
    }

    #[test]
    fn sweep_is_deterministic() {
        let c = cfg(&["jordan:4", "random:3"], &["cayley", "blaschke5"], vec![1e-4, 0.05]);
        let a = csv_string(&run_sweep(&c).unwrap().records).unwrap();
        let b = csv_string(&run_sweep(&c).unwrap().records).unwrap();
        assert_eq!(a, b);
    }
}
