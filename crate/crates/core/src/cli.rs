//! Command-line front end. Every subcommand produces one report carrying the
//! subcommand, its configuration, the seed, the crate version and a
//! pass flag. Exit codes: 0 pass, 1 check failure, 2 usage or input error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::norm_laws::{
    is_generalized_diagonal, preserves_pnorm_formal_even, preserves_pnorm_numeric, island_scan_with, IslandScan,
    NumericCheck,
};
use crate::numerics::{Complex, Matrix};
use crate::postbqp::{
    decide_via_bqp_p, or_solve_gate_g, postbqp_decide, postselection_gadget, BooleanFunction, DecisionMode, Verdict,
};
use crate::protocols::{
    build_discrimination_setup, discrimination_bound_check, discrimination_distribution, discrimination_monte_carlo,
    leak_weight, option_i_monte_carlo, signalling_multistate_ii, signalling_option_i, signalling_option_ii,
    SignallingReport,
};
use crate::sqrt::{embed_sqrt, kth_root_scan, Field};
use crate::state::{measure_distribution, run_circuit, sample_many, Circuit, MeasurementRule, StateVector};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("invalid input {path}: {message}")]
    Input { path: PathBuf, message: String },
}

fn usage(e: impl Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "qvariant", version, about = "Variant quantum theories: simulation and verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args, Serialize)]
struct Common {
    /// Exponent of the measurement rule or norm.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample, trial or matrix count, depending on the subcommand.
    #[arg(long)]
    trials: Option<usize>,
    /// Acceptance tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    #[serde(skip)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a circuit file and report the final state and distribution.
    Simulate {
        #[arg(long)]
        circuit: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Test whether a matrix preserves the p-norm.
    CheckNorm {
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether a truth table has fewer than half ones, by postselection.
    Postbqp {
        #[arg(long)]
        truth_table: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[command(flatten)]
        common: Common,
    },
    /// Decide satisfiability of a truth table with the squaring gate.
    OrSolve {
        #[arg(long)]
        truth_table: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Weight amplification of the p-norm postselection gadget.
    Gadget {
        /// Number of ancilla qubits.
        #[arg(long, default_value_t = 8)]
        ancillas: usize,
        /// Also decide this truth table without postselection.
        #[arg(long)]
        truth_table: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Error of the d-state discrimination measurement.
    Discriminate {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Signalling through an EPR pair.
    Signal {
        #[arg(long, value_enum, default_value_t = Scenario::OptionIi)]
        scenario: Scenario,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, default_value_t = 125)]
        pairs: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Square or k-th root of a unitary or orthogonal matrix.
    Sqrt {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, value_enum, default_value_t = FieldArg::Real)]
        field: FieldArg,
        /// Root `diag(U, det U)` one dimension up instead of `U`.
        #[arg(long)]
        embed: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Search random matrices for non-generalized-diagonal p-norm preservers.
    IslandScan {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Scenario {
    OptionI,
    OptionIi,
    Multistate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FieldArg {
    Real,
    Complex,
}

/// The document every subcommand emits.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub subcommand: String,
    pub version: &'static str,
    pub seed: u64,
    pub config: BTreeMap<String, Value>,
    pub pass: bool,
    pub result: Value,
    #[serde(skip)]
    table: Option<Table>,
}

/// Rows for CSV output; reports without one are flattened to `field,value`.
#[derive(Debug)]
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.table {
            Some(t) => {
                w.write_record(&t.header).expect("in-memory write");
                for row in &t.rows {
                    w.write_record(row).expect("in-memory write");
                }
            }
            None => {
                w.write_record(["field", "value"]).expect("in-memory write");
                let mut rows = Vec::new();
                flatten("", &serde_json::to_value(self).expect("reports serialize"), &mut rows);
                for row in rows {
                    w.write_record(&row).expect("in-memory write");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<[String; 2]>) {
    let join = |key: &str| if prefix.is_empty() { key.to_string() } else { format!("{prefix}.{key}") };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        Value::String(s) => out.push([prefix.to_string(), s.clone()]),
        other => out.push([prefix.to_string(), other.to_string()]),
    }
}

/// Output of one invocation, before it is written anywhere.
#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub output: String,
    pub out_path: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn execute<I, T>(args: I) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    use clap::error::ErrorKind;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Ok(Outcome { exit_code: EXIT_PASS, output: e.render().to_string(), out_path: None });
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string())),
    };
    let (report, common) = dispatch(cli.command)?;
    let output = match common.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    Ok(Outcome {
        exit_code: if report.pass { EXIT_PASS } else { EXIT_FAIL },
        output,
        out_path: common.out,
    })
}

/// Runs `args`, writes the report and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let outcome = match execute(args) {
        Ok(o) => o,
        Err(CliError::Usage(msg)) => {
            eprint!("{msg}");
            return EXIT_USAGE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match &outcome.out_path {
        Some(path) => {
            if let Err(source) = std::fs::write(path, &outcome.output) {
                eprintln!("error: {}", CliError::Write { path: path.clone(), source });
                return EXIT_USAGE;
            }
        }
        None => print!("{}", outcome.output),
    }
    outcome.exit_code
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn input_error(path: &Path, e: impl Display) -> CliError {
    CliError::Input { path: path.to_path_buf(), message: e.to_string() }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

/// A JSON array of rows; entries are numbers or `[re, im]` pairs.
pub fn load_matrix(path: &Path) -> Result<Matrix, CliError> {
    let rows: Vec<Vec<Entry>> = serde_json::from_str(&read(path)?).map_err(|e| input_error(path, e))?;
    let rows = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|e| match e {
                    Entry::Real(x) => Complex::new(x, 0.0),
                    Entry::Complex([re, im]) => Complex::new(re, im),
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(rows).map_err(|e| input_error(path, e))
}

fn load_table(path: &Path) -> Result<BooleanFunction, CliError> {
    read(path)?.parse().map_err(|e| input_error(path, e))
}

fn config(pairs: &[(&str, Value)], common: &Common, p: Option<f64>) -> BTreeMap<String, Value> {
    let mut map: BTreeMap<String, Value> = pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    if let Value::Object(c) = serde_json::to_value(common).expect("config serializes") {
        map.extend(c.into_iter().filter(|(_, v)| !v.is_null()));
    }
    if let Some(p) = p {
        map.insert("p".into(), json!(p));
    }
    map
}

fn path_value(path: &Path) -> Value {
    json!(path.display().to_string())
}

fn dispatch(command: Command) -> Result<(RunReport, Common), CliError> {
    let version = env!("CARGO_PKG_VERSION");
    let (name, config, pass, result, table, common) = match command {
        Command::Simulate { circuit, common } => {
            let p = common.p.unwrap_or(2.0);
            let c = Circuit::from_json(&read(&circuit)?).map_err(|e| input_error(&circuit, e))?;
            let rule = MeasurementRule::new(p).map_err(usage)?;
            let state = run_circuit(&c, &StateVector::zero_state(c.num_qubits())).map_err(usage)?;
            let distribution = measure_distribution(&state, &rule);
            let mut result = json!({ "state": state, "distribution": distribution });
            if let Some(trials) = common.trials {
                let mut counts = vec![0u64; distribution.len()];
                for k in sample_many(&state, &rule, common.seed, trials) {
                    counts[k] += 1;
                }
                result["counts"] = json!(counts);
            }
            let width = c.num_qubits();
            let rows = distribution
                .iter()
                .enumerate()
                .map(|(k, w)| {
                    let a = state.amplitude(k);
                    vec![format!("{k:0width$b}"), a.re.to_string(), a.im.to_string(), w.to_string()]
                })
                .collect();
            let table = Table { header: vec!["basis", "re", "im", "probability"], rows };
            let cfg = config(&[("circuit", path_value(&circuit))], &common, Some(p));
            ("simulate", cfg, true, result, Some(table), common)
        }
        Command::CheckNorm { matrix, common } => {
            let p = common.p.unwrap_or(4.0);
            let a = load_matrix(&matrix)?;
            let check = NumericCheck {
                trials: common.trials.unwrap_or(64),
                seed: common.seed,
                tol: common.tol.unwrap_or(1e-10),
                ..NumericCheck::default()
            };
            let numeric = preserves_pnorm_numeric(&a, p, &check).map_err(usage)?;
            let shape = is_generalized_diagonal(&a, check.tol).map_err(usage)?;
            let mut result = json!({ "numeric": numeric, "generalized_diagonal": shape });
            let even = p.fract() == 0.0 && (2.0..=8.0).contains(&p) && (p as u32) % 2 == 0;
            if even && a.rows() <= 6 {
                result["formal"] = json!(preserves_pnorm_formal_even(&a, p as u32).map_err(usage)?);
            }
            let cfg = config(&[("matrix", path_value(&matrix))], &common, Some(p));
            ("check-norm", cfg, numeric.preserves, result, None, common)
        }
        Command::Postbqp { truth_table, mode, common } => {
            let f = load_table(&truth_table)?;
            let decision_mode = match mode {
                ModeArg::Exact => DecisionMode::Exact,
                ModeArg::Sampled => DecisionMode::Sampled { seed: common.seed, trials: common.trials },
            };
            let decision = postbqp_decide(&f, decision_mode).map_err(usage)?;
            let oracle = Verdict::from_count(f.n(), f.ones());
            let result = json!({ "decision": decision, "oracle": oracle, "ones": f.ones(), "n": f.n() });
            let rows = decision
                .per_i_overlaps
                .iter()
                .map(|r| vec![r.i.to_string(), r.overlap.to_string()])
                .collect();
            let table = Table { header: vec!["i", "overlap"], rows };
            let cfg = config(
                &[("truth_table", path_value(&truth_table)), ("mode", json!(mode))],
                &common,
                None,
            );
            ("postbqp", cfg, decision.verdict == oracle, result, Some(table), common)
        }
        Command::OrSolve { truth_table, common } => {
            let f = load_table(&truth_table)?;
            let solve = or_solve_gate_g(&f).map_err(usage)?;
            let tol = common.tol.unwrap_or(1e-9);
            let pass = solve.satisfiable == (f.ones() > 0) && (solve.prob_one - solve.expected_prob_one).abs() <= tol;
            let result = json!({ "solve": solve, "ones": f.ones(), "n": f.n() });
            let cfg = config(&[("truth_table", path_value(&truth_table))], &common, None);
            ("or-solve", cfg, pass, result, None, common)
        }
        Command::Gadget { ancillas, truth_table, common } => {
            let p = common.p.unwrap_or(4.0);
            let tol = common.tol.unwrap_or(1e-12);
            let plus = StateVector::from_real(1, &[1.0, 1.0]).map_err(usage)?;
            let mut rows = Vec::new();
            let mut worst: f64 = 0.0;
            let mut last = None;
            for m in 0..=ancillas {
                let g = postselection_gadget(&plus, 0, p, m).map_err(usage)?;
                let measured = g.measured_factor.unwrap_or(f64::NAN);
                let gap = ((measured - g.expected_factor) / g.expected_factor).abs();
                worst = if gap.is_nan() { f64::INFINITY } else { worst.max(gap) };
                rows.push(vec![m.to_string(), g.expected_factor.to_string(), measured.to_string(), g.marginal[1].to_string()]);
                last = Some(g);
            }
            let g = last.expect("at least one size");
            let mut result = json!({
                "ancillas": ancillas,
                "expected_factor": g.expected_factor,
                "measured_factor": g.measured_factor,
                "other_factor": g.other_factor,
                "favored_marginal": g.marginal[1],
                "max_relative_gap": worst,
            });
            let mut pass = worst <= tol;
            let mut pairs = vec![("ancillas", json!(ancillas))];
            if let Some(path) = &truth_table {
                let f = load_table(path)?;
                let decision = decide_via_bqp_p(&f, p).map_err(usage)?;
                let oracle = Verdict::from_count(f.n(), f.ones());
                pass &= decision.verdict == oracle;
                result["decision"] = json!(decision);
                result["oracle"] = json!(oracle);
                pairs.push(("truth_table", path_value(path)));
            }
            let table = Table { header: vec!["ancillas", "expected_factor", "measured_factor", "favored_marginal"], rows };
            ("gadget", config(&pairs, &common, Some(p)), pass, result, Some(table), common)
        }
        Command::Discriminate { d, common } => {
            let p = common.p.unwrap_or(4.0);
            let setup = build_discrimination_setup(d, p).map_err(usage)?;
            let distribution = discrimination_distribution(&setup, 0).map_err(usage)?;
            let samples = common.trials.unwrap_or(100_000);
            let mc = discrimination_monte_carlo(&setup, 0, samples, common.seed).map_err(usage)?;
            let mut result = json!({
                "error": 1.0 - distribution[0],
                "distribution": distribution,
                "unitarity_residual": setup.unitarity_residual,
                "monte_carlo": mc,
            });
            let mut pass = mc.within_three_sigma;
            if d % 2 == 1 {
                let q = leak_weight(d, p);
                let bound = discrimination_bound_check(d, p).map_err(usage)?;
                pass &= bound.pass;
                result["leak_weight"] = json!(q);
                result["bound_chain"] = json!(bound);
            }
            let rows = distribution.iter().enumerate().map(|(k, w)| vec![k.to_string(), w.to_string()]).collect();
            let table = Table { header: vec!["outcome", "probability"], rows };
            ("discriminate", config(&[("d", json!(d))], &common, Some(p)), pass, result, Some(table), common)
        }
        Command::Signal { scenario, epsilon, d, pairs, common } => {
            let p = common.p.unwrap_or(4.0);
            let mut extra = serde_json::Map::new();
            let (report, pass): (SignallingReport, bool) = match scenario {
                Scenario::OptionIi => {
                    let r = signalling_option_ii(epsilon).map_err(usage)?;
                    let closed = (1.0 - epsilon * epsilon) / (1.0 + epsilon * epsilon);
                    let gap = (r.tvd - closed).abs();
                    extra.insert("closed_form_tvd".into(), json!(closed));
                    extra.insert("closed_form_gap".into(), json!(gap));
                    (r, gap <= common.tol.unwrap_or(1e-12))
                }
                Scenario::Multistate => {
                    let r = signalling_multistate_ii(d, p).map_err(usage)?;
                    let pass = r.bits > 0.0;
                    (r, pass)
                }
                Scenario::OptionI => {
                    let r = signalling_option_i(p, d, pairs).map_err(usage)?;
                    let runs = common.trials.unwrap_or(1000);
                    let rate = option_i_monte_carlo(p, d, pairs, runs, common.seed).map_err(usage)?;
                    extra.insert("monte_carlo_runs".into(), json!(runs));
                    extra.insert("monte_carlo_error_rate".into(), json!(rate));
                    let pass = r.bits > 0.0;
                    (r, pass)
                }
            };
            let mut rows = Vec::new();
            for (action, marginal) in report.actions.iter().zip(&report.bob_marginals) {
                for (k, w) in marginal.iter().enumerate() {
                    rows.push(vec![action.clone(), k.to_string(), w.to_string()]);
                }
            }
            let mut result = json!(report);
            result.as_object_mut().expect("object").extend(extra);
            let mut pairs_cfg = vec![("scenario", json!(scenario))];
            let p_cfg = match scenario {
                Scenario::OptionIi => {
                    pairs_cfg.push(("epsilon", json!(epsilon)));
                    None
                }
                Scenario::Multistate => {
                    pairs_cfg.push(("d", json!(d)));
                    Some(p)
                }
                Scenario::OptionI => {
                    pairs_cfg.extend([("d", json!(d)), ("pairs", json!(pairs))]);
                    Some(p)
                }
            };
            let table = Table { header: vec!["action", "outcome", "probability"], rows };
            ("signal", config(&pairs_cfg, &common, p_cfg), pass, result, Some(table), common)
        }
        Command::Sqrt { matrix, k, field, embed, common } => {
            let u = load_matrix(&matrix)?;
            let result = if embed {
                if k != 2 || field != FieldArg::Real {
                    return Err(CliError::Usage("--embed takes the real square root only".into()));
                }
                embed_sqrt(&u)
            } else {
                let field = match field {
                    FieldArg::Real => Field::Real,
                    FieldArg::Complex => Field::Complex,
                };
                kth_root_scan(&u, k, field)
            }
            .map_err(usage)?;
            let tol = common.tol.unwrap_or(1e-9);
            let pass = result.exists && result.residual <= tol && result.group_residual <= tol;
            let cfg = config(
                &[("matrix", path_value(&matrix)), ("k", json!(k)), ("field", json!(field)), ("embed", json!(embed))],
                &common,
                None,
            );
            ("sqrt", cfg, pass, json!(result), None, common)
        }
        Command::IslandScan { n, common } => {
            let p = common.p.unwrap_or(4.0);
            let num = common.trials.unwrap_or(1000);
            let mut scan = IslandScan::new(num, common.seed);
            if let Some(tol) = common.tol {
                scan.tol = tol;
            }
            let report = island_scan_with(n, p, &scan).map_err(usage)?;
            let cfg = config(&[("n", json!(n))], &common, Some(p));
            ("island-scan", cfg, report.pass, json!(report), None, common)
        }
    };
    let report = RunReport {
        subcommand: name.to_string(),
        version,
        seed: common.seed,
        config,
        pass,
        result,
        table,
    };
    Ok((report, common))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path.display().to_string()
    }

    fn exec(args: &[&str]) -> Result<Outcome, CliError> {
        execute(std::iter::once("qvariant").chain(args.iter().copied()))
    }

    #[test]
    fn hadamard_fails_the_four_norm_with_a_basis_witness() {
        let dir = tempfile::tempdir().unwrap();
        let h = 0.5f64.sqrt();
        let m = write(&dir, "h.json", &format!("[[{h},{h}],[{h},{}]]", -h));
        let out = exec(&["check-norm", "--matrix", &m, "--p", "4"]).unwrap();
        assert_eq!(out.exit_code, EXIT_FAIL);
        let v: Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!(v["pass"], json!(false));
        assert_eq!(v["subcommand"], json!("check-norm"));
        let witness = &v["result"]["numeric"]["witness"];
        assert_eq!(witness.to_string().matches("[1.0,0.0]").count(), 1, "{witness}");
    }

    #[test]
    fn bell_circuit_is_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let c = write(
            &dir,
            "bell.json",
            r#"{"qubits": 2, "steps": [{"gate": "H", "targets": [0]}, {"gate": "CNOT", "targets": [0, 1]}]}"#,
        );
        let args = ["simulate", "--circuit", c.as_str(), "--p", "2", "--trials", "50", "--seed", "9"];
        let a = exec(&args).unwrap();
        assert_eq!(a.exit_code, EXIT_PASS);
        assert_eq!(a.output, exec(&args).unwrap().output);
        let v: Value = serde_json::from_str(&a.output).unwrap();
        let dist: Vec<f64> = serde_json::from_value(v["result"]["distribution"].clone()).unwrap();
        assert!((dist[0] - 0.5).abs() < 1e-12 && (dist[3] - 0.5).abs() < 1e-12);
        assert_eq!(v["seed"], json!(9));
        assert_eq!(v["version"], json!(env!("CARGO_PKG_VERSION")));
    }

    #[test]
    fn usage_errors_are_reported() {
        assert!(matches!(exec(&["teleport"]), Err(CliError::Usage(_))));
        assert!(matches!(exec(&["discriminate", "--bogus"]), Err(CliError::Usage(_))));
        assert!(matches!(exec(&["sqrt", "--matrix", "/nonexistent.json"]), Err(CliError::Read { .. })));
        assert_eq!(run(["qvariant", "signal", "--scenario", "option-i", "--p", "2"]), EXIT_USAGE);
    }

    #[test]
    fn csv_has_a_header() {
        let out = exec(&["discriminate", "--d", "3", "--p", "4", "--trials", "1000", "--format", "csv"]).unwrap();
        let mut lines = out.output.lines();
        assert_eq!(lines.next(), Some("outcome,probability"));
        assert_eq!(lines.count(), 3);
        let out = exec(&["island-scan", "--n", "2", "--trials", "20", "--format", "csv"]).unwrap();
        assert!(out.output.starts_with("field,value\n"));
        assert!(out.output.contains("\nsubcommand,island-scan\n"));
    }
}
