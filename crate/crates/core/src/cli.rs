//! The `dbnet` command-line driver.
//!
//! Each run produces one JSON [`Report`]. Commands that produce a series
//! (`simulate`, `response`) write CSV to stdout and the report to stderr;
//! the others write the report to stdout.
//!
//! State pairs are given by label. Indices inside serialized library
//! structures are 0-based positions in `payload.states`.
//!
//! Exit codes: 0 success, 2 input error, 3 validation failure, 4 numerical
//! failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::balance::{
    check_detailed_balance, check_extended_db, closed_response, open_response,
};
use crate::error::{Error, Result};
use crate::netmodel::{
    check_class_membership, check_compartments, check_ergodic, parse_network, ClassAnnotation,
    Generator, Network, Pair,
};
use crate::numerics::{propagate, steady_state, steady_state_exact, SteadyState};
use crate::pathwise::{check_pdb, response_ratio_test};
use crate::stability::{
    dimension_report, instability_probe_with, nonreciprocal_rank_check, stability_sampling,
    ProbeVerdict, SamplingConfig,
};
use crate::stochastic::{estimate_response_iid, estimate_response_regenerative};
use crate::tol::{TAU_DB, TAU_MARKOV};
use crate::topology::{check_stability_class_shape, cut_class_at, find_cut_vertices, support_graph};

pub const SCHEMA_VERSION: u32 = 1;

/// Grid used when `--times` is omitted.
pub const DEFAULT_TIMES: [f64; 6] = [0.0, 0.1, 0.5, 1.0, 2.0, 5.0];

#[derive(Debug, Parser)]
#[command(name = "dbnet", version, about = "Detailed balance analysis of linear reaction networks")]
pub struct Cli {
    /// Use rational arithmetic for steady states and Δ_n where the input allows it.
    #[arg(long, global = true)]
    pub exact: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct PairArg {
    /// State labels `i j` (default: the first two states).
    #[arg(long, num_args = 2, value_names = ["I", "J"])]
    pub pair: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct TimesArg {
    /// Comma- or space-separated time grid.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub times: Vec<f64>,
}

impl TimesArg {
    fn grid(&self) -> Vec<f64> {
        if self.times.is_empty() {
            DEFAULT_TIMES.to_vec()
        } else {
            self.times.clone()
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a network and check generator, ergodicity, class and compartments.
    Validate { file: PathBuf },
    /// Steady state, DB and PDB verdicts, ratio test and topology.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        pair: PairArg,
        #[command(flatten)]
        times: TimesArg,
    },
    /// Stability of pathwise detailed balance for a pair.
    Probe {
        file: PathBuf,
        #[command(flatten)]
        pair: PairArg,
        /// Starting ε of the witness perturbation.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random class-preserving perturbations to test (needs a class annotation).
        #[arg(long, default_value_t = 0)]
        trials: usize,
        #[arg(long, default_value_t = 1e-3)]
        radius: f64,
        #[arg(long)]
        weak_topology: bool,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Monte Carlo response estimates: independent runs, or the
    /// single-realization protocol with `--t1 --t2`.
    Simulate {
        file: PathBuf,
        #[command(flatten)]
        pair: PairArg,
        #[command(flatten)]
        times: TimesArg,
        #[arg(long, requires = "t2")]
        t1: Option<f64>,
        #[arg(long, requires = "t1")]
        t2: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 10_000)]
        cycles: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Exact response functions `R_ij(t)` and `R_ji(t)` as CSV.
    Response {
        file: PathBuf,
        #[command(flatten)]
        pair: PairArg,
        #[command(flatten)]
        times: TimesArg,
        /// Use the interior block of a source/sink network.
        #[arg(long)]
        open: bool,
    },
    /// Dimension counts of the measurement heuristics.
    Dims {
        #[arg(long = "L", id = "L")]
        l: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorInfo {
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    /// SHA-256 of the input file, hex encoded.
    pub input_digest: Option<String>,
    pub verdicts: BTreeMap<String, Value>,
    pub payload: Value,
    pub seed: Option<u64>,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

impl Report {
    fn new(command: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            input_digest: None,
            verdicts: BTreeMap::new(),
            payload: Value::Null,
            seed: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            error: None,
        }
    }

    fn verdict(&mut self, key: &str, value: impl Into<Value>) {
        self.verdicts.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Report,
    pub csv: Option<String>,
}

/// Parses `args` (including the program name), runs the command and writes
/// its output. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = execute(&cli);
    let written = match &outcome.csv {
        Some(csv) => out
            .write_all(csv.as_bytes())
            .and_then(|_| err.write_all(outcome.report.to_json().as_bytes())),
        None => out.write_all(outcome.report.to_json().as_bytes()),
    };
    match written {
        Ok(()) => outcome.code,
        Err(_) => 2,
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let (name, file) = match &cli.command {
        Command::Validate { file } => ("validate", Some(file)),
        Command::Analyze { file, .. } => ("analyze", Some(file)),
        Command::Probe { file, .. } => ("probe", Some(file)),
        Command::Simulate { file, .. } => ("simulate", Some(file)),
        Command::Response { file, .. } => ("response", Some(file)),
        Command::Dims { .. } => ("dims", None),
    };
    let mut report = Report::new(name);
    let result = match file {
        Some(path) => load(path).and_then(|(net, digest)| {
            report.input_digest = Some(digest);
            dispatch(cli, &net, &mut report)
        }),
        None => dims(cli, &mut report),
    };
    match result {
        Ok((code, csv)) => Outcome { code, report, csv },
        Err(e) => {
            let code = e.exit_code();
            report.error = Some(ErrorInfo {
                message: e.to_string(),
                exit_code: code,
            });
            Outcome {
                code,
                report,
                csv: None,
            }
        }
    }
}

type Run = Result<(i32, Option<String>)>;

fn dispatch(cli: &Cli, net: &Network, report: &mut Report) -> Run {
    match &cli.command {
        Command::Validate { .. } => validate(cli, net, report),
        Command::Analyze { pair, times, .. } => analyze(cli, net, pair, &times.grid(), report),
        Command::Probe {
            pair,
            eps,
            seed,
            trials,
            radius,
            weak_topology,
            workers,
            ..
        } => {
            let config = SamplingConfig {
                trials: *trials,
                radius: *radius,
                seed: *seed,
                weak_topology: *weak_topology,
                workers: *workers,
            };
            probe(cli, net, pair, *eps, &config, report)
        }
        Command::Simulate {
            pair,
            times,
            t1,
            t2,
            samples,
            cycles,
            seed,
            workers,
            ..
        } => {
            let (i, j) = resolve_pair(net, pair)?;
            report.seed = Some(*seed);
            let gen = net.generator();
            match (t1, t2) {
                (Some(t1), Some(t2)) => regenerative(net, &gen, (i, j), (*t1, *t2), *cycles, *seed, report),
                _ => iid(net, &gen, (i, j), &times.grid(), *samples, *seed, *workers, report),
            }
        }
        Command::Response {
            pair, times, open, ..
        } => response(cli, net, pair, &times.grid(), *open, report),
        Command::Dims { .. } => unreachable!("dims reads no file"),
    }
}

fn load(path: &Path) -> Result<(Network, String)> {
    let bytes = std::fs::read(path)?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    Ok((parse_network(text)?, digest))
}

fn resolve_pair(net: &Network, arg: &PairArg) -> Result<(usize, usize)> {
    let (i, j) = match &arg.pair {
        Some(p) => (net.index_of(&p[0])?, net.index_of(&p[1])?),
        None => (0, 1),
    };
    if i == j {
        return Err(Error::SameState(i));
    }
    Ok((i, j))
}

fn steady(gen: &Generator, exact: bool) -> Result<SteadyState> {
    if exact {
        steady_state_exact(gen)
    } else {
        steady_state(gen)
    }
}

fn steady_json(n: &SteadyState) -> Value {
    let mut v = json!({ "values": n.values, "residual": n.residual });
    if let Some(e) = &n.exact {
        v["exact"] = json!(e.iter().map(|x| x.to_string()).collect::<Vec<_>>());
    }
    v
}

fn labels(net: &Network, p: Pair) -> [String; 2] {
    [net.label(p.lo()).to_string(), net.label(p.hi()).to_string()]
}

fn require_ergodic(net: &Network, gen: &Generator) -> Result<()> {
    let erg = check_ergodic(gen);
    match erg.witness {
        Some((a, b)) if !erg.ergodic => Err(Error::NotErgodic(format!(
            "`{}` cannot be reached from `{}`",
            net.label(b),
            net.label(a)
        ))),
        _ => Ok(()),
    }
}

fn validate(cli: &Cli, net: &Network, report: &mut Report) -> Run {
    let gen = net.generator();
    let erg = check_ergodic(&gen);
    let markovian = gen.column_residual() <= TAU_MARKOV;
    report.verdict("markovian", markovian);
    report.verdict("ergodic", erg.ergodic);
    let mut payload = json!({
        "states": net.states(),
        "rates": net.rates().len(),
        "column_residual": gen.column_residual(),
        "ergodicity": erg,
    });
    if let Some((a, b)) = erg.witness {
        payload["unreachable"] = json!({ "from": net.label(a), "to": net.label(b) });
    }
    // Open networks drain into their sinks and are never ergodic as a whole.
    let mut ok = markovian && (erg.ergodic || net.compartments().is_some());
    if net.class().is_some() {
        if erg.ergodic {
            let n = steady(&gen, cli.exact)?;
            let member = check_class_membership(net, &n)?;
            report.verdict("class_member", member.member);
            ok &= member.member;
            payload["class_membership"] = json!(member);
        } else {
            report.verdict("class_member", Value::Null);
            ok = false;
        }
    }
    if net.compartments().is_some() {
        let comp = check_compartments(net)?;
        report.verdict("compartments", comp.passed);
        ok &= comp.passed;
        payload["compartments"] = json!(comp);
    }
    report.payload = payload;
    Ok((if ok { 0 } else { 3 }, None))
}

fn analyze(cli: &Cli, net: &Network, pair: &PairArg, times: &[f64], report: &mut Report) -> Run {
    let (i, j) = resolve_pair(net, pair)?;
    let gen = net.generator();
    require_ergodic(net, &gen)?;
    let n = steady(&gen, cli.exact)?;
    let db = check_detailed_balance(&gen, &n);
    let pdb = check_pdb(&gen, &n, i, j)?;
    let ratio = response_ratio_test(&gen, i, j, times)?;
    let g = support_graph(&gen);
    let cuts = find_cut_vertices(&g)?;
    let annotation = match net.class() {
        Some(c) => c.clone(),
        None => ClassAnnotation::new(
            [],
            db.residuals.iter().filter(|(_, r)| *r <= TAU_DB).map(|(p, _)| *p),
        )?,
    };
    let shape = check_stability_class_shape(&g, &annotation)?;
    let shielding = cuts
        .iter()
        .map(|&x| cut_class_at(&g, &annotation, x))
        .find(|c| c.shields(i, j));
    let mut holding = Vec::new();
    let mut checked = 0;
    for p in Pair::all(gen.dim()) {
        checked += 1;
        if check_pdb(&gen, &n, p.lo(), p.hi())?.holds {
            holding.push(labels(net, p));
        }
    }

    report.verdict("db", db.satisfied);
    report.verdict("pdb", pdb.holds);
    report.verdict("ratio_constant", ratio.constant);
    report.verdict("pdb_all_pairs", holding.len() == checked);
    report.verdict("cut_vertices", !cuts.is_empty());
    report.verdict("cut_class", shape.is_cut_class);
    report.verdict("cut_class_shields_pair", shielding.is_some());

    let delta_table: Vec<Value> = pdb
        .series
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let mut row = json!({ "n": k + 1, "delta": v, "passes": pdb.series.passes(k) });
            if let Some(e) = &pdb.series.exact {
                row["exact"] = json!(e[k].to_string());
            }
            row
        })
        .collect();
    report.payload = json!({
        "states": net.states(),
        "pair": [net.label(i), net.label(j)],
        "steady_state": steady_json(&n),
        "db": {
            "satisfied": db.satisfied,
            "worst_pair": db.worst_pair.map(|p| labels(net, p)),
            "worst_residual": db.worst_residual,
        },
        "pdb": {
            "holds": pdb.holds,
            "first_failing_n": pdb.first_failing_n,
            "ratio_constant": pdb.series.ratio_constant,
            "delta": delta_table,
        },
        "pdb_all_pairs": { "checked": checked, "holding": holding },
        "ratio_test": ratio,
        "cut_vertices": cuts.iter().map(|&v| net.label(v)).collect::<Vec<_>>(),
        "cut_class": {
            "is_cut_class": shape.is_cut_class,
            "cut_vertex": shape.cut_vertex.map(|v| net.label(v)),
            "shielding_cut_vertex": shielding.and_then(|c| c.cut_vertex).map(|v| net.label(v)),
            "annotation": if net.class().is_some() { "file" } else { "derived" },
        },
    });
    Ok((0, None))
}

fn probe(
    cli: &Cli,
    net: &Network,
    pair: &PairArg,
    eps: Option<f64>,
    config: &SamplingConfig,
    report: &mut Report,
) -> Run {
    let (i, j) = resolve_pair(net, pair)?;
    report.seed = Some(config.seed);
    let gen = net.generator();
    require_ergodic(net, &gen)?;
    let n = steady(&gen, cli.exact)?;
    let v = instability_probe_with(&gen, &n, i, j, eps)?;
    let stability = match v.verdict {
        ProbeVerdict::Db => "DB",
        ProbeVerdict::CutShielded => "STABLE",
        ProbeVerdict::Unstable => "UNSTABLE",
        ProbeVerdict::Inconclusive => "INCONCLUSIVE",
    };
    report.verdict("probe", json!(v.verdict));
    report.verdict("stability", stability);
    let mut payload = json!({
        "states": net.states(),
        "pair": [net.label(i), net.label(j)],
        "violating_edge": v.violating_edge.map(|p| labels(net, p)),
        "witness_path": v.witness.as_ref().map(|w| {
            w.perturbation.path.vertices.iter().map(|&s| net.label(s)).collect::<Vec<_>>()
        }),
        "delta": v.witness.as_ref().map(|w| json!({ "n": w.n, "value": w.delta_value, "relative": w.relative_delta })),
        "cut_vertex": v.cut_class.as_ref().and_then(|c| c.cut_vertex).map(|x| net.label(x)),
        "detail": v,
    });
    if config.trials > 0 {
        let sampling = stability_sampling(net, i, j, config)?;
        report.verdict("sampling_violations", sampling.violations);
        payload["sampling"] = json!(sampling);
    }
    report.payload = payload;
    Ok((0, None))
}

#[allow(clippy::too_many_arguments)]
fn iid(
    net: &Network,
    gen: &Generator,
    (i, j): (usize, usize),
    times: &[f64],
    samples: usize,
    seed: u64,
    workers: usize,
    report: &mut Report,
) -> Run {
    let est = estimate_response_iid(gen, i, j, times, samples, seed, workers)?;
    let mut exact = Vec::with_capacity(times.len());
    for &t in times {
        exact.push(propagate(gen, t)?.response(i, j));
    }
    let covered = (0..times.len()).filter(|&k| est.covers(k, exact[k])).count();
    report.verdict("covered", covered);
    report.payload = json!({
        "mode": "iid",
        "states": net.states(),
        "pair": [net.label(i), net.label(j)],
        "samples": samples,
        "workers": workers,
        "times": times,
        "exact": exact,
        "grid_points": times.len(),
    });
    Ok((0, Some(est.to_csv())))
}

fn regenerative(
    net: &Network,
    gen: &Generator,
    (i, j): (usize, usize),
    (t1, t2): (f64, f64),
    cycles: usize,
    seed: u64,
    report: &mut Report,
) -> Run {
    let est = estimate_response_regenerative(gen, i, j, t1, t2, cycles, seed)?;
    report.verdict("ratio_test_p", est.ratio_test_p);
    report.verdict("ratio_constant_at_1pct", est.ratio_test_p.map(|p| p > 0.01));
    let h = est.half_widths;
    let mut csv = String::from("t,r_ij,half_width_ij,r_ji,half_width_ji,cycles\n");
    csv += &format!("{t1:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{cycles}\n", est.r_ij_t1, h[0], est.r_ji_t1, h[2]);
    csv += &format!("{t2:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{cycles}\n", est.r_ij_t2, h[1], est.r_ji_t2, h[3]);
    report.payload = json!({
        "mode": "regenerative",
        "states": net.states(),
        "pair": [net.label(i), net.label(j)],
        "estimate": est,
    });
    Ok((0, Some(csv)))
}

fn response(cli: &Cli, net: &Network, pair: &PairArg, times: &[f64], open: bool, report: &mut Report) -> Run {
    let (i, j) = resolve_pair(net, pair)?;
    let gen = net.generator();
    let (forward, backward, ni, nj) = if open {
        let ext = check_extended_db(net)?;
        report.verdict("extended_db", ext.satisfied);
        let pos = |s: usize| {
            ext.interior
                .iter()
                .position(|&x| x == s)
                .ok_or_else(|| Error::InvalidArgument(format!("`{}` is not an interior state", net.label(s))))
        };
        let (ni, nj) = (ext.interior_steady[pos(i)?], ext.interior_steady[pos(j)?]);
        (open_response(net, i, j, times)?, open_response(net, j, i, times)?, ni, nj)
    } else {
        require_ergodic(net, &gen)?;
        let n = steady(&gen, cli.exact)?;
        (closed_response(&gen, i, j, times)?, closed_response(&gen, j, i, times)?, n.values[i], n.values[j])
    };
    let deviation = forward
        .values
        .iter()
        .zip(&backward.values)
        .map(|(f, b)| (ni * f - nj * b).abs())
        .fold(0.0, f64::max);
    report.verdict("ratio_law_deviation", deviation);
    let mut csv = String::from("t,r_ij,r_ji\n");
    for k in 0..times.len() {
        csv += &format!("{:.16e},{:.16e},{:.16e}\n", times[k], forward.values[k], backward.values[k]);
    }
    report.payload = json!({
        "states": net.states(),
        "pair": [net.label(i), net.label(j)],
        "open": open,
        "n_i": ni,
        "n_j": nj,
        "max_abs_ni_rij_minus_nj_rji": deviation,
    });
    Ok((0, Some(csv)))
}

fn dims(cli: &Cli, report: &mut Report) -> Run {
    let Command::Dims { l } = cli.command else {
        unreachable!("dims only")
    };
    let d = dimension_report(l)?;
    report.verdict("dim_b_equals_dim_c", d.dim_b == d.dim_c);
    let mut payload = json!({ "dimensions": d });
    if l == 4 {
        let rank = nonreciprocal_rank_check();
        report.verdict("printed_det_nonzero", rank.determinant_nonzero);
        payload["rank_check"] = json!(rank);
    }
    report.payload = payload;
    Ok((0, None))
}
