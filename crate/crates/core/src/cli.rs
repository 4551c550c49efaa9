//! Command-line front end: instance generation, global runs, oracle queries and sweeps.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::baselines::{exact_min_cover, greedy_cover, OptBound};
use crate::error::{Error, Result};
use crate::global::{Algo, AlgoParams, BadSetRule, CoverState, RunReport};
use crate::lca::{check_answer, first_mismatch, profile, OracleContext, OracleFamily, QueryProfile};
use crate::setsystem::{generate, read_instance, write_instance, InstanceKind, InstanceSpec, SetSystem};
use crate::tape::RandomTape;

pub const SCHEMA: &str = "# schema v1";

/// Exit status for `--verify` mismatches.
pub const EXIT_MISMATCH: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "setcover-lca", version, about = "Local computation algorithms for set cover")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Run a global simulation (or greedy) and print a CSV row.
    Run(RunArgs),
    /// Answer oracle queries and report their query counts.
    Lca(LcaArgs),
    /// Sweep a grid of generated instances and seeds.
    Bench(BenchArgs),
    /// Check an instance, optionally a cover, and oracle consistency.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    #[arg(long)]
    pub lambda5: Option<f64>,
    #[arg(long)]
    pub lambda10: Option<f64>,
    /// Use the polylog threshold preset for the instance's s and t.
    #[arg(long, conflicts_with_all = ["lambda5", "lambda10"])]
    pub polylog: bool,
    /// `literal` or `stage-scaled`.
    #[arg(long, default_value = "literal", value_parser = parse_rule)]
    pub bad_set_rule: BadSetRule,
    #[arg(long)]
    pub phase_len: Option<u32>,
    #[arg(long)]
    pub base_case_r: Option<u32>,
}

fn parse_rule(s: &str) -> std::result::Result<BadSetRule, String> {
    match s {
        "literal" => Ok(BadSetRule::Literal),
        "stage-scaled" => Ok(BadSetRule::StageScaled),
        _ => Err(format!("unknown bad-set rule `{s}`")),
    }
}

impl ParamArgs {
    pub fn resolve(&self, sys: &SetSystem) -> Result<AlgoParams> {
        let mut p = if self.polylog {
            AlgoParams::polylog(sys.s(), sys.t())
        } else {
            let d = AlgoParams::default();
            AlgoParams::with_lambdas(self.lambda5.unwrap_or(d.lambda5), self.lambda10.unwrap_or(d.lambda10))
        };
        p.bad_set_rule = self.bad_set_rule;
        p.phase_len = self.phase_len;
        p.base_case_r = self.base_case_r;
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value = "uniform")]
    pub kind: InstanceKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    pub instance: PathBuf,
    /// base, generic, sqrt, recsplit or greedy.
    #[arg(long, default_value = "sqrt")]
    pub algo: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Args, Debug)]
pub struct LcaArgs {
    pub instance: PathBuf,
    /// sqrt or recsplit.
    #[arg(long, default_value = "sqrt")]
    pub algo: OracleFamily,
    /// Query elements instead of sets.
    #[arg(long)]
    pub elements: bool,
    /// Ids to query; all of them when omitted.
    #[arg(long, value_delimiter = ',')]
    pub ids: Vec<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub meter_cap: Option<u64>,
    /// Cross-check every answer against the global simulation.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "base,generic,sqrt,recsplit,greedy")]
    pub algo: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Set counts; defaults to n/2 for each n.
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "8")]
    pub s: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "8")]
    pub t: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "uniform")]
    pub kind: Vec<InstanceKind>,
    /// Number of seeds per grid cell, starting at 0.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// Oracle calls per cell for the query columns.
    #[arg(long, default_value_t = 32)]
    pub sample: usize,
    /// Search-node budget for the exact optimum.
    #[arg(long, default_value_t = 20_000)]
    pub exact_budget: u64,
    #[arg(long)]
    pub meter_cap: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    /// File of whitespace-separated set ids to check as a cover.
    #[arg(long)]
    pub cover: Option<PathBuf>,
    /// Also check both oracle families against their global runs.
    #[arg(long)]
    pub oracles: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub params: ParamArgs,
}

/// Runs a parsed command, writing results to `out`. Returns the process exit status.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<u8> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Run(a) => cmd_run(a, out),
        Command::Lca(a) => cmd_lca(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

fn stdout_err(source: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(stdout_err)
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<u8> {
    let spec = InstanceSpec {
        n: a.n,
        m: a.m,
        s: a.s,
        t: a.t,
        kind: a.kind,
        seed: a.seed,
    };
    let g = generate(&spec)?;
    write_instance(&g.system, g.planted_opt, &a.out)?;
    let sys = &g.system;
    let mut line = format!("n={} m={} s={} t={}", sys.num_elements(), sys.num_sets(), sys.s(), sys.t());
    if let Some(opt) = g.planted_opt {
        line += &format!(" planted_opt={opt}");
    }
    emit(out, &format!("{line}\n"))?;
    Ok(0)
}

fn greedy_report(sys: &SetSystem) -> (CoverState, RunReport) {
    let state = greedy_cover(sys);
    let report = RunReport {
        algo: "greedy",
        cover_size: state.cover_size(),
        rounds_executed: 0,
        bad_set_events: 0,
        pretend_events: 0,
        cleanup_adds: 0,
        per_stage_sizes: Vec::new(),
    };
    (state, report)
}

fn run_named(algo: &str, sys: &SetSystem, seed: u64, params: &AlgoParams) -> Result<(CoverState, RunReport)> {
    if algo == "greedy" {
        return Ok(greedy_report(sys));
    }
    let algo: Algo = algo.parse()?;
    algo.run(sys, &RandomTape::new(seed), params)
}

fn ratio(size: usize, opt: usize) -> String {
    format!("{:.4}", size as f64 / opt.max(1) as f64)
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write) -> Result<u8> {
    let file = read_instance(&a.instance)?;
    let sys = &file.system;
    let params = a.params.resolve(sys)?;
    let (state, report) = run_named(&a.algo, sys, a.seed, &params)?;
    if !state.is_valid_cover(sys) {
        return Err(Error::State(format!("{} returned an invalid cover", report.algo)));
    }
    let (opt, r) = match file.planted_opt {
        Some(o) => (o.to_string(), ratio(report.cover_size, o)),
        None => (String::new(), String::new()),
    };
    emit(out, &format!("{SCHEMA}\n{},opt,ratio\n", RunReport::csv_header()))?;
    emit(out, &format!("{},{opt},{r}\n", report.csv_row(sys, a.seed)))?;
    Ok(0)
}

fn cmd_lca(a: &LcaArgs, out: &mut dyn Write) -> Result<u8> {
    let sys = read_instance(&a.instance)?.system;
    let params = a.params.resolve(&sys)?;
    let kind = if a.elements { a.algo.element_kind() } else { a.algo.set_kind() };
    let count = if a.elements { sys.num_elements() } else { sys.num_sets() } as u32;
    let ids: Vec<u32> = if a.ids.is_empty() { (0..count).collect() } else { a.ids.clone() };
    if ids.is_empty() {
        return Err(Error::domain("no ids to query"));
    }
    let global = if a.verify {
        Some(a.algo.algo().run(&sys, &RandomTape::new(a.seed), &params)?.0)
    } else {
        None
    };
    let mut ctx = OracleContext::new(&sys, RandomTape::new(a.seed), &params)?;
    if let Some(cap) = a.meter_cap {
        ctx = ctx.with_cap(cap);
    }
    emit(out, &format!("{SCHEMA}\noracle,id,answer,by,queries\n"))?;
    for &id in &ids {
        let answer = kind.ask(&mut ctx, id)?;
        let by = answer.1.map(|s| s.to_string()).unwrap_or_default();
        emit(out, &format!("{},{id},{},{by},{}\n", kind.name(), answer.0, ctx.last_queries()))?;
        if let Some(m) = global.as_ref().and_then(|g| check_answer(kind, id, answer, g)) {
            eprintln!("mismatch: {m}");
            return Ok(EXIT_MISMATCH);
        }
    }
    let prof = profile(&mut ctx, kind, &ids)?;
    emit(out, &format!("# {}\n# {}\n", QueryProfile::csv_header(), prof.csv_row(kind.name(), &sys, a.seed)))?;
    Ok(0)
}

const BENCH_HEADER: &str =
    "algo,kind,n,m,s,t,seed,cover_size,exact_opt,opt_method,ratio,calls,q_max,q_mean,q_total";

#[derive(PartialEq, PartialOrd)]
struct BenchRow {
    key: (String, &'static str, usize, usize, usize, usize, u64),
    line: String,
}

fn bench_specs(a: &BenchArgs) -> Result<Vec<InstanceSpec>> {
    if a.n.is_empty() || a.s.is_empty() || a.t.is_empty() || a.kind.is_empty() || a.algo.is_empty() {
        return Err(Error::domain("bench grid is empty"));
    }
    if a.seeds == 0 {
        return Err(Error::domain("bench needs at least one seed"));
    }
    let mut specs = Vec::new();
    for &n in &a.n {
        let ms = if a.m.is_empty() { vec![(n / 2).max(1)] } else { a.m.clone() };
        for &m in &ms {
            for &s in &a.s {
                for &t in &a.t {
                    for &kind in &a.kind {
                        for seed in 0..a.seeds {
                            specs.push(InstanceSpec { n, m, s, t, kind, seed });
                        }
                    }
                }
            }
        }
    }
    Ok(specs)
}

fn bench_cell(a: &BenchArgs, spec: &InstanceSpec, rows: &mut Vec<BenchRow>) -> Result<()> {
    let g = generate(spec)?;
    let sys = &g.system;
    let params = a.params.resolve(sys)?;
    let bound = match g.planted_opt {
        Some(o) => OptBound::planted(sys, o),
        None => exact_min_cover(sys, Some(a.exact_budget)),
    };
    let opt = bound.exact_opt.map(|o| o.to_string()).unwrap_or_default();
    for name in &a.algo {
        let (state, report) = run_named(name, sys, spec.seed, &params)?;
        if !state.is_valid_cover(sys) {
            return Err(Error::State(format!("{name} returned an invalid cover on {spec:?}")));
        }
        let lca = match name.parse::<OracleFamily>() {
            Ok(family) if a.sample > 0 => {
                let mut ctx = OracleContext::new(sys, RandomTape::new(spec.seed), &params)?;
                if let Some(cap) = a.meter_cap {
                    ctx = ctx.with_cap(cap);
                }
                let ids = spread(sys.num_sets(), a.sample);
                let p = profile(&mut ctx, family.set_kind(), &ids)?;
                format!("{},{},{:.3},{}", p.calls, p.q_max, p.q_mean, p.q_total)
            }
            _ => ",,,".to_string(),
        };
        let line = format!(
            "{},{},{},{},{},{},{},{},{opt},{},{},{lca}",
            report.algo,
            spec.kind.name(),
            spec.n,
            spec.m,
            spec.s,
            spec.t,
            spec.seed,
            report.cover_size,
            bound.method.name(),
            ratio(report.cover_size, bound.reference()),
        );
        rows.push(BenchRow {
            key: (name.clone(), spec.kind.name(), spec.n, spec.m, spec.s, spec.t, spec.seed),
            line,
        });
    }
    Ok(())
}

/// `k` ids spread evenly over `0..count`.
pub fn spread(count: usize, k: usize) -> Vec<u32> {
    let k = k.min(count).max(1);
    (0..k).map(|j| (j * count / k) as u32).collect()
}

fn write_rows(rows: &mut [BenchRow], err: Option<&Error>, out: &mut dyn Write) -> Result<()> {
    rows.sort_by(|x, y| x.partial_cmp(y).expect("rows are totally ordered"));
    let mut text = format!("{SCHEMA}\n{BENCH_HEADER}\n");
    for r in rows.iter() {
        text += &r.line;
        text.push('\n');
    }
    if let Some(e) = err {
        text += &format!("# incomplete: {e}\n");
    }
    emit(out, &text)
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<u8> {
    let specs = bench_specs(a)?;
    let mut rows = Vec::new();
    let mut failure = None;
    for spec in &specs {
        if let Err(e) = bench_cell(a, spec, &mut rows) {
            failure = Some(e);
            break;
        }
    }
    match &a.out {
        Some(path) => {
            let mut buf = Vec::new();
            write_rows(&mut rows, failure.as_ref(), &mut buf)?;
            std::fs::write(path, buf).map_err(|source| Error::Io { path: path.clone(), source })?;
        }
        None => write_rows(&mut rows, failure.as_ref(), out)?,
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(0),
    }
}

fn read_cover(path: &Path, sys: &SetSystem) -> Result<Vec<bool>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut chosen = vec![false; sys.num_sets()];
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            let id: usize = tok
                .parse()
                .map_err(|_| Error::parse(ln + 1, format!("bad set id `{tok}`")))?;
            if id >= sys.num_sets() {
                return Err(Error::parse(ln + 1, format!("set id {id} out of range")));
            }
            chosen[id] = true;
        }
    }
    Ok(chosen)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<u8> {
    let sys = read_instance(&a.instance)?.system;
    emit(
        out,
        &format!(
            "instance ok: n={} m={} s={} t={}\n",
            sys.num_elements(),
            sys.num_sets(),
            sys.s(),
            sys.t()
        ),
    )?;
    if let Some(path) = &a.cover {
        let chosen = read_cover(path, &sys)?;
        let size = chosen.iter().filter(|&&c| c).count();
        if !sys.is_cover(&chosen) {
            emit(out, &format!("cover invalid ({size} sets)\n"))?;
            return Ok(1);
        }
        emit(out, &format!("cover ok ({size} sets)\n"))?;
    }
    if a.oracles {
        let params = a.params.resolve(&sys)?;
        for family in OracleFamily::ALL {
            let mut ctx = OracleContext::new(&sys, RandomTape::new(a.seed), &params)?;
            if let Some(m) = first_mismatch(&mut ctx, family, &params)? {
                eprintln!("mismatch ({}): {m}", family.algo().name());
                return Ok(EXIT_MISMATCH);
            }
            emit(out, &format!("{} oracles agree\n", family.algo().name()))?;
        }
    }
    Ok(0)
}
