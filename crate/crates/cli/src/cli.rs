use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path as FsPath, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use tourlink::connectivity::vertex_connectivity;
use tourlink::Tournament;

use crate::exec::{check_certificate, execute, COMMANDS};
use crate::record::{combined_exit, read_records, write_records, ExperimentRecord, Outcome, Params};
use crate::sweep::{run_sweep, SweepArgs};

#[derive(Parser, Debug)]
#[command(name = "tourlink", version, about = "Linkage experiments on tournaments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Random tournament as TRN1 (or a record with --format json).
    Gen(Common),
    /// Minimum out- and in-degree and the out-degree sequence.
    Degrees(Common),
    /// Strong components in condensation order.
    Scc(Common),
    /// Vertex connectivity.
    Connectivity(Common),
    /// Maximum family of disjoint paths from --from to --to.
    DisjointPaths(Common),
    /// Exact linkage check for --sources/--sinks, or over all terminal choices.
    LinkedExact(Common),
    /// Vertex-minimal subtournament of minimum out-degree at least k.
    ExtractCore(Common),
    /// Subdivision of the complete digraph on k vertices.
    Subdivide(Common),
    /// Subdivision with a loop pair per ordered pair.
    Kstar(Common),
    /// Reversing path system between A, B and a pool L.
    ReversePaths(Common),
    /// Link sources to sinks through an embedded structure.
    Link(Common),
    /// Named construction as TRN1.
    Construct {
        kind: Kind,
        #[command(flatten)]
        common: Common,
    },
    /// Check a tournament or a record file.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Growth bounds for k.
    Bounds(Common),
    /// Run one command over grids of n, k and seeds.
    Sweep(SweepArgs),
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Fails unless the TRN1 tournament on stdin is at least K-connected.
    Connectivity {
        #[arg(long)]
        at_least: usize,
        /// Read from this file instead of stdin.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay every record and re-check its certificate.
    Records {
        file: PathBuf,
        /// TRN1 tournament for records whose source is stdin.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Popielarz,
    TriangleBlowup,
    CycleBlowup,
    Transitive,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Trn,
    Json,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Branch vertices for `link`.
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// One seed per line; overrides --seed.
    #[arg(long)]
    pub seeds_file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Records go here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Potential trace as JSON lines.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Also write the tournament as TRN1 to this file.
    #[arg(long)]
    pub emit_trn: Option<PathBuf>,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub at_least: Option<usize>,
    /// random, popielarz, triangle-blowup, cycle-blowup, transitive or stdin.
    #[arg(long)]
    pub source: Option<String>,
    /// seeded or transitive orientation inside parts.
    #[arg(long)]
    pub internal: Option<String>,
    /// TRN1 file to use with --source stdin.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub parts: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub sources: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub sinks: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub from: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub to: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub avoid: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub exclude: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub pool: Vec<usize>,
}

impl Common {
    fn params(&self, source: String) -> Params {
        Params {
            source,
            n: self.n,
            k: self.k,
            m: self.m,
            r: self.r,
            budget: self.budget,
            at_least: self.at_least,
            internal: self.internal.clone(),
            parts: self.parts.clone(),
            sources: self.sources.clone(),
            sinks: self.sinks.clone(),
            from: self.from.clone(),
            to: self.to.clone(),
            avoid: self.avoid.clone(),
            exclude: self.exclude.clone(),
            pool: self.pool.clone(),
            trn_path: None,
        }
    }

    fn seeds(&self) -> anyhow::Result<Vec<u64>> {
        match &self.seeds_file {
            Some(path) => parse_seed_lines(&fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?),
            None => Ok(vec![self.seed]),
        }
    }
}

pub fn parse_seed_lines(text: &str) -> anyhow::Result<Vec<u64>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().with_context(|| format!("bad seed {s:?}")))
        .collect()
}

pub fn read_trn(input: Option<&FsPath>) -> anyhow::Result<Tournament> {
    let text = match input {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    Ok(Tournament::from_trn(&text)?)
}

fn open_out(path: Option<&FsPath>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_traces(path: &FsPath, records: &[ExperimentRecord]) -> anyhow::Result<()> {
    let mut out = open_out(Some(path))?;
    for r in records {
        for step in r.potential_trace.iter().flatten() {
            let mut v = serde_json::to_value(step)?;
            v["seed"] = json!(r.seed);
            writeln!(out, "{v}")?;
        }
    }
    out.flush()?;
    Ok(())
}

fn run_command(command: &str, c: &Common, default_source: &str) -> anyhow::Result<i32> {
    let source = c.source.clone().unwrap_or_else(|| default_source.to_string());
    let mut params = c.params(source);
    let input = if params.source == "stdin" {
        let t = read_trn(c.input.as_deref())?;
        if let Some(p) = &c.emit_trn {
            fs::write(p, t.to_trn())?;
            params.trn_path = Some(p.display().to_string());
        } else if let Some(p) = &c.input {
            params.trn_path = Some(p.display().to_string());
        }
        Some(t)
    } else {
        None
    };
    let trn_out = matches!(command, "gen" | "construct") && c.format != Some(Format::Json);
    let mut records = Vec::new();
    for seed in c.seeds()? {
        let record = execute(command, &params, seed, input.as_ref());
        let wants_trn = trn_out || c.emit_trn.is_some();
        if wants_trn && record.outcome != Outcome::Error && params.source != "stdin" {
            let t = params.tournament(seed, None)?;
            if trn_out {
                print!("{}", t.to_trn());
            }
            if let Some(p) = &c.emit_trn {
                fs::write(p, t.to_trn())?;
                if let Some(con) = params.construction(seed)? {
                    fs::write(format!("{}.parts.json", p.display()), con.parts_json())?;
                }
            }
        }
        records.push(record);
    }
    if !trn_out || c.out.is_some() || records.iter().any(|r| r.outcome == Outcome::Error) {
        let mut out = open_out(c.out.as_deref())?;
        write_records(&mut out, &records)?;
    }
    if let Some(p) = &c.trace {
        write_traces(p, &records)?;
    }
    for r in records.iter().filter_map(|r| r.detail.as_ref()) {
        eprintln!("tourlink: {r}");
    }
    Ok(combined_exit(records.iter().map(|r| r.outcome)))
}

fn verify_connectivity(at_least: usize, input: Option<&FsPath>, out: Option<&FsPath>) -> anyhow::Result<i32> {
    let t = read_trn(input)?;
    let kappa = vertex_connectivity(&t);
    let ok = kappa >= at_least;
    let record = ExperimentRecord {
        command: "verify-connectivity".into(),
        params: Params {
            source: "stdin".into(),
            n: Some(t.n()),
            at_least: Some(at_least),
            ..Params::default()
        },
        seed: 0,
        outcome: if ok { Outcome::Success } else { Outcome::Error },
        certificate: Some(json!({ "kappa": kappa })),
        detail: (!ok).then(|| format!("connectivity {kappa} is below {at_least}")),
        wall_time_ms: 0.0,
        potential_trace: None,
    };
    write_records(&mut *open_out(out)?, [&record])?;
    if let Some(d) = &record.detail {
        eprintln!("tourlink: {d}");
    }
    Ok(record.outcome.exit_code())
}

/// Re-runs a record and compares outcome, certificate and trace, then checks
/// the certificate on its own.
pub fn replay(r: &ExperimentRecord, input: Option<&Tournament>) -> anyhow::Result<()> {
    let stored;
    let input = match (input, &r.params.trn_path) {
        (None, Some(p)) if r.params.source == "stdin" => {
            stored = read_trn(Some(FsPath::new(p)))?;
            Some(&stored)
        }
        (i, _) => i,
    };
    if !COMMANDS.contains(&r.command.as_str()) {
        bail!("command {:?} cannot be replayed", r.command);
    }
    let again = execute(&r.command, &r.params, r.seed, input);
    if again.outcome != r.outcome {
        bail!("outcome {:?} on replay, recorded {:?}", again.outcome, r.outcome);
    }
    let text = |c: &Option<serde_json::Value>| c.as_ref().map(|v| v.to_string());
    if text(&again.certificate) != text(&r.certificate) {
        bail!("certificate differs on replay");
    }
    if again.potential_trace != r.potential_trace {
        bail!("potential trace differs on replay");
    }
    if let Some(cert) = &r.certificate {
        let t = r.params.tournament(r.seed, input)?;
        check_certificate(&r.command, &r.params, r.seed, &t, r.outcome, cert)?;
    }
    Ok(())
}

fn verify_records(file: &FsPath, input: Option<&FsPath>) -> anyhow::Result<i32> {
    let records = read_records(&fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?)?;
    let input = input.map(|p| read_trn(Some(p))).transpose()?;
    let mut failed = 0;
    for (i, r) in records.iter().enumerate() {
        let res = replay(r, input.as_ref());
        let line = match &res {
            Ok(()) => json!({ "record": i, "command": r.command, "seed": r.seed, "ok": true }),
            Err(e) => {
                failed += 1;
                json!({ "record": i, "command": r.command, "seed": r.seed, "ok": false, "reason": format!("{e:#}") })
            }
        };
        println!("{line}");
    }
    Ok(if failed > 0 { 1 } else { 0 })
}

/// Runs a parsed command line and returns the process exit code.
pub fn dispatch(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Cmd::Gen(c) => run_command("gen", &c, "random"),
        Cmd::Degrees(c) => run_command("degrees", &c, "random"),
        Cmd::Scc(c) => run_command("scc", &c, "random"),
        Cmd::Connectivity(c) => run_command("connectivity", &c, "random"),
        Cmd::DisjointPaths(c) => run_command("disjoint-paths", &c, "random"),
        Cmd::LinkedExact(c) => run_command("linked-exact", &c, "random"),
        Cmd::ExtractCore(c) => run_command("extract-core", &c, "random"),
        Cmd::Subdivide(c) => run_command("subdivide", &c, "random"),
        Cmd::Kstar(c) => run_command("kstar", &c, "random"),
        Cmd::ReversePaths(c) => run_command("reverse-paths", &c, "random"),
        Cmd::Link(c) => run_command("link", &c, "random"),
        Cmd::Bounds(c) => run_command("bounds", &c, "random"),
        Cmd::Construct { kind, common } => {
            let source = kind.to_possible_value().expect("no skipped variants").get_name().to_string();
            let c = Common { source: Some(source), ..common };
            run_command("construct", &c, "random")
        }
        Cmd::Verify { what: VerifyCmd::Connectivity { at_least, input, out } } => {
            verify_connectivity(at_least, input.as_deref(), out.as_deref())
        }
        Cmd::Verify { what: VerifyCmd::Records { file, input } } => verify_records(&file, input.as_deref()),
        Cmd::Sweep(s) => run_sweep(&s),
    }
}
