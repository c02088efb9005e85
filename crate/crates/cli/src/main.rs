use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fivearc::ball::{self, ExportFormat};
use fivearc::certificate::{relation_section, Certificate, FieldEcho, Section};
use fivearc::named::{GroupName, Registry};
use fivearc::relations::{self, Mode, DEFAULT_SAMPLES};
use fivearc::structure::{self, Section3Options};
use fivearc::{amalgam, cover, Error, Field, Omega};

#[derive(Parser, Debug)]
#[command(name = "fivearc", version, about = "Verify the 5-arc transitive amalgams over F_q, q = 3^r")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Field order, a power of 3 (3, 9 or 27). verify-all runs 3, 9 and 27 when omitted.
    #[arg(long, global = true)]
    q: Option<u64>,
    /// Seed for sampled relation checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relation checking mode; auto is exhaustive at q=3 and sampled above.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// Directory for cached stabilizer chains.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Write the certificate here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Allow the expensive optional steps (K at q=27).
    #[arg(long, global = true)]
    deep: bool,
    /// Irreducible monic modulus, coefficients from the constant term up, e.g. "1,0,1" for x²+1.
    #[arg(long, global = true)]
    modulus: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, Debug)]
enum Which {
    All,
    One(usize),
}

impl FromStr for Which {
    type Err = String;
    fn from_str(s: &str) -> Result<Which, String> {
        if s == "all" {
            return Ok(Which::All);
        }
        s.parse().map(Which::One).map_err(|_| format!("expected `all` or an index, got `{s}`"))
    }
}

impl Which {
    fn index(self) -> Option<usize> {
        match self {
            Which::All => None,
            Which::One(i) => Some(i),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Elementwise identities (A1, A2, A6, A7, A10 and the auxiliary ones).
    VerifyRelations,
    /// Subgroup structure, local actions and the arc chain of the main amalgam.
    VerifyTheorem1,
    /// K, the block system and the θ facts.
    VerifySection3,
    /// Admissible J and their cover amalgams.
    VerifyCovers {
        #[arg(long = "J", default_value = "all")]
        j: Which,
    },
    /// Amalgam cores of the covers (q ≤ 9).
    VerifyCore {
        #[arg(long = "J", default_value = "all")]
        j: Which,
    },
    /// The index-3 subamalgam at q=9.
    VerifyMain3,
    /// Build the ball around the base edge and count arc orbits (q ≤ 9).
    BuildBall {
        #[arg(long, default_value_t = 6)]
        radius: usize,
        /// Also write the ball as a graph.
        #[arg(long)]
        export: Option<ExportArg>,
        /// Path for --export (default ball.<ext>).
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
    /// Named groups with their orders.
    ListGroups,
    /// Everything; q = 3, 9 and 27 unless --q is given.
    VerifyAll,
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::VerifyRelations => "verify-relations",
            Cmd::VerifyTheorem1 => "verify-theorem1",
            Cmd::VerifySection3 => "verify-section3",
            Cmd::VerifyCovers { .. } => "verify-covers",
            Cmd::VerifyCore { .. } => "verify-core",
            Cmd::VerifyMain3 => "verify-main3",
            Cmd::BuildBall { .. } => "build-ball",
            Cmd::ListGroups => "list-groups",
            Cmd::VerifyAll => "verify-all",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExportArg {
    Dot,
    Graphml,
    Edges,
}

impl ExportArg {
    fn format(self) -> ExportFormat {
        match self {
            ExportArg::Dot => ExportFormat::Dot,
            ExportArg::Graphml => ExportFormat::GraphMl,
            ExportArg::Edges => ExportFormat::EdgeList,
        }
    }

    fn extension(self) -> &'static str {
        match self {
            ExportArg::Dot => "dot",
            ExportArg::Graphml => "graphml",
            ExportArg::Edges => "txt",
        }
    }
}

const USAGE: u8 = 2;
const FAIL: u8 = 1;

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::ReducibleModulus(_)
            | Error::MalformedModulus(_)
            | Error::UnsupportedDegree(_)
            | Error::InvalidParameter(_)
            | Error::ScaleRefused(_)
            | Error::UnknownLemma(_) => Failure::Usage(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn parse_modulus(s: &str) -> Result<Vec<u8>, Failure> {
    s.split(',')
        .map(|t| match t.trim().parse::<u8>() {
            Ok(c) if c < 3 => Ok(c),
            _ => Err(Failure::Usage(format!("bad modulus coefficient `{t}`"))),
        })
        .collect()
}

fn registry(q: u64, opts: &Opts) -> Result<Registry, Failure> {
    let field = match &opts.modulus {
        None => Field::with_order(q)?,
        Some(m) => {
            let coeffs = parse_modulus(m)?;
            let f = Field::new(coeffs.len().saturating_sub(1) as u32, Some(&coeffs))?;
            if f.q() as u64 != q {
                return Err(Failure::Usage(format!("modulus has degree {} but q = {q}", f.r())));
            }
            f
        }
    };
    Ok(Registry::new(Omega::new(field)).with_cache_dir(opts.cache_dir.clone()))
}

fn mode(q: u64, opts: &Opts) -> Mode {
    match (opts.mode, q) {
        (ModeArg::Exhaustive, _) | (ModeArg::Auto, 3) => Mode::Exhaustive,
        _ => Mode::Sampled { n: DEFAULT_SAMPLES, seed: opts.seed },
    }
}

fn timed(label: &str, f: impl FnOnce() -> Result<Vec<Section>, Failure>) -> Result<Vec<Section>, Failure> {
    let t = Instant::now();
    eprint!("{label} ... ");
    let out = f();
    match &out {
        Ok(secs) => {
            let ok = secs.iter().all(Section::passed);
            eprintln!("{} ({:.1?})", if ok { "pass" } else { "FAIL" }, t.elapsed());
        }
        Err(_) => eprintln!("error ({:.1?})", t.elapsed()),
    }
    out
}

fn relations_sections(reg: &Registry, m: Mode) -> Result<Vec<Section>, Failure> {
    let reports = relations::check_all(reg, m)?;
    let mut s = relation_section("relations", &reports);
    s.param("mode", format!("{m:?}"));
    s.param("report_hash", relations::report_hash(&reports));
    Ok(vec![s])
}

fn ball_sections(reg: &Registry, radius: usize, export: Option<(ExportArg, PathBuf)>) -> Result<Vec<Section>, Failure> {
    let (s, b) = ball::verify_ball(reg, radius)?;
    if let Some((fmt, path)) = export {
        ball::export(&b, fmt.format(), &path)?;
    }
    Ok(vec![s])
}

/// Every step for one field, in the verify-all order.
fn everything(q: u64, opts: &Opts) -> Result<Vec<Section>, Failure> {
    let reg = registry(q, opts)?;
    let m = mode(q, opts);
    let tag = format!("[q={q}]");
    let mut out = Vec::new();
    out.extend(timed(&format!("{tag} relations"), || relations_sections(&reg, m))?);
    out.extend(timed(&format!("{tag} theorem1"), || Ok(amalgam::verify_theorem1(&reg)?))?);
    out.extend(timed(&format!("{tag} section3"), || {
        Ok(structure::verify_section3(&reg, Section3Options { deep: opts.deep, mode: Some(m) })?)
    })?);
    out.extend(timed(&format!("{tag} covers"), || Ok(cover::verify_covers(&reg, None, m)?))?);
    if q as usize <= cover::CORE_MAX_Q {
        out.extend(timed(&format!("{tag} cores"), || Ok(cover::verify_cores(&reg, None)?))?);
        out.extend(timed(&format!("{tag} ball"), || ball_sections(&reg, 6, None))?);
    }
    if q == 9 {
        out.extend(timed(&format!("{tag} main3"), || Ok(vec![cover::verify_main3(&reg)?]))?);
    }
    Ok(out)
}

const LISTED: &[GroupName] = &[
    GroupName::A,
    GroupName::V,
    GroupName::F,
    GroupName::Z0,
    GroupName::Z,
    GroupName::C,
    GroupName::R,
    GroupName::S,
    GroupName::T,
    GroupName::D,
    GroupName::E,
    GroupName::Sigma,
    GroupName::M,
    GroupName::Q,
    GroupName::P,
    GroupName::Qstar,
    GroupName::K1,
    GroupName::K2,
    GroupName::K12,
    GroupName::G1,
    GroupName::G2,
    GroupName::G12,
    GroupName::Theta,
    GroupName::F0,
];

fn list_groups(q: u64, opts: &Opts) -> Result<Section, Failure> {
    let reg = registry(q, opts)?;
    let mut s = Section::new("groups");
    for name in LISTED {
        let order = match reg.get(name) {
            Ok(h) => h.order().to_string(),
            Err(e) => format!("n/a ({e})"),
        };
        println!("{:<8} {order}", name.to_string());
        s.param(&name.to_string(), order);
    }
    Ok(s)
}

fn require_q(opts: &Opts) -> Result<u64, Failure> {
    let q = opts.q.unwrap_or(3);
    Field::with_order(q)?;
    Ok(q)
}

fn run(cli: &Cli) -> Result<Certificate, Failure> {
    let opts = &cli.opts;
    if let Cmd::VerifyAll = cli.cmd {
        let qs = match opts.q {
            Some(q) => vec![q],
            None => vec![3, 9, 27],
        };
        let mut cert = Certificate::new(cli.cmd.name(), None);
        for &q in &qs {
            Field::with_order(q)?;
            let secs = everything(q, opts)?;
            cert.fields.push(FieldEcho::of(registry(q, opts)?.omega().field()));
            for mut s in secs {
                if qs.len() > 1 {
                    s.name = format!("q{q}.{}", s.name);
                }
                cert.sections.push(s);
            }
        }
        return Ok(cert);
    }

    let q = require_q(opts)?;
    let reg = registry(q, opts)?;
    let m = mode(q, opts);
    let mut cert = Certificate::new(cli.cmd.name(), Some(reg.omega().field()));
    let secs = match &cli.cmd {
        Cmd::VerifyRelations => timed("relations", || relations_sections(&reg, m))?,
        Cmd::VerifyTheorem1 => timed("theorem1", || Ok(amalgam::verify_theorem1(&reg)?))?,
        Cmd::VerifySection3 => timed("section3", || {
            Ok(structure::verify_section3(&reg, Section3Options { deep: opts.deep, mode: Some(m) })?)
        })?,
        Cmd::VerifyCovers { j } => timed("covers", || Ok(cover::verify_covers(&reg, j.index(), m)?))?,
        Cmd::VerifyCore { j } => timed("cores", || Ok(cover::verify_cores(&reg, j.index())?))?,
        Cmd::VerifyMain3 => {
            if q != 9 {
                return Err(Failure::Usage("verify-main3 needs --q 9".into()));
            }
            timed("main3", || Ok(vec![cover::verify_main3(&reg)?]))?
        }
        Cmd::BuildBall { radius, export, graph_out } => {
            let target =
                export.map(|e| (e, graph_out.clone().unwrap_or_else(|| format!("ball.{}", e.extension()).into())));
            timed("ball", || ball_sections(&reg, *radius, target))?
        }
        Cmd::ListGroups => vec![list_groups(q, opts)?],
        Cmd::VerifyAll => unreachable!(),
    };
    cert.sections = secs;
    Ok(cert)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cert = match run(&cli) {
        Ok(c) => c,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(USAGE);
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(FAIL);
        }
    };
    let text = cert.to_string_pretty();
    match &cli.opts.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(FAIL);
            }
        }
        None => print!("{text}"),
    }
    if let Some((s, c)) = cert.first_failure() {
        eprintln!("FAIL {} / {}", s.name, c.id);
        for (k, v) in &c.values {
            eprintln!("  {k} = {v}");
        }
        if let Some(w) = &c.witness {
            eprintln!("  witness: {w}");
        }
        return ExitCode::from(FAIL);
    }
    ExitCode::SUCCESS
}

#[cfg(test)]
mod tests {
    use super::*;
    use fivearc::trace;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("fivearc").chain(args.iter().copied())).unwrap()
    }

    fn usage_error(args: &[&str]) -> bool {
        matches!(run(&cli(args)), Err(Failure::Usage(_)))
    }

    #[test]
    fn q_must_be_a_power_of_three() {
        assert!(usage_error(&["verify-theorem1", "--q", "4"]));
        assert!(usage_error(&["verify-all", "--q", "6"]));
    }

    #[test]
    fn clap_errors_exit_with_usage_code() {
        let e = Cli::try_parse_from(["fivearc", "verify-everything"]).unwrap_err();
        assert_eq!(e.exit_code(), USAGE as i32);
        let e = Cli::try_parse_from(["fivearc", "verify-covers", "--J", "x"]).unwrap_err();
        assert_eq!(e.exit_code(), USAGE as i32);
    }

    #[test]
    fn scale_and_field_restrictions_are_usage_errors() {
        assert!(usage_error(&["verify-main3", "--q", "3"]));
        assert!(usage_error(&["build-ball", "--q", "27"]));
        assert!(usage_error(&["verify-core", "--q", "27"]));
        assert!(usage_error(&["verify-relations", "--q", "9", "--modulus", "1,1,1"]));
        assert!(usage_error(&["verify-relations", "--q", "9", "--modulus", "1,0,0,1"]));
    }

    #[test]
    fn explicit_modulus_is_echoed() {
        let c = run(&cli(&["verify-relations", "--q", "9", "--modulus", "2,2,1"])).unwrap();
        assert_eq!(c.fields[0].modulus, "x^2+2x+2");
    }

    #[test]
    fn verify_all_passes_at_three() {
        let c = run(&cli(&["verify-all", "--q", "3"])).unwrap();
        assert!(c.passed(), "{:?}", c.first_failure().map(|(s, c)| (&s.name, &c.id)));
        assert_eq!(c.command, "verify-all");
    }

    #[test]
    fn sampled_relations_are_reproducible() {
        let args = ["verify-relations", "--q", "9", "--seed", "42"];
        let a = run(&cli(&args)).unwrap();
        let b = run(&cli(&args)).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        let c = run(&cli(&["verify-relations", "--q", "9", "--seed", "43"])).unwrap();
        assert_ne!(a.content_hash(), c.content_hash());
    }

    #[test]
    fn single_cover_selection() {
        let c = run(&cli(&["verify-covers", "--q", "3", "--J", "0"])).unwrap();
        assert!(c.passed());
        assert!(c.sections.iter().any(|s| s.name == "cover[SΣ]"));
    }

    #[test]
    fn ball_export_writes_a_graph() {
        let path = std::env::temp_dir().join(format!("fivearc-ball-{}.dot", std::process::id()));
        let p = path.to_str().unwrap();
        let c = run(&cli(&["build-ball", "--q", "3", "--radius", "2", "--export", "dot", "--graph-out", p])).unwrap();
        assert!(c.passed());
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("graph"));
        fs::remove_file(&path).unwrap();
    }

    #[test]
    fn every_clause_reaches_a_certificate() {
        let mut all = run(&cli(&["verify-all", "--q", "3"])).unwrap().sections;
        all.extend(run(&cli(&["verify-main3", "--q", "9"])).unwrap().sections);
        for clause in trace::MANIFEST {
            let hit = all.iter().flat_map(|s| &s.checks).any(|c| trace::clause_of(&c.id) == Some(clause));
            assert!(hit, "no check for {clause}");
        }
    }
}
