//! The `simres` command line: argument parsing, dispatch and report rendering.
//!
//! [`run`] is pure apart from reading the input file, so tests drive it
//! directly and compare the captured output.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::circuits::{self, CircuitProblem, GeneratorAttachment};
use crate::complex::{Basis, BasisTag, ChainVec, OpMatrix, Side, Simplex, WeightedComplex};
use crate::error::{Error, Result};
use crate::format::fmt_g;
use crate::io;
use crate::laplacian::{self, LaplacianKind, LaplacianOp};
use crate::metrics;
use crate::resistance;
use crate::spectral::PseudoinverseConfig;

/// Environment variable that replaces the default check tolerance.
pub const TOL_ENV: &str = "SIMRES_TOL";

/// Tolerance for pass/fail decisions when neither `--tol` nor the
/// environment sets one.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "simres", version, about = "Effective resistance on weighted simplicial complexes")]
struct Cli {
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Shared {
    /// Complex file (`simplex v0 ... vk [weight]` per line)
    #[arg(short, long, global = true, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Dimension p
    #[arg(short = 'p', long = "dim", global = true, value_name = "P")]
    dim: Option<usize>,
    #[arg(long, value_enum, global = true, default_value_t = BasisArg::Standard)]
    basis: BasisArg,
    /// Check tolerance (overrides SIMRES_TOL)
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisArg {
    Standard,
    Orthonormal,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Standard => Basis::Standard,
            BasisArg::Orthonormal => Basis::Orthonormal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpArg {
    Up,
    Down,
    Hodge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Chain,
    Cochain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricKind {
    Chain,
    Cycle,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simplex counts and Betti numbers
    Info {
        /// Print every simplex with its weight instead, in input format
        #[arg(long)]
        dump: bool,
    },
    /// Matrix of an up, down or Hodge Laplacian (default p = 0)
    Laplacian {
        #[arg(long, value_enum, default_value_t = OpArg::Hodge)]
        op: OpArg,
        #[arg(long, value_enum, default_value_t = SideArg::Cochain)]
        side: SideArg,
    },
    /// Per-simplex resistances and the bilinear-form matrix (all p if omitted)
    Resistance,
    /// Resistance distance between two vertices: `vertex-er u=1 v=2`
    VertexEr {
        #[arg(value_name = "u=ID")]
        u: String,
        #[arg(value_name = "v=ID")]
        v: String,
    },
    /// Solve a circuit for a boundary current, e.g. `--beta 1=1 --beta 2=-1`
    Circuit {
        /// `VERTICES=VALUE` with vertices joined by `-` (`1-2=0.5`)
        #[arg(long, required = true, allow_hyphen_values = true, value_name = "SIMPLEX=VALUE")]
        beta: Vec<String>,
    },
    /// Pairwise distances of the chain pseudometric or the cycle metric
    Metric {
        #[arg(long, value_enum, default_value_t = MetricKind::Chain)]
        kind: MetricKind,
    },
    /// Foster's identity for each p (exit 0 iff every check passes)
    Foster,
    /// Compare the equivalent resistance formulas (exit 0 iff they agree)
    EquivCheck,
    /// Eigenvalues of the orthonormal chain ER operator
    Spectrum,
}

/// Exit code and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: msg.into(),
        }
    }

    fn domain(e: &Error) -> Self {
        Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error[{}]: {}\n", e.kind(), e),
        }
    }
}

struct Ctx {
    k: WeightedComplex,
    p: Option<usize>,
    basis: Basis,
    tol: f64,
    cfg: PseudoinverseConfig,
}

/// Rendered report plus exit code.
struct Report {
    text: String,
    json: Value,
    code: i32,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, code: 0 }
    }
}

fn parse_tol(s: &str, origin: &str) -> std::result::Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("error: invalid tolerance `{s}` from {origin}: expected a positive number\n")),
    }
}

/// Runs one command line. `env_tol` is the value of [`TOL_ENV`], read once by
/// the caller.
pub fn run<I, T>(args: I, env_tol: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: rendered,
                    stderr: String::new(),
                },
                _ => Outcome::usage(rendered),
            };
        }
    };
    let tol = match (cli.shared.tol, env_tol) {
        (Some(t), _) => match parse_tol(&t.to_string(), "--tol") {
            Ok(t) => t,
            Err(m) => return Outcome::usage(m),
        },
        (None, Some(s)) => match parse_tol(s, TOL_ENV) {
            Ok(t) => t,
            Err(m) => return Outcome::usage(m),
        },
        (None, None) => DEFAULT_TOL,
    };
    let Some(path) = cli.shared.input.as_ref() else {
        return Outcome::usage("error: the following required argument was not provided: --input <PATH>\n");
    };
    // flags that do not need the complex are checked before it is read
    let vertex_pair = match &cli.command {
        Command::VertexEr { u, v } => match (vertex_arg(u, "u"), vertex_arg(v, "v")) {
            (Ok(u), Ok(v)) => Some((u, v)),
            (Err(m), _) | (_, Err(m)) => return Outcome::usage(m),
        },
        _ => None,
    };
    let beta = match &cli.command {
        Command::Circuit { beta } => match parse_beta(beta) {
            Ok(b) => Some(b),
            Err(m) => return Outcome::usage(m),
        },
        _ => None,
    };
    let k = match io::parse_complex(path) {
        Ok(k) => k,
        Err(e) => return Outcome::domain(&e),
    };
    let ctx = Ctx {
        k,
        p: cli.shared.dim,
        basis: cli.shared.basis.into(),
        tol,
        cfg: PseudoinverseConfig::default(),
    };
    let result = match &cli.command {
        Command::Info { dump } => info(&ctx, *dump),
        Command::Laplacian { op, side } => laplacian_cmd(&ctx, *op, *side),
        Command::Resistance => resistance_cmd(&ctx),
        Command::VertexEr { .. } => {
            let (u, v) = vertex_pair.expect("parsed above");
            vertex_er_cmd(&ctx, u, v)
        }
        Command::Circuit { .. } => circuit_cmd(&ctx, beta.as_deref().expect("parsed above")),
        Command::Metric { kind } => metric_cmd(&ctx, *kind),
        Command::Foster => foster_cmd(&ctx),
        Command::EquivCheck => equiv_cmd(&ctx),
        Command::Spectrum => spectrum_cmd(&ctx),
    };
    match result {
        Ok(r) => {
            let stdout = match cli.shared.format {
                Format::Text => r.text,
                Format::Structured => {
                    let mut s = serde_json::to_string_pretty(&r.json).expect("report serializes");
                    s.push('\n');
                    s
                }
            };
            Outcome {
                code: r.code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => Outcome::domain(&e),
    }
}

fn vertex_arg(s: &str, name: &str) -> std::result::Result<u64, String> {
    let raw = s.strip_prefix(&format!("{name}=")).unwrap_or(s);
    raw.parse()
        .map_err(|_| format!("error: invalid vertex `{s}`, expected {name}=ID\n"))
}

fn parse_beta(entries: &[String]) -> std::result::Result<Vec<(Vec<u64>, f64)>, String> {
    let mut out = Vec::new();
    for e in entries {
        let bad = || format!("error: invalid --beta `{e}`, expected SIMPLEX=VALUE such as 1-2=0.5\n");
        let (s, v) = e.split_once('=').ok_or_else(bad)?;
        let verts = s
            .split('-')
            .map(|t| t.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        let val: f64 = v.trim().parse().map_err(|_| bad())?;
        if !val.is_finite() {
            return Err(bad());
        }
        out.push((verts, val));
    }
    let d = out[0].0.len();
    if out.iter().any(|(s, _)| s.len() != d) {
        return Err("error: --beta entries must all have the same dimension\n".into());
    }
    Ok(out)
}

/// Dimensions to report: the requested one, or every p in `min..=max`.
fn dims(ctx: &Ctx, min: usize, max: usize) -> Result<Vec<usize>> {
    match ctx.p {
        Some(p) => {
            ctx.k.check_dim(p, min, max)?;
            Ok(vec![p])
        }
        None if min > max => Err(Error::DimOutOfRange { p: min, min, max }),
        None => Ok((min..=max).collect()),
    }
}

fn row_text(row: impl Iterator<Item = f64>) -> String {
    row.map(fmt_g).collect::<Vec<_>>().join(" ")
}

fn matrix_text(out: &mut String, m: &DMatrix<f64>) {
    for i in 0..m.nrows() {
        let _ = writeln!(out, "{}", row_text(m.row(i).iter().copied()));
    }
}

fn matrix_json(m: &OpMatrix) -> Value {
    let rows: Vec<Vec<f64>> = (0..m.entries.nrows())
        .map(|i| m.entries.row(i).iter().copied().collect())
        .collect();
    json!({
        "domain": m.domain.to_string(),
        "codomain": m.codomain.to_string(),
        "entries": rows,
    })
}

fn chain_text(out: &mut String, k: &WeightedComplex, v: &ChainVec) {
    for (s, x) in k.simplices(v.dim()).iter().zip(v.coeffs.iter()) {
        let _ = writeln!(out, "{s}  {}", fmt_g(*x));
    }
}

fn chain_json(k: &WeightedComplex, v: &ChainVec) -> Value {
    json!({
        "basis": v.basis.to_string(),
        "simplices": k.simplices(v.dim()),
        "coeffs": v.coeffs.as_slice(),
    })
}

fn info(ctx: &Ctx, dump: bool) -> Result<Report> {
    let k = &ctx.k;
    if dump {
        let text = io::write_complex(k);
        let json = json!({ "complex": text });
        return Ok(Report::ok(text, json));
    }
    let counts = k.counts();
    let betti = laplacian::betti_numbers(k, &ctx.cfg)?;
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let text = format!(
        "dim {}\ncounts {}\nbetti {}\n",
        k.dim(),
        join(&counts),
        join(&betti)
    );
    let json = json!({ "dim": k.dim(), "counts": counts, "betti": betti });
    Ok(Report::ok(text, json))
}

fn laplacian_cmd(ctx: &Ctx, op: OpArg, side: SideArg) -> Result<Report> {
    let op = match op {
        OpArg::Up => LaplacianOp::Up,
        OpArg::Down => LaplacianOp::Down,
        OpArg::Hodge => LaplacianOp::Hodge,
    };
    let side = match side {
        SideArg::Chain => Side::Chain,
        SideArg::Cochain => Side::Cochain,
    };
    let p = ctx.p.unwrap_or(0);
    let m = laplacian::laplacian(&ctx.k, p, LaplacianKind::new(op, side, ctx.basis))?;
    let name = match op {
        LaplacianOp::Up => "up",
        LaplacianOp::Down => "down",
        LaplacianOp::Hodge => "hodge",
    };
    let mut text = format!("# {name} Laplacian on the {}\n", m.domain);
    matrix_text(&mut text, &m.entries);
    let json = json!({ "op": op, "p": p, "matrix": matrix_json(&m) });
    Ok(Report::ok(text, json))
}

fn resistance_cmd(ctx: &Ctx) -> Result<Report> {
    let mut text = String::new();
    let mut reports = Vec::new();
    for p in dims(ctx, 1, ctx.k.dim())? {
        let r = resistance::er_report(&ctx.k, p, ctx.basis, &ctx.cfg)?;
        let _ = writeln!(text, "# p={p}, {}", r.basis);
        for s in &r.per_simplex {
            let _ = writeln!(text, "{}  r={}  wr={}", s.simplex, fmt_g(s.r), fmt_g(s.wr));
        }
        let _ = writeln!(text, "# matrix");
        matrix_text(&mut text, &r.matrix.entries);
        reports.push(json!({
            "p": r.p,
            "basis": r.basis.to_string(),
            "per_simplex": r.per_simplex,
            "matrix": matrix_json(&r.matrix),
        }));
    }
    Ok(Report::ok(text, json!({ "reports": reports })))
}

fn vertex_er_cmd(ctx: &Ctx, u: u64, v: u64) -> Result<Report> {
    let r = resistance::vertex_er(&ctx.k, u, v, &ctx.cfg)?;
    Ok(Report::ok(
        format!("{}\n", fmt_g(r)),
        json!({ "u": u, "v": v, "r": r }),
    ))
}

fn circuit_cmd(ctx: &Ctx, beta: &[(Vec<u64>, f64)]) -> Result<Report> {
    let k = &ctx.k;
    let q = beta[0].0.len() - 1;
    let p = q + 1;
    k.check_dim(p, 1, k.dim() + 1)?;
    let mut b = ChainVec::zeros(BasisTag::chain(q), k.n(q));
    for (verts, val) in beta {
        let s = Simplex::new(verts.clone())?;
        let i = k.index_of(&s).ok_or_else(|| Error::SimplexNotFound(s.to_string()))?;
        b.coeffs[i] += val;
    }
    let prob = CircuitProblem::new(k, p, b);
    let sol = circuits::solve_circuit(&prob, &ctx.cfg)?;
    let pass = sol.residuals.max() <= ctx.tol;
    let mut text = format!("# p={p}\n# current\n");
    chain_text(&mut text, k, &sol.alpha);
    text.push_str("# voltage\n");
    chain_text(&mut text, k, &sol.f);
    text.push_str("# potential\n");
    chain_text(&mut text, k, &sol.phi);
    let res = &sol.residuals;
    let _ = writeln!(
        text,
        "kcl={} kvl={} ohm={} {}",
        fmt_g(res.kcl),
        fmt_g(res.kvl),
        fmt_g(res.ohm),
        if pass { "PASS" } else { "FAIL" }
    );
    let json = json!({
        "p": p,
        "alpha": chain_json(k, &sol.alpha),
        "f": chain_json(k, &sol.f),
        "phi": chain_json(k, &sol.phi),
        "residuals": res,
        "pass": pass,
    });
    Ok(Report {
        text,
        json,
        code: if pass { 0 } else { 1 },
    })
}

fn metric_cmd(ctx: &Ctx, kind: MetricKind) -> Result<Report> {
    let k = &ctx.k;
    let (p, report) = match kind {
        MetricKind::Chain => {
            let p = ctx.p.unwrap_or(1);
            (p, metrics::chain_metric_report(k, p, ctx.tol, &ctx.cfg)?)
        }
        MetricKind::Cycle => {
            let p = ctx.p.unwrap_or(0);
            (p, metrics::cycle_metric_report(k, p, ctx.tol, &ctx.cfg)?)
        }
    };
    let mut text = format!("# p={p}\n");
    for (&(i, j), d) in report.pairs.iter().zip(&report.values) {
        let _ = writeln!(text, "{} {}  d={}", report.labels[i], report.labels[j], fmt_g(*d));
    }
    let _ = writeln!(text, "violations={}", report.violations.len());
    let code = if report.violations.is_empty() { 0 } else { 1 };
    let json = json!({ "p": p, "report": report });
    Ok(Report { text, json, code })
}

fn foster_cmd(ctx: &Ctx) -> Result<Report> {
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut all = true;
    for p in dims(ctx, 1, ctx.k.dim())? {
        let r = metrics::foster_check(&ctx.k, p, ctx.tol, &ctx.cfg)?;
        let _ = writeln!(
            text,
            "p={} lhs={} trace={} rank={} rhs={} {}",
            r.p,
            fmt_g(r.lhs_sum),
            fmt_g(r.trace_t),
            r.rank_b_transpose,
            r.rhs,
            if r.pass { "PASS" } else { "FAIL" }
        );
        all &= r.pass;
        reports.push(r);
    }
    Ok(Report {
        text,
        json: json!({ "reports": reports, "pass": all }),
        code: if all { 0 } else { 1 },
    })
}

fn deviation(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn opt_text(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), fmt_g)
}

fn matrix_deviation(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(&x, &y)| deviation(x, y)).fold(0.0, f64::max)
}

/// Resistance of a unit-current generator attached parallel to `s`.
fn generator_resistance(ctx: &Ctx, p: usize, i: usize) -> Result<Option<f64>> {
    let k = &ctx.k;
    let mut c = ChainVec::zeros(BasisTag::chain(p), k.n(p));
    c.coeffs[i] = -1.0;
    let gen = GeneratorAttachment::new(k.simplices(p)[i].vertices().to_vec(), c, 1.0)?;
    match circuits::kook_lee_resistance(k, &gen, &ctx.cfg) {
        Ok(r) => Ok(Some(r.r_prime)),
        Err(Error::DegenerateKernel(_) | Error::NotAGenerator(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn equiv_cmd(ctx: &Ctx) -> Result<Report> {
    let k = &ctx.k;
    let mut text = String::new();
    let mut blocks = Vec::new();
    let mut worst = 0.0f64;
    for p in dims(ctx, 1, k.dim())? {
        let bil = resistance::er_bilinear_matrix(k, p, Basis::Standard, &ctx.cfg)?.entries;
        let ost = resistance::osting_matrix(k, p, &ctx.cfg)?.entries;
        let kl = match resistance::kook_lee_matrix(k, p, &ctx.cfg) {
            Ok(m) => Some(m.entries),
            Err(Error::SingularHodgeLaplacian(_)) => None,
            Err(e) => return Err(e),
        };
        let dev_ost = matrix_deviation(&bil, &ost);
        let dev_kl = kl.as_ref().map(|m| matrix_deviation(&bil, m));
        let mut block_worst = dev_ost.max(dev_kl.unwrap_or(0.0));
        let _ = writeln!(text, "# p={p}");
        let _ = writeln!(text, "simplex  bilinear  osting  kook-lee  generator  black-maxwell");
        let mut rows = Vec::new();
        for (i, s) in k.simplices(p).iter().enumerate() {
            let r = bil[(i, i)];
            let o = ost[(i, i)];
            let l = kl.as_ref().map(|m| m[(i, i)]);
            let g = generator_resistance(ctx, p, i)?;
            let face = k.incidence(p).column(i).into_owned();
            let gamma = ChainVec::new(BasisTag::chain(p - 1), face);
            let bm = resistance::black_maxwell_er(k, &gamma, &ctx.cfg)?.finite();
            for x in [Some(o), l, g, bm].into_iter().flatten() {
                block_worst = block_worst.max(deviation(r, x));
            }
            if bm.is_none() {
                block_worst = f64::INFINITY;
            }
            let _ = writeln!(
                text,
                "{s}  {}  {}  {}  {}  {}",
                fmt_g(r),
                fmt_g(o),
                opt_text(l),
                opt_text(g),
                opt_text(bm)
            );
            rows.push(json!({
                "simplex": s,
                "bilinear": r,
                "osting": o,
                "kook_lee": l,
                "generator": g,
                "black_maxwell": bm,
            }));
        }
        let _ = writeln!(
            text,
            "matrix_deviation osting={} kook-lee={}",
            fmt_g(dev_ost),
            opt_text(dev_kl)
        );
        worst = worst.max(block_worst);
        blocks.push(json!({
            "p": p,
            "rows": rows,
            "matrix_deviation_osting": dev_ost,
            "matrix_deviation_kook_lee": dev_kl,
            "max_deviation": block_worst,
        }));
    }
    let pass = worst <= ctx.tol;
    let _ = writeln!(
        text,
        "max_deviation={} {}",
        fmt_g(worst),
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(Report {
        text,
        json: json!({ "blocks": blocks, "max_deviation": worst, "pass": pass }),
        code: if pass { 0 } else { 1 },
    })
}

fn spectrum_cmd(ctx: &Ctx) -> Result<Report> {
    let mut text = String::new();
    let mut out = Vec::new();
    for p in dims(ctx, 1, ctx.k.dim())? {
        let ev = metrics::er_operator_spectrum(&ctx.k, p, &ctx.cfg)?;
        let _ = writeln!(text, "# p={p}");
        for x in &ev {
            let _ = writeln!(text, "{}", fmt_g(*x));
        }
        out.push(json!({ "p": p, "eigenvalues": ev }));
    }
    Ok(Report::ok(text, json!({ "spectra": out })))
}
