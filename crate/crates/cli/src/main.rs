use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;
use tetra_core::aqsl3::{
    check_coordinate_ring_relations, intertwiner_check, prop41_constant_check, rho_images, rho_o, IntertwinerConfig,
    Violation, ZzzConfig,
};
use tetra_core::exactnum::{fmt_scalar, parse_scalar, LineParams, Param, Quartet, Scalar};
use tetra_core::kernels::{KernelType, RKernel};
use tetra_core::report::Report;
use tetra_core::rrrr::{rrrr_sweep, rrrr_sweep_wiring, Wiring, FINITE_TYPES};
use tetra_core::verify::{describe_relations, rlll_sweep, Window, SWEEP_DS};
use tetra_core::weyl::RepTag;

#[derive(Parser)]
#[command(name = "tetra", version, about = "Exact verification of 3D R kernels and tetrahedron equations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include elapsed_ms in the report (breaks byte-identical output)
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Clone)]
struct WindowArgs {
    /// Index range on F lines, e.g. -3..3
    #[arg(long, allow_hyphen_values = true, default_value = "-3..3")]
    window: String,
    /// Index range on F+ lines
    #[arg(long, default_value = "0..4")]
    fplus_window: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// RLLL relations of one kernel type over a window
    Rlll {
        #[arg(long = "type")]
        typ: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        /// Sector integer for mixed types; by default the trials cycle through 0, 1, -2
        #[arg(long, allow_hyphen_values = true)]
        d: Option<i64>,
        /// Parameter file; replaces the seeded points
        #[arg(long)]
        params: Option<PathBuf>,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Finite-sum RRRR tetrahedron equations
    Rrrr {
        #[arg(long = "type", required_unless_present = "all")]
        typ: Option<String>,
        /// Every finitely checkable type
        #[arg(long, conflicts_with = "typ")]
        all: bool,
        #[arg(long, default_value_t = 500)]
        pairs: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Parameter file with six lines
        #[arg(long, conflicts_with = "all")]
        params: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// One kernel element with its sector data
    Element {
        #[arg(long = "type")]
        typ: String,
        /// Outgoing indices a,b,c
        #[arg(long = "out-idx", allow_hyphen_values = true)]
        out_idx: String,
        /// Incoming indices i,j,k
        #[arg(long = "in-idx", allow_hyphen_values = true)]
        in_idx: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        d: i64,
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Intertwining relations of the OOO or ZZZ kernel
    Intertwiner {
        #[arg(long, value_enum, default_value_t = Mode::Ooo)]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Break one parameter constraint (1-9) in ZZZ mode
        #[arg(long)]
        violate: Option<usize>,
        /// Also check the constant identities of each coproduct image (ZZZ mode)
        #[arg(long)]
        constants: bool,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Defining relations of the coordinate ring under a representation
    AlgebraCheck {
        /// 1 or 2
        #[arg(long, default_value_t = 1)]
        rep: u8,
        #[arg(long, value_enum, default_value_t = Tag::Z)]
        tag: Tag,
        #[arg(long, default_value = "3/2")]
        q: String,
        #[arg(long, default_value = "2")]
        u: String,
        #[arg(long, default_value = "5/3")]
        g: String,
        #[arg(long, default_value = "-1/4")]
        h: String,
        /// mu for the O tag, where (u,g,h) = (1, 1/mu, mu)
        #[arg(long, default_value = "3/5")]
        mu: String,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        common: Common,
    },
    /// The 18 component relations of a type at a concrete index pair
    Recursions {
        #[arg(long = "type")]
        typ: String,
        #[arg(long = "out-idx", allow_hyphen_values = true)]
        out_idx: String,
        #[arg(long = "in-idx", allow_hyphen_values = true)]
        in_idx: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        d: i64,
        /// Also evaluate both sides
        #[arg(long)]
        evaluate: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ooo,
    Zzz,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tag {
    Z,
    X,
    O,
}

/// Invalid configuration; maps to exit status 2.
struct ConfigError(String);

impl<E: std::fmt::Display> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.to_string())
    }
}

type CliResult = Result<ExitCode, ConfigError>;

fn parse_range(s: &str) -> Result<(i64, i64), ConfigError> {
    let (a, b) = s.split_once("..").ok_or_else(|| ConfigError(format!("range {s:?} is not lo..hi")))?;
    let lo: i64 = a.trim().parse()?;
    let hi: i64 = b.trim().parse()?;
    if lo > hi {
        return Err(ConfigError(format!("empty range {s}")));
    }
    Ok((lo, hi))
}

fn window_of(w: &WindowArgs) -> Result<Window, ConfigError> {
    let fplus = parse_range(&w.fplus_window)?;
    if fplus.0 < 0 {
        return Err(ConfigError("F+ window must start at 0 or above".into()));
    }
    Ok(Window::new(fplus, parse_range(&w.window)?))
}

fn parse_triple(s: &str) -> Result<[i64; 3], ConfigError> {
    let v: Vec<i64> = s.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| ConfigError(format!("{s:?} is not three comma-separated integers")))
}

fn kernel_type(s: &str) -> Result<KernelType, ConfigError> {
    s.parse::<KernelType>().map_err(|e| ConfigError(e.to_string()))
}

/// Parameter files: rationals as "num/den" strings. A value that is the square of a
/// rational carries its root automatically; {"root": "a/b"} gives the root explicitly.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamFile {
    schema: u32,
    q: ParamSpec,
    lines: Vec<LineSpec>,
    #[serde(default)]
    d: Option<i64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ParamSpec {
    Value(String),
    Root { root: String },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LineSpec {
    Mu { mu: ParamSpec },
    Quartet { r: ParamSpec, s: ParamSpec, t: ParamSpec, w: ParamSpec },
}

const SCHEMA: u32 = 1;

impl ParamSpec {
    fn param(&self) -> Result<Param, ConfigError> {
        Ok(match self {
            ParamSpec::Value(v) => Param::from_value(parse_scalar(v)?),
            ParamSpec::Root { root } => Param::square(parse_scalar(root)?),
        })
    }
}

impl LineSpec {
    fn line(&self) -> Result<LineParams, ConfigError> {
        Ok(match self {
            LineSpec::Mu { mu } => LineParams::Mu(mu.param()?),
            LineSpec::Quartet { r, s, t, w } => {
                LineParams::Quartet(Quartet { r: r.param()?, s: s.param()?, t: t.param()?, w: w.param()? })
            }
        })
    }
}

fn read_params(path: &PathBuf, n_lines: usize) -> Result<(Param, Vec<LineParams>, Option<i64>), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let f: ParamFile = serde_json::from_str(&text)?;
    if f.schema != SCHEMA {
        return Err(ConfigError(format!("unsupported parameter schema {}", f.schema)));
    }
    if f.lines.len() != n_lines {
        return Err(ConfigError(format!("{} lines in parameter file, {} needed", f.lines.len(), n_lines)));
    }
    let lines = f.lines.iter().map(LineSpec::line).collect::<Result<Vec<_>, _>>()?;
    Ok((f.q.param()?, lines, f.d))
}

fn kernel_from_file(kind: KernelType, path: &PathBuf, d: Option<i64>) -> Result<RKernel, ConfigError> {
    let (q, lines, fd) = read_params(path, 3)?;
    let d = d.or(fd).unwrap_or(0);
    let lines: [LineParams; 3] = lines.try_into().expect("three lines");
    Ok(RKernel::new(kind, q, lines, d)?)
}

fn emit(mut rep: Report, common: &Common, started: Instant) -> CliResult {
    if common.timing {
        rep.elapsed_ms = Some(started.elapsed().as_millis() as u64);
    }
    let text = rep.to_json() + "\n";
    match &common.out {
        Some(p) => std::fs::write(p, text).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(if rep.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_rlll(
    typ: &str,
    seed: u64,
    trials: usize,
    d: Option<i64>,
    params: &Option<PathBuf>,
    w: &WindowArgs,
    common: &Common,
) -> CliResult {
    let started = Instant::now();
    let kind = kernel_type(typ)?;
    let window = window_of(w)?;
    let mut rep = Report::new("rlll", kind.name());
    rep.window = Some(window.describe());
    let kernels: Vec<RKernel> = match params {
        Some(p) => vec![kernel_from_file(kind, p, d)?],
        None => {
            rep.seed = Some(seed);
            (0..trials)
                .map(|t| {
                    let dd = if kind.has_sector_d() { d.unwrap_or(SWEEP_DS[t % 3]) } else { 0 };
                    RKernel::sample(kind, seed + t as u64, dd)
                })
                .collect::<Result<_, _>>()?
        }
    };
    for (t, k) in kernels.iter().enumerate() {
        let r = rlll_sweep(k, &window)?;
        for (name, val) in &r.params {
            rep.params.insert(format!("{}[{}]", name, t), val.clone());
        }
        rep.absorb(r);
    }
    emit(rep, common, started)
}

fn cmd_rrrr(
    typ: &Option<String>,
    all: bool,
    pairs: usize,
    seed: u64,
    params: &Option<PathBuf>,
    common: &Common,
) -> CliResult {
    let started = Instant::now();
    if all {
        let mut agg = Report::new("rrrr", "all");
        agg.seed = Some(seed);
        for t in FINITE_TYPES {
            let r = rrrr_sweep(t, seed, pairs)?;
            agg.params.insert(t.into(), if r.passed() { "pass".into() } else { format!("fail ({})", r.count("failed")) });
            agg.bump("types", 1);
            agg.absorb(r);
        }
        return emit(agg, common, started);
    }
    let typ = typ.as_deref().expect("clap requires --type without --all");
    if !FINITE_TYPES.contains(&typ) {
        return Err(ConfigError(format!("{typ} is not one of the finitely checkable RRRR types")));
    }
    let rep = match params {
        Some(p) => {
            let (q, lines, _) = read_params(p, 6)?;
            let w = Wiring::from_lines(typ, q, lines)?;
            rrrr_sweep_wiring(&w, seed, pairs)?
        }
        None => rrrr_sweep(typ, seed, pairs)?,
    };
    emit(rep, common, started)
}

fn opt_i(x: Option<i64>) -> String {
    x.map_or("-".into(), |v| v.to_string())
}

fn opt_s(x: &Option<Scalar>) -> String {
    x.as_ref().map_or("-".into(), fmt_scalar)
}

fn cmd_element(typ: &str, out: &str, inn: &str, seed: u64, d: i64, params: &Option<PathBuf>) -> CliResult {
    let kind = kernel_type(typ)?;
    let (out, inn) = (parse_triple(out)?, parse_triple(inn)?);
    let k = match params {
        Some(p) => kernel_from_file(kind, p, Some(d))?,
        None => RKernel::sample(kind, seed, d)?,
    };
    for (name, v) in k.describe_params() {
        println!("{name} = {v}");
    }
    let v = k.element(out, inn)?;
    println!("R^{{{},{},{}}}_{{{},{},{}}} = {}", out[0], out[1], out[2], inn[0], inn[1], inn[2], fmt_scalar(&v));
    if let Some(why) = k.support_violation(out, inn) {
        println!("zero by support: {why}");
    }
    let s = k.sector_of(out, inn);
    if let Some(dd) = s.d {
        println!("d1,d2,d3,d4 = {},{},{},{}", dd[0], dd[1], dd[2], dd[3]);
    }
    if let Some(tp) = s.twice_phi {
        println!("phi = {}", if tp % 2 == 0 { (tp / 2).to_string() } else { format!("{tp}/2") });
    }
    if s.e.is_some() || s.f.is_some() || s.g.is_some() || s.h.is_some() {
        println!("e,f,g,h = {},{},{},{}", opt_i(s.e), opt_i(s.f), opt_i(s.g), opt_i(s.h));
    }
    if s.x.is_some() || s.y.is_some() || s.z.is_some() {
        println!("x,y,z = {},{},{}", opt_s(&s.x), opt_s(&s.y), opt_s(&s.z));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_intertwiner(
    mode: Mode,
    seed: u64,
    violate: Option<usize>,
    constants: bool,
    w: &WindowArgs,
    common: &Common,
) -> CliResult {
    let started = Instant::now();
    let window = window_of(w)?;
    let mut rep = match mode {
        Mode::Ooo => {
            if violate.is_some() || constants {
                return Err(ConfigError("--violate and --constants apply to ZZZ mode only".into()));
            }
            intertwiner_check(&IntertwinerConfig::sample_ooo(seed), &window)?
        }
        Mode::Zzz => {
            let v = match violate {
                None => None,
                Some(n @ 1..=9) => Some(Violation::ALL[n - 1]),
                Some(n) => return Err(ConfigError(format!("--violate takes 1..9, got {n}"))),
            };
            let cfg = ZzzConfig::sample(seed).with_violation(v);
            let mut r = intertwiner_check(&IntertwinerConfig::Zzz(cfg.clone()), &window)?;
            if constants {
                r.absorb(prop41_constant_check(&cfg, &window)?);
            }
            r
        }
    };
    rep.seed = Some(seed);
    emit(rep, common, started)
}

#[allow(clippy::too_many_arguments)]
fn cmd_algebra(rep_n: u8, tag: Tag, q: &str, u: &str, g: &str, h: &str, mu: &str, w: &WindowArgs, common: &Common) -> CliResult {
    let started = Instant::now();
    let window = window_of(w)?;
    let q = parse_scalar(q)?;
    let img = match tag {
        Tag::O => rho_o(rep_n, &q, &parse_scalar(mu)?)?,
        _ => rho_images(rep_n, &q, &parse_scalar(u)?, &parse_scalar(g)?, &parse_scalar(h)?)?,
    };
    let t = match tag {
        Tag::Z => RepTag::ZPlus,
        Tag::X => RepTag::X,
        Tag::O => RepTag::O,
    };
    let mut rep = check_coordinate_ring_relations(&img, t, &q, &window);
    rep.params.insert("q".into(), fmt_scalar(&q));
    emit(rep, common, started)
}

fn cmd_recursions(typ: &str, out: &str, inn: &str, seed: u64, d: i64, evaluate: bool) -> CliResult {
    let kind = kernel_type(typ)?;
    let (out, inn) = (parse_triple(out)?, parse_triple(inn)?);
    let k = RKernel::sample(kind, seed, d)?;
    for (name, v) in k.describe_params() {
        println!("{name} = {v}");
    }
    let lines = describe_relations(&k, out, inn)?;
    let mut ok = true;
    for (line, v) in lines.iter().zip(tetra_core::lops::vtuples()) {
        if evaluate {
            let (l, r) = tetra_core::verify::rlll_check_pair(&k, v, out, inn)?;
            ok &= l == r;
            println!("{line}    [{} = {}]", fmt_scalar(&l), fmt_scalar(&r));
        } else {
            println!("{line}");
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> CliResult {
    match cli.cmd {
        Cmd::Rlll { typ, seed, trials, d, params, window, common } => {
            cmd_rlll(&typ, seed, trials, d, &params, &window, &common)
        }
        Cmd::Rrrr { typ, all, pairs, seed, params, common } => cmd_rrrr(&typ, all, pairs, seed, &params, &common),
        Cmd::Element { typ, out_idx, in_idx, seed, d, params } => cmd_element(&typ, &out_idx, &in_idx, seed, d, &params),
        Cmd::Intertwiner { mode, seed, violate, constants, window, common } => {
            cmd_intertwiner(mode, seed, violate, constants, &window, &common)
        }
        Cmd::AlgebraCheck { rep, tag, q, u, g, h, mu, window, common } => {
            cmd_algebra(rep, tag, &q, &u, &g, &h, &mu, &window, &common)
        }
        Cmd::Recursions { typ, out_idx, in_idx, seed, d, evaluate } => {
            cmd_recursions(&typ, &out_idx, &in_idx, seed, d, evaluate)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
