//! Command-line front end: `series`, `sw`, `witten`, `dim`, `verify`, `blowdown`, `logt`, `audit`.
//!
//! [`run`] does all the work and returns the exit code with the captured output,
//! so the binary is a thin wrapper and tests can drive the commands in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::sync::Arc;

use blowdown::catalog::{
    adjunction_audit, donaldson_closed_form, donaldson_pipeline, fiber_class, parse_spec,
    sw_closed_form, witten_catalog, ManifoldSpec, ELLIPTIC_PAIRS,
};
use blowdown::lattice::{
    plumbing_inverse, plumbing_matrix, Basis, HClass, IntersectionLattice, RelClassCp,
};
use blowdown::moduli::{dim_report, verify_bv_lemmas, verify_lemma_dim, CanonicalClass};
use blowdown::rational::{format_rational, identity, mat_mul};
use blowdown::swinv::{printed_witten_exponent, witten_check, witten_exponent, SWMap};
use blowdown::transform::{
    formal_log_coefficients, log_transform, nodal_log_pipeline, p2_blowdown, taut_blowdown,
    verify_double_expansion, verify_kappa_j, verify_pa_identity, BlowdownResult, ManifoldSeries,
    MapStatus,
};
use blowdown::{ConfigCp, Error, ExpKernel};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::Zero;
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SEMANTIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "blowdown",
    version,
    about = "Exact Donaldson and Seiberg–Witten computations for rational blowdowns"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Donaldson series of a manifold.
    Series {
        spec: String,
        /// Build from transforms instead of the closed formula.
        #[arg(long)]
        pipeline: bool,
    },
    /// Seiberg–Witten basic classes and values.
    Sw { spec: String },
    /// Compare the Donaldson kernel with 2^c(X) times the SW sum.
    Witten { spec: String },
    /// Formal dimension of reducible moduli on C_p.
    Dim(DimArgs),
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Largest p checked (lattice 50, lemmas 5, identities 7).
        #[arg(long)]
        p_max: Option<i64>,
        /// Half-width of the brute-force search box (default 4).
        #[arg(long = "box")]
        bound: Option<i64>,
        /// Largest t in the canonical-dimension check (default 2).
        #[arg(long)]
        t_max: Option<i64>,
    },
    /// Rationally blow down a chain of spheres in a manifold.
    Blowdown {
        spec: String,
        /// Sphere classes in chain order, e.g. `f-2*e1`; `p` is one more than the count.
        #[arg(long = "sphere", required = true)]
        spheres: Vec<String>,
        /// Adjoin an orthogonal class `NAME:SQUARE` before blowing down.
        #[arg(long = "extend")]
        extend: Vec<String>,
    },
    /// Log transform of order p on a fiber class.
    Logt {
        spec: String,
        /// Multiplicity of the transformed fiber.
        #[arg(long)]
        p: i64,
        /// Fiber direction.
        #[arg(long, default_value = "f")]
        fiber: String,
        /// Realise the transform as blowup followed by a nodal rational blowdown.
        #[arg(long)]
        nodal: bool,
    },
    /// Characteristic-number and basic-class audit.
    Audit { spec: String },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct DimArgsClass {
    /// `t,b` for the class ⟨t, t+1; b⟩.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub canonical: Option<Vec<i64>>,
    /// δ-coordinates.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    pub delta: Option<Vec<i64>>,
    /// γ-coordinates.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    pub gamma: Option<Vec<i64>>,
}

#[derive(Args, Debug)]
pub struct DimArgs {
    /// Chain length plus one.
    #[arg(long)]
    pub p: i64,
    #[command(flatten)]
    pub class: DimArgsClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lattice,
    Lemmas,
    Identities,
    Witten,
    All,
}

/// Exit code and captured streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }
}

/// One named check of a verification suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(suite: &str, name: &str, pass: bool, detail: String) -> Check {
    Check {
        suite: suite.into(),
        name: name.into(),
        pass,
        detail,
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match execute(&cli) {
        Ok(out) => out,
        Err(e) => {
            let code = match e {
                Error::Parse { .. } => EXIT_USAGE,
                _ => EXIT_SEMANTIC,
            };
            Outcome {
                code,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }
        }
    }
}

fn execute(cli: &Cli) -> blowdown::Result<Outcome> {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Series { spec, pipeline } => {
            let sp = parse_spec(spec)?;
            let m = if *pipeline {
                donaldson_pipeline(&sp)?
            } else {
                donaldson_closed_form(&sp)?
            };
            Ok(Outcome::ok(if json {
                to_json(&series_json(&sp, &m))
            } else {
                series_text(&m)
            }))
        }
        Command::Sw { spec } => {
            let sp = parse_spec(spec)?;
            let m = sw_closed_form(&sp)?;
            Ok(Outcome::ok(if json {
                to_json(&sw_json(&sp, &m))
            } else {
                sw_text(&m)
            }))
        }
        Command::Witten { spec } => cmd_witten(&parse_spec(spec)?, json),
        Command::Dim(args) => cmd_dim(args, json),
        Command::Verify {
            suite,
            p_max,
            bound,
            t_max,
        } => {
            let checks = run_suite(*suite, *p_max, *bound, *t_max)?;
            Ok(render_checks(&checks, json))
        }
        Command::Blowdown {
            spec,
            spheres,
            extend,
        } => cmd_blowdown(&parse_spec(spec)?, spheres, extend, json),
        Command::Logt {
            spec,
            p,
            fiber,
            nodal,
        } => {
            let sp = parse_spec(spec)?;
            let m = donaldson_closed_form(&sp)?;
            let s = fiber_class(m.lattice(), fiber)?;
            let out = if *nodal {
                nodal_log_pipeline(&m, &s, *p)?
            } else {
                log_transform(&m, &s, *p)?
            };
            Ok(Outcome::ok(if json {
                to_json(&series_json(&sp, &out))
            } else {
                series_text(&out)
            }))
        }
        Command::Audit { spec } => {
            let report = adjunction_audit(&parse_spec(spec)?)?;
            let text = if json {
                to_json(&serde_json::to_value(&report).expect("serializable"))
            } else {
                let mut s = format!(
                    "{}\ne={}  sign={}  b+={}  c1^2={}  c2={}\n",
                    report.spec,
                    report.euler,
                    report.signature,
                    report.b_plus,
                    report.c1_squared,
                    report.c2
                );
                for c in &report.classes {
                    let _ = writeln!(s, "{}  class {}  square {}", mark(c.ok), c.class, c.square);
                }
                for c in &report.identities {
                    let _ = writeln!(
                        s,
                        "{}  {} = {} (expected {})",
                        mark(c.ok),
                        c.name,
                        c.value,
                        c.expected
                    );
                }
                let _ = writeln!(s, "audit: {}", if report.pass { "pass" } else { "fail" });
                s
            };
            let code = if report.pass {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            };
            Ok(Outcome {
                code,
                stdout: text,
                stderr: String::new(),
            })
        }
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn class_label(c: &HClass) -> String {
    let s = c.to_string();
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

/// `k^2=2  k.s2=3`: every diagonal entry and the nonzero off-diagonal ones.
pub fn lattice_summary(l: &IntersectionLattice) -> String {
    let names = l.names();
    let g = l.gram();
    let mut parts = Vec::new();
    for i in 0..names.len() {
        parts.push(format!("{}^2={}", names[i], format_rational(&g[i][i])));
        for j in i + 1..names.len() {
            if !g[i][j].is_zero() {
                parts.push(format!(
                    "{}.{}={}",
                    names[i],
                    names[j],
                    format_rational(&g[i][j])
                ));
            }
        }
    }
    parts.join("  ")
}

fn kernel_lines(k: &ExpKernel) -> String {
    let mut s = String::new();
    for c in k.classes().collect::<Vec<_>>().into_iter().rev() {
        let _ = writeln!(
            s,
            "  {}  {}",
            format_rational(&k.coefficient(c.coeffs())),
            class_label(&c)
        );
    }
    s
}

fn numbers_line(e: i64, sign: i64, b: i64) -> String {
    format!("e={e}  sign={sign}  b+={b}\n")
}

pub fn series_text(m: &ManifoldSeries) -> String {
    let mut s = format!(
        "{}  {}\n",
        m.kernel().describe(),
        lattice_summary(m.lattice())
    );
    s.push_str(&kernel_lines(m.kernel()));
    s.push_str(&numbers_line(m.euler(), m.signature(), m.b_plus()));
    s
}

fn series_json(sp: &ManifoldSpec, m: &ManifoldSeries) -> Value {
    json!({
        "spec": sp.to_string(),
        "form": m.kernel().describe(),
        "series": serde_json::to_value(m).expect("serializable"),
    })
}

pub fn sw_text(m: &SWMap) -> String {
    let mut s = format!("{}  {}\n", m, lattice_summary(m.lattice()));
    let squares = m.squares();
    for c in m.classes().collect::<Vec<_>>().into_iter().rev() {
        let _ = writeln!(
            s,
            "  {}  {}  square {}",
            m.value(c.coeffs()),
            class_label(&c),
            format_rational(&squares[c.coeffs()])
        );
    }
    s.push_str(&numbers_line(m.euler(), m.signature(), m.b_plus()));
    s
}

fn sw_json(sp: &ManifoldSpec, m: &SWMap) -> Value {
    json!({ "spec": sp.to_string(), "sw": serde_json::to_value(m).expect("serializable") })
}

fn cmd_witten(sp: &ManifoldSpec, json: bool) -> blowdown::Result<Outcome> {
    let d = donaldson_closed_form(sp)?;
    let m = sw_closed_form(sp)?;
    let c = witten_exponent(d.euler(), d.signature())?;
    let printed = printed_witten_exponent(d.euler(), d.signature(), d.b_plus());
    let pass = witten_check(&d, &m)?;
    let stdout = if json {
        to_json(&json!({
            "spec": sp.to_string(),
            "exponent": c,
            "printed_exponent": format_rational(&printed),
            "donaldson": d.kernel().describe(),
            "sw": m.to_string(),
            "pass": pass,
        }))
    } else {
        format!(
            "{sp}\nc(X)={c}  printed={}\nD: {}\nSW: {}\nwitten: {}\n",
            format_rational(&printed),
            d.kernel().describe(),
            m,
            if pass { "pass" } else { "fail" }
        )
    };
    Ok(Outcome {
        code: if pass { EXIT_OK } else { EXIT_VERIFY_FAILED },
        stdout,
        stderr: String::new(),
    })
}

fn cmd_dim(args: &DimArgs, json: bool) -> blowdown::Result<Outcome> {
    let p = args.p;
    let e = if let Some(tb) = &args.class.canonical {
        if tb.len() != 2 {
            return Err(Error::InvalidParameter("--canonical takes t,b".into()));
        }
        CanonicalClass::new(p, tb[0], tb[1])?.to_rel()
    } else if let Some(d) = &args.class.delta {
        RelClassCp::new(p, d.clone())?
    } else {
        let g = args.class.gamma.clone().unwrap_or_default();
        RelClassCp::from_coords(p, g, Basis::Gamma)?
    };
    let r = dim_report(&e)?;
    let stdout = if json {
        to_json(&serde_json::to_value(&r).expect("serializable"))
    } else {
        format!(
            "p={p}  delta=({})\ne^2={}\nboundary={}\nboundary'={}\ndim={}\n",
            e.delta
                .iter()
                .map(i64::to_string)
                .collect::<Vec<_>>()
                .join(","),
            format_rational(&r.e_square),
            r.boundary,
            r.boundary_class,
            r.dim
        )
    };
    Ok(Outcome::ok(stdout))
}

/// Parses `2*f_3 - e1 + s2` over the basis names of `l`.
pub fn parse_class(l: &Arc<IntersectionLattice>, text: &str) -> blowdown::Result<HClass> {
    let src: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let err = |msg: &str| Error::InvalidParameter(format!("class '{text}': {msg}"));
    if src.is_empty() {
        return Err(err("empty expression"));
    }
    let mut coeffs = vec![0i64; l.rank()];
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = 1;
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -1;
            }
            i += 1;
        } else if i > 0 {
            return Err(err("expected '+' or '-'"));
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let mut k = 1i64;
        if i > start {
            k = src[start..i].parse().map_err(|_| err("bad integer"))?;
            if i < bytes.len() && bytes[i] == b'*' {
                i += 1;
            } else {
                return Err(err("expected '*' after coefficient"));
            }
        }
        let start = i;
        while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
            i += 1;
        }
        let name = &src[start..i];
        let idx = l.names().iter().position(|n| n == name).ok_or_else(|| {
            err(&format!(
                "unknown basis name '{name}' (have {})",
                l.names().join(", ")
            ))
        })?;
        coeffs[idx] += sign * k;
    }
    HClass::new(l, coeffs)
}

fn extend_series(m: &ManifoldSeries, specs: &[String]) -> blowdown::Result<ManifoldSeries> {
    if specs.is_empty() {
        return Ok(m.clone());
    }
    let mut names = Vec::new();
    let mut squares = Vec::new();
    for s in specs {
        let (name, sq) = s.split_once(':').ok_or_else(|| {
            Error::InvalidParameter(format!("--extend '{s}': expected NAME:SQUARE"))
        })?;
        let sq: i64 = sq
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("--extend '{s}': bad square")))?;
        names.push(name.trim().to_string());
        squares.push(blowdown::rational::rat(sq));
    }
    let l = m.lattice().extend(&names, &squares)?;
    let r = m.lattice().rank();
    let kernel = m.kernel().transport(&l, |c| {
        let mut v = c.to_vec();
        v.resize(r + names.len(), 0);
        v
    });
    ManifoldSeries::new(kernel, m.euler(), m.signature(), m.b_plus())
}

fn cmd_blowdown(
    sp: &ManifoldSpec,
    spheres: &[String],
    extend: &[String],
    json: bool,
) -> blowdown::Result<Outcome> {
    let m = extend_series(&donaldson_closed_form(sp)?, extend)?;
    let classes: Vec<HClass> = spheres
        .iter()
        .map(|s| parse_class(m.lattice(), s))
        .collect::<blowdown::Result<_>>()?;
    let result: BlowdownResult = if classes.len() == 1 {
        p2_blowdown(&m, &classes[0])?
    } else {
        let config = ConfigCp::new(classes.len() as i64 + 1, m.lattice(), classes)?;
        taut_blowdown(&m, &config)?
    };
    let stdout = if json {
        to_json(
            &json!({ "spec": sp.to_string(), "result": serde_json::to_value(&result).expect("serializable") }),
        )
    } else {
        let mut s = series_text(&result.series);
        s.push_str("class map:\n");
        for e in &result.class_map {
            let status = match e.status {
                MapStatus::Kept => "kept",
                MapStatus::Dropped => "dropped",
            };
            let _ = writeln!(
                s,
                "  {}  ->  {}  square {}  boundary {}  {status}",
                if e.source.is_empty() { "0" } else { &e.source },
                e.image
                    .as_deref()
                    .map(|i| if i.is_empty() { "0" } else { i })
                    .unwrap_or("-"),
                format_rational(&e.square),
                e.boundary
            );
        }
        s
    };
    Ok(Outcome::ok(stdout))
}

fn range_check(
    suite: &str,
    name: &str,
    ps: impl Iterator<Item = i64>,
    f: impl Fn(i64) -> blowdown::Result<bool>,
) -> blowdown::Result<Check> {
    let mut failed = Vec::new();
    let mut first = None;
    let mut last = 0;
    for p in ps {
        first.get_or_insert(p);
        last = p;
        if !f(p)? {
            failed.push(p);
        }
    }
    let range = format!("p={}..{last}", first.unwrap_or(last));
    let detail = if failed.is_empty() {
        range
    } else {
        format!("{range}, failed at {failed:?}")
    };
    Ok(check(suite, name, failed.is_empty(), detail))
}

fn suite_lattice(p_max: i64) -> blowdown::Result<Vec<Check>> {
    let inverse = range_check("lattice", "plumbing-inverse", 2..=p_max, |p| {
        Ok(mat_mul(&plumbing_matrix(p)?, &plumbing_inverse(p)?) == identity((p - 1) as usize))
    })?;
    Ok(vec![inverse])
}

fn suite_lemmas(p_max: i64, bound: i64, t_max: i64) -> blowdown::Result<Vec<Check>> {
    let mut out = Vec::new();
    let dim = verify_lemma_dim(2..=p_max, 0..=t_max)?;
    out.push(check(
        "lemmas",
        "canonical-dimension",
        dim.pass,
        format!(
            "p=2..{p_max} t=0..{t_max}: {} classes, {} counterexamples",
            dim.checked,
            dim.counterexamples.len()
        ),
    ));
    for p in 2..=p_max {
        for r in verify_bv_lemmas(p, t_max, bound)? {
            out.push(check(
                "lemmas",
                &r.lemma,
                r.pass,
                format!(
                    "p={p} t_max={t_max} box={bound}: {} pairs, {} counterexamples",
                    r.checked,
                    r.counterexamples.len()
                ),
            ));
        }
    }
    Ok(out)
}

fn all_ones_summing_to_p(p: i64) -> blowdown::Result<bool> {
    let b = formal_log_coefficients(p)?;
    let one = blowdown::rational::rat(1);
    Ok(b.len() == p as usize && b.values().all(|c| *c == one))
}

fn ponq(n: i64, p: i64, q: i64) -> blowdown::Result<bool> {
    let base = donaldson_closed_form(&ManifoldSpec::elliptic(n, &[]))?;
    let closed = donaldson_closed_form(&ManifoldSpec::elliptic(n, &[p, q]))?;
    let once = log_transform(&base, &fiber_class(base.lattice(), "f")?, p)?;
    let twice = log_transform(&once, &fiber_class(once.lattice(), "f")?, q)?;
    Ok(twice == closed)
}

fn suite_identities(p_max: i64) -> blowdown::Result<Vec<Check>> {
    let s = "identities";
    let mut out = vec![
        range_check(s, "pa-identity", 2..=p_max, verify_pa_identity)?,
        range_check(s, "kappa-j-restriction", 2..=p_max.min(12), verify_kappa_j)?,
        range_check(
            s,
            "log-coefficients-all-ones",
            2..=p_max,
            all_ones_summing_to_p,
        )?,
        range_check(
            s,
            "double-expansion",
            (3..=p_max).filter(|p| p % 2 == 1),
            verify_double_expansion,
        )?,
    ];
    let mut failed = Vec::new();
    let mut count = 0;
    for n in 2..=3 {
        for p in 2..=p_max {
            for q in 1..=p_max {
                if num::integer::gcd(p, q) == 1 {
                    count += 1;
                    if !ponq(n, p, q)? {
                        failed.push((n, p, q));
                    }
                }
            }
        }
    }
    let detail = if failed.is_empty() {
        format!("{count} coprime (n,p,q) triples")
    } else {
        format!("{count} triples, failed at {failed:?}")
    };
    out.push(check(s, "ponq-multiplicativity", failed.is_empty(), detail));
    Ok(out)
}

fn suite_witten() -> blowdown::Result<Vec<Check>> {
    let mut out = Vec::new();
    for sp in witten_catalog() {
        let d = donaldson_closed_form(&sp)?;
        let m = sw_closed_form(&sp)?;
        let pass = witten_check(&d, &m)?;
        let c = witten_exponent(d.euler(), d.signature())?;
        out.push(check("witten", &sp.to_string(), pass, format!("c(X)={c}")));
    }
    let mut specs: Vec<ManifoldSpec> = Vec::new();
    for n in 2..=5 {
        for (p, q) in ELLIPTIC_PAIRS {
            specs.push(ManifoldSpec::elliptic(n, &[p, q]));
        }
    }
    specs.extend((1..=8).map(|n| ManifoldSpec::W { n }));
    for n in 4..=8 {
        specs.push(ManifoldSpec::Y { n });
        specs.push(ManifoldSpec::H { n });
    }
    let mut failed = Vec::new();
    for sp in &specs {
        if donaldson_pipeline(sp)? != donaldson_closed_form(sp)? {
            failed.push(sp.to_string());
        }
    }
    let detail = if failed.is_empty() {
        format!("{} specs", specs.len())
    } else {
        format!("failed: {}", failed.join(", "))
    };
    out.push(check(
        "witten",
        "pipeline-equals-closed-form",
        failed.is_empty(),
        detail,
    ));
    Ok(out)
}

/// Runs `suite`; unset bounds take per-suite defaults.
pub fn run_suite(
    suite: Suite,
    p_max: Option<i64>,
    bound: Option<i64>,
    t_max: Option<i64>,
) -> blowdown::Result<Vec<Check>> {
    let lemmas = || suite_lemmas(p_max.unwrap_or(5), bound.unwrap_or(4), t_max.unwrap_or(2));
    match suite {
        Suite::Lattice => suite_lattice(p_max.unwrap_or(50)),
        Suite::Lemmas => lemmas(),
        Suite::Identities => suite_identities(p_max.unwrap_or(7)),
        Suite::Witten => suite_witten(),
        Suite::All => {
            let mut out = suite_lattice(p_max.unwrap_or(50))?;
            out.extend(lemmas()?);
            out.extend(suite_identities(p_max.unwrap_or(7))?);
            out.extend(suite_witten()?);
            Ok(out)
        }
    }
}

fn render_checks(checks: &[Check], json: bool) -> Outcome {
    let failed = checks.iter().filter(|c| !c.pass).count();
    let stdout = if json {
        to_json(&json!({ "checks": checks, "failed": failed, "pass": failed == 0 }))
    } else {
        let mut s = String::new();
        for c in checks {
            let _ = writeln!(s, "{}  {}/{}  {}", mark(c.pass), c.suite, c.name, c.detail);
        }
        let _ = writeln!(s, "{} checks, {} failed", checks.len(), failed);
        s
    };
    Outcome {
        code: if failed == 0 {
            EXIT_OK
        } else {
            EXIT_VERIFY_FAILED
        },
        stdout,
        stderr: String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice() -> Arc<IntersectionLattice> {
        IntersectionLattice::from_ints(
            &["f", "e1", "u1_2"],
            &[vec![0, 0, 0], vec![0, -1, 0], vec![0, 0, -2]],
        )
        .unwrap()
    }

    #[test]
    fn class_expressions() {
        let l = lattice();
        assert_eq!(parse_class(&l, "f - 2*e1").unwrap().coeffs(), &[1, -2, 0]);
        assert_eq!(
            parse_class(&l, "-u1_2+e1+e1").unwrap().coeffs(),
            &[0, 2, -1]
        );
        assert!(parse_class(&l, "g").is_err());
        assert!(parse_class(&l, "2f").is_err());
        assert!(parse_class(&l, "").is_err());
    }

    #[test]
    fn summary_lists_diagonal_and_links() {
        let l = IntersectionLattice::from_ints(&["k", "s2"], &[vec![2, 3], vec![3, -5]]).unwrap();
        assert_eq!(lattice_summary(&l), "k^2=2  k.s2=3  s2^2=-5");
    }

    #[test]
    fn default_suites_are_small() {
        let checks = run_suite(Suite::Lattice, Some(6), None, None).unwrap();
        assert!(checks.iter().all(|c| c.pass));
    }
}
