//! Command-line front end: parses inputs, runs one analysis and renders a
//! deterministic JSON or plain-text report.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{exp_t, is_locally_nilpotent, Algebra, Derivation, Polynomial, ToricAlgebra, DEFAULT_CAP};
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::selftest::{self, SelftestOptions};
use crate::toric_lnd::{
    enumerate_roots, is_maximal, kernel_of_root, lnds_commute, roots_equivalent, toric_isotropy_report, DemazureRoot,
    ToricOptions, DEFAULT_HILBERT_BOUND, DEFAULT_ROOT_BOUND,
};
use crate::trinomial::{
    is_rigid, LndKind, Trinomial, TrinomialData, TrinomialLnd, TrinomialOptions, DEFAULT_REPLICA_DEGREE,
};

#[derive(Parser, Debug)]
#[command(
    name = "lndkit",
    version,
    about = "Homogeneous LNDs on toric varieties and trinomial hypersurfaces"
)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Demazure roots of a pointed cone.
    Cone {
        #[command(subcommand)]
        op: ConeOp,
    },
    /// Trinomial hypersurfaces.
    Trinomial {
        #[command(subcommand)]
        op: TrinomialOp,
    },
    /// exp(t·δ) applied to a polynomial or to the generators.
    Exp(ExpArgs),
    /// Worked examples and oracle agreement suites.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Bounds {
    /// Box radius for root enumeration.
    #[arg(long, default_value_t = DEFAULT_ROOT_BOUND)]
    pub bound: i64,
    /// Box radius for Hilbert bases.
    #[arg(long = "hilbert-bound", default_value_t = DEFAULT_HILBERT_BOUND)]
    pub hilbert_bound: i64,
    /// Iteration cap for nilpotency checks and exponentials.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// Largest total degree of sampled replica multipliers.
    #[arg(long = "replica-degree", default_value_t = DEFAULT_REPLICA_DEGREE)]
    pub replica_degree: usize,
}

#[derive(Args, Debug)]
pub struct ConeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Root as comma-separated integers; repeat for commute.
    #[arg(long, allow_hyphen_values = true)]
    pub root: Vec<String>,
    #[command(flatten)]
    pub bounds: Bounds,
}

#[derive(Subcommand, Debug)]
pub enum ConeOp {
    Roots(ConeArgs),
    Maximal(ConeArgs),
    Commute(ConeArgs),
    Kernel(ConeArgs),
    Isotropy(ConeArgs),
}

#[derive(Args, Debug)]
pub struct TrinomialArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// `i` for the single-z form or `i,j` for the several-z form, 1-based.
    #[arg(long)]
    pub lnd: Option<String>,
    /// Exponent vector of a monomial multiplier.
    #[arg(long, allow_hyphen_values = true)]
    pub replica: Option<String>,
    #[command(flatten)]
    pub bounds: Bounds,
}

#[derive(Subcommand, Debug)]
pub enum TrinomialOp {
    Classify(TrinomialArgs),
    Rigid(TrinomialArgs),
    Lnds(TrinomialArgs),
    Isotropy(TrinomialArgs),
}

#[derive(Args, Debug)]
pub struct ExpArgs {
    /// Cone or trinomial document, optionally with a polynomial under "p".
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub root: Vec<String>,
    #[arg(long)]
    pub lnd: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub replica: Option<String>,
    #[command(flatten)]
    pub bounds: Bounds,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Corrupts the pairing used by the commutation criterion.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

/// Exit code, standard output and standard error of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let (name, bounds, input) = describe(&cli.command);
    let mut report = serde_json::Map::new();
    report.insert("tool".into(), json!("lndkit"));
    report.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    report.insert("command".into(), json!(name));
    if let Some(input) = input {
        report.insert("input".into(), json!(input));
    }
    if let Some(b) = &bounds {
        report.insert(
            "bounds".into(),
            json!({
                "root_bound": b.bound,
                "hilbert_bound": b.hilbert_bound,
                "cap": b.cap,
                "replica_degree": b.replica_degree,
            }),
        );
    }
    let (code, stderr) = match dispatch(&cli.command) {
        Ok((result, failed)) => {
            report.insert("status".into(), json!(if failed { "failed" } else { "ok" }));
            report.insert("result".into(), result);
            (i32::from(failed), String::new())
        }
        Err(e) if e.is_refusal() => {
            report.insert("status".into(), json!("refused"));
            report.insert(
                "refusal".into(),
                json!({ "reason": e.to_string(), "witness": e.witness() }),
            );
            (1, format!("refused: {e}\n"))
        }
        Err(e) => {
            report.insert("status".into(), json!("error"));
            report.insert(
                "error".into(),
                json!({ "kind": error_kind(&e), "message": e.to_string() }),
            );
            (2, format!("error: {e}\n"))
        }
    };
    let value = Value::Object(report);
    let stdout = match cli.format {
        Format::Json => serde_json::to_string_pretty(&value).expect("reports serialize") + "\n",
        Format::Text => {
            let mut out = String::new();
            render_text(&value, 0, &mut out);
            out
        }
    };
    Outcome { code, stdout, stderr }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Dimension { .. } => "dimension",
        Error::Domain(_) => "domain",
        Error::Validation(_) => "validation",
        Error::Unsupported(_) => "unsupported",
        Error::Parse(_) => "parse",
        Error::Io(_) => "io",
        _ => "refusal",
    }
}

fn describe(c: &Command) -> (String, Option<Bounds>, Option<String>) {
    let show = |p: &PathBuf| Some(p.display().to_string());
    match c {
        Command::Cone { op } => {
            let (n, a) = match op {
                ConeOp::Roots(a) => ("roots", a),
                ConeOp::Maximal(a) => ("maximal", a),
                ConeOp::Commute(a) => ("commute", a),
                ConeOp::Kernel(a) => ("kernel", a),
                ConeOp::Isotropy(a) => ("isotropy", a),
            };
            (format!("cone {n}"), Some(a.bounds.clone()), show(&a.input))
        }
        Command::Trinomial { op } => {
            let (n, a) = match op {
                TrinomialOp::Classify(a) => ("classify", a),
                TrinomialOp::Rigid(a) => ("rigid", a),
                TrinomialOp::Lnds(a) => ("lnds", a),
                TrinomialOp::Isotropy(a) => ("isotropy", a),
            };
            (format!("trinomial {n}"), Some(a.bounds.clone()), show(&a.input))
        }
        Command::Exp(a) => ("exp".into(), Some(a.bounds.clone()), show(&a.input)),
        Command::Selftest(_) => ("selftest".into(), None, None),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

/// Runs the command; the flag marks a completed run whose checks failed.
fn dispatch(c: &Command) -> Result<(Value, bool)> {
    match c {
        Command::Cone { op } => cone_command(op).map(|v| (v, false)),
        Command::Trinomial { op } => trinomial_command(op).map(|v| (v, false)),
        Command::Exp(a) => exp_command(a).map(|v| (v, false)),
        Command::Selftest(a) => {
            let rep = selftest::run(&SelftestOptions {
                seed: crate::sampling::seed_from_env(),
                inject_fault: a.inject_fault,
            });
            Ok((to_value(&rep), !rep.passed))
        }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn parse_cone(value: Value) -> Result<Cone> {
    serde_json::from_value(value).map_err(|e| Error::Parse(format!("cone document: {e}")))
}

fn parse_ints(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("not an integer list: {s:?}")))
        })
        .collect()
}

fn parse_root(cone: &Cone, s: &str) -> Result<DemazureRoot> {
    let e = LatticeVector::from_i64s(&parse_ints(s)?);
    if e.rank() != cone.rank() {
        return Err(Error::dimension(cone.rank(), e.rank()));
    }
    DemazureRoot::new(cone, e)
}

fn one_root(cone: &Cone, roots: &[String]) -> Result<DemazureRoot> {
    match roots {
        [r] => parse_root(cone, r),
        _ => Err(Error::validation("exactly one --root is required")),
    }
}

fn positive(b: &Bounds) -> Result<()> {
    if b.bound < 1 || b.hilbert_bound < 1 || b.cap < 1 {
        return Err(Error::validation("bounds must be positive"));
    }
    Ok(())
}

fn root_entry(cone: &Cone, r: &DemazureRoot) -> Value {
    json!({
        "ray": r.ray(),
        "ray_vector": cone.rays()[r.ray()],
        "root": r.e(),
        "pairings": r.pairings().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
    })
}

fn cone_command(op: &ConeOp) -> Result<Value> {
    let a = match op {
        ConeOp::Roots(a) | ConeOp::Maximal(a) | ConeOp::Commute(a) | ConeOp::Kernel(a) | ConeOp::Isotropy(a) => a,
    };
    positive(&a.bounds)?;
    let cone = parse_cone(parse_json(&read(&a.input)?)?)?;
    let hb = BigInt::from(a.bounds.hilbert_bound);
    match op {
        ConeOp::Roots(_) => {
            let roots = enumerate_roots(&cone, a.bounds.bound)?;
            Ok(json!({
                "rays": cone.rays(),
                "bound": a.bounds.bound,
                "complete_within_bound": true,
                "count": roots.len(),
                "roots": roots.iter().map(|r| root_entry(&cone, r)).collect::<Vec<_>>(),
            }))
        }
        ConeOp::Maximal(_) => {
            let e = one_root(&cone, &a.root)?;
            let v = is_maximal(&cone, &e)?;
            Ok(json!({
                "root": root_entry(&cone, &e),
                "maximal": v.maximal,
                "witness": v.witness.as_ref().map(|w| root_entry(&cone, w)),
            }))
        }
        ConeOp::Commute(_) => {
            let [r1, r2] = a.root.as_slice() else {
                return Err(Error::validation("commute needs exactly two --root values"));
            };
            let (e, f) = (parse_root(&cone, r1)?, parse_root(&cone, r2)?);
            let equivalent = roots_equivalent(&e, &f);
            let commute = equivalent || lnds_commute(&cone, &e, &f)?;
            Ok(json!({
                "roots": [root_entry(&cone, &e), root_entry(&cone, &f)],
                "commute": commute,
                "equivalent": equivalent,
            }))
        }
        ConeOp::Kernel(_) => {
            let e = one_root(&cone, &a.root)?;
            Ok(to_value(&kernel_of_root(&cone, &e, &hb)?))
        }
        ConeOp::Isotropy(_) => {
            let e = one_root(&cone, &a.root)?;
            Ok(to_value(&toric_isotropy_report(
                &cone,
                &e,
                &ToricOptions { hilbert_bound: hb },
            )?))
        }
    }
}

fn parse_kind(s: &str) -> Result<LndKind> {
    let idx = parse_ints(s)?;
    let zero_based =
        |x: i64| usize::try_from(x - 1).map_err(|_| Error::validation(format!("LND indices are 1-based: {s:?}")));
    match idx.as_slice() {
        [i] => Ok(LndKind::Case1 { i: zero_based(*i)? }),
        [i, j] => Ok(LndKind::Case2 {
            i: zero_based(*i)?,
            j: zero_based(*j)?,
        }),
        _ => Err(Error::validation(format!("--lnd takes i or i,j, got {s:?}"))),
    }
}

fn selected_lnd(t: &Trinomial, lnd: &Option<String>, replica: &Option<String>) -> Result<TrinomialLnd> {
    let kind = match lnd {
        Some(s) => parse_kind(s)?,
        None => return Err(Error::validation("--lnd is required")),
    };
    let base = t.irreducible(kind)?;
    match replica {
        None => Ok(base),
        Some(s) => {
            let e = parse_ints(s)?;
            if e.len() != t.nvars() {
                return Err(Error::dimension(t.nvars(), e.len()));
            }
            t.replica(
                &base,
                &Polynomial::monomial(e, num_rational::BigRational::from_integer(1.into())),
            )
        }
    }
}

fn trinomial_command(op: &TrinomialOp) -> Result<Value> {
    let a = match op {
        TrinomialOp::Classify(a) | TrinomialOp::Rigid(a) | TrinomialOp::Lnds(a) | TrinomialOp::Isotropy(a) => a,
    };
    positive(&a.bounds)?;
    let data = TrinomialData::from_json_str(&read(&a.input)?)?;
    match op {
        TrinomialOp::Rigid(_) => Ok(to_value(&is_rigid(&data))),
        TrinomialOp::Classify(_) => {
            let t = Trinomial::new(&data)?;
            let mut v = to_value(&t.classify());
            v["rigidity"] = to_value(&is_rigid(&data));
            v["grading_group"] = to_value(t.grading_group());
            Ok(v)
        }
        TrinomialOp::Lnds(_) => {
            let t = Trinomial::new(&data)?;
            let gens = t.ring().generators();
            let mut out = Vec::new();
            for d in t.lnds()? {
                let kills = t.ring().reduce(&d.derivation.apply(&t.ring().relation())).is_zero();
                let nil = is_locally_nilpotent(&d.derivation, &gens, a.bounds.cap, t.ring())?;
                let verdict = t.maximality_verdict(&d)?;
                let mut v = to_value(&t.describe(&d));
                v["annihilates_relation"] = json!(kills);
                v["nilpotency"] = to_value(&nil);
                v["degree"] = to_value(&t.degree(&d.derivation)?);
                v["maximal"] = json!(verdict.maximal);
                v["witness"] = json!(verdict.witness.map(|w| w.label));
                out.push(v);
            }
            Ok(json!({ "equation": t.equation(), "lnds": out }))
        }
        TrinomialOp::Isotropy(_) => {
            let t = Trinomial::new(&data)?;
            let d = selected_lnd(&t, &a.lnd, &a.replica)?;
            let opts = TrinomialOptions {
                cap: a.bounds.cap,
                replica_degree: a.bounds.replica_degree,
            };
            Ok(to_value(&t.isotropy_report(&d, &opts)?))
        }
    }
}

fn exp_command(a: &ExpArgs) -> Result<Value> {
    positive(&a.bounds)?;
    let mut doc = parse_json(&read(&a.input)?)?;
    let p = doc.as_object_mut().and_then(|m| m.remove("p"));
    let is_cone = doc.get("rays").is_some();
    let (algebra, delta, label, mut names): (Box<dyn Algebra>, Derivation, String, Vec<String>) = if is_cone {
        let cone = parse_cone(doc)?;
        let e = one_root(&cone, &a.root)?;
        let alg = ToricAlgebra::normal(&cone, &BigInt::from(a.bounds.hilbert_bound))?;
        let names = alg.variable_names();
        (Box::new(alg), e.derivation(&cone)?, format!("root {}", e.e()), names)
    } else {
        let data: TrinomialData =
            serde_json::from_value(doc).map_err(|e| Error::Parse(format!("trinomial document: {e}")))?;
        data.validate()?;
        let t = Trinomial::new(&data)?;
        let d = selected_lnd(&t, &a.lnd, &a.replica)?;
        let names = t.names().to_vec();
        (Box::new(t.ring().clone()), d.derivation, d.label, names)
    };
    let n = algebra.nvars();
    let inputs = match p {
        Some(v) => vec![Polynomial::from_json(&v, n)?],
        None => algebra.generators(),
    };
    let mut results = Vec::new();
    for q in &inputs {
        algebra.check_closure(q)?;
        let image = exp_t(&delta, q, a.bounds.cap, algebra.as_ref())?;
        let mut full = names.clone();
        full.push("t".into());
        results.push(json!({ "p": q.display_with(&names), "exp": image.display_with(&full) }));
    }
    names.push("t".into());
    Ok(json!({ "derivation": label, "variables": names, "results": results }))
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if x.is_object() || (x.is_array() && x.as_array().is_some_and(|a| a.iter().any(|y| y.is_object()))) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_text(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar(x)));
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                if x.is_object() {
                    out.push_str(&format!("{pad}- [{i}]\n"));
                    render_text(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}- {}\n", scalar(x)));
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}
