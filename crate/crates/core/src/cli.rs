//! Command-line front end. [`run`] parses arguments, dispatches and returns
//! the process exit code, writing only to the given streams.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::audit::{audit_extractor, reports_to_json, round_floats, BoundReport, Status};
use crate::catalog::{format_element, Catalog, Entry};
use crate::charsum::{
    check_bilinear, check_ec_bilinear, check_polya_vinogradov, check_winterhof,
    winterhof_subspace_sweep,
};
use crate::ec::Point;
use crate::error::{param_err, Error, Result};
use crate::extract::{SourceElement, Sources, Symbol};
use crate::field::FiniteField;

/// Exit code for a non-vacuous bound violation found by `audit`.
pub const EXIT_BOUND_FAILURE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "bilex",
    version,
    about = "Two-source randomness extractors and their exhaustive audits"
)]
pub struct Cli {
    /// Parameter catalog (TOML); defaults to the built-in catalog.
    #[arg(long, global = true, env = "BILEX_CATALOG")]
    pub catalog: Option<PathBuf>,
    /// Worker threads for enumeration and sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List catalog entries.
    List,
    /// Apply an entry's extractor to one input pair.
    Extract(ExtractArgs),
    /// Exhaustively audit one entry or the whole catalog.
    Audit(AuditArgs),
    /// Run a character-sum bound check on an entry's groups.
    Charsum(CharsumArgs),
    /// Diffie-Hellman exchange with the extractor as key derivation.
    DhDemo(DhArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub entry: String,
    /// First input: an integer, comma-separated coordinates, or a point x/y.
    #[arg(long, allow_hyphen_values = true)]
    pub x1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x2: String,
    /// Output length; defaults to the entry's k.
    #[arg(long)]
    pub k: Option<u32>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "target")]
pub struct AuditTarget {
    #[arg(long)]
    pub entry: Option<String>,
    /// Audit every catalog entry.
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub target: AuditTarget,
    /// Write the JSON to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    /// max_a |S(a, G1)| <= √p
    Pv,
    /// Σ_a |Σ_{x∈V} ψ(ax)| <= p^n on the entry's additive subgroup
    Winterhof,
    /// The Winterhof aggregate on every subspace of the entry's field
    Subspaces,
    /// max_a |S(a, (G1, G2))| <= √(q |G1| |G2|)
    Bilinear,
}

#[derive(Debug, Args)]
pub struct CharsumArgs {
    #[arg(long)]
    pub entry: String,
    #[arg(long, value_enum)]
    pub check: CheckKind,
}

#[derive(Debug, Args)]
pub struct DhArgs {
    #[arg(long)]
    pub entry: String,
    #[arg(long)]
    pub secret_a: u64,
    #[arg(long)]
    pub secret_b: u64,
    /// Seed of the public generator that draws the second-source sample.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "bilex: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command, returning the exit code on success.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.threads {
            if n == 0 {
                return Err(param_err!("--threads must be at least 1"));
            }
            b = b.num_threads(n);
        }
        b.build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?
    };
    let catalog = match &cli.catalog {
        Some(path) => Catalog::load(path)?,
        None => Catalog::builtin()?,
    };
    let mut buf = Vec::new();
    let result = pool.install(|| {
        let out: &mut dyn Write = &mut buf;
        match &cli.command {
            Command::List => list(&catalog, out),
            Command::Extract(a) => extract(&catalog, a, out),
            Command::Audit(a) => audit(&catalog, a, out),
            Command::Charsum(a) => charsum(&catalog, a, out),
            Command::DhDemo(a) => dh(&catalog, a, out),
        }
    });
    out.write_all(&buf).and_then(|_| out.flush()).map_err(io)?;
    result
}

fn io(e: std::io::Error) -> Error {
    Error::Internal(format!("write failed: {e}"))
}

fn print_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Internal(e.to_string()))?;
    round_floats(&mut v);
    writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")).map_err(io)
}

fn list(catalog: &Catalog, out: &mut dyn Write) -> Result<i32> {
    for e in catalog.entries() {
        writeln!(
            out,
            "{}\t{}\t{}",
            e.name,
            e.kind,
            e.description.as_deref().unwrap_or("")
        )
        .map_err(io)?;
    }
    Ok(0)
}

fn extract(catalog: &Catalog, a: &ExtractArgs, out: &mut dyn Write) -> Result<i32> {
    let entry = catalog.get(&a.entry)?.build(a.k)?;
    let x1 = entry.parse_element(&a.x1).map_err(|e| e.context("--x1"))?;
    let x2 = entry.parse_element(&a.x2).map_err(|e| e.context("--x2"))?;
    let symbol = entry.spec().apply(&x1, &x2)?;
    writeln!(out, "{}", symbol.index()).map_err(io)?;
    writeln!(out, "{}", describe_symbol(&symbol)).map_err(io)?;
    Ok(0)
}

fn describe_symbol(s: &Symbol) -> String {
    match s {
        Symbol::Bits(_) => format!("bits {s}"),
        Symbol::Coords { .. } => format!("coords {s}"),
    }
}

/// Audits the named entries in order.
pub fn audit_entries(catalog: &Catalog, names: &[&str]) -> Result<Vec<BoundReport>> {
    names
        .iter()
        .map(|name| {
            let entry = catalog.get(name)?.build(None)?;
            let mut r =
                audit_extractor(entry.spec()).map_err(|e| e.context(&format!("entry {name:?}")))?;
            r.params.entry = Some(name.to_string());
            Ok(r)
        })
        .collect()
}

fn audit(catalog: &Catalog, a: &AuditArgs, out: &mut dyn Write) -> Result<i32> {
    let (reports, text) = match &a.target.entry {
        Some(name) => {
            let reports = audit_entries(catalog, &[name])?;
            let text = format!(
                "{}\n",
                serde_json::to_string_pretty(&reports[0].to_json()).expect("json")
            );
            (reports, text)
        }
        None => {
            let names: Vec<&str> = catalog.entries().iter().map(|e| e.name.as_str()).collect();
            let reports = audit_entries(catalog, &names)?;
            let text = reports_to_json(&reports);
            (reports, text)
        }
    };
    match &a.out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?,
        None => out.write_all(text.as_bytes()).map_err(io)?,
    }
    Ok(if reports.iter().any(|r| r.status == Status::Fail) {
        EXIT_BOUND_FAILURE
    } else {
        0
    })
}

fn charsum(catalog: &Catalog, a: &CharsumArgs, out: &mut dyn Write) -> Result<i32> {
    let entry = catalog.get(&a.entry)?.build(None)?;
    let sources = entry.spec().sources();
    match a.check {
        CheckKind::Pv => match sources {
            Sources::Fp(g1, _) => print_json(out, &check_polya_vinogradov(g1)?)?,
            _ => {
                return Err(param_err!(
                    "pv applies to subgroups of F_p*, but {} is {}",
                    a.entry,
                    entry.spec().kind()
                ))
            }
        },
        CheckKind::Bilinear => match sources {
            Sources::Fp(g1, g2) => print_json(out, &check_bilinear(g1, g2)?)?,
            Sources::Fpn(g1, g2) => print_json(out, &check_bilinear(g1, g2)?)?,
            Sources::EcFp(g1, g2) => print_json(out, &check_ec_bilinear(g1, g2)?)?,
            Sources::EcFpn(g1, g2) => print_json(out, &check_ec_bilinear(g1, g2)?)?,
        },
        CheckKind::Winterhof => print_json(out, &check_winterhof(&entry.winterhof_subgroup()?)?)?,
        CheckKind::Subspaces => print_json(
            out,
            &winterhof_subspace_sweep(&entry.def().character_field()?)?,
        )?,
    }
    Ok(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedKey {
    pub value: u64,
    pub symbol: String,
}

/// One run of the key-derivation demo. Each party raises the other's public
/// value to its own secret and applies the extractor to the shared element
/// together with the public second-source sample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DhTranscript {
    pub entry: String,
    pub kind: String,
    pub generator: String,
    pub order: u64,
    pub public_a: String,
    pub public_b: String,
    pub shared_by_a: String,
    pub shared_by_b: String,
    pub seed: u64,
    pub second_source: String,
    pub key_a: DerivedKey,
    pub key_b: DerivedKey,
    pub keys_match: bool,
}

struct Exchange {
    generator: SourceElement,
    public_a: SourceElement,
    public_b: SourceElement,
    shared_by_a: SourceElement,
    shared_by_b: SourceElement,
    second: SourceElement,
}

/// Runs the demo on a built entry with secrets in `[1, q1 - 1]`.
pub fn dh_demo(entry: &Entry, secret_a: u64, secret_b: u64, seed: u64) -> Result<DhTranscript> {
    let sources = entry.spec().sources();
    let (q1, q2) = sources.orders();
    for (name, s) in [("secret-a", secret_a), ("secret-b", secret_b)] {
        if s == 0 || s >= q1 {
            return Err(param_err!(
                "--{name} must lie in [1, {}], got {s}",
                q1.saturating_sub(1)
            ));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (secret_a, secret_b);
    let x = match sources {
        Sources::Fp(g1, g2) => {
            let (f, g) = (g1.field(), *g1.generator());
            let (pa, pb) = (f.pow(&g, a), f.pow(&g, b));
            Exchange {
                generator: SourceElement::Fp(g),
                public_a: SourceElement::Fp(pa),
                public_b: SourceElement::Fp(pb),
                shared_by_a: SourceElement::Fp(f.pow(&pb, a)),
                shared_by_b: SourceElement::Fp(f.pow(&pa, b)),
                second: SourceElement::Fp(g2.elements()[rng.random_range(0..q2 as usize)]),
            }
        }
        Sources::Fpn(g1, g2) => {
            let (f, g) = (g1.field(), g1.generator().clone());
            let (pa, pb) = (f.pow(&g, a), f.pow(&g, b));
            Exchange {
                shared_by_a: SourceElement::Fpn(f.pow(&pb, a)),
                shared_by_b: SourceElement::Fpn(f.pow(&pa, b)),
                generator: SourceElement::Fpn(g),
                public_a: SourceElement::Fpn(pa),
                public_b: SourceElement::Fpn(pb),
                second: SourceElement::Fpn(g2.elements()[rng.random_range(0..q2 as usize)].clone()),
            }
        }
        Sources::EcFp(g1, g2) => {
            let (c, g) = (g1.curve(), g1.generator().clone());
            let (pa, pb) = (c.scalar_mul(a, &g), c.scalar_mul(b, &g));
            Exchange {
                shared_by_a: SourceElement::EcFp(c.scalar_mul(a, &pb)),
                shared_by_b: SourceElement::EcFp(c.scalar_mul(b, &pa)),
                generator: SourceElement::EcFp(g),
                public_a: SourceElement::EcFp(pa),
                public_b: SourceElement::EcFp(pb),
                second: SourceElement::EcFp(finite_sample(g2.elements(), &mut rng)?),
            }
        }
        Sources::EcFpn(g1, g2) => {
            let (c, g) = (g1.curve(), g1.generator().clone());
            let (pa, pb) = (c.scalar_mul(a, &g), c.scalar_mul(b, &g));
            Exchange {
                shared_by_a: SourceElement::EcFpn(c.scalar_mul(a, &pb)),
                shared_by_b: SourceElement::EcFpn(c.scalar_mul(b, &pa)),
                generator: SourceElement::EcFpn(g),
                public_a: SourceElement::EcFpn(pa),
                public_b: SourceElement::EcFpn(pb),
                second: SourceElement::EcFpn(finite_sample(g2.elements(), &mut rng)?),
            }
        }
    };
    let key = |shared: &SourceElement| -> Result<DerivedKey> {
        let s = entry.spec().apply(shared, &x.second)?;
        Ok(DerivedKey {
            value: s.index(),
            symbol: s.to_string(),
        })
    };
    let key_a = key(&x.shared_by_a)?;
    let key_b = key(&x.shared_by_b)?;
    Ok(DhTranscript {
        entry: entry.name().to_string(),
        kind: entry.spec().kind().to_string(),
        generator: format_element(&x.generator),
        order: q1,
        public_a: format_element(&x.public_a),
        public_b: format_element(&x.public_b),
        shared_by_a: format_element(&x.shared_by_a),
        shared_by_b: format_element(&x.shared_by_b),
        seed,
        second_source: format_element(&x.second),
        keys_match: key_a == key_b && x.shared_by_a == x.shared_by_b,
        key_a,
        key_b,
    })
}

fn finite_sample<E: Clone>(points: &[Point<E>], rng: &mut ChaCha8Rng) -> Result<Point<E>> {
    let finite: Vec<&Point<E>> = points.iter().filter(|p| !p.is_infinity()).collect();
    if finite.is_empty() {
        return Err(param_err!("the second source has no finite points"));
    }
    Ok(finite[rng.random_range(0..finite.len())].clone())
}

fn dh(catalog: &Catalog, a: &DhArgs, out: &mut dyn Write) -> Result<i32> {
    let entry = catalog.get(&a.entry)?.build(None)?;
    let t = dh_demo(&entry, a.secret_a, a.secret_b, a.seed)?;
    print_json(out, &t)?;
    Ok(if t.keys_match { 0 } else { 1 })
}

/// Parses captured stdout as JSON.
pub fn parse_output(bytes: &[u8]) -> Result<Value> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse(format!("output is not JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("bilex").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn extract_demo_entry() {
        let (code, out, _) = run_capture(&[
            "extract",
            "--entry",
            "fp-11-demo",
            "--x1",
            "4",
            "--x2",
            "10",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "3\nbits 11\n");
        let (code, out, _) = run_capture(&[
            "extract",
            "--entry",
            "fp-11-demo",
            "--x1",
            "3",
            "--x2",
            "1",
            "--k",
            "1",
        ]);
        assert_eq!((code, out.as_str()), (0, "1\nbits 1\n"));
    }

    #[test]
    fn extract_rejects_bad_input() {
        let (code, _, err) = run_capture(&[
            "extract",
            "--entry",
            "fp-11-demo",
            "--x1",
            "four",
            "--x2",
            "10",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("--x1"), "{err}");
        let (code, _, err) = run_capture(&[
            "extract",
            "--entry",
            "fp-11-demo",
            "--x1",
            "2",
            "--x2",
            "10",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("not in its source group"), "{err}");
        let (code, _, _) = run_capture(&["extract", "--entry", "ec-5", "--x1", "O", "--x2", "0/1"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(
            run_capture(&["charsum", "--entry", "fp-11-demo", "--check", "nope"]).0,
            2
        );
        assert_eq!(run_capture(&["audit"]).0, 2);
        assert_eq!(run_capture(&["bogus"]).0, 2);
        assert_eq!(run_capture(&["--help"]).0, 0);
        assert_eq!(
            run_capture(&["charsum", "--entry", "fpn-4", "--check", "pv"]).0,
            2
        );
    }

    #[test]
    fn charsum_checks() {
        let (code, out, _) = run_capture(&["charsum", "--entry", "fp-11-demo", "--check", "pv"]);
        assert_eq!(code, 0);
        let v = parse_output(out.as_bytes()).unwrap();
        assert_eq!(v["pass"], true);
        assert!((v["cap"].as_f64().unwrap() - 11f64.sqrt()).abs() < 1e-12);
        let (_, out, _) = run_capture(&["charsum", "--entry", "fpn-4", "--check", "winterhof"]);
        let v = parse_output(out.as_bytes()).unwrap();
        assert_eq!(
            (v["value"].as_f64(), v["cap"].as_f64(), v["pass"].as_bool()),
            (Some(4.0), Some(4.0), Some(true))
        );
    }

    #[test]
    fn dh_demo_identity_secrets() {
        let c = Catalog::builtin().unwrap();
        let e = c.get("fp-1009-k2").unwrap().build(None).unwrap();
        let t = dh_demo(&e, 1, 1, 7).unwrap();
        assert_eq!(t.shared_by_a, t.generator);
        assert!(t.keys_match);
        let t2 = dh_demo(&e, 123, 456, 7).unwrap();
        assert!(t2.keys_match);
        assert_eq!(t2, dh_demo(&e, 123, 456, 7).unwrap());
        assert!(dh_demo(&e, 0, 1, 7).is_err());
        assert!(dh_demo(&e, 504, 1, 7).is_err());
        for name in ["fpn-16-k2", "ec-5", "ec-25"] {
            let e = c.get(name).unwrap().build(None).unwrap();
            assert!(dh_demo(&e, 2, 5, 1).unwrap().keys_match, "{name}");
        }
    }
}
