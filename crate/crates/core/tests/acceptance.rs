//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criterion 7 at k = 1 is a known failure of the coordinate-wise F_k
//! definition (see README); the process fails if the set of failing checks
//! differs from the documented one in either direction.

use std::process::Command;
use std::time::{Duration, Instant};

use bilex::audit::{
    audit_extractor, bound_lemma4, bound_lemma6, check_lemma1, statistical_distance, BoundReport,
    OutputDistribution, Status,
};
use bilex::catalog::Catalog;
use bilex::charsum::{
    check_bilinear, check_polya_vinogradov, check_winterhof, full_field_sum, single_sum,
    winterhof_subspace_sweep,
};
use bilex::cli::dh_demo;
use bilex::ec::{hasse_holds, Curve};
use bilex::extract::{product_coordinates, Sources};
use bilex::field::{FiniteField, Subgroup};
use bilex::fp::{FpSubgroup, PrimeField};
use bilex::fpn::{AdditiveSubgroup, ExtField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Failing check ids that are analysed and expected.
const KNOWN_FAILURES: &[&str] = &["7/k=1"];

struct Outcome {
    /// Sub-check ids that failed.
    failed: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self {
            failed: Vec::new(),
            detail: String::new(),
        }
    }

    fn check(&mut self, id: &str, ok: bool) {
        if !ok {
            self.failed.push(id.to_string());
        }
    }

    fn note(&mut self, s: impl AsRef<str>) {
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(s.as_ref());
    }
}

/// Number, title, runtime limit, check.
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn catalog() -> Catalog {
    Catalog::builtin().expect("built-in catalog")
}

fn audit(name: &str, k: Option<u32>) -> BoundReport {
    let c = catalog();
    let e = c.get(name).unwrap().build(k).unwrap();
    audit_extractor(e.spec()).unwrap()
}

fn primes_up_to(n: u64) -> Vec<u64> {
    bilex::arith::primes_up_to(n)
}

fn criterion1() -> Outcome {
    let mut o = Outcome::new();
    for n in [2usize, 3, 4, 16, 1000] {
        let uniform = OutputDistribution::from_counts(&vec![5; n]);
        let l = check_lemma1(&uniform).unwrap();
        o.check(
            "1/uniform-equality",
            (l.col - l.rhs).abs() <= 1e-12 && statistical_distance(&uniform).unwrap() == 0.0,
        );
        let mut mass = vec![0; n];
        mass[n / 2] = 9;
        let l = check_lemma1(&OutputDistribution::from_counts(&mass)).unwrap();
        // Col = 1 and Δ = 1 - 1/N, so the right side is (1 + 4(1 - 1/N)^2)/N
        o.check("1/point-mass", l.holds && (l.col - 1.0).abs() <= 1e-12);
        if n == 2 {
            o.check("1/point-mass-equality", (l.col - l.rhs).abs() <= 1e-12);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let n = rng.random_range(1..=64);
        let mut counts: Vec<u64> = (0..n).map(|_| rng.random_range(0..100)).collect();
        counts[0] += 1;
        let l = check_lemma1(&OutputDistribution::from_counts(&counts)).unwrap();
        worst = worst.min(l.col - l.rhs);
        o.check("1/fuzz", l.col >= l.rhs - 1e-12);
    }
    o.note(format!(
        "1000 fuzzed distributions, min(Col - rhs) = {worst:.3e}"
    ));
    o
}

fn criterion2() -> Outcome {
    let mut o = Outcome::new();
    let mut sums = 0;
    for p in primes_up_to(101) {
        let f = PrimeField::new(p).unwrap();
        for a in 0..p {
            let s = full_field_sum(f.reduce(a));
            let expect = if a == 0 { p as f64 } else { 0.0 };
            o.check(
                "2/full-field",
                (s.value() - expect).norm() <= 1e-9 * p as f64,
            );
            sums += 1;
        }
    }
    let mut identities = 0;
    for p in [11u64, 31, 101] {
        let f = PrimeField::new(p).unwrap();
        for g in FpSubgroup::all(&f).unwrap() {
            for a in 0..p {
                let s = single_sum(f.reduce(a), &g);
                for &x0 in g.elements() {
                    let t = single_sum(f.reduce(a) * x0, &g);
                    o.check(
                        "2/invariance",
                        (t.value() - s.value()).norm() <= 1e-9 * g.order() as f64,
                    );
                    identities += 1;
                }
            }
        }
    }
    o.note(format!(
        "{sums} full-field sums over primes <= 101, {identities} S(a x0, G) = S(a, G) identities"
    ));
    o
}

fn criterion3() -> Outcome {
    let mut o = Outcome::new();
    let (mut groups, mut worst) = (0, 0f64);
    let primes = primes_up_to(2003);
    for &p in &primes {
        let f = PrimeField::new(p).unwrap();
        for g in FpSubgroup::all(&f).unwrap() {
            let c = check_polya_vinogradov(&g).unwrap();
            o.check(
                "3/pv",
                c.pass && c.value <= (p as f64).sqrt() + 1e-9 * g.order() as f64,
            );
            worst = worst.max(c.value / c.cap);
            groups += 1;
        }
    }
    o.note(format!(
        "{groups} subgroups of {} primes <= 2003, max |S|/sqrt(p) = {worst:.6}",
        primes.len()
    ));
    o
}

fn criterion4() -> Outcome {
    let mut o = Outcome::new();
    let mut total = 0u64;
    for (p, max_n) in [(2u64, 10usize), (3, 6)] {
        for n in 1..=max_n {
            let f = ExtField::with_degree(p, n).unwrap();
            let s = winterhof_subspace_sweep(&f).unwrap();
            o.check("4/sweep", s.pass && s.max_aggregate <= f.order());
            total += s.subspaces;
        }
    }
    let f4 = ExtField::parse(2, "1,1,1").unwrap();
    let v = AdditiveSubgroup::span(&f4, &[f4.one()]).unwrap();
    let direct = check_winterhof(&v).unwrap();
    o.check("4/f4-equality", direct.value == 4.0 && direct.cap == 4.0);
    o.note(format!(
        "{total} subspaces of F_2^n (n <= 10) and F_3^n (n <= 6); F_4, V = {{0,1}}: aggregate = {}",
        direct.value
    ));
    o
}

fn criterion5() -> Outcome {
    let mut o = Outcome::new();
    let (mut pairs, mut worst) = (0, 0f64);
    for p in primes_up_to(499) {
        let f = PrimeField::new(p).unwrap();
        let groups = Subgroup::all(&f).unwrap();
        for g in &groups {
            for h in &groups {
                let c = check_bilinear(g, h).unwrap();
                let cap = (p as f64 * g.order() as f64 * h.order() as f64).sqrt();
                o.check("5/bilinear", c.value <= cap + 1e-6);
                worst = worst.max(c.value / cap);
                pairs += 1;
            }
        }
    }
    o.note(format!(
        "{pairs} subgroup pairs over primes <= 499, all a != 0; max |S|/sqrt(p|G||H|) = {worst:.6}"
    ));
    o
}

fn criterion6() -> Outcome {
    let mut o = Outcome::new();
    let frozen = [(1u32, "0/1"), (2, "5/252"), (3, "1/42")];
    for (k, sd_exact) in frozen {
        let r = audit(&format!("fp-1009-k{k}"), None);
        let bound = bound_lemma4(1009, k, 504, 504);
        o.check(
            &format!("6/k={k}"),
            r.sd <= bound && r.status == Status::Pass && r.distribution_summary.total == 504 * 504,
        );
        o.check(
            &format!("6/regression-k={k}"),
            r.distribution_summary.sd_exact == sd_exact,
        );
        if k == 2 {
            o.check("6/bound-value", (bound - 0.231).abs() < 1e-3);
        }
        o.note(format!(
            "k={k}: Δ = {} ({:.6}) <= {bound:.6}",
            r.distribution_summary.sd_exact, r.sd
        ));
    }
    o
}

fn criterion7() -> Outcome {
    let mut o = Outcome::new();
    for k in [1u32, 2] {
        let r = audit(&format!("fpn-16-k{k}"), None);
        let bound = bound_lemma6(2, 4, k, 15, 15);
        o.check(
            &format!("7/k={k}"),
            r.sd <= bound && r.distribution_summary.total == 225,
        );
        // diagnostic: first k coordinates of the field product x x'
        let c = catalog();
        let e = c.get(&format!("fpn-16-k{k}")).unwrap().build(None).unwrap();
        let Sources::Fpn(g1, g2) = e.spec().sources() else {
            unreachable!()
        };
        let f = g1.field();
        let mut counts = vec![0u64; 1 << k];
        for x in g1.elements() {
            for y in g2.elements() {
                let t = product_coordinates(f, x, y, k as usize).unwrap();
                counts[t.iter().rev().fold(0, |acc, &c| acc * 2 + c) as usize] += 1;
            }
        }
        let truncated = statistical_distance(&OutputDistribution::from_counts(&counts)).unwrap();
        o.note(format!(
            "k={k}: coordinate-wise Δ = {} ({:.6}) vs bound {bound:.6} [{}]; field-product truncation Δ = {truncated:.6}",
            r.distribution_summary.sd_exact,
            r.sd,
            if r.sd <= bound { "within" } else { "EXCEEDS" }
        ));
    }
    o
}

fn criterion8() -> Outcome {
    let mut o = Outcome::new();
    let c = catalog();
    for (name, ks) in [("ec-5", 1..=3u32), ("ec-1009", 1..=3)] {
        let def = c.get(name).unwrap();
        for k in ks {
            let r = audit(name, Some(k));
            let ds = &r.distribution_summary;
            o.check("8/asymptotic-flag", r.bound.asymptotic);
            o.check("8/lemma1", r.lemma1.holds);
            o.check(
                "8/exclusions",
                ds.excluded_pairs == def.q1 + def.q2 - 1 && ds.total == (def.q1 - 1) * (def.q2 - 1),
            );
            o.note(format!(
                "{name} k={k}: Δ = {:.6} vs radical {:.6} (<< caveat), excluded {} = q1 + q2 - 1",
                r.sd, r.bound.value, ds.excluded_pairs
            ));
        }
    }
    o
}

fn criterion9() -> Outcome {
    let mut o = Outcome::new();
    let f = PrimeField::new(5).unwrap();
    let curve = Curve::new(f, f.reduce(1), f.reduce(1)).unwrap();
    let pts = curve.enumerate().unwrap();
    o.check("9/count", pts.len() == 9);
    let mut triples = 0;
    for a in &pts {
        for b in &pts {
            for c in &pts {
                let l = curve.add(&curve.add(a, b).unwrap(), c).unwrap();
                let r = curve.add(a, &curve.add(b, c).unwrap()).unwrap();
                o.check("9/associativity", l == r);
                triples += 1;
            }
        }
    }
    let mut curves = 0;
    for e in catalog().entries() {
        let built = e.build(None).unwrap();
        let (count, q) = match built.spec().sources() {
            Sources::EcFp(g, _) => (
                g.curve().enumerate().unwrap().len() as u64,
                g.curve().field().order(),
            ),
            Sources::EcFpn(g, _) => (
                g.curve().enumerate().unwrap().len() as u64,
                g.curve().field().order(),
            ),
            _ => continue,
        };
        o.check("9/hasse", hasse_holds(count, q));
        curves += 1;
    }
    o.note(format!(
        "{triples} triples associative; Hasse holds on {curves} catalog curves"
    ));
    o
}

fn criterion10() -> Outcome {
    let mut o = Outcome::new();
    let run = |extra: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_bilex"))
            .env_remove("BILEX_CATALOG")
            .args(extra)
            .args(["audit", "--all"])
            .output()
            .expect("run bilex");
        (out.status.code(), out.stdout)
    };
    let first = run(&[]);
    let second = run(&[]);
    let one = run(&["--threads", "1"]);
    let eight = run(&["--threads", "8"]);
    o.check("10/rerun", first == second);
    o.check("10/threads", one == eight && one == first);
    o.check(
        "10/json",
        serde_json::from_slice::<serde_json::Value>(&first.1).is_ok(),
    );
    o.note(format!(
        "4 runs of audit --all, {} bytes each, exit {:?}",
        first.1.len(),
        first.0
    ));
    o
}

fn criterion11() -> Outcome {
    let mut o = Outcome::new();
    let c = catalog();
    let e = c.get("fp-1009-k2").unwrap().build(None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..100 {
        let (a, b) = (rng.random_range(1..504), rng.random_range(1..504));
        let t = dh_demo(&e, a, b, i).unwrap();
        o.check(
            "11/keys",
            t.keys_match && t.key_a == t.key_b && t.shared_by_a == t.shared_by_b,
        );
    }
    o.note("100 random secret pairs on fp-1009-k2");
    o
}

fn main() {
    // `cargo test` passes harness flags such as --nocapture or a filter
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let criteria: [Criterion; 11] = [
        (
            1,
            "collision-probability inequality",
            Duration::from_secs(1),
            criterion1,
        ),
        (
            2,
            "character-sum identities",
            Duration::from_secs(5),
            criterion2,
        ),
        (
            3,
            "Polya-Vinogradov on all subgroups, p <= 2003",
            Duration::from_secs(60),
            criterion3,
        ),
        (
            4,
            "Winterhof on all subspaces of F_2^n, F_3^n",
            Duration::from_secs(60),
            criterion4,
        ),
        (
            5,
            "bilinear bound on all subgroup pairs, p <= 499",
            Duration::from_secs(60),
            criterion5,
        ),
        (
            6,
            "prime-field extractor end-to-end at p = 1009",
            Duration::from_secs(1),
            criterion6,
        ),
        (
            7,
            "extension-field extractor end-to-end on F_16",
            Duration::from_secs(1),
            criterion7,
        ),
        (
            8,
            "elliptic-curve extractor audits",
            Duration::from_secs(30),
            criterion8,
        ),
        (
            9,
            "elliptic-curve group law and Hasse",
            Duration::from_secs(1),
            criterion9,
        ),
        (
            10,
            "byte-identical audit --all",
            Duration::from_secs(120),
            criterion10,
        ),
        (
            11,
            "Diffie-Hellman key agreement",
            Duration::from_secs(1),
            criterion11,
        ),
    ];
    let mut failed: Vec<String> = Vec::new();
    for (n, title, limit, f) in criteria {
        if let Some(filter) = &filter {
            if !title.contains(filter.as_str()) && *filter != n.to_string() {
                continue;
            }
        }
        let start = Instant::now();
        let mut outcome = f();
        let elapsed = start.elapsed();
        if elapsed > limit {
            outcome.failed.push(format!("{n}/runtime"));
        }
        outcome.failed.dedup();
        let status = if outcome.failed.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        let failing = if outcome.failed.is_empty() {
            String::new()
        } else {
            format!(" failing: {};", outcome.failed.join(", "))
        };
        println!(
            "{status} criterion {n:>2}: {title} ({:.2}s / {}s limit){failing} {}",
            elapsed.as_secs_f64(),
            limit.as_secs(),
            outcome.detail
        );
        failed.extend(outcome.failed);
    }
    let unexpected: Vec<&String> = failed
        .iter()
        .filter(|f| !KNOWN_FAILURES.contains(&f.as_str()))
        .collect();
    // a filtered run may skip a known failure, so only full runs check for it
    let fixed: Vec<&&str> = match filter {
        Some(_) => Vec::new(),
        None => KNOWN_FAILURES
            .iter()
            .filter(|k| !failed.iter().any(|f| f == *k))
            .collect(),
    };
    println!(
        "summary: {} failing check(s): [{}]; documented known failures: [{}]",
        failed.len(),
        failed.join(", "),
        KNOWN_FAILURES.join(", ")
    );
    if !unexpected.is_empty() || !fixed.is_empty() {
        println!("acceptance: failure set differs from the documented one (unexpected {unexpected:?}, no longer failing {fixed:?})");
        std::process::exit(1);
    }
}
