//! Exhaustive audits: exact output distributions of an extractor over all
//! input pairs, the derived statistics, and the matching theoretical bound.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::arith::{bit_length, mul_mod};
use crate::charsum::{max_bilinear_magnitude, max_ec_bilinear_magnitude, MAX_SWEEP_PRIME};
use crate::ec::{EcSubgroup, Point};
use crate::error::{capacity_err, domain_err, Result};
use crate::extract::{
    coordinate_products, encode_coords, lsb_index, product_coordinates, ExtractorKind,
    ExtractorSpec, Sources,
};
use crate::field::FiniteField;
use crate::fp::PrimeField;
use crate::fpn::ExtField;

/// Default cap on `q1 q2` for exhaustive enumeration.
pub const MAX_PAIRS: u64 = 1 << 26;
/// `M` sweeps over extension fields are run up to this field size.
pub const MAX_SWEEP_FIELD: u64 = 1 << 16;
/// Full histograms are included in reports up to this alphabet size.
pub const REPORT_COUNTS_LIMIT: u64 = 1 << 12;
/// Tolerance on the collision inequality and on bound comparisons.
pub const TOLERANCE: f64 = 1e-12;

const DENSE_TALLY_LIMIT: u64 = 1 << 20;

#[derive(Clone, Copy, Debug)]
pub struct AuditOptions {
    pub max_pairs: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            max_pairs: MAX_PAIRS,
        }
    }
}

/// Exact histogram of extractor outputs. `counts` holds nonzero entries only,
/// keyed by symbol index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputDistribution {
    alphabet_size: u64,
    counts: Vec<(u64, u64)>,
    total: u64,
    excluded: u64,
}

impl OutputDistribution {
    /// Builds a distribution from a dense count vector indexed by symbol.
    pub fn from_counts(counts: &[u64]) -> Self {
        let sparse: Vec<(u64, u64)> = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(v, &c)| (v as u64, c))
            .collect();
        Self {
            alphabet_size: counts.len() as u64,
            total: counts.iter().sum(),
            counts: sparse,
            excluded: 0,
        }
    }

    pub fn alphabet_size(&self) -> u64 {
        self.alphabet_size
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Input pairs left out because one of the points was `O`.
    pub fn excluded(&self) -> u64 {
        self.excluded
    }

    /// Nonzero `(symbol, count)` pairs in increasing symbol order.
    pub fn counts(&self) -> &[(u64, u64)] {
        &self.counts
    }

    pub fn count(&self, symbol: u64) -> u64 {
        self.counts
            .binary_search_by_key(&symbol, |&(s, _)| s)
            .map_or(0, |i| self.counts[i].1)
    }

    pub fn support(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn max_count(&self) -> u64 {
        self.counts.iter().map(|&(_, c)| c).max().unwrap_or(0)
    }

    pub fn min_count(&self) -> u64 {
        if self.support() < self.alphabet_size {
            0
        } else {
            self.counts.iter().map(|&(_, c)| c).min().unwrap_or(0)
        }
    }

    fn nonempty(&self) -> Result<()> {
        if self.total == 0 {
            Err(domain_err!("distribution has no mass"))
        } else {
            Ok(())
        }
    }
}

enum Tally {
    Dense(Vec<u64>),
    Sparse(HashMap<u64, u64>),
}

impl Tally {
    fn new(alphabet: u64) -> Self {
        if alphabet <= DENSE_TALLY_LIMIT {
            Tally::Dense(vec![0; alphabet as usize])
        } else {
            Tally::Sparse(HashMap::new())
        }
    }

    #[inline]
    fn add(&mut self, symbol: u64) {
        match self {
            Tally::Dense(v) => v[symbol as usize] += 1,
            Tally::Sparse(m) => *m.entry(symbol).or_insert(0) += 1,
        }
    }

    fn merge(self, other: Self) -> Self {
        match (self, other) {
            (Tally::Dense(mut a), Tally::Dense(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Tally::Dense(a)
            }
            (Tally::Sparse(mut a), Tally::Sparse(b)) => {
                for (s, c) in b {
                    *a.entry(s).or_insert(0) += c;
                }
                Tally::Sparse(a)
            }
            _ => unreachable!("tallies of one audit share a representation"),
        }
    }

    fn into_sorted(self) -> Vec<(u64, u64)> {
        match self {
            Tally::Dense(v) => v
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c > 0)
                .map(|(s, c)| (s as u64, c))
                .collect(),
            Tally::Sparse(m) => {
                let mut v: Vec<(u64, u64)> = m.into_iter().collect();
                v.sort_unstable();
                v
            }
        }
    }
}

/// Tallies `symbol(x, y)` over `xs × ys`, in parallel over `xs`.
fn tally<X: Sync, Y: Sync>(
    alphabet: u64,
    xs: &[X],
    ys: &[Y],
    symbol: impl Fn(&X, &Y) -> u64 + Sync,
) -> Vec<(u64, u64)> {
    xs.par_iter()
        .fold(
            || Tally::new(alphabet),
            |mut t, x| {
                for y in ys {
                    t.add(symbol(x, y));
                }
                t
            },
        )
        .reduce(|| Tally::new(alphabet), Tally::merge)
        .into_sorted()
}

/// The exact output distribution of `spec` over all input pairs. For curve
/// extractors, pairs involving `O` are skipped and counted as excluded.
pub fn distribution_of(spec: &ExtractorSpec) -> Result<OutputDistribution> {
    distribution_with(spec, &AuditOptions::default())
}

pub fn distribution_with(
    spec: &ExtractorSpec,
    options: &AuditOptions,
) -> Result<OutputDistribution> {
    let (q1, q2) = spec.sources().orders();
    let pairs = q1
        .checked_mul(q2)
        .filter(|&n| n <= options.max_pairs)
        .ok_or_else(|| {
            capacity_err!(
                "q1 q2 = {q1} * {q2} exceeds the enumeration cap {}",
                options.max_pairs
            )
        })?;
    let alphabet = spec.alphabet_size()?;
    let k = spec.k();
    let (counts, excluded) = match spec.sources() {
        Sources::Fp(g1, g2) => {
            let p = g1.field().modulus();
            let xs: Vec<u64> = g1.elements().iter().map(|x| x.value()).collect();
            let ys: Vec<u64> = g2.elements().iter().map(|x| x.value()).collect();
            (
                tally(alphabet, &xs, &ys, |&x, &y| lsb_index(mul_mod(x, y, p), k)),
                0,
            )
        }
        Sources::Fpn(g1, g2) => {
            let field = g1.field();
            let p = field.characteristic();
            let counts = tally(alphabet, g1.elements(), g2.elements(), |x, y| {
                encode_coords(
                    &coordinate_products(field, x, y, k as usize).expect("k validated"),
                    p,
                )
            });
            (counts, 0)
        }
        Sources::EcFp(g1, g2) => {
            let field = g1.curve().field();
            let p = field.modulus();
            let (xs, ys, excluded) = finite_x_coords(g1, g2);
            (
                tally(alphabet, &xs, &ys, |&x, &y| {
                    lsb_index(mul_mod(x.value(), y.value(), p), k)
                }),
                excluded,
            )
        }
        Sources::EcFpn(g1, g2) => {
            let field = g1.curve().field();
            let p = field.characteristic();
            let (xs, ys, excluded) = finite_x_coords(g1, g2);
            let counts = tally(alphabet, &xs, &ys, |x, y| {
                encode_coords(
                    &product_coordinates(field, x, y, k as usize).expect("k validated"),
                    p,
                )
            });
            (counts, excluded)
        }
    };
    let total = counts.iter().map(|&(_, c)| c).sum::<u64>();
    debug_assert_eq!(total + excluded, pairs);
    Ok(OutputDistribution {
        alphabet_size: alphabet,
        counts,
        total,
        excluded,
    })
}

/// `x`-coordinates of the finite points of both subgroups, and the number of
/// pairs involving `O`.
fn finite_x_coords<F, X>(g1: &EcSubgroup<F>, g2: &EcSubgroup<F>) -> (Vec<X>, Vec<X>, u64)
where
    F: FiniteField<Elem = X>,
    X: Clone,
{
    let xs = |g: &EcSubgroup<F>| -> Vec<X> {
        g.elements()
            .iter()
            .filter_map(|pt| match pt {
                Point::Affine { x, .. } => Some(x.clone()),
                Point::Infinity => None,
            })
            .collect()
    };
    let (a, b) = (xs(g1), xs(g2));
    let excluded = g1.order() * g2.order() - a.len() as u64 * b.len() as u64;
    (a, b, excluded)
}

/// `Σ_v |c_v N - T|` and `2 T N`, whose ratio is the statistical distance
/// to uniform.
pub fn statistical_distance_exact(d: &OutputDistribution) -> Result<(u128, u128)> {
    d.nonempty()?;
    let n = d.alphabet_size as u128;
    let t = d.total as u128;
    let missing = n - d.support() as u128;
    let num = d
        .counts
        .iter()
        .map(|&(_, c)| (c as u128 * n).abs_diff(t))
        .sum::<u128>()
        + missing * t;
    Ok((num, 2 * t * n))
}

/// `½ Σ_v |Pr[v] - 1/N|` against uniform on the alphabet.
pub fn statistical_distance(d: &OutputDistribution) -> Result<f64> {
    let (num, den) = statistical_distance_exact(d)?;
    Ok(num as f64 / den as f64)
}

/// `Σ_v c_v^2`, the number of ordered input-pair pairs with equal output.
pub fn colliding_pairs(d: &OutputDistribution) -> u128 {
    d.counts.iter().map(|&(_, c)| c as u128 * c as u128).sum()
}

/// `Col = Σ_v Pr[v]^2`.
pub fn collision_probability(d: &OutputDistribution) -> Result<f64> {
    d.nonempty()?;
    let t = d.total as f64;
    Ok(colliding_pairs(d) as f64 / (t * t))
}

/// `γ = max_v Pr[v]`.
pub fn guessing_probability(d: &OutputDistribution) -> Result<f64> {
    d.nonempty()?;
    Ok(d.max_count() as f64 / d.total as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Lemma1Check {
    pub col: f64,
    /// `(1 + 4 Δ^2) / N`.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `Col >= (1 + 4 Δ^2) / N`.
pub fn check_lemma1(d: &OutputDistribution) -> Result<Lemma1Check> {
    let col = collision_probability(d)?;
    let sd = statistical_distance(d)?;
    let rhs = (1.0 + 4.0 * sd * sd) / d.alphabet_size as f64;
    Ok(Lemma1Check {
        col,
        rhs,
        holds: col >= rhs - TOLERANCE,
    })
}

/// Parts `(√(2^k/p), √(2^k p log2 p / (q1 q2)))` of the prime-field extractor bound.
pub fn lemma4_parts(p: u64, k: u32, q1: u64, q2: u64) -> (f64, f64) {
    let (p, two_k) = (p as f64, 2f64.powi(k as i32));
    (
        (two_k / p).sqrt(),
        (two_k * p * p.log2() / (q1 as f64 * q2 as f64)).sqrt(),
    )
}

/// `Δ <= ½ (√(2^k/p) + √(2^k p log2 p / (q1 q2)))`.
pub fn bound_lemma4(p: u64, k: u32, q1: u64, q2: u64) -> f64 {
    let (a, b) = lemma4_parts(p, k, q1, q2);
    0.5 * (a + b)
}

/// The closed form `2^((k + m + log2 m - (l1 + l2)) / 2)` with `m`, `l1`, `l2`
/// the bit lengths of `p`, `q1`, `q2`.
pub fn lemma4_closed_form(p: u64, k: u32, q1: u64, q2: u64) -> f64 {
    let m = bit_length(p) as f64;
    let l = (bit_length(q1) + bit_length(q2)) as f64;
    2f64.powf((k as f64 + m + m.log2() - l) / 2.0)
}

/// `Δ <= √(p^(n+k-2) / (q1 q2))`.
pub fn bound_lemma6(p: u64, n: usize, k: u32, q1: u64, q2: u64) -> f64 {
    ((p as f64).powi(n as i32 + k as i32 - 2) / (q1 as f64 * q2 as f64)).sqrt()
}

/// `√(2^(k-2) p log2 p / (q1 q2))`, up to an unspecified constant.
pub fn bound_ec_fp(p: u64, k: u32, q1: u64, q2: u64) -> f64 {
    let p = p as f64;
    (2f64.powi(k as i32 - 2) * p * p.log2() / (q1 as f64 * q2 as f64)).sqrt()
}

/// `√(p^(n+k) / (4 q1 q2))`, up to an unspecified constant.
pub fn bound_ec_fpn(p: u64, n: usize, k: u32, q1: u64, q2: u64) -> f64 {
    ((p as f64).powi(n as i32 + k as i32) / (4.0 * q1 as f64 * q2 as f64)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Vacuous,
    Fail,
}

impl Status {
    /// Vacuous when the bound is at least 1; otherwise pass iff `sd <= bound`.
    pub fn classify(sd: f64, bound: f64) -> Self {
        if bound >= 1.0 {
            Status::Vacuous
        } else if sd <= bound + TOLERANCE {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Vacuous => "vacuous",
            Status::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveParams {
    pub a: String,
    pub b: String,
    pub points: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry: Option<String>,
    pub kind: ExtractorKind,
    pub p: u64,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction_poly: Option<String>,
    pub field_order: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveParams>,
    pub k: u32,
    pub q1: u64,
    pub q2: u64,
    pub m: u32,
    pub l1: u32,
    pub l2: u32,
    pub alphabet_size: u64,
    pub same_group: bool,
    pub output_encoding: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionSummary {
    pub alphabet_size: u64,
    pub total: u64,
    pub excluded_pairs: u64,
    pub support: u64,
    pub min_count: u64,
    pub max_count: u64,
    pub colliding_pairs: u128,
    /// Statistical distance as an exact fraction `num/den` in lowest terms.
    pub sd_exact: String,
    /// Dense histogram indexed by symbol, for small alphabets.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    pub formula: &'static str,
    pub value: f64,
    /// Set when the bound holds only up to an unspecified constant factor.
    pub asymptotic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<f64>,
}

/// `M = max_{a ≠ 0}` of the bilinear sum matching the extractor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MagnitudeReport {
    pub value: f64,
    /// Field index of the smallest `a` attaining `value`.
    pub a: u64,
    /// `√(q q1 q2)` with `q` the field size.
    pub reference: f64,
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excluded_pairs: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub params: AuditParams,
    pub distribution_summary: DistributionSummary,
    pub sd: f64,
    pub col: f64,
    pub guess: f64,
    pub lemma1: Lemma1Check,
    pub bound: BoundValue,
    pub bound_parts: Option<[f64; 2]>,
    #[serde(rename = "M")]
    pub m: Option<MagnitudeReport>,
    pub status: Status,
}

impl BoundReport {
    /// JSON value with every float rounded to 15 significant digits.
    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        round_floats(&mut v);
        v
    }
}

/// Rounds every non-integer number in `v` to 15 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            let rounded: f64 = format!("{x:.14e}").parse().unwrap();
            *v = serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number);
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty-printed JSON array of reports, newline-terminated.
pub fn reports_to_json(reports: &[BoundReport]) -> String {
    let arr = Value::Array(reports.iter().map(BoundReport::to_json).collect());
    let mut s = serde_json::to_string_pretty(&arr).expect("json");
    s.push('\n');
    s
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn audit_extractor(spec: &ExtractorSpec) -> Result<BoundReport> {
    audit_with(spec, &AuditOptions::default())
}

pub fn audit_with(spec: &ExtractorSpec, options: &AuditOptions) -> Result<BoundReport> {
    let d = distribution_with(spec, options)?;
    let sd = statistical_distance(&d)?;
    let (num, den) = statistical_distance_exact(&d)?;
    let g = gcd(num, den).max(1);
    let params = params_of(spec)?;
    let (p, n, k, q1, q2) = (params.p, params.n, params.k, params.q1, params.q2);
    let (bound, bound_parts) = match spec.kind() {
        ExtractorKind::FpLsb => {
            let (a, b) = lemma4_parts(p, k, q1, q2);
            let value = BoundValue {
                formula: "0.5*(sqrt(2^k/p) + sqrt(2^k*p*log2(p)/(q1*q2)))",
                value: 0.5 * (a + b),
                asymptotic: false,
                closed_form: Some(lemma4_closed_form(p, k, q1, q2)),
            };
            (value, Some([a, b]))
        }
        ExtractorKind::FpnCoord => (
            BoundValue {
                formula: "sqrt(p^(n+k-2)/(q1*q2))",
                value: bound_lemma6(p, n, k, q1, q2),
                asymptotic: false,
                closed_form: None,
            },
            None,
        ),
        ExtractorKind::EcFpLsb => (
            BoundValue {
                formula: "sqrt(2^(k-2)*p*log2(p)/(q1*q2))",
                value: bound_ec_fp(p, k, q1, q2),
                asymptotic: true,
                closed_form: None,
            },
            None,
        ),
        ExtractorKind::EcFpnCoord => (
            BoundValue {
                formula: "sqrt(p^(n+k)/(4*q1*q2))",
                value: bound_ec_fpn(p, n, k, q1, q2),
                asymptotic: true,
                closed_form: None,
            },
            None,
        ),
    };
    let status = Status::classify(sd, bound.value);
    Ok(BoundReport {
        distribution_summary: DistributionSummary {
            alphabet_size: d.alphabet_size,
            total: d.total,
            excluded_pairs: d.excluded,
            support: d.support(),
            min_count: d.min_count(),
            max_count: d.max_count(),
            colliding_pairs: colliding_pairs(&d),
            sd_exact: format!("{}/{}", num / g, den / g),
            counts: (d.alphabet_size <= REPORT_COUNTS_LIMIT).then(|| {
                let mut dense = vec![0; d.alphabet_size as usize];
                for &(s, c) in &d.counts {
                    dense[s as usize] = c;
                }
                dense
            }),
        },
        sd,
        col: collision_probability(&d)?,
        guess: guessing_probability(&d)?,
        lemma1: check_lemma1(&d)?,
        bound,
        bound_parts,
        m: max_magnitude(spec, params.field_order)?,
        status,
        params,
    })
}

fn params_of(spec: &ExtractorSpec) -> Result<AuditParams> {
    let sources = spec.sources();
    let p = sources.characteristic();
    let n = sources.degree();
    let (q1, q2) = sources.orders();
    let (reduction_poly, field_order, curve) = match sources {
        Sources::Fp(..) => (None, p, None),
        Sources::Fpn(g, _) => (
            Some(g.field().reduction_poly_text()),
            g.field().order(),
            None,
        ),
        Sources::EcFp(g, _) => (None, p, Some(curve_params(g)?)),
        Sources::EcFpn(g, _) => {
            let f = g.curve().field();
            (
                Some(f.reduction_poly_text()),
                f.order(),
                Some(curve_params(g)?),
            )
        }
    };
    let output_encoding = match spec.kind() {
        ExtractorKind::FpLsb => "lsb_k(x1*x2); symbol = (x1*x2 mod p) mod 2^k",
        ExtractorKind::FpnCoord => {
            "coordinate-wise products (x_1*x'_1, ..., x_k*x'_k) in the power basis; symbol = sum t_i p^(i-1)"
        }
        ExtractorKind::EcFpLsb => "lsb_k(x(P)*x(Q)); symbol = (x(P)*x(Q) mod p) mod 2^k; pairs with O excluded",
        ExtractorKind::EcFpnCoord => {
            "first k power-basis coordinates of x(P)*x(Q); symbol = sum t_i p^(i-1); pairs with O excluded"
        }
    };
    Ok(AuditParams {
        entry: None,
        kind: spec.kind(),
        p,
        n,
        reduction_poly,
        field_order,
        curve,
        k: spec.k(),
        q1,
        q2,
        m: bit_length(p),
        l1: bit_length(q1),
        l2: bit_length(q2),
        alphabet_size: spec.alphabet_size()?,
        same_group: sources.same_group(),
        output_encoding,
    })
}

fn curve_params<F: FiniteField>(g: &EcSubgroup<F>) -> Result<CurveParams>
where
    F::Elem: fmt::Display,
{
    let c = g.curve();
    Ok(CurveParams {
        a: c.a().to_string(),
        b: c.b().to_string(),
        points: c.enumerate()?.len() as u64,
    })
}

fn max_magnitude(spec: &ExtractorSpec, field_order: u64) -> Result<Option<MagnitudeReport>> {
    let (q1, q2) = spec.sources().orders();
    let reference = (field_order as f64 * q1 as f64 * q2 as f64).sqrt();
    let report = |value: f64, a: u64, excluded: Option<u64>| MagnitudeReport {
        value,
        a,
        reference,
        ratio: value / reference,
        excluded_pairs: excluded,
    };
    Ok(match spec.sources() {
        Sources::Fp(g1, g2) if field_order <= MAX_SWEEP_PRIME => {
            let (v, a) = max_bilinear_magnitude(g1, g2)?;
            Some(report(v, a, None))
        }
        Sources::Fpn(g1, g2) if field_order <= MAX_SWEEP_FIELD => {
            let (v, a) = max_bilinear_magnitude(g1, g2)?;
            Some(report(v, a, None))
        }
        Sources::EcFp(g1, g2) if field_order <= MAX_SWEEP_PRIME => {
            let (v, a, ex) = max_ec_bilinear_magnitude::<PrimeField>(g1, g2)?;
            Some(report(v, a, Some(ex)))
        }
        Sources::EcFpn(g1, g2) if field_order <= MAX_SWEEP_FIELD => {
            let (v, a, ex) = max_ec_bilinear_magnitude::<ExtField>(g1, g2)?;
            Some(report(v, a, Some(ex)))
        }
        _ => None,
    })
}
