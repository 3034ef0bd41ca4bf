//! Extension fields `F_{p^n} = F_p[x]/(f)` in the power basis `1, α, …, α^(n-1)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::arith::{mul_mod, pow_mod};
use crate::error::{capacity_err, domain_err, param_err, Error, Result};
use crate::field::{FiniteField, Subgroup, MAX_ENUMERATION};
use crate::fp::{Fp, PrimeField};

/// A multiplicative subgroup of `F_{p^n}*`.
pub type FpnSubgroup = Subgroup<ExtField>;

/// An element of `F_{p^n}` as its `n` coordinates in the power basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fpn {
    coords: Vec<u64>,
}

impl Fpn {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

impl fmt::Display for Fpn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A reduction polynomial written as comma-separated coefficients, constant
/// term first, leading coefficient included (`"1,1,1"` is `x^2 + x + 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyText(pub Vec<u64>);

impl FromStr for PolyText {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coeffs = parse_u64_list(s)?;
        if coeffs.len() < 2 {
            return Err(Error::Parse(format!("polynomial {s:?} has degree < 1")));
        }
        Ok(PolyText(coeffs))
    }
}

pub(crate) fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<u64>()
                .map_err(|_| Error::Parse(format!("{t:?} is not a nonnegative integer")))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtField {
    #[serde(skip)]
    base: PrimeField,
    p: u64,
    n: usize,
    /// Monic, `n + 1` coefficients, constant term first.
    reduction_poly: Vec<u64>,
    #[serde(skip)]
    order: u64,
}

impl ExtField {
    pub fn new(p: u64, reduction_poly: &[u64]) -> Result<Self> {
        let base = PrimeField::new(p)?;
        if reduction_poly.len() < 2 {
            return Err(param_err!("reduction polynomial must have degree >= 1"));
        }
        if reduction_poly.iter().any(|&c| c >= p) {
            return Err(param_err!(
                "reduction polynomial coefficients must lie in [0, {p})"
            ));
        }
        if *reduction_poly.last().unwrap() != 1 {
            return Err(param_err!("reduction polynomial must be monic"));
        }
        let n = reduction_poly.len() - 1;
        let order = u32::try_from(n)
            .ok()
            .and_then(|n| p.checked_pow(n))
            .filter(|&o| o < 1 << 62)
            .ok_or_else(|| capacity_err!("field order {p}^{n} does not fit below 2^62"))?;
        let field = Self {
            base,
            p,
            n,
            reduction_poly: reduction_poly.to_vec(),
            order,
        };
        if !field.reduction_poly_is_irreducible() {
            return Err(param_err!(
                "reduction polynomial {} is reducible over F_{p}",
                PolyDisplay(reduction_poly)
            ));
        }
        Ok(field)
    }

    /// The field of order `p^n` reduced by the first irreducible monic
    /// polynomial, ordering candidates by their lower coefficients read as a
    /// base-`p` number with the constant term least significant.
    pub fn with_degree(p: u64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(param_err!("extension degree must be >= 1"));
        }
        PrimeField::new(p)?;
        let candidates = u32::try_from(n)
            .ok()
            .and_then(|n| p.checked_pow(n))
            .filter(|&o| o < 1 << 62)
            .ok_or_else(|| capacity_err!("field order {p}^{n} does not fit below 2^62"))?;
        let mut coeffs = vec![0u64; n + 1];
        coeffs[n] = 1;
        for mut t in 0..candidates {
            for c in coeffs.iter_mut().take(n) {
                *c = t % p;
                t /= p;
            }
            if let Ok(field) = Self::new(p, &coeffs) {
                return Ok(field);
            }
        }
        Err(Error::Internal(format!(
            "no irreducible polynomial of degree {n} over F_{p}"
        )))
    }

    pub fn parse(p: u64, poly: &str) -> Result<Self> {
        let PolyText(coeffs) = poly.parse()?;
        Self::new(p, &coeffs)
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn reduction_poly(&self) -> &[u64] {
        &self.reduction_poly
    }

    pub fn reduction_poly_text(&self) -> String {
        self.reduction_poly
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Builds an element from up to `n` coordinates, padding with zeros.
    pub fn element(&self, coords: &[u64]) -> Result<Fpn> {
        if coords.len() > self.n {
            return Err(param_err!(
                "{} coordinates given for a degree-{} field",
                coords.len(),
                self.n
            ));
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= self.p) {
            return Err(param_err!("coordinate {c} is not a residue mod {}", self.p));
        }
        let mut v = coords.to_vec();
        v.resize(self.n, 0);
        Ok(Fpn { coords: v })
    }

    pub fn parse_element(&self, s: &str) -> Result<Fpn> {
        self.element(&parse_u64_list(s)?)
    }

    /// Embeds a prime-field element as a constant.
    pub fn embed(&self, x: Fp) -> Fpn {
        let mut c = vec![0; self.n];
        c[0] = x.value();
        Fpn { coords: c }
    }

    /// `Tr(x) = Σ_{i<n} x^(p^i)`, which always lands in the prime subfield.
    pub fn trace(&self, x: &Fpn) -> Fp {
        let mut acc = x.clone();
        let mut frob = x.clone();
        for _ in 1..self.n {
            frob = self.pow(&frob, self.p);
            acc = self.add(&acc, &frob);
        }
        assert!(
            acc.coords[1..].iter().all(|&c| c == 0),
            "trace of {x} left the prime subfield"
        );
        self.base.reduce(acc.coords[0])
    }

    pub fn mult_subgroup(&self, q: u64, seed: u64) -> Result<FpnSubgroup> {
        Subgroup::of_order(self, q, seed)
    }

    fn reduction_poly_is_irreducible(&self) -> bool {
        if self.n == 1 {
            return true;
        }
        let f = &self.reduction_poly;
        let x = vec![0, 1];
        let mut x_pow = x.clone();
        for _ in 1..=self.n / 2 {
            x_pow = poly_pow_mod(&x_pow, self.p, f, self.p);
            let diff = poly_sub(&x_pow, &x, self.p);
            let g = poly_gcd(&diff, f, self.p);
            if poly_degree(&g).is_some_and(|d| d > 0) {
                return false;
            }
        }
        true
    }

    fn reduce_poly(&self, mut r: Vec<u64>) -> Vec<u64> {
        let p = self.p;
        let n = self.n;
        let f = &self.reduction_poly;
        for d in (n..r.len()).rev() {
            let c = r[d];
            if c == 0 {
                continue;
            }
            r[d] = 0;
            for j in 0..n {
                let t = mul_mod(c, f[j], p);
                r[d - n + j] = (r[d - n + j] + p - t) % p;
            }
        }
        r.truncate(n);
        r.resize(n, 0);
        r
    }
}

impl FiniteField for ExtField {
    type Elem = Fpn;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn order(&self) -> u64 {
        self.order
    }
    fn zero(&self) -> Fpn {
        Fpn {
            coords: vec![0; self.n],
        }
    }
    fn one(&self) -> Fpn {
        let mut c = vec![0; self.n];
        c[0] = 1;
        Fpn { coords: c }
    }
    fn constant(&self, v: u64) -> Fpn {
        self.embed(self.base.reduce(v))
    }
    fn add(&self, a: &Fpn, b: &Fpn) -> Fpn {
        let p = self.p;
        Fpn {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| (x + y) % p)
                .collect(),
        }
    }
    fn sub(&self, a: &Fpn, b: &Fpn) -> Fpn {
        let p = self.p;
        Fpn {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| (x + p - y) % p)
                .collect(),
        }
    }
    fn neg(&self, a: &Fpn) -> Fpn {
        let p = self.p;
        Fpn {
            coords: a.coords.iter().map(|x| (p - x) % p).collect(),
        }
    }
    fn mul(&self, a: &Fpn, b: &Fpn) -> Fpn {
        let p = self.p;
        let mut r = vec![0u64; 2 * self.n - 1];
        for (i, &x) in a.coords.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coords.iter().enumerate() {
                r[i + j] = (r[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        Fpn {
            coords: self.reduce_poly(r),
        }
    }
    /// Extended Euclid on `(a, f)`.
    fn inv(&self, a: &Fpn) -> Result<Fpn> {
        if self.is_zero(a) {
            return Err(domain_err!(
                "zero has no inverse in F_{}^{}",
                self.p,
                self.n
            ));
        }
        let p = self.p;
        let (mut r0, mut r1) = (self.reduction_poly.clone(), trim(a.coords.clone()));
        let (mut s0, mut s1) = (Vec::new(), vec![1u64]);
        while poly_degree(&r1).is_some() {
            let (q, r) = poly_divmod(&r0, &r1, p);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1, p), p);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant since f is irreducible
        let c = r0[0];
        let c_inv = pow_mod(c, p - 2, p);
        let scaled: Vec<u64> = s0.iter().map(|&s| mul_mod(s, c_inv, p)).collect();
        Ok(Fpn {
            coords: self.reduce_poly(scaled),
        })
    }
    fn is_zero(&self, a: &Fpn) -> bool {
        a.coords.iter().all(|&c| c == 0)
    }
    fn contains(&self, a: &Fpn) -> bool {
        a.coords.len() == self.n && a.coords.iter().all(|&c| c < self.p)
    }
    fn index_of(&self, a: &Fpn) -> u64 {
        a.coords.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }
    fn element_at(&self, mut index: u64) -> Fpn {
        index %= self.order;
        let mut c = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            c.push(index % self.p);
            index /= self.p;
        }
        Fpn { coords: c }
    }
}

/// The `F_p`-span of a list of field elements, fully enumerated.
#[derive(Clone, Debug)]
pub struct AdditiveSubgroup {
    field: ExtField,
    basis_vectors: Vec<Fpn>,
    echelon: Vec<Fpn>,
    elements: Vec<Fpn>,
}

impl AdditiveSubgroup {
    pub fn span(field: &ExtField, basis_vectors: &[Fpn]) -> Result<Self> {
        if let Some(v) = basis_vectors.iter().find(|v| !field.contains(v)) {
            return Err(param_err!("{v} is not an element of the field"));
        }
        let echelon = row_echelon(field, basis_vectors);
        let size = field
            .p
            .checked_pow(echelon.len() as u32)
            .filter(|&s| s <= MAX_ENUMERATION)
            .ok_or_else(|| {
                capacity_err!(
                    "subspace of rank {} is too large to enumerate",
                    echelon.len()
                )
            })?;
        let mut elements = vec![field.zero()];
        for b in &echelon {
            let mut next = Vec::with_capacity(elements.len() * field.p as usize);
            for c in 0..field.p {
                let shift = scale(field, b, c);
                next.extend(elements.iter().map(|e| field.add(e, &shift)));
            }
            elements = next;
        }
        debug_assert_eq!(elements.len() as u64, size);
        Ok(Self {
            field: field.clone(),
            basis_vectors: basis_vectors.to_vec(),
            echelon,
            elements,
        })
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn basis_vectors(&self) -> &[Fpn] {
        &self.basis_vectors
    }

    pub fn rank(&self) -> usize {
        self.echelon.len()
    }

    pub fn elements(&self) -> &[Fpn] {
        &self.elements
    }
}

pub(crate) fn scale(field: &ExtField, v: &Fpn, c: u64) -> Fpn {
    Fpn {
        coords: v.coords.iter().map(|&x| mul_mod(x, c, field.p)).collect(),
    }
}

/// Reduced row echelon form of the coordinate vectors, zero rows dropped.
fn row_echelon(field: &ExtField, vectors: &[Fpn]) -> Vec<Fpn> {
    let p = field.p;
    let mut rows: Vec<Vec<u64>> = vectors.iter().map(|v| v.coords.clone()).collect();
    let mut rank = 0;
    for col in 0..field.n {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = pow_mod(rows[rank][col], p - 2, p);
        for x in rows[rank].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let factor = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + p - mul_mod(factor, y, p)) % p;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows.into_iter().map(|coords| Fpn { coords }).collect()
}

// Dense polynomials over F_p, constant term first.

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    let r = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(r)
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(r)
}

fn poly_divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let db = poly_degree(b).expect("division by the zero polynomial");
    let lead_inv = pow_mod(b[db], p - 2, p);
    let mut r = trim(a.to_vec());
    let mut q = vec![0; r.len().saturating_sub(db).max(1)];
    while let Some(dr) = poly_degree(&r) {
        if dr < db {
            break;
        }
        let c = mul_mod(r[dr], lead_inv, p);
        q[dr - db] = c;
        for j in 0..=db {
            let t = mul_mod(c, b[j], p);
            r[dr - db + j] = (r[dr - db + j] + p - t) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while poly_degree(&y).is_some() {
        let (_, r) = poly_divmod(&x, &y, p);
        x = std::mem::replace(&mut y, r);
    }
    x
}

fn poly_pow_mod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_divmod(base, f, p).1;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_divmod(&poly_mul(&acc, &b, p), f, p).1;
        }
        b = poly_divmod(&poly_mul(&b, &b, p), f, p).1;
        e >>= 1;
    }
    acc
}

struct PolyDisplay<'a>(&'a [u64]);

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".into(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}
