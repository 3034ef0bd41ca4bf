//! The four two-source extractors.
//!
//! * `FpLsb`: `(x1, x2) -> lsb_k(x1 x2)` on subgroups of `F_p*`.
//! * `FpnCoord`: `(x, x') -> (x_1 x'_1, …, x_k x'_k)`, coordinate-wise products
//!   of the first `k` power-basis coordinates, each reduced mod `p`.
//! * `EcFpLsb`: `(P, Q) -> lsb_k(x(P) x(Q))` on curve subgroups over `F_p`.
//! * `EcFpnCoord`: the first `k` power-basis coordinates of `x(P) x(Q)` on
//!   curve subgroups over `F_{p^n}`.
//!
//! Outputs over `F_{p^n}` live in `F_p^k`, which is `{0,1}^k` only for `p = 2`.
//! The point at infinity has no `x`-coordinate and is rejected.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ec::{EcSubgroup, Point};
use crate::error::{capacity_err, domain_err, param_err, Result};
use crate::field::FiniteField;
use crate::fp::{low_bits, lsb, BitString, Fp, FpSubgroup, PrimeField};
use crate::fpn::{ExtField, Fpn, FpnSubgroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractorKind {
    FpLsb,
    FpnCoord,
    EcFpLsb,
    EcFpnCoord,
}

impl ExtractorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExtractorKind::FpLsb => "fp_lsb",
            ExtractorKind::FpnCoord => "fpn_coord",
            ExtractorKind::EcFpLsb => "ec_fp_lsb",
            ExtractorKind::EcFpnCoord => "ec_fpn_coord",
        }
    }

    /// Whether the output is a bit string (as opposed to a vector in `F_p^k`).
    pub fn is_binary(&self) -> bool {
        matches!(self, ExtractorKind::FpLsb | ExtractorKind::EcFpLsb)
    }
}

impl fmt::Display for ExtractorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One extractor output.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Bits(BitString),
    Coords { values: Vec<u64>, p: u64 },
}

impl Symbol {
    /// Integer encoding: the bit string's value, or `Σ t_i p^(i-1)` for a
    /// coordinate vector (first coordinate least significant).
    pub fn index(&self) -> u64 {
        match self {
            Symbol::Bits(b) => b.value(),
            Symbol::Coords { values, p } => encode_coords(values, *p),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Bits(b) => write!(f, "{b}"),
            Symbol::Coords { values, .. } => {
                let parts: Vec<String> = values.iter().map(u64::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

#[inline]
pub(crate) fn encode_coords(values: &[u64], p: u64) -> u64 {
    values.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// `lsb_k(x1 x2)`.
pub fn f_k(x1: Fp, x2: Fp, k: u32) -> Result<BitString> {
    lsb(x1.checked_mul(x2)?, k)
}

/// Coordinate-wise products `(x_1 x'_1, …, x_k x'_k)` mod `p`.
pub fn coordinate_products(field: &ExtField, x: &Fpn, y: &Fpn, k: usize) -> Result<Vec<u64>> {
    check_coord_width(field, k)?;
    let p = field.characteristic();
    Ok(x.coords()
        .iter()
        .zip(y.coords())
        .take(k)
        .map(|(&a, &b)| crate::arith::mul_mod(a, b, p))
        .collect())
}

/// First `k` power-basis coordinates of the field product `x y`.
pub fn product_coordinates(field: &ExtField, x: &Fpn, y: &Fpn, k: usize) -> Result<Vec<u64>> {
    check_coord_width(field, k)?;
    Ok(field.mul(x, y).coords()[..k].to_vec())
}

fn check_coord_width(field: &ExtField, k: usize) -> Result<()> {
    if k > field.degree() {
        return Err(param_err!(
            "k = {k} exceeds the extension degree {}",
            field.degree()
        ));
    }
    Ok(())
}

fn x_coord<E: Clone>(p: &Point<E>) -> Result<&E> {
    p.x()
        .ok_or_else(|| domain_err!("the point at infinity has no x-coordinate"))
}

/// `lsb_k(x(P) x(Q))` for points over `F_p`.
pub fn ec_lsb(p: &Point<Fp>, q: &Point<Fp>, k: u32) -> Result<BitString> {
    f_k(*x_coord(p)?, *x_coord(q)?, k)
}

/// First `k` coordinates of `x(P) x(Q)` for points over `F_{p^n}`.
pub fn ec_product_coordinates(
    field: &ExtField,
    p: &Point<Fpn>,
    q: &Point<Fpn>,
    k: usize,
) -> Result<Vec<u64>> {
    product_coordinates(field, x_coord(p)?, x_coord(q)?, k)
}

/// The two sources an extractor draws from.
#[derive(Clone, Debug)]
pub enum Sources {
    Fp(FpSubgroup, FpSubgroup),
    Fpn(FpnSubgroup, FpnSubgroup),
    EcFp(EcSubgroup<PrimeField>, EcSubgroup<PrimeField>),
    EcFpn(EcSubgroup<ExtField>, EcSubgroup<ExtField>),
}

impl Sources {
    pub fn kind(&self) -> ExtractorKind {
        match self {
            Sources::Fp(..) => ExtractorKind::FpLsb,
            Sources::Fpn(..) => ExtractorKind::FpnCoord,
            Sources::EcFp(..) => ExtractorKind::EcFpLsb,
            Sources::EcFpn(..) => ExtractorKind::EcFpnCoord,
        }
    }

    pub fn orders(&self) -> (u64, u64) {
        match self {
            Sources::Fp(a, b) => (a.order(), b.order()),
            Sources::Fpn(a, b) => (a.order(), b.order()),
            Sources::EcFp(a, b) => (a.order(), b.order()),
            Sources::EcFpn(a, b) => (a.order(), b.order()),
        }
    }

    /// Characteristic `p`.
    pub fn characteristic(&self) -> u64 {
        match self {
            Sources::Fp(a, _) => a.field().modulus(),
            Sources::Fpn(a, _) => a.field().characteristic(),
            Sources::EcFp(a, _) => a.curve().field().modulus(),
            Sources::EcFpn(a, _) => a.curve().field().characteristic(),
        }
    }

    /// Extension degree `n` (1 for prime fields).
    pub fn degree(&self) -> usize {
        match self {
            Sources::Fp(..) | Sources::EcFp(..) => 1,
            Sources::Fpn(a, _) => a.field().degree(),
            Sources::EcFpn(a, _) => a.curve().field().degree(),
        }
    }

    /// Whether both sources are literally the same subgroup.
    pub fn same_group(&self) -> bool {
        match self {
            Sources::Fp(a, b) => a.elements() == b.elements(),
            Sources::Fpn(a, b) => a.elements() == b.elements(),
            Sources::EcFp(a, b) => a.elements() == b.elements(),
            Sources::EcFpn(a, b) => a.elements() == b.elements(),
        }
    }
}

/// A source element handed to [`ExtractorSpec::apply`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SourceElement {
    Fp(Fp),
    Fpn(Fpn),
    EcFp(Point<Fp>),
    EcFpn(Point<Fpn>),
}

#[derive(Clone, Debug)]
pub struct ExtractorSpec {
    k: u32,
    sources: Sources,
}

impl ExtractorSpec {
    pub fn new(k: u32, sources: Sources) -> Result<Self> {
        let kind = sources.kind();
        let limit = if kind.is_binary() {
            crate::arith::bit_length(sources.characteristic())
        } else {
            sources.degree() as u32
        };
        if k > limit {
            let what = if kind.is_binary() {
                "bit length of p"
            } else {
                "extension degree"
            };
            return Err(param_err!(
                "k = {k} exceeds the {what} ({limit}) for {kind}"
            ));
        }
        let spec = Self { k, sources };
        spec.alphabet_size()?;
        Ok(spec)
    }

    pub fn kind(&self) -> ExtractorKind {
        self.sources.kind()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn sources(&self) -> &Sources {
        &self.sources
    }

    /// `|Y|`: `2^k` for bit outputs, `p^k` for coordinate outputs.
    pub fn alphabet_size(&self) -> Result<u64> {
        let base = if self.kind().is_binary() {
            2
        } else {
            self.sources.characteristic()
        };
        base.checked_pow(self.k)
            .filter(|&n| n <= 1 << 62)
            .ok_or_else(|| capacity_err!("output alphabet {base}^{} is too large", self.k))
    }

    /// Evaluates the extractor after checking both inputs belong to their sources.
    pub fn apply(&self, x1: &SourceElement, x2: &SourceElement) -> Result<Symbol> {
        let k = self.k;
        let not_member = |which: &str| domain_err!("{which} input is not in its source group");
        match (&self.sources, x1, x2) {
            (Sources::Fp(g1, g2), SourceElement::Fp(a), SourceElement::Fp(b)) => {
                if !g1.contains(a) {
                    return Err(not_member("first"));
                }
                if !g2.contains(b) {
                    return Err(not_member("second"));
                }
                Ok(Symbol::Bits(f_k(*a, *b, k)?))
            }
            (Sources::Fpn(g1, g2), SourceElement::Fpn(a), SourceElement::Fpn(b)) => {
                if !g1.contains(a) {
                    return Err(not_member("first"));
                }
                if !g2.contains(b) {
                    return Err(not_member("second"));
                }
                let field = g1.field();
                let values = coordinate_products(field, a, b, k as usize)?;
                Ok(Symbol::Coords {
                    values,
                    p: field.characteristic(),
                })
            }
            (Sources::EcFp(g1, g2), SourceElement::EcFp(a), SourceElement::EcFp(b)) => {
                if !g1.contains(a) {
                    return Err(not_member("first"));
                }
                if !g2.contains(b) {
                    return Err(not_member("second"));
                }
                Ok(Symbol::Bits(ec_lsb(a, b, k)?))
            }
            (Sources::EcFpn(g1, g2), SourceElement::EcFpn(a), SourceElement::EcFpn(b)) => {
                if !g1.contains(a) {
                    return Err(not_member("first"));
                }
                if !g2.contains(b) {
                    return Err(not_member("second"));
                }
                let field = g1.curve().field();
                let values = ec_product_coordinates(field, a, b, k as usize)?;
                Ok(Symbol::Coords {
                    values,
                    p: field.characteristic(),
                })
            }
            _ => Err(param_err!(
                "inputs do not match the {} extractor",
                self.kind()
            )),
        }
    }
}

/// Output index for `lsb_k` of a raw residue, used by the audit's fast path.
#[inline]
pub(crate) fn lsb_index(value: u64, k: u32) -> u64 {
    low_bits(value, k)
}
