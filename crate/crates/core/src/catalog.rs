//! Parameter catalog: named, fully seeded extractor configurations.
//!
//! The catalog is a TOML document with one `[[entry]]` table per
//! configuration. Elements of `F_{p^n}` are written as comma-separated
//! coordinates, constant term first; curve points as `x/y`, or `O` for the
//! point at infinity.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ec::{hasse_holds, Curve, Point};
use crate::error::{param_err, Error, Result};
use crate::extract::{ExtractorKind, ExtractorSpec, SourceElement, Sources};
use crate::field::FiniteField;
use crate::fp::PrimeField;
use crate::fpn::{AdditiveSubgroup, ExtField};

/// The catalog shipped with the crate.
pub const BUILTIN: &str = include_str!("../catalog/catalog.toml");

fn default_seed() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDef {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub kind: ExtractorKind,
    pub p: u64,
    /// Reduction polynomial for extension-field kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    pub q1: u64,
    pub q2: u64,
    #[serde(default = "default_seed")]
    pub seed1: u64,
    #[serde(default = "default_seed")]
    pub seed2: u64,
    pub k: u32,
    /// Spanning vectors of the additive subgroup used by the Winterhof check;
    /// defaults to `{1}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winterhof_basis: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    #[serde(default)]
    entry: Vec<EntryDef>,
}

#[derive(Clone, Debug, Default)]
pub struct Catalog {
    entries: Vec<EntryDef>,
}

impl Catalog {
    pub fn builtin() -> Result<Self> {
        Self::parse(BUILTIN)
    }

    /// Parses and validates every entry.
    pub fn parse(text: &str) -> Result<Self> {
        let file: CatalogFile =
            toml::from_str(text).map_err(|e| Error::Parse(format!("catalog: {e}")))?;
        for (i, e) in file.entry.iter().enumerate() {
            if file.entry[..i].iter().any(|o| o.name == e.name) {
                return Err(param_err!("catalog: duplicate entry name {:?}", e.name));
            }
            e.build(None)
                .map_err(|err| err.context(&format!("catalog entry {:?}", e.name)))?;
        }
        Ok(Self {
            entries: file.entry,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read catalog {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn entries(&self) -> &[EntryDef] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Result<&EntryDef> {
        self.entries.iter().find(|e| e.name == name).ok_or_else(|| {
            let names: Vec<&str> = self.entries.iter().map(|e| e.name.as_str()).collect();
            param_err!(
                "no catalog entry named {name:?}; known entries: {}",
                names.join(", ")
            )
        })
    }
}

/// A catalog entry with its field, curve and subgroups constructed.
#[derive(Clone, Debug)]
pub struct Entry {
    def: EntryDef,
    spec: ExtractorSpec,
}

impl EntryDef {
    /// Builds the entry, optionally overriding its `k`.
    pub fn build(&self, k: Option<u32>) -> Result<Entry> {
        let k = k.unwrap_or(self.k);
        let sources = match self.kind {
            ExtractorKind::FpLsb => {
                self.reject_curve()?;
                self.reject_poly()?;
                let f = PrimeField::new(self.p)?;
                Sources::Fp(
                    f.subgroup_of_order(self.q1, self.seed1)?,
                    f.subgroup_of_order(self.q2, self.seed2)?,
                )
            }
            ExtractorKind::FpnCoord => {
                self.reject_curve()?;
                let f = self.ext_field()?;
                Sources::Fpn(
                    f.mult_subgroup(self.q1, self.seed1)?,
                    f.mult_subgroup(self.q2, self.seed2)?,
                )
            }
            ExtractorKind::EcFpLsb => {
                self.reject_poly()?;
                let f = PrimeField::new(self.p)?;
                let (a, b) = self.coefficients()?;
                let curve = Curve::new(f, f.element(parse_u64(a)?)?, f.element(parse_u64(b)?)?)?;
                check_hasse(&curve)?;
                Sources::EcFp(
                    curve.subgroup(self.q1, self.seed1)?,
                    curve.subgroup(self.q2, self.seed2)?,
                )
            }
            ExtractorKind::EcFpnCoord => {
                let f = self.ext_field()?;
                let (a, b) = self.coefficients()?;
                let curve = Curve::new(f.clone(), f.parse_element(a)?, f.parse_element(b)?)?;
                check_hasse(&curve)?;
                Sources::EcFpn(
                    curve.subgroup(self.q1, self.seed1)?,
                    curve.subgroup(self.q2, self.seed2)?,
                )
            }
        };
        let spec = ExtractorSpec::new(k, sources)?;
        if let Some(basis) = &self.winterhof_basis {
            let field = self.character_field()?;
            basis
                .iter()
                .map(|v| field.parse_element(v))
                .collect::<Result<Vec<_>>>()?;
        }
        Ok(Entry {
            def: self.clone(),
            spec,
        })
    }

    fn reject_curve(&self) -> Result<()> {
        if self.a.is_some() || self.b.is_some() {
            return Err(param_err!(
                "curve coefficients given for a {} entry",
                self.kind
            ));
        }
        Ok(())
    }

    fn reject_poly(&self) -> Result<()> {
        if self.poly.is_some() {
            return Err(param_err!(
                "reduction polynomial given for a {} entry",
                self.kind
            ));
        }
        Ok(())
    }

    fn ext_field(&self) -> Result<ExtField> {
        let poly = self
            .poly
            .as_deref()
            .ok_or_else(|| param_err!("{} entry needs a reduction polynomial", self.kind))?;
        ExtField::parse(self.p, poly)
    }

    fn coefficients(&self) -> Result<(&str, &str)> {
        match (&self.a, &self.b) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(param_err!(
                "{} entry needs curve coefficients a and b",
                self.kind
            )),
        }
    }

    /// The field whose additive characters the character-sum checks use:
    /// the extension field, or `F_p` viewed as a degree-1 extension.
    pub fn character_field(&self) -> Result<ExtField> {
        match self.kind {
            ExtractorKind::FpnCoord | ExtractorKind::EcFpnCoord => self.ext_field(),
            ExtractorKind::FpLsb | ExtractorKind::EcFpLsb => ExtField::new(self.p, &[0, 1]),
        }
    }
}

fn parse_u64(s: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{s:?} is not a nonnegative integer")))
}

fn check_hasse<F: FiniteField>(curve: &Curve<F>) -> Result<()> {
    let count = curve.enumerate()?.len() as u64;
    let q = curve.field().order();
    if !hasse_holds(count, q) {
        return Err(Error::Internal(format!(
            "{count} points violates the Hasse bound for q = {q}"
        )));
    }
    Ok(())
}

impl Entry {
    pub fn def(&self) -> &EntryDef {
        &self.def
    }

    pub fn name(&self) -> &str {
        &self.def.name
    }

    pub fn spec(&self) -> &ExtractorSpec {
        &self.spec
    }

    /// The additive subgroup spanned by the entry's Winterhof basis.
    pub fn winterhof_subgroup(&self) -> Result<AdditiveSubgroup> {
        let field = self.def.character_field()?;
        let basis = match &self.def.winterhof_basis {
            Some(b) => b
                .iter()
                .map(|v| field.parse_element(v))
                .collect::<Result<Vec<_>>>()?,
            None => vec![field.one()],
        };
        AdditiveSubgroup::span(&field, &basis)
    }

    /// Parses a source element written in the entry's notation.
    pub fn parse_element(&self, text: &str) -> Result<SourceElement> {
        let text = text.trim();
        Ok(match self.spec.sources() {
            Sources::Fp(g, _) => SourceElement::Fp(g.field().element(parse_u64(text)?)?),
            Sources::Fpn(g, _) => SourceElement::Fpn(g.field().parse_element(text)?),
            Sources::EcFp(g, _) => {
                let c = g.curve();
                SourceElement::EcFp(parse_point(
                    text,
                    |s| c.field().element(parse_u64(s)?),
                    |x, y| c.point(x, y),
                )?)
            }
            Sources::EcFpn(g, _) => {
                let c = g.curve();
                SourceElement::EcFpn(parse_point(
                    text,
                    |s| c.field().parse_element(s),
                    |x, y| c.point(x, y),
                )?)
            }
        })
    }
}

fn parse_point<E>(
    text: &str,
    elem: impl Fn(&str) -> Result<E>,
    point: impl Fn(E, E) -> Result<Point<E>>,
) -> Result<Point<E>> {
    if text == "O" || text.eq_ignore_ascii_case("inf") {
        return Ok(Point::Infinity);
    }
    let (x, y) = text
        .split_once('/')
        .ok_or_else(|| Error::Parse(format!("{text:?} is not a point; expected x/y or O")))?;
    point(elem(x)?, elem(y)?)
}

/// Formats a source element in catalog notation.
pub fn format_element(e: &SourceElement) -> String {
    fn point<E: std::fmt::Display>(p: &Point<E>) -> String {
        match p {
            Point::Infinity => "O".into(),
            Point::Affine { x, y } => format!("{x}/{y}"),
        }
    }
    match e {
        SourceElement::Fp(x) => x.to_string(),
        SourceElement::Fpn(x) => x.to_string(),
        SourceElement::EcFp(p) => point(p),
        SourceElement::EcFpn(p) => point(p),
    }
}
