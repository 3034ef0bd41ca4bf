//! The finite-field abstraction shared by the prime-field and extension-field
//! backends, and multiplicative subgroups built on top of it.

use std::collections::HashSet;
use std::fmt::Debug;
use std::hash::Hash;

use crate::arith::{bit_length, prime_factors};
use crate::error::{capacity_err, param_err, Error, Result};

/// Largest subgroup (or point set) the crate will enumerate into memory.
pub const MAX_ENUMERATION: u64 = 1 << 26;

pub trait FiniteField: Clone + Debug + PartialEq + Send + Sync {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn characteristic(&self) -> u64;
    /// Number of elements, `p^n`.
    fn order(&self) -> u64;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Image of an integer under the canonical map `Z -> F`.
    fn constant(&self, v: u64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn contains(&self, a: &Self::Elem) -> bool;
    /// Bijection `F -> [0, order)`; coordinates read as base-`p` digits,
    /// first coordinate least significant.
    fn index_of(&self, a: &Self::Elem) -> u64;
    fn element_at(&self, index: u64) -> Self::Elem;

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }
}

/// A cyclic multiplicative subgroup of `F*` with an enumerated element list.
///
/// `elements[i] = generator^i`, so `elements[0]` is always one.
#[derive(Clone, Debug)]
pub struct Subgroup<F: FiniteField> {
    field: F,
    generator: F::Elem,
    order: u64,
    elements: Vec<F::Elem>,
    members: HashSet<F::Elem>,
}

impl<F: FiniteField> Subgroup<F> {
    /// The subgroup of order `q`, generated by `h^((|F|-1)/q)` for the first
    /// nonzero candidate `h` (scanning indices upward from `seed`) that yields
    /// an element of exact order `q`.
    pub fn of_order(field: &F, q: u64, seed: u64) -> Result<Self> {
        let group_order = field.order() - 1;
        if q == 0 || !group_order.is_multiple_of(q) {
            return Err(param_err!(
                "subgroup order {q} does not divide {group_order}"
            ));
        }
        if q > MAX_ENUMERATION {
            return Err(capacity_err!(
                "subgroup order {q} exceeds enumeration cap {MAX_ENUMERATION}"
            ));
        }
        let cofactor = group_order / q;
        let factors = prime_factors(q);
        let size = field.order();
        for step in 0..size {
            let h = field.element_at((seed % size + step) % size);
            if field.is_zero(&h) {
                continue;
            }
            let g = field.pow(&h, cofactor);
            if has_exact_order(field, &g, q, &factors) {
                return Ok(Self::from_generator(field, g, q));
            }
        }
        Err(Error::Internal(format!(
            "no element of order {q} found although {q} | {group_order}"
        )))
    }

    fn from_generator(field: &F, generator: F::Elem, order: u64) -> Self {
        let mut elements = Vec::with_capacity(order as usize);
        let mut x = field.one();
        for _ in 0..order {
            elements.push(x.clone());
            x = field.mul(&x, &generator);
        }
        debug_assert_eq!(x, field.one());
        let members = elements.iter().cloned().collect();
        Self {
            field: field.clone(),
            generator,
            order,
            elements,
            members,
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn generator(&self) -> &F::Elem {
        &self.generator
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Bit length of the order.
    pub fn bitlen(&self) -> u32 {
        bit_length(self.order)
    }

    pub fn elements(&self) -> &[F::Elem] {
        &self.elements
    }

    pub fn contains(&self, x: &F::Elem) -> bool {
        self.members.contains(x)
    }

    /// Every subgroup of `F*`, one per divisor of `|F| - 1`.
    pub fn all(field: &F) -> Result<Vec<Self>> {
        crate::arith::divisors(field.order() - 1)
            .into_iter()
            .map(|q| Self::of_order(field, q, 1))
            .collect()
    }
}

pub(crate) fn has_exact_order<F: FiniteField>(
    field: &F,
    g: &F::Elem,
    q: u64,
    factors: &[u64],
) -> bool {
    field.pow(g, q) == field.one() && factors.iter().all(|r| field.pow(g, q / r) != field.one())
}
