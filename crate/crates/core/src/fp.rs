//! Prime-field arithmetic, multiplicative subgroups of `F_p*` and `lsb_k`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::arith::{bit_length, is_prime, mul_mod, pow_mod};
use crate::error::{domain_err, param_err, Result};
use crate::field::{FiniteField, Subgroup};

/// The prime field `F_p` for a prime `p < 2^61`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeField {
    p: u64,
    bits: u32,
}

/// A multiplicative subgroup of `F_p*`.
pub type FpSubgroup = Subgroup<PrimeField>;

impl PrimeField {
    pub const MAX_MODULUS: u64 = 1 << 61;

    pub fn new(p: u64) -> Result<Self> {
        if p >= Self::MAX_MODULUS {
            return Err(param_err!("modulus {p} is not below 2^61"));
        }
        if !is_prime(p) {
            return Err(param_err!("modulus {p} is not prime"));
        }
        Ok(Self {
            p,
            bits: bit_length(p),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// `m` with `2^(m-1) <= p < 2^m`.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Canonical element for a residue already in `[0, p)`.
    pub fn element(&self, value: u64) -> Result<Fp> {
        if value >= self.p {
            return Err(param_err!(
                "{value} is not a canonical residue mod {}",
                self.p
            ));
        }
        Ok(Fp {
            value,
            modulus: self.p,
        })
    }

    /// Reduces an arbitrary integer mod `p`.
    pub fn reduce(&self, value: u64) -> Fp {
        Fp {
            value: value % self.p,
            modulus: self.p,
        }
    }

    pub fn subgroup_of_order(&self, q: u64, seed: u64) -> Result<FpSubgroup> {
        Subgroup::of_order(self, q, seed)
    }
}

impl FiniteField for PrimeField {
    type Elem = Fp;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn order(&self) -> u64 {
        self.p
    }
    fn zero(&self) -> Fp {
        self.reduce(0)
    }
    fn one(&self) -> Fp {
        self.reduce(1)
    }
    fn constant(&self, v: u64) -> Fp {
        self.reduce(v)
    }
    fn add(&self, a: &Fp, b: &Fp) -> Fp {
        *a + *b
    }
    fn sub(&self, a: &Fp, b: &Fp) -> Fp {
        *a - *b
    }
    fn neg(&self, a: &Fp) -> Fp {
        -*a
    }
    fn mul(&self, a: &Fp, b: &Fp) -> Fp {
        *a * *b
    }
    fn inv(&self, a: &Fp) -> Result<Fp> {
        a.inv()
    }
    fn is_zero(&self, a: &Fp) -> bool {
        a.value == 0
    }
    fn contains(&self, a: &Fp) -> bool {
        a.modulus == self.p && a.value < self.p
    }
    fn index_of(&self, a: &Fp) -> u64 {
        a.value
    }
    fn element_at(&self, index: u64) -> Fp {
        self.reduce(index)
    }
    fn pow(&self, a: &Fp, e: u64) -> Fp {
        a.pow(e)
    }
}

/// A canonical residue together with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn same_field(&self, other: &Fp) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(param_err!(
                "modulus mismatch: {} vs {}",
                self.modulus,
                other.modulus
            ));
        }
        Ok(())
    }

    pub fn checked_add(self, rhs: Fp) -> Result<Fp> {
        self.same_field(&rhs)?;
        let s = self.value + rhs.value;
        let value = if s >= self.modulus {
            s - self.modulus
        } else {
            s
        };
        Ok(Fp { value, ..self })
    }

    pub fn checked_sub(self, rhs: Fp) -> Result<Fp> {
        self.same_field(&rhs)?;
        let value = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + self.modulus - rhs.value
        };
        Ok(Fp { value, ..self })
    }

    pub fn checked_mul(self, rhs: Fp) -> Result<Fp> {
        self.same_field(&rhs)?;
        Ok(Fp {
            value: mul_mod(self.value, rhs.value, self.modulus),
            ..self
        })
    }

    pub fn pow(self, e: u64) -> Fp {
        Fp {
            value: pow_mod(self.value, e, self.modulus),
            ..self
        }
    }

    /// Inverse via Fermat's little theorem.
    pub fn inv(self) -> Result<Fp> {
        if self.value == 0 {
            return Err(domain_err!("zero has no inverse mod {}", self.modulus));
        }
        Ok(self.pow(self.modulus - 2))
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.checked_add(rhs)
            .expect("operands from different fields")
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self.checked_sub(rhs)
            .expect("operands from different fields")
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.checked_mul(rhs)
            .expect("operands from different fields")
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        let value = if self.value == 0 {
            0
        } else {
            self.modulus - self.value
        };
        Fp { value, ..self }
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A fixed-width bit string. `Display` writes the least significant bit last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    value: u64,
    len: u32,
}

impl BitString {
    pub fn new(value: u64, len: u32) -> Self {
        debug_assert!(len == 64 || value >> len == 0);
        Self { value, len }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bits in little-endian order (least significant first).
    pub fn bits_le(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.value >> i & 1 == 1).collect()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len).rev() {
            f.write_str(if self.value >> i & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn low_bits(value: u64, k: u32) -> u64 {
    if k >= 64 {
        value
    } else {
        value & ((1u64 << k) - 1)
    }
}

/// The `k` least significant bits of the canonical representative of `x`.
pub fn lsb(x: Fp, k: u32) -> Result<BitString> {
    let m = bit_length(x.modulus);
    if k > m {
        return Err(param_err!(
            "k = {k} exceeds the bit length {m} of p = {}",
            x.modulus
        ));
    }
    Ok(BitString::new(low_bits(x.value, k), k))
}
