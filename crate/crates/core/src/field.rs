//! Finite field arithmetic over GF(p) for small primes and over GF(2^8).
//!
//! A [`Field`] is an immutable arithmetic context; elements are plain
//! [`FieldElement`] values that are only meaningful together with the field
//! that produced them.

use std::fmt;
use std::sync::Arc;

use crate::error::{param, Error, Result};

/// Reduction polynomial x^8 + x^4 + x^3 + x + 1.
pub const GF256_POLY: u16 = 0x011B;

/// Generator of the multiplicative group of GF(2^8) modulo [`GF256_POLY`].
const GF256_GENERATOR: u8 = 0x03;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    /// GF(p), p prime, p < 2^16.
    Prime(u16),
    /// GF(2^8) with the reduction polynomial [`GF256_POLY`].
    Binary8,
}

impl FieldSpec {
    pub fn order(&self) -> u32 {
        match *self {
            FieldSpec::Prime(p) => p as u32,
            FieldSpec::Binary8 => 256,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "GF({p})"),
            FieldSpec::Binary8 => write!(f, "GF(2^8)"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u16 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Gf256Tables {
    exp: [u8; 512],
    log: [u8; 256],
}

impl Gf256Tables {
    fn build() -> Self {
        let mut exp = [0u8; 512];
        let mut log = [0u8; 256];
        let mut x: u16 = 1;
        for (i, slot) in exp.iter_mut().take(255).enumerate() {
            *slot = x as u8;
            log[x as usize] = i as u8;
            x = gf256_mul_slow(x as u8, GF256_GENERATOR) as u16;
        }
        for i in 255..512 {
            exp[i] = exp[i - 255];
        }
        Gf256Tables { exp, log }
    }
}

/// Shift-and-add multiplication, used only to seed the tables.
fn gf256_mul_slow(a: u8, b: u8) -> u8 {
    let (mut a, mut b, mut acc) = (a as u16, b, 0u16);
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        a <<= 1;
        if a & 0x100 != 0 {
            a ^= GF256_POLY;
        }
        b >>= 1;
    }
    acc as u8
}

enum Repr {
    Prime(u32),
    Binary8(Box<Gf256Tables>),
}

/// Arithmetic context for one finite field. Cheap to clone.
#[derive(Clone)]
pub struct Field {
    spec: FieldSpec,
    repr: Arc<Repr>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.spec)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        let repr = match spec {
            FieldSpec::Prime(p) => {
                if !is_prime(p as u32) {
                    return param(format!("modulus {p} is not prime"));
                }
                Repr::Prime(p as u32)
            }
            FieldSpec::Binary8 => Repr::Binary8(Box::new(Gf256Tables::build())),
        };
        Ok(Field { spec, repr: Arc::new(repr) })
    }

    pub fn prime(p: u16) -> Result<Self> {
        Field::new(FieldSpec::Prime(p))
    }

    pub fn gf256() -> Self {
        Field::new(FieldSpec::Binary8).expect("GF(2^8) is always constructible")
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn order(&self) -> u32 {
        self.spec.order()
    }

    pub fn is_binary(&self) -> bool {
        matches!(self.spec, FieldSpec::Binary8)
    }

    /// Checked conversion of an integer into an element.
    pub fn elem(&self, value: u32) -> Result<FieldElement> {
        if value >= self.order() {
            return param(format!("{value} is not an element of {}", self.spec));
        }
        Ok(FieldElement(value as u16))
    }

    /// Reduces an arbitrary integer into the field (prime fields), or takes the
    /// low byte (GF(2^8)).
    pub fn reduce(&self, value: u64) -> FieldElement {
        match &*self.repr {
            Repr::Prime(p) => FieldElement((value % *p as u64) as u16),
            Repr::Binary8(_) => FieldElement((value & 0xFF) as u16),
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        (a.0 as u32) < self.order()
    }

    /// All elements in increasing order of their integer value.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order()).map(|v| FieldElement(v as u16))
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &*self.repr {
            Repr::Prime(p) => FieldElement(((a.0 as u32 + b.0 as u32) % p) as u16),
            Repr::Binary8(_) => FieldElement(a.0 ^ b.0),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        match &*self.repr {
            Repr::Prime(p) => FieldElement(((p - a.0 as u32) % p) as u16),
            Repr::Binary8(_) => a,
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &*self.repr {
            Repr::Prime(p) => FieldElement(((a.0 as u32 + p - b.0 as u32) % p) as u16),
            Repr::Binary8(_) => FieldElement(a.0 ^ b.0),
        }
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &*self.repr {
            Repr::Prime(p) => FieldElement(((a.0 as u32 * b.0 as u32) % p) as u16),
            Repr::Binary8(t) => {
                if a.0 == 0 || b.0 == 0 {
                    FieldElement::ZERO
                } else {
                    let l = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
                    FieldElement(t.exp[l] as u16)
                }
            }
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(match &*self.repr {
            Repr::Prime(p) => self.pow(a, (*p - 2) as u64),
            Repr::Binary8(t) => FieldElement(t.exp[255 - t.log[a.0 as usize] as usize] as u16),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `dst[i] -= factor * src[i]` for every i.
    pub fn sub_scaled(&self, dst: &mut [FieldElement], src: &[FieldElement], factor: FieldElement) {
        debug_assert_eq!(dst.len(), src.len());
        if factor.is_zero() {
            return;
        }
        match &*self.repr {
            Repr::Prime(p) => {
                let p = *p;
                let f = p - factor.0 as u32;
                for (d, s) in dst.iter_mut().zip(src) {
                    if s.0 != 0 {
                        d.0 = ((d.0 as u32 + f * s.0 as u32) % p) as u16;
                    }
                }
            }
            Repr::Binary8(t) => {
                let lf = t.log[factor.0 as usize] as usize;
                for (d, s) in dst.iter_mut().zip(src) {
                    if s.0 != 0 {
                        d.0 ^= t.exp[lf + t.log[s.0 as usize] as usize] as u16;
                    }
                }
            }
        }
    }

    /// `v[i] *= factor` for every i.
    pub fn scale(&self, v: &mut [FieldElement], factor: FieldElement) {
        for x in v.iter_mut() {
            *x = self.mul(*x, factor);
        }
    }

    /// Inner product of two equal-length vectors.
    pub fn dot(&self, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
        debug_assert_eq!(a.len(), b.len());
        match &*self.repr {
            Repr::Prime(p) => {
                let p = *p as u64;
                let acc = a.iter().zip(b).fold(0u64, |acc, (x, y)| (acc + x.0 as u64 * y.0 as u64) % p);
                FieldElement(acc as u16)
            }
            Repr::Binary8(_) => {
                a.iter().zip(b).fold(FieldElement::ZERO, |acc, (x, y)| FieldElement(acc.0 ^ self.mul(*x, *y).0))
            }
        }
    }

    /// Wire width of one element: 1 byte for GF(2^8), 2 bytes otherwise.
    pub fn symbol_width(&self) -> usize {
        match self.spec {
            FieldSpec::Binary8 => 1,
            FieldSpec::Prime(_) => 2,
        }
    }

    /// Byte-per-symbol embedding; only defined for GF(2^8).
    pub fn bytes_to_symbols(&self, data: &[u8]) -> Result<Vec<FieldElement>> {
        if !self.is_binary() {
            return Err(Error::Unsupported(format!("byte payloads require GF(2^8), not {}", self.spec)));
        }
        Ok(data.iter().map(|&b| FieldElement(b as u16)).collect())
    }

    pub fn symbols_to_bytes(&self, symbols: &[FieldElement]) -> Result<Vec<u8>> {
        if !self.is_binary() {
            return Err(Error::Unsupported(format!("byte payloads require GF(2^8), not {}", self.spec)));
        }
        Ok(symbols.iter().map(|s| s.0 as u8).collect())
    }
}
