//! Runtime-selected exact commutative rings.
//!
//! A [`Ring`] is a descriptor (`Z`, `Q`, `Z/k`, `F_p[d]`, or a polynomial
//! ring over one of these); a [`RingElem`] is a payload in canonical form.
//! Arithmetic always goes through the descriptor, so elements stay small and
//! equality of elements is plain structural equality.

pub(crate) mod modular;
mod parse;
mod poly;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use modular::{add_mod, inv_mod, is_nilpotent_mod, is_prime, mul_mod, neg_mod, sub_mod};
pub use poly::{Monomial, Poly, PolyRing};

/// Descriptor of a commutative ring chosen at runtime.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ring(Repr);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Integers,
    Rationals,
    Modular(u64),
    Dual(u64),
    Polynomial(Arc<PolyRing>),
}

/// Borrowed view of a ring descriptor.
#[derive(Clone, Copy, Debug)]
pub enum RingKind<'a> {
    Integers,
    Rationals,
    Modular(u64),
    /// `F_p[d]` with `d^2 = 0`.
    Dual(u64),
    Polynomial(&'a PolyRing),
}

/// An element in canonical form. Only meaningful together with the [`Ring`]
/// it was produced by.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElem(pub(crate) Payload);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Payload {
    Int(BigInt),
    Rat(BigRational),
    Mod(u64),
    Dual(u64, u64),
    Poly(Poly),
}

impl Ring {
    pub fn integers() -> Ring {
        Ring(Repr::Integers)
    }

    pub fn rationals() -> Ring {
        Ring(Repr::Rationals)
    }

    /// `Z/k`, requires `k >= 2`.
    pub fn modular(k: u64) -> Result<Ring> {
        if k < 2 {
            return Err(Error::InvalidRing(format!("modulus must be at least 2, got {k}")));
        }
        Ok(Ring(Repr::Modular(k)))
    }

    /// Prime field `F_p`, i.e. `Z/p` with a primality check.
    pub fn prime_field(p: u64) -> Result<Ring> {
        if !is_prime(p) {
            return Err(Error::InvalidRing(format!("{p} is not prime")));
        }
        Ok(Ring(Repr::Modular(p)))
    }

    /// Dual numbers `F_p[d]`, `d^2 = 0`.
    pub fn dual(p: u64) -> Result<Ring> {
        if !is_prime(p) {
            return Err(Error::InvalidRing(format!("dual numbers need a prime base, got {p}")));
        }
        Ok(Ring(Repr::Dual(p)))
    }

    pub fn polynomial<S: Into<String>>(base: Ring, vars: impl IntoIterator<Item = S>) -> Result<Ring> {
        let ring = PolyRing::new(base, vars.into_iter().map(Into::into).collect())?;
        Ok(Ring(Repr::Polynomial(Arc::new(ring))))
    }

    pub fn kind(&self) -> RingKind<'_> {
        match &self.0 {
            Repr::Integers => RingKind::Integers,
            Repr::Rationals => RingKind::Rationals,
            Repr::Modular(k) => RingKind::Modular(*k),
            Repr::Dual(p) => RingKind::Dual(*p),
            Repr::Polynomial(r) => RingKind::Polynomial(r),
        }
    }

    pub fn poly_ring(&self) -> Option<&PolyRing> {
        match &self.0 {
            Repr::Polynomial(r) => Some(r),
            _ => None,
        }
    }

    /// `Q` and `Z/p` with `p` prime.
    pub fn is_field(&self) -> bool {
        match self.0 {
            Repr::Rationals => true,
            Repr::Modular(k) => is_prime(k),
            _ => false,
        }
    }

    pub fn is_domain(&self) -> bool {
        match &self.0 {
            Repr::Integers | Repr::Rationals => true,
            Repr::Modular(k) => is_prime(*k),
            Repr::Dual(_) => false,
            Repr::Polynomial(r) => r.base().is_domain(),
        }
    }

    pub fn zero(&self) -> RingElem {
        RingElem(match &self.0 {
            Repr::Integers => Payload::Int(BigInt::zero()),
            Repr::Rationals => Payload::Rat(BigRational::zero()),
            Repr::Modular(_) => Payload::Mod(0),
            Repr::Dual(_) => Payload::Dual(0, 0),
            Repr::Polynomial(_) => Payload::Poly(Poly::zero()),
        })
    }

    pub fn one(&self) -> RingElem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> RingElem {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> RingElem {
        RingElem(match &self.0 {
            Repr::Integers => Payload::Int(v.clone()),
            Repr::Rationals => Payload::Rat(BigRational::from_integer(v.clone())),
            Repr::Modular(k) => Payload::Mod(reduce_big(v, *k)),
            Repr::Dual(p) => Payload::Dual(reduce_big(v, *p), 0),
            Repr::Polynomial(r) => Payload::Poly(Poly::constant(r.base(), r.base().from_bigint(v))),
        })
    }

    /// Image of a rational number; fails when the denominator is not a unit.
    pub fn from_rational(&self, v: &BigRational) -> Result<RingElem> {
        if let Repr::Rationals = self.0 {
            return Ok(RingElem(Payload::Rat(v.clone())));
        }
        let num = self.from_bigint(v.numer());
        let den = self.from_bigint(v.denom());
        Ok(self.mul(&num, &self.inverse(&den)?))
    }

    pub fn is_zero(&self, a: &RingElem) -> bool {
        match &a.0 {
            Payload::Int(x) => x.is_zero(),
            Payload::Rat(x) => x.is_zero(),
            Payload::Mod(x) => *x == 0,
            Payload::Dual(x, y) => *x == 0 && *y == 0,
            Payload::Poly(p) => p.is_zero(),
        }
    }

    pub fn is_one(&self, a: &RingElem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        RingElem(match (&self.0, &a.0, &b.0) {
            (_, Payload::Int(x), Payload::Int(y)) => Payload::Int(x + y),
            (_, Payload::Rat(x), Payload::Rat(y)) => Payload::Rat(x + y),
            (Repr::Modular(k), Payload::Mod(x), Payload::Mod(y)) => Payload::Mod(add_mod(*x, *y, *k)),
            (Repr::Dual(p), Payload::Dual(a0, a1), Payload::Dual(b0, b1)) => {
                Payload::Dual(add_mod(*a0, *b0, *p), add_mod(*a1, *b1, *p))
            }
            (Repr::Polynomial(r), Payload::Poly(x), Payload::Poly(y)) => Payload::Poly(r.add(x, y)),
            _ => mismatch(self, a, b),
        })
    }

    pub fn neg(&self, a: &RingElem) -> RingElem {
        RingElem(match (&self.0, &a.0) {
            (_, Payload::Int(x)) => Payload::Int(-x),
            (_, Payload::Rat(x)) => Payload::Rat(-x),
            (Repr::Modular(k), Payload::Mod(x)) => Payload::Mod(neg_mod(*x, *k)),
            (Repr::Dual(p), Payload::Dual(x, y)) => Payload::Dual(neg_mod(*x, *p), neg_mod(*y, *p)),
            (Repr::Polynomial(r), Payload::Poly(x)) => Payload::Poly(r.neg(x)),
            _ => mismatch(self, a, a),
        })
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> RingElem {
        match (&self.0, &a.0, &b.0) {
            (Repr::Modular(k), Payload::Mod(x), Payload::Mod(y)) => RingElem(Payload::Mod(sub_mod(*x, *y, *k))),
            _ => self.add(a, &self.neg(b)),
        }
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        RingElem(match (&self.0, &a.0, &b.0) {
            (_, Payload::Int(x), Payload::Int(y)) => Payload::Int(x * y),
            (_, Payload::Rat(x), Payload::Rat(y)) => Payload::Rat(x * y),
            (Repr::Modular(k), Payload::Mod(x), Payload::Mod(y)) => Payload::Mod(mul_mod(*x, *y, *k)),
            (Repr::Dual(p), Payload::Dual(a0, a1), Payload::Dual(b0, b1)) => Payload::Dual(
                mul_mod(*a0, *b0, *p),
                add_mod(mul_mod(*a0, *b1, *p), mul_mod(*a1, *b0, *p), *p),
            ),
            (Repr::Polynomial(r), Payload::Poly(x), Payload::Poly(y)) => Payload::Poly(r.mul(x, y)),
            _ => mismatch(self, a, b),
        })
    }

    pub fn pow(&self, a: &RingElem, mut exp: u64) -> RingElem {
        let mut acc = self.one();
        let mut base = a.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a RingElem>) -> RingElem {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    pub fn is_nilpotent(&self, a: &RingElem) -> bool {
        match (&self.0, &a.0) {
            (Repr::Modular(k), Payload::Mod(x)) => is_nilpotent_mod(*x, *k),
            (Repr::Dual(_), Payload::Dual(x, _)) => *x == 0,
            (Repr::Polynomial(r), Payload::Poly(x)) => x.coeffs().all(|c| r.base().is_nilpotent(c)),
            _ => self.is_zero(a),
        }
    }

    /// Exact unit test: gcd with the modulus in `Z/k`, nonzero constant term
    /// in `F_p[d]`, unit constant term plus nilpotent remainder for polynomials.
    pub fn is_unit(&self, a: &RingElem) -> bool {
        match (&self.0, &a.0) {
            (_, Payload::Int(x)) => x.abs().is_one(),
            (_, Payload::Rat(x)) => !x.is_zero(),
            (Repr::Modular(k), Payload::Mod(x)) => modular::gcd(*x, *k) == 1,
            (Repr::Dual(_), Payload::Dual(x, _)) => *x != 0,
            (Repr::Polynomial(r), Payload::Poly(x)) => r.is_unit(x),
            _ => mismatch(self, a, a),
        }
    }

    pub fn inverse(&self, a: &RingElem) -> Result<RingElem> {
        let inv = match (&self.0, &a.0) {
            (_, Payload::Int(x)) if x.abs().is_one() => Some(Payload::Int(x.clone())),
            (_, Payload::Rat(x)) if !x.is_zero() => Some(Payload::Rat(x.recip())),
            (Repr::Modular(k), Payload::Mod(x)) => inv_mod(*x, *k).map(Payload::Mod),
            (Repr::Dual(p), Payload::Dual(x, y)) => inv_mod(*x, *p).map(|i| {
                // (x + y d)^{-1} = x^{-1} - y x^{-2} d
                let i2 = mul_mod(i, i, *p);
                Payload::Dual(i, neg_mod(mul_mod(*y, i2, *p), *p))
            }),
            (Repr::Polynomial(r), Payload::Poly(x)) => r.inverse(x).map(Payload::Poly),
            _ => None,
        };
        inv.map(RingElem).ok_or_else(|| Error::NotInvertible {
            ring: self.to_string(),
            elem: self.format_elem(a),
        })
    }

    /// Exact quotient `a / b` for a unit `b`.
    pub fn div(&self, a: &RingElem, b: &RingElem) -> Result<RingElem> {
        Ok(self.mul(a, &self.inverse(b)?))
    }

    /// Constant polynomial / embedding of the base ring of a polynomial ring.
    pub fn embed_base(&self, c: &RingElem) -> RingElem {
        match &self.0 {
            Repr::Polynomial(r) => RingElem(Payload::Poly(Poly::constant(r.base(), c.clone()))),
            _ => c.clone(),
        }
    }

    /// The polynomial variable with the given name.
    pub fn var(&self, name: &str) -> Result<RingElem> {
        let r = self
            .poly_ring()
            .ok_or_else(|| Error::InvalidParameters(format!("{self} has no variables")))?;
        let idx = r
            .var_index(name)
            .ok_or_else(|| Error::InvalidParameters(format!("{self} has no variable `{name}`")))?;
        Ok(RingElem(Payload::Poly(Poly::var(r.base(), idx))))
    }

    /// The nilpotent generator `d` of `F_p[d]`.
    pub fn dual_unit(&self) -> Option<RingElem> {
        match self.0 {
            Repr::Dual(_) => Some(RingElem(Payload::Dual(0, 1))),
            _ => None,
        }
    }

    /// Components `(a, b)` of `a + b d` in `F_p[d]`.
    pub fn dual_parts(&self, a: &RingElem) -> Option<(u64, u64)> {
        match a.0 {
            Payload::Dual(x, y) => Some((x, y)),
            _ => None,
        }
    }

    pub fn residue(&self, a: &RingElem) -> Option<u64> {
        match a.0 {
            Payload::Mod(x) => Some(x),
            _ => None,
        }
    }

    /// Integer or rational payload as a rational number.
    pub fn to_rational(&self, a: &RingElem) -> Option<BigRational> {
        match &a.0 {
            Payload::Int(x) => Some(BigRational::from_integer(x.clone())),
            Payload::Rat(x) => Some(x.clone()),
            _ => None,
        }
    }

    /// Small integer value of an element of `Z`, `Q` or `Z/k`, if it has one.
    pub fn to_i64(&self, a: &RingElem) -> Option<i64> {
        match &a.0 {
            Payload::Int(x) => x.to_i64(),
            Payload::Rat(x) if x.is_integer() => x.numer().to_i64(),
            Payload::Mod(x) => i64::try_from(*x).ok(),
            _ => None,
        }
    }

    pub fn parse_elem(&self, s: &str) -> Result<RingElem> {
        parse::parse_elem(self, s)
    }

    pub fn format_elem(&self, a: &RingElem) -> String {
        match (&self.0, &a.0) {
            (_, Payload::Int(x)) => x.to_string(),
            (_, Payload::Rat(x)) => x.to_string(),
            (_, Payload::Mod(x)) => x.to_string(),
            (_, Payload::Dual(x, y)) => format!("{x}+{y}*d"),
            (Repr::Polynomial(r), Payload::Poly(p)) => r.format(p),
            _ => mismatch(self, a, a),
        }
    }

    /// Identifiers an expression over this ring may use.
    pub(crate) fn resolve_ident(&self, name: &str) -> Option<RingElem> {
        match &self.0 {
            Repr::Dual(_) if name == "d" => self.dual_unit(),
            Repr::Polynomial(r) => match r.var_index(name) {
                Some(i) => Some(RingElem(Payload::Poly(Poly::var(r.base(), i)))),
                None => r.base().resolve_ident(name).map(|c| self.embed_base(&c)),
            },
            _ => None,
        }
    }

    pub(crate) fn identifiers(&self) -> Vec<String> {
        match &self.0 {
            Repr::Dual(_) => vec!["d".to_string()],
            Repr::Polynomial(r) => {
                let mut v = r.vars().to_vec();
                v.extend(r.base().identifiers());
                v
            }
            _ => Vec::new(),
        }
    }
}

fn reduce_big(v: &BigInt, k: u64) -> u64 {
    v.mod_floor(&BigInt::from(k)).to_u64().expect("residue fits in u64")
}

#[cold]
fn mismatch(ring: &Ring, a: &RingElem, b: &RingElem) -> ! {
    panic!("elements {a:?} and {b:?} do not belong to {ring}")
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Integers => write!(f, "Z"),
            Repr::Rationals => write!(f, "Q"),
            Repr::Modular(k) => write!(f, "Z/{k}"),
            Repr::Dual(p) => write!(f, "F{p}[d]"),
            Repr::Polynomial(r) => write!(f, "poly({}; {})", r.base(), r.vars().join(", ")),
        }
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({self})")
    }
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Ring> {
        parse::parse_ring(s)
    }
}

impl serde::Serialize for Ring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Ring {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Ring, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> RingElem {
        Ring::rationals().parse_elem(s).unwrap()
    }

    #[test]
    fn units_mod_six() {
        let r = Ring::modular(6).unwrap();
        assert!(r.is_unit(&r.from_i64(5)));
        assert!(!r.is_unit(&r.from_i64(3)));
        assert!(matches!(r.inverse(&r.from_i64(3)), Err(Error::NotInvertible { .. })));
        assert_eq!(r.inverse(&r.from_i64(5)).unwrap(), r.from_i64(5));
    }

    #[test]
    fn dual_product_collapses() {
        let r = Ring::dual(5).unwrap();
        let a = r.parse_elem("1+2*d").unwrap();
        let b = r.parse_elem("1+3*d").unwrap();
        let c = r.mul(&a, &b);
        assert_eq!(r.format_elem(&c), "1+0*d");
        assert!(r.is_one(&c));
        let d = r.dual_unit().unwrap();
        assert!(r.is_zero(&r.mul(&d, &d)));
        assert!(!r.is_unit(&d));
        let inv = r.inverse(&a).unwrap();
        assert!(r.is_one(&r.mul(&a, &inv)));
    }

    #[test]
    fn rational_inverse() {
        let r = Ring::rationals();
        assert_eq!(r.inverse(&q("2/3")).unwrap(), q("3/2"));
        assert!(r.inverse(&q("0")).is_err());
    }

    #[test]
    fn integer_units() {
        let z = Ring::integers();
        assert!(z.is_unit(&z.from_i64(-1)));
        assert!(!z.is_unit(&z.from_i64(2)));
        assert!(z.inverse(&z.from_i64(2)).is_err());
    }

    #[test]
    fn field_and_domain_flags() {
        assert!(Ring::rationals().is_field());
        assert!(Ring::modular(7).unwrap().is_field());
        assert!(!Ring::modular(6).unwrap().is_field());
        assert!(!Ring::integers().is_field());
        assert!(Ring::integers().is_domain());
        assert!(!Ring::dual(3).unwrap().is_domain());
    }

    #[test]
    fn invalid_descriptors() {
        assert!(Ring::modular(1).is_err());
        assert!(Ring::dual(6).is_err());
        assert!(Ring::polynomial(Ring::rationals(), ["x", "x"]).is_err());
        assert!(Ring::prime_field(9).is_err());
    }

    #[test]
    fn pow_and_from_rational() {
        let f7 = Ring::modular(7).unwrap();
        assert_eq!(f7.pow(&f7.from_i64(3), 6), f7.one());
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(f7.from_rational(&half).unwrap(), f7.from_i64(4));
        assert!(Ring::integers().from_rational(&half).is_err());
    }
}
