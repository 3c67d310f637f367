//! Residue arithmetic in the chain rings `Z/p^n`.
//!
//! Values are kept canonical in `[0, p^n)` and every operation reduces again,
//! so equality is structural. Moduli are capped at `2^31`, which lets all
//! products be formed in `u64` without overflow.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

const MAX_MODULUS: u64 = 1 << 31;

/// Trial-division primality test. Inputs are small group primes.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The modulus `p^n` with `p` prime and `n >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    p: u64,
    n: u32,
    value: u64,
}

impl Modulus {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::ZeroExponent);
        }
        let value = p
            .checked_pow(n)
            .filter(|&v| v <= MAX_MODULUS)
            .ok_or(Error::ModulusTooLarge { p, n })?;
        Ok(Modulus { p, n, value })
    }

    #[inline]
    pub fn prime(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn exponent(&self) -> u32 {
        self.n
    }

    /// `p^n` as an integer.
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    /// The same prime with a different exponent.
    pub fn with_exponent(&self, n: u32) -> Result<Modulus> {
        Modulus::new(self.p, n)
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.value
    }

    /// Canonical representative of an arbitrary signed integer.
    #[inline]
    pub fn reduce_signed(&self, x: i64) -> u64 {
        x.rem_euclid(self.value as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.value
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.value - b) % self.value
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.value
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.value - a) % self.value
    }

    /// `p^k` for `k <= n` (so the result is below the modulus cap).
    pub fn prime_power(&self, k: u32) -> u64 {
        debug_assert!(k <= self.n);
        self.p.pow(k)
    }

    /// p-adic valuation of a canonical value; `None` for zero.
    pub fn valuation(&self, a: u64) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let mut v = 0;
        let mut x = a;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        Some(v)
    }

    /// Inverse of a unit. Computed by extended Euclid on `(a, p^n)`; only
    /// called once `p ∤ a` has been checked.
    pub fn inverse(&self, a: u64) -> Result<u64> {
        let a = self.reduce(a);
        if a % self.p == 0 {
            return Err(Error::NotAUnit {
                value: a,
                modulus: self.value,
            });
        }
        let (mut r0, mut r1) = (self.value as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce_signed(t0))
    }

    pub fn residue(&self, x: u64) -> Residue {
        Residue {
            value: self.reduce(x),
            modulus: *self,
        }
    }

    pub fn residue_signed(&self, x: i64) -> Residue {
        Residue {
            value: self.reduce_signed(x),
            modulus: *self,
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.n)
    }
}

/// An element of `Z/p^n`, stored canonically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: Modulus,
}

impl Residue {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Largest `v` with `p^v | value`, or `None` when the residue is zero.
    pub fn valuation(&self) -> Option<u32> {
        self.modulus.valuation(self.value)
    }

    /// Valuation with zero reported as `n`, the exponent of the modulus.
    pub fn valuation_or_exponent(&self) -> u32 {
        self.valuation().unwrap_or(self.modulus.n)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    pub fn unit_inverse(&self) -> Result<Residue> {
        Ok(Residue {
            value: self.modulus.inverse(self.value)?,
            modulus: self.modulus,
        })
    }

    fn check_same(&self, other: &Residue) {
        assert_eq!(
            self.modulus, other.modulus,
            "residues from different rings combined"
        );
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus.value)
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        self.check_same(&rhs);
        Residue {
            value: self.modulus.add(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self.check_same(&rhs);
        Residue {
            value: self.modulus.sub(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        self.check_same(&rhs);
        Residue {
            value: self.modulus.mul(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue {
            value: self.modulus.neg(self.value),
            modulus: self.modulus,
        }
    }
}
