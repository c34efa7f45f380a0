//! Path-weight arithmetic shared by the summary engine.
//!
//! The engine is generic over [`Gain`] so that the same code runs on plain
//! integers and on ε-scaled weights `a·D + b`, where `D` can have millions of
//! bits for systems derived from recursive game graphs.

use alloc::sync::Arc;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// A totally ordered additive group of path weights.
pub trait Gain: Clone + Ord + fmt::Debug {
    fn add(&self, other: &Self) -> Self;
    /// Sign relative to zero.
    fn sign(&self) -> Ordering;
}

impl Gain for BigInt {
    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn sign(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

/// Extended weights `−∞ < z < ω`.
///
/// Declaration order matters: the derived ordering is the extended order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtWeight<W = BigInt> {
    NegInfinity,
    Finite(W),
    Omega,
}

impl<W: Gain> ExtWeight<W> {
    /// `z + ω = ω`, and `−∞` absorbs everything including `ω`.
    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (ExtWeight::NegInfinity, _) | (_, ExtWeight::NegInfinity) => ExtWeight::NegInfinity,
            (ExtWeight::Omega, _) | (_, ExtWeight::Omega) => ExtWeight::Omega,
            (ExtWeight::Finite(a), ExtWeight::Finite(b)) => ExtWeight::Finite(a.add(b)),
        }
    }
}

impl<W> ExtWeight<W> {
    pub fn is_neg_infinity(&self) -> bool {
        matches!(self, ExtWeight::NegInfinity)
    }

    pub fn is_omega(&self) -> bool {
        matches!(self, ExtWeight::Omega)
    }

    pub fn finite(&self) -> Option<&W> {
        match self {
            ExtWeight::Finite(w) => Some(w),
            _ => None,
        }
    }

    pub fn map<V>(&self, f: impl FnOnce(&W) -> V) -> ExtWeight<V> {
        match self {
            ExtWeight::NegInfinity => ExtWeight::NegInfinity,
            ExtWeight::Finite(w) => ExtWeight::Finite(f(w)),
            ExtWeight::Omega => ExtWeight::Omega,
        }
    }
}

impl<W: fmt::Display> fmt::Display for ExtWeight<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtWeight::NegInfinity => f.write_str("-inf"),
            ExtWeight::Finite(w) => w.fmt(f),
            ExtWeight::Omega => f.write_str("omega"),
        }
    }
}

/// The scale factor `D = 2·ℓ·ℓ^{(ℓ+1)²}` for `ℓ = |Γ|·|Q|`.
pub fn scale_factor(ell: u64) -> BigInt {
    let ell = ell.max(1);
    let exp = (ell + 1) * (ell + 1);
    let base = BigInt::from(ell);
    let exp = u32::try_from(exp).expect("scale exponent exceeds u32");
    BigInt::from(2u8) * &base * num_traits::pow::Pow::pow(&base, exp)
}

/// Shared description of one scale factor `D`.
#[derive(Debug)]
pub struct Scale {
    ell: u64,
    /// `D ≥ 2^safe_bits`.
    safe_bits: u64,
}

impl Scale {
    pub fn new(ell: u64) -> Arc<Scale> {
        let ell = ell.max(1);
        let k = 63 - u64::from(ell.leading_zeros());
        let safe_bits = 1 + k + (ell + 1) * (ell + 1) * k;
        Arc::new(Scale { ell, safe_bits })
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn factor(&self) -> BigInt {
        scale_factor(self.ell)
    }

    fn below_factor(&self, x: &BigInt) -> bool {
        x.bits() <= self.safe_bits
    }
}

/// The exact integer `hi·D + lo`.
#[derive(Clone)]
pub struct Scaled {
    hi: BigInt,
    lo: BigInt,
    scale: Arc<Scale>,
}

impl Scaled {
    pub fn new(hi: BigInt, lo: BigInt, scale: &Arc<Scale>) -> Scaled {
        Scaled { hi, lo, scale: Arc::clone(scale) }
    }

    /// The scaled image `w·D + 1` of an edge weight.
    pub fn edge(w: &BigInt, scale: &Arc<Scale>) -> Scaled {
        Scaled::new(w.clone(), BigInt::from(1u8), scale)
    }

    pub fn to_bigint(&self) -> BigInt {
        &self.hi * self.scale.factor() + &self.lo
    }

    fn sign_of(hi: &BigInt, lo: &BigInt, scale: &Scale) -> Ordering {
        if hi.is_zero() {
            return lo.sign_ord();
        }
        if scale.below_factor(lo) {
            return hi.sign_ord();
        }
        (hi * scale.factor() + lo).sign_ord()
    }
}

trait SignOrd {
    fn sign_ord(&self) -> Ordering;
}

impl SignOrd for BigInt {
    fn sign_ord(&self) -> Ordering {
        Gain::sign(self)
    }
}

impl fmt::Debug for Scaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·D{:+}", self.hi, self.lo)
    }
}

impl PartialEq for Scaled {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scaled {}

impl PartialOrd for Scaled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scaled {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.hi == other.hi {
            return self.lo.cmp(&other.lo);
        }
        let dh = &self.hi - &other.hi;
        let dl = &self.lo - &other.lo;
        Scaled::sign_of(&dh, &dl, &self.scale)
    }
}

impl Gain for Scaled {
    fn add(&self, other: &Self) -> Self {
        Scaled {
            hi: &self.hi + &other.hi,
            lo: &self.lo + &other.lo,
            scale: Arc::clone(&self.scale),
        }
    }

    fn sign(&self) -> Ordering {
        Scaled::sign_of(&self.hi, &self.lo, &self.scale)
    }
}
