//! Exact arithmetic in the ring Z[1/2, i].
//!
//! Every element is stored as `(re + im·i) / (1+i)^k` with the numerator a
//! Gaussian integer. The representation is canonical: either `k = 0` or the
//! numerator is not divisible by `(1+i)`, which for Gaussian integers is the
//! same as `re + im` being odd. Since `(1+i)^2 = 2i`, every power of two in a
//! denominator is absorbed, so structural equality is value equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

/// An element of Z[1/2, i] in canonical (1+i)-adic form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DyadicGaussian {
    re: BigInt,
    im: BigInt,
    k: u32,
}

/// Multiplies `re + im·i` by `i^t`.
fn rotate(re: BigInt, im: BigInt, t: u32) -> (BigInt, BigInt) {
    match t % 4 {
        0 => (re, im),
        1 => (-im, re),
        2 => (-re, -im),
        _ => (im, -re),
    }
}

/// Multiplies `re + im·i` by `(1+i)^d`.
fn scale_up(re: BigInt, im: BigInt, d: u32) -> (BigInt, BigInt) {
    let half = d / 2;
    // (1+i)^2 = 2i
    let (mut re, mut im) = rotate(re << half as usize, im << half as usize, half);
    if d % 2 == 1 {
        let r = &re - &im;
        im += re;
        re = r;
    }
    (re, im)
}

fn trailing_zeros(x: &BigInt) -> u64 {
    x.trailing_zeros().unwrap_or(u64::MAX)
}

impl DyadicGaussian {
    /// Builds `(re + im·i) / (1+i)^k`, reducing to canonical form.
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>, k: u32) -> Self {
        let mut v = DyadicGaussian {
            re: re.into(),
            im: im.into(),
            k,
        };
        v.canonicalize();
        v
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        DyadicGaussian {
            re: BigInt::zero(),
            im: BigInt::one(),
            k: 0,
        }
    }

    pub fn from_int(n: i64) -> Self {
        DyadicGaussian {
            re: BigInt::from(n),
            im: BigInt::zero(),
            k: 0,
        }
    }

    /// `i^t` for any integer exponent.
    pub fn i_pow(t: i64) -> Self {
        let (re, im) = rotate(BigInt::one(), BigInt::zero(), t.rem_euclid(4) as u32);
        DyadicGaussian { re, im, k: 0 }
    }

    /// `1/(1+i)^k`.
    pub fn inv_sqrt2i_pow(k: u32) -> Self {
        Self::new(1, 0, k)
    }

    pub fn re_num(&self) -> &BigInt {
        &self.re
    }

    pub fn im_num(&self) -> &BigInt {
        &self.im
    }

    /// Exponent of the `(1+i)` denominator.
    pub fn denom_exp(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.k == 0 && self.re.is_one() && self.im.is_zero()
    }

    /// Returns `t` when the value is `i^t`.
    pub fn as_power_of_i(&self) -> Option<u8> {
        if self.k != 0 {
            return None;
        }
        let re = self.re.to_i8()?;
        let im = self.im.to_i8()?;
        match (re, im) {
            (1, 0) => Some(0),
            (0, 1) => Some(1),
            (-1, 0) => Some(2),
            (0, -1) => Some(3),
            _ => None,
        }
    }

    /// Re-establishes the canonical representation. Idempotent.
    pub fn canonicalize(&mut self) {
        if self.is_zero() {
            self.k = 0;
            return;
        }
        while self.k > 0 {
            let parity_even = (&self.re + &self.im).is_even();
            if !parity_even {
                break;
            }
            if self.k >= 2 {
                let tz = trailing_zeros(&self.re).min(trailing_zeros(&self.im));
                let t = tz.min((self.k / 2) as u64) as u32;
                if t > 0 {
                    // x / (1+i)^(2t) = x · (-i)^t / 2^t
                    let re = std::mem::take(&mut self.re) >> t as usize;
                    let im = std::mem::take(&mut self.im) >> t as usize;
                    let (re, im) = rotate(re, im, (4 - t % 4) % 4);
                    self.re = re;
                    self.im = im;
                    self.k -= 2 * t;
                    continue;
                }
            }
            // x / (1+i) = ((re+im) + (im-re)i) / 2
            let s = (&self.re + &self.im) >> 1usize;
            let d = (&self.im - &self.re) >> 1usize;
            self.re = s;
            self.im = d;
            self.k -= 1;
        }
    }

    pub fn conj(&self) -> Self {
        // conj((a+bi)/(1+i)^k) = (a-bi) i^k / (1+i)^k
        let (re, im) = rotate(self.re.clone(), -self.im.clone(), self.k % 4);
        DyadicGaussian { re, im, k: self.k }
    }

    /// `|x|^2 = x · conj(x)`; always real and non-negative.
    pub fn norm_sqr(&self) -> Self {
        self * &self.conj()
    }

    /// Multiplies by `i^t`.
    pub fn mul_i_pow(&self, t: u8) -> Self {
        let (re, im) = rotate(self.re.clone(), self.im.clone(), t as u32);
        DyadicGaussian { re, im, k: self.k }
    }

    /// Numerator rescaled to denominator exponent `k >= self.k`.
    pub(crate) fn numerator_at(&self, k: u32) -> (BigInt, BigInt) {
        debug_assert!(k >= self.k);
        scale_up(self.re.clone(), self.im.clone(), k - self.k)
    }

    /// Returns `(p, q, e)` with the value equal to `(p + q·i) / 2^e`.
    pub fn to_binary_fraction(&self) -> (BigInt, BigInt, u32) {
        let k = self.k + self.k % 2;
        let (re, im) = self.numerator_at(k);
        let e = k / 2;
        // (1+i)^(2e) = (2i)^e
        let (p, q) = rotate(re, im, (4 - e % 4) % 4);
        (p, q, e)
    }

    /// Sums many terms over a common denominator, canonicalizing once.
    pub fn sum<'a, I>(terms: I) -> Self
    where
        I: IntoIterator<Item = &'a DyadicGaussian>,
    {
        let terms: Vec<&DyadicGaussian> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        let k = terms.iter().map(|t| t.k).max().unwrap_or(0);
        let mut re = BigInt::zero();
        let mut im = BigInt::zero();
        for t in terms {
            let (a, b) = t.numerator_at(k);
            re += a;
            im += b;
        }
        Self::new(re, im, k)
    }

    /// Renders as `a+bi` or `(a+bi)/(1+i)^k`.
    pub fn render(&self) -> String {
        let sign = if self.im.is_negative() { '-' } else { '+' };
        let num = format!("{}{}{}i", self.re, sign, self.im.abs());
        if self.k == 0 {
            num
        } else {
            format!("({})/(1+i)^{}", num, self.k)
        }
    }
}

impl fmt::Display for DyadicGaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for DyadicGaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<'a> Add<&'a DyadicGaussian> for &'a DyadicGaussian {
    type Output = DyadicGaussian;

    fn add(self, rhs: &'a DyadicGaussian) -> DyadicGaussian {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let k = self.k.max(rhs.k);
        let (a, b) = self.numerator_at(k);
        let (c, d) = rhs.numerator_at(k);
        DyadicGaussian::new(a + c, b + d, k)
    }
}

impl Add for DyadicGaussian {
    type Output = DyadicGaussian;

    fn add(self, rhs: DyadicGaussian) -> DyadicGaussian {
        &self + &rhs
    }
}

impl<'a> Sub<&'a DyadicGaussian> for &'a DyadicGaussian {
    type Output = DyadicGaussian;

    fn sub(self, rhs: &'a DyadicGaussian) -> DyadicGaussian {
        self + &(-rhs)
    }
}

impl Sub for DyadicGaussian {
    type Output = DyadicGaussian;

    fn sub(self, rhs: DyadicGaussian) -> DyadicGaussian {
        &self - &rhs
    }
}

impl<'a> Mul<&'a DyadicGaussian> for &'a DyadicGaussian {
    type Output = DyadicGaussian;

    fn mul(self, rhs: &'a DyadicGaussian) -> DyadicGaussian {
        if self.is_zero() || rhs.is_zero() {
            return DyadicGaussian::zero();
        }
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        DyadicGaussian::new(re, im, self.k + rhs.k)
    }
}

impl Mul for DyadicGaussian {
    type Output = DyadicGaussian;

    fn mul(self, rhs: DyadicGaussian) -> DyadicGaussian {
        &self * &rhs
    }
}

impl Neg for &DyadicGaussian {
    type Output = DyadicGaussian;

    fn neg(self) -> DyadicGaussian {
        DyadicGaussian {
            re: -&self.re,
            im: -&self.im,
            k: self.k,
        }
    }
}

impl Neg for DyadicGaussian {
    type Output = DyadicGaussian;

    fn neg(self) -> DyadicGaussian {
        -&self
    }
}

impl From<i64> for DyadicGaussian {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

fn serialize_int<S: SerializeTuple>(seq: &mut S, x: &BigInt) -> Result<(), S::Error> {
    match x.to_i64() {
        Some(v) => seq.serialize_element(&v),
        None => seq.serialize_element(&x.to_string()),
    }
}

/// JSON form is the triple `[re, im, k]`; numerators outside the `i64`
/// range are written as decimal strings.
impl Serialize for DyadicGaussian {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_tuple(3)?;
        serialize_int(&mut seq, &self.re)?;
        serialize_int(&mut seq, &self.im)?;
        seq.serialize_element(&self.k)?;
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Text(String),
}

impl IntRepr {
    fn into_bigint<E: de::Error>(self) -> Result<BigInt, E> {
        match self {
            IntRepr::Small(v) => Ok(BigInt::from(v)),
            IntRepr::Text(s) => s
                .parse()
                .map_err(|_| E::custom(format!("bad integer {s:?}"))),
        }
    }
}

impl<'de> Deserialize<'de> for DyadicGaussian {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct TripleVisitor;

        impl<'de> Visitor<'de> for TripleVisitor {
            type Value = DyadicGaussian;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a triple [re, im, k]")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let re: IntRepr = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: IntRepr = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let k: u32 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(2, &self))?;
                Ok(DyadicGaussian::new(re.into_bigint()?, im.into_bigint()?, k))
            }
        }

        deserializer.deserialize_tuple(3, TripleVisitor)
    }
}
