//! Scalar backends. Everything numeric in this crate is generic over [`Real`],
//! implemented for `f64` and for the fixed-precision binary float [`Mp`].
//!
//! Complex values are `num_complex::Complex<T>`; the transcendental functions
//! `num_complex` only provides for `Float` types are supplied here as free
//! functions ([`csqrt`], [`cexp`], [`cln`]).

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_complex::Complex;
use num_traits::{Num, One, Zero};

/// Real scalar with the handful of elementary functions the kernels need.
pub trait Real:
    Clone + fmt::Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// Mantissa bits, used to size tolerances.
    const BITS: usize;

    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn from_i64(n: i64) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;
    fn pi() -> Self;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Unit roundoff `2^-BITS`.
    fn epsilon() -> Self {
        Self::from_f64(2f64.powi(-(Self::BITS.min(1000) as i32)))
    }

    fn powi(&self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            k >>= 1;
        }
        acc
    }
}

impl Real for f64 {
    const BITS: usize = 53;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
}

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Binary floating point with `BITS` bits of mantissa.
#[derive(Clone)]
pub struct Mp<const BITS: usize>(BigFloat);

pub type Mp256 = Mp<256>;
pub type Mp512 = Mp<512>;
pub type Mp1024 = Mp<1024>;

impl<const B: usize> Mp<B> {
    pub fn inner(&self) -> &BigFloat {
        &self.0
    }
}

impl<const B: usize> fmt::Debug for Mp<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl<const B: usize> fmt::Display for Mp<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = with_consts(|cc| self.0.format(Radix::Dec, RM, cc));
        match s {
            Ok(s) => f.write_str(&s),
            Err(_) => write!(f, "{:e}", self.to_f64()),
        }
    }
}

macro_rules! mp_binop {
    ($tr:ident, $m:ident) => {
        impl<const B: usize> $tr for Mp<B> {
            type Output = Self;
            fn $m(self, rhs: Self) -> Self {
                Mp(self.0.$m(&rhs.0, B, RM))
            }
        }
    };
}
mp_binop!(Add, add);
mp_binop!(Sub, sub);
mp_binop!(Mul, mul);
mp_binop!(Div, div);

impl<const B: usize> Rem for Mp<B> {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        let q = Mp(self.0.div(&rhs.0, B, RM).int());
        self - q * rhs
    }
}

impl<const B: usize> Neg for Mp<B> {
    type Output = Self;
    fn neg(self) -> Self {
        Mp(self.0.neg())
    }
}

impl<const B: usize> PartialEq for Mp<B> {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl<const B: usize> PartialOrd for Mp<B> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl<const B: usize> Zero for Mp<B> {
    fn zero() -> Self {
        Mp(BigFloat::from_word(0, B))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl<const B: usize> One for Mp<B> {
    fn one() -> Self {
        Mp(BigFloat::from_word(1, B))
    }
}

impl<const B: usize> Num for Mp<B> {
    type FromStrRadixErr = &'static str;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let rdx = match radix {
            2 => Radix::Bin,
            8 => Radix::Oct,
            10 => Radix::Dec,
            16 => Radix::Hex,
            _ => return Err("unsupported radix"),
        };
        let v = with_consts(|cc| BigFloat::parse(s, rdx, B, RM, cc));
        if v.is_nan() {
            Err("not a number")
        } else {
            Ok(Mp(v))
        }
    }
}

impl<const B: usize> Real for Mp<B> {
    const BITS: usize = B;

    fn from_f64(x: f64) -> Self {
        Mp(BigFloat::from_f64(x, B))
    }

    fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        match self.0.as_raw_parts() {
            Some((words, _, sign, exp, _)) => {
                let top = match words.last() {
                    Some(&w) if w != 0 => w,
                    _ => return 0.0,
                };
                let mag = (top as f64) * 2f64.powi(exp as i32 - 64);
                if sign == Sign::Neg {
                    -mag
                } else {
                    mag
                }
            }
            None => 0.0,
        }
    }

    fn from_i64(n: i64) -> Self {
        Mp(BigFloat::from_i64(n, B))
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.sqrt(B, RM))
    }
    fn exp(&self) -> Self {
        Mp(with_consts(|cc| self.0.exp(B, RM, cc)))
    }
    fn ln(&self) -> Self {
        Mp(with_consts(|cc| self.0.ln(B, RM, cc)))
    }
    fn sin(&self) -> Self {
        Mp(with_consts(|cc| self.0.sin(B, RM, cc)))
    }
    fn cos(&self) -> Self {
        Mp(with_consts(|cc| self.0.cos(B, RM, cc)))
    }
    fn atan2(&self, x: &Self) -> Self {
        let zero = Self::zero();
        let y = self;
        if x.is_zero() {
            let half = Self::pi() / Self::from_i64(2);
            return if *y > zero {
                half
            } else if *y < zero {
                -half
            } else {
                zero
            };
        }
        let base = Mp(with_consts(|cc| (y.clone() / x.clone()).0.atan(B, RM, cc)));
        if *x > zero {
            base
        } else if *y >= zero {
            base + Self::pi()
        } else {
            base - Self::pi()
        }
    }
    fn pi() -> Self {
        Mp(with_consts(|cc| cc.pi(B, RM)))
    }
    fn abs(&self) -> Self {
        Mp(self.0.abs())
    }
    fn epsilon() -> Self {
        Mp(BigFloat::from_word(1, B)) / Mp(BigFloat::from_word(2, B)).powi(B as i32)
    }
}

pub type C<T> = Complex<T>;

pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::from_f64(re), T::from_f64(im))
}

pub fn creal<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// Lift an f64 complex into the backend.
pub fn lift<T: Real>(z: Complex<f64>) -> C<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

/// Round a backend complex to f64.
pub fn lower<T: Real>(z: &C<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn cabs<T: Real>(z: &C<T>) -> T {
    z.norm_sqr().sqrt()
}

/// Principal square root (branch cut on the negative real axis, `Re >= 0`).
pub fn csqrt<T: Real>(z: &C<T>) -> C<T> {
    let zero = T::zero();
    if z.re.is_zero() && z.im.is_zero() {
        return C::new(zero.clone(), zero);
    }
    let two = T::from_i64(2);
    let r = cabs(z);
    if z.re >= zero {
        let s = ((r + z.re.clone()) / two.clone()).sqrt();
        let t = z.im.clone() / (two * s.clone());
        C::new(s, t)
    } else {
        let mut t = ((r - z.re.clone()) / two.clone()).sqrt();
        if z.im < zero {
            t = -t;
        }
        let s = z.im.clone() / (two * t.clone());
        C::new(s, t)
    }
}

pub fn cexp<T: Real>(z: &C<T>) -> C<T> {
    let m = z.re.exp();
    C::new(m.clone() * z.im.cos(), m * z.im.sin())
}

/// Principal logarithm, `Im` in `(-pi, pi]`.
pub fn cln<T: Real>(z: &C<T>) -> C<T> {
    C::new(cabs(z).ln(), z.im.atan2(&z.re))
}

pub fn cpowi<T: Real>(z: &C<T>, n: i32) -> C<T> {
    let mut base = if n < 0 { C::new(T::one(), T::zero()) / z.clone() } else { z.clone() };
    let mut k = n.unsigned_abs();
    let mut acc = C::new(T::one(), T::zero());
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base.clone();
        }
        base = base.clone() * base;
        k >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mp_round_trips_f64() {
        for x in [1.0, -2.5, 1e-30, 3.141592653589793, -7e200] {
            assert_eq!(Mp256::from_f64(x).to_f64(), x);
        }
        assert_eq!(Mp256::zero().to_f64(), 0.0);
    }

    #[test]
    fn mp_elementary_functions_match_f64() {
        let x = Mp512::from_f64(0.7);
        assert!((x.sqrt().to_f64() - 0.7f64.sqrt()).abs() < 1e-15);
        assert!((x.exp().to_f64() - 0.7f64.exp()).abs() < 1e-15);
        assert!((x.ln().to_f64() - 0.7f64.ln()).abs() < 1e-15);
        assert!((x.sin().to_f64() - 0.7f64.sin()).abs() < 1e-15);
        assert!((x.cos().to_f64() - 0.7f64.cos()).abs() < 1e-15);
        for (y, xx) in [(1.0, 2.0), (1.0, -2.0), (-1.0, -2.0), (-1.0, 2.0), (1.0, 0.0)] {
            let a = Mp256::from_f64(y).atan2(&Mp256::from_f64(xx)).to_f64();
            assert!((a - f64::atan2(y, xx)).abs() < 1e-15);
        }
    }

    #[test]
    fn mp_carries_more_digits_than_f64() {
        let one = Mp512::one();
        let tiny = Mp512::from_f64(1e-100);
        let back = (one.clone() + tiny.clone()) - one;
        assert!(((back / tiny).to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn complex_helpers_agree_with_num_complex() {
        for (re, im) in [(1.0, 2.0), (-3.0, 0.5), (-3.0, -0.5), (0.0, -2.0), (-4.0, 0.0)] {
            let z = Complex::new(re, im);
            let s = csqrt(&z);
            let e = z.sqrt();
            assert!((s - e).norm() < 1e-14, "{z}");
            assert!((cexp(&z) - z.exp()).norm() < 1e-12 * z.exp().norm());
            assert!((cln(&z) - z.ln()).norm() < 1e-14);
            let zm: C<Mp256> = lift(z);
            assert!((lower(&csqrt(&zm)) - e).norm() < 1e-14);
            assert!((lower(&cln(&zm)) - z.ln()).norm() < 1e-14);
        }
        assert!((cpowi(&Complex::new(1.0, 1.0), -3) - Complex::new(1.0, 1.0).powi(-3)).norm() < 1e-15);
    }
}
