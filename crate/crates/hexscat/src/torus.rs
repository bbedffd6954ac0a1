//! Exact trigonometric polynomials on 𝕋² with Gaussian-integer coefficients.
//!
//! `P(ξ) = Σ_n c_n e^{i n·ξ}`. Everything generated from `α = 1 + e^{iξ₁} + e^{iξ₂}`
//! has integer coefficients, so products are exact.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::lattice::{dist, Dist, Site};
use crate::real::{cexp, Real, C};

/// Gaussian integer `re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GInt {
    pub re: i128,
    pub im: i128,
}

impl GInt {
    pub const fn new(re: i128, im: i128) -> Self {
        GInt { re, im }
    }
    fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }
    fn mul(self, o: GInt) -> GInt {
        GInt::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
    fn add(self, o: GInt) -> GInt {
        GInt::new(self.re + o.re, self.im + o.im)
    }
    pub fn conj(self) -> GInt {
        GInt::new(self.re, -self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TrigPoly {
    coeffs: BTreeMap<Site, GInt>,
}

impl TrigPoly {
    pub fn constant(c: i128) -> Self {
        let mut p = TrigPoly::default();
        p.set(Site::ORIGIN, GInt::new(c, 0));
        p
    }

    pub fn from_terms(terms: &[((i64, i64), i128)]) -> Self {
        let mut p = TrigPoly::default();
        for &((a, b), c) in terms {
            let cur = p.coeff(Site::new(a, b));
            p.set(Site::new(a, b), cur.add(GInt::new(c, 0)));
        }
        p
    }

    fn set(&mut self, n: Site, c: GInt) {
        if c.is_zero() {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, c);
        }
    }

    pub fn coeff(&self, n: Site) -> GInt {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = (&Site, &GInt)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `conj(P)(ξ) = conj(P(ξ))` for real ξ: coefficient at `n` is `conj(c_{-n})`.
    pub fn conj(&self) -> Self {
        TrigPoly { coeffs: self.coeffs.iter().map(|(&n, &c)| (-n, c.conj())).collect() }
    }

    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = TrigPoly::default();
        for (&m, &a) in &self.coeffs {
            for (&k, &b) in &other.coeffs {
                let n = m + k;
                let cur = out.coeff(n);
                out.set(n, cur.add(a.mul(b)));
            }
        }
        out
    }

    pub fn pow(&self, s: u32) -> TrigPoly {
        let mut acc = TrigPoly::constant(1);
        for _ in 0..s {
            acc = acc.mul(self);
        }
        acc
    }

    /// `Σ c_n exp(i(n₁ζ₁ + n₂ζ₂))` at complex angles.
    pub fn eval<T: Real>(&self, zeta: &[C<T>; 2]) -> C<T> {
        let mut acc = C::new(T::zero(), T::zero());
        for (&n, &cf) in &self.coeffs {
            let arg = zeta[0].clone() * T::from_i64(n.n1) + zeta[1].clone() * T::from_i64(n.n2);
            let e = cexp(&(arg * C::new(T::zero(), T::one())));
            acc = acc + e * C::new(T::from_i64(cf.re as i64), T::from_i64(cf.im as i64));
        }
        acc
    }

    /// Evaluation at real angles.
    pub fn eval_real(&self, xi: (f64, f64)) -> num_complex::Complex<f64> {
        self.eval::<f64>(&[C::new(xi.0, 0.0), C::new(xi.1, 0.0)])
    }
}

/// `α(ξ) = 1 + e^{iξ₁} + e^{iξ₂}`.
pub fn alpha() -> TrigPoly {
    TrigPoly::from_terms(&[((0, 0), 1), ((1, 0), 1), ((0, 1), 1)])
}

/// `ᾱ(ξ) = 1 + e^{-iξ₁} + e^{-iξ₂}`.
pub fn alpha_bar() -> TrigPoly {
    alpha().conj()
}

/// `r = αᾱ = |α|²`.
pub fn r() -> TrigPoly {
    alpha().mul(&alpha_bar())
}

#[derive(Debug, Clone, Serialize)]
pub struct SupportCheck {
    pub s: u32,
    pub family: String,
    pub terms: usize,
    /// Largest distance among nonzero frequencies; must not exceed `s`.
    pub max_dist: i64,
    pub violations: Vec<(i64, i64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupportReport {
    pub smax: u32,
    pub checks: Vec<SupportCheck>,
}

impl SupportReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.violations.is_empty() && c.max_dist <= c.s as i64)
    }
}

fn check_family(s: u32, family: &str, p: &TrigPoly, kind: Dist) -> SupportCheck {
    let mut max_dist = 0;
    let mut violations = Vec::new();
    for (&n, _) in p.support() {
        let d = dist(kind, n);
        max_dist = max_dist.max(d);
        if d > s as i64 {
            violations.push((n.n1, n.n2));
        }
    }
    SupportCheck { s, family: family.to_string(), terms: p.len(), max_dist, violations }
}

/// Checks that `rˢ`, `rˢα`, `rˢᾱ` vanish outside `{d ≤ s}`, `{d₁₂ ≤ s}`, `{d₂₁ ≤ s}`.
pub fn verify_support(smax: u32) -> SupportReport {
    let (a, ab, rr) = (alpha(), alpha_bar(), r());
    let mut rs = TrigPoly::constant(1);
    let mut checks = Vec::new();
    for s in 0..=smax {
        checks.push(check_family(s, "r^s", &rs, Dist::D));
        checks.push(check_family(s, "r^s alpha", &rs.mul(&a), Dist::D12));
        checks.push(check_family(s, "r^s alpha_bar", &rs.mul(&ab), Dist::D21));
        rs = rs.mul(&rr);
    }
    SupportReport { smax, checks }
}
