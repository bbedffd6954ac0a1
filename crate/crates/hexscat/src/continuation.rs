//! Complex phases `ζ(z, θ)` parametrizing the energy surface, continued from
//! real `k` into the upper half plane.
//!
//! For real `k ∈ (0, 1)` the phases `ξ(k, θ)` solve
//! `sin²(ξ_j/2)`, `cos²(ξ_j/2) = ½{1 ∓ a²k² ± √g(k)}` with
//! `g(k) = a⁴k⁴ − 2(2e^{−2θ} − a²)k² + 1`, `a² = 2 − e^{2θ}`.
//!
//! On the upper half plane the square root of `g` is the branch continuous from
//! large real `z` (`√g ≈ a²z²`), and the half-angle signs follow the large-`|z|`
//! forms `sin(ζ₁/2) ≈ ib`, `cos(ζ₁/2) ≈ e^{−θ}/a`, `sin(ζ₂/2) ≈ iaz`,
//! `cos(ζ₂/2) ≈ az` on the positive branch. The negative branch is `ζ ↦ −ζ`.
//! This is what gives `e^{−iζ₂} ≈ 4a²z²` growth along `z = 1 + iN`.
//!
//! [`zeta_tracked`] instead follows every square root continuously along a path
//! from real `k`. The two choices differ: the tracked one satisfies the level
//! identity [`level_residual`] but has `Im ζ₁`, `Im ζ₂` of opposite signs.

use num_complex::Complex64;
use num_traits::One;

use crate::error::{Error, Result};
use crate::lattice::Site;
use crate::real::{cabs, cln, cpowi, csqrt, lift, Real, C};

/// Upper end of the admissible `θ` range, `½ log 2`.
pub fn theta_max() -> f64 {
    0.5 * 2f64.ln()
}

pub fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < theta_max() {
        Ok(())
    } else {
        Err(Error::Domain(format!("theta = {theta} outside (0, log(2)/2)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaConstants {
    pub a: f64,
    pub b: f64,
    pub a1: f64,
    pub b1: f64,
    pub a2: Complex64,
    pub b2: Complex64,
}

pub fn theta_constants(theta: f64) -> Result<ThetaConstants> {
    check_theta(theta)?;
    let e2 = (2.0 * theta).exp();
    let a = (2.0 - e2).sqrt();
    let b = 2.0 * theta.sinh() / a;
    Ok(ThetaConstants {
        a,
        b,
        a1: 4.0 * a * a,
        b1: e2 / (2.0 - e2),
        a2: Complex64::new(0.0, -std::f64::consts::SQRT_2 * a * a),
        b2: Complex64::new(0.0, -(-2.0 * theta).exp() / std::f64::consts::SQRT_2),
    })
}

/// `θ` with `b₁(θ) = t`, for `t ∈ (1, ∞)`.
pub fn theta_for_b1(t: f64) -> Result<f64> {
    if t <= 1.0 {
        return Err(Error::Domain(format!("b1 = {t} must exceed 1")));
    }
    // b₁ = e^{2θ}/(2 − e^{2θ})  ⇔  e^{2θ} = 2t/(1 + t)
    Ok(0.5 * (2.0 * t / (1.0 + t)).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `ξ_j ∈ (0, π)`
    Positive,
    /// `ξ_j ∈ (−π, 0)`
    Negative,
}

impl Branch {
    fn sign(self) -> i64 {
        match self {
            Branch::Positive => 1,
            Branch::Negative => -1,
        }
    }
}

/// Half-angle values `cos(ζ_j/2)`, `sin(ζ_j/2)` of a continued phase.
#[derive(Debug, Clone)]
pub struct ContinuedPhase<T: Real> {
    pub cos_half: [C<T>; 2],
    pub sin_half: [C<T>; 2],
    pub branch: Branch,
}

fn i_unit<T: Real>() -> C<T> {
    C::new(T::zero(), T::one())
}

impl<T: Real> ContinuedPhase<T> {
    /// `e^{iζ_j/2}`, formed without cancellation.
    pub fn exp_half(&self, j: usize) -> C<T> {
        let (c, s) = (&self.cos_half[j], &self.sin_half[j]);
        let i = i_unit::<T>();
        match self.branch {
            // c + is = 1/(c − is) because c² + s² = 1.
            Branch::Positive => C::<T>::one() / (c.clone() - i * s.clone()),
            Branch::Negative => c.clone() + i * s.clone(),
        }
    }

    /// `e^{iζ_j}`.
    pub fn exp_full(&self, j: usize) -> C<T> {
        let h = self.exp_half(j);
        h.clone() * h
    }

    /// `ζ_j` from the half-angle values by the real inversion of `cos(ζ/2)`
    /// (for `ζ₁`) or `sin(ζ/2)` (for `ζ₂`).
    pub fn angles(&self) -> [C<T>; 2] {
        [invert_cos(&self.cos_half[0], &self.sin_half[0]), invert_sin(&self.sin_half[1], &self.cos_half[1])]
    }

    pub fn lower(&self) -> ContinuedPhase<f64> {
        let l = |z: &C<T>| Complex64::new(z.re.to_f64(), z.im.to_f64());
        ContinuedPhase {
            cos_half: [l(&self.cos_half[0]), l(&self.cos_half[1])],
            sin_half: [l(&self.sin_half[0]), l(&self.sin_half[1])],
            branch: self.branch,
        }
    }
}

fn asinh<T: Real>(x: &T) -> T {
    if *x < T::zero() {
        return -asinh(&(-x.clone()));
    }
    (x.clone() + (x.clone() * x.clone() + T::one()).sqrt()).ln()
}

/// Positive root of `t² + Bt − y² = 0`, in a cancellation-free form.
fn quad_root<T: Real>(bq: T, y2: T) -> T {
    let disc = (bq.clone() * bq.clone() + T::from_i64(4) * y2.clone()).sqrt();
    if bq > T::zero() {
        T::from_i64(2) * y2 / (bq + disc)
    } else {
        (disc - bq) / T::from_i64(2)
    }
}

/// `E` from `cos(E/2) = x + iy`: with `E = η + iκ`, `t = sin²(η/2)` solves
/// `t² + (x² + y² − 1)t − y² = 0`; `sin(η/2)` takes the sign of `Re sin(E/2)`.
fn invert_cos<T: Real>(w: &C<T>, other: &C<T>) -> C<T> {
    let (x, y) = (w.re.clone(), w.im.clone());
    let bq = x.clone() * x.clone() + y.clone() * y.clone() - T::one();
    let t = quad_root(bq, y.clone() * y.clone());
    let mut sn = t.sqrt();
    if other.re < T::zero() {
        sn = -sn;
    }
    let sh = if sn.is_zero() {
        // η/2 ∈ {0, π}: then y = 0 and cosh(κ/2) = |x|.
        let ch = x.abs();
        let v = (ch.clone() * ch - T::one()).sqrt();
        if other.im.clone() * x.clone() < T::zero() {
            -v
        } else {
            v
        }
    } else {
        -y / sn.clone()
    };
    let ch = (sh.clone() * sh.clone() + T::one()).sqrt();
    let cs = x / ch;
    let eta_half = sn.atan2(&cs);
    let kappa_half = asinh(&sh);
    C::new(eta_half, kappa_half) * T::from_i64(2)
}

/// `E` from `sin(E/2) = x + iy`: `t = cos²(η/2)` solves the same quadratic;
/// `cos(η/2)` takes the sign of `Re cos(E/2)`.
fn invert_sin<T: Real>(w: &C<T>, other: &C<T>) -> C<T> {
    let (x, y) = (w.re.clone(), w.im.clone());
    let bq = x.clone() * x.clone() + y.clone() * y.clone() - T::one();
    let t = quad_root(bq, y.clone() * y.clone());
    let mut cs = t.sqrt();
    if other.re < T::zero() {
        cs = -cs;
    }
    let sh = if cs.is_zero() {
        let ch = x.abs();
        let v = (ch.clone() * ch - T::one()).sqrt();
        if -other.im.clone() * x.clone() < T::zero() {
            -v
        } else {
            v
        }
    } else {
        y / cs.clone()
    };
    let ch = (sh.clone() * sh.clone() + T::one()).sqrt();
    let sn = x / ch;
    let eta_half = sn.atan2(&cs);
    let kappa_half = asinh(&sh);
    C::new(eta_half, kappa_half) * T::from_i64(2)
}

struct Squares<T: Real> {
    s1: C<T>,
    c1: C<T>,
    s2: C<T>,
    c2: C<T>,
}

/// The four half-angle squares given a choice of `√g`, written so that the
/// small pair carries no cancellation when `√g ≈ a²z²`.
fn squares<T: Real>(z: &C<T>, theta: &T, sqrt_g: &C<T>) -> Squares<T> {
    let one = C::<T>::one();
    let two = T::from_i64(2);
    let e2 = (theta.clone() * two.clone()).exp();
    let a2 = T::from_i64(2) - e2;
    let sh = sinh(theta);
    let z2 = z.clone() * z.clone();
    let az2 = z2.clone() * a2;
    // (1 − a²z²)² − g = 16 z² sinh²θ and (1 + a²z²)² − g = 4 z² e^{−2θ}.
    let s1 = z2.clone() * (T::from_i64(8) * sh.clone() * sh) / (one.clone() - az2.clone() - sqrt_g.clone());
    let c1 = z2 * (two.clone() * (-(theta.clone() * two.clone())).exp()) / (one.clone() + az2.clone() + sqrt_g.clone());
    let s2 = (one.clone() - az2.clone() - sqrt_g.clone()) / two.clone();
    let c2 = (one + az2 + sqrt_g.clone()) / two;
    Squares { s1, c1, s2, c2 }
}

fn sinh<T: Real>(x: &T) -> T {
    (x.exp() - (-x.clone()).exp()) / T::from_i64(2)
}

fn g_of<T: Real>(z: &C<T>, theta: &T) -> C<T> {
    let two = T::from_i64(2);
    let e2 = (theta.clone() * two.clone()).exp();
    let a2 = T::from_i64(2) - e2;
    let em2 = (-(theta.clone() * two.clone())).exp();
    let z2 = z.clone() * z.clone();
    let lin = (em2 * two.clone() - a2.clone()) * two;
    z2.clone() * z2.clone() * (a2.clone() * a2) - z2 * lin + C::<T>::one()
}

/// Picks the root of `w` pointing along `lead`.
fn root_along<T: Real>(w: &C<T>, lead: &C<T>) -> (C<T>, f64) {
    let r = csqrt(w);
    let q = (r.clone() / lead.clone()).re.to_f64();
    if q >= 0.0 {
        (r, q)
    } else {
        (-r, -q)
    }
}

/// Continued phase on the upper half plane (`|z|` large enough that the
/// half-angle signs are unambiguous; `|z| ≥ 4` suffices for every admissible θ).
pub fn zeta<T: Real>(z: &C<T>, theta: &T, branch: Branch) -> Result<ContinuedPhase<T>> {
    if z.im < T::zero() {
        return Err(Error::Domain("z must lie in the closed upper half plane".into()));
    }
    zeta_exterior(z, theta, branch)
}

/// The same phase as an analytic function of `z` outside a disc: the
/// half-angle roots follow their leading terms in every direction, so the
/// result is single valued on `|z| ≥ 4` and agrees with [`zeta`] on `Im z ≥ 0`.
pub fn zeta_exterior<T: Real>(z: &C<T>, theta: &T, branch: Branch) -> Result<ContinuedPhase<T>> {
    let th = theta.to_f64();
    check_theta(th)?;
    let two = T::from_i64(2);
    let e2 = (theta.clone() * two.clone()).exp();
    let a2 = T::from_i64(2) - e2;
    let a = a2.sqrt();
    let b = two.clone() * sinh(theta) / a.clone();
    let cc = (-theta.clone()).exp() / a.clone();
    let z2 = z.clone() * z.clone();
    let (sg, qg) = root_along(&g_of(z, theta), &(z2 * a2));
    let sq = squares(z, theta, &sg);
    let i = i_unit::<T>();
    let az = z.clone() * a;
    let (s1, q1) = root_along(&sq.s1, &(i.clone() * b));
    let (c1, q2) = root_along(&sq.c1, &C::new(cc, T::zero()));
    let (s2, q3) = root_along(&sq.s2, &(i * az.clone()));
    let (c2, q4) = root_along(&sq.c2, &az);
    let worst = qg.min(q1).min(q2).min(q3).min(q4);
    if worst < 0.5 {
        return Err(Error::Branch(format!(
            "half-angle signs ambiguous at z = {:?} (alignment {worst:.3}); |z| too small",
            crate::real::lower(z)
        )));
    }
    let sgn = T::from_i64(branch.sign());
    Ok(ContinuedPhase { cos_half: [c1, c2], sin_half: [s1 * sgn.clone(), s2 * sgn], branch })
}

/// Principal `arcsin(w) = −i log(iw + √(1 − w²))`.
fn arcsin<T: Real>(w: &C<T>) -> C<T> {
    let i = i_unit::<T>();
    let inner = i.clone() * w.clone() + csqrt(&(C::<T>::one() - w.clone() * w.clone()));
    -(i * cln(&inner))
}

fn wrap<T: Real>(x: T, period: &T) -> T {
    // into (−period/2, period/2]
    let half = period.clone() / T::from_i64(2);
    let mut y = x;
    while y > half {
        y = y - period.clone();
    }
    while y <= -half.clone() {
        y = y + period.clone();
    }
    y
}

fn arcsin_half<T: Real>(ph: &ContinuedPhase<T>, j: usize) -> C<T> {
    let mut h = arcsin(&ph.sin_half[j]);
    // arcsin fixes sin(h); flip to π − h when cos(h) disagrees with the stored cosine.
    let cos_h = crate::real::cexp(&(h.clone() * i_unit::<T>()));
    let cos_h = (cos_h.clone() + C::<T>::one() / cos_h) / T::from_i64(2);
    if (cos_h / ph.cos_half[j].clone()).re < T::zero() {
        h = C::new(T::pi(), T::zero()) - h;
    }
    h
}

/// `ζ` by principal arcsin of `sin(ζ_j/2)`, unwrapped along a 32-point vertical
/// segment from `Re z + 2i·Im z` down to `z` so that `Re ζ` is continuous.
pub fn zeta_arcsin<T: Real>(z: &C<T>, theta: &T, branch: Branch) -> Result<[C<T>; 2]> {
    let steps = 32;
    let four_pi = T::pi() * T::from_i64(4);
    let mut prev: Option<[C<T>; 2]> = None;
    for k in 0..=steps {
        let f = T::from_i64(2 * steps - k) / T::from_i64(steps);
        let zk = C::new(z.re.clone(), z.im.clone() * f);
        let ph = zeta(&zk, theta, branch)?;
        let mut cur = [arcsin_half(&ph, 0) * T::from_i64(2), arcsin_half(&ph, 1) * T::from_i64(2)];
        if let Some(p) = &prev {
            for j in 0..2 {
                let d = wrap(cur[j].re.clone() - p[j].re.clone(), &four_pi);
                cur[j] = C::new(p[j].re.clone() + d, cur[j].im.clone());
            }
        }
        prev = Some(cur);
    }
    Ok(prev.expect("at least one step"))
}

/// Largest disagreement between the two inversion methods, with real parts
/// compared modulo 4π (half angles are fixed modulo 2π).
pub fn method_gap<T: Real>(z: &C<T>, theta: &T, branch: Branch) -> Result<f64> {
    let a = zeta(z, theta, branch)?.angles();
    let b = zeta_arcsin(z, theta, branch)?;
    let four_pi = T::pi() * T::from_i64(4);
    let mut gap: f64 = 0.0;
    for j in 0..2 {
        let dr = wrap(a[j].re.clone() - b[j].re.clone(), &four_pi).to_f64();
        let di = (a[j].im.clone() - b[j].im.clone()).to_f64();
        gap = gap.max(dr.abs()).max(di.abs());
    }
    Ok(gap)
}

/// [`zeta`] with the cross-check against [`zeta_arcsin`].
pub fn zeta_checked<T: Real>(z: &C<T>, theta: &T, branch: Branch, tol: f64) -> Result<ContinuedPhase<T>> {
    let ph = zeta(z, theta, branch)?;
    let gap = method_gap(z, theta, branch)?;
    if gap > tol {
        let h = ph.lower();
        return Err(Error::Branch(format!(
            "inversion methods disagree by {gap:e}; cos/sin halves: {:?} {:?}",
            h.cos_half, h.sin_half
        )));
    }
    Ok(ph)
}

/// Phases at real `k ∈ (0, 1)`.
pub fn xi_real(k: f64, theta: f64, branch: Branch) -> Result<[f64; 2]> {
    check_theta(theta)?;
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Domain(format!("k = {k} outside (0, 1)")));
    }
    let a2 = 2.0 - (2.0 * theta).exp();
    let g = a2 * a2 * k.powi(4) - 2.0 * (2.0 * (-2.0 * theta).exp() - a2) * k * k + 1.0;
    if g < 0.0 {
        return Err(Error::Domain(format!("no real phases at k = {k}, theta = {theta} (g = {g:e} < 0)")));
    }
    let sg = g.sqrt();
    let s1 = 0.5 * (1.0 - a2 * k * k + sg);
    let s2 = 0.5 * (1.0 - a2 * k * k - sg);
    let x1 = 2.0 * s1.clamp(0.0, 1.0).sqrt().asin();
    let x2 = 2.0 * s2.clamp(0.0, 1.0).sqrt().asin();
    let s = branch.sign() as f64;
    Ok([s * x1, s * x2])
}

/// Residuals of the level relations
/// `(c₁c₂ + ½s₁s₂)² − (½s₁s₂)² = (λ² − 1)/8` with `λ² = 8z² + 1`, and of
/// `sin² + cos² = 1` for each half angle. Returns `(level, pythagoras)`.
pub fn level_residual<T: Real>(ph: &ContinuedPhase<T>, z: &C<T>) -> (f64, f64) {
    let half = T::one() / T::from_i64(2);
    let cc = ph.cos_half[0].clone() * ph.cos_half[1].clone();
    let ss = ph.sin_half[0].clone() * ph.sin_half[1].clone() * half;
    let lhs = (cc.clone() + ss.clone()) * (cc + ss.clone()) - ss.clone() * ss;
    let rhs = z.clone() * z.clone();
    let level = cabs(&(lhs - rhs.clone())).to_f64() / cabs(&rhs).to_f64().max(1.0);
    let mut pyth: f64 = 0.0;
    for j in 0..2 {
        let s = ph.sin_half[j].clone();
        let c = ph.cos_half[j].clone();
        let scale = cabs(&(s.clone() * s.clone())).to_f64().max(1.0);
        pyth = pyth.max(cabs(&(s.clone() * s + c.clone() * c - C::<T>::one())).to_f64() / scale);
    }
    (level, pyth)
}

/// Residuals of the displayed half-angle squares, relative to the size
/// `max(1, |a²z²|)` of the terms they are formed from.
pub fn square_residual<T: Real>(ph: &ContinuedPhase<T>, z: &C<T>, theta: &T) -> f64 {
    let two = T::from_i64(2);
    let e2 = (theta.clone() * two.clone()).exp();
    let a2 = T::from_i64(2) - e2;
    let z2 = z.clone() * z.clone();
    let (sg, _) = root_along(&g_of(z, theta), &(z2.clone() * a2.clone()));
    let one = C::<T>::one();
    let s1 = (one.clone() - z2.clone() * a2.clone() + sg.clone()) / two.clone();
    let s2 = (one.clone() - z2.clone() * a2.clone() - sg.clone()) / two.clone();
    let c1 = (one.clone() + z2.clone() * a2.clone() - sg.clone()) / two.clone();
    let scale = cabs(&(z2.clone() * a2.clone())).to_f64().max(1.0);
    let c2 = (one + z2 * a2 + sg) / two;
    let mut worst: f64 = 0.0;
    for (v, want) in [
        (ph.sin_half[0].clone(), s1),
        (ph.sin_half[1].clone(), s2),
        (ph.cos_half[0].clone(), c1),
        (ph.cos_half[1].clone(), c2),
    ] {
        let got = v.clone() * v;
        worst = worst.max(cabs(&(got - want)).to_f64() / scale);
    }
    worst
}

/// Continuation from real `k₀ = ½` by following `√g` and all four half-angle
/// roots continuously along `k₀ → k₀ + i·Im z → z`.
pub fn zeta_tracked(z: Complex64, theta: f64, branch: Branch) -> Result<ContinuedPhase<f64>> {
    check_theta(theta)?;
    if z.im <= 0.0 {
        return Err(Error::Domain("z must lie in the open upper half plane".into()));
    }
    let k0 = 0.5;
    let start = xi_real(k0, theta, Branch::Positive)?;
    let mut sg = Complex64::new(g_of::<f64>(&Complex64::new(k0, 0.0), &theta).re.sqrt(), 0.0);
    let mut roots = [
        Complex64::new((start[0] / 2.0).sin(), 0.0),
        Complex64::new((start[0] / 2.0).cos(), 0.0),
        Complex64::new((start[1] / 2.0).sin(), 0.0),
        Complex64::new((start[1] / 2.0).cos(), 0.0),
    ];
    let mut path: Vec<Complex64> = Vec::new();
    let nv = 6000;
    let t_lo: f64 = 1e-9;
    for i in 1..=nv {
        let t = t_lo * (z.im / t_lo).powf(i as f64 / nv as f64);
        path.push(Complex64::new(k0, t));
    }
    let nh = 2000;
    for i in 1..=nh {
        let s = i as f64 / nh as f64;
        path.push(Complex64::new(k0 + s * (z.re - k0), z.im));
    }
    for zk in path {
        let g = g_of::<f64>(&zk, &theta);
        let r = g.sqrt();
        sg = if (r - sg).norm() <= (r + sg).norm() { r } else { -r };
        let sq = squares(&zk, &theta, &sg);
        let targets = [sq.s1, sq.c1, sq.s2, sq.c2];
        for (root, w) in roots.iter_mut().zip(targets) {
            let r = w.sqrt();
            *root = if (r - *root).norm() <= (r + *root).norm() { r } else { -r };
        }
    }
    let sgn = branch.sign() as f64;
    Ok(ContinuedPhase {
        cos_half: [roots[1], roots[3]],
        sin_half: [roots[0] * sgn, roots[2] * sgn],
        branch,
    })
}

/// `e^{i n·ζ}`.
pub fn phase_factor<T: Real>(n: Site, ph: &ContinuedPhase<T>) -> C<T> {
    let e1 = ph.exp_full(0);
    let e2 = ph.exp_full(1);
    cpowi(&e1, n.n1 as i32) * cpowi(&e2, n.n2 as i32)
}

/// `√(8z² + 1)` on the branch analytic outside `|z| ≤ 1/√8`, taken as
/// `2√2 z √(1 + 1/(8z²))`. It is the principal root whenever `Re z > 0`,
/// in particular along the ray `1 + iN`.
pub fn lambda_of<T: Real>(z: &C<T>) -> C<T> {
    let z2 = z.clone() * z.clone() * T::from_i64(8);
    let w = C::<T>::one() + C::<T>::one() / z2;
    csqrt(&w) * z.clone() * (T::from_i64(8)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Amp {
    Alpha,
    AlphaBar,
}

/// `α(ζ)/√(8z²+1)` or `ᾱ(ζ)/√(8z²+1)`.
pub fn amp_ratio<T: Real>(ph: &ContinuedPhase<T>, z: &C<T>, which: Amp) -> C<T> {
    let e1 = ph.exp_full(0);
    let e2 = ph.exp_full(1);
    let num = match which {
        Amp::Alpha => C::<T>::one() + e1 + e2,
        Amp::AlphaBar => C::<T>::one() + C::<T>::one() / e1 + C::<T>::one() / e2,
    };
    num / lambda_of(z)
}

/// Closed-form large-`N` values along `z = 1 + iN`, real parts modulo 2π in `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Prediction {
    pub re1: f64,
    pub im1: f64,
    pub re2: f64,
    pub im2: f64,
}

pub fn asymptotic_prediction(n: f64, theta: f64, branch: Branch) -> Result<Prediction> {
    let k = theta_constants(theta)?;
    let s = branch.sign() as f64;
    Ok(Prediction {
        re1: 0.0,
        im1: s * 2.0 * (k.b + (k.b * k.b + 1.0).sqrt()).ln(),
        re2: std::f64::consts::PI,
        im2: s * (2.0 * n.ln() + (4.0 * k.a * k.a).ln()),
    })
}

/// Signed deviations of `ζ(1+iN)` from [`asymptotic_prediction`], real parts
/// reduced modulo 2π.
pub fn deviation<T: Real>(n: f64, theta: f64, branch: Branch) -> Result<[f64; 4]> {
    let z: C<T> = lift(Complex64::new(1.0, n));
    let ang = zeta(&z, &T::from_f64(theta), branch)?.angles();
    let p = asymptotic_prediction(n, theta, branch)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let red = |x: f64| {
        let mut y = x.rem_euclid(two_pi);
        if y > std::f64::consts::PI {
            y -= two_pi;
        }
        y
    };
    let re1 = red(ang[0].re.to_f64() - p.re1);
    let re2 = red(ang[1].re.to_f64() - p.re2);
    Ok([re1, ang[0].im.to_f64() - p.im1, re2, ang[1].im.to_f64() - p.im2])
}
