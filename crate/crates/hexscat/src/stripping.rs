//! Layer stripping: recover `q̂₂` then `q̂₁` row by row from the top row
//! `n₂ = M` down to `−M`.
//!
//! At stage `(p, Q2)` the difference `D(z) = B₂₂ − B₂₂[q_(>p,>p)]` behaves like
//! `z^{4p} (a₁(θ)a₁(θ′))^p Σ_{n₁} (b₁(θ)b₁(θ′))^{n₁} q̂₂(n₁, p)` plus lower
//! powers of `z`. Stage `(p, Q1)` does the same in block 11 with `q̂₂` on row `p`
//! also treated as known. The leading coefficient is taken either by
//! Richardson extrapolation along `z = 1 + iN` ([`Extraction::Ray`]) or as a
//! Laurent coefficient by the trapezoidal rule on a circle
//! ([`Extraction::Contour`]). Sampling several `θ` then gives a
//! Laurent-Vandermonde system for each row.
//!
//! Along the ray an error `δ` left in a recovered row reappears in later
//! stages multiplied by `N²` to `N⁶`, so the ray method only survives for very
//! small supports. The contour rule separates the powers of `z` exactly and
//! keeps that propagation at `O(1)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::continuation::{check_theta, theta_for_b1};
use crate::error::{Error, Result};
use crate::kernels::{check_ray_point, shared_powers, Block, Forward, KnownTerms, PhasePair, Recovered, Stage, MIN_ABS_Z};
use crate::linalg::least_squares;
use crate::real::{cabs, lift, Real, C};
use crate::resolvent::RPowers;
use crate::spectral::PotentialField;

/// Data source for the kernels `B(z, θ, θ′)`, queried at `|z| ≥ 4`.
pub trait BOracle<T: Real>: Sync {
    fn eval(&self, z: &C<T>, theta: f64, theta_prime: f64, block: Block) -> Result<C<T>>;
}

impl<T: Real> BOracle<T> for Forward<T> {
    fn eval(&self, z: &C<T>, theta: f64, theta_prime: f64, block: Block) -> Result<C<T>> {
        Ok(self.eval_at(z, theta, theta_prime, block)?.total())
    }
}

/// Oracle of the zero potential.
pub struct ZeroOracle;

impl<T: Real> BOracle<T> for ZeroOracle {
    fn eval(&self, _: &C<T>, _: f64, _: f64, _: Block) -> Result<C<T>> {
        Ok(C::new(T::zero(), T::zero()))
    }
}

/// How the leading coefficient of `D(z)` is extracted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Extraction {
    /// Richardson extrapolation of `D/N^{4p}` along `z = 1 + iN` at the nodes `ns`.
    Ray,
    /// Coefficient of `z^{4p}` from `points` equispaced samples on `|z| = radius`.
    Contour { radius: f64, points: usize },
}

impl Default for Extraction {
    fn default() -> Self {
        Extraction::Ray
    }
}

/// Equispaced nodes `R ω^j` on a circle with the unit roots `ω^j` kept apart,
/// so that `z_j^{−k}` is a table lookup.
pub struct Circle<T: Real> {
    pub radius: T,
    pub roots: Vec<C<T>>,
}

impl<T: Real> Circle<T> {
    pub fn new(radius: f64, points: usize) -> Self {
        let two_pi = T::pi() * T::from_i64(2);
        let roots = (0..points)
            .map(|j| {
                let a = two_pi.clone() * T::from_i64(j as i64) / T::from_i64(points as i64);
                C::new(a.cos(), a.sin())
            })
            .collect();
        Circle { radius: T::from_f64(radius), roots }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn node(&self, j: usize) -> C<T> {
        self.roots[j].clone() * self.radius.clone()
    }

    /// Trapezoidal approximation of the Laurent coefficient of `z^k` from
    /// samples at the nodes.
    pub fn coefficient(&self, samples: &[C<T>], k: i64) -> C<T> {
        let n = self.roots.len() as i64;
        let mut acc = C::new(T::zero(), T::zero());
        for (j, f) in samples.iter().enumerate() {
            let idx = (-(j as i64) * k).rem_euclid(n) as usize;
            acc = acc + f.clone() * self.roots[idx].clone();
        }
        acc / T::from_i64(n) / self.radius.powi(k as i32)
    }
}

#[derive(Debug, Clone)]
pub struct Extrapolation<T: Real> {
    pub value: C<T>,
    /// `|P_k(0) − P_{k−1}(0)|` over the largest nodes; zero at order 0.
    pub error: f64,
}

/// Polynomial extrapolation in `h = 1/N` to `h = 0` through the `order + 1`
/// samples with the largest `N` (Neville's scheme).
pub fn richardson_limit<T: Real>(samples: &[(T, C<T>)], order: usize) -> Result<Extrapolation<T>> {
    if samples.len() < order + 1 {
        return Err(Error::InsufficientSamples { need: order + 1, got: samples.len() });
    }
    let mut s: Vec<&(T, C<T>)> = samples.iter().collect();
    s.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite N"));
    let s = &s[s.len() - order - 1..];
    let h: Vec<T> = s.iter().map(|(n, _)| T::one() / n.clone()).collect();
    for w in h.windows(2) {
        if w[0] == w[1] {
            return Err(Error::Domain("repeated N node".into()));
        }
    }
    let mut p: Vec<C<T>> = s.iter().map(|(_, v)| v.clone()).collect();
    // After pass k, p[i] is the interpolant through nodes i..=i+k evaluated at 0;
    // p[1] after pass order − 1 is the lower-order estimate on the largest nodes.
    let mut lower = p[order].clone();
    for k in 1..=order {
        if k == order {
            lower = p[1].clone();
        }
        for i in 0..=order - k {
            let (hi, hk) = (h[i].clone(), h[i + k].clone());
            p[i] = (p[i + 1].clone() * hi.clone() - p[i].clone() * hk.clone()) / (hi - hk);
        }
    }
    let value = p[0].clone();
    let error = if order == 0 { 0.0 } else { cabs(&(value.clone() - lower)).to_f64() };
    Ok(Extrapolation { value, error })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RowSolve {
    pub coeffs: BTreeMap<i64, f64>,
    /// Largest `|Im c|` of the complex solution.
    pub imag_residue: f64,
    /// Ratio of extreme diagonal entries of the QR factor.
    pub cond: f64,
    /// `‖A c − s‖ / max(‖s‖, 1)` of the complex solution.
    pub fit_residual: f64,
}

/// Solves `Σ_{|n₁| ≤ width} t^{n₁} c_{n₁} = s` in least squares after
/// multiplying by `t^{width}`.
pub fn solve_row<T: Real>(tvals: &[T], sums: &[C<T>], width: usize, cond_cap: f64) -> Result<RowSolve> {
    let cols = 2 * width + 1;
    if tvals.len() != sums.len() {
        return Err(Error::Domain("tvals and sums differ in length".into()));
    }
    if tvals.len() < cols {
        return Err(Error::InsufficientSamples { need: cols, got: tvals.len() });
    }
    for (i, t) in tvals.iter().enumerate() {
        if *t <= T::zero() {
            return Err(Error::Domain("t values must be positive".into()));
        }
        if tvals[..i].iter().any(|u| u == t) {
            return Err(Error::Domain("t values must be distinct".into()));
        }
    }
    let rows = tvals.len();
    let mut a = Vec::with_capacity(rows * cols);
    let mut b = Vec::with_capacity(rows);
    for (t, s) in tvals.iter().zip(sums) {
        let mut pw = T::one();
        for _ in 0..cols {
            a.push(pw.clone());
            pw = pw * t.clone();
        }
        b.push(s.clone() * t.powi(width as i32));
    }
    let (x, cond) = least_squares(rows, cols, &a, &b).map_err(|e| match e {
        Error::Singular { cond } => Error::Conditioning { cond, cap: cond_cap },
        other => other,
    })?;
    if cond > cond_cap {
        return Err(Error::Conditioning { cond, cap: cond_cap });
    }
    let mut res = T::zero();
    let mut norm = T::zero();
    for (i, bi) in b.iter().enumerate() {
        let mut acc = C::new(T::zero(), T::zero());
        for (j, xj) in x.iter().enumerate() {
            acc = acc + xj.clone() * a[i * cols + j].clone();
        }
        let r = cabs(&(acc - bi.clone()));
        res = res + r.clone() * r;
        let nb = cabs(bi);
        norm = norm + nb.clone() * nb;
    }
    let fit_residual = res.sqrt().to_f64() / norm.sqrt().to_f64().max(1.0);
    let mut coeffs = BTreeMap::new();
    let mut imag_residue: f64 = 0.0;
    for (j, xj) in x.iter().enumerate() {
        coeffs.insert(j as i64 - width as i64, xj.re.to_f64());
        imag_residue = imag_residue.max(xj.im.to_f64().abs());
    }
    Ok(RowSolve { coeffs, imag_residue, cond, fit_residual })
}

/// `θ = θ′` pairs with `t = b₁(θ)²` log-uniform over `[t_lo, t_hi]`.
pub fn theta_grid(count: usize, t_lo: f64, t_hi: f64) -> Result<Vec<(f64, f64)>> {
    if count == 0 || !(t_lo > 1.0 && t_hi >= t_lo) {
        return Err(Error::Domain(format!("bad theta grid: {count} points over [{t_lo}, {t_hi}]")));
    }
    (0..count)
        .map(|i| {
            let f = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
            let t = t_lo * (t_hi / t_lo).powf(f);
            let th = theta_for_b1(t.sqrt())?;
            Ok((th, th))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionParams {
    /// Support radius `M`.
    pub m: i64,
    /// Imaginary parts `N` of the sample points `1 + iN`, increasing.
    pub ns: Vec<f64>,
    pub richardson_order: usize,
    pub thetas: Vec<(f64, f64)>,
    /// Relative fit residual above which a row carries a warning.
    pub tolerance: f64,
    pub cond_cap: f64,
    #[serde(default)]
    pub extraction: Extraction,
}

impl ReconstructionParams {
    /// `levels` nodes `N₀, 2N₀, 4N₀, …`, order `levels − 1`, and `n_thetas`
    /// angles with `t ∈ [1.5, 6]`.
    pub fn geometric(m: i64, n_base: f64, levels: usize, n_thetas: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Domain("need at least one N level".into()));
        }
        Ok(ReconstructionParams {
            m,
            ns: (0..levels).map(|k| n_base * 2f64.powi(k as i32)).collect(),
            richardson_order: levels - 1,
            thetas: theta_grid(n_thetas, 1.5, 6.0)?,
            tolerance: 1e-2,
            cond_cap: 1e12,
            extraction: Extraction::Ray,
        })
    }

    /// `count` nodes log-uniform in `[n_lo, n_hi]`, extrapolated at order `count − 1`.
    pub fn log_spaced(m: i64, n_lo: f64, n_hi: f64, count: usize, n_thetas: usize) -> Result<Self> {
        if count < 2 || !(n_hi > n_lo) {
            return Err(Error::Domain("need at least two distinct N nodes".into()));
        }
        Ok(ReconstructionParams {
            m,
            ns: (0..count).map(|k| n_lo * (n_hi / n_lo).powf(k as f64 / (count - 1) as f64)).collect(),
            richardson_order: count - 1,
            thetas: theta_grid(n_thetas, 1.5, 6.0)?,
            tolerance: 1e-2,
            cond_cap: 1e12,
            extraction: Extraction::Ray,
        })
    }

    /// Contour extraction on `|z| = radius` with `points` nodes and
    /// `n_thetas` angles with `t ∈ [1.5, 6]`.
    pub fn contour(m: i64, radius: f64, points: usize, n_thetas: usize) -> Result<Self> {
        Ok(ReconstructionParams {
            m,
            ns: Vec::new(),
            richardson_order: 0,
            thetas: theta_grid(n_thetas, 1.5, 6.0)?,
            tolerance: 1e-2,
            cond_cap: 1e12,
            extraction: Extraction::Contour { radius, points },
        })
    }

    /// Smallest `|z|` at which the oracle is queried.
    pub fn min_abs_z(&self) -> f64 {
        match self.extraction {
            Extraction::Ray => self.ns.iter().cloned().fold(f64::INFINITY, f64::min).hypot(1.0),
            Extraction::Contour { radius, .. } => radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 0 {
            return Err(Error::Domain("support radius must be non-negative".into()));
        }
        match self.extraction {
            Extraction::Ray => {
                if self.ns.len() < self.richardson_order + 1 {
                    return Err(Error::InsufficientSamples { need: self.richardson_order + 1, got: self.ns.len() });
                }
                for w in self.ns.windows(2) {
                    if !(w[1] > w[0]) {
                        return Err(Error::Domain("N nodes must increase strictly".into()));
                    }
                }
                for &n in &self.ns {
                    check_ray_point(Complex64::new(1.0, n))?;
                }
            }
            Extraction::Contour { radius, points } => {
                if !(radius.is_finite() && radius >= MIN_ABS_Z) {
                    return Err(Error::Domain(format!("contour radius must be at least {MIN_ABS_Z}, got {radius}")));
                }
                // Powers z^k with |k| ≤ 4M must not alias onto each other.
                let need = (8 * self.m + 2).max(8) as usize;
                if points < need {
                    return Err(Error::InsufficientSamples { need, got: points });
                }
            }
        }
        let need = (2 * self.m + 1) as usize;
        let mut ts: Vec<f64> = Vec::new();
        for &(a, b) in &self.thetas {
            check_theta(a)?;
            check_theta(b)?;
            let t = crate::continuation::theta_constants(a)?.b1 * crate::continuation::theta_constants(b)?.b1;
            if !ts.iter().any(|&u| (u - t).abs() <= 1e-12 * t) {
                ts.push(t);
            }
        }
        if ts.len() < need {
            return Err(Error::InsufficientSamples { need, got: ts.len() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RowReport {
    pub p: i64,
    pub stage: Stage,
    pub values: BTreeMap<i64, f64>,
    pub imag_residue: f64,
    pub cond: f64,
    pub fit_residual: f64,
    /// Largest extrapolation error indicator over the angles, relative to the
    /// largest extracted limit.
    pub extrapolation_error: f64,
    pub warning: Option<String>,
}

fn a1_of<T: Real>(theta: f64) -> T {
    let th = T::from_f64(theta);
    (T::from_i64(2) - (th * T::from_i64(2)).exp()) * T::from_i64(4)
}

fn b1_of<T: Real>(theta: f64) -> T {
    let e2 = (T::from_f64(theta) * T::from_i64(2)).exp();
    e2.clone() / (T::from_i64(2) - e2)
}

#[cfg(feature = "parallel")]
fn map_thetas<R: Send, F>(thetas: &[(f64, f64)], f: F) -> Vec<Result<R>>
where
    F: Fn(f64, f64) -> Result<R> + Sync + Send,
{
    use rayon::prelude::*;
    thetas.par_iter().map(|&(a, b)| f(a, b)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_thetas<R, F>(thetas: &[(f64, f64)], f: F) -> Vec<Result<R>>
where
    F: Fn(f64, f64) -> Result<R>,
{
    thetas.iter().map(|&(a, b)| f(a, b)).collect()
}

/// Oracle samples on the contour, per angle pair and block, shared by all stages.
pub struct ContourSamples<T: Real> {
    pub circle: Circle<T>,
    values: Vec<[Vec<C<T>>; 2]>,
    pairs: Vec<Vec<PhasePair<T>>>,
}

impl<T: Real> ContourSamples<T> {
    pub fn collect<O: BOracle<T> + ?Sized>(oracle: &O, thetas: &[(f64, f64)], radius: f64, points: usize) -> Result<Self> {
        let circle = Circle::<T>::new(radius, points);
        let per_theta = |th: f64, thp: f64| -> Result<([Vec<C<T>>; 2], Vec<PhasePair<T>>)> {
            let mut out = [Vec::with_capacity(points), Vec::with_capacity(points)];
            for (b, block) in [Block::B11, Block::B22].into_iter().enumerate() {
                for j in 0..points {
                    out[b].push(oracle.eval(&circle.node(j), th, thp, block)?);
                }
            }
            let pairs = (0..points)
                .map(|j| PhasePair::new(&circle.node(j), &T::from_f64(th), &T::from_f64(thp)))
                .collect::<Result<Vec<_>>>()?;
            Ok((out, pairs))
        };
        let (values, pairs) = map_thetas(thetas, per_theta).into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
        Ok(ContourSamples { circle, values, pairs })
    }

    pub fn samples(&self, theta_index: usize, block: Block) -> &[C<T>] {
        &self.values[theta_index][match block {
            Block::B11 => 0,
            Block::B22 => 1,
        }]
    }
}

/// Extracted limits `L(θ, θ′)` for one stage, with the matching `t` values.
///
/// On the ray the error indicator is the Richardson one. On the contour it is
/// the largest `|β_k(D)| R^{k−4p}` over `k = 4p+1, …, 4p+4`, in the units of
/// `L`: those coefficients vanish exactly, so anything left measures aliasing,
/// rounding and errors in the known rows.
pub fn stage_limits<T: Real, O: BOracle<T> + ?Sized>(
    p: i64,
    stage: Stage,
    known: &KnownTerms<T>,
    oracle: &O,
    params: &ReconstructionParams,
    contour: Option<&ContourSamples<T>>,
) -> Result<Vec<(T, Extrapolation<T>)>> {
    let block = stage.block();
    match (params.extraction, contour) {
        (Extraction::Ray, _) => {
            let one_theta = |th: f64, thp: f64| -> Result<(T, Extrapolation<T>)> {
                let norm_base = a1_of::<T>(th) * a1_of::<T>(thp);
                let mut samples = Vec::with_capacity(params.ns.len());
                for &n in &params.ns {
                    let zt: C<T> = lift(Complex64::new(1.0, n));
                    let pp = PhasePair::new(&zt, &T::from_f64(th), &T::from_f64(thp))?;
                    let d = oracle.eval(&zt, th, thp, block)? - known.eval_with(&pp)?;
                    let nt = T::from_f64(n);
                    let scale = (nt.powi(4) * norm_base.clone()).powi(p as i32);
                    samples.push((nt, d / scale));
                }
                let ex = richardson_limit(&samples, params.richardson_order)?;
                Ok((b1_of::<T>(th) * b1_of::<T>(thp), ex))
            };
            map_thetas(&params.thetas, one_theta).into_iter().collect()
        }
        (Extraction::Contour { .. }, Some(cs)) => {
            let indexed: Vec<(f64, f64)> = (0..params.thetas.len()).map(|i| (i as f64, 0.0)).collect();
            let one_theta = |i: f64, _: f64| -> Result<(T, Extrapolation<T>)> {
                let i = i as usize;
                let (th, thp) = params.thetas[i];
                let circle = &cs.circle;
                let mut d = Vec::with_capacity(circle.len());
                for (b, pp) in cs.samples(i, block).iter().zip(&cs.pairs[i]) {
                    d.push(b.clone() - known.eval_with(pp)?);
                }
                let norm = (a1_of::<T>(th) * a1_of::<T>(thp)).powi(p as i32);
                let k = 4 * p;
                let value = circle.coefficient(&d, k) / norm.clone();
                let mut error: f64 = 0.0;
                for extra in 1..=4 {
                    let c = circle.coefficient(&d, k + extra) * circle.radius.powi(extra as i32) / norm.clone();
                    error = error.max(cabs(&c).to_f64());
                }
                Ok((b1_of::<T>(th) * b1_of::<T>(thp), Extrapolation { value, error }))
            };
            map_thetas(&indexed, one_theta).into_iter().collect()
        }
        (Extraction::Contour { .. }, None) => Err(Error::Domain("contour extraction needs collected samples".into())),
    }
}

/// Runs stage `(p, stage)` and commits the recovered row into `state`.
pub fn recover_row<T: Real, O: BOracle<T> + ?Sized>(
    p: i64,
    stage: Stage,
    state: &mut Recovered,
    oracle: &O,
    params: &ReconstructionParams,
    powers: Arc<RPowers<T>>,
    contour: Option<&ContourSamples<T>>,
) -> Result<RowReport> {
    let known = KnownTerms::new(state, p, stage, powers)?;
    let limits = stage_limits(p, stage, &known, oracle, params, contour)?;
    let width = (params.m - p.abs()).max(0) as usize;
    let tvals: Vec<T> = limits.iter().map(|(t, _)| t.clone()).collect();
    let sums: Vec<C<T>> = limits.iter().map(|(_, e)| e.value.clone()).collect();
    let solved = solve_row(&tvals, &sums, width, params.cond_cap)?;
    let scale = sums.iter().map(|s| cabs(s).to_f64()).fold(0.0, f64::max).max(1.0);
    let extrapolation_error = limits.iter().map(|(_, e)| e.error).fold(0.0, f64::max) / scale;
    let warning = if solved.fit_residual > params.tolerance {
        Some(format!("row fit residual {:.3e} exceeds tolerance {:.1e}", solved.fit_residual, params.tolerance))
    } else {
        None
    };
    state.commit(p, stage, &solved.coeffs)?;
    Ok(RowReport {
        p,
        stage,
        values: solved.coeffs,
        imag_residue: solved.imag_residue,
        cond: solved.cond,
        fit_residual: solved.fit_residual,
        extrapolation_error,
        warning,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Failure {
    pub p: i64,
    pub stage: Stage,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub field: PotentialField,
    pub rows: Vec<RowReport>,
    pub failure: Option<Failure>,
}

impl Reconstruction {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }
}

/// Full induction `p = M, …, −M`, `Q2` then `Q1` on each row. A failing stage
/// stops the run; rows recovered so far stay in the returned report.
pub fn reconstruct<T: Real, O: BOracle<T> + ?Sized>(oracle: &O, params: &ReconstructionParams) -> Result<Reconstruction> {
    params.validate()?;
    let powers = Arc::new(shared_powers::<T>(params.m, params.min_abs_z()));
    let contour = match params.extraction {
        Extraction::Contour { radius, points } => Some(ContourSamples::collect(oracle, &params.thetas, radius, points)?),
        Extraction::Ray => None,
    };
    let mut state = Recovered::start(params.m);
    let mut rows = Vec::new();
    while let Some((p, stage)) = state.next {
        match recover_row(p, stage, &mut state, oracle, params, powers.clone(), contour.as_ref()) {
            Ok(r) => rows.push(r),
            Err(e) => {
                return Ok(Reconstruction {
                    field: state.field,
                    rows,
                    failure: Some(Failure { p, stage, message: e.to_string() }),
                })
            }
        }
    }
    Ok(Reconstruction { field: state.field, rows, failure: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn richardson_linear_and_quadratic() {
        let s = vec![(100.0, c(5.0 + 3.0 / 100.0)), (200.0, c(5.0 + 3.0 / 200.0))];
        let e = richardson_limit(&s, 1).unwrap();
        assert!((e.value - c(5.0)).norm() < 1e-13);
        let f = |n: f64| c(1.5 - 2.0 / n + 7.0 / (n * n));
        let s: Vec<_> = [10.0, 20.0, 40.0].iter().map(|&n| (n, f(n))).collect();
        let e = richardson_limit(&s, 2).unwrap();
        assert!((e.value - c(1.5)).norm() < 1e-12);
        assert!(matches!(richardson_limit(&s, 3), Err(Error::InsufficientSamples { need: 4, got: 3 })));
    }

    #[test]
    fn richardson_uses_largest_nodes() {
        let f = |n: f64| c(2.0 + 1.0 / n);
        let s: Vec<_> = [1.0, 1000.0, 10.0, 100.0].iter().map(|&n| (n, f(n))).collect();
        let e = richardson_limit(&s, 1).unwrap();
        assert!((e.value - c(2.0)).norm() < 1e-13);
        // First-order estimate against the raw value at N = 1000.
        assert!((e.error - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn solve_row_example() {
        let t = [1.2, 1.5, 2.0];
        let sums: Vec<Complex64> = t.iter().map(|&t| c(2.0 / t - 1.0 + 0.5 * t)).collect();
        assert!((sums[0].re - 1.26667).abs() < 1e-5);
        assert!((sums[1].re - 1.08333).abs() < 1e-5);
        assert!((sums[2].re - 1.0).abs() < 1e-12);
        let r = solve_row(&t, &sums, 1, 1e12).unwrap();
        assert!((r.coeffs[&-1] - 2.0).abs() < 1e-12);
        assert!((r.coeffs[&0] + 1.0).abs() < 1e-12);
        assert!((r.coeffs[&1] - 0.5).abs() < 1e-12);
        let z = solve_row(&t, &[c(0.0); 3], 1, 1e12).unwrap();
        assert!(z.coeffs.values().all(|&v| v == 0.0));
        let one = solve_row(&[3.0], &[c(4.25)], 0, 1e12).unwrap();
        assert_eq!(one.coeffs[&0], 4.25);
    }

    #[test]
    fn solve_row_rejects_bad_input() {
        assert!(solve_row(&[1.5, 1.5, 2.0], &[c(0.0); 3], 1, 1e12).is_err());
        assert!(matches!(solve_row(&[1.5, 2.0], &[c(0.0); 2], 1, 1e12), Err(Error::InsufficientSamples { .. })));
        let t = [1.0, 1.0 + 1e-9, 1.0 + 2e-9];
        assert!(matches!(solve_row(&t, &[c(1.0); 3], 1, 1e6), Err(Error::Conditioning { .. })));
    }

    #[test]
    fn theta_grid_spans_t_range() {
        let g = theta_grid(5, 1.5, 6.0).unwrap();
        let t: Vec<f64> = g.iter().map(|&(a, b)| b1_of::<f64>(a) * b1_of::<f64>(b)).collect();
        assert!((t[0] - 1.5).abs() < 1e-12 && (t[4] - 6.0).abs() < 1e-12);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn zero_oracle_gives_zero_field() {
        let params = ReconstructionParams::geometric(1, 1000.0, 3, 3).unwrap();
        let r = reconstruct::<f64, _>(&ZeroOracle, &params).unwrap();
        assert!(r.is_complete());
        assert!(r.field.iter().all(|(_, (a, b))| a == 0.0 && b == 0.0));
        assert_eq!(r.rows.len(), 6);
    }

    #[test]
    fn circle_picks_laurent_coefficients() {
        let circle = Circle::<f64>::new(4.0, 8);
        let f = |z: Complex64| 3.0 * z * z - 2.0 + 5.0 / z;
        let samples: Vec<Complex64> = (0..8).map(|j| f(circle.node(j))).collect();
        for (k, want) in [(2, 3.0), (0, -2.0), (-1, 5.0), (1, 0.0), (-3, 0.0)] {
            assert!((circle.coefficient(&samples, k) - c(want)).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn contour_zero_oracle_gives_zero_field() {
        let params = ReconstructionParams::contour(1, 8.0, 16, 3).unwrap();
        let r = reconstruct::<f64, _>(&ZeroOracle, &params).unwrap();
        assert!(r.is_complete());
        assert!(r.field.iter().all(|(_, (a, b))| a == 0.0 && b == 0.0));
    }

    #[test]
    fn contour_params_are_checked() {
        assert!(ReconstructionParams::contour(2, 3.0, 64, 9).unwrap().validate().is_err());
        assert!(matches!(
            ReconstructionParams::contour(2, 8.0, 12, 9).unwrap().validate(),
            Err(Error::InsufficientSamples { need: 18, got: 12 })
        ));
    }
}
