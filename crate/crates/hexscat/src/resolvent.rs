//! Free resolvent coefficients `⟨P(n)|R̂₀(z)|P(0)⟩` by torus quadrature and by
//! the Neumann series in `z⁻²`, full and truncated resolvent blocks on a finite
//! support, and decay-exponent probes along `z = 1 + iN`.
//!
//! Convention: `R₀(z,ξ) = (H₀(ξ) − z)⁻¹ = −(z² − r(ξ))⁻¹ [[z, α], [ᾱ, z]]`, and
//! lattice coefficients are plain Fourier coefficients
//! `(2π)⁻² ∫ R₀(z,ξ) e^{−in·ξ} dξ`, so that the diagonal tends to `−1/z`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{dist, Dist, Site};
use crate::linalg::{Dense, Lu};
use crate::real::{cabs, cpowi, lift, Real, C};
use crate::spectral::PotentialField;
use crate::torus::{alpha, alpha_bar, r};

/// 2×2 complex block, `m[i][j]` with `i, j ∈ {0, 1}` for components 1, 2.
pub type Mat2<T> = [[C<T>; 2]; 2];

pub fn mat2_zero<T: Real>() -> Mat2<T> {
    [[C::zero(), C::zero()], [C::zero(), C::zero()]]
}

fn mat2_lower<T: Real>(m: &Mat2<T>) -> Mat2<f64> {
    let l = |z: &C<T>| Complex64::new(z.re.to_f64(), z.im.to_f64());
    [[l(&m[0][0]), l(&m[0][1])], [l(&m[1][0]), l(&m[1][1])]]
}

pub fn mat2_dist(a: &Mat2<f64>, b: &Mat2<f64>) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            d = d.max((a[i][j] - b[i][j]).norm());
        }
    }
    d
}

/// Admissible spectral parameter: off the real axis, or real outside `[-3, 3]`.
pub fn check_admissible(z: Complex64) -> Result<()> {
    if z.im != 0.0 || z.re.abs() > 3.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("z = {z} lies on the spectrum [-3, 3]")))
    }
}

/// Uniform `k × k` trapezoidal quadrature of `R₀(z,ξ) e^{−in·ξ}`.
pub fn r0_quad(z: Complex64, n: Site, k: usize) -> Result<Mat2<f64>> {
    check_admissible(z)?;
    if k < 8 {
        return Err(Error::Domain("quadrature grid must be at least 8".into()));
    }
    let h = 2.0 * PI / k as f64;
    let z2 = z * z;
    let mut acc = [[Complex64::zero(); 2]; 2];
    for i in 0..k {
        let x1 = i as f64 * h;
        let mut row = [[Complex64::zero(); 2]; 2];
        for j in 0..k {
            let x2 = j as f64 * h;
            let rr = 3.0 + 2.0 * x1.cos() + 2.0 * x2.cos() + 2.0 * (x1 - x2).cos();
            let den = z2 - rr;
            if den.norm() < 1e-300 {
                return Err(Error::SingularDenominator);
            }
            let a = Complex64::new(1.0 + x1.cos() + x2.cos(), x1.sin() + x2.sin());
            let ph = Complex64::from_polar(1.0, -(n.n1 as f64 * x1 + n.n2 as f64 * x2));
            let f = -ph / den;
            row[0][0] += f * z;
            row[0][1] += f * a;
            row[1][0] += f * a.conj();
        }
        for a in 0..2 {
            for b in 0..2 {
                acc[a][b] += row[a][b];
            }
        }
    }
    let w = 1.0 / (k * k) as f64;
    acc[1][1] = acc[0][0];
    for row in acc.iter_mut() {
        for v in row.iter_mut() {
            *v *= w;
        }
    }
    Ok(acc)
}

/// Quadrature with grid doubling until successive values differ by at most `tol`.
/// Returns the value and the grid size used.
pub fn r0_quad_auto(z: Complex64, n: Site, tol: f64) -> Result<(Mat2<f64>, usize)> {
    let mut k = 32;
    let mut prev = r0_quad(z, n, k)?;
    loop {
        k *= 2;
        let cur = r0_quad(z, n, k)?;
        if mat2_dist(&cur, &prev) <= tol || k >= 4096 {
            return Ok((cur, k));
        }
        prev = cur;
    }
}

/// Neumann-series evaluation from exact Fourier coefficients of `rˢ`, `rˢα`, `rˢᾱ`.
pub fn r0_series(z: Complex64, n: Site, smax: u32) -> Result<Mat2<f64>> {
    if z.norm() <= 3.0 {
        return Err(Error::NoConvergence { abs_z: z.norm() });
    }
    let (a, ab, rr) = (alpha(), alpha_bar(), r());
    let mut rs = crate::torus::TrigPoly::constant(1);
    let zi2 = 1.0 / (z * z);
    let mut zp = 1.0 / z;
    let mut out = [[Complex64::zero(); 2]; 2];
    for _ in 0..=smax {
        let cd = rs.coeff(n).re as f64;
        let c12 = rs.mul(&a).coeff(n).re as f64;
        let c21 = rs.mul(&ab).coeff(n).re as f64;
        out[0][0] -= cd * zp;
        out[0][1] -= c12 * zp / z;
        out[1][0] -= c21 * zp / z;
        rs = rs.mul(&rr);
        zp *= zi2;
    }
    out[1][1] = out[0][0];
    Ok(out)
}

/// Number of series terms that brings the geometric tail bound
/// `(9/|z|²)^{S+1} / (|z|(1 − 9/|z|²))` below `tol`.
pub fn series_terms_needed(abs_z: f64, tol: f64) -> u32 {
    let rho = 9.0 / (abs_z * abs_z);
    assert!(rho < 1.0, "series needs |z| > 3");
    let mut s = 0u32;
    let mut tail = rho / (abs_z * (1.0 - rho));
    while tail > tol && s < 100_000 {
        s += 1;
        tail *= rho;
    }
    s
}

/// Fourier coefficients `c_s(n)` of `rˢ` in the backend type, on the box
/// `|n|∞ ≤ radius`, for `s ≤ smax`.
pub struct RPowers<T: Real> {
    radius: i64,
    smax: usize,
    /// `coef[s][idx(n)]`
    coef: Vec<Vec<T>>,
}

impl<T: Real> RPowers<T> {
    pub fn new(radius: i64, smax: usize) -> Self {
        let top = radius + smax as i64;
        let side = (2 * top + 1) as usize;
        let at = |a: i64, b: i64| ((a + top) as usize) * side + (b + top) as usize;
        let rr: Vec<(Site, i64)> = r().support().map(|(&k, c)| (k, c.re as i64)).collect();
        let mut cur = vec![T::zero(); side * side];
        cur[at(0, 0)] = T::one();
        let w = (2 * radius + 1) as usize;
        let mut coef = Vec::with_capacity(smax + 1);
        let extract = |full: &Vec<T>| {
            let mut v = Vec::with_capacity(w * w);
            for a in -radius..=radius {
                for b in -radius..=radius {
                    v.push(full[at(a, b)].clone());
                }
            }
            v
        };
        coef.push(extract(&cur));
        for s in 1..=smax {
            // c_s is supported in d ≤ s, and only |n|∞ ≤ radius + smax − s is needed later.
            let reach = (s as i64).min(radius + (smax - s) as i64);
            let mut next = vec![T::zero(); side * side];
            for a in -reach..=reach {
                for b in -reach..=reach {
                    if dist(Dist::D, Site::new(a, b)) > s as i64 {
                        continue;
                    }
                    let mut acc = T::zero();
                    for (k, c) in &rr {
                        let (x, y) = (a - k.n1, b - k.n2);
                        if x.abs() > top || y.abs() > top {
                            continue;
                        }
                        let v = &cur[at(x, y)];
                        if !v.is_zero() {
                            acc = acc + v.clone() * T::from_i64(*c);
                        }
                    }
                    next[at(a, b)] = acc;
                }
            }
            cur = next;
            coef.push(extract(&cur));
        }
        RPowers { radius, smax, coef }
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn smax(&self) -> usize {
        self.smax
    }

    pub fn get(&self, s: usize, n: Site) -> T {
        if n.linf() > self.radius {
            return T::zero();
        }
        let w = (2 * self.radius + 1) as usize;
        self.coef[s][((n.n1 + self.radius) as usize) * w + (n.n2 + self.radius) as usize].clone()
    }
}

/// Free resolvent coefficients at a fixed spectral parameter, memoized by displacement.
pub struct FreeResolvent<'a, T: Real> {
    z: C<T>,
    powers: &'a RPowers<T>,
    terms: usize,
    cache: HashMap<Site, Mat2<T>>,
}

impl<'a, T: Real> FreeResolvent<'a, T> {
    /// Uses the series with as many terms as the tail bound requires for the
    /// backend precision.
    pub fn new(z: C<T>, powers: &'a RPowers<T>) -> Result<Self> {
        let az = cabs(&z).to_f64();
        if az <= 3.0 {
            return Err(Error::NoConvergence { abs_z: az });
        }
        let tol = T::epsilon().to_f64() * 1e-3 / az;
        let terms = series_terms_needed(az, tol) as usize;
        if terms > powers.smax() {
            return Err(Error::Domain(format!(
                "power table holds {} terms, {} needed at |z| = {az}",
                powers.smax(),
                terms
            )));
        }
        Ok(FreeResolvent { z, powers, terms, cache: HashMap::new() })
    }

    pub fn z(&self) -> &C<T> {
        &self.z
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn coeff(&mut self, n: Site) -> Mat2<T> {
        if let Some(m) = self.cache.get(&n) {
            return m.clone();
        }
        let m = self.compute(n);
        self.cache.insert(n, m.clone());
        m
    }

    fn compute(&self, n: Site) -> Mat2<T> {
        assert!(n.linf() < self.powers.radius(), "displacement outside the power table");
        let e1 = Site::new(1, 0);
        let e2 = Site::new(0, 1);
        let w = C::new(T::one(), T::zero()) / (self.z.clone() * self.z.clone());
        // Horner in w = z⁻², highest order first.
        let mut d = C::<T>::zero();
        let mut o12 = C::<T>::zero();
        let mut o21 = C::<T>::zero();
        let p = self.powers;
        for s in (0..=self.terms).rev() {
            let cd = p.get(s, n);
            let c12 = cd.clone() + p.get(s, n - e1) + p.get(s, n - e2);
            let c21 = cd.clone() + p.get(s, n + e1) + p.get(s, n + e2);
            d = d * w.clone() + C::new(cd, T::zero());
            o12 = o12 * w.clone() + C::new(c12, T::zero());
            o21 = o21 * w.clone() + C::new(c21, T::zero());
        }
        let zi = C::new(T::one(), T::zero()) / self.z.clone();
        let diag = -(d * zi.clone());
        let o12 = -(o12 * zi.clone() * zi.clone());
        let o21 = -(o21 * zi.clone() * zi);
        [[diag.clone(), o12], [o21, diag]]
    }
}

/// `⟨P(n)|R̂(z)|P(m)⟩` for `n, m` in a finite site list.
#[derive(Debug, Clone)]
pub struct ResolventBlock<T: Real> {
    pub sites: Vec<Site>,
    /// `x[i * len + j]` is the block for `(sites[i], sites[j])`.
    pub x: Vec<Mat2<T>>,
    pub pivot_ratio: f64,
}

impl<T: Real> ResolventBlock<T> {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn index(&self, n: Site) -> Option<usize> {
        self.sites.iter().position(|&s| s == n)
    }

    pub fn get(&self, i: usize, j: usize) -> &Mat2<T> {
        &self.x[i * self.sites.len() + j]
    }

    pub fn entry(&self, n: Site, m: Site) -> Option<Mat2<f64>> {
        Some(mat2_lower(self.get(self.index(n)?, self.index(m)?)))
    }
}

/// Free blocks `G₀(n, m) = r̂₀(z, n − m)` on a site list.
pub fn free_block<T: Real>(g: &mut FreeResolvent<'_, T>, sites: &[Site]) -> Vec<Mat2<T>> {
    let mut out = Vec::with_capacity(sites.len() * sites.len());
    for &n in sites {
        for &m in sites {
            out.push(g.coeff(n - m));
        }
    }
    out
}

fn q_diag<T: Real>(q: &PotentialField, n: Site) -> [T; 2] {
    let (a, b) = q.get(n);
    [T::from_f64(a), T::from_f64(b)]
}

/// Solves `(I + G₀Q) X = G₀` on `supp q`.
pub fn resolvent_from_g0<T: Real>(q: &PotentialField, sites: &[Site], g0: &[Mat2<T>]) -> Result<ResolventBlock<T>> {
    let s = sites.len();
    let dim = 2 * s;
    let qv: Vec<[T; 2]> = sites.iter().map(|&n| q_diag::<T>(q, n)).collect();
    let mut a = Dense::<T>::identity(dim);
    let mut b = Dense::<T>::zeros(dim);
    for i in 0..s {
        for j in 0..s {
            let g = &g0[i * s + j];
            for u in 0..2 {
                for v in 0..2 {
                    *b.at_mut(2 * i + u, 2 * j + v) = g[u][v].clone();
                    let add = g[u][v].clone() * qv[j][v].clone();
                    *a.at_mut(2 * i + u, 2 * j + v) = a.at(2 * i + u, 2 * j + v).clone() + add;
                }
            }
        }
    }
    let lu = Lu::factor(a)?;
    let xm = lu.solve_mat(&b);
    let mut x = Vec::with_capacity(s * s);
    for i in 0..s {
        for j in 0..s {
            x.push([
                [xm.at(2 * i, 2 * j).clone(), xm.at(2 * i, 2 * j + 1).clone()],
                [xm.at(2 * i + 1, 2 * j).clone(), xm.at(2 * i + 1, 2 * j + 1).clone()],
            ]);
        }
    }
    Ok(ResolventBlock { sites: sites.to_vec(), x, pivot_ratio: lu.pivot_ratio })
}

/// Full resolvent block on `supp q`.
pub fn full_resolvent_block<T: Real>(q: &PotentialField, g: &mut FreeResolvent<'_, T>) -> Result<ResolventBlock<T>> {
    let sites = q.support();
    let g0 = free_block(g, &sites);
    resolvent_from_g0(q, &sites, &g0)
}

/// Resolvent block for `q_(>r,>s)`.
pub fn truncated_resolvent_block<T: Real>(
    q: &PotentialField,
    r: i64,
    s: i64,
    g: &mut FreeResolvent<'_, T>,
) -> Result<ResolventBlock<T>> {
    full_resolvent_block(&q.truncate(r, s), g)
}

/// `‖X − G₀ + G₀QX‖∞` for a block computed on `supp q`.
pub fn identity_residual<T: Real>(q: &PotentialField, g: &mut FreeResolvent<'_, T>, blk: &ResolventBlock<T>) -> f64 {
    let sites = &blk.sites;
    let s = sites.len();
    let g0 = free_block(g, sites);
    let qv: Vec<[T; 2]> = sites.iter().map(|&n| q_diag::<T>(q, n)).collect();
    let mut worst = 0.0f64;
    for i in 0..s {
        for j in 0..s {
            for u in 0..2 {
                for v in 0..2 {
                    let mut acc = blk.get(i, j)[u][v].clone() - g0[i * s + j][u][v].clone();
                    for k in 0..s {
                        for w in 0..2 {
                            let t = g0[i * s + k][u][w].clone() * qv[k][w].clone() * blk.get(k, j)[w][v].clone();
                            acc = acc + t;
                        }
                    }
                    worst = worst.max(cabs(&acc).to_f64());
                }
            }
        }
    }
    worst
}

/// Power table large enough for the given support radius and `|z| ≥ min_abs_z`.
pub fn powers_for<T: Real>(support_radius: i64, min_abs_z: f64) -> RPowers<T> {
    let tol = T::epsilon().to_f64() * 1e-3 / min_abs_z;
    let terms = series_terms_needed(min_abs_z, tol) as usize;
    RPowers::new(2 * support_radius + 2, terms)
}

/// Free-resolvent coefficient in f64, by series when `|z|` is large, by
/// quadrature otherwise.
pub fn r0_auto(z: Complex64, n: Site) -> Result<Mat2<f64>> {
    if z.norm() > 6.0 {
        let s = series_terms_needed(z.norm(), 1e-18).max(dist(Dist::D, n) as u32 + 1);
        r0_series(z, n, s)
    } else {
        r0_quad_auto(z, n, 1e-13).map(|(m, _)| m)
    }
}

/// One fitted decay exponent.
#[derive(Debug, Clone)]
pub struct DecayFit {
    pub n: Site,
    pub m: Site,
    /// Component pair `(i, j)`, 1-based.
    pub entry: (usize, usize),
    /// `None` when the entry vanishes identically on the probe.
    pub slope: Option<f64>,
    pub target: f64,
}

/// Least-squares slope of `log|x|` against `log N`.
pub fn loglog_slope(ns: &[f64], vals: &[f64]) -> Option<f64> {
    if vals.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        return None;
    }
    let xs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let ys: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

/// Fits decay slopes of `⟨P(n)|R̂(1+iN)|P(m)⟩` entries along the ray, for the
/// potential `q` (possibly zero). The target is `−(2d+1)` on the diagonal and
/// `−(2d_ij+2)` off it.
pub fn decay_probe<T: Real>(q: &PotentialField, pairs: &[(Site, Site)], ns: &[f64]) -> Result<Vec<DecayFit>> {
    if ns.len() < 4 || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("need at least 4 increasing N values".into()));
    }
    let mut sites = q.support();
    for &(n, m) in pairs {
        for s in [n, m] {
            if !sites.contains(&s) {
                sites.push(s);
            }
        }
    }
    let radius = sites.iter().map(|s| s.linf()).max().unwrap_or(0);
    let powers = powers_for::<T>(radius, ns[0]);
    let mut vals: Vec<Vec<[[f64; 2]; 2]>> = vec![Vec::new(); pairs.len()];
    for &nn in ns {
        let z = C::new(T::one(), T::from_f64(nn));
        let mut g = FreeResolvent::new(z, &powers)?;
        let g0 = free_block(&mut g, &sites);
        let blk = resolvent_from_g0(q, &sites, &g0)?;
        for (k, &(n, m)) in pairs.iter().enumerate() {
            let e = blk.entry(n, m).expect("site present");
            vals[k].push([[e[0][0].norm(), e[0][1].norm()], [e[1][0].norm(), e[1][1].norm()]]);
        }
    }
    let mut out = Vec::new();
    for (k, &(n, m)) in pairs.iter().enumerate() {
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let series: Vec<f64> = vals[k].iter().map(|v| v[i - 1][j - 1]).collect();
            let d = dist(Dist::for_block(i, j), n - m) as f64;
            let target = if i == j { -(2.0 * d + 1.0) } else { -(2.0 * d + 2.0) };
            out.push(DecayFit { n, m, entry: (i, j), slope: loglog_slope(ns, &series), target });
        }
    }
    Ok(out)
}

/// Lifts an f64 spectral parameter into the backend.
pub fn spectral_point<T: Real>(z: Complex64) -> C<T> {
    lift(z)
}

/// `z^k` helper re-exported for callers assembling series by hand.
pub fn zpow<T: Real>(z: &C<T>, k: i32) -> C<T> {
    cpowi(z, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Mp256;

    #[test]
    fn quadrature_matches_series_at_10i() {
        let z = Complex64::new(0.0, 10.0);
        let (q, _) = r0_quad_auto(z, Site::ORIGIN, 1e-13).unwrap();
        let s = r0_series(z, Site::ORIGIN, 20).unwrap();
        assert!(mat2_dist(&q, &s) < 1e-10);
        assert!((q[0][0].im - 0.0971).abs() < 5e-5, "{}", q[0][0]);
    }

    #[test]
    fn series_vanishes_beyond_reach() {
        let z = Complex64::new(1.0, 40.0);
        let s = r0_series(z, Site::new(4, 0), 3).unwrap();
        assert_eq!(s[0][0], Complex64::zero());
    }

    #[test]
    fn leading_term_is_minus_one_over_z() {
        let z = Complex64::new(0.0, 1e4);
        let s = r0_series(z, Site::ORIGIN, 4).unwrap();
        assert!((s[0][0] * z + 1.0).norm() < 1e-7);
    }

    #[test]
    fn terms_needed_at_twenty() {
        let s = series_terms_needed(20.0, 1e-12);
        let rho: f64 = 9.0 / 400.0;
        assert!(rho.powi(s as i32 + 1) / 20.0 / (1.0 - rho) <= 1e-12);
        assert!(rho.powi(s as i32) / 20.0 / (1.0 - rho) > 1e-12);
    }

    #[test]
    fn power_table_matches_exact_polynomials() {
        let p = RPowers::<f64>::new(3, 6);
        let rr = r();
        for s in 0..=6 {
            let exact = rr.pow(s as u32);
            for a in -3..=3 {
                for b in -3..=3 {
                    let n = Site::new(a, b);
                    assert_eq!(p.get(s, n), exact.coeff(n).re as f64, "s={s} n={n:?}");
                }
            }
        }
    }

    #[test]
    fn backend_series_matches_exact_series() {
        let z = Complex64::new(1.0, 20.0);
        let p = powers_for::<Mp256>(2, 20.0);
        let mut g = FreeResolvent::new(lift::<Mp256>(z), &p).unwrap();
        for n in [Site::ORIGIN, Site::new(1, -2), Site::new(-3, 1)] {
            let a = mat2_lower(&g.coeff(n));
            let b = r0_series(z, n, 40).unwrap();
            assert!(mat2_dist(&a, &b) < 1e-15);
        }
    }

    #[test]
    fn zero_potential_block_is_free() {
        let q = PotentialField::from_sites(1, &[((0, 0), 1.0, 0.0)]).unwrap();
        let p = powers_for::<f64>(1, 20.0);
        let mut g = FreeResolvent::new(Complex64::new(1.0, 20.0), &p).unwrap();
        let zero = PotentialField::new(1);
        let sites = q.support();
        let g0 = free_block(&mut g, &sites);
        let blk = resolvent_from_g0(&zero, &sites, &g0).unwrap();
        assert!(mat2_dist(&mat2_lower(blk.get(0, 0)), &mat2_lower(&g0[0])) == 0.0);
        let full = full_resolvent_block(&q, &mut g).unwrap();
        assert!(identity_residual(&q, &mut g, &full) < 1e-15);
    }
}
