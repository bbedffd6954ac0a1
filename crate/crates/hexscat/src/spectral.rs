//! The free operator Ĥ₀, its symbol, and the potential container.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Site;

/// Finitely supported two-component lattice function.
pub type LatticeField2 = BTreeMap<Site, (Complex64, Complex64)>;

/// Ĥ₀ on a two-component field:
/// `(Ĥ₀f)₁(m) = f₂(m) + f₂(m₁−1,m₂) + f₂(m₁,m₂−1)`,
/// `(Ĥ₀f)₂(m) = f₁(m) + f₁(m₁+1,m₂) + f₁(m₁,m₂+1)`.
pub fn apply_h0(f: &LatticeField2) -> LatticeField2 {
    let zero = Complex64::new(0.0, 0.0);
    let mut out: LatticeField2 = BTreeMap::new();
    let e1 = Site::new(1, 0);
    let e2 = Site::new(0, 1);
    for (&k, &(f1, f2)) in f {
        // f₂ at k feeds component 1 at k, k+e1, k+e2.
        if f2 != zero {
            for m in [k, k + e1, k + e2] {
                out.entry(m).or_insert((zero, zero)).0 += f2;
            }
        }
        // f₁ at k feeds component 2 at k, k-e1, k-e2.
        if f1 != zero {
            for m in [k, k - e1, k - e2] {
                out.entry(m).or_insert((zero, zero)).1 += f1;
            }
        }
    }
    out.retain(|_, v| v.0 != zero || v.1 != zero);
    out
}

/// `p(ξ)² = 3 + 2cos ξ₁ + 2cos ξ₂ + 2cos(ξ₁−ξ₂)`.
pub fn p_squared(xi: (f64, f64)) -> f64 {
    let (a, b) = xi;
    3.0 + 2.0 * a.cos() + 2.0 * b.cos() + 2.0 * (a - b).cos()
}

pub fn p_of(xi: (f64, f64)) -> f64 {
    p_squared(xi).max(0.0).sqrt()
}

/// Gradient of `p`; undefined where `p = 0`.
pub fn grad_p(xi: (f64, f64)) -> Result<(f64, f64)> {
    let p = p_of(xi);
    if p < 1e-12 {
        return Err(Error::Domain(format!("grad p undefined at Dirac point ({}, {})", xi.0, xi.1)));
    }
    let (a, b) = xi;
    Ok(((-a.sin() - (a - b).sin()) / p, (-b.sin() + (a - b).sin()) / p))
}

#[derive(Debug, Clone)]
pub struct SpecialSets {
    pub dirac_points: [(f64, f64); 2],
    pub critical_points: [(f64, f64); 4],
}

impl SpecialSets {
    /// Membership in the level set `p = 1`.
    pub fn on_level_one(&self, xi: (f64, f64), tol: f64) -> bool {
        (p_of(xi) - 1.0).abs() <= tol
    }
}

pub fn special_sets() -> SpecialSets {
    let t = 2.0 * PI / 3.0;
    SpecialSets {
        dirac_points: [(t, -t), (-t, t)],
        critical_points: [(0.0, 0.0), (0.0, -PI), (-PI, 0.0), (-PI, -PI)],
    }
}

/// Real diagonal potential `q̂(n) = diag(q₁(n), q₂(n))` inside the l¹ ball of radius `M`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PotentialField {
    m: i64,
    entries: BTreeMap<Site, (f64, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiteRecord {
    n1: i64,
    n2: i64,
    q1: f64,
    q2: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialFile {
    #[serde(rename = "M")]
    m: i64,
    sites: Vec<SiteRecord>,
}

impl PotentialField {
    pub fn new(m: i64) -> Self {
        assert!(m >= 0, "support radius must be nonnegative");
        PotentialField { m, entries: BTreeMap::new() }
    }

    pub fn radius(&self) -> i64 {
        self.m
    }

    pub fn set(&mut self, n: Site, q1: f64, q2: f64) -> Result<()> {
        if n.l1() > self.m {
            return Err(Error::SupportRadius { site: n, m: self.m });
        }
        if !q1.is_finite() || !q2.is_finite() {
            return Err(Error::NonFinite(n));
        }
        if q1 == 0.0 && q2 == 0.0 {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, (q1, q2));
        }
        Ok(())
    }

    pub fn from_sites(m: i64, sites: &[((i64, i64), f64, f64)]) -> Result<Self> {
        let mut q = PotentialField::new(m);
        for &((a, b), q1, q2) in sites {
            q.set(Site::new(a, b), q1, q2)?;
        }
        Ok(q)
    }

    pub fn get(&self, n: Site) -> (f64, f64) {
        self.entries.get(&n).copied().unwrap_or((0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, (f64, f64))> + '_ {
        self.entries.iter().map(|(&n, &v)| (n, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sites carrying a nonzero value, in lattice order.
    pub fn support(&self) -> Vec<Site> {
        self.entries.keys().copied().collect()
    }

    /// `{n₁ ↦ q_comp(n₁, p)}` over the nonzero entries of row `n₂ = p`.
    pub fn row(&self, p: i64, comp: u8) -> BTreeMap<i64, f64> {
        self.entries
            .iter()
            .filter(|(n, _)| n.n2 == p)
            .map(|(n, &(q1, q2))| (n.n1, if comp == 1 { q1 } else { q2 }))
            .filter(|&(_, v)| v != 0.0)
            .collect()
    }

    /// `q_(>r,>s)`: keeps `q₁` on rows `n₂ > r` and `q₂` on rows `n₂ > s`.
    pub fn truncate(&self, r: i64, s: i64) -> PotentialField {
        let mut out = PotentialField::new(self.m);
        for (&n, &(q1, q2)) in &self.entries {
            let a = if n.n2 > r { q1 } else { 0.0 };
            let b = if n.n2 > s { q2 } else { 0.0 };
            out.set(n, a, b).expect("subset of a valid field");
        }
        out
    }

    pub fn scaled(&self, c: f64) -> PotentialField {
        let mut out = PotentialField::new(self.m);
        for (&n, &(q1, q2)) in &self.entries {
            out.set(n, c * q1, c * q2).expect("scaling keeps support");
        }
        out
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &PotentialField) -> f64 {
        let mut sites: Vec<Site> = self.support();
        sites.extend(other.support());
        sites
            .into_iter()
            .map(|n| {
                let (a1, a2) = self.get(n);
                let (b1, b2) = other.get(n);
                (a1 - b1).abs().max((a2 - b2).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Integer values uniform in `[-3, 3]` on every site of the l¹ ball.
    pub fn random(m: i64, seed: u64) -> PotentialField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut q = PotentialField::new(m);
        for n2 in -m..=m {
            let w = m - n2.abs();
            for n1 in -w..=w {
                let q1 = rng.gen_range(-3i64..=3) as f64;
                let q2 = rng.gen_range(-3i64..=3) as f64;
                q.set(Site::new(n1, n2), q1, q2).expect("inside ball");
            }
        }
        q
    }

    pub fn to_json(&self) -> String {
        let file = PotentialFile {
            m: self.m,
            sites: self
                .entries
                .iter()
                .map(|(n, &(q1, q2))| SiteRecord { n1: n.n1, n2: n.n2, q1, q2 })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("plain data serializes")
    }

    pub fn from_json(text: &str, origin: &str) -> Result<PotentialField> {
        let file: PotentialFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        if file.m < 0 {
            return Err(Error::Parse {
                path: origin.to_string(),
                line: 0,
                column: 0,
                msg: "field `M` must be nonnegative".into(),
            });
        }
        let mut q = PotentialField::new(file.m);
        let mut seen = std::collections::BTreeSet::new();
        for s in file.sites {
            let n = Site::new(s.n1, s.n2);
            if !seen.insert(n) {
                return Err(Error::DuplicateSite(n));
            }
            q.set(n, s.q1, s.q2)?;
        }
        Ok(q)
    }
}

pub fn load_potential(path: &Path) -> Result<PotentialField> {
    let text = std::fs::read_to_string(path)?;
    PotentialField::from_json(&text, &path.display().to_string())
}

pub fn save_potential(q: &PotentialField, path: &Path) -> Result<()> {
    std::fs::write(path, q.to_json() + "\n")?;
    Ok(())
}

/// One row of a `p(ξ)` grid sample.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumSample {
    pub xi1: f64,
    pub xi2: f64,
    pub p: f64,
    /// `|∇p|`, or `None` at a Dirac point.
    pub grad_norm: Option<f64>,
}

/// Uniform `k × k` grid over `[-π, π)²`.
pub fn spectrum_grid(k: usize) -> Vec<SpectrumSample> {
    let h = 2.0 * PI / k as f64;
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let xi = (-PI + i as f64 * h, -PI + j as f64 * h);
            let grad_norm = grad_p(xi).ok().map(|(a, b)| a.hypot(b));
            out.push(SpectrumSample { xi1: xi.0, xi2: xi.1, p: p_of(xi), grad_norm });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h0_on_point_mass() {
        let mut f = LatticeField2::new();
        f.insert(Site::ORIGIN, (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)));
        let g = apply_h0(&f);
        let ones: Vec<Site> = g.iter().filter(|(_, v)| v.0 == Complex64::new(1.0, 0.0)).map(|(&n, _)| n).collect();
        assert_eq!(ones, vec![Site::new(0, 0), Site::new(0, 1), Site::new(1, 0)]);
        assert!(g.values().all(|v| v.1 == Complex64::new(0.0, 0.0)));
        assert!(apply_h0(&LatticeField2::new()).is_empty());
    }

    #[test]
    fn symbol_examples() {
        assert!((p_of((0.0, 0.0)) - 3.0).abs() < 1e-15);
        let t = 2.0 * PI / 3.0;
        assert!(p_of((t, -t)) < 1e-7);
        let g = grad_p((PI / 2.0, -PI / 2.0)).unwrap();
        assert!((g.0 + 1.0).abs() < 1e-14 && (g.1 - 1.0).abs() < 1e-14);
        assert!(grad_p((t, -t)).is_err());
        assert!((p_of((-PI, 0.0)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn special_set_values() {
        let s = special_sets();
        assert_eq!(s.dirac_points[0].0, -s.dirac_points[1].0);
        assert_eq!(s.dirac_points[0].1, -s.dirac_points[1].1);
        let ps: Vec<f64> = s.critical_points.iter().map(|&x| p_of(x)).collect();
        assert!((ps[0] - 3.0).abs() < 1e-14);
        for (&x, &p) in s.critical_points.iter().zip(&ps).skip(1) {
            assert!((p - 1.0).abs() < 1e-14);
            assert!(s.on_level_one(x, 1e-12));
            let g = grad_p(x).unwrap();
            assert!(g.0.abs() < 1e-14 && g.1.abs() < 1e-14);
        }
    }

    #[test]
    fn potential_rows_and_errors() {
        let q = PotentialField::from_sites(2, &[((0, 2), 0.0, 5.0)]).unwrap();
        assert_eq!(q.row(2, 2), BTreeMap::from([(0, 5.0)]));
        assert!(q.row(2, 1).is_empty());
        assert!(PotentialField::from_sites(2, &[((2, 1), 1.0, 0.0)]).is_err());
        let bad = r#"{"M": 1, "sites": [{"n1":0,"n2":0,"q1":1,"q2":0},{"n1":0,"n2":0,"q1":2,"q2":0}]}"#;
        assert!(matches!(PotentialField::from_json(bad, "t"), Err(Error::DuplicateSite(_))));
        let far = r#"{"M": 1, "sites": [{"n1":1,"n2":1,"q1":1,"q2":0}]}"#;
        assert!(matches!(PotentialField::from_json(far, "t"), Err(Error::SupportRadius { .. })));
        let cplx = r#"{"M": 1, "sites": [{"n1":0,"n2":0,"q1":[1,2],"q2":0}]}"#;
        assert!(matches!(PotentialField::from_json(cplx, "t"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn truncation_keeps_requested_rows() {
        let q = PotentialField::random(2, 3);
        let t = q.truncate(1, 0);
        for (n, (q1, q2)) in q.iter() {
            let (a, b) = t.get(n);
            assert_eq!(a, if n.n2 > 1 { q1 } else { 0.0 });
            assert_eq!(b, if n.n2 > 0 { q2 } else { 0.0 });
        }
    }

    #[test]
    fn random_potential_is_deterministic() {
        assert_eq!(PotentialField::random(2, 7), PotentialField::random(2, 7));
        assert_ne!(PotentialField::random(2, 7), PotentialField::random(2, 8));
        let q = PotentialField::random(2, 7);
        assert!(q.iter().all(|(n, (a, b))| n.l1() <= 2 && a.fract() == 0.0 && b.abs() <= 3.0));
    }
}
