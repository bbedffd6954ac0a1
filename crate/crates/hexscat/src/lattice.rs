//! Hexagonal lattice encoded on ℤ², and the three combinatorial distances
//! `d`, `d₁₂`, `d₂₁` that govern resolvent decay.
//!
//! Integer arithmetic only.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub n1: i64,
    pub n2: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { n1: 0, n2: 0 };

    pub const fn new(n1: i64, n2: i64) -> Self {
        Site { n1, n2 }
    }

    pub fn parity(self) -> Parity {
        if (self.n1 + self.n2).rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn l1(self) -> i64 {
        self.n1.abs() + self.n2.abs()
    }

    pub fn linf(self) -> i64 {
        self.n1.abs().max(self.n2.abs())
    }

    pub fn scale(self, a: i64) -> Self {
        Site::new(a * self.n1, a * self.n2)
    }
}

impl Add for Site {
    type Output = Site;
    fn add(self, o: Site) -> Site {
        Site::new(self.n1 + o.n1, self.n2 + o.n2)
    }
}

impl Sub for Site {
    type Output = Site;
    fn sub(self, o: Site) -> Site {
        Site::new(self.n1 - o.n1, self.n2 - o.n2)
    }
}

impl Neg for Site {
    type Output = Site;
    fn neg(self) -> Site {
        Site::new(-self.n1, -self.n2)
    }
}

impl From<(i64, i64)> for Site {
    fn from((n1, n2): (i64, i64)) -> Self {
        Site::new(n1, n2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dist {
    /// `d = d₁₁ = d₂₂`
    D,
    D12,
    D21,
}

impl Dist {
    /// The distance used for block `(i, j)`, `i, j ∈ {1, 2}`.
    pub fn for_block(i: usize, j: usize) -> Dist {
        match (i, j) {
            (1, 2) => Dist::D12,
            (2, 1) => Dist::D21,
            _ => Dist::D,
        }
    }
}

pub fn dist(kind: Dist, n: Site) -> i64 {
    let (a, b) = (n.n1, n.n2);
    match kind {
        Dist::D => {
            if a * b >= 0 {
                a.abs() + b.abs()
            } else {
                a.abs().max(b.abs())
            }
        }
        Dist::D12 => {
            if a > 0 && b > 0 {
                a.abs() + b.abs() - 1
            } else if a > 0 {
                (a.abs() - 1).max(b.abs())
            } else if b <= 0 {
                a.abs() + b.abs()
            } else {
                a.abs().max(b.abs() - 1)
            }
        }
        Dist::D21 => dist(Dist::D12, -n),
    }
}

/// Sublattice coordinates: even sites satisfy `n₁ = m₁ − m₂, n₂ = m₁ + m₂`,
/// odd sites `n₁ = m₁ − m₂, n₂ = 1 + m₁ + m₂`.
pub fn hex_coords(n: Site) -> (Parity, (i64, i64)) {
    match n.parity() {
        Parity::Even => (Parity::Even, ((n.n1 + n.n2) / 2, (n.n2 - n.n1) / 2)),
        Parity::Odd => {
            let s = n.n2 - 1;
            (Parity::Odd, ((n.n1 + s) / 2, (s - n.n1) / 2))
        }
    }
}

pub fn from_hex_coords(parity: Parity, m: (i64, i64)) -> Site {
    let (m1, m2) = m;
    match parity {
        Parity::Even => Site::new(m1 - m2, m1 + m2),
        Parity::Odd => Site::new(m1 - m2, 1 + m1 + m2),
    }
}

/// One inequality family checked by [`verify_distance_lemmas`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaResult {
    pub name: String,
    pub checked: u64,
    pub violations: u64,
    /// First violating witness `(u, v)`; `v` is the origin for single-vector checks.
    pub witness: Option<(Site, Site)>,
}

impl LemmaResult {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub radius: i64,
    pub lemmas: Vec<LemmaResult>,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.lemmas.iter().all(LemmaResult::passed)
    }
}

struct Tally {
    names: Vec<&'static str>,
    checked: Vec<u64>,
    violations: Vec<u64>,
    witness: Vec<Option<(Site, Site)>>,
}

impl Tally {
    fn new(names: Vec<&'static str>) -> Self {
        let k = names.len();
        Tally { names, checked: vec![0; k], violations: vec![0; k], witness: vec![None; k] }
    }

    fn check(&mut self, i: usize, ok: bool, u: Site, v: Site) {
        self.checked[i] += 1;
        if !ok {
            self.violations[i] += 1;
            if self.witness[i].is_none() {
                self.witness[i] = Some((u, v));
            }
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        for i in 0..self.names.len() {
            self.checked[i] += o.checked[i];
            self.violations[i] += o.violations[i];
            if self.witness[i].is_none() {
                self.witness[i] = o.witness[i];
            }
        }
        self
    }

    fn into_results(self) -> Vec<LemmaResult> {
        (0..self.names.len())
            .map(|i| LemmaResult {
                name: self.names[i].to_string(),
                checked: self.checked[i],
                violations: self.violations[i],
                witness: self.witness[i],
            })
            .collect()
    }
}

const PAIR_LEMMAS: [&str; 6] = [
    "triangle d(u+v) <= d(u)+d(v)",
    "d_ij(u+v) <= d_ii(u)+d_ij(v)",
    "d_ij(u+v) <= d_ij(u)+d_jj(v)",
    "d_ii(u+v) <= d_ij(u)+d_ji(v)+1",
    "d(-u) = d(u), d12(u) = d21(-u)",
    "d(u) = 0 iff u = 0",
];

const SINGLE_LEMMAS: [&str; 4] = [
    "d(n) >= |n2|",
    "d12(n) >= |n2|-1 (n2>0), >= |n2| (n2<=0)",
    "d21(n) >= |n2| (n2>=0), >= |n2|-1 (n2<0)",
    "d-1 <= d12, d21 <= d",
];

fn check_pair(t: &mut Tally, u: Site, v: Site) {
    use Dist::*;
    let w = u + v;
    t.check(0, dist(D, w) <= dist(D, u) + dist(D, v), u, v);
    let mut a = true;
    let mut b = true;
    let mut c = true;
    for (ii, ij, jj, ji) in [(D, D12, D, D21), (D, D21, D, D12)] {
        a &= dist(ij, w) <= dist(ii, u) + dist(ij, v);
        b &= dist(ij, w) <= dist(ij, u) + dist(jj, v);
        c &= dist(ii, w) <= dist(ij, u) + dist(ji, v) + 1;
    }
    t.check(1, a, u, v);
    t.check(2, b, u, v);
    t.check(3, c, u, v);
}

fn check_single(t: &mut Tally, n: Site) {
    let o = Site::ORIGIN;
    let d = dist(Dist::D, n);
    let d12 = dist(Dist::D12, n);
    let d21 = dist(Dist::D21, n);
    let b = n.n2.abs();
    t.check(0, d >= b, n, o);
    t.check(1, if n.n2 > 0 { d12 >= b - 1 } else { d12 >= b }, n, o);
    t.check(2, if n.n2 >= 0 { d21 >= b } else { d21 >= b - 1 }, n, o);
    t.check(3, d - 1 <= d12 && d12 <= d && d - 1 <= d21 && d21 <= d, n, o);
}

/// Exhaustive check of the distance inequalities over all difference vectors
/// with components in `[-radius, radius]`.
pub fn verify_distance_lemmas(radius: i64) -> LemmaReport {
    assert!(radius >= 1, "radius must be positive");
    let r = radius;
    let side: Vec<i64> = (-r..=r).collect();

    let shard = |u1: i64| {
        let mut t = Tally::new(PAIR_LEMMAS.to_vec());
        for &u2 in &side {
            let u = Site::new(u1, u2);
            for &v1 in &side {
                for &v2 in &side {
                    check_pair(&mut t, u, Site::new(v1, v2));
                }
            }
            let sym = dist(Dist::D, -u) == dist(Dist::D, u)
                && dist(Dist::D12, u) == dist(Dist::D21, -u)
                && dist(Dist::D, u.scale(2)) == 2 * dist(Dist::D, u);
            t.check(4, sym, u, Site::ORIGIN);
            t.check(5, (dist(Dist::D, u) == 0) == (u == Site::ORIGIN), u, Site::ORIGIN);
        }
        t
    };

    #[cfg(feature = "parallel")]
    let pairs = {
        use rayon::prelude::*;
        side.par_iter()
            .map(|&u1| shard(u1))
            .reduce(|| Tally::new(PAIR_LEMMAS.to_vec()), Tally::merge)
    };
    #[cfg(not(feature = "parallel"))]
    let pairs = side.iter().map(|&u1| shard(u1)).fold(Tally::new(PAIR_LEMMAS.to_vec()), Tally::merge);

    let mut singles = Tally::new(SINGLE_LEMMAS.to_vec());
    for &a in &side {
        for &b in &side {
            check_single(&mut singles, Site::new(a, b));
        }
    }

    let mut lemmas = pairs.into_results();
    lemmas.extend(singles.into_results());
    LemmaReport { radius, lemmas }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        assert_eq!(dist(Dist::D, Site::new(1, 1)), 2);
        assert_eq!(dist(Dist::D, Site::new(0, 0)), 0);
        assert_eq!(dist(Dist::D, Site::new(3, -2)), 3);
        assert_eq!(dist(Dist::D12, Site::new(1, 1)), 1);
        assert_eq!(dist(Dist::D12, Site::new(-1, 2)), 1);
        assert_eq!(dist(Dist::D21, Site::new(1, 1)), 2);
    }

    #[test]
    fn hex_coordinate_examples() {
        assert_eq!(hex_coords(Site::new(0, 0)), (Parity::Even, (0, 0)));
        assert_eq!(hex_coords(Site::new(1, 1)), (Parity::Even, (1, 0)));
        assert_eq!(hex_coords(Site::new(0, 1)), (Parity::Odd, (0, 0)));
    }

    #[test]
    fn hex_coords_are_bijective_on_a_box() {
        for a in -9..=9 {
            for b in -9..=9 {
                let n = Site::new(a, b);
                let (p, m) = hex_coords(n);
                assert_eq!(from_hex_coords(p, m), n);
                assert_eq!(p, n.parity());
                assert_eq!(hex_coords(from_hex_coords(Parity::Even, (a, b))), (Parity::Even, (a, b)));
                assert_eq!(hex_coords(from_hex_coords(Parity::Odd, (a, b))), (Parity::Odd, (a, b)));
            }
        }
    }

    #[test]
    fn small_boxes_pass() {
        assert!(verify_distance_lemmas(1).all_pass());
        assert!(verify_distance_lemmas(3).all_pass());
    }

    #[test]
    fn report_counts_every_pair() {
        let rep = verify_distance_lemmas(2);
        assert_eq!(rep.lemmas[0].checked, 25 * 25);
        assert_eq!(rep.lemmas[4].checked, 25);
        assert_eq!(rep.lemmas[6].checked, 25);
    }
}
