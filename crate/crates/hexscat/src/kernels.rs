//! Continued amplitude kernels `B = B₀ − B₁` in the diagonal blocks 11 and 22.
//!
//! With `ζ₊ = ζ(z, θ)` on the negative branch and `ζ₋ = ζ(z, θ′)` on the
//! positive branch, put `η(ζ) = [[1, α(ζ)/λ], [ᾱ(ζ)/λ, 1]]`, `λ = √(8z²+1)`,
//! `U(n) = e^{inζ₊} η(ζ₊)` and `V(m) = e^{−imζ₋} η(ζ₋)`. Then
//!
//! ```text
//! B₀ = Σ_n U(n) Q(n) V(n)
//! B₁ = Σ_{n,m} U(n) Q(n) R(λ)(n, m) Q(m) V(m)
//! ```
//!
//! and the 11 and 22 entries of these 2×2 matrices are the kernels.
//! The resolvent is taken at the continued energy `λ(z)`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::continuation::{amp_ratio, zeta_exterior, Amp, Branch, ContinuedPhase};
use crate::error::{Error, Result};
use crate::lattice::Site;
use crate::real::{cabs, cpowi, lift, Real, C};
use crate::resolvent::{full_resolvent_block, powers_for, FreeResolvent, RPowers, ResolventBlock};
use crate::spectral::PotentialField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Block {
    #[serde(rename = "11")]
    B11,
    #[serde(rename = "22")]
    B22,
}

impl Block {
    fn idx(self) -> usize {
        match self {
            Block::B11 => 0,
            Block::B22 => 1,
        }
    }
}

impl std::str::FromStr for Block {
    type Err = Error;
    fn from_str(s: &str) -> Result<Block> {
        match s {
            "11" => Ok(Block::B11),
            "22" => Ok(Block::B22),
            _ => Err(Error::Domain(format!("block must be 11 or 22, got {s}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelRequest {
    pub z: Complex64,
    pub theta: f64,
    pub theta_prime: f64,
    pub block: Block,
}

#[derive(Debug, Clone)]
pub struct KernelValue<T: Real> {
    pub b0: C<T>,
    pub b1: C<T>,
}

impl<T: Real> KernelValue<T> {
    pub fn total(&self) -> C<T> {
        self.b0.clone() - self.b1.clone()
    }
}

type M2<T> = [[C<T>; 2]; 2];

/// `η(ζ)` for either phase.
fn eta_of<T: Real>(ph: &ContinuedPhase<T>, z: &C<T>) -> M2<T> {
    [
        [C::<T>::one(), amp_ratio(ph, z, Amp::Alpha)],
        [amp_ratio(ph, z, Amp::AlphaBar), C::<T>::one()],
    ]
}

/// `η⁽⁰⁾(z, θ′)` built from the positive-branch phase.
pub fn eta0<T: Real>(z: &C<T>, theta_prime: &T) -> Result<[[C<T>; 2]; 2]> {
    let ph = zeta_exterior(z, theta_prime, Branch::Positive)?;
    Ok(eta_of(&ph, z))
}

/// Phase data shared by all kernel evaluations at one `(z, θ, θ′)`.
pub struct PhasePair<T: Real> {
    pub z: C<T>,
    pub plus: ContinuedPhase<T>,
    pub minus: ContinuedPhase<T>,
    eta_plus: M2<T>,
    eta_minus: M2<T>,
    e_plus: [C<T>; 2],
    e_minus_inv: [C<T>; 2],
}

impl<T: Real> PhasePair<T> {
    pub fn new(z: &C<T>, theta: &T, theta_prime: &T) -> Result<Self> {
        let plus = zeta_exterior(z, theta, Branch::Negative)?;
        let minus = zeta_exterior(z, theta_prime, Branch::Positive)?;
        let eta_plus = eta_of(&plus, z);
        let eta_minus = eta_of(&minus, z);
        let e_plus = [plus.exp_full(0), plus.exp_full(1)];
        // e^{−iζ₋} through the half angles of the negative mirror.
        let mirror = ContinuedPhase {
            cos_half: minus.cos_half.clone(),
            sin_half: [-minus.sin_half[0].clone(), -minus.sin_half[1].clone()],
            branch: Branch::Negative,
        };
        let e_minus_inv = [mirror.exp_full(0), mirror.exp_full(1)];
        Ok(PhasePair { z: z.clone(), plus, minus, eta_plus, eta_minus, e_plus, e_minus_inv })
    }

    /// `e^{inζ₊}`.
    pub fn out_phase(&self, n: Site) -> Result<C<T>> {
        site_power(&self.e_plus, n)
    }

    /// `e^{−inζ₋}`.
    pub fn in_phase(&self, n: Site) -> Result<C<T>> {
        site_power(&self.e_minus_inv, n)
    }

    pub fn eta_out(&self) -> &M2<T> {
        &self.eta_plus
    }

    pub fn eta_in(&self) -> &M2<T> {
        &self.eta_minus
    }
}

fn site_power<T: Real>(e: &[C<T>; 2], n: Site) -> Result<C<T>> {
    let v = cpowi(&e[0], n.n1 as i32) * cpowi(&e[1], n.n2 as i32);
    let a = cabs(&v).to_f64();
    if !a.is_finite() || (a == 0.0 && !(v.re.is_zero() && v.im.is_zero())) {
        return Err(Error::Overflow(format!("phase factor at ({}, {}) leaves the exponent range", n.n1, n.n2)));
    }
    if T::BITS <= 64 && (a == 0.0 || a > 1e300) {
        return Err(Error::Overflow(format!("phase factor at ({}, {}) leaves the f64 range", n.n1, n.n2)));
    }
    Ok(v)
}

fn qm<T: Real>(q: &PotentialField, n: Site) -> [T; 2] {
    let (a, b) = q.get(n);
    [T::from_f64(a), T::from_f64(b)]
}

/// `B₀` for one block.
pub fn b0_block<T: Real>(q: &PotentialField, pp: &PhasePair<T>, block: Block) -> Result<C<T>> {
    let k = block.idx();
    let mut acc = C::<T>::zero();
    for (n, _) in q.iter() {
        let qn = qm::<T>(q, n);
        let w = pp.out_phase(n)? * pp.in_phase(n)?;
        // Row k of η₊, diag(q), column k of η₋.
        let mut inner = C::<T>::zero();
        for v in 0..2 {
            inner = inner + pp.eta_plus[k][v].clone() * pp.eta_minus[v][k].clone() * qn[v].clone();
        }
        acc = acc + w * inner;
    }
    Ok(acc)
}

/// `B₁` for one block, given the resolvent block of `q` at `λ(z)`.
pub fn b1_block<T: Real>(q: &PotentialField, res: &ResolventBlock<T>, pp: &PhasePair<T>, block: Block) -> Result<C<T>> {
    let k = block.idx();
    let s = res.len();
    // Column k of Q(m) V(m), for every m in the block's site list.
    let mut col: Vec<[C<T>; 2]> = Vec::with_capacity(s);
    for &m in &res.sites {
        let qv = qm::<T>(q, m);
        let ph = pp.in_phase(m)?;
        col.push([
            ph.clone() * pp.eta_minus[0][k].clone() * qv[0].clone(),
            ph * pp.eta_minus[1][k].clone() * qv[1].clone(),
        ]);
    }
    let mut acc = C::<T>::zero();
    for (i, &n) in res.sites.iter().enumerate() {
        let qn = qm::<T>(q, n);
        if qn[0].is_zero() && qn[1].is_zero() {
            continue;
        }
        let mut x = [C::<T>::zero(), C::<T>::zero()];
        for (j, cj) in col.iter().enumerate() {
            let r = res.get(i, j);
            for u in 0..2 {
                x[u] = x[u].clone() + r[u][0].clone() * cj[0].clone() + r[u][1].clone() * cj[1].clone();
            }
        }
        let row = pp.out_phase(n)?;
        let mut inner = C::<T>::zero();
        for u in 0..2 {
            inner = inner + pp.eta_plus[k][u].clone() * qn[u].clone() * x[u].clone();
        }
        acc = acc + row * inner;
    }
    Ok(acc)
}

type BlockCache<T> = HashMap<(u64, u64), (C<T>, Arc<ResolventBlock<T>>)>;

/// Forward model for a fixed potential, caching resolvent blocks per `z`.
pub struct Forward<T: Real> {
    q: PotentialField,
    powers: Arc<RPowers<T>>,
    blocks: RwLock<BlockCache<T>>,
}

/// Smallest `|z|` the forward model accepts.
pub const MIN_ABS_Z: f64 = 4.0;

impl<T: Real> Forward<T> {
    /// Power tables are sized for `|z| ≥ min_abs_z` on the ray.
    pub fn new(q: PotentialField, min_abs_z: f64) -> Self {
        let powers = Arc::new(shared_powers::<T>(q.radius(), min_abs_z));
        Self::with_powers(q, powers)
    }

    pub fn with_powers(q: PotentialField, powers: Arc<RPowers<T>>) -> Self {
        Forward { q, powers, blocks: RwLock::new(HashMap::new()) }
    }

    pub fn potential(&self) -> &PotentialField {
        &self.q
    }

    pub fn powers(&self) -> Arc<RPowers<T>> {
        self.powers.clone()
    }

    /// Resolvent block of the potential at `λ(z)`.
    pub fn block(&self, z: &C<T>) -> Result<Arc<ResolventBlock<T>>> {
        let zl = crate::real::lower(z);
        let key = (zl.re.to_bits(), zl.im.to_bits());
        if let Some(b) = self.blocks.read().expect("cache lock").get(&key) {
            if b.0 == *z {
                return Ok(b.1.clone());
            }
        }
        let lam = crate::continuation::lambda_of(z);
        let mut g = FreeResolvent::new(lam, &self.powers)?;
        let blk = Arc::new(full_resolvent_block(&self.q, &mut g)?);
        let mut w = self.blocks.write().expect("cache lock");
        w.insert(key, (z.clone(), blk.clone()));
        Ok(blk)
    }

    /// Both kernels at the point stored in `pp`.
    pub fn eval_with(&self, pp: &PhasePair<T>, block: Block) -> Result<KernelValue<T>> {
        if self.q.is_empty() {
            return Ok(KernelValue { b0: C::zero(), b1: C::zero() });
        }
        let b0 = b0_block(&self.q, pp, block)?;
        let res = self.block(&pp.z)?;
        let b1 = b1_block(&self.q, &res, pp, block)?;
        Ok(KernelValue { b0, b1 })
    }

    /// Evaluation on the upper half plane, the domain of the public kernel operation.
    pub fn eval(&self, req: &KernelRequest) -> Result<KernelValue<T>> {
        check_ray_point(req.z)?;
        let zt: C<T> = lift(req.z);
        let pp = PhasePair::new(&zt, &T::from_f64(req.theta), &T::from_f64(req.theta_prime))?;
        self.eval_with(&pp, req.block)
    }

    /// Evaluation at any `z` with `|z| ≥ MIN_ABS_Z`, given at working precision.
    pub fn eval_at(&self, z: &C<T>, theta: f64, theta_prime: f64, block: Block) -> Result<KernelValue<T>> {
        check_exterior_point(z)?;
        let pp = PhasePair::new(z, &T::from_f64(theta), &T::from_f64(theta_prime))?;
        self.eval_with(&pp, block)
    }

    pub fn b_total(&self, req: &KernelRequest) -> Result<C<T>> {
        Ok(self.eval(req)?.total())
    }
}

/// A power table valid for every truncation of a radius-`m` potential.
pub fn shared_powers<T: Real>(m: i64, min_abs_z: f64) -> RPowers<T> {
    // |λ(z)| ≥ 2√2 |z| − 1 for |z| ≥ 1.
    let lam_min = (2.0 * std::f64::consts::SQRT_2 * min_abs_z - 1.0).max(3.5);
    powers_for::<T>(m.max(0), lam_min)
}

pub fn check_ray_point(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.im < 0.0 || z.norm() < MIN_ABS_Z {
        return Err(Error::Domain(format!("kernel point {z} must satisfy Im z ≥ 0 and |z| ≥ {MIN_ABS_Z}")));
    }
    Ok(())
}

fn check_exterior_point<T: Real>(z: &C<T>) -> Result<()> {
    let a = cabs(z).to_f64();
    if !a.is_finite() || a < MIN_ABS_Z {
        return Err(Error::Domain(format!("kernel point must satisfy |z| ≥ {MIN_ABS_Z}, got |z| = {a}")));
    }
    Ok(())
}

/// Which coefficient family a stripping stage recovers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Stage {
    /// `q₂` on row `p` from block 22.
    Q2,
    /// `q₁` on row `p` from block 11.
    Q1,
}

impl Stage {
    pub fn block(self) -> Block {
        match self {
            Stage::Q2 => Block::B22,
            Stage::Q1 => Block::B11,
        }
    }

    /// Rows of `q₁` and `q₂` already known when this stage at row `p` runs,
    /// as truncation thresholds `(r, s)`: `q₁` on `n₂ > r`, `q₂` on `n₂ > s`.
    pub fn known_rows(self, p: i64) -> (i64, i64) {
        match self {
            Stage::Q2 => (p, p),
            Stage::Q1 => (p, p - 1),
        }
    }
}

/// The stage preceding `(p, stage)` in the order
/// `(M, Q2), (M, Q1), (M−1, Q2), …, (−M, Q1)`.
pub fn stage_successor(m: i64, p: i64, stage: Stage) -> Option<(i64, Stage)> {
    match stage {
        Stage::Q2 => Some((p, Stage::Q1)),
        Stage::Q1 if p > -m => Some((p - 1, Stage::Q2)),
        Stage::Q1 => None,
    }
}

/// A partially recovered potential together with the next stage to run.
#[derive(Debug, Clone)]
pub struct Recovered {
    pub field: PotentialField,
    pub next: Option<(i64, Stage)>,
}

impl Recovered {
    pub fn start(m: i64) -> Self {
        Recovered { field: PotentialField::new(m), next: Some((m, Stage::Q2)) }
    }

    pub fn check_next(&self, p: i64, stage: Stage) -> Result<()> {
        if self.next != Some((p, stage)) {
            return Err(Error::StageOrder(format!("requested row {p} {stage:?}, next pending stage is {:?}", self.next)));
        }
        Ok(())
    }

    /// Records row `p` of the given component and advances.
    pub fn commit(&mut self, p: i64, stage: Stage, row: &std::collections::BTreeMap<i64, f64>) -> Result<()> {
        self.check_next(p, stage)?;
        for (&n1, &v) in row {
            let site = Site::new(n1, p);
            let (a, b) = self.field.get(site);
            match stage {
                Stage::Q2 => self.field.set(site, a, v)?,
                Stage::Q1 => self.field.set(site, v, b)?,
            }
        }
        self.next = stage_successor(self.field.radius(), p, stage);
        Ok(())
    }

    /// The part of the field the stage `(p, stage)` may treat as known.
    pub fn known_field(&self, p: i64, stage: Stage) -> Result<PotentialField> {
        self.check_next(p, stage)?;
        let (r, s) = stage.known_rows(p);
        Ok(self.field.truncate(r, s))
    }
}

/// Evaluates the known contribution for a stage: the full forward map of the
/// already recovered rows, `B[q_(>r,>s)]` in the stage's block.
pub struct KnownTerms<T: Real> {
    pub p: i64,
    pub stage: Stage,
    model: Forward<T>,
}

impl<T: Real> KnownTerms<T> {
    pub fn new(recovered: &Recovered, p: i64, stage: Stage, powers: Arc<RPowers<T>>) -> Result<Self> {
        let known = recovered.known_field(p, stage)?;
        Ok(KnownTerms { p, stage, model: Forward::with_powers(known, powers) })
    }

    pub fn field(&self) -> &PotentialField {
        self.model.potential()
    }

    pub fn eval_with(&self, pp: &PhasePair<T>) -> Result<C<T>> {
        Ok(self.model.eval_with(pp, self.stage.block())?.total())
    }
}

/// `known_terms` entry point for one request.
pub fn known_terms<T: Real>(recovered: &Recovered, p: i64, stage: Stage, req: &KernelRequest) -> Result<C<T>> {
    if req.block != stage.block() {
        return Err(Error::Domain(format!("stage {stage:?} works in block {:?}", stage.block())));
    }
    let kt = KnownTerms::new(recovered, p, stage, Arc::new(shared_powers::<T>(recovered.field.radius(), req.z.norm())))?;
    check_ray_point(req.z)?;
    let zt: C<T> = lift(req.z);
    let pp = PhasePair::new(&zt, &T::from_f64(req.theta), &T::from_f64(req.theta_prime))?;
    kt.eval_with(&pp)
}
