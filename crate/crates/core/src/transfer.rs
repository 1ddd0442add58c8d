//! Homotopy transfer: validation of the homotopy datum, the recursive
//! higher products on the ambient algebra, the transferred operations
//! on the subcomplex, and exact verification of the associativity
//! tower.
//!
//! The data: a DGA `(V, d, ·)`, a d-invariant subspace `W`, and an odd
//! homotopy `Q` such that `P = 1 − [d,Q]` maps all of `V` into `W`.
//! `P` need not fix `W` pointwise and need not be onto — the weakened
//! hypothesis is exercised by the closed-subcomplex datum of the
//! [`crate::hodge`] module.
//!
//! The recursion, with `Qλ₁` the sentinel `−Id` (Q is never inverted):
//!
//! ```text
//! λ₂(v₁,v₂) = v₁·v₂
//! λₙ(v₁,…,vₙ) = −Σ_{k+l=n, k,l≥1} (−1)^{k+(l−1)(ṽ₁+…+ṽ_k)}
//!                 [Qλ_k(v₁…v_k)]·[Qλ_l(v_{k+1}…vₙ)]
//! μ₁ = d,  μₙ = P∘λₙ   (n ≥ 2)
//! ```

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dga::Dga;
use crate::graded::{
    assoc_sign_exponent, lambda_sign_exponent, parity_of_degree, supercommutator, Degree,
    GradedMap, GradedVectorSpace, HomogeneousVector,
};
use crate::linalg::{Matrix, Scalar};
use crate::{Error, Result};

/// A homogeneous element of the subcomplex, in W coordinates at its
/// degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WElement {
    pub degree: Degree,
    pub coords: Vec<Scalar>,
}

impl WElement {
    pub fn new(degree: Degree, coords: Vec<Scalar>) -> Self {
        WElement { degree, coords }
    }

    pub fn parity(&self) -> u8 {
        parity_of_degree(self.degree)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &WElement) -> WElement {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        assert_eq!(self.coords.len(), other.coords.len(), "length mismatch");
        WElement {
            degree: self.degree,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &WElement) -> WElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> WElement {
        WElement {
            degree: self.degree,
            coords: self.coords.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> WElement {
        WElement {
            degree: self.degree,
            coords: self.coords.iter().map(|a| a * s).collect(),
        }
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.coords.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }
}

/// Degree profile of a subcomplex: the degrees carrying nonzero
/// dimension, with a fixed global enumeration of the basis (degree
/// ascending, index ascending). Shared by the engine and the μ-table
/// reader so tuple enumeration is identical on both sides.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WShape {
    degrees: Vec<(Degree, usize)>,
}

impl WShape {
    pub fn new(dims: BTreeMap<Degree, usize>) -> Self {
        WShape {
            degrees: dims.into_iter().filter(|&(_, d)| d > 0).collect(),
        }
    }

    pub fn dims(&self) -> BTreeMap<Degree, usize> {
        self.degrees.iter().copied().collect()
    }

    pub fn degrees(&self) -> impl Iterator<Item = Degree> + '_ {
        self.degrees.iter().map(|&(g, _)| g)
    }

    pub fn dim(&self, g: Degree) -> usize {
        self.degrees
            .iter()
            .find(|&&(d, _)| d == g)
            .map_or(0, |&(_, n)| n)
    }

    pub fn total_dim(&self) -> usize {
        self.degrees.iter().map(|&(_, n)| n).sum()
    }

    pub fn global_to_pair(&self, index: u32) -> (Degree, usize) {
        let mut rest = index as usize;
        for &(g, n) in &self.degrees {
            if rest < n {
                return (g, rest);
            }
            rest -= n;
        }
        panic!("global index {index} out of range");
    }

    pub fn pair_to_global(&self, g: Degree, i: usize) -> u32 {
        let mut offset = 0usize;
        for &(d, n) in &self.degrees {
            if d == g {
                assert!(i < n);
                return (offset + i) as u32;
            }
            offset += n;
        }
        panic!("degree {g} carries no W basis");
    }

    pub fn zero(&self, g: Degree) -> WElement {
        WElement::new(g, vec![Scalar::zero(); self.dim(g)])
    }

    pub fn basis(&self, index: u32) -> WElement {
        let (g, i) = self.global_to_pair(index);
        let mut v = self.zero(g);
        v.coords[i] = num::One::one();
        v
    }

    /// Seeded random homogeneous element: a basis vector scaled by a
    /// nonzero rational. Multilinearity makes basis tuples a complete
    /// test family; the coefficient exercises linearity of the
    /// expansion.
    pub fn random_element(&self, rng: &mut ChaCha8Rng) -> WElement {
        let &(g, n) = &self.degrees[rng.gen_range(0..self.degrees.len())];
        let i = rng.gen_range(0..n);
        let num = loop {
            let c = rng.gen_range(-2i64..=2);
            if c != 0 {
                break c;
            }
        };
        let den = rng.gen_range(1i64..=2);
        let mut v = self.zero(g);
        v.coords[i] = crate::linalg::scalar_ratio(num, den);
        v
    }
}

/// A d-invariant subspace of the ambient graded space, presented by a
/// per-degree inclusion matrix whose columns are the W basis in ambient
/// coordinates. d-invariance itself is established by
/// [`check_assumption`], which factors `d∘inclusion` through the
/// inclusion.
#[derive(Clone, PartialEq, Debug)]
pub struct Subcomplex {
    ambient: Arc<GradedVectorSpace>,
    space: Arc<GradedVectorSpace>,
    inclusion: BTreeMap<Degree, Matrix>,
}

impl Subcomplex {
    pub fn new(
        ambient: Arc<GradedVectorSpace>,
        inclusion: BTreeMap<Degree, Matrix>,
    ) -> Result<Self> {
        let mut dims = Vec::new();
        for g in ambient.degrees() {
            let block = inclusion.get(&g);
            let w_dim = block.map_or(0, Matrix::cols);
            if let Some(b) = block {
                if b.rows() != ambient.dim(g) {
                    return Err(Error::DimensionMismatch {
                        context: format!(
                            "inclusion at degree {g}: {} rows for ambient dimension {}",
                            b.rows(),
                            ambient.dim(g)
                        ),
                    });
                }
                if b.rank() != b.cols() {
                    return Err(Error::InvalidGradedData(format!(
                        "inclusion columns at degree {g} are linearly dependent"
                    )));
                }
            }
            dims.push(w_dim);
        }
        let space = GradedVectorSpace::new(
            ambient.min_degree(),
            dims.clone(),
            dims.iter()
                .enumerate()
                .map(|(k, &n)| {
                    let g = ambient.min_degree() + k as Degree;
                    (0..n).map(|i| format!("w{g}_{i}")).collect()
                })
                .collect(),
        )?;
        let inclusion = inclusion.into_iter().filter(|(_, b)| b.cols() > 0).collect();
        Ok(Subcomplex { ambient, space, inclusion })
    }

    /// The full ambient space as a subcomplex of itself.
    pub fn full(ambient: Arc<GradedVectorSpace>) -> Self {
        let inclusion = ambient
            .degrees()
            .filter(|&g| ambient.dim(g) > 0)
            .map(|g| (g, Matrix::identity(ambient.dim(g))))
            .collect();
        Subcomplex::new(ambient.clone(), inclusion).expect("identity inclusions are valid")
    }

    pub fn ambient(&self) -> &Arc<GradedVectorSpace> {
        &self.ambient
    }

    pub fn w_space(&self) -> &Arc<GradedVectorSpace> {
        &self.space
    }

    pub fn dim(&self, g: Degree) -> usize {
        self.space.dim(g)
    }

    pub fn total_dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn shape(&self) -> WShape {
        WShape::new(
            self.space
                .degrees()
                .map(|g| (g, self.space.dim(g)))
                .collect(),
        )
    }

    pub fn inclusion_block(&self, g: Degree) -> Matrix {
        self.inclusion
            .get(&g)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.ambient.dim(g), 0))
    }

    /// Ambient coordinates of a W basis vector.
    pub fn basis_ambient(&self, g: Degree, i: usize) -> HomogeneousVector {
        HomogeneousVector::new(g, self.inclusion_block(g).col(i))
    }

    pub fn to_ambient(&self, w: &WElement) -> HomogeneousVector {
        assert_eq!(w.coords.len(), self.dim(w.degree));
        HomogeneousVector::new(
            w.degree,
            self.inclusion_block(w.degree).mul_vec(&w.coords),
        )
    }

    /// Exact membership test: solves `inclusion · x = v`. The inclusion
    /// has full column rank, so coordinates are unique when they exist.
    pub fn from_ambient(&self, v: &HomogeneousVector) -> Result<WElement> {
        let block = self.inclusion_block(v.degree);
        match block.solve_linear(&v.coords)? {
            Some(x) => Ok(WElement::new(v.degree, x)),
            None => Err(Error::NotInSubspace { degree: v.degree }),
        }
    }
}

/// Validated homotopy datum: the algebra, the subcomplex, the odd
/// homotopy `Q`, the projector `P = 1 − [d,Q]`, and the exact
/// factorizations of `P` and `d|_W` through the inclusion.
#[derive(Clone, Debug)]
pub struct TransferDatum {
    algebra: Arc<Dga>,
    w: Subcomplex,
    q: GradedMap,
    p: GradedMap,
    /// `inclusion(g) · p_w(g) = P(g)` exactly, per degree.
    p_w: BTreeMap<Degree, Matrix>,
    /// `inclusion(g+1) · d_w(g) = d(g) · inclusion(g)` exactly.
    d_w: BTreeMap<Degree, Matrix>,
}

/// Verifies the homotopy datum: `Q` is odd of shift −1, `W` is
/// d-invariant, and `(1 − [d,Q])v` lies in `W` for every ambient basis
/// vector `v`. Failures carry the witness basis vector. `P` is not
/// required to restrict to the identity on `W`, nor to be onto.
pub fn check_assumption(
    algebra: Arc<Dga>,
    w: Subcomplex,
    q: GradedMap,
) -> Result<TransferDatum> {
    let space = algebra.space().clone();
    if w.ambient() != &space {
        return Err(Error::SpaceMismatch {
            context: "subcomplex lives in a different ambient space".into(),
        });
    }
    if q.source() != &space || q.target() != &space {
        return Err(Error::SpaceMismatch {
            context: "homotopy must be an endomorphism of the algebra space".into(),
        });
    }
    if q.shift() != -1 {
        return Err(Error::ShiftMismatch { expected: -1, got: q.shift() });
    }

    let d = algebra.differential();

    // d-invariance: factor d·inclusion through the inclusion.
    let mut d_w = BTreeMap::new();
    for g in space.degrees() {
        let wd = w.dim(g);
        if wd == 0 {
            continue;
        }
        let d_inc = d.block(g).mul(&w.inclusion_block(g));
        let target = w.inclusion_block(g + 1);
        if w.dim(g + 1) == 0 {
            if let Some(col) = first_nonzero_col(&d_inc) {
                return Err(Error::NotDInvariant { degree: g, index: col });
            }
            d_w.insert(g, Matrix::zeros(0, wd));
        } else {
            match target.solve_matrix(&d_inc)? {
                Some(x) => {
                    d_w.insert(g, x);
                }
                None => {
                    // pinpoint the first basis vector that escapes
                    let col = (0..wd)
                        .find(|&i| target.solve_linear(&d_inc.col(i)).unwrap().is_none())
                        .expect("some column is inconsistent");
                    return Err(Error::NotDInvariant { degree: g, index: col });
                }
            }
        }
    }

    // P = 1 − [d, Q]; membership of P(v) in W for every basis vector.
    let p = GradedMap::identity(space.clone()).sub(&supercommutator(d, &q)?)?;
    let mut p_w = BTreeMap::new();
    for g in space.degrees() {
        let n = space.dim(g);
        if n == 0 {
            continue;
        }
        let p_block = p.block(g);
        let inc = w.inclusion_block(g);
        if w.dim(g) == 0 {
            if let Some(col) = first_nonzero_col(&p_block) {
                return Err(Error::AssumptionViolated { degree: g, index: col });
            }
            p_w.insert(g, Matrix::zeros(0, n));
        } else {
            match inc.solve_matrix(&p_block)? {
                Some(x) => {
                    p_w.insert(g, x);
                }
                None => {
                    let col = (0..n)
                        .find(|&i| inc.solve_linear(&p_block.col(i)).unwrap().is_none())
                        .expect("some column is inconsistent");
                    return Err(Error::AssumptionViolated { degree: g, index: col });
                }
            }
        }
    }

    // Consequence of d² = 0, asserted exactly.
    if !supercommutator(d, &p)?.is_zero() {
        return Err(Error::HodgeBuild(
            "[d, 1 − [d,Q]] does not vanish — is d a differential?".into(),
        ));
    }

    Ok(TransferDatum { algebra, w, q, p, p_w, d_w })
}

fn first_nonzero_col(m: &Matrix) -> Option<usize> {
    (0..m.cols()).find(|&c| !m.col(c).iter().all(Scalar::is_zero))
}

impl TransferDatum {
    /// Trivial datum: `W = V`, `Q = 0`, so `P = Id`, `μ₂` is the
    /// original product and every higher `μ` vanishes.
    pub fn trivial(algebra: Arc<Dga>) -> Result<TransferDatum> {
        let space = algebra.space().clone();
        let w = Subcomplex::full(space.clone());
        let q = GradedMap::zero(space.clone(), space, -1);
        check_assumption(algebra, w, q)
    }

    pub fn algebra(&self) -> &Arc<Dga> {
        &self.algebra
    }

    pub fn subcomplex(&self) -> &Subcomplex {
        &self.w
    }

    pub fn homotopy(&self) -> &GradedMap {
        &self.q
    }

    pub fn projector(&self) -> &GradedMap {
        &self.p
    }

    /// W-coordinate block of the projector at a degree.
    pub fn projector_in_w(&self, g: Degree) -> Matrix {
        self.p_w
            .get(&g)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.w.dim(g), self.algebra.space().dim(g)))
    }

    /// W-differential block at a degree (the μ₁ table).
    pub fn d_in_w(&self, g: Degree) -> Matrix {
        self.d_w
            .get(&g)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.w.dim(g + 1), self.w.dim(g)))
    }

    /// First W basis vector on which `P` is not the identity, if any.
    pub fn projector_defect_witness(&self) -> Option<(Degree, usize)> {
        for g in self.algebra.space().degrees() {
            for i in 0..self.w.dim(g) {
                let v = self.w.basis_ambient(g, i);
                if self.p.apply(&v) != v {
                    return Some((g, i));
                }
            }
        }
        None
    }

    pub fn p_restricted_to_w_is_identity(&self) -> bool {
        self.projector_defect_witness().is_none()
    }

    /// Applies `P` and expresses the result in W coordinates (exact by
    /// the validated factorization).
    pub fn project_to_w(&self, v: &HomogeneousVector) -> WElement {
        WElement::new(v.degree, self.projector_in_w(v.degree).mul_vec(&v.coords))
    }

    /// Stateless λ on arbitrary homogeneous ambient arguments.
    pub fn lambda(&self, args: &[HomogeneousVector]) -> HomogeneousVector {
        lambda_eval(&self.algebra, &self.q, args)
    }
}

/// Evaluates λₙ (n ≥ 2) on arbitrary homogeneous arguments by dynamic
/// programming over contiguous argument ranges: the recursion only ever
/// consumes prefixes and suffixes, so each of the O(n²) ranges is
/// computed once.
pub fn lambda_eval(algebra: &Dga, q: &GradedMap, args: &[HomogeneousVector]) -> HomogeneousVector {
    let n = args.len();
    assert!(n >= 2, "λ is defined for n ≥ 2");
    let space = algebra.space();
    for a in args {
        assert_eq!(a.coords.len(), space.dim(a.degree), "non-homogeneous argument");
    }

    let degree_sum = |i: usize, j: usize| -> Degree { args[i..j].iter().map(|a| a.degree).sum() };
    let parity_prefix =
        |i: usize, j: usize| -> u8 { (args[i..j].iter().map(|a| a.parity() as u32).sum::<u32>() % 2) as u8 };

    // q_lam[i][j] = Q λ_{j−i}(args[i..j]), with Qλ₁ = −Id on singletons.
    let mut q_lam: Vec<Vec<Option<HomogeneousVector>>> = vec![vec![None; n + 1]; n + 1];
    for i in 0..n {
        q_lam[i][i + 1] = Some(args[i].neg());
    }
    let mut top = None;
    for len in 2..=n {
        for i in 0..=(n - len) {
            let j = i + len;
            let out_degree = degree_sum(i, j) + 2 - len as Degree;
            let mut acc = space.zero_vector(out_degree);
            for mid in (i + 1)..j {
                let a = q_lam[i][mid].as_ref().expect("shorter range computed");
                let b = q_lam[mid][j].as_ref().expect("shorter range computed");
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                let k = (mid - i) as i64;
                let l = (j - mid) as i64;
                let exp = lambda_sign_exponent(k, l, parity_prefix(i, mid));
                let prod = algebra.mult().product(a, b);
                debug_assert_eq!(prod.degree, out_degree);
                // overall −Σ(−1)^exp
                acc = if exp == 0 { acc.sub(&prod) } else { acc.add(&prod) };
            }
            if len == n {
                top = Some(acc);
            } else {
                q_lam[i][j] = Some(q.apply(&acc));
            }
        }
    }
    top.expect("n ≥ 2 computes the full range")
}

/// The associativity defect of the λ tensors (zero for every DGA and
/// every homotopy):
/// `Φₙ = Σ_{k+l=n+1, k,l≥2} Σ_j (−1)^r λ_k(v₁,…,v_j, λ_l(…), …)`.
pub fn phi(algebra: &Dga, q: &GradedMap, args: &[HomogeneousVector]) -> HomogeneousVector {
    let n = args.len();
    assert!(n >= 3, "Φ is defined for n ≥ 3");
    let out_degree: Degree = args.iter().map(|a| a.degree).sum::<Degree>() + 3 - n as Degree;
    let mut acc = algebra.space().zero_vector(out_degree);
    for k in 2..=(n - 1) {
        let l = n + 1 - k;
        for j in 0..=(k - 1) {
            let inner = lambda_eval(algebra, q, &args[j..j + l]);
            let mut outer: Vec<HomogeneousVector> = Vec::with_capacity(k);
            outer.extend_from_slice(&args[..j]);
            outer.push(inner);
            outer.extend_from_slice(&args[j + l..]);
            let term = lambda_eval(algebra, q, &outer);
            let exp = assoc_sign_exponent(k as i64, l as i64, j as i64, tuple_parity(&args[..j]));
            acc = if exp == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
    }
    acc
}

/// The Leibniz defect of the λ tensors (zero for every DGA and every
/// homotopy):
/// `Θₙ = dλₙ + Σ_j (−1)^{n−1+ṽ₁+…+ṽ_j} λₙ(…, dv_{j+1}, …)
///        − Σ_{k+l=n+1, k,l≥2} Σ_j (−1)^r λ_k(…, [d,Q]λ_l(…), …)`.
pub fn theta(algebra: &Dga, q: &GradedMap, args: &[HomogeneousVector]) -> HomogeneousVector {
    let n = args.len();
    assert!(n >= 2, "Θ is defined for n ≥ 2");
    let d = algebra.differential();
    let mut acc = d.apply(&lambda_eval(algebra, q, args));

    for j in 0..n {
        let mut modified = args.to_vec();
        modified[j] = d.apply(&args[j]);
        let term = lambda_eval(algebra, q, &modified);
        let exp = (n as u32 - 1 + u32::from(tuple_parity(&args[..j]))) % 2;
        acc = if exp == 0 { acc.add(&term) } else { acc.sub(&term) };
    }

    let dq = supercommutator(d, q).expect("endomorphisms of one space");
    for k in 2..=n.saturating_sub(1) {
        let l = n + 1 - k;
        for j in 0..=(k - 1) {
            let inner = dq.apply(&lambda_eval(algebra, q, &args[j..j + l]));
            let mut outer: Vec<HomogeneousVector> = Vec::with_capacity(k);
            outer.extend_from_slice(&args[..j]);
            outer.push(inner);
            outer.extend_from_slice(&args[j + l..]);
            let term = lambda_eval(algebra, q, &outer);
            let exp = assoc_sign_exponent(k as i64, l as i64, j as i64, tuple_parity(&args[..j]));
            // minus the double sum
            acc = if exp == 0 { acc.sub(&term) } else { acc.add(&term) };
        }
    }
    acc
}

fn tuple_parity(args: &[HomogeneousVector]) -> u8 {
    (args.iter().map(|a| a.parity() as u32).sum::<u32>() % 2) as u8
}

fn w_tuple_parity(args: &[WElement]) -> u8 {
    (args.iter().map(|a| a.parity() as u32).sum::<u32>() % 2) as u8
}

/// Verification mode requested by the caller.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VerifyMode {
    /// All basis tuples per level, falling back to random tuples for
    /// levels whose tuple count exceeds the budget.
    Exhaustive,
    /// Seeded random tuples at every level.
    Random,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VerifyConfig {
    pub mode: VerifyMode,
    pub trials: usize,
    pub seed: u64,
    pub budget: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            mode: VerifyMode::Exhaustive,
            trials: 1000,
            seed: 0,
            budget: 100_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TowerFailure {
    pub n: usize,
    pub args: Vec<WElement>,
    pub residual: WElement,
}

#[derive(Clone, Debug)]
pub struct LevelReport {
    pub n: usize,
    /// `"exhaustive"` or `"random"` — the mode actually used.
    pub mode: &'static str,
    pub tuples: usize,
    pub failures: usize,
    pub first_failure: Option<TowerFailure>,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub levels: Vec<LevelReport>,
}

impl VerificationReport {
    pub fn all_zero(&self) -> bool {
        self.levels.iter().all(|l| l.failures == 0)
    }
}

/// The transferred A∞ structure: the datum, a verification order bound,
/// and memoized tables of λ and μ on basis tuples. Caches are guarded
/// by single-writer locks; evaluation is otherwise pure, so concurrent
/// readers at worst recompute a value.
pub struct AInftyStructure {
    datum: TransferDatum,
    max_order: usize,
    /// λ on ambient basis tuples, keyed by (degree, index) pairs.
    lambda_v_memo: Mutex<HashMap<Vec<(Degree, u32)>, HomogeneousVector>>,
    /// λ and Qλ on W basis tuples (ambient values), keyed by global
    /// W indices. These drive the μ tables.
    lambda_w_memo: Mutex<HashMap<Vec<u32>, HomogeneousVector>>,
    qlambda_w_memo: Mutex<HashMap<Vec<u32>, HomogeneousVector>>,
    mu_memo: Mutex<HashMap<Vec<u32>, WElement>>,
    shape: WShape,
}

impl AInftyStructure {
    pub fn new(datum: TransferDatum, max_order: usize) -> Self {
        assert!(max_order >= 1);
        let shape = datum.subcomplex().shape();
        AInftyStructure {
            datum,
            max_order,
            lambda_v_memo: Mutex::new(HashMap::new()),
            lambda_w_memo: Mutex::new(HashMap::new()),
            qlambda_w_memo: Mutex::new(HashMap::new()),
            mu_memo: Mutex::new(HashMap::new()),
            shape,
        }
    }

    pub fn datum(&self) -> &TransferDatum {
        &self.datum
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn shape(&self) -> &WShape {
        &self.shape
    }

    /// λ on arbitrary homogeneous ambient arguments; basis tuples are
    /// memoized.
    pub fn lambda(&self, args: &[HomogeneousVector]) -> Result<HomogeneousVector> {
        if args.len() < 2 {
            return Err(Error::NotHomogeneous);
        }
        let space = self.datum.algebra().space();
        for a in args {
            if a.coords.len() != space.dim(a.degree) {
                return Err(Error::NotHomogeneous);
            }
        }
        if let Some(key) = args
            .iter()
            .map(|a| {
                let mut nonzero = a.support();
                match (nonzero.next(), nonzero.next()) {
                    (Some((i, c)), None) if c.is_one() => Some((a.degree, i as u32)),
                    _ => None,
                }
            })
            .collect::<Option<Vec<_>>>()
        {
            if let Some(v) = self.lambda_v_memo.lock().unwrap().get(&key) {
                return Ok(v.clone());
            }
            let v = lambda_eval(self.datum.algebra(), self.datum.homotopy(), args);
            self.lambda_v_memo.lock().unwrap().insert(key, v.clone());
            return Ok(v);
        }
        Ok(lambda_eval(self.datum.algebra(), self.datum.homotopy(), args))
    }

    /// λ on a W basis tuple (ambient value), with global subrange
    /// memoization. The recursion only consumes contiguous subranges,
    /// which are themselves W basis tuples shared across calls.
    fn lambda_w(&self, idx: &[u32]) -> HomogeneousVector {
        debug_assert!(idx.len() >= 2);
        if let Some(v) = self.lambda_w_memo.lock().unwrap().get(idx) {
            return v.clone();
        }
        let n = idx.len();
        let algebra = self.datum.algebra();
        let degree_of = |i: u32| self.shape.global_to_pair(i).0;
        let out_degree: Degree =
            idx.iter().map(|&i| degree_of(i)).sum::<Degree>() + 2 - n as Degree;
        let mut acc = algebra.space().zero_vector(out_degree);
        for split in 1..n {
            let a = self.qlambda_w(&idx[..split]);
            if a.is_zero() {
                continue;
            }
            let b = self.qlambda_w(&idx[split..]);
            if b.is_zero() {
                continue;
            }
            let prefix_parity = (idx[..split]
                .iter()
                .map(|&i| parity_of_degree(degree_of(i)) as u32)
                .sum::<u32>()
                % 2) as u8;
            let exp = lambda_sign_exponent(split as i64, (n - split) as i64, prefix_parity);
            let prod = algebra.mult().product(&a, &b);
            debug_assert_eq!(prod.degree, out_degree);
            acc = if exp == 0 { acc.sub(&prod) } else { acc.add(&prod) };
        }
        self.lambda_w_memo
            .lock()
            .unwrap()
            .insert(idx.to_vec(), acc.clone());
        acc
    }

    fn qlambda_w(&self, idx: &[u32]) -> HomogeneousVector {
        if idx.len() == 1 {
            // sentinel Qλ₁ = −Id
            let (g, i) = self.shape.global_to_pair(idx[0]);
            return self.datum.subcomplex().basis_ambient(g, i).neg();
        }
        if let Some(v) = self.qlambda_w_memo.lock().unwrap().get(idx) {
            return v.clone();
        }
        let v = self.datum.homotopy().apply(&self.lambda_w(idx));
        self.qlambda_w_memo
            .lock()
            .unwrap()
            .insert(idx.to_vec(), v.clone());
        v
    }

    /// μ on a basis tuple of global W indices.
    pub fn mu_basis(&self, idx: &[u32]) -> WElement {
        assert!(!idx.is_empty());
        if let Some(v) = self.mu_memo.lock().unwrap().get(idx) {
            return v.clone();
        }
        let value = if idx.len() == 1 {
            let (g, i) = self.shape.global_to_pair(idx[0]);
            WElement::new(g + 1, self.datum.d_in_w(g).col(i))
        } else {
            let lam = self.lambda_w(idx);
            self.datum.project_to_w(&lam)
        };
        self.mu_memo
            .lock()
            .unwrap()
            .insert(idx.to_vec(), value.clone());
        value
    }

    /// μ on homogeneous W elements, extended multilinearly from basis
    /// tuples. μ₁ is `d|_W`; for n ≥ 2, `μₙ = P(λₙ)` in W coordinates.
    pub fn mu(&self, args: &[WElement]) -> Result<WElement> {
        self.check_w_args(args)?;
        mu_multilinear(&self.shape, args, &mut |idx| Ok(self.mu_basis(idx)))
    }

    /// Independent evaluation of the closed-form expansion
    /// `μₙ = −Σ_{k+l=n} (−1)^{k+(l−1)(ṽ₁+…+ṽ_k)} [Qλ_k]∘[Qλ_l]` with
    /// `a∘b = P(a·b)`, used as a cross-check against [`Self::mu`].
    pub fn mu_closed_form(&self, args: &[WElement]) -> Result<WElement> {
        self.check_w_args(args)?;
        let n = args.len();
        if n < 2 {
            return Err(Error::NotHomogeneous);
        }
        let algebra = self.datum.algebra();
        let q = self.datum.homotopy();
        let ambient: Vec<HomogeneousVector> =
            args.iter().map(|w| self.datum.subcomplex().to_ambient(w)).collect();
        let out_degree: Degree =
            args.iter().map(|a| a.degree).sum::<Degree>() + 2 - n as Degree;
        let mut acc = self.shape.zero(out_degree);
        for k in 1..n {
            let l = n - k;
            let a = if k == 1 {
                ambient[0].neg()
            } else {
                q.apply(&lambda_eval(algebra, q, &ambient[..k]))
            };
            let b = if l == 1 {
                ambient[n - 1].neg()
            } else {
                q.apply(&lambda_eval(algebra, q, &ambient[k..]))
            };
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let prod = algebra.mult().product(&a, &b);
            let term = self.datum.project_to_w(&prod);
            let exp = lambda_sign_exponent(k as i64, l as i64, tuple_parity(&ambient[..k]));
            acc = if exp == 0 { acc.sub(&term) } else { acc.add(&term) };
        }
        Ok(acc)
    }

    /// Left-hand side of the order-n associativity identity on the
    /// given W tuple; the tower holds iff this is the zero vector.
    pub fn tower_residual(&self, args: &[WElement]) -> Result<WElement> {
        self.check_w_args(args)?;
        tower_residual_with(&self.shape, args, &mut |a| self.mu(a))
    }

    /// Verifies the associativity tower for 1 ≤ n ≤ n_max, exhaustively
    /// over basis tuples while the tuple count stays within budget,
    /// otherwise on seeded random homogeneous tuples.
    pub fn verify(&self, n_max: usize, config: &VerifyConfig) -> Result<VerificationReport> {
        if n_max > self.max_order {
            return Err(Error::Table(format!(
                "verification order {n_max} exceeds the structure's max order {}",
                self.max_order
            )));
        }
        verify_with(&self.shape, n_max, config, &mut |a| self.mu(a))
    }

    /// Snapshot of the memoized μ tables, grouped by arity.
    pub fn mu_tables(&self) -> BTreeMap<usize, BTreeMap<Vec<u32>, WElement>> {
        let memo = self.mu_memo.lock().unwrap();
        let mut out: BTreeMap<usize, BTreeMap<Vec<u32>, WElement>> = BTreeMap::new();
        for (k, v) in memo.iter() {
            out.entry(k.len()).or_default().insert(k.clone(), v.clone());
        }
        out
    }

    fn check_w_args(&self, args: &[WElement]) -> Result<()> {
        if args.is_empty() {
            return Err(Error::NotHomogeneous);
        }
        for a in args {
            if a.coords.len() != self.shape.dim(a.degree) {
                return Err(Error::NotHomogeneous);
            }
        }
        Ok(())
    }
}

/// Multilinear extension of a basis-tuple evaluator.
fn mu_multilinear<F>(shape: &WShape, args: &[WElement], mu_basis: &mut F) -> Result<WElement>
where
    F: FnMut(&[u32]) -> Result<WElement>,
{
    let n = args.len();
    let out_degree: Degree = args.iter().map(|a| a.degree).sum::<Degree>() + 2 - n as Degree;
    let mut acc = shape.zero(out_degree);
    let supports: Vec<Vec<(u32, Scalar)>> = args
        .iter()
        .map(|a| {
            a.support()
                .map(|(i, c)| (shape.pair_to_global(a.degree, i), c.clone()))
                .collect()
        })
        .collect();
    if supports.iter().any(Vec::is_empty) {
        return Ok(acc);
    }
    let mut cursor = vec![0usize; n];
    loop {
        let mut tuple = Vec::with_capacity(n);
        let mut coeff: Scalar = num::One::one();
        for (slot, &c) in cursor.iter().enumerate() {
            let (idx, ref s) = supports[slot][c];
            tuple.push(idx);
            coeff *= s;
        }
        let v = mu_basis(&tuple)?;
        debug_assert_eq!(v.degree, out_degree, "degree law violated");
        acc = acc.add(&v.scale(&coeff));
        // odometer increment
        let mut slot = n;
        loop {
            if slot == 0 {
                return Ok(acc);
            }
            slot -= 1;
            cursor[slot] += 1;
            if cursor[slot] < supports[slot].len() {
                break;
            }
            cursor[slot] = 0;
        }
    }
}

/// Order-n associativity residual evaluated through an arbitrary μ
/// implementation (engine or stored table).
fn tower_residual_with<F>(shape: &WShape, args: &[WElement], mu: &mut F) -> Result<WElement>
where
    F: FnMut(&[WElement]) -> Result<WElement>,
{
    let n = args.len();
    let out_degree: Degree = args.iter().map(|a| a.degree).sum::<Degree>() + 3 - n as Degree;
    let mut acc = shape.zero(out_degree);
    for k in 1..=n {
        let l = n + 1 - k;
        for j in 0..=(k - 1) {
            let inner = mu(&args[j..j + l])?;
            let mut outer: Vec<WElement> = Vec::with_capacity(k);
            outer.extend_from_slice(&args[..j]);
            outer.push(inner);
            outer.extend_from_slice(&args[j + l..]);
            let term = mu(&outer)?;
            let exp = assoc_sign_exponent(k as i64, l as i64, j as i64, w_tuple_parity(&args[..j]));
            acc = if exp == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
    }
    Ok(acc)
}

fn level_rng(seed: u64, n: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn verify_with<F>(
    shape: &WShape,
    n_max: usize,
    config: &VerifyConfig,
    mu: &mut F,
) -> Result<VerificationReport>
where
    F: FnMut(&[WElement]) -> Result<WElement>,
{
    let total = shape.total_dim();
    let mut levels = Vec::new();
    for n in 1..=n_max {
        if total == 0 {
            levels.push(LevelReport {
                n,
                mode: "exhaustive",
                tuples: 0,
                failures: 0,
                first_failure: None,
            });
            continue;
        }
        let exhaustive_count = (total as u128).checked_pow(n as u32);
        let exhaustive = config.mode == VerifyMode::Exhaustive
            && exhaustive_count.is_some_and(|c| c <= config.budget as u128);
        let mut level = LevelReport {
            n,
            mode: if exhaustive { "exhaustive" } else { "random" },
            tuples: 0,
            failures: 0,
            first_failure: None,
        };
        let mut run = |args: &[WElement], level: &mut LevelReport| -> Result<()> {
            let residual = tower_residual_with(shape, args, mu)?;
            level.tuples += 1;
            if !residual.is_zero() {
                level.failures += 1;
                if level.first_failure.is_none() {
                    level.first_failure = Some(TowerFailure {
                        n,
                        args: args.to_vec(),
                        residual,
                    });
                }
            }
            Ok(())
        };
        if exhaustive {
            let mut indices = vec![0u32; n];
            'outer: loop {
                let args: Vec<WElement> = indices.iter().map(|&i| shape.basis(i)).collect();
                run(&args, &mut level)?;
                let mut slot = n;
                loop {
                    if slot == 0 {
                        break 'outer;
                    }
                    slot -= 1;
                    indices[slot] += 1;
                    if (indices[slot] as usize) < total {
                        break;
                    }
                    indices[slot] = 0;
                }
            }
        } else {
            let mut rng = level_rng(config.seed, n);
            for _ in 0..config.trials {
                let args: Vec<WElement> =
                    (0..n).map(|_| shape.random_element(&mut rng)).collect();
                run(&args, &mut level)?;
            }
        }
        levels.push(level);
    }
    Ok(VerificationReport { levels })
}

/// Exported μ tables: everything needed to re-check the verification
/// against stored values — the W profile, the verification
/// configuration with its seed, the per-level summary, and the μ values
/// on every basis tuple the original run evaluated.
#[derive(Clone, Debug)]
pub struct MuTable {
    pub algebra_hash: String,
    pub q_hash: String,
    pub w_dims: BTreeMap<Degree, usize>,
    pub max_order: usize,
    pub config: VerifyConfig,
    pub levels: Vec<(usize, String, usize, usize)>,
    pub all_zero: bool,
    pub tables: BTreeMap<usize, BTreeMap<Vec<u32>, WElement>>,
}

impl MuTable {
    pub fn from_structure(
        structure: &AInftyStructure,
        report: &VerificationReport,
        config: VerifyConfig,
        algebra_hash: String,
        q_hash: String,
    ) -> Self {
        MuTable {
            algebra_hash,
            q_hash,
            w_dims: structure.shape().dims(),
            max_order: structure.max_order(),
            config,
            levels: report
                .levels
                .iter()
                .map(|l| (l.n, l.mode.to_string(), l.tuples, l.failures))
                .collect(),
            all_zero: report.all_zero(),
            tables: structure.mu_tables(),
        }
    }

    pub fn shape(&self) -> WShape {
        WShape::new(self.w_dims.clone())
    }

    pub fn lookup(&self, idx: &[u32]) -> Result<WElement> {
        self.tables
            .get(&idx.len())
            .and_then(|t| t.get(idx))
            .cloned()
            .ok_or_else(|| Error::Table(format!("missing μ entry for tuple {idx:?}")))
    }

    /// μ from the stored tables only (multilinear extension).
    pub fn mu(&self, args: &[WElement]) -> Result<WElement> {
        let shape = self.shape();
        mu_multilinear(&shape, args, &mut |idx| self.lookup(idx))
    }

    /// Replays the stored verification schedule — the same tuple
    /// streams, reconstructed from the stored seed and budget — with μ
    /// read from the tables instead of recomputed.
    pub fn verify_stored(&self) -> Result<VerificationReport> {
        let shape = self.shape();
        let n_max = self
            .levels
            .iter()
            .map(|&(n, ..)| n)
            .max()
            .unwrap_or(self.max_order);
        verify_with(&shape, n_max, &self.config, &mut |a| {
            mu_multilinear(&shape, a, &mut |idx| self.lookup(idx))
        })
    }
}
