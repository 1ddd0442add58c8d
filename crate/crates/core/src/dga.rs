//! Differential graded superalgebras: structure-constant representation,
//! axiom validation, a catalog of certified examples, and seeded random
//! generation by tensor products and direct sums.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graded::{parity_of_degree, Degree, GradedMap, GradedVectorSpace, HomogeneousVector};
use crate::linalg::{scalar_int, Matrix, Scalar};
use crate::simplicial::SimplicialComplex;
use crate::{Error, Result};

/// Degree-additive bilinear multiplication given by structure
/// constants. For each degree pair `(p, q)` with all three of `p`, `q`,
/// `p+q` carrying nonzero dimension, the block is a
/// `dim(p+q) × dim(p)·dim(q)` matrix whose column `i·dim(q) + j` holds
/// the coordinates of `basis_p[i] · basis_q[j]`. All-zero blocks are
/// omitted (canonical form).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiplicationTable {
    space: Arc<GradedVectorSpace>,
    pairs: BTreeMap<(Degree, Degree), Matrix>,
}

impl MultiplicationTable {
    pub fn new(
        space: Arc<GradedVectorSpace>,
        pairs: BTreeMap<(Degree, Degree), Matrix>,
    ) -> Result<Self> {
        let mut canonical = BTreeMap::new();
        for ((p, q), block) in pairs {
            let (dp, dq, dpq) = (space.dim(p), space.dim(q), space.dim(p + q));
            if block.rows() != dpq || block.cols() != dp * dq {
                return Err(Error::InvalidGradedData(format!(
                    "product block ({p},{q}) has shape {}×{}, expected {}×{}",
                    block.rows(),
                    block.cols(),
                    dpq,
                    dp * dq
                )));
            }
            if !block.is_zero() {
                canonical.insert((p, q), block);
            }
        }
        Ok(MultiplicationTable { space, pairs: canonical })
    }

    /// Builds from a pointwise product on basis pairs.
    pub fn from_fn(
        space: Arc<GradedVectorSpace>,
        mut product: impl FnMut(Degree, usize, Degree, usize) -> HomogeneousVector,
    ) -> Result<Self> {
        let mut pairs = BTreeMap::new();
        for p in space.degrees() {
            for q in space.degrees() {
                let (dp, dq, dpq) = (space.dim(p), space.dim(q), space.dim(p + q));
                if dp == 0 || dq == 0 || dpq == 0 {
                    continue;
                }
                let mut block = Matrix::zeros(dpq, dp * dq);
                for i in 0..dp {
                    for j in 0..dq {
                        let v = product(p, i, q, j);
                        assert_eq!(v.degree, p + q, "product of degrees {p},{q} must land in {}", p + q);
                        assert_eq!(v.coords.len(), dpq);
                        for (r, c) in v.coords.iter().enumerate() {
                            block.set(r, i * dq + j, c.clone());
                        }
                    }
                }
                pairs.insert((p, q), block);
            }
        }
        MultiplicationTable::new(space, pairs)
    }

    pub fn space(&self) -> &Arc<GradedVectorSpace> {
        &self.space
    }

    pub fn blocks(&self) -> &BTreeMap<(Degree, Degree), Matrix> {
        &self.pairs
    }

    /// Product of two basis vectors.
    pub fn product_basis(&self, p: Degree, i: usize, q: Degree, j: usize) -> HomogeneousVector {
        let dq = self.space.dim(q);
        match self.pairs.get(&(p, q)) {
            Some(block) => HomogeneousVector::new(p + q, block.col(i * dq + j)),
            None => self.space.zero_vector(p + q),
        }
    }

    /// Bilinear product of two homogeneous elements.
    pub fn product(&self, u: &HomogeneousVector, v: &HomogeneousVector) -> HomogeneousVector {
        let out_deg = u.degree + v.degree;
        let mut out = self.space.zero_vector(out_deg);
        if out.coords.is_empty() {
            return out;
        }
        let Some(block) = self.pairs.get(&(u.degree, v.degree)) else {
            return out;
        };
        let dq = self.space.dim(v.degree);
        for (i, a) in u.support() {
            for (j, b) in v.support() {
                let coeff = a * b;
                let col = i * dq + j;
                for r in 0..out.coords.len() {
                    let entry = block.get(r, col);
                    if !entry.is_zero() {
                        out.coords[r] += entry * &coeff;
                    }
                }
            }
        }
        out
    }
}

/// A differential graded superalgebra. Construction checks shapes and
/// the degree conventions (differential shift +1, unit in degree 0);
/// the axioms themselves — d² = 0, Leibniz, associativity — are checked
/// by [`Dga::validate`], never assumed.
#[derive(Clone, PartialEq, Debug)]
pub struct Dga {
    name: String,
    space: Arc<GradedVectorSpace>,
    d: GradedMap,
    mult: MultiplicationTable,
    unit: Option<HomogeneousVector>,
}

impl Dga {
    pub fn new(
        name: impl Into<String>,
        space: Arc<GradedVectorSpace>,
        d: GradedMap,
        mult: MultiplicationTable,
        unit: Option<HomogeneousVector>,
    ) -> Result<Self> {
        if d.source() != &space || d.target() != &space {
            return Err(Error::SpaceMismatch {
                context: "differential must be an endomorphism of the algebra space".into(),
            });
        }
        if d.shift() != 1 {
            return Err(Error::ShiftMismatch { expected: 1, got: d.shift() });
        }
        if mult.space() != &space {
            return Err(Error::SpaceMismatch {
                context: "multiplication table lives on a different space".into(),
            });
        }
        if let Some(u) = &unit {
            if u.degree != 0 || u.coords.len() != space.dim(0) {
                return Err(Error::InvalidGradedData("unit must be a degree-0 element".into()));
            }
        }
        Ok(Dga { name: name.into(), space, d, mult, unit })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Arc<GradedVectorSpace> {
        &self.space
    }

    pub fn differential(&self) -> &GradedMap {
        &self.d
    }

    pub fn mult(&self) -> &MultiplicationTable {
        &self.mult
    }

    pub fn unit(&self) -> Option<&HomogeneousVector> {
        self.unit.as_ref()
    }

    pub fn multiply(&self, u: &HomogeneousVector, v: &HomogeneousVector) -> HomogeneousVector {
        self.mult.product(u, v)
    }

    pub fn d_apply(&self, v: &HomogeneousVector) -> HomogeneousVector {
        self.d.apply(v)
    }

    /// Checks d² = 0 blockwise, the Leibniz rule on all basis pairs, and
    /// associativity on all basis triples. Exact zero residuals
    /// required; the first failure is reported with its witness.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport {
            d_squared_ok: true,
            leibniz_ok: true,
            assoc_ok: true,
            first_failure: None,
        };

        let dd = GradedMap::compose(&self.d, &self.d).expect("endomorphism composes");
        'dsq: for g in self.space.degrees() {
            let block = dd.block(g);
            for i in 0..self.space.dim(g) {
                let col = block.col(i);
                if !col.iter().all(Scalar::is_zero) {
                    report.d_squared_ok = false;
                    report.record(ValidationFailure {
                        rule: "d_squared",
                        degrees: vec![g],
                        indices: vec![i],
                        residual: HomogeneousVector::new(g + 2, col),
                    });
                    break 'dsq;
                }
            }
        }

        'leibniz: for p in self.space.degrees() {
            for q in self.space.degrees() {
                for i in 0..self.space.dim(p) {
                    for j in 0..self.space.dim(q) {
                        let u = self.space.basis_vector(p, i);
                        let v = self.space.basis_vector(q, j);
                        let lhs = self.d_apply(&self.multiply(&u, &v));
                        let mut rhs = self.multiply(&self.d_apply(&u), &v);
                        let second = self.multiply(&u, &self.d_apply(&v));
                        rhs = if parity_of_degree(p) == 1 {
                            rhs.sub(&second)
                        } else {
                            rhs.add(&second)
                        };
                        let residual = lhs.sub(&rhs);
                        if !residual.is_zero() {
                            report.leibniz_ok = false;
                            report.record(ValidationFailure {
                                rule: "leibniz",
                                degrees: vec![p, q],
                                indices: vec![i, j],
                                residual,
                            });
                            break 'leibniz;
                        }
                    }
                }
            }
        }

        'assoc: for p in self.space.degrees() {
            for q in self.space.degrees() {
                for r in self.space.degrees() {
                    for i in 0..self.space.dim(p) {
                        for j in 0..self.space.dim(q) {
                            for k in 0..self.space.dim(r) {
                                let u = self.space.basis_vector(p, i);
                                let v = self.space.basis_vector(q, j);
                                let w = self.space.basis_vector(r, k);
                                let left = self.multiply(&self.multiply(&u, &v), &w);
                                let right = self.multiply(&u, &self.multiply(&v, &w));
                                let residual = left.sub(&right);
                                if !residual.is_zero() {
                                    report.assoc_ok = false;
                                    report.record(ValidationFailure {
                                        rule: "associativity",
                                        degrees: vec![p, q, r],
                                        indices: vec![i, j, k],
                                        residual,
                                    });
                                    break 'assoc;
                                }
                            }
                        }
                    }
                }
            }
        }

        report
    }
}

#[derive(Clone, Debug)]
pub struct ValidationFailure {
    pub rule: &'static str,
    pub degrees: Vec<Degree>,
    pub indices: Vec<usize>,
    pub residual: HomogeneousVector,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub d_squared_ok: bool,
    pub leibniz_ok: bool,
    pub assoc_ok: bool,
    pub first_failure: Option<ValidationFailure>,
}

impl ValidationReport {
    fn record(&mut self, failure: ValidationFailure) {
        if self.first_failure.is_none() {
            self.first_failure = Some(failure);
        }
    }

    pub fn is_valid(&self) -> bool {
        self.d_squared_ok && self.leibniz_ok && self.assoc_ok
    }
}

/// Simplicial cochain algebra: degree-p space spanned by indicator
/// cochains of p-simplices, simplicial coboundary with alternating
/// signs, front-face/back-face cup product, constant unit.
pub fn build_simplicial_cochain_dga(complex: &SimplicialComplex) -> Result<Dga> {
    // Reject complexes that are not closed under faces. Complexes built
    // by the provided constructors always are; this guards hand-made
    // ones arriving through other code paths.
    let closed = SimplicialComplex::from_facets(
        complex.vertices().to_vec(),
        (0..=complex.max_dim())
            .flat_map(|p| complex.simplices(p).to_vec())
            .collect(),
    )?;
    if &closed != complex {
        return Err(Error::Simplicial("complex is not closed under faces".into()));
    }

    let max_dim = complex.max_dim();
    let dims: Vec<usize> = (0..=max_dim).map(|p| complex.simplices(p).len()).collect();
    let labels: Vec<Vec<String>> = (0..=max_dim)
        .map(|p| {
            complex
                .simplices(p)
                .iter()
                .map(|s| complex.simplex_label(s))
                .collect()
        })
        .collect();
    let space = GradedVectorSpace::new(0, dims, labels)?;

    // Coboundary: the coefficient of τ* in d(σ*) is (−1)^i when σ is
    // obtained from τ by dropping its i-th vertex.
    let mut d_blocks = BTreeMap::new();
    for p in 0..max_dim {
        let rows = complex.simplices(p + 1).len();
        let cols = complex.simplices(p).len();
        let mut block = Matrix::zeros(rows, cols);
        for (row, tau) in complex.simplices(p + 1).iter().enumerate() {
            for drop in 0..tau.len() {
                let mut face = tau.clone();
                face.remove(drop);
                let col = complex
                    .index_of(&face)
                    .ok_or_else(|| Error::Simplicial("face missing from closure".into()))?;
                let sign = if drop % 2 == 0 { 1 } else { -1 };
                let v = block.get(row, col) + scalar_int(sign);
                block.set(row, col, v);
            }
        }
        d_blocks.insert(p as Degree, block);
    }
    let d = GradedMap::new(space.clone(), space.clone(), 1, d_blocks)?;

    // Cup product on indicators: σ* ∪ τ* = (σ ∪ τ)* when σ's last
    // vertex is τ's first and the union is a simplex of the complex.
    let mult = MultiplicationTable::from_fn(space.clone(), |p, i, q, j| {
        let sigma = &complex.simplices(p as usize)[i];
        let tau = &complex.simplices(q as usize)[j];
        let mut out = space.zero_vector(p + q);
        if sigma.last() == tau.first() {
            let mut joined = sigma.clone();
            joined.extend_from_slice(&tau[1..]);
            if joined.windows(2).all(|w| w[0] < w[1]) {
                if let Some(idx) = complex.index_of(&joined) {
                    out.coords[idx] = Scalar::one();
                }
            }
        }
        out
    })?;

    let unit = HomogeneousVector::new(0, vec![Scalar::one(); space.dim(0)]);
    Dga::new("simplicial", space, d, mult, Some(unit))
}

/// Exterior algebra on odd (degree 1) generators, with a differential
/// given on generators as combinations of quadratic monomials and
/// extended as an odd derivation.
fn exterior_dga(
    name: &str,
    generators: &[&str],
    d_gen: &BTreeMap<usize, Vec<(Scalar, (usize, usize))>>,
) -> Result<Dga> {
    let n = generators.len();
    // monomials[k] = strictly increasing index lists of length k
    let mut monomials: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n + 1];
    for mask in 0u32..(1 << n) {
        let m: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        monomials[m.len()].push(m);
    }
    for group in &mut monomials {
        group.sort();
    }
    let index_of = |m: &[usize]| -> usize {
        monomials[m.len()].binary_search_by(|x| x.as_slice().cmp(m)).unwrap()
    };

    let dims: Vec<usize> = monomials.iter().map(Vec::len).collect();
    let labels: Vec<Vec<String>> = monomials
        .iter()
        .map(|group| {
            group
                .iter()
                .map(|m| {
                    if m.is_empty() {
                        "1".to_string()
                    } else {
                        m.iter().map(|&i| generators[i]).collect::<String>()
                    }
                })
                .collect()
        })
        .collect();
    let space = GradedVectorSpace::new(0, dims, labels)?;

    // wedge of two monomials: None if they share a generator, else the
    // merged monomial with the inversion-count sign
    let wedge = |a: &[usize], b: &[usize]| -> Option<(i64, Vec<usize>)> {
        let mut merged: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
        let mut inversions = 0i64;
        for &x in a {
            inversions += b.iter().filter(|&&y| y < x).count() as i64;
            if b.contains(&x) {
                return None;
            }
        }
        merged.sort_unstable();
        Some((if inversions % 2 == 0 { 1 } else { -1 }, merged))
    };

    let mult = MultiplicationTable::from_fn(space.clone(), |p, i, q, j| {
        let a = &monomials[p as usize][i];
        let b = &monomials[q as usize][j];
        let mut out = space.zero_vector(p + q);
        if let Some((sign, m)) = wedge(a, b) {
            out.coords[index_of(&m)] = scalar_int(sign);
        }
        out
    })?;

    let mut d_blocks = BTreeMap::new();
    for k in 0..n {
        let rows = monomials[k + 1].len();
        let cols = monomials[k].len();
        let mut block = Matrix::zeros(rows, cols);
        for (col, m) in monomials[k].iter().enumerate() {
            // derivation: d(g_{i1}...g_{ik}) = Σ_j (−1)^j g_{i1}.. d(g_{ij}) ..g_{ik}
            for (pos, &gen) in m.iter().enumerate() {
                let Some(terms) = d_gen.get(&gen) else { continue };
                let prefix = &m[..pos];
                let suffix = &m[pos + 1..];
                for (coeff, (u, v)) in terms {
                    let Some((s1, w1)) = wedge(prefix, &[*u, *v]) else { continue };
                    let Some((s2, w2)) = wedge(&w1, suffix) else { continue };
                    let sign = if pos % 2 == 0 { 1 } else { -1 };
                    let row = index_of(&w2);
                    let val = block.get(row, col) + coeff * scalar_int(sign * s1 * s2);
                    block.set(row, col, val);
                }
            }
        }
        d_blocks.insert(k as Degree, block);
    }
    let d = GradedMap::new(space.clone(), space.clone(), 1, d_blocks)?;

    let mut unit = space.zero_vector(0);
    unit.coords[0] = Scalar::one();
    Dga::new(name, space, d, mult, Some(unit))
}

/// Names accepted by [`builtin_dga`].
pub const BUILTIN_NAMES: &[&str] = &[
    "point",
    "interval",
    "sphere2",
    "torus",
    "exterior2",
    "dual_numbers",
    "massey_witness",
];

/// The catalog of certified examples.
///
/// * `point`, `interval`, `sphere2`, `torus`: simplicial cochain
///   algebras (`sphere2` is the boundary of the 3-simplex; `torus` the
///   7-vertex triangulation).
/// * `exterior2`: exterior algebra on two degree-1 generators, zero
///   differential.
/// * `dual_numbers`: `ℚ[ε]/(ε²)` concentrated in degree 0.
/// * `massey_witness`: exterior algebra on x, y, z (degree 1) with
///   dz = xy — the classes of x and y are closed and non-exact, xy is
///   exact, and the triple product `<[x],[y],[y]>` is nonzero, so the
///   transferred μ₃ on harmonic representatives cannot vanish.
pub fn builtin_dga(name: &str) -> Result<Dga> {
    match name {
        "point" => {
            let complex = SimplicialComplex::from_facets(vec!["p".into()], vec![vec![0]])?;
            let mut dga = build_simplicial_cochain_dga(&complex)?;
            dga.name = "point".into();
            Ok(dga)
        }
        "interval" => {
            let complex =
                SimplicialComplex::from_facets(vec!["a".into(), "b".into()], vec![vec![0, 1]])?;
            let mut dga = build_simplicial_cochain_dga(&complex)?;
            dga.name = "interval".into();
            Ok(dga)
        }
        "sphere2" => {
            let vertices = ["a", "b", "c", "d"].map(String::from).to_vec();
            let facets = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
            let complex = SimplicialComplex::from_facets(vertices, facets)?;
            let mut dga = build_simplicial_cochain_dga(&complex)?;
            dga.name = "sphere2".into();
            Ok(dga)
        }
        "torus" => {
            let vertices: Vec<String> = (0..7).map(|i| format!("t{i}")).collect();
            let mut facets = Vec::new();
            for i in 0..7usize {
                let mut a = vec![i, (i + 1) % 7, (i + 3) % 7];
                let mut b = vec![i, (i + 2) % 7, (i + 3) % 7];
                a.sort_unstable();
                b.sort_unstable();
                facets.push(a);
                facets.push(b);
            }
            let complex = SimplicialComplex::from_facets(vertices, facets)?;
            let mut dga = build_simplicial_cochain_dga(&complex)?;
            dga.name = "torus".into();
            Ok(dga)
        }
        "exterior2" => exterior_dga("exterior2", &["x", "y"], &BTreeMap::new()),
        "dual_numbers" => {
            let space = GradedVectorSpace::new(0, vec![2], vec![vec!["1".into(), "eps".into()]])?;
            let d = GradedMap::zero(space.clone(), space.clone(), 1);
            let mult = MultiplicationTable::from_fn(space.clone(), |_, i, _, j| {
                let mut out = space.zero_vector(0);
                match (i, j) {
                    (0, 0) => out.coords[0] = Scalar::one(),
                    (0, 1) | (1, 0) => out.coords[1] = Scalar::one(),
                    _ => {}
                }
                out
            })?;
            let unit = HomogeneousVector::new(0, vec![Scalar::one(), Scalar::zero()]);
            Dga::new("dual_numbers", space, d, mult, Some(unit))
        }
        "massey_witness" => {
            let mut d_gen = BTreeMap::new();
            // dz = x∧y
            d_gen.insert(2, vec![(Scalar::one(), (0, 1))]);
            exterior_dga("massey_witness", &["x", "y", "z"], &d_gen)
        }
        other => Err(Error::UnknownBuiltin(other.into())),
    }
}

/// Tensor product with the Koszul-signed multiplication
/// `(a₁⊗b₁)(a₂⊗b₂) = (−1)^{b̃₁ã₂}(a₁a₂)⊗(b₁b₂)` and the tensor
/// differential `d(a⊗b) = da⊗b + (−1)^{ã} a⊗db`.
pub fn tensor_dga(a: &Dga, b: &Dga) -> Result<Dga> {
    let (sa, sb) = (a.space().clone(), b.space().clone());
    let d_min = sa.min_degree() + sb.min_degree();
    let d_max = sa.max_degree() + sb.max_degree();

    // basis of degree n: (p, i, q, j) with p+q=n, ordered by (p, i, j)
    let mut basis: BTreeMap<Degree, Vec<(Degree, usize, Degree, usize)>> = BTreeMap::new();
    for p in sa.degrees() {
        for q in sb.degrees() {
            for i in 0..sa.dim(p) {
                for j in 0..sb.dim(q) {
                    basis.entry(p + q).or_default().push((p, i, q, j));
                }
            }
        }
    }
    for group in basis.values_mut() {
        group.sort();
    }
    let mut position: HashMap<(Degree, usize, Degree, usize), usize> = HashMap::new();
    for group in basis.values() {
        for (pos, key) in group.iter().enumerate() {
            position.insert(*key, pos);
        }
    }

    let dims: Vec<usize> = (d_min..=d_max)
        .map(|n| basis.get(&n).map_or(0, Vec::len))
        .collect();
    let labels: Vec<Vec<String>> = (d_min..=d_max)
        .map(|n| {
            basis
                .get(&n)
                .map(|group| {
                    group
                        .iter()
                        .map(|&(p, i, q, j)| format!("{}⊗{}", sa.label(p, i), sb.label(q, j)))
                        .collect()
                })
                .unwrap_or_default()
        })
        .collect();
    let space = GradedVectorSpace::new(d_min, dims, labels)?;

    let empty: Vec<(Degree, usize, Degree, usize)> = Vec::new();
    let group_at = |n: Degree| basis.get(&n).unwrap_or(&empty);

    let mut d_blocks = BTreeMap::new();
    for n in space.degrees() {
        let cols = space.dim(n);
        let rows = space.dim(n + 1);
        if cols == 0 {
            continue;
        }
        let mut block = Matrix::zeros(rows, cols);
        for (col, &(p, i, q, j)) in group_at(n).iter().enumerate() {
            let da = a.d_apply(&sa.basis_vector(p, i));
            for (i2, c) in da.support() {
                let row = position[&(p + 1, i2, q, j)];
                block.set(row, col, c.clone());
            }
            let db = b.d_apply(&sb.basis_vector(q, j));
            let sign = if parity_of_degree(p) == 1 { -1 } else { 1 };
            for (j2, c) in db.support() {
                let row = position[&(p, i, q + 1, j2)];
                let v = block.get(row, col) + c * scalar_int(sign);
                block.set(row, col, v);
            }
        }
        d_blocks.insert(n, block);
    }
    let d = GradedMap::new(space.clone(), space.clone(), 1, d_blocks)?;

    let mult = MultiplicationTable::from_fn(space.clone(), |m, s, n, t| {
        let (p1, i1, q1, j1) = group_at(m)[s];
        let (p2, i2, q2, j2) = group_at(n)[t];
        let mut out = space.zero_vector(m + n);
        let prod_a = a.mult().product_basis(p1, i1, p2, i2);
        let prod_b = b.mult().product_basis(q1, j1, q2, j2);
        let koszul = if parity_of_degree(q1) * parity_of_degree(p2) == 1 {
            scalar_int(-1)
        } else {
            Scalar::one()
        };
        for (ia, ca) in prod_a.support() {
            for (jb, cb) in prod_b.support() {
                let pos = position[&(p1 + p2, ia, q1 + q2, jb)];
                out.coords[pos] += ca * cb * &koszul;
            }
        }
        out
    })?;

    let unit = match (a.unit(), b.unit()) {
        (Some(ua), Some(ub)) => {
            let mut u = space.zero_vector(0);
            for (i, ca) in ua.support() {
                for (j, cb) in ub.support() {
                    u.coords[position[&(0, i, 0, j)]] = ca * cb;
                }
            }
            Some(u)
        }
        _ => None,
    };

    Dga::new(format!("{}⊗{}", a.name, b.name), space, d, mult, unit)
}

/// Direct sum of algebras: componentwise differential and product,
/// cross terms zero, unit the sum of the units.
pub fn direct_sum_dga(a: &Dga, b: &Dga) -> Result<Dga> {
    let (sa, sb) = (a.space().clone(), b.space().clone());
    let d_min = sa.min_degree().min(sb.min_degree());
    let d_max = sa.max_degree().max(sb.max_degree());

    let dims: Vec<usize> = (d_min..=d_max).map(|g| sa.dim(g) + sb.dim(g)).collect();
    let labels: Vec<Vec<String>> = (d_min..=d_max)
        .map(|g| {
            let mut l: Vec<String> = sa.labels(g).iter().map(|s| format!("l.{s}")).collect();
            l.extend(sb.labels(g).iter().map(|s| format!("r.{s}")));
            l
        })
        .collect();
    let space = GradedVectorSpace::new(d_min, dims, labels)?;

    // (side, local index) of a summand basis vector within degree g
    let embed = |g: Degree, side: u8, idx: usize| -> usize {
        if side == 0 {
            idx
        } else {
            sa.dim(g) + idx
        }
    };
    let split = |g: Degree, idx: usize| -> (u8, usize) {
        if idx < sa.dim(g) {
            (0, idx)
        } else {
            (1, idx - sa.dim(g))
        }
    };

    let mut d_blocks = BTreeMap::new();
    for g in space.degrees() {
        let cols = space.dim(g);
        if cols == 0 {
            continue;
        }
        let mut block = Matrix::zeros(space.dim(g + 1), cols);
        for col in 0..cols {
            let (side, idx) = split(g, col);
            let image = if side == 0 && sa.dim(g) > 0 {
                a.d_apply(&sa.basis_vector(g, idx))
            } else if side == 1 && sb.dim(g) > 0 {
                b.d_apply(&sb.basis_vector(g, idx))
            } else {
                continue;
            };
            for (i2, c) in image.support() {
                block.set(embed(g + 1, side, i2), col, c.clone());
            }
        }
        d_blocks.insert(g, block);
    }
    let d = GradedMap::new(space.clone(), space.clone(), 1, d_blocks)?;

    let mult = MultiplicationTable::from_fn(space.clone(), |p, i, q, j| {
        let mut out = space.zero_vector(p + q);
        let (side_u, iu) = split(p, i);
        let (side_v, iv) = split(q, j);
        if side_u != side_v {
            return out;
        }
        let prod = if side_u == 0 {
            a.mult().product_basis(p, iu, q, iv)
        } else {
            b.mult().product_basis(p, iu, q, iv)
        };
        for (k, c) in prod.support() {
            out.coords[embed(p + q, side_u, k)] = c.clone();
        }
        out
    })?;

    let unit = match (a.unit(), b.unit()) {
        (Some(ua), Some(ub)) => {
            let mut u = space.zero_vector(0);
            for (i, c) in ua.support() {
                u.coords[embed(0, 0, i)] = c.clone();
            }
            for (j, c) in ub.support() {
                u.coords[embed(0, 1, j)] = c.clone();
            }
            Some(u)
        }
        _ => None,
    };

    Dga::new(format!("{}⊕{}", a.name, b.name), space, d, mult, unit)
}

/// How [`random_dga`] assembles an algebra: `num_factors` draws from
/// the catalog, folded together with seeded choices of tensor product
/// or direct sum.
#[derive(Clone, Debug)]
pub struct RandomDgaProfile {
    pub num_factors: usize,
    pub catalog: Vec<String>,
}

impl Default for RandomDgaProfile {
    fn default() -> Self {
        RandomDgaProfile {
            num_factors: 2,
            catalog: ["point", "interval", "dual_numbers", "exterior2"]
                .map(String::from)
                .to_vec(),
        }
    }
}

/// Deterministic-in-seed combination of certified catalog algebras.
/// Valid by construction — tensor products and direct sums of DGAs are
/// DGAs — and cheap to regenerate.
pub fn random_dga(seed: u64, profile: &RandomDgaProfile) -> Result<Dga> {
    assert!(profile.num_factors >= 1, "need at least one factor");
    assert!(!profile.catalog.is_empty(), "empty catalog");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng| -> Result<Dga> {
        let name = &profile.catalog[rng.gen_range(0..profile.catalog.len())];
        builtin_dga(name)
    };
    let mut acc = pick(&mut rng)?;
    for _ in 1..profile.num_factors {
        let next = pick(&mut rng)?;
        acc = if rng.gen_range(0..2) == 0 {
            tensor_dga(&acc, &next)?
        } else {
            direct_sum_dga(&acc, &next)?
        };
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exterior_algebra_on_one_generator_validates() {
        let dga = exterior_dga("ext1", &["x"], &BTreeMap::new()).unwrap();
        assert!(dga.validate().is_valid());
        assert_eq!(dga.space().dim(0), 1);
        assert_eq!(dga.space().dim(1), 1);
    }

    #[test]
    fn differential_with_wrong_shift_rejected_at_construction() {
        // dual-numbers-like data with x in degree 1 and "d(x) = 1"
        // requires a shift −1 map, which Dga::new refuses.
        let space = GradedVectorSpace::new(0, vec![1, 1], vec![vec!["1".into()], vec!["x".into()]])
            .unwrap();
        let bad_d = GradedMap::from_block_fn(space.clone(), space.clone(), -1, |g| {
            Matrix::from_fn(space.dim(g - 1), space.dim(g), |_, _| Scalar::one())
        })
        .unwrap();
        let mult = MultiplicationTable::from_fn(space.clone(), |p, _, q, _| {
            space.zero_vector(p + q)
        })
        .unwrap();
        let r = Dga::new("bad", space, bad_d, mult, None);
        assert!(matches!(r, Err(Error::ShiftMismatch { expected: 1, got: -1 })));
    }

    #[test]
    fn interval_coboundary_signs() {
        let dga = builtin_dga("interval").unwrap();
        // vertices sorted: a, b; edge a|b
        let a_star = dga.space().basis_vector(0, 0);
        let b_star = dga.space().basis_vector(0, 1);
        assert_eq!(dga.d_apply(&a_star).coords, vec![scalar_int(-1)]);
        assert_eq!(dga.d_apply(&b_star).coords, vec![scalar_int(1)]);
    }

    #[test]
    fn sphere2_dimensions_and_axioms() {
        let dga = builtin_dga("sphere2").unwrap();
        assert_eq!(
            (dga.space().dim(0), dga.space().dim(1), dga.space().dim(2)),
            (4, 6, 4)
        );
        assert!(dga.validate().is_valid());
    }

    #[test]
    fn point_algebra_is_one_dimensional_with_unit_square() {
        let dga = builtin_dga("point").unwrap();
        assert_eq!(dga.space().total_dim(), 1);
        let one = dga.space().basis_vector(0, 0);
        assert_eq!(dga.multiply(&one, &one), one);
        assert!(dga.differential().is_zero());
    }

    #[test]
    fn all_builtins_validate() {
        for name in BUILTIN_NAMES {
            let dga = builtin_dga(name).unwrap();
            let report = dga.validate();
            assert!(report.is_valid(), "{name}: {:?}", report.first_failure);
        }
    }

    #[test]
    fn unit_laws_on_all_builtins() {
        for name in BUILTIN_NAMES {
            let dga = builtin_dga(name).unwrap();
            let unit = dga.unit().expect("builtins are unital").clone();
            for g in dga.space().degrees() {
                for i in 0..dga.space().dim(g) {
                    let e = dga.space().basis_vector(g, i);
                    assert_eq!(dga.multiply(&unit, &e), e, "{name}: left unit law");
                    assert_eq!(dga.multiply(&e, &unit), e, "{name}: right unit law");
                }
            }
        }
    }

    #[test]
    fn coboundary_squares_to_zero_on_torus() {
        let dga = builtin_dga("torus").unwrap();
        let dd = GradedMap::compose(dga.differential(), dga.differential()).unwrap();
        assert!(dd.is_zero());
        assert_eq!(
            (dga.space().dim(0), dga.space().dim(1), dga.space().dim(2)),
            (7, 21, 14)
        );
    }

    #[test]
    fn massey_witness_has_the_right_cohomology_setup() {
        let dga = builtin_dga("massey_witness").unwrap();
        assert!(dga.validate().is_valid());
        let s = dga.space();
        // x, y closed; z not; xy = dz exact
        let x = s.basis_vector(1, 0);
        let y = s.basis_vector(1, 1);
        let z = s.basis_vector(1, 2);
        assert!(dga.d_apply(&x).is_zero());
        assert!(dga.d_apply(&y).is_zero());
        let dz = dga.d_apply(&z);
        assert_eq!(dz, dga.multiply(&x, &y));
        assert!(!dz.is_zero());
        // y·y = 0 exactly
        assert!(dga.multiply(&y, &y).is_zero());
    }

    #[test]
    fn tensor_dims_are_graded_convolution() {
        let e = builtin_dga("exterior2").unwrap();
        let t = tensor_dga(&e, &e).unwrap();
        // (1,2,1) ⊛ (1,2,1) = (1,4,6,4,1)
        let dims: Vec<usize> = t.space().degrees().map(|g| t.space().dim(g)).collect();
        assert_eq!(dims, vec![1, 4, 6, 4, 1]);
        assert!(t.validate().is_valid());
    }

    #[test]
    fn direct_sum_validates() {
        let a = builtin_dga("interval").unwrap();
        let b = builtin_dga("dual_numbers").unwrap();
        let s = direct_sum_dga(&a, &b).unwrap();
        assert_eq!(s.space().dim(0), 4);
        assert_eq!(s.space().dim(1), 1);
        assert!(s.validate().is_valid());
    }

    #[test]
    fn random_dga_single_point_factor_is_the_point() {
        let profile = RandomDgaProfile {
            num_factors: 1,
            catalog: vec!["point".into()],
        };
        let dga = random_dga(11, &profile).unwrap();
        assert_eq!(dga, builtin_dga("point").unwrap());
    }

    #[test]
    fn random_dgas_validate_and_are_seed_deterministic() {
        let profile = RandomDgaProfile::default();
        for seed in 0..8 {
            let dga = random_dga(seed, &profile).unwrap();
            assert!(dga.validate().is_valid(), "seed {seed}");
            assert_eq!(dga, random_dga(seed, &profile).unwrap());
        }
    }

    #[test]
    fn tensor_with_massey_witness_validates() {
        let a = builtin_dga("massey_witness").unwrap();
        let b = builtin_dga("dual_numbers").unwrap();
        let t = tensor_dga(&a, &b).unwrap();
        assert!(t.validate().is_valid());
    }
}
