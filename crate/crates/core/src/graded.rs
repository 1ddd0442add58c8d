//! Integer-graded vector spaces, degree-shifting linear maps, and the
//! Koszul sign exponents used by the multilinear operations.
//!
//! Parity of a homogeneous element is its degree mod 2; parity of a map
//! is its shift mod 2. Degrees outside the declared range denote the
//! zero space, so shifts truncate silently at the boundary of the
//! range, which is what bounded cochain complexes need.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::Zero;

use crate::linalg::{Matrix, Scalar};
use crate::{Error, Result};

pub type Degree = i64;

/// Parity (0 or 1) of an integer degree.
pub fn parity_of_degree(g: Degree) -> u8 {
    g.rem_euclid(2) as u8
}

/// Finite family of coordinate spaces indexed by a closed interval of
/// integer degrees, with named basis vectors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedVectorSpace {
    d_min: Degree,
    d_max: Degree,
    dims: Vec<usize>,
    labels: Vec<Vec<String>>,
}

impl GradedVectorSpace {
    /// `dims[k]` is the dimension in degree `d_min + k`; labels must be
    /// unique within each degree and match the dimension.
    pub fn new(d_min: Degree, dims: Vec<usize>, labels: Vec<Vec<String>>) -> Result<Arc<Self>> {
        if dims.is_empty() {
            return Err(Error::InvalidGradedData("empty degree range".into()));
        }
        if labels.len() != dims.len() {
            return Err(Error::InvalidGradedData(
                "labels must cover exactly the degree range".into(),
            ));
        }
        for (k, (dim, lab)) in dims.iter().zip(&labels).enumerate() {
            if lab.len() != *dim {
                return Err(Error::InvalidGradedData(format!(
                    "degree {}: {} labels for dimension {}",
                    d_min + k as Degree,
                    lab.len(),
                    dim
                )));
            }
            let mut seen = lab.clone();
            seen.sort();
            seen.dedup();
            if seen.len() != lab.len() {
                return Err(Error::InvalidGradedData(format!(
                    "degree {}: duplicate basis labels",
                    d_min + k as Degree
                )));
            }
        }
        let d_max = d_min + dims.len() as Degree - 1;
        Ok(Arc::new(GradedVectorSpace { d_min, d_max, dims, labels }))
    }

    /// Space with automatic labels `b{degree}_{index}`.
    pub fn with_auto_labels(d_min: Degree, dims: Vec<usize>) -> Result<Arc<Self>> {
        let labels = dims
            .iter()
            .enumerate()
            .map(|(k, &dim)| {
                (0..dim)
                    .map(|i| format!("b{}_{}", d_min + k as Degree, i))
                    .collect()
            })
            .collect();
        GradedVectorSpace::new(d_min, dims, labels)
    }

    pub fn min_degree(&self) -> Degree {
        self.d_min
    }

    pub fn max_degree(&self) -> Degree {
        self.d_max
    }

    pub fn degrees(&self) -> impl Iterator<Item = Degree> {
        self.d_min..=self.d_max
    }

    pub fn in_range(&self, g: Degree) -> bool {
        g >= self.d_min && g <= self.d_max
    }

    /// Dimension at a degree; zero outside the range.
    pub fn dim(&self, g: Degree) -> usize {
        if self.in_range(g) {
            self.dims[(g - self.d_min) as usize]
        } else {
            0
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn labels(&self, g: Degree) -> &[String] {
        if self.in_range(g) {
            &self.labels[(g - self.d_min) as usize]
        } else {
            &[]
        }
    }

    pub fn label(&self, g: Degree, i: usize) -> &str {
        &self.labels(g)[i]
    }

    pub fn basis_vector(&self, g: Degree, i: usize) -> HomogeneousVector {
        let mut coords = vec![Scalar::zero(); self.dim(g)];
        coords[i] = num::One::one();
        HomogeneousVector { degree: g, coords }
    }

    pub fn zero_vector(&self, g: Degree) -> HomogeneousVector {
        HomogeneousVector {
            degree: g,
            coords: vec![Scalar::zero(); self.dim(g)],
        }
    }
}

/// A homogeneous element: a degree plus coordinates in that degree's
/// basis. The zero space (out-of-range degrees) has empty coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomogeneousVector {
    pub degree: Degree,
    pub coords: Vec<Scalar>,
}

impl HomogeneousVector {
    pub fn new(degree: Degree, coords: Vec<Scalar>) -> Self {
        HomogeneousVector { degree, coords }
    }

    pub fn parity(&self) -> u8 {
        parity_of_degree(self.degree)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &HomogeneousVector) -> HomogeneousVector {
        assert_eq!(self.degree, other.degree, "degree mismatch in add");
        assert_eq!(self.coords.len(), other.coords.len());
        HomogeneousVector {
            degree: self.degree,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &HomogeneousVector) -> HomogeneousVector {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> HomogeneousVector {
        HomogeneousVector {
            degree: self.degree,
            coords: self.coords.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> HomogeneousVector {
        HomogeneousVector {
            degree: self.degree,
            coords: self.coords.iter().map(|a| a * s).collect(),
        }
    }

    /// Indices with nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.coords.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }
}

/// Degree-homogeneous linear map between graded spaces, stored as one
/// block per source degree. A block at source degree `g` has shape
/// `target.dim(g + shift) × source.dim(g)`; blocks landing outside the
/// target range are the `0 × n` matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedMap {
    source: Arc<GradedVectorSpace>,
    target: Arc<GradedVectorSpace>,
    shift: Degree,
    blocks: BTreeMap<Degree, Matrix>,
}

impl GradedMap {
    /// Builds from explicit blocks; missing blocks are zero. Block
    /// shapes are validated against the spaces.
    pub fn new(
        source: Arc<GradedVectorSpace>,
        target: Arc<GradedVectorSpace>,
        shift: Degree,
        given: BTreeMap<Degree, Matrix>,
    ) -> Result<Self> {
        let mut blocks = BTreeMap::new();
        for g in source.degrees() {
            let cols = source.dim(g);
            if cols == 0 {
                continue;
            }
            let rows = target.dim(g + shift);
            let block = match given.get(&g) {
                Some(b) => {
                    if b.rows() != rows || b.cols() != cols {
                        return Err(Error::InvalidGradedData(format!(
                            "block at degree {g} has shape {}×{}, expected {rows}×{cols}",
                            b.rows(),
                            b.cols()
                        )));
                    }
                    b.clone()
                }
                None => Matrix::zeros(rows, cols),
            };
            blocks.insert(g, block);
        }
        for g in given.keys() {
            if source.dim(*g) == 0 {
                return Err(Error::InvalidGradedData(format!(
                    "block given at degree {g} where the source is zero"
                )));
            }
        }
        Ok(GradedMap { source, target, shift, blocks })
    }

    pub fn from_block_fn(
        source: Arc<GradedVectorSpace>,
        target: Arc<GradedVectorSpace>,
        shift: Degree,
        mut f: impl FnMut(Degree) -> Matrix,
    ) -> Result<Self> {
        let mut blocks = BTreeMap::new();
        for g in source.degrees() {
            if source.dim(g) > 0 {
                blocks.insert(g, f(g));
            }
        }
        GradedMap::new(source, target, shift, blocks)
    }

    pub fn identity(space: Arc<GradedVectorSpace>) -> Self {
        GradedMap::from_block_fn(space.clone(), space.clone(), 0, |g| {
            Matrix::identity(space.dim(g))
        })
        .expect("identity blocks are well-shaped")
    }

    pub fn zero(
        source: Arc<GradedVectorSpace>,
        target: Arc<GradedVectorSpace>,
        shift: Degree,
    ) -> Self {
        GradedMap::new(source, target, shift, BTreeMap::new()).expect("zero map is well-shaped")
    }

    pub fn source(&self) -> &Arc<GradedVectorSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedVectorSpace> {
        &self.target
    }

    pub fn shift(&self) -> Degree {
        self.shift
    }

    pub fn parity(&self) -> u8 {
        parity_of_degree(self.shift)
    }

    /// The block at source degree `g` (computed zero block if absent).
    pub fn block(&self, g: Degree) -> Matrix {
        self.blocks.get(&g).cloned().unwrap_or_else(|| {
            Matrix::zeros(self.target.dim(g + self.shift), self.source.dim(g))
        })
    }

    pub fn blocks(&self) -> &BTreeMap<Degree, Matrix> {
        &self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(Matrix::is_zero)
    }

    pub fn apply(&self, v: &HomogeneousVector) -> HomogeneousVector {
        assert_eq!(
            v.coords.len(),
            self.source.dim(v.degree),
            "vector does not live in the source space"
        );
        let out_degree = v.degree + self.shift;
        let block = self.block(v.degree);
        HomogeneousVector {
            degree: out_degree,
            coords: block.mul_vec(&v.coords),
        }
    }

    /// Blockwise composition `f ∘ g`; shifts add.
    pub fn compose(f: &GradedMap, g: &GradedMap) -> Result<GradedMap> {
        if f.source != g.target {
            return Err(Error::SpaceMismatch {
                context: "compose: inner spaces differ".into(),
            });
        }
        let shift = f.shift + g.shift;
        GradedMap::from_block_fn(g.source.clone(), f.target.clone(), shift, |deg| {
            f.block(deg + g.shift).mul(&g.block(deg))
        })
    }

    pub fn add(&self, other: &GradedMap) -> Result<GradedMap> {
        if self.source != other.source || self.target != other.target || self.shift != other.shift
        {
            return Err(Error::SpaceMismatch {
                context: "add: maps have different type".into(),
            });
        }
        GradedMap::from_block_fn(self.source.clone(), self.target.clone(), self.shift, |g| {
            self.block(g).add(&other.block(g))
        })
    }

    pub fn sub(&self, other: &GradedMap) -> Result<GradedMap> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedMap {
        GradedMap::from_block_fn(self.source.clone(), self.target.clone(), self.shift, |g| {
            self.block(g).neg()
        })
        .expect("negation preserves shapes")
    }

    pub fn scale(&self, s: &Scalar) -> GradedMap {
        GradedMap::from_block_fn(self.source.clone(), self.target.clone(), self.shift, |g| {
            self.block(g).scale(s)
        })
        .expect("scaling preserves shapes")
    }
}

/// Supercommutator `[f, g] = f∘g − (−1)^{f̃·g̃} g∘f` of two endomorphisms
/// of the same space.
pub fn supercommutator(f: &GradedMap, g: &GradedMap) -> Result<GradedMap> {
    if f.source != f.target || g.source != g.target || f.source != g.source {
        return Err(Error::SpaceMismatch {
            context: "supercommutator: need endomorphisms of one space".into(),
        });
    }
    let fg = GradedMap::compose(f, g)?;
    let gf = GradedMap::compose(g, f)?;
    if f.parity() * g.parity() == 1 {
        fg.add(&gf)
    } else {
        fg.sub(&gf)
    }
}

/// Sign exponent of the associativity tower:
/// `r = l̃(ṽ₁+…+ṽ_j) + j̃(l̃−1) + (k̃−1)l̃` reduced mod 2, where
/// `prefix_parity = (ṽ₁+…+ṽ_j) mod 2`.
pub fn assoc_sign_exponent(k: i64, l: i64, j: i64, prefix_parity: u8) -> u8 {
    debug_assert!(k >= 1 && l >= 1 && (0..k).contains(&j));
    let (kt, lt, jt, p) = (k % 2, l % 2, j % 2, prefix_parity as i64 % 2);
    ((lt * p + jt * (lt - 1) + (kt - 1) * lt).rem_euclid(2)) as u8
}

/// Sign exponent of the two-factor recursion:
/// `(k + (l−1)(ṽ₁+…+ṽ_k)) mod 2`.
pub fn lambda_sign_exponent(k: i64, l: i64, prefix_parity: u8) -> u8 {
    debug_assert!(k >= 1 && l >= 1);
    ((k + (l - 1) * (prefix_parity as i64 % 2)).rem_euclid(2)) as u8
}
