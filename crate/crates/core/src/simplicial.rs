//! Finite abstract simplicial complexes with totally ordered vertices.
//!
//! Simplices are stored as strictly increasing vertex-index lists,
//! grouped by dimension and sorted lexicographically, so every derived
//! object (cochain bases, coboundary matrices, cup products) is
//! deterministic.

use std::collections::BTreeSet;

use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    /// `simplices[p]` lists the p-simplices, each a strictly increasing
    /// vertex-index vector, lexicographically sorted.
    simplices: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    /// Builds the closure of the given facets. Vertex order is the
    /// order of `vertices`; facets name vertices by index into it.
    pub fn from_facets(vertices: Vec<String>, facets: Vec<Vec<usize>>) -> Result<Self> {
        if facets.is_empty() {
            return Err(Error::Simplicial("no simplices given".into()));
        }
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        for facet in &facets {
            let mut sorted = facet.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != facet.len() {
                return Err(Error::Simplicial(format!(
                    "repeated vertex in simplex {:?}",
                    facet.iter().map(|&i| &vertices[i]).collect::<Vec<_>>()
                )));
            }
            if let Some(&bad) = sorted.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::Simplicial(format!("vertex index {bad} out of range")));
            }
            // all nonempty subsets
            for mask in 1u64..(1 << sorted.len()) {
                let face: Vec<usize> = sorted
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &v)| v)
                    .collect();
                all.insert(face);
            }
        }
        let max_dim = all.iter().map(|s| s.len() - 1).max().unwrap();
        let mut simplices = vec![Vec::new(); max_dim + 1];
        for s in all {
            simplices[s.len() - 1].push(s);
        }
        // BTreeSet iteration is sorted, but group insertion interleaves
        // dimensions; re-sort each group for clarity.
        for group in &mut simplices {
            group.sort();
        }
        Ok(SimplicialComplex { vertices, simplices })
    }

    /// Validates an explicit simplex list: every face of every simplex
    /// must be present.
    pub fn new(vertices: Vec<String>, simplices: Vec<Vec<usize>>) -> Result<Self> {
        let complex = SimplicialComplex::from_facets(vertices, simplices.clone())?;
        let given: BTreeSet<Vec<usize>> = simplices
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s
            })
            .collect();
        for group in &complex.simplices {
            for s in group {
                if !given.contains(s) {
                    return Err(Error::Simplicial(format!(
                        "missing face {:?}",
                        s.iter().map(|&i| &complex.vertices[i]).collect::<Vec<_>>()
                    )));
                }
            }
        }
        Ok(complex)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Largest dimension carrying a simplex.
    pub fn max_dim(&self) -> usize {
        self.simplices.len() - 1
    }

    /// The p-simplices, or an empty slice beyond the dimension.
    pub fn simplices(&self, p: usize) -> &[Vec<usize>] {
        self.simplices.get(p).map_or(&[], Vec::as_slice)
    }

    pub fn num_simplices(&self) -> usize {
        self.simplices.iter().map(Vec::len).sum()
    }

    /// Position of a p-simplex within its dimension group.
    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        let p = simplex.len().checked_sub(1)?;
        self.simplices(p).binary_search_by(|s| s.as_slice().cmp(simplex)).ok()
    }

    /// Human-readable name of a simplex: vertex names joined by `|`.
    pub fn simplex_label(&self, simplex: &[usize]) -> String {
        simplex
            .iter()
            .map(|&i| self.vertices[i].as_str())
            .collect::<Vec<_>>()
            .join("|")
    }
}
