//! Finite ordered abstract simplicial complexes.
//!
//! A complex here models the nerve of a good cover (or a triangulation) of
//! the base space. Simplices are strictly increasing vertex tuples in a
//! global vertex order, and every face of a listed simplex must be listed.
//! Products are triangulated by monotone staircase paths, with the product
//! vertex order taken lexicographically so staircases are automatically
//! increasing.

use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Finite abstract simplicial complex on vertices `0..vertex_count`.
///
/// `simplices[p]` is the sorted, duplicate-free list of p-simplices.
#[derive(Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertex_count: usize,
    simplices: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexViolation {
    #[error("vertex {vertex} out of range (vertex count {count}) in simplex {simplex:?}")]
    VertexOutOfRange {
        simplex: Vec<usize>,
        vertex: usize,
        count: usize,
    },
    #[error("simplex {0:?} is not strictly increasing")]
    NotIncreasing(Vec<usize>),
    #[error("simplex {0:?} listed more than once")]
    Duplicate(Vec<usize>),
    #[error("simplex {simplex:?} is missing its face {face:?}")]
    MissingFace {
        simplex: Vec<usize>,
        face: Vec<usize>,
    },
    #[error("dimension-{dim} list contains simplex {simplex:?} of the wrong size")]
    WrongDimension { dim: usize, simplex: Vec<usize> },
}

impl SimplicialComplex {
    /// Build a complex from an explicit simplex listing, one list per
    /// dimension. The lists are sorted; validity is checked by `validate`.
    pub fn from_simplices(vertex_count: usize, mut simplices: Vec<Vec<Vec<usize>>>) -> Self {
        while simplices.last().is_some_and(|l| l.is_empty()) {
            simplices.pop();
        }
        for list in &mut simplices {
            list.sort();
        }
        Self {
            vertex_count,
            simplices,
        }
    }

    /// Build the smallest complex containing the given simplices: all faces
    /// are generated, vertices `0..vertex_count` are always present.
    pub fn from_maximal_simplices(vertex_count: usize, generators: &[Vec<usize>]) -> Self {
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new()];
        for v in 0..vertex_count {
            by_dim[0].insert(vec![v]);
        }
        for g in generators {
            let mut stack = vec![g.clone()];
            while let Some(s) = stack.pop() {
                let p = s.len() - 1;
                while by_dim.len() <= p {
                    by_dim.push(BTreeSet::new());
                }
                if !by_dim[p].insert(s.clone()) {
                    continue;
                }
                if p > 0 {
                    for i in 0..s.len() {
                        let mut face = s.clone();
                        face.remove(i);
                        stack.push(face);
                    }
                }
            }
        }
        Self {
            vertex_count,
            simplices: by_dim
                .into_iter()
                .map(|set| set.into_iter().collect())
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Top dimension carrying simplices; empty complexes have dimension 0.
    pub fn dimension(&self) -> usize {
        self.simplices.len().saturating_sub(1)
    }

    /// The p-simplices, sorted. Empty slice beyond the top dimension.
    pub fn simplices(&self, p: usize) -> &[Vec<usize>] {
        self.simplices.get(p).map_or(&[], |v| v.as_slice())
    }

    pub fn simplex_count(&self, p: usize) -> usize {
        self.simplices(p).len()
    }

    /// Index of a simplex within its dimension's sorted list.
    pub fn simplex_index(&self, s: &[usize]) -> Option<usize> {
        let list = self.simplices.get(s.len().checked_sub(1)?)?;
        list.binary_search_by(|probe| probe.as_slice().cmp(s)).ok()
    }

    pub fn has_simplex(&self, s: &[usize]) -> bool {
        self.simplex_index(s).is_some()
    }

    /// Check the ordering and face-closure invariants; reports the first
    /// offending simplex in dimension-then-lexicographic order.
    pub fn validate(&self) -> Result<(), ComplexViolation> {
        for (p, list) in self.simplices.iter().enumerate() {
            let mut prev: Option<&Vec<usize>> = None;
            for s in list {
                if s.len() != p + 1 {
                    return Err(ComplexViolation::WrongDimension {
                        dim: p,
                        simplex: s.clone(),
                    });
                }
                for win in s.windows(2) {
                    if win[0] >= win[1] {
                        return Err(ComplexViolation::NotIncreasing(s.clone()));
                    }
                }
                for &v in s {
                    if v >= self.vertex_count {
                        return Err(ComplexViolation::VertexOutOfRange {
                            simplex: s.clone(),
                            vertex: v,
                            count: self.vertex_count,
                        });
                    }
                }
                if prev == Some(s) {
                    return Err(ComplexViolation::Duplicate(s.clone()));
                }
                prev = Some(s);
                if p > 0 {
                    for i in 0..s.len() {
                        let mut face = s.clone();
                        face.remove(i);
                        if !self.has_simplex(&face) {
                            return Err(ComplexViolation::MissingFace {
                                simplex: s.clone(),
                                face,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Alternating sum of simplex counts.
    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(p, list)| {
                let n = list.len() as i64;
                if p % 2 == 0 {
                    n
                } else {
                    -n
                }
            })
            .sum()
    }

    /// A single point.
    pub fn point() -> Self {
        Self::from_maximal_simplices(1, &[])
    }

    /// Circle as a 3-vertex cycle. The edge [0,2] closes the cycle.
    pub fn circle() -> Self {
        Self::from_maximal_simplices(3, &[vec![0, 1], vec![1, 2], vec![0, 2]])
    }

    /// Sphere S^2 as the boundary of a tetrahedron.
    pub fn sphere2() -> Self {
        Self::from_maximal_simplices(
            4,
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
    }

    /// RP^2 in its standard 6-vertex triangulation; the torsion oracle.
    pub fn projective_plane() -> Self {
        Self::from_maximal_simplices(
            6,
            &[
                vec![0, 1, 3],
                vec![0, 1, 4],
                vec![0, 2, 3],
                vec![0, 2, 5],
                vec![0, 4, 5],
                vec![1, 2, 4],
                vec![1, 2, 5],
                vec![1, 3, 5],
                vec![2, 3, 4],
                vec![3, 4, 5],
            ],
        )
    }
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts: Vec<usize> = self.simplices.iter().map(|l| l.len()).collect();
        write!(
            f,
            "SimplicialComplex(vertices={}, counts={:?})",
            self.vertex_count, counts
        )
    }
}

/// A staircase product triangulation together with the projections of its
/// vertices onto the two factors.
#[derive(Clone, Debug)]
pub struct ProductMap {
    complex: SimplicialComplex,
    factor2_vertices: usize,
}

impl ProductMap {
    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn into_complex(self) -> SimplicialComplex {
        self.complex
    }

    /// Factor projections of a product vertex.
    pub fn project_vertex(&self, w: usize) -> (usize, usize) {
        (w / self.factor2_vertices, w % self.factor2_vertices)
    }

    /// Project a product simplex to factor 1, dropping repeats. Within a
    /// product simplex both factor coordinates are weakly increasing, so the
    /// result is strictly increasing with between 1 and simplex-size entries.
    pub fn project1(&self, simplex: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = simplex.iter().map(|&w| self.project_vertex(w).0).collect();
        out.dedup();
        out
    }

    pub fn project2(&self, simplex: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = simplex.iter().map(|&w| self.project_vertex(w).1).collect();
        out.dedup();
        out
    }
}

/// Staircase product triangulation: vertices are pairs (u, v) in
/// lexicographic order, and each cell sigma x tau is triangulated by the
/// monotone lattice paths through its (p+1) x (q+1) grid.
pub fn product_complex(k1: &SimplicialComplex, k2: &SimplicialComplex) -> ProductMap {
    let n2 = k2.vertex_count();
    let pair = |u: usize, v: usize| u * n2 + v;
    let mut cells: BTreeSet<Vec<usize>> = BTreeSet::new();
    for p in 0..=k1.dimension() {
        for sigma in k1.simplices(p) {
            for q in 0..=k2.dimension() {
                for tau in k2.simplices(q) {
                    // walk all monotone paths from (0,0) to (p,q)
                    let mut stack: Vec<(usize, usize, Vec<usize>)> =
                        vec![(0, 0, vec![pair(sigma[0], tau[0])])];
                    while let Some((i, j, path)) = stack.pop() {
                        if i == p && j == q {
                            cells.insert(path);
                            continue;
                        }
                        if i < p {
                            let mut next = path.clone();
                            next.push(pair(sigma[i + 1], tau[j]));
                            stack.push((i + 1, j, next));
                        }
                        if j < q {
                            let mut next = path;
                            next.push(pair(sigma[i], tau[j + 1]));
                            stack.push((i, j + 1, next));
                        }
                    }
                }
            }
        }
    }
    let generators: Vec<Vec<usize>> = cells.into_iter().collect();
    let complex = SimplicialComplex::from_maximal_simplices(k1.vertex_count() * n2, &generators);
    debug_assert!(complex.validate().is_ok());
    ProductMap {
        complex,
        factor2_vertices: n2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tetrahedron_boundary_is_valid_sphere() {
        let k = SimplicialComplex::sphere2();
        assert!(k.validate().is_ok());
        assert_eq!(
            (k.simplex_count(0), k.simplex_count(1), k.simplex_count(2)),
            (4, 6, 4)
        );
        assert_eq!(k.euler_characteristic(), 2);
    }

    #[test]
    fn missing_face_is_reported() {
        // triangle listed without the edge [1,2]
        let k = SimplicialComplex::from_simplices(
            3,
            vec![
                vec![vec![0], vec![1], vec![2]],
                vec![vec![0, 1], vec![0, 2]],
                vec![vec![0, 1, 2]],
            ],
        );
        match k.validate() {
            Err(ComplexViolation::MissingFace { simplex, face }) => {
                assert_eq!(simplex, vec![0, 1, 2]);
                assert_eq!(face, vec![1, 2]);
            }
            other => panic!("expected missing face, got {other:?}"),
        }
    }

    #[test]
    fn empty_complex_is_valid() {
        let k = SimplicialComplex::from_simplices(0, vec![]);
        assert!(k.validate().is_ok());
        assert_eq!(k.euler_characteristic(), 0);
    }

    #[test]
    fn non_increasing_tuple_is_reported() {
        let k =
            SimplicialComplex::from_simplices(2, vec![vec![vec![0], vec![1]], vec![vec![1, 1]]]);
        assert!(matches!(
            k.validate(),
            Err(ComplexViolation::NotIncreasing(_))
        ));
    }

    #[test]
    fn circle_counts() {
        let k = SimplicialComplex::circle();
        assert!(k.validate().is_ok());
        assert_eq!((k.simplex_count(0), k.simplex_count(1)), (3, 3));
        assert_eq!(k.euler_characteristic(), 0);
    }

    #[test]
    fn projective_plane_is_closed_surface() {
        let k = SimplicialComplex::projective_plane();
        assert!(k.validate().is_ok());
        assert_eq!(
            (k.simplex_count(0), k.simplex_count(1), k.simplex_count(2)),
            (6, 15, 10)
        );
        assert_eq!(k.euler_characteristic(), 1);
        // every edge lies in exactly two triangles
        for e in k.simplices(1) {
            let n = k
                .simplices(2)
                .iter()
                .filter(|t| e.iter().all(|v| t.contains(v)))
                .count();
            assert_eq!(n, 2, "edge {e:?}");
        }
    }

    #[test]
    fn torus_staircase_counts() {
        let t2 = product_complex(&SimplicialComplex::circle(), &SimplicialComplex::circle());
        let k = t2.complex();
        assert!(k.validate().is_ok());
        assert_eq!(
            (k.simplex_count(0), k.simplex_count(1), k.simplex_count(2)),
            (9, 27, 18)
        );
        assert_eq!(k.euler_characteristic(), 0);
    }

    #[test]
    fn point_times_k_is_isomorphic_to_k() {
        let k = SimplicialComplex::sphere2();
        let p = product_complex(&SimplicialComplex::point(), &k);
        assert_eq!(p.complex(), &k);
        // and with the point on the right
        let p2 = product_complex(&k, &SimplicialComplex::point());
        for d in 0..=k.dimension() {
            assert_eq!(p2.complex().simplex_count(d), k.simplex_count(d));
        }
    }

    #[test]
    fn edge_times_edge_is_two_triangles() {
        let edge = SimplicialComplex::from_maximal_simplices(2, &[vec![0, 1]]);
        let sq = product_complex(&edge, &edge);
        let k = sq.complex();
        assert_eq!(
            (k.simplex_count(0), k.simplex_count(1), k.simplex_count(2)),
            (4, 5, 2)
        );
        // the two triangles share the diagonal [(0,0), (1,1)] = [0, 3]
        assert!(k.has_simplex(&[0, 3]));
        assert_eq!(k.simplices(2), &[vec![0, 1, 3], vec![0, 2, 3]]);
    }

    #[test]
    fn euler_characteristic_is_multiplicative() {
        let circle = SimplicialComplex::circle();
        let sphere = SimplicialComplex::sphere2();
        let rp2 = SimplicialComplex::projective_plane();
        for (a, b) in [
            (&circle, &sphere),
            (&sphere, &rp2),
            (&circle, &circle),
            (&rp2, &circle),
        ] {
            let prod = product_complex(a, b);
            assert_eq!(
                prod.complex().euler_characteristic(),
                a.euler_characteristic() * b.euler_characteristic()
            );
        }
    }

    #[test]
    fn product_is_associative_up_to_relabeling() {
        let c = SimplicialComplex::circle();
        let left = product_complex(product_complex(&c, &c).complex(), &c);
        let right = product_complex(&c, product_complex(&c, &c).complex());
        // ((a,b),c) -> a*9 + b*3 + c and (a,(b,c)) -> a*9 + (b*3 + c) agree,
        // so the two complexes must literally coincide
        assert_eq!(left.complex(), right.complex());
    }

    #[test]
    fn product_edges_project_to_edges_or_vertices() {
        let c = SimplicialComplex::circle();
        let prod = product_complex(&c, &c);
        for e in prod.complex().simplices(1) {
            let p1 = prod.project1(e);
            let p2 = prod.project2(e);
            assert!(p1.len() <= 2 && p2.len() <= 2);
            if p1.len() == 2 {
                assert!(c.has_simplex(&p1), "{p1:?} not an edge");
            }
            if p2.len() == 2 {
                assert!(c.has_simplex(&p2), "{p2:?} not an edge");
            }
        }
    }

    #[test]
    fn t3_staircase_counts() {
        let c = SimplicialComplex::circle();
        let t2 = product_complex(&c, &c);
        let t3 = product_complex(t2.complex(), &c);
        let k = t3.complex();
        assert!(k.validate().is_ok());
        assert_eq!(k.simplex_count(0), 27);
        assert_eq!(k.simplex_count(3), 162);
        assert_eq!(k.euler_characteristic(), 0);
    }
}
