//! Flat GL(n,Z) local coefficient systems on a simplicial complex.
//!
//! A system assigns to each edge [i,j] (i < j) a unimodular integer matrix
//! rho([i,j]), read as the transport map stalk(j) -> stalk(i). Flatness is
//! the triangle cocycle condition rho([i,j]) * rho([j,k]) = rho([i,k]); it
//! makes the composite transport inside any simplex path independent. This
//! is the combinatorial form of a monodromy representation: the crate stores
//! both the linear holonomy and its inverse-transposed dual this way.

use num_bigint::BigInt;
use num_traits::Zero;
use std::sync::Arc;
use thiserror::Error;

use crate::linalg::IntMatrix;
use crate::simplicial::{ProductMap, SimplicialComplex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("edge {0:?} is not an edge of the base complex")]
    NotAnEdge(Vec<usize>),
    #[error("matrix for edge {edge:?} is {got_rows}x{got_cols}, expected {rank}x{rank}")]
    WrongMatrixSize {
        edge: Vec<usize>,
        got_rows: usize,
        got_cols: usize,
        rank: usize,
    },
    #[error("base complexes differ")]
    BaseMismatch,
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("vertex sequence {0:?} is not an edge path")]
    NotAPath(Vec<usize>),
    #[error("product edge {edge:?} projects to {projection:?}, which is not a simplex of the factor")]
    ProjectionInconsistency {
        edge: Vec<usize>,
        projection: Vec<usize>,
    },
}

/// First found violation of the local system invariants.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CocycleViolation {
    #[error("transport on edge {0:?} is not unimodular")]
    NonUnimodular(Vec<usize>),
    #[error("triangle {0:?} violates the cocycle condition")]
    Triangle(Vec<usize>),
}

/// A flat GL(n,Z) coefficient system: one unimodular matrix per edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSystem {
    base: Arc<SimplicialComplex>,
    rank: usize,
    /// transport[e] for the e-th edge in the base's sorted edge list
    transport: Vec<IntMatrix>,
}

impl LocalSystem {
    /// The system with identity transport on every edge.
    pub fn trivial(base: Arc<SimplicialComplex>, rank: usize) -> Result<Self, SystemError> {
        if rank == 0 {
            return Err(SystemError::ZeroRank);
        }
        let transport = vec![IntMatrix::identity(rank); base.simplex_count(1)];
        Ok(Self {
            base,
            rank,
            transport,
        })
    }

    /// Build a system from explicit edge assignments; unassigned edges get
    /// the identity. Unimodularity and flatness are checked by
    /// `validate_cocycle`, not here.
    pub fn from_edges(
        base: Arc<SimplicialComplex>,
        rank: usize,
        edges: &[(Vec<usize>, IntMatrix)],
    ) -> Result<Self, SystemError> {
        let mut sys = Self::trivial(base, rank)?;
        for (edge, m) in edges {
            sys.set_transport(edge, m.clone())?;
        }
        Ok(sys)
    }

    pub fn set_transport(&mut self, edge: &[usize], m: IntMatrix) -> Result<(), SystemError> {
        if edge.len() != 2 {
            return Err(SystemError::NotAnEdge(edge.to_vec()));
        }
        let idx = self
            .base
            .simplex_index(edge)
            .ok_or_else(|| SystemError::NotAnEdge(edge.to_vec()))?;
        if m.rows() != self.rank || m.cols() != self.rank {
            return Err(SystemError::WrongMatrixSize {
                edge: edge.to_vec(),
                got_rows: m.rows(),
                got_cols: m.cols(),
                rank: self.rank,
            });
        }
        self.transport[idx] = m;
        Ok(())
    }

    pub fn base(&self) -> &Arc<SimplicialComplex> {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Transport matrix of the edge [i,j], i < j: the map stalk(j) -> stalk(i).
    pub fn transport(&self, edge: &[usize]) -> Option<&IntMatrix> {
        self.base.simplex_index(edge).map(|i| &self.transport[i])
    }

    pub fn transport_by_index(&self, edge_index: usize) -> &IntMatrix {
        &self.transport[edge_index]
    }

    /// Composite transport stalk(v_b) -> stalk(v_a) for two vertices of a
    /// common simplex. By flatness this is the single edge matrix, or the
    /// identity when a == b.
    pub fn front_transport(&self, va: usize, vb: usize) -> Option<IntMatrix> {
        if va == vb {
            return Some(IntMatrix::identity(self.rank));
        }
        debug_assert!(va < vb);
        self.transport(&[va, vb]).cloned()
    }

    /// Check unimodularity of every edge and the triangle cocycle condition.
    pub fn validate_cocycle(&self) -> Result<(), CocycleViolation> {
        for (i, edge) in self.base.simplices(1).iter().enumerate() {
            if !self.transport[i].is_unimodular() {
                return Err(CocycleViolation::NonUnimodular(edge.clone()));
            }
        }
        for tri in self.base.simplices(2) {
            let (a, b, c) = (tri[0], tri[1], tri[2]);
            let ab = self.transport(&[a, b]).expect("face closure");
            let bc = self.transport(&[b, c]).expect("face closure");
            let ac = self.transport(&[a, c]).expect("face closure");
            if &ab.mul(bc).expect("rank match") != ac {
                return Err(CocycleViolation::Triangle(tri.clone()));
            }
        }
        Ok(())
    }

    /// The dual system: every transport replaced by its inverse transpose.
    /// This is the coefficient duality between the monodromy and the linear
    /// holonomy; applying it twice gives back the original system.
    pub fn dual_system(&self) -> LocalSystem {
        let transport = self
            .transport
            .iter()
            .map(|m| {
                m.inverse_transpose()
                    .expect("valid systems have unimodular transport")
            })
            .collect();
        LocalSystem {
            base: Arc::clone(&self.base),
            rank: self.rank,
            transport,
        }
    }

    /// Blockwise direct sum of two systems on the same base.
    pub fn direct_sum(&self, other: &LocalSystem) -> Result<LocalSystem, SystemError> {
        if self.base != other.base {
            return Err(SystemError::BaseMismatch);
        }
        let transport = self
            .transport
            .iter()
            .zip(&other.transport)
            .map(|(a, b)| IntMatrix::block_diag(a, b))
            .collect();
        Ok(LocalSystem {
            base: Arc::clone(&self.base),
            rank: self.rank + other.rank,
            transport,
        })
    }

    /// True when the two systems are edgewise inverse-transposed duals of
    /// each other on the same base.
    pub fn is_dual_of(&self, other: &LocalSystem) -> bool {
        self.base == other.base
            && self.rank == other.rank
            && self
                .transport
                .iter()
                .zip(&other.transport)
                .all(|(a, b)| b.inverse_transpose().as_ref() == Some(a))
    }
}

/// Pull two factor systems back to a staircase product complex. Each product
/// edge transports by the block-diagonal of the projected factor transports,
/// with a degenerate projection contributing the identity block.
pub fn pullback_product(
    product: &ProductMap,
    l1: &LocalSystem,
    l2: &LocalSystem,
) -> Result<LocalSystem, SystemError> {
    let base = Arc::new(product.complex().clone());
    let rank = l1.rank() + l2.rank();
    let mut transport = Vec::with_capacity(base.simplex_count(1));
    for edge in base.simplices(1) {
        let block = |proj: Vec<usize>, l: &LocalSystem| -> Result<IntMatrix, SystemError> {
            match proj.len() {
                1 => Ok(IntMatrix::identity(l.rank())),
                2 => l
                    .transport(&proj)
                    .cloned()
                    .ok_or(SystemError::ProjectionInconsistency {
                        edge: edge.clone(),
                        projection: proj,
                    }),
                _ => Err(SystemError::ProjectionInconsistency {
                    edge: edge.clone(),
                    projection: proj,
                }),
            }
        };
        let m1 = block(product.project1(edge), l1)?;
        let m2 = block(product.project2(edge), l2)?;
        transport.push(IntMatrix::block_diag(&m1, &m2));
    }
    Ok(LocalSystem {
        base,
        rank,
        transport,
    })
}

/// An oriented edge walk with its composite transport.
///
/// The composite moves stalk vectors forward along the walk: it is the
/// ordered product of rho(e)^{+-1}, taking rho([u,v])^{-1} for an ascending
/// step u -> v and rho([v,u]) for a descending one. For a closed walk this
/// is the holonomy at the start vertex.
#[derive(Clone, Debug)]
pub struct EdgePath {
    steps: Vec<(usize, usize)>,
    composite: IntMatrix,
}

impl EdgePath {
    pub fn from_vertices(system: &LocalSystem, vertices: &[usize]) -> Result<Self, SystemError> {
        if vertices.is_empty() {
            return Err(SystemError::NotAPath(vertices.to_vec()));
        }
        let mut steps = Vec::new();
        let mut composite = IntMatrix::identity(system.rank());
        for w in vertices.windows(2) {
            let (u, v) = (w[0], w[1]);
            let edge = if u < v { vec![u, v] } else { vec![v, u] };
            let rho = system
                .transport(&edge)
                .ok_or_else(|| SystemError::NotAPath(vertices.to_vec()))?;
            let step = if u < v {
                rho.inverse_unimodular()
                    .expect("valid systems have unimodular transport")
            } else {
                rho.clone()
            };
            composite = step.mul(&composite).expect("rank match");
            steps.push((u, v));
        }
        Ok(Self { steps, composite })
    }

    pub fn steps(&self) -> &[(usize, usize)] {
        &self.steps
    }

    /// Forward transport stalk(start) -> stalk(end).
    pub fn composite(&self) -> &IntMatrix {
        &self.composite
    }
}

/// Loop holonomy around the canonical generator of the 3-vertex circle,
/// based at vertex 0 and walking 0 -> 1 -> 2 -> 0.
pub fn circle_loop_holonomy(system: &LocalSystem) -> Result<IntMatrix, SystemError> {
    Ok(EdgePath::from_vertices(system, &[0, 1, 2, 0])?
        .composite()
        .clone())
}

/// Pairing vectors in dual stalks: the standard dot product.
pub fn dot(u: &[BigInt], v: &[BigInt]) -> BigInt {
    debug_assert_eq!(u.len(), v.len());
    let mut s = BigInt::zero();
    for (a, b) in u.iter().zip(v) {
        s += a * b;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use crate::simplicial::product_complex;

    fn circle_system(m: IntMatrix) -> LocalSystem {
        let base = Arc::new(SimplicialComplex::circle());
        let rank = m.rows();
        LocalSystem::from_edges(base, rank, &[(vec![0, 2], m)]).unwrap()
    }

    #[test]
    fn trivial_system_is_valid() {
        for k in [
            SimplicialComplex::circle(),
            SimplicialComplex::sphere2(),
            SimplicialComplex::projective_plane(),
        ] {
            let l = LocalSystem::trivial(Arc::new(k), 2).unwrap();
            assert!(l.validate_cocycle().is_ok());
        }
    }

    #[test]
    fn circle_loop_matrix_is_unconstrained() {
        let l = circle_system(IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]));
        assert!(l.validate_cocycle().is_ok());
        assert_eq!(
            circle_loop_holonomy(&l).unwrap(),
            IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]])
        );
    }

    #[test]
    fn non_unimodular_edge_is_reported() {
        let l = circle_system(IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]));
        assert_eq!(
            l.validate_cocycle(),
            Err(CocycleViolation::NonUnimodular(vec![0, 2]))
        );
    }

    #[test]
    fn perturbed_torus_system_names_a_triangle() {
        let a = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]);
        let c = SimplicialComplex::circle();
        let prod = product_complex(&c, &c);
        let l1 = circle_system(a.clone());
        let l2 = circle_system(a);
        let mut sys = pullback_product(&prod, &l1, &l2).unwrap();
        assert!(sys.validate_cocycle().is_ok());
        // flip one diagonal edge to something inconsistent
        let diag = vec![0, 4]; // (0,0) -> (1,1)
        let mut bad = IntMatrix::identity(4);
        bad.set(0, 3, num_bigint::BigInt::from(1));
        sys.set_transport(&diag, bad).unwrap();
        match sys.validate_cocycle() {
            Err(CocycleViolation::Triangle(t)) => assert!(t.contains(&0) && t.contains(&4)),
            other => panic!("expected triangle violation, got {other:?}"),
        }
    }

    #[test]
    fn dual_example_and_involution() {
        let a = IntMatrix::from_rows(&[vec![1, 0], vec![-1, 1]]);
        let l = circle_system(a);
        let dual = l.dual_system();
        assert_eq!(
            dual.transport(&[0, 2]).unwrap(),
            &IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]])
        );
        assert_eq!(dual.dual_system(), l);
        assert!(dual.is_dual_of(&l));
        // trivial stays trivial
        let t = LocalSystem::trivial(Arc::new(SimplicialComplex::circle()), 2).unwrap();
        assert_eq!(t.dual_system(), t);
    }

    #[test]
    fn direct_sum_blocks() {
        let a = IntMatrix::from_rows(&[vec![-1]]);
        let b = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]);
        let s = circle_system(a).direct_sum(&circle_system(b)).unwrap();
        assert_eq!(s.rank(), 3);
        assert!(s.validate_cocycle().is_ok());
        assert_eq!(
            circle_loop_holonomy(&s).unwrap(),
            IntMatrix::from_rows(&[vec![-1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]])
        );
        // mismatched bases are rejected
        let other = LocalSystem::trivial(Arc::new(SimplicialComplex::sphere2()), 1).unwrap();
        assert!(matches!(
            circle_system(IntMatrix::identity(1)).direct_sum(&other),
            Err(SystemError::BaseMismatch)
        ));
    }

    #[test]
    fn pullback_product_loop_holonomies() {
        let a = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]);
        let b = IntMatrix::from_rows(&[vec![0, -1], vec![1, 0]]);
        let c = SimplicialComplex::circle();
        let prod = product_complex(&c, &c);
        let sys = pullback_product(&prod, &circle_system(a.clone()), &circle_system(b.clone()))
            .unwrap();
        assert!(sys.validate_cocycle().is_ok());
        // factor-1 loop: (0,0) -> (1,0) -> (2,0) -> (0,0), vertex index u*3
        let loop1 = EdgePath::from_vertices(&sys, &[0, 3, 6, 0]).unwrap();
        assert_eq!(
            loop1.composite(),
            &IntMatrix::block_diag(&a, &IntMatrix::identity(2))
        );
        // factor-2 loop: (0,0) -> (0,1) -> (0,2) -> (0,0)
        let loop2 = EdgePath::from_vertices(&sys, &[0, 1, 2, 0]).unwrap();
        assert_eq!(
            loop2.composite(),
            &IntMatrix::block_diag(&IntMatrix::identity(2), &b)
        );
    }

    #[test]
    fn trivial_pullback_is_trivial() {
        let c = SimplicialComplex::circle();
        let prod = product_complex(&c, &c);
        let t1 = LocalSystem::trivial(Arc::new(c.clone()), 1).unwrap();
        let sys = pullback_product(&prod, &t1, &t1).unwrap();
        let expected = LocalSystem::trivial(Arc::new(prod.complex().clone()), 2).unwrap();
        assert_eq!(sys, expected);
    }

    #[test]
    fn holonomy_conjugation_under_basepoint_change() {
        let a = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        let l = circle_system(a);
        let h0 = EdgePath::from_vertices(&l, &[0, 1, 2, 0]).unwrap();
        let h1 = EdgePath::from_vertices(&l, &[1, 2, 0, 1]).unwrap();
        let conn = EdgePath::from_vertices(&l, &[0, 1]).unwrap();
        // holonomy at 1 = C * holonomy at 0 * C^-1 with C the connecting transport
        let lhs = h1.composite().clone();
        let rhs = conn
            .composite()
            .mul(h0.composite())
            .unwrap()
            .mul(&conn.composite().inverse_unimodular().unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);

        // same statement on a torus loop
        let c = SimplicialComplex::circle();
        let prod = product_complex(&c, &c);
        let sys = pullback_product(
            &prod,
            &circle_system(IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]])),
            &circle_system(IntMatrix::from_rows(&[vec![-1]])),
        )
        .unwrap();
        let h0 = EdgePath::from_vertices(&sys, &[0, 3, 6, 0]).unwrap();
        let h1 = EdgePath::from_vertices(&sys, &[4, 7, 1, 4]).unwrap();
        let conn = EdgePath::from_vertices(&sys, &[0, 4]).unwrap();
        let rhs = conn
            .composite()
            .mul(h0.composite())
            .unwrap()
            .mul(&conn.composite().inverse_unimodular().unwrap())
            .unwrap();
        assert_eq!(h1.composite(), &rhs);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        /// <M^-T u, M v> = <u, v>: the well-definedness of the coefficient
        /// pairing under simultaneous transport.
        #[test]
        fn pairing_invariance(
            shears in proptest::collection::vec((0usize..3, 0usize..3, -2i64..=2), 0..6),
            u in proptest::collection::vec(-9i64..=9, 3),
            v in proptest::collection::vec(-9i64..=9, 3),
        ) {
            let mut m = IntMatrix::identity(3);
            for (i, j, c) in shears {
                if i != j {
                    let mut e = IntMatrix::identity(3);
                    e.set(i, j, BigInt::from(c));
                    m = m.mul(&e).unwrap();
                }
            }
            prop_assert!(m.is_unimodular());
            let u: Vec<BigInt> = u.into_iter().map(BigInt::from).collect();
            let v: Vec<BigInt> = v.into_iter().map(BigInt::from).collect();
            let mu = m.inverse_transpose().unwrap().mul_vec(&u).unwrap();
            let mv = m.mul_vec(&v).unwrap();
            prop_assert_eq!(dot(&mu, &mv), dot(&u, &v));
        }
    }
}
