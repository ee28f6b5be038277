//! Shared helpers for the integration suites: the independent Koszul-complex
//! oracle for twisted torus cohomology, random data generators, and model
//! shortcuts.
//!
//! The oracle builds the group-cohomology complex of Z^k acting on Z^n
//! through commuting matrices directly, with no reference to simplicial
//! complexes or the engine's cochain pipeline, and reads off ranks and
//! torsion from Smith normal forms.

use affinelag::linalg::{smith_normal_form, IntMatrix, Rational};
use affinelag::local_system::LocalSystem;
use affinelag::simplicial::{product_complex, SimplicialComplex};
use affinelag::twisted::{Ring, TwistedCochain};
use num_bigint::BigInt;
use rand::Rng;
use std::sync::Arc;

/// Shape of a finitely generated abelian group: free rank plus invariant
/// factors > 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub free: usize,
    pub torsion: Vec<BigInt>,
}

/// Cohomology of the Koszul complex of commuting operators (M_i - I) on
/// Z^n, degree by degree. This equals the twisted cohomology of the k-torus
/// whose fundamental loops act by the M_i.
pub fn koszul_cohomology(matrices: &[IntMatrix], degree: usize) -> Shape {
    let k = matrices.len();
    let n = matrices.first().map_or(1, |m| m.rows());
    if degree > k {
        return Shape {
            free: 0,
            torsion: vec![],
        };
    }
    let ops: Vec<IntMatrix> = matrices
        .iter()
        .map(|m| {
            let mut d = m.clone();
            for i in 0..n {
                let v = d.get(i, i) - BigInt::from(1);
                d.set(i, i, v);
            }
            d
        })
        .collect();
    let d_down = koszul_matrix(&ops, degree.wrapping_sub(1), n, k);
    let d_up = koszul_matrix(&ops, degree, n, k);
    let below = smith_normal_form(&d_down);
    let above = smith_normal_form(&d_up);
    let dim = subsets(k, degree).len() * n;
    Shape {
        free: dim - above.rank() - below.rank(),
        torsion: below.torsion_factors(),
    }
}

/// All size-p subsets of 0..k in lexicographic order.
fn subsets(k: usize, p: usize) -> Vec<Vec<usize>> {
    if p > k {
        return vec![];
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, k: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            rec(i + 1, k, p, cur, out);
            cur.pop();
        }
    }
    rec(0, k, p, &mut cur, &mut out);
    out
}

/// Matrix of the Koszul differential from degree p to p+1; the degree-(-1)
/// source is the zero module.
fn koszul_matrix(ops: &[IntMatrix], p: usize, n: usize, k: usize) -> IntMatrix {
    if p == usize::MAX {
        // wrapped from degree 0: empty source
        return IntMatrix::zeros(subsets(k, 0).len() * n, 0);
    }
    let src = subsets(k, p);
    let dst = subsets(k, p + 1);
    let mut m = IntMatrix::zeros(dst.len() * n, src.len() * n);
    for (si, s) in src.iter().enumerate() {
        for i in 0..k {
            if s.contains(&i) {
                continue;
            }
            let mut t = s.clone();
            t.push(i);
            t.sort();
            let ti = dst.binary_search(&t).expect("subset enumeration");
            let sign = s.iter().filter(|&&j| j < i).count() % 2;
            for r in 0..n {
                for c in 0..n {
                    let e = ops[i].get(r, c);
                    if num_traits::Zero::is_zero(e) {
                        continue;
                    }
                    let v = if sign == 0 { e.clone() } else { -e.clone() };
                    let prev = m.get(ti * n + r, si * n + c).clone();
                    m.set(ti * n + r, si * n + c, prev + v);
                }
            }
        }
    }
    m
}

/// The k-torus staircase complex.
pub fn torus_complex(k: usize) -> SimplicialComplex {
    let circle = SimplicialComplex::circle();
    let mut out = circle.clone();
    for _ in 1..k {
        out = product_complex(&out, &circle).into_complex();
    }
    out
}

/// Circle system with the given matrix on the closing edge.
pub fn circle_system(m: IntMatrix) -> LocalSystem {
    let base = Arc::new(SimplicialComplex::circle());
    let rank = m.rows();
    LocalSystem::from_edges(base, rank, &[(vec![0, 2], m)]).unwrap()
}

/// Torus system whose factor loops act by the given matrices, as the
/// iterated pullback of circle systems. The rank is the sum of the factor
/// ranks and the loop actions are block diagonal.
pub fn torus_system(loops: &[IntMatrix]) -> Arc<LocalSystem> {
    let circle = SimplicialComplex::circle();
    let mut complex = circle.clone();
    let mut sys = circle_system(loops[0].clone());
    for m in &loops[1..] {
        let prod = product_complex(&complex, &circle);
        sys = affinelag::local_system::pullback_product(&prod, &sys, &circle_system(m.clone()))
            .unwrap();
        complex = prod.into_complex();
    }
    Arc::new(sys)
}

/// Torus system where all factor loops act on one shared stalk Z^n through
/// pairwise commuting matrices: the edge transport is the product of M_j
/// over the factors whose projection is the closing edge. Each product
/// triangle moves every factor at most once, so commutativity makes this a
/// valid cocycle.
pub fn torus_system_commuting(loops: &[IntMatrix]) -> Arc<LocalSystem> {
    let k = loops.len();
    let n = loops[0].rows();
    for a in loops {
        for b in loops {
            assert_eq!(
                a.mul(b).unwrap(),
                b.mul(a).unwrap(),
                "loop matrices must commute"
            );
        }
    }
    let base = Arc::new(torus_complex(k));
    let digit = |w: usize, j: usize| (w / 3usize.pow((k - 1 - j) as u32)) % 3;
    let mut sys = LocalSystem::trivial(Arc::clone(&base), n).unwrap();
    for edge in base.simplices(1) {
        let mut m = IntMatrix::identity(n);
        for (j, mj) in loops.iter().enumerate() {
            if digit(edge[0], j) == 0 && digit(edge[1], j) == 2 {
                m = m.mul(mj).unwrap();
            }
        }
        sys.set_transport(edge, m).unwrap();
    }
    assert!(sys.validate_cocycle().is_ok());
    Arc::new(sys)
}

/// Random unimodular matrix: a short product of elementary shears and sign
/// flips with small coefficients.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for _ in 0..6 {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let c = rng.gen_range(-2i64..=2);
        let mut e = IntMatrix::identity(n);
        e.set(i, j, BigInt::from(c));
        m = m.mul(&e).unwrap();
    }
    if rng.gen_bool(0.3) {
        let mut f = IntMatrix::identity(n);
        let i = rng.gen_range(0..n);
        f.set(i, i, BigInt::from(-1));
        m = m.mul(&f).unwrap();
    }
    m
}

/// Random valid system on a complex: a gauge transform of the trivial one,
/// optionally twisted through product loops first.
pub fn random_gauged_system<R: Rng>(
    rng: &mut R,
    complex: &SimplicialComplex,
    rank: usize,
) -> Arc<LocalSystem> {
    let gauges: Vec<IntMatrix> = (0..complex.vertex_count())
        .map(|_| random_unimodular(rng, rank))
        .collect();
    let base = Arc::new(complex.clone());
    let mut sys = LocalSystem::trivial(Arc::clone(&base), rank).unwrap();
    for edge in base.simplices(1) {
        let gi = &gauges[edge[0]];
        let gj_inv = gauges[edge[1]].inverse_unimodular().unwrap();
        sys.set_transport(edge, gi.mul(&gj_inv).unwrap()).unwrap();
    }
    Arc::new(sys)
}

/// Random cochain with small integer values.
pub fn random_int_cochain<R: Rng>(
    rng: &mut R,
    system: &Arc<LocalSystem>,
    degree: usize,
) -> TwistedCochain {
    let mut c = TwistedCochain::zero(Arc::clone(system), degree, Ring::Z);
    let simplices: Vec<Vec<usize>> = system.base().simplices(degree).to_vec();
    for s in simplices {
        let v: Vec<Rational> = (0..system.rank())
            .map(|_| Rational::from(BigInt::from(rng.gen_range(-5i64..=5))))
            .collect();
        c.set_value(&s, v).unwrap();
    }
    c
}

/// Random cochain with small rational values.
pub fn random_rat_cochain<R: Rng>(
    rng: &mut R,
    system: &Arc<LocalSystem>,
    degree: usize,
) -> TwistedCochain {
    let mut c = TwistedCochain::zero(Arc::clone(system), degree, Ring::Q);
    let simplices: Vec<Vec<usize>> = system.base().simplices(degree).to_vec();
    for s in simplices {
        let v: Vec<Rational> = (0..system.rank())
            .map(|_| {
                Rational::new(
                    BigInt::from(rng.gen_range(-5i64..=5)),
                    BigInt::from(rng.gen_range(1i64..=3)),
                )
            })
            .collect();
        c.set_value(&s, v).unwrap();
    }
    c
}
