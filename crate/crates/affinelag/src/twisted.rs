//! Twisted cochain complexes and their cohomology over Z and Q.
//!
//! Cochains take values in the stalk at the least vertex of each simplex.
//! The twisted coboundary transports the zeroth face before the alternating
//! sum:
//!
//!   (delta c)([v0..v_{p+1}]) = rho([v0,v1]) c([v1..v_{p+1}])
//!                              + sum_{i=1}^{p+1} (-1)^i c([v0..^v_i..v_{p+1}])
//!
//! Cohomology groups are computed constructively from two Smith normal
//! forms: the invariant factors of the incoming coboundary give the torsion,
//! and a saturated kernel computation in its cokernel coordinates gives free
//! representatives. The decomposition is kept so that classes can be
//! expressed in coordinates and coboundaries certified with witnesses.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::sync::Arc;
use thiserror::Error;

use crate::linalg::{
    smith_col_transforms, smith_normal_form, smith_row_transforms, smith_shape, IntMatrix,
    Rational,
};
use crate::local_system::LocalSystem;

/// Coefficient ring of a cochain: the integers or the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Ring {
    Z,
    Q,
}

impl Ring {
    /// Smallest ring containing both: Z unless either side is Q.
    pub fn join(a: Ring, b: Ring) -> Ring {
        if a == Ring::Q || b == Ring::Q {
            Ring::Q
        } else {
            Ring::Z
        }
    }
}

impl std::fmt::Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ring::Z => write!(f, "Z"),
            Ring::Q => write!(f, "Q"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("cochain is not a cocycle")]
    NotACocycle,
    #[error("cochain belongs to a different system, degree or ring")]
    Mismatch,
    #[error("a Z-cochain must have integral values")]
    NotIntegral,
    #[error("cup product arguments must live in dual systems on the same base")]
    NotDualSystems,
    #[error("value for simplex {0:?}: {1}")]
    BadValue(Vec<usize>, String),
}

/// A p-cochain with values in the stalks of a local system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedCochain {
    system: Arc<LocalSystem>,
    degree: usize,
    ring: Ring,
    /// values[i] is the stalk vector over the i-th p-simplex
    values: Vec<Vec<Rational>>,
}

impl TwistedCochain {
    pub fn zero(system: Arc<LocalSystem>, degree: usize, ring: Ring) -> Self {
        let count = system.base().simplex_count(degree);
        let rank = system.rank();
        Self {
            system,
            degree,
            ring,
            values: vec![vec![Rational::zero(); rank]; count],
        }
    }

    pub fn from_values(
        system: Arc<LocalSystem>,
        degree: usize,
        ring: Ring,
        values: Vec<Vec<Rational>>,
    ) -> Result<Self, CohomologyError> {
        let count = system.base().simplex_count(degree);
        if values.len() != count {
            return Err(CohomologyError::Mismatch);
        }
        for (i, v) in values.iter().enumerate() {
            if v.len() != system.rank() {
                return Err(CohomologyError::BadValue(
                    system.base().simplices(degree)[i].clone(),
                    format!(
                        "stalk vector has length {}, expected {}",
                        v.len(),
                        system.rank()
                    ),
                ));
            }
            if ring == Ring::Z && !v.iter().all(|x| x.is_integer()) {
                return Err(CohomologyError::NotIntegral);
            }
        }
        Ok(Self {
            system,
            degree,
            ring,
            values,
        })
    }

    pub fn system(&self) -> &Arc<LocalSystem> {
        &self.system
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }

    pub fn value(&self, simplex: &[usize]) -> Option<&[Rational]> {
        if simplex.len() != self.degree + 1 {
            return None;
        }
        self.system
            .base()
            .simplex_index(simplex)
            .map(|i| self.values[i].as_slice())
    }

    pub fn set_value(
        &mut self,
        simplex: &[usize],
        value: Vec<Rational>,
    ) -> Result<(), CohomologyError> {
        if simplex.len() != self.degree + 1 {
            return Err(CohomologyError::Mismatch);
        }
        if value.len() != self.system.rank() {
            return Err(CohomologyError::BadValue(
                simplex.to_vec(),
                format!(
                    "stalk vector has length {}, expected {}",
                    value.len(),
                    self.system.rank()
                ),
            ));
        }
        if self.ring == Ring::Z && !value.iter().all(|x| x.is_integer()) {
            return Err(CohomologyError::NotIntegral);
        }
        let idx = self
            .system
            .base()
            .simplex_index(simplex)
            .ok_or_else(|| CohomologyError::BadValue(simplex.to_vec(), "unknown simplex".into()))?;
        self.values[idx] = value;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.iter().all(|x| x.is_zero()))
    }

    /// Reinterpret over Q. Identity on values.
    pub fn to_ring_q(&self) -> Self {
        let mut c = self.clone();
        c.ring = Ring::Q;
        c
    }

    /// Reinterpret over Z; fails when a value is non-integral.
    pub fn to_ring_z(&self) -> Result<Self, CohomologyError> {
        if !self.values.iter().all(|v| v.iter().all(|x| x.is_integer())) {
            return Err(CohomologyError::NotIntegral);
        }
        let mut c = self.clone();
        c.ring = Ring::Z;
        Ok(c)
    }

    pub fn add(&self, other: &Self) -> Result<Self, CohomologyError> {
        if self.system != other.system || self.degree != other.degree {
            return Err(CohomologyError::Mismatch);
        }
        let mut out = self.clone();
        out.ring = Ring::join(self.ring, other.ring);
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CohomologyError> {
        self.add(&other.scale(&Rational::from(BigInt::from(-1))))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let mut out = self.clone();
        if !factor.is_integer() {
            out.ring = Ring::Q;
        }
        for v in out.values.iter_mut() {
            for x in v.iter_mut() {
                *x *= factor;
            }
        }
        out
    }

    /// Values flattened in (simplex, stalk coordinate) order.
    pub fn flat_values(&self) -> Vec<Rational> {
        self.values.iter().flatten().cloned().collect()
    }

    pub(crate) fn flat_integers(&self) -> Result<Vec<BigInt>, CohomologyError> {
        let mut out = Vec::with_capacity(self.values.len() * self.system.rank());
        for v in &self.values {
            for x in v {
                if !x.is_integer() {
                    return Err(CohomologyError::NotIntegral);
                }
                out.push(x.numer().clone());
            }
        }
        Ok(out)
    }

    pub(crate) fn from_flat(
        system: Arc<LocalSystem>,
        degree: usize,
        ring: Ring,
        flat: &[Rational],
    ) -> Self {
        let rank = system.rank();
        let values = flat.chunks(rank).map(|c| c.to_vec()).collect();
        Self {
            system,
            degree,
            ring,
            values,
        }
    }
}

/// The twisted coboundary of a cochain.
pub fn coboundary(c: &TwistedCochain) -> TwistedCochain {
    let system = &c.system;
    let base = system.base();
    let p = c.degree;
    let mut out = TwistedCochain::zero(Arc::clone(system), p + 1, c.ring);
    for (ti, tau) in base.simplices(p + 1).iter().enumerate() {
        let mut acc = vec![Rational::zero(); system.rank()];
        for i in 0..tau.len() {
            let mut face = tau.clone();
            face.remove(i);
            let fi = base.simplex_index(&face).expect("face closure");
            let fv = &c.values[fi];
            if i == 0 {
                let rho = system
                    .transport(&[tau[0], tau[1]])
                    .expect("edge of a simplex");
                let moved = rho.mul_vec_rational(fv).expect("rank match");
                for (a, m) in acc.iter_mut().zip(moved) {
                    *a += m;
                }
            } else if i % 2 == 0 {
                for (a, x) in acc.iter_mut().zip(fv) {
                    *a += x;
                }
            } else {
                for (a, x) in acc.iter_mut().zip(fv) {
                    *a -= x;
                }
            }
        }
        out.values[ti] = acc;
    }
    out
}

/// Matrix of the twisted coboundary C^p -> C^{p+1} in the flat bases.
pub fn coboundary_matrix(system: &LocalSystem, p: usize) -> IntMatrix {
    let base = system.base();
    let n = system.rank();
    let rows = n * base.simplex_count(p + 1);
    let cols = n * base.simplex_count(p);
    let mut m = IntMatrix::zeros(rows, cols);
    for (ti, tau) in base.simplices(p + 1).iter().enumerate() {
        for i in 0..tau.len() {
            let mut face = tau.clone();
            face.remove(i);
            let fi = base.simplex_index(&face).expect("face closure");
            if i == 0 {
                let rho = system
                    .transport(&[tau[0], tau[1]])
                    .expect("edge of a simplex");
                for r in 0..n {
                    for c in 0..n {
                        let e = rho.get(r, c);
                        if !e.is_zero() {
                            m.set(ti * n + r, fi * n + c, e.clone());
                        }
                    }
                }
            } else {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                for r in 0..n {
                    m.set(ti * n + r, fi * n + r, BigInt::from(sign));
                }
            }
        }
    }
    m
}

/// Coordinates of a cohomology class: a free part over the group's free
/// basis and canonical residues against the torsion invariant factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassCoordinates {
    pub free: Vec<Rational>,
    pub torsion: Vec<BigInt>,
}

impl ClassCoordinates {
    pub fn is_zero(&self) -> bool {
        self.free.iter().all(|x| x.is_zero()) && self.torsion.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, f: &Rational) -> Self {
        Self {
            free: self.free.iter().map(|x| x * f).collect(),
            torsion: self.torsion.clone(),
        }
    }
}

/// Decomposition data underlying a computed cohomology group. Opaque to
/// callers; class coordinates and basis cocycles are derived from it.
#[derive(Clone, Debug)]
struct Decomposition {
    /// dim C^p in the flat basis
    dim: usize,
    /// rank of the incoming coboundary
    r0: usize,
    /// its invariant factors (first r0 nonzero)
    diag: Vec<BigInt>,
    /// positions i < r0 with diag[i] > 1
    torsion_positions: Vec<usize>,
    /// row transform of the incoming coboundary's Smith form
    u0: IntMatrix,
    /// rows [r2..] of v2^{-1} from the kernel-side Smith form
    v2_inv_bottom: IntMatrix,
}

#[derive(Clone, Debug)]
struct Constructive {
    basis_cocycles: Vec<TwistedCochain>,
    decomp: Decomposition,
}

/// A finitely generated cohomology group with representative cocycles.
///
/// Over Z the group is Z^free_rank plus one cyclic factor per entry of
/// `torsion`; over Q the torsion list is empty. `basis_cocycles` lists the
/// free representatives first, then one representative per torsion factor.
///
/// The group shape is computed on construction; the change-of-basis data
/// behind basis cocycles, class coordinates and witnesses is computed on
/// first use and cached.
#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    system: Arc<LocalSystem>,
    degree: usize,
    ring: Ring,
    shape_cache: std::sync::OnceLock<(usize, Vec<BigInt>)>,
    constructive: std::sync::OnceLock<Constructive>,
}

/// Shape summary of a cohomology group for reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupShape {
    pub degree: usize,
    pub ring: Ring,
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl CohomologyGroup {
    pub fn system(&self) -> &Arc<LocalSystem> {
        &self.system
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    /// The (free rank, torsion) shape. Derived from the constructive data
    /// when that has already been computed, otherwise from a fast untracked
    /// pass over the two coboundary Smith forms.
    fn shape_parts(&self) -> &(usize, Vec<BigInt>) {
        if let Some(c) = self.constructive.get() {
            return self.shape_cache.get_or_init(|| {
                let torsion: Vec<BigInt> = c
                    .decomp
                    .torsion_positions
                    .iter()
                    .map(|&i| c.decomp.diag[i].clone())
                    .collect();
                (c.basis_cocycles.len() - torsion.len(), torsion)
            });
        }
        self.shape_cache.get_or_init(|| {
            let base = self.system.base();
            let dim = self.system.rank() * base.simplex_count(self.degree);
            if dim == 0 {
                return (0, vec![]);
            }
            let d_down = if self.degree == 0 {
                IntMatrix::zeros(dim, 0)
            } else {
                coboundary_matrix(&self.system, self.degree - 1)
            };
            let below = smith_shape(&d_down);
            let torsion = match self.ring {
                Ring::Z => below.torsion_factors(),
                Ring::Q => vec![],
            };
            let d_up = coboundary_matrix(&self.system, self.degree);
            let above = smith_shape(&d_up);
            (dim - below.rank() - above.rank(), torsion)
        })
    }

    pub fn free_rank(&self) -> usize {
        self.shape_parts().0
    }

    /// Invariant factors > 1; empty over Q.
    pub fn torsion(&self) -> &[BigInt] {
        &self.shape_parts().1
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank() == 0 && self.torsion().is_empty()
    }

    fn constructive(&self) -> &Constructive {
        self.constructive
            .get_or_init(|| compute_constructive(&self.system, self.degree, self.ring))
    }

    pub fn basis_cocycles(&self) -> &[TwistedCochain] {
        &self.constructive().basis_cocycles
    }

    pub fn shape(&self) -> GroupShape {
        GroupShape {
            degree: self.degree,
            ring: self.ring,
            free_rank: self.free_rank(),
            torsion: self.torsion().to_vec(),
        }
    }

    /// Coordinates of a cocycle's class. Subtracting the coordinate
    /// combination of basis cocycles from the input always leaves a
    /// coboundary over the group's ring.
    pub fn class_coordinates(
        &self,
        c: &TwistedCochain,
    ) -> Result<ClassCoordinates, CohomologyError> {
        if c.system != self.system || c.degree != self.degree || c.ring != self.ring {
            return Err(CohomologyError::Mismatch);
        }
        if !coboundary(c).is_zero() {
            return Err(CohomologyError::NotACocycle);
        }
        let d = &self.constructive().decomp;
        if d.dim == 0 {
            return Ok(ClassCoordinates {
                free: vec![],
                torsion: vec![],
            });
        }
        // integral cochains take the pure-integer path; rational ones pay
        // for rational arithmetic
        if let Ok(flat) = c.flat_integers() {
            let y = d.u0.mul_vec(&flat).expect("dimension");
            let torsion = if self.ring == Ring::Z {
                d.torsion_positions
                    .iter()
                    .map(|&i| y[i].mod_floor(&d.diag[i]))
                    .collect()
            } else {
                vec![]
            };
            let free = d
                .v2_inv_bottom
                .mul_vec(&y[d.r0..])
                .expect("dimension")
                .into_iter()
                .map(Rational::from)
                .collect();
            return Ok(ClassCoordinates { free, torsion });
        }
        let flat = c.flat_values();
        let y = d.u0.mul_vec_rational(&flat).expect("dimension");
        let y_tail = &y[d.r0..];
        let free = d
            .v2_inv_bottom
            .mul_vec_rational(y_tail)
            .expect("dimension");
        Ok(ClassCoordinates {
            free,
            torsion: vec![],
        })
    }

    /// The cocycle with the given coordinates: the coordinate combination of
    /// the basis cocycles.
    pub fn cocycle_from_coordinates(
        &self,
        coords: &ClassCoordinates,
    ) -> Result<TwistedCochain, CohomologyError> {
        if coords.free.len() != self.free_rank() || coords.torsion.len() != self.torsion().len() {
            return Err(CohomologyError::Mismatch);
        }
        let basis = self.basis_cocycles();
        let mut out = TwistedCochain::zero(Arc::clone(&self.system), self.degree, self.ring);
        for (i, f) in coords.free.iter().enumerate() {
            out = out.add(&basis[i].scale(f))?;
        }
        for (i, t) in coords.torsion.iter().enumerate() {
            out = out.add(&basis[self.free_rank() + i].scale(&Rational::from(t.clone())))?;
        }
        out.ring = self.ring;
        Ok(out)
    }
}

/// H^degree(base; stalks of `system`) over the given ring.
///
/// Degrees beyond the dimension of the base give the zero group. All
/// computation happens lazily: the shape on first rank or torsion query,
/// the constructive decomposition on first use of basis cocycles,
/// coordinates or witnesses.
pub fn cohomology(system: &Arc<LocalSystem>, degree: usize, ring: Ring) -> CohomologyGroup {
    CohomologyGroup {
        system: Arc::clone(system),
        degree,
        ring,
        shape_cache: std::sync::OnceLock::new(),
        constructive: std::sync::OnceLock::new(),
    }
}

/// The tracked Smith computations behind basis cocycles, coordinates and
/// witnesses.
fn compute_constructive(system: &Arc<LocalSystem>, degree: usize, ring: Ring) -> Constructive {
    let base = system.base();
    let n = system.rank();
    let dim = n * base.simplex_count(degree);
    if dim == 0 {
        return Constructive {
            basis_cocycles: vec![],
            decomp: Decomposition {
                dim: 0,
                r0: 0,
                diag: vec![],
                torsion_positions: vec![],
                u0: IntMatrix::zeros(0, 0),
                v2_inv_bottom: IntMatrix::zeros(0, 0),
            },
        };
    }

    let d_down = if degree == 0 {
        IntMatrix::zeros(dim, 0)
    } else {
        coboundary_matrix(system, degree - 1)
    };
    let below = smith_row_transforms(&d_down);
    let r0 = below.rank;
    let u0 = below.u.expect("tracked");
    let u0_inv = below.u_inv.expect("tracked");
    let diag: Vec<BigInt> = {
        let m = below.s.rows().min(below.s.cols());
        (0..m).map(|i| below.s.get(i, i).clone()).collect()
    };
    let torsion_positions: Vec<usize> = (0..r0).filter(|&i| !diag[i].is_one()).collect();

    // Coboundary out of degree p, in the cokernel coordinates of the
    // incoming one. Its first r0 columns vanish because im(d_down) consists
    // of cocycles, so the kernel splits off those coordinates.
    let d_up = coboundary_matrix(system, degree);
    let a = d_up.mul(&u0_inv).expect("dimension");
    debug_assert!((0..r0).all(|c| (0..a.rows()).all(|r| a.get(r, c).is_zero())));
    let a_tail = a.submatrix_cols(r0, dim);
    let above = smith_col_transforms(&a_tail);
    let r2 = above.rank;
    let v2 = above.v.expect("tracked");
    let v2_inv = above.v_inv.expect("tracked");
    let tail = dim - r0;
    let free_rank = tail - r2;
    let v2_inv_bottom = v2_inv.submatrix_rows(r2, tail);

    // basis representatives: free part first, then torsion
    let u0_inv_right = u0_inv.submatrix_cols(r0, dim);
    let mut basis = Vec::with_capacity(free_rank + torsion_positions.len());
    for j in r2..tail {
        let col = v2.column(j);
        let x = u0_inv_right.mul_vec(&col).expect("dimension");
        let flat: Vec<Rational> = x.into_iter().map(Rational::from).collect();
        basis.push(TwistedCochain::from_flat(
            Arc::clone(system),
            degree,
            ring,
            &flat,
        ));
    }
    let torsion_positions = match ring {
        Ring::Z => {
            for &i in &torsion_positions {
                let col = u0_inv.column(i);
                let flat: Vec<Rational> = col.into_iter().map(Rational::from).collect();
                basis.push(TwistedCochain::from_flat(
                    Arc::clone(system),
                    degree,
                    ring,
                    &flat,
                ));
            }
            torsion_positions
        }
        Ring::Q => vec![],
    };

    Constructive {
        basis_cocycles: basis,
        decomp: Decomposition {
            dim,
            r0,
            diag,
            torsion_positions,
            u0,
            v2_inv_bottom,
        },
    }
}

/// Decide whether a cocycle is a coboundary over its ring; returns a witness
/// x with delta x = c when it is. For degree 0 the test is c = 0 and the
/// witness is the degenerate zero cochain.
pub fn is_coboundary(c: &TwistedCochain) -> Result<Option<TwistedCochain>, CohomologyError> {
    if !coboundary(c).is_zero() {
        return Err(CohomologyError::NotACocycle);
    }
    let system = &c.system;
    if c.degree == 0 {
        return Ok(c
            .is_zero()
            .then(|| TwistedCochain::zero(Arc::clone(system), 0, c.ring)));
    }
    let d_down = coboundary_matrix(system, c.degree - 1);
    let snf = smith_normal_form(&d_down);
    let rank = snf.rank();
    match c.ring {
        Ring::Z => {
            let b = c.flat_integers()?;
            let w = snf.u.mul_vec(&b).expect("dimension");
            let mut y = vec![BigInt::zero(); d_down.cols()];
            for (i, wi) in w.iter().enumerate() {
                if i < rank {
                    let d = snf.s.get(i, i);
                    let (q, r) = wi.div_rem(d);
                    if !r.is_zero() {
                        return Ok(None);
                    }
                    y[i] = q;
                } else if !wi.is_zero() {
                    return Ok(None);
                }
            }
            let x = snf.v.mul_vec(&y).expect("dimension");
            let flat: Vec<Rational> = x.into_iter().map(Rational::from).collect();
            Ok(Some(TwistedCochain::from_flat(
                Arc::clone(system),
                c.degree - 1,
                c.ring,
                &flat,
            )))
        }
        Ring::Q => {
            let b = c.flat_values();
            let w = snf.u.mul_vec_rational(&b).expect("dimension");
            let mut y = vec![Rational::zero(); d_down.cols()];
            for (i, wi) in w.iter().enumerate() {
                if i < rank {
                    y[i] = wi / Rational::from(snf.s.get(i, i).clone());
                } else if !wi.is_zero() {
                    return Ok(None);
                }
            }
            let x = snf.v.mul_vec_rational(&y).expect("dimension");
            Ok(Some(TwistedCochain::from_flat(
                Arc::clone(system),
                c.degree - 1,
                c.ring,
                &x,
            )))
        }
    }
}

/// Cup product combined with the coefficient pairing.
///
/// `a` must live in the dual of `b`'s system. On [v0..v_{p+q}] the value is
/// dot(a(front p-face), rho_b([v0,v_p]) b(back q-face)), a rank-one cochain
/// on the same base. The front transport makes the Leibniz rule
/// delta(a cup b) = delta a cup b + (-1)^p a cup delta b hold exactly.
pub fn cup_with_pairing(
    a: &TwistedCochain,
    b: &TwistedCochain,
) -> Result<TwistedCochain, CohomologyError> {
    if !a.system.is_dual_of(b.system()) {
        return Err(CohomologyError::NotDualSystems);
    }
    let base = a.system.base();
    let p = a.degree;
    let q = b.degree;
    let ring = Ring::join(a.ring, b.ring);
    let trivial = Arc::new(LocalSystem::trivial(Arc::clone(base), 1).expect("rank 1 is valid"));
    let mut out = TwistedCochain::zero(trivial, p + q, ring);
    for (si, sigma) in base.simplices(p + q).iter().enumerate() {
        let front = &sigma[..=p];
        let back = &sigma[p..];
        let av = a.value(front).expect("face closure");
        let bv = b.value(back).expect("face closure");
        let rho = b
            .system()
            .front_transport(sigma[0], sigma[p])
            .expect("edge of a simplex");
        let moved = rho.mul_vec_rational(bv).expect("rank match");
        let mut s = Rational::zero();
        for (x, y) in av.iter().zip(&moved) {
            s += x * y;
        }
        out.values[si] = vec![s];
    }
    Ok(out)
}
