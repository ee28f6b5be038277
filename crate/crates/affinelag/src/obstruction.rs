//! The realizability pipeline: candidate Chern classes, the obstruction
//! pairing with the radiance class, the realizable subgroup, and the
//! second-page differential it comes from.
//!
//! A Chern class lives in H^2 of the dual system Z^n twisted by the inverse
//! transposed holonomy. Its obstruction class is the pairing with the
//! radiance cocycle, computed as a twisted cup product into H^3(B; Q); the
//! class is realizable by a Lagrangian bundle exactly when that obstruction
//! vanishes. The sign convention is pinned by the differential relation
//! d2(radiance) = -D(c): the engine computes D(c) as minus the cup class of
//! (chern, translations).

use num_bigint::BigInt;
use num_traits::{One, Signed};
use std::sync::Arc;
use thiserror::Error;

use crate::affine::IntegralAffineData;
use crate::linalg::{solve_integer, IntMatrix, Rational};
use crate::local_system::LocalSystem;
use crate::twisted::{
    cohomology, cup_with_pairing, ClassCoordinates, CohomologyError, CohomologyGroup, GroupShape,
    Ring, TwistedCochain,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObstructionError {
    #[error("chern class must be a degree-2 integral class in the dual system")]
    WrongChernGroup,
    #[error("chern class does not belong to this affine datum's dual system")]
    SystemMismatch,
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

/// An element of H^2(B; Z^n) twisted by the inverse transposed holonomy,
/// carried as an explicit cocycle plus its coordinates in that group.
#[derive(Clone, Debug)]
pub struct ChernClass {
    cocycle: TwistedCochain,
    coordinates: ClassCoordinates,
    group_shape: GroupShape,
}

impl ChernClass {
    /// Wrap an explicit cocycle; coordinates are computed in `group`.
    pub fn from_cocycle(
        group: &CohomologyGroup,
        cocycle: TwistedCochain,
    ) -> Result<Self, ObstructionError> {
        if group.degree() != 2 || group.ring() != Ring::Z {
            return Err(ObstructionError::WrongChernGroup);
        }
        let coordinates = group.class_coordinates(&cocycle)?;
        Ok(Self {
            cocycle,
            coordinates,
            group_shape: group.shape(),
        })
    }

    /// The class with the given coordinates in `group`.
    pub fn from_coordinates(
        group: &CohomologyGroup,
        coordinates: ClassCoordinates,
    ) -> Result<Self, ObstructionError> {
        if group.degree() != 2 || group.ring() != Ring::Z {
            return Err(ObstructionError::WrongChernGroup);
        }
        let cocycle = group.cocycle_from_coordinates(&coordinates)?;
        Ok(Self {
            cocycle,
            coordinates,
            group_shape: group.shape(),
        })
    }

    pub fn cocycle(&self) -> &TwistedCochain {
        &self.cocycle
    }

    pub fn coordinates(&self) -> &ClassCoordinates {
        &self.coordinates
    }

    pub fn group_shape(&self) -> &GroupShape {
        &self.group_shape
    }
}

/// The group of candidate Chern classes H^2(B; Z^n_{l^-T}).
pub fn chern_group(data: &IntegralAffineData) -> CohomologyGroup {
    let dual = Arc::new(data.linear().dual_system());
    cohomology(&dual, 2, Ring::Z)
}

/// Outcome of the obstruction computation for one Chern class.
#[derive(Clone, Debug)]
pub struct ObstructionReport {
    /// coordinates of D(c) in H^3(B; Q)
    pub dd_class: ClassCoordinates,
    pub is_lagrangian: bool,
    pub h2_group: GroupShape,
    pub h3_group: GroupShape,
}

fn check_membership(
    data: &IntegralAffineData,
    c: &ChernClass,
) -> Result<(), ObstructionError> {
    if !c.cocycle.system().is_dual_of(data.linear()) {
        return Err(ObstructionError::SystemMismatch);
    }
    Ok(())
}

fn dd_coordinates(
    data: &IntegralAffineData,
    c: &ChernClass,
    h3: &CohomologyGroup,
) -> Result<ClassCoordinates, ObstructionError> {
    let cup = cup_with_pairing(&c.cocycle.to_ring_q(), data.translations())?;
    let minus = cup.scale(&-Rational::one());
    Ok(h3.class_coordinates(&minus)?)
}

/// The obstruction class D(c) = c . r in H^3(B; Q) and the realizability
/// verdict. Integral torsion in H^2 never obstructs: it dies under the
/// coefficient change to Q before the pairing.
pub fn dazord_delzant(
    data: &IntegralAffineData,
    c: &ChernClass,
) -> Result<ObstructionReport, ObstructionError> {
    check_membership(data, c)?;
    let h3 = h3_rational(data);
    let dd_class = dd_coordinates(data, c, &h3)?;
    Ok(ObstructionReport {
        is_lagrangian: dd_class.is_zero(),
        dd_class,
        h2_group: c.group_shape.clone(),
        h3_group: h3.shape(),
    })
}

fn h3_rational(data: &IntegralAffineData) -> CohomologyGroup {
    let trivial = Arc::new(
        LocalSystem::trivial(Arc::clone(data.base()), 1).expect("rank 1 is valid"),
    );
    cohomology(&trivial, 3, Ring::Q)
}

/// The subgroup of H^2 realizable by Lagrangian bundles: the kernel of the
/// pairing map on the free part, plus all of the torsion.
#[derive(Clone, Debug)]
pub struct RealizableSubgroup {
    /// saturated basis of the free kernel, in H^2 free coordinates
    pub kernel_basis: Vec<Vec<BigInt>>,
    /// torsion classes are always realizable
    pub includes_all_torsion: bool,
    /// rank of the pairing map H^2_free -> H^3(B; Q)
    pub corank: usize,
    pub h2_group: GroupShape,
    pub h3_group: GroupShape,
}

/// Pair every free basis class against the radiance cocycle and return the
/// integer kernel of the resulting map into H^3(B; Q).
pub fn realizable_subgroup(data: &IntegralAffineData) -> RealizableSubgroup {
    let h2 = chern_group(data);
    let h3 = h3_rational(data);
    let f = h2.free_rank();
    let h3f = h3.free_rank();
    // pairing matrix, one column per free basis class
    let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(f);
    for j in 0..f {
        let c = ChernClass::from_cocycle(&h2, h2.basis_cocycles()[j].clone())
            .expect("basis cocycle is a class");
        let dd = dd_coordinates(data, &c, &h3).expect("basis class pairs");
        cols.push(dd.free);
    }
    // clear denominators columnwise to get an integer matrix with the same
    // kernel, then take its saturated integer kernel
    let mut pairing = IntMatrix::zeros(h3f, f);
    for (j, col) in cols.iter().enumerate() {
        let scale = crate::linalg::denominator_lcm(col);
        for (i, x) in col.iter().enumerate() {
            let scaled = x * Rational::from(scale.clone());
            debug_assert!(scaled.is_integer());
            pairing.set(i, j, scaled.numer().clone());
        }
    }
    let zero = vec![BigInt::from(0); h3f];
    let solution = solve_integer(&pairing, &zero)
        .expect("dimensions agree")
        .expect("zero is always solvable");
    let corank = f - solution.kernel_basis.len();
    RealizableSubgroup {
        kernel_basis: solution.kernel_basis,
        includes_all_torsion: true,
        corank,
        h2_group: h2.shape(),
        h3_group: h3.shape(),
    }
}

/// The differential E_2^{p,1} -> E_2^{p+2,0} of the bundle's spectral
/// sequence: up to the engine's identifications it is the signed cup with
/// the Chern class,
///
///   d2(x) = (-1)^{p+1} [x cup c]  in  H^{p+2}(B; Z).
///
/// `x` must be an integral cocycle in the holonomy system (the coefficients
/// of the fiber's first cohomology); the radiance cocycle at p = 1 recovers
/// -D(c) integrally.
pub fn d2_differential(
    x: &TwistedCochain,
    c: &ChernClass,
) -> Result<ClassCoordinates, ObstructionError> {
    let x = x.to_ring_z()?;
    let p = x.degree();
    let cup = cup_with_pairing(&x, &c.cocycle)?;
    let signed = if p % 2 == 0 {
        cup.scale(&-Rational::one())
    } else {
        cup
    };
    let trivial = Arc::new(
        LocalSystem::trivial(Arc::clone(x.system().base()), 1).expect("rank 1 is valid"),
    );
    let h = cohomology(&trivial, p + 2, Ring::Z);
    Ok(h.class_coordinates(&signed)?)
}

/// Convenience for tests and reports: |coordinate| of a rank-one class.
pub fn generator_coordinate(coords: &ClassCoordinates) -> Option<BigInt> {
    if coords.free.len() == 1 && coords.torsion.is_empty() && coords.free[0].is_integer() {
        Some(coords.free[0].numer().abs())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::{generate, is_radiant, radiance_class, ModelSpec};
    use crate::linalg::parse_rational;
    use crate::simplicial::{product_complex, SimplicialComplex};
    use crate::twisted::{coboundary, is_coboundary};
    use num_traits::Zero;

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn sphere_datum() -> IntegralAffineData {
        let base = Arc::new(SimplicialComplex::sphere2());
        let linear = Arc::new(LocalSystem::trivial(base, 1).unwrap());
        let t = TwistedCochain::zero(Arc::clone(&linear), 1, Ring::Q);
        IntegralAffineData::new(linear, t).unwrap()
    }

    #[test]
    fn hopf_d2_is_an_isomorphism() {
        // base S^2, trivial rank-1 system, c a generator of H^2(S^2; Z);
        // at p = 0 the differential sends a generator to a generator
        let data = sphere_datum();
        let h2 = chern_group(&data);
        assert_eq!(h2.free_rank(), 1);
        let c = ChernClass::from_cocycle(&h2, h2.basis_cocycles()[0].clone()).unwrap();
        let dual = Arc::new(data.linear().dual_system());
        let h0 = cohomology(&dual, 0, Ring::Z);
        assert_eq!(h0.free_rank(), 1);
        let x = &h0.basis_cocycles()[0];
        let image = d2_differential(x, &c).unwrap();
        assert_eq!(generator_coordinate(&image), Some(BigInt::one()));
        // zero Chern class gives the zero map
        let zero_c = ChernClass::from_cocycle(
            &h2,
            TwistedCochain::zero(Arc::clone(&dual), 2, Ring::Z),
        )
        .unwrap();
        assert!(d2_differential(x, &zero_c).unwrap().is_zero());
    }

    #[test]
    fn radiant_data_obstruct_nothing() {
        let y = generate(&ModelSpec::Product(vec![
            ModelSpec::HolonomyCircle {
                matrix: IntMatrix::from_rows(&[vec![1, 0], vec![-1, 1]]),
            },
            ModelSpec::Circle { scale: rat("0") },
        ]))
        .unwrap();
        assert!(is_radiant(&y).0);
        let h2 = chern_group(&y);
        for b in h2.basis_cocycles() {
            let c = ChernClass::from_cocycle(&h2, b.clone()).unwrap();
            let report = dazord_delzant(&y, &c).unwrap();
            assert!(report.is_lagrangian);
            assert!(report.dd_class.is_zero());
        }
        let sub = realizable_subgroup(&y);
        assert_eq!(sub.corank, 0);
        assert_eq!(sub.kernel_basis.len(), h2.free_rank());
        assert!(sub.includes_all_torsion);
    }

    #[test]
    fn torus_t2_has_unobstructed_h2() {
        // dim 2 base: H^3 vanishes, so everything is realizable even with
        // nonzero radiance
        let t2 = generate(&ModelSpec::standard_torus(2)).unwrap();
        assert!(!is_radiant(&t2).0);
        let sub = realizable_subgroup(&t2);
        assert_eq!(sub.corank, 0);
        assert_eq!(sub.h3_group.free_rank, 0);
    }

    #[test]
    fn torsion_chern_class_is_lagrangian() {
        // RP^2 x S^1: H^2 has a Z/2 summand and the winding translation is
        // a nonzero radiance class
        let rp2 = SimplicialComplex::projective_plane();
        let circle = SimplicialComplex::circle();
        let prod = product_complex(&rp2, &circle);
        let base = Arc::new(prod.complex().clone());
        let linear = Arc::new(LocalSystem::trivial(Arc::clone(&base), 1).unwrap());
        let mut values = vec![vec![Rational::zero()]; base.simplex_count(1)];
        for (i, e) in base.simplices(1).iter().enumerate() {
            let p2 = prod.project2(e);
            if p2 == vec![0, 2] {
                values[i][0] = Rational::one();
            }
        }
        let t = TwistedCochain::from_values(Arc::clone(&linear), 1, Ring::Q, values).unwrap();
        let data = IntegralAffineData::new(linear, t).unwrap();
        assert!(!is_radiant(&data).0);

        let h2 = chern_group(&data);
        assert_eq!(h2.torsion(), &[BigInt::from(2)]);
        let torsion_rep = h2.basis_cocycles()[h2.free_rank()].clone();
        // the torsion class dies under the coefficient change to Q
        assert!(is_coboundary(&torsion_rep.to_ring_q()).unwrap().is_some());
        let c = ChernClass::from_cocycle(&h2, torsion_rep).unwrap();
        let report = dazord_delzant(&data, &c).unwrap();
        assert!(report.is_lagrangian);
    }

    #[test]
    fn obstruction_rejects_foreign_classes() {
        let d1 = generate(&ModelSpec::standard_torus(2)).unwrap();
        let d2 = sphere_datum();
        let h2 = chern_group(&d2);
        let c = ChernClass::from_cocycle(&h2, h2.basis_cocycles()[0].clone()).unwrap();
        assert!(matches!(
            dazord_delzant(&d1, &c),
            Err(ObstructionError::SystemMismatch)
        ));
    }

    #[test]
    fn chern_class_from_coordinates_round_trips() {
        let data = generate(&ModelSpec::standard_torus(2)).unwrap();
        let h2 = chern_group(&data);
        assert_eq!(h2.free_rank(), 2);
        let mut coords = ClassCoordinates {
            free: vec![Rational::zero(); 2],
            torsion: vec![],
        };
        coords.free[1] = rat("3");
        let c = ChernClass::from_coordinates(&h2, coords.clone()).unwrap();
        assert_eq!(c.coordinates(), &coords);
        assert!(coboundary(c.cocycle()).is_zero());
        let back = h2.class_coordinates(c.cocycle()).unwrap();
        assert_eq!(back, coords);
    }

    #[test]
    fn radiance_pairing_nonzero_on_t3_diagonal_class() {
        // the full statement is in the acceptance suite; here just check
        // that at least one basis class of the 3-torus is obstructed
        let t3 = generate(&ModelSpec::standard_torus(3)).unwrap();
        assert!(!radiance_class(&t3).coordinates.is_zero());
        let h2 = chern_group(&t3);
        assert_eq!(h2.free_rank(), 9);
        let mut obstructed = 0;
        for b in h2.basis_cocycles().iter().take(9) {
            let c = ChernClass::from_cocycle(&h2, b.clone()).unwrap();
            if !dazord_delzant(&t3, &c).unwrap().is_lagrangian {
                obstructed += 1;
            }
        }
        assert!(obstructed > 0, "no obstructed class found on T^3");
    }
}
