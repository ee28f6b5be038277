//! Integral affine data: a linear holonomy system together with the
//! translational parts of the coordinate changes, stored as a twisted
//! 1-cochain over Q.
//!
//! The stored convention turns the affine cocycle condition
//! d_{ca} = A_{cb} d_{ba} + d_{cb} into the plain cocycle equation
//! delta(translations) = 0: an atlas edge (A_{ba}, d_{ba}) becomes the
//! transport rho([a,b]) = A_{ba}^-1 and the translation value
//! t([a,b]) = A_{ba}^-1 d_{ba}. The class of the translation cocycle in
//! H^1(B; Q^n) twisted by the linear holonomy is the radiance obstruction;
//! it vanishes exactly when the coordinates can be re-based to have linear
//! changes only.

use num_traits::Zero;
use std::sync::Arc;
use thiserror::Error;

use crate::linalg::{IntMatrix, Rational};
use crate::local_system::{pullback_product, CocycleViolation, LocalSystem, SystemError};
use crate::simplicial::{product_complex, SimplicialComplex};
use crate::twisted::{
    coboundary, cohomology, is_coboundary, ClassCoordinates, CohomologyError, CohomologyGroup,
    Ring, TwistedCochain,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AffineError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("linear data invalid: {0}")]
    Linear(#[from] CocycleViolation),
    #[error("affine cocycle violated on triangle {0:?}")]
    AffineCocycle(Vec<usize>),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("matrix for edge {0:?} is not unimodular")]
    NonUnimodular(Vec<usize>),
    #[error("invalid model: {0}")]
    BadModel(String),
}

/// Linear holonomy plus translational parts; the combinatorial form of an
/// integral affine atlas on the base complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralAffineData {
    linear: Arc<LocalSystem>,
    translations: TwistedCochain,
}

impl IntegralAffineData {
    /// Validates the linear cocycle condition and delta(translations) = 0.
    pub fn new(
        linear: Arc<LocalSystem>,
        translations: TwistedCochain,
    ) -> Result<Self, AffineError> {
        linear.validate_cocycle()?;
        if translations.system() != &linear
            || translations.degree() != 1
            || translations.ring() != Ring::Q
        {
            return Err(AffineError::Cohomology(CohomologyError::Mismatch));
        }
        let delta = coboundary(&translations);
        for (i, v) in delta.values().iter().enumerate() {
            if !v.iter().all(Zero::is_zero) {
                let triangle = linear.base().simplices(2)[i].clone();
                return Err(AffineError::AffineCocycle(triangle));
            }
        }
        Ok(Self {
            linear,
            translations,
        })
    }

    /// Import paper-convention atlas data: per edge [a,b] with a < b, the
    /// coordinate-change pair (A_{ba}, d_{ba}). Unlisted edges carry the
    /// identity change.
    pub fn from_atlas(
        nerve: SimplicialComplex,
        atlas: &[(Vec<usize>, IntMatrix, Vec<Rational>)],
    ) -> Result<Self, AffineError> {
        let rank = atlas
            .first()
            .map(|(_, a, _)| a.rows())
            .ok_or_else(|| AffineError::BadModel("empty atlas needs at least one edge".into()))?;
        let base = Arc::new(nerve);
        let mut linear = LocalSystem::trivial(Arc::clone(&base), rank)?;
        let mut values = vec![vec![Rational::zero(); rank]; base.simplex_count(1)];
        for (edge, a, d) in atlas {
            let inv = a
                .inverse_unimodular()
                .ok_or_else(|| AffineError::NonUnimodular(edge.clone()))?;
            if d.len() != rank {
                return Err(AffineError::System(SystemError::WrongMatrixSize {
                    edge: edge.clone(),
                    got_rows: d.len(),
                    got_cols: 1,
                    rank,
                }));
            }
            let t = inv.mul_vec_rational(d).expect("length checked");
            linear.set_transport(edge, inv)?;
            let idx = base
                .simplex_index(edge)
                .ok_or_else(|| SystemError::NotAnEdge(edge.clone()))?;
            values[idx] = t;
        }
        let linear = Arc::new(linear);
        let translations =
            TwistedCochain::from_values(Arc::clone(&linear), 1, Ring::Q, values)?;
        Self::new(linear, translations)
    }

    pub fn linear(&self) -> &Arc<LocalSystem> {
        &self.linear
    }

    pub fn translations(&self) -> &TwistedCochain {
        &self.translations
    }

    pub fn base(&self) -> &Arc<SimplicialComplex> {
        self.linear.base()
    }

    pub fn rank(&self) -> usize {
        self.linear.rank()
    }
}

/// The radiance obstruction as a computed class in H^1(B; Q^n_l).
#[derive(Clone, Debug)]
pub struct RadianceClass {
    pub group: CohomologyGroup,
    pub coordinates: ClassCoordinates,
    pub representative: TwistedCochain,
}

/// Compute H^1(B; Q^n_l) and locate the translation cocycle in it.
pub fn radiance_class(data: &IntegralAffineData) -> RadianceClass {
    let group = cohomology(data.linear(), 1, Ring::Q);
    let coordinates = group
        .class_coordinates(data.translations())
        .expect("translations are a cocycle by construction");
    RadianceClass {
        group,
        coordinates,
        representative: data.translations().clone(),
    }
}

/// Radiance test: the translation cocycle bounds over Q. Returns the
/// re-basing 0-cochain witness when it does.
pub fn is_radiant(data: &IntegralAffineData) -> (bool, Option<TwistedCochain>) {
    let witness = is_coboundary(data.translations())
        .expect("translations are a cocycle by construction");
    (witness.is_some(), witness)
}

/// Strong integrality: the radiance class lies in the image of
/// H^1(B; Z^n_l) -> H^1(B; Q^n_l). Both groups are computed from the same
/// integral decomposition with identical free bases, so the image is
/// exactly the integer coordinate lattice.
pub fn is_strongly_integral(data: &IntegralAffineData) -> bool {
    let class = radiance_class(data);
    class.coordinates.free.iter().all(|x| x.is_integer())
}

/// Specification of a built-in integral affine model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSpec {
    /// R/(scale Z): trivial holonomy circle, the closing edge carries the
    /// translation `scale`.
    Circle { scale: Rational },
    /// Radiant circle with prescribed holonomy on the closing edge.
    HolonomyCircle { matrix: IntMatrix },
    /// Staircase product of models, folded left to right.
    Product(Vec<ModelSpec>),
    /// T^k with trivial rank-k holonomy; loop j carries translations[j]
    /// (unit vectors when empty).
    StandardTorus {
        dim: usize,
        translations: Vec<Vec<Rational>>,
    },
}

impl ModelSpec {
    pub fn standard_torus(dim: usize) -> Self {
        ModelSpec::StandardTorus {
            dim,
            translations: vec![],
        }
    }
}

/// Product of two affine data over the staircase triangulation: block
/// diagonal holonomy and blockwise translations pulled back from the
/// factors.
pub fn product_affine(
    d1: &IntegralAffineData,
    d2: &IntegralAffineData,
) -> Result<IntegralAffineData, AffineError> {
    let prod = product_complex(d1.base(), d2.base());
    let linear = Arc::new(pullback_product(&prod, d1.linear(), d2.linear())?);
    let (n1, n2) = (d1.rank(), d2.rank());
    let base = linear.base();
    let mut values = Vec::with_capacity(base.simplex_count(1));
    for edge in base.simplices(1) {
        let mut v = vec![Rational::zero(); n1 + n2];
        let p1 = prod.project1(edge);
        if p1.len() == 2 {
            let t = d1.translations().value(&p1).expect("factor edge");
            v[..n1].clone_from_slice(t);
        }
        let p2 = prod.project2(edge);
        if p2.len() == 2 {
            let t = d2.translations().value(&p2).expect("factor edge");
            v[n1..].clone_from_slice(t);
        }
        values.push(v);
    }
    let translations = TwistedCochain::from_values(Arc::clone(&linear), 1, Ring::Q, values)?;
    IntegralAffineData::new(linear, translations)
}

/// Build a named model.
pub fn generate(spec: &ModelSpec) -> Result<IntegralAffineData, AffineError> {
    match spec {
        ModelSpec::Circle { scale } => {
            let base = Arc::new(SimplicialComplex::circle());
            let linear = Arc::new(LocalSystem::trivial(Arc::clone(&base), 1)?);
            let mut t = TwistedCochain::zero(Arc::clone(&linear), 1, Ring::Q);
            t.set_value(&[0, 2], vec![scale.clone()])?;
            IntegralAffineData::new(linear, t)
        }
        ModelSpec::HolonomyCircle { matrix } => {
            if !matrix.is_unimodular() {
                return Err(AffineError::NonUnimodular(vec![0, 2]));
            }
            let base = Arc::new(SimplicialComplex::circle());
            let linear = Arc::new(LocalSystem::from_edges(
                Arc::clone(&base),
                matrix.rows(),
                &[(vec![0, 2], matrix.clone())],
            )?);
            let t = TwistedCochain::zero(Arc::clone(&linear), 1, Ring::Q);
            IntegralAffineData::new(linear, t)
        }
        ModelSpec::Product(models) => {
            let mut data: Option<IntegralAffineData> = None;
            for m in models {
                let next = generate(m)?;
                data = Some(match data {
                    None => next,
                    Some(acc) => product_affine(&acc, &next)?,
                });
            }
            data.ok_or_else(|| AffineError::BadModel("empty product".into()))
        }
        ModelSpec::StandardTorus { dim, translations } => {
            let k = *dim;
            if k == 0 {
                return Err(AffineError::BadModel("torus dimension must be >= 1".into()));
            }
            let vectors: Vec<Vec<Rational>> = if translations.is_empty() {
                (0..k)
                    .map(|j| {
                        let mut v = vec![Rational::zero(); k];
                        v[j] = Rational::from(num_bigint::BigInt::from(1));
                        v
                    })
                    .collect()
            } else {
                if translations.len() != k || translations.iter().any(|v| v.len() != k) {
                    return Err(AffineError::BadModel(format!(
                        "a {k}-torus needs {k} translation vectors of length {k}"
                    )));
                }
                translations.clone()
            };
            // iterated staircase product of 3-vertex circles: vertex w has
            // base-3 digits (a_1..a_k), factor j's closing edge is (0, 2)
            let circle = SimplicialComplex::circle();
            let mut complex = circle.clone();
            for _ in 1..k {
                complex = product_complex(&complex, &circle).into_complex();
            }
            let base = Arc::new(complex);
            let linear = Arc::new(LocalSystem::trivial(Arc::clone(&base), k)?);
            let digit = |w: usize, j: usize| (w / 3usize.pow((k - 1 - j) as u32)) % 3;
            let mut values = Vec::with_capacity(base.simplex_count(1));
            for edge in base.simplices(1) {
                let mut v = vec![Rational::zero(); k];
                for (j, vector) in vectors.iter().enumerate() {
                    if digit(edge[0], j) == 0 && digit(edge[1], j) == 2 {
                        for (x, y) in v.iter_mut().zip(vector) {
                            *x += y;
                        }
                    }
                }
                values.push(v);
            }
            let translations =
                TwistedCochain::from_values(Arc::clone(&linear), 1, Ring::Q, values)?;
            IntegralAffineData::new(linear, translations)
        }
    }
}
