//! Coherent basic extensions and the adjoint Higgs machinery.
//!
//! A basic extension `iota: G -> G-hat` is coherent when it carries a map
//! `theta` from the coset space to the extended algebra satisfying
//! `theta(a G) = Ad_a theta(G)`. The map sends every Higgs field (a section
//! of the coset bundle) to an adjoint-bundle section, which is what the
//! correction functionals consume.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, YmtError};
use crate::groups::GroupEmbedding;

/// A basic extension equipped with a coherence map, given by its value
/// `theta0` on the identity coset; `theta(a G) = Ad_a theta0`.
#[derive(Clone, Debug)]
pub struct CoherentEmbedding {
    pub embedding: GroupEmbedding,
    /// `theta` at the identity coset, in target-algebra coordinates.
    pub theta0: DVector<f64>,
}

impl CoherentEmbedding {
    /// The rotation-group pair SO(2) in SO(3) with `theta0` the z-axis
    /// generator; the coset space is the two-sphere of unit adjoint vectors.
    pub fn so2_in_so3() -> Self {
        CoherentEmbedding {
            embedding: GroupEmbedding::so2_in_so3(),
            theta0: DVector::from_vec(vec![0.0, 0.0, 1.0]),
        }
    }

    /// `theta` of the coset represented by the group element `a`.
    pub fn theta(&self, a: &DMatrix<Complex64>) -> DVector<f64> {
        self.embedding.target.adjoint_coords(a) * &self.theta0
    }

    /// Well-definedness of `theta` on cosets: `theta(a h G) = theta(a G)`
    /// for subgroup elements `h`, together with the defining relation
    /// `theta(a G) = Ad_a theta(G)`, sampled at random group elements.
    pub fn verify_coherence(&self, rng: &mut impl Rng, samples: usize, tol: f64) -> Result<f64> {
        let tgt = &self.embedding.target;
        let src = &self.embedding.source;
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let a = tgt.random(rng, 1.5);
            let h = self.embedding.embed_group(&src.random(rng, 1.5));
            let lhs = self.theta(&(&a * &h));
            let rhs = self.theta(&a);
            worst = worst.max((lhs - &rhs).abs().max());
            // Defining relation against a direct adjoint application.
            let direct = tgt.adjoint_coords(&a) * &self.theta0;
            worst = worst.max((&rhs - direct).abs().max());
        }
        if worst > tol {
            return Err(YmtError::precondition(format!(
                "coherence residual {worst:e} exceeds {tol:e}"
            )));
        }
        Ok(worst)
    }

    /// The monopole parameterization: `theta` of the coset reached by the
    /// Euler rotation `R_z(phi) R_x(alpha)`.
    pub fn theta_from_euler(&self, phi: f64, alpha: f64) -> DVector<f64> {
        let tgt = &self.embedding.target;
        let rz = tgt.exp(&DVector::from_vec(vec![0.0, 0.0, phi]));
        let rx = tgt.exp(&DVector::from_vec(vec![alpha, 0.0, 0.0]));
        self.theta(&(rz * rx))
    }
}
