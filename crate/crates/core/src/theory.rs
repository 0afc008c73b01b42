//! Action functionals: the quadratic curvature action with pluggable pairing,
//! BF-type actions, the topological term, gauge-invariance reporting and the
//! parameterized-theory wrapper.

use std::sync::Arc;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, YmtError};
use crate::fields::{
    self, AlgebraCochain1, AlgebraCochain2, ConnectionRep, GaugeTransform, Lattice, LinkField,
};
use crate::groups::GaugeGroup;
use crate::lie::LieAlgebra;
use crate::linalg;
use crate::pairing::{plaquette_scale, PairingKind, PairingSpec};

/// A theory: lattice, algebra and a pairing on curvature 2-cochains.
#[derive(Clone, Debug)]
pub struct YMTTheory {
    pub lattice: Arc<Lattice>,
    pub algebra: Arc<LieAlgebra>,
    pub pairing: PairingSpec,
    pub label: String,
}

impl YMTTheory {
    pub fn new(
        lattice: Arc<Lattice>,
        algebra: Arc<LieAlgebra>,
        pairing: PairingSpec,
        label: impl Into<String>,
    ) -> Result<Self> {
        if pairing.algebra.dim != algebra.dim || pairing.algebra.name != algebra.name {
            return Err(YmtError::input("pairing algebra does not match theory algebra"));
        }
        if pairing.lattice.extents != lattice.extents {
            return Err(YmtError::input("pairing lattice does not match theory lattice"));
        }
        Ok(YMTTheory { lattice, algebra, pairing, label: label.into() })
    }

    pub fn killing(lattice: Arc<Lattice>, algebra: Arc<LieAlgebra>, label: &str) -> Self {
        let pairing = PairingSpec::killing(lattice.clone(), algebra.clone());
        YMTTheory { lattice, algebra, pairing, label: label.into() }
    }

    pub fn euclidean(lattice: Arc<Lattice>, algebra: Arc<LieAlgebra>, label: &str) -> Self {
        let pairing = PairingSpec::euclidean(lattice.clone(), algebra.clone());
        YMTTheory { lattice, algebra, pairing, label: label.into() }
    }
}

/// Integrated pairing of two 2-cochains: the per-cell contraction summed with
/// volume weights for tensorial pairings, the raw functional otherwise.
pub fn integrated_pairing(
    t: &YMTTheory,
    w1: &AlgebraCochain2,
    w2: &AlgebraCochain2,
) -> Result<f64> {
    if w1.lattice.extents != t.lattice.extents || w2.lattice.extents != t.lattice.extents {
        return Err(YmtError::input("integrated pairing: lattice mismatch"));
    }
    if w1.algebra.dim != t.algebra.dim || w2.algebra.dim != t.algebra.dim {
        return Err(YmtError::input("integrated pairing: algebra mismatch"));
    }
    match &t.pairing.kind {
        PairingKind::Tensorial { form2, algebra_form } => {
            let lat = &t.lattice;
            let np = lat.combos_of(2).len();
            let mut acc = 0.0;
            for p in 0..lat.plaquette_count() {
                let base = p / np;
                let b = algebra_form.at_vertex(base);
                acc += lat.weight_at(base)
                    * plaquette_scale(form2, p)
                    * b.eval(&w1.values[p], &w2.values[p]);
            }
            Ok(acc)
        }
        PairingKind::Functional(f) => Ok(f(w1, w2)),
    }
}

/// Curvature of either connection representation.
pub fn field_strength(field: &ConnectionRep) -> Result<AlgebraCochain2> {
    match field {
        ConnectionRep::Cochain(d) => Ok(fields::curvature(d)),
        ConnectionRep::Links(u) => fields::plaquette_curvature(u),
    }
}

/// The action `S[D] = <<F_D, F_D>>`.
pub fn ymt_action(t: &YMTTheory, field: &ConnectionRep) -> Result<f64> {
    let f = field_strength(field)?;
    integrated_pairing(t, &f, &f)
}

/// Report of a randomized gauge-invariance sweep.
#[derive(Clone, Debug, Serialize)]
pub struct GaugeReport {
    pub max_deviation: f64,
    pub invariant: bool,
    pub trials: usize,
    pub seed: u64,
}

/// Evaluate `|S[g . u] - S[u]|` over random gauge transforms. The theory may
/// be gauge-breaking; both outcomes are reported.
pub fn gauge_invariance_report(
    t: &YMTTheory,
    u: &LinkField,
    trials: usize,
    seed: u64,
) -> Result<GaugeReport> {
    if trials < 1 {
        return Err(YmtError::input("gauge check needs at least one trial"));
    }
    let base = ymt_action(t, &ConnectionRep::Links(u.clone()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let g = GaugeTransform::random(u.lattice.clone(), u.group.clone(), &mut rng, 1.2);
        let transformed = fields::gauge_transform_links(u, &g)?;
        let s = ymt_action(t, &ConnectionRep::Links(transformed))?;
        worst = worst.max((s - base).abs());
    }
    Ok(GaugeReport {
        max_deviation: worst,
        invariant: worst <= 1e-9 * base.abs() + 1e-12,
        trials,
        seed,
    })
}

/// BF-type action `S_BF(D, B) = <<F_D, B>>` on a 4-dimensional lattice.
pub fn bf_action(t: &YMTTheory, field: &ConnectionRep, b: &AlgebraCochain2) -> Result<f64> {
    if t.lattice.dim() != 4 {
        return Err(YmtError::input("BF action requires lattice dimension 4"));
    }
    let f = field_strength(field)?;
    integrated_pairing(t, &f, b)
}

/// Topological term: the trace-form pairing of the curvature with itself
/// under the cubical cup product, summed over the 4-cells. No volume weights
/// enter; the integrand is a top form.
pub fn topological_term(t: &YMTTheory, d: &AlgebraCochain1) -> Result<f64> {
    if t.lattice.dim() != 4 {
        return Err(YmtError::input("topological term requires lattice dimension 4"));
    }
    let algebra = t.algebra.clone();
    if algebra.matrix_rep.is_none() {
        return Err(YmtError::input(
            "topological term requires a matrix representation for the trace form",
        ));
    }
    let f = fields::curvature(d);
    let kappa = |a: &DVector<f64>, b: &DVector<f64>| -> f64 {
        let ma = algebra.rep_matrix(a).expect("matrix rep present");
        let mb = algebra.rep_matrix(b).expect("matrix rep present");
        (ma * mb).trace().re
    };
    let four = fields::cup22_pairing(&f, &f, &kappa)?;
    Ok(four.values.iter().sum())
}

/// Full action: quadratic term plus topological term.
pub fn full_ym_action(t: &YMTTheory, d: &AlgebraCochain1) -> Result<f64> {
    Ok(ymt_action(t, &ConnectionRep::Cochain(d.clone()))? + topological_term(t, d)?)
}

// ---------------------------------------------------------------------------
// Parameterized theories
// ---------------------------------------------------------------------------

/// Functional of a parameterized family: parameter token and configuration in,
/// real value out.
pub type ParamFunctional = Arc<dyn Fn(&str, &ConnectionRep) -> Result<f64> + Send + Sync>;

/// A family of functionals indexed by a finite parameter set.
#[derive(Clone)]
pub struct ParameterizedTheory {
    pub base: YMTTheory,
    pub parameters: Vec<String>,
    pub functional: ParamFunctional,
}

impl std::fmt::Debug for ParameterizedTheory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParameterizedTheory")
            .field("base", &self.base.label)
            .field("parameters", &self.parameters)
            .finish()
    }
}

impl ParameterizedTheory {
    pub fn eval(&self, parameter: &str, field: &ConnectionRep) -> Result<f64> {
        (self.functional)(parameter, field)
    }
}

/// Diagnostics of the constant-assignment wrapper construction.
#[derive(Clone, Debug, Serialize)]
pub struct WrapReport {
    /// Condition number of the algebra-form block of the pairing Gram matrix.
    pub gram_condition: f64,
    /// Worst residual of `<<dD, dD>> = <<D, d* dD>>` over the probe fields.
    pub adjoint_residual: f64,
}

/// Edge-diagonal pairing on 1-cochains with the theory's algebra form and
/// unit edge weights; used by the adjoint construction and by the Higgs
/// kinetic term.
pub fn edge_pairing(t: &YMTTheory, a: &AlgebraCochain1, b: &AlgebraCochain1) -> Result<f64> {
    let algebra_form = match &t.pairing.kind {
        PairingKind::Tensorial { algebra_form, .. } => algebra_form,
        PairingKind::Functional(_) => {
            return Err(YmtError::input("edge pairing requires a tensorial pairing"))
        }
    };
    let lat = &t.lattice;
    let mut acc = 0.0;
    for v in 0..lat.vertex_count() {
        let form = algebra_form.at_vertex(v);
        for mu in 0..lat.dim() {
            let e = lat.edge_index(v, mu);
            acc += form.eval(&a.values[e], &b.values[e]);
        }
    }
    Ok(acc)
}

/// Pairing-adjoint of the linear coboundary operator, applied to a 2-cochain:
/// `(d* W)(e) = sum over incident plaquettes of sign x plaquette-Gram x W`,
/// with the edge Gram factor cancelled against the shared algebra form.
fn coboundary_adjoint(t: &YMTTheory, w: &AlgebraCochain2) -> AlgebraCochain2Adjoint {
    let lat = &t.lattice;
    let np = lat.combos_of(2).len();
    let form2 = match &t.pairing.kind {
        PairingKind::Tensorial { form2, .. } => form2,
        PairingKind::Functional(_) => unreachable!("checked tensorial"),
    };
    let mut out = AlgebraCochain1::zeros(lat.clone(), w.algebra.clone());
    for v in 0..lat.vertex_count() {
        for (pi, pair) in lat.combos_of(2).iter().enumerate() {
            let (mu, nu) = (pair[0], pair[1]);
            let p = v * np + pi;
            let scaled = w.values[p].scale(lat.weight_at(v) * plaquette_scale(form2, p));
            let v_mu = lat.neighbor(v, mu, true);
            let v_nu = lat.neighbor(v, nu, true);
            out.values[lat.edge_index(v, mu)] += &scaled;
            out.values[lat.edge_index(v_mu, nu)] += &scaled;
            out.values[lat.edge_index(v_nu, mu)] -= &scaled;
            out.values[lat.edge_index(v, nu)] -= &scaled;
        }
    }
    AlgebraCochain2Adjoint(out)
}

/// Newtype marking the image of the coboundary adjoint (a 1-cochain).
pub struct AlgebraCochain2Adjoint(pub AlgebraCochain1);

/// Regard a theory with perfect pairing as a parameterized family whose value
/// ignores the parameter. Verifies the adjoint identity
/// `<<dD, dD>> = <<D, d*(dD)>>` on random probe fields before returning.
pub fn wrap_parameterized(
    t: &YMTTheory,
    parameter_set: Vec<String>,
) -> Result<(ParameterizedTheory, WrapReport)> {
    let algebra_form = match &t.pairing.kind {
        PairingKind::Tensorial { algebra_form, .. } => algebra_form,
        PairingKind::Functional(_) => {
            return Err(YmtError::precondition(
                "parameterized wrapper needs a tensorial pairing",
            ))
        }
    };
    // Perfectness: the per-cell Gram block must be invertible.
    let mut cond: f64 = 0.0;
    let check = |m: &nalgebra::DMatrix<f64>| -> Result<f64> {
        if linalg::rank(m) < m.nrows() {
            return Err(YmtError::precondition(
                "pairing is degenerate; a perfect pairing is required",
            ));
        }
        Ok(linalg::condition_number(m))
    };
    match algebra_form {
        crate::pairing::AlgebraPairing::Uniform(b) => {
            cond = check(&b.matrix)?;
        }
        crate::pairing::AlgebraPairing::PerVertex(bs) => {
            for b in bs {
                cond = cond.max(check(&b.matrix)?);
            }
        }
    }

    // Adjoint identity on random probes.
    let mut rng = ChaCha8Rng::seed_from_u64(0x594d54);
    let mut worst: f64 = 0.0;
    for _ in 0..4 {
        let d = AlgebraCochain1::random(t.lattice.clone(), t.algebra.clone(), &mut rng, 0.8);
        let dd = fields::coboundary(&d);
        let lhs = integrated_pairing(t, &dd, &dd)?;
        let AlgebraCochain2Adjoint(dstar) = coboundary_adjoint(t, &dd);
        let rhs = edge_pairing(t, &d, &dstar)?;
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    if worst > 1e-9 {
        return Err(YmtError::Verification(format!(
            "adjoint identity residual {worst:e} exceeds tolerance"
        )));
    }

    let theory = t.clone();
    let wrapped = ParameterizedTheory {
        base: t.clone(),
        parameters: parameter_set,
        functional: Arc::new(move |_eps, field| ymt_action(&theory, field)),
    };
    Ok((wrapped, WrapReport { gram_condition: cond, adjoint_residual: worst }))
}

/// Random su(2)-type link configuration for a theory's lattice, small enough
/// to stay inside every log branch.
pub fn random_links_for(
    lattice: &Arc<Lattice>,
    group: &GaugeGroup,
    seed: u64,
    amplitude: f64,
) -> LinkField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    LinkField::random(lattice.clone(), group.clone(), &mut rng, amplitude)
}
