//! The extension constructors: null, identity, constant, retract, BF, Higgs,
//! Higgs-vacuum, background, full-action and emergence-induced, plus the
//! sampled-domain builders they are exercised on.

use std::sync::Arc;

use nalgebra::DVector;
use num::rational::BigRational;
use num::traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, YmtError};
use crate::fields::{
    covariant_derivative, AlgebraCochain1, ConnectionRep, GaugeTransform, Lattice, LinkField,
    VertexSection,
};
use crate::groups::{GaugeGroup, GroupEmbedding};
use crate::linalg;
use crate::theory::{edge_pairing, topological_term, ymt_action, ParameterizedTheory, YMTTheory};

use super::domain::{Config, SampledDomain};
use super::higgs::CoherentEmbedding;
use super::{big, check_extension, to_f64, CheckReport, ExtFlags, Extension, CHECK_TOL};

/// Gauge-invariance scale used by constructor preconditions.
fn invariance_scale(values: &[f64]) -> f64 {
    values.iter().fold(1.0f64, |a, v| a.max(v.abs()))
}

/// Verify a raw value table is constant along the generator orbits.
fn verify_orbit_constant(dom: &SampledDomain, values: &[f64], what: &str) -> Result<f64> {
    let scale = invariance_scale(values);
    let mut worst = 0.0f64;
    for p in &dom.perms {
        for i in 0..dom.len() {
            worst = worst.max((values[p[i]] - values[i]).abs());
        }
    }
    if worst > CHECK_TOL * scale {
        return Err(YmtError::precondition(format!(
            "{what} is not invariant under the recorded generators (residual {worst:e})"
        )));
    }
    Ok(worst)
}

fn conn_of<'a>(config: &'a Config, what: &str) -> Result<&'a ConnectionRep> {
    match config {
        Config::Conn(d) => Ok(d),
        _ => Err(YmtError::input(format!("{what} expects plain connection configurations"))),
    }
}

/// Null extension: zero functional, zero correction on the zero configuration
/// alone, zero reduction.
pub fn make_null(
    base: &YMTTheory,
    embedding: &GroupEmbedding,
    dom: &Arc<SampledDomain>,
) -> Result<Extension> {
    let zero_cfg = ConnectionRep::Cochain(AlgebraCochain1::zeros(
        base.lattice.clone(),
        base.algebra.clone(),
    ));
    let e = Extension {
        base: base.clone(),
        embedding: embedding.clone(),
        extended: dom.clone(),
        correction: vec![dom.zero_index],
        s_hat: vec![BigRational::zero(); dom.len()],
        corr_value: vec![BigRational::zero()],
        delta_pullback: vec![BigRational::zero()],
        delta_map: Some(vec![zero_cfg]),
        flags: ExtFlags {
            complete: true,
            equivariant: dom.subset_closed(&[dom.zero_index]),
            full: false,
            linear: true,
        },
        label: "null".into(),
    };
    Ok(e)
}

/// The monoid unit on a fixed domain: the null data with the correction
/// subspace widened to the whole extended domain, so that summing with it
/// changes nothing at all.
pub fn zero_on(
    base: &YMTTheory,
    embedding: &GroupEmbedding,
    dom: &Arc<SampledDomain>,
) -> Result<Extension> {
    let n = dom.len();
    let zero_cfg = ConnectionRep::Cochain(AlgebraCochain1::zeros(
        base.lattice.clone(),
        base.algebra.clone(),
    ));
    Ok(Extension {
        base: base.clone(),
        embedding: embedding.clone(),
        extended: dom.clone(),
        correction: (0..n).collect(),
        s_hat: vec![BigRational::zero(); n],
        corr_value: vec![BigRational::zero(); n],
        delta_pullback: vec![BigRational::zero(); n],
        delta_map: Some(vec![zero_cfg; n]),
        flags: ExtFlags { complete: true, equivariant: true, full: false, linear: true },
        label: "zero".into(),
    })
}

/// Identity extension of a gauge-invariant theory: the theory as a complete
/// extension of itself, with the identity reduction.
pub fn make_identity(base: &YMTTheory, dom: &Arc<SampledDomain>) -> Result<Extension> {
    let mut values = Vec::with_capacity(dom.len());
    for c in &dom.configs {
        values.push(ymt_action(base, conn_of(c, "identity extension")?)?);
    }
    verify_orbit_constant(dom, &values, "the base functional")?;
    let n = dom.len();
    let s_hat: Vec<BigRational> = values.iter().map(|&v| big(v)).collect();
    let delta_map: Vec<ConnectionRep> =
        dom.configs.iter().map(|c| c.connection().clone()).collect();
    Ok(Extension {
        base: base.clone(),
        embedding: GroupEmbedding::identity(group_of(base, dom)?),
        extended: dom.clone(),
        correction: (0..n).collect(),
        s_hat: s_hat.clone(),
        corr_value: vec![BigRational::zero(); n],
        delta_pullback: s_hat,
        delta_map: Some(delta_map),
        flags: ExtFlags { complete: true, equivariant: true, full: false, linear: false },
        label: format!("identity({})", base.label),
    })
}

/// Gauge group of the domain's configurations, falling back to the algebra
/// catalog when configurations carry no group data.
fn group_of(base: &YMTTheory, dom: &Arc<SampledDomain>) -> Result<GaugeGroup> {
    for c in &dom.configs {
        if let ConnectionRep::Links(u) = c.connection() {
            return Ok(u.group.clone());
        }
    }
    GaugeGroup::by_name(&base.algebra.name)
}

/// Constant extension: reduction to a fixed connection, constant correction.
pub fn make_constant(
    base: &YMTTheory,
    embedding: &GroupEmbedding,
    dom: &Arc<SampledDomain>,
    c: f64,
    d0: &ConnectionRep,
) -> Result<Extension> {
    let s0 = ymt_action(base, d0)?;
    let n = dom.len();
    let value = big(s0) + big(c);
    Ok(Extension {
        base: base.clone(),
        embedding: embedding.clone(),
        extended: dom.clone(),
        correction: (0..n).collect(),
        s_hat: vec![value.clone(); n],
        corr_value: vec![big(c); n],
        delta_pullback: vec![big(s0); n],
        delta_map: Some(vec![d0.clone(); n]),
        flags: ExtFlags {
            complete: c == 0.0,
            equivariant: true,
            full: false,
            linear: false,
        },
        label: format!("constant(c={c})"),
    })
}

/// Equivariant-choice extension: the base functional composed with a retract
/// `r` of the extended domain onto its connection-tagged part.
///
/// `r` is an index map; it must fix the connection subset pointwise and
/// commute with the generator permutations.
pub fn make_retract(
    base: &YMTTheory,
    dom: &Arc<SampledDomain>,
    r: &[usize],
) -> Result<Extension> {
    if r.len() != dom.len() {
        return Err(YmtError::input("retract map length mismatch"));
    }
    for (i, &ri) in r.iter().enumerate() {
        if ri >= dom.len() || !dom.connection[ri] {
            return Err(YmtError::input(format!(
                "retract must land in the connection subset (fails at {i})"
            )));
        }
        if dom.connection[i] && ri != i {
            return Err(YmtError::input(format!(
                "retract composed with the inclusion must be the identity (fails at {i})"
            )));
        }
    }
    for (k, p) in dom.perms.iter().enumerate() {
        for i in 0..dom.len() {
            if r[p[i]] != p[r[i]] {
                return Err(YmtError::input(format!(
                    "retract is not equivariant under generator {k} at configuration {i}"
                )));
            }
        }
    }
    let mut values = Vec::with_capacity(dom.len());
    for &ri in r {
        values.push(ymt_action(base, conn_of(&dom.configs[ri], "retract extension")?)?);
    }
    verify_orbit_constant(dom, &values, "the retracted functional")?;

    let correction = dom.connection_indices();
    let corr_value = vec![BigRational::zero(); correction.len()];
    let mut delta_pullback = Vec::with_capacity(correction.len());
    let mut delta_map = Vec::with_capacity(correction.len());
    for &i in &correction {
        delta_pullback.push(big(values[i]));
        delta_map.push(dom.configs[i].connection().clone());
    }
    Ok(Extension {
        base: base.clone(),
        embedding: GroupEmbedding::identity(group_of(base, dom)?),
        extended: dom.clone(),
        correction,
        s_hat: values.iter().map(|&v| big(v)).collect(),
        corr_value,
        delta_pullback,
        delta_map: Some(delta_map),
        flags: ExtFlags { complete: true, equivariant: true, full: false, linear: false },
        label: format!("retract({})", base.label),
    })
}

/// BF extension on a domain of (connection, 2-form) pairs: the pairing of the
/// curvature with the second component, reducing along the first projection
/// on the curvature graph.
pub fn make_bf(base: &YMTTheory, dom: &Arc<SampledDomain>) -> Result<Extension> {
    if base.lattice.dim() != 4 {
        return Err(YmtError::input("BF extension requires lattice dimension 4"));
    }
    let mut s_hat_f = Vec::with_capacity(dom.len());
    let mut on_graph = Vec::with_capacity(dom.len());
    for (i, cfg) in dom.configs.iter().enumerate() {
        let (d, b) = match cfg {
            Config::BfPair { d, b } => (d, b),
            _ => return Err(YmtError::input("BF extension expects pair configurations")),
        };
        let f = crate::theory::field_strength(d)?;
        let dist = f
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).abs().max())
            .fold(0.0f64, f64::max);
        let graph = dist <= 1e-9 * (1.0 + f.norm_max());
        if dom.connection[i] && !graph {
            return Err(YmtError::input(format!(
                "connection-tagged pair {i} is off the curvature graph (distance {dist:e})"
            )));
        }
        on_graph.push(graph);
        s_hat_f.push(crate::theory::bf_action(base, d, b)?);
    }
    verify_orbit_constant(dom, &s_hat_f, "the BF functional")?;

    let correction: Vec<usize> = (0..dom.len()).filter(|&i| on_graph[i]).collect();
    if correction.is_empty() {
        return Err(YmtError::precondition("no curvature-graph points in the domain"));
    }
    let mut delta_pullback = Vec::with_capacity(correction.len());
    let mut delta_map = Vec::with_capacity(correction.len());
    for &i in &correction {
        let d = dom.configs[i].connection().clone();
        delta_pullback.push(big(ymt_action(base, &d)?));
        delta_map.push(d);
    }
    Ok(Extension {
        base: base.clone(),
        embedding: GroupEmbedding::identity(group_of(base, dom)?),
        extended: dom.clone(),
        correction,
        s_hat: s_hat_f.iter().map(|&v| big(v)).collect(),
        corr_value: vec![BigRational::zero(); delta_pullback.len()],
        delta_pullback,
        delta_map: Some(delta_map),
        flags: ExtFlags { complete: true, equivariant: true, full: false, linear: false },
        label: format!("bf({})", base.label),
    })
}

/// Higgs potential: any functional of the adjoint Higgs section.
pub type HiggsPotential = Arc<dyn Fn(&VertexSection) -> f64 + Send + Sync>;

/// Higgs extension of a gauge-invariant theory over the extended group: the
/// correction couples the covariant derivative of the coherence image of the
/// Higgs field, `C(D, phi) = <grad phi, grad phi> + V(phi)`.
pub fn make_higgs(
    base: &YMTTheory,
    coherent: &CoherentEmbedding,
    potential: HiggsPotential,
    dom: &Arc<SampledDomain>,
    seed: u64,
) -> Result<Extension> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    coherent.verify_coherence(&mut rng, 32, 1e-10)?;

    let mut s_hat_f = Vec::with_capacity(dom.len());
    let mut correction = Vec::new();
    let mut corr_value = Vec::new();
    let mut delta_pullback = Vec::new();
    let mut delta_map = Vec::new();
    let mut s_hat = Vec::with_capacity(dom.len());
    for (i, cfg) in dom.configs.iter().enumerate() {
        match cfg {
            Config::HiggsPair { d, phi } => {
                let grad = covariant_derivative(d, phi)?;
                let kinetic = edge_pairing(base, &grad, &grad)?;
                let c = kinetic + potential(phi);
                let s_base = ymt_action(base, d)?;
                correction.push(i);
                corr_value.push(big(c));
                delta_pullback.push(big(s_base));
                delta_map.push(d.clone());
                let total = big(s_base) + big(c);
                s_hat_f.push(to_f64(&total));
                s_hat.push(total);
            }
            Config::Conn(d) => {
                let s_base = ymt_action(base, d)?;
                s_hat_f.push(s_base);
                s_hat.push(big(s_base));
            }
            Config::BfPair { .. } => {
                return Err(YmtError::input("Higgs extension got a BF pair configuration"))
            }
        }
    }
    verify_orbit_constant(dom, &s_hat_f, "the Higgs-coupled functional")?;
    if correction.is_empty() {
        return Err(YmtError::precondition("domain contains no Higgs pairs"));
    }
    let complete = corr_value.iter().all(|v| v.is_zero());
    Ok(Extension {
        base: base.clone(),
        embedding: GroupEmbedding::identity(coherent.embedding.target.clone()),
        extended: dom.clone(),
        correction,
        s_hat,
        corr_value,
        delta_pullback,
        delta_map: Some(delta_map),
        flags: ExtFlags { complete, equivariant: true, full: false, linear: false },
        label: format!("higgs({})", base.label),
    })
}

/// Reduction projector onto the embedded subalgebra, orthogonal with respect
/// to the Killing form of the big algebra.
pub fn reduction_projector(embedding: &GroupEmbedding) -> Result<nalgebra::DMatrix<f64>> {
    let k = embedding.target.algebra.killing_form().matrix;
    let di = &embedding.dmap;
    let gram = di.transpose() * &k * di;
    if linalg::rank(&gram) < gram.nrows() {
        return Err(YmtError::precondition(
            "Killing form degenerate on the embedded subalgebra; no orthogonal reduction",
        ));
    }
    let inv = gram.try_inverse().expect("full rank checked");
    Ok(inv * di.transpose() * k)
}

/// Correction functional over the parallel set of a Higgs vacuum.
pub type VacuumCorrection = Arc<dyn Fn(&ConnectionRep) -> f64 + Send + Sync>;

/// Higgs-vacuum extension: the correction subspace consists of connections in
/// which the fixed Higgs section is parallel; the reduction projects the
/// field onto the embedded subalgebra.
pub fn make_higgs_vacuum(
    base: &YMTTheory,
    embedding: &GroupEmbedding,
    phi0: &VertexSection,
    correction_functional: Option<VacuumCorrection>,
    dom: &Arc<SampledDomain>,
) -> Result<Extension> {
    if phi0.algebra.dim != embedding.target.algebra.dim {
        return Err(YmtError::input("Higgs section must live in the extended algebra"));
    }
    // Generators must stabilize the vacuum section for the parallel set to be
    // orbit-closed.
    for (k, g) in dom.generators.iter().enumerate() {
        for v in 0..phi0.lattice.vertex_count() {
            let ad = g.group.adjoint_coords(g.at(v));
            let moved = &ad * &phi0.values[v];
            if (moved - &phi0.values[v]).abs().max() > 1e-9 {
                return Err(YmtError::precondition(format!(
                    "generator {k} does not stabilize the Higgs vacuum section"
                )));
            }
        }
    }
    let projector = reduction_projector(embedding)?;
    let phi_scale = 1.0 + phi0.values.iter().map(|v| v.abs().max()).fold(0.0, f64::max);

    let reduce = |d: &ConnectionRep| -> Result<ConnectionRep> {
        let coch = match d {
            ConnectionRep::Cochain(c) => c.clone(),
            ConnectionRep::Links(u) => u.to_cochain()?,
        };
        let values: Vec<DVector<f64>> = coch.values.iter().map(|v| &projector * v).collect();
        Ok(ConnectionRep::Cochain(AlgebraCochain1 {
            lattice: base.lattice.clone(),
            algebra: base.algebra.clone(),
            values,
        }))
    };

    let mut parallel = Vec::new();
    let mut s_hat = Vec::with_capacity(dom.len());
    let mut s_hat_f = Vec::with_capacity(dom.len());
    let mut corr_value = Vec::new();
    let mut delta_pullback = Vec::new();
    let mut delta_map = Vec::new();
    for (i, cfg) in dom.configs.iter().enumerate() {
        let d = conn_of(cfg, "Higgs-vacuum extension")?;
        let grad = covariant_derivative(d, phi0)?;
        let is_parallel = grad.norm_max() <= 1e-9 * phi_scale;
        let reduced = reduce(d)?;
        let s_base = ymt_action(base, &reduced)?;
        if is_parallel {
            let c = correction_functional.as_ref().map_or(0.0, |f| f(d));
            parallel.push(i);
            corr_value.push(big(c));
            delta_pullback.push(big(s_base));
            delta_map.push(reduced);
            let total = big(s_base) + big(c);
            s_hat_f.push(to_f64(&total));
            s_hat.push(total);
        } else {
            s_hat_f.push(s_base);
            s_hat.push(big(s_base));
        }
    }
    if parallel.is_empty() {
        return Err(YmtError::precondition(
            "no connection in the domain leaves the Higgs section parallel",
        ));
    }
    verify_orbit_constant(dom, &s_hat_f, "the reduced functional")?;
    let complete = corr_value.iter().all(|v| v.is_zero());
    Ok(Extension {
        base: base.clone(),
        embedding: embedding.clone(),
        extended: dom.clone(),
        correction: parallel,
        s_hat,
        corr_value,
        delta_pullback,
        delta_map: Some(delta_map),
        flags: ExtFlags { complete, equivariant: true, full: false, linear: false },
        label: format!("higgs-vacuum({})", base.label),
    })
}

/// Background-field coupling: any generator-invariant functional of the
/// connection (the background section is held fixed and gauge-inert).
pub type BackgroundCoupling = Arc<dyn Fn(&ConnectionRep) -> Result<f64> + Send + Sync>;

/// Background extension: the base functional plus a minimally coupled,
/// gauge-invariant background term, with the identity reduction.
pub fn make_background(
    base: &YMTTheory,
    coupling: BackgroundCoupling,
    dom: &Arc<SampledDomain>,
) -> Result<Extension> {
    let n = dom.len();
    let mut base_values = Vec::with_capacity(n);
    let mut coupling_values = Vec::with_capacity(n);
    for cfg in &dom.configs {
        let d = conn_of(cfg, "background extension")?;
        base_values.push(ymt_action(base, d)?);
        coupling_values.push(coupling(d)?);
    }
    verify_orbit_constant(dom, &coupling_values, "the background coupling")?;
    verify_orbit_constant(dom, &base_values, "the base functional")?;

    let mut s_hat = Vec::with_capacity(n);
    let mut corr_value = Vec::with_capacity(n);
    let mut delta_pullback = Vec::with_capacity(n);
    let mut delta_map = Vec::with_capacity(n);
    for i in 0..n {
        corr_value.push(big(coupling_values[i]));
        delta_pullback.push(big(base_values[i]));
        delta_map.push(dom.configs[i].connection().clone());
        s_hat.push(big(base_values[i]) + big(coupling_values[i]));
    }
    let complete = corr_value.iter().all(|v| v.is_zero());
    Ok(Extension {
        base: base.clone(),
        embedding: GroupEmbedding::identity(group_of(base, dom)?),
        extended: dom.clone(),
        correction: (0..n).collect(),
        s_hat,
        corr_value,
        delta_pullback,
        delta_map: Some(delta_map),
        flags: ExtFlags { complete, equivariant: true, full: false, linear: false },
        label: format!("background({})", base.label),
    })
}

/// Full-action extension: background coupling given by the topological term.
pub fn make_full_action(base: &YMTTheory, dom: &Arc<SampledDomain>) -> Result<Extension> {
    let theory = base.clone();
    let coupling: BackgroundCoupling = Arc::new(move |d: &ConnectionRep| match d {
        ConnectionRep::Cochain(c) => topological_term(&theory, c),
        ConnectionRep::Links(_) => Err(YmtError::input(
            "topological coupling needs the algebra-valued representation",
        )),
    });
    let mut e = make_background(base, coupling, dom)?;
    e.label = format!("full({})", base.label);
    Ok(e)
}

/// Extension induced by a strong emergence phenomenon between parameterized
/// theories: `S2` with any fixed parameter is a complete extension of the
/// base of `S1`, with the configuration correspondence as the reduction.
pub fn emergence_to_extension(
    s1: &ParameterizedTheory,
    s2: &ParameterizedTheory,
    fmap: &dyn Fn(&str) -> String,
    gmap: &dyn Fn(&ConnectionRep) -> Result<ConnectionRep>,
    dom2: &Arc<SampledDomain>,
) -> Result<Extension> {
    if s1.parameters.is_empty() {
        return Err(YmtError::precondition("emergence needs at least one parameter sample"));
    }
    // s1 must be a constant assignment over its base.
    for cfg in dom2.configs.iter().take(2) {
        let d = gmap(conn_of(cfg, "emergence")?)?;
        let direct = ymt_action(&s1.base, &d)?;
        for eps in &s1.parameters {
            let v = s1.eval(eps, &d)?;
            if (v - direct).abs() > 1e-9 * direct.abs().max(1.0) {
                return Err(YmtError::precondition(
                    "first theory is not a constant-assignment wrapper of its base",
                ));
            }
        }
    }
    // Strong-emergence identity on every sample.
    let mut worst = 0.0f64;
    let mut worst_at = (String::new(), 0usize);
    let mut scale = 1.0f64;
    for (i, cfg) in dom2.configs.iter().enumerate() {
        let beta = conn_of(cfg, "emergence")?;
        let reduced = gmap(beta)?;
        for eps in &s1.parameters {
            let lhs = s2.eval(&fmap(eps), beta)?;
            let rhs = s1.eval(eps, &reduced)?;
            scale = scale.max(rhs.abs());
            let r = (lhs - rhs).abs();
            if r > worst {
                worst = r;
                worst_at = (eps.clone(), i);
            }
        }
    }
    if worst > 1e-9 * scale {
        return Err(YmtError::precondition(format!(
            "emergence identity violated: worst residual {worst:e} at parameter '{}', configuration {}",
            worst_at.0, worst_at.1
        )));
    }

    let eps2 = fmap(&s1.parameters[0]);
    let n = dom2.len();
    let mut s_hat = Vec::with_capacity(n);
    let mut s_hat_f = Vec::with_capacity(n);
    let mut delta_pullback = Vec::with_capacity(n);
    let mut delta_map = Vec::with_capacity(n);
    for cfg in &dom2.configs {
        let beta = conn_of(cfg, "emergence")?;
        let v = s2.eval(&eps2, beta)?;
        s_hat_f.push(v);
        s_hat.push(big(v));
        let reduced = gmap(beta)?;
        delta_pullback.push(big(ymt_action(&s1.base, &reduced)?));
        delta_map.push(reduced);
    }
    verify_orbit_constant(dom2, &s_hat_f, "the emergent functional")?;
    Ok(Extension {
        base: s1.base.clone(),
        embedding: GroupEmbedding::identity(group_of(&s1.base, dom2)?),
        extended: dom2.clone(),
        correction: (0..n).collect(),
        s_hat,
        corr_value: vec![BigRational::zero(); n],
        delta_pullback,
        delta_map: Some(delta_map),
        flags: ExtFlags { complete: true, equivariant: true, full: false, linear: false },
        label: "emergence".into(),
    })
}

/// Convenience: construct and immediately verify, returning both.
pub fn checked(e: Extension) -> Result<(Extension, CheckReport)> {
    let report = check_extension(&e)?;
    if !report.ok {
        return Err(YmtError::Verification(format!(
            "extension '{}' fails verification: {:?}",
            e.label, report
        )));
    }
    Ok((e, report))
}

// ---------------------------------------------------------------------------
// Domain builders
// ---------------------------------------------------------------------------

/// Constant gauge generators of finite order for a group: one rotation of
/// order 4 about the last basis direction.
pub fn constant_generators(lattice: &Arc<Lattice>, group: &GaugeGroup) -> Vec<GaugeTransform> {
    let dir = group.algebra.dim - 1;
    vec![GaugeTransform::constant(
        lattice.clone(),
        group.clone(),
        group.finite_order_element(dir, 4),
    )]
}

/// A staggered (parity-dependent) finite-order transform, exercising genuine
/// vertex dependence while keeping orbits small.
pub fn staggered_generator(lattice: &Arc<Lattice>, group: &GaugeGroup) -> GaugeTransform {
    let h = group.finite_order_element(0, 4);
    let id = group.identity();
    let values = (0..lattice.vertex_count())
        .map(|v| {
            let parity: usize = lattice.coords(v).iter().sum();
            if parity.is_multiple_of(2) {
                h.clone()
            } else {
                id.clone()
            }
        })
        .collect();
    GaugeTransform {
        lattice: lattice.clone(),
        group: group.clone(),
        values: crate::fields::GaugeValues::PerVertex(values),
    }
}

/// Orbit-closed domain of link-field configurations: the identity links plus
/// random seeds, closed under a constant and a staggered generator.
pub fn links_domain(
    lattice: &Arc<Lattice>,
    group: &GaugeGroup,
    seeds: usize,
    amplitude: f64,
    seed: u64,
) -> Result<Arc<SampledDomain>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut list = vec![(
        Config::Conn(ConnectionRep::Links(LinkField::identity(lattice.clone(), group.clone()))),
        true,
    )];
    for _ in 0..seeds {
        list.push((
            Config::Conn(ConnectionRep::Links(LinkField::random(
                lattice.clone(),
                group.clone(),
                &mut rng,
                amplitude,
            ))),
            true,
        ));
    }
    let mut gens = constant_generators(lattice, group);
    gens.push(staggered_generator(lattice, group));
    SampledDomain::closure(list, 0, gens, 4096)
}

/// Orbit-closed domain of algebra-cochain configurations under constant
/// generators.
pub fn cochain_domain(
    lattice: &Arc<Lattice>,
    group: &GaugeGroup,
    seeds: usize,
    amplitude: f64,
    seed: u64,
) -> Result<Arc<SampledDomain>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let algebra = group.algebra.clone();
    let mut list = vec![(
        Config::Conn(ConnectionRep::Cochain(AlgebraCochain1::zeros(
            lattice.clone(),
            algebra.clone(),
        ))),
        true,
    )];
    for _ in 0..seeds {
        list.push((
            Config::Conn(ConnectionRep::Cochain(AlgebraCochain1::random(
                lattice.clone(),
                algebra.clone(),
                &mut rng,
                amplitude,
            ))),
            true,
        ));
    }
    SampledDomain::closure(list, 0, constant_generators(lattice, group), 4096)
}

/// Domain for the retract construction: connection-tagged cochains plus their
/// scaled copies tagged as merely extended, with the retraction index map.
pub fn retract_domain(
    lattice: &Arc<Lattice>,
    group: &GaugeGroup,
    seeds: usize,
    scale: f64,
    amplitude: f64,
    seed: u64,
) -> Result<(Arc<SampledDomain>, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let algebra = group.algebra.clone();
    let mut list = vec![(
        Config::Conn(ConnectionRep::Cochain(AlgebraCochain1::zeros(
            lattice.clone(),
            algebra.clone(),
        ))),
        true,
    )];
    let mut extended = Vec::new();
    for _ in 0..seeds {
        let d = AlgebraCochain1::random(lattice.clone(), algebra.clone(), &mut rng, amplitude);
        extended.push(d.scale(scale));
        list.push((Config::Conn(ConnectionRep::Cochain(d)), true));
    }
    for d in extended {
        list.push((Config::Conn(ConnectionRep::Cochain(d)), false));
    }
    let dom = SampledDomain::closure(list, 0, constant_generators(lattice, group), 4096)?;
    // Retraction: scaled copies map to their connection originals, found by
    // rescaling back and matching.
    let mut r = Vec::with_capacity(dom.len());
    for (i, cfg) in dom.configs.iter().enumerate() {
        if dom.connection[i] {
            r.push(i);
            continue;
        }
        let d = match cfg.connection() {
            ConnectionRep::Cochain(c) => c,
            _ => unreachable!("cochain domain"),
        };
        let original = Config::Conn(ConnectionRep::Cochain(d.scale(1.0 / scale)));
        let j = dom
            .find(&original)
            .ok_or_else(|| YmtError::input("retract target missing from domain"))?;
        r.push(j);
    }
    Ok((dom, r))
}

/// Curvature-graph domain for the BF extension: pairs `(D, F_D)` tagged as
/// connections, optionally joined by off-graph pairs `(D, 0)`.
pub fn bf_graph_domain(
    lattice: &Arc<Lattice>,
    group: &GaugeGroup,
    seeds: usize,
    off_graph: usize,
    amplitude: f64,
    seed: u64,
) -> Result<Arc<SampledDomain>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let algebra = group.algebra.clone();
    let mut list = Vec::new();
    let zero = AlgebraCochain1::zeros(lattice.clone(), algebra.clone());
    list.push((
        Config::BfPair {
            d: ConnectionRep::Cochain(zero.clone()),
            b: crate::fields::curvature(&zero),
        },
        true,
    ));
    for k in 0..(seeds + off_graph) {
        let d = AlgebraCochain1::random(lattice.clone(), algebra.clone(), &mut rng, amplitude);
        if k < seeds {
            let f = crate::fields::curvature(&d);
            list.push((Config::BfPair { d: ConnectionRep::Cochain(d), b: f }, true));
        } else {
            // Off the graph: nonzero connection paired with the zero field.
            let b = crate::fields::AlgebraCochain2::zeros(lattice.clone(), algebra.clone());
            list.push((Config::BfPair { d: ConnectionRep::Cochain(d), b }, false));
        }
    }
    SampledDomain::closure(list, 0, constant_generators(lattice, group), 4096)
}

/// Higgs-pair domain: connections paired with coherence images of coset
/// fields, plus plain connection-tagged configurations.
pub fn higgs_domain(
    lattice: &Arc<Lattice>,
    coherent: &CoherentEmbedding,
    pair_seeds: usize,
    conn_seeds: usize,
    amplitude: f64,
    seed: u64,
) -> Result<Arc<SampledDomain>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let group = coherent.embedding.target.clone();
    let algebra = group.algebra.clone();
    let mut list = Vec::new();
    // Zero pair: identity links with the base-point Higgs image.
    let phi0 = VertexSection::constant(lattice.clone(), algebra.clone(), coherent.theta0.clone());
    list.push((
        Config::HiggsPair {
            d: ConnectionRep::Links(LinkField::identity(lattice.clone(), group.clone())),
            phi: phi0,
        },
        false,
    ));
    for _ in 0..pair_seeds {
        let d = LinkField::random(lattice.clone(), group.clone(), &mut rng, amplitude);
        let phi_values: Vec<DVector<f64>> = (0..lattice.vertex_count())
            .map(|_| coherent.theta(&group.random(&mut rng, 1.5)))
            .collect();
        let phi = VertexSection {
            lattice: lattice.clone(),
            algebra: algebra.clone(),
            values: phi_values,
        };
        list.push((Config::HiggsPair { d: ConnectionRep::Links(d), phi }, false));
    }
    for _ in 0..conn_seeds {
        list.push((
            Config::Conn(ConnectionRep::Links(LinkField::random(
                lattice.clone(),
                group.clone(),
                &mut rng,
                amplitude,
            ))),
            true,
        ));
    }
    SampledDomain::closure(list, 0, constant_generators(lattice, &group), 8192)
}

/// Domain for the Higgs-vacuum reduction over `so(2) in so(3)`: embedded
/// subgroup link fields (parallel for the z-axis vacuum) together with
/// generic configurations that fail the parallel condition.
pub fn vacuum_domain(
    lattice: &Arc<Lattice>,
    embedding: &GroupEmbedding,
    parallel_seeds: usize,
    generic_seeds: usize,
    amplitude: f64,
    seed: u64,
) -> Result<Arc<SampledDomain>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = embedding.target.clone();
    let source = embedding.source.clone();
    let mut list = vec![(
        Config::Conn(ConnectionRep::Links(LinkField::identity(lattice.clone(), target.clone()))),
        true,
    )];
    for _ in 0..parallel_seeds {
        // Random source-group field pushed into the big group.
        let small = LinkField::random(lattice.clone(), source.clone(), &mut rng, amplitude);
        let values = small.values.iter().map(|m| embedding.embed_group(m)).collect();
        list.push((
            Config::Conn(ConnectionRep::Links(LinkField {
                lattice: lattice.clone(),
                group: target.clone(),
                values,
            })),
            true,
        ));
    }
    for _ in 0..generic_seeds {
        list.push((
            Config::Conn(ConnectionRep::Links(LinkField::random(
                lattice.clone(),
                target.clone(),
                &mut rng,
                amplitude,
            ))),
            false,
        ));
    }
    // Constant generators inside the embedded subgroup stabilize the vacuum.
    let gen = GaugeTransform::constant(
        lattice.clone(),
        target.clone(),
        embedding.embed_group(&source.finite_order_element(0, 4)),
    );
    SampledDomain::closure(list, 0, vec![gen], 4096)
}
