//! The extension calculus: extension data with decomposition verification,
//! the constructor catalog, the commutative monoid sum, the induced
//! group action and group-ring module structure, and restriction maps.

pub mod constructors;
pub mod domain;
pub mod higgs;

use std::sync::Arc;

use num::rational::BigRational;
use num::traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Result, YmtError};
use crate::fields::ConnectionRep;
use crate::group_ring::{GroupRingElement, RealAction};
use crate::groups::GroupEmbedding;
use crate::theory::{ymt_action, YMTTheory};

pub use crate::fields::covariant_derivative;
pub use domain::{Config, SampledDomain, MATCH_TOL};

/// Relative tolerance for the decomposition and gauge residual checks.
pub const CHECK_TOL: f64 = 1e-9;

/// Marker flags carried by an extension.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct ExtFlags {
    /// The extended domain stands for the whole ambient 1-form space.
    pub full: bool,
    /// The correction functional vanishes identically.
    pub complete: bool,
    /// Correction subspace closed under the recorded generators with
    /// orbit-constant correction data.
    pub equivariant: bool,
    /// Domains are linear subspaces with linear correction data.
    pub linear: bool,
}

/// Exact rational conversion of a finite float.
pub fn big(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// An extension of a base theory: extended functional, correction data and
/// reduction map over finite sampled domains.
///
/// The reduction is stored twice: as a configuration-valued map where the
/// construction provides one, and always as the composite pulled-back
/// functional (the value table of `S o delta`). Monoid, group-action and
/// module operations act on the composite; the map is kept through
/// restrictions and dropped by the algebraic operations.
#[derive(Clone, Debug)]
pub struct Extension {
    pub base: YMTTheory,
    pub embedding: GroupEmbedding,
    pub extended: Arc<SampledDomain>,
    /// Sorted indices into `extended` forming the correction subspace.
    pub correction: Vec<usize>,
    /// Extended functional value per extended configuration.
    pub s_hat: Vec<BigRational>,
    /// Correction functional value per correction position.
    pub corr_value: Vec<BigRational>,
    /// Pulled-back base functional `S o delta` per correction position.
    pub delta_pullback: Vec<BigRational>,
    /// Reduction map per correction position, when available.
    pub delta_map: Option<Vec<ConnectionRep>>,
    pub flags: ExtFlags,
    pub label: String,
}

/// Residual report of `check_extension`.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub ok: bool,
    pub decomposition_residual: f64,
    pub gauge_residual: f64,
    pub delta_map_residual: f64,
    pub domain_ok: bool,
    pub complete_consistent: bool,
    pub messages: Vec<String>,
}

impl Extension {
    /// Position of an extended index inside the correction list.
    pub fn correction_position(&self, ext_index: usize) -> Option<usize> {
        self.correction.binary_search(&ext_index).ok()
    }

    /// Scale of the stored functional values, for relative tolerances.
    fn value_scale(&self) -> f64 {
        let mut s = 1.0f64;
        for v in self.s_hat.iter().chain(&self.corr_value).chain(&self.delta_pullback) {
            s = s.max(to_f64(v).abs());
        }
        s
    }

    /// Exact equality of the three value tables (same domain assumed).
    pub fn tables_equal(&self, other: &Extension) -> bool {
        self.s_hat == other.s_hat
            && self.corr_value == other.corr_value
            && self.delta_pullback == other.delta_pullback
            && self.correction == other.correction
    }

    /// Structural equality: same domain shape (within matching tolerance),
    /// same correction set and exactly equal tables.
    pub fn same_extension(&self, other: &Extension) -> bool {
        if self.extended.len() != other.extended.len() {
            return false;
        }
        if !Arc::ptr_eq(&self.extended, &other.extended) {
            for (a, b) in self.extended.configs.iter().zip(&other.extended.configs) {
                if a.distance(b).is_none_or(|d| d > MATCH_TOL) {
                    return false;
                }
            }
        }
        self.embedding == other.embedding && self.tables_equal(other)
    }
}

/// Verify every structural invariant of an extension and report residuals:
/// the decomposition identity on the correction subspace, invariance of the
/// extended functional under the recorded generators, consistency of the
/// stored reduction map with its pullback table, and the domain conditions.
pub fn check_extension(e: &Extension) -> Result<CheckReport> {
    let mut messages = Vec::new();
    let mut domain_ok = true;
    let n = e.extended.len();

    if e.s_hat.len() != n {
        return Err(YmtError::input("extended value table length mismatch"));
    }
    if e.corr_value.len() != e.correction.len() || e.delta_pullback.len() != e.correction.len() {
        return Err(YmtError::input("correction table length mismatch"));
    }
    if let Some(map) = &e.delta_map {
        if map.len() != e.correction.len() {
            return Err(YmtError::input("delta map length mismatch"));
        }
    }
    if e.correction.is_empty() {
        domain_ok = false;
        messages.push("correction subspace is empty".into());
    }
    if e.correction.windows(2).any(|w| w[0] >= w[1]) || e.correction.iter().any(|&i| i >= n) {
        return Err(YmtError::input("correction indices must be sorted, unique and in range"));
    }
    if e.correction_position(e.extended.zero_index).is_none() {
        domain_ok = false;
        messages.push("correction subspace does not contain the zero configuration".into());
    }

    let scale = e.value_scale();

    // Decomposition identity on the correction subspace.
    let mut decomposition_residual = 0.0f64;
    for (k, &i) in e.correction.iter().enumerate() {
        let r = &e.s_hat[i] - &e.delta_pullback[k] - &e.corr_value[k];
        decomposition_residual = decomposition_residual.max(to_f64(&r).abs());
    }

    // Gauge invariance of the extended functional under the recorded
    // generators, through the closure permutations.
    let mut gauge_residual = 0.0f64;
    for p in &e.extended.perms {
        for (i, &pi) in p.iter().enumerate() {
            let r = &e.s_hat[pi] - &e.s_hat[i];
            gauge_residual = gauge_residual.max(to_f64(&r).abs());
        }
    }

    // Consistency of the stored reduction map with the pullback table.
    let mut delta_map_residual = 0.0f64;
    if let Some(map) = &e.delta_map {
        for (k, conf) in map.iter().enumerate() {
            let s = ymt_action(&e.base, conf)?;
            delta_map_residual =
                delta_map_residual.max((s - to_f64(&e.delta_pullback[k])).abs());
        }
    }

    let complete_now = e.corr_value.iter().all(|v| v.is_zero());
    let complete_consistent = complete_now == e.flags.complete;
    if !complete_consistent {
        messages.push(format!(
            "complete flag is {}, correction table says {}",
            e.flags.complete, complete_now
        ));
    }

    let tol = CHECK_TOL * scale;
    let ok = domain_ok
        && complete_consistent
        && decomposition_residual <= tol
        && gauge_residual <= tol
        && delta_map_residual <= tol;
    Ok(CheckReport {
        ok,
        decomposition_residual,
        gauge_residual,
        delta_map_residual,
        domain_ok,
        complete_consistent,
        messages,
    })
}

fn same_base(a: &Extension, b: &Extension) -> Result<()> {
    if a.base.lattice.extents != b.base.lattice.extents
        || a.base.algebra.name != b.base.algebra.name
        || a.base.pairing.label != b.base.pairing.label
    {
        return Err(YmtError::input("extensions have different base theories"));
    }
    if a.embedding != b.embedding {
        return Err(YmtError::input("extensions have different basic extensions"));
    }
    Ok(())
}

/// Pointwise sum of two compatible extensions.
///
/// Extended domains are intersected; the intersection must stay closed under
/// the generators and contain every connection-tagged configuration of both
/// sides. Values add exactly; the reduction is carried in composite form
/// (the pullback tables add), so the decomposition identity is preserved
/// verbatim.
pub fn sum(a: &Extension, b: &Extension) -> Result<Extension> {
    same_base(a, b)?;
    if a.extended.generators.len() != b.extended.generators.len() {
        return Err(YmtError::input("extensions record different generator lists"));
    }

    // Fast path: the same shared domain.
    let (dom, map_a, map_b): (Arc<SampledDomain>, Vec<usize>, Vec<usize>) =
        if Arc::ptr_eq(&a.extended, &b.extended) {
            let idx: Vec<usize> = (0..a.extended.len()).collect();
            (a.extended.clone(), idx.clone(), idx)
        } else {
            intersect_domains(&a.extended, &b.extended)?
        };

    let mut s_hat = Vec::with_capacity(dom.len());
    for i in 0..dom.len() {
        s_hat.push(&a.s_hat[map_a[i]] + &b.s_hat[map_b[i]]);
    }

    // Correction subspace: intersection of the two correction sets inside the
    // common domain.
    let mut correction = Vec::new();
    let mut corr_value = Vec::new();
    let mut delta_pullback = Vec::new();
    for i in 0..dom.len() {
        let ka = a.correction_position(map_a[i]);
        let kb = b.correction_position(map_b[i]);
        if let (Some(ka), Some(kb)) = (ka, kb) {
            correction.push(i);
            corr_value.push(&a.corr_value[ka] + &b.corr_value[kb]);
            delta_pullback.push(&a.delta_pullback[ka] + &b.delta_pullback[kb]);
        }
    }
    if correction.is_empty() {
        return Err(YmtError::input(
            "summed correction subspaces do not intersect",
        ));
    }

    let flags = ExtFlags {
        full: a.flags.full && b.flags.full,
        complete: corr_value.iter().all(|v| v.is_zero()),
        equivariant: dom.subset_closed(&correction),
        linear: a.flags.linear && b.flags.linear,
    };
    Ok(Extension {
        base: a.base.clone(),
        embedding: a.embedding.clone(),
        extended: dom,
        correction,
        s_hat,
        corr_value,
        delta_pullback,
        delta_map: None,
        flags,
        label: format!("({})+({})", a.label, b.label),
    })
}

/// Intersect two domains by configuration matching. Returns the common
/// domain (configs taken from `a`) and the index maps into both sides.
fn intersect_domains(
    a: &Arc<SampledDomain>,
    b: &Arc<SampledDomain>,
) -> Result<(Arc<SampledDomain>, Vec<usize>, Vec<usize>)> {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (i, c) in a.configs.iter().enumerate() {
        if let Some(j) = b.find(c) {
            pairs.push((i, j));
        }
    }
    // Containment of the connection-tagged sets.
    for (i, c) in a.configs.iter().enumerate() {
        if a.connection[i] && !pairs.iter().any(|(x, _)| *x == i) {
            return Err(YmtError::input(format!(
                "intersection drops connection-tagged configuration {i} of the left domain"
            )));
        }
        let _ = c;
    }
    for (j, tag) in b.connection.iter().enumerate() {
        if *tag && !pairs.iter().any(|(_, y)| *y == j) {
            return Err(YmtError::input(format!(
                "intersection drops connection-tagged configuration {j} of the right domain"
            )));
        }
    }
    let zero_pos = pairs
        .iter()
        .position(|(i, j)| *i == a.zero_index && *j == b.zero_index)
        .ok_or_else(|| {
            YmtError::input("zero configurations of the two domains do not match")
        })?;

    // Translate the generator permutations; the intersection must be closed.
    let back_a: std::collections::HashMap<usize, usize> =
        pairs.iter().enumerate().map(|(n, (i, _))| (*i, n)).collect();
    let mut perms = Vec::with_capacity(a.perms.len());
    for (k, pa) in a.perms.iter().enumerate() {
        let pb = &b.perms[k];
        let mut p = Vec::with_capacity(pairs.len());
        for (i, j) in &pairs {
            let ti = pa[*i];
            let tj = pb[*j];
            let tn = back_a.get(&ti).copied().ok_or_else(|| {
                YmtError::input(format!(
                    "intersection not closed under generator {k} at configuration {i}"
                ))
            })?;
            if pairs[tn].1 != tj {
                return Err(YmtError::input(format!(
                    "generator {k} acts inconsistently across the two domains at {i}/{j}"
                )));
            }
            p.push(tn);
        }
        perms.push(p);
    }

    let configs: Vec<Config> = pairs.iter().map(|(i, _)| a.configs[*i].clone()).collect();
    let connection: Vec<bool> = pairs.iter().map(|(i, _)| a.connection[*i]).collect();
    let dom = Arc::new(SampledDomain {
        configs,
        connection,
        zero_index: zero_pos,
        generators: a.generators.clone(),
        perms,
    });
    let map_a: Vec<usize> = pairs.iter().map(|(i, _)| *i).collect();
    let map_b: Vec<usize> = pairs.iter().map(|(_, j)| *j).collect();
    Ok((dom, map_a, map_b))
}

/// Act with a group element through a recorded additive action on the reals.
///
/// The acted functional changes only on (the image of) the correction
/// subspace, the correction and pullback tables are acted pointwise, and the
/// reduction survives in composite form only.
pub fn act(action: &RealAction, element: usize, e: &Extension) -> Result<Extension> {
    let mut samples: Vec<(f64, f64)> = vec![(1.5, -0.75), (0.0, 2.0)];
    for v in e.s_hat.iter().take(4) {
        samples.push((to_f64(v), 0.5));
    }
    action.verify_additive(&samples)?;
    if !e.extended.subset_closed(&e.correction) {
        return Err(YmtError::precondition(
            "correction subspace must be generator-closed for the induced action",
        ));
    }
    let element = element % action.group().order;

    let apply = |v: &BigRational| -> BigRational {
        match action.multiplier(element) {
            Some(m) => v * m,
            None => big(action.apply(element, to_f64(v))),
        }
    };

    let mut s_hat = e.s_hat.clone();
    for &i in &e.correction {
        s_hat[i] = apply(&e.s_hat[i]);
    }
    let corr_value: Vec<BigRational> = e.corr_value.iter().map(&apply).collect();
    let delta_pullback: Vec<BigRational> = e.delta_pullback.iter().map(&apply).collect();
    let flags = ExtFlags {
        complete: corr_value.iter().all(|v| v.is_zero()),
        ..e.flags
    };
    Ok(Extension {
        base: e.base.clone(),
        embedding: e.embedding.clone(),
        extended: e.extended.clone(),
        correction: e.correction.clone(),
        s_hat,
        corr_value,
        delta_pullback,
        delta_map: None,
        flags,
        label: format!("{}*({})", element, e.label),
    })
}

/// Scale every value table by an exact rational (valid in the composite
/// representation, where the decomposition identity is linear).
fn scale_tables(e: &Extension, q: &BigRational) -> Extension {
    Extension {
        base: e.base.clone(),
        embedding: e.embedding.clone(),
        extended: e.extended.clone(),
        correction: e.correction.clone(),
        s_hat: e.s_hat.iter().map(|v| v * q).collect(),
        corr_value: e.corr_value.iter().map(|v| v * q).collect(),
        delta_pullback: e.delta_pullback.iter().map(|v| v * q).collect(),
        delta_map: None,
        flags: ExtFlags {
            complete: if q.is_zero() { true } else { e.flags.complete },
            ..e.flags
        },
        label: format!("{}*({})", q, e.label),
    }
}

/// Module action of a group-ring element: `x . e = sum_g x_g (g *- e)` with
/// exact rational arithmetic throughout.
pub fn module_scalar(
    x: &GroupRingElement,
    action: &RealAction,
    e: &Extension,
) -> Result<Extension> {
    if x.group != action.group() {
        return Err(YmtError::input("group ring element and action have different groups"));
    }
    let mut acc: Option<Extension> = None;
    for (g, q) in x.coeffs.iter().enumerate() {
        if q.is_zero() {
            continue;
        }
        let term = scale_tables(&act(action, g, e)?, q);
        acc = Some(match acc {
            None => term,
            Some(prev) => sum(&prev, &term)?,
        });
    }
    let mut out = match acc {
        Some(v) => v,
        None => scale_tables(e, &BigRational::zero()),
    };
    out.label = format!("module({})", e.label);
    Ok(out)
}

/// Restriction of an extension to a smaller generator-closed domain.
pub fn restrict(e: &Extension, sub: &Arc<SampledDomain>) -> Result<Extension> {
    // Locate every sub configuration inside the parent domain.
    let mut inj = Vec::with_capacity(sub.len());
    for (i, c) in sub.configs.iter().enumerate() {
        match e.extended.find(c) {
            Some(j) => inj.push(j),
            None => {
                return Err(YmtError::input(format!(
                    "sub-domain configuration {i} is not part of the extended domain"
                )))
            }
        }
    }
    if sub.generators.len() != e.extended.generators.len() {
        return Err(YmtError::input("sub-domain records a different generator list"));
    }
    // Closure compatibility through the inclusion.
    for (k, ps) in sub.perms.iter().enumerate() {
        let pe = &e.extended.perms[k];
        for i in 0..sub.len() {
            if inj[ps[i]] != pe[inj[i]] {
                return Err(YmtError::input(format!(
                    "sub-domain is not closed compatibly under generator {k} at {i}"
                )));
            }
        }
    }
    // The sub-domain carries its own connection marking; it must agree with
    // the parent on the shared configurations and be nonempty.
    let mut has_connection = false;
    for (i, &j) in inj.iter().enumerate() {
        if sub.connection[i] != e.extended.connection[j] {
            return Err(YmtError::input(format!(
                "sub-domain connection tag disagrees with the parent at {i}"
            )));
        }
        has_connection |= sub.connection[i];
    }
    if !has_connection {
        return Err(YmtError::input("sub-domain contains no connection-tagged configuration"));
    }
    if inj[sub.zero_index] != e.extended.zero_index {
        return Err(YmtError::input("sub-domain zero does not match"));
    }

    let s_hat: Vec<BigRational> = inj.iter().map(|&j| e.s_hat[j].clone()).collect();
    let mut correction = Vec::new();
    let mut corr_value = Vec::new();
    let mut delta_pullback = Vec::new();
    let mut delta_map = e.delta_map.as_ref().map(|_| Vec::new());
    for (i, &j) in inj.iter().enumerate() {
        if let Some(k) = e.correction_position(j) {
            correction.push(i);
            corr_value.push(e.corr_value[k].clone());
            delta_pullback.push(e.delta_pullback[k].clone());
            if let (Some(out), Some(map)) = (delta_map.as_mut(), e.delta_map.as_ref()) {
                out.push(map[k].clone());
            }
        }
    }
    if correction.is_empty() {
        return Err(YmtError::input("restriction empties the correction subspace"));
    }
    let flags = ExtFlags {
        complete: corr_value.iter().all(|v| v.is_zero()),
        equivariant: sub.subset_closed(&correction),
        full: false,
        linear: e.flags.linear,
    };
    Ok(Extension {
        base: e.base.clone(),
        embedding: e.embedding.clone(),
        extended: sub.clone(),
        correction,
        s_hat,
        corr_value,
        delta_pullback,
        delta_map,
        flags,
        label: format!("restrict({})", e.label),
    })
}
