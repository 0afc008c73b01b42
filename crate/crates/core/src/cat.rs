//! The category of extensions at desk scale: morphisms as commuting pairs of
//! finite index maps, composition, mono/epi/iso classification, the
//! BF-identity isomorphism witness, terminal-object verification and the
//! slice-embedding probe.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Result, YmtError};
use crate::ext::constructors::{make_bf, make_identity, make_null};
use crate::ext::domain::{Config, SampledDomain};
use crate::ext::{to_f64, Extension, CHECK_TOL};
use crate::fields::curvature;
use crate::fields::ConnectionRep;
use crate::theory::YMTTheory;

/// A morphism of extensions: an equivariant map `f` on the extended domains
/// and a map `g` on the correction subspaces making the value and reduction
/// triangles commute. Both are stored as index maps.
#[derive(Clone, Debug)]
pub struct ExtMorphism {
    pub source: Extension,
    pub target: Extension,
    /// Image in `target.extended` of each source extended index.
    pub f: Vec<usize>,
    /// Image in `target.correction` (by position) of each source correction
    /// position.
    pub g: Vec<usize>,
}

/// Residuals of the morphism diagrams.
#[derive(Clone, Debug, Serialize)]
pub struct MorphismReport {
    pub ok: bool,
    pub equivariance_ok: bool,
    pub square_ok: bool,
    pub s_hat_residual: f64,
    pub correction_residual: f64,
    pub delta_residual: f64,
    pub messages: Vec<String>,
}

impl ExtMorphism {
    pub fn identity(e: &Extension) -> Self {
        ExtMorphism {
            source: e.clone(),
            target: e.clone(),
            f: (0..e.extended.len()).collect(),
            g: (0..e.correction.len()).collect(),
        }
    }

    /// Strict variant of `validate` that additionally requires `g` to be
    /// equivariant for the recorded generators (the refined category of
    /// equivariant extensions; the plain definition only constrains `f`).
    pub fn validate_strict(&self) -> Result<MorphismReport> {
        let mut rep = self.validate()?;
        let src = &self.source;
        let tgt = &self.target;
        if !src.extended.subset_closed(&src.correction)
            || !tgt.extended.subset_closed(&tgt.correction)
        {
            return Err(YmtError::precondition(
                "strict mode needs generator-closed correction subspaces",
            ));
        }
        for (kgen, ps) in src.extended.perms.iter().enumerate() {
            let pt = &tgt.extended.perms[kgen];
            for (k, &i) in src.correction.iter().enumerate() {
                let k2 = src
                    .correction
                    .binary_search(&ps[i])
                    .expect("correction closed");
                let target_moved = tgt
                    .correction
                    .binary_search(&pt[tgt.correction[self.g[k]]])
                    .expect("correction closed");
                if self.g[k2] != target_moved {
                    rep.ok = false;
                    rep.messages.push(format!(
                        "g is not equivariant at correction position {k}, generator {kgen}"
                    ));
                }
            }
        }
        Ok(rep)
    }

    /// Verify all structural and value conditions, reporting residuals.
    pub fn validate(&self) -> Result<MorphismReport> {
        let src = &self.source;
        let tgt = &self.target;
        let mut messages = Vec::new();
        if self.f.len() != src.extended.len() || self.g.len() != src.correction.len() {
            return Err(YmtError::input("morphism index map length mismatch"));
        }
        if self.f.iter().any(|&j| j >= tgt.extended.len())
            || self.g.iter().any(|&m| m >= tgt.correction.len())
        {
            return Err(YmtError::input("morphism index map out of range"));
        }
        if src.extended.generators.len() != tgt.extended.generators.len() {
            return Err(YmtError::input("source and target record different generator lists"));
        }

        // Equivariance of f at the index level.
        let mut equivariance_ok = true;
        for (k, ps) in src.extended.perms.iter().enumerate() {
            let pt = &tgt.extended.perms[k];
            for i in 0..src.extended.len() {
                if self.f[ps[i]] != pt[self.f[i]] {
                    equivariance_ok = false;
                    messages.push(format!("equivariance fails at configuration {i}, generator {k}"));
                }
            }
        }

        // The inclusion square: f(j1(beta)) = j2(g(beta)).
        let mut square_ok = true;
        for (k, &i) in src.correction.iter().enumerate() {
            if self.f[i] != tgt.correction[self.g[k]] {
                square_ok = false;
                messages.push(format!("inclusion square fails at correction position {k}"));
            }
        }

        // Value triangles.
        let mut scale = 1.0f64;
        for v in src.s_hat.iter().chain(&tgt.s_hat) {
            scale = scale.max(to_f64(v).abs());
        }
        let mut s_hat_residual = 0.0f64;
        for i in 0..src.extended.len() {
            let r = to_f64(&(&tgt.s_hat[self.f[i]] - &src.s_hat[i])).abs();
            s_hat_residual = s_hat_residual.max(r);
        }
        let mut correction_residual = 0.0f64;
        let mut delta_residual = 0.0f64;
        for (k, _) in src.correction.iter().enumerate() {
            let m = self.g[k];
            correction_residual = correction_residual
                .max(to_f64(&(&tgt.corr_value[m] - &src.corr_value[k])).abs());
            delta_residual = delta_residual
                .max(to_f64(&(&tgt.delta_pullback[m] - &src.delta_pullback[k])).abs());
            if let (Some(ms), Some(mt)) = (&src.delta_map, &tgt.delta_map) {
                let ds = Config::Conn(ms[k].clone());
                let dt = Config::Conn(mt[m].clone());
                match ds.distance(&dt) {
                    Some(d) => delta_residual = delta_residual.max(d),
                    None => {
                        delta_residual = f64::INFINITY;
                        messages.push(format!("reduction maps disagree in shape at {k}"));
                    }
                }
            }
        }

        let tol = CHECK_TOL * scale;
        let ok = equivariance_ok
            && square_ok
            && s_hat_residual <= tol
            && correction_residual <= tol
            && delta_residual <= tol;
        Ok(MorphismReport {
            ok,
            equivariance_ok,
            square_ok,
            s_hat_residual,
            correction_residual,
            delta_residual,
            messages,
        })
    }
}

/// Componentwise composition `m2 . m1` (first `m1`, then `m2`).
pub fn compose(m2: &ExtMorphism, m1: &ExtMorphism) -> Result<ExtMorphism> {
    if !m1.target.same_extension(&m2.source) {
        return Err(YmtError::input("composition needs matching middle extension"));
    }
    let f = m1.f.iter().map(|&i| m2.f[i]).collect();
    let g = m1.g.iter().map(|&k| m2.g[k]).collect();
    let m = ExtMorphism { source: m1.source.clone(), target: m2.target.clone(), f, g };
    let rep = m.validate()?;
    if !rep.ok {
        return Err(YmtError::Verification(format!(
            "composite fails the morphism diagrams: {:?}",
            rep.messages
        )));
    }
    Ok(m)
}

/// Mono/epi/iso classification by injectivity and surjectivity of the two
/// index maps; the category is balanced, so iso = mono + epi.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Classification {
    pub mono: bool,
    pub epi: bool,
    pub iso: bool,
}

fn injective(map: &[usize]) -> bool {
    let mut seen = std::collections::HashSet::new();
    map.iter().all(|&x| seen.insert(x))
}

fn surjective(map: &[usize], codomain: usize) -> bool {
    let mut hit = vec![false; codomain];
    for &x in map {
        hit[x] = true;
    }
    hit.into_iter().all(|b| b)
}

pub fn classify(m: &ExtMorphism) -> Classification {
    let mono = injective(&m.f) && injective(&m.g);
    let epi = surjective(&m.f, m.target.extended.len())
        && surjective(&m.g, m.target.correction.len());
    Classification { mono, epi, iso: mono && epi }
}

/// Two-sided inverse of an isomorphism.
pub fn inverse(m: &ExtMorphism) -> Result<ExtMorphism> {
    let c = classify(m);
    if !c.iso {
        return Err(YmtError::input("only isomorphisms can be inverted"));
    }
    let mut f = vec![0usize; m.target.extended.len()];
    for (i, &j) in m.f.iter().enumerate() {
        f[j] = i;
    }
    let mut g = vec![0usize; m.target.correction.len()];
    for (k, &l) in m.g.iter().enumerate() {
        g[l] = k;
    }
    let inv = ExtMorphism { source: m.target.clone(), target: m.source.clone(), f, g };
    let rep = inv.validate()?;
    if !rep.ok {
        return Err(YmtError::Verification("inverse fails the morphism diagrams".into()));
    }
    Ok(inv)
}

/// The isomorphism between the identity extension and the BF extension on
/// the curvature graph: `f` is the graph diagonal, the inverse is the first
/// projection.
pub fn bf_identity_iso(base: &YMTTheory, dom: &Arc<SampledDomain>) -> Result<ExtMorphism> {
    if base.lattice.dim() != 4 {
        return Err(YmtError::input("the BF witness requires lattice dimension 4"));
    }
    // Pair domain with the same index structure as `dom`.
    let mut configs = Vec::with_capacity(dom.len());
    for c in &dom.configs {
        let d = match c {
            Config::Conn(d) => d,
            _ => return Err(YmtError::input("BF witness expects plain connections")),
        };
        let coch = match d {
            ConnectionRep::Cochain(x) => x.clone(),
            ConnectionRep::Links(u) => u.to_cochain()?,
        };
        let f = curvature(&coch);
        configs.push(Config::BfPair { d: ConnectionRep::Cochain(coch), b: f });
    }
    let graph = Arc::new(SampledDomain {
        configs,
        connection: dom.connection.clone(),
        zero_index: dom.zero_index,
        generators: dom.generators.clone(),
        perms: dom.perms.clone(),
    });
    graph.verify_closure()?;

    let id_ext = make_identity(base, dom)?;
    let bf_ext = make_bf(base, &graph)?;
    let m = ExtMorphism {
        source: id_ext,
        target: bf_ext,
        f: (0..dom.len()).collect(),
        g: (0..dom.len()).collect(),
    };
    let rep = m.validate()?;
    if !rep.ok {
        return Err(YmtError::Verification(format!(
            "graph diagonal fails the morphism diagrams: {:?}",
            rep.messages
        )));
    }
    Ok(m)
}

/// Outcome of the unique-morphism search for one candidate.
#[derive(Clone, Debug, Serialize)]
pub struct TerminalWitness {
    pub label: String,
    pub exists: bool,
    pub unique: bool,
    pub solutions: usize,
    pub obstruction: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TerminalReport {
    pub terminal: bool,
    pub witnesses: Vec<TerminalWitness>,
}

/// Check that the null extension receives exactly one morphism from each
/// candidate, by enumerating the map constraints on the finite model.
///
/// The constraints are the structural ones (equivariance of `f` and the
/// inclusion square) together with the correction-functional triangle
/// `C_null(g(beta)) = C(beta)`; the correction triangle is where the
/// obstruction for nonzero constant extensions lives. The null data forces
/// `f` and `g` to collapse onto the zero configuration.
pub fn terminal_check(candidates: &[Extension], nullext: &Extension) -> Result<TerminalReport> {
    let n_ext = nullext.extended.len();
    let n_corr = nullext.correction.len();
    let mut witnesses = Vec::new();
    for cand in candidates {
        if cand.base.lattice.extents != nullext.base.lattice.extents
            || cand.base.algebra.name != nullext.base.algebra.name
        {
            return Err(YmtError::input("candidate and null extension share no base"));
        }
        // Valid g images per correction position: C must match.
        let mut scale = 1.0f64;
        for v in cand.corr_value.iter().chain(&nullext.corr_value) {
            scale = scale.max(to_f64(v).abs());
        }
        let mut g_choices: Vec<Vec<usize>> = Vec::with_capacity(cand.correction.len());
        for k in 0..cand.correction.len() {
            let mut opts = Vec::new();
            for m in 0..n_corr {
                let r = to_f64(&(&nullext.corr_value[m] - &cand.corr_value[k])).abs();
                if r <= CHECK_TOL * scale {
                    opts.push(m);
                }
            }
            g_choices.push(opts);
        }
        if let Some(k) = g_choices.iter().position(|o| o.is_empty()) {
            witnesses.push(TerminalWitness {
                label: cand.label.clone(),
                exists: false,
                unique: false,
                solutions: 0,
                obstruction: Some(format!(
                    "no image for correction position {k}: the correction value {} cannot equal \
                     the null correction 0",
                    to_f64(&cand.corr_value[k])
                )),
            });
            continue;
        }

        // Enumerate f maps (with g forced through the square on correction
        // points) and count the solutions.
        let free: Vec<usize> = (0..cand.extended.len()).collect();
        let combos: f64 = (n_ext as f64).powi(free.len() as i32);
        if combos > 1_000_000.0 {
            return Err(YmtError::input(
                "null extension domain too large for exhaustive morphism enumeration",
            ));
        }
        let mut solutions = 0usize;
        let mut assign = vec![0usize; cand.extended.len()];
        let total = (n_ext as u64).pow(cand.extended.len() as u32);
        'outer: for code in 0..total {
            let mut c = code;
            for slot in assign.iter_mut() {
                *slot = (c % n_ext as u64) as usize;
                c /= n_ext as u64;
            }
            // Equivariance.
            for (kgen, ps) in cand.extended.perms.iter().enumerate() {
                let pt = &nullext.extended.perms[kgen];
                for i in 0..assign.len() {
                    if assign[ps[i]] != pt[assign[i]] {
                        continue 'outer;
                    }
                }
            }
            // Square: the forced g must exist among the valid choices.
            for (k, &i) in cand.correction.iter().enumerate() {
                let forced = nullext
                    .correction
                    .iter()
                    .position(|&j| j == assign[i]);
                match forced {
                    Some(m) if g_choices[k].contains(&m) => {}
                    _ => continue 'outer,
                }
            }
            solutions += 1;
        }
        witnesses.push(TerminalWitness {
            label: cand.label.clone(),
            exists: solutions > 0,
            unique: solutions == 1,
            solutions,
            obstruction: if solutions == 0 {
                Some("structural constraints admit no map".into())
            } else {
                None
            },
        });
    }
    let terminal = witnesses.iter().all(|w| w.exists && w.unique);
    Ok(TerminalReport { terminal, witnesses })
}

/// Build the canonical null extension on the singleton zero domain, the
/// terminal object of the finite model.
pub fn null_point(base: &YMTTheory, template: &Extension) -> Result<Extension> {
    let dom = &template.extended;
    let zero_cfg = dom.configs[dom.zero_index].clone();
    let sub = Arc::new(SampledDomain {
        configs: vec![zero_cfg],
        connection: vec![true],
        zero_index: 0,
        generators: dom.generators.clone(),
        perms: vec![vec![0]; dom.generators.len()],
    });
    sub.verify_closure()?;
    make_null(base, &template.embedding, &sub)
}

/// Report of the conservative-embedding probe into the product of slice
/// categories: value preservation over the reals and over the connections,
/// plus the conservativity consequence.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub s_hat_slice_residual: f64,
    pub correction_slice_residual: f64,
    pub delta_slice_residual: f64,
    pub f_bijective: bool,
    pub g_bijective: bool,
    pub iso_in_ext: bool,
    /// Componentwise bijectivity must imply an isomorphism of extensions.
    pub conservative: bool,
    pub located_failure: Option<String>,
}

pub fn embedding_probe(m: &ExtMorphism) -> Result<ProbeReport> {
    let rep = m.validate()?;
    let f_bij = injective(&m.f) && surjective(&m.f, m.target.extended.len());
    let g_bij = injective(&m.g) && surjective(&m.g, m.target.correction.len());
    let cls = classify(m);
    // Balancedness has content: componentwise bijectivity must yield an
    // actual two-sided inverse satisfying the morphism diagrams. `inverse`
    // re-validates the reversed maps.
    let conservative = if f_bij && g_bij {
        cls.iso && inverse(m).is_ok()
    } else {
        true
    };
    let located_failure = if rep.ok {
        None
    } else {
        Some(rep.messages.first().cloned().unwrap_or_else(|| {
            format!(
                "slice residuals: s_hat {:e}, correction {:e}, delta {:e}",
                rep.s_hat_residual, rep.correction_residual, rep.delta_residual
            )
        }))
    };
    Ok(ProbeReport {
        s_hat_slice_residual: rep.s_hat_residual,
        correction_slice_residual: rep.correction_residual,
        delta_slice_residual: rep.delta_residual,
        f_bijective: f_bij,
        g_bijective: g_bij,
        iso_in_ext: cls.iso,
        conservative,
        located_failure,
    })
}
