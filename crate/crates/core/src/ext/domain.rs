//! Finite sampled configuration domains with explicit gauge-orbit closure.
//!
//! The infinite function spaces of the continuum theory are modeled by finite
//! orbit-closed sample sets. Closure under each recorded gauge generator is
//! stored as an index permutation, so every downstream invariance or
//! equivariance statement becomes an exact index-level check.

use std::sync::Arc;

use crate::error::{Result, YmtError};
use crate::fields::{
    gauge_transform_cochain, gauge_transform_cochain2, gauge_transform_links,
    gauge_transform_section, AlgebraCochain2, ConnectionRep, GaugeTransform, VertexSection,
};

/// Tolerance for matching configurations during orbit closure.
pub const MATCH_TOL: f64 = 1e-9;

/// A sampled configuration of the extended theory.
#[derive(Clone, Debug)]
pub enum Config {
    /// A gauge-field configuration in either representation.
    Conn(ConnectionRep),
    /// Connection paired with an independent 2-form field.
    BfPair { d: ConnectionRep, b: AlgebraCochain2 },
    /// Connection paired with an adjoint Higgs field (the image of the coset
    /// field under the coherence map; it transforms pointwise by Ad).
    HiggsPair { d: ConnectionRep, phi: VertexSection },
}

/// Max-abs distance with an early-exit cutoff: returns `None` on shape
/// mismatch, `Some(d)` with `d <= cutoff`, or `Some(f64::INFINITY)` as soon
/// as the cutoff is exceeded.
fn conn_distance_cut(a: &ConnectionRep, b: &ConnectionRep, cutoff: f64) -> Option<f64> {
    match (a, b) {
        (ConnectionRep::Cochain(x), ConnectionRep::Cochain(y)) => {
            if x.values.len() != y.values.len() || x.algebra.dim != y.algebra.dim {
                return None;
            }
            let mut worst = 0.0f64;
            for (p, q) in x.values.iter().zip(&y.values) {
                for (u, v) in p.iter().zip(q.iter()) {
                    worst = worst.max((u - v).abs());
                    if worst > cutoff {
                        return Some(f64::INFINITY);
                    }
                }
            }
            Some(worst)
        }
        (ConnectionRep::Links(x), ConnectionRep::Links(y)) => {
            if x.values.len() != y.values.len() || x.group != y.group {
                return None;
            }
            let mut worst = 0.0f64;
            for (p, q) in x.values.iter().zip(&y.values) {
                let mut acc = 0.0f64;
                for (u, v) in p.iter().zip(q.iter()) {
                    acc += (u - v).norm_sqr();
                }
                worst = worst.max(acc.sqrt());
                if worst > cutoff {
                    return Some(f64::INFINITY);
                }
            }
            Some(worst)
        }
        _ => None,
    }
}


fn vectors_distance_cut(
    a: &[nalgebra::DVector<f64>],
    b: &[nalgebra::DVector<f64>],
    cutoff: f64,
) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut worst = 0.0f64;
    for (p, q) in a.iter().zip(b) {
        for (u, v) in p.iter().zip(q.iter()) {
            worst = worst.max((u - v).abs());
            if worst > cutoff {
                return Some(f64::INFINITY);
            }
        }
    }
    Some(worst)
}

impl Config {
    /// Sup-distance with an early exit past `cutoff`; `None` across shapes.
    pub fn distance_cut(&self, other: &Config, cutoff: f64) -> Option<f64> {
        match (self, other) {
            (Config::Conn(a), Config::Conn(b)) => conn_distance_cut(a, b, cutoff),
            (Config::BfPair { d: d1, b: b1 }, Config::BfPair { d: d2, b: b2 }) => {
                let dd = conn_distance_cut(d1, d2, cutoff)?;
                if dd > cutoff {
                    return Some(f64::INFINITY);
                }
                let db = vectors_distance_cut(&b1.values, &b2.values, cutoff)?;
                Some(dd.max(db))
            }
            (Config::HiggsPair { d: d1, phi: p1 }, Config::HiggsPair { d: d2, phi: p2 }) => {
                let dd = conn_distance_cut(d1, d2, cutoff)?;
                if dd > cutoff {
                    return Some(f64::INFINITY);
                }
                let dp = vectors_distance_cut(&p1.values, &p2.values, cutoff)?;
                Some(dd.max(dp))
            }
            _ => None,
        }
    }

    /// Sup-distance between same-shaped configurations, `None` across shapes.
    pub fn distance(&self, other: &Config) -> Option<f64> {
        self.distance_cut(other, f64::INFINITY)
    }

    /// Apply a gauge transformation. Cochain-represented connections only
    /// carry the action of constant transforms.
    pub fn gauge_apply(&self, g: &GaugeTransform) -> Result<Config> {
        let conn_apply = |d: &ConnectionRep| -> Result<ConnectionRep> {
            match d {
                ConnectionRep::Links(u) => Ok(ConnectionRep::Links(gauge_transform_links(u, g)?)),
                ConnectionRep::Cochain(c) => {
                    Ok(ConnectionRep::Cochain(gauge_transform_cochain(c, g)?))
                }
            }
        };
        match self {
            Config::Conn(d) => Ok(Config::Conn(conn_apply(d)?)),
            Config::BfPair { d, b } => Ok(Config::BfPair {
                d: conn_apply(d)?,
                b: gauge_transform_cochain2(b, g),
            }),
            Config::HiggsPair { d, phi } => Ok(Config::HiggsPair {
                d: conn_apply(d)?,
                phi: gauge_transform_section(phi, g),
            }),
        }
    }

    pub fn connection(&self) -> &ConnectionRep {
        match self {
            Config::Conn(d) => d,
            Config::BfPair { d, .. } => d,
            Config::HiggsPair { d, .. } => d,
        }
    }
}

/// A finite, orbit-closed set of sampled configurations.
#[derive(Clone, Debug)]
pub struct SampledDomain {
    pub configs: Vec<Config>,
    /// Marks the configurations standing for actual connections (the bottom
    /// of the inclusion chain connections <= extended domain).
    pub connection: Vec<bool>,
    /// Index of the designated zero configuration.
    pub zero_index: usize,
    pub generators: Vec<GaugeTransform>,
    /// `perms[k][i]` = index of generator k applied to configuration i.
    pub perms: Vec<Vec<usize>>,
}

impl SampledDomain {
    /// Orbit closure of the seeds under the generators.
    ///
    /// Seeds are `(configuration, is_connection)` pairs. New configurations
    /// found by applying generators inherit the connection tag of their
    /// source. Fails if the closure exceeds `max_size` or a generator image
    /// matches an existing configuration ambiguously.
    pub fn closure(
        seeds: Vec<(Config, bool)>,
        zero_seed: usize,
        generators: Vec<GaugeTransform>,
        max_size: usize,
    ) -> Result<Arc<SampledDomain>> {
        if seeds.is_empty() {
            return Err(YmtError::input("domain needs at least one seed"));
        }
        if zero_seed >= seeds.len() {
            return Err(YmtError::input("zero seed index out of range"));
        }
        let mut configs: Vec<Config> = Vec::new();
        let mut connection: Vec<bool> = Vec::new();
        for (c, tag) in seeds {
            configs.push(c);
            connection.push(tag);
        }
        let mut perms: Vec<Vec<usize>> = vec![Vec::new(); generators.len()];
        let mut frontier = 0usize;
        while frontier < configs.len() {
            let i = frontier;
            frontier += 1;
            for (k, g) in generators.iter().enumerate() {
                let image = configs[i].gauge_apply(g)?;
                let found = configs
                    .iter()
                    .enumerate()
                    .filter_map(|(j, c)| image.distance_cut(c, MATCH_TOL).map(|d| (j, d)))
                    .filter(|(_, d)| *d <= MATCH_TOL)
                    .collect::<Vec<_>>();
                let target = match found.len() {
                    0 => {
                        configs.push(image);
                        connection.push(connection[i]);
                        if configs.len() > max_size {
                            return Err(YmtError::input(format!(
                                "orbit closure exceeded {max_size} configurations; \
                                 use finite-order generators"
                            )));
                        }
                        configs.len() - 1
                    }
                    1 => found[0].0,
                    _ => {
                        return Err(YmtError::input(format!(
                            "ambiguous orbit match from configuration {i} under generator {k}"
                        )))
                    }
                };
                if perms[k].len() <= i {
                    perms[k].resize(i + 1, usize::MAX);
                }
                perms[k][i] = target;
            }
        }
        for p in perms.iter_mut() {
            p.resize(configs.len(), usize::MAX);
            // Every entry must have been filled by the sweep.
            if p.contains(&usize::MAX) {
                return Err(YmtError::input("orbit closure left unresolved images"));
            }
            // Permutation check: generator images must be distinct.
            let mut seen = vec![false; configs.len()];
            for &t in p.iter() {
                if seen[t] {
                    return Err(YmtError::input(
                        "generator action is not injective on the sampled set; \
                         seeds are too close together",
                    ));
                }
                seen[t] = true;
            }
        }
        Ok(Arc::new(SampledDomain {
            configs,
            connection,
            zero_index: zero_seed,
            generators,
            perms,
        }))
    }

    /// Domain with no gauge generators.
    pub fn ungauged(seeds: Vec<(Config, bool)>, zero_seed: usize) -> Result<Arc<SampledDomain>> {
        Self::closure(seeds, zero_seed, Vec::new(), usize::MAX)
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn connection_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.connection[i]).collect()
    }

    /// Index of the configuration matching `c`, if any.
    pub fn find(&self, c: &Config) -> Option<usize> {
        self.configs
            .iter()
            .position(|x| c.distance_cut(x, MATCH_TOL).is_some_and(|d| d <= MATCH_TOL))
    }

    /// Whether an index subset is closed under every generator permutation.
    pub fn subset_closed(&self, subset: &[usize]) -> bool {
        let inset = {
            let mut v = vec![false; self.len()];
            for &i in subset {
                v[i] = true;
            }
            v
        };
        subset
            .iter()
            .all(|&i| self.perms.iter().all(|p| inset[p[i]]))
    }

    /// Verify the closure invariant: every generator image of every member
    /// matches the member recorded in the permutation table.
    pub fn verify_closure(&self) -> Result<()> {
        for (k, g) in self.generators.iter().enumerate() {
            for (i, c) in self.configs.iter().enumerate() {
                let image = c.gauge_apply(g)?;
                let d = image
                    .distance(&self.configs[self.perms[k][i]])
                    .ok_or_else(|| YmtError::input("incomparable configurations in domain"))?;
                if d > MATCH_TOL {
                    return Err(YmtError::Verification(format!(
                        "closure violated at configuration {i}, generator {k}: distance {d:e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{AlgebraCochain1, Lattice, LinkField};
    use crate::groups::GaugeGroup;
    use crate::lie;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orbit_closure_of_constant_rotation() {
        let lat = Lattice::new(vec![3, 3]).unwrap();
        let grp = GaugeGroup::so3();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zero = Config::Conn(ConnectionRep::Links(LinkField::identity(lat.clone(), grp.clone())));
        let seed = Config::Conn(ConnectionRep::Links(LinkField::random(
            lat.clone(),
            grp.clone(),
            &mut rng,
            0.4,
        )));
        let gen = GaugeTransform::constant(lat.clone(), grp.clone(), grp.finite_order_element(2, 4));
        let dom = SampledDomain::closure(vec![(zero, true), (seed, true)], 0, vec![gen], 64).unwrap();
        // zero is fixed; the random seed has an orbit of 4.
        assert_eq!(dom.len(), 5);
        dom.verify_closure().unwrap();
        assert!(dom.subset_closed(&[0]));
        assert!(dom.subset_closed(&(0..5).collect::<Vec<_>>()));
        assert!(!dom.subset_closed(&[1]));
    }

    #[test]
    fn cochain_configs_reject_nonconstant_generators() {
        let lat = Lattice::new(vec![3, 3]).unwrap();
        let alg = lie::su2();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let seed = Config::Conn(ConnectionRep::Cochain(AlgebraCochain1::random(
            lat.clone(),
            alg,
            &mut rng,
            0.5,
        )));
        let gen = GaugeTransform::random(lat.clone(), GaugeGroup::su2(), &mut rng, 1.0);
        assert!(SampledDomain::closure(vec![(seed, true)], 0, vec![gen], 64).is_err());
    }

    #[test]
    fn find_matches_with_tolerance() {
        let lat = Lattice::new(vec![3, 3]).unwrap();
        let alg = lie::su2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = AlgebraCochain1::random(lat.clone(), alg.clone(), &mut rng, 0.5);
        let dom = SampledDomain::ungauged(
            vec![
                (Config::Conn(ConnectionRep::Cochain(AlgebraCochain1::zeros(lat.clone(), alg.clone()))), true),
                (Config::Conn(ConnectionRep::Cochain(d.clone())), true),
            ],
            0,
        )
        .unwrap();
        let mut nudged = d.clone();
        nudged.values[0][0] += 1e-12;
        assert_eq!(dom.find(&Config::Conn(ConnectionRep::Cochain(nudged))), Some(1));
        let mut far = d;
        far.values[0][0] += 1.0;
        assert_eq!(dom.find(&Config::Conn(ConnectionRep::Cochain(far))), None);
    }
}
