//! The space of curvature pairings: fiber-rank arithmetic, rank upper bounds,
//! low-rank enumeration, adjoint structures and the gauge-invariant pairing
//! decomposition.

use std::sync::Arc;

use num::rational::Rational64;
use serde::Serialize;

use crate::error::{Result, YmtError};
use crate::fields::{AlgebraCochain2, GaugeTransform, Lattice, VertexSection};
use crate::lie::{BilinearForm, LieAlgebra};

/// Query data for the rank bounds: base dimension, group dimension, optional
/// connectivity, and the two equality flags (at most one may be set).
#[derive(Clone, Debug)]
pub struct RankQuery {
    pub n: u64,
    pub l: u64,
    pub q: Option<u64>,
    pub contractible: bool,
    pub parallelizable_abelian: bool,
}

impl RankQuery {
    pub fn plain(n: u64, l: u64) -> Self {
        RankQuery { n, l, q: None, contractible: false, parallelizable_abelian: false }
    }
}

/// Result of a rank bound: exact rational value, whether the inequality is
/// strict, and whether this is the equality case.
#[derive(Clone, Debug, Serialize)]
pub struct RankBound {
    pub numer: i64,
    pub denom: i64,
    pub strict: bool,
    pub equality: bool,
}

impl RankBound {
    pub fn value(&self) -> Rational64 {
        Rational64::new(self.numer, self.denom)
    }

    pub fn as_f64(&self) -> f64 {
        self.numer as f64 / self.denom as f64
    }
}

/// Rank of the bundle `Hom(Lambda^2 T*M^(x)2 (x) E^(x)2; M x R)`:
/// `((n^2 - n)/2)^2 l^2`, i.e. `C(n,2)^2 l^2`.
pub fn fiber_rank(n: u64, l: u64) -> u64 {
    if n < 2 {
        return 0;
    }
    let c = n * (n - 1) / 2;
    c * c * l * l
}

/// Upper bound on the rank of the space of linear theories over `(n, l)`.
///
/// General case: `(n^2-n)^2 l^2 / 4 + n + 1`, non-strict. With `q`-connected
/// base: `(n^2-n)^2 l^2 / 4 + (n+1)/(q+1) + 1`, strict, kept rational. With
/// either equality flag: `(n^2-n)^2 l^2 / 4 + 1`, marked as equality.
pub fn rank_upper_bound(query: &RankQuery) -> Result<RankBound> {
    if query.contractible && query.parallelizable_abelian {
        return Err(YmtError::input("at most one equality flag may be set"));
    }
    let equality_flag = query.contractible || query.parallelizable_abelian;
    if query.q.is_some() && equality_flag {
        return Err(YmtError::input(
            "connectivity bound and equality flag cannot be combined",
        ));
    }
    if let Some(q) = query.q {
        if q < 1 {
            return Err(YmtError::input("connectivity q must be >= 1"));
        }
    }
    if query.n < 2 || query.l < 1 {
        // Degenerate fibers: the space of linear theories is zero-dimensional.
        return Ok(RankBound { numer: 0, denom: 1, strict: false, equality: true });
    }
    let fiber = Rational64::from_integer(fiber_rank(query.n, query.l) as i64);
    let one = Rational64::from_integer(1);
    let bound = if equality_flag {
        RankBound {
            numer: *(fiber + one).numer(),
            denom: *(fiber + one).denom(),
            strict: false,
            equality: true,
        }
    } else if let Some(q) = query.q {
        let conn = Rational64::new(query.n as i64 + 1, q as i64 + 1);
        let total = fiber + conn + one;
        RankBound {
            numer: *total.numer(),
            denom: *total.denom(),
            strict: true,
            equality: false,
        }
    } else {
        let total = fiber + Rational64::from_integer(query.n as i64) + one;
        RankBound {
            numer: *total.numer(),
            denom: *total.denom(),
            strict: false,
            equality: false,
        }
    };
    Ok(bound)
}

/// All `(n, l)` with `2 <= n <= n_max`, `1 <= l <= l_max` whose minimal rank
/// `(n^2-n)^2 l^2 / 4 + 1` stays within `z`.
pub fn enumerate_low_rank(z: u64, n_max: u64, l_max: u64) -> Result<Vec<(u64, u64)>> {
    if z < 1 {
        return Err(YmtError::input("enumeration threshold z must be >= 1"));
    }
    let mut out = Vec::new();
    for n in 2..=n_max {
        for l in 1..=l_max {
            if fiber_rank(n, l) < z {
                out.push((n, l));
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Pairing specifications
// ---------------------------------------------------------------------------

/// Bilinear form on plaquette coefficients: diagonal (Euclidean per matching
/// plaquette, zero across distinct plaquettes) possibly rescaled per cell.
#[derive(Clone, Debug)]
pub enum PlaquetteForm {
    Diagonal,
    /// Per-plaquette positive scale factors.
    Weighted(Vec<f64>),
}

/// The algebra-side form, optionally position-dependent (per base vertex).
#[derive(Clone, Debug)]
pub enum AlgebraPairing {
    Uniform(BilinearForm),
    PerVertex(Vec<BilinearForm>),
}

impl AlgebraPairing {
    pub fn at_vertex(&self, v: usize) -> &BilinearForm {
        match self {
            AlgebraPairing::Uniform(b) => b,
            AlgebraPairing::PerVertex(bs) => &bs[v],
        }
    }
}

/// Non-tensorial pairings: an arbitrary user functional of two 2-cochains.
pub type PairingFunctional = Arc<dyn Fn(&AlgebraCochain2, &AlgebraCochain2) -> f64 + Send + Sync>;

/// How a pairing evaluates a pair of 2-cochains.
#[derive(Clone)]
pub enum PairingKind {
    /// Function-linear (tensorial): a per-cell bilinear contraction integrated
    /// with the volume weights.
    Tensorial {
        form2: PlaquetteForm,
        algebra_form: AlgebraPairing,
    },
    /// An arbitrary R-linear (or not even linear) functional of the pair.
    Functional(PairingFunctional),
}

impl std::fmt::Debug for PairingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PairingKind::Tensorial { form2, .. } => {
                write!(f, "Tensorial {{ form2: {form2:?}, .. }}")
            }
            PairingKind::Functional(_) => write!(f, "Functional(..)"),
        }
    }
}

/// A pairing on algebra-valued 2-cochains over a fixed lattice and algebra.
#[derive(Clone, Debug)]
pub struct PairingSpec {
    pub lattice: Arc<Lattice>,
    pub algebra: Arc<LieAlgebra>,
    pub kind: PairingKind,
    pub label: String,
}

impl PairingSpec {
    /// Killing-form pairing with the default diagonal plaquette form.
    pub fn killing(lattice: Arc<Lattice>, algebra: Arc<LieAlgebra>) -> Self {
        let k = algebra.killing_form();
        PairingSpec {
            lattice,
            algebra,
            kind: PairingKind::Tensorial {
                form2: PlaquetteForm::Diagonal,
                algebra_form: AlgebraPairing::Uniform(k),
            },
            label: "killing".into(),
        }
    }

    /// Euclidean algebra form with the diagonal plaquette form.
    pub fn euclidean(lattice: Arc<Lattice>, algebra: Arc<LieAlgebra>) -> Self {
        let e = BilinearForm::euclidean(algebra.dim);
        PairingSpec {
            lattice,
            algebra,
            kind: PairingKind::Tensorial {
                form2: PlaquetteForm::Diagonal,
                algebra_form: AlgebraPairing::Uniform(e),
            },
            label: "euclidean".into(),
        }
    }

    /// Arbitrary uniform matrix form.
    pub fn from_matrix(lattice: Arc<Lattice>, algebra: Arc<LieAlgebra>, form: BilinearForm) -> Self {
        PairingSpec {
            lattice,
            algebra,
            kind: PairingKind::Tensorial {
                form2: PlaquetteForm::Diagonal,
                algebra_form: AlgebraPairing::Uniform(form),
            },
            label: "matrix".into(),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, PairingKind::Tensorial { .. })
    }

    /// The algebra form is symmetric (needed by the scalar polynomial split).
    pub fn is_symmetric(&self) -> bool {
        match &self.kind {
            PairingKind::Tensorial { algebra_form, .. } => match algebra_form {
                AlgebraPairing::Uniform(b) => {
                    (b.matrix.transpose() - &b.matrix).abs().max() < 1e-14
                }
                AlgebraPairing::PerVertex(bs) => bs
                    .iter()
                    .all(|b| (b.matrix.transpose() - &b.matrix).abs().max() < 1e-14),
            },
            PairingKind::Functional(_) => false,
        }
    }
}

/// Report of an adjoint-structure (gauge invariance of the pairing) check.
#[derive(Clone, Debug, Serialize)]
pub struct AdjointReport {
    pub ok: bool,
    pub max_residual: f64,
}

/// Check the pointwise Ad-invariance of a tensorial pairing's algebra form:
/// `<Ad_{g(x)} s(x), Ad_{g(x)} s'(x)> = <s(x), s'(x)>` at every vertex, over
/// the supplied gauge and section samples.
pub fn is_adjoint_structure(
    spec: &PairingSpec,
    gauges: &[GaugeTransform],
    sections: &[VertexSection],
) -> Result<AdjointReport> {
    let algebra_form = match &spec.kind {
        PairingKind::Tensorial { algebra_form, .. } => algebra_form,
        PairingKind::Functional(_) => {
            return Err(YmtError::input(
                "adjoint structures are function-linear; non-tensorial pairing rejected",
            ))
        }
    };
    if sections.len() < 2 {
        return Err(YmtError::input("need at least two section samples"));
    }
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for g in gauges {
        for w in 0..sections.len() {
            let s = &sections[w];
            let s2 = &sections[(w + 1) % sections.len()];
            for v in 0..spec.lattice.vertex_count() {
                let b = algebra_form.at_vertex(v);
                let ad = g.group.adjoint_coords(g.at(v));
                let lhs = b.eval(&(&ad * &s.values[v]), &(&ad * &s2.values[v]));
                let rhs = b.eval(&s.values[v], &s2.values[v]);
                worst = worst.max((lhs - rhs).abs());
                scale = scale.max(rhs.abs());
            }
        }
    }
    Ok(AdjointReport { ok: worst <= 1e-9 * scale, max_residual: worst })
}

/// Finite fiber dimensions of the pairing space for the trivial-bundle desk
/// model: the 2-form fiber rank together with the dimension of the
/// ad-invariant part for the chosen algebra.
pub fn pairing_space_dim_linear(n: u64, algebra: &LieAlgebra) -> (u64, usize) {
    if n < 2 {
        return (0, 0);
    }
    let fiber = fiber_rank(n, algebra.dim as u64);
    let adstr = algebra.invariant_form_basis().len();
    (fiber, adstr)
}

/// Evaluate the per-plaquette scale of the 2-form part.
pub fn plaquette_scale(form2: &PlaquetteForm, p: usize) -> f64 {
    match form2 {
        PlaquetteForm::Diagonal => 1.0,
        PlaquetteForm::Weighted(w) => w[p],
    }
}

/// Random bilinear form, used to probe invariance failures.
pub fn random_form(algebra: &LieAlgebra, rng: &mut impl rand::Rng, amp: f64) -> BilinearForm {
    let l = algebra.dim;
    let m = nalgebra::DMatrix::from_fn(l, l, |_, _| rng.gen_range(-amp..amp));
    BilinearForm::new(m)
}

/// Sample count per invariance sweep. Invariance is linear in the samples
/// and failures are generic, so a fixed budget suffices.
pub const INVARIANCE_SAMPLES: usize = 32;

/// Helper for building the sample sets used by the invariance checks.
pub fn invariance_samples(
    lattice: &Arc<Lattice>,
    group: &crate::groups::GaugeGroup,
    count: usize,
    seed: u64,
) -> (Vec<GaugeTransform>, Vec<VertexSection>) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let gauges = (0..count)
        .map(|_| GaugeTransform::random(lattice.clone(), group.clone(), &mut rng, 1.2))
        .collect();
    let sections = (0..count)
        .map(|_| VertexSection::random(lattice.clone(), group.algebra.clone(), &mut rng, 1.0))
        .collect();
    (gauges, sections)
}

/// Full-budget adjoint-structure verification: 32 random gauge transforms
/// against 32 random sections, seed recorded by the caller.
pub fn verify_adjoint_structure(
    spec: &PairingSpec,
    group: &crate::groups::GaugeGroup,
    seed: u64,
) -> Result<AdjointReport> {
    let (gauges, sections) =
        invariance_samples(&spec.lattice, group, INVARIANCE_SAMPLES, seed);
    is_adjoint_structure(spec, &gauges, &sections)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GaugeGroup;
    use crate::lie;

    /// Binomial-coefficient oracle for the fiber rank.
    fn binom(n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let mut num = 1u64;
        let mut den = 1u64;
        for i in 0..k {
            num *= n - i;
            den *= i + 1;
        }
        num / den
    }

    #[test]
    fn fiber_rank_matches_binomial_oracle() {
        assert_eq!(fiber_rank(2, 1), 1);
        assert_eq!(fiber_rank(4, 3), 324);
        assert_eq!(fiber_rank(1, 5), 0);
        for n in 0..8 {
            for l in 0..5 {
                assert_eq!(fiber_rank(n, l), binom(n, 2) * binom(n, 2) * l * l);
            }
        }
    }

    #[test]
    fn rank_bounds_evaluate_corollary() {
        let b = rank_upper_bound(&RankQuery::plain(2, 1)).unwrap();
        assert_eq!((b.numer, b.denom), (4, 1));
        assert!(!b.strict && !b.equality);

        let b = rank_upper_bound(&RankQuery {
            n: 2,
            l: 3,
            q: None,
            contractible: true,
            parallelizable_abelian: false,
        })
        .unwrap();
        assert_eq!((b.numer, b.denom), (10, 1));
        assert!(b.equality && !b.strict);

        let b = rank_upper_bound(&RankQuery { n: 3, l: 1, q: Some(1), contractible: false, parallelizable_abelian: false }).unwrap();
        assert_eq!((b.numer, b.denom), (12, 1));
        assert!(b.strict);

        // Rational connectivity term stays rational.
        let b = rank_upper_bound(&RankQuery { n: 4, l: 1, q: Some(2), contractible: false, parallelizable_abelian: false }).unwrap();
        // 36 + 5/3 + 1
        assert_eq!((b.numer, b.denom), (116, 3));
    }

    #[test]
    fn combined_flags_are_input_errors() {
        let q = RankQuery { n: 3, l: 2, q: Some(1), contractible: true, parallelizable_abelian: false };
        assert!(rank_upper_bound(&q).is_err());
        let q2 = RankQuery { n: 3, l: 2, q: None, contractible: true, parallelizable_abelian: true };
        assert!(rank_upper_bound(&q2).is_err());
    }

    #[test]
    fn enumeration_brute_force() {
        assert_eq!(enumerate_low_rank(7, 10, 10).unwrap(), vec![(2, 1), (2, 2)]);
        assert_eq!(enumerate_low_rank(2, 10, 10).unwrap(), vec![(2, 1)]);
        assert!(enumerate_low_rank(1, 12, 12).unwrap().is_empty());
        assert!(enumerate_low_rank(0, 10, 10).is_err());
    }

    #[test]
    fn enumeration_is_monotone_in_z() {
        for z in 1..30u64 {
            let a = enumerate_low_rank(z, 8, 8).unwrap();
            let b = enumerate_low_rank(z + 1, 8, 8).unwrap();
            for pair in &a {
                assert!(b.contains(pair));
            }
        }
    }

    #[test]
    fn bounds_monotone_and_equality_below_general() {
        for n in 2..7u64 {
            for l in 1..5u64 {
                let g = rank_upper_bound(&RankQuery::plain(n, l)).unwrap().value();
                let g_n = rank_upper_bound(&RankQuery::plain(n + 1, l)).unwrap().value();
                let g_l = rank_upper_bound(&RankQuery::plain(n, l + 1)).unwrap().value();
                assert!(g_n >= g && g_l >= g);
                let eq = rank_upper_bound(&RankQuery {
                    n,
                    l,
                    q: None,
                    contractible: true,
                    parallelizable_abelian: false,
                })
                .unwrap()
                .value();
                assert!(eq <= g);
            }
        }
    }

    #[test]
    fn killing_spec_is_adjoint_structure() {
        let lat = Lattice::new(vec![4, 4]).unwrap();
        for (alg, grp) in [
            (lie::su2(), GaugeGroup::su2()),
            (lie::so3(), GaugeGroup::so3()),
            (lie::su2_plus_u1(), GaugeGroup::su2_x_u1()),
        ] {
            let spec = PairingSpec::killing(lat.clone(), alg);
            let rep = verify_adjoint_structure(&spec, &grp, 99).unwrap();
            assert!(rep.ok, "group {:?} residual {}", grp.id, rep.max_residual);
        }
    }

    #[test]
    fn abelian_any_form_is_adjoint_structure() {
        use rand::SeedableRng;
        let lat = Lattice::new(vec![4, 4]).unwrap();
        let alg = lie::u1k(2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let spec = PairingSpec::from_matrix(
            lat.clone(),
            alg.clone(),
            random_form(&alg, &mut rng, 2.0),
        );
        let (gauges, sections) = invariance_samples(&lat, &GaugeGroup::u1k(2), 6, 7);
        let rep = is_adjoint_structure(&spec, &gauges, &sections).unwrap();
        assert!(rep.ok);
    }

    #[test]
    fn random_form_fails_invariance_over_many_seeds() {
        use rand::SeedableRng;
        let lat = Lattice::new(vec![3, 3]).unwrap();
        let alg = lie::su2();
        for seed in 0..20u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let spec = PairingSpec::from_matrix(
                lat.clone(),
                alg.clone(),
                random_form(&alg, &mut rng, 1.0),
            );
            let (gauges, sections) = invariance_samples(&lat, &GaugeGroup::su2(), 4, seed + 100);
            let rep = is_adjoint_structure(&spec, &gauges, &sections).unwrap();
            assert!(!rep.ok, "seed {seed} unexpectedly invariant");
            assert!(rep.max_residual > 1e-3);
        }
    }

    #[test]
    fn non_tensorial_spec_rejected() {
        let lat = Lattice::new(vec![3, 3]).unwrap();
        let alg = lie::su2();
        let spec = PairingSpec {
            lattice: lat.clone(),
            algebra: alg,
            kind: PairingKind::Functional(Arc::new(|_, _| 0.0)),
            label: "opaque".into(),
        };
        let (gauges, sections) = invariance_samples(&lat, &GaugeGroup::su2(), 2, 1);
        assert!(is_adjoint_structure(&spec, &gauges, &sections).is_err());
    }

    #[test]
    fn pairing_dims_for_desk_model() {
        assert_eq!(pairing_space_dim_linear(2, &lie::su2()), (9, 1));
        assert_eq!(pairing_space_dim_linear(2, &lie::u1()), (1, 1));
        assert_eq!(pairing_space_dim_linear(1, &lie::su2()), (0, 0));
    }
}
