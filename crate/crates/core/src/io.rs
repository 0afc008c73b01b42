//! Serialization schemas for the file formats consumed and produced by the
//! command-line front end: lattices, fields, theories, extensions and
//! morphisms. Exact rational value tables are carried as `p/q` strings next
//! to `f64` mirrors.

use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num::rational::BigRational;
use num::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, YmtError};
use crate::ext::domain::{Config, SampledDomain};
use crate::ext::{big, check_extension, to_f64, ExtFlags, Extension};
use crate::fields::{
    AlgebraCochain1, AlgebraCochain2, ConnectionRep, GaugeTransform, GaugeValues, Lattice,
    LinkField, VertexSection,
};
use crate::groups::{EmbeddingKind, GaugeGroup, GroupEmbedding};
use crate::pairing::{AlgebraPairing, PairingKind, PairingSpec};
use crate::theory::YMTTheory;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeJson {
    pub extents: Vec<usize>,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

fn default_weight() -> f64 {
    1.0
}

impl LatticeJson {
    pub fn build(&self) -> Result<Arc<Lattice>> {
        Lattice::with_weight(self.extents.clone(), self.weight)
    }

    pub fn of(lattice: &Lattice) -> Self {
        LatticeJson {
            extents: lattice.extents.clone(),
            weight: lattice.volume_weight[0],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    /// Seeded random perturbation of the Killing form (generically breaks
    /// gauge invariance): kind = "perturbed".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl PairingJson {
    pub fn killing() -> Self {
        PairingJson { kind: "killing".into(), matrix: None, perturbation: None, seed: None }
    }

    pub fn build(
        &self,
        lattice: &Arc<Lattice>,
        algebra: &Arc<crate::lie::LieAlgebra>,
    ) -> Result<PairingSpec> {
        match self.kind.as_str() {
            "killing" => Ok(PairingSpec::killing(lattice.clone(), algebra.clone())),
            "euclidean" => Ok(PairingSpec::euclidean(lattice.clone(), algebra.clone())),
            "matrix" => {
                let rows = self
                    .matrix
                    .as_ref()
                    .ok_or_else(|| YmtError::input("matrix pairing needs 'matrix'"))?;
                let l = algebra.dim;
                if rows.len() != l || rows.iter().any(|r| r.len() != l) {
                    return Err(YmtError::input("pairing matrix must be l x l"));
                }
                let m = DMatrix::from_fn(l, l, |i, j| rows[i][j]);
                Ok(PairingSpec::from_matrix(
                    lattice.clone(),
                    algebra.clone(),
                    crate::lie::BilinearForm::new(m),
                ))
            }
            "perturbed" => {
                use rand::{Rng, SeedableRng};
                let amp = self.perturbation.unwrap_or(0.3);
                let seed = self.seed.unwrap_or(0);
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let l = algebra.dim;
                let killing = algebra.killing_form().matrix;
                let noise = DMatrix::from_fn(l, l, |_, _| rng.gen_range(-amp..amp));
                let mut spec = PairingSpec::from_matrix(
                    lattice.clone(),
                    algebra.clone(),
                    crate::lie::BilinearForm::new(killing + noise),
                );
                spec.label = "perturbed".into();
                Ok(spec)
            }
            other => Err(YmtError::input(format!(
                "unknown pairing kind '{other}' (killing, euclidean, matrix, perturbed)"
            ))),
        }
    }

    pub fn of(spec: &PairingSpec) -> Self {
        match &spec.kind {
            PairingKind::Tensorial { algebra_form, .. } => match spec.label.as_str() {
                "killing" | "euclidean" => PairingJson {
                    kind: spec.label.clone(),
                    matrix: None,
                    perturbation: None,
                    seed: None,
                },
                _ => {
                    let m = match algebra_form {
                        AlgebraPairing::Uniform(b) => &b.matrix,
                        AlgebraPairing::PerVertex(bs) => &bs[0].matrix,
                    };
                    let rows = (0..m.nrows())
                        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                        .collect();
                    PairingJson {
                        kind: "matrix".into(),
                        matrix: Some(rows),
                        perturbation: None,
                        seed: None,
                    }
                }
            },
            PairingKind::Functional(_) => PairingJson {
                kind: "matrix".into(),
                matrix: None,
                perturbation: None,
                seed: None,
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryJson {
    pub lattice: LatticeJson,
    pub algebra: String,
    pub pairing: PairingJson,
    #[serde(default)]
    pub label: String,
}

impl TheoryJson {
    pub fn build(&self) -> Result<YMTTheory> {
        let lattice = self.lattice.build()?;
        let algebra = crate::lie::catalog(&self.algebra)?;
        let pairing = self.pairing.build(&lattice, &algebra)?;
        YMTTheory::new(lattice, algebra, pairing, self.label.clone())
    }

    pub fn of(t: &YMTTheory) -> Self {
        TheoryJson {
            lattice: LatticeJson::of(&t.lattice),
            algebra: t.algebra.name.clone(),
            pairing: PairingJson::of(&t.pairing),
            label: t.label.clone(),
        }
    }
}

fn matrix_to_rows(m: &DMatrix<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<[f64; 2]>]) -> Result<DMatrix<Complex64>> {
    let r = rows.len();
    if r == 0 || rows.iter().any(|row| row.len() != rows[0].len()) {
        return Err(YmtError::input("ragged matrix rows"));
    }
    let c = rows[0].len();
    Ok(DMatrix::from_fn(r, c, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

/// Field serialization: sparse edge list of coefficient vectors (algebra
/// cochains) or group matrices (link fields).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "representation", deny_unknown_fields)]
pub enum FieldJson {
    #[serde(rename = "cochain")]
    Cochain {
        lattice: LatticeJson,
        algebra: String,
        edges: Vec<(usize, Vec<f64>)>,
    },
    #[serde(rename = "links")]
    Links {
        lattice: LatticeJson,
        group: String,
        edges: Vec<(usize, Vec<Vec<[f64; 2]>>)>,
    },
}

impl FieldJson {
    pub fn build(&self) -> Result<ConnectionRep> {
        match self {
            FieldJson::Cochain { lattice, algebra, edges } => {
                let lat = lattice.build()?;
                let alg = crate::lie::catalog(algebra)?;
                let mut d = AlgebraCochain1::zeros(lat.clone(), alg.clone());
                for (e, coeffs) in edges {
                    if *e >= lat.edge_count() {
                        return Err(YmtError::input(format!("edge index {e} out of range")));
                    }
                    if coeffs.len() != alg.dim {
                        return Err(YmtError::input("coefficient length mismatch"));
                    }
                    d.values[*e] = DVector::from_vec(coeffs.clone());
                }
                Ok(ConnectionRep::Cochain(d))
            }
            FieldJson::Links { lattice, group, edges } => {
                let lat = lattice.build()?;
                let grp = GaugeGroup::by_name(group)?;
                let mut u = LinkField::identity(lat.clone(), grp.clone());
                for (e, rows) in edges {
                    if *e >= lat.edge_count() {
                        return Err(YmtError::input(format!("edge index {e} out of range")));
                    }
                    let m = rows_to_matrix(rows)?;
                    if grp.membership_residual(&m) > 1e-10 {
                        return Err(YmtError::input(format!(
                            "matrix at edge {e} is not in the group"
                        )));
                    }
                    u.values[*e] = m;
                }
                Ok(ConnectionRep::Links(u))
            }
        }
    }

    pub fn of(field: &ConnectionRep) -> Self {
        match field {
            ConnectionRep::Cochain(d) => FieldJson::Cochain {
                lattice: LatticeJson::of(&d.lattice),
                algebra: d.algebra.name.clone(),
                edges: d
                    .values
                    .iter()
                    .enumerate()
                    .map(|(e, v)| (e, v.iter().copied().collect()))
                    .collect(),
            },
            ConnectionRep::Links(u) => FieldJson::Links {
                lattice: LatticeJson::of(&u.lattice),
                group: u.group.algebra.name.clone(),
                edges: u
                    .values
                    .iter()
                    .enumerate()
                    .map(|(e, m)| (e, matrix_to_rows(m)))
                    .collect(),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionJson {
    pub values: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum ConfigJson {
    #[serde(rename = "connection")]
    Conn { field: FieldJson },
    #[serde(rename = "bf-pair")]
    BfPair { field: FieldJson, b: Vec<(usize, Vec<f64>)> },
    #[serde(rename = "higgs-pair")]
    HiggsPair { field: FieldJson, phi: SectionJson },
}

impl ConfigJson {
    pub fn build(&self) -> Result<Config> {
        match self {
            ConfigJson::Conn { field } => Ok(Config::Conn(field.build()?)),
            ConfigJson::BfPair { field, b } => {
                let d = field.build()?;
                let lat = d.lattice().clone();
                let alg = match &d {
                    ConnectionRep::Cochain(c) => c.algebra.clone(),
                    ConnectionRep::Links(u) => u.group.algebra.clone(),
                };
                let mut w = AlgebraCochain2::zeros(lat.clone(), alg.clone());
                for (p, coeffs) in b {
                    if *p >= lat.plaquette_count() {
                        return Err(YmtError::input("plaquette index out of range"));
                    }
                    w.values[*p] = DVector::from_vec(coeffs.clone());
                }
                Ok(Config::BfPair { d, b: w })
            }
            ConfigJson::HiggsPair { field, phi } => {
                let d = field.build()?;
                let lat = d.lattice().clone();
                let alg = match &d {
                    ConnectionRep::Cochain(c) => c.algebra.clone(),
                    ConnectionRep::Links(u) => u.group.algebra.clone(),
                };
                if phi.values.len() != lat.vertex_count() {
                    return Err(YmtError::input("section length mismatch"));
                }
                let values = phi.values.iter().map(|v| DVector::from_vec(v.clone())).collect();
                Ok(Config::HiggsPair {
                    d,
                    phi: VertexSection { lattice: lat, algebra: alg, values },
                })
            }
        }
    }

    pub fn of(c: &Config) -> Self {
        match c {
            Config::Conn(d) => ConfigJson::Conn { field: FieldJson::of(d) },
            Config::BfPair { d, b } => ConfigJson::BfPair {
                field: FieldJson::of(d),
                b: b.values
                    .iter()
                    .enumerate()
                    .map(|(p, v)| (p, v.iter().copied().collect()))
                    .collect(),
            },
            Config::HiggsPair { d, phi } => ConfigJson::HiggsPair {
                field: FieldJson::of(d),
                phi: SectionJson {
                    values: phi.values.iter().map(|v| v.iter().copied().collect()).collect(),
                },
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeJson {
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_vertex: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

impl GaugeJson {
    pub fn build(&self, lattice: &Arc<Lattice>) -> Result<GaugeTransform> {
        let group = GaugeGroup::by_name(&self.group)?;
        let values = match (&self.constant, &self.per_vertex) {
            (Some(m), None) => GaugeValues::Constant(rows_to_matrix(m)?),
            (None, Some(ms)) => {
                if ms.len() != lattice.vertex_count() {
                    return Err(YmtError::input("gauge transform vertex count mismatch"));
                }
                let mut out = Vec::with_capacity(ms.len());
                for m in ms {
                    out.push(rows_to_matrix(m)?);
                }
                GaugeValues::PerVertex(out)
            }
            _ => {
                return Err(YmtError::input(
                    "gauge transform needs exactly one of 'constant' or 'per_vertex'",
                ))
            }
        };
        let g = GaugeTransform { lattice: lattice.clone(), group, values };
        if g.membership_residual() > 1e-10 {
            return Err(YmtError::input("gauge transform matrices are not in the group"));
        }
        Ok(g)
    }

    pub fn of(g: &GaugeTransform) -> Self {
        match &g.values {
            GaugeValues::Constant(m) => GaugeJson {
                group: g.group.algebra.name.clone(),
                constant: Some(matrix_to_rows(m)),
                per_vertex: None,
            },
            GaugeValues::PerVertex(ms) => GaugeJson {
                group: g.group.algebra.name.clone(),
                constant: None,
                per_vertex: Some(ms.iter().map(matrix_to_rows).collect()),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainJson {
    pub configs: Vec<ConfigJson>,
    pub connection: Vec<bool>,
    pub zero_index: usize,
    pub generators: Vec<GaugeJson>,
    pub perms: Vec<Vec<usize>>,
}

impl DomainJson {
    pub fn build(&self, lattice: &Arc<Lattice>) -> Result<Arc<SampledDomain>> {
        let configs: Result<Vec<Config>> = self.configs.iter().map(|c| c.build()).collect();
        let generators: Result<Vec<GaugeTransform>> =
            self.generators.iter().map(|g| g.build(lattice)).collect();
        let dom = Arc::new(SampledDomain {
            configs: configs?,
            connection: self.connection.clone(),
            zero_index: self.zero_index,
            generators: generators?,
            perms: self.perms.clone(),
        });
        if dom.connection.len() != dom.configs.len()
            || dom.zero_index >= dom.configs.len()
            || dom.perms.len() != dom.generators.len()
            || dom.perms.iter().any(|p| p.len() != dom.configs.len())
        {
            return Err(YmtError::input("inconsistent domain tables"));
        }
        dom.verify_closure()?;
        Ok(dom)
    }

    pub fn of(dom: &SampledDomain) -> Self {
        DomainJson {
            configs: dom.configs.iter().map(ConfigJson::of).collect(),
            connection: dom.connection.clone(),
            zero_index: dom.zero_index,
            generators: dom.generators.iter().map(GaugeJson::of).collect(),
            perms: dom.perms.clone(),
        }
    }
}

fn rational_to_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn rational_from_string(s: &str) -> Result<BigRational> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| YmtError::input(format!("malformed rational '{s}'")))?;
    let numer = BigInt::from_str(n).map_err(|e| YmtError::input(format!("bad numerator: {e}")))?;
    let denom = BigInt::from_str(d).map_err(|e| YmtError::input(format!("bad denominator: {e}")))?;
    if denom == BigInt::from(0) {
        return Err(YmtError::input("zero denominator"));
    }
    Ok(BigRational::new(numer, denom))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

impl EmbeddingJson {
    pub fn build(&self) -> Result<GroupEmbedding> {
        match self.kind.as_str() {
            "identity" => {
                let g = self
                    .group
                    .as_ref()
                    .ok_or_else(|| YmtError::input("identity embedding needs 'group'"))?;
                Ok(GroupEmbedding::identity(GaugeGroup::by_name(g)?))
            }
            "so2-in-so3" => Ok(GroupEmbedding::so2_in_so3()),
            "u1-in-su2" => Ok(GroupEmbedding::u1_in_su2()),
            other => Err(YmtError::input(format!("unknown embedding '{other}'"))),
        }
    }

    pub fn of(e: &GroupEmbedding) -> Self {
        match e.kind {
            EmbeddingKind::Identity => EmbeddingJson {
                kind: "identity".into(),
                group: Some(e.source.algebra.name.clone()),
            },
            EmbeddingKind::So2InSo3 => EmbeddingJson { kind: "so2-in-so3".into(), group: None },
            EmbeddingKind::U1InSu2 => EmbeddingJson { kind: "u1-in-su2".into(), group: None },
        }
    }
}

/// Extension file format: base theory, embedding, domain, correction indices,
/// exact value tables with float mirrors, flags and the residual report at
/// emission time.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionJson {
    pub base: TheoryJson,
    pub embedding: EmbeddingJson,
    pub domain: DomainJson,
    pub correction: Vec<usize>,
    pub s_hat: Vec<String>,
    pub s_hat_f64: Vec<f64>,
    pub corr_value: Vec<String>,
    pub delta_pullback: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_map: Option<Vec<FieldJson>>,
    pub flags: FlagsJson,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_report: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagsJson {
    pub full: bool,
    pub complete: bool,
    pub equivariant: bool,
    pub linear: bool,
}

impl ExtensionJson {
    pub fn build(&self) -> Result<Extension> {
        let base = self.base.build()?;
        let embedding = self.embedding.build()?;
        let domain = self.domain.build(&base.lattice)?;
        let s_hat: Result<Vec<BigRational>> =
            self.s_hat.iter().map(|s| rational_from_string(s)).collect();
        let corr_value: Result<Vec<BigRational>> =
            self.corr_value.iter().map(|s| rational_from_string(s)).collect();
        let delta_pullback: Result<Vec<BigRational>> =
            self.delta_pullback.iter().map(|s| rational_from_string(s)).collect();
        let delta_map = match &self.delta_map {
            None => None,
            Some(fs) => {
                let maps: Result<Vec<ConnectionRep>> = fs.iter().map(|f| f.build()).collect();
                Some(maps?)
            }
        };
        Ok(Extension {
            base,
            embedding,
            extended: domain,
            correction: self.correction.clone(),
            s_hat: s_hat?,
            corr_value: corr_value?,
            delta_pullback: delta_pullback?,
            delta_map,
            flags: ExtFlags {
                full: self.flags.full,
                complete: self.flags.complete,
                equivariant: self.flags.equivariant,
                linear: self.flags.linear,
            },
            label: self.label.clone(),
        })
    }

    pub fn of(e: &Extension) -> Result<Self> {
        let report = check_extension(e)?;
        Ok(ExtensionJson {
            base: TheoryJson::of(&e.base),
            embedding: EmbeddingJson::of(&e.embedding),
            domain: DomainJson::of(&e.extended),
            correction: e.correction.clone(),
            s_hat: e.s_hat.iter().map(rational_to_string).collect(),
            s_hat_f64: e.s_hat.iter().map(to_f64).collect(),
            corr_value: e.corr_value.iter().map(rational_to_string).collect(),
            delta_pullback: e.delta_pullback.iter().map(rational_to_string).collect(),
            delta_map: e
                .delta_map
                .as_ref()
                .map(|maps| maps.iter().map(FieldJson::of).collect()),
            flags: FlagsJson {
                full: e.flags.full,
                complete: e.flags.complete,
                equivariant: e.flags.equivariant,
                linear: e.flags.linear,
            },
            label: e.label.clone(),
            residual_report: Some(serde_json::to_value(&report).expect("report serializes")),
        })
    }
}

/// Morphism file format: index pairs for the two maps, with the source and
/// target carried by path reference.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismJson {
    pub source: String,
    pub target: String,
    pub f: Vec<(usize, usize)>,
    pub g: Vec<(usize, usize)>,
}

impl MorphismJson {
    pub fn index_maps(&self, source_len: usize, corr_len: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        let unpack = |pairs: &[(usize, usize)], len: usize, what: &str| -> Result<Vec<usize>> {
            let mut out = vec![usize::MAX; len];
            for (i, j) in pairs {
                if *i >= len {
                    return Err(YmtError::input(format!("{what} index {i} out of range")));
                }
                out[*i] = *j;
            }
            if out.contains(&usize::MAX) {
                return Err(YmtError::input(format!("{what} map is not total")));
            }
            Ok(out)
        };
        Ok((
            unpack(&self.f, source_len, "f")?,
            unpack(&self.g, corr_len, "g")?,
        ))
    }
}

/// Exact float reconstruction used by the tables.
pub fn exact_rational(x: f64) -> BigRational {
    big(x)
}
