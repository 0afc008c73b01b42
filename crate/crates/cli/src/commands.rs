//! Subcommand definitions and dispatch.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use ymt_core::cat;
use ymt_core::error::{Result, YmtError};
use ymt_core::ext::constructors;
use ymt_core::ext::domain::SampledDomain;
use ymt_core::ext::higgs::CoherentEmbedding;
use ymt_core::ext::{self, check_extension};
use ymt_core::fields::{AlgebraCochain1, ConnectionRep, LinkField, VertexSection};
use ymt_core::groups::{GaugeGroup, GroupEmbedding};
use ymt_core::io::{ExtensionJson, FieldJson, MorphismJson};
use ymt_core::pairing::{enumerate_low_rank, fiber_rank, rank_upper_bound, RankQuery};
use ymt_core::scalar::{invariance_roots, scalar_poly, RootSet, ScalarPolynomial};
use ymt_core::theory;

use crate::output::{Emitter, Format, Table};
use crate::scenario::{load_extension, Scenario};

#[derive(Parser)]
#[command(
    name = "ymt",
    version,
    about = "Workbench for gauge actions with arbitrary curvature pairings and their extensions"
)]
pub struct Cli {
    /// Seed recorded in and controlling every randomized computation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Rank arithmetic for the space of linear theories.
    Rank {
        #[command(subcommand)]
        cmd: RankCmd,
    },
    /// Lie algebra computations.
    Algebra {
        #[command(subcommand)]
        cmd: AlgebraCmd,
    },
    /// Lattice field generation and curvature.
    Field {
        #[command(subcommand)]
        cmd: FieldCmd,
    },
    /// Action functionals.
    Action {
        #[command(subcommand)]
        cmd: ActionCmd,
    },
    /// Extension constructors and operations.
    Ext {
        #[command(subcommand)]
        cmd: ExtCmd,
    },
    /// The category of extensions.
    Cat {
        #[command(subcommand)]
        cmd: CatCmd,
    },
}

#[derive(Subcommand)]
pub enum RankCmd {
    /// Upper bound on the rank for base dimension n and group dimension l.
    Bound {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        l: u64,
        /// Connectivity of the base (strict bound).
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = false)]
        contractible: bool,
        #[arg(long, default_value_t = false)]
        parallelizable_abelian: bool,
    },
    /// All (n, l) whose minimal rank stays within z.
    Enumerate {
        #[arg(long)]
        z: u64,
        #[arg(long, default_value_t = 12)]
        max_n: u64,
        #[arg(long, default_value_t = 12)]
        max_l: u64,
    },
}

#[derive(Subcommand)]
pub enum AlgebraCmd {
    /// Killing form of a catalog algebra or a structure-constant file.
    Killing {
        #[arg(long, conflicts_with = "spec")]
        algebra: Option<String>,
        /// JSON file with `{"name", "dim", "c": [[i,j,k,value], ...]}`.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Basis of the ad-invariant bilinear forms.
    InvariantBasis {
        #[arg(long, conflicts_with = "spec")]
        algebra: Option<String>,
        #[arg(long)]
        spec: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
pub enum FieldCmd {
    /// Seeded random field over a fresh lattice.
    Random {
        /// Lattice extents, e.g. 4x4 or 2x2x2x2.
        #[arg(long)]
        extents: String,
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 0.4)]
        amplitude: f64,
        #[arg(long, default_value = "links")]
        representation: String,
    },
    /// Field strength of a stored field.
    Curvature {
        #[arg(long, visible_alias = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
pub enum ActionCmd {
    /// Evaluate the action of the scenario field.
    Eval {
        #[arg(long)]
        config: PathBuf,
    },
    /// Randomized gauge-invariance sweep.
    GaugeCheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// BF pairing of the scenario field with a second 2-form field.
    Bf {
        #[arg(long)]
        config: PathBuf,
        /// Pair the curvature with itself (B = F) instead of a random B.
        #[arg(long, default_value_t = false)]
        diagonal: bool,
        #[arg(long, default_value_t = 0.4)]
        b_amplitude: f64,
    },
    /// Topological term of the scenario field (4d, algebra representation).
    Topological {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
pub struct DomainArgs {
    /// Number of random seed configurations before orbit closure.
    #[arg(long, default_value_t = 4)]
    domain_seeds: usize,
    #[arg(long, default_value_t = 0.4)]
    domain_amplitude: f64,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum ExtCmd {
    /// Null extension over a sampled link domain.
    MakeNull {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Identity extension of a gauge-invariant scenario.
    MakeIdentity {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Constant extension with value c and the zero reference connection.
    MakeConstant {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Equivariant-choice extension along a scaling retract.
    MakeRetract {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        scale: f64,
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// BF extension on the curvature graph (4d scenario).
    MakeBf {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 2)]
        off_graph: usize,
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Higgs extension for the rotation pair (so3 scenario).
    MakeHiggs {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 2)]
        conn_seeds: usize,
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Higgs-vacuum reduction onto so2 (so2 scenario over so3 fields).
    MakeHiggsVacuum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 4)]
        generic_seeds: usize,
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Background-coupled extension.
    MakeBackground {
        #[arg(long)]
        config: PathBuf,
        /// Coupling: "zero", "constant:`<c>`" or "scaled-action:`<factor>`".
        #[arg(long, default_value = "scaled-action:0.25")]
        coupling: String,
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Complete extension induced by a rescaling emergence.
    MakeEmergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        rescale: f64,
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Pointwise sum of two stored extensions.
    Sum {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Act with a group element through an additive action on the reals.
    Act {
        #[arg(long, visible_alias = "in")]
        input: PathBuf,
        /// "trivial:`<order>`", "sign-z2" or "sign-zn:`<order>`".
        #[arg(long, default_value = "sign-z2")]
        action: String,
        #[arg(long)]
        element: usize,
    },
    /// Apply a group-ring element with rational coefficients.
    Module {
        #[arg(long, visible_alias = "in")]
        input: PathBuf,
        #[arg(long, default_value = "sign-z2")]
        action: String,
        /// Comma-separated "element:num/den" coefficients.
        #[arg(long)]
        coeffs: String,
    },
    /// Restrict to the orbit closure of selected configurations.
    Restrict {
        #[arg(long, visible_alias = "in")]
        input: PathBuf,
        /// Comma-separated configuration indices to keep (orbit-closed).
        #[arg(long)]
        keep: String,
    },
    /// Verify a stored extension.
    Check {
        #[arg(long, visible_alias = "in")]
        input: PathBuf,
    },
    /// Coefficients of the scalar-invariance polynomial for the scenario
    /// field.
    ScalarPoly {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Built-in abelian demonstration with roots 0 and 1.
        #[arg(long, default_value_t = false)]
        abelian_demo: bool,
    },
    /// Real roots of the scalar-invariance polynomial.
    Roots {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        c: f64,
    },
}

#[derive(Subcommand)]
pub enum CatCmd {
    /// Compose two stored morphisms (first m1, then m2).
    Compose {
        #[arg(long)]
        m1: PathBuf,
        #[arg(long)]
        m2: PathBuf,
    },
    /// Classify a stored morphism.
    Classify {
        #[arg(long)]
        morphism: PathBuf,
    },
    /// The identity-to-BF isomorphism witness (4d scenario).
    BfIso {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Terminality of the null extension over a candidate list.
    Terminal {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated candidates: identity, retract, null, constant:`<c>`.
        #[arg(long, default_value = "identity,retract,null")]
        candidates: String,
        #[command(flatten)]
        domain: DomainArgs,
    },
}

fn parse_extents(s: &str) -> Result<Vec<usize>> {
    s.split('x')
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| YmtError::input(format!("bad extent '{p}' in '{s}'")))
        })
        .collect()
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

pub fn run(cli: Cli) -> Result<()> {
    let emitter = Emitter {
        format: cli.format,
        out: cli.out.clone(),
        seed: cli.seed,
        command: command_line(),
    };
    match cli.command {
        Command::Rank { cmd } => run_rank(cmd, &emitter),
        Command::Algebra { cmd } => run_algebra(cmd, &emitter),
        Command::Field { cmd } => run_field(cmd, &emitter, cli.seed),
        Command::Action { cmd } => run_action(cmd, &emitter, cli.seed),
        Command::Ext { cmd } => run_ext(cmd, &emitter, cli.seed),
        Command::Cat { cmd } => run_cat(cmd, &emitter, cli.seed),
    }
}

fn run_rank(cmd: RankCmd, emitter: &Emitter) -> Result<()> {
    match cmd {
        RankCmd::Bound { n, l, q, contractible, parallelizable_abelian } => {
            let bound = rank_upper_bound(&RankQuery { n, l, q, contractible, parallelizable_abelian })?;
            let result = json!({
                "n": n,
                "l": l,
                "fiber_rank": fiber_rank(n, l),
                "bound": { "numer": bound.numer, "denom": bound.denom, "value": bound.as_f64() },
                "strict": bound.strict,
                "equality": bound.equality,
            });
            emitter.emit(&result, None)
        }
        RankCmd::Enumerate { z, max_n, max_l } => {
            let pairs = enumerate_low_rank(z, max_n, max_l)?;
            let rows: Vec<Vec<String>> = pairs
                .iter()
                .map(|(n, l)| {
                    vec![n.to_string(), l.to_string(), (fiber_rank(*n, *l) + 1).to_string()]
                })
                .collect();
            let result: Vec<_> = pairs
                .iter()
                .map(|(n, l)| json!({"n": n, "l": l, "rank_bound": fiber_rank(*n, *l) + 1}))
                .collect();
            emitter.emit(
                &result,
                Some(Table {
                    header: vec!["n".into(), "l".into(), "rank_bound".into()],
                    rows,
                }),
            )
        }
    }
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn resolve_algebra(
    name: &Option<String>,
    spec: &Option<PathBuf>,
) -> Result<Arc<ymt_core::lie::LieAlgebra>> {
    match (name, spec) {
        (Some(n), None) => ymt_core::lie::catalog(n),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| YmtError::input(format!("cannot read {}: {e}", path.display())))?;
            let spec: ymt_core::lie::AlgebraSpec = serde_json::from_str(&text)
                .map_err(|e| YmtError::input(format!("bad algebra spec: {e}")))?;
            Ok(Arc::new(ymt_core::lie::LieAlgebra::from_spec(&spec)?))
        }
        _ => Err(YmtError::input("provide exactly one of --algebra or --spec")),
    }
}

fn run_algebra(cmd: AlgebraCmd, emitter: &Emitter) -> Result<()> {
    match cmd {
        AlgebraCmd::Killing { algebra, spec } => {
            let alg = resolve_algebra(&algebra, &spec)?;
            let k = alg.killing_form();
            let result = json!({
                "algebra": alg.name,
                "dim": alg.dim,
                "killing": matrix_rows(&k.matrix),
                "ad_invariance_residual": k.ad_invariance_residual(&alg),
            });
            emitter.emit(&result, None)
        }
        AlgebraCmd::InvariantBasis { algebra, spec } => {
            let alg = resolve_algebra(&algebra, &spec)?;
            let basis = alg.invariant_form_basis();
            let forms: Vec<Vec<Vec<f64>>> = basis.iter().map(|b| matrix_rows(&b.matrix)).collect();
            let result = json!({
                "algebra": alg.name,
                "dim": alg.dim,
                "invariant_dimension": basis.len(),
                "forms": forms,
            });
            emitter.emit(&result, None)
        }
    }
}

fn run_field(cmd: FieldCmd, emitter: &Emitter, seed: u64) -> Result<()> {
    use rand::SeedableRng;
    match cmd {
        FieldCmd::Random { extents, algebra, amplitude, representation } => {
            let lattice = ymt_core::fields::Lattice::new(parse_extents(&extents)?)?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let field = match representation.as_str() {
                "links" => ConnectionRep::Links(LinkField::random(
                    lattice,
                    GaugeGroup::by_name(&algebra)?,
                    &mut rng,
                    amplitude,
                )),
                "cochain" => ConnectionRep::Cochain(AlgebraCochain1::random(
                    lattice,
                    ymt_core::lie::catalog(&algebra)?,
                    &mut rng,
                    amplitude,
                )),
                other => return Err(YmtError::input(format!("unknown representation '{other}'"))),
            };
            emitter.emit(&FieldJson::of(&field), None)
        }
        FieldCmd::Curvature { input } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| YmtError::input(format!("cannot read {}: {e}", input.display())))?;
            let json: FieldJson = serde_json::from_str(&text)
                .map_err(|e| YmtError::input(format!("bad field file: {e}")))?;
            let field = json.build()?;
            let f = theory::field_strength(&field)?;
            let lat = &f.lattice;
            let plaquettes: Vec<_> = f
                .values
                .iter()
                .enumerate()
                .map(|(p, v)| {
                    let (base, mu, nu) = lat.plaquette_of(p);
                    json!({"plaquette": p, "vertex": base, "plane": [mu, nu],
                           "coords": v.iter().copied().collect::<Vec<f64>>()})
                })
                .collect();
            emitter.emit(&json!({"plaquettes": plaquettes}), None)
        }
    }
}

#[derive(Serialize)]
struct ValueResult {
    value: f64,
    residuals: serde_json::Value,
    seed: u64,
}

fn run_action(cmd: ActionCmd, emitter: &Emitter, seed: u64) -> Result<()> {
    match cmd {
        ActionCmd::Eval { config } => {
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            let field = sc.field(&t)?;
            let value = theory::ymt_action(&t, &field)?;
            emitter.emit(
                &ValueResult { value, residuals: json!({}), seed: sc.seed.unwrap_or(seed) },
                None,
            )
        }
        ActionCmd::GaugeCheck { config, trials } => {
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            let field = sc.field(&t)?;
            let links = match field {
                ConnectionRep::Links(u) => u,
                ConnectionRep::Cochain(_) => {
                    return Err(YmtError::input(
                        "gauge check needs a link-field scenario (representation = links)",
                    ))
                }
            };
            let report = theory::gauge_invariance_report(&t, &links, trials, seed)?;
            emitter.emit(&report, None)
        }
        ActionCmd::Bf { config, diagonal, b_amplitude } => {
            use rand::SeedableRng;
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            let field = sc.field(&t)?;
            let b = if diagonal {
                theory::field_strength(&field)?
            } else {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                ymt_core::fields::AlgebraCochain2::random(
                    t.lattice.clone(),
                    t.algebra.clone(),
                    &mut rng,
                    b_amplitude,
                )
            };
            let value = theory::bf_action(&t, &field, &b)?;
            let matches_action = if diagonal {
                let direct = theory::ymt_action(&t, &field)?;
                json!({"action": direct, "difference": (value - direct).abs()})
            } else {
                json!({})
            };
            emitter.emit(&ValueResult { value, residuals: matches_action, seed }, None)
        }
        ActionCmd::Topological { config } => {
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            let field = sc.field(&t)?;
            let d = match field {
                ConnectionRep::Cochain(d) => d,
                ConnectionRep::Links(_) => {
                    return Err(YmtError::input(
                        "topological term needs the algebra representation (cochain)",
                    ))
                }
            };
            let top = theory::topological_term(&t, &d)?;
            let quadratic = theory::ymt_action(&t, &ConnectionRep::Cochain(d.clone()))?;
            let result = json!({
                "topological": top,
                "action": quadratic,
                "full": quadratic + top,
                "seed": seed,
            });
            emitter.emit(&result, None)
        }
    }
}

fn emit_extension(e: &ext::Extension, emitter: &Emitter) -> Result<()> {
    let json = ExtensionJson::of(e)?;
    emitter.emit(&json, None)
}

fn parse_action(spec: &str) -> Result<ymt_core::group_ring::RealAction> {
    use ymt_core::group_ring::RealAction;
    if spec == "sign-z2" {
        return Ok(RealAction::sign_z2());
    }
    if let Some(rest) = spec.strip_prefix("trivial:") {
        let order: usize =
            rest.parse().map_err(|_| YmtError::input(format!("bad order '{rest}'")))?;
        return RealAction::trivial(order);
    }
    if let Some(rest) = spec.strip_prefix("sign-zn:") {
        let order: usize =
            rest.parse().map_err(|_| YmtError::input(format!("bad order '{rest}'")))?;
        return RealAction::sign_zn(order);
    }
    Err(YmtError::input(format!(
        "unknown action '{spec}' (trivial:<n>, sign-z2, sign-zn:<n>)"
    )))
}

fn run_ext(cmd: ExtCmd, emitter: &Emitter, seed: u64) -> Result<()> {
    match cmd {
        ExtCmd::MakeNull { config, domain } => {
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            let dom = constructors::links_domain(
                &t.lattice,
                &sc.group()?,
                domain.domain_seeds,
                domain.domain_amplitude,
                seed,
            )?;
            let emb = GroupEmbedding::identity(sc.group()?);
            emit_extension(&constructors::make_null(&t, &emb, &dom)?, emitter)
        }
        ExtCmd::MakeIdentity { config, domain } => {
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            let dom = constructors::links_domain(
                &t.lattice,
                &sc.group()?,
                domain.domain_seeds,
                domain.domain_amplitude,
                seed,
            )?;
            emit_extension(&constructors::make_identity(&t, &dom)?, emitter)
        }
        ExtCmd::MakeConstant { config, c, domain } => {
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            let dom = constructors::links_domain(
                &t.lattice,
                &sc.group()?,
                domain.domain_seeds,
                domain.domain_amplitude,
                seed,
            )?;
            let emb = GroupEmbedding::identity(sc.group()?);
            let zero = ConnectionRep::Cochain(AlgebraCochain1::zeros(
                t.lattice.clone(),
                t.algebra.clone(),
            ));
            emit_extension(&constructors::make_constant(&t, &emb, &dom, c, &zero)?, emitter)
        }
        ExtCmd::MakeRetract { config, scale, domain } => {
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            let (dom, r) = constructors::retract_domain(
                &t.lattice,
                &sc.group()?,
                domain.domain_seeds,
                scale,
                domain.domain_amplitude,
                seed,
            )?;
            emit_extension(&constructors::make_retract(&t, &dom, &r)?, emitter)
        }
        ExtCmd::MakeBf { config, off_graph, domain } => {
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            let dom = constructors::bf_graph_domain(
                &t.lattice,
                &sc.group()?,
                domain.domain_seeds,
                off_graph,
                domain.domain_amplitude,
                seed,
            )?;
            emit_extension(&constructors::make_bf(&t, &dom)?, emitter)
        }
        ExtCmd::MakeHiggs { config, conn_seeds, domain } => {
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            if t.algebra.name != "so3" {
                return Err(YmtError::input(
                    "the shipped Higgs construction works over the so3 scenario",
                ));
            }
            let coherent = CoherentEmbedding::so2_in_so3();
            let dom = constructors::higgs_domain(
                &t.lattice,
                &coherent,
                domain.domain_seeds,
                conn_seeds,
                domain.domain_amplitude,
                seed,
            )?;
            let potential: constructors::HiggsPotential =
                Arc::new(|phi: &VertexSection| phi.values.iter().map(|v| v.norm_squared() - 1.0).sum());
            emit_extension(
                &constructors::make_higgs(&t, &coherent, potential, &dom, seed)?,
                emitter,
            )
        }
        ExtCmd::MakeHiggsVacuum { config, generic_seeds, domain } => {
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            if t.algebra.name != "so2" {
                return Err(YmtError::input(
                    "the shipped Higgs-vacuum reduction targets the so2 base scenario",
                ));
            }
            let emb = GroupEmbedding::so2_in_so3();
            let dom = constructors::vacuum_domain(
                &t.lattice,
                &emb,
                domain.domain_seeds,
                generic_seeds,
                domain.domain_amplitude,
                seed,
            )?;
            let phi0 = VertexSection::constant(
                t.lattice.clone(),
                ymt_core::lie::so3(),
                nalgebra::DVector::from_vec(vec![0.0, 0.0, 1.0]),
            );
            emit_extension(
                &constructors::make_higgs_vacuum(&t, &emb, &phi0, None, &dom)?,
                emitter,
            )
        }
        ExtCmd::MakeBackground { config, coupling, domain } => {
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            let dom = constructors::links_domain(
                &t.lattice,
                &sc.group()?,
                domain.domain_seeds,
                domain.domain_amplitude,
                seed,
            )?;
            let coupling = parse_coupling(&coupling, &t)?;
            emit_extension(&constructors::make_background(&t, coupling, &dom)?, emitter)
        }
        ExtCmd::MakeEmergence { config, rescale, domain } => {
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            let (w, _) = theory::wrap_parameterized(&t, vec!["eps".into()])?;
            let base_dom = constructors::cochain_domain(
                &t.lattice,
                &sc.group()?,
                domain.domain_seeds,
                domain.domain_amplitude,
                seed,
            )?;
            // Rescaled copy of the domain with the matching theory.
            let seeds: Vec<_> = base_dom
                .configs
                .iter()
                .zip(&base_dom.connection)
                .map(|(c, tag)| match c.connection() {
                    ConnectionRep::Cochain(d) => (
                        ymt_core::ext::domain::Config::Conn(ConnectionRep::Cochain(
                            d.scale(rescale),
                        )),
                        *tag,
                    ),
                    _ => unreachable!("cochain domain"),
                })
                .collect();
            let dom2 = SampledDomain::closure(
                seeds,
                base_dom.zero_index,
                base_dom.generators.clone(),
                8192,
            )?;
            let t2 = t.clone();
            let s2 = theory::ParameterizedTheory {
                base: t.clone(),
                parameters: vec!["eta".into()],
                functional: Arc::new(move |_, d| match d {
                    ConnectionRep::Cochain(c) => theory::ymt_action(
                        &t2,
                        &ConnectionRep::Cochain(c.scale(1.0 / rescale)),
                    ),
                    _ => Err(YmtError::input("cochain expected")),
                }),
            };
            let e = constructors::emergence_to_extension(
                &w,
                &s2,
                &|_| "eta".into(),
                &|d| match d {
                    ConnectionRep::Cochain(c) => {
                        Ok(ConnectionRep::Cochain(c.scale(1.0 / rescale)))
                    }
                    _ => Err(YmtError::input("cochain expected")),
                },
                &dom2,
            )?;
            emit_extension(&e, emitter)
        }
        ExtCmd::Sum { a, b } => {
            let ea = load_extension(&a)?;
            let eb = load_extension(&b)?;
            emit_extension(&ext::sum(&ea, &eb)?, emitter)
        }
        ExtCmd::Act { input, action, element } => {
            let e = load_extension(&input)?;
            let action = parse_action(&action)?;
            emit_extension(&ext::act(&action, element, &e)?, emitter)
        }
        ExtCmd::Module { input, action, coeffs } => {
            let e = load_extension(&input)?;
            let action = parse_action(&action)?;
            let group = action.group();
            let mut parsed = Vec::new();
            for part in coeffs.split(',') {
                let (g, q) = part
                    .split_once(':')
                    .ok_or_else(|| YmtError::input(format!("bad coefficient '{part}'")))?;
                let g: usize =
                    g.parse().map_err(|_| YmtError::input(format!("bad element '{g}'")))?;
                let (n, d) = q
                    .split_once('/')
                    .ok_or_else(|| YmtError::input(format!("coefficient '{q}' must be num/den")))?;
                let n: i64 = n.parse().map_err(|_| YmtError::input("bad numerator"))?;
                let d: i64 = d.parse().map_err(|_| YmtError::input("bad denominator"))?;
                parsed.push((g, n, d));
            }
            let x = ymt_core::group_ring::GroupRingElement::from_i64(group, &parsed)?;
            emit_extension(&ext::module_scalar(&x, &action, &e)?, emitter)
        }
        ExtCmd::Restrict { input, keep } => {
            let e = load_extension(&input)?;
            let mut indices = Vec::new();
            for part in keep.split(',') {
                let i: usize = part
                    .trim()
                    .parse()
                    .map_err(|_| YmtError::input(format!("bad index '{part}'")))?;
                if i >= e.extended.len() {
                    return Err(YmtError::input(format!("index {i} out of range")));
                }
                indices.push(i);
            }
            if !indices.contains(&e.extended.zero_index) {
                indices.push(e.extended.zero_index);
            }
            let seeds: Vec<_> = indices
                .iter()
                .map(|&i| (e.extended.configs[i].clone(), e.extended.connection[i]))
                .collect();
            let zero_pos = indices
                .iter()
                .position(|&i| i == e.extended.zero_index)
                .expect("zero appended above");
            let sub =
                SampledDomain::closure(seeds, zero_pos, e.extended.generators.clone(), 8192)?;
            emit_extension(&ext::restrict(&e, &sub)?, emitter)
        }
        ExtCmd::Check { input } => {
            let e = load_extension(&input)?;
            let report = check_extension(&e)?;
            emitter.emit(&report, None)?;
            if !report.ok {
                return Err(YmtError::Verification("extension fails verification".into()));
            }
            Ok(())
        }
        ExtCmd::ScalarPoly { config, abelian_demo } => {
            let (t, field) = if abelian_demo {
                use rand::SeedableRng;
                let lattice = ymt_core::fields::Lattice::new(vec![4, 4])?;
                let algebra = ymt_core::lie::u1();
                let t = theory::YMTTheory::euclidean(lattice.clone(), algebra.clone(), "abelian-demo");
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let d = AlgebraCochain1::random(lattice, algebra, &mut rng, 0.5);
                (t, ConnectionRep::Cochain(d))
            } else {
                let path = config.ok_or_else(|| {
                    YmtError::input("scalar-poly needs --config or --abelian-demo")
                })?;
                let sc = Scenario::load(&path)?;
                let t = sc.theory()?;
                let field = sc.field(&t)?;
                (t, field)
            };
            let p = scalar_poly(&t, &field)?;
            let roots = invariance_roots(&p);
            emitter.emit(&json!({"coefficients": p, "roots": root_json(&roots), "seed": seed}), None)
        }
        ExtCmd::Roots { a, b, c } => {
            let p = ScalarPolynomial { a, b, c };
            let roots = invariance_roots(&p);
            emitter.emit(&json!({"coefficients": p, "roots": root_json(&roots)}), None)
        }
    }
}

fn root_json(r: &RootSet) -> serde_json::Value {
    match r {
        RootSet::AllReals => json!({"all_reals": true}),
        RootSet::Finite(roots) => json!({"all_reals": false, "values": roots}),
    }
}

fn parse_coupling(spec: &str, t: &theory::YMTTheory) -> Result<constructors::BackgroundCoupling> {
    if spec == "zero" {
        return Ok(Arc::new(|_| Ok(0.0)));
    }
    if let Some(rest) = spec.strip_prefix("constant:") {
        let c: f64 = rest.parse().map_err(|_| YmtError::input(format!("bad constant '{rest}'")))?;
        return Ok(Arc::new(move |_| Ok(c)));
    }
    if let Some(rest) = spec.strip_prefix("scaled-action:") {
        let s: f64 = rest.parse().map_err(|_| YmtError::input(format!("bad factor '{rest}'")))?;
        let theory = t.clone();
        return Ok(Arc::new(move |d| theory::ymt_action(&theory, d).map(|v| s * v)));
    }
    Err(YmtError::input(format!(
        "unknown coupling '{spec}' (zero, constant:<c>, scaled-action:<s>)"
    )))
}

fn load_morphism(path: &std::path::Path) -> Result<(MorphismJson, cat::ExtMorphism)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| YmtError::input(format!("cannot read {}: {e}", path.display())))?;
    let json: MorphismJson = serde_json::from_str(&text)
        .map_err(|e| YmtError::input(format!("bad morphism file: {e}")))?;
    let base = path.parent().unwrap_or_else(|| std::path::Path::new("."));
    let source = load_extension(&base.join(&json.source))?;
    let target = load_extension(&base.join(&json.target))?;
    let (f, g) = json.index_maps(source.extended.len(), source.correction.len())?;
    let m = cat::ExtMorphism { source, target, f, g };
    Ok((json, m))
}

fn run_cat(cmd: CatCmd, emitter: &Emitter, seed: u64) -> Result<()> {
    match cmd {
        CatCmd::Compose { m1, m2 } => {
            let (_, ma) = load_morphism(&m1)?;
            let (_, mb) = load_morphism(&m2)?;
            let composed = cat::compose(&mb, &ma)?;
            let report = composed.validate()?;
            let result = json!({
                "f": composed.f,
                "g": composed.g,
                "report": report,
                "classification": cat::classify(&composed),
            });
            emitter.emit(&result, None)
        }
        CatCmd::Classify { morphism } => {
            let (_, m) = load_morphism(&morphism)?;
            let report = m.validate()?;
            if !report.ok {
                emitter.emit(&json!({"report": report}), None)?;
                return Err(YmtError::Verification("morphism fails its diagrams".into()));
            }
            let result = json!({
                "classification": cat::classify(&m),
                "report": report,
                "probe": cat::embedding_probe(&m)?,
            });
            emitter.emit(&result, None)
        }
        CatCmd::BfIso { config, domain } => {
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            let dom = constructors::cochain_domain(
                &t.lattice,
                &sc.group()?,
                domain.domain_seeds,
                domain.domain_amplitude,
                seed,
            )?;
            let m = cat::bf_identity_iso(&t, &dom)?;
            let inv = cat::inverse(&m)?;
            let result = json!({
                "classification": cat::classify(&m),
                "report": m.validate()?,
                "inverse_ok": inv.validate()?.ok,
                "probe": cat::embedding_probe(&m)?,
            });
            emitter.emit(&result, None)
        }
        CatCmd::Terminal { config, candidates, domain } => {
            let sc = Scenario::load(&config)?;
            let t = sc.theory()?;
            let group = sc.group()?;
            let dom = constructors::cochain_domain(
                &t.lattice,
                &group,
                domain.domain_seeds,
                domain.domain_amplitude,
                seed,
            )?;
            let emb = GroupEmbedding::identity(group.clone());
            let mut list = Vec::new();
            for name in candidates.split(',') {
                let name = name.trim();
                if name == "identity" {
                    list.push(constructors::make_identity(&t, &dom)?);
                } else if name == "null" {
                    list.push(constructors::make_null(&t, &emb, &dom)?);
                } else if name == "retract" {
                    let (rdom, rmap) = constructors::retract_domain(
                        &t.lattice,
                        &group,
                        domain.domain_seeds,
                        0.5,
                        domain.domain_amplitude,
                        seed + 1,
                    )?;
                    list.push(constructors::make_retract(&t, &rdom, &rmap)?);
                } else if let Some(rest) = name.strip_prefix("constant:") {
                    let c: f64 =
                        rest.parse().map_err(|_| YmtError::input(format!("bad constant '{rest}'")))?;
                    let zero = ConnectionRep::Cochain(AlgebraCochain1::zeros(
                        t.lattice.clone(),
                        t.algebra.clone(),
                    ));
                    list.push(constructors::make_constant(&t, &emb, &dom, c, &zero)?);
                } else {
                    return Err(YmtError::input(format!(
                        "unknown candidate '{name}' (identity, retract, null, constant:<c>)"
                    )));
                }
            }
            let template = constructors::make_identity(&t, &dom)?;
            let nullext = cat::null_point(&t, &template)?;
            let report = cat::terminal_check(&list, &nullext)?;
            emitter.emit(&report, None)
        }
    }
}
