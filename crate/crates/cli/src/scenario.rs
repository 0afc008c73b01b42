//! Scenario configuration files: lattice, algebra, pairing and field blocks
//! shared by the action and extension subcommands.

use std::path::Path;
use serde::Deserialize;

use ymt_core::error::{Result, YmtError};
use ymt_core::fields::{AlgebraCochain1, ConnectionRep, LinkField};
use ymt_core::groups::GaugeGroup;
use ymt_core::io::{FieldJson, LatticeJson, PairingJson};
use ymt_core::theory::YMTTheory;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomFieldJson {
    pub seed: u64,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_representation")]
    pub representation: String,
}

fn default_amplitude() -> f64 {
    0.4
}

fn default_representation() -> String {
    "links".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Random { random: RandomFieldJson },
    Explicit(FieldJson),
}

/// A scenario file: the theory data plus an optional field block and seed.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub lattice: LatticeJson,
    pub algebra: String,
    #[serde(default)]
    pub pairing: Option<PairingJson>,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| YmtError::input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| YmtError::input(format!("bad scenario {}: {e}", path.display())))
    }

    pub fn theory(&self) -> Result<YMTTheory> {
        let lattice = self.lattice.build()?;
        let algebra = ymt_core::lie::catalog(&self.algebra)?;
        let pairing = self
            .pairing
            .clone()
            .unwrap_or_else(PairingJson::killing)
            .build(&lattice, &algebra)?;
        YMTTheory::new(lattice, algebra, pairing, format!("{}-scenario", self.algebra))
    }

    pub fn group(&self) -> Result<GaugeGroup> {
        GaugeGroup::by_name(&self.algebra)
    }

    /// The configured field, or a seeded random one.
    pub fn field(&self, t: &YMTTheory) -> Result<ConnectionRep> {
        match &self.field {
            None => Err(YmtError::input("scenario has no field block")),
            Some(FieldSpec::Explicit(f)) => {
                let built = f.build()?;
                if built.lattice().extents != t.lattice.extents {
                    return Err(YmtError::input("field lattice does not match scenario lattice"));
                }
                Ok(built)
            }
            Some(FieldSpec::Random { random }) => {
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(random.seed);
                match random.representation.as_str() {
                    "links" => {
                        let group = self.group()?;
                        Ok(ConnectionRep::Links(LinkField::random(
                            t.lattice.clone(),
                            group,
                            &mut rng,
                            random.amplitude,
                        )))
                    }
                    "cochain" => Ok(ConnectionRep::Cochain(AlgebraCochain1::random(
                        t.lattice.clone(),
                        t.algebra.clone(),
                        &mut rng,
                        random.amplitude,
                    ))),
                    other => Err(YmtError::input(format!(
                        "unknown field representation '{other}' (links, cochain)"
                    ))),
                }
            }
        }
    }
}

/// Read an extension file.
pub fn load_extension(path: &Path) -> Result<ymt_core::ext::Extension> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| YmtError::input(format!("cannot read {}: {e}", path.display())))?;
    let json: ymt_core::io::ExtensionJson = serde_json::from_str(&text)
        .map_err(|e| YmtError::input(format!("bad extension file {}: {e}", path.display())))?;
    json.build()
}
