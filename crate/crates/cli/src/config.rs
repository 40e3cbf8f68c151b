//! Scenario files: TOML with a fixed set of sections. Unknown keys are
//! rejected so stale fixtures fail loudly.
//!
//! ```toml
//! name = "cone-a"
//! radius = 3
//!
//! [basis]
//! generators = ["a", "b"]
//!
//! [[peripheral]]
//! generators = ["a"]
//! mode = "hyperbolic"
//! inner = "cayley"
//! ```

use std::path::Path;

use floydkit_core::conedoff::{InnerEdges, PeripheralMode};
use floydkit_core::{Basis, PeripheralBlock, PeripheralStructure, ScalingFunction, Subgroup};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: Option<String>,
    pub basis: Option<BasisSection>,
    pub radius: Option<usize>,
    #[serde(default)]
    pub radii: Vec<usize>,
    pub scaling: Option<ScalingSection>,
    #[serde(default)]
    pub peripheral: Vec<PeripheralSection>,
    #[serde(default)]
    pub subgroup: Vec<SubgroupSection>,
    #[serde(default)]
    pub bounds: BoundsSection,
    pub qc: Option<QcSection>,
    pub freeinf: Option<FreeinfSection>,
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BasisSection {
    pub rank: Option<usize>,
    pub generators: Option<Vec<String>>,
    pub factors: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScalingSection {
    /// `geometric` or `polynomial`.
    pub kind: String,
    /// Ratio `μ` for geometric scaling, as `"p/q"`.
    pub ratio: Option<String>,
    /// Exponent `s` for polynomial scaling.
    pub exponent: Option<f64>,
    /// Optional smaller ratio bound `λ`, as `"p/q"`.
    pub lambda: Option<String>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Hyperbolic,
    Parabolic,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum InnerSpec {
    /// `"cayley"` or `"none"`.
    Keyword(String),
    Words(Vec<String>),
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PeripheralSection {
    pub generators: Vec<String>,
    pub mode: Option<ModeName>,
    pub inner: Option<InnerSpec>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SubgroupSection {
    pub name: String,
    pub generators: Vec<String>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub conj_bound: Option<usize>,
    pub word_bound: Option<usize>,
    pub tree_radius: Option<usize>,
    pub ball_cap: Option<usize>,
    pub geodesic_cap: Option<usize>,
    pub arc_budget: Option<u64>,
    pub max_length: Option<usize>,
    pub search_radius: Option<u32>,
    pub base_distance: Option<u32>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QcSection {
    /// Name of a `[[subgroup]]` entry.
    pub subgroup: Option<String>,
    pub grid_sizes: Option<Vec<usize>>,
    pub window: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FreeinfSection {
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub graph: Option<String>,
    pub dot: Option<String>,
    pub report: Option<String>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_ratio(text: &str) -> Result<(u64, u64), CliError> {
    let (n, d) = text
        .split_once('/')
        .ok_or_else(|| config_err(format!("ratio `{text}` must look like p/q")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| config_err(format!("ratio `{text}` must look like p/q")))
    };
    Ok((parse(n)?, parse(d)?))
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_err("radii must be strictly increasing"));
        }
        let b = &self.bounds;
        let caps = [
            b.ball_cap.map(|x| x as u64),
            b.geodesic_cap.map(|x| x as u64),
            b.arc_budget,
            b.word_bound.map(|x| x as u64),
            b.max_length.map(|x| x as u64),
        ];
        if caps.iter().flatten().any(|&c| c == 0) {
            return Err(config_err("caps and bounds must be positive"));
        }
        if let Some(qc) = &self.qc {
            if let Some(name) = &qc.subgroup {
                if !self.subgroup.iter().any(|s| &s.name == name) {
                    return Err(config_err(format!(
                        "qc refers to unknown subgroup `{name}`"
                    )));
                }
            }
            if let Some(sizes) = &qc.grid_sizes {
                if sizes.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(config_err("grid sizes must be strictly increasing"));
                }
            }
        }
        if self.basis.is_some() {
            let basis = self.basis()?;
            for p in &self.peripheral {
                Subgroup::parse(&basis, &p.generators).map_err(|e| config_err(e.to_string()))?;
                if let Some(InnerSpec::Words(ws)) = &p.inner {
                    for w in ws {
                        basis.parse(w).map_err(|e| config_err(e.to_string()))?;
                    }
                }
            }
            for s in &self.subgroup {
                Subgroup::parse(&basis, &s.generators).map_err(|e| config_err(e.to_string()))?;
            }
            self.peripheral_structure(&basis)?;
            self.blocks(&basis)?;
        } else if !self.peripheral.is_empty() || !self.subgroup.is_empty() {
            return Err(config_err(
                "peripheral and subgroup sections need a [basis]",
            ));
        }
        self.scaling()?;
        Ok(())
    }

    pub fn basis(&self) -> Result<Basis, CliError> {
        let section = self
            .basis
            .as_ref()
            .ok_or_else(|| config_err("missing [basis] section"))?;
        let given = [
            section.rank.is_some(),
            section.generators.is_some(),
            section.factors.is_some(),
        ];
        if given.iter().filter(|&&x| x).count() != 1 {
            return Err(config_err(
                "[basis] needs exactly one of rank, generators, factors",
            ));
        }
        let basis = if let Some(r) = section.rank {
            if r == 0 {
                return Err(config_err("rank must be positive"));
            }
            Basis::standard(r)
        } else if let Some(g) = &section.generators {
            Basis::free(g).map_err(|e| config_err(e.to_string()))?
        } else {
            let f = section.factors.as_ref().expect("checked above");
            Basis::free_product(f).map_err(|e| config_err(e.to_string()))?
        };
        if basis.rank() == 0 {
            return Err(config_err("basis is empty"));
        }
        Ok(basis)
    }

    /// Defaults to geometric scaling with ratio 1/2.
    pub fn scaling(&self) -> Result<ScalingFunction, CliError> {
        let Some(s) = &self.scaling else {
            return Ok(ScalingFunction::geometric(1, 2).expect("1/2 is a valid ratio"));
        };
        let f = match s.kind.as_str() {
            "geometric" => {
                let (n, d) = parse_ratio(s.ratio.as_deref().unwrap_or("1/2"))?;
                ScalingFunction::geometric(n, d)
            }
            "polynomial" => ScalingFunction::polynomial(s.exponent.unwrap_or(2.0)),
            other => return Err(config_err(format!("unknown scaling kind `{other}`"))),
        }
        .map_err(|e| config_err(e.to_string()))?;
        match &s.lambda {
            Some(l) => {
                let (n, d) = parse_ratio(l)?;
                f.with_lambda(n, d).map_err(|e| config_err(e.to_string()))
            }
            None => Ok(f),
        }
    }

    pub fn peripheral_structure(&self, basis: &Basis) -> Result<PeripheralStructure, CliError> {
        let subgroups = self
            .peripheral
            .iter()
            .map(|p| Subgroup::parse(basis, &p.generators))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| config_err(e.to_string()))?;
        PeripheralStructure::new(subgroups).map_err(|e| config_err(e.to_string()))
    }

    pub fn blocks(&self, basis: &Basis) -> Result<Vec<PeripheralBlock>, CliError> {
        self.peripheral
            .iter()
            .map(|p| {
                let mode = match p.mode.unwrap_or(ModeName::Hyperbolic) {
                    ModeName::Hyperbolic => PeripheralMode::Hyperbolic,
                    ModeName::Parabolic => PeripheralMode::Parabolic,
                };
                let inner = match &p.inner {
                    None => InnerEdges::Cayley,
                    Some(InnerSpec::Keyword(k)) if k == "cayley" => InnerEdges::Cayley,
                    Some(InnerSpec::Keyword(k)) if k == "none" => InnerEdges::None,
                    Some(InnerSpec::Keyword(k)) => {
                        return Err(config_err(format!("unknown inner edge keyword `{k}`")))
                    }
                    Some(InnerSpec::Words(ws)) => InnerEdges::Words(
                        ws.iter()
                            .map(|w| basis.parse(w))
                            .collect::<Result<_, _>>()
                            .map_err(|e| config_err(e.to_string()))?,
                    ),
                };
                Ok(PeripheralBlock { mode, inner })
            })
            .collect()
    }

    pub fn subgroup_named(&self, basis: &Basis, name: &str) -> Result<Subgroup, CliError> {
        let s = self
            .subgroup
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| config_err(format!("no subgroup named `{name}`")))?;
        Subgroup::parse(basis, &s.generators).map_err(|e| config_err(e.to_string()))
    }
}
