//! Run configuration: a single JSON document per run.

use std::collections::BTreeMap;
use std::path::Path;

use majorana_core::expr::{self, Expr};
use majorana_core::linear::{LinearModel, DEFAULT_DELTA};
use majorana_core::model::CouplingSet;
use majorana_core::susy::{
    ExprFamily, HyperbolicFamily, HyperbolicShape, LinearFamily, ShapeInvariantFamily,
};
use majorana_core::{GridSpec, PhysicalParams, ScalarPotential};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Grid used when the config names none and the potential is not linear.
pub const DEFAULT_HALF_WIDTH: f64 = 10.0;
pub const DEFAULT_POINTS: usize = 2001;
/// Linear grids default to `|y| ≤ 12/√w`.
pub const LINEAR_HALF_WIDTH_IN_LENGTHS: f64 = 12.0;
/// Fallback run length for stationary states.
pub const DEFAULT_T_FINAL: f64 = 10.0;

/// Scalar potential `φ(x)`. Hyperbolic amplitudes describe the
/// superpotential `W = mc² + φ`, so `φ` carries an offset of `−mc²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    Constant {
        value: f64,
    },
    Linear {
        k: f64,
    },
    PoschlTeller {
        a: f64,
        alpha: f64,
    },
    RosenMorse {
        a: f64,
        b: f64,
        alpha: f64,
    },
    Scarf {
        a: f64,
        b: f64,
        alpha: f64,
    },
    Expression {
        expr: String,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        parameters: BTreeMap<String, f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        family: Option<FamilyConfig>,
    },
}

/// Shape-invariant family over one of the expression parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub parameter: String,
    pub map: String,
    pub remainder: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            c: 1.0,
            hbar: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    #[serde(default = "one_usize")]
    pub n: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Run length in units of the state's period.
    #[serde(default)]
    pub periods: Option<f64>,
    #[serde(default)]
    pub t_final: Option<f64>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_stride")]
    pub stride: usize,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            n: 1,
            delta: DEFAULT_DELTA,
            periods: None,
            t_final: None,
            dt: None,
            stride: default_stride(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Algebraic versus oracle energies.
    pub spectrum: f64,
    pub isospectral: f64,
    /// Spread of `V₊(a) − V₋(f(a))` over the grid.
    pub shape_invariance: f64,
    pub ladder: f64,
    pub zero_mode: f64,
    pub norm_drift: f64,
    /// PDE versus closed-form components after the run.
    pub pde_component: f64,
    pub coupling: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            spectrum: 1e-3,
            isospectral: 5e-3,
            shape_invariance: 1e-6,
            ladder: 1e-3,
            zero_mode: 1e-4,
            norm_drift: 1e-6,
            pde_component: 1e-3,
            coupling: 1e-12,
        }
    }
}

/// Optional non-scalar couplings; `f2` is always the configured potential.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingsConfig {
    #[serde(default)]
    pub f1: Option<PotentialConfig>,
    #[serde(default)]
    pub f3: Option<PotentialConfig>,
    #[serde(default)]
    pub f4: Option<PotentialConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialConfig,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub shape_invariant: bool,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub evolve: EvolveConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub couplings: CouplingsConfig,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_stride() -> usize {
    majorana_core::evolution::DEFAULT_OUTPUT_STRIDE
}

fn default_n_max() -> usize {
    10
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Rejects anything that would fail later, before any computation runs.
    pub fn validate(&self) -> Result<(), CliError> {
        self.physical_params()?;
        self.grid()?;
        self.scalar_potential()?;
        for f in [&self.couplings.f1, &self.couplings.f3, &self.couplings.f4]
            .into_iter()
            .flatten()
        {
            build_potential(f, &self.physical_params()?)?;
        }
        let e = &self.evolve;
        if !e.delta.is_finite() {
            return Err(CliError::Config("evolve.delta must be finite".into()));
        }
        if e.dt.is_some_and(|dt| !(dt > 0.0 && dt.is_finite())) {
            return Err(CliError::Config("evolve.dt must be positive".into()));
        }
        if e.t_final.is_some_and(|t| !(t >= 0.0 && t.is_finite())) {
            return Err(CliError::Config(
                "evolve.t_final must be non-negative".into(),
            ));
        }
        if e.periods.is_some_and(|p| !(p >= 0.0 && p.is_finite())) {
            return Err(CliError::Config(
                "evolve.periods must be non-negative".into(),
            ));
        }
        if e.stride == 0 {
            return Err(CliError::Config("evolve.stride must be at least 1".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("spectrum", t.spectrum),
            ("isospectral", t.isospectral),
            ("shape_invariance", t.shape_invariance),
            ("ladder", t.ladder),
            ("zero_mode", t.zero_mode),
            ("norm_drift", t.norm_drift),
            ("pde_component", t.pde_component),
            ("coupling", t.coupling),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!(
                    "tolerances.{name} must be a non-negative number"
                )));
            }
        }
        Ok(())
    }

    pub fn physical_params(&self) -> Result<PhysicalParams, CliError> {
        Ok(PhysicalParams::new(
            self.params.mass,
            self.params.c,
            self.params.hbar,
        )?)
    }

    pub fn linear_model(&self) -> Result<Option<LinearModel>, CliError> {
        match self.potential {
            PotentialConfig::Linear { k } => {
                Ok(Some(LinearModel::new(k, self.physical_params()?)?))
            }
            _ => Ok(None),
        }
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        if let Some(g) = self.grid {
            return Ok(GridSpec::new(g.x_min, g.x_max, g.n_points)?);
        }
        match self.linear_model()? {
            Some(m) => Ok(m.grid(LINEAR_HALF_WIDTH_IN_LENGTHS / m.w().sqrt(), DEFAULT_POINTS)?),
            None => Ok(GridSpec::new(
                -DEFAULT_HALF_WIDTH,
                DEFAULT_HALF_WIDTH,
                DEFAULT_POINTS,
            )?),
        }
    }

    pub fn scalar_potential(&self) -> Result<ScalarPotential, CliError> {
        build_potential(&self.potential, &self.physical_params()?)
    }

    pub fn coupling_set(&self) -> Result<CouplingSet, CliError> {
        let p = self.physical_params()?;
        let build = |f: &Option<PotentialConfig>| match f {
            Some(f) => build_potential(f, &p),
            None => Ok(ScalarPotential::zero()),
        };
        Ok(CouplingSet {
            f1: build(&self.couplings.f1)?,
            f2: self.scalar_potential()?,
            f3: build(&self.couplings.f3)?,
            f4: build(&self.couplings.f4)?,
        })
    }

    /// The shape-invariant family behind the potential, if it has one.
    pub fn family(&self) -> Result<Option<Box<dyn ShapeInvariantFamily>>, CliError> {
        let params = self.physical_params()?;
        let hyperbolic = |shape, a, alpha| -> Box<dyn ShapeInvariantFamily> {
            Box::new(HyperbolicFamily {
                shape,
                a,
                alpha,
                params,
            })
        };
        Ok(match &self.potential {
            PotentialConfig::Constant { .. } => None,
            PotentialConfig::Linear { k } => Some(Box::new(LinearFamily { k: *k, params })),
            PotentialConfig::PoschlTeller { a, alpha } => {
                Some(hyperbolic(HyperbolicShape::PoschlTeller, *a, *alpha))
            }
            PotentialConfig::RosenMorse { a, b, alpha } => Some(hyperbolic(
                HyperbolicShape::RosenMorse { b: *b },
                *a,
                *alpha,
            )),
            PotentialConfig::Scarf { a, b, alpha } => {
                Some(hyperbolic(HyperbolicShape::Scarf { b: *b }, *a, *alpha))
            }
            PotentialConfig::Expression {
                expr,
                parameters,
                family: Some(fam),
            } => {
                let initial = *parameters.get(&fam.parameter).ok_or_else(|| {
                    CliError::Config(format!(
                        "family parameter `{}` is not among the expression parameters",
                        fam.parameter
                    ))
                })?;
                let mut names: Vec<&str> = parameters.keys().map(String::as_str).collect();
                names.extend(ExprFamily::reserved_names());
                let fixed = parameters
                    .iter()
                    .filter(|(k, _)| **k != fam.parameter)
                    .map(|(k, v)| (k.clone(), *v))
                    .collect();
                Some(Box::new(ExprFamily {
                    parameter: fam.parameter.clone(),
                    initial,
                    potential: expr::parse_with_params(expr, &names)?,
                    map: expr::parse_with_params(&fam.map, &names)?,
                    remainder: expr::parse_with_params(&fam.remainder, &names)?,
                    fixed,
                    params,
                }))
            }
            PotentialConfig::Expression { family: None, .. } => None,
        })
    }
}

pub fn build_potential(
    cfg: &PotentialConfig,
    p: &PhysicalParams,
) -> Result<ScalarPotential, CliError> {
    let w_offset = -p.rest_energy();
    Ok(match cfg {
        PotentialConfig::Constant { value } => ScalarPotential::constant(*value),
        PotentialConfig::Linear { k } => ScalarPotential::linear(*k),
        PotentialConfig::PoschlTeller { a, alpha } => {
            ScalarPotential::poschl_teller(*a, *alpha).with_offset(w_offset)
        }
        PotentialConfig::RosenMorse { a, b, alpha } => {
            if *a == 0.0 {
                return Err(CliError::Config(
                    "rosen_morse amplitude `a` must be nonzero".into(),
                ));
            }
            ScalarPotential::rosen_morse(*a, *b, *alpha).with_offset(w_offset)
        }
        PotentialConfig::Scarf { a, b, alpha } => {
            ScalarPotential::scarf(*a, *b, *alpha).with_offset(w_offset)
        }
        PotentialConfig::Expression {
            expr, parameters, ..
        } => {
            let names: Vec<&str> = parameters.keys().map(String::as_str).collect();
            let tree: Expr = expr::parse_with_params(expr, &names)?;
            ScalarPotential::custom(
                tree,
                parameters.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            )
        }
    })
}
