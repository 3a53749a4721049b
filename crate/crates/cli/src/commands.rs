//! Subcommand drivers. Each returns whether every tolerance check passed;
//! hard failures come back as [`CliError`].

use std::path::PathBuf;

use majorana_core::evolution::{
    analytic_trace, assemble_state, default_dt, density_period, evolve_pde_with_stride,
    first_return_time, linear_state, stationarity_metric, EvolutionTrace, MajoranaSpinorState,
    StepPlan,
};
use majorana_core::linear::{spectrum_linear, LinearModel};
use majorana_core::model::{inner_product, majorana_compatible, CompatibilityReport};
use majorana_core::oracle::{
    eigensolve, energy_from_lambda, verify_isospectral, Eigenpair, SpectralPairing,
};
use majorana_core::susy::{
    apply_a, apply_a_dagger, check_shape_invariance_at, partner_potentials,
    spectrum_shape_invariant, supported_levels, zero_mode, PartnerPotentials, SusyClassification,
};
use majorana_core::{
    Error as CoreError, GridFunction, GridSpec, PhysicalParams, ScalarPotential, Sector,
};
use serde::Serialize;

use crate::config::{ParamsConfig, PotentialConfig, RunConfig, DEFAULT_T_FINAL};
use crate::error::CliError;
use crate::output;

/// Levels compared by the ladder-mapping check.
pub const LADDER_LEVELS: usize = 5;
/// Samples per period when checking the norm of the assembled state.
pub const ASSEMBLY_SAMPLES: usize = 200;
/// Quadrature-level drift allowed for the assembled state.
pub const ASSEMBLY_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: PathBuf,
    /// Replaces the headline tolerance of the command.
    pub tol: Option<f64>,
    pub pde: bool,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub artifacts: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
enum SectorName {
    Minus,
    Plus,
}

impl From<Sector> for SectorName {
    fn from(s: Sector) -> Self {
        match s {
            Sector::Minus => Self::Minus,
            Sector::Plus => Self::Plus,
        }
    }
}

/// The lowest eigenvalue of the 3-point operator can sit `O((cħh)²)` below zero.
fn lambda_floor(p: &PhysicalParams, grid: &GridSpec) -> f64 {
    let s = p.c_hbar() * grid.spacing();
    s * s
}

fn oracle_pairs(
    partners: &PartnerPotentials,
    sector: Sector,
    count: usize,
) -> Result<Vec<Eigenpair>, CliError> {
    let op = partners.operator(sector)?;
    Ok(eigensolve(&op, count.min(op.dim()))?)
}

fn oracle_energy(pair: &Eigenpair, p: &PhysicalParams, grid: &GridSpec) -> Result<f64, CliError> {
    Ok(energy_from_lambda(pair.lambda, lambda_floor(p, grid))?)
}

fn pairing(classification: &SusyClassification) -> SpectralPairing {
    match classification.sector() {
        Some(Sector::Minus) => SpectralPairing::UnbrokenMinus,
        Some(Sector::Plus) => SpectralPairing::UnbrokenPlus,
        None => SpectralPairing::Broken,
    }
}

// ---------------------------------------------------------------- spectrum

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumLevel {
    pub n: usize,
    pub energy_algebraic: Option<f64>,
    pub energy_oracle: f64,
    pub abs_diff: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct SpectrumReport<'a> {
    potential: &'a PotentialConfig,
    params: ParamsConfig,
    levels: Vec<SpectrumLevel>,
}

/// Algebraic energies of the shape-invariant family, after checking that the
/// family really is shape invariant on the configured grid. Only the levels
/// the family supports are returned; hyperbolic families have finitely many.
fn algebraic_spectrum(
    cfg: &RunConfig,
    classification: &SusyClassification,
    grid: &GridSpec,
) -> Result<Vec<f64>, CliError> {
    if matches!(classification, SusyClassification::Broken) {
        return Err(CliError::Physics(
            "supersymmetry is broken (no normalizable zero mode), so the shape-invariant spectrum does not apply".into(),
        ));
    }
    let family = cfg.family()?.ok_or_else(|| {
        CliError::Config("shape_invariant is set but the potential defines no family".into())
    })?;
    let linear = cfg.linear_model()?;
    let levels = match linear {
        Some(_) => cfg.n_max + 1,
        None if classification.sector() == Some(Sector::Plus) => {
            return Err(CoreError::WrongSector {
                parameter: family.initial_parameter(),
            }
            .into())
        }
        None => supported_levels(family.as_ref(), grid, cfg.n_max)?,
    };
    let tol = cfg.tolerances.shape_invariance;
    for a in family.parameter_sequence(levels.saturating_sub(1).max(1))? {
        let report = check_shape_invariance_at(family.as_ref(), a, grid, tol)?;
        if !report.is_invariant {
            return Err(CoreError::NotShapeInvariant {
                spread: report.spread,
                tol,
            }
            .into());
        }
    }
    if let Some(model) = linear {
        // k < 0 only exchanges the partners; the levels depend on |k|
        return Ok((0..levels).map(|n| spectrum_linear(&model, n)).collect());
    }
    Ok(spectrum_shape_invariant(family.as_ref(), levels - 1)?)
}

pub fn spectrum_levels(cfg: &RunConfig) -> Result<Vec<SpectrumLevel>, CliError> {
    let p = cfg.physical_params()?;
    let phi = cfg.scalar_potential()?;
    let grid = cfg.grid()?;
    let classification = zero_mode(&p, &phi, &grid)?;
    let algebraic = if cfg.shape_invariant {
        Some(algebraic_spectrum(cfg, &classification, &grid)?)
    } else {
        None
    };
    let partners = partner_potentials(&p, &phi, &grid)?;
    let sector = classification.sector().unwrap_or(Sector::Minus);
    let pairs = oracle_pairs(&partners, sector, cfg.n_max + 1)?;
    pairs
        .iter()
        .map(|pair| {
            let energy_oracle = oracle_energy(pair, &p, &grid)?;
            let energy_algebraic = algebraic.as_ref().and_then(|a| a.get(pair.n).copied());
            Ok(SpectrumLevel {
                n: pair.n,
                energy_algebraic,
                energy_oracle,
                abs_diff: energy_algebraic.map(|e| (e - energy_oracle).abs()),
            })
        })
        .collect()
}

pub fn run_spectrum(cfg: &RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    let tol = opts.tol.unwrap_or(cfg.tolerances.spectrum);
    let levels = spectrum_levels(cfg)?;
    let pass = levels.iter().all(|l| l.abs_diff.is_none_or(|d| d <= tol));
    let report = SpectrumReport {
        potential: &cfg.potential,
        params: cfg.params,
        levels,
    };
    let path = output::write_json(&opts.out, output::SPECTRUM_FILE, &report)?;
    Ok(Outcome {
        pass,
        artifacts: vec![path],
    })
}

// ------------------------------------------------------------------ evolve

/// A separable state and how to sample it at any time.
enum StateSource {
    Linear {
        model: LinearModel,
        n: usize,
        delta: f64,
        grid: GridSpec,
    },
    Assembled {
        minus: GridFunction,
        plus: GridFunction,
        energy: f64,
        delta: f64,
        params: PhysicalParams,
    },
}

impl StateSource {
    fn build(cfg: &RunConfig) -> Result<Self, CliError> {
        let grid = cfg.grid()?;
        let (n, delta) = (cfg.evolve.n, cfg.evolve.delta);
        if let Some(model) = cfg.linear_model()? {
            return Ok(Self::Linear {
                model,
                n,
                delta,
                grid,
            });
        }
        let p = cfg.physical_params()?;
        let phi = cfg.scalar_potential()?;
        match zero_mode(&p, &phi, &grid)? {
            SusyClassification::Unbroken { sector: Sector::Minus, .. } => {}
            SusyClassification::Unbroken { sector: Sector::Plus, .. } => {
                return Err(CliError::Physics(
                    "the zero mode lives in H₊; state assembly expects it in H₋ (flip the sign of the superpotential)"
                        .into(),
                ))
            }
            SusyClassification::Broken => {
                return Err(CliError::Physics("supersymmetry is broken; no Majorana ground state to build on".into()))
            }
        }
        let partners = partner_potentials(&p, &phi, &grid)?;
        let minus_pairs = oracle_pairs(&partners, Sector::Minus, n + 1)?;
        let minus = minus_pairs
            .get(n)
            .ok_or_else(|| CliError::Config(format!("level {n} exceeds the grid resolution")))?;
        let energy = oracle_energy(minus, &p, &grid)?;
        let plus = if n == 0 {
            GridFunction::zeros(grid)
        } else {
            let mut plus = oracle_pairs(&partners, Sector::Plus, n)?
                .swap_remove(n - 1)
                .eigenfunction;
            let image = apply_a(&p, &phi, &minus.eigenfunction)?;
            if inner_product(&image, &plus)? < 0.0 {
                plus = plus.scaled(-1.0)?;
            }
            plus
        };
        Ok(Self::Assembled {
            minus: minus.eigenfunction.clone(),
            plus,
            energy,
            delta,
            params: p,
        })
    }

    fn energy(&self) -> f64 {
        match self {
            Self::Linear { model, n, .. } => spectrum_linear(model, *n),
            Self::Assembled { energy, .. } => *energy,
        }
    }

    fn period(&self) -> Option<f64> {
        match self {
            Self::Linear { model, n, .. } => density_period(model, *n).ok(),
            Self::Assembled { energy, params, .. } => {
                (*energy > 0.0).then(|| 2.0 * std::f64::consts::PI * params.hbar() / energy)
            }
        }
    }

    fn state(&self, t: f64) -> Result<MajoranaSpinorState, CliError> {
        Ok(match self {
            Self::Linear {
                model,
                n,
                delta,
                grid,
            } => linear_state(model, *n, t, *delta, grid)?,
            Self::Assembled {
                minus,
                plus,
                energy,
                delta,
                params,
            } => assemble_state(minus, plus, *energy, *delta, t, params)?,
        })
    }

    fn trace(&self, times: &[f64]) -> Result<EvolutionTrace, CliError> {
        if let Self::Linear {
            model,
            n,
            delta,
            grid,
        } = self
        {
            return Ok(analytic_trace(model, *n, *delta, grid, times)?);
        }
        let mut trace = EvolutionTrace::default();
        for &t in times {
            trace.push(&self.state(t)?);
        }
        Ok(trace)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PdeSummary {
    pub max_component_error: f64,
    pub max_density_error: f64,
    pub norm_drift: f64,
    pub component_tolerance: f64,
    pub norm_tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveSummary {
    pub n: usize,
    pub delta: f64,
    pub energy: f64,
    pub period: Option<f64>,
    pub t_final: f64,
    pub dt: f64,
    pub steps: usize,
    pub frames: usize,
    pub stationarity_metric: f64,
    pub first_return_time: Option<f64>,
    pub norm_drift_analytic: f64,
    pub warnings: Vec<String>,
    pub pde: Option<PdeSummary>,
}

pub fn run_evolve(cfg: &RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    let e = cfg.evolve;
    let source = StateSource::build(cfg)?;
    let period = source.period();
    let mut warnings = Vec::new();
    let t_final = match (e.periods, period) {
        (Some(periods), Some(period)) => periods * period,
        (Some(_), None) => {
            let t = e.t_final.unwrap_or(DEFAULT_T_FINAL);
            warnings.push(format!(
                "state n = {} is stationary and has no period; running to t = {t}",
                e.n
            ));
            t
        }
        (None, _) => e.t_final.or(period).unwrap_or(DEFAULT_T_FINAL),
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let p = cfg.physical_params()?;
    let phi = cfg.scalar_potential()?;
    let grid = cfg.grid()?;
    let dt = match e.dt {
        Some(dt) => dt,
        None => default_dt(period, &p, &phi, &grid)?,
    };
    let plan = StepPlan::new(t_final, dt)?;
    let times = plan.frame_times(0.0, e.stride);
    let analytic = source.trace(&times)?;
    let mut artifacts = vec![output::write_density(
        &opts.out,
        output::DENSITY_FILE,
        &analytic,
    )?];

    let pde = if opts.pde {
        let initial = source.state(0.0)?;
        let run = evolve_pde_with_stride(&initial, &p, &phi, t_final, dt, e.stride)?;
        artifacts.push(output::write_density(
            &opts.out,
            output::DENSITY_PDE_FILE,
            &run.trace,
        )?);
        let expected = source.state(run.final_state.t)?;
        let max_component_error = run.final_state.max_component_diff(&expected)?;
        let max_density_error = run
            .trace
            .densities
            .iter()
            .zip(&analytic.densities)
            .map(|(a, b)| a.max_abs_diff(b))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let norm_drift = run.trace.max_norm_drift();
        let component_tolerance = opts.tol.unwrap_or(cfg.tolerances.pde_component);
        let norm_tolerance = cfg.tolerances.norm_drift;
        Some(PdeSummary {
            max_component_error,
            max_density_error,
            norm_drift,
            component_tolerance,
            norm_tolerance,
            pass: max_component_error <= component_tolerance && norm_drift <= norm_tolerance,
        })
    } else {
        None
    };

    let summary = EvolveSummary {
        n: e.n,
        delta: e.delta,
        energy: source.energy(),
        period,
        t_final,
        dt: plan.dt,
        steps: plan.steps,
        frames: times.len(),
        stationarity_metric: stationarity_metric(&analytic),
        first_return_time: first_return_time(&analytic),
        norm_drift_analytic: analytic.max_norm_drift(),
        warnings,
        pde,
    };
    let pass = summary.pde.as_ref().is_none_or(|s| s.pass);
    artifacts.push(output::write_json(
        &opts.out,
        output::EVOLVE_SUMMARY_FILE,
        &summary,
    )?);
    Ok(Outcome { pass, artifacts })
}

// ------------------------------------------------------------------ verify

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn bounded(name: &'static str, measured: f64, tolerance: f64) -> Self {
        Self {
            name,
            pass: measured <= tolerance,
            measured: Some(measured),
            tolerance: Some(tolerance),
            detail: None,
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport<'a> {
    pub potential: &'a PotentialConfig,
    pub params: ParamsConfig,
    pub pass: bool,
    pub checks: Vec<Check>,
}

fn check_zero_mode(
    p: &PhysicalParams,
    phi: &ScalarPotential,
    c: &SusyClassification,
    tol: f64,
) -> Result<Check, CliError> {
    Ok(match c {
        SusyClassification::Unbroken { sector, zero_mode } => {
            let image = match sector {
                Sector::Minus => apply_a(p, phi, zero_mode)?,
                Sector::Plus => apply_a_dagger(p, phi, zero_mode)?,
            };
            Check::bounded("zero_mode", image.norm(), tol)
                .with_detail(format!("unbroken, zero mode in {sector:?}"))
        }
        SusyClassification::Broken => Check {
            name: "zero_mode",
            pass: true,
            measured: None,
            tolerance: None,
            detail: Some("broken: neither sector has a normalizable zero mode".into()),
        },
    })
}

/// `‖A φ⁻ₙ − ℰₙ φ⁺ₘ‖`, with `m` following the spectral pairing and the sign of
/// `φ⁺ₘ` aligned with the image.
fn ladder_residual(
    p: &PhysicalParams,
    phi: &ScalarPotential,
    minus: &[Eigenpair],
    plus: &[Eigenpair],
    pairing: SpectralPairing,
    grid: &GridSpec,
) -> Result<Option<f64>, CliError> {
    let mut worst: Option<f64> = None;
    let first = if pairing == SpectralPairing::Broken {
        0
    } else {
        1
    };
    for n in first..=LADDER_LEVELS {
        let (from, to, forward) = match pairing {
            SpectralPairing::UnbrokenMinus => (minus.get(n), plus.get(n - 1), true),
            SpectralPairing::UnbrokenPlus => (plus.get(n), minus.get(n - 1), false),
            SpectralPairing::Broken => (minus.get(n), plus.get(n), true),
        };
        let (Some(from), Some(to)) = (from, to) else {
            break;
        };
        let energy = oracle_energy(from, p, grid)?;
        let image = if forward {
            apply_a(p, phi, &from.eigenfunction)?
        } else {
            apply_a_dagger(p, phi, &from.eigenfunction)?
        };
        let sign = if inner_product(&image, &to.eigenfunction)? < 0.0 {
            -1.0
        } else {
            1.0
        };
        let residual = image
            .zip_with(&to.eigenfunction, |a, b| a - sign * energy * b)?
            .norm();
        worst = Some(worst.map_or(residual, |w| w.max(residual)));
    }
    Ok(worst)
}

/// Estimated discretization error of the oracle energies from one grid
/// refinement, `|ℰ(h) − ℰ(h/2)| · 4/3`, and the observed error ratio from a
/// second refinement.
fn oracle_convergence(
    p: &PhysicalParams,
    phi: &ScalarPotential,
    grid: &GridSpec,
    sector: Sector,
    levels: usize,
) -> Result<(f64, f64), CliError> {
    let energies = |g: &GridSpec| -> Result<Vec<f64>, CliError> {
        let partners = partner_potentials(p, phi, g)?;
        oracle_pairs(&partners, sector, levels)?
            .iter()
            .map(|e| oracle_energy(e, p, g))
            .collect()
    };
    let fine = grid.refined();
    let (e0, e1, e2) = (
        energies(grid)?,
        energies(&fine)?,
        energies(&fine.refined())?,
    );
    let mut estimate: f64 = 0.0;
    let mut ratio = f64::INFINITY;
    for n in 0..e0.len().min(e1.len()).min(e2.len()) {
        let (d01, d12) = ((e0[n] - e1[n]).abs(), (e1[n] - e2[n]).abs());
        estimate = estimate.max(d01 * 4.0 / 3.0);
        // lower levels can be converged to rounding; only resolved differences count
        if d12 > 1e-12 {
            ratio = ratio.min(d01 / d12);
        }
    }
    Ok((estimate, ratio))
}

pub fn verify_checks(cfg: &RunConfig, tol_override: Option<f64>) -> Result<Vec<Check>, CliError> {
    let t = cfg.tolerances;
    let spectrum_tol = tol_override.unwrap_or(t.spectrum);
    let p = cfg.physical_params()?;
    let phi = cfg.scalar_potential()?;
    let grid = cfg.grid()?;
    let classification = zero_mode(&p, &phi, &grid)?;
    let pairing = pairing(&classification);
    let mut checks = vec![check_zero_mode(&p, &phi, &classification, t.zero_mode)?];

    let partners = partner_potentials(&p, &phi, &grid)?;
    let count = cfg.n_max.max(LADDER_LEVELS) + 2;
    let minus = oracle_pairs(&partners, Sector::Minus, count)?;
    let plus = oracle_pairs(&partners, Sector::Plus, count)?;
    let iso = verify_isospectral(&minus, &plus, pairing, t.isospectral);
    let levels = iso.levels.len().min(cfg.n_max + 1);
    let iso_max = iso.levels[..levels]
        .iter()
        .map(|l| l.abs_diff)
        .fold(0.0, f64::max);
    checks.push(
        Check::bounded("isospectral", iso_max, t.isospectral)
            .with_detail(format!("{pairing:?}, {levels} levels")),
    );

    if cfg.shape_invariant {
        match cfg.family()? {
            Some(family) if !matches!(classification, SusyClassification::Broken) => {
                let mut worst: f64 = 0.0;
                let levels = match cfg.linear_model()? {
                    Some(_) => cfg.n_max + 1,
                    None => supported_levels(family.as_ref(), &grid, cfg.n_max)?,
                };
                for a in family.parameter_sequence(levels.saturating_sub(1).max(1))? {
                    let report =
                        check_shape_invariance_at(family.as_ref(), a, &grid, t.shape_invariance)?;
                    worst = worst
                        .max(report.spread)
                        .max((report.r_measured - family.remainder(a)?).abs());
                }
                checks.push(Check::bounded(
                    "shape_invariance",
                    worst,
                    t.shape_invariance,
                ));
                match spectrum_levels(cfg) {
                    Ok(levels) => {
                        let worst = levels.iter().filter_map(|l| l.abs_diff).fold(0.0, f64::max);
                        checks.push(Check::bounded("algebraic_spectrum", worst, spectrum_tol));
                    }
                    Err(e) => checks.push(Check {
                        name: "algebraic_spectrum",
                        pass: false,
                        measured: None,
                        tolerance: Some(spectrum_tol),
                        detail: Some(e.to_string()),
                    }),
                }
            }
            _ => checks.push(Check {
                name: "shape_invariance",
                pass: false,
                measured: None,
                tolerance: Some(t.shape_invariance),
                detail: Some(
                    "declared, but the potential has no family or supersymmetry is broken".into(),
                ),
            }),
        }
    }

    if let Some(residual) = ladder_residual(&p, &phi, &minus, &plus, pairing, &grid)? {
        checks.push(Check::bounded("ladder_mapping", residual, t.ladder));
    }

    match StateSource::build(cfg) {
        Ok(source) => {
            let period = source.period().unwrap_or(DEFAULT_T_FINAL);
            let times: Vec<f64> = (0..=ASSEMBLY_SAMPLES)
                .map(|i| i as f64 * period / ASSEMBLY_SAMPLES as f64)
                .collect();
            checks.push(Check::bounded(
                "norm_assembly",
                source.trace(&times)?.max_norm_drift(),
                ASSEMBLY_NORM_TOL,
            ));
            let dt = default_dt(source.period(), &p, &phi, &grid)?;
            let check = match evolve_pde_with_stride(
                &source.state(0.0)?,
                &p,
                &phi,
                period,
                dt,
                cfg.evolve.stride,
            ) {
                Ok(run) => Check::bounded("norm_pde", run.trace.max_norm_drift(), t.norm_drift),
                Err(e) => Check {
                    name: "norm_pde",
                    pass: false,
                    measured: None,
                    tolerance: Some(t.norm_drift),
                    detail: Some(e.to_string()),
                },
            };
            checks.push(check);
        }
        Err(e) if e.exit_code() == crate::error::exit::PHYSICS => {}
        Err(e) => return Err(e),
    }

    let audit = majorana_compatible(&cfg.coupling_set()?, &grid, t.coupling)?;
    let worst = audit
        .offending
        .iter()
        .map(|o| o.max_abs)
        .fold(0.0, f64::max);
    let mut check = Check::bounded("coupling_audit", worst, t.coupling);
    check.pass = audit.compatible;
    if !audit.compatible {
        let names: Vec<&str> = audit.offending.iter().map(|o| o.coupling.name()).collect();
        check = check.with_detail(format!(
            "Majorana-incompatible: {} nonzero",
            names.join(", ")
        ));
    }
    checks.push(check);

    let sector = classification.sector().unwrap_or(Sector::Minus);
    let (estimate, ratio) = oracle_convergence(&p, &phi, &grid, sector, cfg.n_max + 1)?;
    checks.push(
        Check::bounded("oracle_convergence", estimate, spectrum_tol)
            .with_detail(format!("error ratio under refinement {ratio:.3}")),
    );
    Ok(checks)
}

pub fn run_verify(cfg: &RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    let checks = verify_checks(cfg, opts.tol)?;
    let pass = checks.iter().all(|c| c.pass);
    let report = VerifyReport {
        potential: &cfg.potential,
        params: cfg.params,
        pass,
        checks,
    };
    let path = output::write_json(&opts.out, output::VERIFY_FILE, &report)?;
    Ok(Outcome {
        pass,
        artifacts: vec![path],
    })
}

// ---------------------------------------------------------------- classify

#[derive(Debug, Clone, Serialize)]
struct ClassifyReport<'a> {
    potential: &'a PotentialConfig,
    params: ParamsConfig,
    susy: &'static str,
    sector: Option<SectorName>,
    lowest_energy_minus: f64,
    lowest_energy_plus: f64,
}

pub fn run_classify(cfg: &RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    let p = cfg.physical_params()?;
    let phi = cfg.scalar_potential()?;
    let grid = cfg.grid()?;
    let classification = zero_mode(&p, &phi, &grid)?;
    let partners = partner_potentials(&p, &phi, &grid)?;
    let lowest = |sector| -> Result<f64, CliError> {
        oracle_energy(&oracle_pairs(&partners, sector, 1)?[0], &p, &grid)
    };
    let report = ClassifyReport {
        potential: &cfg.potential,
        params: cfg.params,
        susy: if classification.sector().is_some() {
            "unbroken"
        } else {
            "broken"
        },
        sector: classification.sector().map(SectorName::from),
        lowest_energy_minus: lowest(Sector::Minus)?,
        lowest_energy_plus: lowest(Sector::Plus)?,
    };
    let path = output::write_json(&opts.out, output::CLASSIFY_FILE, &report)?;
    Ok(Outcome {
        pass: true,
        artifacts: vec![path],
    })
}

// ------------------------------------------------------------------- audit

#[derive(Debug, Clone, Serialize)]
struct OffendingEntry {
    coupling: &'static str,
    max_abs: f64,
}

#[derive(Debug, Clone, Serialize)]
struct AuditReport {
    compatible: bool,
    tolerance: f64,
    offending: Vec<OffendingEntry>,
}

pub fn audit(cfg: &RunConfig, tol: f64) -> Result<CompatibilityReport, CliError> {
    Ok(majorana_compatible(
        &cfg.coupling_set()?,
        &cfg.grid()?,
        tol,
    )?)
}

/// Writes the audit report; an incompatible coupling set is a physics
/// precondition failure.
pub fn run_audit(cfg: &RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    let tolerance = opts.tol.unwrap_or(cfg.tolerances.coupling);
    let r = audit(cfg, tolerance)?;
    let report = AuditReport {
        compatible: r.compatible,
        tolerance,
        offending: r
            .offending
            .iter()
            .map(|o| OffendingEntry {
                coupling: o.coupling.name(),
                max_abs: o.max_abs,
            })
            .collect(),
    };
    let path = output::write_json(&opts.out, output::AUDIT_FILE, &report)?;
    if !r.compatible {
        let names: Vec<&str> = report.offending.iter().map(|o| o.coupling).collect();
        return Err(CliError::Physics(format!(
            "coupling set is not Majorana-compatible ({} nonzero); report written to {}",
            names.join(", "),
            path.display()
        )));
    }
    Ok(Outcome {
        pass: true,
        artifacts: vec![path],
    })
}
