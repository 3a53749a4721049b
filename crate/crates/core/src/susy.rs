//! Ladder operators, partner potentials, zero modes and shape invariance.

use alloc::string::String;
use alloc::vec::Vec;

use crate::expr::Expr;
use crate::model::{normalize, GridFunction, GridSpec, PhysicalParams, ScalarPotential, Sector};
use crate::oracle::{discretize, Eigenpair, TridiagonalOperator};
use crate::{Error, Result};

/// Largest normalized boundary amplitude for which a zero-mode candidate
/// still counts as normalizable.
pub const ZERO_MODE_BOUNDARY_TOL: f64 = 1e-6;

/// `V± = W² ± cħ φ′` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PartnerPotentials {
    pub minus: GridFunction,
    pub plus: GridFunction,
    pub params: PhysicalParams,
    pub potential: ScalarPotential,
}

impl PartnerPotentials {
    pub fn get(&self, sector: Sector) -> &GridFunction {
        match sector {
            Sector::Minus => &self.minus,
            Sector::Plus => &self.plus,
        }
    }

    /// Finite-difference `H±` for the oracle.
    pub fn operator(&self, sector: Sector) -> Result<TridiagonalOperator> {
        discretize(&self.params, self.get(sector), sector)
    }
}

pub fn partner_potentials(
    p: &PhysicalParams,
    phi: &ScalarPotential,
    grid: &GridSpec,
) -> Result<PartnerPotentials> {
    let h = grid.spacing();
    let mut minus = Vec::with_capacity(grid.n_points());
    let mut plus = Vec::with_capacity(grid.n_points());
    for x in grid.points() {
        let w = p.rest_energy() + phi.eval(x)?;
        let dw = p.c_hbar() * phi.derivative(x, h)?;
        minus.push(w * w - dw);
        plus.push(w * w + dw);
    }
    Ok(PartnerPotentials {
        minus: GridFunction::new(*grid, minus)?,
        plus: GridFunction::new(*grid, plus)?,
        params: *p,
        potential: phi.clone(),
    })
}

fn sample_superpotential(
    p: &PhysicalParams,
    phi: &ScalarPotential,
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    grid.points()
        .map(|x| Ok(p.rest_energy() + phi.eval(x)?))
        .collect()
}

/// Central differences inside, second-order one-sided at the two ends.
pub fn grid_derivative(f: &GridFunction) -> Vec<f64> {
    let v = f.values();
    let n = v.len();
    let h = f.spec().spacing();
    let mut d = Vec::with_capacity(n);
    d.push((-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h));
    d.extend((1..n - 1).map(|i| (v[i + 1] - v[i - 1]) / (2.0 * h)));
    d.push((3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h));
    d
}

fn apply_ladder(
    p: &PhysicalParams,
    phi: &ScalarPotential,
    f: &GridFunction,
    sign: f64,
) -> Result<GridFunction> {
    let w = sample_superpotential(p, phi, f.spec())?;
    let df = grid_derivative(f);
    let values = f
        .values()
        .iter()
        .zip(&df)
        .zip(&w)
        .map(|((fi, dfi), wi)| sign * p.c_hbar() * dfi + wi * fi)
        .collect();
    GridFunction::new(*f.spec(), values)
}

/// `A f = cħ f′ + W f`
pub fn apply_a(
    p: &PhysicalParams,
    phi: &ScalarPotential,
    f: &GridFunction,
) -> Result<GridFunction> {
    apply_ladder(p, phi, f, 1.0)
}

/// `A† f = −cħ f′ + W f`
pub fn apply_a_dagger(
    p: &PhysicalParams,
    phi: &ScalarPotential,
    f: &GridFunction,
) -> Result<GridFunction> {
    apply_ladder(p, phi, f, -1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SusyClassification {
    /// One partner owns a normalizable zero mode, annihilated by `A`
    /// (minus sector) or `A†` (plus sector).
    Unbroken {
        sector: Sector,
        zero_mode: GridFunction,
    },
    Broken,
}

impl SusyClassification {
    pub fn sector(&self) -> Option<Sector> {
        match self {
            Self::Unbroken { sector, .. } => Some(*sector),
            Self::Broken => None,
        }
    }

    pub fn zero_mode(&self) -> Option<&GridFunction> {
        match self {
            Self::Unbroken { zero_mode, .. } => Some(zero_mode),
            Self::Broken => None,
        }
    }
}

/// Builds both candidates `exp(∓∫W dx / cħ)` and keeps the normalizable one.
pub fn zero_mode(
    p: &PhysicalParams,
    phi: &ScalarPotential,
    grid: &GridSpec,
) -> Result<SusyClassification> {
    let w = sample_superpotential(p, phi, grid)?;
    let h = grid.spacing();
    let mut integral = Vec::with_capacity(w.len());
    let mut acc = 0.0;
    integral.push(0.0);
    for pair in w.windows(2) {
        acc += 0.5 * h * (pair[0] + pair[1]);
        integral.push(acc);
    }

    let candidate = |sign: f64| -> Result<Option<GridFunction>> {
        let exponent: Vec<f64> = integral.iter().map(|i| sign * i / p.c_hbar()).collect();
        let peak = exponent.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mode = GridFunction::new(
            *grid,
            exponent.iter().map(|e| libm::exp(e - peak)).collect(),
        )?;
        let mode = normalize(&mode)?;
        let v = mode.values();
        let edge = v[0].abs().max(v[v.len() - 1].abs());
        Ok((edge <= ZERO_MODE_BOUNDARY_TOL).then_some(mode))
    };

    match (candidate(-1.0)?, candidate(1.0)?) {
        (Some(_), Some(_)) => Err(Error::BothSectorsNormalizable),
        (Some(mode), None) => Ok(SusyClassification::Unbroken {
            sector: Sector::Minus,
            zero_mode: mode,
        }),
        (None, Some(mode)) => Ok(SusyClassification::Unbroken {
            sector: Sector::Plus,
            zero_mode: mode,
        }),
        (None, None) => Ok(SusyClassification::Broken),
    }
}

/// A superpotential family with `H₊(a, x) = H₋(f(a), x) + R(a)`.
pub trait ShapeInvariantFamily {
    fn params(&self) -> &PhysicalParams;

    fn initial_parameter(&self) -> f64;

    /// `φ(a, ·)` for parameter `a`.
    fn potential(&self, a: f64) -> Result<ScalarPotential>;

    /// The reparametrization `a ↦ f(a)`.
    fn next_parameter(&self, a: f64) -> Result<f64>;

    /// The constant `R(a)`.
    fn remainder(&self, a: f64) -> Result<f64>;

    /// `[a₁, a₂, …, a_count]` with `a_{s+1} = f(a_s)`.
    fn parameter_sequence(&self, count: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(count);
        let mut a = self.initial_parameter();
        for i in 0..count {
            out.push(a);
            if i + 1 < count {
                a = self.next_parameter(a)?;
            }
        }
        Ok(out)
    }
}

/// `φ(k, x) = k x`, `f(k) = k`, `R(k) = 2cħk`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFamily {
    pub k: f64,
    pub params: PhysicalParams,
}

impl ShapeInvariantFamily for LinearFamily {
    fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn initial_parameter(&self) -> f64 {
        self.k
    }

    fn potential(&self, a: f64) -> Result<ScalarPotential> {
        Ok(ScalarPotential::linear(a))
    }

    fn next_parameter(&self, a: f64) -> Result<f64> {
        Ok(a)
    }

    fn remainder(&self, a: f64) -> Result<f64> {
        Ok(2.0 * self.params.c_hbar() * a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HyperbolicShape {
    /// `W = A tanh(αx)`
    PoschlTeller,
    /// `W = A tanh(αx) + B/A`
    RosenMorse { b: f64 },
    /// `W = A tanh(αx) + B sech(αx)`
    Scarf { b: f64 },
}

/// Hyperbolic superpotentials with `A ↦ A − cħα`.
///
/// The family parameter is the amplitude `A` of the superpotential itself, so
/// the scalar potential carries an offset of `−mc²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicFamily {
    pub shape: HyperbolicShape,
    pub a: f64,
    pub alpha: f64,
    pub params: PhysicalParams,
}

impl ShapeInvariantFamily for HyperbolicFamily {
    fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn initial_parameter(&self) -> f64 {
        self.a
    }

    fn potential(&self, a: f64) -> Result<ScalarPotential> {
        let phi = match self.shape {
            HyperbolicShape::PoschlTeller => ScalarPotential::poschl_teller(a, self.alpha),
            HyperbolicShape::RosenMorse { b } => ScalarPotential::rosen_morse(a, b, self.alpha),
            HyperbolicShape::Scarf { b } => ScalarPotential::scarf(a, b, self.alpha),
        };
        Ok(phi.with_offset(-self.params.rest_energy()))
    }

    fn next_parameter(&self, a: f64) -> Result<f64> {
        Ok(a - self.params.c_hbar() * self.alpha)
    }

    fn remainder(&self, a: f64) -> Result<f64> {
        let next = self.next_parameter(a)?;
        let base = a * a - next * next;
        Ok(match self.shape {
            HyperbolicShape::RosenMorse { b } => base + b * b / (a * a) - b * b / (next * next),
            _ => base,
        })
    }
}

/// Family defined by expressions in the parameter, e.g. potential `a*x`,
/// map `a`, remainder `2*c*hbar*a`.
///
/// All three expressions may reference the family parameter by name as well
/// as `m`, `c` and `hbar`, plus any fixed extra parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprFamily {
    pub parameter: String,
    pub initial: f64,
    pub potential: Expr,
    pub map: Expr,
    pub remainder: Expr,
    pub fixed: Vec<(String, f64)>,
    pub params: PhysicalParams,
}

impl ExprFamily {
    /// Names every expression may reference besides `x`.
    pub fn reserved_names() -> [&'static str; 3] {
        ["m", "c", "hbar"]
    }

    fn bindings(&self, a: f64) -> Vec<(String, f64)> {
        let mut b = self.fixed.clone();
        b.push((self.parameter.clone(), a));
        b.push(("m".into(), self.params.mass()));
        b.push(("c".into(), self.params.c()));
        b.push(("hbar".into(), self.params.hbar()));
        b
    }

    fn eval_scalar(&self, e: &Expr, a: f64) -> Result<f64> {
        let value = e
            .eval(0.0, &self.bindings(a))
            .map_err(|source| Error::Evaluation { x: 0.0, source })?;
        if !value.is_finite() {
            return Err(Error::NonFinite { x: 0.0, value });
        }
        Ok(value)
    }
}

impl ShapeInvariantFamily for ExprFamily {
    fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn initial_parameter(&self) -> f64 {
        self.initial
    }

    fn potential(&self, a: f64) -> Result<ScalarPotential> {
        Ok(ScalarPotential::custom(
            self.potential.clone(),
            self.bindings(a),
        ))
    }

    fn next_parameter(&self, a: f64) -> Result<f64> {
        self.eval_scalar(&self.map, a)
    }

    fn remainder(&self, a: f64) -> Result<f64> {
        self.eval_scalar(&self.remainder, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeInvarianceReport {
    /// Grid mean of `V₊(a₁, x) − V₋(f(a₁), x)`.
    pub r_measured: f64,
    /// `max − min` of the same difference.
    pub spread: f64,
    pub is_invariant: bool,
}

/// Numerical check of `V₊(a, x) − V₋(f(a), x) = const` at `a = a₁`.
pub fn check_shape_invariance<F: ShapeInvariantFamily + ?Sized>(
    fam: &F,
    grid: &GridSpec,
    tol: f64,
) -> Result<ShapeInvarianceReport> {
    check_shape_invariance_at(fam, fam.initial_parameter(), grid, tol)
}

pub fn check_shape_invariance_at<F: ShapeInvariantFamily + ?Sized>(
    fam: &F,
    a: f64,
    grid: &GridSpec,
    tol: f64,
) -> Result<ShapeInvarianceReport> {
    let p = fam.params();
    let here = partner_potentials(p, &fam.potential(a)?, grid)?;
    let next = partner_potentials(p, &fam.potential(fam.next_parameter(a)?)?, grid)?;
    let d = here.plus.zip_with(&next.minus, |vp, vm| vp - vm)?;
    let (lo, hi) = d
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let r_measured = d.values().iter().sum::<f64>() / d.len() as f64;
    let spread = hi - lo;
    Ok(ShapeInvarianceReport {
        r_measured,
        spread,
        is_invariant: spread <= tol,
    })
}

/// Exact partial sums `ℰₙ² = Σ_{k=1}^{n} R(a_k)`, `n = 0..=n_max`.
pub fn energy_squared_levels<F: ShapeInvariantFamily + ?Sized>(
    fam: &F,
    n_max: usize,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(0.0);
    let mut a = fam.initial_parameter();
    let mut sum = 0.0;
    for n in 1..=n_max {
        sum += fam.remainder(a)?;
        if sum < 0.0 {
            return Err(Error::InvalidFamily { n, sum });
        }
        out.push(sum);
        a = fam.next_parameter(a)?;
    }
    Ok(out)
}

/// Algebraic spectrum `ℰₙ = sqrt(Σ_{k=1}^{n} R(a_k))`, non-negative roots only.
pub fn spectrum_shape_invariant<F: ShapeInvariantFamily + ?Sized>(
    fam: &F,
    n_max: usize,
) -> Result<Vec<f64>> {
    Ok(energy_squared_levels(fam, n_max)?
        .into_iter()
        .map(libm::sqrt)
        .collect())
}

/// Number of levels `n ≤ n_max` the family actually supports on `grid`.
///
/// Level `n` of `H₋(a₁)` is the zero mode of `H₋(a_{n+1})` lifted by the
/// ladder, so it exists only while `a_{n+1}` still has a normalizable
/// minus-sector zero mode. Hyperbolic families run out after finitely many
/// steps; the linear family never does.
pub fn supported_levels<F: ShapeInvariantFamily + ?Sized>(
    fam: &F,
    grid: &GridSpec,
    n_max: usize,
) -> Result<usize> {
    let p = *fam.params();
    let mut a = fam.initial_parameter();
    for n in 0..=n_max {
        let classification = fam.potential(a).and_then(|phi| zero_mode(&p, &phi, grid));
        match classification {
            Ok(SusyClassification::Unbroken {
                sector: Sector::Minus,
                ..
            }) => {}
            Ok(_) => return Ok(n),
            Err(e) if n == 0 => return Err(e),
            Err(_) => return Ok(n),
        }
        if n < n_max {
            a = fam.next_parameter(a)?;
        }
    }
    Ok(n_max + 1)
}

/// States generated algebraically from the zero modes of the family.
#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy {
    /// `φ⁻ₙ(a₁)` for `n = 0..=n_max`.
    pub minus: Vec<Eigenpair>,
    /// `φ⁺ₙ(a₁)` for `n = 0..n_max`, paired with `ℰ⁺ₙ = ℰ⁻ₙ₊₁`.
    pub plus: Vec<Eigenpair>,
}

/// Builds `φ⁻ₙ(a₁) = normalize(A†(a₁) φ⁻ₙ₋₁(a₂))` recursively down to the
/// zero modes, and `φ⁺ₙ = normalize(A φ⁻ₙ₊₁)`.
///
/// Shape invariance is verified at every parameter used (spread ≤ `tol`),
/// and every zero mode must sit in the minus sector.
pub fn build_hierarchy<F: ShapeInvariantFamily + ?Sized>(
    fam: &F,
    grid: &GridSpec,
    n_max: usize,
    tol: f64,
) -> Result<Hierarchy> {
    let p = *fam.params();
    let params = fam.parameter_sequence(n_max + 1)?;
    let potentials = params
        .iter()
        .map(|&a| fam.potential(a))
        .collect::<Result<Vec<_>>>()?;
    let zero_mode_at = |s: usize| match zero_mode(&p, &potentials[s], grid)? {
        SusyClassification::Unbroken {
            sector: Sector::Minus,
            zero_mode,
        } => Ok(zero_mode),
        SusyClassification::Unbroken {
            sector: Sector::Plus,
            ..
        } => Err(Error::WrongSector {
            parameter: params[s],
        }),
        SusyClassification::Broken => Err(Error::BrokenSusy {
            parameter: params[s],
        }),
    };
    let ground = zero_mode_at(0)?;
    let lambdas = energy_squared_levels(fam, n_max + 1)?;

    for &a in &params[..n_max] {
        let report = check_shape_invariance_at(fam, a, grid, tol)?;
        if !report.is_invariant {
            return Err(Error::NotShapeInvariant {
                spread: report.spread,
                tol,
            });
        }
    }

    let mut minus = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut state = if n == 0 {
            ground.clone()
        } else {
            zero_mode_at(n)?
        };
        for phi in potentials[..n].iter().rev() {
            state = normalize(&apply_a_dagger(&p, phi, &state)?)?;
        }
        minus.push(Eigenpair {
            lambda: lambdas[n],
            eigenfunction: state,
            n,
            sector: Sector::Minus,
        });
    }

    let plus = (0..n_max)
        .map(|n| {
            let state = normalize(&apply_a(&p, &potentials[0], &minus[n + 1].eigenfunction)?)?;
            Ok(Eigenpair {
                lambda: lambdas[n + 1],
                eigenfunction: state,
                n,
                sector: Sector::Plus,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Hierarchy { minus, plus })
}
