//! Physical parameters, uniform grids, sampled functions and scalar potentials.

use alloc::string::String;
use alloc::vec::Vec;

use crate::expr::Expr;
use crate::{Error, Result};

/// Mass, speed of light and reduced Planck constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    mass: f64,
    c: f64,
    hbar: f64,
}

impl PhysicalParams {
    pub fn new(mass: f64, c: f64, hbar: f64) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::InvalidParams("mass must be finite and non-negative"));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParams("c must be finite and positive"));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParams("hbar must be finite and positive"));
        }
        Ok(Self { mass, c, hbar })
    }

    /// Natural units, `c = ħ = 1`.
    pub fn natural(mass: f64) -> Result<Self> {
        Self::new(mass, 1.0, 1.0)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `mc²`
    pub fn rest_energy(&self) -> f64 {
        self.mass * self.c * self.c
    }

    /// `cħ`, the coefficient of the derivative in the ladder operators.
    pub fn c_hbar(&self) -> f64 {
        self.c * self.hbar
    }
}

/// Uniform grid `x_i = x_min + i h`, `i = 0..n_points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite"));
        }
        if x_min >= x_max {
            return Err(Error::InvalidGrid("x_min must be below x_max"));
        }
        if n_points < 3 {
            return Err(Error::InvalidGrid("at least 3 points are required"));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    /// Same interval with `2(n−1)+1` points, i.e. half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * (self.n_points - 1) + 1,
            ..*self
        }
    }
}

/// Real samples of a function on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.n_points {
            return Err(Error::LengthMismatch {
                expected: spec.n_points,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                x: spec.x(i),
                value: values[i],
            });
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            values: alloc::vec![0.0; spec.n_points],
        }
    }

    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let values = spec.points().map(&mut f).collect();
        Self::new(spec, values)
    }

    pub fn try_from_fn(spec: GridSpec, mut f: impl FnMut(f64) -> Result<f64>) -> Result<Self> {
        let values = spec.points().map(&mut f).collect::<Result<Vec<_>>>()?;
        Self::new(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        Self::new(self.spec, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.spec, values)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.map(|v| v * factor)
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `sqrt(⟨f, f⟩)` with the trapezoidal inner product.
    pub fn norm(&self) -> f64 {
        libm::sqrt(trapezoid_dot(
            &self.values,
            &self.values,
            self.spec.spacing(),
        ))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs())))
    }

    /// Flips the sign so that the entry of largest magnitude is positive.
    /// Ties go to the smallest index.
    pub fn with_sign_convention(mut self) -> Self {
        if let Some(i) = index_of_max_abs(&self.values) {
            if self.values[i] < 0.0 {
                self.values.iter_mut().for_each(|v| *v = -*v);
            }
        }
        self
    }
}

fn index_of_max_abs(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.iter().enumerate() {
        if best.is_none_or(|(_, m)| v.abs() > m) {
            best = Some((i, v.abs()));
        }
    }
    best.map(|(i, _)| i)
}

pub(crate) fn trapezoid_dot(f: &[f64], g: &[f64], h: f64) -> f64 {
    let n = f.len();
    let interior: f64 = f[1..n - 1]
        .iter()
        .zip(&g[1..n - 1])
        .map(|(a, b)| a * b)
        .sum();
    h * (interior + 0.5 * (f[0] * g[0] + f[n - 1] * g[n - 1]))
}

/// Trapezoidal approximation of `∫ f g dx`.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    f.check_same_grid(g)?;
    Ok(trapezoid_dot(&f.values, &g.values, f.spec.spacing()))
}

/// Scales `f` to unit trapezoidal norm with the largest-magnitude entry positive.
pub fn normalize(f: &GridFunction) -> Result<GridFunction> {
    let norm = f.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::DegenerateFunction);
    }
    // already unit norm up to rounding: leave untouched so normalize is idempotent
    if (norm - 1.0).abs() <= 8.0 * f64::EPSILON {
        return Ok(f.clone().with_sign_convention());
    }
    Ok(f.scaled(1.0 / norm)?.with_sign_convention())
}

/// Which partner Hamiltonian a quantity belongs to: `H₋ = A†A` or `H₊ = AA†`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Minus,
    Plus,
}

/// Functional form of a scalar potential.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    Constant {
        value: f64,
    },
    /// `k x`
    Linear {
        k: f64,
    },
    /// `a tanh(αx)`
    PoschlTeller {
        a: f64,
        alpha: f64,
    },
    /// `a tanh(αx) + b/a`
    RosenMorse {
        a: f64,
        b: f64,
        alpha: f64,
    },
    /// `a tanh(αx) + b sech(αx)`
    Scarf {
        a: f64,
        b: f64,
        alpha: f64,
    },
    Custom {
        expr: Expr,
        params: Vec<(String, f64)>,
    },
}

/// Scalar potential `φ(x) = kind(x) + offset`.
///
/// The offset lets a superpotential family be expressed as `φ = W − mc²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPotential {
    pub kind: PotentialKind,
    pub offset: f64,
}

impl From<PotentialKind> for ScalarPotential {
    fn from(kind: PotentialKind) -> Self {
        Self { kind, offset: 0.0 }
    }
}

impl ScalarPotential {
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(value: f64) -> Self {
        PotentialKind::Constant { value }.into()
    }

    pub fn linear(k: f64) -> Self {
        PotentialKind::Linear { k }.into()
    }

    pub fn poschl_teller(a: f64, alpha: f64) -> Self {
        PotentialKind::PoschlTeller { a, alpha }.into()
    }

    pub fn rosen_morse(a: f64, b: f64, alpha: f64) -> Self {
        PotentialKind::RosenMorse { a, b, alpha }.into()
    }

    pub fn scarf(a: f64, b: f64, alpha: f64) -> Self {
        PotentialKind::Scarf { a, b, alpha }.into()
    }

    pub fn custom(expr: Expr, params: Vec<(String, f64)>) -> Self {
        PotentialKind::Custom { expr, params }.into()
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let value = match &self.kind {
            PotentialKind::Constant { value } => *value,
            PotentialKind::Linear { k } => k * x,
            PotentialKind::PoschlTeller { a, alpha } => a * libm::tanh(alpha * x),
            PotentialKind::RosenMorse { a, b, alpha } => a * libm::tanh(alpha * x) + b / a,
            PotentialKind::Scarf { a, b, alpha } => {
                a * libm::tanh(alpha * x) + b / libm::cosh(alpha * x)
            }
            PotentialKind::Custom { expr, params } => expr
                .eval(x, params)
                .map_err(|source| Error::Evaluation { x, source })?,
        } + self.offset;
        if !value.is_finite() {
            return Err(Error::NonFinite { x, value });
        }
        Ok(value)
    }

    /// `φ′(x)`. Built-in kinds are differentiated analytically; custom
    /// expressions use a central difference with the given step.
    pub fn derivative(&self, x: f64, step: f64) -> Result<f64> {
        let sech2 = |alpha: f64| {
            let s = 1.0 / libm::cosh(alpha * x);
            s * s
        };
        let value = match &self.kind {
            PotentialKind::Constant { .. } => 0.0,
            PotentialKind::Linear { k } => *k,
            PotentialKind::PoschlTeller { a, alpha }
            | PotentialKind::RosenMorse { a, alpha, .. } => a * alpha * sech2(*alpha),
            PotentialKind::Scarf { a, b, alpha } => {
                let sech = 1.0 / libm::cosh(alpha * x);
                alpha * sech * (a * sech - b * libm::tanh(alpha * x))
            }
            PotentialKind::Custom { .. } => {
                (self.eval(x + step)? - self.eval(x - step)?) / (2.0 * step)
            }
        };
        if !value.is_finite() {
            return Err(Error::NonFinite { x, value });
        }
        Ok(value)
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<GridFunction> {
        GridFunction::try_from_fn(*grid, |x| self.eval(x))
    }
}

/// `W(x) = mc² + φ(x)`.
pub fn superpotential(p: &PhysicalParams, phi: &ScalarPotential, x: f64) -> Result<f64> {
    Ok(p.rest_energy() + phi.eval(x)?)
}

/// Coefficients of `1`, `γ⁰`, `−iγ¹` and `−iγ⁵` in a general external coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSet {
    pub f1: ScalarPotential,
    pub f2: ScalarPotential,
    pub f3: ScalarPotential,
    pub f4: ScalarPotential,
}

impl CouplingSet {
    /// Only the `γ⁰` (scalar) channel is populated.
    pub fn scalar(phi: ScalarPotential) -> Self {
        Self {
            f1: ScalarPotential::zero(),
            f2: phi,
            f3: ScalarPotential::zero(),
            f4: ScalarPotential::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    F1,
    F2,
    F3,
    F4,
}

impl Coupling {
    pub fn name(self) -> &'static str {
        match self {
            Self::F1 => "f1",
            Self::F2 => "f2",
            Self::F3 => "f3",
            Self::F4 => "f4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffendingCoupling {
    pub coupling: Coupling,
    pub max_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityReport {
    pub compatible: bool,
    pub offending: Vec<OffendingCoupling>,
}

/// Checks that a coupling set respects the reality of the Majorana spinor.
///
/// Conjugating the Hamiltonian on real spinors leaves only the `γ⁰` channel,
/// so `f1`, `f3` and `f4` must vanish on the whole grid.
pub fn majorana_compatible(
    cs: &CouplingSet,
    grid: &GridSpec,
    tol: f64,
) -> Result<CompatibilityReport> {
    let mut offending = Vec::new();
    for (coupling, f) in [
        (Coupling::F1, &cs.f1),
        (Coupling::F3, &cs.f3),
        (Coupling::F4, &cs.f4),
    ] {
        let max_abs = f.sample(grid)?.sup_norm();
        if max_abs > tol {
            offending.push(OffendingCoupling { coupling, max_abs });
        }
    }
    // f2 only has to be evaluable
    cs.f2.sample(grid)?;
    Ok(CompatibilityReport {
        compatible: offending.is_empty(),
        offending,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use proptest::prelude::*;

    fn unit() -> GridSpec {
        GridSpec::new(0.0, 1.0, 11).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(PhysicalParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 0.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, -2.0).is_err());
        assert!(PhysicalParams::new(0.0, 2.0, 3.0).is_ok());
        assert_eq!(
            PhysicalParams::new(2.0, 3.0, 1.0).unwrap().rest_energy(),
            18.0
        );
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1.0, 0.0, 10).is_err());
        assert!(GridSpec::new(0.0, 1.0, 2).is_err());
        assert!(GridSpec::new(0.0, f64::INFINITY, 10).is_err());
        let g = GridSpec::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.points().collect::<Vec<_>>(), [-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(g.refined().n_points(), 9);
        assert!(GridFunction::new(g, alloc::vec![0.0; 4]).is_err());
        assert!(GridFunction::new(g, alloc::vec![0.0, 1.0, f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn superpotential_examples() {
        let p = PhysicalParams::natural(1.0).unwrap();
        assert_eq!(
            superpotential(&p, &ScalarPotential::zero(), 5.0).unwrap(),
            1.0
        );
        assert_eq!(
            superpotential(&p, &ScalarPotential::linear(1.0), 2.0).unwrap(),
            3.0
        );
        let massless = PhysicalParams::natural(0.0).unwrap();
        assert_eq!(
            superpotential(&massless, &ScalarPotential::linear(2.0), -1.0).unwrap(),
            -2.0
        );
    }

    #[test]
    fn non_finite_potential_names_point() {
        let p = PhysicalParams::natural(1.0).unwrap();
        let phi = ScalarPotential::custom(parse("exp(x)").unwrap(), Vec::new());
        assert!(
            matches!(superpotential(&p, &phi, 1e4), Err(Error::NonFinite { x, .. }) if x == 1e4)
        );
        let phi = ScalarPotential::custom(parse("1/x").unwrap(), Vec::new());
        assert!(
            matches!(superpotential(&p, &phi, 0.0), Err(Error::Evaluation { x, .. }) if x == 0.0)
        );
    }

    #[test]
    fn inner_product_examples() {
        let g = unit();
        let one = GridFunction::from_fn(g, |_| 1.0).unwrap();
        assert_eq!(inner_product(&one, &one).unwrap(), 1.0);

        let g = GridSpec::new(0.0, 1.0, 101).unwrap();
        let x = GridFunction::from_fn(g, |x| x).unwrap();
        let one = GridFunction::from_fn(g, |_| 1.0).unwrap();
        assert!((inner_product(&x, &one).unwrap() - 0.5).abs() <= 1e-12);

        let g = GridSpec::new(-10.0, 10.0, 2001).unwrap();
        let w = 1.0f64;
        let gauss = GridFunction::from_fn(g, |y| {
            libm::pow(w / core::f64::consts::PI, 0.25) * libm::exp(-w * y * y / 2.0)
        })
        .unwrap();
        assert!((inner_product(&gauss, &gauss).unwrap() - 1.0).abs() <= 1e-8);

        let other = GridFunction::zeros(GridSpec::new(0.0, 1.0, 12).unwrap());
        assert_eq!(inner_product(&one, &other), Err(Error::GridMismatch));
    }

    #[test]
    fn normalize_examples() {
        let g = unit();
        let two = GridFunction::from_fn(g, |_| 2.0).unwrap();
        let n = normalize(&two).unwrap();
        assert!(n.values().iter().all(|v| (v - 1.0).abs() < 1e-15));

        let neg = GridFunction::from_fn(g, |_| -3.0).unwrap();
        let n = normalize(&neg).unwrap();
        assert!(n.values().iter().all(|v| (v - 1.0).abs() < 1e-15));

        let g = GridSpec::new(-10.0, 10.0, 2001).unwrap();
        let h1 = GridFunction::from_fn(g, |y| 2.0 * y * libm::exp(-y * y / 2.0)).unwrap();
        let n = normalize(&h1).unwrap();
        assert!((n.norm() - 1.0).abs() <= 1e-12);

        assert_eq!(
            normalize(&GridFunction::zeros(g)),
            Err(Error::DegenerateFunction)
        );
    }

    #[test]
    fn sign_convention_breaks_ties_by_index() {
        let g = GridSpec::new(0.0, 1.0, 3).unwrap();
        let f = GridFunction::new(g, alloc::vec![-1.0, 0.5, 1.0]).unwrap();
        assert_eq!(f.with_sign_convention().values(), [1.0, -0.5, -1.0]);
    }

    #[test]
    fn built_in_derivatives_match_central_differences() {
        let shapes = [
            ScalarPotential::linear(1.3),
            ScalarPotential::poschl_teller(2.0, 0.7),
            ScalarPotential::rosen_morse(2.0, 0.5, 1.1),
            ScalarPotential::scarf(2.0, 0.8, 0.9),
        ];
        for phi in &shapes {
            for &x in &[-2.0, -0.3, 0.0, 0.4, 1.7] {
                let step = 1e-5;
                let fd = (phi.eval(x + step).unwrap() - phi.eval(x - step).unwrap()) / (2.0 * step);
                let exact = phi.derivative(x, step).unwrap();
                assert!((fd - exact).abs() < 1e-8, "{phi:?} at {x}: {fd} vs {exact}");
            }
        }
        let custom = ScalarPotential::custom(parse("x^3").unwrap(), Vec::new());
        assert!((custom.derivative(2.0, 1e-3).unwrap() - 12.0).abs() < 1e-5);
    }

    #[test]
    fn audit_examples() {
        let g = GridSpec::new(-5.0, 5.0, 101).unwrap();
        let report = majorana_compatible(
            &CouplingSet::scalar(ScalarPotential::linear(1.0)),
            &g,
            1e-12,
        )
        .unwrap();
        assert!(report.compatible);
        assert!(report.offending.is_empty());

        let electric = CouplingSet {
            f1: ScalarPotential::constant(1.0),
            ..CouplingSet::scalar(ScalarPotential::zero())
        };
        let report = majorana_compatible(&electric, &g, 1e-12).unwrap();
        assert!(!report.compatible);
        assert_eq!(
            report.offending,
            [OffendingCoupling {
                coupling: Coupling::F1,
                max_abs: 1.0
            }]
        );

        let pseudo = CouplingSet {
            f3: ScalarPotential::custom(parse("x^2").unwrap(), Vec::new()),
            ..CouplingSet::scalar(ScalarPotential::zero())
        };
        let report = majorana_compatible(&pseudo, &g, 1e-12).unwrap();
        assert!(!report.compatible);
        assert_eq!(report.offending.len(), 1);
        assert_eq!(report.offending[0].coupling, Coupling::F3);
        assert!((report.offending[0].max_abs - 25.0).abs() < 1e-12);
    }

    fn arb_function(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0f64..10.0, n)
    }

    proptest! {
        #[test]
        fn inner_product_symmetric_and_bilinear(
            f in arb_function(21), g in arb_function(21), k in arb_function(21), a in -5.0f64..5.0
        ) {
            let spec = GridSpec::new(-1.0, 2.0, 21).unwrap();
            let f = GridFunction::new(spec, f).unwrap();
            let g = GridFunction::new(spec, g).unwrap();
            let k = GridFunction::new(spec, k).unwrap();
            let fg = inner_product(&f, &g).unwrap();
            prop_assert_eq!(fg, inner_product(&g, &f).unwrap());
            let combo = f.zip_with(&k, |x, y| a * x + y).unwrap();
            let lhs = inner_product(&combo, &g).unwrap();
            let rhs = a * fg + inner_product(&k, &g).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs())) * 100.0);
        }

        #[test]
        fn normalize_is_idempotent(f in arb_function(15)) {
            let spec = GridSpec::new(0.0, 1.0, 15).unwrap();
            let f = GridFunction::new(spec, f).unwrap();
            prop_assume!(f.norm() > 1e-6);
            let once = normalize(&f).unwrap();
            let twice = normalize(&once).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn scalar_only_couplings_always_pass(k in -10.0f64..10.0, n in 3usize..200, tol in 0.0f64..1.0) {
            let g = GridSpec::new(-3.0, 3.0, n).unwrap();
            let report = majorana_compatible(&CouplingSet::scalar(ScalarPotential::linear(k)), &g, tol).unwrap();
            prop_assert!(report.compatible);
        }
    }
}
