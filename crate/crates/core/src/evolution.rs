//! Time-dependent Majorana spinors.
//!
//! States are either assembled from partner eigenfunctions,
//! `ψ₁ = φ⁻ sin(ℰt/ħ + δ)`, `ψ₂ = φ⁺ cos(ℰt/ħ + δ)`, or integrated directly
//! from `ħ∂ₜψ₁ = A†ψ₂`, `−ħ∂ₜψ₂ = Aψ₁` with the implicit midpoint rule.

use alloc::vec;
use alloc::vec::Vec;

use crate::linear::{spinor_linear, LinearModel};
use crate::model::{GridFunction, GridSpec, PhysicalParams, ScalarPotential};
use crate::{Error, Result};

/// Relative norm drift the integrator is expected to stay within.
pub const NORM_DRIFT_TOL: f64 = 1e-6;

/// Steps between stored frames.
pub const DEFAULT_OUTPUT_STRIDE: usize = 50;

/// Time steps per period when the period is known.
pub const STEPS_PER_PERIOD: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateLabel {
    pub n: usize,
    pub delta: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaSpinorState {
    pub psi1: GridFunction,
    pub psi2: GridFunction,
    pub t: f64,
    pub label: Option<StateLabel>,
}

impl MajoranaSpinorState {
    pub fn new(psi1: GridFunction, psi2: GridFunction, t: f64) -> Result<Self> {
        psi1.check_same_grid(&psi2)?;
        Ok(Self {
            psi1,
            psi2,
            t,
            label: None,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        self.psi1.spec()
    }

    /// `∫ (ψ₁² + ψ₂²) dx`
    pub fn norm_squared(&self) -> f64 {
        let n1 = self.psi1.norm();
        let n2 = self.psi2.norm();
        n1 * n1 + n2 * n2
    }

    /// Largest pointwise deviation over both components.
    pub fn max_component_diff(&self, other: &Self) -> Result<f64> {
        Ok(self
            .psi1
            .max_abs_diff(&other.psi1)?
            .max(self.psi2.max_abs_diff(&other.psi2)?))
    }
}

/// Separation-ansatz state with a common phase `δ` in both components.
pub fn assemble_state(
    phi_minus: &GridFunction,
    phi_plus: &GridFunction,
    energy: f64,
    delta: f64,
    t: f64,
    p: &PhysicalParams,
) -> Result<MajoranaSpinorState> {
    phi_minus.check_same_grid(phi_plus)?;
    if !(energy >= 0.0) {
        return Err(Error::InvalidArgument("energy must be non-negative".into()));
    }
    let phase = energy * t / p.hbar() + delta;
    MajoranaSpinorState::new(
        phi_minus.scaled(libm::sin(phase))?,
        phi_plus.scaled(libm::cos(phase))?,
        t,
    )
}

/// Closed-form linear-potential state sampled on `grid` (in `x`).
pub fn linear_state(
    model: &LinearModel,
    n: usize,
    t: f64,
    delta: f64,
    grid: &GridSpec,
) -> Result<MajoranaSpinorState> {
    let values: Vec<_> = grid
        .points()
        .map(|x| spinor_linear(model, n, t, model.y(x), delta))
        .collect();
    let psi1 = GridFunction::new(*grid, values.iter().map(|s| s.psi1).collect())?;
    let psi2 = GridFunction::new(*grid, values.iter().map(|s| s.psi2).collect())?;
    let mut state = MajoranaSpinorState::new(psi1, psi2, t)?;
    state.label = Some(StateLabel {
        n,
        delta,
        energy: crate::linear::spectrum_linear(model, n),
    });
    Ok(state)
}

/// `ρ = ψ₁² + ψ₂²`
pub fn probability_density(s: &MajoranaSpinorState) -> GridFunction {
    s.psi1
        .zip_with(&s.psi2, |a, b| a * a + b * b)
        .expect("components share a grid")
}

/// Repeat time `√2 π / (c √(wn))` of a linear-potential state, equal to
/// `2πħ/ℰₙ`. The density, which depends only on `sin²` and `cos²` of the
/// phase, already repeats after half of it.
pub fn density_period(model: &LinearModel, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::NoPeriod);
    }
    Ok(core::f64::consts::SQRT_2 * core::f64::consts::PI
        / (model.params().c() * libm::sqrt(model.w() * n as f64)))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub densities: Vec<GridFunction>,
    pub norms: Vec<f64>,
}

impl EvolutionTrace {
    pub fn push(&mut self, state: &MajoranaSpinorState) {
        self.times.push(state.t);
        self.norms.push(state.norm_squared());
        self.densities.push(probability_density(state));
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max |N(t) − N(0)| / N(0)`
    pub fn max_norm_drift(&self) -> f64 {
        let Some(&first) = self.norms.first() else {
            return 0.0;
        };
        self.norms
            .iter()
            .map(|n| (n - first).abs() / first)
            .fold(0.0, f64::max)
    }

    /// `‖ρ(tᵢ) − ρ(t₀)‖∞` for every frame.
    pub fn distances_from_start(&self) -> Vec<f64> {
        let Some(first) = self.densities.first() else {
            return Vec::new();
        };
        self.densities
            .iter()
            .map(|d| d.max_abs_diff(first).expect("trace frames share a grid"))
            .collect()
    }
}

/// Samples the closed-form linear-potential state at the given times.
pub fn analytic_trace(
    model: &LinearModel,
    n: usize,
    delta: f64,
    grid: &GridSpec,
    times: &[f64],
) -> Result<EvolutionTrace> {
    let mut trace = EvolutionTrace::default();
    for &t in times {
        trace.push(&linear_state(model, n, t, delta, grid)?);
    }
    Ok(trace)
}

/// `max_t ‖ρ(t) − ρ(0)‖∞` over the trace.
pub fn stationarity_metric(trace: &EvolutionTrace) -> f64 {
    trace.distances_from_start().into_iter().fold(0.0, f64::max)
}

/// First time after `t₀` at which the density comes back to its initial
/// profile: the first local minimum of `‖ρ(t) − ρ(t₀)‖∞` once the trace has
/// moved at least halfway to its largest excursion. `None` for stationary
/// traces or when no return is sampled.
pub fn first_return_time(trace: &EvolutionTrace) -> Option<f64> {
    let d = trace.distances_from_start();
    let peak = d.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return None;
    }
    let left = d.iter().position(|&v| v > 0.5 * peak)?;
    (left.max(1)..d.len().saturating_sub(1))
        .find(|&i| d[i] < 0.5 * peak && d[i] <= d[i - 1] && d[i] <= d[i + 1])
        .map(|i| trace.times[i])
}

/// `T/2000` when a period is known, otherwise `0.1 h / (cħ) · min(1, 1/max|W|)`.
pub fn default_dt(
    period: Option<f64>,
    p: &PhysicalParams,
    phi: &ScalarPotential,
    grid: &GridSpec,
) -> Result<f64> {
    if let Some(period) = period {
        return Ok(period / STEPS_PER_PERIOD as f64);
    }
    let mut w_max: f64 = 0.0;
    for x in grid.points() {
        w_max = w_max.max((p.rest_energy() + phi.eval(x)?).abs());
    }
    let scale = if w_max > 1.0 { 1.0 / w_max } else { 1.0 };
    Ok(0.1 * grid.spacing() / p.c_hbar() * scale)
}

/// Uniform time stepping that lands exactly on `t_final`: the requested `dt`
/// is shrunk to `t_final / steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub steps: usize,
    pub dt: f64,
}

impl StepPlan {
    pub fn new(t_final: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidArgument(
                "t_final must be non-negative".into(),
            ));
        }
        let ratio = t_final / dt;
        let steps = if (ratio - libm::round(ratio)).abs() < 1e-9 * ratio.max(1.0) {
            libm::round(ratio) as usize
        } else {
            libm::ceil(ratio) as usize
        };
        Ok(Self {
            steps,
            dt: if steps > 0 {
                t_final / steps as f64
            } else {
                dt
            },
        })
    }

    fn is_frame(step: usize, steps: usize, stride: usize) -> bool {
        step.is_multiple_of(stride) || step == steps
    }

    /// Times of the stored frames, starting at `t0`.
    pub fn frame_times(&self, t0: f64, stride: usize) -> Vec<f64> {
        (0..=self.steps)
            .filter(|&s| Self::is_frame(s, self.steps, stride.max(1)))
            .map(|s| t0 + s as f64 * self.dt)
            .collect()
    }
}

/// Result of a direct integration.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeRun {
    pub trace: EvolutionTrace,
    pub final_state: MajoranaSpinorState,
    pub steps: usize,
    pub dt: f64,
}

/// Symmetric pentadiagonal LDLᵀ factorization.
struct BandedLdl {
    d: Vec<f64>,
    l1: Vec<f64>,
    l2: Vec<f64>,
}

impl BandedLdl {
    /// `s0` diagonal, `s1[i] = S(i, i+1)`, `s2[i] = S(i, i+2)`.
    fn factor(s0: &[f64], s1: &[f64], s2: &[f64]) -> Self {
        let n = s0.len();
        let mut d = vec![0.0; n];
        let mut l1 = vec![0.0; n];
        let mut l2 = vec![0.0; n];
        for i in 0..n {
            if i >= 2 {
                l2[i] = s2[i - 2] / d[i - 2];
            }
            if i >= 1 {
                let coupling = if i >= 2 {
                    l2[i] * l1[i - 1] * d[i - 2]
                } else {
                    0.0
                };
                l1[i] = (s1[i - 1] - coupling) / d[i - 1];
            }
            d[i] = s0[i]
                - if i >= 1 {
                    l1[i] * l1[i] * d[i - 1]
                } else {
                    0.0
                }
                - if i >= 2 {
                    l2[i] * l2[i] * d[i - 2]
                } else {
                    0.0
                };
        }
        Self { d, l1, l2 }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n {
            if i >= 1 {
                b[i] -= self.l1[i] * b[i - 1];
            }
            if i >= 2 {
                b[i] -= self.l2[i] * b[i - 2];
            }
        }
        for i in 0..n {
            b[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            if i + 1 < n {
                b[i] -= self.l1[i + 1] * b[i + 1];
            }
            if i + 2 < n {
                b[i] -= self.l2[i + 2] * b[i + 2];
            }
        }
    }
}

/// Interior-point ladder operator `A = cħ D + W` with the central difference
/// `D` and zero Dirichlet data, so that `A† = Aᵀ` exactly.
struct DiscreteLadder {
    beta: f64,
    w: Vec<f64>,
}

impl DiscreteLadder {
    fn apply(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        for i in 0..n {
            let right = if i + 1 < n { u[i + 1] } else { 0.0 };
            let left = if i > 0 { u[i - 1] } else { 0.0 };
            out[i] = self.beta * (right - left) + self.w[i] * u[i];
        }
    }

    fn apply_transpose(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        for i in 0..n {
            let right = if i + 1 < n { u[i + 1] } else { 0.0 };
            let left = if i > 0 { u[i - 1] } else { 0.0 };
            out[i] = -self.beta * (right - left) + self.w[i] * u[i];
        }
    }

    /// Bands of `AᵀA`.
    fn normal_bands(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.w.len();
        let b2 = self.beta * self.beta;
        let s0 = (0..n)
            .map(|i| {
                self.w[i] * self.w[i]
                    + if i >= 1 { b2 } else { 0.0 }
                    + if i + 1 < n { b2 } else { 0.0 }
            })
            .collect();
        let s1 = (0..n.saturating_sub(1))
            .map(|i| self.beta * (self.w[i] - self.w[i + 1]))
            .collect();
        let s2 = vec![-b2; n.saturating_sub(2)];
        (s0, s1, s2)
    }
}

/// Integrates the first-order system from `initial.t` to `initial.t + t_final`
/// with the implicit midpoint rule, storing a frame every `stride` steps.
///
/// Each step eliminates `ψ₂` and solves `(1 + a²AᵀA) ψ₁ = r`, `a = dt/2ħ`,
/// with a pentadiagonal factorization computed once. The scheme is exactly
/// norm-preserving for the skew-symmetric discrete generator.
pub fn evolve_pde(
    initial: &MajoranaSpinorState,
    p: &PhysicalParams,
    phi: &ScalarPotential,
    t_final: f64,
    dt: f64,
) -> Result<PdeRun> {
    evolve_pde_with_stride(initial, p, phi, t_final, dt, DEFAULT_OUTPUT_STRIDE)
}

pub fn evolve_pde_with_stride(
    initial: &MajoranaSpinorState,
    p: &PhysicalParams,
    phi: &ScalarPotential,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<PdeRun> {
    if stride == 0 {
        return Err(Error::InvalidArgument(
            "output stride must be at least 1".into(),
        ));
    }
    let spec = *initial.spec();
    let n_int = spec.n_points() - 2;
    let h = spec.spacing();

    let StepPlan { steps, dt } = StepPlan::new(t_final, dt)?;

    let w = (1..=n_int)
        .map(|i| Ok(p.rest_energy() + phi.eval(spec.x(i))?))
        .collect::<Result<Vec<_>>>()?;
    let ladder = DiscreteLadder {
        beta: p.c_hbar() / (2.0 * h),
        w,
    };
    let a = dt / (2.0 * p.hbar());
    let (mut s0, mut s1, mut s2) = ladder.normal_bands();
    s0.iter_mut().for_each(|v| *v = 1.0 + a * a * *v);
    s1.iter_mut().for_each(|v| *v *= a * a);
    s2.iter_mut().for_each(|v| *v *= a * a);
    let factor = BandedLdl::factor(&s0, &s1, &s2);

    let mut u1: Vec<f64> = initial.psi1.values()[1..=n_int].to_vec();
    let mut u2: Vec<f64> = initial.psi2.values()[1..=n_int].to_vec();
    let mut r1 = vec![0.0; n_int];
    let mut r2 = vec![0.0; n_int];
    let mut tmp = vec![0.0; n_int];

    let to_state = |u1: &[f64], u2: &[f64], t: f64| -> Result<MajoranaSpinorState> {
        let pad = |u: &[f64]| {
            let mut v = Vec::with_capacity(n_int + 2);
            v.push(0.0);
            v.extend_from_slice(u);
            v.push(0.0);
            v
        };
        MajoranaSpinorState::new(
            GridFunction::new(spec, pad(u1))?,
            GridFunction::new(spec, pad(u2))?,
            t,
        )
    };
    let euclid = |u1: &[f64], u2: &[f64]| {
        h * (u1.iter().map(|v| v * v).sum::<f64>() + u2.iter().map(|v| v * v).sum::<f64>())
    };

    let mut trace = EvolutionTrace::default();
    let start = to_state(&u1, &u2, initial.t)?;
    trace.push(&start);
    let norm0 = euclid(&u1, &u2);
    if !(norm0 > 0.0) {
        return Err(Error::DegenerateFunction);
    }

    for step in 1..=steps {
        // r1 = u1 + a Aᵀu2, r2 = u2 − a A u1
        ladder.apply_transpose(&u2, &mut tmp);
        r1.iter_mut()
            .zip(&u1)
            .zip(&tmp)
            .for_each(|((r, u), t)| *r = u + a * t);
        ladder.apply(&u1, &mut tmp);
        r2.iter_mut()
            .zip(&u2)
            .zip(&tmp)
            .for_each(|((r, u), t)| *r = u - a * t);

        // (1 + a²AᵀA) u1' = r1 + a Aᵀ r2
        ladder.apply_transpose(&r2, &mut tmp);
        u1.iter_mut()
            .zip(&r1)
            .zip(&tmp)
            .for_each(|((u, r), t)| *u = r + a * t);
        factor.solve(&mut u1);
        // u2' = r2 − a A u1'
        ladder.apply(&u1, &mut tmp);
        u2.iter_mut()
            .zip(&r2)
            .zip(&tmp)
            .for_each(|((u, r), t)| *u = r - a * t);

        let norm = euclid(&u1, &u2);
        if !norm.is_finite() {
            return Err(Error::Instability { step });
        }
        let drift = (norm - norm0).abs() / norm0;
        if drift > 100.0 * NORM_DRIFT_TOL {
            return Err(Error::Divergence { step, drift });
        }
        if StepPlan::is_frame(step, steps, stride) {
            trace.push(&to_state(&u1, &u2, initial.t + step as f64 * dt)?);
        }
    }

    let mut final_state = to_state(&u1, &u2, initial.t + steps as f64 * dt)?;
    final_state.label = initial.label;
    Ok(PdeRun {
        trace,
        final_state,
        steps,
        dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::{eigenstate_minus, DEFAULT_DELTA};
    use core::f64::consts::PI;

    fn unit_model() -> LinearModel {
        LinearModel::new(1.0, PhysicalParams::natural(1.0).unwrap()).unwrap()
    }

    #[test]
    fn assembly_examples() {
        let p = PhysicalParams::natural(1.0).unwrap();
        let m = unit_model();
        let g = m.grid(10.0, 201).unwrap();
        let minus = GridFunction::from_fn(g, |x| eigenstate_minus(&m, 0, m.y(x))).unwrap();
        let plus = GridFunction::zeros(g);
        let s = assemble_state(&minus, &plus, 0.0, DEFAULT_DELTA, 3.0, &p).unwrap();
        assert_eq!(s.psi1, minus);
        assert!(s.psi2.sup_norm() == 0.0);

        let minus = GridFunction::from_fn(g, |x| eigenstate_minus(&m, 1, m.y(x))).unwrap();
        let plus = GridFunction::from_fn(g, |x| eigenstate_minus(&m, 0, m.y(x))).unwrap();
        let e = 2f64.sqrt();
        let s = assemble_state(&minus, &plus, e, 0.0, 0.0, &p).unwrap();
        assert!(s.psi1.sup_norm() == 0.0);
        assert_eq!(s.psi2, plus);
        let s = assemble_state(&minus, &plus, e, 0.0, PI / (2.0 * e), &p).unwrap();
        assert!(s.psi1.max_abs_diff(&minus).unwrap() < 1e-15);
        assert!(s.psi2.sup_norm() < 1e-15);

        let other = GridFunction::zeros(m.grid(10.0, 101).unwrap());
        assert_eq!(
            assemble_state(&minus, &other, e, 0.0, 0.0, &p),
            Err(Error::GridMismatch)
        );
    }

    #[test]
    fn assembly_matches_closed_form() {
        let p = PhysicalParams::natural(1.0).unwrap();
        let m = unit_model();
        let g = m.grid(10.0, 401).unwrap();
        let minus = GridFunction::from_fn(g, |x| eigenstate_minus(&m, 2, m.y(x))).unwrap();
        let plus = GridFunction::from_fn(g, |x| eigenstate_minus(&m, 1, m.y(x))).unwrap();
        for t in [0.0, 0.4, 2.5] {
            let a = assemble_state(&minus, &plus, 2.0, 0.3, t, &p).unwrap();
            let b = linear_state(&m, 2, t, 0.3, &g).unwrap();
            assert!(a.max_component_diff(&b).unwrap() < 1e-14);
        }
    }

    #[test]
    fn density_examples() {
        let m = unit_model();
        let g = m.grid(10.0, 2001).unwrap();
        let ground = linear_state(&m, 0, 0.0, DEFAULT_DELTA, &g).unwrap();
        let rho = probability_density(&ground);
        let expected =
            GridFunction::from_fn(g, |x| (m.w() / PI).sqrt() * (-m.w() * m.y(x).powi(2)).exp())
                .unwrap();
        assert!(rho.max_abs_diff(&expected).unwrap() < 1e-14);

        let s = linear_state(&m, 1, 0.0, DEFAULT_DELTA, &g).unwrap();
        let rho = probability_density(&s);
        assert!(rho.values()[1000] <= 1e-30);
        assert!(rho.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn period_examples() {
        let m = unit_model();
        assert!((density_period(&m, 1).unwrap() - 2f64.sqrt() * PI).abs() < 1e-14);
        assert!((density_period(&m, 2).unwrap() - PI).abs() < 1e-14);
        assert_eq!(density_period(&m, 0), Err(Error::NoPeriod));
        for n in 1..5 {
            let t = density_period(&m, n).unwrap();
            let e = crate::linear::spectrum_linear(&m, n);
            assert!((t * e / m.params().hbar() - 2.0 * PI).abs() < 1e-13);
        }
    }

    #[test]
    fn stationarity_examples() {
        let m = unit_model();
        let g = m.grid(10.0, 1001).unwrap();
        let t = density_period(&m, 1).unwrap();
        let times: Vec<f64> = (0..=200).map(|i| i as f64 * t / 200.0).collect();
        let ground = analytic_trace(&m, 0, DEFAULT_DELTA, &g, &times).unwrap();
        assert!(stationarity_metric(&ground) <= 1e-12);
        assert_eq!(first_return_time(&ground), None);

        let excited = analytic_trace(&m, 1, DEFAULT_DELTA, &g, &times).unwrap();
        assert!(stationarity_metric(&excited) >= 0.1 * m.w().sqrt());
        assert!(excited.max_norm_drift() <= 1e-10);

        let single = analytic_trace(&m, 1, DEFAULT_DELTA, &g, &times[..1]).unwrap();
        assert_eq!(stationarity_metric(&single), 0.0);
    }

    #[test]
    fn ldl_solves_pentadiagonal() {
        let s0 = [4.0, 5.0, 6.0, 5.0, 4.0];
        let s1 = [1.0, -0.5, 0.3, 0.7];
        let s2 = [0.2, -0.1, 0.4];
        let x = [1.0, -2.0, 0.5, 3.0, -1.0];
        let mut b = [0.0; 5];
        for i in 0..5 {
            b[i] = s0[i] * x[i];
            if i + 1 < 5 {
                b[i] += s1[i] * x[i + 1];
            }
            if i >= 1 {
                b[i] += s1[i - 1] * x[i - 1];
            }
            if i + 2 < 5 {
                b[i] += s2[i] * x[i + 2];
            }
            if i >= 2 {
                b[i] += s2[i - 2] * x[i - 2];
            }
        }
        BandedLdl::factor(&s0, &s1, &s2).solve(&mut b);
        for (a, e) in b.iter().zip(&x) {
            assert!((a - e).abs() < 1e-14);
        }
    }

    #[test]
    fn pde_rejects_bad_arguments() {
        let m = unit_model();
        let g = m.grid(10.0, 101).unwrap();
        let s = linear_state(&m, 1, 0.0, DEFAULT_DELTA, &g).unwrap();
        let p = *m.params();
        let phi = ScalarPotential::linear(1.0);
        assert!(evolve_pde(&s, &p, &phi, 1.0, 0.0).is_err());
        assert!(evolve_pde(&s, &p, &phi, -1.0, 0.1).is_err());
        let empty =
            MajoranaSpinorState::new(GridFunction::zeros(g), GridFunction::zeros(g), 0.0).unwrap();
        assert_eq!(
            evolve_pde(&empty, &p, &phi, 1.0, 0.1),
            Err(Error::DegenerateFunction)
        );
    }

    #[test]
    fn pde_ground_state_is_stationary() {
        let m = unit_model();
        let g = m.grid(10.0, 10001).unwrap();
        let s = linear_state(&m, 0, 0.0, DEFAULT_DELTA, &g).unwrap();
        let run = evolve_pde(&s, m.params(), &ScalarPotential::linear(1.0), 5.0, 0.01).unwrap();
        assert!(
            stationarity_metric(&run.trace) <= 1e-6,
            "{}",
            stationarity_metric(&run.trace)
        );
        assert!(run.trace.max_norm_drift() <= NORM_DRIFT_TOL);
    }

    #[test]
    fn pde_free_massive_conserves_norm() {
        let p = PhysicalParams::natural(1.0).unwrap();
        let g = GridSpec::new(-30.0, 30.0, 1201).unwrap();
        let psi1 = GridFunction::from_fn(g, |x| (-x * x / 2.0).exp()).unwrap();
        let psi2 = GridFunction::from_fn(g, |x| 0.5 * (-(x - 1.0).powi(2)).exp()).unwrap();
        let s = MajoranaSpinorState::new(psi1, psi2, 0.0).unwrap();
        let phi = ScalarPotential::zero();
        let dt = default_dt(None, &p, &phi, &g).unwrap();
        let run = evolve_pde(&s, &p, &phi, 10.0, dt).unwrap();
        assert!(run.trace.max_norm_drift() <= NORM_DRIFT_TOL);
        assert!((run.final_state.t - 10.0).abs() < 1e-12);
    }

    #[test]
    fn pde_trace_frames_follow_stride() {
        let m = unit_model();
        let g = m.grid(8.0, 201).unwrap();
        let s = linear_state(&m, 1, 0.0, DEFAULT_DELTA, &g).unwrap();
        let run = evolve_pde_with_stride(
            &s,
            m.params(),
            &ScalarPotential::linear(1.0),
            1.05,
            0.01,
            10,
        )
        .unwrap();
        assert_eq!(run.steps, 105);
        assert_eq!(run.trace.len(), 1 + 10 + 1);
        assert!((run.trace.times.last().unwrap() - 1.05).abs() < 1e-12);
        assert_eq!(
            StepPlan::new(1.05, 0.01).unwrap().frame_times(0.0, 10),
            run.trace.times
        );
    }
}
