//! Closed forms for the linear scalar potential `φ(x) = kx`.
//!
//! With `y = x + mc²/k` and `w = |k|/(cħ)` the partner Hamiltonians are
//! shifted harmonic oscillators, `ℰₙ² = 2cħ|k|n`, and the eigenfunctions are
//! Hermite–Gaussians. For `k < 0` the zero mode moves to the plus sector and
//! the spinor is obtained by exchanging its two rows.

use core::f64::consts::{LN_2, PI};

use crate::model::{GridSpec, PhysicalParams};
use crate::{Error, Result};

/// Initial phase used when none is given.
pub const DEFAULT_DELTA: f64 = core::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearModel {
    k: f64,
    params: PhysicalParams,
}

impl LinearModel {
    pub fn new(k: f64, params: PhysicalParams) -> Result<Self> {
        if !k.is_finite() || k == 0.0 {
            return Err(Error::InvalidArgument(
                "the slope k must be finite and non-zero".into(),
            ));
        }
        Ok(Self { k, params })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    /// `w = |k| / (cħ)`, an inverse length squared.
    pub fn w(&self) -> f64 {
        self.k.abs() / self.params.c_hbar()
    }

    /// `mc²/k`, so that `y = x + shift`.
    pub fn shift(&self) -> f64 {
        self.params.rest_energy() / self.k
    }

    pub fn y(&self, x: f64) -> f64 {
        x + self.shift()
    }

    pub fn x(&self, y: f64) -> f64 {
        y - self.shift()
    }

    /// The same model with `|k|`, whose spinors the `k < 0` case is built from.
    pub fn mirrored(&self) -> Self {
        Self {
            k: self.k.abs(),
            params: self.params,
        }
    }

    /// Half-width in `y` beyond which the ground state is below `1e−12`.
    pub fn default_half_width(&self) -> f64 {
        10.0 / libm::sqrt(self.w())
    }

    /// Grid in `x` covering `y ∈ [−half_width, half_width]`.
    pub fn grid(&self, half_width: f64, n_points: usize) -> Result<GridSpec> {
        GridSpec::new(self.x(-half_width), self.x(half_width), n_points)
    }
}

/// Physicists' Hermite polynomial by the three-term recurrence.
pub fn hermite(n: usize, z: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * z;
    for j in 1..n {
        let next = 2.0 * z * cur - 2.0 * j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `(w/π)^{1/4} exp(−wy²/2) Hₙ(√w y) / sqrt(2ⁿ n!)`, normalization in log space.
fn hermite_function(w: f64, n: usize, y: f64) -> f64 {
    let log_norm =
        0.25 * libm::log(w / PI) - 0.5 * (n as f64 * LN_2 + libm::lgamma(n as f64 + 1.0));
    let h = hermite(n, libm::sqrt(w) * y);
    if h == 0.0 {
        return 0.0;
    }
    let log_mag = log_norm - 0.5 * w * y * y + libm::log(h.abs());
    libm::exp(log_mag).copysign(h)
}

/// `φ⁻ₙ(y)`, L2-normalized over the real line.
pub fn eigenstate_minus(model: &LinearModel, n: usize, y: f64) -> f64 {
    hermite_function(model.w(), n, y)
}

/// `φ⁺ₙ(y) = φ⁻ₙ₋₁(y)`, labelled by the energy `ℰₙ` it shares with `φ⁻ₙ`.
pub fn eigenstate_plus(model: &LinearModel, n: usize, y: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::NoPlusGroundState);
    }
    Ok(hermite_function(model.w(), n - 1, y))
}

/// `ℰₙ = sqrt(2cħ|k|n)`, non-negative root.
pub fn spectrum_linear(model: &LinearModel, n: usize) -> f64 {
    libm::sqrt(2.0 * model.params.c_hbar() * model.k.abs() * n as f64)
}

/// Point value of a Majorana spinor `(ψ₁, ψ₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorValue {
    pub psi1: f64,
    pub psi2: f64,
}

/// Row exchange taking a `|k|` solution to the `k < 0` solution. An involution.
pub fn transform_negative_k(s: SpinorValue) -> SpinorValue {
    SpinorValue {
        psi1: s.psi2,
        psi2: s.psi1,
    }
}

/// `Ψₙ(t, y)` for the model's signed slope.
///
/// For `n ≥ 1`: `ψ₁ = φ⁻ₙ sin(c√(2wn) t + δ)`, `ψ₂ = φ⁺ₙ cos(c√(2wn) t + δ)`.
/// For `n = 0`: `(φ⁻₀, 0)`, independent of `t` and `δ`. When `k < 0` the
/// rows are exchanged.
pub fn spinor_linear(model: &LinearModel, n: usize, t: f64, y: f64, delta: f64) -> SpinorValue {
    let w = model.w();
    let s = if n == 0 {
        SpinorValue {
            psi1: hermite_function(w, 0, y),
            psi2: 0.0,
        }
    } else {
        let phase = model.params.c() * libm::sqrt(2.0 * w * n as f64) * t + delta;
        SpinorValue {
            psi1: hermite_function(w, n, y) * libm::sin(phase),
            psi2: hermite_function(w, n - 1, y) * libm::cos(phase),
        }
    };
    if model.k < 0.0 {
        transform_negative_k(s)
    } else {
        s
    }
}
