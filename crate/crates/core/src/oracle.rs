//! Finite-difference ground truth for the partner Hamiltonians.
//!
//! `H± = −(cħ)² d²/dx² + V±` is discretized with the 3-point Laplacian on the
//! interior grid points (Dirichlet-zero boundaries), and the resulting
//! symmetric tridiagonal matrix is diagonalized with Sturm-sequence bisection
//! followed by inverse iteration. Everything here is independent of the
//! ladder-operator machinery in [`crate::susy`].

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{trapezoid_dot, GridFunction, GridSpec, PhysicalParams, Sector};
use crate::{Error, Result};

/// Interior-point discretization of `−(cħ)² d²/dx² + V`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
    spec: GridSpec,
    sector: Sector,
}

/// Eigenvalue `λ = ℰ²` with its normalized eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub lambda: f64,
    pub eigenfunction: GridFunction,
    pub n: usize,
    pub sector: Sector,
}

/// Builds the 3-point stencil for the sampled potential `v`.
pub fn discretize(
    p: &PhysicalParams,
    v: &GridFunction,
    sector: Sector,
) -> Result<TridiagonalOperator> {
    let spec = *v.spec();
    if spec.n_points() < 5 {
        return Err(Error::InvalidGrid(
            "the oracle needs at least 5 grid points",
        ));
    }
    let h = spec.spacing();
    let kinetic = p.c_hbar() * p.c_hbar() / (h * h);
    let interior = &v.values()[1..spec.n_points() - 1];
    let diagonal = interior.iter().map(|vi| 2.0 * kinetic + vi).collect();
    let off_diagonal = vec![-kinetic; interior.len() - 1];
    Ok(TridiagonalOperator {
        diagonal,
        off_diagonal,
        spec,
        sector,
    })
}

impl TridiagonalOperator {
    pub fn from_parts(
        diagonal: Vec<f64>,
        off_diagonal: Vec<f64>,
        spec: GridSpec,
        sector: Sector,
    ) -> Result<Self> {
        if diagonal.len() + 2 != spec.n_points() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::InvalidArgument(
                "band lengths do not match the grid".into(),
            ));
        }
        Ok(Self {
            diagonal,
            off_diagonal,
            spec,
            sector,
        })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let left = if i > 0 {
                    self.off_diagonal[i - 1].abs()
                } else {
                    0.0
                };
                let right = if i + 1 < n {
                    self.off_diagonal[i].abs()
                } else {
                    0.0
                };
                self.diagonal[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = self.diagonal[i] * v[i];
            if i > 0 {
                s += self.off_diagonal[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off_diagonal[i] * v[i + 1];
            }
            out[i] = s;
        }
    }

    /// Matrix action on a grid function; boundary values are treated as zero
    /// on input and set to zero on output.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if *f.spec() != self.spec {
            return Err(Error::GridMismatch);
        }
        let n = self.dim();
        let mut out = vec![0.0; n + 2];
        self.mul_vec(&f.values()[1..n + 1], &mut out[1..n + 1]);
        GridFunction::new(self.spec, out)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let e2 = if i > 0 {
                self.off_diagonal[i - 1] * self.off_diagonal[i - 1]
            } else {
                0.0
            };
            q = self.diagonal[i] - x - if i > 0 { e2 / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diagonal[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 {
                self.off_diagonal[i - 1].abs()
            } else {
                0.0
            };
            let right = if i + 1 < n {
                self.off_diagonal[i].abs()
            } else {
                0.0
            };
            lo = lo.min(self.diagonal[i] - left - right);
            hi = hi.max(self.diagonal[i] + left + right);
        }
        (lo, hi)
    }

    /// The `j`-th smallest eigenvalue (0-based) by bisection.
    fn bisect(&self, j: usize, lo: f64, hi: f64) -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(M − σ) x = b` in place with partial pivoting.
    fn shifted_solve(&self, sigma: f64, b: &mut [f64]) {
        let n = self.dim();
        // rows of U carry up to two super-diagonals after interchanges
        let mut d = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut l = vec![0.0; n];
        let mut swapped = vec![false; n];

        let mut cur_d = self.diagonal[0] - sigma;
        let mut cur_u1 = if n > 1 { self.off_diagonal[0] } else { 0.0 };
        let mut cur_u2 = 0.0;
        for i in 0..n {
            if i + 1 == n {
                d[i] = cur_d;
                u1[i] = cur_u1;
                u2[i] = cur_u2;
                break;
            }
            let sub = self.off_diagonal[i];
            let next_d = self.diagonal[i + 1] - sigma;
            let next_u1 = if i + 2 < n {
                self.off_diagonal[i + 1]
            } else {
                0.0
            };
            if sub.abs() > cur_d.abs() {
                // pivot on the next row
                swapped[i] = true;
                d[i] = sub;
                u1[i] = next_d;
                u2[i] = next_u1;
                let m = cur_d / sub;
                l[i] = m;
                cur_d = cur_u1 - m * next_d;
                cur_u1 = cur_u2 - m * next_u1;
                cur_u2 = 0.0;
            } else {
                d[i] = cur_d;
                u1[i] = cur_u1;
                u2[i] = cur_u2;
                let m = if cur_d != 0.0 { sub / cur_d } else { 0.0 };
                l[i] = m;
                cur_d = next_d - m * cur_u1;
                cur_u1 = next_u1 - m * cur_u2;
                cur_u2 = 0.0;
            }
        }

        for i in 0..n.saturating_sub(1) {
            if swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= l[i] * b[i];
        }
        let tiny = f64::EPSILON * self.norm_inf().max(f64::MIN_POSITIVE);
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= u1[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= u2[i] * b[i + 2];
            }
            let pivot = if d[i].abs() < tiny {
                tiny.copysign(d[i])
            } else {
                d[i]
            };
            b[i] = s / pivot;
        }
    }
}

/// The `k` smallest eigenpairs in ascending order.
///
/// Eigenvalues come from bisection on the Sturm count; eigenvectors from
/// inverse iteration at the converged shift, re-orthogonalized against the
/// vectors already found. Fully deterministic.
pub fn eigensolve(op: &TridiagonalOperator, k: usize) -> Result<Vec<Eigenpair>> {
    let dim = op.dim();
    if k == 0 || k > dim {
        return Err(Error::EigenCountOutOfRange { requested: k, dim });
    }
    let (lo, hi) = op.gershgorin();
    let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);
    let h = op.spec.spacing();
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut out = Vec::with_capacity(k);
    let mut scratch = vec![0.0; dim];

    for j in 0..k {
        let lambda = op.bisect(j, lo, hi);
        // deterministic, non-symmetric start so no eigenvector is orthogonal to it
        let mut v: Vec<f64> = (0..dim)
            .map(|i| 1.0 + ((i * 7 + j * 3) % 13) as f64 * 0.01)
            .collect();
        for _ in 0..6 {
            for prev in &vectors {
                let dot: f64 = prev.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(prev).for_each(|(a, b)| *a -= dot * b);
            }
            scale_unit(&mut v);
            op.shifted_solve(lambda, &mut v);
            scale_unit(&mut v);
            op.mul_vec(&v, &mut scratch);
            let residual = scratch
                .iter()
                .zip(&v)
                .map(|(mv, vi)| (mv - lambda * vi) * (mv - lambda * vi))
                .sum::<f64>();
            if libm::sqrt(residual) <= 1e-13 * op.norm_inf() {
                break;
            }
        }
        for prev in &vectors {
            let dot: f64 = prev.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(prev).for_each(|(a, b)| *a -= dot * b);
        }
        scale_unit(&mut v);

        let mut padded = Vec::with_capacity(dim + 2);
        padded.push(0.0);
        padded.extend_from_slice(&v);
        padded.push(0.0);
        let scale = 1.0 / libm::sqrt(trapezoid_dot(&padded, &padded, h));
        padded.iter_mut().for_each(|x| *x *= scale);
        let eigenfunction = GridFunction::new(op.spec, padded)?.with_sign_convention();
        vectors.push(v);
        out.push(Eigenpair {
            lambda,
            eigenfunction,
            n: j,
            sector: op.sector,
        });
    }
    Ok(out)
}

fn scale_unit(v: &mut [f64]) {
    let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// `ℰ = sqrt(λ)`; values in `[−tol, 0)` clamp to zero.
///
/// `H±` are factored as `A†A` and `AA†`, so a clearly negative eigenvalue
/// means the discretization failed.
pub fn energy_from_lambda(lambda: f64, tol: f64) -> Result<f64> {
    if lambda < -tol || lambda.is_nan() {
        return Err(Error::NegativeEigenvalue { lambda, tol });
    }
    Ok(libm::sqrt(lambda.max(0.0)))
}

/// How the two partner spectra are expected to line up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralPairing {
    /// `H₋` owns the zero mode: `ℰ⁺ₙ = ℰ⁻ₙ₊₁`.
    UnbrokenMinus,
    /// `H₊` owns the zero mode: `ℰ⁻ₙ = ℰ⁺ₙ₊₁`.
    UnbrokenPlus,
    /// No zero mode: `ℰ⁺ₙ = ℰ⁻ₙ`.
    Broken,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelComparison {
    pub n: usize,
    pub energy_minus: f64,
    pub energy_plus: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsospectralReport {
    pub pairing: SpectralPairing,
    pub levels: Vec<LevelComparison>,
    pub max_abs_diff: f64,
    pub pass: bool,
}

impl IsospectralReport {
    pub fn failing_levels(&self, tol: f64) -> impl Iterator<Item = &LevelComparison> {
        self.levels.iter().filter(move |l| !(l.abs_diff <= tol))
    }
}

/// Compares partner spectra level by level. `levels[i].n` is the index in
/// the sector without the zero mode.
pub fn verify_isospectral(
    minus: &[Eigenpair],
    plus: &[Eigenpair],
    pairing: SpectralPairing,
    tol: f64,
) -> IsospectralReport {
    let energy = |e: &Eigenpair| libm::sqrt(e.lambda.max(0.0));
    let (minus_skip, plus_skip) = match pairing {
        SpectralPairing::UnbrokenMinus => (1, 0),
        SpectralPairing::UnbrokenPlus => (0, 1),
        SpectralPairing::Broken => (0, 0),
    };
    let levels: Vec<LevelComparison> = minus
        .iter()
        .skip(minus_skip)
        .zip(plus.iter().skip(plus_skip))
        .enumerate()
        .map(|(n, (m, p))| {
            let (energy_minus, energy_plus) = (energy(m), energy(p));
            LevelComparison {
                n,
                energy_minus,
                energy_plus,
                abs_diff: (energy_minus - energy_plus).abs(),
            }
        })
        .collect();
    let max_abs_diff = levels.iter().map(|l| l.abs_diff).fold(0.0, f64::max);
    let pass = !levels.is_empty() && levels.iter().all(|l| l.abs_diff <= tol);
    IsospectralReport {
        pairing,
        levels,
        max_abs_diff,
        pass,
    }
}
