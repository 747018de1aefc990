//! Colored signature function `σ_L(ω)` and its extension `σ̂_L` through the
//! doubled link `L^±`.

use nalgebra::DMatrix;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{inertia_with, EigenSolver, HermitianForm, DEFAULT_ZERO_THRESHOLD};
use crate::seifert::ColoredSeifertData;
use crate::torus::{Angle, TorusPoint};
use crate::Complex64;

/// Signature of `H(ω)` together with its nullity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignatureValue {
    pub signature: i64,
    pub nullity: usize,
    /// `ω` has a coordinate equal to 1 and `H(ω)` is singular there; the
    /// honest value at such points is [`sigma_hat`].
    pub degenerate: bool,
}

/// Options shared by all signature evaluations.
#[derive(Clone, Copy)]
pub struct EvalOptions {
    pub solver: &'static dyn EigenSolver,
    pub zero_threshold: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            solver: crate::hermitian::default_solver(),
            zero_threshold: DEFAULT_ZERO_THRESHOLD,
        }
    }
}

impl std::fmt::Debug for EvalOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EvalOptions")
            .field("solver", &self.solver.name())
            .field("zero_threshold", &self.zero_threshold)
            .finish()
    }
}

/// `H(ω) = Σ_ε Π_i (1 - conj(ω_i)^{ε_i}) A^ε`.
pub fn cf_matrix(d: &ColoredSeifertData, omega: &TorusPoint) -> Result<HermitianForm> {
    if omega.len() != d.colors() {
        return Err(Error::DimensionMismatch {
            expected: d.colors(),
            got: omega.len(),
        });
    }
    let m = d.dim();
    if m == 0 {
        return Ok(HermitianForm::empty());
    }
    let one = Complex64::new(1.0, 0.0);
    // factors[i] = (1 - conj(ω_i), 1 - ω_i), i.e. the ε_i = +1 and -1 cases
    let factors: Vec<(Complex64, Complex64)> = omega
        .coords()
        .iter()
        .map(|a| (one - a.neg().to_unit(), one - a.to_unit()))
        .collect();
    let mut h = DMatrix::<Complex64>::zeros(m, m);
    for (eps, a) in d.iter() {
        let coeff = factors.iter().enumerate().fold(one, |acc, (i, f)| {
            acc * if eps.sign(i) > 0 { f.0 } else { f.1 }
        });
        if coeff == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (hij, &aij) in h.iter_mut().zip(a.iter()) {
            if aij != 0 {
                *hij += coeff * aij as f64;
            }
        }
    }
    HermitianForm::new(h)
}

pub fn cf_signature(d: &ColoredSeifertData, omega: &TorusPoint) -> Result<SignatureValue> {
    cf_signature_with(&EvalOptions::default(), d, omega)
}

pub fn cf_signature_with(
    opts: &EvalOptions,
    d: &ColoredSeifertData,
    omega: &TorusPoint,
) -> Result<SignatureValue> {
    let h = cf_matrix(d, omega)?;
    let r = inertia_with(opts.solver, &h, opts.zero_threshold)?;
    Ok(SignatureValue {
        signature: r.signature,
        nullity: r.nullity,
        degenerate: r.nullity > 0 && !omega.is_punctured(),
    })
}

/// The map `𝕋ⁿ → 𝕋²ⁿ_*` with `z_i · z_{n+i} = ω_i` and no coordinate equal to 1.
///
/// `z_i = -√-1·ω_i` and `z_{n+i} = √-1`, except at `ω_i = √-1` where
/// `z_i = -√-1` and `z_{n+i} = -1`.
pub fn z_map(omega: &TorusPoint) -> TorusPoint {
    let quarter = Rational64::new(1, 4);
    let n = omega.len();
    let mut first = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(n);
    for a in omega.coords() {
        let shifted = a.add(&Angle::Exact(Rational64::new(3, 4)));
        // A float within rounding of 1/4 would otherwise land on angle 0.
        if a.equals_ratio(quarter) || shifted.is_zero() {
            first.push(Angle::Exact(Rational64::new(3, 4)));
            second.push(Angle::Exact(Rational64::new(1, 2)));
        } else {
            first.push(shifted);
            second.push(Angle::Exact(quarter));
        }
    }
    first.extend(second);
    TorusPoint::new(first)
}

/// `σ̂_L(ω) = σ_{L^±}(z(ω))`, where `d_pm` carries the `2n` colors of `L^±`
/// ordered `(L₁⁺, …, Lₙ⁺, L₁⁻, …, Lₙ⁻)`.
pub fn sigma_hat(d_pm: &ColoredSeifertData, omega: &TorusPoint) -> Result<SignatureValue> {
    sigma_hat_with(&EvalOptions::default(), d_pm, omega)
}

pub fn sigma_hat_with(
    opts: &EvalOptions,
    d_pm: &ColoredSeifertData,
    omega: &TorusPoint,
) -> Result<SignatureValue> {
    if !d_pm.colors().is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "L± data must have an even number of colors, got {}",
            d_pm.colors()
        )));
    }
    if d_pm.colors() != 2 * omega.len() {
        return Err(Error::DimensionMismatch {
            expected: d_pm.colors() / 2,
            got: omega.len(),
        });
    }
    cf_signature_with(opts, d_pm, &z_map(omega))
}
