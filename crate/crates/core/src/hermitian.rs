//! Inertia of complex Hermitian forms.
//!
//! Eigenvalues are computed by one of the registered [`EigenSolver`]s and then
//! classified against a scale-relative zero threshold. The default solver is
//! the Householder tridiagonalization + implicit QR routine from `nalgebra`;
//! a cyclic Jacobi solver is registered alongside it and serves as an
//! independent cross-check.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::Complex64;

/// Default relative zero threshold for [`inertia`].
pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-9;

/// A square complex matrix that equals its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm {
    entries: DMatrix<Complex64>,
}

impl HermitianForm {
    /// Accepts `entries` when `entries[i][j]` matches `conj(entries[j][i])`
    /// within `1e-12 * (1 + max |entry|)`. The lower triangle is then
    /// overwritten by the conjugate of the upper one so the stored form is
    /// exactly Hermitian.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput(
                "Hermitian form has a NaN or infinite entry".into(),
            ));
        }
        let max = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = 1e-12 * (1.0 + max);
        let n = entries.nrows();
        let mut entries = entries;
        for i in 0..n {
            for j in i..n {
                let deviation = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                if deviation > tol {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
                if i == j {
                    entries[(i, i)].im = 0.0;
                } else {
                    entries[(j, i)] = entries[(i, j)].conj();
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn from_real(entries: &DMatrix<f64>) -> Result<Self> {
        Self::new(entries.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn empty() -> Self {
        Self {
            entries: DMatrix::zeros(0, 0),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `max(1, largest absolute Gershgorin row sum)`.
    pub fn spectral_scale(&self) -> f64 {
        self.entries
            .row_iter()
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(1.0, f64::max)
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &HermitianForm) -> HermitianForm {
        let (a, b) = (self.dim(), other.dim());
        let mut m = DMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.entries);
        m.view_mut((a, a), (b, b)).copy_from(&other.entries);
        HermitianForm { entries: m }
    }

    /// The congruent form `P* H P`.
    pub fn congruent(&self, p: &DMatrix<Complex64>) -> Result<HermitianForm> {
        if p.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.nrows(),
            });
        }
        HermitianForm::new(p.adjoint() * &self.entries * p)
    }
}

/// Signature and nullity of a Hermitian form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct InertiaResult {
    pub signature: i64,
    pub nullity: usize,
    pub n_pos: usize,
    pub n_neg: usize,
}

impl InertiaResult {
    pub const ZERO: InertiaResult = InertiaResult {
        signature: 0,
        nullity: 0,
        n_pos: 0,
        n_neg: 0,
    };

    pub fn dim(&self) -> usize {
        self.n_pos + self.n_neg + self.nullity
    }

    fn from_counts(n_pos: usize, n_neg: usize, nullity: usize) -> Self {
        InertiaResult {
            signature: n_pos as i64 - n_neg as i64,
            nullity,
            n_pos,
            n_neg,
        }
    }
}

impl std::ops::Add for InertiaResult {
    type Output = InertiaResult;

    fn add(self, rhs: InertiaResult) -> InertiaResult {
        InertiaResult::from_counts(
            self.n_pos + rhs.n_pos,
            self.n_neg + rhs.n_neg,
            self.nullity + rhs.nullity,
        )
    }
}

/// A symmetric eigensolver usable for inertia computations.
pub trait EigenSolver: Send + Sync {
    /// Registry key.
    fn name(&self) -> &'static str;

    /// All eigenvalues of `form`, in any order.
    fn eigenvalues(&self, form: &HermitianForm) -> Vec<f64>;
}

/// Householder reduction to real tridiagonal form followed by implicit
/// symmetric QR (via `nalgebra`).
#[derive(Debug, Default, Clone, Copy)]
pub struct HouseholderQr;

impl EigenSolver for HouseholderQr {
    fn name(&self) -> &'static str {
        "householder"
    }

    fn eigenvalues(&self, form: &HermitianForm) -> Vec<f64> {
        match form.dim() {
            0 => Vec::new(),
            1 => vec![form.entries[(0, 0)].re],
            _ => form
                .entries
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .collect(),
        }
    }
}

/// Cyclic Jacobi rotations, each preceded by a diagonal phase change that
/// makes the pivot real.
#[derive(Debug, Clone, Copy)]
pub struct CyclicJacobi {
    pub max_sweeps: usize,
}

impl Default for CyclicJacobi {
    fn default() -> Self {
        CyclicJacobi { max_sweeps: 100 }
    }
}

impl EigenSolver for CyclicJacobi {
    fn name(&self) -> &'static str {
        "jacobi"
    }

    fn eigenvalues(&self, form: &HermitianForm) -> Vec<f64> {
        let n = form.dim();
        let mut h = form.entries.clone();
        let total: f64 = h.iter().map(|z| z.norm_sqr()).sum();
        let eps = f64::EPSILON * f64::EPSILON * total.max(f64::MIN_POSITIVE);

        for _ in 0..self.max_sweeps {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| h[(i, j)].norm_sqr())
                .sum();
            if off <= eps {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let g = h[(p, q)].norm();
                    if g == 0.0 {
                        continue;
                    }
                    // Scale column q by conj(phase) and row q by phase so that
                    // h[p][q] becomes the real number g.
                    let phase = h[(p, q)] / g;
                    for k in 0..n {
                        h[(k, q)] *= phase.conj();
                    }
                    for k in 0..n {
                        h[(q, k)] *= phase;
                    }
                    h[(p, q)] = Complex64::new(g, 0.0);
                    h[(q, p)] = Complex64::new(g, 0.0);

                    let app = h[(p, p)].re;
                    let aqq = h[(q, q)].re;
                    let theta = (aqq - app) / (2.0 * g);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let kp = h[(k, p)];
                        let kq = h[(k, q)];
                        h[(k, p)] = kp * c - kq * s;
                        h[(k, q)] = kp * s + kq * c;
                    }
                    for k in 0..n {
                        let pk = h[(p, k)];
                        let qk = h[(q, k)];
                        h[(p, k)] = pk * c - qk * s;
                        h[(q, k)] = pk * s + qk * c;
                    }
                    h[(p, q)] = Complex64::new(0.0, 0.0);
                    h[(q, p)] = Complex64::new(0.0, 0.0);
                }
            }
        }
        (0..n).map(|i| h[(i, i)].re).collect()
    }
}

static HOUSEHOLDER: HouseholderQr = HouseholderQr;
static JACOBI: CyclicJacobi = CyclicJacobi { max_sweeps: 100 };
static SOLVERS: [&dyn EigenSolver; 2] = [&HOUSEHOLDER, &JACOBI];

/// Names of the registered solvers; the first one is the default.
pub fn solver_names() -> Vec<&'static str> {
    SOLVERS.iter().map(|s| s.name()).collect()
}

pub fn solver_by_name(name: &str) -> Option<&'static dyn EigenSolver> {
    SOLVERS.iter().copied().find(|s| s.name() == name)
}

pub fn default_solver() -> &'static dyn EigenSolver {
    SOLVERS[0]
}

/// Inertia of `form` using the default solver.
pub fn inertia(form: &HermitianForm, zero_threshold: f64) -> Result<InertiaResult> {
    inertia_with(default_solver(), form, zero_threshold)
}

/// Inertia of `form`, counting eigenvalues with
/// `|λ| <= zero_threshold * spectral_scale` as null.
pub fn inertia_with(
    solver: &dyn EigenSolver,
    form: &HermitianForm,
    zero_threshold: f64,
) -> Result<InertiaResult> {
    if !(zero_threshold > 0.0 && zero_threshold < 1.0) {
        return Err(Error::InvalidInput(format!(
            "zero threshold must lie in (0, 1), got {zero_threshold}"
        )));
    }
    if form.dim() == 0 {
        return Ok(InertiaResult::ZERO);
    }
    let cutoff = zero_threshold * form.spectral_scale();
    let eigs = solver.eigenvalues(form);
    if eigs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(
            "eigensolver produced a non-finite value".into(),
        ));
    }
    let n_pos = eigs.iter().filter(|&&x| x > cutoff).count();
    let n_neg = eigs.iter().filter(|&&x| x < -cutoff).count();
    Ok(InertiaResult::from_counts(
        n_pos,
        n_neg,
        eigs.len() - n_pos - n_neg,
    ))
}
