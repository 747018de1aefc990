//! Normalized integrals of signature functions over `𝕋_A`: the R-invariant,
//! `ρ⁰` and `ρ⁽²⁾`, plus closed forms for the torus-link families.
//!
//! Every integral is a normalized-Haar average (total mass 1). Signatures are
//! integers and all grid weights on one grid are equal, so each grid sum is
//! accumulated exactly as an integer and the average is an exact rational;
//! results are therefore identical for any worker count.

use std::io::Write;

use num_rational::Rational64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::{subtorus, AbelianPresentation, Sample, SampleGrid, SubtorusParam};
use crate::error::{Error, Result};
use crate::seifert::ColoredSeifertData;
use crate::signature::{cf_signature_with, sigma_hat_with, EvalOptions, SignatureValue};

pub const DEFAULT_POINTS_PER_DIM: u64 = 1024;
pub const DEFAULT_TOL: f64 = 0.02;
/// Grid doubling stops before a component would exceed this many points.
pub const DEFAULT_MAX_POINTS_PER_COMPONENT: u64 = 1 << 20;

const CHUNK: u64 = 512;

/// How sample points with a coordinate equal to 1 are treated when no `L^±`
/// data is available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegeneratePolicy {
    /// Refuse to integrate.
    #[default]
    Reject,
    /// Use the naive `cf_signature` value of the degenerate form and record
    /// the point in `degenerate_samples`.
    NaiveFallback,
}

#[derive(Debug, Clone)]
pub struct IntegrationConfig {
    pub points_per_dim: u64,
    pub tol: f64,
    pub max_points_per_component: u64,
    /// `None` uses the global rayon pool.
    pub workers: Option<usize>,
    pub eval: EvalOptions,
    pub degenerate: DegeneratePolicy,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            points_per_dim: DEFAULT_POINTS_PER_DIM,
            tol: DEFAULT_TOL,
            max_points_per_component: DEFAULT_MAX_POINTS_PER_COMPONENT,
            workers: None,
            eval: EvalOptions::default(),
            degenerate: DegeneratePolicy::Reject,
        }
    }
}

impl IntegrationConfig {
    pub fn with_grid(mut self, n: u64) -> Self {
        self.points_per_dim = n;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn with_policy(mut self, policy: DegeneratePolicy) -> Self {
        self.degenerate = policy;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InvariantKind {
    /// R-invariant of an arbitrary colored link.
    R,
    /// Abelianization ρ-invariant (caller asserts zero pairwise linking).
    Rho0,
    /// L²-ρ-invariant for a general abelian coefficient group.
    Rho2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralResult {
    pub kind: InvariantKind,
    pub value: f64,
    /// The same average as an exact fraction.
    #[serde(serialize_with = "ser_ratio")]
    pub exact: Rational64,
    /// Points per free direction of the reported grid.
    pub grid: u64,
    /// `|I_N - I_{N/2}|` for the reported grid `N`; zero for finite groups.
    pub estimated_error: f64,
    /// Samples with a coordinate equal to 1.
    pub degenerate_samples: u64,
    /// Degenerate samples that used the naive fallback rather than `σ̂`.
    pub fallback_samples: u64,
    pub samples: u64,
    pub rank: usize,
    pub components: usize,
    /// `estimated_error < tol` was reached within the point budget.
    pub converged: bool,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// One evaluated sample, as written to CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub sample: Sample,
    pub value: SignatureValue,
    pub used_fallback: bool,
}

struct Evaluator<'a> {
    d: &'a ColoredSeifertData,
    d_pm: Option<&'a ColoredSeifertData>,
    cfg: &'a IntegrationConfig,
}

enum PointOutcome {
    Regular(SignatureValue),
    Extended(SignatureValue),
    Fallback(SignatureValue),
    Unresolved,
}

impl Evaluator<'_> {
    fn point(&self, s: &Sample) -> Result<PointOutcome> {
        if s.omega.is_punctured() {
            return cf_signature_with(&self.cfg.eval, self.d, &s.omega).map(PointOutcome::Regular);
        }
        if let Some(pm) = self.d_pm {
            return sigma_hat_with(&self.cfg.eval, pm, &s.omega).map(PointOutcome::Extended);
        }
        match self.cfg.degenerate {
            DegeneratePolicy::Reject => Ok(PointOutcome::Unresolved),
            DegeneratePolicy::NaiveFallback => {
                cf_signature_with(&self.cfg.eval, self.d, &s.omega).map(PointOutcome::Fallback)
            }
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct GridSum {
    signature_sum: i64,
    degenerate: u64,
    fallback: u64,
    unresolved: u64,
}

impl GridSum {
    fn merge(self, o: GridSum) -> GridSum {
        GridSum {
            signature_sum: self.signature_sum + o.signature_sum,
            degenerate: self.degenerate + o.degenerate,
            fallback: self.fallback + o.fallback,
            unresolved: self.unresolved + o.unresolved,
        }
    }
}

fn run_in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidInput(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn chunk_ranges(len: u64) -> Vec<(u64, u64)> {
    (0..len.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(len)))
        .collect()
}

fn sum_grid(ev: &Evaluator<'_>, grid: &SampleGrid) -> Result<GridSum> {
    let chunks = chunk_ranges(grid.len());
    let partials: Vec<Result<GridSum>> = run_in_pool(ev.cfg.workers, || {
        chunks
            .par_iter()
            .map(|&(lo, hi)| {
                let mut acc = GridSum::default();
                for idx in lo..hi {
                    let s = grid.sample(idx);
                    match ev.point(&s)? {
                        PointOutcome::Regular(v) => acc.signature_sum += v.signature,
                        PointOutcome::Extended(v) => {
                            acc.signature_sum += v.signature;
                            acc.degenerate += 1;
                        }
                        PointOutcome::Fallback(v) => {
                            acc.signature_sum += v.signature;
                            acc.degenerate += 1;
                            acc.fallback += 1;
                        }
                        PointOutcome::Unresolved => {
                            acc.degenerate += 1;
                            acc.unresolved += 1;
                        }
                    }
                }
                Ok(acc)
            })
            .collect()
    })?;
    // fixed chunk order
    partials
        .into_iter()
        .try_fold(GridSum::default(), |acc, p| Ok(acc.merge(p?)))
}

fn average(sum: &GridSum, grid: &SampleGrid) -> Rational64 {
    Rational64::new(sum.signature_sum, grid.len() as i64)
}

fn ratio_f64(r: Rational64) -> f64 {
    r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
}

/// Evaluates the grid with `n` points per free direction.
fn grid_average(
    ev: &Evaluator<'_>,
    param: &SubtorusParam,
    n: u64,
) -> Result<(Rational64, GridSum, u64)> {
    let grid = SampleGrid::new(param.clone(), n)?;
    let sum = sum_grid(ev, &grid)?;
    if sum.unresolved > 0 {
        return Err(Error::UnresolvedDegeneracy {
            count: sum.unresolved as usize,
        });
    }
    Ok((average(&sum, &grid), sum, grid.len()))
}

fn fits_budget(n: u64, rank: usize, cap: u64) -> bool {
    (0..rank)
        .try_fold(1u64, |acc, _| acc.checked_mul(n))
        .is_some_and(|p| p <= cap)
}

fn integrate(
    kind: InvariantKind,
    d: &ColoredSeifertData,
    param: &SubtorusParam,
    d_pm: Option<&ColoredSeifertData>,
    cfg: &IntegrationConfig,
) -> Result<IntegralResult> {
    if cfg.points_per_dim == 0 {
        return Err(Error::InvalidInput(
            "grid must have at least one point per dimension".into(),
        ));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {}",
            cfg.tol
        )));
    }
    let ev = Evaluator { d, d_pm, cfg };

    let finish = |exact: Rational64, sum: GridSum, samples: u64, grid: u64, err: f64, converged| {
        let value = ratio_f64(exact);
        debug_assert!(value.abs() <= d.dim() as f64 + 1e-12);
        IntegralResult {
            kind,
            value,
            exact,
            grid,
            estimated_error: err,
            degenerate_samples: sum.degenerate,
            fallback_samples: sum.fallback,
            samples,
            rank: param.rank,
            components: param.torsion_count,
            converged,
        }
    };

    if param.rank == 0 {
        let (exact, sum, samples) = grid_average(&ev, param, 1)?;
        return Ok(finish(exact, sum, samples, 1, 0.0, true));
    }

    let mut n = cfg.points_per_dim.max(2);
    let mut previous = grid_average(&ev, param, n / 2)?.0;
    loop {
        let (exact, sum, samples) = grid_average(&ev, param, n)?;
        let err = ratio_f64(exact - previous).abs();
        let converged = err < cfg.tol;
        let next = n * 2;
        if converged || !fits_budget(next, param.rank, cfg.max_points_per_component) {
            return Ok(finish(exact, sum, samples, n, err, converged));
        }
        previous = exact;
        n = next;
    }
}

/// `R(L)`: the normalized integral of `σ_L` over `𝕋ⁿ`.
pub fn r_invariant(d: &ColoredSeifertData, cfg: &IntegrationConfig) -> Result<IntegralResult> {
    let param = subtorus(&AbelianPresentation::free(d.colors())?)?;
    integrate(InvariantKind::R, d, &param, None, cfg)
}

/// `ρ⁰(L)`. Numerically the same integral as [`r_invariant`]; the zero
/// pairwise linking hypothesis cannot be read off Seifert matrices and is the
/// caller's obligation.
pub fn rho0(d: &ColoredSeifertData, cfg: &IntegrationConfig) -> Result<IntegralResult> {
    let param = subtorus(&AbelianPresentation::free(d.colors())?)?;
    integrate(InvariantKind::Rho0, d, &param, None, cfg)
}

/// `ρ⁽²⁾(M(L), φ)` for `φ` onto the group presented by `p`: the average of
/// the signature over `𝕋_A`, using `σ̂` from `d_pm` at points with a
/// coordinate equal to 1.
pub fn rho2(
    d: &ColoredSeifertData,
    p: &AbelianPresentation,
    d_pm: Option<&ColoredSeifertData>,
    cfg: &IntegrationConfig,
) -> Result<IntegralResult> {
    if p.generators() != d.colors() {
        return Err(Error::DimensionMismatch {
            expected: d.colors(),
            got: p.generators(),
        });
    }
    let param = subtorus(p)?;
    integrate(InvariantKind::Rho2, d, &param, d_pm, cfg)
}

/// Per-sample signatures on a single grid, in grid order.
pub fn sample_records(
    d: &ColoredSeifertData,
    p: &AbelianPresentation,
    d_pm: Option<&ColoredSeifertData>,
    cfg: &IntegrationConfig,
) -> Result<Vec<SampleRecord>> {
    if p.generators() != d.colors() {
        return Err(Error::DimensionMismatch {
            expected: d.colors(),
            got: p.generators(),
        });
    }
    let grid = SampleGrid::new(subtorus(p)?, cfg.points_per_dim)?;
    let ev = Evaluator { d, d_pm, cfg };
    let chunks = chunk_ranges(grid.len());
    let parts: Vec<Result<Vec<SampleRecord>>> = run_in_pool(cfg.workers, || {
        chunks
            .par_iter()
            .map(|&(lo, hi)| {
                (lo..hi)
                    .map(|idx| {
                        let sample = grid.sample(idx);
                        let (value, used_fallback) = match ev.point(&sample)? {
                            PointOutcome::Regular(v) | PointOutcome::Extended(v) => (v, false),
                            PointOutcome::Fallback(v) => (v, true),
                            PointOutcome::Unresolved => {
                                return Err(Error::UnresolvedDegeneracy { count: 1 })
                            }
                        };
                        Ok(SampleRecord {
                            sample,
                            value,
                            used_fallback,
                        })
                    })
                    .collect()
            })
            .collect()
    })?;
    let mut out = Vec::with_capacity(grid.len() as usize);
    let mut unresolved = 0;
    for part in parts {
        match part {
            Ok(v) => out.extend(v),
            Err(Error::UnresolvedDegeneracy { count }) => unresolved += count,
            Err(e) => return Err(e),
        }
    }
    if unresolved > 0 {
        // a chunk stops at its first unresolved point, so recount exactly
        let count = (0..grid.len())
            .filter(|&i| !grid.sample(i).omega.is_punctured())
            .count();
        return Err(Error::UnresolvedDegeneracy { count });
    }
    Ok(out)
}

/// CSV with columns `omega_angles,signature,nullity,weight`. Angles are
/// space-separated turns, weights exact fractions; `.` decimals, LF endings.
pub fn write_csv<W: Write>(records: &[SampleRecord], mut out: W) -> std::io::Result<()> {
    out.write_all(b"omega_angles,signature,nullity,weight\n")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{}",
            r.sample.omega, r.value.signature, r.value.nullity, r.sample.weight
        )?;
    }
    Ok(())
}

/// `(a+1)(a-2)/3` for any integer `a`.
pub(crate) fn torus_knot_poly(a: i64) -> Rational64 {
    Rational64::new((a + 1) * (a - 2), 3)
}

/// `(b-1)²/3` for any integer `b`.
pub(crate) fn torus_bb_poly(b: i64) -> Rational64 {
    Rational64::new((b - 1) * (b - 1), 3)
}

/// Closed form `R(T(a, 1-a)) = R(T(1-a, a)) = (a+1)(a-2)/3`.
pub fn torus_r_knot(a: i64) -> Result<Rational64> {
    if a < 2 {
        return Err(Error::InvalidInput(format!(
            "torus_r_knot needs a >= 2, got {a}"
        )));
    }
    Ok(torus_knot_poly(a))
}

/// Closed form `R(T(b, -b)) = (b-1)²/3` for the one-color torus link.
pub fn torus_r_bb(b: i64) -> Result<Rational64> {
    if b < 1 {
        return Err(Error::InvalidInput(format!(
            "torus_r_bb needs b >= 1, got {b}"
        )));
    }
    Ok(torus_bb_poly(b))
}
