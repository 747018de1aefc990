//! Finitely generated abelian groups given by presentations, the subgroup
//! `𝕋_A ⊂ 𝕋ⁿ` of characters they cut out, and midpoint sampling grids on it.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::torus::{Angle, TorusPoint};

pub type BigMatrix = Vec<Vec<BigInt>>;

/// `A = ⟨g₁,…,gₙ | r₁,…,r_l⟩`; row `j` of `relations` holds the coefficients
/// of `r_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianPresentation {
    generators: usize,
    relations: Vec<Vec<i64>>,
}

impl AbelianPresentation {
    pub fn new(generators: usize, relations: Vec<Vec<i64>>) -> Result<Self> {
        if generators == 0 {
            return Err(Error::InvalidInput(
                "a presentation needs at least one generator".into(),
            ));
        }
        if let Some(r) = relations.iter().find(|r| r.len() != generators) {
            return Err(Error::InvalidInput(format!(
                "relation {:?} has {} coefficients, expected {generators}",
                r,
                r.len()
            )));
        }
        Ok(AbelianPresentation {
            generators,
            relations,
        })
    }

    /// `ℤⁿ`.
    pub fn free(generators: usize) -> Result<Self> {
        AbelianPresentation::new(generators, Vec::new())
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &[Vec<i64>] {
        &self.relations
    }

    pub fn relation_matrix(&self) -> BigMatrix {
        self.relations
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    /// True when there are no relations at all (the abelianization case).
    pub fn is_free(&self) -> bool {
        self.relations.iter().all(|r| r.iter().all(|&x| x == 0))
    }
}

impl FromStr for AbelianPresentation {
    type Err = Error;

    /// Accepts `"Z^n"`, or `"n=2; rel=1,1; rel=0,2"` where each `rel=` (the
    /// prefix is optional after `n=`) is one comma-separated relation row.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| Error::InvalidInput(format!("bad group spec {s:?}: {why}"));
        if let Some(rest) = s.strip_prefix("Z^").or_else(|| s.strip_prefix("z^")) {
            let n: usize = rest.trim().parse().map_err(|_| bad("rank after Z^"))?;
            return AbelianPresentation::free(n);
        }
        let mut generators = None;
        let mut relations = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some(n) = part.strip_prefix("n=") {
                generators = Some(n.trim().parse().map_err(|_| bad("generator count"))?);
                continue;
            }
            let row = part.strip_prefix("rel=").unwrap_or(part);
            let row = row
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad("relation coefficients"))?;
            relations.push(row);
        }
        let generators = generators.ok_or_else(|| bad("missing n="))?;
        AbelianPresentation::new(generators, relations)
    }
}

impl fmt::Display for AbelianPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.relations.is_empty() {
            return write!(f, "Z^{}", self.generators);
        }
        write!(f, "n={}", self.generators)?;
        for r in &self.relations {
            let row: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            write!(f, "; rel={}", row.join(","))?;
        }
        Ok(())
    }
}

/// `U·M·V = D` with `U`, `V` unimodular and `D` diagonal, `d₁ | d₂ | …`, `dᵢ ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: BigMatrix,
    pub d: BigMatrix,
    pub v: BigMatrix,
}

impl SmithForm {
    /// Diagonal entries `d_j` for `j < min(l, n)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let cols = self.v.len();
        (0..self.d.len().min(cols))
            .map(|i| self.d[i][i].clone())
            .collect()
    }
}

pub fn identity(n: usize) -> BigMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Matrix product; `cols_b` is needed when `b` has no rows.
pub fn mat_mul(a: &BigMatrix, b: &BigMatrix, cols_b: usize) -> BigMatrix {
    a.iter()
        .map(|row| {
            (0..cols_b)
                .map(|j| {
                    row.iter()
                        .zip(b.iter())
                        .fold(BigInt::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

/// Smith normal form of an `l×n` integer matrix with `n` columns.
pub fn smith_normal_form(m: &BigMatrix, n: usize) -> SmithForm {
    let l = m.len();
    let mut d = m.clone();
    let mut u = identity(l);
    let mut v = identity(n);

    for t in 0..l.min(n) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let pivot = (t..l)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| !d[i][j].is_zero())
                .min_by(|&(a, b), &(c, e)| d[a][b].abs().cmp(&d[c][e].abs()));
            let Some((pi, pj)) = pivot else { break };
            d.swap(t, pi);
            u.swap(t, pi);
            for row in d.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }

            let mut clean = true;
            for i in t + 1..l {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                add_row(&mut d, i, t, &-&q);
                add_row(&mut u, i, t, &-&q);
                clean &= d[i][t].is_zero();
            }
            for j in t + 1..n {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                add_col(&mut d, j, t, &-&q);
                add_col(&mut v, j, t, &-&q);
                clean &= d[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..l).find(|&i| (t + 1..n).any(|j| !d[i][j].is_multiple_of(&d[t][t])));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    add_row(&mut d, t, i, &one);
                    add_row(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    SmithForm { u, d, v }
}

/// `row[dst] += k * row[src]`
fn add_row(m: &mut BigMatrix, dst: usize, src: usize, k: &BigInt) {
    let src_row = m[src].clone();
    for (x, s) in m[dst].iter_mut().zip(src_row.iter()) {
        *x += k * s;
    }
}

/// `col[dst] += k * col[src]`
fn add_col(m: &mut BigMatrix, dst: usize, src: usize, k: &BigInt) {
    for row in m.iter_mut() {
        let s = row[src].clone();
        row[dst] += k * s;
    }
}

/// Parametrization of `𝕋_A`: every point is
/// `exp(2πi(θ⁽ᵏ⁾ + B·y))` for a torsion representative `θ⁽ᵏ⁾` and `y ∈ [0,1)^R`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubtorusParam {
    pub generators: usize,
    pub rank: usize,
    pub torsion_reps: Vec<Vec<Rational64>>,
    /// `generators × rank`, stored row-major.
    pub basis: Vec<Vec<i64>>,
    pub torsion_count: usize,
}

fn to_i64(x: &BigInt, what: &str) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Unsupported(format!("{what} {x} does not fit in 64 bits")))
}

/// Solves `M·θ ≡ 0 (mod ℤ^l)` through the Smith form of `M`.
pub fn subtorus(p: &AbelianPresentation) -> Result<SubtorusParam> {
    let n = p.generators();
    let snf = smith_normal_form(&p.relation_matrix(), n);
    let diag = snf.diagonal();

    // order of φ_j: Some(d) for torsion directions, None for free ones
    let orders: Vec<Option<i64>> = (0..n)
        .map(|j| match diag.get(j) {
            Some(dj) if !dj.is_zero() => to_i64(dj, "invariant factor").map(Some),
            _ => Ok(None),
        })
        .collect::<Result<_>>()?;
    let v: Vec<Vec<i64>> = snf
        .v
        .iter()
        .map(|row| row.iter().map(|x| to_i64(x, "basis entry")).collect())
        .collect::<Result<_>>()?;

    let free: Vec<usize> = (0..n).filter(|&j| orders[j].is_none()).collect();
    let torsion: Vec<(usize, i64)> = (0..n)
        .filter_map(|j| orders[j].filter(|&d| d > 1).map(|d| (j, d)))
        .collect();
    let torsion_count = torsion
        .iter()
        .try_fold(1usize, |acc, &(_, d)| acc.checked_mul(d as usize))
        .ok_or_else(|| Error::Unsupported("torsion subgroup too large to enumerate".into()))?;

    // lexicographic in the torsion digits, last digit fastest
    let mut reps = Vec::with_capacity(torsion_count);
    let mut digits = vec![0i64; torsion.len()];
    for _ in 0..torsion_count {
        let theta: Vec<Rational64> = (0..n)
            .map(|i| {
                let s = torsion
                    .iter()
                    .zip(&digits)
                    .fold(Rational64::zero(), |acc, (&(j, d), &k)| {
                        acc + Rational64::new(v[i][j] * k, d)
                    });
                reduce_turns(s)
            })
            .collect();
        reps.push(theta);
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < torsion[pos].1 {
                break;
            }
            digits[pos] = 0;
        }
    }

    let basis = (0..n)
        .map(|i| free.iter().map(|&j| v[i][j]).collect())
        .collect();
    Ok(SubtorusParam {
        generators: n,
        rank: free.len(),
        torsion_reps: reps,
        basis,
        torsion_count,
    })
}

fn reduce_turns(r: Rational64) -> Rational64 {
    let (n, d) = (*r.numer(), *r.denom());
    Rational64::new(n.mod_floor(&d), d)
}

/// One grid sample: a point of `𝕋_A` and its share of the normalized measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub omega: TorusPoint,
    pub weight: Rational64,
    pub component: usize,
    /// A midpoint landed a coordinate on angle 0 and was nudged.
    pub jittered: bool,
}

const JITTER_PRIMES: [i64; 10] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31];

/// Midpoint Riemann grid with `points_per_dim` cells per free direction on
/// each component of `𝕋_A`.
///
/// When a midpoint puts a coordinate exactly at angle 0 and some free
/// direction moves that coordinate, the first such direction is shifted by
/// `1/(4N·p)` turns for the first prime `p` in 3, 5, 7, … that clears every
/// movable zero. Coordinates fixed by torsion alone are left in place.
#[derive(Debug, Clone)]
pub struct SampleGrid {
    param: SubtorusParam,
    points_per_dim: u64,
    per_component: u64,
    weight: Rational64,
}

impl SampleGrid {
    pub fn new(param: SubtorusParam, points_per_dim: u64) -> Result<Self> {
        if points_per_dim == 0 {
            return Err(Error::InvalidInput(
                "grid needs at least one point per dimension".into(),
            ));
        }
        let per_component = (0..param.rank)
            .try_fold(1u64, |acc, _| acc.checked_mul(points_per_dim))
            .filter(|&x| x <= i64::MAX as u64)
            .ok_or_else(|| Error::InvalidInput("grid size overflows".into()))?;
        let denom = per_component
            .checked_mul(param.torsion_count as u64)
            .filter(|&x| x <= i64::MAX as u64)
            .ok_or_else(|| Error::InvalidInput("grid size overflows".into()))?;
        Ok(SampleGrid {
            param,
            points_per_dim,
            per_component,
            weight: Rational64::new(1, denom as i64),
        })
    }

    pub fn param(&self) -> &SubtorusParam {
        &self.param
    }

    pub fn points_per_dim(&self) -> u64 {
        self.points_per_dim
    }

    pub fn len(&self) -> u64 {
        self.per_component * self.param.torsion_count as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weight(&self) -> Rational64 {
        self.weight
    }

    /// The sample with flat index `idx` (component-major, then the cell
    /// multi-index with the first free direction slowest).
    pub fn sample(&self, idx: u64) -> Sample {
        let component = (idx / self.per_component) as usize;
        let mut cell = idx % self.per_component;
        let r = self.param.rank;
        let n = self.points_per_dim as i64;
        let mut y = vec![Rational64::zero(); r];
        for slot in y.iter_mut().rev() {
            let k = (cell % self.points_per_dim) as i64;
            cell /= self.points_per_dim;
            *slot = Rational64::new(2 * k + 1, 2 * n);
        }
        let theta = &self.param.torsion_reps[component];
        let mut angles = self.angles(theta, &y);
        let mut jittered = false;

        let movable_zero = |angles: &[Rational64]| {
            (0..angles.len())
                .find(|&i| angles[i].is_zero() && self.param.basis[i].iter().any(|&b| b != 0))
        };
        if let Some(i) = movable_zero(&angles) {
            let dir = self.param.basis[i]
                .iter()
                .position(|&b| b != 0)
                .expect("movable coordinate has a nonzero basis entry");
            for &p in &JITTER_PRIMES {
                let mut y2 = y.clone();
                y2[dir] += Rational64::new(1, 4 * n * p);
                let candidate = self.angles(theta, &y2);
                if movable_zero(&candidate).is_none() {
                    angles = candidate;
                    jittered = true;
                    break;
                }
            }
        }
        Sample {
            omega: TorusPoint::new(angles.into_iter().map(Angle::from_ratio).collect()),
            weight: self.weight,
            component,
            jittered,
        }
    }

    fn angles(&self, theta: &[Rational64], y: &[Rational64]) -> Vec<Rational64> {
        (0..self.param.generators)
            .map(|i| {
                let s = self.param.basis[i]
                    .iter()
                    .zip(y)
                    .fold(theta[i], |acc, (&b, &yj)| acc + yj * b);
                reduce_turns(s)
            })
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Sample> + '_ {
        (0..self.len()).map(move |i| self.sample(i))
    }
}

/// Convenience: the full sample stream for `param` with `n` points per free
/// direction.
pub fn sample_grid(param: &SubtorusParam, n: u64) -> Result<Vec<Sample>> {
    let grid = SampleGrid::new(param.clone(), n)?;
    Ok(grid.iter().collect())
}
