//! Points of the unit torus, stored as angles measured in turns.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Complex64;

/// An angle in `[0, 1)` turns; `ω = exp(2πi·angle)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Exact(Rational64),
    Float(f64),
}

impl Angle {
    pub const ZERO: Angle = Angle::Exact(Rational64::new_raw(0, 1));

    pub fn exact(numer: i64, denom: i64) -> Result<Angle> {
        if denom == 0 {
            return Err(Error::InvalidInput("angle denominator is zero".into()));
        }
        Ok(Angle::from_ratio(Rational64::new(numer, denom)))
    }

    pub fn from_ratio(r: Rational64) -> Angle {
        Angle::Exact(reduce_turns(r))
    }

    pub fn float(x: f64) -> Result<Angle> {
        if !x.is_finite() {
            return Err(Error::InvalidInput(format!("angle {x} is not finite")));
        }
        let mut r = x.rem_euclid(1.0);
        if r >= 1.0 {
            r = 0.0;
        }
        Ok(Angle::Float(r))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Angle::Exact(_))
    }

    /// True when `ω = 1`.
    pub fn is_zero(&self) -> bool {
        match self {
            Angle::Exact(r) => r.is_zero(),
            Angle::Float(x) => *x == 0.0,
        }
    }

    /// True when the angle equals `q` exactly (floats compare as `f64`).
    pub fn equals_ratio(&self, q: Rational64) -> bool {
        match self {
            Angle::Exact(r) => *r == q,
            Angle::Float(x) => *x == ratio_f64(q),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Angle::Exact(r) => ratio_f64(*r),
            Angle::Float(x) => *x,
        }
    }

    pub fn neg(&self) -> Angle {
        match self {
            Angle::Exact(r) => Angle::from_ratio(-r),
            Angle::Float(x) => Angle::Float(if *x == 0.0 { 0.0 } else { 1.0 - x }),
        }
    }

    pub fn add(&self, other: &Angle) -> Angle {
        match (self, other) {
            (Angle::Exact(a), Angle::Exact(b)) => Angle::from_ratio(a + b),
            _ => Angle::float(self.to_f64() + other.to_f64()).expect("finite sum"),
        }
    }

    /// `exp(2πi·angle)`. Exact angles are reduced to the first quadrant
    /// first so multiples of 1/4 and 1/8 land on exact values.
    pub fn to_unit(&self) -> Complex64 {
        match self {
            Angle::Exact(r) => {
                let four = r * Rational64::from_integer(4);
                let quadrant = four.floor().to_integer();
                let frac = four - Rational64::from_integer(quadrant);
                let (c, s) = if frac.is_zero() {
                    (1.0, 0.0)
                } else if frac == Rational64::new(1, 2) {
                    (
                        std::f64::consts::FRAC_1_SQRT_2,
                        std::f64::consts::FRAC_1_SQRT_2,
                    )
                } else {
                    let (s, c) = (ratio_f64(frac) * std::f64::consts::FRAC_PI_2).sin_cos();
                    (c, s)
                };
                match quadrant.rem_euclid(4) {
                    0 => Complex64::new(c, s),
                    1 => Complex64::new(-s, c),
                    2 => Complex64::new(-c, -s),
                    _ => Complex64::new(s, -c),
                }
            }
            Angle::Float(x) => {
                let (s, c) = (x * std::f64::consts::TAU).sin_cos();
                Complex64::new(c, s)
            }
        }
    }
}

fn ratio_f64(r: Rational64) -> f64 {
    r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
}

fn reduce_turns(r: Rational64) -> Rational64 {
    let (n, d) = (*r.numer(), *r.denom());
    Rational64::new(n.mod_floor(&d), d)
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Exact(r) => write!(f, "{r}"),
            Angle::Float(x) => write!(f, "{x:?}"),
        }
    }
}

impl FromStr for Angle {
    type Err = Error;

    /// `"p/q"` and integers are exact; anything else is parsed as a decimal.
    fn from_str(s: &str) -> Result<Angle> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("cannot parse angle {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            return Angle::exact(p, q);
        }
        if let Ok(n) = s.parse::<i64>() {
            return Angle::exact(n, 1);
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        Angle::float(x)
    }
}

/// A point `(ω₁, …, ωₙ)` of the unit torus.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    coords: Vec<Angle>,
}

impl TorusPoint {
    pub fn new(coords: Vec<Angle>) -> Self {
        TorusPoint { coords }
    }

    /// Parses a comma-separated angle list such as `"1/2, 0.3"`.
    pub fn parse(s: &str) -> Result<TorusPoint> {
        let coords = s
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<Angle>>>()?;
        Ok(TorusPoint { coords })
    }

    pub fn from_floats(xs: &[f64]) -> Result<TorusPoint> {
        Ok(TorusPoint {
            coords: xs.iter().map(|&x| Angle::float(x)).collect::<Result<_>>()?,
        })
    }

    pub fn from_ratios(rs: &[Rational64]) -> TorusPoint {
        TorusPoint {
            coords: rs.iter().map(|&r| Angle::from_ratio(r)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Angle] {
        &self.coords
    }

    /// Membership in `𝕋ⁿ_*`: no coordinate equals 1.
    pub fn is_punctured(&self) -> bool {
        self.coords.iter().all(|a| !a.is_zero())
    }

    /// Membership in `𝕋ⁿ_ℚ`: every coordinate is an exact root of unity.
    pub fn is_rational(&self) -> bool {
        self.coords.iter().all(Angle::is_exact)
    }

    pub fn conj(&self) -> TorusPoint {
        TorusPoint {
            coords: self.coords.iter().map(Angle::neg).collect(),
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.coords.iter().map(Angle::to_unit).collect()
    }
}

impl fmt::Display for TorusPoint {
    /// Space-separated angles.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}
