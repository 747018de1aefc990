//! Generalized Seifert data: braid closures, built-in families, split unions,
//! mirrors, validation and the on-disk document format.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type IntMatrix = DMatrix<i64>;

/// A sign vector `ε ∈ {±1}ⁿ` packed into a bitmask: bit `i` set means `ε_i = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector {
    bits: u32,
    len: usize,
}

/// Colors are capped so that `2^colors` sign vectors stay enumerable.
pub const MAX_COLORS: usize = 16;

impl SignVector {
    pub fn new(bits: u32, len: usize) -> Self {
        debug_assert!(len <= MAX_COLORS && (len == 32 || bits >> len == 0));
        SignVector { bits, len }
    }

    pub fn all(len: usize) -> impl Iterator<Item = SignVector> {
        (0..(1u32 << len)).map(move |bits| SignVector { bits, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// `+1` or `-1`.
    pub fn sign(&self, i: usize) -> i32 {
        if self.bits >> i & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn negate(&self) -> SignVector {
        let mask = if self.len == 0 {
            0
        } else {
            u32::MAX >> (32 - self.len)
        };
        SignVector {
            bits: !self.bits & mask,
            len: self.len,
        }
    }

    /// Concatenation `(self, other)`.
    pub fn concat(&self, other: &SignVector) -> SignVector {
        SignVector {
            bits: self.bits | other.bits << self.len,
            len: self.len + other.len,
        }
    }

    pub fn parse(s: &str) -> Option<SignVector> {
        let mut bits = 0u32;
        let mut len = 0;
        for (i, c) in s.chars().enumerate() {
            match c {
                '+' => {}
                '-' => bits |= 1 << i,
                _ => return None,
            }
            len += 1;
            if len > MAX_COLORS {
                return None;
            }
        }
        Some(SignVector { bits, len })
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.sign(i) > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// A braid word on `strands` strands. Letters are `(generator, sign)` with
/// generator in `1..strands`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<(usize, i8)>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<(usize, i8)>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::InvalidInput(
                "a braid needs at least one strand".into(),
            ));
        }
        for &(g, s) in &letters {
            if g == 0 || g >= strands {
                return Err(Error::InvalidInput(format!(
                    "generator {g} out of range for {strands} strands"
                )));
            }
            if s != 1 && s != -1 {
                return Err(Error::InvalidInput(format!(
                    "letter sign must be ±1, got {s}"
                )));
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// Parses whitespace- or comma-separated signed generator indices, e.g. `"1 -2 1"`.
    pub fn parse(strands: usize, word: &str) -> Result<Self> {
        let letters = word
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                let v: i64 = t
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad braid letter {t:?}")))?;
                if v == 0 {
                    return Err(Error::InvalidInput(
                        "braid letter 0 is not a generator".into(),
                    ));
                }
                Ok((v.unsigned_abs() as usize, v.signum() as i8))
            })
            .collect::<Result<Vec<_>>>()?;
        BraidWord::new(strands, letters)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[(usize, i8)] {
        &self.letters
    }
}

/// One reason a Seifert document is unusable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    IncompleteIndexSet {
        missing: Vec<String>,
    },
    BadKey(String),
    WrongShape {
        key: String,
        rows: usize,
        cols: usize,
        dim: usize,
    },
    TransposeSymmetry {
        key: String,
    },
    TooManyColors(usize),
    NoColors,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IncompleteIndexSet { missing } => {
                write!(f, "incomplete index set (missing {})", missing.join(", "))
            }
            Violation::BadKey(k) => write!(f, "bad sign-vector key {k:?}"),
            Violation::WrongShape {
                key,
                rows,
                cols,
                dim,
            } => {
                write!(f, "matrix {key:?} is {rows}x{cols}, expected {dim}x{dim}")
            }
            Violation::TransposeSymmetry { key } => write!(
                f,
                "transpose symmetry fails: matrix {key:?} is not the transpose of its opposite"
            ),
            Violation::TooManyColors(n) => {
                write!(f, "{n} colors exceeds the supported {MAX_COLORS}")
            }
            Violation::NoColors => write!(f, "at least one color is required"),
        }
    }
}

/// The serialized form of colored Seifert data. Unlike
/// [`ColoredSeifertData`] it may be malformed; see [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeifertDocument {
    pub colors: usize,
    pub dim: usize,
    pub label: String,
    pub matrices: BTreeMap<String, Vec<Vec<i64>>>,
}

/// Checks index completeness, matrix shapes and transpose symmetry.
pub fn validate(doc: &SeifertDocument) -> std::result::Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if doc.colors == 0 {
        out.push(Violation::NoColors);
    }
    if doc.colors > MAX_COLORS {
        out.push(Violation::TooManyColors(doc.colors));
        return Err(out);
    }
    let mut shaped = BTreeMap::new();
    for (key, rows) in &doc.matrices {
        match SignVector::parse(key) {
            Some(sv) if sv.len() == doc.colors => {}
            _ => {
                out.push(Violation::BadKey(key.clone()));
                continue;
            }
        }
        let cols = rows.first().map_or(0, Vec::len);
        if rows.len() != doc.dim || rows.iter().any(|r| r.len() != doc.dim) {
            out.push(Violation::WrongShape {
                key: key.clone(),
                rows: rows.len(),
                cols,
                dim: doc.dim,
            });
            continue;
        }
        shaped.insert(key.clone(), rows);
    }
    let missing: Vec<String> = SignVector::all(doc.colors)
        .map(|s| s.to_string())
        .filter(|k| !doc.matrices.contains_key(k))
        .collect();
    if !missing.is_empty() {
        out.push(Violation::IncompleteIndexSet { missing });
    }
    for (key, m) in &shaped {
        let sv = SignVector::parse(key).expect("checked above");
        let opp = sv.negate().to_string();
        // report each unordered pair once
        if opp < *key {
            continue;
        }
        if let Some(o) = shaped.get(&opp) {
            let n = doc.dim;
            let symmetric = (0..n).all(|i| (0..n).all(|j| m[i][j] == o[j][i]));
            if !symmetric {
                out.push(Violation::TransposeSymmetry { key: key.clone() });
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Validated generalized Seifert matrices `A^ε`, one per sign vector, with
/// `A^{-ε} = (A^ε)ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColoredSeifertData {
    colors: usize,
    dim: usize,
    label: String,
    // indexed by SignVector::bits
    matrices: Vec<IntMatrix>,
}

impl ColoredSeifertData {
    /// One-color data `(A, Aᵀ)` from an ordinary Seifert matrix.
    pub fn from_seifert_matrix(a: IntMatrix, label: impl Into<String>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        let t = a.transpose();
        Ok(ColoredSeifertData {
            colors: 1,
            dim: a.nrows(),
            label: label.into(),
            matrices: vec![a, t],
        })
    }

    /// Builds data from a function giving `A^ε` for every sign vector, then
    /// validates it.
    pub fn from_fn(
        colors: usize,
        dim: usize,
        label: impl Into<String>,
        mut f: impl FnMut(SignVector) -> IntMatrix,
    ) -> Result<Self> {
        let label = label.into();
        let doc = SeifertDocument {
            colors,
            dim,
            label,
            matrices: if colors <= MAX_COLORS {
                SignVector::all(colors)
                    .map(|s| (s.to_string(), rows_of(&f(s))))
                    .collect()
            } else {
                BTreeMap::new()
            },
        };
        ColoredSeifertData::try_from(doc)
    }

    /// The unknot: one color, empty matrices.
    pub fn unknot() -> Self {
        ColoredSeifertData::from_seifert_matrix(IntMatrix::zeros(0, 0), "unknot")
            .expect("empty matrix is square")
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn matrix(&self, eps: SignVector) -> &IntMatrix {
        assert_eq!(
            eps.len(),
            self.colors,
            "sign vector length must equal the color count"
        );
        &self.matrices[eps.bits() as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (SignVector, &IntMatrix)> {
        SignVector::all(self.colors).map(move |s| (s, &self.matrices[s.bits() as usize]))
    }

    /// Mirror image: `A^ε ↦ -(A^ε)ᵀ`.
    pub fn mirror(&self) -> ColoredSeifertData {
        ColoredSeifertData {
            colors: self.colors,
            dim: self.dim,
            label: format!("mirror({})", self.label),
            matrices: self.matrices.iter().map(|m| -m.transpose()).collect(),
        }
    }

    pub fn to_document(&self) -> SeifertDocument {
        SeifertDocument {
            colors: self.colors,
            dim: self.dim,
            label: self.label.clone(),
            matrices: self
                .iter()
                .map(|(s, m)| (s.to_string(), rows_of(m)))
                .collect(),
        }
    }

    /// Canonical text form: fixed key order, one matrix per line, LF endings.
    pub fn to_canonical_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"colors\": {},\n", self.colors));
        out.push_str(&format!("  \"dim\": {},\n", self.dim));
        out.push_str(&format!(
            "  \"label\": {},\n",
            serde_json::to_string(&self.label).expect("strings serialize")
        ));
        out.push_str("  \"matrices\": {\n");
        let entries: Vec<String> = self
            .to_document()
            .matrices
            .iter()
            .map(|(k, rows)| {
                let body = rows
                    .iter()
                    .map(|r| {
                        let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                        format!("[{}]", cells.join(","))
                    })
                    .collect::<Vec<_>>()
                    .join(",");
                format!("    \"{k}\": [{body}]")
            })
            .collect();
        out.push_str(&entries.join(",\n"));
        out.push_str("\n  }\n}\n");
        out
    }

    /// Parses and validates a Seifert document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SeifertDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        ColoredSeifertData::try_from(doc)
    }
}

impl TryFrom<SeifertDocument> for ColoredSeifertData {
    type Error = Error;

    fn try_from(doc: SeifertDocument) -> Result<Self> {
        validate(&doc).map_err(Error::Validation)?;
        let matrices = SignVector::all(doc.colors)
            .map(|s| {
                let rows = &doc.matrices[&s.to_string()];
                IntMatrix::from_fn(doc.dim, doc.dim, |i, j| rows[i][j])
            })
            .collect();
        Ok(ColoredSeifertData {
            colors: doc.colors,
            dim: doc.dim,
            label: doc.label,
            matrices,
        })
    }
}

fn rows_of(m: &IntMatrix) -> Vec<Vec<i64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Seifert matrix of a braid closure, from the surface made of one disk per
/// strand and one half-twisted band per letter.
///
/// Basis loops run through consecutive bands of the same generator column,
/// ordered by column and then by position in the word. For two loops in
/// adjacent columns only interleaved band positions link, and only in the
/// direction lower column → upper column.
pub fn braid_seifert(word: &BraidWord) -> Result<ColoredSeifertData> {
    let s = word.strands();
    let mut columns: Vec<Vec<(usize, i8)>> = vec![Vec::new(); s.saturating_sub(1)];
    for (pos, &(g, sign)) in word.letters().iter().enumerate() {
        columns[g - 1].push((pos, sign));
    }
    if let Some(i) = columns.iter().position(Vec::is_empty) {
        return Err(Error::Unsupported(format!(
            "generator {} never occurs, so the closure's Seifert surface is disconnected; \
             build split unions explicitly",
            i + 1
        )));
    }

    struct Loop {
        column: usize,
        first: (usize, i8),
        second: (usize, i8),
    }
    let loops: Vec<Loop> = columns
        .iter()
        .enumerate()
        .flat_map(|(c, bands)| {
            bands.windows(2).map(move |w| Loop {
                column: c,
                first: w[0],
                second: w[1],
            })
        })
        .collect();

    let m = loops.len();
    let mut a = IntMatrix::zeros(m, m);
    for (x, lx) in loops.iter().enumerate() {
        for (y, ly) in loops.iter().enumerate() {
            let v = if x == y {
                if lx.first.1 == lx.second.1 {
                    -i64::from(lx.first.1)
                } else {
                    0
                }
            } else if lx.column == ly.column {
                if lx.second == ly.first {
                    // y follows x through the shared band
                    i64::from(lx.second.1 > 0)
                } else if ly.second == lx.first {
                    -i64::from(lx.first.1 < 0)
                } else {
                    0
                }
            } else if ly.column == lx.column + 1 {
                let (p, q) = (lx.first.0, lx.second.0);
                let (r, t) = (ly.first.0, ly.second.0);
                if p < r && r < q && q < t {
                    -1
                } else if r < p && p < t && t < q {
                    1
                } else {
                    0
                }
            } else {
                0
            };
            a[(x, y)] = v;
        }
    }
    let label = format!(
        "braid[{}]({})",
        s,
        word.letters()
            .iter()
            .map(|&(g, sg)| (g as i64 * i64::from(sg)).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    ColoredSeifertData::from_seifert_matrix(a, label)
}

/// One-color `(p, q)` torus link: the closure of `(σ₁⋯σ_{p-1})^q`, mirrored
/// for negative `q`.
pub fn torus_link_data(p: i64, q: i64) -> Result<ColoredSeifertData> {
    if p < 1 {
        return Err(Error::InvalidInput(format!(
            "torus link needs p >= 1, got {p}"
        )));
    }
    if q < 0 {
        return Ok(torus_link_data(p, -q)?
            .mirror()
            .with_label(format!("T({p},{q})")));
    }
    let p_us = p as usize;
    let mut letters = Vec::with_capacity((p_us - 1) * q as usize);
    for _ in 0..q {
        letters.extend((1..p_us).map(|g| (g, 1i8)));
    }
    let word = BraidWord::new(p_us, letters)?;
    Ok(braid_seifert(&word)?.with_label(format!("T({p},{q})")))
}

/// The genus-one Seifert matrix `[[n, 1], [0, -1]]` of the twist knot `T_n`.
pub fn twist_knot_matrix(n: i64) -> IntMatrix {
    IntMatrix::from_row_slice(2, 2, &[n, 1, 0, -1])
}

pub fn twist_knot_data(n: i64) -> ColoredSeifertData {
    ColoredSeifertData::from_seifert_matrix(twist_knot_matrix(n), format!("T_{n}"))
        .expect("2x2 is square")
}

/// Seifert form of `T_n # T_n`: two copies of the twist-knot block.
pub fn twist_sum_matrix(n: i64) -> IntMatrix {
    let block = twist_knot_matrix(n);
    let mut v = IntMatrix::zeros(4, 4);
    v.view_mut((0, 0), (2, 2)).copy_from(&block);
    v.view_mut((2, 2), (2, 2)).copy_from(&block);
    v
}

/// Split union with disjoint color sets: `A^{(ε₁,ε₂)} = A₁^{ε₁} ⊕ A₂^{ε₂}`.
pub fn split_union(d1: &ColoredSeifertData, d2: &ColoredSeifertData) -> Result<ColoredSeifertData> {
    let colors = d1.colors + d2.colors;
    if colors > MAX_COLORS {
        return Err(Error::InvalidInput(format!(
            "split union would have {colors} colors (max {MAX_COLORS})"
        )));
    }
    let (m1, m2) = (d1.dim, d2.dim);
    let matrices = SignVector::all(colors)
        .map(|s| {
            let lo = SignVector::new(s.bits() & ((1u32 << d1.colors) - 1), d1.colors);
            let hi = SignVector::new(s.bits() >> d1.colors, d2.colors);
            let mut m = IntMatrix::zeros(m1 + m2, m1 + m2);
            m.view_mut((0, 0), (m1, m1)).copy_from(d1.matrix(lo));
            m.view_mut((m1, m1), (m2, m2)).copy_from(d2.matrix(hi));
            m
        })
        .collect();
    Ok(ColoredSeifertData {
        colors,
        dim: m1 + m2,
        label: format!("{} ⊔ {}", d1.label, d2.label),
        matrices,
    })
}
