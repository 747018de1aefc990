#![allow(dead_code)]

use linksig::seifert::{ColoredSeifertData, IntMatrix, SignVector};
use linksig::Complex64;
use nalgebra::DMatrix;
use rand::Rng;

/// Random colored data satisfying `A^{-ε} = (A^ε)ᵀ`.
pub fn random_colored<R: Rng>(
    rng: &mut R,
    colors: usize,
    dim: usize,
    range: i64,
) -> ColoredSeifertData {
    let full = (1u32 << colors) - 1;
    let mut chosen: Vec<Option<IntMatrix>> = vec![None; 1 << colors];
    for bits in 0..=full {
        if chosen[bits as usize].is_some() {
            continue;
        }
        let m = IntMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-range..=range));
        let partner = (!bits & full) as usize;
        if partner == bits as usize {
            // only possible with zero colors
            chosen[bits as usize] = Some(m);
        } else {
            chosen[partner] = Some(m.transpose());
            chosen[bits as usize] = Some(m);
        }
    }
    ColoredSeifertData::from_fn(colors, dim, "random", |s: SignVector| {
        chosen[s.bits() as usize].clone().unwrap()
    })
    .unwrap()
}

/// Random braid word on `strands` strands using every generator.
pub fn random_braid<R: Rng>(rng: &mut R, strands: usize, extra: usize) -> Vec<(usize, i8)> {
    let mut letters: Vec<(usize, i8)> = (1..strands)
        .map(|g| (g, if rng.gen_bool(0.5) { 1 } else { -1 }))
        .collect();
    for _ in 0..extra {
        let g = rng.gen_range(1..strands);
        letters.push((g, if rng.gen_bool(0.5) { 1 } else { -1 }));
    }
    // shuffle
    for i in (1..letters.len()).rev() {
        let j = rng.gen_range(0..=i);
        letters.swap(i, j);
    }
    letters
}

/// Reduced Burau image of a braid at `t`.
pub fn reduced_burau(strands: usize, letters: &[(usize, i8)], t: Complex64) -> DMatrix<Complex64> {
    let k = strands - 1;
    let one = Complex64::new(1.0, 0.0);
    let mut acc = DMatrix::<Complex64>::identity(k, k);
    for &(g, s) in letters {
        let i = g - 1;
        let mut m = DMatrix::<Complex64>::identity(k, k);
        m[(i, i)] = -t;
        if i > 0 {
            m[(i, i - 1)] = t;
        }
        if i + 1 < k {
            m[(i, i + 1)] = one;
        }
        let m = if s > 0 { m } else { m.try_inverse().unwrap() };
        acc *= m;
    }
    acc
}

pub fn det_seifert_at(a: &IntMatrix, t: Complex64) -> Complex64 {
    let n = a.nrows();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
        Complex64::new(a[(i, j)] as f64, 0.0) - t * a[(j, i)] as f64
    });
    m.determinant()
}
