mod common;

use linksig::alexander::{alexander_polynomial, normalize_unit, IntPoly};
use linksig::seifert::{braid_seifert, torus_link_data, BraidWord, SignVector};
use linksig::Complex64;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division by a monic-up-to-sign polynomial.
fn poly_div(num: &[BigInt], den: &[BigInt]) -> IntPoly {
    let mut r = num.to_vec();
    let dl = den.len();
    let lead = den[dl - 1].clone();
    let mut q = vec![BigInt::zero(); num.len() + 1 - dl];
    for k in (0..q.len()).rev() {
        let c = &r[k + dl - 1] / &lead;
        for (j, d) in den.iter().enumerate() {
            r[k + j] -= &c * d;
        }
        q[k] = c;
    }
    assert!(r.iter().all(Zero::is_zero), "inexact division");
    q
}

/// `t^k - 1`
fn tk_minus_one(k: usize) -> IntPoly {
    let mut p = vec![BigInt::zero(); k + 1];
    p[0] = BigInt::from(-1);
    p[k] = BigInt::from(1);
    p
}

fn torus_knot_alexander(p: usize, q: usize) -> IntPoly {
    let num = poly_mul(&tk_minus_one(p * q), &tk_minus_one(1));
    let den = poly_mul(&tk_minus_one(p), &tk_minus_one(q));
    poly_div(&num, &den)
}

#[test]
fn torus_knots_match_closed_form() {
    for p in 2..=7usize {
        for q in 1..=7usize {
            if p.gcd(&q) != 1 {
                continue;
            }
            let expect = normalize_unit(&torus_knot_alexander(p, q));
            for sq in [q as i64, -(q as i64)] {
                let d = torus_link_data(p as i64, sq).unwrap();
                assert_eq!(d.dim(), (p - 1) * (q - 1), "T({p},{sq})");
                let got = normalize_unit(&alexander_polynomial(d.matrix(SignVector::new(0, 1))));
                assert_eq!(got, expect, "T({p},{sq})");
            }
        }
    }
}

#[test]
fn torus_links_match_burau() {
    let ts: Vec<Complex64> = [0.13, 0.37, 0.71]
        .iter()
        .map(|&x: &f64| Complex64::from_polar(1.0, x * std::f64::consts::TAU))
        .collect();
    for p in 2..=5usize {
        for q in 1..=6usize {
            let d = torus_link_data(p as i64, q as i64).unwrap();
            let letters: Vec<(usize, i8)> = (0..q).flat_map(|_| (1..p).map(|g| (g, 1i8))).collect();
            for &t in &ts {
                check_burau(p, &letters, d.matrix(SignVector::new(0, 1)), t);
            }
        }
    }
}

fn check_burau(
    strands: usize,
    letters: &[(usize, i8)],
    a: &linksig::seifert::IntMatrix,
    t: Complex64,
) {
    let b = common::reduced_burau(strands, letters, t);
    let k = strands - 1;
    let lhs = (nalgebra::DMatrix::<Complex64>::identity(k, k) - b)
        .determinant()
        .norm();
    let geom: Complex64 = (0..strands).map(|j| t.powu(j as u32)).sum();
    let rhs = common::det_seifert_at(a, t).norm() * geom.norm();
    let scale = 1.0 + lhs.abs().max(rhs.abs());
    assert!(
        (lhs - rhs).abs() < 1e-8 * scale,
        "burau {lhs} vs seifert {rhs} for {letters:?}"
    );
}

#[test]
fn random_braids_match_burau() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f);
    for _ in 0..300 {
        let strands = rng.gen_range(2..=5);
        let extra = rng.gen_range(0..=8);
        let letters = common::random_braid(&mut rng, strands, extra);
        let word = BraidWord::new(strands, letters.clone()).unwrap();
        let d = braid_seifert(&word).unwrap();
        assert_eq!(d.dim(), letters.len() + 1 - strands);
        for x in [0.11, 0.29, 0.43] {
            let t = Complex64::from_polar(1.0, x * std::f64::consts::TAU);
            check_burau(strands, &letters, d.matrix(SignVector::new(0, 1)), t);
        }
    }
}

#[test]
fn unused_generator_is_rejected() {
    let word = BraidWord::parse(3, "1 1 1").unwrap();
    assert!(braid_seifert(&word).is_err());
}
