mod common;

use linksig::abelian::AbelianPresentation;
use linksig::hermitian::{
    inertia, inertia_with, solver_by_name, HermitianForm, DEFAULT_ZERO_THRESHOLD,
};
use linksig::integrate::{r_invariant, rho2, IntegrationConfig};
use linksig::seifert::{braid_seifert, split_union, BraidWord, ColoredSeifertData};
use linksig::signature::{cf_signature, sigma_hat, z_map};
use linksig::torus::{Angle, TorusPoint};
use linksig::Complex64;
use nalgebra::DMatrix;
use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `U diag(λ) U*` with a random unitary `U`.
fn form_with_spectrum(rng: &mut ChaCha8Rng, spectrum: &[f64]) -> HermitianForm {
    let n = spectrum.len();
    let g = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let q = g.qr().q();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        spectrum.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    HermitianForm::new(&q * d * q.adjoint()).unwrap()
}

fn spectrum_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        (prop::bool::ANY, 0.5f64..2.0).prop_map(|(s, x)| if s { x } else { -x }),
        1..12,
    )
}

fn expected(spectrum: &[f64]) -> (i64, usize) {
    let p = spectrum.iter().filter(|&&x| x > 0.0).count() as i64;
    (2 * p - spectrum.len() as i64, 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn congruence_invariance(spectrum in spectrum_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = form_with_spectrum(&mut rng, &spectrum);
        let n = spectrum.len();
        // well-conditioned invertible P
        let p = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            let base = if i == j { 1.0 } else { 0.0 };
            Complex64::new(base + rng.gen_range(-0.3..0.3) / n as f64, rng.gen_range(-0.3..0.3) / n as f64)
        });
        let a = inertia(&h, DEFAULT_ZERO_THRESHOLD).unwrap();
        let b = inertia(&h.congruent(&p).unwrap(), DEFAULT_ZERO_THRESHOLD).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!((a.signature, a.nullity), expected(&spectrum));
    }

    #[test]
    fn direct_sum_additivity(s1 in spectrum_strategy(), s2 in spectrum_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h1 = form_with_spectrum(&mut rng, &s1);
        let h2 = form_with_spectrum(&mut rng, &s2);
        let sum = inertia(&h1.direct_sum(&h2), DEFAULT_ZERO_THRESHOLD).unwrap();
        let parts = inertia(&h1, DEFAULT_ZERO_THRESHOLD).unwrap() + inertia(&h2, DEFAULT_ZERO_THRESHOLD).unwrap();
        prop_assert_eq!(sum, parts);
    }

    #[test]
    fn small_perturbations_are_stable(spectrum in spectrum_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = form_with_spectrum(&mut rng, &spectrum);
        let n = spectrum.len();
        let e = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1e-3..1e-3), rng.gen_range(-1e-3..1e-3)) / n as f64
        });
        let e = (&e + e.adjoint()) * Complex64::new(0.5, 0.0);
        let hp = HermitianForm::new(h.entries() + e).unwrap();
        prop_assert_eq!(inertia(&h, DEFAULT_ZERO_THRESHOLD).unwrap(), inertia(&hp, DEFAULT_ZERO_THRESHOLD).unwrap());
    }

    #[test]
    fn constructed_inertia_recovered(p in 0usize..5, q in 0usize..5, z in 0usize..4, seed in any::<u64>()) {
        prop_assume!(p + q + z > 0);
        let n = p + q + z;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // unimodular integer P from elementary row operations
        let mut pm = DMatrix::<f64>::identity(n, n);
        for _ in 0..2 * n {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i != j {
                let c = rng.gen_range(-2..=2) as f64;
                for k in 0..n {
                    pm[(i, k)] += c * pm[(j, k)];
                }
            }
        }
        let diag: Vec<f64> = std::iter::repeat_n(1.0, p)
            .chain(std::iter::repeat_n(-1.0, q))
            .chain(std::iter::repeat_n(0.0, z))
            .collect();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
        let h = HermitianForm::from_real(&(pm.transpose() * d * &pm)).unwrap();
        for name in ["householder", "jacobi"] {
            let r = inertia_with(solver_by_name(name).unwrap(), &h, DEFAULT_ZERO_THRESHOLD).unwrap();
            prop_assert_eq!((r.signature, r.nullity, r.n_pos, r.n_neg), (p as i64 - q as i64, z, p, q));
        }
    }

    #[test]
    fn conjugation_symmetry(colors in 1usize..4, dim in 1usize..6, seed in any::<u64>(),
                            angles in prop::collection::vec(0.001f64..0.999, 3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = common::random_colored(&mut rng, colors, dim, 3);
        let w = TorusPoint::from_floats(&angles[..colors]).unwrap();
        let a = cf_signature(&d, &w).unwrap();
        let b = cf_signature(&d, &w.conj()).unwrap();
        prop_assert_eq!((a.signature, a.nullity), (b.signature, b.nullity));
    }

    #[test]
    fn mirror_antisymmetry(colors in 1usize..4, dim in 1usize..6, seed in any::<u64>(),
                           angles in prop::collection::vec(0.001f64..0.999, 3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = common::random_colored(&mut rng, colors, dim, 3);
        let w = TorusPoint::from_floats(&angles[..colors]).unwrap();
        let a = cf_signature(&d, &w).unwrap();
        let b = cf_signature(&d.mirror(), &w).unwrap();
        prop_assert_eq!((a.signature, a.nullity), (-b.signature, b.nullity));
    }

    #[test]
    fn split_union_adds_signatures(c1 in 1usize..3, c2 in 1usize..3, seed in any::<u64>(),
                                   angles in prop::collection::vec(0.001f64..0.999, 4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m1, m2) = (rng.gen_range(1..5), rng.gen_range(1..5));
        let d1 = common::random_colored(&mut rng, c1, m1, 3);
        let d2 = common::random_colored(&mut rng, c2, m2, 3);
        let u = split_union(&d1, &d2).unwrap();
        let w1 = TorusPoint::from_floats(&angles[..c1]).unwrap();
        let w2 = TorusPoint::from_floats(&angles[c1..c1 + c2]).unwrap();
        let w = TorusPoint::from_floats(&angles[..c1 + c2]).unwrap();
        let s = cf_signature(&u, &w).unwrap();
        let s1 = cf_signature(&d1, &w1).unwrap();
        let s2 = cf_signature(&d2, &w2).unwrap();
        prop_assert_eq!(s.signature, s1.signature + s2.signature);
        prop_assert_eq!(s.nullity, s1.nullity + s2.nullity);
    }

    #[test]
    fn z_map_product_and_puncture(angles in prop::collection::vec(0.0f64..1.0, 1..6)) {
        let w = TorusPoint::from_floats(&angles).unwrap();
        let z = z_map(&w);
        prop_assert!(z.is_punctured());
        let n = w.len();
        let (wc, zc) = (w.to_complex(), z.to_complex());
        for i in 0..n {
            prop_assert!((zc[i] * zc[n + i] - wc[i]).norm() < 1e-12);
        }
    }
}

#[test]
fn z_map_exact_on_roots_of_unity() {
    for den in [8i64, 12] {
        for k in 0..den {
            let w = TorusPoint::new(vec![Angle::exact(k, den).unwrap()]);
            let z = z_map(&w);
            assert!(z.is_punctured() && z.is_rational());
            let (a, b) = match (z.coords()[0], z.coords()[1]) {
                (Angle::Exact(a), Angle::Exact(b)) => (a, b),
                _ => unreachable!(),
            };
            assert_eq!(
                Angle::from_ratio(a + b),
                Angle::from_ratio(Rational64::new(k, den))
            );
        }
    }
}

#[test]
fn sigma_hat_of_split_unknots_vanishes() {
    let u = ColoredSeifertData::unknot();
    let pm = split_union(&u, &u).unwrap();
    for w in ["0", "1/4", "1/2", "0.3"] {
        let v = sigma_hat(&pm, &TorusPoint::parse(w).unwrap()).unwrap();
        assert_eq!(v.signature, 0);
    }
}

#[test]
fn split_union_adds_integrals() {
    let cfg = IntegrationConfig::default().with_grid(256);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..6 {
        let a = braid_seifert(&BraidWord::new(3, common::random_braid(&mut rng, 3, 4)).unwrap())
            .unwrap();
        let b = braid_seifert(&BraidWord::new(2, common::random_braid(&mut rng, 2, 4)).unwrap())
            .unwrap();
        let u = split_union(&a, &b).unwrap();
        let ra = r_invariant(&a, &cfg).unwrap().value;
        let rb = r_invariant(&b, &cfg).unwrap().value;
        let ru = r_invariant(&u, &cfg).unwrap().value;
        assert!((ru - ra - rb).abs() < 2.0 * cfg.tol, "{ru} vs {ra} + {rb}");
    }
}

#[test]
fn integrals_are_worker_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let d = common::random_colored(&mut rng, 2, 4, 2);
    let p = AbelianPresentation::free(2).unwrap();
    let base = IntegrationConfig::default().with_grid(64).with_tol(1.0);
    let results: Vec<_> = [1, 3, 8]
        .iter()
        .map(|&w| rho2(&d, &p, None, &base.clone().with_workers(w)).unwrap())
        .collect();
    assert!(results.windows(2).all(|w| w[0] == w[1]));
}
