mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use quatdyn::projective::{inner, orthonormal_hbasis};
use quatdyn::{point_dist, span, HMatrix, ProjectivePoint};

fn quat() -> impl Strategy<Value = Q> {
    prop::array::uniform4(-10.0f64..10.0).prop_map(|[a, b, c, d]| Q::new(a, b, c, d))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #[test]
    fn norm_is_multiplicative(p in quat(), q in quat()) {
        prop_assert!(close((p * q).norm(), p.norm() * q.norm(), 1e-12));
    }

    #[test]
    fn conjugation_reverses_products(p in quat(), q in quat()) {
        prop_assert!((p * q).conj().approx_eq(&(q.conj() * p.conj()), 1e-12));
    }

    #[test]
    fn canonical_rep_is_a_class_invariant(q in quat(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let z = q.canonical_rep();
        prop_assert!(z.im >= 0.0);
        prop_assert!((z.re - q.a0).abs() < 1e-12);
        prop_assert!(close(z.norm(), q.norm(), 1e-12) || q.norm() < 1e-300);
        for _ in 0..20 {
            let mu = random_unit_q(&mut r);
            let w = (mu.inverse().unwrap() * q * mu).canonical_rep();
            prop_assert!((w - z).norm() < 1e-12 * (1.0 + q.norm()));
        }
    }

    #[test]
    fn phi_is_a_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_matrix(4, &mut r), random_matrix(4, &mut r));
        let lhs = a.matmul(&b).unwrap().embed_phi().unwrap();
        let rhs = a.embed_phi().unwrap() * b.embed_phi().unwrap();
        prop_assert!((lhs - rhs).iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn phi_has_the_symplectic_symmetry(seed in any::<u64>()) {
        // Φ(A) = [[A1, A2], [-conj A2, conj A1]].
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let p = random_matrix(n, &mut r).embed_phi().unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(p[(i + n, j + n)], p[(i, j)].conj());
                prop_assert_eq!(p[(i + n, j)], -p[(i, j + n)].conj());
            }
        }
    }

    #[test]
    fn study_determinant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_matrix(4, &mut r), random_matrix(4, &mut r));
        let (da, db) = (a.det_h().unwrap(), b.det_h().unwrap());
        prop_assert!(da >= -1e-12 && db >= -1e-12);
        prop_assert!(close(a.matmul(&b).unwrap().det_h().unwrap(), da * db, 1e-8));
    }

    #[test]
    fn singular_values_come_in_pairs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_matrix(r.gen_range(1..=5), &mut r).phi_singular_values();
        for pair in s.chunks(2) {
            prop_assert!((pair[0] - pair[1]).abs() <= 1e-8 * s[0]);
        }
    }

    #[test]
    fn inverse_is_two_sided(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let t = conjugator(n, 100.0, &mut r);
        let ti = t.inverse().unwrap();
        prop_assert!(t.matmul(&ti).unwrap().approx_eq(&HMatrix::identity(n), 1e-10));
        prop_assert!(ti.matmul(&t).unwrap().approx_eq(&HMatrix::identity(n), 1e-10));
    }

    #[test]
    fn point_distance_is_a_metric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=5);
        let pt = |r: &mut rand_chacha::ChaCha8Rng| ProjectivePoint::new(random_vector(n, r)).unwrap();
        let (p, q, s) = (pt(&mut r), pt(&mut r), pt(&mut r));
        let d = |a: &ProjectivePoint, b: &ProjectivePoint| point_dist(a, b).unwrap();
        prop_assert!(d(&p, &p) < 1e-7);
        prop_assert!((d(&p, &q) - d(&q, &p)).abs() < 1e-15);
        prop_assert!(d(&p, &s) <= d(&p, &q) + d(&q, &s) + 1e-12);
        // Right scaling does not move a point.
        let lambda = random_q(&mut r);
        let scaled = ProjectivePoint::new(p.homogeneous().iter().map(|x| *x * lambda).collect()).unwrap();
        prop_assert!(d(&p, &scaled) < 1e-7);
    }

    #[test]
    fn unitaries_are_isometries(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=5);
        let u = unitary(n, &mut r);
        let p = ProjectivePoint::new(random_vector(n, &mut r)).unwrap();
        let q = ProjectivePoint::new(random_vector(n, &mut r)).unwrap();
        let (up, uq) = (p.apply(&u).unwrap().unwrap(), q.apply(&u).unwrap().unwrap());
        prop_assert!((point_dist(&up, &uq).unwrap() - point_dist(&p, &q).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn span_is_idempotent_and_contains_its_points(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=5);
        let k = r.gen_range(1..=n);
        let pts: Vec<ProjectivePoint> = (0..k).map(|_| ProjectivePoint::new(random_vector(n, &mut r)).unwrap()).collect();
        let w = span(&pts).unwrap();
        prop_assert_eq!(w.rank(), k);
        let again = span(&w.basis().iter().map(|b| ProjectivePoint::new(b.clone()).unwrap()).collect::<Vec<_>>()).unwrap();
        prop_assert!(w.approx_eq(&again, 1e-8));
        for p in &pts {
            prop_assert!(w.contains(p, 1e-8).unwrap());
        }
    }

    #[test]
    fn hermitian_gram_schmidt(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=5);
        let vs: Vec<_> = (0..n).map(|_| random_vector(n, &mut r)).collect();
        let b = orthonormal_hbasis(&vs, 1e-12);
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let want = if i == j { Q::one() } else { Q::zero() };
                prop_assert!(inner(x, y).approx_eq(&want, 1e-12));
            }
        }
    }
}

#[test]
fn exact_and_float_backends_agree() {
    let mut r = rng(11);
    for _ in 0..50 {
        let a = HMatrix::from_fn(3, 3, |_, _| {
            let q = random_q(&mut r);
            Q::new((q.a0 * 8.0).round() / 8.0, (q.a1 * 8.0).round() / 8.0, (q.a2 * 8.0).round() / 8.0, (q.a3 * 8.0).round() / 8.0)
        });
        let exact = a.to_exact().unwrap();
        assert_eq!(exact.rank_exact(), a.rank_default());
        if exact.rank_exact() == 3 {
            let inv = exact.inverse_exact().unwrap().to_f64();
            assert!(inv.approx_eq(&a.inverse().unwrap(), 1e-9));
        }
    }
}
