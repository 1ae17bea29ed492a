//! Property tests for the algebraic invariants behind the certificates.

use lmi_sos::gram::{GramSos, GramSosMatrix};
use lmi_sos::io::{self, LoadedCertificate};
use lmi_sos::linalg;
use lmi_sos::pencil::{trace_pair, LinearPencil, MatrixPolynomial};
use lmi_sos::poly::{MonomialBasis, Polynomial};
use lmi_sos::scalar::{limit_denominator, Rational, Scalar};
use lmi_sos::verify::{rationalize, verify_certificate, Certificate};
use lmi_sos::certificates::MembershipCertificate;
use nalgebra::DMatrix;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::from_ratio(n, d))
}

fn poly(n: usize, degree: usize) -> impl Strategy<Value = Polynomial<Rational>> {
    let basis = MonomialBasis::new(n, degree);
    let len = basis.len();
    proptest::collection::vec(rational(), len).prop_map(move |cs| {
        Polynomial::from_terms(n, basis.monomials().iter().cloned().zip(cs))
    })
}

fn sym_matrix(size: usize) -> impl Strategy<Value = DMatrix<Rational>> {
    proptest::collection::vec(rational(), size * size).prop_map(move |v| {
        let m = DMatrix::from_vec(size, size, v);
        &m + &m.transpose()
    })
}

fn pencil(size: usize, n: usize) -> impl Strategy<Value = LinearPencil<Rational>> {
    proptest::collection::vec(sym_matrix(size), n + 1).prop_map(|m| LinearPencil::new(m).unwrap())
}

/// A PSD rational matrix `F F^T` of the given size.
fn psd(size: usize) -> impl Strategy<Value = DMatrix<Rational>> {
    proptest::collection::vec(rational(), size * size).prop_map(move |v| {
        let f = DMatrix::from_vec(size, size, v);
        linalg::mat_mul(&f, &linalg::transpose(&f))
    })
}

/// A membership certificate `target = s + tr(A S)` built from random PSD Gram data;
/// the identity holds by construction.
fn membership() -> impl Strategy<Value = (LinearPencil<Rational>, MembershipCertificate<Rational>)> {
    (1usize..=2, 1usize..=3, 0usize..=1)
        .prop_flat_map(|(n, size, level)| {
            let len = MonomialBasis::new(n, level).len();
            (pencil(size, n), psd(len), psd(size * len), Just((n, size, level)))
        })
        .prop_map(|(a, g, big, (n, size, level))| {
            let s = GramSos::new(MonomialBasis::new(n, level), g).unwrap();
            let big = GramSosMatrix::new(size, MonomialBasis::new(n, level), big).unwrap();
            let target = &s.expand() + &trace_pair(&a, &big.expand()).unwrap();
            (a, MembershipCertificate { target, level, s, big })
        })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        rng_seed: RngSeed::Fixed(7),
        ..ProptestConfig::default()
    })]

    #[test]
    fn ring_laws(a in poly(2, 2), b in poly(2, 2), c in poly(2, 1)) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        prop_assert_eq!((&a * &b).degree() <= a.degree() + b.degree(), true);
    }

    #[test]
    fn display_parses_back(a in poly(3, 2)) {
        prop_assert_eq!(Polynomial::parse(&a.to_string(), 3).unwrap(), a);
    }

    #[test]
    fn evaluation_is_a_ring_map(a in poly(2, 2), b in poly(2, 2), x in rational(), y in rational()) {
        let pt = [x, y];
        prop_assert_eq!((&a * &b).evaluate(&pt), a.evaluate(&pt) * b.evaluate(&pt));
        prop_assert_eq!((&a + &b).evaluate(&pt), a.evaluate(&pt) + b.evaluate(&pt));
    }

    #[test]
    fn gram_expansion_is_exact(fs in proptest::collection::vec(poly(2, 2), 1..4)) {
        let g = GramSos::from_factors(2, 2, &fs).unwrap();
        let expect = fs.iter().fold(Polynomial::zero(2), |acc, p| &acc + &(p * p));
        prop_assert_eq!(g.expand(), expect);
        prop_assert!(linalg::ldl_psd(&g.gram).is_psd);
    }

    #[test]
    fn trace_pair_respects_congruence(
        a in pencil(2, 1),
        u in proptest::collection::vec(poly(1, 1), 2),
        q in proptest::collection::vec(rational(), 4),
    ) {
        let q = DMatrix::from_vec(2, 2, q);
        prop_assume!(!linalg::determinant(&q).is_zero());
        // tr((Q^T A Q) S) = tr(A (Q S Q^T)) with S = u u^T, Q S Q^T = (Qu)(Qu)^T.
        let lhs = trace_pair(&a.congruence(&q).unwrap(), &MatrixPolynomial::outer(&u)).unwrap();
        let qu: Vec<Polynomial<Rational>> = (0..2)
            .map(|i| (0..2).fold(Polynomial::zero(1), |acc, j| &acc + &u[j].scale(&q[(i, j)])))
            .collect();
        let rhs = trace_pair(&a, &MatrixPolynomial::outer(&qu)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn affine_change_commutes_with_evaluation(
        a in pencil(2, 2),
        t in proptest::collection::vec(rational(), 4),
        b in proptest::collection::vec(rational(), 2),
        y in proptest::collection::vec(rational(), 2),
    ) {
        let t = DMatrix::from_vec(2, 2, t);
        prop_assume!(!linalg::determinant(&t).is_zero());
        let moved = a.affine_change(&t, &b).unwrap();
        let x: Vec<Rational> = (0..2)
            .map(|i| (0..2).fold(b[i].clone(), |acc, j| acc + &t[(i, j)] * &y[j]))
            .collect();
        prop_assert_eq!(moved.evaluate(&y).unwrap(), a.evaluate(&x).unwrap());
    }

    #[test]
    fn ldl_agrees_with_eigenvalues(v in proptest::collection::vec(-4i64..=4, 9)) {
        let m = DMatrix::from_fn(3, 3, |i, j| Rational::from_i64(v[3 * i.min(j) + i.max(j)]));
        let exact = linalg::ldl_psd(&m).is_psd;
        let eig = linalg::min_eigenvalue(&m.map(|x| x.to_f64()));
        // Integer symmetric 3x3 matrices have no eigenvalue in (-1e-9, 0) unless it is 0.
        prop_assert_eq!(exact, eig > -1e-9);
    }

    #[test]
    fn limit_denominator_bounds(x in -1e3f64..1e3, bound in 1u64..100_000) {
        let r = limit_denominator(x, bound);
        prop_assert!(*r.denom() <= num_bigint::BigInt::from(bound));
        prop_assert!((r.to_f64() - x).abs() <= 1.0 / bound as f64);
    }

    #[test]
    fn exact_certificates_verify_and_perturbations_fail((a, cert) in membership(), bump in 1i64..=5) {
        let good = verify_certificate(&a, &Certificate::Membership(cert.clone())).unwrap();
        prop_assert!(good.pass && good.max_residual() == 0.0);
        // The constant entry of the scalar Gram always moves the constant coefficient.
        let mut bad = cert;
        bad.s.gram[(0, 0)] += Rational::from_ratio(bump, 1000);
        let r = verify_certificate(&a, &Certificate::Membership(bad)).unwrap();
        prop_assert!(!r.pass);
    }

    #[test]
    fn certificate_json_round_trip((a, cert) in membership()) {
        let cert = Certificate::Membership(cert);
        let text = io::to_json_text(&io::certificate_to_json(&cert, a.nvars(), a.size()));
        match io::read_certificate(&text).unwrap() {
            LoadedCertificate::Exact(back) => prop_assert_eq!(back, cert),
            LoadedCertificate::Float(_) => prop_assert!(false, "exact certificate read back as float"),
        }
    }

    #[test]
    fn pencil_json_round_trip(a in pencil(3, 2)) {
        let text = io::to_json_text(&io::pencil_to_json(&a));
        prop_assert_eq!(io::read_pencil(&text).unwrap(), a);
    }

    #[test]
    fn rounded_float_certificates_rationalize((a, cert) in membership()) {
        // Strictly definite Gram data leaves room for the exact projection.
        let mut cert = cert;
        let shift = |m: &mut DMatrix<Rational>| {
            for i in 0..m.nrows() {
                m[(i, i)] += Rational::from_i64(1);
            }
        };
        shift(&mut cert.s.gram);
        shift(&mut cert.big.gram);
        cert.target = &cert.s.expand() + &trace_pair(&a, &cert.big.expand()).unwrap();
        let noisy = MembershipCertificate {
            target: cert.target.to_float(),
            level: cert.level,
            s: GramSos { basis: cert.s.basis.clone(), gram: cert.s.gram.map(|v| v.to_f64() + 1e-9) },
            big: GramSosMatrix {
                size: cert.big.size,
                basis: cert.big.basis.clone(),
                gram: cert.big.gram.map(|v| v.to_f64() - 1e-9),
            },
        };
        let exact = rationalize(&a, &Certificate::Membership(noisy), 1_000_000).unwrap();
        let r = verify_certificate(&a, &exact).unwrap();
        prop_assert!(r.pass && r.max_residual() == 0.0);
    }
}
