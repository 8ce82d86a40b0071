use num_complex::Complex64;
use proptest::prelude::*;
use quartic_core::group::{embed_heisenberg, heisenberg_compose, AutomorphismMatrix};
use quartic_core::rep::{commutator_defect, irrep_apply, scale_conjugate_defect, GeneratorId};
use quartic_core::{BetaVector, GroupElement};

fn matmul(x: &[[f64; 4]; 4], y: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| x[i][k] * y[k][j]).sum();
        }
    }
    out
}

fn element() -> impl Strategy<Value = GroupElement> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b1, b2, b3)| GroupElement::new(a, b1, b2, b3))
}

fn labels() -> impl Strategy<Value = BetaVector> {
    (-2.0..2.0f64, -2.0..2.0f64, 0.01..2.0f64).prop_map(|(b1, b2, b3)| BetaVector::new(b1, b2, b3))
}

fn bump(x: f64) -> Complex64 {
    Complex64::new((-0.5 * x * x).exp(), 0.3 * x * (-x * x).exp())
}

proptest! {
    #[test]
    fn associativity(g in element(), h in element(), k in element()) {
        let lhs = (g * h) * k;
        let rhs = g * (h * k);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + lhs.b3.abs()));
    }

    #[test]
    fn identity_and_inverse(g in element()) {
        prop_assert!((g * GroupElement::IDENTITY).max_abs_diff(&g) == 0.0);
        prop_assert!((GroupElement::IDENTITY * g).max_abs_diff(&g) == 0.0);
        prop_assert!((g * g.inverse()).max_abs_diff(&GroupElement::IDENTITY) <= 1e-12);
        prop_assert!((g.inverse() * g).max_abs_diff(&GroupElement::IDENTITY) <= 1e-12);
    }

    #[test]
    fn agrees_with_matrix_product(g in element(), h in element()) {
        let m = GroupElement::from_matrix(&matmul(&g.to_matrix(), &h.to_matrix()));
        prop_assert!((g * h).max_abs_diff(&m) <= 1e-12);
    }

    #[test]
    fn heisenberg_embedding_is_homomorphism(
        p in (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64),
        q in (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64),
    ) {
        let (a, b, c) = heisenberg_compose(p, q);
        let lhs = embed_heisenberg(p.0, p.1, p.2) * embed_heisenberg(q.0, q.1, q.2);
        prop_assert!(lhs.max_abs_diff(&embed_heisenberg(a, b, c)) <= 1e-12);
    }

    #[test]
    fn irrep_is_homomorphism(g in element(), h in element(), beta in labels(), x in -2.0..2.0f64) {
        let lhs = irrep_apply(&g, &beta, |y| irrep_apply(&h, &beta, bump, y), x);
        let rhs = irrep_apply(&(g * h), &beta, bump, x);
        prop_assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn translated_labels_keep_casimirs(beta in labels(), a in -2.0..2.0f64) {
        let t = beta.translate(a);
        prop_assert_eq!(t.beta3, beta.beta3);
        prop_assert!((t.casimir_c() - beta.casimir_c()).abs() <= 1e-12 * (1.0 + beta.casimir_c().abs()));
    }

    #[test]
    fn scaling_composes(beta in labels(), s in 0.1..3.0f64, t in 0.1..3.0f64) {
        let lhs = beta.scale(s).unwrap().scale(t).unwrap();
        let rhs = beta.scale(s * t).unwrap();
        for (a, b) in lhs.as_array().iter().zip(rhs.as_array()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn automorphisms_preserve_brackets(
        g00 in 0.2..2.0f64, g11 in 0.2..2.0f64,
        g01 in -2.0..2.0f64, g02 in -2.0..2.0f64, g03 in -2.0..2.0f64,
        g12 in -2.0..2.0f64, g13 in -2.0..2.0f64,
    ) {
        let aut = AutomorphismMatrix { g00, g01, g02, g03, g11, g12, g13 };
        prop_assert!(aut.structure_defect() <= 1e-12);
    }
}

#[test]
fn commutators_exact_to_degree_ten() {
    let betas = [BetaVector::new(0.3, -1.7, 0.6), BetaVector::new(-0.7, 0.418, 0.1), BetaVector::new(1.0, 2.0, 3.0)];
    for beta in &betas {
        for a in GeneratorId::ALL {
            for b in GeneratorId::ALL {
                assert_eq!(commutator_defect(a, b, beta, 10).unwrap(), 0.0, "{a:?} {b:?}");
            }
        }
    }
}

#[test]
fn generator_scaling_to_degree_ten() {
    let beta = BetaVector::new(0.3, -1.7, 0.6);
    for id in GeneratorId::ALL {
        for t in [0.5, 2.0, 3.0, 0.37] {
            assert!(scale_conjugate_defect(id, &beta, t, 10).unwrap() <= 1e-12, "{id:?} t={t}");
        }
    }
}
