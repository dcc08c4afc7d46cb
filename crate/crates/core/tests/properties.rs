mod common;

use common::*;
use grig_core::equation::{Assignment, Orientability};
use grig_core::group::{abelianization, equal, is_trivial, psi_preimage};
use grig_core::quotient::{pi_k, PsiImageTable};
use grig_core::split::{induced_solution, split_word};
use grig_core::standard::{ordered_form, to_standard};
use grig_core::{Element, Generator, Vertex};
use proptest::prelude::*;

fn element() -> impl Strategy<Value = Element> {
    prop::collection::vec(0..4usize, 0..40)
        .prop_map(|v| Element::reduce(v.into_iter().map(|i| Generator::ALL[i])))
}

fn stabilizer_element() -> impl Strategy<Value = Element> {
    element().prop_map(|g| g.bar())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn psi_is_a_homomorphism(g in stabilizer_element(), h in stabilizer_element()) {
        let (g0, g1) = g.psi().unwrap();
        let (h0, h1) = h.psi().unwrap();
        let (p0, p1) = g.mul(&h).psi().unwrap();
        prop_assert!(equal(&p0, &g0.mul(&h0)));
        prop_assert!(equal(&p1, &g1.mul(&h1)));
    }

    #[test]
    fn conjugation_by_a_swaps_sections(g in stabilizer_element()) {
        let a = Element::generator(Generator::A);
        let (g0, g1) = g.psi().unwrap();
        let (s0, s1) = a.mul(&g).mul(&a).psi().unwrap();
        prop_assert!(equal(&s0, &g1) && equal(&s1, &g0));
    }

    #[test]
    fn psi_matches_the_action(g in stabilizer_element(), bits in prop::collection::vec(0..2u8, 1..8)) {
        let (g0, g1) = g.psi().unwrap();
        let v = Vertex::new(bits.clone()).unwrap();
        let tail = Vertex::new(bits[1..].to_vec()).unwrap();
        let img = if bits[0] == 0 { g0.act(&tail) } else { g1.act(&tail) };
        let mut expect = vec![bits[0]];
        expect.extend_from_slice(img.bits());
        let got = g.act(&v);
        prop_assert_eq!(got.bits(), expect.as_slice());
    }

    #[test]
    fn pi_k_is_a_homomorphism(g in element(), h in element()) {
        prop_assert_eq!(pi_k(&g.mul(&h)), pi_k(&g).mul(pi_k(&h)));
        prop_assert_eq!(pi_k(&g).st_coset(), g.a_parity());
    }

    #[test]
    fn omega_recovers_the_class(g in stabilizer_element()) {
        let (g0, g1) = g.psi().unwrap();
        let table = PsiImageTable::global();
        prop_assert_eq!(table.omega(pi_k(&g0), pi_k(&g1)), Some(pi_k(&g)));
    }

    #[test]
    fn psi_preimage_inverts_psi(g in stabilizer_element()) {
        let (g0, g1) = g.psi().unwrap();
        let h = psi_preimage(&g0, &g1).unwrap();
        prop_assert!(equal(&h, &g));
    }

    #[test]
    fn abelianization_is_a_homomorphism(g in element(), h in element()) {
        let (x, y, z) = (abelianization(&g), abelianization(&h), abelianization(&g.mul(&h)));
        for i in 0..3 {
            prop_assert_eq!(z[i], x[i] ^ y[i]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn standardization_invariant(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let q = random_quadratic(&mut r, n, 3, None);
        let st = to_standard(&q).unwrap();
        prop_assert_eq!(st.automorphism.apply(&q), st.conjugated_render());
        prop_assert_eq!(st.automorphism.inverse().apply(&st.automorphism.apply(&q)), q.free_reduce());
        let orientable = q.orientability().unwrap() == Orientability::Orientable;
        prop_assert_eq!(st.standard.is_orientable(), orientable);
    }

    #[test]
    fn transport_and_pullback(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let q = random_quadratic(&mut r, n, 2, None);
        let alpha = random_assignment(&mut r, q.vars(), 12);
        let gamma = constraint_of(&alpha);
        let st = to_standard(&q).unwrap();
        let full = st.automorphism.transport(&gamma);
        // beta = alpha . phi^-1 satisfies the transported constraint.
        let inv = st.automorphism.inverse();
        let mut beta = Assignment::new();
        for (v, zq) in full.iter() {
            let img = inv.apply(&grig_core::MixedWord::var(v));
            let mut ext = alpha.clone();
            for u in img.vars() {
                ext.entry(u.clone()).or_insert_with(|| full.value_or_identity(&u).representative().clone());
            }
            let val = img.eval(&ext).unwrap();
            prop_assert_eq!(pi_k(&val), *zq, "variable {}", v);
            beta.insert(v.clone(), val);
        }
        let back = st.automorphism.pullback(&q.vars(), &beta, &full).unwrap();
        for v in q.vars() {
            prop_assert!(equal(&back[&v], &alpha[&v]));
        }
    }

    #[test]
    fn splitting_main_property(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let w = random_quadratic(&mut r, n, 3, None);
        let alpha = random_assignment(&mut r, w.vars(), 16);
        let gamma = constraint_of(&alpha);
        let (w0, w1) = split_word(&w, &gamma).unwrap();
        let star = induced_solution(&alpha);
        let (p0, p1) = w.eval(&alpha).unwrap().bar().psi().unwrap();
        prop_assert!(equal(&p0, &w0.eval(&star).unwrap()));
        prop_assert!(equal(&p1, &w1.eval(&star).unwrap()));
    }

    #[test]
    fn split_ignores_trailing_a(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = random_quadratic(&mut r, 2, 3, None);
        let alpha = random_assignment(&mut r, w.vars(), 8);
        let gamma = constraint_of(&alpha);
        let wa = w.concat(&grig_core::MixedWord::constant(Element::generator(Generator::A)));
        prop_assert_eq!(split_word(&w, &gamma).unwrap(), split_word(&wa, &gamma).unwrap());
    }

    #[test]
    fn ordering_preserves_the_equation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let q = random_quadratic(&mut r, 4, 3, Some(true));
        let st = to_standard(&q).unwrap().standard;
        let alpha = random_assignment(&mut r, st.vars(), 10);
        let gamma = constraint_of(&alpha);
        let o = ordered_form(&st, &gamma).unwrap();
        prop_assert!(grig_core::standard::is_ordered(&o.standard, &o.constraint));
        prop_assert_eq!(o.automorphism.apply(&st.render()), o.standard.render());
    }
}

#[test]
fn trivial_words_are_recognized() {
    assert!(is_trivial(&"adadadad".parse().unwrap()));
    assert!(!is_trivial(&"adad".parse().unwrap()));
}
