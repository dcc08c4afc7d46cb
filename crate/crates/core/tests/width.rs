use std::sync::OnceLock;

use grig_core::width::{
    constraint_of_tuple, is_window_form, reduce_commutator_constraint, rn_word, theta_orbits,
    tuple_of, CompiledMove, StabMove, ThetaPartition,
};
use grig_core::QElement;
use proptest::prelude::*;

fn theta_three() -> &'static ThetaPartition {
    static PART: OnceLock<ThetaPartition> = OnceLock::new();
    PART.get_or_init(|| theta_orbits(3).unwrap().remove(0))
}

fn window(t: &[u8]) -> [QElement; 5] {
    std::array::from_fn(|k| QElement::from_index(t[k] as usize))
}

fn tuple(n: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..16u8, 2 * n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moves_stay_in_one_theta_class(mut t in tuple(3), path in prop::collection::vec(any::<prop::sample::Index>(), 0..12)) {
        let id = QElement::IDENTITY.index() as u8;
        t[5] = id;
        let moves: Vec<CompiledMove> = StabMove::all(3).into_iter().map(CompiledMove::new).collect();
        let start = window(&t);
        let mut s = t.clone();
        for i in path {
            s = moves[i.index(moves.len())].apply(&s);
            if s[5] == id {
                prop_assert!(theta_three().same_class(&start, &window(&s)));
            }
        }
    }

    #[test]
    fn reduction_reaches_window_form(n in 3usize..6, seed in any::<u64>()) {
        let t: Vec<u8> = (0..2 * n).map(|k| ((seed >> (4 * k)) & 15) as u8).collect();
        let gamma = constraint_of_tuple(&t);
        let (reduced, phi) = reduce_commutator_constraint(n, &gamma).unwrap();
        prop_assert!(is_window_form(&tuple_of(n, &reduced).unwrap()));
        prop_assert_eq!(phi.apply(&rn_word(n)), rn_word(n));
        let value = |g: &grig_core::Constraint| rn_word(n).gamma_eval(g).unwrap();
        prop_assert_eq!(value(&reduced), value(&gamma));
    }
}
