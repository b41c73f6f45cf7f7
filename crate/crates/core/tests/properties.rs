use proptest::prelude::*;
use rand::Rng;
use rcspkit::classify::{check_order, express_check, Expressibility};
use rcspkit::generators::{self, InstanceParams};
use rcspkit::partial_ops::{
    is_invariant, is_subfunction, make_min, make_ordered_maltsev, make_partial_maltsev, PartialOperation,
};
use rcspkit::reconfigure::{descend_to_minimum, is_locally_minimal};
use rcspkit::relfile::{format_partial_operation, format_relation, parse_relation_file};
use rcspkit::{
    apply_pattern, connected_components, hamming_distance, parse_instance, product, ConstraintLanguage,
    FiniteDomain, Pattern, Relation, Term, TotalOrder, Value,
};

fn relation_from_bits(d: u32, arity: usize, bits: &[bool]) -> Relation {
    let mut i = 0;
    Relation::full(FiniteDomain::new(d).unwrap(), arity).unwrap().filter(|_| {
        let keep = bits[i];
        i += 1;
        keep
    })
}

fn relation(max_arity: usize) -> impl Strategy<Value = Relation> {
    (2u32..=3, 1..=max_arity).prop_flat_map(|(d, arity)| {
        proptest::collection::vec(any::<bool>(), (d as usize).pow(arity as u32))
            .prop_map(move |bits| relation_from_bits(d, arity, &bits))
    })
}

fn term(vars: &'static [&'static str], d: u32) -> impl Strategy<Value = Term> {
    prop_oneof![
        3 => proptest::sample::select(vars).prop_map(Term::var),
        1 => (0..d).prop_map(Term::Const),
    ]
}

fn order(d: u32) -> impl Strategy<Value = TotalOrder> {
    Just((0..d).collect::<Vec<Value>>())
        .prop_shuffle()
        .prop_map(|p| TotalOrder::from_permutation(p).unwrap())
}

fn partial_op(d: u32, arity: usize) -> impl Strategy<Value = PartialOperation> {
    proptest::collection::vec(proptest::option::weighted(0.3, 0..d), (d as usize).pow(arity as u32)).prop_map(
        move |cells| {
            let domain = FiniteDomain::new(d).unwrap();
            let keys = Relation::full(domain.clone(), arity).unwrap().to_vec();
            let entries = keys.into_iter().zip(cells).filter_map(|(k, v)| v.map(|v| (k, v)));
            PartialOperation::from_entries(domain, arity, entries).unwrap()
        },
    )
}

proptest! {
    #[test]
    fn components_partition_the_relation(r in relation(4)) {
        let comps = connected_components(&r);
        let total: usize = comps.iter().map(Relation::len).sum();
        prop_assert_eq!(total, r.len());
        for (i, a) in comps.iter().enumerate() {
            prop_assert!(a.is_subset(&r));
            // each component is connected on its own
            prop_assert_eq!(connected_components(a).len(), 1);
            for b in &comps[i + 1..] {
                for s in a.tuples() {
                    for t in b.tuples() {
                        prop_assert!(hamming_distance(&s, &t).unwrap() > 1);
                    }
                }
            }
        }
        let least: Vec<_> = comps.iter().map(|c| c.to_vec()[0].clone()).collect();
        prop_assert!(least.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn identity_pattern_is_neutral(r in relation(4)) {
        prop_assert_eq!(apply_pattern(&r, &Pattern::identity(r.arity())).unwrap(), r);
    }

    #[test]
    fn pattern_composition(
        r in relation(3),
        outer in proptest::collection::vec(term(&["a", "b", "c"], 2), 3),
        inner in proptest::collection::vec(term(&["u", "v"], 2), 3),
    ) {
        let outer = Pattern::new(outer[..r.arity()].to_vec());
        let width = outer.variables().len();
        prop_assume!(width > 0);
        let inner = Pattern::new(inner[..width].to_vec());
        prop_assume!(!inner.variables().is_empty());
        let stepwise = apply_pattern(&apply_pattern(&r, &outer).unwrap(), &inner).unwrap();
        let composed = apply_pattern(&r, &outer.compose(&inner).unwrap()).unwrap();
        prop_assert_eq!(stepwise, composed);
    }

    #[test]
    fn product_size(bits_a in proptest::collection::vec(any::<bool>(), 4), bits_b in proptest::collection::vec(any::<bool>(), 8)) {
        let a = relation_from_bits(2, 2, &bits_a);
        let b = relation_from_bits(2, 3, &bits_b);
        let p = product(&a, &b).unwrap();
        prop_assert_eq!(p.len(), a.len() * b.len());
        prop_assert_eq!(p.arity(), 5);
    }

    #[test]
    fn restrictions_inherit_invariance(
        r in relation(3),
        g in partial_op(2, 3),
        keep in proptest::collection::vec(any::<bool>(), 8),
    ) {
        prop_assume!(r.domain().size() == 2);
        let mut i = 0;
        let f = g.restrict(|_| { i += 1; keep[i - 1] });
        prop_assert!(is_subfunction(&f, &g).unwrap());
        if is_invariant(&r, &g).unwrap().holds() {
            prop_assert!(is_invariant(&r, &f).unwrap().holds());
        }
    }

    #[test]
    fn ordered_maltsev_below_partial_maltsev(d in 2u32..=5, seed in any::<u64>()) {
        let mut rng = generators::rng(seed);
        let mut perm: Vec<Value> = (0..d).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let domain = FiniteDomain::new(d).unwrap();
        let m = make_ordered_maltsev(&domain, &TotalOrder::from_permutation(perm).unwrap()).unwrap();
        prop_assert!(is_subfunction(&m, &make_partial_maltsev(&domain)).unwrap());
    }

    #[test]
    fn satisfies_iff_member(seed in any::<u64>()) {
        let mut rng = generators::rng(seed);
        let params = InstanceParams { max_vars: 5, ..InstanceParams::default() };
        let inst = generators::random_min_closed_instance(&params, &mut rng).unwrap();
        let f = inst.formula();
        let solutions = f.solution_relation().unwrap();
        for a in Relation::full(f.domain().clone(), f.num_variables()).unwrap().tuples() {
            prop_assert_eq!(f.satisfies(&a).unwrap(), solutions.contains(&a));
        }
    }

    #[test]
    fn instance_text_round_trips(seed in any::<u64>()) {
        let mut rng = generators::rng(seed);
        let inst = generators::random_min_closed_instance(&InstanceParams::default(), &mut rng).unwrap();
        let text = inst.to_string();
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn relation_file_round_trips(r in relation(4), op in partial_op(3, 2)) {
        let text = format!("{}{}", format_relation("R", &r), format_partial_operation("f", &op));
        let file = parse_relation_file(&text).unwrap();
        prop_assert_eq!(file.relation("R").unwrap(), &r);
        prop_assert_eq!(file.operation("f").unwrap(), &op);
    }

    #[test]
    fn min_closed_relations_are_maltsev_invariant(
        d in 2u32..=4,
        arity in 1usize..=3,
        seed in any::<u64>(),
        density in 0.0f64..=1.0,
        ord in order(4),
    ) {
        let domain = FiniteDomain::new(d).unwrap();
        let r = generators::gen_random_min_closed(&domain, arity, seed, density).unwrap();
        let natural = TotalOrder::natural(&domain);
        prop_assert!(!r.is_empty());
        prop_assert!(is_invariant(&r, &make_min(&domain, &natural).unwrap()).unwrap().holds());
        let lang = ConstraintLanguage::new(domain.clone(), [("R", r)]).unwrap();
        prop_assert!(check_order(&lang, &natural).unwrap().is_none());

        // the same under a shuffled order
        let perm: Vec<Value> = ord.permutation().iter().copied().filter(|&v| v < d).collect();
        let shuffled = TotalOrder::from_permutation(perm).unwrap();
        let seeds = generators::gen_random_min_closed(&domain, arity, seed, density).unwrap();
        let closed = generators::min_closure(&seeds, &shuffled).unwrap();
        let lang = ConstraintLanguage::new(domain, [("R", closed)]).unwrap();
        prop_assert!(check_order(&lang, &shuffled).unwrap().is_none());
    }

    #[test]
    fn descent_ends_locally_minimal(seed in any::<u64>()) {
        let mut rng = generators::rng(seed);
        let inst = generators::random_min_closed_instance(&InstanceParams::default(), &mut rng).unwrap();
        let f = inst.formula();
        let order = TotalOrder::natural(f.domain());
        let descent = descend_to_minimum(f, &order, inst.start()).unwrap();
        prop_assert!(f.satisfies(&descent.minimum).unwrap());
        prop_assert!(is_locally_minimal(f, &order, &descent.minimum));
        prop_assert!(descent.length <= f.num_variables() * (f.domain().size() as usize - 1));
    }

    #[test]
    fn expressions_define_the_relation(bits in proptest::collection::vec(any::<bool>(), 8)) {
        let r = relation_from_bits(2, 3, &bits);
        let lang = ConstraintLanguage::new(
            FiniteDomain::boolean(),
            ["OR", "NAND", "IMPL"].map(|n| (n, generators::named_boolean(n).unwrap())),
        )
        .unwrap();
        match express_check(&r, &lang).unwrap() {
            Expressibility::Formula(f) => prop_assert_eq!(f.solution_relation().unwrap(), r),
            Expressibility::EmptyRelation => prop_assert!(r.is_empty()),
            Expressibility::NotExpressible { slack } => {
                prop_assert!(!slack.is_empty());
                prop_assert!(slack.iter().all(|t| !r.contains(t)));
            }
        }
    }
}
