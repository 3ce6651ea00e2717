//! Instance and design files round-trip; the generator is seeded.

mod common;

use common::*;
use cprsnp::generate::{generate, Capacities, GenParams};
use cprsnp::io::{parse_design, parse_instance, write_design, write_instance};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instance_round_trip(seed in any::<u64>(), k in 0usize..=3, kp in 0usize..=2) {
        let inst = small_instance(seed, 10, 30, 4, k, kp);
        let text = write_instance(&inst, &["round trip"]);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(write_instance(&back, &["round trip"]), text);
    }

    #[test]
    fn design_round_trip(seed in any::<u64>(), kp in 0usize..=2, density in 0.0f64..=1.0) {
        let aug = augmented(&small_instance(seed, 10, 30, 4, 1, kp));
        let design = random_design(&aug, &mut rng(seed), density);
        let text = write_design(&aug, &design);
        prop_assert_eq!(parse_design(&aug, &text).unwrap(), design);
    }

    #[test]
    fn generator_is_a_function_of_its_parameters(seed in any::<u64>(), nodes in 3usize..15, random in any::<bool>()) {
        let caps = if random { Capacities::Random } else { Capacities::Uniform(None) };
        let terminals = (nodes - 1).min(4);
        let arcs = (nodes - 1) * 2;
        let p = GenParams::new(nodes, terminals, arcs.min((nodes - 1) * (nodes - 1)), caps, seed);
        let a = generate(&p).unwrap();
        prop_assert_eq!(write_instance(&a, &[]), write_instance(&generate(&p).unwrap(), &[]));
        prop_assert_eq!(a.num_vertices(), nodes);
        prop_assert_eq!(a.terminals().len(), terminals);
        prop_assert!(a.arcs().iter().all(|arc| arc.head != a.root() && arc.tail != arc.head));
    }
}

#[test]
fn errors_carry_line_numbers() {
    let bad = "c x\np cprsnp 3 2\nr 1\nt 3\na 1 2 1 1\na 2 three 1 1\nb 0 0\n";
    let e = parse_instance(bad).unwrap_err();
    assert_eq!(e.line, 6);
    assert!(e.to_string().starts_with("line 6:"));

    let aug = augmented(&diamond(1, 1));
    assert_eq!(parse_design(&aug, "y 1 2\ny 2 1\n").unwrap_err().line, 2);
    assert_eq!(parse_design(&aug, "y 1 3\np 1 2\n").unwrap_err().line, 2);
}
