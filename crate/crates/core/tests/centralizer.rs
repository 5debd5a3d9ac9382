use selfsim::centralizer::{
    centralizer_brute, exponent_check, verify_prop_4_2, verify_theorem_a, verify_theorem_b, Mode,
    Problem, Setup, VerifyOptions,
};
use selfsim::tree::parse_automaton;
use selfsim::Automorphism;

fn aut(text: &str) -> Automorphism {
    parse_automaton(text)
        .unwrap()
        .generators()
        .unwrap()
        .remove(0)
}

const ADDING: &str = "m 2\nstate a perm 2 1 to e a\ninit a\n";
const TRANSPOSITION: &str = "m 2\nstate a perm 2 1 to e e\ninit a\n";
const DOUBLE: &str = "m 4\nstate a perm 2 1 4 3 to e a e a\ninit a\n";

#[test]
fn theorem_a_small_cases() {
    for (text, depth) in [(TRANSPOSITION, 3), (ADDING, 3), (DOUBLE, 2)] {
        let r = verify_theorem_a(&[aut(text)], depth, VerifyOptions::default()).unwrap();
        println!("{r}");
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn theorem_b_small_cases() {
    for (text, depth) in [(TRANSPOSITION, 3), (ADDING, 3), (DOUBLE, 2)] {
        let r = verify_theorem_b(&[aut(text)], depth, VerifyOptions::default()).unwrap();
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn full_ambient_centralizer_of_double_adding_closure_is_larger() {
    let setup = Setup::new(&[aut(DOUBLE)], 2).unwrap();
    let full = setup
        .delta_centralizer(VerifyOptions { layer_guard: false })
        .unwrap();
    let guarded = setup.delta_centralizer(VerifyOptions::default()).unwrap();
    assert_eq!(full.order(), 256);
    assert_eq!(guarded.order(), 64);
}

#[test]
fn prop_4_2_on_catalog_machines() {
    for (text, depth) in [(TRANSPOSITION, 3), (ADDING, 3), (DOUBLE, 2)] {
        let r = verify_prop_4_2(&[aut(text)], depth).unwrap();
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn torsion_exponents() {
    for depth in 1..=6 {
        let e = exponent_check(&[aut(TRANSPOSITION)], depth).unwrap();
        assert_eq!((e.closure, e.h), (2, 2));
    }
    let pair = aut("m 4\nstate a perm 2 1 4 3 to e e e e\ninit a\n");
    for depth in 1..=4 {
        let e = exponent_check(std::slice::from_ref(&pair), depth).unwrap();
        assert_eq!((e.closure, e.h), (2, 2));
    }
    let id = aut("m 2\ninit e\n");
    assert_eq!(exponent_check(&[id], 3).unwrap().closure, 1);
}

#[test]
fn levelwise_matches_brute_force_on_double_adding_generators() {
    let setup = Setup::new(&[aut(DOUBLE)], 2).unwrap();
    let xs = setup.delta_gens().unwrap();
    let brute = centralizer_brute(4, &xs, 2, None).unwrap();
    let mut sol = Problem::centralizer(4, 2, &xs)
        .unwrap()
        .solve(Mode::Enumerate)
        .unwrap()
        .solutions;
    sol.sort();
    assert_eq!(sol, brute.elements());
}
