//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails or overruns its time limit.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use selfsim::catalog::{catalog_spec, t4_analysis, T4Case};
use selfsim::centralizer::{
    centralizer_brute, exponent_check, verify_theorem_a, Mode, Problem, Setup, TruncatedGroup,
    VerifyOptions,
};
use selfsim::diag::{delta_closure_portraits, delta_vertex, factor, permutability_sides, x_i};
use selfsim::gdata::data::OrbitData;
use selfsim::gdata::{
    delta_invariance_check, independence_check, theorem_c_family, GDataSpec, Lattice, Tri, Variant,
};
use selfsim::permsym::{activity_group, is_rigid, orbits, rigid_group};
use selfsim::tree::{Automaton, State};
use selfsim::{Automorphism, Perm, Portrait};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn gens(spec: &str) -> Vec<Automorphism> {
    catalog_spec(spec).expect("catalog entry").generators
}

fn random_automorphism(rng: &mut ChaCha8Rng, m: usize, max_states: usize) -> Automorphism {
    let all = Perm::all(m);
    let n = rng.gen_range(1..=max_states);
    let states = (0..n)
        .map(|_| State {
            perm: all[rng.gen_range(0..all.len())].clone(),
            children: (0..m).map(|_| rng.gen_range(0..n)).collect(),
        })
        .collect();
    Automorphism::new(&Automaton::new(m, states).unwrap(), 0).unwrap()
}

fn random_word(rng: &mut ChaCha8Rng, m: usize, max_len: usize) -> Vec<usize> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..m)).collect()
}

fn levelwise(m: usize, xs: &[Portrait], depth: usize) -> TruncatedGroup {
    let out = Problem::centralizer(m, depth, xs)
        .unwrap()
        .solve(Mode::Enumerate)
        .unwrap();
    TruncatedGroup::from_elements(m, depth, out.solutions)
}

fn oracle_equivalence() -> Outcome {
    let mut orders = Vec::new();
    for (name, spec, delta_len) in [
        ("adding", "adding", 0),
        ("<(1 2)> with Δ-length 2", "transposition", 2),
        ("flip", "flip", 0),
    ] {
        let g = gens(spec);
        let part = orbits(&activity_group(&g).unwrap());
        for depth in 2..=4 {
            let mut xs: Vec<Portrait> = g.iter().map(|a| a.portrait(depth).unwrap()).collect();
            if delta_len > 0 {
                xs = delta_closure_portraits(&xs, &part, delta_len, depth).unwrap();
            }
            let level = levelwise(2, &xs, depth);
            let brute = centralizer_brute(2, &xs, depth, None).unwrap();
            ensure(
                level == brute,
                format!(
                    "{name} at depth {depth}: {} vs {}",
                    level.order(),
                    brute.order()
                ),
            )?;
            orders.push(level.order());
        }
    }
    Ok(format!("9 comparisons, centralizer orders {orders:?}"))
}

fn theorem_a() -> Outcome {
    let opts = VerifyOptions::default();
    let t = gens("transposition");
    let setup = Setup::new(&t, 3).unwrap();
    let lhs = setup.delta_centralizer(opts).unwrap().order();
    let rhs = setup
        .delta_generated(&setup.b_gens().unwrap())
        .unwrap()
        .order();
    ensure(
        lhs == 8 && rhs == 8,
        format!("<(1 2)> at depth 3: orders {lhs} and {rhs}, expected 8"),
    )?;
    for (spec, depth) in [("transposition", 3), ("adding", 3), ("double-adding", 2)] {
        let r = verify_theorem_a(&gens(spec), depth, opts).unwrap();
        ensure(r.passed(), format!("{spec} at depth {depth}:\n{r}"))?;
        let rigid = r.assertion("rigid part empty").map(|a| a.passed);
        ensure(
            rigid == Some(true),
            format!("{spec}: rigid part not reported empty"),
        )?;
    }
    Ok("<(1 2)> depth 3 (8 = 8), adding depth 3, double adding depth 2".into())
}

/// Random exponents for orbit-type (2,2) with the parities of
/// `j_1 = i_1 + i_2` and `j_3 = i_3 + i_4` chosen by `case`.
fn t4_vector(rng: &mut ChaCha8Rng, case: usize) -> Vec<i64> {
    let (p1, p3) = match case {
        0 => (0, 0),
        1 => (1, 1),
        _ => {
            if rng.gen_bool(0.5) {
                (0, 1)
            } else {
                (1, 0)
            }
        }
    };
    let mut i: Vec<i64> = (0..4).map(|_| rng.gen_range(-4..=4)).collect();
    if (i[0] + i[1]).rem_euclid(2) != p1 {
        i[1] += 1;
    }
    if (i[2] + i[3]).rem_euclid(2) != p3 {
        i[3] -= 1;
    }
    i
}

fn t4_trichotomy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7434);
    let mut seen = [0usize; 3];
    for k in 0..20 {
        let case = k % 3;
        let exps = t4_vector(&mut rng, case);
        let t = t4_analysis(&[2, 2], &exps).map_err(|e| format!("{exps:?}: {e}"))?;
        let expected = [T4Case::EvenEven, T4Case::OddOdd, T4Case::Mixed][case];
        ensure(
            t.case == expected,
            format!("{exps:?}: case {} expected {expected}", t.case),
        )?;
        ensure(t.report.passed(), format!("{exps:?}:\n{}", t.report))?;
        let required: &[&str] = match t.case {
            T4Case::EvenEven => &["a^2 = e at depth 4", "j_1 = j_3 = 0 modulo the order of a"],
            T4Case::OddOdd => &["r commutes with a at depth 3"],
            _ => &[
                "R(A) empty at depth 3",
                "conjugacy tester: a^j1, a^j3 absent at depth 3",
            ],
        };
        for name in required {
            ensure(
                t.report.assertion(name).is_some_and(|a| a.passed),
                format!("{exps:?}: missing assertion {name}"),
            )?;
        }
        seen[case] += 1;
    }
    Ok(format!(
        "20 vectors, cases (i) {} (ii) {} (iii) {}",
        seen[0], seen[1], seen[2]
    ))
}

const DOUBLE_DATA: &str = "rank 1\norbit 1 index 2\nH\n2\nf\n1/2\norbit 2 index 2\nH\n2\nf\n1/2\n";
const ADDING_DATA: &str = "rank 1\norbit 1 index 2\nH\n2\nf\n1/2\ntransversal\n0\n1\n";

fn double_adding_facts() -> Outcome {
    let d = GDataSpec::parse(DOUBLE_DATA).unwrap();
    let rec = d.is_recurrent().unwrap();
    let strong = d.is_strongly_recurrent().unwrap();
    ensure(rec == Tri::True, format!("recurrent = {rec}"))?;
    ensure(
        strong == Tri::False,
        format!("strongly recurrent = {strong}"),
    )?;
    let a = gens("double-adding").remove(0);
    let depth = 4;
    let group = TruncatedGroup::generate(4, depth, &[a.portrait(depth).unwrap()], 1 << 16).unwrap();
    let sq = TruncatedGroup::generate(
        4,
        depth,
        &[a.pow(2).unwrap().portrait(depth).unwrap()],
        1 << 16,
    )
    .unwrap();
    for letter in [0usize, 2] {
        let fix: Vec<Portrait> = group
            .elements()
            .iter()
            .filter(|g| g.root_perm().apply(letter) == letter)
            .cloned()
            .collect();
        let fix = TruncatedGroup::from_elements(4, depth, fix);
        ensure(
            fix == sq,
            format!(
                "Fix({}) has order {}, <a^2> {}",
                letter + 1,
                fix.order(),
                sq.order()
            ),
        )?;
    }
    Ok(format!(
        "recurrent {rec}, strongly recurrent {strong}, Fix(1) = Fix(3) = <a^2> of order {}",
        sq.order()
    ))
}

fn operator_calculus() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xde17a);
    for k in 0..100 {
        let m = 2 + k % 2;
        let a = random_automorphism(&mut rng, m, 3);
        let u = random_word(&mut rng, m, 3);
        let v = random_word(&mut rng, m, 3);
        let lhs = delta_vertex(&delta_vertex(&a, &u).unwrap(), &v).unwrap();
        let vu: Vec<usize> = v.iter().chain(&u).copied().collect();
        let rhs = delta_vertex(&a, &vu).unwrap();
        ensure(
            lhs.equal(&rhs).unwrap(),
            format!("δ_u δ_v ≠ δ_vu for u = {u:?}, v = {v:?}"),
        )?;
    }
    for k in 0..50 {
        let m = 2 + k % 2;
        let a = random_automorphism(&mut rng, m, 3);
        let r = random_automorphism(&mut rng, m, 3);
        let w = random_word(&mut rng, m, 3);
        let (lhs, rhs) = permutability_sides(&a, &r, &w, 6).unwrap();
        ensure(lhs == rhs, format!("permutability fails at w = {w:?}"))?;
    }
    Ok("100 δ pairs exact, 50 permutability triples at depth 6".into())
}

fn gdata_round_trip() -> Outcome {
    for (data, spec) in [(ADDING_DATA, "adding"), (DOUBLE_DATA, "double-adding")] {
        let rep = GDataSpec::parse(data)
            .unwrap()
            .induced_representation()
            .unwrap();
        let target = gens(spec).remove(0);
        ensure(rep.len() == 1, format!("{spec}: {} generators", rep.len()))?;
        ensure(
            rep[0].portrait(6).unwrap() == target.portrait(6).unwrap(),
            format!("{spec}: portraits differ at depth 6"),
        )?;
    }
    Ok("adding and double adding machines at depth 6".into())
}

fn theorem_c() -> Outcome {
    let f = theorem_c_family(2, Variant::InfiniteRank).unwrap();
    let r = delta_invariance_check(&f, 8).unwrap();
    ensure(r.passed(), format!("Δ-invariance:\n{r}"))?;
    let alphas: Vec<Portrait> = (1..=6)
        .map(|i| f.realize(i).unwrap().portrait(8).unwrap())
        .collect();
    for (i, x) in alphas.iter().enumerate() {
        for (j, y) in alphas.iter().enumerate().skip(i + 1) {
            ensure(
                x.commutes_with(y),
                format!("α_{} and α_{} do not commute at depth 8", i + 1, j + 1),
            )?;
        }
    }
    let r = independence_check(&f, 3, 3, 10).unwrap();
    ensure(r.passed(), format!("independence:\n{r}"))?;
    let states = f.realize(4).unwrap().lazy_states(64).unwrap();
    let labels: BTreeSet<String> = states
        .iter()
        .map(|s| {
            if s.is_identity().unwrap() {
                "e".to_string()
            } else {
                s.lazy_label().unwrap_or_default()
            }
        })
        .collect();
    let expected: BTreeSet<String> = ["α_4", "α_2", "α_1", "e"]
        .into_iter()
        .map(String::from)
        .collect();
    ensure(
        states.len() == 4 && labels == expected,
        format!("states(α_4) = {labels:?}"),
    )?;
    Ok("Δ-invariance to 8, α_1..α_6 commute at depth 8, no relation |c| <= 3, states(α_4) = {α_4, α_2, α_1, e}".into())
}

fn multiplicity() -> Outcome {
    let a = gens("multiplicity:m=2:s=2").remove(0);
    let part = orbits(&activity_group(std::slice::from_ref(&a)).unwrap());
    ensure(part.len() == 2, "expected two orbits")?;
    let f = factor(&a, &part).unwrap();
    for (i, ai) in f.factors.iter().enumerate() {
        let sq = ai.pow(2).unwrap();
        let xi = x_i(&a, &part, i).unwrap();
        ensure(
            sq.equal(&xi).unwrap(),
            format!("(a_[{}])^2 ≠ a^x_{}", i + 1, i + 1),
        )?;
    }
    let c = Setup::new(&[a], 2).unwrap().centralizer().unwrap();
    let rigid: BTreeSet<Perm> = c
        .elements()
        .iter()
        .map(|p| p.root_perm())
        .filter(|p| is_rigid(p, &part))
        .collect();
    let sym: BTreeSet<Perm> = rigid_group(&part)
        .elements()
        .unwrap()
        .iter()
        .cloned()
        .collect();
    ensure(
        rigid == sym && sym.len() == 2,
        format!("rigid roots {rigid:?}"),
    )?;
    Ok(format!(
        "squares of both factors exact, rigid roots of C(A) at depth 2 form Sym(2), |C(A)| = {}",
        c.order()
    ))
}

fn torsion_exponent() -> Outcome {
    let mut seen = Vec::new();
    for spec in ["transposition", "rooted:m=4:perm=(1 2)(3 4)"] {
        let g = gens(spec);
        for depth in 1..=5 {
            let e = exponent_check(&g, depth).unwrap();
            ensure(
                e.closure == 2 && e.h == 2,
                format!(
                    "{spec} depth {depth}: closure exponent {}, H exponent {}",
                    e.closure, e.h
                ),
            )?;
        }
        seen.push(spec);
    }
    Ok("exponent 2 at depths 1..5 for both groups".into())
}

fn small_inverse(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("nonsingular");
        a.swap(c, p);
        let inv = BigRational::one() / a[c][c].clone();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let k = a[r][c].clone();
                let pivot = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot) {
                    *x -= &k * y;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `H` upper triangular with small positive diagonal; `f` sends the rows of
/// `H` to the rows of an integer matrix of full rank, so it is injective.
fn random_orbit(rng: &mut ChaCha8Rng, n: usize) -> OrbitData {
    let h: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => 0,
                    std::cmp::Ordering::Equal => rng.gen_range(1..=3),
                    std::cmp::Ordering::Greater => rng.gen_range(-2..=2),
                })
                .collect()
        })
        .collect();
    let v = loop {
        let v: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect())
            .collect();
        let vq: Vec<Vec<BigRational>> = v
            .iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect();
        if Lattice::from_i64(n, &v).unwrap().is_full_rank() {
            break vq;
        }
    };
    let hq: Vec<Vec<BigRational>> = h
        .iter()
        .map(|r| r.iter().map(|&x| rat(x)).collect())
        .collect();
    let hinv = small_inverse(&hq);
    let f = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BigRational::zero(), |acc, k| acc + &hinv[i][k] * &v[k][j]))
                .collect()
        })
        .collect();
    let index = (0..n).map(|i| h[i][i] as usize).product();
    OrbitData {
        index,
        h: Lattice::from_i64(n, &h).unwrap(),
        f,
        transversal: Vec::new(),
    }
}

fn strong_recurrence_obstruction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut verdicts = [0usize; 3];
    for _ in 0..50 {
        let n = rng.gen_range(1..=4);
        let d = GDataSpec::new(
            n,
            vec![random_orbit(&mut rng, n), random_orbit(&mut rng, n)],
        )
        .map_err(|e| format!("generated data rejected: {e}"))?;
        let t = d.is_strongly_recurrent().map_err(|e| e.to_string())?;
        ensure(t != Tri::True, format!("strongly recurrent:\n{d}"))?;
        verdicts[match t {
            Tri::True => 0,
            Tri::False => 1,
            Tri::Unknown => 2,
        }] += 1;
    }
    Ok(format!(
        "50 instances: {} false, {} unknown, 0 true",
        verdicts[1], verdicts[2]
    ))
}

/// Name, time limit in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", 10, oracle_equivalence),
        ("theorem A at desk scale", 60, theorem_a),
        ("(2,2) case analysis", 60, t4_trichotomy),
        ("double adding machine facts", 5, double_adding_facts),
        ("operator calculus", 10, operator_calculus),
        ("G-data round trip", 5, gdata_round_trip),
        ("theorem C family", 120, theorem_c),
        ("multiplicity-2 machine", 10, multiplicity),
        ("torsion exponent", 10, torsion_exponent),
        (
            "strong-recurrence obstruction",
            30,
            strong_recurrence_obstruction,
        ),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let took = start.elapsed();
        let result = match result {
            Ok(detail) if took > Duration::from_secs(*limit) => {
                Err(format!("{detail}; took {took:.1?}, limit {limit} s"))
            }
            r => r,
        };
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({took:.1?})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({took:.1?})", k + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all {} criteria pass", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria fail", criteria.len());
        ExitCode::FAILURE
    }
}
