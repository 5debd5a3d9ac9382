//! Case analysis for cyclic groups on `T_4` of orbit-types `(2,2)`,
//! `(2,1,1)` and `(3,1)`.
//!
//! Writes the centralizer of `a = (a^{i_1}, ..., a^{i_4}) σ` in symbolic
//! form, then checks every emitted element against `a` at depth 3.

use std::fmt;

use num_bigint::BigUint;

use crate::centralizer::cyclic::{
    conjugate_at_depth, cyclic_centralizer, power_name, CentralizerDescription, CyclicGenerator,
};
use crate::centralizer::solver::{Mode, Problem};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::tree::perm::Perm;
use crate::tree::portrait::Portrait;

const DEPTH: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum T4Case {
    /// `(2,2)`, `j_1` and `j_3` even.
    EvenEven,
    /// `(2,2)`, `j_1` and `j_3` odd.
    OddOdd,
    /// `(2,2)`, mixed parity.
    Mixed,
    TwoOneOne,
    ThreeOne,
}

impl fmt::Display for T4Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            T4Case::EvenEven => "(i)",
            T4Case::OddOdd => "(ii)",
            T4Case::Mixed => "(iii)",
            T4Case::TwoOneOne => "(2,1,1)",
            T4Case::ThreeOne => "(3,1)",
        })
    }
}

/// Root permutation for an orbit-type on `T_4`.
pub fn t4_sigma(orbit_type: &[usize]) -> Result<Perm> {
    let text = match orbit_type {
        [2, 2] => "(1 2)(3 4)",
        [2, 1, 1] => "(1 2)",
        [3, 1] => "(1 2 3)",
        [4] => "(1 2 3 4)",
        [1, 1, 1, 1] => "()",
        _ => {
            return Err(Error::input(format!(
                "orbit-type {orbit_type:?} is not one of (2,2), (2,1,1), (3,1), (4), (1,1,1,1)"
            )))
        }
    };
    Perm::parse(4, text)
}

/// 2-adic valuation, `None` for zero.
pub fn two_adic(i: i64) -> Option<u32> {
    (i != 0).then(|| i.trailing_zeros())
}

fn v2(i: i64) -> String {
    two_adic(i).map_or("∞".to_string(), |v| v.to_string())
}

fn count_centralizer(x: &Portrait, depth: usize, roots: Option<Vec<Perm>>) -> Result<BigUint> {
    let mut p = Problem::centralizer(4, depth, std::slice::from_ref(x))?;
    if let Some(r) = roots {
        p = p.with_root_candidates(r);
    }
    Ok(p.solve(Mode::Count)?.count)
}

pub struct T4Analysis {
    pub case: T4Case,
    pub description: CentralizerDescription,
    pub report: Report,
}

/// Runs the case analysis; the report carries the verdicts.
pub fn t4_analysis(orbit_type: &[usize], exps: &[i64]) -> Result<T4Analysis> {
    if !matches!(orbit_type, [2, 2] | [2, 1, 1] | [3, 1]) {
        return Err(Error::input(
            "t4 analysis covers orbit-types (2,2), (2,1,1) and (3,1)",
        ));
    }
    let gen = CyclicGenerator::new(t4_sigma(orbit_type)?, exps.to_vec())?;
    let i = exps;
    let a = gen.a().portrait(DEPTH + 1)?;
    let a3 = a.truncate(DEPTH);
    let pow = |n: i64, d: usize| -> Result<Portrait> { gen.power(n).portrait(d) };
    let desc = cyclic_centralizer(&gen, DEPTH)?;

    let ty: Vec<String> = orbit_type.iter().map(|x| x.to_string()).collect();
    let mut r = Report::new(format!(
        "T_4 analysis, orbit-type ({}), a = {gen}",
        ty.join(",")
    ));
    for c in &desc.stab1_components {
        r.fact(format!("Stab_C(1): {c}"));
    }
    for (k, b) in desc.b_part.iter().enumerate() {
        r.fact(format!("B(A) generator {}: {b}", k + 1));
    }

    // Stab_C(1), component by component against the level-wise count
    let id = Perm::identity(4);
    let stab = count_centralizer(&a3, DEPTH, Some(vec![id.clone()]))?;
    let mut product = BigUint::from(1u32);
    for c in &desc.stab1_components {
        product *= count_centralizer(&pow(c.j, DEPTH - 1)?, DEPTH - 1, None)?;
    }
    r.fact(format!("|Stab_C(1)| at depth {DEPTH}: {stab}"));
    r.check(
        "Stab_C(1) matches its components",
        stab == product,
        format!(
            "level-wise {stab}, product of |C(a^j)| at depth {} is {product}",
            DEPTH - 1
        ),
    );
    let mut commute = true;
    for t in 0..3 {
        let values: Vec<Portrait> = desc
            .stab1_components
            .iter()
            .enumerate()
            .map(|(k, _)| pow(t + k as i64, DEPTH - 1))
            .collect::<Result<_>>()?;
        commute &= desc.instantiate(&gen, &values)?.commutes_with(&a3);
    }
    r.check(
        "Stab_C(1) instances commute with a",
        commute,
        format!("sample values c = a^t at depth {DEPTH}"),
    );
    r.check(
        "B(A) commutes with a",
        desc.b_part.iter().all(|b| b.commutes_with(&a3)),
        format!("{} generators at depth {DEPTH}", desc.b_part.len()),
    );

    let case = match orbit_type {
        [2, 2] => {
            let (j1, j3) = (i[0] + i[1], i[2] + i[3]);
            let xi = Perm::parse(4, "(1 3)(2 4)")?;
            r.fact(format!(
                "j_1 = {j1}, j_3 = {j3}, 2-adic valuations {} and {}",
                v2(j1),
                v2(j3)
            ));
            let searched = desc
                .rigid_part
                .iter()
                .find(|l| l.xi == xi)
                .and_then(|l| l.lift.clone());
            match (j1 % 2 == 0, j3 % 2 == 0) {
                (true, true) => {
                    r.check("a^2 = e at depth 4", pow(2, 4)?.is_identity(), "");
                    r.check(
                        "j_1 = j_3 = 0 modulo the order of a",
                        pow(j1, 4)?.is_identity() && pow(j3, 4)?.is_identity(),
                        format!("a^{j1} and a^{j3} trivial at depth 4"),
                    );
                    let sec = [
                        pow(0, 2)?,
                        pow(i[2] - i[0], 2)?,
                        pow(0, 2)?,
                        pow(i[0] - i[2], 2)?,
                    ];
                    let rr = Portrait::from_sections(&xi, &sec)?;
                    r.fact(format!(
                        "r = (e, {}, e, {})(1 3)(2 4)",
                        power_name(i[2] - i[0]),
                        power_name(i[0] - i[2])
                    ));
                    r.check(
                        "r commutes with a at depth 3",
                        rr.commutes_with(&a3),
                        rr.to_string(),
                    );
                    r.check("lift search finds R(A)", searched.is_some(), "");
                    T4Case::EvenEven
                }
                (false, false) => {
                    let g = conjugate_at_depth(&pow(j1, 2)?, &pow(j3, 2)?, 2)?;
                    r.check(
                        "a^j1 conjugate to a^j3 at depth 2",
                        g.is_some(),
                        "level-wise conjugator search",
                    );
                    if let Some(g) = g {
                        let gi = g.inverse();
                        let sec = [
                            g.clone(),
                            pow(-i[0], 2)?.compose(&g).compose(&pow(i[2], 2)?),
                            gi.clone(),
                            pow(-i[2], 2)?.compose(&gi).compose(&pow(i[0], 2)?),
                        ];
                        let rr = Portrait::from_sections(&xi, &sec)?;
                        r.fact(format!("g = {g}"));
                        r.fact("r = (g, a^-i1 g a^i3, g^-1, a^-i3 g^-1 a^i1)(1 3)(2 4)");
                        r.check(
                            "r commutes with a at depth 3",
                            rr.commutes_with(&a3),
                            rr.to_string(),
                        );
                    }
                    r.check("lift search finds R(A)", searched.is_some(), "");
                    T4Case::OddOdd
                }
                _ => {
                    r.check(
                        "R(A) empty at depth 3",
                        searched.is_none() && desc.rigid_part.iter().all(|l| l.lift.is_none()),
                        "no lift of (1 3)(2 4)",
                    );
                    let g = conjugate_at_depth(&pow(j1, DEPTH)?, &pow(j3, DEPTH)?, DEPTH)?;
                    r.check(
                        "conjugacy tester: a^j1, a^j3 absent at depth 3",
                        g.is_none(),
                        "",
                    );
                    T4Case::Mixed
                }
            }
        }
        [2, 1, 1] => {
            let xi = Perm::parse(4, "(3 4)")?;
            r.fact(format!(
                "2-adic valuations of i_3 = {}, i_4 = {}: {} and {}",
                i[2],
                i[3],
                v2(i[2]),
                v2(i[3])
            ));
            let searched = desc
                .rigid_part
                .iter()
                .find(|l| l.xi == xi)
                .and_then(|l| l.lift.clone());
            let r3 = conjugate_at_depth(&pow(i[2], 2)?, &pow(i[3], 2)?, 2)?;
            match &r3 {
                Some(r3) => {
                    let e = Portrait::identity(4, 2);
                    let rr =
                        Portrait::from_sections(&xi, &[e.clone(), e, r3.clone(), r3.inverse()])?;
                    r.fact(format!("r = (e, e, r_3, r_3^-1)(3 4) with r_3 = {r3}"));
                    r.check(
                        "r commutes with a at depth 3",
                        rr.commutes_with(&a3),
                        rr.to_string(),
                    );
                }
                None => r.fact("no r_3 with (a^i3)^r_3 = a^i4 at depth 2; R(A) empty"),
            }
            r.fact(format!(
                "valuation criterion predicts a lift: {} (assumes a of infinite order; a^2 = e at depth 4: {})",
                two_adic(i[2]) == two_adic(i[3]),
                pow(2, 4)?.is_identity()
            ));
            r.check(
                "explicit r agrees with the lift search",
                r3.is_some() == searched.is_some(),
                format!("explicit {}, search {}", r3.is_some(), searched.is_some()),
            );
            T4Case::TwoOneOne
        }
        _ => {
            r.check(
                "rigid part trivial",
                desc.s_candidates.is_empty(),
                "C_Sym(4)(P) = P has no rigid element besides e",
            );
            let c = count_centralizer(&a3, DEPTH, None)?;
            r.check(
                "C(A) = Stab_C(1) B(A) at depth 3",
                c == stab * BigUint::from(3u32),
                format!("|C(A)| = {c}"),
            );
            T4Case::ThreeOne
        }
    };
    r.fact(format!("case {case}"));
    Ok(T4Analysis {
        case,
        description: desc,
        report: r,
    })
}
