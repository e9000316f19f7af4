//! Acceptance checks, one line per criterion. Runs without the test harness
//! so that every line is printed; exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use hopf_dse::algebra::{coproduct, coproduct_forest, graft_operator, pairing, pairing_sums};
use hopf_dse::prelie::{self, eta_from_solution, FdB, FdbWord, SecondType};
use hopf_dse::rational::{frac, int};
use hopf_dse::solver::{
    check_hopf, coproduct_in_monomial_basis, extract_lambda, lambda_oracle, solve, solve_oracle, HopfVerdict,
    LambdaEntry, Monomial,
};
use hopf_dse::sysfile::parse_system;
use hopf_dse::systems::{
    build_case1, build_case2, check_prop25, check_theorem23, check_theorem27, DegreeSpec, FundamentalData,
    FundamentalVertex, QuasiCyclicData,
};
use hopf_dse::{Catalog, Decoration, Forest, ForestSum, Q, Sdse, TensorSum, Tree};
use num_traits::{One, Zero};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

const INTRO: &str = include_str!("golden/intro.sys");
const INTRO_GOLDEN: &str = include_str!("golden/intro_degree3.txt");

fn golden_lines(sol: &hopf_dse::Solution) -> String {
    let mut out = String::new();
    for i in 1..=3 {
        for n in 1..=3 {
            out += &format!("x{}({}) = {}\n", i, n, sol.component(i, n));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let sys = parse_system(INTRO).map_err(err)?;
    let sol = solve(&sys, 3).map_err(err)?;
    let ladder2 = Tree::parse("(1.1: (1.1:))").map_err(err)?;
    let ladder3 = Tree::parse("(1.1: (1.1: (1.1:)))").map_err(err)?;
    let (c2, c3) = (sol.component(1, 2).coeff_of_tree(&ladder2), sol.component(1, 3).coeff_of_tree(&ladder3));
    ensure(c2 == int(3) && c3 == int(9), || format!("ladder coefficients {} and {}", c2, c3))?;
    ensure(golden_lines(&sol) == INTRO_GOLDEN, || "solution differs from the frozen goldens".into())?;
    let oracle = solve_oracle(&sys, 3).map_err(err)?;
    ensure(golden_lines(&oracle) == INTRO_GOLDEN, || "oracle differs from the frozen goldens".into())?;
    Ok("ladders 3 and 9, all degree <= 3 coefficients match".into())
}

fn intro_data() -> FundamentalData {
    FundamentalData::new(vec![
        FundamentalVertex::i0(frac(-1, 3)).with_degrees(DegreeSpec::from(1)),
        FundamentalVertex::j0(),
        FundamentalVertex::i0(int(1)),
    ])
    .with_scale(1, int(3))
}

fn pure_data() -> FundamentalData {
    FundamentalData::new(vec![
        FundamentalVertex::i0(frac(1, 2)).with_degrees(DegreeSpec::finite(&[1, 2])),
        FundamentalVertex::j0().with_degrees(DegreeSpec::finite(&[1, 3])),
        FundamentalVertex::k0().with_degrees(DegreeSpec::from(1)),
    ])
}

fn extended_data() -> FundamentalData {
    FundamentalData::new(vec![
        FundamentalVertex::i0(int(2)).with_degrees(DegreeSpec::finite(&[1, 2])),
        FundamentalVertex::j0(),
        FundamentalVertex::l0(&[(1, int(1)), (2, frac(1, 2))]),
        FundamentalVertex::i1(int(0), &[(1, int(1)), (2, int(-1))]).with_degrees(DegreeSpec::finite(&[1, 2])),
        FundamentalVertex::j1(int(2), &[(3, int(1))]),
    ])
}

fn extension_data() -> FundamentalData {
    FundamentalData::new(vec![
        FundamentalVertex::j0().with_degrees(DegreeSpec::finite(&[1, 2])),
        FundamentalVertex::k0(),
        FundamentalVertex::e(&[(2, int(1))]).with_degrees(DegreeSpec::finite(&[1, 2, 3])),
    ])
}

fn hopf_to(name: &str, sys: &Sdse, n: u32) -> Result<(), String> {
    match check_hopf(&solve(sys, n).map_err(err)?) {
        HopfVerdict::HopfUpTo(k) if k == n => Ok(()),
        HopfVerdict::HopfUpTo(k) => Err(format!("{}: only checked to {}", name, k)),
        HopfVerdict::Counterexample(c) => Err(format!("{}: {}", name, c)),
    }
}

fn criterion_2() -> Outcome {
    let mut count = 0;
    for (l, m) in [(1, -1), (1, 0), (0, 1), (2, 3)] {
        let sys = build_case1(&DegreeSpec::finite(&[1, 2]), &int(l), &int(m)).map_err(err)?;
        hopf_to(&format!("case1 ({},{})", l, m), &sys, 5)?;
        count += 1;
    }
    for (m, a) in [(1, 1), (2, -1)] {
        let sys = build_case2(&DegreeSpec::finite(&[1, 2, 3, 4]), m, &int(a)).map_err(err)?;
        hopf_to(&format!("case2 ({},{})", m, a), &sys, 5)?;
        count += 1;
    }
    for (name, data) in [("introduction", intro_data()), ("I0/J0/K0", pure_data())] {
        hopf_to(name, &data.build().map_err(err)?, 4)?;
        count += 1;
    }
    hopf_to("quasi-cyclic", &QuasiCyclicData::cyclic(3, &[1, 2, 4]).build().map_err(err)?, 4)?;
    count += 1;
    let bad = parse_system("vars 1\neq 1\nop 1 : 1 + h1\nop 2 : 1 + 2*h1\n").map_err(err)?;
    for n in 2..=3 {
        let sol = solve(&bad, n).map_err(err)?;
        if let HopfVerdict::Counterexample(c) = check_hopf(&sol) {
            ensure(c.verify(&sol), || format!("certificate does not verify: {}", c))?;
            return Ok(format!("{} Hopf systems, counterexample certificate at N={} verified", count, n));
        }
    }
    Err("no counterexample for B_1(1+x) + B_2(1+2x) at N <= 3".into())
}

fn criterion_3() -> Outcome {
    let sys = parse_system("vars 1\neq 1\nop 1 : (1+h1)^2\n").map_err(err)?;
    let sol = solve(&sys, 5).map_err(err)?;
    let table = extract_lambda(&sys, &sol);
    let d = Decoration::new(1, 1);
    for n in 1..=4 {
        let v = table.value(1, d, n).cloned();
        ensure(v == Some(int(n as i64 + 1)), || format!("lambda_{} = {:?}", n, v))?;
    }
    let fit = table.fit(1, d).ok_or("no fit")?;
    ensure(fit.exact && fit.alpha_beta() == Some((int(2), frac(-1, 2))), || {
        format!("fit {:?}", fit.alpha_beta())
    })?;
    let mut checked = 0;
    for data in [intro_data(), pure_data(), extended_data()] {
        let sys = data.build().map_err(err)?;
        let sol = solve(&sys, 5).map_err(err)?;
        let table = extract_lambda(&sys, &sol);
        ensure(table == lambda_oracle(&sys, &sol), || "extraction differs from its oracle".into())?;
        for i in 1..=data.len() {
            for j in 1..=data.len() {
                for n in 1..=4 {
                    let Ok(want) = data.expected_lambda(i, j, n) else { continue };
                    match table.get(i, Decoration::new(j as u32, 1), n) {
                        Some(LambdaEntry::Value(v)) => {
                            ensure(*v == want, || format!("lambda_{}^({},{}) = {}, expected {}", n, i, j, v, want))?;
                            checked += 1;
                        }
                        Some(LambdaEntry::Inconsistent) => {
                            return Err(format!("lambda_{}^({},{}) inconsistent", n, i, j));
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    Ok(format!("lambda_n = n+1 with alpha=2, beta=-1/2; {} fundamental entries match", checked))
}

fn monomial_coeff(sys: &Sdse, n: u32, left: &[(usize, u32)], right: &[(usize, u32)]) -> Result<Q, String> {
    let sol = solve(sys, n).map_err(err)?;
    let k: u32 = left.iter().map(|(_, d)| d).sum();
    let terms = coproduct_in_monomial_basis(&sol, 1, n, k).ok_or("not expressible in monomials")?;
    let (l, r) = (Monomial(left.to_vec()), Monomial(right.to_vec()));
    Ok(terms
        .into_iter()
        .find(|(a, b, _)| *a == l && *b == r)
        .map(|(_, _, c)| c)
        .unwrap_or_else(Q::zero))
}

fn criterion_4() -> Outcome {
    let sys = build_case1(&DegreeSpec::finite(&[1]), &int(1), &int(-1)).map_err(err)?;
    let c11 = monomial_coeff(&sys, 2, &[(1, 1)], &[(1, 1)])?;
    let c12 = monomial_coeff(&sys, 3, &[(1, 1)], &[(1, 2)])?;
    let c21 = monomial_coeff(&sys, 3, &[(1, 2)], &[(1, 1)])?;
    let c111 = monomial_coeff(&sys, 3, &[(1, 1), (1, 1)], &[(1, 1)])?;
    ensure(c11 == int(2) && c12 == int(3) && c21 == int(2) && c111 == int(1), || {
        format!("coefficients {} {} {} {}", c11, c12, c21, c111)
    })?;
    Ok("x1(x)x1 in D(x2) is 2, x1(x)x2 in D(x3) is 3".into())
}

fn two_labels() -> Vec<Decoration> {
    vec![Decoration::new(1, 1), Decoration::new(2, 1)]
}

fn graft_sum(a: &ForestSum, b: &ForestSum) -> ForestSum {
    let mut out = ForestSum::zero();
    for (f, c) in a.iter() {
        for (g, d) in b.iter() {
            out.add_scaled(&prelie::graft(f.as_tree().unwrap(), g.as_tree().unwrap()), &(c * d));
        }
    }
    out
}

fn forest_pairs(cat: &Catalog, total: u32) -> Vec<(Forest, Forest)> {
    let mut out = Vec::new();
    for a in 0..=total {
        for f in cat.forests_of_degree(a) {
            for g in cat.forests_of_degree(total - a) {
                out.push((f.clone(), g));
            }
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let cat = Catalog::new(&two_labels(), 6);
    let trees: Vec<&Tree> = cat.all_trees().filter(|t| t.degree() <= 3).collect();
    let mut triples = 0;
    for x in &trees {
        for y in &trees {
            for z in &trees {
                if x.degree() + y.degree() + z.degree() > 5 {
                    continue;
                }
                let (x, y, z) = (ForestSum::tree((*x).clone()), ForestSum::tree((*y).clone()), ForestSum::tree((*z).clone()));
                let assoc = |a: &ForestSum, b: &ForestSum| {
                    let mut s = graft_sum(a, &graft_sum(b, &z));
                    s.add_scaled(&graft_sum(&graft_sum(a, b), &z), &int(-1));
                    s
                };
                ensure(assoc(&x, &y) == assoc(&y, &x), || format!("pre-Lie identity fails on {} {} {}", x, y, z))?;
                triples += 1;
            }
        }
    }
    let mut circs = 0;
    for total in 0..=5 {
        for (f, g) in forest_pairs(&cat, total) {
            ensure(prelie::circ(&f, &g) == prelie::circ_recursive(&f, &g), || format!("closed form fails on {} o {}", f, g))?;
            circs += 1;
        }
    }
    let mut pairings = 0;
    for total in 0..=4 {
        let hs = cat.forests_of_degree(total);
        for (f, g) in forest_pairs(&cat, total) {
            let fg = prelie::star(&f, &g);
            for h in &hs {
                let lhs = pairing_sums(&fg, &ForestSum::from(h.clone()));
                let rhs = coproduct_forest(h)
                    .iter()
                    .fold(Q::zero(), |acc, ((a, b), c)| acc + c * pairing(&f, a) * pairing(&g, b));
                ensure(lhs == rhs, || format!("duality fails on {} * {} against {}", f, g, h))?;
                pairings += 1;
            }
        }
    }
    let params = [(1, -1), (0, 2), (3, 3)];
    let mut morphisms = 0;
    for (l, m) in params {
        let fdb = FdB::new(int(l), int(m));
        for total in 0..=5 {
            for (f, g) in forest_pairs(&cat, total) {
                let lhs = fdb.phi(&prelie::circ(&f, &g));
                let rhs = fdb.circ(&fdb.phi_forest(&f), &fdb.phi_forest(&g));
                ensure(lhs == rhs, || format!("phi fails on {} o {} at ({},{})", f, g, l, m))?;
                morphisms += 1;
            }
        }
    }
    let mut words = 0;
    for (l, m) in params {
        let fdb = FdB::new(int(l), int(m));
        for j in 1..=6u32 {
            for w in partitions(6 - j) {
                let (c, deg) = fdb.circ_generator(&w, j);
                let mut want = FdbWord::new();
                if !c.is_zero() {
                    want.insert(vec![deg], c);
                }
                let got = fdb.circ(&[(w.clone(), Q::one())].into(), &[(vec![j], Q::one())].into());
                ensure(got == want, || format!("P_m formula fails on {:?} o e_{} at ({},{})", w, j, l, m))?;
                words += 1;
            }
        }
    }
    Ok(format!(
        "{} triples, {} circ pairs, {} pairings, {} morphism cases, {} words",
        triples, circs, pairings, morphisms, words
    ))
}

/// Nondecreasing sequences of positive integers with sum at most `max`.
fn partitions(max: u32) -> Vec<Vec<u32>> {
    fn go(left: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(cur.clone());
        for k in min..=left {
            cur.push(k);
            go(left - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(max, 1, &mut Vec::new(), &mut out);
    out
}

fn criterion_6() -> Outcome {
    for (l, m) in [(1, -1), (2, 3)] {
        let fdb = FdB::new(int(l), int(m));
        let sys = build_case1(&DegreeSpec::finite(&[1]), &int(l), &int(m)).map_err(err)?;
        let sol = solve(&sys, 5).map_err(err)?;
        let (y, y_nu) = (fdb.build_y(&[1], 5), fdb.build_y_nu(&[1], 5));
        for n in 1..=5u32 {
            let x = sol.component(1, n);
            ensure(*x == y[n as usize] && *x == y_nu[n as usize], || format!("({},{}) differs at n={}", l, m, n))?;
        }
    }
    Ok("both routes equal the solution for n <= 5".into())
}

fn criterion_7() -> Outcome {
    let alpha = frac(-3, 2);
    let mut triples = 0;
    let mut etas = 0;
    for m in 1..=3u32 {
        let st = SecondType {
            degrees: (1..=12).collect(),
            m,
            alpha: alpha.clone(),
        };
        let mul = |(c, i): (Q, u32), j: u32| {
            let (d, k) = st.product(i, j);
            (c * d, k)
        };
        for i in 1..=10u32 {
            for j in 1..=11 - i {
                for k in 1..=12 - i - j {
                    let left = mul(st.product(i, j), k);
                    let (c, jk) = st.product(j, k);
                    let (d, ijk) = st.product(i, jk);
                    ensure(left == (c * d, ijk), || format!("m={} fails at ({},{},{})", m, i, j, k))?;
                    triples += 1;
                }
            }
        }
        let sys = build_case2(&DegreeSpec::finite(&[1, 2, 3, 4, 5, 6]), m, &alpha).map_err(err)?;
        let sol = solve(&sys, 6).map_err(err)?;
        for i in 1..=5 {
            for j in 1..=6 - i {
                if let Some(eta) = eta_from_solution(&sol, i, j) {
                    let want = if j % m == 0 { alpha.clone() } else { Q::zero() };
                    ensure(eta == want, || format!("m={} eta({},{}) = {}", m, i, j, eta))?;
                    etas += 1;
                }
            }
        }
    }
    Ok(format!("{} associativity triples, {} eta entries", triples, etas))
}

fn criterion_8() -> Outcome {
    let mut lines = 0;
    let mut g_forms = Vec::new();
    for data in [intro_data(), pure_data(), extended_data(), extension_data()] {
        let sys = data.build().map_err(err)?;
        for report in [check_theorem23(&sys, &data, 5).map_err(err)?, check_prop25(&sys, &data, 5).map_err(err)?] {
            ensure(report.passed(), || report.to_string())?;
            lines += report.lines.len();
            g_forms.extend(report.lines.iter().filter(|l| l.label.contains(" g(")).map(|l| l.label.clone()));
        }
    }
    for class in ["I0", "J0", "K0", "E"] {
        ensure(g_forms.iter().any(|l| l.ends_with(class)), || format!("no g form checked for {}", class))?;
    }
    let qc = QuasiCyclicData::cyclic(3, &[1, 2, 4]);
    let report = check_theorem27(&qc.build().map_err(err)?, &qc, 5).map_err(err)?;
    ensure(report.passed(), || report.to_string())?;
    lines += report.lines.len();
    Ok(format!("{} identities hold to degree 5", lines))
}

type Triple = BTreeMap<(Forest, Forest, Forest), Q>;

fn coassociative(f: &Forest) -> bool {
    let mut left = Triple::new();
    let mut right = Triple::new();
    for ((a, b), c) in coproduct_forest(f).iter() {
        for ((a1, a2), d) in coproduct_forest(a).iter() {
            *left.entry((a1.clone(), a2.clone(), b.clone())).or_insert_with(Q::zero) += c * d;
        }
        for ((b1, b2), d) in coproduct_forest(b).iter() {
            *right.entry((a.clone(), b1.clone(), b2.clone())).or_insert_with(Q::zero) += c * d;
        }
    }
    left.retain(|_, c| !c.is_zero());
    right.retain(|_, c| !c.is_zero());
    left == right
}

fn criterion_9() -> Outcome {
    let cat = Catalog::new(&two_labels(), 5);
    let mut checked = 0;
    for n in 0..=5u32 {
        // degree 5 takes every third forest, a fixed sample
        let all = cat.forests_of_degree(n);
        let step = if n == 5 { 3 } else { 1 };
        for f in all.iter().step_by(step) {
            let d = coproduct_forest(f);
            let one = ForestSum::from(f.clone());
            ensure(coassociative(f), || format!("coassociativity fails on {}", f))?;
            ensure(d.counit_left() == one && d.counit_right() == one, || format!("counit fails on {}", f))?;
            ensure(d.iter().all(|((a, b), _)| a.degree() + b.degree() == n), || format!("grading fails on {}", f))?;
            if n < 5 {
                for lab in two_labels() {
                    let bf = graft_operator(lab, &one);
                    let mut want = TensorSum::zero();
                    for (g, c) in bf.iter() {
                        want.add_term(g.clone(), Forest::unit(), c.clone());
                    }
                    want.add_scaled(&d.map_right(|g| graft_operator(lab, &ForestSum::from(g.clone()))), &Q::one());
                    ensure(coproduct(&bf) == want, || format!("cocycle fails on {} under {}", f, lab))?;
                }
            }
            checked += 1;
        }
    }
    for (f, g) in forest_pairs(&cat, 4).into_iter().chain(forest_pairs(&cat, 5).into_iter().step_by(7)) {
        let lhs = coproduct_forest(&f.union(&g));
        ensure(lhs == coproduct_forest(&f).multiply(&coproduct_forest(&g)), || {
            format!("multiplicativity fails on {} | {}", f, g)
        })?;
    }
    Ok(format!("{} forests", checked))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("introduction system goldens", criterion_1),
        ("Hopf verification suite", criterion_2),
        ("lambda structure constants", criterion_3),
        ("Faa di Bruno cross-check", criterion_4),
        ("pre-Lie and duality suite", criterion_5),
        ("y(n) = x(n)", criterion_6),
        ("second-type product and eta", criterion_7),
        ("fundamental and quasi-cyclic identities", criterion_8),
        ("coproduct structural invariants", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS {}. {}: {}", k + 1, name, detail),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {}: {}", k + 1, name, why);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
