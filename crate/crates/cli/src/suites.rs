//! Invariant suites behind `selftest` and `prelie-verify`.

use std::collections::BTreeMap;

use hopf_dse::algebra::{coproduct_forest, graft_operator, pairing, pairing_sums};
use hopf_dse::prelie::{self, FdB, FdbWord, SecondType};
use hopf_dse::rational::{frac, int};
use hopf_dse::solver::{check_hopf, extract_lambda, lambda_oracle, solve, solve_oracle};
use hopf_dse::sysfile::parse_system;
use hopf_dse::systems::{build_case1, build_case2, DegreeSpec, QuasiCyclicData};
use hopf_dse::{Catalog, Decoration, Forest, ForestSum, Q, Sdse, TensorSum, Tree};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Outcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &str, failures: Vec<String>, checked: usize) -> Outcome {
    Outcome {
        name: name.to_string(),
        passed: failures.is_empty(),
        detail: match failures.first() {
            None => format!("{} cases", checked),
            Some(f) => format!("{} of {} cases fail, first: {}", failures.len(), checked, f),
        },
    }
}

/// Settings shared by the suites.
pub struct Settings {
    pub bound: u32,
    pub seed: u64,
    pub samples: usize,
}

fn labels() -> Vec<Decoration> {
    vec![Decoration::new(1, 1), Decoration::new(2, 1)]
}

/// Forests of degree `n`: all of them below `exhaustive_to`, a seeded sample above.
fn forests(catalog: &Catalog, n: u32, exhaustive_to: u32, rng: &mut ChaCha8Rng, samples: usize) -> Vec<Forest> {
    let all = catalog.forests_of_degree(n);
    if n <= exhaustive_to {
        all
    } else {
        all.choose_multiple(rng, samples).cloned().collect()
    }
}

type Triple = BTreeMap<(Forest, Forest, Forest), Q>;

fn add3(acc: &mut Triple, key: (Forest, Forest, Forest), c: Q) {
    let e = acc.entry(key.clone()).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(&key);
    }
}

fn coassociativity(f: &Forest) -> bool {
    let d = coproduct_forest(f);
    let mut left = Triple::new();
    let mut right = Triple::new();
    for ((a, b), c) in d.iter() {
        for ((a1, a2), c1) in coproduct_forest(a).iter() {
            add3(&mut left, (a1.clone(), a2.clone(), b.clone()), c * c1);
        }
        for ((b1, b2), c2) in coproduct_forest(b).iter() {
            add3(&mut right, (a.clone(), b1.clone(), b2.clone()), c * c2);
        }
    }
    left == right
}

fn single(f: &Forest) -> ForestSum {
    ForestSum::term(f.clone(), Q::one())
}

/// Coassociativity, counit, multiplicativity, the cocycle identity for every
/// grafting operator, and grading of `Δ`.
pub fn coproduct_axioms(s: &Settings) -> Vec<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let top = s.bound.max(1);
    let catalog = Catalog::new(&labels(), top);
    let by_degree: Vec<Vec<Forest>> = (0..=top)
        .map(|n| forests(&catalog, n, 4, &mut rng, s.samples))
        .collect();
    let mut fails: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut record = |name: &'static str, ok: bool, what: &dyn Fn() -> String| {
        *counts.entry(name).or_default() += 1;
        let list = fails.entry(name).or_default();
        if !ok {
            list.push(what());
        }
    };
    for (n, fs) in by_degree.iter().enumerate() {
        for f in fs {
            let d = coproduct_forest(f);
            record("coassociativity", coassociativity(f), &|| f.to_string());
            record(
                "counit",
                d.counit_left() == single(f) && d.counit_right() == single(f),
                &|| f.to_string(),
            );
            record(
                "grading",
                d.iter().all(|((a, b), _)| (a.degree() + b.degree()) as usize == n),
                &|| f.to_string(),
            );
            for &lab in &labels() {
                if n as u32 + lab.degree > top {
                    continue;
                }
                let b = graft_operator(lab, &single(f));
                let (bf, _) = b.iter().next().expect("one tree");
                let mut want = TensorSum::pure(bf.clone(), Forest::unit(), Q::one());
                want.add_scaled(&d.map_right(|g| graft_operator(lab, &single(g))), &Q::one());
                record("cocycle", coproduct_forest(bf) == want, &|| format!("{} under {}", f, lab));
            }
        }
    }
    for n in 1..=top {
        for k in 1..n {
            for f in &by_degree[k as usize] {
                for g in &by_degree[(n - k) as usize] {
                    let ok = coproduct_forest(&f.union(g)) == coproduct_forest(f).multiply(&coproduct_forest(g));
                    record("multiplicativity", ok, &|| format!("{} | {}", f, g));
                }
            }
        }
    }
    ["coassociativity", "counit", "multiplicativity", "cocycle", "grading"]
        .iter()
        .map(|&name| {
            outcome(
                &format!("coproduct {}", name),
                fails.remove(name).unwrap_or_default(),
                counts.get(name).copied().unwrap_or(0),
            )
        })
        .collect()
}

fn graft_sums(a: &ForestSum, b: &ForestSum) -> ForestSum {
    let mut out = ForestSum::zero();
    for (f, c) in a.iter() {
        for (g, d) in b.iter() {
            let (t, u) = (f.as_tree().expect("tree"), g.as_tree().expect("tree"));
            out.add_scaled(&prelie::graft(t, u), &(c * d));
        }
    }
    out
}

fn tree_sum(t: &Tree) -> ForestSum {
    ForestSum::tree(t.clone())
}

/// `x∘(y∘z) - (x∘y)∘z` is symmetric in `x, y`, for trees of total degree up
/// to `bound`.
pub fn prelie_identity(bound: u32) -> Outcome {
    let catalog = Catalog::new(&labels(), bound);
    let trees: Vec<&Tree> = catalog.all_trees().collect();
    let assoc = |x: &Tree, y: &Tree, z: &Tree| {
        let (x, y, z) = (tree_sum(x), tree_sum(y), tree_sum(z));
        let mut a = graft_sums(&x, &graft_sums(&y, &z));
        a.add_scaled(&graft_sums(&graft_sums(&x, &y), &z), &int(-1));
        a
    };
    let mut fails = Vec::new();
    let mut n = 0;
    for x in &trees {
        for y in &trees {
            for z in &trees {
                if x.degree() + y.degree() + z.degree() > bound {
                    continue;
                }
                n += 1;
                if assoc(x, y, z) != assoc(y, x, z) {
                    fails.push(format!("{} {} {}", x, y, z));
                }
            }
        }
    }
    outcome("pre-Lie identity", fails, n)
}

fn forest_pairs(bound: u32, exact_total: bool) -> Vec<(Forest, Forest)> {
    let catalog = Catalog::new(&labels(), bound);
    let mut out = Vec::new();
    for a in 0..=bound {
        for b in 0..=bound - a {
            if exact_total && a + b != bound {
                continue;
            }
            for f in catalog.forests_of_degree(a) {
                for g in catalog.forests_of_degree(b) {
                    out.push((f.clone(), g));
                }
            }
        }
    }
    out
}

/// The closed form of `F∘G` against the recursive extension.
pub fn closed_form_circ(bound: u32) -> Outcome {
    let pairs = forest_pairs(bound, false);
    let fails = pairs
        .iter()
        .filter(|(f, g)| prelie::circ(f, g) != prelie::circ_recursive(f, g))
        .map(|(f, g)| format!("{} o {}", f, g))
        .collect();
    outcome("closed-form circ", fails, pairs.len())
}

/// `⟨F⋆G, H⟩ = ⟨F⊗G, ΔH⟩` on all forests with `|F|+|G| = |H| ≤ bound`.
pub fn duality(bound: u32) -> Outcome {
    let catalog = Catalog::new(&labels(), bound);
    let mut fails = Vec::new();
    let mut n = 0;
    for total in 0..=bound {
        let hs = catalog.forests_of_degree(total);
        for (f, g) in forest_pairs(total, true) {
            let fg = prelie::star(&f, &g);
            for h in &hs {
                n += 1;
                let lhs = pairing_sums(&fg, &single(h));
                let rhs = coproduct_forest(h)
                    .iter()
                    .fold(Q::zero(), |acc, ((a, b), c)| acc + c * pairing(&f, a) * pairing(&g, b));
                if lhs != rhs {
                    fails.push(format!("<{} * {}, {}>", f, g, h));
                }
            }
        }
    }
    outcome("Grossman-Larson duality", fails, n)
}

const FDB_PARAMS: [(i64, i64); 3] = [(1, -1), (0, 2), (3, 3)];

/// `φ(F∘G) = φ(F)∘φ(G)` for forests with `|F|+|G| ≤ bound`.
pub fn phi_morphism(bound: u32) -> Outcome {
    let pairs = forest_pairs(bound, false);
    let mut fails = Vec::new();
    let mut n = 0;
    for (l, m) in FDB_PARAMS {
        let fdb = FdB::new(int(l), int(m));
        for (f, g) in &pairs {
            n += 1;
            let lhs = fdb.phi(&prelie::circ(f, g));
            let rhs = fdb.circ(&fdb.phi_forest(f), &fdb.phi_forest(g));
            if lhs != rhs {
                fails.push(format!("({},{}) {} o {}", l, m, f, g));
            }
        }
    }
    outcome("phi morphism", fails, n)
}

fn words(total: u32) -> Vec<Vec<u32>> {
    if total == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    // nondecreasing compositions
    fn go(left: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for k in min..=left {
            cur.push(k);
            go(left - k, k, cur, out);
            cur.pop();
        }
    }
    go(total, 1, &mut Vec::new(), &mut out);
    out
}

/// `(e_{i_1}…e_{i_m})∘e_j = P_m(j) e_{i_1+…+i_m+j}` against the recursive
/// extension, for all words and generators of total degree up to `bound`.
pub fn fdb_scalar_formula(bound: u32) -> Outcome {
    let mut fails = Vec::new();
    let mut n = 0;
    for (l, m) in FDB_PARAMS {
        let fdb = FdB::new(int(l), int(m));
        for j in 1..=bound {
            for w in (0..=bound - j).flat_map(words) {
                n += 1;
                let (c, deg) = fdb.circ_generator(&w, j);
                let mut want = FdbWord::new();
                if !c.is_zero() {
                    want.insert(vec![deg], c);
                }
                let a: FdbWord = [(w.clone(), Q::one())].into();
                let b: FdbWord = [(vec![j], Q::one())].into();
                if fdb.circ(&a, &b) != want {
                    fails.push(format!("({},{}) {:?} o e_{}", l, m, w, j));
                }
            }
        }
    }
    outcome("Faa di Bruno scalar formula", fails, n)
}

/// The tree series `y(n)` against the solved case-1 equation with `J = {1}`.
pub fn y_equals_x(bound: u32) -> Outcome {
    let mut fails = Vec::new();
    let mut n = 0;
    for (l, m) in [(1, -1), (2, 3)] {
        let (lambda, mu) = (int(l), int(m));
        let fdb = FdB::new(lambda.clone(), mu.clone());
        let sys = match build_case1(&DegreeSpec::finite(&[1]), &lambda, &mu) {
            Ok(s) => s,
            Err(e) => return outcome("y(n) = x(n)", vec![e.to_string()], 0),
        };
        let sol = match solve(&sys, bound) {
            Ok(s) => s,
            Err(e) => return outcome("y(n) = x(n)", vec![e.to_string()], 0),
        };
        let y = fdb.build_y(&[1], bound);
        let y_nu = fdb.build_y_nu(&[1], bound);
        for k in 1..=bound {
            n += 1;
            let x = sol.component(1, k);
            if *x != y[k as usize] || *x != y_nu[k as usize] {
                fails.push(format!("({},{}) n={}", l, m, k));
            }
        }
    }
    outcome("y(n) = x(n)", fails, n)
}

/// Associativity of the second-type product and `η = α[m | j]` read off
/// solved case-2 systems.
pub fn second_type(bound: u32) -> Vec<Outcome> {
    let mut assoc_fails = Vec::new();
    let mut assoc_n = 0;
    let mut eta_fails = Vec::new();
    let mut eta_n = 0;
    let alpha = frac(-3, 2);
    for m in 1..=3u32 {
        let st = SecondType {
            degrees: (1..=12).collect(),
            m,
            alpha: alpha.clone(),
        };
        for i in 1..=10 {
            for j in 1..=11 - i {
                for k in 1..=12 - i - j {
                    assoc_n += 1;
                    let left = st.product_normalized(i, j).and_then(|ij| st.product_normalized(ij, k));
                    let right = st.product_normalized(j, k).and_then(|jk| st.product_normalized(i, jk));
                    if left != right {
                        assoc_fails.push(format!("m={} ({},{},{})", m, i, j, k));
                    }
                }
            }
        }
        let degrees: Vec<u32> = (1..=bound.max(2)).collect();
        let sol = build_case2(&DegreeSpec::finite(&degrees), m, &alpha).and_then(|s| solve(&s, bound));
        let sol = match sol {
            Ok(s) => s,
            Err(e) => {
                eta_fails.push(format!("m={}: {}", m, e));
                continue;
            }
        };
        for i in 1..bound {
            for j in 1..=bound - i {
                if let Some(eta) = prelie::eta_from_solution(&sol, i, j) {
                    eta_n += 1;
                    let want = if j % m == 0 { alpha.clone() } else { Q::zero() };
                    if eta != want {
                        eta_fails.push(format!("m={} eta({},{}) = {}", m, i, j, eta));
                    }
                }
            }
        }
    }
    vec![
        outcome("second-type associativity", assoc_fails, assoc_n),
        outcome("second-type eta", eta_fails, eta_n),
    ]
}

pub const INTRO_FUNDAMENTAL: &str = "\
family fundamental
vertex 1 I0 beta=-1/3 J=1..
vertex 2 J0
vertex 3 I0 beta=1
scale 1 3
";

pub const COR24_FUNDAMENTAL: &str = "\
family fundamental
vertex 1 I0 beta=1/2 J=1,2
vertex 2 J0 J=1,3
vertex 3 K0 J=1..
";

/// The builder instances expected to be Hopf, with the degree each is checked to.
pub fn hopf_instances(bound: u32) -> Vec<(String, Result<Sdse, String>, u32)> {
    let mut out = Vec::new();
    let single_bound = bound.max(5);
    for (l, m) in [(1, -1), (1, 0), (0, 1), (2, 3)] {
        out.push((
            format!("case1 lambda={} mu={}", l, m),
            build_case1(&DegreeSpec::finite(&[1, 2]), &int(l), &int(m)).map_err(|e| e.to_string()),
            single_bound,
        ));
    }
    for (m, a) in [(1, 1), (2, -1)] {
        out.push((
            format!("case2 m={} alpha={}", m, a),
            build_case2(&DegreeSpec::finite(&[1, 2, 3]), m, &int(a)).map_err(|e| e.to_string()),
            single_bound,
        ));
    }
    out.push(("fundamental introduction".into(), parse_system(INTRO_FUNDAMENTAL).map_err(|e| e.to_string()), bound));
    out.push(("fundamental I0/J0/K0".into(), parse_system(COR24_FUNDAMENTAL).map_err(|e| e.to_string()), bound));
    out.push((
        "quasicyclic M=3".into(),
        QuasiCyclicData::cyclic(3, &[1, 2, 4]).build().map_err(|e| e.to_string()),
        bound,
    ));
    out
}

/// Builder instances are Hopf; the solver agrees with the fixed-point oracle
/// and the λ extraction with its brute-force oracle on each.
pub fn builders(bound: u32) -> Vec<Outcome> {
    let mut hopf = Vec::new();
    let mut oracle = Vec::new();
    let mut lambda = Vec::new();
    let instances = hopf_instances(bound);
    for (name, sys, n) in &instances {
        let sys = match sys {
            Ok(s) => s,
            Err(e) => {
                hopf.push(format!("{}: {}", name, e));
                continue;
            }
        };
        let sol = match solve(sys, *n) {
            Ok(s) => s,
            Err(e) => {
                hopf.push(format!("{}: {}", name, e));
                continue;
            }
        };
        if !check_hopf(&sol).is_hopf() {
            hopf.push(name.clone());
        }
        let small = (*n).min(4);
        let sol_small = sol.truncated(small);
        match solve_oracle(sys, small) {
            Ok(o) if o == sol_small => {}
            _ => oracle.push(name.clone()),
        }
        if extract_lambda(sys, &sol_small) != lambda_oracle(sys, &sol_small) {
            lambda.push(name.clone());
        }
    }
    let k = instances.len();
    vec![
        outcome("builders hopf", hopf, k),
        outcome("solver matches oracle", oracle, k),
        outcome("lambda matches oracle", lambda, k),
    ]
}

/// The suites run by `prelie-verify`.
pub fn prelie_suites(s: &Settings) -> Vec<Outcome> {
    let b = s.bound.min(5);
    let mut out = vec![
        prelie_identity(b),
        closed_form_circ(b),
        duality(b.min(4)),
        phi_morphism(b),
        fdb_scalar_formula(s.bound.max(6)),
        y_equals_x(b),
    ];
    out.extend(second_type(6));
    out
}

/// Everything.
pub fn all(s: &Settings) -> Vec<Outcome> {
    let mut out = coproduct_axioms(s);
    out.extend(prelie_suites(s));
    out.extend(builders(s.bound.min(4)));
    out
}
