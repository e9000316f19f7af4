use hopf_dse::rational::{frac, int};
use hopf_dse::series::parse_expr;
use hopf_dse::solver::{check_hopf, solve, HopfVerdict};
use hopf_dse::sysfile::{parse_document, parse_system, serialize, Document};
use hopf_dse::systems::{
    check_prop25, check_theorem23, check_theorem27, Class, DegreeSpec, FundamentalData, FundamentalVertex,
    QuasiCyclicData,
};
use hopf_dse::Sdse;

fn intro() -> FundamentalData {
    FundamentalData::new(vec![
        FundamentalVertex::i0(frac(-1, 3)).with_degrees(DegreeSpec::from(1)),
        FundamentalVertex::j0(),
        FundamentalVertex::i0(int(1)),
    ])
    .with_scale(1, int(3))
}

fn pure() -> FundamentalData {
    FundamentalData::new(vec![
        FundamentalVertex::i0(frac(1, 2)).with_degrees(DegreeSpec::finite(&[1, 2])),
        FundamentalVertex::j0().with_degrees(DegreeSpec::finite(&[1, 3])),
        FundamentalVertex::k0().with_degrees(DegreeSpec::from(1)),
    ])
}

fn extended() -> FundamentalData {
    FundamentalData::new(vec![
        FundamentalVertex::i0(int(2)).with_degrees(DegreeSpec::finite(&[1, 2])),
        FundamentalVertex::j0(),
        FundamentalVertex::l0(&[(1, int(1)), (2, frac(1, 2))]),
        FundamentalVertex::i1(int(0), &[(1, int(1)), (2, int(-1))]).with_degrees(DegreeSpec::finite(&[1, 2])),
        FundamentalVertex::j1(int(2), &[(3, int(1))]),
    ])
}

fn assert_hopf(sys: &Sdse, n: u32) {
    let sol = solve(sys, n).unwrap();
    match check_hopf(&sol) {
        HopfVerdict::HopfUpTo(k) => assert_eq!(k, n),
        HopfVerdict::Counterexample(c) => panic!("not Hopf: {}", c),
    }
}

#[test]
fn fundamental_instances_satisfy_their_identities() {
    for (name, data) in [("intro", intro()), ("pure", pure()), ("extended", extended())] {
        let sys = data.build().unwrap();
        let report = check_theorem23(&sys, &data, 5).unwrap();
        assert!(report.passed(), "{}:\n{}", name, report);
        assert_hopf(&sys, 4);
    }
}

#[test]
fn fundamental_header_builds_the_same_system() {
    let text = "family fundamental\nvertex 1 I0 beta=1/2 J=1,2\nvertex 2 J0 J=1,3\nvertex 3 K0 J=1..\n";
    let Document::Fundamental(data) = parse_document(text).unwrap() else {
        panic!("not a fundamental header")
    };
    assert_eq!(data, pure());
    let sys = parse_system(text).unwrap();
    assert_eq!(sys, pure().build().unwrap());
    assert_eq!(parse_system(&serialize(&sys)).unwrap(), sys);
}

#[test]
fn invalid_fundamental_data_is_rejected() {
    let no_degree_one = FundamentalData::new(vec![FundamentalVertex::j0().with_degrees(DegreeSpec::finite(&[2]))]);
    assert!(no_degree_one.build().is_err());
    let i1_with_nu_one = FundamentalData::new(vec![
        FundamentalVertex::j0(),
        FundamentalVertex::l0(&[(1, int(1))]),
        FundamentalVertex::i1(int(1), &[(2, int(1))]),
    ]);
    assert!(i1_with_nu_one.build().is_err());
    let lonely_extension = FundamentalData::new(vec![FundamentalVertex::j0(), FundamentalVertex::e(&[])]);
    assert!(lonely_extension.build().is_err());
}

#[test]
fn quasicyclic_example_satisfies_its_identities() {
    let data = QuasiCyclicData::cyclic(3, &[1, 2, 4]);
    let sys = data.build().unwrap();
    let report = check_theorem27(&sys, &data, 5).unwrap();
    assert!(report.passed(), "{}", report);
}

/// The operators of extension vertices above their level, replaced by
/// `Q^(q-1)` with `Q` given as text.
fn with_power_tail(sys: &Sdse, data: &FundamentalData, q_text: &str) -> Sdse {
    let levels = data.levels().unwrap();
    let mut out = sys.clone();
    for i in 1..=data.len() {
        if data.class(i) != Class::E {
            continue;
        }
        for op in &mut out.equation_mut(i).ops {
            if op.degree > levels[i - 1] {
                op.expr = parse_expr(&format!("({})^{}", q_text, op.degree - 1)).unwrap();
            }
        }
    }
    out
}

fn degrees(d: &[u32]) -> DegreeSpec {
    DegreeSpec::finite(d)
}

#[test]
fn extension_above_k0_matches_power_tail() {
    let data = FundamentalData::new(vec![
        FundamentalVertex::j0().with_degrees(degrees(&[1, 2])),
        FundamentalVertex::k0(),
        FundamentalVertex::e(&[(2, int(1))]).with_degrees(degrees(&[1, 2, 3])),
    ]);
    let sys = data.build().unwrap();
    let report = check_prop25(&sys, &data, 5).unwrap();
    assert!(report.passed(), "{}", report);
    let variant = with_power_tail(&sys, &data, "(1-h1)^(-1)");
    assert_eq!(solve(&variant, 5).unwrap(), solve(&sys, 5).unwrap());
    assert_hopf(&sys, 5);
}

/// Away from a level-1 extension over `K_0`, the successor rule stays Hopf
/// while the `Q^(q-1)` tail does not.
#[test]
fn power_tail_fails_elsewhere() {
    let over_i0 = FundamentalData::new(vec![
        FundamentalVertex::i0(int(1)).with_degrees(degrees(&[1, 2])),
        FundamentalVertex::e(&[(1, int(1))]).with_degrees(degrees(&[1, 2, 3])),
    ]);
    let chain = FundamentalData::new(vec![
        FundamentalVertex::j0().with_degrees(degrees(&[1, 2])),
        FundamentalVertex::k0(),
        FundamentalVertex::e(&[(2, int(1))]),
        FundamentalVertex::e(&[(3, int(2))]).with_degrees(degrees(&[1, 2, 3, 4])),
    ]);
    for (data, q_text) in [(over_i0, "(1-h1)^(-2)"), (chain, "(1-h1)^(-1)")] {
        let sys = data.build().unwrap();
        assert_hopf(&sys, 5);
        let report = check_prop25(&sys, &data, 5).unwrap();
        assert!(report.section_passed("prop25 low"), "{}", report);
        assert!(report.section_passed("prop25 tail successor"), "{}", report);
        assert!(!report.section_passed("prop25 tail Q^(q-1)"), "{}", report);

        let variant = with_power_tail(&sys, &data, q_text);
        let sol = solve(&variant, 5).unwrap();
        match check_hopf(&sol) {
            HopfVerdict::Counterexample(c) => assert!(c.verify(&sol), "{}", c),
            HopfVerdict::HopfUpTo(n) => panic!("power tail unexpectedly Hopf to {}", n),
        }
    }
}
