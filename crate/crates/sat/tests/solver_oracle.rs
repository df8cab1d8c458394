// SPDX-License-Identifier: Apache-2.0

use miterscan_sat::{dimacs, solve_cnf, CnfFormula, Lit, SatResult, SolveResult, Solver};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lit(x: i64) -> Lit {
    Lit::from_dimacs(x).unwrap()
}

fn formula(num_vars: usize, clauses: &[&[i64]]) -> CnfFormula {
    let mut f = CnfFormula::with_vars(num_vars);
    for c in clauses {
        f.add_clause(c.iter().map(|&x| lit(x)));
    }
    f
}

/// Truth-table enumeration over all 2^n assignments.
fn brute_force(f: &CnfFormula) -> bool {
    let n = f.num_vars();
    assert!(n <= 20);
    (0u32..1 << n).any(|bits| {
        let assignment: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        f.is_satisfied_by(&assignment)
    })
}

fn random_3cnf(rng: &mut ChaCha8Rng, vars: usize, clauses: usize) -> CnfFormula {
    let mut f = CnfFormula::with_vars(vars);
    for _ in 0..clauses {
        let c: Vec<Lit> = (0..3)
            .map(|_| {
                let v = rng.gen_range(1..=vars as i64);
                lit(if rng.gen_bool(0.5) { v } else { -v })
            })
            .collect();
        f.add_clause(c);
    }
    f
}

#[test]
fn two_clause_example() {
    let f = formula(2, &[&[1, 2], &[-1]]);
    match solve_cnf(&f, None).unwrap() {
        SatResult::Sat(m) => {
            assert!(m[1]);
            assert!(f.is_satisfied_by(&m));
        }
        SatResult::Unsat => panic!("expected SAT"),
    }
}

#[test]
fn unit_contradiction() {
    let f = formula(1, &[&[1], &[-1]]);
    assert_eq!(solve_cnf(&f, None).unwrap(), SatResult::Unsat);
}

#[test]
fn empty_clause_is_unsat() {
    let mut f = CnfFormula::with_vars(1);
    f.add_clause(std::iter::empty());
    assert_eq!(solve_cnf(&f, None).unwrap(), SatResult::Unsat);
}

#[test]
fn random_3cnf_matches_truth_table() {
    // 12 variables, 50 clauses sits close to the phase transition, so the
    // corpus mixes SAT and UNSAT instances
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..300 {
        let f = random_3cnf(&mut rng, 12, 50);
        let expected = brute_force(&f);
        match solve_cnf(&f, None).unwrap() {
            SatResult::Sat(m) => {
                assert!(expected, "solver found a model for an UNSAT formula");
                assert!(f.is_satisfied_by(&m));
                sat += 1;
            }
            SatResult::Unsat => {
                assert!(!expected, "solver refuted a satisfiable formula");
                unsat += 1;
            }
        }
    }
    assert!(sat > 20 && unsat > 20, "sat={sat} unsat={unsat}");
}

#[test]
fn deterministic_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let f = random_3cnf(&mut rng, 40, 150);
    let a = solve_cnf(&f, None).unwrap();
    let b = solve_cnf(&f, None).unwrap();
    assert_eq!(a, b);
}

#[test]
fn larger_instances_are_consistent() {
    // no brute force here; models are checked clause by clause and UNSAT
    // answers are cross-checked against a fresh solver with clause order reversed
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let f = random_3cnf(&mut rng, 80, 340);
        let r = solve_cnf(&f, None).unwrap();
        let mut rev = CnfFormula::with_vars(f.num_vars());
        for c in f.clauses().iter().rev() {
            rev.add_clause(c.iter().copied());
        }
        let r2 = solve_cnf(&rev, None).unwrap();
        match (&r, &r2) {
            (SatResult::Sat(m), SatResult::Sat(m2)) => {
                assert!(f.is_satisfied_by(m));
                assert!(f.is_satisfied_by(m2));
            }
            (SatResult::Unsat, SatResult::Unsat) => {}
            _ => panic!("verdicts disagree"),
        }
    }
}

#[test]
fn external_bridge_reads_solver_output() {
    let dir = std::env::temp_dir().join(format!("miterscan-ext-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let script = dir.join("fake_solver.sh");
    std::fs::write(&script, "#!/bin/sh\ntest -s \"$1\" || exit 1\necho 's SATISFIABLE'\necho 'v -1 2 0'\n").unwrap();
    let f = formula(2, &[&[1, 2], &[-1]]);
    let solver = miterscan_sat::external::ExternalSolver {
        program: "sh".into(),
        args: vec![script.display().to_string()],
    };
    assert_eq!(solver.solve(&f).unwrap(), SatResult::Sat(vec![false, true]));
    std::fs::remove_dir_all(&dir).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn verdict_matches_brute_force(seed in any::<u64>(), vars in 1usize..10, clauses in 1usize..45) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_3cnf(&mut rng, vars, clauses);
        let expected = brute_force(&f);
        match solve_cnf(&f, None).unwrap() {
            SatResult::Sat(m) => {
                prop_assert!(expected);
                prop_assert!(f.is_satisfied_by(&m));
            }
            SatResult::Unsat => prop_assert!(!expected),
        }
    }

    #[test]
    fn assumptions_match_brute_force(seed in any::<u64>(), vars in 2usize..10, clauses in 1usize..35) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_3cnf(&mut rng, vars, clauses);
        let mut solver = Solver::new();
        solver.reserve_vars(vars);
        for c in f.clauses() {
            solver.add_clause(c);
        }
        for _ in 0..4 {
            let a1 = lit(rng.gen_range(1..=vars as i64) * if rng.gen_bool(0.5) { 1 } else { -1 });
            let a2 = lit(rng.gen_range(1..=vars as i64) * if rng.gen_bool(0.5) { 1 } else { -1 });
            let mut g = f.clone();
            g.add_clause([a1]);
            g.add_clause([a2]);
            let expected = brute_force(&g);
            match solver.solve_under(&[a1, a2]) {
                SolveResult::Sat => {
                    prop_assert!(expected);
                    prop_assert!(g.is_satisfied_by(solver.model()));
                }
                SolveResult::Unsat => prop_assert!(!expected),
                SolveResult::Unknown => prop_assert!(false, "no budget was set"),
            }
        }
    }

    #[test]
    fn dimacs_round_trip(seed in any::<u64>(), vars in 1usize..30, clauses in 0usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_3cnf(&mut rng, vars, clauses);
        prop_assert_eq!(dimacs::parse(&dimacs::write(&f)).unwrap(), f);
    }
}
