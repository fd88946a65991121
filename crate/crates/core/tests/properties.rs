mod common;

use common::*;
use diffbisim::bisim::{find_bdb, find_fdb};
use diffbisim::modelio::{
    crn_to_ctmc, fixtures, parse_crn, parse_ctmc, parse_ode, write_crn, write_ctmc, write_ode, Complex, Crn, CtmcModel,
    Reaction, Transition,
};
use diffbisim::poly::{Polynomial, Var};
use diffbisim::relation::{Relation, UpTo};
use diffbisim::transport::{solve_min_cost, TransportInstance};
use diffbisim::Rational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn assert_verdict(v: Verdict) {
    assert!(v.ok(), "{}", v.summary());
}

#[test]
fn coupling_lifting_matches_representative_substitution() {
    assert_verdict(run_cases(1, prop_coupling_vs_substitution));
}

#[test]
fn local_answers_match_greatest_fixpoint() {
    assert_verdict(run_cases(2, prop_local_vs_gfp));
}

#[test]
fn closures_of_bisimulations_are_equivalences() {
    assert_verdict(run_cases(3, prop_closures_are_equivalences));
}

#[test]
fn fde_checks_agree() {
    assert_verdict(run_cases(4, prop_fde_paths_agree));
}

#[test]
fn up_to_techniques_agree_and_equivalence_is_smallest() {
    assert_verdict(run_cases(5, |r| prop_up_to_dominance(r, false)));
}

#[test]
fn observer_sees_monotone_disjoint_sets() {
    assert_verdict(run_cases(6, prop_observer_invariants));
}

#[test]
fn jacobian_decomposition_is_exact_and_bounded() {
    assert_verdict(run_cases(7, prop_jacobian));
}

#[test]
fn transport_matches_basis_enumeration() {
    assert_verdict(run_cases(8, prop_transport_optimum));
}

#[test]
fn transport_is_deterministic() {
    assert_verdict(run_cases(9, |r| {
        let n = r.gen_range(1..=5);
        let m = r.gen_range(1..=5);
        let total: i64 = r.gen_range(1..=12);
        let split = |r: &mut ChaCha8Rng, k: usize| -> Vec<Rational> {
            let mut cuts: Vec<i64> = (0..k - 1).map(|_| r.gen_range(0..=total)).collect();
            cuts.push(0);
            cuts.push(total);
            cuts.sort();
            cuts.windows(2).map(|w| q(w[1] - w[0])).collect()
        };
        let supplies = split(r, n);
        let demands = split(r, m);
        let inst = TransportInstance::new(
            supplies.into_iter().enumerate().collect(),
            demands.into_iter().enumerate().collect(),
        )
        .with_costs((0..n).flat_map(|i| (0..m).map(move |j| ((i, j), q(((i * 7 + j * 3) % 4) as i64)))).collect());
        let a = solve_min_cost(&inst).map_err(|e| e.to_string())?;
        let b = solve_min_cost(&inst.clone()).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{a:?} != {b:?}"));
        }
        Ok(())
    }));
}

#[test]
fn local_runs_are_deterministic() {
    let mut r = rng(10);
    for case in 0..100 {
        let f = random_field(&mut r, 5, 8, 3);
        let vars: Vec<Var> = f.vars().collect();
        let query = random_relation(&mut r, &vars, 0.3);
        let up_to = *UpTo::ALL.choose(&mut r).unwrap();
        let a = find_bdb(&f, &query, &Relation::new(), up_to).unwrap();
        let b = find_bdb(&f, &query, &Relation::new(), up_to).unwrap();
        assert_eq!(
            (&a.related, &a.refuted, a.stats.transport_problems),
            (&b.related, &b.refuted, b.stats.transport_problems),
            "seed {SEED:#x} case {case}"
        );
        let a = find_fdb(&f, &query, up_to).unwrap();
        let b = find_fdb(&f, &query, up_to).unwrap();
        assert_eq!(a.related, b.related, "seed {SEED:#x} case {case}");
    }
}

fn random_complex(r: &mut ChaCha8Rng, n: usize) -> Complex {
    let mut c = Complex::new();
    for _ in 0..r.gen_range(0..=2) {
        *c.entry(Var::new(r.gen_range(0..n))).or_insert(0) += 1;
    }
    c
}

fn random_crn(r: &mut ChaCha8Rng, max_species: usize, max_reactions: usize) -> Crn {
    let n = r.gen_range(1..=max_species);
    let mut crn = Crn::new(universe(n));
    for origin in 1..=r.gen_range(1..=max_reactions) {
        crn.reactions.push(Reaction {
            reactants: random_complex(r, n),
            products: random_complex(r, n),
            rate: Rational::new(r.gen_range(1..=5).into(), r.gen_range(1..=3).into()),
            origin,
            reverse: false,
        });
    }
    crn
}

#[test]
fn ode_files_roundtrip() {
    assert_verdict(run_cases(11, |r| {
        let f = random_field(r, 5, 8, 3);
        let text = write_ode(&f);
        let back = parse_ode(&text).map_err(|e| format!("{e} in\n{text}"))?;
        if back != f {
            return Err(format!("roundtrip changed\n{text}"));
        }
        Ok(())
    }));
}

#[test]
fn crn_files_roundtrip() {
    assert_verdict(run_cases(12, |r| {
        let crn = random_crn(r, 4, 5);
        let text = write_crn(&crn);
        let back = parse_crn(&text).map_err(|e| format!("{e} in\n{text}"))?;
        if back.to_field() != crn.to_field() {
            return Err(format!("roundtrip changed the field\n{text}"));
        }
        Ok(())
    }));
}

#[test]
fn ctmc_files_roundtrip() {
    assert_verdict(run_cases(13, |r| {
        let n = r.gen_range(1..=5);
        let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let transitions = (0..r.gen_range(0..=6))
            .map(|_| Transition {
                source: r.gen_range(0..n),
                target: r.gen_range(0..n),
                rate: Rational::new(r.gen_range(1..=5).into(), r.gen_range(1..=3).into()),
            })
            .filter(|t| t.source != t.target)
            .collect();
        let m = CtmcModel {
            states,
            transitions,
            initial: r.gen_bool(0.5).then(|| r.gen_range(0..n)),
        };
        let text = write_ctmc(&m);
        let back = parse_ctmc(&text).map_err(|e| format!("{e} in\n{text}"))?;
        if back.to_field() != m.to_field() || back.initial != m.initial {
            return Err(format!("roundtrip changed\n{text}"));
        }
        Ok(())
    }));
}

#[test]
fn ctmc_fields_conserve_mass() {
    assert_verdict(run_cases(14, |r| {
        let crn = random_crn(r, 3, 4);
        let init: Vec<u64> = (0..crn.universe.len()).map(|_| r.gen_range(0..=2)).collect();
        let ctmc = match crn_to_ctmc(&crn, &init, None, 2000) {
            Ok(c) => c,
            Err(_) => return Ok(()),
        };
        let f = ctmc.to_field();
        let total = f.rhs_all().iter().fold(Polynomial::zero(), |acc, p| acc.add(p));
        if !total.is_zero() {
            return Err(format!("{}sum of derivatives is {}", write_crn(&crn), total.display(f.universe())));
        }
        let outflow_nonneg = ctmc.transitions.iter().all(|t| t.rate > Rational::zero());
        if !outflow_nonneg {
            return Err("nonpositive rate".to_string());
        }
        Ok(())
    }));
}

#[test]
fn fixtures_parse() {
    for text in [fixtures::BINDING_CRN, fixtures::AM_CRN, fixtures::MI_CRN] {
        parse_crn(text).unwrap();
    }
    for text in [fixtures::SIR_STAR_ODE, fixtures::CHAINS_ODE] {
        parse_ode(text).unwrap();
    }
}
