use std::collections::BTreeMap;

use diffbisim::bisim::{
    bde_quotient, check_bde, check_fde, fde_quotient, find_bdb, find_fdb, gfp_bdb, gfp_fdb, is_bdb_up_to,
    is_fdb_up_to, jacobian_decompose,
};
use diffbisim::coupling::{
    find_linear_coupling, in_monomial_lifting, in_poly_lifting, is_linear_coupling, is_monomial_coupling,
};
use diffbisim::modelio::{
    crn_to_ctmc, extend_params, fixtures, parse_crn, parse_ode, parse_pairs, parse_population, union_ctmcs,
};
use diffbisim::poly::{LinComb, Monomial, PolyVectorField, Universe, Var};
use diffbisim::relation::{Partition, Relation, UpTo};
use diffbisim::transport::TransportPlan;
use diffbisim::Rational;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn binding() -> PolyVectorField {
    parse_crn(fixtures::BINDING_CRN).unwrap().to_field()
}

fn pairs(f: &PolyVectorField, text: &str) -> Relation<Var> {
    parse_pairs(text, f.universe()).unwrap()
}

fn var(f: &PolyVectorField, name: &str) -> Var {
    f.var(name).unwrap()
}

fn mono(f: &PolyVectorField, names: &[&str]) -> Monomial {
    Monomial::from_powers(names.iter().map(|n| (var(f, n), 1)))
}

fn e(f: &PolyVectorField, r: &Relation<Var>) -> Relation<Var> {
    let vars: Vec<Var> = f.vars().collect();
    r.equivalence_closure(&vars)
}

fn partition(f: &PolyVectorField, r: &Relation<Var>) -> String {
    Partition::from_relation(f.universe(), r).display(f.universe()).to_string()
}

fn plan<A: Ord + Clone>(entries: &[(A, A, i64)]) -> TransportPlan<A> {
    TransportPlan {
        flow: entries.iter().map(|(a, b, k)| ((a.clone(), b.clone()), q(*k))).collect(),
        objective: q(0),
    }
}

#[test]
fn binding_network_has_the_mass_action_field() {
    let expected = parse_ode(
        "vars: A00, A01, A10, A11, B
         d(A00) = -4*A00*B + 3*A10 + 3*A01
         d(A01) = 2*A00*B - 3*A01 - A01*B + 3*A11
         d(A10) = 2*A00*B - 3*A10 - A10*B + 3*A11
         d(A11) = A10*B + A01*B - 6*A11
         d(B) = -4*A00*B + 3*A10 + 3*A01 - A10*B - A01*B + 6*A11",
    )
    .unwrap();
    assert_eq!(binding(), expected);
}

#[test]
fn site_swap_is_the_largest_bde_and_fde() {
    let f = binding();
    let r = e(&f, &pairs(&f, "A01, A10"));
    assert!(check_bde(&f, &r).unwrap());
    assert!(check_fde(&f, &r).unwrap());
    assert_eq!(gfp_bdb(&f, &Relation::new()), r);
    assert_eq!(gfp_fdb(&f), r);
    assert_eq!(partition(&f, &r), "{A00}, {A01, A10}, {A11}, {B}");
}

#[test]
fn backward_quotient_of_binding_network() {
    let f = binding();
    let expected = parse_ode(
        "vars: H1, H2, H3, H4
         d(H1) = -4*H1*H4 + 6*H2
         d(H2) = 2*H1*H4 - 3*H2 - H2*H4 + 3*H3
         d(H3) = H2*H4 + H2*H4 - 6*H3
         d(H4) = -4*H1*H4 + 6*H2 - H2*H4 - H2*H4 + 6*H3",
    )
    .unwrap();
    assert_eq!(bde_quotient(&f, &e(&f, &pairs(&f, "A01, A10"))).unwrap(), expected);
}

#[test]
fn forward_quotient_of_binding_network() {
    let f = binding();
    let expected = parse_ode(
        "vars: H1, H2, H3, H4
         d(H1) = -4*H1*H4 + 3*H2
         d(H2) = 4*H1*H4 - 3*H2 - H2*H4 + 6*H3
         d(H3) = H2*H4 - 6*H3
         d(H4) = -4*H1*H4 + 3*H2 - H2*H4 + 6*H3",
    )
    .unwrap();
    assert_eq!(fde_quotient(&f, &e(&f, &pairs(&f, "A01, A10"))).unwrap(), expected);
}

#[test]
fn linear_couplings_of_two_combinations() {
    let u = Universe::from_names(["x", "y", "z", "z'", "w", "w'"]).unwrap();
    let v = |n: &str| u.get(n).unwrap();
    let (x, y, z, z1, w, w1) = (v("x"), v("y"), v("z"), v("z'"), v("w"), v("w'"));
    let g = LinComb::from_terms([(x, q(2)), (y, q(3)), (z, q(-3)), (z1, q(-1))]);
    let h = LinComb::from_terms([(x, q(2)), (y, q(3)), (w, q(-3)), (w1, q(-1))]);
    let omega = plan(&[(y, y, 2), (y, z, 1), (w, y, 1), (w, z, 2), (x, x, 2), (w1, z1, 1)]);
    assert!(is_linear_coupling(&g, &h, &omega));
    let rows: BTreeMap<Var, Rational> = [(x, q(2)), (y, q(3)), (w, q(3)), (w1, q(1))].into();
    let cols: BTreeMap<Var, Rational> = [(x, q(2)), (y, q(3)), (z, q(3)), (z1, q(1))].into();
    assert_eq!(omega.row_sums(), rows);
    assert_eq!(omega.col_sums(), cols);
    let omega_hat = plan(&[(x, x, 2), (y, y, 3), (w1, z1, 1), (w, z, 3)]);
    assert!(is_linear_coupling(&g, &h, &omega_hat));
    let broken = plan(&[(x, x, 2), (y, y, 3), (w1, z1, 1), (w, z, 2)]);
    assert!(!is_linear_coupling(&g, &h, &broken));
    let found = find_linear_coupling(&g, &h, &Default::default(), &Default::default()).unwrap();
    assert!(is_linear_coupling(&g, &h, &found.plan));
}

#[test]
fn monomial_couplings_of_bound_complexes() {
    let f = binding();
    let (a01, a10, b) = (var(&f, "A01"), var(&f, "A10"), var(&f, "B"));
    let (m, n) = (mono(&f, &["A01", "B"]), mono(&f, &["A10", "B"]));
    assert!(is_monomial_coupling(&m, &n, &plan(&[(a01, a10, 1), (b, b, 1)])));
    assert!(is_monomial_coupling(&m, &n, &plan(&[(a01, b, 1), (b, a10, 1)])));
    assert!(!is_monomial_coupling(&m, &n, &plan(&[(a01, a10, 1)])));
    let r = e(&f, &pairs(&f, "A01, A10"));
    assert!(in_monomial_lifting(&m, &n, |a, b| r.contains(&a, &b)));
    assert!(!in_monomial_lifting(&m, &n, |a, b| a == b));
}

#[test]
fn site_swap_couples_the_derivatives() {
    let f = binding();
    let (a01, a10) = (var(&f, "A01"), var(&f, "A10"));
    let g = f.rhs(a01).as_lincomb();
    let h = f.rhs(a10).as_lincomb();
    let (a00b, a11) = (mono(&f, &["A00", "B"]), mono(&f, &["A11"]));
    let omega = plan(&[
        (a00b.clone(), a00b, 2),
        (a11.clone(), a11, 3),
        (mono(&f, &["A10", "B"]), mono(&f, &["A01", "B"]), 1),
        (mono(&f, &["A10"]), mono(&f, &["A01"]), 3),
    ]);
    assert!(is_linear_coupling(g, h, &omega));
    let r = e(&f, &pairs(&f, "A01, A10"));
    assert!(in_poly_lifting(f.rhs(a01), f.rhs(a10), |a, b| r.contains(&a, &b)));
}

#[test]
fn one_sided_swap_lifts_one_direction_only() {
    let f = binding();
    let r = Relation::identity(f.universe()).union(&pairs(&f, "A01, A10"));
    assert!(!r.is_equivalence(f.universe()));
    let (a01, a10) = (var(&f, "A01"), var(&f, "A10"));
    let allowed = |a: Var, b: Var| r.contains(&a, &b);
    assert!(in_monomial_lifting(&mono(&f, &["A01"]), &mono(&f, &["A10"]), allowed));
    assert!(in_monomial_lifting(&mono(&f, &["A01", "B"]), &mono(&f, &["A10", "B"]), allowed));
    assert!(in_poly_lifting(f.rhs(a10), f.rhs(a01), allowed));
    // The negative parts of (f_A01, f_A10) are coupled from A10 to A01.
    assert!(!in_poly_lifting(f.rhs(a01), f.rhs(a10), allowed));
    assert!(!is_bdb_up_to(&f, &r, &Relation::new(), UpTo::Identity));
    let both = r.union(&r.inverse());
    assert!(is_bdb_up_to(&f, &both, &Relation::new(), UpTo::Identity));
}

#[test]
fn jacobian_terms_of_binding_network() {
    let f = binding();
    let d = jacobian_decompose(&f);
    let names = ["A00", "A01", "A10", "A11", "B"];
    let terms: Vec<&Monomial> = d.terms().map(|(m, _)| m).collect();
    let mut expected = [Monomial::one(), mono(&f, &["B"]), mono(&f, &["A00"]), mono(&f, &["A01"]), mono(&f, &["A10"])];
    expected.sort();
    assert_eq!(terms, expected.iter().collect::<Vec<_>>());
    let dense = |m: &Monomial| -> Vec<Vec<i64>> {
        let j = d.matrix(m).unwrap();
        names
            .iter()
            .map(|r| {
                names
                    .iter()
                    .map(|c| {
                        let v = j.get(&(var(&f, r), var(&f, c))).cloned().unwrap_or_else(|| q(0));
                        i64::try_from(v.to_integer()).unwrap()
                    })
                    .collect()
            })
            .collect()
    };
    assert_eq!(
        dense(&Monomial::one()),
        vec![
            vec![0, 3, 3, 0, 0],
            vec![0, -3, 0, 3, 0],
            vec![0, 0, -3, 3, 0],
            vec![0, 0, 0, -6, 0],
            vec![0, 3, 3, 6, 0],
        ]
    );
    assert_eq!(
        dense(&mono(&f, &["B"])),
        vec![
            vec![-4, 0, 0, 0, 0],
            vec![2, -1, 0, 0, 0],
            vec![2, 0, -1, 0, 0],
            vec![0, 1, 1, 0, 0],
            vec![-4, -1, -1, 0, 0],
        ]
    );
    let jacobian = [
        ["-4*B", "3", "3", "0", "-4*A00"],
        ["2*B", "-B - 3", "0", "3", "2*A00 - A01"],
        ["2*B", "0", "-B - 3", "3", "2*A00 - A10"],
        ["0", "B", "B", "-6", "A01 + A10"],
        ["-4*B", "-B + 3", "-B + 3", "6", "-4*A00 - A01 - A10"],
    ];
    for (i, row) in jacobian.iter().enumerate() {
        for (j, text) in row.iter().enumerate() {
            let expected = parse_ode(&format!("vars: A00, A01, A10, A11, B\nd(A00) = {text}\nd(A01) = 0\nd(A10) = 0\nd(A11) = 0\nd(B) = 0"))
                .unwrap();
            let (xi, xj) = (var(&f, names[i]), var(&f, names[j]));
            assert_eq!(&d.entry(xi, xj), expected.rhs(Var::new(0)), "entry ({}, {})", names[i], names[j]);
            assert_eq!(d.entry(xi, xj), f.rhs(xi).partial_derivative(xj));
        }
    }
}

#[test]
fn site_swap_is_a_bdb_of_every_transposed_term() {
    let f = binding();
    let r = e(&f, &pairs(&f, "A01, A10"));
    let fields = jacobian_decompose(&f).transposed_fields(&f).unwrap();
    assert_eq!(fields.len(), 5);
    for j in &fields {
        assert!(is_bdb_up_to(j, &r, &Relation::new(), UpTo::Identity));
    }
    assert!(is_fdb_up_to(&f, &r, UpTo::Identity));
}

#[test]
fn local_search_builds_the_small_bdb() {
    let f = binding();
    let res = find_bdb(&f, &pairs(&f, "A01, A10"), &Relation::new(), UpTo::Identity).unwrap();
    assert!(res.answer(var(&f, "A01"), var(&f, "A10")));
    assert!(is_bdb_up_to(&f, &res.related, &Relation::new(), UpTo::Identity));
    assert_eq!(res.related, pairs(&f, "A01, A10; A10, A01; A00, A00; A11, A11; B, B"));
}

#[test]
fn equivalence_closure_stops_after_one_iteration() {
    let f = binding();
    let res = find_bdb(&f, &pairs(&f, "A01, A10"), &Relation::new(), UpTo::Equivalence).unwrap();
    assert_eq!(res.related, pairs(&f, "A01, A10"));
    assert_eq!(res.stats.iterations, 1);
    assert_eq!(e(&f, &res.related), gfp_bdb(&f, &Relation::new()));
}

#[test]
fn parameter_species_split_into_pairs() {
    let crn = extend_params(&parse_crn(fixtures::BINDING_CRN).unwrap());
    let f = crn.to_field();
    let res = find_bdb(&f, &pairs(&f, "A01, A10"), &Relation::new(), UpTo::Identity).unwrap();
    assert!(res.answer(var(&f, "A01"), var(&f, "A10")));
    for (a, b) in [("kr1", "kr2"), ("kr3", "kr4"), ("k1", "k2"), ("k3", "k4")] {
        assert!(res.related.contains(&var(&f, a), &var(&f, b)), "({a}, {b}) missing");
    }
    for (a, b) in [("kr1", "kr3"), ("k1", "k3"), ("k1", "kr1")] {
        assert!(!res.related.contains(&var(&f, a), &var(&f, b)), "({a}, {b}) related");
    }
    assert!(is_bdb_up_to(&f, &res.related, &Relation::new(), UpTo::Identity));
}

fn switch_union(high: u64, low: u64) -> (usize, usize, PolyVectorField) {
    let am = parse_crn(fixtures::AM_CRN).unwrap();
    let mi = parse_crn(fixtures::MI_CRN).unwrap();
    let pa = parse_population(&format!("x0 = {high}, x2 = {low}"), &am).unwrap();
    let pm = parse_population(&format!("y0 = {high}, z2 = {high}, y2 = {low}, z0 = {low}"), &mi).unwrap();
    let ca = crn_to_ctmc(&am, &pa, Some("initAM"), 1_000_000).unwrap();
    let cm = crn_to_ctmc(&mi, &pm, Some("initMI"), 1_000_000).unwrap();
    let u = union_ctmcs(&cm, &ca, ("", "")).unwrap();
    (u.num_states(), u.num_transitions(), u.to_field())
}

#[test]
fn switches_are_told_apart_by_one_transport_problem() {
    for (high, low, states, transitions) in [(2, 1, 93, 276), (4, 2, 762, 3504), (6, 3, 2979, 16164)] {
        let (s, t, f) = switch_union(high, low);
        assert_eq!((s, t), (states, transitions), "populations ({high}, {low})");
        let res = find_bdb(&f, &pairs(&f, "initMI, initAM"), &Relation::new(), UpTo::Identity).unwrap();
        assert!(res.related.is_empty());
        assert_eq!(res.stats.transport_problems, 1);
    }
}

#[test]
fn sir_star_forward_bisimulation_merges_two_leaves() {
    let f = parse_ode(fixtures::SIR_STAR_ODE).unwrap();
    let query = pairs(&f, "S1, S1; S1, S3; S3, S1; S3, S3");
    let res = find_fdb(&f, &query, UpTo::Identity).unwrap();
    let mut expected = Relation::identity(f.universe());
    expected.extend(pairs(&f, "S1, S3; S3, S1; I1, I3; I3, I1; R1, R3; R3, R1"));
    assert_eq!(res.related.len(), 21);
    assert_eq!(res.related, expected);
    assert!(check_fde(&f, &res.related).unwrap());
}

#[test]
fn constrained_chains_reject_unsound_closures() {
    let f = parse_ode(fixtures::CHAINS_ODE).unwrap();
    let c = pairs(&f, "x, x''");
    for g in [UpTo::Symmetric, UpTo::Transitive, UpTo::ReflexiveSymmetric, UpTo::Equivalence] {
        assert!(g.validate(&c).is_err(), "{g} accepted");
        assert!(find_bdb(&f, &pairs(&f, "z, z''"), &c, g).is_err());
    }
    for g in [UpTo::Identity, UpTo::Reflexive] {
        assert!(g.validate(&c).is_ok());
    }
    let (z, z2) = (var(&f, "z"), var(&f, "z''"));
    assert!(!gfp_bdb(&f, &c).contains(&z, &z2));
    assert!(!find_bdb(&f, &pairs(&f, "z, z''"), &c, UpTo::Identity).unwrap().answer(z, z2));
    let via_symmetry = pairs(&f, "x'', x; y'', y; z, z''");
    assert!(is_bdb_up_to(&f, &via_symmetry, &c, UpTo::Symmetric));
    let via_transitivity = pairs(&f, "x, x'; x', x''; y, y'; y', y''; z, z''");
    assert!(is_bdb_up_to(&f, &via_transitivity, &c, UpTo::Transitive));
    assert!(!is_bdb_up_to(&f, &via_transitivity, &c, UpTo::Identity));
}
