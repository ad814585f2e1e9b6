//! Cross-module properties: the bound pipeline against the search oracle
//! on direct powers, refinement behavior of filtrations, and equivalence
//! of ingestion paths.

use matchbound_core::*;
use num_rational::Ratio;

#[test]
fn power_bounds_dominate_power_oracles() {
    // the per-factor density from the base group bounds matchings in the
    // direct power; the oracle checks it from below
    for (spec, p, n) in [("cyclic:2", 2u64, 2u32), ("cyclic:2", 2, 3), ("cyclic:3", 3, 2)] {
        let base = build_builtin(spec).unwrap();
        let ga = GroupAlgebra::new(&base, p).unwrap();
        let f = sum_element_filtration(&ga).unwrap();
        let report = bound_from_filtration(&ga, &f, n, None).unwrap();
        let power = base.direct_power(n).unwrap();
        let search = max_matching_exact(&power, u64::MAX);
        assert!(search.exact);
        assert!(
            search.matching.cardinality() as f64 <= report.bound + 1e-9,
            "{spec}^{n}: m* = {} vs bound {}",
            search.matching.cardinality(),
            report.bound
        );
    }
}

#[test]
fn tower_refines_the_square_zero_filtration() {
    // dropping the middle step of the tower coarsens it; the refined
    // infimum can only be lower
    let tower = build_tower(5).unwrap();
    let ga = GroupAlgebra::new(&tower.psl2, 5).unwrap();
    let refined = tower.filtration(&ga).unwrap();
    let coarse = Filtration::new(
        &ga,
        vec![
            FiltrationStep { alpha: Ratio::new(1, 3), ideal: tower.j1.clone() },
            FiltrationStep { alpha: Ratio::from_integer(1), ideal: tower.j3.clone() },
        ],
        true,
    )
    .unwrap();
    let coarse = verify_vanishing(&ga, coarse).unwrap();
    let fine_value = minimize_rate(&rate_function(&refined).unwrap()).unwrap().value;
    let coarse_value = minimize_rate(&rate_function(&coarse).unwrap()).unwrap().value;
    assert!(fine_value <= coarse_value + 1e-9);

    // and the tower beats the one-dimensional square-zero filtration
    let two_step = sum_element_filtration(&ga).unwrap();
    let two_step_value = minimize_rate(&rate_function(&two_step).unwrap()).unwrap().value;
    assert!(fine_value < two_step_value);
}

#[test]
fn tower_last_step_squares_to_zero() {
    // J3 J3 <= J1 J3 = 0, so the soft density applies to the tower report
    let tower = build_tower(5).unwrap();
    let ga = GroupAlgebra::new(&tower.psl2, 5).unwrap();
    assert!(ga.is_nilpotent_square(&tower.j3.space).unwrap());
    let f = tower.filtration(&ga).unwrap();
    let report = bound_from_filtration(&ga, &f, 1, None).unwrap();
    let soft = report.soft_delta.expect("square-zero last step");
    assert!(report.per_factor_density < soft);
}

#[test]
fn ambient_bound_applies_to_the_tower() {
    // the tower is automorphism-invariant and the group has trivial
    // center, so the normal-subgroup form is available; hypotheses about
    // the ambient group itself are recorded as assertions
    let tower = build_tower(5).unwrap();
    let ga = GroupAlgebra::new(&tower.psl2, 5).unwrap();
    let f = tower.filtration(&ga).unwrap();
    assert!(f.aut_invariant_verified);
    let ambient = 2 * 60u128;
    let report = bound_from_filtration(&ga, &f, 1, Some(ambient)).unwrap();
    assert!((report.bound - ambient as f64 * report.per_factor_density).abs() < 1e-9);
    assert_eq!(report.hypotheses.trivial_center, CheckStatus::Verified);
    assert_eq!(report.hypotheses.ambient_normality, CheckStatus::Asserted);
    assert!(report.hypotheses.conditional_on_ideal_transfer);
}

#[test]
fn ingested_table_matches_builtin_construction() {
    // the Klein four-group as a JSON table gives the same densities as
    // the built-in power construction
    let json = r#"{"name":"K4","order":4,"mul":[[0,1,2,3],[1,0,3,2],[2,3,0,1],[3,2,1,0]]}"#;
    let ingested = group_from_json(json).unwrap();
    let builtin = build_builtin("cyclic:2").unwrap().direct_power(2).unwrap();
    for g in [&ingested, &builtin] {
        let ga = GroupAlgebra::new(g, 2).unwrap();
        let f = sum_element_filtration(&ga).unwrap();
        let report = bound_from_filtration(&ga, &f, 1, None).unwrap();
        assert!((report.per_factor_rate - (4.0 + (3.0 / 2f64.powf(2.0 / 3.0) - 2.0))).abs() < 1e-9);
    }
}

#[test]
fn preimage_operation_matches_tower_pullback() {
    // the generic linear-algebra preimage reproduces J1 from the
    // embedding matrix and the GL2-side ideal
    let tower = build_tower(5).unwrap();
    let [i1, _, _] = tower.gl2_ideals.as_ref().unwrap();
    let gl2 = tower.gl2.as_ref().unwrap();
    let n = tower.psl2.order();
    let m = gl2.order();
    // rebuild the embedding as a matrix (columns indexed by PSL2)
    let inv2 = 3u64; // 2 * 3 = 6 = 1 mod 5
    let mut cols = FpMatrix::zero(5, m, n).unwrap();
    let quot = &tower.quotient;
    for s in 0..tower.sl2.order() {
        // SL2 elements occupy the low indices of the GL2 enumeration only
        // by coincidence, so locate each lift through the labels
        let label = tower.sl2.label(s);
        let gi = (0..m).find(|&x| gl2.label(x) == label).unwrap();
        cols.set(gi, quot.apply(s), inv2);
    }
    let pre = preimage(&cols, &i1.space).unwrap();
    assert_eq!(pre, tower.j1.space);
}

#[test]
fn coefficient_span_is_basis_independent() {
    // conjugating every representation matrix by a fixed change of basis
    // leaves the span of the matrix-coefficient vectors unchanged
    let irreps = build_irreps(5).unwrap();
    let rep = irreps
        .iter()
        .find(|r| r.sym_power == 2 && r.det_twist == 1)
        .unwrap();
    let n = rep.elements();
    let original: Vec<Vec<u64>> = (0..rep.dim)
        .flat_map(|a| (0..rep.dim).map(move |b| (a, b)))
        .map(|(a, b)| (0..n).map(|g| rep.entry(g, a, b)).collect())
        .collect();
    let change = FpMatrix::from_rows(5, 3, vec![vec![1, 2, 0], vec![0, 1, 4], vec![1, 0, 1]])
        .unwrap();
    // inverse found by solving C X = I through the subspace machinery is
    // overkill; hand-check a candidate instead
    let inverse = FpMatrix::from_rows(5, 3, vec![vec![4, 2, 2], vec![1, 4, 4], vec![1, 3, 4]])
        .unwrap();
    assert_eq!(change.mul(&inverse).unwrap(), FpMatrix::identity(5, 3).unwrap());
    let conjugated: Vec<Vec<u64>> = {
        let per_g: Vec<FpMatrix> = (0..n)
            .map(|g| change.mul(&rep.matrix(g)).unwrap().mul(&inverse).unwrap())
            .collect();
        (0..rep.dim)
            .flat_map(|a| (0..rep.dim).map(move |b| (a, b)))
            .map(|(a, b)| (0..n).map(|g| per_g[g].get(a, b)).collect())
            .collect()
    };
    let span_original = FpSubspace::from_rows(5, n, original).unwrap();
    let span_conjugated = FpSubspace::from_rows(5, n, conjugated).unwrap();
    assert_eq!(span_original, span_conjugated);
}

#[test]
fn tower_rate_terms_match_the_dimension_splits() {
    let tower = build_tower(5).unwrap();
    let ga = GroupAlgebra::new(&tower.psl2, 5).unwrap();
    let f = tower.filtration(&ga).unwrap();
    let rate = rate_function(&f).unwrap();
    let terms: Vec<(u64, String)> =
        rate.terms.iter().map(|t| (t.coeff, t.exponent.to_string())).collect();
    assert_eq!(
        terms,
        vec![
            (10, "0".to_string()),
            (25, "1/3".to_string()),
            (15, "1/2".to_string()),
            (10, "1".to_string()),
        ]
    );
}

/// Independent oracle for the search: enumerate all subset triples of
/// each cardinality, largest first, and accept the first one whose
/// identity-product triples form a perfect matching. No normalization,
/// no pruning; only `verify_matching` is shared with the search path.
fn brute_force_max_matching(g: &Group) -> usize {
    fn subsets_of_size(n: usize, m: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(m);
        fn rec(start: usize, n: usize, m: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if current.len() == m {
                out.push(current.clone());
                return;
            }
            for x in start..n {
                current.push(x);
                rec(x + 1, n, m, current, out);
                current.pop();
            }
        }
        rec(0, n, m, &mut current, &mut out);
        out
    }
    let n = g.order();
    for m in (1..=n).rev() {
        let subsets = subsets_of_size(n, m);
        for s in &subsets {
            for t in &subsets {
                for u in &subsets {
                    if verify_matching(g, s, t, u).unwrap().valid {
                        return m;
                    }
                }
            }
        }
    }
    0
}

#[test]
fn search_agrees_with_subset_enumeration() {
    for spec in [
        "cyclic:1", "cyclic:2", "cyclic:3", "cyclic:4", "cyclic:5", "cyclic:6", "cyclic:7",
        "cyclic:8", "cyclic:2^3", "symmetric:3", "dihedral:4", "quaternion",
    ] {
        let (base, power) = match spec.split_once('^') {
            Some((b, k)) => (b, k.parse::<u32>().unwrap()),
            None => (spec, 1),
        };
        let g = {
            let b = build_builtin(base).unwrap();
            if power == 1 { b } else { b.direct_power(power).unwrap() }
        };
        let fast = max_matching_exact(&g, u64::MAX);
        assert!(fast.exact);
        let slow = brute_force_max_matching(&g);
        assert_eq!(
            fast.matching.cardinality(),
            slow,
            "{spec}: search found {} but enumeration found {slow}",
            fast.matching.cardinality()
        );
    }
}
