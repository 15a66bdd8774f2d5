//! Scalarization commutation, block-diagonal separability, and Pareto
//! extraction against exhaustive grid oracles.

mod common;

use common::{exhaustive_min, random_model, random_space, rng};
use qubofoil::multiobj::{
    aggregate_coefficients, aggregate_qubo, block_compose, block_slice, extract_pareto,
    lift_drag_weights, WeightScheme,
};
use qubofoil::pbool::compile_hubo;
use qubofoil::quadratize::{rosenberg_reduce, select_lambda, PenaltyPolicy, QuboProblem};
use qubofoil::solvers::solve_bruteforce;
use qubofoil::surrogate::{
    DesignSpace, DesignVariable, PolynomialSurrogate, RsmOrder, SampleRow, SampleSet, Sense,
};
use rand::Rng;
use std::collections::BTreeMap;

#[test]
fn aggregating_coefficients_equals_refitting_weighted_response() {
    let mut r = rng(89);
    for trial in 0..20 {
        let n = 1 + trial % 2;
        let truth_a = random_model(&mut r, n, RsmOrder::Two);
        let truth_b = random_model(&mut r, n, RsmOrder::Two);
        let w = {
            let raw: f64 = r.gen_range(0.05..0.95);
            [raw, 1.0 - raw]
        };
        let rows: Vec<SampleRow> = (0..30)
            .map(|_| {
                let x: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
                let ya = truth_a.eval(&x).unwrap();
                let yb = truth_b.eval(&x).unwrap();
                SampleRow {
                    x,
                    y: vec![ya, yb, w[0] * ya + w[1] * yb],
                }
            })
            .collect();
        let set = SampleSet::new(
            (0..n).map(|i| format!("v{i}")).collect(),
            vec!["a".into(), "b".into(), "mix".into()],
            rows,
        )
        .unwrap();

        let fit_a = PolynomialSurrogate::fit(&set, 0, RsmOrder::Two).unwrap();
        let fit_b = PolynomialSurrogate::fit(&set, 1, RsmOrder::Two).unwrap();
        let fit_mix = PolynomialSurrogate::fit(&set, 2, RsmOrder::Two).unwrap();
        let aggregated = aggregate_coefficients(&[&fit_a, &fit_b], &w).unwrap();

        for (idx, &c) in &fit_mix.coefficients {
            let got = aggregated.coefficients[idx];
            assert!(
                (got - c).abs() <= 1e-9 * c.abs().max(1.0),
                "trial {trial}: {idx:?} aggregated {got} vs refit {c}"
            );
        }
    }
}

/// Removes the penalty contributions recorded for each auxiliary from a copy
/// of the matrix, leaving only objective-derived cells.
fn strip_penalties(q: &QuboProblem) -> BTreeMap<(usize, usize), f64> {
    let mut cells: BTreeMap<(usize, usize), f64> = q.entries().clone();
    for rec in &q.penalties {
        let (i, j) = rec.parents;
        let a = rec.aux;
        let mut sub = |x: usize, y: usize, v: f64| {
            let key = (x.min(y), x.max(y));
            *cells.entry(key).or_insert(0.0) -= v;
        };
        sub(i, j, rec.lambda);
        sub(i, a, -2.0 * rec.lambda);
        sub(j, a, -2.0 * rec.lambda);
        sub(a, a, 3.0 * rec.lambda);
    }
    cells.retain(|_, v| v.abs() > 1e-12);
    cells
}

#[test]
fn aggregating_qubos_commutes_with_compiling_the_aggregate() {
    let mut r = rng(97);
    for trial in 0..10 {
        let space = random_space(&mut r, 1, &[4]);
        let model_a = random_model(&mut r, 1, RsmOrder::Four);
        let model_b = random_model(&mut r, 1, RsmOrder::Four);
        let w = [0.3, 0.7];

        let compile = |m: &PolynomialSurrogate| {
            let (p, reg) = compile_hubo(m, &space, Sense::Minimize).unwrap();
            rosenberg_reduce(&p, PenaltyPolicy::default(), &reg).unwrap()
        };
        let qubo_a = compile(&model_a);
        let qubo_b = compile(&model_b);
        let aggregated = aggregate_qubo(&[&qubo_a, &qubo_b], &w).unwrap();

        let model_w = aggregate_coefficients(&[&model_a, &model_b], &w).unwrap();
        let from_aggregate = compile(&model_w);

        assert_eq!(aggregated.n, from_aggregate.n, "aux structure diverged");

        // Entrywise agreement excluding penalty contributions.
        let lhs = strip_penalties(&aggregated);
        let rhs = strip_penalties(&from_aggregate);
        let keys: std::collections::BTreeSet<_> = lhs.keys().chain(rhs.keys()).collect();
        for key in keys {
            let a = lhs.get(key).copied().unwrap_or(0.0);
            let b = rhs.get(key).copied().unwrap_or(0.0);
            assert!(
                (a - b).abs() <= 1e-9 * a.abs().max(1.0),
                "trial {trial}: cell {key:?} {a} vs {b}"
            );
        }

        // The aggregated penalties upper-bound what the aggregate objective
        // needs.
        let (p_w, _) = compile_hubo(&model_w, &space, Sense::Minimize).unwrap();
        let needed = select_lambda(&p_w, PenaltyPolicy::default()).unwrap();
        for rec in &aggregated.penalties {
            assert!(
                rec.lambda >= needed - 1e-9,
                "trial {trial}: aggregated lambda {} below required {needed}",
                rec.lambda
            );
        }

        // Same exhaustive minimizers either way.
        let (_, args_a) = exhaustive_min(&aggregated);
        let (_, args_b) = exhaustive_min(&from_aggregate);
        let logical = space.total_bits();
        let mut la: Vec<Vec<u8>> = args_a.iter().map(|a| a[..logical].to_vec()).collect();
        let mut lb: Vec<Vec<u8>> = args_b.iter().map(|a| a[..logical].to_vec()).collect();
        la.sort();
        la.dedup();
        lb.sort();
        lb.dedup();
        assert_eq!(la, lb, "trial {trial}: minimizers diverged");
    }
}

#[test]
fn composite_blocks_minimize_independently() {
    let mut r = rng(103);
    for _ in 0..10 {
        let blocks: Vec<QuboProblem> = (0..9)
            .map(|_| common::random_qubo(&mut r, 2, 2.0, 0.9))
            .collect();
        let refs: Vec<&QuboProblem> = blocks.iter().collect();
        let composite = block_compose(&refs, None).unwrap();
        assert_eq!(composite.n, 18);

        let (comp_min, comp_args) = exhaustive_min(&composite);
        let sum_mins: f64 = refs
            .iter()
            .map(|q| exhaustive_min(q).0)
            .sum();
        assert!((comp_min - sum_mins).abs() < 1e-9);

        // Any composite minimizer restricts to a per-block minimizer.
        for a in comp_args.iter().take(4) {
            for (p, q) in refs.iter().enumerate() {
                let slice = block_slice(a, &refs, p);
                let (bmin, _) = exhaustive_min(q);
                assert!((q.energy(slice).unwrap() - bmin).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn block_registry_carries_block_tags() {
    let mut r = rng(107);
    let a = common::random_qubo(&mut r, 3, 1.0, 1.0);
    let b = common::random_qubo(&mut r, 2, 1.0, 1.0);
    let composite = block_compose(&[&a, &b], None).unwrap();
    let tags: Vec<Option<usize>> = composite
        .registry
        .entries()
        .iter()
        .map(|e| e.block)
        .collect();
    assert_eq!(tags, vec![Some(0), Some(0), Some(0), Some(1), Some(1)]);
}

fn thickness_space(bits: u32) -> DesignSpace {
    DesignSpace::new(vec![DesignVariable {
        name: "T".into(),
        lower: 10.0,
        upper: 15.0,
        bits,
    }])
    .unwrap()
}

/// Monotone synthetic lift/drag pair: both increase with thickness, drag
/// convex, so heavier drag weighting pushes the optimum thinner.
fn lift_model() -> PolynomialSurrogate {
    // 0.2 + 0.1 (T - 10)
    PolynomialSurrogate {
        order: RsmOrder::Two,
        n: 1,
        coefficients: [(vec![], -0.8), (vec![0], 0.1)].into_iter().collect(),
        r_squared: None,
        residual_norm: None,
    }
}

fn drag_model() -> PolynomialSurrogate {
    // 0.01 + 0.002 (T - 10)^2
    PolynomialSurrogate {
        order: RsmOrder::Two,
        n: 1,
        coefficients: [(vec![], 0.21), (vec![0], -0.04), (vec![0, 0], 0.002)]
            .into_iter()
            .collect(),
        r_squared: None,
        residual_norm: None,
    }
}

const PAPER_WEIGHTS: [f64; 9] = [0.0, 5.0, 20.0, 50.0, 80.0, 100.0, 200.0, 500.0, 2000.0];

#[test]
fn nine_weight_front_matches_grid_oracle_and_is_monotone() {
    let space = thickness_space(6);
    let cl = lift_model();
    let cd = drag_model();
    let senses = [Sense::Maximize, Sense::Minimize];

    let grid: Vec<f64> = (0..64)
        .map(|level| 10.0 + space.step(0) * level as f64)
        .collect();

    let mut decoded = Vec::new();
    let mut oracle_points = Vec::new();
    for &w in &PAPER_WEIGHTS {
        let wv = lift_drag_weights(w).unwrap();

        // Pipeline route: compile each objective with its sense, aggregate,
        // solve exactly, decode.
        let (pa, reg) = compile_hubo(&cl, &space, Sense::Maximize).unwrap();
        let (pb, _) = compile_hubo(&cd, &space, Sense::Minimize).unwrap();
        let qa = rosenberg_reduce(&pa, PenaltyPolicy::default(), &reg).unwrap();
        let qb = rosenberg_reduce(&pb, PenaltyPolicy::default(), &reg).unwrap();
        let mix = aggregate_qubo(&[&qa, &qb], &wv).unwrap();
        let rec = solve_bruteforce(&mix).unwrap();
        let x = common::decode_bits(&space, &rec.best_assignment);
        decoded.push((wv.to_vec(), x.clone()));

        // Grid oracle: maximize the scalarized objective over every
        // encodable thickness.
        let best_t = grid
            .iter()
            .copied()
            .max_by(|&a, &b| {
                let fa = wv[0] * cl.eval(&[a]).unwrap() - wv[1] * cd.eval(&[a]).unwrap();
                let fb = wv[0] * cl.eval(&[b]).unwrap() - wv[1] * cd.eval(&[b]).unwrap();
                fa.total_cmp(&fb)
            })
            .unwrap();
        assert!(
            (x[0] - best_t).abs() < 1e-9,
            "w = {w}: decoded {} vs grid oracle {best_t}",
            x[0]
        );
        oracle_points.push(best_t);
    }

    // Fig. 5b trend: thickness never increases as the drag weight grows.
    for pair in oracle_points.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-12);
    }
    for pair in decoded.windows(2) {
        assert!(pair[1].1[0] <= pair[0].1[0] + 1e-12);
    }

    // Front extraction agrees with the grid-restricted non-dominated set.
    let set = extract_pareto(&decoded, &[&cl, &cd], &senses).unwrap();
    assert!(set.verify(&senses));
    let front: Vec<f64> = set.non_dominated().map(|p| p.x[0]).collect();

    let mut unique = oracle_points.clone();
    unique.sort_by(f64::total_cmp);
    unique.dedup();
    let oracle_front: Vec<f64> = unique
        .iter()
        .copied()
        .filter(|&t| {
            !unique.iter().any(|&o| {
                o != t
                    && cl.eval(&[o]).unwrap() >= cl.eval(&[t]).unwrap()
                    && cd.eval(&[o]).unwrap() <= cd.eval(&[t]).unwrap()
                    && (cl.eval(&[o]).unwrap() > cl.eval(&[t]).unwrap()
                        || cd.eval(&[o]).unwrap() < cd.eval(&[t]).unwrap())
            })
        })
        .collect();
    let mut got = front.clone();
    got.sort_by(f64::total_cmp);
    assert_eq!(got, oracle_front);
}

#[test]
fn weight_scheme_from_scalars_matches_formula() {
    let scheme = WeightScheme::from_lift_drag_scalars(&PAPER_WEIGHTS).unwrap();
    assert_eq!(scheme.len(), 9);
    for (w, vec) in PAPER_WEIGHTS.iter().zip(&scheme.vectors) {
        assert!((vec[0] - 1.0 / (1.0 + w)).abs() < 1e-15);
        assert!((vec[1] - w / (1.0 + w)).abs() < 1e-15);
    }
}
