use num_traits::Zero;
use proptest::prelude::*;
use qcvol::arith::{int, ratio, Rational};
use qcvol::closed_form::{compare_min_max, extreme_volume, solve_auxiliary, terminal_w, AuxiliaryInstance, VolumeSign};
use qcvol::grid::level_volume;
use qcvol::lp::{canonical_form, dualize, solve, standardize, LowerBound, LpModel, LpStatus, Relation, Sense};
use qcvol::models::{build_auxiliary_lp, optimum};

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Le), Just(Relation::Ge), Just(Relation::Eq)]
}

/// Small models with mixed rows and bounds; many are infeasible or unbounded.
fn small_model() -> impl Strategy<Value = LpModel> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| {
        let vars = proptest::collection::vec(any::<bool>(), n);
        let rows = proptest::collection::vec(
            (proptest::collection::vec(-4i64..=4, n), relation(), -6i64..=6),
            m,
        );
        let obj = proptest::collection::vec(-5i64..=5, n);
        (vars, rows, obj, any::<bool>()).prop_map(|(free, rows, obj, maximise)| {
            let mut model = LpModel::new(if maximise { Sense::Max } else { Sense::Min });
            for (j, f) in free.iter().enumerate() {
                model.add_var(format!("x{j}"), if *f { LowerBound::Free } else { LowerBound::Zero });
            }
            for (i, (coeffs, rel, rhs)) in rows.into_iter().enumerate() {
                let terms: Vec<_> = coeffs.iter().enumerate().map(|(j, &c)| (j, int(c))).collect();
                model.add_constraint(format!("r{i}"), &terms, rel, int(rhs));
            }
            let terms: Vec<_> = obj.iter().enumerate().map(|(j, &c)| (j, ratio(c, 2))).collect();
            model.set_objective(&terms);
            model
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn duality_and_exact_feasibility(model in small_model()) {
        let primal = solve(&model).unwrap();
        let std_model = standardize(&model).unwrap();
        prop_assert_eq!(standardize(&std_model).unwrap(), std_model.clone());
        prop_assert!(canonical_form(&std_model).is_some());
        let dual = dualize(&std_model).unwrap();
        prop_assert_eq!(dualize(&dual).unwrap(), std_model.clone());
        let dual_sol = solve(&dual).unwrap();

        let size = model.constraints.len() + model.num_vars();
        prop_assert!(primal.pivots <= 10 * size * size * 4);
        match primal.status {
            LpStatus::Optimal => {
                let x = primal.values();
                prop_assert!(model.is_feasible(&x));
                prop_assert_eq!(Some(model.objective_value(&x)), primal.objective_value.clone());
                prop_assert_eq!(dual_sol.status, LpStatus::Optimal);
                prop_assert_eq!(dual_sol.objective_value, primal.objective_value);
            }
            LpStatus::Unbounded => prop_assert_eq!(dual_sol.status, LpStatus::Infeasible),
            LpStatus::Infeasible => prop_assert!(dual_sol.status != LpStatus::Optimal),
        }
    }

    #[test]
    fn standardized_model_has_same_optimum(model in small_model()) {
        let a = solve(&model).unwrap();
        let b = solve(&standardize(&model).unwrap()).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.objective_value, b.objective_value);
    }
}

/// Hypotheses of the auxiliary program: `0 < c_1 <= .. <= c_k` with
/// `c_1 < c_k`, negative `e`, `-c_k < alpha <= c_k`; integers within 50.
fn auxiliary_instance() -> impl Strategy<Value = AuxiliaryInstance> {
    (2usize..=12, 0usize..=6)
        .prop_flat_map(|(k, r)| {
            (
                proptest::collection::vec(1i64..=50, k),
                proptest::collection::vec(-50i64..=-1, r),
                -49i64..=50,
            )
        })
        .prop_filter_map("c_1 < c_k and alpha in range", |(mut c, e, alpha)| {
            c.sort_unstable();
            let ck = *c.last().unwrap();
            if c[0] == ck || alpha <= -ck || alpha > ck {
                return None;
            }
            let rats = |v: &[i64]| v.iter().map(|&x| int(x)).collect();
            AuxiliaryInstance::new(rats(&c), rats(&e), int(alpha)).ok()
        })
}

fn c_at(c: &[Rational], i: usize) -> Rational {
    if i == 0 {
        Rational::zero()
    } else {
        c[i - 1].clone()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn auxiliary_closed_form_matches_simplex(inst in auxiliary_instance()) {
        let sol = solve_auxiliary(&inst);
        let lp = build_auxiliary_lp(&inst);
        prop_assert_eq!(&optimum(&lp).unwrap(), &sol.w);

        // The returned point is feasible for the same LP.
        let mut x = vec![sol.w.clone()];
        x.extend(sol.y.iter().cloned());
        x.extend(sol.z.iter().cloned());
        prop_assert!(lp.is_feasible(&x));

        let c = inst.c();
        let k = c.len();
        let ws = inst.w_sequence();
        let bracketed: Vec<usize> = (1..=k)
            .filter(|&i| c_at(c, k - i) <= ws[i - 1] && ws[i - 1] < c_at(c, k - i + 1))
            .collect();
        prop_assert_eq!(bracketed, vec![sol.i0]);
        for i in 1..k {
            if ws[i - 1] >= c_at(c, k - i) {
                prop_assert!(ws[i] >= c_at(c, k - i - 1));
            }
        }
    }
}

#[test]
fn level_sum_equals_volume() {
    for d in 3..=60 {
        for sign in VolumeSign::ALL {
            let s = extreme_volume(d, sign).unwrap();
            assert_eq!(level_volume(&s.q_levels), s.volume, "d={d} {sign}");
        }
    }
}

#[test]
fn min_max_relation_in_even_dimensions() {
    for d in (8..=200).step_by(2) {
        let cmp = compare_min_max(d).unwrap();
        assert!(cmp.i0_diff == 0 || cmp.i0_diff == 1, "d={d}");
        if cmp.i0_diff == 0 {
            let i = extreme_volume(d, VolumeSign::Negative).unwrap().i0.unwrap();
            assert_eq!(cmp.volume_gap, Some(ratio(2, i as i64 + 1)), "d={d}");
        }
    }
}

#[test]
fn terminal_identities() {
    for d in 3..=200 {
        for sign in VolumeSign::ALL {
            if d < sign.min_closed_form_dim() {
                continue;
            }
            let s = extreme_volume(d, sign).unwrap();
            assert_eq!(s.w_sequence.last().unwrap(), &terminal_w(d, sign).unwrap());
        }
    }
}
