//! Randomized invariants across modules, checked against the brute-force
//! references where one exists.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use nsw::bounds::{capacity_value, lemma8_identity_check, project_capped_simplex, ThetaVector};
use nsw::counting::{k_matching_sum, square_free_sum, Scalar};
use nsw::oracle::{brute_force_expectation, brute_force_opt, naive_k_matching_sum, poly_expand_product};
use nsw::relax::{inner_infimum, solve_relaxation, LinearFormMatrix};
use nsw::rounding::{derandomize, expected_product, round_once};
use nsw::{feasibility_check, nsw_values, Allocation, FractionalAllocation, Instance, Matrix};

fn matrix(rows: usize, cols: usize, entry: impl Strategy<Value = f64>) -> impl Strategy<Value = Matrix<f64>> {
    proptest::collection::vec(entry, rows * cols)
        .prop_map(move |data| Matrix::from_fn(rows, cols, |i, j| data[i * cols + j]))
}

/// `n x m` with `1 <= n <= max_n`, `n <= m <= max_m`.
fn shaped(max_n: usize, max_m: usize, entry: impl Strategy<Value = f64> + Clone) -> impl Strategy<Value = Matrix<f64>> {
    (1..=max_n)
        .prop_flat_map(move |n| (Just(n), n..=max_m))
        .prop_flat_map(move |(n, m)| matrix(n, m, entry.clone()))
}

/// Entries that are zero about a third of the time.
fn sparse_entry() -> impl Strategy<Value = f64> + Clone {
    prop_oneof![Just(0.0), 0.05f64..4.0, 0.05f64..4.0]
}

fn small_int_matrix(max_r: usize, max_c: usize) -> impl Strategy<Value = Matrix<BigRational>> {
    (1..=max_r, 1..=max_c).prop_flat_map(|(r, c)| {
        proptest::collection::vec(0i64..5, r * c).prop_map(move |data| {
            Matrix::from_fn(r, c, |i, j| BigRational::from_integer(BigInt::from(data[i * c + j])))
        })
    })
}

/// Column-stochastic `x` built from non-negative weights.
fn stochastic(weights: &Matrix<f64>) -> FractionalAllocation {
    let (n, m) = weights.shape();
    let x = Matrix::from_fn(n, m, |i, j| {
        let total: f64 = (0..n).map(|k| weights[(k, j)]).sum();
        if total > 0.0 {
            weights[(i, j)] / total
        } else if i == 0 {
            1.0
        } else {
            0.0
        }
    });
    FractionalAllocation::new(x).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nsw_is_invariant_under_relabeling(
        v in shaped(4, 6, 0.0f64..5.0),
        seed in any::<u64>(),
    ) {
        let instance = Instance::new(v.clone()).unwrap();
        let (n, m) = v.shape();
        let owners: Vec<usize> = (0..m).map(|j| ((seed >> (j % 32)) as usize + j) % n).collect();
        let alloc = Allocation::complete(owners.clone());
        let agents: Vec<usize> = (0..n).rev().collect();
        let items: Vec<usize> = (0..m).map(|j| (j + seed as usize % m) % m).collect();
        let permuted = instance.permuted(&agents, &items);
        // item items[k] of the original becomes item k; agent agents[a] becomes a
        let relabeled = Allocation::complete(
            (0..m)
                .map(|k| agents.iter().position(|&a| a == owners[items[k]]).unwrap())
                .collect(),
        );
        let (p1, g1) = nsw_values(&instance, &alloc).unwrap();
        let (p2, g2) = nsw_values(&permuted, &relabeled).unwrap();
        prop_assert!(rel(p1, p2) <= 1e-12 && rel(g1, g2) <= 1e-12);
        if p1 > 0.0 {
            prop_assert!((g1.powi(n as i32) - p1).abs() <= 1e-12 * p1 * n as f64);
        }
    }

    #[test]
    fn feasibility_matches_enumeration(v in shaped(3, 5, sparse_entry())) {
        let instance = Instance::new(v).unwrap();
        let (_, opt) = brute_force_opt(&instance).unwrap();
        prop_assert_eq!(feasibility_check(&instance), opt > 0.0);
    }

    #[test]
    fn inner_infimum_scales_and_permutes(
        a in shaped(3, 5, 0.1f64..3.0),
        c in 0.1f64..10.0,
    ) {
        let forms = LinearFormMatrix::new(a.clone()).unwrap();
        let base = inner_infimum(&forms, 1e-7).unwrap().log_value;
        let scaled = Matrix::from_fn(a.rows(), a.cols(), |i, j| if i == 0 { c * a[(i, j)] } else { a[(i, j)] });
        let scaled = inner_infimum(&LinearFormMatrix::new(scaled).unwrap(), 1e-7).unwrap().log_value;
        prop_assert!((scaled - base - c.ln()).abs() <= 1e-6);
        let reversed = Matrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, a.cols() - 1 - j)]);
        let reversed = inner_infimum(&LinearFormMatrix::new(reversed).unwrap(), 1e-7).unwrap().log_value;
        prop_assert!((reversed - base).abs() <= 1e-6);
    }

    #[test]
    fn inner_infimum_is_monotone(a in shaped(3, 5, 0.1f64..3.0), bump in 0.0f64..2.0) {
        let base = inner_infimum(&LinearFormMatrix::new(a.clone()).unwrap(), 1e-7).unwrap().log_value;
        let bigger = a.map(|x| x + bump);
        let bigger = inner_infimum(&LinearFormMatrix::new(bigger).unwrap(), 1e-7).unwrap().log_value;
        prop_assert!(bigger >= base - 1e-6);
    }

    #[test]
    fn relaxation_bounds_the_optimum_and_rounding_meets_the_factor(v in shaped(3, 6, sparse_entry())) {
        let instance = Instance::new(v.clone()).unwrap();
        let (_, opt) = brute_force_opt(&instance).unwrap();
        prop_assume!(opt > 0.0);
        let saddle = solve_relaxation(&instance, 1e-6).unwrap();
        prop_assert!(saddle.log_value.exp() >= opt - 1e-6 * (1.0 + opt));
        let expected = expected_product(&saddle.x, &v).unwrap();
        let trace = derandomize(&saddle.x, &v).unwrap();
        prop_assert!(trace.final_product >= expected * (1.0 - 1e-9));
        let (n, m) = v.shape();
        let factor = nsw::bounds::bound_factor(m, n).unwrap().tight;
        prop_assert!(expected >= factor * saddle.log_value.exp() * (1.0 - 1e-6));
    }

    #[test]
    fn expected_product_matches_enumeration(
        (w, v) in (1usize..=3, 1usize..=5)
            .prop_flat_map(|(n, m)| (matrix(n, m, sparse_entry()), matrix(n, m, 0.0f64..3.0))),
    ) {
        let x = stochastic(&w);
        let fast = expected_product(&x, &v).unwrap();
        let slow = brute_force_expectation(x.matrix(), &v).unwrap();
        prop_assert!(rel(fast, slow) <= 1e-12);
    }

    #[test]
    fn rounding_of_an_item_ignores_other_columns(
        w in matrix(3, 4, 0.0f64..1.0),
        other in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let x = stochastic(&w);
        let mut changed = w.clone();
        changed[(0, 3)] = other;
        changed[(1, 3)] = 1.0 - other;
        changed[(2, 3)] = 0.0;
        let a = round_once(&x, seed).unwrap();
        let b = round_once(&stochastic(&changed), seed).unwrap();
        prop_assert_eq!(&a.assignment[..3], &b.assignment[..3]);
    }

    #[test]
    fn square_free_sum_matches_expansion(a in shaped(4, 6, sparse_entry())) {
        let expansion = poly_expand_product(&a).unwrap();
        prop_assert!(expansion.terms.values().all(|&c| c >= 0.0));
        let row_sums: f64 = (0..a.rows()).map(|i| a.row(i).iter().sum::<f64>()).product();
        prop_assert!(rel(expansion.coefficient_sum(), row_sums) <= 1e-12);
        let total = square_free_sum(&a, false).unwrap().total;
        prop_assert!(rel(expansion.square_free_sum(), total) <= 1e-12);
        let per_set = square_free_sum(&a, true).unwrap().per_set.unwrap();
        for (set, c) in per_set {
            let mut exponents = vec![0u32; a.cols()];
            set.iter().for_each(|&j| exponents[j] = 1);
            prop_assert!(rel(expansion.coefficient(&exponents), c) <= 1e-12);
        }
    }

    #[test]
    fn matching_dp_matches_enumeration(w in small_int_matrix(5, 6)) {
        for k in 0..=w.rows().min(w.cols()) {
            prop_assert_eq!(k_matching_sum(&w, k).unwrap(), naive_k_matching_sum(&w, k).unwrap());
        }
    }

    #[test]
    fn capacity_never_exceeds_the_infimum(
        a in shaped(3, 5, 0.1f64..3.0),
        raw in proptest::collection::vec(0.0f64..1.0, 5),
    ) {
        let (n, m) = a.shape();
        let theta = ThetaVector::new(project_capped_simplex(&raw[..m], n).unwrap()).unwrap();
        let forms = LinearFormMatrix::new(a).unwrap();
        let capacity = capacity_value(&forms, &theta, 1e-7).unwrap();
        let inf = inner_infimum(&forms, 1e-7).unwrap().log_value.exp();
        prop_assert!(capacity <= inf * (1.0 + 1e-6));
    }

    #[test]
    fn appending_a_sum_row_preserves_the_full_coefficient(a in small_int_matrix(3, 5)) {
        let (n, m) = a.shape();
        prop_assume!(n < m);
        let report = lemma8_identity_check(&a).unwrap();
        prop_assert!(report.equal);
        let extended = Matrix::from_fn(n + 1, m, |i, j| if i < n { a[(i, j)].clone() } else { BigRational::from_integer(1.into()) });
        let extended_report = lemma8_identity_check(&extended).unwrap();
        prop_assert_eq!(&extended_report.alpha_full, &report.alpha_full);
        // (m-n-1)! sum c_S(A') = (m-n)! sum c_S(A)
        let ratio = square_free_sum(&extended, false).unwrap().total
            * BigRational::factorial((m - n - 1) as u64);
        prop_assert_eq!(ratio, report.scaled_sum);
    }
}
