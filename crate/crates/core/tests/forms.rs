use grassdual::exterior::*;
use grassdual::hessian::*;
use grassdual::linalg::{identity, mat_mul, Matrix};
use grassdual::multiindex::{enumerate_indices, MultiIndex};
use grassdual::ring::{Integers, MultiPoly, PolyRing, Rationals, Ring};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn mi(v: &[usize], n: usize) -> MultiIndex {
    MultiIndex::new(v.to_vec(), n).unwrap()
}

fn random_chart(rng: &mut ChaCha8Rng, k: usize, n: usize) -> Matrix<BigRational> {
    Matrix::from_fn(k, n - k, |_, _| q(rng.gen_range(-3..=3)))
}

fn random_q_array(rng: &mut ChaCha8Rng, k: usize, n: usize) -> ExteriorArray<BigRational> {
    random_array(rng, k, n, -4, 4).unwrap().to_rational()
}

/// The (3,6) form on the chart, written out with one symbol per sorted
/// coefficient `a_I` (variables 0..20 in lexicographic order of `I`) and the
/// chart variables after them.
fn transcribed_form_36() -> MultiPoly {
    let idx = enumerate_indices(3, 6).unwrap();
    let nv = 20 + 9;
    let a = |i: &[usize]| MultiPoly::var(nv, idx.iter().position(|m| m.values() == i).unwrap());
    let x = |p: usize, t: usize| MultiPoly::var(nv, 20 + chart_var(3, 6, p, t));
    let mono = |f: &[(usize, usize)]| f.iter().fold(MultiPoly::from_i64(nv, 1), |acc, &(p, t)| acc.mul(&x(p, t)));
    let binom = |u: &[(usize, usize)], v: &[(usize, usize)]| mono(u).sub(&mono(v));
    let mut f = a(&[1, 2, 3]);
    for t in 4..=6 {
        f = f.add(&a(&[1, 2, t]).mul(&x(3, t)));
        f = f.sub(&a(&[1, 3, t]).mul(&x(2, t)));
        f = f.add(&a(&[2, 3, t]).mul(&x(1, t)));
    }
    let quads: [(i64, [usize; 3], [(usize, usize); 2], [(usize, usize); 2]); 9] = [
        (1, [1, 4, 5], [(2, 4), (3, 5)], [(3, 4), (2, 5)]),
        (1, [1, 4, 6], [(2, 4), (3, 6)], [(2, 6), (3, 4)]),
        (1, [1, 5, 6], [(2, 5), (3, 6)], [(2, 6), (3, 5)]),
        (-1, [2, 4, 5], [(1, 4), (3, 5)], [(1, 5), (3, 4)]),
        (-1, [2, 4, 6], [(1, 4), (3, 6)], [(1, 6), (3, 4)]),
        (-1, [2, 5, 6], [(1, 5), (3, 6)], [(1, 6), (3, 5)]),
        (1, [3, 4, 5], [(1, 4), (2, 5)], [(1, 5), (2, 4)]),
        (1, [3, 4, 6], [(1, 4), (2, 6)], [(1, 6), (2, 4)]),
        (1, [3, 5, 6], [(1, 5), (2, 6)], [(1, 6), (2, 5)]),
    ];
    for (s, i, u, v) in quads {
        f = f.add(&a(&i).mul(&binom(&u, &v)).scale(&q(s)));
    }
    let cubic = [
        (1, [(1, 4), (2, 5), (3, 6)]),
        (-1, [(1, 4), (2, 6), (3, 5)]),
        (1, [(1, 5), (2, 6), (3, 4)]),
        (-1, [(1, 5), (2, 4), (3, 6)]),
        (1, [(1, 6), (2, 4), (3, 5)]),
        (-1, [(1, 6), (2, 5), (3, 4)]),
    ];
    for (s, m) in cubic {
        f = f.add(&a(&[4, 5, 6]).mul(&mono(&m)).scale(&q(s)));
    }
    f
}

#[test]
fn form_on_chart_matches_written_expansion() {
    let nv = 29;
    let ring = PolyRing::new(nv);
    let mut a = ExteriorArray::new(3, 6).unwrap();
    for (v, i) in enumerate_indices(3, 6).unwrap().into_iter().enumerate() {
        a.set(&ring, i, ring.var(v)).unwrap();
    }
    let x = Matrix::from_fn(3, 3, |i, j| ring.var(20 + i * 3 + j));
    let f = evaluate_form(&ring, &a, &x).unwrap();
    assert_eq!(f, transcribed_form_36());
}

/// The displayed 9×9 Hessian for (3,6): each entry is a sign times the sorted
/// coefficient indexed by `(p, p', t, t')`, or zero.
#[test]
fn hessian_matches_written_matrix_36() {
    type E = Option<(i64, [usize; 4])>;
    let s = |sign: i64, p: usize, p2: usize, t: usize, t2: usize| -> E { Some((sign, [p, p2, t, t2])) };
    let z: E = None;
    let rows: [[E; 9]; 9] = [
        [z, z, z, z, s(1, 1, 2, 4, 5), s(1, 1, 2, 4, 6), z, s(-1, 1, 3, 4, 5), s(-1, 1, 3, 4, 6)],
        [z, z, z, s(-1, 1, 2, 4, 5), z, s(1, 1, 2, 5, 6), s(1, 1, 3, 4, 5), z, s(-1, 1, 3, 5, 6)],
        [z, z, z, s(-1, 1, 2, 4, 6), s(-1, 1, 2, 5, 6), z, s(1, 1, 3, 4, 6), s(1, 1, 3, 5, 6), z],
        [z, s(-1, 1, 2, 4, 5), s(-1, 1, 2, 4, 6), z, z, z, z, s(1, 2, 3, 4, 5), s(1, 2, 3, 4, 6)],
        [s(1, 1, 2, 4, 5), z, s(-1, 1, 2, 5, 6), z, z, z, s(-1, 2, 3, 4, 5), z, s(1, 2, 3, 5, 6)],
        [s(1, 1, 2, 4, 6), s(1, 1, 2, 5, 6), z, z, z, z, s(-1, 2, 3, 4, 6), s(-1, 2, 3, 5, 6), z],
        [z, s(1, 1, 3, 4, 5), s(1, 1, 3, 4, 6), z, s(-1, 2, 3, 4, 5), s(-1, 2, 3, 4, 6), z, z, z],
        [s(-1, 1, 3, 4, 5), z, s(1, 1, 3, 5, 6), s(1, 2, 3, 4, 5), z, s(-1, 2, 3, 5, 6), z, z, z],
        [s(-1, 1, 3, 4, 6), s(-1, 1, 3, 5, 6), z, s(1, 2, 3, 4, 6), s(1, 2, 3, 5, 6), z, z, z, z],
    ];
    let (h, names) = assemble_symbolic(3, 6).unwrap();
    for (r, row) in rows.iter().enumerate() {
        for (c, e) in row.iter().enumerate() {
            let expected = match e {
                None => MultiPoly::zero(9),
                Some((sign, [p, p2, t, t2])) => {
                    let v = names.iter().position(|n| *n == format!("a_{p}_{p2}_{t}_{t2}")).unwrap();
                    MultiPoly::var(9, v).scale(&q(*sign))
                }
            };
            assert_eq!(*h.matrix().get(r, c), expected, "entry ({r},{c})");
        }
    }
}

#[test]
fn assembly_equals_second_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (k, n) in [(2, 5), (3, 6), (3, 7), (4, 8)] {
        let a = random_q_array(&mut rng, k, n);
        let direct = assemble(&Rationals, &a).unwrap();
        let at_origin = hessian_at(&a, &zero_chart(&Rationals, k, n)).unwrap();
        assert!(direct == at_origin, "({k},{n})");
    }
}

#[test]
fn monomial_coefficients_are_positional() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = random_q_array(&mut rng, 3, 7);
    let f = dehomogenized_polynomial(&a).unwrap();
    assert!(f.total_degree().unwrap() <= 3);
    for (m, c) in f.terms() {
        let mut positions = Vec::new();
        let mut values = Vec::new();
        for (v, &e) in m.exps().iter().enumerate() {
            assert!(e <= 1);
            if e == 1 {
                let (p, t) = chart_label(3, 7, v);
                positions.push(p);
                values.push(t);
            }
        }
        assert_eq!(*c, a.positional_get(&Rationals, &values, &positions).unwrap());
    }
}

#[test]
fn translation_is_the_unipotent_group_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (k, n) in [(2, 5), (3, 6), (3, 7)] {
        let a = random_q_array(&mut rng, k, n);
        let x = random_chart(&mut rng, k, n);
        let via_derivatives = act_translation(&a, &x).unwrap();
        let via_minors = act_gl(&Rationals, &a, &translation_matrix(&Rationals, &x)).unwrap();
        assert_eq!(via_derivatives, via_minors, "({k},{n})");
        let back = act_translation(&via_derivatives, &x.map(|v| -v)).unwrap();
        assert_eq!(back, a);
        let f0 = via_derivatives.get(&Rationals, &MultiIndex::first(k, n));
        assert_eq!(f0, evaluate_form(&Rationals, &a, &x).unwrap());
    }
}

#[test]
fn dual_chart_is_the_swapped_chart() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (k, n) in [(3, 7), (4, 8)] {
        let a = random_q_array(&mut rng, k, n);
        let x = random_chart(&mut rng, k, n);
        let w = dual_swap(&Rationals, k, n);
        let lhs = evaluate_frame(&Rationals, &a, &dual_chart_point(&Rationals, &x)).unwrap();
        let rhs = evaluate_form(&Rationals, &act_gl(&Rationals, &a, &w).unwrap(), &x).unwrap();
        assert_eq!(lhs, rhs);
        let x0 = zero_chart(&Rationals, k, n);
        let at_origin = evaluate_frame(&Rationals, &a, &dual_chart_point(&Rationals, &x0)).unwrap();
        assert_eq!(at_origin, a.get(&Rationals, &MultiIndex::last(k, n)));
    }
}

#[test]
fn dual_criticality_reads_star_of_last_index() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (k, n) = (3, 7);
    let last = MultiIndex::last(k, n);
    let mut a = random_q_array(&mut rng, k, n);
    for i in last.star() {
        a.set(&Rationals, i, q(0)).unwrap();
    }
    let w = dual_swap(&Rationals, k, n);
    let moved = act_gl(&Rationals, &a, &w).unwrap();
    assert!(is_critical(&Rationals, &moved, &zero_chart(&Rationals, k, n)).unwrap());
    a.set(&Rationals, mi(&[1, 6, 7], n), q(1)).unwrap();
    let moved = act_gl(&Rationals, &a, &w).unwrap();
    assert!(!is_critical(&Rationals, &moved, &zero_chart(&Rationals, k, n)).unwrap());
}

#[test]
fn nabla_at_first_index_is_criticality_at_origin() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..20 {
        let mut a = random_q_array(&mut rng, 3, 6);
        if trial % 2 == 0 {
            for i in MultiIndex::first(3, 6).star() {
                a.set(&Rationals, i, q(0)).unwrap();
            }
        }
        let crit = is_critical(&Rationals, &a, &zero_chart(&Rationals, 3, 6)).unwrap();
        assert_eq!(nabla_membership(&Rationals, &a, &MultiIndex::first(3, 6)), crit);
    }
    let z = ExteriorArray::<BigRational>::new(3, 6).unwrap();
    for j in enumerate_indices(3, 6).unwrap() {
        assert!(nabla_membership(&Rationals, &z, &j));
    }
}

/// Permutation matrices move the coordinate point of `J` to the origin, so
/// vanishing on the star of `J` is criticality there.
#[test]
fn nabla_is_criticality_at_coordinate_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (k, n) = (2, 5);
    for j in enumerate_indices(k, n).unwrap() {
        let rest: Vec<usize> = (1..=n).filter(|v| !j.contains(*v)).collect();
        let order: Vec<usize> = j.values().iter().chain(rest.iter()).copied().collect();
        // g e_i = e_{order[i]}: frame [I|0]·gᵀ has rows e_{j_1}, …, e_{j_k}
        let g = Matrix::from_fn(n, n, |r, c| if order[c] == r + 1 { q(1) } else { q(0) });
        for zeroed in [false, true] {
            let mut a = random_q_array(&mut rng, k, n);
            if zeroed {
                for i in j.star() {
                    a.set(&Rationals, i, q(0)).unwrap();
                }
            }
            let moved = act_gl(&Rationals, &a, &g).unwrap();
            let crit = is_critical(&Rationals, &moved, &zero_chart(&Rationals, k, n)).unwrap();
            assert_eq!(nabla_membership(&Rationals, &a, &j), crit, "J={j}");
        }
    }
}

#[test]
fn gradient_matches_derivative_of_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let a = random_q_array(&mut rng, 3, 6);
    let x = random_chart(&mut rng, 3, 6);
    let g = gradient(&Rationals, &a, &x).unwrap();
    let translated = act_translation(&a, &x).unwrap();
    for p in 1..=3 {
        for t in 4..=6 {
            let expected = translated.positional_get(&Rationals, &[t], &[p]).unwrap();
            assert_eq!(*g.get(p - 1, t - 4), expected);
        }
    }
    let g0 = gradient(&Rationals, &a, &zero_chart(&Rationals, 3, 6)).unwrap();
    assert_eq!(*g0.get(0, 0), a.positional_get(&Rationals, &[4], &[1]).unwrap());
    let mut c = ExteriorArray::new(3, 6).unwrap();
    c.set(&Rationals, MultiIndex::first(3, 6), q(3)).unwrap();
    let gc = gradient(&Rationals, &c, &x).unwrap();
    assert!(gc.to_rows().iter().flatten().all(|v| v.is_zero()));
}

#[test]
fn group_action_is_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let (k, n) = (3, 6);
    let a = random_array(&mut rng, k, n, -3, 3).unwrap();
    for _ in 0..5 {
        let g = Matrix::from_fn(n, n, |_, _| BigInt::from(rng.gen_range(-2..=2)));
        let frame = Matrix::from_fn(k, n, |_, _| BigInt::from(rng.gen_range(-2..=2)));
        let lhs = evaluate_frame(&Integers, &act_gl(&Integers, &a, &g).unwrap(), &frame).unwrap();
        let moved = mat_mul(&Integers, &frame, &g.transpose()).unwrap();
        let rhs = evaluate_frame(&Integers, &a, &moved).unwrap();
        assert_eq!(lhs, rhs);
    }
    assert_eq!(act_gl(&Integers, &a, &identity(&Integers, n)).unwrap(), a);
}

#[test]
fn duality_reorders_onto_the_complementary_shape() {
    for (k, n) in [(2, 5), (3, 7), (3, 8)] {
        let map = dual_variable_map(k, n).unwrap();
        assert_eq!(map.len(), symbolic_variables(k, n).len());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let a = random_array(&mut rng, 3, 7, -5, 5).unwrap();
    let h = assemble(&Integers, &a).unwrap();
    let b = dual_array(&Integers, &a).unwrap();
    assert!(apply_duality(&h) == assemble(&Integers, &b).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn positional_access_is_alternating(seed in any::<u64>(), swap_values in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_array(&mut rng, 4, 9, -9, 9).unwrap();
        let mut positions: Vec<usize> = (1..=4).collect();
        let mut values: Vec<usize> = (5..=9).collect();
        for i in (1..positions.len()).rev() { positions.swap(i, rng.gen_range(0..=i)); }
        for i in (1..values.len()).rev() { values.swap(i, rng.gen_range(0..=i)); }
        let r = rng.gen_range(2..=4);
        let (p, v) = (positions[..r].to_vec(), values[..r].to_vec());
        let base = a.positional_get(&Integers, &v, &p).unwrap();
        let (mut p2, mut v2) = (p.clone(), v.clone());
        if swap_values { v2.swap(0, 1) } else { p2.swap(0, 1) }
        prop_assert_eq!(a.positional_get(&Integers, &v2, &p2).unwrap(), -base);
    }

    #[test]
    fn form_is_linear_in_the_array(seed in any::<u64>(), s in -5i64..6, t in -5i64..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a1 = random_array(&mut rng, 3, 6, -4, 4).unwrap();
        let a2 = random_array(&mut rng, 3, 6, -4, 4).unwrap();
        let x = Matrix::from_fn(3, 3, |_, _| BigInt::from(rng.gen_range(-3..=3)));
        let mut comb = ExteriorArray::new(3, 6).unwrap();
        for i in enumerate_indices(3, 6).unwrap() {
            let v = a1.get(&Integers, &i) * s + a2.get(&Integers, &i) * t;
            comb.set(&Integers, i, v).unwrap();
        }
        let f = |a: &ExteriorArray<BigInt>| evaluate_form(&Integers, a, &x).unwrap();
        prop_assert_eq!(f(&comb), f(&a1) * s + f(&a2) * t);
    }

    #[test]
    fn specialization_multiplies_determinants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h1 = assemble(&Integers, &random_array(&mut rng, 3, 6, -3, 3).unwrap()).unwrap();
        let h2 = assemble(&Integers, &random_array(&mut rng, 3, 6, -3, 3).unwrap()).unwrap();
        let big = specialize_embed(&Integers, &h1, &h2).unwrap();
        prop_assert_eq!((big.k(), big.n()), (3, 9));
        big.check_structure(&Integers).unwrap();
        let d = grassdual::linalg::det_bareiss(&Integers, big.matrix()).unwrap();
        let d1 = grassdual::linalg::det_bareiss(&Integers, h1.matrix()).unwrap();
        let d2 = grassdual::linalg::det_bareiss(&Integers, h2.matrix()).unwrap();
        let prod = d1 * d2;
        prop_assert!(d == prod || d == -prod);
    }
}

#[test]
fn embedding_zero_matrices_gives_zero() {
    let z = assemble(&Integers, &ExteriorArray::<BigInt>::new(3, 6).unwrap()).unwrap();
    let e = specialize_embed(&Integers, &z, &z).unwrap();
    assert!(e.matrix().to_rows().iter().flatten().all(|v| v.is_zero()));
    let p = position_embed(&Integers, &z, &assemble(&Integers, &ExteriorArray::<BigInt>::new(2, 5).unwrap()).unwrap()).unwrap();
    assert_eq!((p.k(), p.n()), (5, 8));
}

#[test]
fn block_rows_of_embeddings_stay_full() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let h = loop {
        let h = assemble(&Integers, &random_array(&mut rng, 3, 6, -3, 3).unwrap()).unwrap();
        if (1..=3).all(|i| block_row_rank(&h, i) == 3) {
            break h;
        }
    };
    let big = specialize_embed(&Integers, &h, &h).unwrap();
    for i in 1..=3 {
        assert_eq!(block_row_rank(&big, i), 6);
    }
    let z = assemble(&Integers, &ExteriorArray::<BigInt>::new(3, 6).unwrap()).unwrap();
    assert_eq!(block_row_rank(&z, 1), 0);
    assert_eq!(strip_row_ranks(&z), vec![0, 0, 0]);
}

#[test]
fn permutation_preserves_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let a = random_array(&mut rng, 3, 8, -3, 3).unwrap();
    let h = assemble(&Integers, &a).unwrap();
    let d = grassdual::linalg::det_modular(h.matrix()).unwrap();
    let dp = grassdual::linalg::det_modular(apply_duality(&h).matrix()).unwrap();
    assert_eq!(d, dp);
    let _ = Integers.zero();
}
