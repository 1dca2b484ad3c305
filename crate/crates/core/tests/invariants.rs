use duval::gf::FieldElem;
use duval::grpscheme::{make_catalog, ADEType, SubgroupScheme};
use duval::linalg;
use duval::mat2::{self, Mat2};
use duval::polyinv::{self, BivarPoly};
use duval::singclass;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instances() -> Vec<(ADEType, u64)> {
    let mut out = Vec::new();
    for p in [5, 7] {
        out.extend((1..=6).map(|n| (ADEType::A(n), p)));
        out.extend((4..=8).map(|n| (ADEType::D(n), p)));
        out.extend([(ADEType::E6, p), (ADEType::E7, p)]);
    }
    out.extend([(ADEType::A(2), 3), (ADEType::A(3), 2), (ADEType::D(5), 3)]);
    out.extend([(ADEType::E8, 7), (ADEType::E8, 11)]);
    out
}

fn dense_image(g: &Mat2, d: u32, j: u32) -> Vec<FieldElem> {
    let m = BivarPoly::monomial(g.ctx().one(), d - j, j);
    polyinv::act(g, &m).unwrap().to_dense(d)
}

/// Dimension of degree-d invariants as the common kernel of `g - 1` over the
/// generators, cut down by the weight condition for `mu_r`.
fn kernel_oracle(g: &SubgroupScheme, d: u32) -> usize {
    let ctx = g.ctx();
    let n = d as usize + 1;
    let mut rows: Vec<Vec<FieldElem>> = Vec::new();
    for x in g.reduced_part().generators() {
        // Row i of (g - 1) acting on dense coefficient vectors.
        let cols: Vec<Vec<FieldElem>> = (0..=d).map(|j| dense_image(&x, d, j)).collect();
        for i in 0..n {
            let mut row: Vec<FieldElem> = (0..n).map(|j| cols[j][i]).collect();
            row[i] -= ctx.one();
            rows.push(row);
        }
    }
    // Index j is u^(d-j) v^j; the weight is d - 2j.
    for j in 0..n {
        if (d as i64 - 2 * j as i64).rem_euclid(g.r() as i64) != 0 {
            let mut row = vec![ctx.zero(); n];
            row[j] = ctx.one();
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return n;
    }
    n - linalg::rank(rows)
}

/// Dimension as the rank of the full group average of every weight-admissible
/// monomial.
fn average_oracle(g: &SubgroupScheme, d: u32) -> usize {
    let ctx = g.ctx();
    let h = g.reduced_part();
    let scale = ctx.from_int(h.order() as i64).inv().unwrap();
    let mut rows = Vec::new();
    for j in 0..=d {
        if (d as i64 - 2 * j as i64).rem_euclid(g.r() as i64) != 0 {
            continue;
        }
        let mut acc = vec![ctx.zero(); d as usize + 1];
        for x in h.elements() {
            for (a, b) in acc.iter_mut().zip(dense_image(x, d, j)) {
                *a += b;
            }
        }
        rows.push(acc.into_iter().map(|c| c * scale).collect());
    }
    if rows.is_empty() {
        return 0;
    }
    linalg::rank(rows)
}

#[test]
fn basis_dimension_matches_oracles() {
    for (t, p) in instances() {
        let g = make_catalog(t, p).unwrap();
        let dims = polyinv::hilbert(&g, 20).unwrap();
        for d in 0..=20u32 {
            let k = kernel_oracle(&g, d);
            let a = average_oracle(&g, d);
            assert_eq!(dims[d as usize], k, "{t} p={p} d={d} kernel");
            assert_eq!(dims[d as usize], a, "{t} p={p} d={d} average");
        }
    }
}

#[test]
fn normalize_conjugator_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases = [
        (ADEType::A(1), 5),
        (ADEType::A(4), 7),
        (ADEType::A(2), 3),
        (ADEType::D(4), 5),
        (ADEType::D(5), 7),
        (ADEType::D(6), 3),
        (ADEType::D(5), 3),
    ];
    for (t, p) in cases {
        let g = make_catalog(t, p).unwrap();
        for _ in 0..10 {
            let m = if g.is_reduced() || g.r() <= 2 {
                mat2::random_sl2(g.ctx(), &mut rng)
            } else {
                mat2::random_torus_normalizer(g.ctx(), &mut rng)
            };
            let h = g.conjugate(&m).unwrap();
            let (tm, back) = singclass::normalize_conjugator(&h).unwrap();
            assert!(tm.det().is_one(), "{t} p={p}");
            assert!(back.same_subgroup(&g).unwrap(), "{t} p={p} by {m}");
            assert!(back.same_subgroup(&h.conjugate(&tm).unwrap()).unwrap());
        }
    }
}

fn invariant_under(g: &SubgroupScheme, f: &BivarPoly) -> bool {
    let r = g.r() as i64;
    f.terms().all(|((a, b), _)| (a as i64 - b as i64).rem_euclid(r) == 0)
        && g
            .reduced_part()
            .generators()
            .iter()
            .all(|x| polyinv::act(x, f).unwrap() == *f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_of_invariants_are_invariant(
        idx in 0usize..25,
        d1 in 1u32..14,
        d2 in 1u32..14,
        picks in proptest::collection::vec(0u64..1000, 4),
    ) {
        let cases = instances();
        let (t, p) = cases[idx % cases.len()];
        let g = make_catalog(t, p).unwrap();
        let b1 = polyinv::invariant_basis(&g, d1).unwrap();
        let b2 = polyinv::invariant_basis(&g, d2).unwrap();
        prop_assume!(!b1.is_empty() && !b2.is_empty());
        let ctx = g.ctx();
        let combo = |b: &[BivarPoly], s: u64, c: u64| {
            let x = b[s as usize % b.len()].scale(ctx.from_int(c as i64 % 13 + 1));
            let y = &b[(s as usize + 1) % b.len()];
            x.try_add(y).unwrap()
        };
        let f1 = combo(&b1, picks[0], picks[1]);
        let f2 = combo(&b2, picks[2], picks[3]);
        prop_assert!(invariant_under(&g, &f1));
        let prod = f1.try_mul(&f2).unwrap();
        prop_assert!(invariant_under(&g, &prod), "{} p={}", t, p);
        let basis = polyinv::invariant_basis(&g, d1 + d2).unwrap();
        let echelon = linalg::rref(basis.iter().map(|b| b.to_dense(d1 + d2)).collect());
        let mut v = prod.to_dense(d1 + d2);
        linalg::reduce(&mut v, &echelon);
        prop_assert!(v.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn reynolds_fixes_invariants(idx in 0usize..25, d in 0u32..16) {
        let cases = instances();
        let (t, p) = cases[idx % cases.len()];
        let g = make_catalog(t, p).unwrap();
        for f in polyinv::invariant_basis(&g, d).unwrap() {
            prop_assert_eq!(polyinv::reynolds(g.reduced_part(), &f).unwrap(), f);
        }
    }
}
