use std::path::PathBuf;

use proptest::prelude::*;
use quiver_core::{parse_quiver, parse_term, Context, Field, Matrix, Quiver, Subspace, Q};

fn data(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    std::fs::read_to_string(p).unwrap()
}

fn nori3() -> Quiver {
    parse_quiver(&data("nori3.qv")).unwrap()
}

fn int_matrix(rows: &[Vec<i64>]) -> Matrix<Q> {
    let cols = rows.first().map_or(0, |r| r.len());
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Q::from_i64(x)).collect()).collect(), cols)
}

/// Integer determinant by cofactor expansion.
fn det(m: &[Vec<i128>]) -> i128 {
    if m.is_empty() {
        return 1;
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i128>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// Rank as the size of the largest nonvanishing minor.
fn minor_rank(rows: &[Vec<i64>]) -> usize {
    let (r, c) = (rows.len(), rows.first().map_or(0, |x| x.len()));
    (1..=r.min(c))
        .rev()
        .find(|&k| {
            subsets(r, k).iter().any(|ri| {
                subsets(c, k).iter().any(|ci| {
                    let m: Vec<Vec<i128>> = ri.iter().map(|&i| ci.iter().map(|&j| rows[i][j] as i128).collect()).collect();
                    det(&m) != 0
                })
            })
        })
        .unwrap_or(0)
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..4, c), r))
}

#[test]
fn data_files_parse() {
    for name in ["nori3.qv", "points.qv", "example2.qv", "zero_terms.qv"] {
        let q = parse_quiver(&data(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!q.sorts().is_empty(), "{name}");
    }
    let q = nori3();
    assert!(q.sort_by_name("XZ1").is_some());
    assert_eq!(q.pairs().len(), 7);
}

#[test]
fn quiver_json_round_trips() {
    for name in ["nori3.qv", "points.qv", "example2.qv"] {
        let q = parse_quiver(&data(name)).unwrap();
        let back = Quiver::from_json(&q.to_json()).unwrap();
        assert_eq!(back.to_json(), q.to_json(), "{name}");
    }
}

#[test]
fn dependent_rows_drop_rank() {
    let m = int_matrix(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
    assert_eq!(m.rank(), 2);
    let k = m.kernel();
    assert_eq!(k.len(), 1);
    assert!(m.mul_vec(&k[0]).iter().all(|x| x.is_zero()));
    assert!(m.inverse().is_none());
    assert_eq!(Matrix::<Q>::zeros(0, 0).inverse(), Some(Matrix::zeros(0, 0)));
}

#[test]
fn term_display_reparses() {
    let q = nori3();
    let ctx = Context::single("x", q.sort_by_name("YZ1").unwrap());
    let t = parse_term("2*b1(a1(x)) - c1(x)", &q, &ctx, None).unwrap();
    assert_eq!(parse_term(&t.display(&q), &q, &ctx, None).unwrap(), t);
    assert!(parse_term("a0(x)", &q, &ctx, None).is_err());
}

proptest! {
    #[test]
    fn rank_matches_minor_oracle(rows in small_matrix()) {
        let m = int_matrix(&rows);
        prop_assert_eq!(m.rank(), minor_rank(&rows));
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn kernel_is_annihilated_and_complementary(rows in small_matrix()) {
        let m = int_matrix(&rows);
        let k = m.kernel();
        prop_assert_eq!(k.len() + m.rank(), m.cols());
        for v in &k {
            prop_assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        prop_assert_eq!(Subspace::spanned_by(m.cols(), &k).dim(), k.len());
    }

    #[test]
    fn inverse_exists_iff_full_rank(n in 1usize..5, entries in prop::collection::vec(-3i64..4, 16)) {
        let rows: Vec<Vec<i64>> = (0..n).map(|i| entries[i * n..(i + 1) * n].to_vec()).collect();
        let m = int_matrix(&rows);
        match m.inverse() {
            Some(inv) => prop_assert_eq!(m.mul(&inv), Matrix::identity(n)),
            None => prop_assert!(m.rank() < n),
        }
    }

    #[test]
    fn solve_recovers_a_consistent_right_side(rows in small_matrix(), x in prop::collection::vec(-3i64..4, 4)) {
        let m = int_matrix(&rows);
        let x: Vec<Q> = x[..m.cols()].iter().map(|&v| Q::from_i64(v)).collect();
        let b = m.mul_vec(&x);
        let y = m.solve(&b).expect("b is in the image");
        prop_assert_eq!(m.mul_vec(&y), b);
    }
}
