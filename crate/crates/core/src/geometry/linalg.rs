//! Dense Gauss-Jordan elimination over jets, for the small systems the
//! engine solves (metric inverse, torse-forming normal equations).

use crate::error::Error;
use crate::jet::Jet3;

/// Solves `A X = B` for square `a` (row major, `m × m`) and `b` (`m × r`).
/// Pivoting is by jet value; a pivot below `tiny · max|A|` is rank deficiency.
pub(crate) fn solve(
    mut a: Vec<Vec<Jet3>>,
    mut b: Vec<Vec<Jet3>>,
    what: &'static str,
) -> Result<Vec<Vec<Jet3>>, Error> {
    let m = a.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0_f64, |s, x| s.max(x.value().abs()))
        .max(f64::MIN_POSITIVE);
    let tiny = 1e-13 * scale;
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&p, &q| a[p][col].value().abs().total_cmp(&a[q][col].value().abs()))
            .expect("non-empty range");
        if a[pivot][col].value().abs() <= tiny {
            return Err(Error::RankDeficient(what));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut().skip(col) {
            *x = &*x / &p;
        }
        for x in b[col].iter_mut() {
            *x = &*x / &p;
        }
        for row in 0..m {
            if row == col {
                continue;
            }
            let factor = a[row][col].clone();
            if factor.is_zero() {
                continue;
            }
            for c in col..m {
                let t = &factor * &a[col][c];
                a[row][c] = &a[row][c] - &t;
            }
            for c in 0..b[row].len() {
                let t = &factor * &b[col][c];
                b[row][c] = &b[row][c] - &t;
            }
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_jet_matrix() {
        // [[x, 1], [1, y]] at (2, 3); inverse = [[y, -1], [-1, x]] / (xy - 1)
        let x = Jet3::variable(2, 0, 2.0, 3);
        let y = Jet3::variable(2, 1, 3.0, 3);
        let one = Jet3::constant(2, 1.0, 3);
        let zero = Jet3::constant(2, 0.0, 3);
        let a = vec![vec![x.clone(), one.clone()], vec![one.clone(), y.clone()]];
        let id = vec![vec![one.clone(), zero.clone()], vec![zero, one.clone()]];
        let inv = solve(a, id, "test").unwrap();
        let det = &(&x * &y) - &one;
        let want = [[&y / &det, -(&one / &det)], [-(&one / &det), &x / &det]];
        for i in 0..2 {
            for j in 0..2 {
                let (got, w) = (&inv[i][j], &want[i][j]);
                assert!((got.value() - w.value()).abs() < 1e-14);
                for (a, b) in got.third_packed().iter().zip(w.third_packed()) {
                    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn singular_is_reported() {
        let one = Jet3::constant(2, 1.0, 1);
        let a = vec![vec![one.clone(), one.clone()], vec![one.clone(), one.clone()]];
        let b = vec![vec![one.clone()], vec![one]];
        assert!(matches!(solve(a, b, "singular"), Err(Error::RankDeficient("singular"))));
    }
}
