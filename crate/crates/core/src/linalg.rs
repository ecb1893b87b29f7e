//! Eigenvalues of small symmetric matrices.
//!
//! The Fisher-information blocks are at most a few dimensions, so a closed
//! form covers 1x1 and 2x2 and a plain Jacobi sweep covers the rest.

/// Eigenvalues of a symmetric matrix, ascending.
///
/// Only the lower triangle is read; the matrix must be square.
pub fn sym_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let d = m.len();
    debug_assert!(m.iter().all(|row| row.len() == d), "matrix must be square");
    let mut eig = match d {
        0 => Vec::new(),
        1 => vec![m[0][0]],
        2 => {
            let (a, b, c) = (m[0][0], m[1][0], m[1][1]);
            let mean = 0.5 * (a + c);
            let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
            vec![mean - r, mean + r]
        }
        _ => jacobi(m),
    };
    eig.sort_by(|x, y| x.partial_cmp(y).expect("non-finite eigenvalue"));
    eig
}

/// Cyclic Jacobi rotations until off-diagonal mass is negligible.
fn jacobi(m: &[Vec<f64>]) -> Vec<f64> {
    let d = m.len();
    let mut a: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if j <= i { m[i][j] } else { m[j][i] }).collect())
        .collect();
    let scale: f64 = a
        .iter()
        .flatten()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..d {
            for j in 0..i {
                off = off.max(a[i][j].abs());
            }
        }
        if off <= 1e-14 * scale {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                if a[q][p].abs() <= 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[q][p];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let (akp, akq) = (a[k.max(p)][k.min(p)], a[k.max(q)][k.min(q)]);
                    let new_p = c * akp - s * akq;
                    let new_q = s * akp + c * akq;
                    if k != p && k != q {
                        a[k.max(p)][k.min(p)] = new_p;
                        a[k.max(q)][k.min(q)] = new_q;
                    }
                }
                let (app, aqq, apq) = (a[p][p], a[q][q], a[q][p]);
                a[p][p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a[q][q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a[q][p] = 0.0;
            }
        }
    }
    (0..d).map(|i| a[i][i]).collect()
}
