//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant (Higham 2005).

use num_complex::Complex;

use crate::matrix::ComplexMatrix;
use crate::scalar::{czero, Real};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// `exp(A)` for a square complex matrix.
pub fn expm<T: Real>(a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = a.dim();
    let norm = a.norm_one();
    if norm == T::zero() {
        return ComplexMatrix::identity(n);
    }
    let ratio = norm.as_f64() / THETA13;
    let squarings = if ratio > 1.0 { ratio.log2().ceil() as i32 } else { 0 };
    let a = a.scale(T::lit(2f64.powi(-squarings)));

    let b: Vec<T> = PADE13.iter().map(|&c| T::lit(c)).collect();
    let ident = ComplexMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let lincomb = |terms: &[(T, &ComplexMatrix<T>)]| {
        let mut acc = ComplexMatrix::zeros(n);
        for &(c, m) in terms {
            acc.axpy(c, m);
        }
        acc
    };

    let inner_u = lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
    let mut u = &a6 * &inner_u;
    u += &lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &ident)]);
    let u = &a * &u;

    let inner_v = lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
    let mut v = &a6 * &inner_v;
    v += &lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &ident)]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = solve(&q, &p);
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Solves `Q X = P` by LU with partial pivoting. `Q` is the Padé
/// denominator, which is well conditioned after scaling.
fn solve<T: Real>(q: &ComplexMatrix<T>, p: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = q.dim();
    let mut lu: Vec<Vec<Complex<T>>> = q.rows().map(|r| r.to_vec()).collect();
    let mut rhs: Vec<Vec<Complex<T>>> = p.rows().map(|r| r.to_vec()).collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| lu[i][col].norm().partial_cmp(&lu[j][col].norm()).unwrap())
            .unwrap();
        lu.swap(col, pivot);
        rhs.swap(col, pivot);
        let d = lu[col][col];
        for row in col + 1..n {
            let f = lu[row][col] / d;
            if f == czero() {
                continue;
            }
            for k in col..n {
                let t = lu[col][k];
                lu[row][k] = lu[row][k] - f * t;
            }
            for k in 0..n {
                let t = rhs[col][k];
                rhs[row][k] = rhs[row][k] - f * t;
            }
        }
    }
    for col in (0..n).rev() {
        let d = lu[col][col];
        for k in 0..n {
            let mut s = rhs[col][k];
            for j in col + 1..n {
                s = s - lu[col][j] * rhs[j][k];
            }
            rhs[col][k] = s / d;
        }
    }
    ComplexMatrix::from_rows(rhs).expect("square by construction")
}
