use num_traits::{One, Zero};

use crate::symring::Q;

pub type QMatrix = Vec<Vec<Q>>;

pub fn identity(n: usize) -> QMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Q::one() } else { Q::zero() })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &QMatrix) -> QMatrix {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    (0..m)
        .map(|j| (0..n).map(|i| a[i][j].clone()).collect())
        .collect()
}

pub fn mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(Q::zero(), |acc, l| acc + &a[i][l] * &b[l][j]))
                .collect()
        })
        .collect()
}

pub fn inverse(a: &QMatrix) -> Option<QMatrix> {
    let n = a.len();
    let mut m = a.clone();
    let mut inv = identity(n);
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(p, c);
        inv.swap(p, c);
        let piv = m[c][c].recip();
        for k in 0..n {
            m[c][k] = &m[c][k] * &piv;
            inv[c][k] = &inv[c][k] * &piv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in 0..n {
                    let a = &m[c][k] * &f;
                    m[r][k] -= a;
                    let b = &inv[c][k] * &f;
                    inv[r][k] -= b;
                }
            }
        }
    }
    Some(inv)
}

pub fn is_symmetric(a: &QMatrix) -> bool {
    let n = a.len();
    (0..n).all(|i| (0..n).all(|j| a[i][j] == a[j][i]))
}
