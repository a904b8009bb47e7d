//! Exact dense linear algebra over Q(√2, √3).

use crate::scalar::Scalar;

pub type Vector = Vec<Scalar>;
pub type Matrix = Vec<Vec<Scalar>>;

/// Reduced row echelon form. Returns the reduced rows (zero rows dropped)
/// and the pivot column of each.
pub fn rref(mut rows: Matrix) -> (Matrix, Vec<usize>) {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].inv().expect("nonzero pivot");
        if !inv.is_one() {
            for x in rows[r][col..].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                if !p.is_zero() {
                    *x -= &(&f * p);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank(rows: &[Vector]) -> usize {
    rref(rows.to_vec()).1.len()
}

/// Indices of a maximal independent subset, chosen greedily in order.
pub fn independent_subset(vectors: &[Vector]) -> Vec<usize> {
    let mut basis: Matrix = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut chosen = Vec::new();
    for (k, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for (row, &pc) in basis.iter().zip(&pivots) {
            if w[pc].is_zero() {
                continue;
            }
            let f = w[pc].clone();
            for (x, p) in w.iter_mut().zip(row) {
                if !p.is_zero() {
                    *x -= &(&f * p);
                }
            }
        }
        if let Some(pc) = w.iter().position(|x| !x.is_zero()) {
            let inv = w[pc].inv().expect("nonzero");
            for x in w.iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
            // keep earlier rows reduced against the new pivot
            for row in basis.iter_mut() {
                if row[pc].is_zero() {
                    continue;
                }
                let f = row[pc].clone();
                for (x, p) in row.iter_mut().zip(&w) {
                    if !p.is_zero() {
                        *x -= &(&f * p);
                    }
                }
            }
            basis.push(w);
            pivots.push(pc);
            chosen.push(k);
        }
    }
    chosen
}

pub fn inverse(a: &[Vector]) -> Option<Matrix> {
    let n = a.len();
    let aug: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    let (red, piv) = rref(aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of the null space of the `m x n` matrix `a`.
pub fn kernel(a: &[Vector], ncols: usize) -> Vec<Vector> {
    let (red, piv) = rref(a.to_vec());
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Scalar::zero(); ncols];
            v[f] = Scalar::one();
            for (row, &pc) in red.iter().zip(&piv) {
                v[pc] = -&row[f];
            }
            v
        })
        .collect()
}

/// Some solution of `a x = b`, if the system is consistent.
pub fn solve(a: &[Vector], b: &[Scalar]) -> Option<Vector> {
    let ncols = a.first().map_or(0, |r| r.len());
    let aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let (red, piv) = rref(aug);
    if piv.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); ncols];
    for (row, &pc) in red.iter().zip(&piv) {
        x[pc] = row[ncols].clone();
    }
    Some(x)
}

pub fn determinant(a: &[Vector]) -> Scalar {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Scalar::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return Scalar::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det = &det * &m[col][col];
        let inv = m[col][col].inv().expect("nonzero pivot");
        for i in col + 1..n {
            if m[i][col].is_zero() {
                continue;
            }
            let f = &m[i][col] * &inv;
            for j in col..n {
                let t = &f * &m[col][j];
                m[i][j] -= &t;
            }
        }
    }
    det
}
