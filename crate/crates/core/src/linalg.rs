//! Small dense helpers. Everything here works on plain slices; the norm
//! geometry lives in `norm`, these routines are Euclidean only.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Orthonormalise `v` against `basis` (twice, for stability). Returns the
/// normalised residual, or `None` when the residual is below `tol` relative
/// to the input length.
pub(crate) fn orthonormalize_against(basis: &[Vec<f64>], v: &[f64], tol: f64) -> Option<Vec<f64>> {
    let scale = norm2(v);
    if scale == 0.0 {
        return None;
    }
    let mut r = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, &r);
            axpy(-c, b, &mut r);
        }
    }
    let len = norm2(&r);
    if len <= tol * scale {
        return None;
    }
    r.iter_mut().for_each(|x| *x /= len);
    Some(r)
}

/// Gram–Schmidt over `vectors`; fails with the index of the first vector
/// that depends on its predecessors.
pub(crate) fn gram_schmidt(vectors: &[Vec<f64>], tol: f64) -> Result<Vec<Vec<f64>>, usize> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for (i, v) in vectors.iter().enumerate() {
        match orthonormalize_against(&out, v, tol) {
            Some(q) => out.push(q),
            None => return Err(i),
        }
    }
    Ok(out)
}

/// Orthonormal basis of the span of `vectors`, silently dropping dependent
/// members.
pub(crate) fn span_basis(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        if let Some(q) = orthonormalize_against(&out, v, tol) {
            out.push(q);
        }
    }
    out
}

/// Orthonormal basis of the Euclidean orthogonal complement of an
/// orthonormal family in `ℝⁿ`.
pub(crate) fn orth_complement(orthonormal: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut all = orthonormal.to_vec();
    let mut comp = Vec::new();
    for i in 0..n {
        if all.len() == n {
            break;
        }
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        if let Some(q) = orthonormalize_against(&all, &e, 1e-8) {
            all.push(q.clone());
            comp.push(q);
        }
    }
    comp
}

/// Rank by Gaussian elimination with partial pivoting. The pivot tolerance
/// is relative to the largest entry.
pub(crate) fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let ncols = m[0].len();
    let scale = m.iter().map(|r| max_abs(r)).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let (piv, val) = (r..m.len())
            .map(|i| (i, m[i][c].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol * scale {
            continue;
        }
        m.swap(r, piv);
        for i in r + 1..m.len() {
            let f = m[i][c] / m[r][c];
            if f != 0.0 {
                let (top, bottom) = m.split_at_mut(i);
                axpy(-f, &top[r], &mut bottom[0]);
            }
        }
        r += 1;
    }
    r
}

/// Solve the square system `a x = b`; `None` when singular to `tol`.
pub(crate) fn solve(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let scale = a.iter().map(|r| max_abs(r)).fold(0.0, f64::max).max(1e-300);
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[piv][c].abs() <= tol * scale {
            return None;
        }
        m.swap(c, piv);
        for i in 0..n {
            if i != c {
                let f = m[i][c] / m[c][c];
                if f != 0.0 {
                    let pivot_row = m[c].clone();
                    axpy(-f, &pivot_row, &mut m[i]);
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

pub(crate) fn mat_vec(rows: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    rows.iter().map(|r| dot(r, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_of_line_in_r3() {
        let q = gram_schmidt(&[vec![1.0, 0.0, -1.0]], 1e-10).unwrap();
        let c = orth_complement(&q, 3);
        assert_eq!(c.len(), 2);
        for v in &c {
            assert!(dot(v, &q[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn dependent_set_is_reported() {
        let err = gram_schmidt(&[vec![1.0, 2.0], vec![2.0, 4.0]], 1e-10).unwrap_err();
        assert_eq!(err, 1);
    }

    #[test]
    fn rank_and_solve() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 1.0, 1.0]];
        assert_eq!(rank(&rows, 1e-12), 2);
        let x = solve(&[vec![2.0, 1.0], vec![1.0, 3.0]], &[3.0, 5.0], 1e-12).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);
        assert!(solve(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[1.0, 1.0], 1e-12).is_none());
    }
}
