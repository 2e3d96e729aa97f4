//! Lowest eigenpairs of symmetric tridiagonal matrices: Sturm-sequence
//! bisection for eigenvalues, inverse iteration for eigenvectors, with
//! re-orthogonalization inside eigenvalue clusters.

/// Lowest `k` eigenpairs of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (len n-1). Eigenvalues ascend; vectors are
/// l2-normalized with a deterministic sign convention.
pub(crate) fn lowest_eigenpairs(
    diag: &[f64],
    off: &[f64],
    k: usize,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = diag.len();
    assert!(n >= 1 && off.len() + 1 == n);
    let k = k.min(n);

    // normalize the matrix scale so bisection tolerances are dimensionless
    let scale = diag
        .iter()
        .chain(off.iter())
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let d: Vec<f64> = diag.iter().map(|v| v / scale).collect();
    let e: Vec<f64> = off.iter().map(|v| v / scale).collect();
    let e2: Vec<f64> = e.iter().map(|v| v * v).collect();

    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let width = (hi - lo).max(f64::MIN_POSITIVE);
    lo -= 1e-12 * width;
    hi += 1e-12 * width;

    let pivmin = 1e-290;
    // number of eigenvalues strictly below lambda
    let negcount = |lambda: f64| -> usize {
        let mut count = 0usize;
        let mut t = d[0] - lambda;
        if t.abs() < pivmin {
            t = -pivmin;
        }
        if t < 0.0 {
            count += 1;
        }
        for i in 1..n {
            t = d[i] - lambda - e2[i - 1] / t;
            if t.abs() < pivmin {
                t = -pivmin;
            }
            if t < 0.0 {
                count += 1;
            }
        }
        count
    };

    let mut values = Vec::with_capacity(k);
    for j in 0..k {
        let (mut a, mut b) = (lo, hi);
        while b - a > 4.0 * f64::EPSILON * a.abs().max(b.abs()) + 1e-300 {
            let mid = 0.5 * (a + b);
            if negcount(mid) > j {
                b = mid;
            } else {
                a = mid;
            }
        }
        values.push(0.5 * (a + b));
    }

    // eigenvectors by inverse iteration on the normalized matrix
    let cluster_tol = 1e-10_f64.max(100.0 * f64::EPSILON);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let lambda = values[j];
        // slight shift inside a cluster so factorizations differ
        let mut shift = lambda;
        if j > 0 && (lambda - values[j - 1]).abs() < cluster_tol {
            shift += (j as f64) * 10.0 * f64::EPSILON * (1.0 + lambda.abs());
        }
        let mut v = seed_vector(n, j);
        normalize(&mut v);
        let mut resid = f64::INFINITY;
        for _sweep in 0..8 {
            v = solve_shifted(&d, &e, shift, &v);
            // orthogonalize within the eigenvalue cluster
            for (jj, prev) in vectors.iter().enumerate() {
                if (values[jj] - lambda).abs() < cluster_tol {
                    let c = dot(&v, prev);
                    for (vi, pi) in v.iter_mut().zip(prev) {
                        *vi -= c * pi;
                    }
                }
            }
            normalize(&mut v);
            resid = residual_norm(&d, &e, lambda, &v);
            if resid <= 1e-12 {
                break;
            }
        }
        debug_assert!(resid <= 1e-8, "inverse iteration residual {resid:e}");
        fix_sign(&mut v);
        vectors.push(v);
    }

    (values.into_iter().map(|v| v * scale).collect(), vectors)
}

/// Residual |T v - lambda v| for the normalized matrix (v unit).
fn residual_norm(d: &[f64], e: &[f64], lambda: f64, v: &[f64]) -> f64 {
    let n = d.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut r = (d[i] - lambda) * v[i];
        if i > 0 {
            r += e[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            r += e[i] * v[i + 1];
        }
        acc += r * r;
    }
    acc.sqrt()
}

/// Solves (T - shift I) x = b with partial-pivoted elimination on the
/// tridiagonal; near-singular shifts are exactly what inverse iteration
/// wants, so tiny pivots are only guarded against exact zero.
fn solve_shifted(d: &[f64], e: &[f64], shift: f64, b: &[f64]) -> Vec<f64> {
    let n = d.len();
    // band storage after pivoting: diag a, first super u1, second super u2
    let mut a: Vec<f64> = d.iter().map(|v| v - shift).collect();
    let mut u1 = e.to_vec();
    u1.push(0.0);
    let mut u2 = vec![0.0; n];
    let mut x = b.to_vec();

    let guard = |v: f64| -> f64 {
        if v == 0.0 {
            1e-300
        } else if v.abs() < 1e-300 {
            1e-300_f64.copysign(v)
        } else {
            v
        }
    };

    for i in 0..n - 1 {
        let sub = e[i]; // element (i+1, i) before elimination
        if sub.abs() > a[i].abs() {
            // swap rows i and i+1:
            //   row i   <- [sub, a[i+1], u1[i+1]]
            //   row i+1 <- [a[i], u1[i], 0]
            let old_ai = a[i];
            let old_u1i = u1[i];
            let old_ai1 = a[i + 1];
            let old_u1i1 = u1[i + 1];
            a[i] = sub;
            u1[i] = old_ai1;
            u2[i] = old_u1i1;
            let m = old_ai / guard(a[i]);
            a[i + 1] = old_u1i - m * old_ai1;
            u1[i + 1] = -m * old_u1i1;
            x.swap(i, i + 1);
            x[i + 1] -= m * x[i];
        } else {
            u2[i] = 0.0;
            let m = sub / guard(a[i]);
            a[i + 1] -= m * u1[i];
            x[i + 1] -= m * x[i];
        }
    }
    // back substitution
    for i in (0..n).rev() {
        let mut acc = x[i];
        if i + 1 < n {
            acc -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            acc -= u2[i] * x[i + 2];
        }
        x[i] = acc / guard(a[i]);
    }
    x
}

fn seed_vector(n: usize, j: usize) -> Vec<f64> {
    let mut state = 0x9E37_79B9u64.wrapping_add(j as u64);
    (0..n)
        .map(|_| {
            state = crate::util::splitmix64(state);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// Deterministic sign: the first component with dominant magnitude is
/// positive.
fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if let Some(&lead) = v.iter().find(|x| x.abs() >= 0.5 * max) {
        if lead < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense reference eigenvalues for the free-particle chain
    /// (diag 2, off -1): lambda_j = 2 - 2 cos(pi (j+1)/(n+1)).
    #[test]
    fn free_chain_eigenvalues() {
        let n = 200;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let (vals, vecs) = lowest_eigenpairs(&diag, &off, 5);
        for (j, &v) in vals.iter().enumerate() {
            let exact =
                2.0 - 2.0 * (std::f64::consts::PI * (j + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-12, "lambda_{j} = {v} vs {exact}");
        }
        // orthonormal vectors
        for a in 0..5 {
            for b in 0..5 {
                let d = dot(&vecs[a], &vecs[b]);
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((d - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn residuals_are_small() {
        let n = 500;
        // random-ish well potential on the diagonal
        let diag: Vec<f64> = (0..n)
            .map(|i| 2.0 + 0.5 * ((i as f64) * 0.1).sin())
            .collect();
        let off = vec![-1.0; n - 1];
        let (vals, vecs) = lowest_eigenpairs(&diag, &off, 8);
        for (j, v) in vecs.iter().enumerate() {
            let mut acc = 0.0;
            for i in 0..n {
                let mut r = (diag[i] - vals[j]) * v[i];
                if i > 0 {
                    r += off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    r += off[i] * v[i + 1];
                }
                acc += r * r;
            }
            assert!(acc.sqrt() < 1e-10, "state {j} residual {:e}", acc.sqrt());
        }
    }

    #[test]
    fn near_degenerate_pair_stays_orthogonal() {
        // two decoupled identical 2x2 blocks give exactly degenerate pairs
        let diag = vec![1.0, 1.0, 1.0, 1.0];
        let off = vec![-0.3, 1e-14, -0.3];
        let (vals, vecs) = lowest_eigenpairs(&diag, &off, 2);
        assert!((vals[0] - vals[1]).abs() < 1e-10);
        assert!(dot(&vecs[0], &vecs[1]).abs() < 1e-8);
    }
}
