//! Lowest eigenpairs of a symmetric tridiagonal matrix by Sturm bisection
//! and inverse iteration.

/// Number of eigenvalues strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (i, &a) in diag.iter().enumerate() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] / d };
        d = a - x - coupling;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, &a) in diag.iter().enumerate() {
        let left = if i == 0 { 0.0 } else { off[i - 1].abs() };
        let right = if i + 1 < diag.len() { off[i].abs() } else { 0.0 };
        lo = lo.min(a - left - right);
        hi = hi.max(a + left + right);
    }
    (lo, hi)
}

/// The `k` smallest eigenvalues, ascending.
pub fn lowest_eigenvalues(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n.max(1));
    let k = k.min(n);
    let (mut glo, mut ghi) = gershgorin(diag, off);
    let scale = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
    glo -= 2.0 * f64::EPSILON * scale;
    ghi += 2.0 * f64::EPSILON * scale;
    let pivmin = f64::MIN_POSITIVE.sqrt() * scale.max(1.0);

    let mut out = Vec::with_capacity(k);
    let mut lower = glo;
    for idx in 0..k {
        let (mut lo, mut hi) = (lower, ghi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
            if sturm_count(diag, off, mid, pivmin) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let value = 0.5 * (lo + hi);
        out.push(value);
        lower = lo;
    }
    out
}

/// Solves `(T − shift) y = rhs` in place with partial pivoting.
fn shifted_solve(diag: &[f64], off: &[f64], shift: f64, rhs: &mut [f64], tiny: f64) {
    let n = diag.len();
    // Rows after pivoting carry up to two super-diagonals.
    let mut d: Vec<f64> = diag.iter().map(|a| a - shift).collect();
    let mut du: Vec<f64> = off.to_vec();
    let mut dl: Vec<f64> = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n.saturating_sub(1)];

    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i].abs() < tiny {
                d[i] = tiny;
            }
            let factor = dl[i] / d[i];
            dl[i] = factor;
            d[i + 1] -= factor * du[i];
        } else {
            let factor = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = factor;
            let tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - factor * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -factor;
            }
            swapped[i] = true;
        }
    }
    if n > 0 && d[n - 1].abs() < tiny {
        d[n - 1] = tiny;
    }

    for i in 0..n.saturating_sub(1) {
        if swapped[i] {
            rhs.swap(i, i + 1);
        }
        rhs[i + 1] -= dl[i] * rhs[i];
    }
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        if i + 1 < n {
            acc -= du[i] * rhs[i + 1];
        }
        if i + 2 < n {
            acc -= du2[i] * rhs[i + 2];
        }
        rhs[i] = acc / d[i];
    }
}

/// Unit eigenvectors for the given eigenvalues (ascending).
pub fn eigenvectors(diag: &[f64], off: &[f64], values: &[f64]) -> Vec<Vec<f64>> {
    let n = diag.len();
    let (glo, ghi) = gershgorin(diag, off);
    let tnorm = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * tnorm;
    let cluster = 1e-3 * tnorm;

    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    for (idx, &lambda) in values.iter().enumerate() {
        // Deterministic, non-degenerate start.
        let mut y: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7 + idx * 3) % 11) as f64).collect();
        for _ in 0..4 {
            shifted_solve(diag, off, lambda, &mut y, tiny);
            for (prev, &pv) in vectors.iter().zip(values) {
                if (pv - lambda).abs() < cluster {
                    let c: f64 = prev.iter().zip(&y).map(|(a, b)| a * b).sum();
                    for (yi, pi) in y.iter_mut().zip(prev) {
                        *yi -= c * pi;
                    }
                }
            }
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            for v in &mut y {
                *v /= norm;
            }
        }
        vectors.push(y);
    }
    vectors
}
