//! Lowest eigenpairs of a real symmetric operator.
//!
//! Small problems are solved densely. Larger ones use Lanczos with full
//! (two-pass) reorthogonalization; the Krylov basis is kept in memory and
//! Ritz values of the tridiagonal projection are found by bisection.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tridiag;
use crate::circuit::SymmetricOperator;
use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x5eed_cafe;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Dimension at or below which a dense solve is used.
    pub dense_threshold: usize,
    /// Largest Krylov basis before giving up.
    pub max_krylov: usize,
    /// Seed of the Lanczos start vector.
    pub seed: u64,
    /// Relative residual target `‖Av − λv‖ / |λ|`.
    pub rel_tol: f64,
    /// Absolute residual target used when `|λ|` is tiny.
    pub abs_tol: f64,
    /// Re-run Lanczos against the converged vectors to catch missed
    /// multiplicities. `None` leaves the choice to the caller.
    pub verify_multiplicity: Option<bool>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            dense_threshold: 1024,
            max_krylov: 1500,
            seed: DEFAULT_SEED,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            verify_multiplicity: None,
        }
    }
}

impl EigenOptions {
    pub fn residual_ok(&self, residual: f64, value: f64) -> bool {
        residual <= self.rel_tol * value.abs() || residual <= self.abs_tol
    }

    fn target(&self, value: f64) -> f64 {
        // Converge well inside the contract so the explicit residual passes.
        0.05 * (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

/// Unit-norm (Euclidean) eigenpairs, ascending.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Classical Gram–Schmidt against every vector in `sets`, repeated once
/// when the first pass removes most of the norm.
fn orthogonalize(w: &mut [f64], sets: &[&[Vec<f64>]]) {
    for _ in 0..2 {
        let before = norm(w);
        for set in sets {
            let coeffs: Vec<f64> = set.iter().map(|v| dot(v, w)).collect();
            for (c, v) in coeffs.iter().zip(set.iter()) {
                axpy(-c, v, w);
            }
        }
        if norm(w) > FRAC_1_SQRT_2 * before {
            break;
        }
    }
}

/// Residual norms of `(λ, v)` pairs with `av = A v` precomputed.
fn residuals(values: &[f64], vectors: &[Vec<f64>], images: &[Vec<f64>]) -> Vec<f64> {
    values
        .iter()
        .zip(vectors.iter().zip(images))
        .map(|(&lambda, (v, av))| {
            av.iter()
                .zip(v)
                .map(|(a, x)| (a - lambda * x).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// Rayleigh–Ritz on an orthonormal set: returns ascending values, rotated
/// vectors and their images under `A`.
fn rayleigh_ritz<A: SymmetricOperator + ?Sized>(
    op: &A,
    basis: &[Vec<f64>],
) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let r = basis.len();
    let n = op.dim();
    let images: Vec<Vec<f64>> = basis
        .iter()
        .map(|v| {
            let mut av = vec![0.0; n];
            op.apply(v, &mut av);
            av
        })
        .collect();
    let mut g = DMatrix::<f64>::zeros(r, r);
    for i in 0..r {
        for j in i..r {
            let s = 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]));
            g[(i, j)] = s;
            g[(j, i)] = s;
        }
    }
    let eig = SymmetricEigen::new(g);
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut values = Vec::with_capacity(r);
    let mut vectors = Vec::with_capacity(r);
    let mut rotated = Vec::with_capacity(r);
    for &c in &order {
        values.push(eig.eigenvalues[c]);
        let mut v = vec![0.0; n];
        let mut av = vec![0.0; n];
        for i in 0..r {
            let coef = eig.eigenvectors[(i, c)];
            axpy(coef, &basis[i], &mut v);
            axpy(coef, &images[i], &mut av);
        }
        vectors.push(v);
        rotated.push(av);
    }
    (values, vectors, rotated)
}

/// Dense solve by materializing the operator column by column.
pub fn dense_lowest<A: SymmetricOperator + ?Sized>(op: &A, k: usize) -> Eigenpairs {
    let n = op.dim();
    let mut mat = DMatrix::<f64>::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        e[j] = 0.0;
        for i in 0..n {
            mat[(i, j)] = col[i];
        }
    }
    let mat = 0.5 * (&mat + mat.transpose());
    // Householder reduction, then bisection and inverse iteration on the
    // tridiagonal form for the wanted end of the spectrum only.
    let (q, diag, off) = nalgebra::linalg::SymmetricTridiagonal::new(mat).unpack();
    let diag: Vec<f64> = diag.iter().copied().collect();
    let off: Vec<f64> = off.iter().copied().collect();
    let theta = tridiag::lowest_eigenvalues(&diag, &off, k);
    let basis: Vec<Vec<f64>> = tridiag::eigenvectors(&diag, &off, &theta)
        .iter()
        .map(|s| (&q * nalgebra::DVector::from_column_slice(s)).iter().copied().collect())
        .collect();
    // A final Rayleigh–Ritz pass yields residuals against the operator itself.
    let (values, vectors, images) = rayleigh_ritz(op, &basis);
    let residuals = residuals(&values, &vectors, &images);
    Eigenpairs {
        values,
        vectors,
        residuals,
        iterations: 0,
    }
}

/// Lanczos on `P A P` where `P` projects out `deflate`.
fn lanczos<A: SymmetricOperator + ?Sized>(
    op: &A,
    k: usize,
    opts: &EigenOptions,
    deflate: &[Vec<f64>],
    seed: u64,
) -> Result<Eigenpairs> {
    let n = op.dim();
    let room = n - deflate.len();
    let k = k.min(room);
    let max_m = opts.max_krylov.min(room).max(k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_unit = |basis: &[Vec<f64>], rng: &mut ChaCha8Rng| -> Option<Vec<f64>> {
        for _ in 0..4 {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            orthogonalize(&mut v, &[deflate, basis]);
            let nv = norm(&v);
            if nv > 1e-8 {
                v.iter_mut().for_each(|x| *x /= nv);
                return Some(v);
            }
        }
        None
    };

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_m.min(256));
    basis.push(random_unit(&basis, &mut rng).expect("fresh start vector"));
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut tnorm = 0.0f64;
    let mut worst = f64::INFINITY;
    let mut next_check = (2 * k).max(20);

    loop {
        let j = basis.len() - 1;
        op.apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        axpy(-a, &basis[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut w);
        }
        orthogonalize(&mut w, &[deflate, &basis]);
        let b = norm(&w);
        tnorm = tnorm.max(a.abs() + 2.0 * b);
        let m = basis.len();
        let exhausted = m >= max_m;
        let breakdown = b <= 1e-12 * tnorm.max(1.0);

        if m >= k && (m >= next_check || exhausted || breakdown) {
            next_check = m + 10.max(m / 20);
            let theta = tridiag::lowest_eigenvalues(&alpha, &beta, k);
            let s = tridiag::eigenvectors(&alpha, &beta, &theta);
            let estimates: Vec<f64> = s.iter().map(|si| (b * si[m - 1]).abs()).collect();
            let converged = theta.iter().zip(&estimates).all(|(&t, &e)| e <= opts.target(t));
            if converged || exhausted || (breakdown && m == room) {
                let ritz: Vec<Vec<f64>> = s
                    .iter()
                    .map(|si| {
                        let mut y = vec![0.0; n];
                        for (c, v) in si.iter().zip(&basis) {
                            axpy(*c, v, &mut y);
                        }
                        y
                    })
                    .collect();
                let mut ritz = ritz;
                // Clean up orthogonality before the projected solve.
                for i in 0..ritz.len() {
                    let (done, rest) = ritz.split_at_mut(i);
                    let y = &mut rest[0];
                    orthogonalize(y, &[deflate, done]);
                    let ny = norm(y);
                    y.iter_mut().for_each(|x| *x /= ny);
                }
                let (values, vectors, images) = rayleigh_ritz(&ProjectedOp { op, deflate }, &ritz);
                let res = residuals(&values, &vectors, &images);
                worst = res
                    .iter()
                    .zip(&values)
                    .map(|(r, v)| r / v.abs().max(opts.abs_tol / opts.rel_tol))
                    .fold(0.0, f64::max);
                let ok = res.iter().zip(&values).all(|(&r, &v)| opts.residual_ok(r, v));
                if ok {
                    return Ok(Eigenpairs {
                        values,
                        vectors,
                        residuals: res,
                        iterations: m,
                    });
                }
                if exhausted || (breakdown && m == room) {
                    return Err(Error::NonConvergence {
                        iterations: m,
                        worst_residual: worst,
                    });
                }
            }
        }
        if exhausted {
            return Err(Error::NonConvergence {
                iterations: m,
                worst_residual: worst,
            });
        }
        if breakdown {
            // Invariant subspace: continue from a fresh orthogonal direction.
            match random_unit(&basis, &mut rng) {
                Some(v) => {
                    beta.push(0.0);
                    basis.push(v);
                }
                None => {
                    return Err(Error::NonConvergence {
                        iterations: m,
                        worst_residual: worst,
                    })
                }
            }
        } else {
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
    }
}

struct ProjectedOp<'a, A: ?Sized> {
    op: &'a A,
    deflate: &'a [Vec<f64>],
}

impl<A: SymmetricOperator + ?Sized> SymmetricOperator for ProjectedOp<'_, A> {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.op.apply(x, y);
        if !self.deflate.is_empty() {
            orthogonalize(y, &[self.deflate]);
        }
    }
}

/// `k` lowest eigenpairs of `op`.
pub fn solve_lowest<A: SymmetricOperator + ?Sized>(
    op: &A,
    k: usize,
    opts: &EigenOptions,
    expects_degeneracy: bool,
) -> Result<Eigenpairs> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(crate::error::invalid("k", format!("need 1 <= k <= {n}, got {k}")));
    }
    if n <= opts.dense_threshold {
        let pairs = dense_lowest(op, k);
        let bad = pairs
            .residuals
            .iter()
            .zip(&pairs.values)
            .any(|(&r, &v)| !opts.residual_ok(r, v));
        if bad {
            let worst = pairs.residuals.iter().copied().fold(0.0, f64::max);
            return Err(Error::NonConvergence {
                iterations: 0,
                worst_residual: worst,
            });
        }
        return Ok(pairs);
    }

    let mut best = lanczos(op, k, opts, &[], opts.seed)?;
    if !opts.verify_multiplicity.unwrap_or(expects_degeneracy) {
        return Ok(best);
    }

    // Search the orthogonal complement of everything found so far for
    // eigenvalues a single Krylov sequence can miss.
    let mut found: Vec<Vec<f64>> = best.vectors.clone();
    for pass in 1..=4u64 {
        let room = n - found.len();
        if room == 0 {
            break;
        }
        let extra = lanczos(op, k.min(room), opts, &found, opts.seed.wrapping_add(pass))?;
        let ceiling = *best.values.last().unwrap();
        let slack = opts.target(ceiling) * 20.0;
        if extra.values[0] >= ceiling - slack {
            break;
        }
        found.extend(extra.vectors);
        let (values, vectors, images) = rayleigh_ritz(op, &found);
        let res = residuals(&values, &vectors, &images);
        best = Eigenpairs {
            values: values[..k].to_vec(),
            vectors: vectors[..k].to_vec(),
            residuals: res[..k].to_vec(),
            iterations: best.iterations + extra.iterations,
        };
        found = vectors;
    }
    Ok(best)
}
