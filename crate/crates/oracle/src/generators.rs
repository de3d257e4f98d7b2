//! Random linear fixed-point problems `x -> T x + d`.

use rand::seq::SliceRandom;
use rand::Rng;
use svd_mpe::linalg::SmallMatrix;
use svd_mpe::problems::DenseLinearProblem;
use svd_mpe::DenseVector;

use crate::dense::invert;

#[derive(Debug, Clone)]
pub struct LinearInstance {
    pub problem: DenseLinearProblem,
    pub x0: DenseVector,
    pub solution: Vec<f64>,
    /// Degree of the minimal polynomial of `T` with respect to `x0 - s`.
    pub degree: usize,
}

// Well separated, none equal to 1, some outside the unit disk.
const EIGEN_POOL: [f64; 12] = [-1.4, -0.8, -0.5, -0.2, 0.1, 0.3, 0.55, 0.75, 0.9, 1.25, 1.6, 2.0];

/// Diagonalizable `T = V diag(lambda) V^{-1}` with exactly `degree` distinct
/// eigenvalues and a random `x0`, so the minimal polynomial of `T` with
/// respect to `x0 - s` has degree `degree`.
pub fn random_diagonalizable<R: Rng>(rng: &mut R, n: usize, degree: usize) -> LinearInstance {
    assert!(degree >= 1 && degree <= n && degree <= EIGEN_POOL.len());
    let mut pool = EIGEN_POOL.to_vec();
    pool.shuffle(rng);
    let distinct = &pool[..degree];
    let mut lambda: Vec<f64> = distinct.to_vec();
    while lambda.len() < n {
        lambda.push(distinct[rng.gen_range(0..degree)]);
    }
    lambda.shuffle(rng);

    let (v, vinv) = loop {
        let mut v = SmallMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                v.set(i, j, v.get(i, j) + rng.gen_range(-0.4..0.4));
            }
        }
        if let Ok(vinv) = invert(&v) {
            if vinv.mul(&v).max_abs_diff(&SmallMatrix::identity(n)) < 1e-12 {
                break (v, vinv);
            }
        }
    };
    let mut vl = v.clone();
    for j in 0..n {
        for i in 0..n {
            vl.set(i, j, v.get(i, j) * lambda[j]);
        }
    }
    let t = vl.mul(&vinv);
    instance(rng, t, degree)
}

/// Dense random `T` scaled to Frobenius norm `rho`, so its spectral radius
/// is below `rho`.
pub fn random_linear<R: Rng>(rng: &mut R, n: usize, rho: f64) -> LinearInstance {
    let mut t = SmallMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            t.set(i, j, rng.gen_range(-1.0..1.0));
        }
    }
    let fro = (0..n).map(|i| t.row(i).iter().map(|v| v * v).sum::<f64>()).sum::<f64>().sqrt();
    for i in 0..n {
        for j in 0..n {
            t.set(i, j, t.get(i, j) * rho / fro);
        }
    }
    instance(rng, t, n)
}

fn instance<R: Rng>(rng: &mut R, t: SmallMatrix, degree: usize) -> LinearInstance {
    let n = t.nrows();
    let solution: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let x0 = DenseVector::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).expect("finite");
    let problem = DenseLinearProblem::with_solution(t, solution.clone()).expect("square");
    LinearInstance {
        problem,
        x0,
        solution,
        degree,
    }
}
