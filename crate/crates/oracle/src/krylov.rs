use svd_mpe::linalg::{QrFactors, SmallMatrix, SmallSvd};

/// Relative distance of `v` from `span{r0, C r0, ..., C^{k-1} r0}` with
/// `C = I - T`. The basis is built by classical Gram-Schmidt applied twice;
/// directions that vanish to rounding are dropped.
pub fn krylov_remainder(t: &SmallMatrix, r0: &[f64], k: usize, v: &[f64]) -> f64 {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut w = r0.to_vec();
    let scale0 = norm(r0);
    for _ in 0..k {
        let mut cand = w.clone();
        orthogonalize(&mut cand, &basis);
        let nc = norm(&cand);
        if nc > 1e-13 * scale0.max(norm(&w)) {
            basis.push(cand.iter().map(|x| x / nc).collect());
        }
        // next power: C w = w - T w
        let tw = t.mul_vec(&w);
        w = w.iter().zip(&tw).map(|(a, b)| a - b).collect();
    }
    let nv = norm(v);
    if nv == 0.0 {
        return 0.0;
    }
    let mut rem = v.to_vec();
    orthogonalize(&mut rem, &basis);
    norm(&rem) / nv
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let p: f64 = b.iter().zip(w.iter()).map(|(x, y)| x * y).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= p * bi;
            }
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `(g_i, r)` for `i = 0..k-1`, `g_i = Q_k y_i`.
pub fn left_orthogonality(qr: &QrFactors, svd: &SmallSvd, residual: &[f64]) -> Vec<f64> {
    let k = qr.r().size() - 1;
    (0..k)
        .map(|i| {
            let g = qr.q().mul_vec(&svd.y().column(i));
            g.iter().zip(residual).map(|(a, b)| a * b).sum()
        })
        .collect()
}
