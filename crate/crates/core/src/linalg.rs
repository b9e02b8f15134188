//! Dense complex linear algebra for the small emitter-cavity Hilbert space.

use ndarray::{Array1, Array2};

use crate::C64;

/// Conjugate transpose.
pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    let mut out = Array2::zeros((m.ncols(), m.nrows()));
    for ((i, j), v) in m.indexed_iter() {
        out[[j, i]] = v.conj();
    }
    out
}

/// Kronecker product.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for ((i, j), &av) in a.indexed_iter() {
        if av == C64::new(0.0, 0.0) {
            continue;
        }
        for ((k, l), &bv) in b.indexed_iter() {
            out[[i * rb + k, j * cb + l]] = av * bv;
        }
    }
    out
}

/// Maximum absolute column sum (induced 1-norm).
pub fn norm_1(m: &Array2<C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        let s: f64 = m.column(j).iter().map(|v| v.norm()).sum();
        best = best.max(s);
    }
    best
}

/// Matrix exponential by scaling and squaring with a Taylor series.
///
/// Exact to machine precision for the superoperator sizes used here
/// (dimension ≤ 64); the scale factor keeps the series argument below 1/4.
pub fn expm(m: &Array2<C64>) -> Array2<C64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "expm requires a square matrix");
    let norm = norm_1(m);
    let s = if norm > 0.25 {
        (norm / 0.25).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scaled = m.mapv(|v| v / (2.0f64.powi(s as i32)));

    let mut result = Array2::eye(n);
    let mut term: Array2<C64> = Array2::eye(n);
    for k in 1..=40 {
        term = term.dot(&scaled).mapv(|v| v / k as f64);
        result = result + &term;
        if norm_1(&term) < 1e-18 * norm_1(&result).max(1.0) {
            break;
        }
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    result
}

/// Eigenvalues of a Hermitian matrix by the cyclic complex Jacobi method,
/// ascending.
pub fn eigvalsh(m: &Array2<C64>) -> Vec<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let mut a = m.clone();
    // symmetrize against roundoff
    let ad = dagger(&a);
    a = (&a + &ad).mapv(|v| v * 0.5);

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[[i, j]].norm_sqr();
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq.norm() < 1e-300 {
                    continue;
                }
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                // unitary 2x2 rotation diagonalizing the (p,q) block
                let phase = apq / apq.norm();
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_c = phase * s;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = akp * c - akq * s_c.conj();
                    a[[k, q]] = akp * s_c + akq * c;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = apk * c - aqk * s_c;
                    a[[q, k]] = apk * s_c.conj() + aqk * c;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[[i, i]].re).collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

/// Matrix-vector product for flattened superoperator application.
pub fn matvec(m: &Array2<C64>, v: &Array1<C64>) -> Array1<C64> {
    m.dot(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    #[test]
    fn expm_diagonal() {
        let m = array![
            [C64::new(-1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(0.5, 0.0)]
        ];
        let e = expm(&m);
        assert_relative_eq!(e[[0, 0]].re, (-1.0f64).exp(), max_relative = 1e-13);
        assert_relative_eq!(e[[1, 1]].re, 0.5f64.exp(), max_relative = 1e-13);
        assert!(e[[0, 1]].norm() < 1e-15);
    }

    #[test]
    fn expm_rotation() {
        // exp(i θ σ_x) = cos θ I + i sin θ σ_x
        let theta = 0.77;
        let m = array![
            [C64::new(0.0, 0.0), C64::new(0.0, theta)],
            [C64::new(0.0, theta), C64::new(0.0, 0.0)]
        ];
        let e = expm(&m);
        assert_relative_eq!(e[[0, 0]].re, theta.cos(), max_relative = 1e-12);
        assert_relative_eq!(e[[0, 1]].im, theta.sin(), max_relative = 1e-12);
    }

    #[test]
    fn expm_large_norm() {
        // heavy damping: exp(-1000) underflows gracefully
        let m = array![
            [C64::new(-1000.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(0.0, 0.0)]
        ];
        let e = expm(&m);
        assert!(e[[0, 0]].norm() < 1e-300);
        assert_relative_eq!(e[[1, 1]].re, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn hermitian_eigenvalues() {
        let m = array![
            [C64::new(2.0, 0.0), C64::new(0.0, 1.0)],
            [C64::new(0.0, -1.0), C64::new(2.0, 0.0)]
        ];
        let vals = eigvalsh(&m);
        assert_relative_eq!(vals[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(vals[1], 3.0, max_relative = 1e-12);
    }

    #[test]
    fn kron_identity() {
        let eye: Array2<C64> = Array2::eye(2);
        let m = array![
            [C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
            [C64::new(3.0, 0.0), C64::new(4.0, 0.0)]
        ];
        let k = kron(&eye, &m);
        assert_eq!(k.dim(), (4, 4));
        assert_eq!(k[[0, 1]], C64::new(2.0, 0.0));
        assert_eq!(k[[2, 3]], C64::new(2.0, 0.0));
        assert_eq!(k[[3, 3]], C64::new(4.0, 0.0));
        assert_eq!(k[[0, 3]], C64::new(0.0, 0.0));
    }
}
