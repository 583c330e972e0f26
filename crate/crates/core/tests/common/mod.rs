//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fracpga::analytic::Sim1Params;
use fracpga::{DenseMatrix, DenseVector, ReturnsMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn v(xs: &[f64]) -> DenseVector {
    DenseVector::new(xs.to_vec()).unwrap()
}

/// Euclidean projection onto the simplex by enumerating every support set.
/// On a fixed support `S` the equality-constrained minimizer is
/// `u_S = x_S - (Σx_S - 1)/|S|`; the projection is the closest feasible one.
pub fn simplex_projection_oracle(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n <= 16, "oracle is exponential in n");
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let shift = (support.iter().map(|&i| x[i]).sum::<f64>() - 1.0) / support.len() as f64;
        let mut u = vec![0.0; n];
        let mut feasible = true;
        for &i in &support {
            u[i] = x[i] - shift;
            if u[i] < -1e-14 {
                feasible = false;
                break;
            }
        }
        if !feasible {
            continue;
        }
        for ui in &mut u {
            *ui = ui.max(0.0);
        }
        let dist: f64 = u.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, u));
        }
    }
    best.expect("the simplex is non-empty").1
}

/// Central finite-difference gradient with step `h`.
pub fn finite_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut hi = x.to_vec();
            let mut lo = x.to_vec();
            hi[i] += h;
            lo[i] -= h;
            (f(&hi) - f(&lo)) / (2.0 * h)
        })
        .collect()
}

/// `‖a - b‖ / max(‖b‖, floor)`.
pub fn relative_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let scale = b.iter().map(|y| y * y).sum::<f64>().sqrt().max(floor);
    diff / scale
}

pub fn random_simplex_point<R: Rng>(rng: &mut R, n: usize) -> DenseVector {
    // normalized exponentials are uniform on the simplex
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    DenseVector::new(e.into_iter().map(|x| x / total).collect()).unwrap()
}

/// Noise in [-0.1, 0.1] around a per-asset drift in [-0.01, 0.02].
pub fn random_returns<R: Rng>(rng: &mut R, periods: usize, assets: usize) -> ReturnsMatrix {
    let drift: Vec<f64> = (0..assets).map(|_| rng.gen_range(-0.01..0.02)).collect();
    let rows: Vec<Vec<f64>> = (0..periods)
        .map(|_| drift.iter().map(|d| d + rng.gen_range(-0.1..0.1)).collect())
        .collect();
    ReturnsMatrix::from_rows(&rows).unwrap()
}

/// Valid Sim1 parameters drawn from [-5, 5]².
pub fn random_sim1<R: Rng>(rng: &mut R) -> Sim1Params {
    loop {
        let (p1, p2): (f64, f64) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let separated =
            p1.abs() > 1e-3 && p2.abs() > 1e-3 && (p1 + p2).abs() > 1e-3 && (p1 - p2).abs() > 1e-3;
        if separated {
            if let Ok(p) = Sim1Params::new(p1, p2) {
                return p;
            }
        }
    }
}

/// Sample mean and `T - 1` covariance computed directly from the rows.
pub fn mean_and_covariance(r: &ReturnsMatrix) -> (Vec<f64>, Vec<Vec<f64>>) {
    let (t, n) = (r.periods(), r.assets());
    let mut mean = vec![0.0; n];
    for k in 0..t {
        for (m, x) in mean.iter_mut().zip(r.row(k)) {
            *m += x / t as f64;
        }
    }
    let mut cov = vec![vec![0.0; n]; n];
    for k in 0..t {
        let row = r.row(k);
        for i in 0..n {
            for j in 0..n {
                cov[i][j] += (row[i] - mean[i]) * (row[j] - mean[j]) / (t - 1) as f64;
            }
        }
    }
    (mean, cov)
}

pub fn to_nalgebra(m: &DenseMatrix) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn largest_eigenvalue_oracle(m: &DenseMatrix) -> f64 {
    to_nalgebra(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Random symmetric positive semidefinite `BᵀB` with `B` of shape `k × n`.
pub fn random_psd<R: Rng>(rng: &mut R, n: usize, k: usize) -> DenseMatrix {
    let b: Vec<f64> = (0..k * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = (0..k).map(|r| b[r * n + i] * b[r * n + j]).sum();
        }
    }
    // exact symmetry
    for i in 0..n {
        for j in 0..i {
            data[i * n + j] = data[j * n + i];
        }
    }
    DenseMatrix::new(n, n, data).unwrap()
}

/// Buy-and-hold wealth from equal initial weights: `Σᵢ (1/N) Πₜ (1 + rᵢᵗ)`.
pub fn buy_and_hold_wealth(r: &ReturnsMatrix) -> f64 {
    let n = r.assets();
    (0..n)
        .map(|i| (0..r.periods()).map(|t| 1.0 + r.row(t)[i]).product::<f64>() / n as f64)
        .sum()
}
