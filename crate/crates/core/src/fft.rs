//! Discrete Fourier transforms of arbitrary length: iterative radix-2 for
//! powers of two, Bluestein's chirp-z convolution otherwise.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `X_n = sum_k x_k exp(-2 pi i n k / N)`
    Forward,
    /// `X_n = sum_k x_k exp(+2 pi i n k / N)` (no 1/N factor)
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

/// Unnormalized DFT in place.
pub fn transform(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(data, direction.sign());
    } else {
        bluestein(data, direction.sign());
    }
}

fn radix2(data: &mut [Complex64], sign: f64) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = sign * 2.0 * PI / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = Complex64::from_polar(1.0, step * k as f64);
                let u = data[start + k];
                let v = data[start + k + half] * w;
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
}

fn bluestein(data: &mut [Complex64], sign: f64) {
    let n = data.len();
    let m = (2 * n - 1).next_power_of_two();
    // chirp c_k = exp(sign i pi k^2 / n), with k^2 reduced mod 2n
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let k2 = ((k as u128 * k as u128) % (2 * n as u128)) as f64;
            Complex64::from_polar(1.0, sign * PI * k2 / n as f64)
        })
        .collect();
    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        a[k] = data[k] * chirp[k];
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        b[k] = chirp[k].conj();
        b[m - k] = chirp[k].conj();
    }
    radix2(&mut a, -1.0);
    radix2(&mut b, -1.0);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    radix2(&mut a, 1.0);
    let scale = 1.0 / m as f64;
    for k in 0..n {
        data[k] = a[k] * scale * chirp[k];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|j| {
                x.iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let e = ((j * k) % n) as f64;
                        v * Complex64::from_polar(1.0, sign * 2.0 * PI * e / n as f64)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_many_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1usize, 2, 3, 5, 8, 12, 64, 100, 109, 218, 256, 512] {
            let x: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            for dir in [Direction::Forward, Direction::Inverse] {
                let mut y = x.clone();
                transform(&mut y, dir);
                let z = naive(&x, dir.sign());
                for (a, b) in y.iter().zip(&z) {
                    assert!((a - b).norm() < 1e-10 * (n as f64).max(1.0), "n={n}");
                }
            }
        }
    }

    #[test]
    fn forward_then_inverse_is_scaled_identity() {
        let x: Vec<Complex64> = (0..218)
            .map(|k| Complex64::new(k as f64, -(k as f64) * 0.5))
            .collect();
        let mut y = x.clone();
        transform(&mut y, Direction::Forward);
        transform(&mut y, Direction::Inverse);
        for (a, b) in y.iter().zip(&x) {
            assert!((a / 218.0 - b).norm() < 1e-9);
        }
    }
}
