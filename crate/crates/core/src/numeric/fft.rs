//! Unnormalized length-`n` transforms `X_m = sum_j x_j exp(+2 pi i j m / n)`
//! for arbitrary `n`: `rustfft` in `f64`, a Bluestein chirp transform over a
//! radix-2 core in double-double.

use num_complex::Complex;
use rustfft::FftPlanner;

use super::dd::{Real, DD};

/// `X_m = sum_j x_j exp(2 pi i j m / n)` in `f64`.
pub fn backward_f64(input: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let mut buf = input.to_vec();
    if buf.is_empty() {
        return buf;
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

fn bit_reverse<T>(a: &mut [T]) {
    let n = a.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
}

/// In-place radix-2 transform with `exp(sign 2 pi i / n)`; `n` a power of two.
/// `twiddles[j] = exp(2 pi i j / n)` for `j < n/2`.
fn radix2<T: Real>(a: &mut [Complex<T>], twiddles: &[Complex<T>], inverse_sign: bool) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    bit_reverse(a);
    let mut len = 2;
    while len <= n {
        let step = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = twiddles[k * step];
                let w = if inverse_sign { w } else { w.conj() };
                let u = a[start + k];
                let v = a[start + k + len / 2] * w;
                a[start + k] = u + v;
                a[start + k + len / 2] = u - v;
            }
        }
        len <<= 1;
    }
}

/// `X_m = sum_j x_j exp(2 pi i j m / n)` in double-double, for any `n`.
pub fn backward_dd(input: &[Complex<DD>]) -> Vec<Complex<DD>> {
    let n = input.len();
    if n <= 1 {
        return input.to_vec();
    }
    let two_n = 2 * n as u64;
    // chirp c_j = exp(pi i j^2 / n); j^2 is reduced mod 2n before rounding
    let chirp: Vec<Complex<DD>> = (0..n as u64).map(|j| DD::root_of_unity(((j * j) % two_n) as i64, two_n)).collect();
    let m = (2 * n - 1).next_power_of_two();
    let twiddles: Vec<Complex<DD>> = (0..m / 2).map(|j| DD::root_of_unity(j as i64, m as u64)).collect();
    let zero = Complex::new(DD::ZERO, DD::ZERO);
    let mut a = vec![zero; m];
    for j in 0..n {
        a[j] = input[j] * chirp[j];
    }
    let mut b = vec![zero; m];
    b[0] = chirp[0].conj();
    for j in 1..n {
        b[j] = chirp[j].conj();
        b[m - j] = chirp[j].conj();
    }
    radix2(&mut a, &twiddles, false);
    radix2(&mut b, &twiddles, false);
    for (x, y) in a.iter_mut().zip(&b) {
        *x = *x * *y;
    }
    radix2(&mut a, &twiddles, true);
    let scale = DD::ONE / DD::from_f64(m as f64);
    (0..n).map(|k| a[k] * chirp[k] * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(input: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let n = input.len();
        (0..n)
            .map(|m| {
                input
                    .iter()
                    .enumerate()
                    .map(|(j, x)| {
                        let a = 2.0 * std::f64::consts::PI * ((j * m) % n) as f64 / n as f64;
                        x * Complex::new(a.cos(), a.sin())
                    })
                    .sum()
            })
            .collect()
    }

    fn sample(n: usize) -> Vec<Complex<f64>> {
        (0..n).map(|j| Complex::new((j as f64 * 0.37).sin(), (j as f64 * 1.3).cos())).collect()
    }

    #[test]
    fn f64_matches_naive() {
        for n in [1usize, 2, 6, 12, 24, 97] {
            let x = sample(n);
            for (a, b) in backward_f64(&x).iter().zip(naive(&x)) {
                assert!((a - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn dd_matches_naive_and_f64() {
        for n in [2usize, 3, 8, 24, 100, 124] {
            let x = sample(n);
            let xd: Vec<Complex<DD>> = x.iter().map(|c| Complex::new(DD::from_f64(c.re), DD::from_f64(c.im))).collect();
            let got = backward_dd(&xd);
            for (a, b) in got.iter().zip(naive(&x)) {
                assert!((a.re.to_f64() - b.re).abs() < 1e-9);
                assert!((a.im.to_f64() - b.im).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dd_is_accurate_beyond_f64() {
        // the transform of a delta at j=1 is the roots of unity themselves
        let n = 30usize;
        let zero = Complex::new(DD::ZERO, DD::ZERO);
        let mut x = vec![zero; n];
        x[1] = Complex::new(DD::ONE, DD::ZERO);
        for (m, v) in backward_dd(&x).iter().enumerate() {
            let exact = DD::root_of_unity(m as i64, n as u64);
            let err = (v.re - exact.re).abs() + (v.im - exact.im).abs();
            assert!(err.to_f64() < 1e-28, "m={m} err={err:?}");
        }
    }
}
