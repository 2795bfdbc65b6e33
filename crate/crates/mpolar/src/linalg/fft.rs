//! Iterative radix-2 FFT, power-of-two lengths only.

use super::C64;

/// In-place forward DFT: X[k] = sum_j x[j] exp(-2*pi*i*j*k/n).
pub fn fft(x: &mut [C64]) {
    let n = x.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    // bit reversal
    let mut j = 0usize;
    for i in 0..n {
        if i < j {
            x.swap(i, j);
        }
        let mut m = n >> 1;
        while m >= 1 && j & m != 0 {
            j ^= m;
            m >>= 1;
        }
        j |= m;
    }
    let mut len = 2;
    while len <= n {
        let ang = -2.0 * std::f64::consts::PI / len as f64;
        let wlen = C64::from_polar(1.0, ang);
        let mut i = 0;
        while i < n {
            let mut w = C64::ONE;
            for k in 0..len / 2 {
                let u = x[i + k];
                let v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
            i += len;
        }
        len <<= 1;
    }
}

/// 2D forward DFT of a row-major n x n array, rows then columns.
pub fn fft2(x: &mut [C64], n: usize) {
    assert_eq!(x.len(), n * n);
    for r in 0..n {
        fft(&mut x[r * n..(r + 1) * n]);
    }
    let mut col = vec![C64::ZERO; n];
    for c in 0..n {
        for r in 0..n {
            col[r] = x[r * n + c];
        }
        fft(&mut col);
        for r in 0..n {
            x[r * n + c] = col[r];
        }
    }
}

/// Signed frequency index for bin k of an n-point DFT.
#[inline]
pub fn freq_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn matches_direct_dft() {
        let n = 16;
        let sig: Vec<C64> = (0..n)
            .map(|j| c((j as f64 * 0.7).sin(), (j as f64 * 1.3).cos()))
            .collect();
        let mut x = sig.clone();
        fft(&mut x);
        for k in 0..n {
            let mut direct = C64::ZERO;
            for j in 0..n {
                let ang = -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
                direct += sig[j] * C64::from_polar(1.0, ang);
            }
            assert!((x[k] - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn parseval() {
        let n = 256;
        let sig: Vec<C64> = (0..n).map(|j| c((j as f64).sin(), 0.25)).collect();
        let t: f64 = sig.iter().map(|z| z.norm_sqr()).sum();
        let mut x = sig;
        fft(&mut x);
        let f: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        assert!((t - f).abs() < 1e-9 * t);
    }
}
