//! In-place radix-2 complex FFT.
//!
//! Forward transform carries the `1/N` factor:
//! `c_m = (1/N) Σ_j u_j e^{−2πi jm/N}`, inverse `u_j = Σ_m c_m e^{2πi jm/N}`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct Fft {
    n: usize,
    // e^{-2πi j/N}, j < N/2; each entry evaluated directly to avoid recurrence drift
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Fft {
    pub(crate) fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(alloc::format!(
                "N must be a power of two >= 2, got {n}"
            )));
        }
        let twiddles = (0..n / 2)
            .map(|j| {
                let theta = -2.0 * PI * (j as f64) / (n as f64);
                Complex64::new(libm::cos(theta), libm::sin(theta))
            })
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| i.reverse_bits() >> (usize::BITS - bits))
            .collect();
        Ok(Self { n, twiddles, bitrev })
    }

    pub(crate) fn forward(&self, buf: &mut [Complex64]) {
        self.butterflies(buf, false);
        let scale = 1.0 / self.n as f64;
        for z in buf.iter_mut() {
            *z *= scale;
        }
    }

    pub(crate) fn inverse(&self, buf: &mut [Complex64]) {
        self.butterflies(buf, true);
    }

    fn butterflies(&self, buf: &mut [Complex64], inverse: bool) {
        assert_eq!(buf.len(), self.n, "buffer length does not match plan");
        for i in 0..self.n {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= self.n {
            let half = len / 2;
            let stride = self.n / len;
            for start in (0..self.n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}
