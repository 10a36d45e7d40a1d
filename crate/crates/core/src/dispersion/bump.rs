//! The smooth bump `ω(x) = c₀·exp(−1/(1 − x²))` on `(−1, 1)` and its Fourier transform.
//!
//! `ω̂(ξ) = 2∫₀¹ ω(x) cos(2πξx) dx` is computed with the trapezoid rule. The even
//! extension of `ω` is smooth and vanishes to all orders at `±1`, so the rule converges
//! spectrally; the error estimate compares `N` against `N/2` nodes and adds a rounding
//! allowance. Far frequencies get the analytic bound `|ω̂(ξ)| ≤ ‖ω'''‖₁/(2π|ξ|)³`.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

const GRID_LOG2: u32 = 15;
const GRID: usize = 1 << GRID_LOG2;

/// Frequencies beyond this use the analytic bound only.
pub const XI_QUADRATURE_MAX: f64 = 1000.0;

/// A value with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Approx {
    pub value: f64,
    pub err: f64,
}

#[derive(Debug)]
pub struct Bump {
    c0: f64,
    /// `ω(j/GRID)` for `0 ≤ j ≤ GRID`.
    grid: Vec<f64>,
    third_derivative_l1: f64,
}

fn unnormalized(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// `(g''' + 3g'g'' + g'³)` with `g = −1/(1 − x²)`, so that `ω''' = that·ω`.
fn third_derivative_factor(x: f64) -> f64 {
    let h = 1.0 - x * x;
    let g1 = -2.0 * x / (h * h);
    let g2 = -2.0 / (h * h) - 8.0 * x * x / (h * h * h);
    let g3 = -24.0 * x / (h * h * h) - 48.0 * x * x * x / (h * h * h * h);
    g3 + 3.0 * g1 * g2 + g1 * g1 * g1
}

impl Bump {
    fn build() -> Bump {
        let raw: Vec<f64> = (0..=GRID).map(|j| unnormalized(j as f64 / GRID as f64)).collect();
        // ∫_{−1}^{1} = 2∫_0^1, trapezoid with raw[GRID] = 0
        let half = (raw[0] / 2.0 + raw[1..GRID].iter().sum::<f64>()) / GRID as f64;
        let c0 = 1.0 / (2.0 * half);
        let grid: Vec<f64> = raw.iter().map(|v| v * c0).collect();
        // ‖ω'''‖₁ on a finer grid; |ω'''| has kinks, so pad the trapezoid value
        let fine = 1usize << 18;
        let l1: f64 = (1..fine)
            .map(|j| {
                let x = j as f64 / fine as f64;
                (third_derivative_factor(x) * unnormalized(x)).abs()
            })
            .sum::<f64>()
            * c0
            * 2.0
            / fine as f64;
        Bump {
            c0,
            grid,
            third_derivative_l1: l1 * 1.05 + 1e-6,
        }
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.c0 * unnormalized(x)
    }

    /// `max ω = ω(0) = c₀/e`.
    pub fn peak(&self) -> f64 {
        self.c0 * (-1f64).exp()
    }

    /// Upper bound for `‖ω'''‖₁`.
    pub fn third_derivative_l1(&self) -> f64 {
        self.third_derivative_l1
    }

    /// `|ω̂(ξ)| ≤ ‖ω'''‖₁/(2π|ξ|)³`.
    pub fn decay_bound(&self, xi: f64) -> f64 {
        (self.third_derivative_l1 / (TAU * xi.abs()).powi(3)).min(1.0)
    }

    fn trapezoid(&self, xi: f64, stride: usize) -> (f64, f64) {
        let n = GRID / stride;
        let mut sum = self.grid[0] / 2.0;
        let mut abs = sum;
        for j in 1..n {
            let x = (j * stride) as f64 / GRID as f64;
            let v = self.grid[j * stride] * (TAU * xi * x).cos();
            sum += v;
            abs += v.abs();
        }
        (2.0 * sum / n as f64, 2.0 * abs / n as f64)
    }

    /// `ω̂(ξ)`, real because `ω` is even.
    pub fn fourier(&self, xi: f64) -> Approx {
        let xi = xi.abs();
        if xi == 0.0 {
            return Approx {
                value: 1.0,
                err: 4.0 * GRID as f64 * f64::EPSILON,
            };
        }
        if xi > XI_QUADRATURE_MAX {
            return Approx {
                value: 0.0,
                err: self.decay_bound(xi),
            };
        }
        // nodes per unit ≥ 16(ξ + 64): aliasing sits near ω̂(15ξ + 1024)
        let want = (16.0 * (xi + 64.0)).ceil() as usize;
        let n = want.next_power_of_two().clamp(1024, GRID);
        let stride = GRID / n;
        let (fine, abs) = self.trapezoid(xi, stride);
        let (coarse, _) = self.trapezoid(xi, stride * 2);
        let rounding = (n as f64 + 8.0 + 4.0 * PI * xi) * f64::EPSILON * abs.max(self.peak());
        Approx {
            value: fine,
            err: (fine - coarse).abs() + rounding,
        }
    }
}

/// The shared bump.
pub fn bump() -> &'static Bump {
    static BUMP: OnceLock<Bump> = OnceLock::new();
    BUMP.get_or_init(Bump::build)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_matches_high_precision_values() {
        let b = bump();
        assert!((b.c0() - 2.252283621043581).abs() < 1e-12, "{}", b.c0());
        assert!((b.eval(0.0) - 0.8285688398691052).abs() < 1e-12);
        assert_eq!(b.eval(1.0), 0.0);
        assert_eq!(b.eval(-1.5), 0.0);
        assert!((b.fourier(0.0).value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn transform_matches_high_precision_values() {
        let b = bump();
        for (xi, want) in [
            (0.5, 0.406548218726182),
            (1.0, -0.0965273328701918),
            (2.0, 6.54996465064393e-4),
            (5.0, 1.29074924336482e-3),
            (10.0, -8.1894783892261e-5),
            (20.0, 1.88014441047936e-6),
            (50.0, 1.41307281624108e-9),
        ] {
            let f = b.fourier(xi);
            assert!((f.value - want).abs() <= 1e-10, "xi = {xi}: {} vs {want}", f.value);
            assert!((f.value - want).abs() <= f.err + 1e-14, "xi = {xi}: error bound too small");
            assert!(f.err < 1e-10);
        }
        assert!(b.fourier(50.0).value.abs() <= 1e-6);
        assert!(b.fourier(100.0).value.abs() < 1e-12);
    }

    #[test]
    fn transform_is_bounded_and_even() {
        let b = bump();
        for k in 0..400 {
            let xi = k as f64 * 0.37;
            let f = b.fourier(xi);
            assert!(f.value.abs() <= 1.0 + f.err);
            assert_eq!(f, b.fourier(-xi));
            if xi >= 5.0 {
                assert!(f.value.abs() <= b.decay_bound(xi) + f.err, "xi = {xi}");
            }
        }
        assert_eq!(b.fourier(5000.0).value, 0.0);
    }

    #[test]
    fn third_derivative_norm_is_plausible() {
        // ‖ω'''‖₁ ≥ |ω̂(ξ)|(2πξ)³ at any ξ, and is finite
        let b = bump();
        let k = b.third_derivative_l1();
        assert!(k.is_finite());
        for xi in [0.5, 1.0, 2.0] {
            assert!(k >= b.fourier(xi).value.abs() * (TAU * xi).powi(3));
        }
    }
}
