//! Monotone cubic (Fritsch-Carlson) interpolation on a uniform grid, used
//! for the tabulated kernels. Shape-preserving: no overshoot between nodes,
//! which matters for the oscillatory noise kernel.

/// Cubic Hermite interpolant over uniformly spaced samples with
/// Fritsch-Carlson limited slopes.
#[derive(Debug, Clone)]
pub struct UniformPchip {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    d: Vec<f64>, // node derivatives
}

impl UniformPchip {
    pub fn new(x0: f64, h: f64, y: Vec<f64>) -> Self {
        assert!(y.len() >= 2 && h > 0.0);
        let n = y.len();
        let mut delta = vec![0.0; n - 1];
        for i in 0..n - 1 {
            delta[i] = (y[i + 1] - y[i]) / h;
        }
        let mut d = vec![0.0; n];
        // second-order one-sided endpoint slopes with the usual
        // shape-preserving clamps (first-order d = delta loses a full order
        // in the boundary cells)
        let endpoint = |near: f64, far: f64| -> f64 {
            let e = 1.5 * near - 0.5 * far;
            if e * near <= 0.0 {
                0.0
            } else if near * far <= 0.0 && e.abs() > 3.0 * near.abs() {
                3.0 * near
            } else {
                e
            }
        };
        d[0] = if n == 2 {
            delta[0]
        } else {
            endpoint(delta[0], delta[1])
        };
        d[n - 1] = if n == 2 {
            delta[n - 2]
        } else {
            endpoint(delta[n - 2], delta[n - 3])
        };
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                // harmonic mean of adjacent secants (uniform-grid form)
                d[i] = 2.0 * delta[i - 1] * delta[i] / (delta[i - 1] + delta[i]);
            }
        }
        UniformPchip { x0, h, y, d }
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    /// Evaluate at `x`, clamped to the table range.
    pub fn eval(&self, x: f64) -> f64 {
        let s = ((x - self.x0) / self.h).clamp(0.0, (self.y.len() - 1) as f64);
        let i = (s.floor() as usize).min(self.y.len() - 2);
        let u = s - i as f64;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (d0, d1) = (self.d[i] * self.h, self.d[i + 1] * self.h);
        let u2 = u * u;
        let u3 = u2 * u;
        y0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + d0 * (u3 - 2.0 * u2 + u)
            + y1 * (-2.0 * u3 + 3.0 * u2)
            + d1 * (u3 - u2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reproduces_nodes_and_linear() {
        let y: Vec<f64> = (0..10).map(|i| 3.0 + 0.5 * i as f64).collect();
        let p = UniformPchip::new(1.0, 0.25, y.clone());
        for (i, &yi) in y.iter().enumerate() {
            assert_relative_eq!(p.eval(1.0 + 0.25 * i as f64), yi, max_relative = 1e-14);
        }
        // linear data interpolates linearly
        assert_relative_eq!(p.eval(1.6), 3.0 + 0.5 * 2.4, max_relative = 1e-14);
    }

    #[test]
    fn smooth_function_accuracy() {
        let h = 0.01;
        let y: Vec<f64> = (0..1000).map(|i| (h * i as f64).sin()).collect();
        let p = UniformPchip::new(0.0, h, y);
        for i in 0..500 {
            let x = 0.013 + 0.0173 * i as f64;
            if x < p.x_max() {
                assert_relative_eq!(p.eval(x), x.sin(), max_relative = 1e-4, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn monotone_no_overshoot() {
        // step-like data: interpolant must stay within [0, 1]
        let y = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let p = UniformPchip::new(0.0, 1.0, y);
        for i in 0..=500 {
            let v = p.eval(i as f64 * 0.01);
            assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        }
    }
}
