//! Dormand–Prince 5(4) with continuous output.

use crate::error::{Error, Result};

// Autonomous systems only, so the nodes c_i never appear.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub max_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: 1e-10,
            abs: 1e-12,
            max_step: 1.0,
        }
    }
}

impl Tolerances {
    pub fn tightened(self, factor: f64) -> Self {
        Tolerances {
            rel: self.rel / factor,
            abs: self.abs / factor,
            max_step: self.max_step,
        }
    }
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct Segment<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    coef: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    /// State at `t ∈ [t0, t1]`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let h = self.t1 - self.t0;
        let th = if h == 0.0 { 0.0 } else { (t - self.t0) / h };
        let th1 = 1.0 - th;
        let c = &self.coef;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])));
        }
        y
    }
}

/// Adaptive explicit integrator; call [`Stepper::step`] repeatedly.
pub struct Stepper<const N: usize, F: Fn(&[f64; N]) -> [f64; N]> {
    f: F,
    tol: Tolerances,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    last_rejected: bool,
    pub accepted: usize,
    pub rejected: usize,
}

impl<const N: usize, F: Fn(&[f64; N]) -> [f64; N]> Stepper<N, F> {
    pub fn new(f: F, t0: f64, y0: [f64; N], tol: Tolerances) -> Result<Self> {
        if !(tol.rel > 0.0 && tol.abs > 0.0 && tol.max_step > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tolerances",
                reason: "must be positive".into(),
            });
        }
        let k1 = f(&y0);
        if k1.iter().any(|v| !v.is_finite()) {
            return Err(Error::StepFailure {
                t: t0,
                reason: "non-finite right-hand side at the start point".into(),
            });
        }
        let mut s = Stepper {
            f,
            tol,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            last_rejected: false,
            accepted: 0,
            rejected: 0,
        };
        s.h = s.initial_step();
        Ok(s)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> [f64; N] {
        self.y
    }

    fn scale(&self, a: f64) -> f64 {
        self.tol.abs + self.tol.rel * a.abs()
    }

    fn initial_step(&self) -> f64 {
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..N {
            let sc = self.scale(self.y[i]);
            d0 += (self.y[i] / sc).powi(2);
            d1 += (self.k1[i] / sc).powi(2);
        }
        let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1: [f64; N] = std::array::from_fn(|i| self.y[i] + h0 * self.k1[i]);
        let k2 = (self.f)(&y1);
        let mut d2 = 0.0;
        for i in 0..N {
            let sc = self.scale(self.y[i]);
            d2 += ((k2[i] - self.k1[i]) / sc).powi(2);
        }
        let d2 = (d2 / N as f64).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.tol.max_step)
    }

    /// Advance by one accepted step, never beyond `t_limit`.
    pub fn step(&mut self, t_limit: f64) -> Result<Segment<N>> {
        let f = &self.f;
        let y = self.y;
        let k1 = self.k1;
        loop {
            let mut h = self.h.min(self.tol.max_step);
            if self.t + h > t_limit {
                h = t_limit - self.t;
            }
            if h <= 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::StepFailure {
                    t: self.t,
                    reason: format!("step size underflow (h = {h:e})"),
                });
            }
            let stage = |coefs: &[(f64, &[f64; N])]| -> [f64; N] {
                std::array::from_fn(|i| y[i] + h * coefs.iter().map(|(a, k)| a * k[i]).sum::<f64>())
            };
            let k2 = f(&stage(&[(A21, &k1)]));
            let k3 = f(&stage(&[(A31, &k1), (A32, &k2)]));
            let k4 = f(&stage(&[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(&stage(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(&stage(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y1 = stage(&[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = f(&y1);

            let mut err = 0.0;
            let mut finite = y1.iter().chain(k7.iter()).all(|v| v.is_finite());
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.scale(y[i].abs().max(y1[i].abs()));
                err += (e / sc).powi(2);
            }
            err = (err / N as f64).sqrt();
            if !err.is_finite() {
                finite = false;
            }

            if !finite {
                self.rejected += 1;
                self.h = h * 0.25;
                self.last_rejected = true;
                continue;
            }

            if err <= 1.0 {
                let mut coef = [[0.0; N]; 5];
                for i in 0..N {
                    let dy = y1[i] - y[i];
                    let bspl = h * k1[i] - dy;
                    coef[0][i] = y[i];
                    coef[1][i] = dy;
                    coef[2][i] = bspl;
                    coef[3][i] = dy - h * k7[i] - bspl;
                    coef[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                let seg = Segment {
                    t0: self.t,
                    t1: self.t + h,
                    y0: y,
                    y1,
                    coef,
                };
                let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
                fac = fac.clamp(0.2, 5.0);
                if self.last_rejected {
                    fac = fac.min(1.0);
                }
                self.t += h;
                self.y = y1;
                self.k1 = k7;
                self.h = h * fac;
                self.last_rejected = false;
                self.accepted += 1;
                return Ok(seg);
            }
            self.rejected += 1;
            self.last_rejected = true;
            self.h = h * (0.9 * err.powf(-0.2)).max(0.2);
        }
    }
}
