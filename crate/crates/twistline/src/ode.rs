//! Embedded Dormand-Prince 5(4) integrator with dense output.
//!
//! This is the classic explicit pair: fifth-order propagation, fourth-order
//! embedded error estimate, FSAL, PI step-size control, and the standard
//! fourth-order continuous extension. The state is a fixed-size array so the
//! envelope systems (Ermakov-Pinney plus phase integrals, Hill pairs) run
//! without allocation in the inner loop.
//!
//! The right-hand side returns `Result`, so a coefficient evaluation that
//! walks into a turning point aborts the integration cleanly instead of
//! propagating NaNs.

use crate::error::{Error, Result};

// Butcher tableau (Dormand & Prince 1980).
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

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

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense-output weights.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    /// Cap on |h|; defaults to the span length.
    pub h_max: Option<f64>,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            rtol: 1e-10,
            atol: 1e-12,
            h_max: None,
            max_steps: 4_000_000,
        }
    }
}

/// One accepted step with its dense-output coefficients.
#[derive(Debug, Clone)]
pub struct StepRecord<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    rcont: [[f64; N]; 5],
}

impl<const N: usize> StepRecord<N> {
    /// Continuous extension; `t` should lie in [t0, t1].
    pub fn eval(&self, t: f64) -> [f64; N] {
        let theta = if self.t1 == self.t0 {
            0.0
        } else {
            (t - self.t0) / (self.t1 - self.t0)
        };
        let th1 = 1.0 - theta;
        let mut out = [0.0; N];
        for i in 0..N {
            let [r1, r2, r3, r4, r5] =
                [self.rcont[0][i], self.rcont[1][i], self.rcont[2][i], self.rcont[3][i], self.rcont[4][i]];
            out[i] = r1 + theta * (r2 + th1 * (r3 + theta * (r4 + th1 * r5)));
        }
        out
    }
}

/// The full solution of one integration: an ordered list of accepted steps.
#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub t0: f64,
    pub t_end: f64,
    pub y_begin: [f64; N],
    pub steps: Vec<StepRecord<N>>,
}

impl<const N: usize> Solution<N> {
    pub fn y_end(&self) -> [f64; N] {
        self.steps.last().map(|s| s.y1).unwrap_or(self.y_begin)
    }

    /// Dense evaluation anywhere inside the integrated span.
    pub fn eval(&self, t: f64) -> [f64; N] {
        if self.steps.is_empty() {
            return self.y_begin;
        }
        let forward = self.t_end >= self.t0;
        // Binary search for the step containing t.
        let pos = self.steps.partition_point(|s| {
            if forward {
                s.t1 < t
            } else {
                s.t1 > t
            }
        });
        let idx = pos.min(self.steps.len() - 1);
        self.steps[idx].eval(t)
    }
}

struct Arith;

impl Arith {
    #[inline]
    fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
        let mut out = *y;
        for i in 0..N {
            let mut acc = 0.0;
            for (c, k) in terms {
                acc += c * k[i];
            }
            out[i] += h * acc;
        }
        out
    }
}

/// Integrate dy/dt = f(t, y) from `t0` to `t_end` (either direction).
pub fn integrate<const N: usize, F>(
    mut f: F,
    t0: f64,
    t_end: f64,
    y0: [f64; N],
    opts: &Options,
) -> Result<Solution<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut sol = Solution {
        t0,
        t_end,
        y_begin: y0,
        steps: Vec::new(),
    };
    let span = t_end - t0;
    if span == 0.0 {
        return Ok(sol);
    }
    let posneg = span.signum();
    let h_max = opts.h_max.unwrap_or(span.abs()).abs();

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    let mut h = initial_step(&mut f, t, &y, &k1, posneg, h_max, opts)?;

    let safe = 0.9;
    let beta = 0.04;
    let expo1 = 0.2 - beta * 0.75;
    let facc1 = 1.0 / 0.2; // max shrink per step
    let facc2 = 1.0 / 10.0; // max growth per step
    let mut facold = 1e-4_f64;
    let mut rejected = false;
    let mut last = false;

    for _ in 0..opts.max_steps {
        if h.abs() > h_max {
            h = h_max * posneg;
        }
        if (t + 1.01 * h - t_end) * posneg > 0.0 {
            h = t_end - t;
            last = true;
        }
        let h_floor = 1e-14 * t.abs().max(1.0);
        if h.abs() < h_floor {
            return Err(Error::StepFailure { z_tilde: t, step: h });
        }

        // Stages.
        let k2 = f(t + C2 * h, &Arith::axpy(&y, h, &[(A21, &k1)]))?;
        let k3 = f(t + C3 * h, &Arith::axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(
            t + C4 * h,
            &Arith::axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        )?;
        let k5 = f(
            t + C5 * h,
            &Arith::axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let ysti = Arith::axpy(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let k6 = f(t + h, &ysti)?;
        let y_new = Arith::axpy(
            &y,
            h,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = f(t + h, &y_new)?;

        // Weighted RMS error of the embedded 4th-order difference.
        let mut err_sq = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / N as f64).sqrt();
        if !err.is_finite() {
            // A trial stage blew up (e.g. the envelope grazed zero); retry
            // with a much smaller step.
            h *= 0.1;
            rejected = true;
            last = false;
            continue;
        }

        let fac11 = err.powf(expo1);
        if err <= 1.0 {
            // Accept; build dense-output coefficients.
            let mut rcont = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                rcont[0][i] = y[i];
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - h * k7[i] - bspl;
                rcont[4][i] = h
                    * (D1 * k1[i]
                        + D3 * k3[i]
                        + D4 * k4[i]
                        + D5 * k5[i]
                        + D6 * k6[i]
                        + D7 * k7[i]);
            }
            sol.steps.push(StepRecord {
                t0: t,
                t1: t + h,
                y0: y,
                y1: y_new,
                rcont,
            });

            t += h;
            y = y_new;
            k1 = k7; // FSAL

            if last {
                return Ok(sol);
            }
            let mut fac = fac11 / facold.powf(beta);
            fac = (fac / safe).clamp(facc2, facc1);
            facold = err.max(1e-4);
            let mut h_new = h / fac;
            if rejected {
                h_new = h_new.abs().min(h.abs()) * posneg;
            }
            rejected = false;
            h = h_new;
        } else {
            // Reject and retry with a smaller step.
            h /= (fac11 / safe).min(facc1);
            rejected = true;
            last = false;
        }
    }
    Err(Error::StepFailure { z_tilde: t, step: h })
}

/// Classic automatic initial step selection (Hairer, Norsett & Wanner).
fn initial_step<const N: usize, F>(
    f: &mut F,
    t0: f64,
    y0: &[f64; N],
    k1: &[f64; N],
    posneg: f64,
    h_max: f64,
    opts: &Options,
) -> Result<f64>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y0[i].abs();
        dnf += (k1[i] / sk) * (k1[i] / sk);
        dny += (y0[i] / sk) * (y0[i] / sk);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(h_max);
    let h_signed = h * posneg;

    // One explicit Euler step to estimate the second derivative.
    let y1 = Arith::axpy(y0, h_signed, &[(1.0, k1)]);
    let k2 = f(t0 + h_signed, &y1)?;
    let mut der2 = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y0[i].abs();
        der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (1e-6_f64).max(h * 1e-3)
    } else {
        (0.01 / der12).powf(0.2)
    };
    Ok((100.0 * h).min(h1).min(h_max) * posneg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(rtol: f64) -> Options {
        Options {
            rtol,
            atol: rtol * 1e-2,
            ..Default::default()
        }
    }

    #[test]
    fn exponential_decay() {
        let sol = integrate(|_, y: &[f64; 1]| Ok([-y[0]]), 0.0, 5.0, [1.0], &opts(1e-10)).unwrap();
        let exact = (-5.0_f64).exp();
        assert!((sol.y_end()[0] - exact).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let sol = integrate(
            |_, y: &[f64; 2]| Ok([y[1], -y[0]]),
            0.0,
            20.0 * std::f64::consts::PI,
            [1.0, 0.0],
            &opts(1e-11),
        )
        .unwrap();
        let y = sol.y_end();
        assert!((y[0] - 1.0).abs() < 1e-8, "y0 = {}", y[0]);
        assert!(y[1].abs() < 1e-8);
    }

    #[test]
    fn dense_output_matches_exact_solution() {
        let sol = integrate(|t, _: &[f64; 1]| Ok([t.cos()]), 0.0, 10.0, [0.0], &opts(1e-11)).unwrap();
        for k in 0..1000 {
            let t = 10.0 * (k as f64) / 999.0;
            let y = sol.eval(t);
            assert!(
                (y[0] - t.sin()).abs() < 1e-9,
                "dense output off at t = {t}: {} vs {}",
                y[0],
                t.sin()
            );
        }
    }

    #[test]
    fn backward_integration() {
        let sol = integrate(|_, y: &[f64; 1]| Ok([-y[0]]), 5.0, 0.0, [(-5.0_f64).exp()], &opts(1e-11)).unwrap();
        assert!((sol.y_end()[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rhs_error_aborts() {
        let res = integrate(
            |t, _: &[f64; 1]| {
                if t > 0.5 {
                    Err(Error::TurningPoint {
                        z_tilde: t,
                        f_mev2: 0.0,
                    })
                } else {
                    Ok([1.0])
                }
            },
            0.0,
            1.0,
            [0.0],
            &opts(1e-8),
        );
        assert!(matches!(res, Err(Error::TurningPoint { .. })));
    }
}
