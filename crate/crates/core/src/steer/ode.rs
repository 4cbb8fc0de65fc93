//! Dormand–Prince 5(4) with step-size control and fallible right-hand sides.
//!
//! Steps are clipped so that every requested output time is hit exactly. A
//! right-hand side that reports an error (for instance a singular steering
//! state) makes the step shrink; the error surfaces only once the step falls
//! below the minimum.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Smallest step relative to the integration span.
    pub min_step_fraction: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, max_steps: 500_000, min_step_fraction: 1e-14 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights are the last row of A; E = b5 − b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub type State = [f64; 7];

fn axpy(y: &State, h: f64, k: &[State], w: &[f64]) -> State {
    let mut out = *y;
    for (kj, &wj) in k.iter().zip(w) {
        if wj != 0.0 {
            for i in 0..7 {
                out[i] += h * wj * kj[i];
            }
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns `y` at each of the
/// increasing `outputs` (all `≥ t0`).
pub fn integrate<F>(mut f: F, t0: f64, y0: State, outputs: &[f64], opts: &OdeOptions) -> Result<Vec<State>>
where
    F: FnMut(f64, &State) -> Result<State>,
{
    let Some(&t_last) = outputs.last() else { return Ok(Vec::new()) };
    let span = (t_last - t0).abs().max(f64::MIN_POSITIVE);
    let h_min = opts.min_step_fraction * span;
    let mut t = t0;
    let mut y = y0;
    let mut h = 1e-3 * span;
    let mut k0 = f(t, &y)?;
    let mut out = Vec::with_capacity(outputs.len());
    let mut steps = 0usize;
    let mut last_err: Option<Error> = None;

    for &target in outputs {
        if target < t {
            return Err(Error::InvalidInput(format!("output time {target} precedes current time {t}")));
        }
        while t < target {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Integration { t, reason: format!("exceeded {} steps", opts.max_steps) });
            }
            let clipped = (target - t) <= h * 1.0000001;
            let h_try = if clipped { target - t } else { h };
            match try_step(&mut f, t, &y, &k0, h_try, opts) {
                Ok((y_new, k_new, err)) if err <= 1.0 => {
                    t = if clipped { target } else { t + h_try };
                    y = y_new;
                    k0 = k_new;
                    last_err = None;
                    let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    // A clipped step says nothing about the natural step size.
                    h = if clipped { h.max(h_try * grow) } else { h_try * grow };
                }
                Ok((_, _, err)) => {
                    h = h_try * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                }
                Err(e) => {
                    last_err = Some(e);
                    h = 0.5 * h_try;
                }
            }
            if h < h_min {
                return Err(last_err.unwrap_or(Error::Integration {
                    t,
                    reason: format!("step size underflow (h = {h:.3e})"),
                }));
            }
        }
        out.push(y);
    }
    Ok(out)
}

fn try_step<F>(f: &mut F, t: f64, y: &State, k0: &State, h: f64, opts: &OdeOptions) -> Result<(State, State, f64)>
where
    F: FnMut(f64, &State) -> Result<State>,
{
    let mut k: [State; 7] = [[0.0; 7]; 7];
    k[0] = *k0;
    for s in 1..7 {
        let ys = axpy(y, h, &k[..s], &A[s][..s]);
        k[s] = f(t + C[s] * h, &ys)?;
    }
    let y_new = axpy(y, h, &k[..6], &A[6][..6]);
    let mut err_sq = 0.0;
    for i in 0..7 {
        let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * h;
        let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
        err_sq += (e / scale).powi(2);
    }
    let err = (err_sq / 7.0).sqrt();
    if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration { t, reason: "non-finite state".into() });
    }
    // FSAL: the seventh stage is f at the new point.
    Ok((y_new, k[6], err))
}
