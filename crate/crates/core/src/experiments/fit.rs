//! Curve summaries used by the sweep harness: exponential-decay lifetimes
//! and lineshape widths.

use crate::error::{Error, Result};
use crate::float::{of, Real};

/// What a [`FitRecord`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// y = amplitude · exp(−x / scale); scale is the lifetime in x units.
    ExponentialDecay,
    /// Peak-normalized lineshape; scale is the full width at half maximum.
    LineshapeFwhm,
}

/// Fitted summary of one sweep curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitRecord<T> {
    pub model: FitModel,
    /// Prefactor (ExponentialDecay) or peak value (LineshapeFwhm).
    pub amplitude: T,
    /// Lifetime in x units (ExponentialDecay) or FWHM in x units
    /// (LineshapeFwhm).
    pub scale: T,
    /// L2 norm of the residuals at the returned parameters.
    pub residual_norm: T,
    /// False when the data does not actually decay (scale is then +∞).
    pub converged: bool,
}

/// Least-squares fit of y = A·e^{−x/τ}: log-linear regression followed by
/// one Gauss–Newton refinement step (kept only when it lowers the residual).
/// Non-decaying data is flagged `converged = false` with infinite τ.
pub fn fit_exponential<T: Real>(x: &[T], y: &[T]) -> Result<FitRecord<T>> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 points with matching lengths (got {} and {})",
            x.len(),
            y.len()
        )));
    }
    if y.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) {
        return Err(Error::Fit("every y must be positive and finite".to_string()));
    }
    let n = of::<T>(x.len() as f64);

    // Log-linear stage: ln y = ln A + s·x.
    let sx: T = x.iter().copied().sum::<T>() / n;
    let sl: T = y.iter().map(|v| v.ln()).sum::<T>() / n;
    let mut sxx = T::zero();
    let mut sxl = T::zero();
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - sx;
        sxx += dx * dx;
        sxl += dx * (yi.ln() - sl);
    }
    if !(sxx > T::zero()) {
        return Err(Error::Fit("x values are all identical".to_string()));
    }
    let slope = sxl / sxx;
    let amplitude = (sl - slope * sx).exp();
    if !(slope < T::zero()) {
        // Constant or growing data: no decay lifetime.
        let residual = residual_norm(x, y, amplitude, T::infinity());
        return Ok(FitRecord {
            model: FitModel::ExponentialDecay,
            amplitude,
            scale: T::infinity(),
            residual_norm: residual,
            converged: false,
        });
    }
    let tau = -T::one() / slope;
    let base_res = residual_norm(x, y, amplitude, tau);

    // One Gauss–Newton step on (A, τ).
    let mut jtj = [[T::zero(); 2]; 2];
    let mut jtr = [T::zero(); 2];
    for (&xi, &yi) in x.iter().zip(y) {
        let e = (-xi / tau).exp();
        let r = amplitude * e - yi;
        let ja = e;
        let jt = amplitude * xi / (tau * tau) * e;
        jtj[0][0] += ja * ja;
        jtj[0][1] += ja * jt;
        jtj[1][1] += jt * jt;
        jtr[0] += ja * r;
        jtr[1] += jt * r;
    }
    jtj[1][0] = jtj[0][1];
    let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
    let (mut a_new, mut tau_new) = (amplitude, tau);
    if det.abs() > T::zero() {
        let da = (-jtr[0] * jtj[1][1] + jtr[1] * jtj[0][1]) / det;
        let dt = (-jtr[1] * jtj[0][0] + jtr[0] * jtj[1][0]) / det;
        a_new = amplitude + da;
        tau_new = tau + dt;
    }
    let (amplitude, scale, residual) =
        if tau_new > T::zero() && a_new > T::zero() && tau_new.is_finite() {
            let refined = residual_norm(x, y, a_new, tau_new);
            if refined < base_res {
                (a_new, tau_new, refined)
            } else {
                (amplitude, tau, base_res)
            }
        } else {
            (amplitude, tau, base_res)
        };
    Ok(FitRecord {
        model: FitModel::ExponentialDecay,
        amplitude,
        scale,
        residual_norm: residual,
        converged: true,
    })
}

fn residual_norm<T: Real>(x: &[T], y: &[T], a: T, tau: T) -> T {
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let model = if tau.is_finite() { a * (-xi / tau).exp() } else { a };
            let r = model - yi;
            r * r
        })
        .sum::<T>()
        .sqrt()
}

/// Full width at half maximum of a sampled peak: the separation of the two
/// half-maximum crossings found by linear interpolation on either side of
/// the maximum. `x` must be strictly increasing and the peak interior.
pub fn measure_fwhm<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::Shape(format!(
            "need at least 3 points with matching lengths (got {} and {})",
            x.len(),
            y.len()
        )));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig("x must be strictly increasing".to_string()));
    }
    let mut peak = 0usize;
    for (j, v) in y.iter().enumerate() {
        if *v > y[peak] {
            peak = j;
        }
    }
    if peak == 0 || peak + 1 == y.len() {
        return Err(Error::Shape(format!(
            "peak sits on the boundary (index {peak}); widen the sweep range"
        )));
    }
    let half = y[peak] * of::<T>(0.5);

    let mut left = None;
    for i in (0..peak).rev() {
        if y[i] < half && half <= y[i + 1] {
            let t = (half - y[i]) / (y[i + 1] - y[i]);
            left = Some(x[i] + t * (x[i + 1] - x[i]));
            break;
        }
    }
    let mut right = None;
    for i in peak..y.len() - 1 {
        if y[i] >= half && half > y[i + 1] {
            let t = (y[i] - half) / (y[i] - y[i + 1]);
            right = Some(x[i] + t * (x[i + 1] - x[i]));
            break;
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        (None, _) => Err(Error::Shape("no half-maximum crossing left of the peak".to_string())),
        (_, None) => Err(Error::Shape("no half-maximum crossing right of the peak".to_string())),
    }
}
