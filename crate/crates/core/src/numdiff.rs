//! Central differences with optional one-step Richardson extrapolation.
//!
//! The helpers work on vector-valued functions because every caller
//! differentiates a whole probability table at once.

/// Central difference of a vector-valued function at `x` with step `h`.
///
/// With `richardson` the estimate combines steps `h` and `h/2`,
/// `(4 D(h/2) - D(h)) / 3`, cancelling the leading `O(h^2)` error term.
pub fn central_vec<F>(f: F, x: f64, h: f64, richardson: bool) -> Vec<f64>
where
    F: Fn(f64) -> Vec<f64>,
{
    match try_central_vec(|t| Ok::<_, std::convert::Infallible>(f(t)), x, h, richardson) {
        Ok(v) => v,
        Err(never) => match never {},
    }
}

/// [`central_vec`] for functions that can fail at the probe points.
pub fn try_central_vec<F, E>(f: F, x: f64, h: f64, richardson: bool) -> Result<Vec<f64>, E>
where
    F: Fn(f64) -> Result<Vec<f64>, E>,
{
    let d_h = central_once(&f, x, h)?;
    if !richardson {
        return Ok(d_h);
    }
    let d_half = central_once(&f, x, 0.5 * h)?;
    Ok(d_half
        .iter()
        .zip(&d_h)
        .map(|(a, b)| (4.0 * a - b) / 3.0)
        .collect())
}

/// Scalar convenience wrapper around [`central_vec`].
pub fn central<F>(f: F, x: f64, h: f64, richardson: bool) -> f64
where
    F: Fn(f64) -> f64,
{
    central_vec(|t| vec![f(t)], x, h, richardson)[0]
}

fn central_once<F, E>(f: &F, x: f64, h: f64) -> Result<Vec<f64>, E>
where
    F: Fn(f64) -> Result<Vec<f64>, E>,
{
    let plus = f(x + h)?;
    let minus = f(x - h)?;
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect())
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
