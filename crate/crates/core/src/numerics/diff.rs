use crate::error::{Error, Result};

/// Smallest finite-difference step, in the abscissa's unit (1 pm for
/// separations in metres).
pub const FD_STEP_FLOOR: f64 = 1e-12;

/// Central difference `(f(x+h) - f(x-h)) / 2h` with `h = max(scale*|x|, FD_STEP_FLOOR)`.
pub fn central_derivative<F>(mut f: F, x: f64, scale: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let h = (scale * x.abs()).max(FD_STEP_FLOOR);
    let hi = f(x + h)?;
    let lo = f(x - h)?;
    Ok((hi - lo) / (2.0 * h))
}

/// Three-point second difference with an explicit step.
pub fn central_second_derivative<F>(mut f: F, x: f64, h: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fp = f(x + h)?;
    let f0 = f(x)?;
    let fm = f(x - h)?;
    Ok((fp - 2.0 * f0 + fm) / (h * h))
}

/// Ordinary least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::Invalid(format!(
            "loglog_slope: {} abscissae but {} ordinates",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Invalid(
            "loglog_slope needs at least two points".into(),
        ));
    }
    if let Some(&x) = xs.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::domain(
            "loglog_slope",
            "x",
            x,
            "abscissae must be > 0",
        ));
    }
    if let Some(&y) = ys.iter().find(|&&y| !(y > 0.0)) {
        return Err(Error::domain(
            "loglog_slope",
            "y",
            y,
            "ordinates must be > 0",
        ));
    }
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in lx.iter().zip(&ly) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return Err(Error::Invalid(
            "loglog_slope: all abscissae are equal".into(),
        ));
    }
    Ok(sxy / sxx)
}
