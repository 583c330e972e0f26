use crate::error::{Error, Result};

/// Mean over sample standard deviation (`n - 1` denominator), with a zero
/// risk-free rate.
pub fn compute_sharpe(returns: &[f64]) -> Result<f64> {
    let n = returns.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "Sharpe ratio needs at least 2 returns, got {n}"
        )));
    }
    let mean = returns.iter().sum::<f64>() / n as f64;
    let var = returns.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Err(Error::DegenerateSeries);
    }
    Ok(mean / var.sqrt())
}

/// Compounded wealth from an initial value of 1. Returns the final value and
/// the path `W_t = Π_{s<=t} (1 + r_s)`.
pub fn compute_wealth(returns: &[f64]) -> Result<(f64, Vec<f64>)> {
    let mut wealth = 1.0;
    let mut path = Vec::with_capacity(returns.len());
    for (period, r) in returns.iter().enumerate() {
        if !(*r > -1.0) {
            return Err(Error::WealthWipeout { period });
        }
        wealth *= 1.0 + r;
        path.push(wealth);
    }
    Ok((wealth, path))
}
