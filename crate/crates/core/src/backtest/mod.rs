//! Moving-window portfolio backtests.
//!
//! For each period `t` a strategy picks weights using only rows before `t`;
//! the realized portfolio return is `Σ wᵢ(1 + rᵢ⁽ᵗ⁾) - 1`. Window-based
//! strategies hold equal weights until `window` periods of history exist, so
//! the first optimized portfolio is applied at period `window + 1` (1-based)
//! using rows `1..=window`.

mod data;
mod metrics;

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::sharpe::{
    srm_pga, PortfolioWeights, ReturnsMatrix, SharpeModel, SrmOptions, DEFAULT_EPS_HAT,
};

pub use data::{load_returns_csv, parse_returns_csv, ReturnsUnit};
pub use metrics::{compute_sharpe, compute_wealth};

pub const DEFAULT_WINDOW: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Re-optimize the regularized Sharpe ratio on the trailing window.
    SrmPga,
    /// Rebalance to equal weights every period.
    OneOverN,
    /// Start at equal weights and never rebalance (buy and hold).
    Market,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::SrmPga => "srm-pga",
            Strategy::OneOverN => "one-over-n",
            Strategy::Market => "market",
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "srm-pga" | "srm" => Ok(Strategy::SrmPga),
            "one-over-n" | "1/n" | "equal" => Ok(Strategy::OneOverN),
            "market" => Ok(Strategy::Market),
            other => Err(Error::InvalidParameter(format!(
                "unknown strategy '{other}' (expected srm-pga, one-over-n or market)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestConfig {
    pub window: usize,
    pub strategy: Strategy,
    pub eps_hat: f64,
    /// Unit the input file was read in; echoed in reports.
    pub returns_unit: ReturnsUnit,
}

impl BacktestConfig {
    pub fn new(strategy: Strategy) -> Self {
        Self {
            window: DEFAULT_WINDOW,
            strategy,
            eps_hat: DEFAULT_EPS_HAT,
            returns_unit: ReturnsUnit::Decimal,
        }
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }

    pub fn with_eps_hat(mut self, eps_hat: f64) -> Self {
        self.eps_hat = eps_hat;
        self
    }

    pub fn with_unit(mut self, unit: ReturnsUnit) -> Self {
        self.returns_unit = unit;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidParameter(format!(
                "window must be at least 2, got {}",
                self.window
            )));
        }
        if !(self.eps_hat > 0.0 && self.eps_hat.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "eps_hat must be positive, got {}",
                self.eps_hat
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestReport {
    pub config: BacktestConfig,
    pub asset_labels: Vec<String>,
    pub period_labels: Option<Vec<String>>,
    pub realized_returns: Vec<f64>,
    /// `None` when the realized series has zero sample variance.
    pub sharpe: Option<f64>,
    pub final_wealth: f64,
    pub wealth_path: Vec<f64>,
    pub weights_history: Vec<PortfolioWeights>,
}

/// The JSON summary written next to the per-period CSV.
#[derive(Debug, Clone, Serialize)]
pub struct ReportSummary<'a> {
    pub strategy: &'static str,
    pub window: usize,
    pub eps: f64,
    pub returns_unit: ReturnsUnit,
    pub sharpe: Option<f64>,
    pub final_wealth: f64,
    pub periods: usize,
    pub assets: &'a [String],
}

impl BacktestReport {
    pub fn periods(&self) -> usize {
        self.realized_returns.len()
    }

    pub fn summary(&self) -> ReportSummary<'_> {
        ReportSummary {
            strategy: self.config.strategy.name(),
            window: self.config.window,
            eps: self.config.eps_hat,
            returns_unit: self.config.returns_unit,
            sharpe: self.sharpe,
            final_wealth: self.final_wealth,
            periods: self.periods(),
            assets: &self.asset_labels,
        }
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.summary())?;
        out.flush()?;
        Ok(())
    }

    /// Columns: `period, label, return, wealth, w_<asset>…`. Numbers are
    /// written with full round-trip precision.
    pub fn write_periods_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            "period".to_string(),
            "label".into(),
            "return".into(),
            "wealth".into(),
        ];
        header.extend(self.asset_labels.iter().map(|a| format!("w_{a}")));
        w.write_record(&header).map_err(csv_io)?;
        for t in 0..self.periods() {
            let mut row = vec![
                (t + 1).to_string(),
                self.period_labels
                    .as_ref()
                    .map_or_else(String::new, |l| l[t].clone()),
                self.realized_returns[t].to_string(),
                self.wealth_path[t].to_string(),
            ];
            row.extend(
                self.weights_history[t]
                    .as_slice()
                    .iter()
                    .map(f64::to_string),
            );
            w.write_record(&row).map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(e.into())
}

/// Drift held weights with price relatives `x = 1 + r` and renormalize.
pub fn market_strategy_step(state: &DenseVector, x: &DenseVector) -> Result<DenseVector> {
    if state.len() != x.len() {
        return Err(Error::Dimension {
            expected: state.len(),
            found: x.len(),
        });
    }
    let grown: Vec<f64> = state.iter().zip(x).map(|(w, x)| w * x).collect();
    let total: f64 = grown.iter().sum();
    if !(total > 0.0) {
        return Err(Error::WealthWipeout { period: 0 });
    }
    DenseVector::new(grown.into_iter().map(|g| g / total).collect())
}

pub fn run_backtest(r: &ReturnsMatrix, cfg: &BacktestConfig) -> Result<BacktestReport> {
    cfg.validate()?;
    let (periods, n) = (r.periods(), r.assets());
    if periods < cfg.window + 1 {
        return Err(Error::InsufficientData(format!(
            "{periods} periods cannot cover a window of {} plus one trading period",
            cfg.window
        )));
    }

    let mut realized = Vec::with_capacity(periods);
    let weights_history = match cfg.strategy {
        Strategy::OneOverN => vec![PortfolioWeights::equal(n); periods],
        Strategy::SrmPga => (0..periods)
            .into_par_iter()
            .map(|t| srm_weights(r, cfg, t).map_err(|e| at_period(t, e)))
            .collect::<Result<Vec<_>>>()?,
        Strategy::Market => {
            let mut history = Vec::with_capacity(periods);
            let mut state = PortfolioWeights::equal(n);
            for t in 0..periods {
                let x = price_relatives(r, t)?;
                let gross = state.as_vector().dot(&x)?;
                if !(gross > 0.0) {
                    return Err(Error::WealthWipeout { period: t });
                }
                let next = market_strategy_step(state.as_vector(), &x)
                    .and_then(PortfolioWeights::new)
                    .map_err(|e| at_period(t, e))?;
                history.push(std::mem::replace(&mut state, next));
            }
            history
        }
    };

    for (t, w) in weights_history.iter().enumerate() {
        let gross = w.as_vector().dot(&price_relatives(r, t)?)?;
        if !(gross > 0.0) {
            return Err(Error::WealthWipeout { period: t });
        }
        realized.push(gross - 1.0);
    }

    let (final_wealth, wealth_path) = compute_wealth(&realized)?;
    let sharpe = match compute_sharpe(&realized) {
        Ok(s) => Some(s),
        Err(Error::DegenerateSeries) => None,
        Err(e) => return Err(e),
    };
    Ok(BacktestReport {
        config: cfg.clone(),
        asset_labels: r.asset_labels().to_vec(),
        period_labels: r.period_labels().map(<[String]>::to_vec),
        realized_returns: realized,
        sharpe,
        final_wealth,
        wealth_path,
        weights_history,
    })
}

fn price_relatives(r: &ReturnsMatrix, t: usize) -> Result<DenseVector> {
    DenseVector::new(r.row(t).iter().map(|v| 1.0 + v).collect())
}

fn srm_weights(r: &ReturnsMatrix, cfg: &BacktestConfig, t: usize) -> Result<PortfolioWeights> {
    if t < cfg.window {
        return Ok(PortfolioWeights::equal(r.assets()));
    }
    let history = r.window(t - cfg.window, cfg.window)?;
    let model = SharpeModel::build(&history, cfg.eps_hat)?;
    Ok(srm_pga(&model, &SrmOptions::default())?.weights)
}

fn at_period(period: usize, e: Error) -> Error {
    Error::AtPeriod {
        period,
        source: Box::new(e),
    }
}
