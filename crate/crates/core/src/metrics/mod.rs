//! Performance metrics for equity curves and round-trip trades.
//!
//! Degenerate inputs (no trades, zero variance, no losing trades) produce
//! explicit [`MetricValue`] markers instead of silent zeros so a report can
//! tell "no trades" apart from "zero performance".

mod report;
mod trades;

use alloc::vec::Vec;
use core::fmt;

use chrono::NaiveDate;

pub use report::{compute_report, HoldingBasis, MetricsConfig, MetricsReport, ReportInputs};
pub use trades::{match_trades, Fill, RoundTripTrade, Side};

use crate::math::{abs, mean, sample_std, sqrt};
use crate::{Error, Result};

/// A metric that may be undefined or unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricValue {
    Finite(f64),
    PosInfinity,
    Undefined,
}

impl MetricValue {
    pub fn value(self) -> Option<f64> {
        match self {
            MetricValue::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_undefined(self) -> bool {
        self == MetricValue::Undefined
    }
}

impl From<f64> for MetricValue {
    fn from(v: f64) -> Self {
        if v.is_nan() {
            MetricValue::Undefined
        } else if v == f64::INFINITY {
            MetricValue::PosInfinity
        } else {
            MetricValue::Finite(v)
        }
    }
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricValue::Finite(v) => write!(f, "{v}"),
            MetricValue::PosInfinity => f.write_str("inf"),
            MetricValue::Undefined => f.write_str("undefined"),
        }
    }
}

/// Daily portfolio wealth.
#[derive(Debug, Clone, PartialEq)]
pub struct EquityCurve {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl EquityCurve {
    pub fn new(dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("equity curve"));
        }
        if dates.len() != values.len() {
            return Err(Error::ShapeMismatch(alloc::format!(
                "equity curve has {} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid("equity value", alloc::format!("{v} is not positive")));
        }
        for w in dates.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::NonMonotonicDates {
                    previous: w[0],
                    next: w[1],
                });
            }
        }
        Ok(EquityCurve { dates, values })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn initial(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn roi(&self) -> f64 {
        self.last() / self.initial() - 1.0
    }

    /// Day-over-day simple returns of wealth.
    pub fn returns(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] / w[0] - 1.0).collect()
    }
}

/// Compounded return `prod(1 + r_i) - 1`; zero for no periods.
pub fn cumulative_return(period_returns: &[f64]) -> Result<f64> {
    let mut growth = 1.0;
    for (index, &r) in period_returns.iter().enumerate() {
        if !(r > -1.0) {
            return Err(Error::ReturnBelowTotalLoss { index, value: r });
        }
        growth *= 1.0 + r;
    }
    Ok(growth - 1.0)
}

/// `(portfolio_return - risk_free) / stdev_excess`. Undefined unless the
/// deviation is positive.
pub fn sharpe(portfolio_return: f64, risk_free: f64, stdev_excess: f64) -> MetricValue {
    if stdev_excess > 0.0 && stdev_excess.is_finite() {
        MetricValue::from((portfolio_return - risk_free) / stdev_excess)
    } else {
        MetricValue::Undefined
    }
}

/// Annualized Sharpe ratio from daily returns: mean over sample standard
/// deviation of the daily excess returns, times `annualization`.
pub fn sharpe_from_daily(daily: &[f64], rf_daily: f64, annualization: f64) -> Result<MetricValue> {
    if daily.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            available: daily.len(),
        });
    }
    let excess: Vec<f64> = daily.iter().map(|r| r - rf_daily).collect();
    // Rounding in the mean would give constant series a tiny non-zero stdev.
    if excess.iter().all(|x| x.to_bits() == excess[0].to_bits()) {
        return Ok(MetricValue::Undefined);
    }
    let sd = sample_std(&excess);
    Ok(match sharpe(mean(&excess), 0.0, sd) {
        MetricValue::Finite(s) => MetricValue::Finite(s * annualization),
        other => other,
    })
}

/// Default annualization for daily data.
pub fn sqrt_252() -> f64 {
    sqrt(252.0)
}

/// Largest fractional decline from a running peak, in one forward pass.
pub fn max_drawdown(curve: &EquityCurve) -> f64 {
    max_drawdown_of(curve.values())
}

/// [`max_drawdown`] over raw positive values. Zero for an empty slice.
pub fn max_drawdown_of(values: &[f64]) -> f64 {
    let mut peak = f64::NEG_INFINITY;
    let mut worst = 0.0_f64;
    for &v in values {
        if v > peak {
            peak = v;
        }
        let dd = (peak - v) / peak;
        if dd > worst {
            worst = dd;
        }
    }
    worst
}

/// `((final - initial) / initial) / days`.
pub fn average_daily_return(initial: f64, final_value: f64, days: usize) -> Result<f64> {
    if days == 0 {
        return Err(Error::invalid("days", "must be at least 1"));
    }
    if !(initial > 0.0) {
        return Err(Error::invalid("initial value", "must be positive"));
    }
    Ok(((final_value - initial) / initial) / days as f64)
}

/// Average daily trading volume.
pub fn adtv(total_volume: f64, trading_days: usize) -> Result<f64> {
    if trading_days == 0 {
        return Err(Error::invalid("trading_days", "must be at least 1"));
    }
    Ok(total_volume / trading_days as f64)
}

/// Gross profit of winners over gross loss of losers. Zero-profit trades
/// count in neither sum.
pub fn profit_factor(trades: &[RoundTripTrade]) -> MetricValue {
    // fold from +0.0: an empty f64 sum is -0.0
    let wins = trades.iter().map(|t| t.profit).filter(|p| *p > 0.0).fold(0.0, |a, p| a + p);
    let losses = trades.iter().map(|t| t.profit).filter(|p| *p < 0.0).fold(0.0, |a, p| a + p);
    let has_win = trades.iter().any(|t| t.profit > 0.0);
    let has_loss = trades.iter().any(|t| t.profit < 0.0);
    match (has_win, has_loss) {
        (_, true) => MetricValue::Finite(wins / abs(losses)),
        (true, false) => MetricValue::PosInfinity,
        (false, false) => MetricValue::Undefined,
    }
}

/// Percentage of trades with strictly positive profit.
pub fn winning_percentage(trades: &[RoundTripTrade]) -> Result<f64> {
    if trades.is_empty() {
        return Err(Error::Empty("trade list"));
    }
    let wins = trades.iter().filter(|t| t.profit > 0.0).count();
    Ok(100.0 * wins as f64 / trades.len() as f64)
}

/// Mean holding period in days.
pub fn average_holding_period(trades: &[RoundTripTrade]) -> Result<f64> {
    if trades.is_empty() {
        return Err(Error::Empty("trade list"));
    }
    let total: i64 = trades.iter().map(|t| t.holding_days).sum();
    Ok(total as f64 / trades.len() as f64)
}
