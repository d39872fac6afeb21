use alloc::vec::Vec;

use super::{
    average_daily_return, average_holding_period, cumulative_return, match_trades, max_drawdown, profit_factor,
    sharpe_from_daily, sqrt_252, winning_percentage, EquityCurve, Fill, MetricValue, RoundTripTrade,
};
use crate::{Error, Result};

/// How holding periods are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HoldingBasis {
    #[default]
    CalendarDays,
    /// Positions in the curve's own date list.
    TradingDays,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsConfig {
    /// Daily risk-free rate subtracted before the Sharpe ratio.
    pub risk_free_daily: f64,
    pub annualization: f64,
    pub holding_basis: HoldingBasis,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            risk_free_daily: 0.0,
            annualization: sqrt_252(),
            holding_basis: HoldingBasis::CalendarDays,
        }
    }
}

/// Everything one strategy produced over an evaluation window. `closes` and
/// `volumes` are aligned with the curve's dates.
#[derive(Debug, Clone, Copy)]
pub struct ReportInputs<'a> {
    pub curve: &'a EquityCurve,
    pub fills: &'a [Fill],
    pub closes: &'a [f64],
    pub volumes: &'a [f64],
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub roi: MetricValue,
    pub cumulative_return: MetricValue,
    pub sharpe: MetricValue,
    pub max_drawdown: MetricValue,
    pub avg_daily_return: MetricValue,
    /// Market liquidity from the instrument's volume column.
    pub adtv: MetricValue,
    /// Shares the strategy itself traded per day.
    pub agent_turnover: MetricValue,
    pub profit_factor: MetricValue,
    pub winning_pct: MetricValue,
    pub avg_holding_days: MetricValue,
    pub trade_count: usize,
    pub trades: Vec<RoundTripTrade>,
}

pub fn compute_report(inputs: ReportInputs<'_>, cfg: &MetricsConfig) -> Result<MetricsReport> {
    let curve = inputs.curve;
    let dates = curve.dates();
    let n = curve.len();
    if inputs.closes.len() != n || inputs.volumes.len() != n {
        return Err(Error::InconsistentDates(alloc::format!(
            "curve has {n} days but {} closes and {} volumes",
            inputs.closes.len(),
            inputs.volumes.len()
        )));
    }
    let (first, last) = (dates[0], dates[n - 1]);
    for fill in inputs.fills {
        if fill.date < first || fill.date > last {
            return Err(Error::InconsistentDates(alloc::format!(
                "fill on {} outside curve range {first}..={last}",
                fill.date
            )));
        }
    }

    let mut trades = match_trades(inputs.fills, inputs.closes[n - 1], last)?;
    if cfg.holding_basis == HoldingBasis::TradingDays {
        for t in &mut trades {
            let pos = |d| dates.binary_search(&d).map_err(|_| Error::InconsistentDates(alloc::format!("{d} not a curve date")));
            t.holding_days = pos(t.exit_date)? as i64 - pos(t.entry_date)? as i64;
        }
    }

    let returns = curve.returns();
    let days = n - 1;
    let sharpe = if returns.len() >= 2 {
        sharpe_from_daily(&returns, cfg.risk_free_daily, cfg.annualization)?
    } else {
        MetricValue::Undefined
    };
    let adr = if days >= 1 {
        average_daily_return(curve.initial(), curve.last(), days)?.into()
    } else {
        MetricValue::Undefined
    };
    let traded: u64 = inputs.fills.iter().map(|f| f.shares).sum();
    let total_volume: f64 = inputs.volumes.iter().sum();

    Ok(MetricsReport {
        roi: curve.roi().into(),
        cumulative_return: cumulative_return(&returns)?.into(),
        sharpe,
        max_drawdown: max_drawdown(curve).into(),
        avg_daily_return: adr,
        adtv: (total_volume / n as f64).into(),
        agent_turnover: (traded as f64 / n as f64).into(),
        profit_factor: profit_factor(&trades),
        winning_pct: winning_percentage(&trades).map_or(MetricValue::Undefined, MetricValue::from),
        avg_holding_days: average_holding_period(&trades).map_or(MetricValue::Undefined, MetricValue::from),
        trade_count: trades.len(),
        trades,
    })
}
