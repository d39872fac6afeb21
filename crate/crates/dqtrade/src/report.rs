//! Report files written for every run.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dqtrade_core::metrics::{EquityCurve, MetricValue, MetricsReport, RoundTripTrade};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::config::DateWindow;
use crate::error::{Error, Result};
use crate::experiment::{Model, Report};
use crate::model_io::{write_checkpoint, write_history, write_qtable};

pub const METRICS_FILE: &str = "metrics.json";
pub const HISTORY_FILE: &str = "history.csv";
pub const CONFIG_ECHO_FILE: &str = "config_echo.json";
pub const CHECKPOINT_FILE: &str = "checkpoint.bin";
pub const QTABLE_FILE: &str = "qtable.csv";

/// A metric as stored on disk: a number, `"inf"`, or `"undefined"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric(pub MetricValue);

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            MetricValue::Finite(v) if v.is_finite() => s.serialize_f64(v),
            MetricValue::PosInfinity => s.serialize_str("inf"),
            _ => s.serialize_str("undefined"),
        }
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        Ok(Metric(match Raw::deserialize(d)? {
            Raw::Number(v) => MetricValue::Finite(v),
            Raw::Text(t) if t == "inf" => MetricValue::PosInfinity,
            Raw::Text(t) if t == "undefined" => MetricValue::Undefined,
            Raw::Text(t) => return Err(de::Error::custom(format!("unknown metric marker `{t}`"))),
        }))
    }
}

/// Flat key-value form of a [`MetricsReport`], without the trade list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsRecord {
    pub roi: Metric,
    pub cumulative_return: Metric,
    pub sharpe: Metric,
    pub max_drawdown: Metric,
    pub avg_daily_return: Metric,
    pub adtv: Metric,
    pub agent_turnover: Metric,
    pub profit_factor: Metric,
    pub winning_pct: Metric,
    pub avg_holding_days: Metric,
    pub trade_count: usize,
}

impl From<&MetricsReport> for MetricsRecord {
    fn from(m: &MetricsReport) -> Self {
        MetricsRecord {
            roi: Metric(m.roi),
            cumulative_return: Metric(m.cumulative_return),
            sharpe: Metric(m.sharpe),
            max_drawdown: Metric(m.max_drawdown),
            avg_daily_return: Metric(m.avg_daily_return),
            adtv: Metric(m.adtv),
            agent_turnover: Metric(m.agent_turnover),
            profit_factor: Metric(m.profit_factor),
            winning_pct: Metric(m.winning_pct),
            avg_holding_days: Metric(m.avg_holding_days),
            trade_count: m.trade_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyMetrics {
    pub name: String,
    pub train: MetricsRecord,
    pub test: MetricsRecord,
}

/// Contents of `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsDocument {
    pub symbol: String,
    pub agent: String,
    pub seed: u64,
    pub train_window: DateWindow,
    pub test_window: DateWindow,
    pub strategies: Vec<StrategyMetrics>,
}

impl MetricsDocument {
    pub fn from_report(r: &Report) -> Self {
        MetricsDocument {
            symbol: r.symbol.clone(),
            agent: r.config.agent.name().to_string(),
            seed: r.config.seed,
            train_window: r.train_window,
            test_window: r.test_window,
            strategies: r
                .strategies
                .iter()
                .map(|s| StrategyMetrics {
                    name: s.name.clone(),
                    train: (&s.train.metrics).into(),
                    test: (&s.test.metrics).into(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn write_equity<W: Write>(curve: &EquityCurve, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["date", "value"])?;
    for (d, v) in curve.dates().iter().zip(curve.values()) {
        out.write_record([d.to_string(), v.to_string()])?;
    }
    out.flush().map_err(|e| Error::io("<equity>", e))?;
    Ok(())
}

pub fn write_trades<W: Write>(trades: &[RoundTripTrade], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "entry_date",
        "exit_date",
        "shares",
        "entry_price",
        "exit_price",
        "profit",
        "holding_days",
        "mtm_flag",
    ])?;
    for t in trades {
        out.write_record([
            t.entry_date.to_string(),
            t.exit_date.to_string(),
            t.shares.to_string(),
            t.entry_price.to_string(),
            t.exit_price.to_string(),
            t.profit.to_string(),
            t.holding_days.to_string(),
            u8::from(t.mark_to_market).to_string(),
        ])?;
    }
    out.flush().map_err(|e| Error::io("<trades>", e))?;
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes the model file for a trained agent; returns its path, if any.
pub fn write_model(model: &Model, dir: &Path) -> Result<Option<PathBuf>> {
    let (name, bytes) = match model {
        Model::Dqn(net) => {
            let mut buf = Vec::new();
            write_checkpoint(net, &mut buf).map_err(|e| Error::io(dir.join(CHECKPOINT_FILE), e))?;
            (CHECKPOINT_FILE, buf)
        }
        Model::Tabular(table) => {
            let mut buf = Vec::new();
            write_qtable(table, &mut buf)?;
            (QTABLE_FILE, buf)
        }
        Model::BuyAndHold | Model::SmaCrossover => return Ok(None),
    };
    let path = dir.join(name);
    write_file(&path, &bytes)?;
    Ok(Some(path))
}

pub fn config_echo(report: &Report) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&report.config)?;
    text.push('\n');
    Ok(text)
}

/// Writes `metrics.json`, `equity_<strategy>.csv` and `trades_<strategy>.csv`
/// for the test window, `history.csv`, `config_echo.json` and the model file.
pub fn emit_report(report: &Report, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, &bytes)?;
        written.push(path);
        Ok(())
    };
    put(METRICS_FILE.into(), MetricsDocument::from_report(report).to_json()?.into_bytes())?;
    for s in &report.strategies {
        let mut buf = Vec::new();
        write_equity(&s.test.record.curve, &mut buf)?;
        put(format!("equity_{}.csv", s.name), buf)?;
        let mut buf = Vec::new();
        write_trades(&s.test.metrics.trades, &mut buf)?;
        put(format!("trades_{}.csv", s.name), buf)?;
    }
    let mut buf = Vec::new();
    write_history(&report.history, &mut buf)?;
    put(HISTORY_FILE.into(), buf)?;
    put(CONFIG_ECHO_FILE.into(), config_echo(report)?.into_bytes())?;
    written.extend(write_model(&report.model, dir)?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_markers() {
        let json = serde_json::to_string(&[
            Metric(MetricValue::Finite(0.1)),
            Metric(MetricValue::PosInfinity),
            Metric(MetricValue::Undefined),
        ])
        .unwrap();
        assert_eq!(json, r#"[0.1,"inf","undefined"]"#);
        let back: Vec<Metric> = serde_json::from_str(&json).unwrap();
        assert_eq!(back[1].0, MetricValue::PosInfinity);
        assert!(back[2].0.is_undefined());
        assert!(serde_json::from_str::<Metric>("\"nan\"").is_err());
    }

    #[test]
    fn floats_round_trip_bit_exactly() {
        for v in [0.1 + 0.2, 1e-300, -123456.789e10, f64::MIN_POSITIVE, 2.0f64.sqrt()] {
            let json = serde_json::to_string(&Metric(MetricValue::Finite(v))).unwrap();
            let back: Metric = serde_json::from_str(&json).unwrap();
            assert_eq!(back.0.value().unwrap().to_bits(), v.to_bits());
        }
    }
}
