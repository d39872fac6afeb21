//! Side-by-side comparison of strategies evaluated on one test window.

use std::fmt::Write as _;

use dqtrade_core::metrics::MetricValue;

use crate::config::DateWindow;
use crate::error::{Error, Result};
use crate::report::{MetricsDocument, MetricsRecord};

pub const COLUMNS: [&str; 10] = [
    "strategy",
    "roi",
    "cumulative_return",
    "sharpe",
    "max_drawdown",
    "adr",
    "adtv",
    "profit_factor",
    "winning_pct",
    "ahp",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Better {
    Higher,
    Lower,
    /// Descriptive only; no winner.
    Neither,
}

const DIRECTION: [Better; 9] = [
    Better::Higher,
    Better::Higher,
    Better::Higher,
    Better::Lower,
    Better::Higher,
    Better::Neither,
    Better::Higher,
    Better::Higher,
    Better::Neither,
];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub strategy: String,
    pub values: [MetricValue; 9],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub test_window: DateWindow,
    pub rows: Vec<Row>,
    /// Per metric column, the index of the winning row (ties go to the
    /// first). `None` for descriptive columns or when nothing is defined.
    pub winners: [Option<usize>; 9],
}

fn row(strategy: String, m: &MetricsRecord) -> Row {
    Row {
        strategy,
        values: [
            m.roi.0,
            m.cumulative_return.0,
            m.sharpe.0,
            m.max_drawdown.0,
            m.avg_daily_return.0,
            m.adtv.0,
            m.profit_factor.0,
            m.winning_pct.0,
            m.avg_holding_days.0,
        ],
    }
}

fn rank(v: MetricValue) -> Option<f64> {
    match v {
        MetricValue::Finite(x) => Some(x),
        MetricValue::PosInfinity => Some(f64::INFINITY),
        MetricValue::Undefined => None,
    }
}

/// One row per strategy in each document, test-window metrics. Rows are
/// labelled `<label>/<strategy>` when more than one document is given.
pub fn compare_strategies(docs: &[(String, MetricsDocument)]) -> Result<Comparison> {
    let (_, first) = docs.first().ok_or_else(|| Error::Mismatch("nothing to compare".into()))?;
    let window = first.test_window;
    let mut rows = Vec::new();
    for (label, doc) in docs {
        if doc.test_window != window {
            return Err(Error::Mismatch(format!(
                "`{label}` was tested on {}..={}, expected {}..={}",
                doc.test_window.start, doc.test_window.end, window.start, window.end
            )));
        }
        for s in &doc.strategies {
            let name = if docs.len() > 1 {
                format!("{label}/{}", s.name)
            } else {
                s.name.clone()
            };
            rows.push(row(name, &s.test));
        }
    }
    let mut winners = [None; 9];
    for (c, dir) in DIRECTION.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (i, r) in rows.iter().enumerate() {
            let Some(v) = rank(r.values[c]) else { continue };
            let better = match (best, dir) {
                (None, _) => *dir != Better::Neither,
                (Some((_, b)), Better::Higher) => v > b,
                (Some((_, b)), Better::Lower) => v < b,
                (Some(_), Better::Neither) => false,
            };
            if better {
                best = Some((i, v));
            }
        }
        winners[c] = best.map(|(i, _)| i);
    }
    Ok(Comparison {
        test_window: window,
        rows,
        winners,
    })
}

fn cell(v: MetricValue) -> String {
    match v {
        MetricValue::Finite(x) => x.to_string(),
        MetricValue::PosInfinity => "inf".into(),
        MetricValue::Undefined => "undefined".into(),
    }
}

impl Comparison {
    /// Header, one row per strategy, then a `best` row naming each winner.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = csv::Writer::from_writer(Vec::new());
        out.write_record(COLUMNS)?;
        for r in &self.rows {
            out.write_record(std::iter::once(r.strategy.clone()).chain(r.values.iter().map(|v| cell(*v))))?;
        }
        let best = self
            .winners
            .iter()
            .map(|w| w.map(|i| self.rows[i].strategy.clone()).unwrap_or_default());
        out.write_record(std::iter::once("best".to_string()).chain(best))?;
        let bytes = out.into_inner().map_err(|e| Error::io("<comparison>", e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Right-aligned text table; winners carry a trailing `*`.
    pub fn to_text(&self) -> String {
        let mut grid = vec![COLUMNS.iter().map(|c| c.to_string()).collect::<Vec<_>>()];
        for (i, r) in self.rows.iter().enumerate() {
            let mut line = vec![r.strategy.clone()];
            for (c, v) in r.values.iter().enumerate() {
                let mark = if self.winners[c] == Some(i) { "*" } else { " " };
                line.push(format!("{}{mark}", fmt_value(*v)));
            }
            grid.push(line);
        }
        let widths: Vec<usize> = (0..COLUMNS.len())
            .map(|c| grid.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut text = format!("test window {}..={}\n", self.test_window.start, self.test_window.end);
        for line in &grid {
            let mut s = String::new();
            for (c, v) in line.iter().enumerate() {
                if c == 0 {
                    let _ = write!(s, "{v:<w$}", w = widths[c]);
                } else {
                    let _ = write!(s, "  {v:>w$}", w = widths[c]);
                }
            }
            text.push_str(s.trim_end());
            text.push('\n');
        }
        text
    }
}

fn fmt_value(v: MetricValue) -> String {
    match v {
        MetricValue::Finite(x) => format!("{x:.6}"),
        other => cell(other),
    }
}
