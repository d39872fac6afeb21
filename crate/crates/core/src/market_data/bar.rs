use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;

use crate::{Error, Result};

/// One trading day of OHLCV data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub adj_close: f64,
    pub volume: f64,
}

/// Which price column feeds return computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PriceField {
    #[default]
    Close,
    AdjClose,
}

impl Bar {
    /// Builds a validated bar.
    pub fn new(
        date: NaiveDate,
        open: f64,
        high: f64,
        low: f64,
        close: f64,
        adj_close: f64,
        volume: f64,
    ) -> Result<Self> {
        let bar = Bar {
            date,
            open,
            high,
            low,
            close,
            adj_close,
            volume,
        };
        bar.validate()?;
        Ok(bar)
    }

    /// A bar whose four prices all equal `price`.
    pub fn flat(date: NaiveDate, price: f64, volume: f64) -> Result<Self> {
        Self::new(date, price, price, price, price, price, volume)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, value) in [
            ("open", self.open),
            ("high", self.high),
            ("low", self.low),
            ("close", self.close),
            ("adj_close", self.adj_close),
        ] {
            // also rejects NaN
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositivePrice {
                    date: self.date,
                    field,
                    value,
                });
            }
        }
        if !(self.volume >= 0.0) || !self.volume.is_finite() {
            return Err(Error::NegativeVolume {
                date: self.date,
                value: self.volume,
            });
        }
        let inconsistent = |detail| Error::InconsistentBar {
            date: self.date,
            detail,
        };
        if self.low > self.high {
            return Err(inconsistent("low above high"));
        }
        if self.open < self.low || self.open > self.high {
            return Err(inconsistent("open outside [low, high]"));
        }
        if self.close < self.low || self.close > self.high {
            return Err(inconsistent("close outside [low, high]"));
        }
        Ok(())
    }

    pub fn price(&self, field: PriceField) -> f64 {
        match field {
            PriceField::Close => self.close,
            PriceField::AdjClose => self.adj_close,
        }
    }
}

/// Date-ordered bars for one symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct BarSeries {
    symbol: String,
    bars: Vec<Bar>,
}

impl BarSeries {
    /// Validates every bar and strict date ordering.
    pub fn new(symbol: impl Into<String>, bars: Vec<Bar>) -> Result<Self> {
        for bar in &bars {
            bar.validate()?;
        }
        for pair in bars.windows(2) {
            if pair[1].date <= pair[0].date {
                return Err(Error::NonMonotonicDates {
                    previous: pair[0].date,
                    next: pair[1].date,
                });
            }
        }
        Ok(BarSeries {
            symbol: symbol.into(),
            bars,
        })
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.bars.iter().map(|b| b.date).collect()
    }

    pub fn closes(&self) -> Vec<f64> {
        self.prices(PriceField::Close)
    }

    pub fn prices(&self, field: PriceField) -> Vec<f64> {
        self.bars.iter().map(|b| b.price(field)).collect()
    }

    pub fn volumes(&self) -> Vec<f64> {
        self.bars.iter().map(|b| b.volume).collect()
    }

    /// Bars dated within `[start, end]` inclusive. Ordering is preserved so
    /// the result is valid by construction.
    pub fn between(&self, start: NaiveDate, end: NaiveDate) -> BarSeries {
        BarSeries {
            symbol: self.symbol.clone(),
            bars: self
                .bars
                .iter()
                .filter(|b| b.date >= start && b.date <= end)
                .copied()
                .collect(),
        }
    }

    /// Bars strictly before `date`.
    pub fn before(&self, date: NaiveDate) -> BarSeries {
        BarSeries {
            symbol: self.symbol.clone(),
            bars: self.bars.iter().filter(|b| b.date < date).copied().collect(),
        }
    }

    /// Concatenates `self` with `later`, which must start after `self` ends.
    pub fn concat(&self, later: &BarSeries) -> Result<BarSeries> {
        let mut bars = self.bars.clone();
        bars.extend_from_slice(&later.bars);
        BarSeries::new(self.symbol.clone(), bars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, day).unwrap()
    }

    #[test]
    fn rejects_decreasing_dates() {
        let bars = vec![Bar::flat(d(2), 10.0, 1.0).unwrap(), Bar::flat(d(1), 10.0, 1.0).unwrap()];
        let err = BarSeries::new("X", bars).unwrap_err();
        assert!(matches!(err, Error::NonMonotonicDates { .. }));
    }

    #[test]
    fn rejects_duplicate_dates() {
        let bars = vec![Bar::flat(d(1), 10.0, 1.0).unwrap(), Bar::flat(d(1), 11.0, 1.0).unwrap()];
        assert!(BarSeries::new("X", bars).is_err());
    }

    #[test]
    fn rejects_negative_close() {
        let err = Bar::new(d(1), 1.0, 1.0, 1.0, -5.0, 1.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::NonPositivePrice { field: "close", .. }));
    }

    #[test]
    fn rejects_close_above_high() {
        assert!(Bar::new(d(1), 10.0, 11.0, 9.0, 12.0, 12.0, 0.0).is_err());
        assert!(Bar::new(d(1), 10.0, 11.0, 9.0, 10.5, 10.5, 0.0).is_ok());
    }

    #[test]
    fn between_is_inclusive() {
        let bars = (1..=5).map(|i| Bar::flat(d(i), 10.0, 1.0).unwrap()).collect();
        let s = BarSeries::new("X", bars).unwrap();
        assert_eq!(s.between(d(2), d(4)).len(), 3);
        assert_eq!(s.before(d(3)).len(), 2);
    }
}
