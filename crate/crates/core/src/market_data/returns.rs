use alloc::vec::Vec;

use chrono::NaiveDate;

use super::{BarSeries, PriceField};
use crate::{Error, Result};

/// Simple day-over-day returns, each dated by the later day of its pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

impl ReturnSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `r_t = (p_t - p_{t-1}) / p_{t-1}` over the chosen price column.
pub fn daily_returns(bars: &BarSeries, field: PriceField) -> Result<ReturnSeries> {
    if bars.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            available: bars.len(),
        });
    }
    let b = bars.bars();
    let values = b
        .windows(2)
        .map(|w| {
            let (prev, cur) = (w[0].price(field), w[1].price(field));
            (cur - prev) / prev
        })
        .collect();
    let dates = b[1..].iter().map(|bar| bar.date).collect();
    Ok(ReturnSeries { dates, values })
}

/// Target interval of min-max scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScaleMode {
    /// `[0, 1]`
    UnitRange,
    /// `[-1, 1]`
    #[default]
    SignedRange,
}

impl ScaleMode {
    fn bounds(self) -> (f64, f64) {
        match self {
            ScaleMode::UnitRange => (0.0, 1.0),
            ScaleMode::SignedRange => (-1.0, 1.0),
        }
    }
}

/// Min-max scaler fitted on one sample and reused on later data.
///
/// Values outside the fitted range are clamped to the target interval, so
/// a normalizer fitted on training data never produces out-of-range test
/// features.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizer {
    min: f64,
    max: f64,
    mode: ScaleMode,
}

impl Normalizer {
    pub fn new(min: f64, max: f64, mode: ScaleMode) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::invalid("normalizer bounds", "must be finite"));
        }
        if min >= max {
            return Err(Error::ZeroRange { value: min });
        }
        Ok(Normalizer { min, max, mode })
    }

    pub fn fit(values: &[f64], mode: ScaleMode) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("normalizer fit sample"));
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::new(min, max, mode)
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn mode(&self) -> ScaleMode {
        self.mode
    }

    /// Affine map without clamping.
    pub fn scale_unclamped(&self, x: f64) -> f64 {
        let range = self.max - self.min;
        match self.mode {
            ScaleMode::UnitRange => (x - self.min) / range,
            ScaleMode::SignedRange => 2.0 * (x - self.min) / range - 1.0,
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        let (lo, hi) = self.mode.bounds();
        self.scale_unclamped(x).clamp(lo, hi)
    }

    pub fn apply_series(&self, returns: &ReturnSeries) -> ReturnSeries {
        ReturnSeries {
            dates: returns.dates.clone(),
            values: returns.values.iter().map(|&x| self.apply(x)).collect(),
        }
    }
}
