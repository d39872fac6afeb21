use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::NaiveDate;

use super::{daily_returns, rsi, sma, BarSeries, Normalizer, PriceField, ReturnSeries, ScaleMode};
use crate::{Error, Result};

/// Agent state at one date: the last `n` normalized returns, oldest first,
/// followed by any indicator features for the same date.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub date: NaiveDate,
    pub values: Vec<f64>,
}

impl Observation {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A named, dated feature column appended to observations.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSeries {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

/// Slides a window of length `n` over `normalized`.
///
/// Each indicator must cover a contiguous run of the return dates. The
/// first observation is the first date with `n` returns and a value from
/// every indicator; the last is the last date every indicator covers.
pub fn build_observations(
    normalized: &ReturnSeries,
    indicators: &[FeatureSeries],
    n: usize,
) -> Result<Vec<Observation>> {
    if n == 0 {
        return Err(Error::invalid("window", "must be at least 1"));
    }
    let len = normalized.len();
    if n > len {
        return Err(Error::InsufficientData {
            needed: n,
            available: len,
        });
    }

    let mut first = n - 1;
    let mut last = len - 1;
    let mut offsets = Vec::with_capacity(indicators.len());
    for ind in indicators {
        let misaligned = || Error::MisalignedIndicator {
            name: ind.name.clone(),
        };
        if ind.dates.len() != ind.values.len() || ind.dates.is_empty() {
            return Err(misaligned());
        }
        let k = normalized
            .dates
            .iter()
            .position(|d| *d == ind.dates[0])
            .ok_or_else(misaligned)?;
        let end = k + ind.dates.len();
        if end > len || normalized.dates[k..end] != ind.dates[..] {
            return Err(misaligned());
        }
        first = first.max(k);
        last = last.min(end - 1);
        offsets.push(k);
    }
    if first > last {
        return Err(Error::InsufficientData {
            needed: first + 1,
            available: last + 1,
        });
    }

    Ok((first..=last)
        .map(|t| {
            let mut values = Vec::with_capacity(n + indicators.len());
            values.extend_from_slice(&normalized.values[t + 1 - n..=t]);
            for (ind, &k) in indicators.iter().zip(&offsets) {
                values.push(ind.values[t - k]);
            }
            Observation {
                date: normalized.dates[t],
                values,
            }
        })
        .collect())
}

/// How bars become observations.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    pub window: usize,
    pub sma_period: Option<usize>,
    pub rsi_period: Option<usize>,
    pub price_field: PriceField,
    pub scale: ScaleMode,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            window: 10,
            sma_period: None,
            rsi_period: None,
            price_field: PriceField::Close,
            scale: ScaleMode::SignedRange,
        }
    }
}

impl FeatureConfig {
    /// Number of values in every observation.
    pub fn observation_len(&self) -> usize {
        self.window + usize::from(self.sma_period.is_some()) + usize::from(self.rsi_period.is_some())
    }

    /// Fits the return normalizer on `bars`, which should be the training
    /// period only.
    pub fn fit_normalizer(&self, bars: &BarSeries) -> Result<Normalizer> {
        let returns = daily_returns(bars, self.price_field)?;
        Normalizer::fit(&returns.values, self.scale)
    }

    /// Indicator columns over `bars`: SMA divided by the same day's close,
    /// RSI divided by 100.
    pub fn indicators(&self, bars: &BarSeries) -> Result<Vec<FeatureSeries>> {
        let closes = bars.closes();
        let dates = bars.dates();
        let mut out = Vec::new();
        if let Some(period) = self.sma_period {
            let values = sma(&closes, period)?;
            let offset = period - 1;
            out.push(FeatureSeries {
                name: "sma".to_string(),
                dates: dates[offset..].to_vec(),
                values: values
                    .iter()
                    .zip(&closes[offset..])
                    .map(|(s, c)| s / c)
                    .collect(),
            });
        }
        if let Some(period) = self.rsi_period {
            let values = rsi(&closes, period)?;
            out.push(FeatureSeries {
                name: "rsi".to_string(),
                dates: dates[period..].to_vec(),
                values: values.iter().map(|v| v / 100.0).collect(),
            });
        }
        Ok(out)
    }
}

/// Aligned observation timeline for one episode: `observations[i]` is the
/// state at `dates[i]`, when the close is `closes[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketWindow {
    pub symbol: String,
    pub dates: Vec<NaiveDate>,
    pub closes: Vec<f64>,
    pub volumes: Vec<f64>,
    pub observations: Vec<Observation>,
}

impl MarketWindow {
    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn observation_len(&self) -> usize {
        self.observations.first().map_or(0, Observation::len)
    }
}

/// Builds the observation timeline for `bars`, keeping only dates on or
/// after `from`. Bars before `from` serve purely as look-back history for
/// the return window and indicator warm-up.
pub fn build_window(
    bars: &BarSeries,
    normalizer: &Normalizer,
    cfg: &FeatureConfig,
    from: Option<NaiveDate>,
) -> Result<MarketWindow> {
    let returns = daily_returns(bars, cfg.price_field)?;
    let normalized = normalizer.apply_series(&returns);
    let indicators = cfg.indicators(bars)?;
    let mut observations = build_observations(&normalized, &indicators, cfg.window)?;
    if let Some(from) = from {
        observations.retain(|o| o.date >= from);
    }

    // Observation dates are a contiguous suffix of the bar dates.
    let b = bars.bars();
    let start = match observations.first() {
        Some(o) => b.iter().position(|bar| bar.date == o.date).unwrap_or(b.len()),
        None => b.len(),
    };
    let aligned = &b[start..start + observations.len()];
    Ok(MarketWindow {
        symbol: bars.symbol().to_string(),
        dates: aligned.iter().map(|bar| bar.date).collect(),
        closes: aligned.iter().map(|bar| bar.close).collect(),
        volumes: aligned.iter().map(|bar| bar.volume).collect(),
        observations,
    })
}
