use alloc::vec::Vec;

use crate::{Error, Result};

/// Simple moving average. `out[i]` averages `closes[i..i + period]`, so the
/// output is `period - 1` shorter than the input.
pub fn sma(closes: &[f64], period: usize) -> Result<Vec<f64>> {
    if period == 0 {
        return Err(Error::invalid("period", "must be at least 1"));
    }
    if period > closes.len() {
        return Err(Error::InsufficientData {
            needed: period,
            available: closes.len(),
        });
    }
    // Windows are summed directly rather than with a running sum, and the
    // rounded mean is clamped to the window's own extrema.
    Ok(closes
        .windows(period)
        .map(|w| {
            let lo = w.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (w.iter().sum::<f64>() / period as f64).clamp(lo, hi)
        })
        .collect())
}

/// Wilder-smoothed relative strength index.
///
/// The first value uses the plain mean of the first `period` gains and
/// losses and is aligned with `closes[period]`; later values use
/// `avg = (avg * (period - 1) + x) / period`. Output length is
/// `closes.len() - period`. A window with neither gains nor losses reads 50.
pub fn rsi(closes: &[f64], period: usize) -> Result<Vec<f64>> {
    if period == 0 {
        return Err(Error::invalid("period", "must be at least 1"));
    }
    if closes.len() < period + 1 {
        return Err(Error::InsufficientData {
            needed: period + 1,
            available: closes.len(),
        });
    }
    let changes: Vec<f64> = closes.windows(2).map(|w| w[1] - w[0]).collect();
    let p = period as f64;
    let mut avg_gain = changes[..period].iter().map(|c| c.max(0.0)).sum::<f64>() / p;
    let mut avg_loss = changes[..period].iter().map(|c| (-c).max(0.0)).sum::<f64>() / p;

    let mut out = Vec::with_capacity(changes.len() - period + 1);
    out.push(rsi_value(avg_gain, avg_loss));
    for &c in &changes[period..] {
        avg_gain = (avg_gain * (p - 1.0) + c.max(0.0)) / p;
        avg_loss = (avg_loss * (p - 1.0) + (-c).max(0.0)) / p;
        out.push(rsi_value(avg_gain, avg_loss));
    }
    Ok(out)
}

fn rsi_value(avg_gain: f64, avg_loss: f64) -> f64 {
    if avg_loss == 0.0 {
        if avg_gain == 0.0 {
            50.0
        } else {
            100.0
        }
    } else {
        let value = 100.0 - 100.0 / (1.0 + avg_gain / avg_loss);
        value.clamp(0.0, 100.0)
    }
}
