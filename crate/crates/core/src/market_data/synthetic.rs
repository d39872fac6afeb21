//! Seeded synthetic price fixtures.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Bar, BarSeries};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticKind {
    /// `close[t] = base + amplitude * sin(2 pi t / period)`, optionally with
    /// multiplicative log-normal noise of stdev `noise`.
    Sinusoid {
        base: f64,
        amplitude: f64,
        period: f64,
        noise: f64,
    },
    /// `close[t] = base * (1 + drift)^t`, optionally noisy.
    Trend { base: f64, drift: f64, noise: f64 },
    /// Exact geometric Brownian motion with annualized `drift` and
    /// `volatility`, sampled every `dt` years.
    Gbm {
        initial: f64,
        drift: f64,
        volatility: f64,
        dt: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub symbol: String,
    pub kind: SyntheticKind,
    pub length: usize,
    /// First bar date; weekends are skipped.
    pub start: NaiveDate,
    pub volume: f64,
}

/// Generates a bar series with open = high = low = close. Bit-deterministic
/// for a given `spec` and `seed`.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<BarSeries> {
    if spec.length < 2 {
        return Err(Error::invalid("length", "synthetic series needs at least 2 bars"));
    }
    if !(spec.volume >= 0.0) {
        return Err(Error::invalid("volume", "must be non-negative"));
    }
    let closes = closes(spec, seed)?;
    let mut date = business_day_on_or_after(spec.start);
    let mut bars = Vec::with_capacity(closes.len());
    for close in closes {
        bars.push(Bar::flat(date, close, spec.volume)?);
        date = next_business_day(date);
    }
    BarSeries::new(spec.symbol.clone(), bars)
}

fn closes(spec: &SyntheticSpec, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.length;
    let out = match spec.kind {
        SyntheticKind::Sinusoid {
            base,
            amplitude,
            period,
            noise,
        } => {
            positive("base", base)?;
            positive("amplitude", amplitude)?;
            positive("period", period)?;
            non_negative("noise", noise)?;
            if amplitude >= base {
                return Err(Error::invalid("amplitude", "must be below base so prices stay positive"));
            }
            (0..n)
                .map(|t| {
                    let clean = base + amplitude * libm::sin(2.0 * PI * t as f64 / period);
                    clean * noise_factor(&mut rng, noise)
                })
                .collect()
        }
        SyntheticKind::Trend { base, drift, noise } => {
            positive("base", base)?;
            non_negative("noise", noise)?;
            if !(drift > -1.0) || !drift.is_finite() {
                return Err(Error::invalid("drift", "must be finite and above -1"));
            }
            (0..n)
                .map(|t| base * libm::pow(1.0 + drift, t as f64) * noise_factor(&mut rng, noise))
                .collect()
        }
        SyntheticKind::Gbm {
            initial,
            drift,
            volatility,
            dt,
        } => {
            positive("initial", initial)?;
            positive("dt", dt)?;
            non_negative("volatility", volatility)?;
            if !drift.is_finite() {
                return Err(Error::invalid("drift", "must be finite"));
            }
            let step_drift = (drift - 0.5 * volatility * volatility) * dt;
            let step_vol = volatility * libm::sqrt(dt);
            let mut price = initial;
            let mut out = Vec::with_capacity(n);
            out.push(price);
            for _ in 1..n {
                let z = standard_normal(&mut rng);
                price *= libm::exp(step_drift + step_vol * z);
                out.push(price);
            }
            out
        }
    };
    Ok(out)
}

fn noise_factor(rng: &mut ChaCha8Rng, noise: f64) -> f64 {
    if noise == 0.0 {
        1.0
    } else {
        libm::exp(noise * standard_normal(rng))
    }
}

/// Box-Muller, discarding the second variate.
pub(crate) fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * PI * u2)
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be positive and finite"))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be non-negative and finite"))
    }
}

fn business_day_on_or_after(d: NaiveDate) -> NaiveDate {
    match d.weekday() {
        Weekday::Sat => d + Days::new(2),
        Weekday::Sun => d + Days::new(1),
        _ => d,
    }
}

pub fn next_business_day(d: NaiveDate) -> NaiveDate {
    business_day_on_or_after(d + Days::new(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: SyntheticKind, length: usize) -> SyntheticSpec {
        SyntheticSpec {
            symbol: "SYN".into(),
            kind,
            length,
            start: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            volume: 1000.0,
        }
    }

    #[test]
    fn sinusoid_closed_form() {
        let s = generate_synthetic(
            &spec(
                SyntheticKind::Sinusoid {
                    base: 100.0,
                    amplitude: 10.0,
                    period: 4.0,
                    noise: 0.0,
                },
                20,
            ),
            0,
        )
        .unwrap();
        let c = s.closes();
        assert_eq!(c[0], 100.0);
        assert_eq!(c[1], 110.0);
        assert!((c[3] - 90.0).abs() < 1e-12);
        assert_eq!(s.len(), 20);
    }

    #[test]
    fn zero_vol_gbm_is_constant() {
        let s = generate_synthetic(
            &spec(
                SyntheticKind::Gbm {
                    initial: 50.0,
                    drift: 0.0,
                    volatility: 0.0,
                    dt: 1.0 / 252.0,
                },
                100,
            ),
            9,
        )
        .unwrap();
        assert!(s.closes().iter().all(|&c| c == 50.0));
    }

    #[test]
    fn seeded_determinism() {
        let g = spec(
            SyntheticKind::Gbm {
                initial: 100.0,
                drift: 0.05,
                volatility: 0.2,
                dt: 1.0 / 252.0,
            },
            250,
        );
        assert_eq!(generate_synthetic(&g, 7).unwrap(), generate_synthetic(&g, 7).unwrap());
        assert_ne!(generate_synthetic(&g, 7).unwrap(), generate_synthetic(&g, 8).unwrap());
    }

    #[test]
    fn skips_weekends() {
        let s = generate_synthetic(
            &spec(SyntheticKind::Trend { base: 10.0, drift: 0.01, noise: 0.0 }, 10),
            1,
        )
        .unwrap();
        assert!(s
            .dates()
            .iter()
            .all(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun)));
    }

    #[test]
    fn invalid_params() {
        let bad = spec(
            SyntheticKind::Sinusoid {
                base: 10.0,
                amplitude: 20.0,
                period: 10.0,
                noise: 0.0,
            },
            10,
        );
        assert!(generate_synthetic(&bad, 0).is_err());
        let short = spec(SyntheticKind::Trend { base: 10.0, drift: 0.0, noise: 0.0 }, 1);
        assert!(generate_synthetic(&short, 0).is_err());
    }
}
