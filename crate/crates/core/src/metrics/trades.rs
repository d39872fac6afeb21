use alloc::collections::VecDeque;
use alloc::vec::Vec;

use chrono::NaiveDate;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Buy,
    Sell,
}

/// One executed order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fill {
    pub date: NaiveDate,
    pub side: Side,
    pub shares: u64,
    pub price: f64,
    /// Total transaction cost paid on this fill.
    pub cost: f64,
}

impl Fill {
    pub fn new(date: NaiveDate, side: Side, shares: u64, price: f64, cost: f64) -> Self {
        Fill {
            date,
            side,
            shares,
            price,
            cost,
        }
    }
}

/// A matched entry/exit pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTripTrade {
    pub entry_date: NaiveDate,
    pub exit_date: NaiveDate,
    pub shares: u64,
    pub entry_price: f64,
    pub exit_price: f64,
    /// `shares * (exit - entry)` minus the pro-rata share of both fills' costs.
    pub profit: f64,
    pub holding_days: i64,
    /// Closed synthetically at the final mark rather than by a real sell.
    pub mark_to_market: bool,
}

struct Lot {
    date: NaiveDate,
    shares: u64,
    price: f64,
    cost_per_share: f64,
}

/// Pairs sells with the oldest open buy lots (FIFO), splitting lots when a
/// sell consumes only part of one. Lots still open at the end are closed at
/// `final_price` on `final_date` and flagged as mark-to-market.
pub fn match_trades(fills: &[Fill], final_price: f64, final_date: NaiveDate) -> Result<Vec<RoundTripTrade>> {
    let mut open: VecDeque<Lot> = VecDeque::new();
    let mut trades = Vec::new();
    let mut prev_date: Option<NaiveDate> = None;

    for fill in fills {
        if let Some(prev) = prev_date {
            if fill.date < prev {
                return Err(Error::NonMonotonicDates {
                    previous: prev,
                    next: fill.date,
                });
            }
        }
        prev_date = Some(fill.date);
        if fill.shares == 0 {
            continue;
        }
        let cost_per_share = fill.cost / fill.shares as f64;
        match fill.side {
            Side::Buy => open.push_back(Lot {
                date: fill.date,
                shares: fill.shares,
                price: fill.price,
                cost_per_share,
            }),
            Side::Sell => {
                let available: u64 = open.iter().map(|l| l.shares).sum();
                if fill.shares > available {
                    return Err(Error::OversizedSell {
                        date: fill.date,
                        requested: fill.shares,
                        open: available,
                    });
                }
                let mut remaining = fill.shares;
                while remaining > 0 {
                    let lot = open.front_mut().expect("position checked above");
                    let qty = remaining.min(lot.shares);
                    trades.push(close_lot(lot, qty, fill.date, fill.price, cost_per_share, false));
                    lot.shares -= qty;
                    remaining -= qty;
                    if lot.shares == 0 {
                        open.pop_front();
                    }
                }
            }
        }
    }

    if let Some(last) = prev_date {
        if final_date < last {
            return Err(Error::InconsistentDates(alloc::format!(
                "final mark {final_date} precedes last fill {last}"
            )));
        }
    }
    for lot in &open {
        trades.push(close_lot(lot, lot.shares, final_date, final_price, 0.0, true));
    }
    Ok(trades)
}

fn close_lot(
    lot: &Lot,
    shares: u64,
    exit_date: NaiveDate,
    exit_price: f64,
    exit_cost_per_share: f64,
    mark_to_market: bool,
) -> RoundTripTrade {
    let q = shares as f64;
    RoundTripTrade {
        entry_date: lot.date,
        exit_date,
        shares,
        entry_price: lot.price,
        exit_price,
        profit: q * (exit_price - lot.price) - q * (lot.cost_per_share + exit_cost_per_share),
        holding_days: (exit_date - lot.date).num_days(),
        mark_to_market,
    }
}
