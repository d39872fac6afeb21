use crate::math::floor;
use crate::{Error, Result};

/// Cash plus whole-share holdings of the traded symbol. Neither side can go
/// negative: there is no leverage and no shorting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Portfolio {
    pub cash: f64,
    pub shares: u64,
}

/// Proportional transaction cost charged on each side's notional.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostModel {
    rate: f64,
}

impl CostModel {
    pub fn new(rate: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::invalid("cost rate", "must lie in [0, 1)"));
        }
        Ok(CostModel { rate })
    }

    pub fn zero() -> Self {
        CostModel { rate: 0.0 }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn fee(&self, shares: u64, price: f64) -> f64 {
        shares as f64 * price * self.rate
    }
}

fn check_price(price: f64) -> Result<()> {
    if price > 0.0 && price.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("price", "must be positive"))
    }
}

/// Spends up to `fraction` of cash on whole shares at `price` plus costs.
pub fn execute_buy(p: &Portfolio, price: f64, fraction: f64, costs: &CostModel) -> Result<Portfolio> {
    check_price(price)?;
    let unit_cost = price * (1.0 + costs.rate);
    let budget = fraction * p.cash;
    let mut shares = floor(budget / unit_cost) as u64;
    // Division rounding can overshoot the budget by one share.
    while shares > 0 && shares as f64 * unit_cost > budget {
        shares -= 1;
    }
    if shares == 0 {
        return Ok(*p);
    }
    Ok(Portfolio {
        cash: (p.cash - shares as f64 * unit_cost).max(0.0),
        shares: p.shares + shares,
    })
}

/// Sells `floor(fraction * shares)` shares at `price` net of costs.
pub fn execute_sell(p: &Portfolio, price: f64, fraction: f64, costs: &CostModel) -> Result<Portfolio> {
    check_price(price)?;
    let sold = if fraction >= 1.0 {
        p.shares
    } else {
        floor(fraction * p.shares as f64) as u64
    };
    if sold == 0 {
        return Ok(*p);
    }
    Ok(Portfolio {
        cash: p.cash + sold as f64 * price * (1.0 - costs.rate),
        shares: p.shares - sold,
    })
}

/// Cash plus holdings marked at `price`.
pub fn wealth(p: &Portfolio, price: f64) -> f64 {
    p.cash + p.shares as f64 * price
}

/// `final / initial - 1`.
pub fn roi(initial_wealth: f64, final_wealth: f64) -> Result<f64> {
    if !(initial_wealth > 0.0) {
        return Err(Error::invalid("initial wealth", "must be positive"));
    }
    Ok(final_wealth / initial_wealth - 1.0)
}
