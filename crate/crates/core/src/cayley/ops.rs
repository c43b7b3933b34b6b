use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::group::Letter;

use super::{BallTable, MetricContext};

/// `(x|y)_o = (d(o,x) + d(o,y) - d(x,y)) / 2`, exact.
pub fn gromov_product(ctx: &MetricContext, x: &[Letter], y: &[Letter]) -> Result<Ratio<i64>> {
    let alpha = ctx.fixture.alphabet();
    let mut xinv_y = alpha.invert(x);
    xinv_y.extend_from_slice(y);
    let dx = ctx.length(x)? as i64;
    let dy = ctx.length(y)? as i64;
    let dxy = ctx.length(&xinv_y)? as i64;
    Ok(Ratio::new(dx + dy - dxy, 2))
}

/// Stable translation length estimates for `x` from its first `max_power`
/// powers.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslationEstimate {
    /// `min_{n ≤ N} d(o, xⁿ)/n`, an upper bound by subadditivity.
    pub upper: Ratio<i64>,
    /// `d(o, x^N)/N`.
    pub point: Ratio<i64>,
    /// `d(o, x) - 2(x|x⁻¹)_o`, within a group constant of the translation
    /// length.
    pub gromov: Ratio<i64>,
    /// `d(o, xⁿ)` for `n = 1..=N`.
    pub power_lengths: Vec<usize>,
}

pub fn translation_length_estimate(
    ctx: &MetricContext,
    x: &[Letter],
    max_power: usize,
) -> Result<TranslationEstimate> {
    if max_power == 0 {
        return Err(Error::Invalid("translation estimate needs N ≥ 1".into()));
    }
    let alpha = ctx.fixture.alphabet();
    // Powers of the normal form keep the words short.
    let base = ctx.normal_form(x)?;
    let mut power_lengths = Vec::with_capacity(max_power);
    let mut acc = base.clone();
    power_lengths.push(acc.len());
    for _ in 1..max_power {
        let mut w = acc.clone();
        w.extend_from_slice(&base);
        acc = ctx.normal_form(&w)?;
        power_lengths.push(acc.len());
    }
    let upper = power_lengths
        .iter()
        .enumerate()
        .map(|(i, &l)| Ratio::new(l as i64, i as i64 + 1))
        .min()
        .unwrap();
    let point = Ratio::new(*power_lengths.last().unwrap() as i64, max_power as i64);
    let xinv = alpha.invert(&base);
    let gp = gromov_product(ctx, &base, &xinv)?;
    let gromov = Ratio::from_integer(base.len() as i64) - gp * 2;
    Ok(TranslationEstimate {
        upper,
        point,
        gromov,
        power_lengths,
    })
}

/// `log Σ_{|x|_base = n} exp(-a |x|_target)`, accumulated in log-sum-exp
/// form.
pub fn log_sphere_sum(table: &BallTable, target: &str, a: f64, n: usize) -> Result<f64> {
    let ids = {
        table.sphere(n)?;
        table.sphere_ids(n)
    };
    let lengths = if target == table.base().name() {
        None
    } else {
        Some(table.target_lengths(target)?)
    };
    // Exponents are -a·ℓ for integer ℓ: accumulate counts per length first.
    let mut counts: Vec<u64> = Vec::new();
    for id in ids {
        let l = match lengths {
            Some(v) => v[id] as usize,
            None => n,
        };
        if l >= counts.len() {
            counts.resize(l + 1, 0);
        }
        counts[l] += 1;
    }
    let terms: Vec<f64> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(l, &c)| (c as f64).ln() - a * l as f64)
        .collect();
    if terms.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln())
}

pub fn sphere_sum(table: &BallTable, target: &str, a: f64, n: usize) -> Result<f64> {
    Ok(log_sphere_sum(table, target, a, n)?.exp())
}

/// `(1/#B(o,r)) Σ_{x ∈ B(o,r)} d_target(o,x)/r` as an exact rational.
/// Returns 0 for `r = 0`.
pub fn ball_average_distortion(table: &BallTable, target: &str, r: usize) -> Result<Ratio<i64>> {
    let size = table.ball_size(r)?;
    if r == 0 {
        return Ok(Ratio::from_integer(0));
    }
    let total: i64 = if target == table.base().name() {
        (0..=r)
            .map(|n| n as i64 * table.sphere_size(n).unwrap() as i64)
            .sum()
    } else {
        table.target_lengths(target)?[..size]
            .iter()
            .map(|&l| l as i64)
            .sum()
    };
    Ok(Ratio::new(total, r as i64 * size as i64))
}
