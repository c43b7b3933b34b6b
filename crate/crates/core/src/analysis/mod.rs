//! Quantities derived from a Manhattan curve: the multifractal spectrum and
//! the large-deviation rate function (both Legendre transforms of θ), the
//! rough-similarity verdict, and the inverse relation between the curves of
//! a pair of metrics taken in either order.

use std::io::Write;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::thermo::{fmt17, Dilation, ManhattanCurve, Provenance};

/// Label attached to values at α_min and α_max, where the Legendre
/// transform is attained only in the limit a → ±∞.
pub const ENDPOINT_LABEL: &str = "endpoint (word-metric extension)";

/// Largest |a| explored when bracketing θ′(a) = -α. Beyond it the shifted
/// transfer matrix entries underflow.
const A_LIMIT: f64 = 256.0;

fn as_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Solves θ′(a) = target by bisection on the monotone θ′, to width `tol`.
pub fn solve_slope(curve: &ManhattanCurve, target: f64, tol: f64) -> Result<f64> {
    let d = |a: f64| curve.derivatives(a).map(|d| d.theta_prime);
    let (mut lo, mut hi) = (-1.0, 1.0);
    while d(lo)? > target {
        hi = lo;
        lo *= 2.0;
        if lo < -A_LIMIT {
            return Err(Error::Numerical(format!(
                "bracket failure: slope {target} not reached for a ≥ {lo}"
            )));
        }
    }
    while d(hi)? < target {
        lo = hi;
        hi *= 2.0;
        if hi > A_LIMIT {
            return Err(Error::Numerical(format!(
                "bracket failure: slope {target} not reached for a ≤ {hi}"
            )));
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if d(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSample {
    pub alpha: f64,
    pub dimension: f64,
    /// Minimiser of `aα + θ(a)`; ±∞ at the endpoints.
    pub attained_at_a: f64,
    /// Set at α_min or α_max, see [`ENDPOINT_LABEL`].
    pub endpoint: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Spectrum {
    Sample(SpectrumSample),
    OutOfRange,
}

/// `inf_a {aα + θ(a)}` for α in `[α_min, α_max]`.
pub fn multifractal_spectrum(curve: &ManhattanCurve, alpha: f64) -> Result<Spectrum> {
    let dil = curve.dilation()?;
    spectrum_with(curve, &dil, alpha)
}

fn spectrum_with(curve: &ManhattanCurve, dil: &Dilation, alpha: f64) -> Result<Spectrum> {
    let (lo, hi) = (as_f64(&dil.alpha_min.value), as_f64(&dil.alpha_max.value));
    if alpha < lo || alpha > hi || alpha.is_nan() {
        return Ok(Spectrum::OutOfRange);
    }
    if alpha == lo || alpha == hi {
        let lim = curve.asymptote_limits()?;
        let (dimension, at) = if alpha == lo {
            (lim.at_plus_infinity, f64::INFINITY)
        } else {
            (lim.at_minus_infinity, f64::NEG_INFINITY)
        };
        return Ok(Spectrum::Sample(SpectrumSample {
            alpha,
            dimension,
            attained_at_a: at,
            endpoint: true,
        }));
    }
    let a = solve_slope(curve, -alpha, 1e-10)?;
    Ok(Spectrum::Sample(SpectrumSample {
        alpha,
        dimension: a * alpha + curve.theta(a)?.value,
        attained_at_a: a,
        endpoint: false,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rate {
    Finite(f64),
    Infinite,
}

impl Rate {
    pub fn value(self) -> f64 {
        match self {
            Rate::Finite(x) => x,
            Rate::Infinite => f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateFunctionSample {
    pub s: f64,
    pub rate: Rate,
    /// Maximiser of `ts - θ(-t)`; `None` when the rate is infinite, ±∞ at
    /// the endpoints.
    pub attained_at_t: Option<f64>,
    pub endpoint: bool,
}

/// `I(s) = θ(0) + sup_t {ts - θ(-t)}` for the curve whose base metric
/// defines the spheres; infinite outside `[α_min, α_max]`.
pub fn ldp_rate_function(curve: &ManhattanCurve, s: f64) -> Result<RateFunctionSample> {
    let dil = curve.dilation()?;
    let v = curve.theta(0.0)?.value;
    Ok(match spectrum_with(curve, &dil, s)? {
        Spectrum::OutOfRange => RateFunctionSample {
            s,
            rate: Rate::Infinite,
            attained_at_t: None,
            endpoint: false,
        },
        Spectrum::Sample(x) => RateFunctionSample {
            s,
            rate: Rate::Finite((v - x.dimension).max(0.0)),
            attained_at_t: Some(-x.attained_at_a),
            endpoint: x.endpoint,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidityThresholds {
    /// θ″(0) at or below this counts as a straight line.
    pub theta_second: f64,
}

impl Default for RigidityThresholds {
    fn default() -> Self {
        RigidityThresholds { theta_second: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    RoughlySimilar,
    NotRoughlySimilar,
    /// The curvature and dilation signals disagree.
    Indeterminate(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RigidityVerdict {
    pub theta_second_at_zero: f64,
    pub straight_line: bool,
    pub dilation_equal: bool,
    pub roughly_similar: bool,
    pub mean_distortion: f64,
    /// v / v_star.
    pub growth_ratio: f64,
    pub verdict: Verdict,
}

pub fn rigidity_report(curve: &ManhattanCurve, th: RigidityThresholds) -> Result<RigidityVerdict> {
    let d = curve.derivatives(0.0)?;
    let dil = curve.dilation()?;
    let g = curve.growth_rates()?;
    let straight_line = d.theta_second <= th.theta_second;
    let dilation_equal = dil.alpha_min.value == dil.alpha_max.value;
    let verdict = match (straight_line, dilation_equal) {
        (true, true) => Verdict::RoughlySimilar,
        (false, false) => Verdict::NotRoughlySimilar,
        _ => Verdict::Indeterminate(format!(
            "θ″(0) = {:e} against threshold {:e}, but Dil = ({}, {})",
            d.theta_second, th.theta_second, dil.alpha_min.value, dil.alpha_max.value
        )),
    };
    Ok(RigidityVerdict {
        theta_second_at_zero: d.theta_second,
        straight_line,
        dilation_equal,
        roughly_similar: verdict == Verdict::RoughlySimilar,
        mean_distortion: -d.theta_prime,
        growth_ratio: g.v / g.v_star,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualCheck {
    /// `max |θ_BA(θ_AB(a)) - a|` over the grid.
    pub max_deviation: f64,
    pub worst_a: f64,
    pub tau_ab: f64,
    pub tau_ba: f64,
    /// `τ_AB·τ_BA ≥ 1 - 1e-9`.
    pub slope_duality: bool,
}

/// Compares the curve with base A and weight B against the one with base
/// B and weight A: each is the other's inverse function.
pub fn inverse_curve_check(ab: &ManhattanCurve, ba: &ManhattanCurve, grid: &[f64]) -> Result<DualCheck> {
    let (ma, mb) = (&ab.automaton.meta, &ba.automaton.meta);
    if ma.fixture_hash != mb.fixture_hash {
        return Err(Error::Invalid("curves come from different group fixtures".into()));
    }
    if ma.base.as_deref() != Some(ba.weight.as_str()) || mb.base.as_deref() != Some(ab.weight.as_str()) {
        return Err(Error::Invalid(format!(
            "curves are not a swapped pair: ({:?}, {}) and ({:?}, {})",
            ma.base, ab.weight, mb.base, ba.weight
        )));
    }
    let mut max_deviation = 0f64;
    let mut worst_a = f64::NAN;
    for &a in grid {
        let b = ab.theta(a)?.value;
        let dev = (ba.theta(b)?.value - a).abs();
        if worst_a.is_nan() || dev > max_deviation {
            max_deviation = dev;
            worst_a = a;
        }
    }
    let tau_ab = ab.mean_distortion()?;
    let tau_ba = ba.mean_distortion()?;
    Ok(DualCheck {
        max_deviation,
        worst_a,
        tau_ab,
        tau_ba,
        slope_duality: tau_ab * tau_ba >= 1.0 - 1e-9,
    })
}

pub fn write_spectrum_csv(w: &mut dyn Write, prov: &Provenance, rows: &[Spectrum]) -> std::io::Result<()> {
    prov.write_header(w)?;
    writeln!(w, "# rows at alpha_min / alpha_max are {ENDPOINT_LABEL} values")?;
    writeln!(w, "alpha,dimension,attained_at_a")?;
    for r in rows {
        if let Spectrum::Sample(x) = r {
            writeln!(w, "{},{},{}", fmt17(x.alpha), fmt17(x.dimension), fmt17(x.attained_at_a))?;
        }
    }
    Ok(())
}

pub fn write_rate_csv(w: &mut dyn Write, prov: &Provenance, rows: &[RateFunctionSample]) -> std::io::Result<()> {
    prov.write_header(w)?;
    writeln!(w, "# rows at alpha_min / alpha_max are {ENDPOINT_LABEL} values")?;
    writeln!(w, "s,I,attained_at_t")?;
    for r in rows {
        let t = r.attained_at_t.map(fmt17).unwrap_or_default();
        writeln!(w, "{},{},{}", fmt17(r.s), fmt17(r.rate.value()), t)?;
    }
    Ok(())
}
