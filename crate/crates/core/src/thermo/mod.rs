//! Thermodynamic side: edge-indexed transfer matrices of the automaton's
//! strongly connected components, their Perron roots, the Manhattan curve
//! θ(a) = max over components of the pressure, its derivatives, growth
//! rates, mean distortion, dilation constants and asymptotes.

mod export;
mod karp;
mod perron;
mod symmetry;

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use rayon::prelude::*;

use crate::automaton::{analyze_graph, ComponentAnalysis, GeodesicAutomaton};
use crate::error::{Error, Result};

pub use export::{fmt17, write_curve_csv, CurveRow, Provenance};
pub use karp::{critical_edges, find_cycle, max_mean_cycle, min_mean_cycle, MeanCycle, WEdge};
pub use perron::{perron, spectral_radius, PerronData};
pub use symmetry::{flip_quotient, EdgeInvolution};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative Collatz–Wielandt bracket half-width for Perron roots.
    pub perron: f64,
    /// Relative band within which components count as maximal.
    pub band: f64,
    /// Allowed derivative disagreement across maximal components.
    pub spread: f64,
    /// Bisection width for the root of θ.
    pub root: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            perron: 1e-14,
            band: 1e-9,
            spread: 1e-6,
            root: 1e-12,
        }
    }
}

/// One nontrivial strongly connected component, edge-indexed.
#[derive(Clone, Debug)]
pub struct ComponentData {
    /// Index in the component analysis.
    pub id: usize,
    /// Automaton edge indices; local index i refers to `edges[i]`.
    pub edges: Vec<usize>,
    pub weights: Vec<i64>,
    /// `follow[i]`: local edges leaving the head of edge i.
    pub follow: Vec<Vec<usize>>,
    /// States of the component, and each local edge as a state-local pair.
    pub states: Vec<usize>,
    pub local: Vec<WEdge>,
}

impl ComponentData {
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// `M(a)ᵢⱼ = [j follows i]·exp(-a(w_j - shift))`.
    pub fn matrix(&self, a: f64, shift: f64) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for (i, f) in self.follow.iter().enumerate() {
            for &j in f {
                m[(i, j)] = (-a * (self.weights[j] as f64 - shift)).exp();
            }
        }
        m
    }

    /// Weight subtracted before exponentiating so the largest entry is 1.
    fn shift(&self, a: f64) -> f64 {
        let (lo, hi) = self.weight_range();
        if a >= 0.0 {
            lo as f64
        } else {
            hi as f64
        }
    }

    fn weight_range(&self) -> (i64, i64) {
        let lo = *self.weights.iter().min().unwrap();
        let hi = *self.weights.iter().max().unwrap();
        (lo, hi)
    }

    pub fn perron_at(&self, a: f64, tol: f64) -> Result<(PerronData, f64)> {
        let shift = self.shift(a);
        Ok((perron(&self.matrix(a, shift), tol)?, shift))
    }

    /// Pressure of the component and its first two derivatives in `a`,
    /// from exact eigenvalue perturbation:
    /// `λ' = lᵀM'r`, `λ'' = lᵀM''r + 2lᵀM'r'` with `r'` solving
    /// `(λI - M + r lᵀ) r' = (M' - λ'I) r`.
    pub fn pressure_jet(&self, a: f64, tol: f64) -> Result<[f64; 3]> {
        let (p, shift) = self.perron_at(a, tol)?;
        let n = self.size();
        let m = self.matrix(a, shift);
        let dw = DVector::from_iterator(n, self.weights.iter().map(|&w| -(w as f64 - shift)));
        // M' = M·diag(-(w - shift)), M'' = M·diag((w - shift)²).
        let d1 = DMatrix::from_fn(n, n, |i, j| m[(i, j)] * dw[j]);
        let d2 = DMatrix::from_fn(n, n, |i, j| m[(i, j)] * dw[j] * dw[j]);
        let (l, r, lam) = (&p.left, &p.right, p.lambda);
        let lam1 = l.dot(&(&d1 * r));
        let rhs = &d1 * r - r * lam1;
        let sys = DMatrix::from_diagonal_element(n, n, lam) - &m + r * l.transpose();
        let r1 = sys
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("eigenvector derivative system is singular".into()))?;
        let lam2 = l.dot(&(&d2 * r)) + 2.0 * l.dot(&(&d1 * &r1));
        let theta = lam.ln() - a * shift;
        let t1 = lam1 / lam - shift;
        let t2 = lam2 / lam - (lam1 / lam).powi(2);
        Ok([theta, t1, t2])
    }
}

/// Value of θ with the components attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaValue {
    pub value: f64,
    /// Component analysis indices of the maximal components.
    pub maximal: Vec<usize>,
    pub semisimple: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Derivatives {
    pub a: f64,
    pub theta: f64,
    pub theta_prime: f64,
    pub theta_second: f64,
    /// Largest disagreement of θ′ or θ″ across maximal components.
    pub spread: f64,
    pub maximal: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthRates {
    /// θ(0): exponential growth rate of the base metric.
    pub v: f64,
    /// Root of θ: exponential growth rate of the target metric.
    pub v_star: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleMean {
    pub value: Ratio<i64>,
    /// Automaton edge indices of a witness cycle.
    pub cycle: Vec<usize>,
    pub component: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dilation {
    pub alpha_min: CycleMean,
    pub alpha_max: CycleMean,
}

/// `θ(t) + α_min·t` (for t ≥ 0) and `θ(t) + α_max·t` (for t ≤ 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoteGap {
    pub t: f64,
    pub gap_min: Option<f64>,
    pub gap_max: Option<f64>,
}

/// Limits of the asymptote gaps: the log spectral radius of the
/// transitions among critical edges (those on extreme-mean cycles after a
/// potential shift).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoteLimits {
    pub at_plus_infinity: f64,
    pub at_minus_infinity: f64,
}

/// Manhattan curve of an automaton with respect to one of its weights.
#[derive(Clone, Debug)]
pub struct ManhattanCurve {
    pub automaton: GeodesicAutomaton,
    pub weight: String,
    pub analysis: ComponentAnalysis,
    pub components: Vec<ComponentData>,
    pub tol: Tolerances,
}

impl ManhattanCurve {
    pub fn new(automaton: GeodesicAutomaton, weight: &str, tol: Tolerances) -> Result<Self> {
        let w = automaton.weight_index(weight)?;
        let analysis = analyze_graph(&automaton);
        let components: Vec<ComponentData> = analysis
            .nontrivial()
            .map(|(id, c)| {
                let pos = |s: usize| c.states.binary_search(&s).unwrap();
                let edges = c.edges.clone();
                let weights = edges.iter().map(|&e| automaton.edges[e].weights[w]).collect();
                let follow = edges
                    .iter()
                    .map(|&e| {
                        let head = automaton.edges[e].to;
                        (0..edges.len())
                            .filter(|&j| automaton.edges[edges[j]].from == head)
                            .collect()
                    })
                    .collect();
                let local = edges
                    .iter()
                    .map(|&e| {
                        let x = &automaton.edges[e];
                        WEdge {
                            from: pos(x.from),
                            to: pos(x.to),
                            weight: x.weights[w],
                        }
                    })
                    .collect();
                ComponentData {
                    id,
                    edges,
                    weights,
                    follow,
                    states: c.states.clone(),
                    local,
                }
            })
            .collect();
        if components.is_empty() {
            return Err(Error::Invalid(
                "automaton has no cycles: the group is finite".into(),
            ));
        }
        Ok(ManhattanCurve {
            automaton,
            weight: weight.to_string(),
            analysis,
            components,
            tol,
        })
    }

    pub fn certified_depth(&self) -> Option<usize> {
        self.automaton.meta.certified_depth
    }

    pub fn component(&self, id: usize) -> &ComponentData {
        self.components.iter().find(|c| c.id == id).expect("nontrivial component")
    }

    /// Edge-indexed transfer matrix of a component (without shift).
    pub fn transfer_matrix(&self, id: usize, a: f64) -> DMatrix<f64> {
        self.component(id).matrix(a, 0.0)
    }

    pub fn pressure_component(&self, id: usize, a: f64) -> Result<f64> {
        let c = self.component(id);
        let (p, shift) = c.perron_at(a, self.tol.perron)?;
        Ok(p.lambda.ln() - a * shift)
    }

    fn pressures(&self, a: f64) -> Result<Vec<f64>> {
        self.components
            .iter()
            .map(|c| self.pressure_component(c.id, a))
            .collect()
    }

    fn maximal(&self, pressures: &[f64]) -> (f64, Vec<usize>, bool) {
        let max = pressures.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let band = self.tol.band * max.abs().max(1.0);
        let maximal: Vec<usize> = self
            .components
            .iter()
            .zip(pressures)
            .filter(|(_, &p)| max - p <= band)
            .map(|(c, _)| c.id)
            .collect();
        let semisimple = maximal.iter().all(|&i| {
            maximal
                .iter()
                .all(|&j| i == j || !self.analysis.reach[i][j])
        });
        (max, maximal, semisimple)
    }

    /// θ(a) with the set of maximal components. A directed path between two
    /// maximal components means the automaton is not a valid geodesic
    /// coding, reported as [`Error::NotSemisimple`].
    pub fn theta(&self, a: f64) -> Result<ThetaValue> {
        let (value, maximal, semisimple) = self.maximal(&self.pressures(a)?);
        if !semisimple {
            return Err(Error::NotSemisimple(maximal));
        }
        Ok(ThetaValue {
            value,
            maximal,
            semisimple,
        })
    }

    /// Same as [`theta`](Self::theta) without raising on a semisimplicity
    /// violation; the flag is returned instead.
    pub fn theta_unchecked(&self, a: f64) -> Result<ThetaValue> {
        let (value, maximal, semisimple) = self.maximal(&self.pressures(a)?);
        Ok(ThetaValue {
            value,
            maximal,
            semisimple,
        })
    }

    pub fn derivatives(&self, a: f64) -> Result<Derivatives> {
        let th = self.theta(a)?;
        let jets: Vec<[f64; 3]> = th
            .maximal
            .iter()
            .map(|&id| self.component(id).pressure_jet(a, self.tol.perron))
            .collect::<Result<_>>()?;
        let mut spread = 0f64;
        for x in &jets {
            for y in &jets {
                spread = spread.max((x[1] - y[1]).abs()).max((x[2] - y[2]).abs());
            }
        }
        if spread > self.tol.spread {
            return Err(Error::Numerical(format!(
                "derivatives disagree by {spread:e} across maximal components {:?} at a = {a}",
                th.maximal
            )));
        }
        Ok(Derivatives {
            a,
            theta: th.value,
            theta_prime: jets[0][1],
            theta_second: jets[0][2],
            spread,
            maximal: th.maximal,
        })
    }

    /// θ″ by Richardson-extrapolated central differences of the analytic
    /// θ′ of the first maximal component. Independent cross-check of the
    /// perturbation formula.
    pub fn theta_second_by_differences(&self, a: f64) -> Result<f64> {
        let th = self.theta(a)?;
        let c = self.component(th.maximal[0]);
        let h = 1e-4 * (1.0 + a.abs());
        let d = |h: f64| -> Result<f64> {
            let p = c.pressure_jet(a + h, self.tol.perron)?[1];
            let m = c.pressure_jet(a - h, self.tol.perron)?[1];
            Ok((p - m) / (2.0 * h))
        };
        let (d1, d2) = (d(h)?, d(h / 2.0)?);
        Ok((4.0 * d2 - d1) / 3.0)
    }

    /// Curve over a grid, evaluated in parallel; output order follows the
    /// grid and values do not depend on the worker count.
    pub fn evaluate_grid(&self, grid: &[f64]) -> Result<Vec<Derivatives>> {
        grid.par_iter().map(|&a| self.derivatives(a)).collect()
    }

    pub fn growth_rates(&self) -> Result<GrowthRates> {
        let v = self.theta(0.0)?.value;
        let f = |a: f64| self.theta(a).map(|t| t.value);
        let mut hi = 1.0;
        let mut doublings = 0;
        while f(hi)? >= 0.0 {
            hi *= 2.0;
            doublings += 1;
            if doublings > 60 {
                return Err(Error::Invalid(
                    "θ never changes sign: the weights do not code a metric".into(),
                ));
            }
        }
        let mut lo = 0.0;
        if f(lo)? < 0.0 {
            return Err(Error::Invalid("θ(0) < 0: no positive growth".into()));
        }
        while hi - lo > self.tol.root {
            let mid = 0.5 * (lo + hi);
            if f(mid)? >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(GrowthRates {
            v,
            v_star: 0.5 * (lo + hi),
        })
    }

    /// τ = -θ′(0).
    pub fn mean_distortion(&self) -> Result<f64> {
        Ok(-self.derivatives(0.0)?.theta_prime)
    }

    /// Extreme cycle means over all nontrivial components (Karp, exact).
    pub fn dilation(&self) -> Result<Dilation> {
        let mut lo: Option<CycleMean> = None;
        let mut hi: Option<CycleMean> = None;
        for c in &self.components {
            let n = c.states.len();
            let min = min_mean_cycle(n, &c.local).expect("component has a cycle");
            let max = max_mean_cycle(n, &c.local).expect("component has a cycle");
            let wrap = |m: MeanCycle| CycleMean {
                value: m.value,
                cycle: m.cycle.iter().map(|&i| c.edges[i]).collect(),
                component: c.id,
            };
            if lo.as_ref().is_none_or(|l| min.value < l.value) {
                lo = Some(wrap(min));
            }
            if hi.as_ref().is_none_or(|h| max.value > h.value) {
                hi = Some(wrap(max));
            }
        }
        Ok(Dilation {
            alpha_min: lo.unwrap(),
            alpha_max: hi.unwrap(),
        })
    }

    pub fn asymptote_gap(&self, t: f64) -> Result<AsymptoteGap> {
        let dil = self.dilation()?;
        let th = self.theta(t)?.value;
        let r = |x: &Ratio<i64>| *x.numer() as f64 / *x.denom() as f64;
        Ok(AsymptoteGap {
            t,
            gap_min: (t >= 0.0).then(|| th + r(&dil.alpha_min.value) * t),
            gap_max: (t <= 0.0).then(|| th + r(&dil.alpha_max.value) * t),
        })
    }

    /// `log ρ_A` for the unweighted adjacency, aggregated over components.
    pub fn log_adjacency_radius(&self) -> Result<f64> {
        self.components
            .iter()
            .map(|c| {
                let m = c.matrix(0.0, 0.0);
                perron(&m, self.tol.perron).map(|p| p.lambda.ln())
            })
            .try_fold(f64::NEG_INFINITY, |acc, x| x.map(|x| acc.max(x)))
    }

    pub fn asymptote_limits(&self) -> Result<AsymptoteLimits> {
        let dil = self.dilation()?;
        let side = |value: Ratio<i64>, sign: i64| -> f64 {
            self.components
                .iter()
                .filter_map(|c| {
                    let local: Vec<WEdge> = c
                        .local
                        .iter()
                        .map(|e| WEdge { weight: sign * e.weight, ..*e })
                        .collect();
                    let m = min_mean_cycle(c.states.len(), &local)?;
                    if m.value != value * sign {
                        return None;
                    }
                    let crit = critical_edges(c.states.len(), &local, m.value);
                    let n = c.size();
                    let mut z = DMatrix::zeros(n, n);
                    for (i, f) in c.follow.iter().enumerate() {
                        for &j in f {
                            if crit.contains(&i) && crit.contains(&j) {
                                z[(i, j)] = 1.0;
                            }
                        }
                    }
                    Some(spectral_radius(&z).ln())
                })
                .fold(f64::NEG_INFINITY, f64::max)
        };
        Ok(AsymptoteLimits {
            at_plus_infinity: side(dil.alpha_min.value, 1),
            at_minus_infinity: side(dil.alpha_max.value, -1),
        })
    }
}
