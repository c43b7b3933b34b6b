use nalgebra::{DMatrix, DVector};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};

/// Dominant eigendata of an irreducible non-negative matrix.
#[derive(Clone, Debug)]
pub struct PerronData {
    pub lambda: f64,
    /// Right eigenvector, summing to 1.
    pub right: DVector<f64>,
    /// Left eigenvector, scaled so that `leftᵀ·right = 1`.
    pub left: DVector<f64>,
    /// Collatz–Wielandt bracket `min (Mv)ᵢ/vᵢ ≤ λ ≤ max (Mv)ᵢ/vᵢ` on the
    /// returned right vector.
    pub bracket: (f64, f64),
    /// `max |Mr - λr| / λ` over both vectors (∞-norm, vectors sum-normed).
    pub residual: f64,
}

const BUDGET: usize = 200;

fn collatz_wielandt(m: &DMatrix<f64>, v: &DVector<f64>) -> Option<(f64, f64)> {
    let w = m * v;
    let mut lo = f64::INFINITY;
    let mut hi = 0f64;
    for (wi, vi) in w.iter().zip(v.iter()) {
        if *vi <= 0.0 || !vi.is_finite() {
            return None;
        }
        let r = wi / vi;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Some((lo, hi))
}

fn normalise(v: &mut DVector<f64>) {
    let s = v.sum();
    *v /= s;
}

/// Shifted power iteration followed by inverse iteration with a shift just
/// above the Collatz–Wielandt upper bound. Stops once the bracket width is
/// within `2·tol·λ`.
fn right_vector(m: &DMatrix<f64>, tol: f64) -> Result<(DVector<f64>, (f64, f64))> {
    let n = m.nrows();
    let mut v = DVector::from_element(n, 1.0 / n as f64);
    let mut bracket = (0.0, f64::INFINITY);
    for iter in 0..BUDGET {
        let (lo, hi) = collatz_wielandt(m, &v).ok_or_else(|| {
            Error::Numerical("Perron iterate lost positivity; matrix not irreducible".into())
        })?;
        bracket = (lo, hi);
        if hi - lo <= 2.0 * tol * lo.max(f64::MIN_POSITIVE) {
            return Ok((v, bracket));
        }
        // M + cI is primitive for irreducible M; c tracks λ to stay scale-free.
        let next = if iter < 8 {
            m * &v + &v * hi
        } else {
            // Inverse iteration on the balanced matrix D⁻¹MD, D = diag(v),
            // whose Perron vector is near 1: rounding then stays relative in
            // every component, however widely the entries of v spread.
            let sigma = hi + (hi - lo) + 4.0 * f64::EPSILON * hi;
            let b = DMatrix::from_fn(n, n, |i, j| {
                let d = if i == j { sigma } else { 0.0 };
                d - m[(i, j)] * v[j] / v[i]
            });
            match b.lu().solve(&DVector::from_element(n, 1.0)) {
                Some(y) => v.component_mul(&y),
                None => m * &v + &v * hi,
            }
        };
        v = next.map(f64::abs);
        normalise(&mut v);
    }
    Err(Error::Numerical(format!(
        "Perron iteration did not converge: bracket [{}, {}] has width {:e}",
        bracket.0,
        bracket.1,
        bracket.1 - bracket.0
    )))
}

pub fn perron(m: &DMatrix<f64>, tol: f64) -> Result<PerronData> {
    if m.nrows() == 0 || m.nrows() != m.ncols() {
        return Err(Error::Invalid("Perron root of an empty or non-square matrix".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Invalid("Perron tolerance must be positive".into()));
    }
    if m.iter().any(|x| *x < 0.0 || !x.is_finite()) {
        return Err(Error::Numerical("transfer matrix has negative or non-finite entries".into()));
    }
    let (right, bracket) = right_vector(m, tol)?;
    let (mut left, _) = right_vector(&m.transpose(), tol)?;
    let lambda = (m * &right).dot(&left) / right.dot(&left);
    left /= left.dot(&right);
    let rr = (m * &right - &right * lambda).amax() / (lambda * right.amax());
    let rl = (m.tr_mul(&left) - &left * lambda).amax() / (lambda * left.amax());
    Ok(PerronData {
        lambda,
        right,
        left,
        bracket,
        residual: rr.max(rl),
    })
}

/// Spectral radius of a non-negative matrix, possibly reducible: the
/// largest Perron root over its irreducible diagonal blocks.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if m[(i, j)] > 0.0 {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    tarjan_scc(&g)
        .into_iter()
        .filter_map(|block| {
            let idx: Vec<usize> = block.iter().map(|v| v.index()).collect();
            let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])]);
            if sub.iter().all(|&x| x == 0.0) {
                return None;
            }
            perron(&sub, 1e-14).ok().map(|p| p.lambda)
        })
        .fold(0.0, f64::max)
}
