//! Gauss-Jacobi rules on `[0, 1]` and the Edward-kernel double integrals
//!
//! ```text
//! I[Φ] = ∬_{[0,1]²} y^λ (1−x)^{λ−1} (1−y)^{μ−1} (1−xy)^{1−λ−μ} Φ(g(x,y)) dx dy,
//! g(x,y) = y (1−x)(1−y) / (1−xy)²  ∈ [0, 1/4].
//! ```
//!
//! In `u = 1−x`, `v = 1−y` the kernel is
//! `u^{λ−1} v^{μ−1} (1−v)^λ (u+v−uv)^{1−λ−μ}`. The square is cut into four
//! pieces so that every factor is either a Jacobi weight of its piece or
//! smooth on it:
//!
//! - `[0,½]²` holds the corner `u = v = 0`, where the kernel is homogeneous
//!   of degree −1. Each of its two triangles is collapsed onto a square by a
//!   Duffy map (`v = ut` or `u = vs`), which cancels the corner singularity
//!   and leaves a weight `t^{μ−1}` (resp. `s^{λ−1}`).
//! - `[0,½]×[½,1]` carries weights `u^{λ−1}` and `(1−v)^λ`.
//! - `[½,1]×[0,1]` carries the two-sided weight `v^{μ−1}(1−v)^λ`.
//!
//! Every piece uses an `n × n` tensor rule; `n` doubles from 16 until two
//! successive totals agree.

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::dd::Dd;
use crate::gammakit::gamma_ratio;
use crate::series::{bessel_maitland, master_series, MasterParams, MAX_TOL, MIN_TOL};

pub const MAX_RULE_NODES: usize = 512;
pub const START_NODES: usize = 16;
pub const DEFAULT_MAX_NODES: usize = 256;

/// Gauss rule for the weight `u^exponent (1−u)^right_exponent` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiRule {
    pub n: usize,
    pub exponent: f64,
    pub right_exponent: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl JacobiRule {
    /// Nodes and weights for `(x−c)^exponent (d−x)^right_exponent` on `[c, d]`.
    pub fn mapped(&self, c: f64, d: f64) -> (Vec<f64>, Vec<f64>) {
        let h = d - c;
        let scale = h.powf(self.exponent + self.right_exponent + 1.0);
        (
            self.nodes.iter().map(|&u| c + h * u).collect(),
            self.weights.iter().map(|&w| w * scale).collect(),
        )
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix (implicit QL with Wilkinson
/// shifts). `e[i]` couples `d[i]` and `d[i+1]`; `e` is clobbered.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numerical("tridiagonal QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// `(P_n, P_n')` of the Jacobi polynomial with weight `(1−x)^a (1+x)^b` at
/// `x ∈ (−1, 1)`, by the three-term recurrence.
fn jacobi_eval(n: usize, a: f64, b: f64, x: f64) -> (f64, f64) {
    let ab = a + b;
    let mut p1 = 0.5 * (a - b + (2.0 + ab) * x);
    let mut p2 = 1.0;
    for j in 2..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        let temp = 2.0 * jf + ab;
        let c1 = 2.0 * jf * (jf + ab) * (temp - 2.0);
        let c2 = (temp - 1.0) * (a * a - b * b + temp * (temp - 2.0) * x);
        let c3 = 2.0 * (jf - 1.0 + a) * (jf - 1.0 + b) * temp;
        p1 = (c2 * p2 - c3 * p3) / c1;
    }
    let nf = n as f64;
    let temp = 2.0 * nf + ab;
    let dp = (nf * (a - b - temp * x) * p1 + 2.0 * (nf + a) * (nf + b) * p2) / (temp * (1.0 - x * x));
    (p1, dp)
}

/// `(F, F')` of the terminating series `₂F₁(−n, n+a+b+1; c+1; s)`.
///
/// Proportional to the Jacobi polynomial in the distance `s` from the
/// endpoint whose exponent is `c`, so roots near that endpoint keep full
/// relative precision.
fn endpoint_series(n: usize, ab: f64, c: f64, s: f64) -> (f64, f64) {
    let nf = n as f64;
    let (mut t, mut f, mut df) = (1.0, 1.0, 0.0);
    for k in 0..n {
        let kf = k as f64;
        t *= (kf - nf) * (kf + nf + ab + 1.0) / ((kf + c + 1.0) * (kf + 1.0)) * s;
        f += t;
        df += (kf + 1.0) * t;
    }
    (f, df / s)
}

/// Below this value of `n² s` a node is refined in endpoint coordinates.
const ENDPOINT_ZONE: f64 = 8.0;
/// Farther out the endpoint series cancels too much for small `n`.
const ENDPOINT_ZONE_MAX: f64 = 0.1;

/// Gauss rule with weight `u^left (1−u)^right` on `[0, 1]`.
///
/// Nodes come from the eigenvalues of the Jacobi matrix of the three-term
/// recurrence and are polished by Newton steps: near an endpoint on the
/// hypergeometric form in the distance to that endpoint, elsewhere on the
/// recurrence. Weights use `w = G / (u (1−u) P_n'(u)²)`.
pub fn gauss_jacobi(n: usize, left: f64, right: f64) -> Result<JacobiRule> {
    if !(1..=MAX_RULE_NODES).contains(&n) {
        return Err(domain(format!("rule size {n} outside 1..={MAX_RULE_NODES}")));
    }
    if !(left > -1.0) || !(right > -1.0) || !left.is_finite() || !right.is_finite() {
        return Err(domain(format!(
            "Jacobi exponents must be finite and > -1 (got {left}, {right})"
        )));
    }
    // on [-1, 1]: a is the (1-x) exponent, b the (1+x) exponent
    let (a, b) = (right, left);
    let ab = a + b;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    diag[0] = (b - a) / (ab + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        diag[k] = (b * b - a * a) / (s * (s + 2.0));
        let sq = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        off[k - 1] = sq.sqrt();
    }
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    diag.sort_by(|x, y| x.total_cmp(y));

    let nf = n as f64;
    // G = Γ(n+a+1)Γ(n+b+1) / (Γ(n+a+b+1) n!) and its quotients by the squared
    // endpoint factors ((c+1)_n / n!)², as exact-ish running products
    let g1 = gamma_ratio(&[a + 2.0, b + 2.0], &[ab + 2.0])?.to_f64();
    let (mut g, mut wl, mut wr) = (
        Dd::from_f64(g1),
        Dd::from_f64(g1 / ((b + 1.0) * (b + 1.0))),
        Dd::from_f64(g1 / ((a + 1.0) * (a + 1.0))),
    );
    for j in 2..=n {
        let jf = j as f64;
        let (ja, jb, jab, jd) = (
            Dd::sum(jf, a),
            Dd::sum(jf, b),
            Dd::sum(jf, ab),
            Dd::from_f64(jf),
        );
        g = g * (ja * jb / (jab * jd));
        wl = wl * (ja * jd / (jab * jb));
        wr = wr * (jb * jd / (jab * ja));
    }
    let (g, wl, wr) = (g.to_f64(), wl.to_f64(), wr.to_f64());
    let zone = (ENDPOINT_ZONE / (nf * nf)).min(ENDPOINT_ZONE_MAX);

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x0 in &diag {
        let u0 = 0.5 * (1.0 + x0);
        let (u, w) = if u0 <= 0.5 && u0 < zone {
            let s = endpoint_newton(n, ab, b, u0.max(f64::MIN_POSITIVE));
            let (_, df) = endpoint_series(n, ab, b, s);
            (s, wl / (s * (1.0 - s) * df * df))
        } else if u0 > 0.5 && 1.0 - u0 < zone {
            let s = endpoint_newton(n, ab, a, (1.0 - u0).max(f64::MIN_POSITIVE));
            let (_, df) = endpoint_series(n, ab, a, s);
            (1.0 - s, wr / (s * (1.0 - s) * df * df))
        } else {
            let mut x = x0.clamp(-1.0 + f64::EPSILON, 1.0 - f64::EPSILON);
            for _ in 0..4 {
                let (p, dp) = jacobi_eval(n, a, b, x);
                let step = p / dp;
                x -= step;
                if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-3) {
                    break;
                }
            }
            let (_, dp) = jacobi_eval(n, a, b, x);
            let u = 0.5 * (1.0 + x);
            // (1 - x²) P'(x)² in u = (1 + x) / 2
            (u, g / (4.0 * u * (1.0 - u) * dp * dp))
        };
        nodes.push(u);
        weights.push(w);
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::Numerical(format!(
            "non-positive Gauss-Jacobi weight for n = {n}, exponents ({left}, {right})"
        )));
    }
    Ok(JacobiRule {
        n,
        exponent: left,
        right_exponent: right,
        nodes,
        weights,
    })
}

/// Newton iteration on the endpoint series, starting from `s`.
fn endpoint_newton(n: usize, ab: f64, c: f64, mut s: f64) -> f64 {
    for _ in 0..8 {
        let (f, df) = endpoint_series(n, ab, c, s);
        let step = f / df;
        let next = s - step;
        if !(next > 0.0) {
            break;
        }
        s = next;
        if step.abs() <= 2.0 * f64::EPSILON * s {
            break;
        }
    }
    s
}

/// Gauss rule for the weight `u^exponent` on `[0, 1]`.
pub fn jacobi_rule(n: usize, exponent: f64) -> Result<JacobiRule> {
    gauss_jacobi(n, exponent, 0.0)
}

/// Pairwise summation; the result depends only on the order of `xs`.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub nodes_per_axis: usize,
    /// `|Q_{2n} − Q_n|` of the last doubling.
    pub error_estimate: f64,
    pub converged: bool,
    /// Error estimate of every doubling, in order.
    pub error_history: Vec<f64>,
}

/// Node set of the four-piece rule for the Edward kernel.
#[derive(Debug, Clone)]
pub struct EdwardGrid {
    pub lambda: f64,
    pub mu: f64,
    pub n: usize,
    /// Kernel-weighted quadrature weights.
    weights: Vec<f64>,
    /// `g(x, y)` at each node.
    args: Vec<f64>,
}

const SPLIT: f64 = 0.5;
/// Slack on the analytic bound `g ≤ 1/4` for rounding in the node maps.
const ARG_BOUND_SLACK: f64 = 1e-14;

impl EdwardGrid {
    pub fn new(lambda: f64, mu: f64, n: usize) -> Result<Self> {
        if !(lambda > 0.0) || !(mu > 0.0) || !lambda.is_finite() || !mu.is_finite() {
            return Err(invalid(format!("λ and μ must be > 0 (got {lambda}, {mu})")));
        }
        let h = SPLIT;
        let cap = 4 * n * n;
        let mut weights = Vec::with_capacity(cap);
        let mut args = Vec::with_capacity(cap);
        let e = 1.0 - lambda - mu;

        let legendre = gauss_jacobi(n, 0.0, 0.0)?;
        let (lo_x, lo_w) = legendre.mapped(0.0, h);
        let (hi_x, hi_w) = legendre.mapped(h, 1.0);

        // corner block, triangle v <= u: v = u t
        let rule_t = gauss_jacobi(n, mu - 1.0, 0.0)?;
        for (&u, &wu) in lo_x.iter().zip(&lo_w) {
            for (&t, &wt) in rule_t.nodes.iter().zip(&rule_t.weights) {
                let one_m = 1.0 - u * t;
                let d = 1.0 + t * (1.0 - u);
                weights.push(wu * wt * one_m.powf(lambda) * d.powf(e));
                args.push(t * one_m / (d * d));
            }
        }
        // corner block, triangle u < v: u = v s
        let rule_s = gauss_jacobi(n, lambda - 1.0, 0.0)?;
        for (&v, &wv) in lo_x.iter().zip(&lo_w) {
            for (&s, &ws) in rule_s.nodes.iter().zip(&rule_s.weights) {
                let d = 1.0 + s * (1.0 - v);
                weights.push(wv * ws * (1.0 - v).powf(lambda) * d.powf(e));
                args.push(s * (1.0 - v) / (d * d));
            }
        }
        // u in [0, h], v in [h, 1]
        let rule_u = gauss_jacobi(n, lambda - 1.0, 0.0)?;
        let (bu_x, bu_w) = rule_u.mapped(0.0, h);
        let rule_v = gauss_jacobi(n, 0.0, lambda)?;
        let (bv_x, bv_w) = rule_v.mapped(h, 1.0);
        for (&u, &wu) in bu_x.iter().zip(&bu_w) {
            for ((&v, &wv), &r) in bv_x.iter().zip(&bv_w).zip(&rule_v.nodes) {
                let one_m_v = (1.0 - h) * (1.0 - r);
                let s = u + v * (1.0 - u);
                weights.push(wu * wv * v.powf(mu - 1.0) * s.powf(e));
                args.push(one_m_v * u * v / (s * s));
            }
        }
        // u in [h, 1], v in [0, 1]
        let rule_b = gauss_jacobi(n, mu - 1.0, lambda)?;
        for (&u, &wu) in hi_x.iter().zip(&hi_w) {
            for (&v, &wv) in rule_b.nodes.iter().zip(&rule_b.weights) {
                let s = u + v * (1.0 - u);
                weights.push(wu * wv * u.powf(lambda - 1.0) * s.powf(e));
                args.push((1.0 - v) * u * v / (s * s));
            }
        }

        if let Some(g) = args
            .iter()
            .find(|&&g| !(g >= 0.0 && g <= 0.25 + ARG_BOUND_SLACK))
        {
            return Err(Error::Numerical(format!(
                "kernel argument {g} escaped [0, 1/4]"
            )));
        }
        Ok(EdwardGrid {
            lambda,
            mu,
            n,
            weights,
            args,
        })
    }

    /// Largest `g(x, y)` over the nodes.
    pub fn max_arg(&self) -> f64 {
        self.args.iter().copied().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ w_i Φ(g_i)`.
    pub fn integrate<F>(&self, mut phi: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut vals = Vec::with_capacity(self.weights.len());
        for (&w, &g) in self.weights.iter().zip(&self.args) {
            vals.push(w * phi(g)?);
        }
        Ok(pairwise_sum(&vals))
    }
}

/// Quadrature options: relative tolerance and node budget per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub tol: f64,
    pub max_nodes: usize,
}

impl QuadOptions {
    pub fn new(tol: f64) -> Self {
        QuadOptions {
            tol,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(domain(format!("quadrature tolerance must be > 0 (got {})", self.tol)));
        }
        if !(START_NODES..=MAX_RULE_NODES).contains(&self.max_nodes) {
            return Err(domain(format!(
                "quadrature budget {} outside {START_NODES}..={MAX_RULE_NODES}",
                self.max_nodes
            )));
        }
        Ok(())
    }
}

/// Node-doubling driver around [`EdwardGrid::integrate`].
pub fn integrate_edward<F>(lambda: f64, mu: f64, opts: QuadOptions, mut phi: F) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    opts.validate()?;
    let mut n = START_NODES;
    let mut prev = EdwardGrid::new(lambda, mu, n)?.integrate(&mut phi)?;
    let mut history = Vec::new();
    loop {
        let next_n = 2 * n;
        if next_n > opts.max_nodes {
            return Ok(QuadResult {
                value: prev,
                nodes_per_axis: n,
                error_estimate: history.last().copied().unwrap_or(f64::INFINITY),
                converged: false,
                error_history: history,
            });
        }
        let cur = EdwardGrid::new(lambda, mu, next_n)?.integrate(&mut phi)?;
        let err = (cur - prev).abs();
        history.push(err);
        n = next_n;
        if err <= opts.tol * cur.abs() {
            return Ok(QuadResult {
                value: cur,
                nodes_per_axis: n,
                error_estimate: err,
                converged: true,
                error_history: history,
            });
        }
        prev = cur;
    }
}

/// `∬ y^λ (1−x)^{λ−1} (1−y)^{μ−1} (1−xy)^{1−λ−μ} dx dy`, which equals
/// `Γ(λ)Γ(μ)/Γ(λ+μ)`.
pub fn edward_integral(lambda: f64, mu: f64, tol: f64) -> Result<QuadResult> {
    integrate_edward(lambda, mu, QuadOptions::new(tol), |_| Ok(1.0))
}

pub const MAX_SHIFT: u32 = 16;

/// The Edward kernel multiplied by `g(x,y)^n`; equals
/// `Γ(λ+n)Γ(μ+n)/Γ(λ+μ+2n)`.
pub fn shifted_edward(lambda: f64, mu: f64, n: u32, tol: f64) -> Result<QuadResult> {
    shifted_edward_with(lambda, mu, n, QuadOptions::new(tol))
}

pub fn shifted_edward_with(lambda: f64, mu: f64, n: u32, opts: QuadOptions) -> Result<QuadResult> {
    if n > MAX_SHIFT {
        return Err(domain(format!("shift n = {n} exceeds {MAX_SHIFT}")));
    }
    integrate_edward(lambda, mu, opts, |g| Ok(g.powi(n as i32)))
}

/// Which series sits under the integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Form {
    /// Bessel-Maitland `J(w) = master(−w)`.
    J,
    /// Unsigned master series `E(w)`.
    E,
}

/// `∬ K(x,y) F(a·g(x,y)) dx dy` with `F` the J- or E-form of the master
/// series. Each node evaluates the series at a tenth of the quadrature
/// tolerance.
pub fn theorem_lhs(mp: &MasterParams, lambda: f64, mu: f64, a: f64, form: Form, tol: f64) -> Result<QuadResult> {
    theorem_lhs_with(mp, lambda, mu, a, form, QuadOptions::new(tol))
}

pub fn theorem_lhs_with(
    mp: &MasterParams,
    lambda: f64,
    mu: f64,
    a: f64,
    form: Form,
    opts: QuadOptions,
) -> Result<QuadResult> {
    mp.validate()?;
    if !a.is_finite() {
        return Err(domain("a must be finite"));
    }
    if !mp.admits(a.abs() * 0.25) {
        return Err(domain(format!(
            "series diverges on the kernel range |z| <= |a|/4 = {}",
            a.abs() * 0.25
        )));
    }
    let series_tol = (opts.tol / 10.0).clamp(MIN_TOL, MAX_TOL);
    integrate_edward(lambda, mu, opts, |g| {
        let w = a * g;
        let v = match form {
            Form::J => bessel_maitland(mp, w, series_tol)?,
            Form::E => master_series(mp, w, series_tol)?,
        };
        if v.is_converged() {
            Ok(v.value)
        } else {
            Err(Error::Numerical(format!(
                "series at node argument {w} ended with {:?}",
                v.status
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gammakit::gamma_ratio;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn beta_fn(a: f64, b: f64) -> f64 {
        gamma_ratio(&[a, b], &[a + b]).unwrap().to_f64()
    }

    #[test]
    fn one_point_rule_is_midpoint() {
        let r = jacobi_rule(1, 0.0).unwrap();
        assert!((r.nodes[0] - 0.5).abs() < 1e-16);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn legendre_rule_known_nodes() {
        // 2-point Gauss-Legendre on [0,1]: 1/2 ∓ 1/(2√3)
        let r = jacobi_rule(2, 0.0).unwrap();
        let d = 0.5 / 3f64.sqrt();
        assert!((r.nodes[0] - (0.5 - d)).abs() < 1e-15);
        assert!((r.nodes[1] - (0.5 + d)).abs() < 1e-15);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weight_sums_match_moment() {
        let r = jacobi_rule(4, 1.0).unwrap();
        assert!((r.weights.iter().sum::<f64>() - 0.5).abs() < 1e-15, "{:e}", r.weights.iter().sum::<f64>() - 0.5);
        for (n, e) in [(7, -0.6), (33, 2.5), (256, -0.25), (512, 0.5)] {
            let r = jacobi_rule(n, e).unwrap();
            let s: f64 = r.weights.iter().sum();
            assert!(rel(s, 1.0 / (e + 1.0)) < 1e-12, "n = {n}, e = {e}: {s}");
        }
    }

    #[test]
    fn rule_is_exact_to_degree_2n_minus_1() {
        for (n, left, right) in [(5, -0.5, 0.0), (12, 1.7, 0.0), (9, -0.3, 1.4), (20, 0.0, -0.7)] {
            let r = gauss_jacobi(n, left, right).unwrap();
            for k in 0..2 * n {
                let q: f64 = r
                    .nodes
                    .iter()
                    .zip(&r.weights)
                    .map(|(&u, &w)| w * u.powi(k as i32))
                    .sum();
                let exact = beta_fn(left + 1.0 + k as f64, right + 1.0);
                assert!(rel(q, exact) < 1e-11, "n={n} k={k}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn rule_rejects_bad_input() {
        assert!(jacobi_rule(0, 0.0).is_err());
        assert!(jacobi_rule(513, 0.0).is_err());
        assert!(jacobi_rule(4, -1.0).is_err());
        assert!(gauss_jacobi(4, 0.0, -1.5).is_err());
    }

    #[test]
    fn edward_examples() {
        for (l, m, expected) in [
            (2.0, 1.0, 0.5),
            (1.5, 0.5, std::f64::consts::FRAC_PI_2),
            (3.0, 2.0, 1.0 / 12.0),
        ] {
            let q = edward_integral(l, m, 1e-10).unwrap();
            assert!(q.converged);
            assert!(rel(q.value, expected) < 1e-10, "({l},{m}): {}", q.value);
        }
    }

    #[test]
    fn shifted_examples() {
        let q0 = shifted_edward(1.5, 0.7, 0, 1e-10).unwrap();
        let e = edward_integral(1.5, 0.7, 1e-10).unwrap();
        assert_eq!(q0.value, e.value);
        assert!(rel(shifted_edward(2.0, 1.0, 1, 1e-10).unwrap().value, 1.0 / 12.0) < 1e-9);
        assert!(rel(shifted_edward(1.0, 1.0, 2, 1e-10).unwrap().value, 1.0 / 30.0) < 1e-9);
        assert!(shifted_edward(1.0, 1.0, 17, 1e-10).is_err());
    }

    #[test]
    fn arguments_stay_in_quarter_interval() {
        for (l, m) in [(0.6, 0.5), (4.0, 2.0), (1.0, 1.0)] {
            let grid = EdwardGrid::new(l, m, 32).unwrap();
            assert!(grid.max_arg() <= 0.25 + ARG_BOUND_SLACK);
            assert!(grid.max_arg() > 0.24);
        }
    }

    #[test]
    fn budget_exhaustion_reports_nonconvergence() {
        let opts = QuadOptions {
            tol: 1e-300,
            max_nodes: 32,
        };
        let q = integrate_edward(0.6, 0.5, opts, |g| Ok(g.sqrt())).unwrap();
        assert!(!q.converged);
        assert_eq!(q.nodes_per_axis, 32);
    }

    #[test]
    fn theorem_lhs_at_a_zero() {
        let mp = MasterParams::new(1.0, 2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let q = theorem_lhs(&mp, 2.0, 1.0, 0.0, Form::J, 1e-10).unwrap();
        // edward(2, 1) / Γ(2)
        assert!(rel(q.value, 0.5) < 1e-10);
    }

    #[test]
    fn theorem_lhs_spot_values() {
        let mp = MasterParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let e = theorem_lhs(&mp, 2.0, 1.0, 1.0, Form::E, 1e-10).unwrap();
        assert!((e.value - 0.592_296_5).abs() < 1e-7, "{}", e.value);
        let j = theorem_lhs(&mp, 2.0, 1.0, 1.0, Form::J, 1e-10).unwrap();
        assert!((j.value - 0.424_436_4).abs() < 1e-7, "{}", j.value);
    }

    #[test]
    fn pairwise_sum_is_order_fixed() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        assert_eq!(pairwise_sum(&xs).to_bits(), pairwise_sum(&xs).to_bits());
        assert!((pairwise_sum(&xs) - xs.iter().sum::<f64>()).abs() < 1e-12);
    }
}
