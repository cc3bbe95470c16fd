//! Wright generalized hypergeometric function `pΨq`, the ordinary `pFq`
//! series, the reduction between them when every weight is one, and the two
//! closed forms (Wright and `pFq`) of the main double-integral formula.

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{domain, invalid, Error, Result};
use crate::gammakit::{delta_array, gamma_ratio, log_gamma, SignedLog};
use crate::series::{check_tol, exact_sum, Accumulator, MasterParams, SeriesValue, MAX_TERMS};

/// `(offset, weight)` pairs of `pΨq`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WrightSpec {
    pub upper: Vec<(f64, f64)>,
    pub lower: Vec<(f64, f64)>,
}

impl WrightSpec {
    pub fn new(upper: Vec<(f64, f64)>, lower: Vec<(f64, f64)>) -> Result<Self> {
        let spec = WrightSpec { upper, lower };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for &(a, w) in &self.upper {
            if !a.is_finite() || !(w > 0.0) || !w.is_finite() {
                return Err(invalid(format!("upper pair ({a}, {w}) needs finite offset and weight > 0")));
            }
        }
        for &(b, w) in &self.lower {
            if !(b > 0.0) || !b.is_finite() || !(w > 0.0) || !w.is_finite() {
                return Err(invalid(format!("lower pair ({b}, {w}) needs offset > 0 and weight > 0")));
            }
        }
        Ok(())
    }

    fn offsets(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.upper.iter().map(|p| p.0).collect(),
            self.lower.iter().map(|p| p.0).collect(),
        )
    }

    /// `Π Γ(α_j) / Π Γ(β_j)`, the k = 0 term.
    pub fn leading_term(&self) -> Result<SignedLog> {
        let (a, b) = self.offsets();
        gamma_ratio(&a, &b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ConvergenceKind {
    Entire,
    Disk { radius: f64 },
    Unsupported,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceClass {
    pub margin: f64,
    pub kind: ConvergenceKind,
}

impl ConvergenceClass {
    pub fn admits(&self, z: f64) -> bool {
        match self.kind {
            ConvergenceKind::Entire => true,
            ConvergenceKind::Disk { radius } => z.abs() < radius,
            ConvergenceKind::Unsupported => false,
        }
    }
}

/// Margin `1 + ΣB − ΣA` and the resulting convergence regime.
pub fn classify(spec: &WrightSpec) -> ConvergenceClass {
    let mut terms = vec![1.0];
    terms.extend(spec.lower.iter().map(|p| p.1));
    terms.extend(spec.upper.iter().map(|p| -p.1));
    let margin = exact_sum(&terms);
    let kind = if margin > 0.0 {
        ConvergenceKind::Entire
    } else if margin == 0.0 {
        let ln_r: f64 = spec.lower.iter().map(|&(_, b)| b * b.ln()).sum::<f64>()
            - spec.upper.iter().map(|&(_, a)| a * a.ln()).sum::<f64>();
        ConvergenceKind::Disk { radius: ln_r.exp() }
    } else {
        ConvergenceKind::Unsupported
    };
    ConvergenceClass { margin, kind }
}

fn wright_scaled(spec: &WrightSpec, z: f64, tol: f64, factor: SignedLog) -> Result<SeriesValue> {
    spec.validate()?;
    check_tol(tol)?;
    if !z.is_finite() {
        return Err(domain("series argument must be finite"));
    }
    if !classify(spec).admits(z) {
        return Ok(SeriesValue::outside());
    }
    let lead = spec.leading_term()? * factor;
    if z == 0.0 || lead.is_zero() {
        return Ok(SeriesValue::exact(lead.to_f64()));
    }
    let ln_z = z.abs().ln();
    let mut acc = Accumulator::new(tol);
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        let t = if k == 0 {
            lead
        } else {
            let mut s = factor;
            for &(a, w) in &spec.upper {
                s = s * log_gamma(a + w * kf)?;
            }
            for &(b, w) in &spec.lower {
                s = s / log_gamma(b + w * kf)?;
            }
            s / log_gamma(kf + 1.0)? * SignedLog::new(kf * ln_z, if z < 0.0 && k % 2 == 1 { -1 } else { 1 })
        };
        if acc.push(Dd::from_f64(t.to_f64()))? {
            return Ok(acc.finish(true));
        }
        if acc.terms() >= MAX_TERMS {
            return Ok(acc.finish(false));
        }
        k += 1;
    }
}

/// `pΨq[(α_j, A_j); (β_j, B_j); z] = Σ_k Π Γ(α_j + A_j k) / Π Γ(β_j + B_j k) · z^k / k!`
pub fn wright_psi(spec: &WrightSpec, z: f64, tol: f64) -> Result<SeriesValue> {
    wright_scaled(spec, z, tol, SignedLog::ONE)
}

/// Ordinary generalized hypergeometric series with a constant prefactor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfqSpec {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub prefactor: SignedLog,
}

impl PfqSpec {
    pub fn new(upper: Vec<f64>, lower: Vec<f64>) -> Self {
        PfqSpec {
            upper,
            lower,
            prefactor: SignedLog::ONE,
        }
    }

    fn terminates(&self) -> bool {
        self.upper.iter().any(|&a| a <= 0.0 && a == a.floor())
    }

    fn admits(&self, z: f64) -> bool {
        let (p, q) = (self.upper.len(), self.lower.len());
        self.terminates() || p <= q || (p == q + 1 && z.abs() < 1.0)
    }
}

/// `prefactor · Σ_n Π (α_i)_n / Π (β_j)_n · z^n / n!`
pub fn hyp_pfq(spec: &PfqSpec, z: f64, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    if !z.is_finite() || spec.upper.iter().chain(&spec.lower).any(|x| !x.is_finite()) {
        return Err(domain("pFq parameters and argument must be finite"));
    }
    if let Some(&b) = spec.lower.iter().find(|&&b| b <= 0.0 && b == b.floor()) {
        return Err(Error::Pole(b));
    }
    if !spec.admits(z) {
        return Ok(SeriesValue::outside());
    }
    let lead = spec.prefactor.to_f64();
    if z == 0.0 || lead == 0.0 {
        return Ok(SeriesValue::exact(lead));
    }
    let zd = Dd::from_f64(z);
    let mut acc = Accumulator::new(tol);
    let mut t = Dd::from_f64(lead);
    loop {
        if !t.is_finite() || t.hi.abs() > 1e300 {
            return Err(Error::Numerical("pFq term overflow".into()));
        }
        if acc.push(t)? {
            return Ok(acc.finish(true));
        }
        if acc.terms() >= MAX_TERMS {
            return Ok(acc.finish(false));
        }
        let n = (acc.terms() - 1) as f64;
        let mut num = zd;
        for &a in &spec.upper {
            num = num * Dd::sum(a, n);
        }
        let mut den = Dd::from_f64(n + 1.0);
        for &b in &spec.lower {
            den = den * Dd::sum(b, n);
        }
        t = t * (num / den);
        if t.hi == 0.0 {
            return Ok(acc.finish_exact());
        }
    }
}

/// Rewrites a `pΨq` whose weights are all one as `prefactor · pFq`.
pub fn wright_to_pfq(spec: &WrightSpec) -> Result<PfqSpec> {
    spec.validate()?;
    if spec.upper.iter().chain(&spec.lower).any(|p| p.1 != 1.0) {
        return Err(invalid("Wright to pFq reduction needs every weight equal to 1"));
    }
    let (upper, lower) = spec.offsets();
    Ok(PfqSpec {
        prefactor: spec.leading_term()?,
        upper,
        lower,
    })
}

fn check_lambda_mu(lambda: f64, mu: f64) -> Result<()> {
    if !(lambda > 0.0) || !(mu > 0.0) || !lambda.is_finite() || !mu.is_finite() {
        return Err(invalid(format!("λ and μ must be > 0 (got {lambda}, {mu})")));
    }
    Ok(())
}

/// The `4Ψ3` of the main formula:
/// `[(λ,1), (μ,1), (γ,q), (1,1); (β,η), (δ,p), (λ+μ,2)]`.
pub fn theorem_wright_spec(mp: &MasterParams, lambda: f64, mu: f64) -> Result<WrightSpec> {
    mp.validate()?;
    check_lambda_mu(lambda, mu)?;
    if !(mp.eta > 0.0) {
        return Err(invalid("the Wright form needs η > 0"));
    }
    WrightSpec::new(
        vec![(lambda, 1.0), (mu, 1.0), (mp.gamma, mp.q), (1.0, 1.0)],
        vec![(mp.beta, mp.eta), (mp.delta, mp.p), (lambda + mu, 2.0)],
    )
}

/// `Γ(δ)/Γ(γ) · 4Ψ3[(λ,1),(μ,1),(γ,q),(1,1); (β,η),(δ,p),(λ+μ,2); −a]`.
///
/// With `mp.beta = ν + 1` this is the closed form of the double integral of
/// the Edward kernel against the Bessel-Maitland function `J(a·g(x,y))`.
/// Calling it with `-a` gives the form for the unsigned series `E(a·g)`.
pub fn theorem_rhs_wright(mp: &MasterParams, lambda: f64, mu: f64, a: f64, tol: f64) -> Result<SeriesValue> {
    let spec = theorem_wright_spec(mp, lambda, mu)?;
    if !(mp.margin() > 0.0) {
        return Ok(SeriesValue::outside());
    }
    let factor = log_gamma(mp.delta)? / log_gamma(mp.gamma)?;
    wright_scaled(&spec, -a, tol, factor)
}

fn as_positive_int(x: f64, name: &str) -> Result<usize> {
    if x >= 1.0 && x == x.floor() && x <= 64.0 {
        Ok(x as usize)
    } else {
        Err(invalid(format!("{name} must be a positive integer for the pFq form (got {x})")))
    }
}

/// Upper/lower lists and argument of the `pFq` form:
/// `[Δ(q;γ), λ, μ, 1; Δ(η;β), Δ(p;δ), Δ(2;λ+μ); −a q^q / (4 η^η p^p)]`
/// with prefactor `Γ(λ)Γ(μ) / (Γ(β)Γ(λ+μ))`.
pub fn theorem_pfq_spec(mp: &MasterParams, lambda: f64, mu: f64, a: f64) -> Result<(PfqSpec, f64)> {
    mp.validate()?;
    check_lambda_mu(lambda, mu)?;
    let eta = as_positive_int(mp.eta, "η")?;
    let p = as_positive_int(mp.p, "p")?;
    let q = as_positive_int(mp.q, "q")?;
    let mut upper = delta_array(q, mp.gamma)?.entries;
    upper.extend([lambda, mu, 1.0]);
    let mut lower = delta_array(eta, mp.beta)?.entries;
    lower.extend(delta_array(p, mp.delta)?.entries);
    lower.extend(delta_array(2, lambda + mu)?.entries);
    let ipow = |k: usize| (k as f64).powi(k as i32);
    let z = -a * ipow(q) / (4.0 * ipow(eta) * ipow(p));
    let prefactor = gamma_ratio(&[lambda, mu], &[mp.beta, lambda + mu])?;
    Ok((
        PfqSpec {
            upper,
            lower,
            prefactor,
        },
        z,
    ))
}

/// The `pFq` closed form of the main formula (integer η, p, q), obtained by
/// expanding every weighted Pochhammer symbol with Gauss multiplication.
pub fn theorem_rhs_pfq(mp: &MasterParams, lambda: f64, mu: f64, a: f64, tol: f64) -> Result<SeriesValue> {
    let (spec, z) = theorem_pfq_spec(mp, lambda, mu, a)?;
    if !(mp.margin() > 0.0) {
        return Ok(SeriesValue::outside());
    }
    hyp_pfq(&spec, z, tol)
}
