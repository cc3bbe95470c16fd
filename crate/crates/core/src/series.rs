//! The master series
//!
//! ```text
//! E(z) = Σ_{n≥0} (γ)_{qn} z^n / ( Γ(ηn + β) (δ)_{pn} )
//! ```
//!
//! houses the whole Mittag-Leffler / Bessel-Maitland hierarchy: every named
//! function is a parameter substitution, and the Bessel-Maitland forms are the
//! same series at `-z`.
//!
//! Two term generators feed one truncation driver. When η, q and p are
//! positive integers the term ratio is a rational function of n and the terms
//! are produced by an exact recurrence in double-double arithmetic; otherwise
//! each term is assembled from log-gamma values, which cannot overflow.

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{domain, invalid, Error, Result};
use crate::gammakit::{log_gamma, SignedLog};
use crate::wright::{wright_psi, WrightSpec};

pub const MAX_TERMS: usize = 10_000;
pub const MIN_TOL: f64 = 1e-15;
pub const MAX_TOL: f64 = 1e-3;

/// Largest integer weight routed through the rational recurrence.
const MAX_RATIONAL_WEIGHT: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesStatus {
    Converged,
    MaxTermsReached,
    OutsideDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub terms_used: usize,
    /// Bound on truncation plus accumulated rounding error.
    pub tail_estimate: f64,
    pub status: SeriesStatus,
}

impl SeriesValue {
    pub(crate) fn outside() -> Self {
        SeriesValue {
            value: f64::NAN,
            terms_used: 0,
            tail_estimate: f64::INFINITY,
            status: SeriesStatus::OutsideDomain,
        }
    }

    pub(crate) fn exact(value: f64) -> Self {
        SeriesValue {
            value,
            terms_used: 1,
            tail_estimate: 0.0,
            status: SeriesStatus::Converged,
        }
    }

    pub fn is_converged(&self) -> bool {
        self.status == SeriesStatus::Converged
    }

    pub(crate) fn scaled(self, factor: SignedLog) -> Self {
        let f = factor.to_f64();
        SeriesValue {
            value: self.value * f,
            tail_estimate: self.tail_estimate * f.abs(),
            ..self
        }
    }
}

/// Sum of a short list of doubles, rounded once.
pub(crate) fn exact_sum(xs: &[f64]) -> f64 {
    xs.iter().fold(Dd::ZERO, |acc, &x| acc + Dd::from_f64(x)).to_f64()
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if (MIN_TOL..=MAX_TOL).contains(&tol) {
        Ok(())
    } else {
        Err(domain(format!(
            "series tolerance {tol} outside [{MIN_TOL}, {MAX_TOL}]"
        )))
    }
}

/// Truncation driver shared by every series in the crate.
///
/// Stops once three consecutive terms are below `tol · max(1, |S|)`, the
/// latest term ratio is below one, and the geometric tail bound
/// `|t_N| ρ / (1 - ρ)` (ρ the larger of the last two ratios) is below the
/// same threshold.
pub(crate) struct Accumulator {
    tol: f64,
    sum: Dd,
    abs_sum: f64,
    terms: usize,
    small_run: u32,
    prev_abs: f64,
    last_ratio: f64,
    prev_ratio: f64,
    tail: f64,
}

impl Accumulator {
    pub fn new(tol: f64) -> Self {
        Accumulator {
            tol,
            sum: Dd::ZERO,
            abs_sum: 0.0,
            terms: 0,
            small_run: 0,
            prev_abs: f64::NAN,
            last_ratio: f64::NAN,
            prev_ratio: f64::NAN,
            tail: f64::INFINITY,
        }
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    /// Adds a term; returns true when the series has converged.
    pub fn push(&mut self, t: Dd) -> Result<bool> {
        self.sum = self.sum + t;
        if !t.hi.is_finite() || !self.sum.hi.is_finite() {
            return Err(Error::Numerical(format!(
                "series term {} overflows double precision",
                self.terms
            )));
        }
        let a = t.hi.abs();
        self.abs_sum += a;
        if self.terms > 0 {
            self.prev_ratio = self.last_ratio;
            self.last_ratio = if self.prev_abs == 0.0 {
                if a == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                a / self.prev_abs
            };
        }
        self.prev_abs = a;
        self.terms += 1;

        let scale = self.sum.hi.abs().max(1.0);
        if a <= self.tol * scale {
            self.small_run += 1;
        } else {
            self.small_run = 0;
        }
        let rho = if self.prev_ratio.is_nan() {
            self.last_ratio
        } else {
            self.last_ratio.max(self.prev_ratio)
        };
        self.tail = if rho < 1.0 {
            a * rho / (1.0 - rho)
        } else {
            f64::INFINITY
        };
        Ok(self.small_run >= 3 && self.last_ratio < 1.0 && self.tail <= self.tol * scale)
    }

    /// Bound on the rounding error carried by the partial sum.
    fn rounding(&self) -> f64 {
        4.0 * f64::EPSILON * self.abs_sum
    }

    /// Marks the series as exactly terminated (all further terms vanish).
    pub fn finish_exact(self) -> SeriesValue {
        SeriesValue {
            value: self.sum.to_f64(),
            terms_used: self.terms,
            tail_estimate: self.rounding(),
            status: SeriesStatus::Converged,
        }
    }

    pub fn finish(self, converged: bool) -> SeriesValue {
        SeriesValue {
            value: self.sum.to_f64(),
            terms_used: self.terms,
            tail_estimate: self.tail + self.rounding(),
            status: if converged {
                SeriesStatus::Converged
            } else {
                SeriesStatus::MaxTermsReached
            },
        }
    }
}

/// Parameters of the master series.
///
/// `eta` is the gamma-argument weight (μ of the Bessel-Maitland forms, α of
/// the Mittag-Leffler forms), `beta` the gamma-argument offset (ν + 1 for the
/// Bessel-Maitland forms), `gamma`/`q` the upper generalized Pochhammer
/// symbol and `delta`/`p` the lower one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MasterParams {
    pub eta: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub p: f64,
    pub q: f64,
}

fn as_small_int(x: f64) -> Option<u32> {
    (x >= 1.0 && x <= MAX_RATIONAL_WEIGHT && x == x.floor()).then_some(x as u32)
}

impl MasterParams {
    pub fn new(eta: f64, beta: f64, gamma: f64, delta: f64, p: f64, q: f64) -> Result<Self> {
        let mp = MasterParams {
            eta,
            beta,
            gamma,
            delta,
            p,
            q,
        };
        mp.validate()?;
        Ok(mp)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.eta, self.beta, self.gamma, self.delta, self.p, self.q];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(invalid("master parameters must be finite"));
        }
        if self.eta < 0.0 {
            return Err(invalid(format!("η must be >= 0 (got {})", self.eta)));
        }
        if !(self.beta > 0.0) {
            return Err(invalid(format!("β must be > 0 (got {})", self.beta)));
        }
        for (name, v) in [
            ("γ", self.gamma),
            ("δ", self.delta),
            ("p", self.p),
            ("q", self.q),
        ] {
            if !(v > 0.0) {
                return Err(invalid(format!("{name} must be > 0 (got {v})")));
            }
        }
        if self.eta == 0.0 && !(self.q < self.p) {
            return Err(invalid("η = 0 requires q < p"));
        }
        Ok(())
    }

    /// Convergence margin `η + p − q`, correctly rounded.
    pub fn margin(&self) -> f64 {
        exact_sum(&[self.eta, self.p, -self.q])
    }

    /// Radius of the convergence disk when the margin is zero:
    /// `q^{-q} η^η p^p`.
    pub fn disk_radius(&self) -> f64 {
        let pow = |x: f64| if x == 0.0 { 1.0 } else { x.powf(x) };
        pow(self.eta) * pow(self.p) / pow(self.q)
    }

    /// True when the series converges at `z` under the margin rules.
    pub fn admits(&self, z: f64) -> bool {
        let m = self.margin();
        m > 0.0 || (m == 0.0 && z.abs() < self.disk_radius())
    }

    fn integer_weights(&self) -> Option<(u32, u32, u32)> {
        Some((
            as_small_int(self.eta)?,
            as_small_int(self.q)?,
            as_small_int(self.p)?,
        ))
    }
}

/// Rising product `Π_{i<k} (base + i)` in double-double.
#[inline]
fn rising_dd(base: f64, k: u32) -> Dd {
    let mut acc = Dd::from_f64(base);
    for i in 1..k {
        acc = acc * Dd::sum(base, i as f64);
    }
    acc
}

fn master_rational(mp: &MasterParams, z: f64, tol: f64, w: (u32, u32, u32)) -> Option<SeriesValue> {
    let (eta, q, p) = w;
    let first = log_gamma(mp.beta).ok()?.recip().to_f64();
    let zd = Dd::from_f64(z);
    let mut acc = Accumulator::new(tol);
    let mut t = Dd::from_f64(first);
    loop {
        if !t.is_finite() || t.hi.abs() > 1e300 {
            return None;
        }
        if acc.push(t).ok()? {
            return Some(acc.finish(true));
        }
        if acc.terms() >= MAX_TERMS {
            return Some(acc.finish(false));
        }
        let n = (acc.terms() - 1) as f64;
        let num = rising_dd(mp.gamma + mp.q * n, q);
        let den = rising_dd(mp.beta + mp.eta * n, eta) * rising_dd(mp.delta + mp.p * n, p);
        t = t * (num / den) * zd;
        if t.hi == 0.0 {
            // underflow: the remaining terms are below representable range
            return Some(acc.finish_exact());
        }
    }
}

fn master_log(mp: &MasterParams, z: f64, tol: f64) -> Result<SeriesValue> {
    let ln_z = z.abs().ln();
    let neg = z < 0.0;
    let lg = |x: f64| log_gamma(x).map(|s| s.log_abs);
    let base = lg(mp.delta)? - lg(mp.gamma)?;
    let mut acc = Accumulator::new(tol);
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        let ln_t = base + lg(mp.gamma + mp.q * nf)? - lg(mp.eta * nf + mp.beta)?
            - lg(mp.delta + mp.p * nf)?
            + nf * ln_z;
        let mag = if n == 0 { (-lg(mp.beta)?).exp() } else { ln_t.exp() };
        let t = if neg && n % 2 == 1 { -mag } else { mag };
        if acc.push(Dd::from_f64(t))? {
            return Ok(acc.finish(true));
        }
        if acc.terms() >= MAX_TERMS {
            return Ok(acc.finish(false));
        }
        n += 1;
    }
}

/// Evaluates the master series at `z` to relative tail tolerance `tol`.
///
/// Parameter and tolerance violations are errors; divergence at `z` is
/// reported through [`SeriesStatus::OutsideDomain`].
pub fn master_series(params: &MasterParams, z: f64, tol: f64) -> Result<SeriesValue> {
    params.validate()?;
    check_tol(tol)?;
    if !z.is_finite() {
        return Err(domain("series argument must be finite"));
    }
    if !params.admits(z) {
        return Ok(SeriesValue::outside());
    }
    if z == 0.0 {
        return Ok(SeriesValue::exact(log_gamma(params.beta)?.recip().to_f64()));
    }
    if let Some(w) = params.integer_weights() {
        if let Some(v) = master_rational(params, z, tol, w) {
            return Ok(v);
        }
    }
    master_log(params, z, tol)
}

/// Generalized Bessel-Maitland function: the master series at `-z`, with
/// `params.beta = ν + 1`.
pub fn bessel_maitland(params: &MasterParams, z: f64, tol: f64) -> Result<SeriesValue> {
    master_series(params, -z, tol)
}

/// Named members of the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NamedFunction {
    /// `E_α(z)`; args `[α]`.
    Ml1p,
    /// `E_{α,β}(z)`; args `[α, β]`.
    Ml2p,
    /// `E^γ_{α,β}(z)`; args `[α, β, γ]`.
    Prabhakar,
    /// `E^{γ,q}_{α,β}(z)`; args `[α, β, γ, q]`.
    ShuklaPrajapati,
    /// `E^{γ,δ}_{α,β}(z)`; args `[α, β, γ, δ]`.
    Salim,
    /// `E^{γ,δ,q}_{α,β,p}(z)`; args `[α, β, γ, δ, p, q]`.
    SalimFaraj,
    /// `J^μ_ν(z) = φ(μ, ν+1; −z)`; args `[μ, ν]`.
    BmBasic,
    /// `J^{μ,γ}_{ν,q}(z)`; args `[μ, ν, γ, q]`.
    BmQ,
    /// `J^{μ,q,p}_{ν,γ,δ}(z)`; args `[μ, ν, γ, δ, p, q]`.
    BmExt,
}

impl NamedFunction {
    pub const ALL: [NamedFunction; 9] = [
        NamedFunction::Ml1p,
        NamedFunction::Ml2p,
        NamedFunction::Prabhakar,
        NamedFunction::ShuklaPrajapati,
        NamedFunction::Salim,
        NamedFunction::SalimFaraj,
        NamedFunction::BmBasic,
        NamedFunction::BmQ,
        NamedFunction::BmExt,
    ];

    pub fn arity(self) -> usize {
        match self {
            NamedFunction::Ml1p => 1,
            NamedFunction::Ml2p | NamedFunction::BmBasic => 2,
            NamedFunction::Prabhakar => 3,
            NamedFunction::ShuklaPrajapati | NamedFunction::Salim | NamedFunction::BmQ => 4,
            NamedFunction::SalimFaraj | NamedFunction::BmExt => 6,
        }
    }

    /// Command-line name.
    pub fn cli_name(self) -> &'static str {
        match self {
            NamedFunction::Ml1p => "ml1p",
            NamedFunction::Ml2p => "ml2p",
            NamedFunction::Prabhakar => "prabhakar",
            NamedFunction::ShuklaPrajapati => "shukla_prajapati",
            NamedFunction::Salim => "salim",
            NamedFunction::SalimFaraj => "salim_faraj",
            NamedFunction::BmBasic => "bm_basic",
            NamedFunction::BmQ => "bm_q",
            NamedFunction::BmExt => "bm_ext",
        }
    }

    pub fn from_cli_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.cli_name() == s)
    }
}

/// How a named function is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reduction {
    /// `master_series(params, sign · z)` with `sign = -1` for the J forms.
    Master { params: MasterParams, negate_z: bool },
    /// `Σ (−z)^n / (n! Γ(μn + ν + 1))`, the Wright function `0Ψ1[; (ν+1, μ); −z]`.
    WrightPhi { mu: f64, nu: f64 },
}

/// Maps a named function and its arguments onto the master series.
pub fn reduce(name: NamedFunction, args: &[f64]) -> Result<Reduction> {
    if args.len() != name.arity() {
        return Err(invalid(format!(
            "{} takes {} arguments, got {}",
            name.cli_name(),
            name.arity(),
            args.len()
        )));
    }
    let master = |eta, beta, gamma, delta, p, q, negate_z| -> Result<Reduction> {
        if matches!(name, NamedFunction::Ml1p | NamedFunction::Ml2p) && !(eta > 0.0) {
            return Err(invalid("Mittag-Leffler order α must be > 0"));
        }
        Ok(Reduction::Master {
            params: MasterParams::new(eta, beta, gamma, delta, p, q)?,
            negate_z,
        })
    };
    match (name, args) {
        (NamedFunction::Ml1p, &[a]) => master(a, 1.0, 1.0, 1.0, 1.0, 1.0, false),
        (NamedFunction::Ml2p, &[a, b]) => master(a, b, 1.0, 1.0, 1.0, 1.0, false),
        (NamedFunction::Prabhakar, &[a, b, g]) => master(a, b, g, 1.0, 1.0, 1.0, false),
        (NamedFunction::ShuklaPrajapati, &[a, b, g, q]) => master(a, b, g, 1.0, 1.0, q, false),
        (NamedFunction::Salim, &[a, b, g, d]) => master(a, b, g, d, 1.0, 1.0, false),
        (NamedFunction::SalimFaraj, &[a, b, g, d, p, q]) => master(a, b, g, d, p, q, false),
        (NamedFunction::BmBasic, &[mu, nu]) => {
            if !(mu > 0.0) || !(nu > -1.0) {
                return Err(invalid("Bessel-Maitland J^μ_ν needs μ > 0 and ν > -1"));
            }
            Ok(Reduction::WrightPhi { mu, nu })
        }
        (NamedFunction::BmQ, &[mu, nu, g, q]) => master(mu, nu + 1.0, g, 1.0, 1.0, q, true),
        (NamedFunction::BmExt, &[mu, nu, g, d, p, q]) => master(mu, nu + 1.0, g, d, p, q, true),
        _ => unreachable!("arity checked above"),
    }
}

pub fn named_reduction(name: NamedFunction, args: &[f64], z: f64, tol: f64) -> Result<SeriesValue> {
    match reduce(name, args)? {
        Reduction::Master { params, negate_z } => {
            if negate_z {
                bessel_maitland(&params, z, tol)
            } else {
                master_series(&params, z, tol)
            }
        }
        Reduction::WrightPhi { mu, nu } => {
            let spec = WrightSpec::new(vec![], vec![(nu + 1.0, mu)])?;
            wright_psi(&spec, -z, tol)
        }
    }
}
