//! Identity checks: every identity pairs a quadrature left-hand side with a
//! closed-form right-hand side at one parameter point.
//!
//! Sweeps run a Cartesian grid per identity. Only the parameters an identity
//! actually reads are swept; the rest take the neutral values of
//! [`ParamPoint::NEUTRAL`], which are also the pins of the special cases.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gammakit::{delta_array, gamma_ratio, log_gamma, SignedLog};
use crate::quad::{
    integrate_edward, theorem_lhs_with, Form, QuadOptions, QuadResult, DEFAULT_MAX_NODES, MAX_SHIFT,
};
use crate::series::{MasterParams, SeriesStatus, SeriesValue};
use crate::wright::{
    classify, hyp_pfq, theorem_rhs_pfq, theorem_rhs_wright, wright_psi, PfqSpec, WrightSpec,
};

/// Relative tolerance of every left-hand-side quadrature.
pub const LHS_QUAD_TOL: f64 = 1e-11;
/// Tolerance of every right-hand-side series.
pub const RHS_SERIES_TOL: f64 = 1e-14;
pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IdentityId {
    Edward,
    Termwise,
    Thm21Wright,
    Thm21Pfq,
    Sc1,
    Sc2,
    Sc3,
    Sc4,
    Sc5,
    Sc6,
    Sc7,
    Sc8,
    Sc9,
    Sc10,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Lambda,
    Mu,
    A,
    Eta,
    P,
    Q,
    Gamma,
    Delta,
    Nu,
    N,
}

use Param::*;

impl Param {
    pub const ALL: [Param; 10] = [Lambda, Mu, A, Eta, P, Q, Gamma, Delta, Nu, N];

    /// Field name in [`ParamPoint`] and in configs.
    pub fn name(self) -> &'static str {
        match self {
            Lambda => "lambda",
            Mu => "mu",
            A => "a",
            Eta => "eta",
            P => "p",
            Q => "q",
            Gamma => "gamma",
            Delta => "delta",
            Nu => "nu",
            N => "n",
        }
    }
}

impl IdentityId {
    pub const ALL: [IdentityId; 14] = [
        IdentityId::Edward,
        IdentityId::Termwise,
        IdentityId::Thm21Wright,
        IdentityId::Thm21Pfq,
        IdentityId::Sc1,
        IdentityId::Sc2,
        IdentityId::Sc3,
        IdentityId::Sc4,
        IdentityId::Sc5,
        IdentityId::Sc6,
        IdentityId::Sc7,
        IdentityId::Sc8,
        IdentityId::Sc9,
        IdentityId::Sc10,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Edward => "EDWARD",
            IdentityId::Termwise => "TERMWISE",
            IdentityId::Thm21Wright => "THM21_WRIGHT",
            IdentityId::Thm21Pfq => "THM21_PFQ",
            IdentityId::Sc1 => "SC1",
            IdentityId::Sc2 => "SC2",
            IdentityId::Sc3 => "SC3",
            IdentityId::Sc4 => "SC4",
            IdentityId::Sc5 => "SC5",
            IdentityId::Sc6 => "SC6",
            IdentityId::Sc7 => "SC7",
            IdentityId::Sc8 => "SC8",
            IdentityId::Sc9 => "SC9",
            IdentityId::Sc10 => "SC10",
        }
    }

    /// Special-case index 1..=10, if any.
    pub fn special_case(self) -> Option<u8> {
        let i = IdentityId::ALL.iter().position(|&x| x == self)?;
        (i >= 4).then(|| (i - 3) as u8)
    }

    /// Parameters read by this identity, in sweep order.
    pub fn relevant(self) -> &'static [Param] {
        use IdentityId::*;
        match self {
            Edward => &[Lambda, Mu],
            Termwise => &[Lambda, Mu, N],
            Thm21Wright | Thm21Pfq | Sc1 | Sc2 => &[Lambda, Mu, A, Eta, P, Q, Gamma, Delta, Nu],
            Sc3 | Sc4 => &[Lambda, Mu, A, Eta, Q, Gamma, Nu],
            Sc5 | Sc6 => &[Lambda, Mu, A, Eta, Gamma, Nu],
            Sc7 | Sc8 => &[Lambda, Mu, A, Eta, Nu],
            Sc9 | Sc10 => &[Lambda, Mu, A, Eta],
        }
    }

    /// Default verdict tolerance.
    pub fn default_tolerance(self) -> f64 {
        match self {
            IdentityId::Edward | IdentityId::Termwise => 1e-8,
            _ => 1e-6,
        }
    }

    /// Whether the right-hand side is a pFq series.
    pub fn is_pfq_form(self) -> bool {
        matches!(
            self,
            IdentityId::Thm21Pfq
                | IdentityId::Sc2
                | IdentityId::Sc4
                | IdentityId::Sc6
                | IdentityId::Sc8
                | IdentityId::Sc10
        )
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown identity id '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Canonical,
    AsPrinted,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Canonical => "canonical",
            Variant::AsPrinted => "asprinted",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "canonical" => Ok(Variant::Canonical),
            "asprinted" | "as_printed" | "as-printed" => Ok(Variant::AsPrinted),
            _ => Err(invalid(format!("unknown variant '{s}'"))),
        }
    }
}

/// A full parameter point. `nu` is the order as it appears in each
/// identity's own statement: the J-form theorem uses `β = ν + 1`, the first
/// eight special cases `β = ν`, the last two `β = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub lambda: f64,
    pub mu: f64,
    pub a: f64,
    pub eta: f64,
    pub p: f64,
    pub q: f64,
    pub gamma: f64,
    pub delta: f64,
    pub nu: f64,
    pub n: u32,
}

impl Default for ParamPoint {
    fn default() -> Self {
        ParamPoint::NEUTRAL
    }
}

impl ParamPoint {
    pub const NEUTRAL: ParamPoint = ParamPoint {
        lambda: 1.0,
        mu: 1.0,
        a: 0.0,
        eta: 1.0,
        p: 1.0,
        q: 1.0,
        gamma: 1.0,
        delta: 1.0,
        nu: 0.0,
        n: 0,
    };

    pub fn set(&mut self, param: Param, value: f64) {
        match param {
            Lambda => self.lambda = value,
            Mu => self.mu = value,
            A => self.a = value,
            Eta => self.eta = value,
            P => self.p = value,
            Q => self.q = value,
            Gamma => self.gamma = value,
            Delta => self.delta = value,
            Nu => self.nu = value,
            N => self.n = value as u32,
        }
    }

    pub fn get(&self, param: Param) -> f64 {
        match param {
            Lambda => self.lambda,
            Mu => self.mu,
            A => self.a,
            Eta => self.eta,
            P => self.p,
            Q => self.q,
            Gamma => self.gamma,
            Delta => self.delta,
            Nu => self.nu,
            N => self.n as f64,
        }
    }

    /// Keeps the parameters `id` reads and resets the rest to their pins.
    pub fn normalized(&self, id: IdentityId) -> ParamPoint {
        let mut out = ParamPoint::NEUTRAL;
        for &param in id.relevant() {
            out.set(param, self.get(param));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipCause {
    Precondition,
    NonConvergence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped { cause: SkipCause, reason: String },
}

impl Verdict {
    fn skip(cause: SkipCause, reason: impl Into<String>) -> Self {
        Verdict::Skipped {
            cause,
            reason: reason.into(),
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped { .. } => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub id: IdentityId,
    pub variant: Variant,
    pub params: ParamPoint,
    pub tolerance: f64,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub abs_diff: Option<f64>,
    pub rel_diff: Option<f64>,
    pub verdict: Verdict,
}

type Skip = (SkipCause, String);

fn precondition(msg: impl Into<String>) -> Skip {
    (SkipCause::Precondition, msg.into())
}

fn from_error(e: Error) -> Skip {
    match e {
        Error::Numerical(m) => (SkipCause::NonConvergence, m),
        other => (SkipCause::Precondition, other.to_string()),
    }
}

fn bits(x: f64) -> u64 {
    // fold -0.0 onto 0.0 so equal parameters share a cache slot
    (x + 0.0).to_bits()
}

/// What a left-hand side integrates; doubles as the cache key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum LhsKey {
    Shifted {
        lambda: u64,
        mu: u64,
        n: u32,
    },
    Series {
        form: Form,
        /// η, β, γ, δ, p, q, λ, μ, a
        params: [u64; 9],
    },
}

impl LhsKey {
    fn series(form: Form, mp: &MasterParams, lambda: f64, mu: f64, a: f64) -> Self {
        LhsKey::Series {
            form,
            params: [mp.eta, mp.beta, mp.gamma, mp.delta, mp.p, mp.q, lambda, mu, a].map(bits),
        }
    }

    fn evaluate(&self, max_nodes: usize) -> Result<QuadResult> {
        let opts = QuadOptions {
            tol: LHS_QUAD_TOL,
            max_nodes,
        };
        match *self {
            LhsKey::Shifted { lambda, mu, n } => {
                let (l, m) = (f64::from_bits(lambda), f64::from_bits(mu));
                integrate_edward(l, m, opts, |g| Ok(g.powi(n as i32)))
            }
            LhsKey::Series { form, params } => {
                let [eta, beta, gamma, delta, p, q, l, m, a] = params.map(f64::from_bits);
                let mp = MasterParams::new(eta, beta, gamma, delta, p, q)?;
                theorem_lhs_with(&mp, l, m, a, form, opts)
            }
        }
    }
}

/// Closed-form right-hand sides.
#[derive(Debug, Clone)]
enum Rhs {
    Exact(f64),
    TheoremWright {
        mp: MasterParams,
        lambda: f64,
        mu: f64,
        a: f64,
    },
    TheoremPfq {
        mp: MasterParams,
        lambda: f64,
        mu: f64,
        a: f64,
    },
    Wright {
        spec: WrightSpec,
        prefactor: SignedLog,
        z: f64,
    },
    Pfq {
        spec: PfqSpec,
        z: f64,
    },
}

impl Rhs {
    fn evaluate(&self) -> Result<SeriesValue> {
        let tol = RHS_SERIES_TOL;
        match self {
            Rhs::Exact(v) => Ok(SeriesValue {
                value: *v,
                terms_used: 0,
                tail_estimate: 0.0,
                status: SeriesStatus::Converged,
            }),
            Rhs::TheoremWright { mp, lambda, mu, a } => theorem_rhs_wright(mp, *lambda, *mu, *a, tol),
            Rhs::TheoremPfq { mp, lambda, mu, a } => theorem_rhs_pfq(mp, *lambda, *mu, *a, tol),
            Rhs::Wright { spec, prefactor, z } => {
                Ok(wright_psi(spec, *z, tol)?.scaled(*prefactor))
            }
            Rhs::Pfq { spec, z } => hyp_pfq(spec, *z, tol),
        }
    }
}

struct Plan {
    lhs: LhsKey,
    rhs: Rhs,
}

fn positive_integer(x: f64, name: &str) -> std::result::Result<usize, Skip> {
    if x >= 1.0 && x <= 64.0 && x == x.floor() {
        Ok(x as usize)
    } else {
        Err(precondition(format!("{name} = {x} must be a positive integer for the pFq form")))
    }
}

fn ipow(k: usize) -> f64 {
    (k as f64).powi(k as i32)
}

/// Series parameters of the special case after its substitutions.
fn special_case_params(sc: u8, pt: &ParamPoint) -> std::result::Result<MasterParams, Skip> {
    let beta = if sc >= 9 { 1.0 } else { pt.nu };
    if sc <= 8 && !(pt.nu > 0.0) {
        return Err(precondition(format!("ν = {} must be > 0 after ν → ν − 1", pt.nu)));
    }
    MasterParams::new(pt.eta, beta, pt.gamma, pt.delta, pt.p, pt.q).map_err(from_error)
}

/// Right-hand side of a special case in its own displayed shape.
fn special_case_rhs(sc: u8, pt: &ParamPoint, mp: &MasterParams, variant: Variant) -> std::result::Result<Rhs, Skip> {
    let (l, m, a) = (pt.lambda, pt.mu, pt.a);
    let printed = variant == Variant::AsPrinted;
    if sc % 2 == 1 {
        // Wright form with argument +a; printed lower pair reads (η, ν)
        let lower_pair = if !printed {
            (mp.beta, mp.eta)
        } else if sc == 9 {
            return Err(precondition(
                "printed lower pair (η, ν) has weight ν = 0 after setting ν = 0",
            ));
        } else {
            (mp.eta, pt.nu)
        };
        let (upper, lower, prefactor) = match sc {
            1 => (
                vec![(mp.gamma, mp.q), (l, 1.0), (m, 1.0), (1.0, 1.0)],
                vec![lower_pair, (mp.delta, mp.p), (l + m, 2.0)],
                log_gamma(mp.delta).map_err(from_error)? / log_gamma(mp.gamma).map_err(from_error)?,
            ),
            3 | 5 => (
                vec![(mp.gamma, mp.q), (l, 1.0), (m, 1.0)],
                vec![lower_pair, (l + m, 2.0)],
                log_gamma(mp.gamma).map_err(from_error)?.recip(),
            ),
            _ => (
                vec![(1.0, 1.0), (l, 1.0), (m, 1.0)],
                vec![lower_pair, (l + m, 2.0)],
                SignedLog::ONE,
            ),
        };
        let spec = WrightSpec::new(upper, lower).map_err(from_error)?;
        if !classify(&spec).admits(a) {
            return Err(precondition(format!(
                "Wright series with margin {} does not converge at z = {a}",
                classify(&spec).margin
            )));
        }
        return Ok(Rhs::Wright { spec, prefactor, z: a });
    }

    // pFq forms with argument +a·(rescaling)
    let eta = positive_integer(mp.eta, "η")?;
    let p = positive_integer(mp.p, "p")?;
    let q = positive_integer(mp.q, "q")?;
    let delta = |k: usize, x: f64| delta_array(k, x).map(|d| d.entries).map_err(from_error);
    if printed && sc == 10 {
        return Err(precondition(
            "printed lower row Δ(η; ν) contains the pole 0 after setting ν = 0",
        ));
    }
    let (mut upper, mut lower, z) = match sc {
        2 => {
            let mut lower = delta(eta, mp.beta)?;
            lower.extend(delta(p, mp.delta)?);
            (delta(q, mp.gamma)?, lower, a * ipow(q) / (4.0 * ipow(eta) * ipow(p)))
        }
        4 => (delta(q, mp.gamma)?, delta(eta, mp.beta)?, a * ipow(q) / (4.0 * ipow(eta))),
        6 => (vec![mp.gamma], delta(eta, mp.beta)?, a / (4.0 * ipow(eta))),
        // the printed 2F drops the upper 1
        _ => (
            if printed { vec![] } else { vec![1.0] },
            delta(eta, mp.beta)?,
            a / (4.0 * ipow(eta)),
        ),
    };
    upper.extend([l, m]);
    if sc == 2 {
        upper.push(1.0);
    }
    lower.extend(delta(2, l + m)?);
    let prefactor = gamma_ratio(&[l, m], &[mp.beta, l + m]).map_err(from_error)?;
    if !z.is_finite() {
        return Err(precondition("non-finite pFq argument"));
    }
    Ok(Rhs::Pfq {
        spec: PfqSpec {
            upper,
            lower,
            prefactor,
        },
        z,
    })
}

fn check_lambda_mu(pt: &ParamPoint) -> std::result::Result<(), Skip> {
    if !(pt.lambda > 0.0 && pt.mu > 0.0 && pt.lambda.is_finite() && pt.mu.is_finite()) {
        return Err(precondition(format!(
            "λ = {} and μ = {} must be > 0",
            pt.lambda, pt.mu
        )));
    }
    if !pt.a.is_finite() {
        return Err(precondition("a must be finite"));
    }
    Ok(())
}

fn plan(id: IdentityId, pt: &ParamPoint, variant: Variant) -> std::result::Result<Plan, Skip> {
    check_lambda_mu(pt)?;
    let (l, m) = (pt.lambda, pt.mu);
    if variant == Variant::AsPrinted && id.special_case().is_none() {
        return Err(precondition(format!("{id} has no printed variant")));
    }
    match id {
        IdentityId::Edward | IdentityId::Termwise => {
            if pt.n > MAX_SHIFT {
                return Err(precondition(format!("n = {} exceeds {MAX_SHIFT}", pt.n)));
            }
            let nf = pt.n as f64;
            let exact = gamma_ratio(&[l + nf, m + nf], &[l + m + 2.0 * nf]).map_err(from_error)?;
            Ok(Plan {
                lhs: LhsKey::Shifted {
                    lambda: bits(l),
                    mu: bits(m),
                    n: pt.n,
                },
                rhs: Rhs::Exact(exact.to_f64()),
            })
        }
        IdentityId::Thm21Wright | IdentityId::Thm21Pfq => {
            let mp = MasterParams::new(pt.eta, pt.nu + 1.0, pt.gamma, pt.delta, pt.p, pt.q)
                .map_err(from_error)?;
            check_margin(&mp)?;
            let rhs = if id == IdentityId::Thm21Pfq {
                positive_integer(mp.eta, "η")?;
                positive_integer(mp.p, "p")?;
                positive_integer(mp.q, "q")?;
                Rhs::TheoremPfq {
                    mp,
                    lambda: l,
                    mu: m,
                    a: pt.a,
                }
            } else {
                Rhs::TheoremWright {
                    mp,
                    lambda: l,
                    mu: m,
                    a: pt.a,
                }
            };
            Ok(Plan {
                lhs: LhsKey::series(Form::J, &mp, l, m, pt.a),
                rhs,
            })
        }
        _ => {
            let sc = id.special_case().expect("special case id");
            let mp = special_case_params(sc, pt)?;
            check_margin(&mp)?;
            let rhs = special_case_rhs(sc, pt, &mp, variant)?;
            Ok(Plan {
                lhs: LhsKey::series(Form::E, &mp, l, m, pt.a),
                rhs,
            })
        }
    }
}

fn check_margin(mp: &MasterParams) -> std::result::Result<(), Skip> {
    if !(mp.margin() > 0.0) {
        return Err(precondition(format!(
            "η + p − q = {} must be > 0",
            mp.margin()
        )));
    }
    Ok(())
}

fn skipped(id: IdentityId, variant: Variant, params: ParamPoint, tol: f64, lhs: Option<f64>, skip: Skip) -> IdentityReport {
    IdentityReport {
        id,
        variant,
        params,
        tolerance: tol,
        lhs,
        rhs: None,
        abs_diff: None,
        rel_diff: None,
        verdict: Verdict::skip(skip.0, skip.1),
    }
}

fn assemble(
    id: IdentityId,
    variant: Variant,
    params: ParamPoint,
    tol: f64,
    lhs: &Result<QuadResult>,
    rhs: &Rhs,
) -> IdentityReport {
    let lhs = match lhs {
        Ok(q) => q,
        Err(e) => return skipped(id, variant, params, tol, None, from_error(e.clone())),
    };
    if !lhs.converged && !(lhs.error_estimate <= 0.1 * tol * lhs.value.abs()) {
        return skipped(
            id,
            variant,
            params,
            tol,
            Some(lhs.value),
            (
                SkipCause::NonConvergence,
                format!(
                    "quadrature stopped at {} nodes per axis with error estimate {:e}",
                    lhs.nodes_per_axis, lhs.error_estimate
                ),
            ),
        );
    }
    let rhs = match rhs.evaluate() {
        Ok(v) if v.status == SeriesStatus::Converged => v.value,
        Ok(v) if v.status == SeriesStatus::OutsideDomain => {
            return skipped(id, variant, params, tol, Some(lhs.value), precondition("right-hand series outside its convergence domain"))
        }
        Ok(v) => {
            return skipped(
                id,
                variant,
                params,
                tol,
                Some(lhs.value),
                (
                    SkipCause::NonConvergence,
                    format!("right-hand series stopped after {} terms", v.terms_used),
                ),
            )
        }
        Err(e) => return skipped(id, variant, params, tol, Some(lhs.value), from_error(e)),
    };
    let abs_diff = (lhs.value - rhs).abs();
    let rel_diff = abs_diff / lhs.value.abs().max(rhs.abs()).max(1e-300);
    IdentityReport {
        id,
        variant,
        params,
        tolerance: tol,
        lhs: Some(lhs.value),
        rhs: Some(rhs),
        abs_diff: Some(abs_diff),
        rel_diff: Some(rel_diff),
        verdict: if rel_diff <= tol { Verdict::Pass } else { Verdict::Fail },
    }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(invalid(format!("verdict tolerance must be > 0 (got {tol})")));
    }
    Ok(())
}

/// Checks one identity at one point. Parameters the identity does not read
/// are reset to their pins; unmet preconditions give a `Skipped` verdict.
pub fn verify_identity(id: IdentityId, params: &ParamPoint, tol: f64, variant: Variant) -> Result<IdentityReport> {
    verify_identity_with(id, params, tol, variant, DEFAULT_MAX_NODES)
}

pub fn verify_identity_with(
    id: IdentityId,
    params: &ParamPoint,
    tol: f64,
    variant: Variant,
    max_nodes: usize,
) -> Result<IdentityReport> {
    check_tolerance(tol)?;
    check_budget(max_nodes)?;
    let pt = params.normalized(id);
    Ok(match plan(id, &pt, variant) {
        Err(skip) => skipped(id, variant, pt, tol, None, skip),
        Ok(plan) => assemble(id, variant, pt, tol, &plan.lhs.evaluate(max_nodes), &plan.rhs),
    })
}

fn check_budget(max_nodes: usize) -> Result<()> {
    QuadOptions {
        tol: LHS_QUAD_TOL,
        max_nodes,
    }
    .validate()
}

fn default_ids() -> Vec<IdentityId> {
    IdentityId::ALL.to_vec()
}
fn default_lambda_mu() -> Vec<f64> {
    vec![0.75, 1.5, 2.5]
}
fn default_a() -> Vec<f64> {
    vec![-2.0, -1.0, -0.25, 0.25, 1.0, 2.0]
}
fn default_weights() -> Vec<f64> {
    vec![1.0, 2.0]
}
fn default_gamma_delta() -> Vec<f64> {
    vec![1.0, 2.5]
}
fn default_nu() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}
fn default_n() -> Vec<u32> {
    (0..=5).collect()
}
fn default_budget() -> usize {
    DEFAULT_MAX_NODES
}
fn default_variants() -> Vec<Variant> {
    vec![Variant::Canonical, Variant::AsPrinted]
}

/// Sweep description. Missing fields in a JSON config take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_ids")]
    pub ids: Vec<IdentityId>,
    #[serde(default = "default_lambda_mu")]
    pub lambda: Vec<f64>,
    #[serde(default = "default_lambda_mu")]
    pub mu: Vec<f64>,
    #[serde(default = "default_a")]
    pub a: Vec<f64>,
    #[serde(default = "default_weights")]
    pub eta: Vec<f64>,
    #[serde(default = "default_weights")]
    pub p: Vec<f64>,
    #[serde(default = "default_weights")]
    pub q: Vec<f64>,
    #[serde(default = "default_gamma_delta")]
    pub gamma: Vec<f64>,
    #[serde(default = "default_gamma_delta")]
    pub delta: Vec<f64>,
    #[serde(default = "default_nu")]
    pub nu: Vec<f64>,
    #[serde(default = "default_n")]
    pub n: Vec<u32>,
    /// Verdict tolerance; `None` uses each identity's default.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default = "default_budget")]
    pub quad_budget: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_variants")]
    pub variants: Vec<Variant>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config takes every default")
    }
}

impl SweepConfig {
    fn values(&self, param: Param) -> Vec<f64> {
        match param {
            Lambda => self.lambda.clone(),
            Mu => self.mu.clone(),
            A => self.a.clone(),
            Eta => self.eta.clone(),
            P => self.p.clone(),
            Q => self.q.clone(),
            Gamma => self.gamma.clone(),
            Delta => self.delta.clone(),
            Nu => self.nu.clone(),
            N => self.n.iter().map(|&n| n as f64).collect(),
        }
    }

    fn variants_for(&self, id: IdentityId) -> Vec<Variant> {
        let mut vs: Vec<Variant> = self
            .variants
            .iter()
            .copied()
            .filter(|&v| v == Variant::Canonical || id.special_case().is_some())
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    fn grid_size(&self, id: IdentityId) -> usize {
        id.relevant()
            .iter()
            .map(|&p| self.values(p).len())
            .fold(1usize, |acc, k| acc.saturating_mul(k))
    }

    /// Number of reports the sweep will produce.
    pub fn report_count(&self) -> usize {
        self.ids
            .iter()
            .map(|&id| self.grid_size(id).saturating_mul(self.variants_for(id).len()))
            .fold(0usize, |acc, k| acc.saturating_add(k))
    }

    pub fn validate(&self) -> Result<()> {
        if self.ids.is_empty() {
            return Err(invalid("sweep needs at least one identity id"));
        }
        if self.variants.is_empty() {
            return Err(invalid("sweep needs at least one variant"));
        }
        for param in Param::ALL {
            let vals = self.values(param);
            if vals.is_empty() {
                return Err(invalid(format!("parameter list '{}' is empty", param.name())));
            }
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(invalid(format!("parameter list '{}' has a non-finite value", param.name())));
            }
        }
        if let Some(t) = self.tolerance {
            check_tolerance(t)?;
        }
        check_budget(self.quad_budget)?;
        let count = self.report_count();
        if count > MAX_GRID_POINTS {
            return Err(invalid(format!(
                "sweep grid has {count} points, above the limit of {MAX_GRID_POINTS}"
            )));
        }
        Ok(())
    }

    /// Grid points of one identity in lexicographic order of the relevant
    /// parameter lists.
    pub fn points(&self, id: IdentityId) -> Vec<ParamPoint> {
        let mut points = vec![ParamPoint::NEUTRAL];
        for &param in id.relevant() {
            let vals = self.values(param);
            points = points
                .iter()
                .flat_map(|pt| {
                    vals.iter().map(move |&v| {
                        let mut next = *pt;
                        next.set(param, v);
                        next
                    })
                })
                .collect();
        }
        points
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

impl Counts {
    fn add(&mut self, v: &Verdict) {
        match v {
            Verdict::Pass => self.pass += 1,
            Verdict::Fail => self.fail += 1,
            Verdict::Skipped { .. } => self.skipped += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.skipped
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdCounts {
    pub id: IdentityId,
    pub variant: Variant,
    pub counts: Counts,
}

/// A point where the canonical and printed forms reach different verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub params: ParamPoint,
    pub canonical: Verdict,
    pub as_printed: Verdict,
    pub canonical_rel_diff: Option<f64>,
    pub as_printed_rel_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypoEntry {
    pub id: IdentityId,
    pub printed_form: String,
    pub canonical: Counts,
    pub as_printed: Counts,
    pub divergent_points: usize,
    pub first_divergence: Option<Divergence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub total: Counts,
    pub per_id: Vec<IdCounts>,
    pub per_variant: Vec<(Variant, Counts)>,
    pub typo_ledger: Vec<TypoEntry>,
}

impl SweepSummary {
    pub fn has_failures(&self) -> bool {
        self.total.fail > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub reports: Vec<IdentityReport>,
    pub summary: SweepSummary,
}

/// How the printed right-hand side of a special case differs from the
/// canonical one.
pub fn printed_form_note(sc: u8) -> &'static str {
    match sc {
        1 | 3 | 5 | 7 => "lower Wright pair printed as (η, ν), i.e. Γ(η + νk), instead of Γ(ν + ηk)",
        9 => "lower Wright pair printed as (η, ν) with ν = 0, a zero weight",
        2 | 4 | 6 => "printed form coincides with the canonical one",
        8 => "printed 2F omits the upper parameter 1 that cancels the n! of the pFq series",
        _ => "printed 2F omits the upper parameter 1 and its lower row Δ(η; ν) contains 0 at ν = 0",
    }
}

pub fn summarize(reports: &[IdentityReport]) -> SweepSummary {
    let mut total = Counts::default();
    let mut per_id: Vec<IdCounts> = Vec::new();
    let mut per_variant: Vec<(Variant, Counts)> = Vec::new();
    for r in reports {
        total.add(&r.verdict);
        match per_id.iter_mut().find(|c| c.id == r.id && c.variant == r.variant) {
            Some(c) => c.counts.add(&r.verdict),
            None => {
                let mut counts = Counts::default();
                counts.add(&r.verdict);
                per_id.push(IdCounts {
                    id: r.id,
                    variant: r.variant,
                    counts,
                });
            }
        }
        match per_variant.iter_mut().find(|(v, _)| *v == r.variant) {
            Some((_, c)) => c.add(&r.verdict),
            None => {
                let mut c = Counts::default();
                c.add(&r.verdict);
                per_variant.push((r.variant, c));
            }
        }
    }
    per_variant.sort_by_key(|(v, _)| *v);

    let mut typo_ledger = Vec::new();
    for id in IdentityId::ALL {
        let Some(sc) = id.special_case() else { continue };
        let canon: HashMap<[u64; 10], &IdentityReport> = reports
            .iter()
            .filter(|r| r.id == id && r.variant == Variant::Canonical)
            .map(|r| (point_key(&r.params), r))
            .collect();
        let printed: Vec<&IdentityReport> = reports
            .iter()
            .filter(|r| r.id == id && r.variant == Variant::AsPrinted)
            .collect();
        if canon.is_empty() && printed.is_empty() {
            continue;
        }
        let mut canonical = Counts::default();
        let mut as_printed = Counts::default();
        for r in reports.iter().filter(|r| r.id == id) {
            match r.variant {
                Variant::Canonical => canonical.add(&r.verdict),
                Variant::AsPrinted => as_printed.add(&r.verdict),
            }
        }
        let mut divergent_points = 0;
        let mut first_divergence = None;
        for pr in printed {
            let Some(cr) = canon.get(&point_key(&pr.params)) else { continue };
            if cr.verdict.label() != pr.verdict.label() {
                divergent_points += 1;
                if first_divergence.is_none() {
                    first_divergence = Some(Divergence {
                        params: pr.params,
                        canonical: cr.verdict.clone(),
                        as_printed: pr.verdict.clone(),
                        canonical_rel_diff: cr.rel_diff,
                        as_printed_rel_diff: pr.rel_diff,
                    });
                }
            }
        }
        typo_ledger.push(TypoEntry {
            id,
            printed_form: printed_form_note(sc).to_string(),
            canonical,
            as_printed,
            divergent_points,
            first_divergence,
        });
    }

    SweepSummary {
        total,
        per_id,
        per_variant,
        typo_ledger,
    }
}

fn point_key(p: &ParamPoint) -> [u64; 10] {
    [
        p.lambda, p.mu, p.a, p.eta, p.p, p.q, p.gamma, p.delta, p.nu, p.n as f64,
    ]
    .map(bits)
}

/// Runs every identity over its grid. Each distinct left-hand side is
/// integrated once; points run in parallel and come back in grid order.
pub fn sweep(config: &SweepConfig) -> Result<SweepOutput> {
    config.validate()?;
    struct Task {
        id: IdentityId,
        variant: Variant,
        params: ParamPoint,
        tol: f64,
        plan: std::result::Result<(usize, Rhs), Skip>,
    }

    let mut lhs_index: HashMap<LhsKey, usize> = HashMap::new();
    let mut lhs_keys: Vec<LhsKey> = Vec::new();
    let mut tasks = Vec::with_capacity(config.report_count());
    for &id in &config.ids {
        let tol = config.tolerance.unwrap_or(id.default_tolerance());
        let variants = config.variants_for(id);
        for params in config.points(id) {
            for &variant in &variants {
                let plan = plan(id, &params, variant).map(|p| {
                    let idx = *lhs_index.entry(p.lhs).or_insert_with(|| {
                        lhs_keys.push(p.lhs);
                        lhs_keys.len() - 1
                    });
                    (idx, p.rhs)
                });
                tasks.push(Task {
                    id,
                    variant,
                    params,
                    tol,
                    plan,
                });
            }
        }
    }

    let budget = config.quad_budget;
    let lhs_values: Vec<Result<QuadResult>> = lhs_keys.par_iter().map(|k| k.evaluate(budget)).collect();
    let reports: Vec<IdentityReport> = tasks
        .into_par_iter()
        .map(|t| match t.plan {
            Err(skip) => skipped(t.id, t.variant, t.params, t.tol, None, skip),
            Ok((idx, rhs)) => assemble(t.id, t.variant, t.params, t.tol, &lhs_values[idx], &rhs),
        })
        .collect();
    let summary = summarize(&reports);
    Ok(SweepOutput { reports, summary })
}

pub const CSV_HEADER: [&str; 17] = [
    "id", "variant", "lambda", "mu", "a", "eta", "p", "q", "gamma", "delta", "nu", "n", "lhs", "rhs",
    "rel_diff", "verdict", "reason",
];

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

/// CSV rendering with one row per report.
pub fn reports_to_csv(reports: &[IdentityReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Numerical(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in reports {
        let p = &r.params;
        let reason = match &r.verdict {
            Verdict::Skipped { reason, .. } => reason.clone(),
            _ => String::new(),
        };
        let mut row = vec![r.id.name().to_string(), r.variant.to_string()];
        row.extend(
            [p.lambda, p.mu, p.a, p.eta, p.p, p.q, p.gamma, p.delta, p.nu]
                .iter()
                .map(|v| v.to_string()),
        );
        row.push(p.n.to_string());
        row.extend([fmt_opt(r.lhs), fmt_opt(r.rhs), fmt_opt(r.rel_diff)]);
        row.extend([r.verdict.label().to_string(), reason]);
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Numerical(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Numerical(format!("csv: {e}")))
}
