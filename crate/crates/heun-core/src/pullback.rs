//! Rational pull-back transformations between Fuchsian equations.
//!
//! A pull-back sends a solution `y(z)` of a source equation to
//! `Y(x) = theta(x) * y(phi(x))` where `phi` is a rational covering of the
//! projective line and `theta` is a radical prefactor
//! `prod_i (x - sigma_i)^(-xi_i)`.  This module provides:
//!
//! * exponent transport along `phi` — local exponents upstairs are
//!   `k*alpha + gamma` for branching index `k` and prefactor exponent
//!   `gamma` — with classification of the resulting points;
//! * root-free point counting above a set of critical values via
//!   squarefree decomposition: the covering branches only above those
//!   values exactly when the count is `d + 2`;
//! * prefactor synthesis from a choice of one exponent per downstairs
//!   singular point;
//! * the accessory parameter of a Heun target read off the first-order
//!   jets of `phi` and `theta`;
//! * the paired identity satisfied by the second local solutions (exponent
//!   `1-c` at the origin);
//! * exact verification of two-term identities by comparing truncated
//!   power series at random rational parameter points.

use crate::catalog::{FieldTag, ParamExprs, TransformationRecord};
use crate::expr::{Expr, ExprError};
use crate::factor::FieldRoots;
use crate::heun::HeunParams;
use crate::hpg::HypergeometricParams;
use crate::orbit::EquationParams;
use crate::poly::{render_poly, Polynomial};
use crate::ratfun::RationalFunction;
use crate::sample;
use crate::scalar::{OmegaRational, Rational, Scalar};
use crate::scheme::PointOnLine;
use crate::series::TruncatedSeries;
use std::collections::BTreeSet;
use thiserror::Error;

// ---------------------------------------------------------------------------
// Exponent transport
// ---------------------------------------------------------------------------

/// A pull-back `Y(x) = theta(x) * y(phi(x))` of a source equation.
#[derive(Debug, Clone)]
pub struct PullbackSpec<K: Scalar> {
    /// The covering map.
    pub phi: RationalFunction<K>,
    /// Prefactor `prod (x - sigma)^(-xi)` as `(sigma, xi)` pairs.
    pub theta: Vec<(K, K)>,
    /// The equation being pulled back.
    pub source: EquationParams<K>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityClass {
    /// An ordinary point of the transformed equation.
    Nonsingular,
    /// Exponent difference exactly 1 at a non-logarithmic point: removable
    /// by a further power prefactor.
    Irrelevant,
    /// A genuine singular point of the transformed equation.
    Relevant,
    /// Integer exponent difference of magnitude >= 2; apparent (harmless
    /// for monodromy) exactly when the point carries no logarithm.
    ApparentCandidate,
}

impl SingularityClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SingularityClass::Nonsingular => "nonsingular",
            SingularityClass::Irrelevant => "irrelevant",
            SingularityClass::Relevant => "relevant",
            SingularityClass::ApparentCandidate => "apparent-candidate",
        }
    }
}

/// One point of the transformed equation.
#[derive(Debug, Clone)]
pub struct SingularityReport<K: Scalar> {
    pub location: PointOnLine<K>,
    pub image: PointOnLine<K>,
    pub branch_index: usize,
    /// Upstairs local exponents `(k*alpha_1 + gamma, k*alpha_2 + gamma)`.
    pub exponents: (K, K),
    pub classification: SingularityClass,
    /// True when the classification relies on the unproven assumption that
    /// the image point carries no logarithmic solution.  Points above an
    /// image with non-integer exponent difference never need the
    /// assumption: distinct local monodromy eigenvalues rule logarithms
    /// out.
    pub nonlog_assumed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("covering map is constant")]
    ConstantMap,
    #[error("branch locus above {image} contains the factor {factor}, irreducible over {field}")]
    UnfactorableBranchLocus {
        image: String,
        factor: String,
        field: &'static str,
    },
}

fn point_label<K: Scalar>(p: &PointOnLine<K>) -> String {
    match p {
        PointOnLine::Finite(v) => format!("{v}"),
        PointOnLine::Infinity => "infinity".to_string(),
    }
}

/// Numerator of the fiber equation `phi(x) = v` for finite `v`, or the
/// denominator of `phi` for `v = infinity`.  The point `x = infinity` lies
/// in the fiber exactly when the returned polynomial has degree `< d`,
/// with multiplicity `d - deg`.
pub fn fiber_polynomial<K: Scalar>(
    phi: &RationalFunction<K>,
    v: &PointOnLine<K>,
) -> Polynomial<K> {
    match v {
        PointOnLine::Finite(v) => phi.num() - &phi.den().scale(v),
        PointOnLine::Infinity => phi.den().clone(),
    }
}

/// Value of `phi` at a point of the projective line.
pub fn value_at<K: Scalar>(phi: &RationalFunction<K>, p: &PointOnLine<K>) -> PointOnLine<K> {
    match p {
        PointOnLine::Finite(x) => {
            let den = phi.den().eval(x);
            if den.is_zero() {
                // The stored fraction is reduced, so num(x) != 0 here.
                PointOnLine::Infinity
            } else {
                PointOnLine::Finite(phi.num().eval(x).div_checked(&den).expect("nonzero"))
            }
        }
        PointOnLine::Infinity => {
            let dn = phi.num().degree_or_zero();
            let dd = phi.den().degree_or_zero();
            if dn > dd {
                PointOnLine::Infinity
            } else if dn < dd {
                PointOnLine::Finite(K::zero())
            } else {
                PointOnLine::Finite(
                    phi.num()
                        .leading()
                        .expect("nonconstant")
                        .clone()
                        .div_checked(phi.den().leading().expect("nonzero"))
                        .expect("nonzero"),
                )
            }
        }
    }
}

/// Branching index of `phi` at an upstairs point.
pub fn branch_index_at<K: Scalar>(phi: &RationalFunction<K>, p: &PointOnLine<K>) -> usize {
    let image = value_at(phi, p);
    let fiber = fiber_polynomial(phi, &image);
    match p {
        PointOnLine::Finite(x) => {
            let mut f = fiber;
            let mut k = 0usize;
            let lin = Polynomial::from_coeffs(vec![-x.clone(), K::one()]);
            while !f.is_zero() && f.eval(x).is_zero() {
                f = f.div_exact(&lin);
                k += 1;
            }
            k
        }
        PointOnLine::Infinity => phi.map_degree() - fiber.degree_or_zero(),
    }
}

/// Prefactor exponent of `theta = prod (x - sigma)^(-xi)` at a point: the
/// local exponent is `-xi` at a finite root, `sum xi` at infinity, and 0
/// elsewhere.
pub fn prefactor_exponent_at<K: Scalar>(theta: &[(K, K)], p: &PointOnLine<K>) -> K {
    match p {
        PointOnLine::Finite(x) => theta
            .iter()
            .filter(|(sigma, _)| sigma == x)
            .fold(K::zero(), |acc, (_, xi)| acc - xi.clone()),
        PointOnLine::Infinity => theta
            .iter()
            .fold(K::zero(), |acc, (_, xi)| acc + xi.clone()),
    }
}

/// `image_integer_difference` is `None` when the image is an ordinary
/// point of the source, `Some(flag)` when it is singular with
/// integer/non-integer exponent difference.  Logarithms only live at
/// points whose downstairs difference is an integer, so only those images
/// force the non-logarithmicity assumption; everywhere else the local
/// solutions pull back as pure power series.
fn classify<K: Scalar>(
    exponents: &(K, K),
    image_integer_difference: Option<bool>,
    branch_index: usize,
) -> (SingularityClass, bool) {
    let delta = exponents.1.clone() - exponents.0.clone();
    let zero_one = (exponents.0.is_zero() && exponents.1.is_one())
        || (exponents.1.is_zero() && exponents.0.is_one());
    let assumption_needed = image_integer_difference == Some(true);
    if zero_one && image_integer_difference.is_none() && branch_index == 1 {
        return (SingularityClass::Nonsingular, false);
    }
    if delta.abs_canonical().is_one() {
        return (SingularityClass::Irrelevant, assumption_needed);
    }
    if delta.is_zero() {
        // A repeated exponent is always logarithmic: genuinely singular.
        return (SingularityClass::Relevant, false);
    }
    if delta.is_integer() {
        return (SingularityClass::ApparentCandidate, assumption_needed);
    }
    (SingularityClass::Relevant, false)
}

/// Transport the local exponents of the source equation along the
/// covering: one report for every point above the source's singular locus
/// and for every branch point outside it.
pub fn transport_exponents<K: FieldRoots>(
    spec: &PullbackSpec<K>,
) -> Result<Vec<SingularityReport<K>>, TransportError> {
    let phi = &spec.phi;
    let d = phi.map_degree();
    if d == 0 {
        return Err(TransportError::ConstantMap);
    }
    let scheme = spec.source.scheme();
    let mut reports: Vec<SingularityReport<K>> = Vec::new();
    let mut covered: Vec<PointOnLine<K>> = Vec::new();

    for row in &scheme.rows {
        let image = row.location.clone();
        let image_diff_integer = Some(row.difference().is_integer());
        let fiber = fiber_polynomial(phi, &image);
        let report = K::polynomial_roots(&fiber);
        if !report.splits() {
            return Err(TransportError::UnfactorableBranchLocus {
                image: point_label(&image),
                factor: render_poly(&report.leftover, "x"),
                field: K::FIELD_NAME,
            });
        }
        let mut fiber_points: Vec<(PointOnLine<K>, usize)> = report
            .roots
            .iter()
            .map(|(r, m)| (PointOnLine::Finite(r.clone()), *m))
            .collect();
        let infinity_mult = d - fiber.degree_or_zero();
        if infinity_mult > 0 {
            fiber_points.push((PointOnLine::Infinity, infinity_mult));
        }
        for (location, k) in fiber_points {
            let gamma = prefactor_exponent_at(&spec.theta, &location);
            let k_scalar = K::from_i64(k as i64);
            let e0 = k_scalar.clone() * row.exponents[0].clone() + gamma.clone();
            let e1 = k_scalar * row.exponents[1].clone() + gamma;
            let exps = (e0, e1);
            let (classification, nonlog_assumed) = classify(&exps, image_diff_integer, k);
            covered.push(location.clone());
            reports.push(SingularityReport {
                location,
                image: image.clone(),
                branch_index: k,
                exponents: exps,
                classification,
                nonlog_assumed,
            });
        }
    }

    // Branch points whose image is not singular: multiple roots of the
    // Wronskian numerator num'*den - num*den' outside the singular fibers,
    // plus possibly infinity.
    let wronskian =
        &(&phi.num().derivative() * phi.den()) - &(phi.num() * &phi.den().derivative());
    let wr = K::polynomial_roots(&wronskian);
    let mut extra: Vec<(PointOnLine<K>, usize)> = Vec::new();
    for (x, m) in &wr.roots {
        let p = PointOnLine::Finite(x.clone());
        if covered.contains(&p) || *m < 1 {
            continue;
        }
        if *m >= 1 && branch_index_at(phi, &p) >= 2 {
            extra.push((p, m + 1));
        }
    }
    if !wr.splits() {
        // Check whether the unfactorable part actually contains branch
        // points outside the singular fibers: a repeated factor of the
        // Wronskian away from those fibers is genuine branching.
        let mut residual = wr.leftover.clone();
        for row in &scheme.rows {
            let fiber = fiber_polynomial(phi, &row.location);
            if fiber.degree_or_zero() > 0 {
                let g = residual.gcd(&fiber);
                if g.degree_or_zero() > 0 {
                    residual = residual.div_exact(&g);
                }
            }
        }
        if residual.degree_or_zero() > 0 {
            return Err(TransportError::UnfactorableBranchLocus {
                image: "a nonsingular value".to_string(),
                factor: render_poly(&residual, "x"),
                field: K::FIELD_NAME,
            });
        }
    }
    if !covered.contains(&PointOnLine::Infinity) {
        let k = branch_index_at(phi, &PointOnLine::Infinity);
        if k >= 2 {
            extra.push((PointOnLine::Infinity, k));
        }
    }
    for (location, k) in extra {
        let image = value_at(phi, &location);
        let gamma = prefactor_exponent_at(&spec.theta, &location);
        let k_scalar = K::from_i64(k as i64);
        // A nonsingular image has exponents (0, 1).
        let exps = (gamma.clone(), k_scalar + gamma);
        let (classification, nonlog_assumed) = classify(&exps, None, k);
        reports.push(SingularityReport {
            location,
            image,
            branch_index: k,
            exponents: exps,
            classification,
            nonlog_assumed,
        });
    }
    Ok(reports)
}

// ---------------------------------------------------------------------------
// Root-free point counting and signatures
// ---------------------------------------------------------------------------

/// Number of distinct points in the fiber `phi = v`, including infinity
/// when it lies there — computed from squarefree decompositions alone.
pub fn fiber_point_count<K: Scalar>(phi: &RationalFunction<K>, v: &PointOnLine<K>) -> usize {
    let fiber = fiber_polynomial(phi, v);
    let d = phi.map_degree();
    let finite: usize = fiber
        .multiplicity_structure()
        .iter()
        .map(|(_, count)| count)
        .sum();
    finite + usize::from(fiber.degree_or_zero() < d)
}

/// Total point count above the given values; all branching lies above them
/// exactly when this equals `d + 2`.
pub fn point_count_above<K: Scalar>(
    phi: &RationalFunction<K>,
    values: &[PointOnLine<K>],
) -> usize {
    values.iter().map(|v| fiber_point_count(phi, v)).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("covering of degree {degree} has {count} points above its assigned critical values instead of {expected}, so it branches elsewhere and the pull-back acquires extra singular points; an identity over three singular points could only survive via a degenerate covering whose source has cyclic, dihedral, or otherwise finite monodromy, and this engine does not construct those")]
pub struct NonBelyiError {
    pub degree: usize,
    pub count: usize,
    pub expected: usize,
}

/// Require that all branching of `phi` lies above the given values.
pub fn require_branching_within<K: Scalar>(
    phi: &RationalFunction<K>,
    values: &[PointOnLine<K>],
) -> Result<usize, NonBelyiError> {
    let d = phi.map_degree();
    let count = point_count_above(phi, values);
    if count == d + 2 {
        Ok(count)
    } else {
        Err(NonBelyiError {
            degree: d,
            count,
            expected: d + 2,
        })
    }
}

/// Exponent differences of the relevant singular points of the pull-back,
/// root-free: each part of multiplicity `m` in the fiber over a value with
/// downstairs exponent difference `delta` contributes `m * delta`;
/// contributions exactly 1 are dropped as irrelevant.  Sorted canonically.
pub fn signature_of<K: Scalar>(
    phi: &RationalFunction<K>,
    critical_data: &[(PointOnLine<K>, K)],
) -> Vec<K> {
    let d = phi.map_degree();
    let mut out: Vec<K> = Vec::new();
    for (v, delta) in critical_data {
        let fiber = fiber_polynomial(phi, v);
        let mut parts: Vec<usize> = Vec::new();
        for (m, count) in fiber.multiplicity_structure() {
            parts.extend(std::iter::repeat(m).take(count));
        }
        if fiber.degree_or_zero() < d {
            parts.push(d - fiber.degree_or_zero());
        }
        for m in parts {
            let upstairs = (K::from_i64(m as i64) * delta.clone()).abs_canonical();
            if !upstairs.is_one() {
                out.push(upstairs);
            }
        }
    }
    out.sort_by_key(|x| x.sort_key());
    out
}

// ---------------------------------------------------------------------------
// Prefactor synthesis
// ---------------------------------------------------------------------------

/// One downstairs singular point with the local exponent the identity
/// follows (`chosen`) and the other exponent.
#[derive(Debug, Clone)]
pub struct ExponentChoice<K: Scalar> {
    pub location: PointOnLine<K>,
    pub chosen: K,
    pub other: K,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrefactorError {
    #[error("fiber above {image} does not split over {field}: factor {factor}")]
    UnfactorableFiber {
        image: String,
        factor: String,
        field: &'static str,
    },
}

/// Construct the radical prefactor `theta = prod (x - sigma)^(-xi)` that
/// shifts the chosen transported exponent to 0 at every finite upstairs
/// point other than the origin.  An irrelevant point whose shifted pair
/// would be `(0, -1)` is shifted to `(0, 1)` instead.  The points `x = 0`
/// and `x = infinity` never receive a factor: the normalization
/// `theta(0) = 1` and the bookkeeping at infinity belong to the identity
/// itself.
pub fn synthesize_prefactor<K: FieldRoots>(
    phi: &RationalFunction<K>,
    choices: &[ExponentChoice<K>],
) -> Result<Vec<(K, K)>, PrefactorError> {
    let mut theta: Vec<(K, K)> = Vec::new();
    for choice in choices {
        let fiber = fiber_polynomial(phi, &choice.location);
        let report = K::polynomial_roots(&fiber);
        if !report.splits() {
            return Err(PrefactorError::UnfactorableFiber {
                image: point_label(&choice.location),
                factor: render_poly(&report.leftover, "x"),
                field: K::FIELD_NAME,
            });
        }
        for (root, k) in &report.roots {
            if root.is_zero() {
                continue;
            }
            let k_scalar = K::from_i64(*k as i64);
            let mut xi = k_scalar.clone() * choice.chosen.clone();
            // After shifting by -xi the exponents are
            // (0, k*(other - chosen)); move (0, -1) up to (0, 1).
            let residual = k_scalar * (choice.other.clone() - choice.chosen.clone());
            if residual == -K::one() {
                xi = xi - K::one();
            }
            if !xi.is_zero() {
                theta.push((root.clone(), xi));
            }
        }
    }
    Ok(theta)
}

/// `theta'(0)` for `theta = prod (x - sigma)^(-xi)` scaled so that
/// `theta(0) = 1`: the logarithmic derivative gives `sum xi / sigma`.
pub fn prefactor_linear_jet<K: Scalar>(theta: &[(K, K)]) -> K {
    theta.iter().fold(K::zero(), |acc, (sigma, xi)| {
        acc + xi
            .clone()
            .div_checked(sigma)
            .expect("prefactor roots are nonzero")
    })
}

/// Render the prefactor in the normalized form `prod (1 - x/sigma)^(-xi)`.
pub fn render_prefactor<K: Scalar>(theta: &[(K, K)]) -> String {
    if theta.is_empty() {
        return "1".to_string();
    }
    theta
        .iter()
        .map(|(sigma, xi)| {
            format!(
                "(1 - ({}) * x)^(-({}))",
                sigma.inv().expect("nonzero prefactor root"),
                xi
            )
        })
        .collect::<Vec<_>>()
        .join(" * ")
}

// ---------------------------------------------------------------------------
// Accessory parameter from first-order jets
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AccessoryError {
    #[error("lower hypergeometric parameter C = 0 admits no normalized local solution")]
    ZeroLowerParameter,
    #[error("Heun source has c * t = 0, so its first series coefficient is undefined")]
    DegenerateInnerHeun,
}

/// Accessory parameter of a Heun target pulled back from a hypergeometric
/// source: with `phi(x) = lambda*x + O(x^2)` and
/// `theta(x) = 1 + mu*x + O(x^2)`,
/// `q = c * t * (mu + A*B*lambda/C)`.
#[allow(clippy::too_many_arguments)]
pub fn accessory_from_jet<K: Scalar>(
    big_c: &K,
    big_a: &K,
    big_b: &K,
    c: &K,
    t: &K,
    lambda: &K,
    mu: &K,
) -> Result<K, AccessoryError> {
    let ratio = (big_a.clone() * big_b.clone() * lambda.clone())
        .div_checked(big_c)
        .ok_or(AccessoryError::ZeroLowerParameter)?;
    Ok(c.clone() * t.clone() * (mu.clone() + ratio))
}

/// First coefficient of the normalized local solution of the source at 0:
/// `y(z) = 1 + gamma_1*z + O(z^2)`.  `A*B/C` for a hypergeometric source,
/// `q/(c*t)` for a Heun source.
pub fn source_first_coefficient<K: Scalar>(
    source: &EquationParams<K>,
) -> Result<K, AccessoryError> {
    match source {
        EquationParams::Gauss(p) => (p.a.clone() * p.b.clone())
            .div_checked(&p.c)
            .ok_or(AccessoryError::ZeroLowerParameter),
        EquationParams::Heun(p) => p
            .q
            .clone()
            .div_checked(&(p.c.clone() * p.t.clone()))
            .ok_or(AccessoryError::DegenerateInnerHeun),
    }
}

/// Accessory parameter of the Heun target of any pull-back, from the
/// linear jets of covering and prefactor:
/// `q = c*t*(mu + gamma_1*lambda)`.
pub fn accessory_for_pullback<K: Scalar>(
    source: &EquationParams<K>,
    target_c: &K,
    target_t: &K,
    lambda: &K,
    mu: &K,
) -> Result<K, AccessoryError> {
    let gamma_1 = source_first_coefficient(source)?;
    Ok(target_c.clone() * target_t.clone() * (mu.clone() + gamma_1 * lambda.clone()))
}

// ---------------------------------------------------------------------------
// Identity verification
// ---------------------------------------------------------------------------

/// Field to run a verification in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldChoice {
    /// Use the record's own field tag.
    Auto,
    Rational,
    OmegaExtension,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Series are compared through the coefficient of `x^order`.
    pub order: usize,
    /// Number of random parameter tuples.
    pub samples: usize,
    pub seed: u64,
    /// Height bound for sampled rationals.
    pub height: u64,
    pub field: FieldChoice,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            order: 16,
            samples: 5,
            seed: sample::DEFAULT_SEED,
            height: sample::DEFAULT_HEIGHT,
            field: FieldChoice::Auto,
        }
    }
}

/// An identity to verify: a catalog record as stored, or the paired
/// identity of a record, whose prefactor carries the extra radical factor
/// `(phi/(lambda*x^k))^(1-C)` and is therefore expanded numerically per
/// sample rather than through an expression tree.
#[derive(Debug, Clone)]
pub enum CatalogIdentity {
    Stored(TransformationRecord),
    Paired {
        /// Parameter data of the paired identity.
        record: TransformationRecord,
        /// The base record's covering (shared by the pair).
        phi_num: Expr,
        phi_den: Expr,
        /// The base record's prefactor.
        base_theta: Expr,
        /// Valuation of the covering at the origin.
        k: usize,
        /// Exponent `1 - C` of the radical factor, in the base record's
        /// source parameters.
        one_minus_big_c: Expr,
    },
}

impl CatalogIdentity {
    pub fn id(&self) -> &str {
        &self.record().id
    }

    pub fn record(&self) -> &TransformationRecord {
        match self {
            CatalogIdentity::Stored(r) => r,
            CatalogIdentity::Paired { record, .. } => record,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub sample_index: usize,
    pub coefficient_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub id: String,
    pub field: &'static str,
    pub order: usize,
    pub samples_run: usize,
    pub passed: bool,
    pub first_mismatch: Option<Mismatch>,
    /// Samples discarded because a parameter tuple hit a degenerate set.
    pub resamples: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("record `{0}` is signature-only and carries no transformation to verify")]
    NotVerifiable(String),
    #[error("record `{id}`: no admissible parameter sample found in {attempts} attempts")]
    SamplingExhausted { id: String, attempts: usize },
    #[error("record `{id}` needs a cube root of unity, which {field} lacks")]
    FieldTooSmall { id: String, field: &'static str },
}

/// Evaluate one side's parameter tuple in a sample environment.
pub fn bind_params<K: Scalar>(
    params: &ParamExprs,
    env: &impl Fn(&str) -> Option<K>,
) -> Result<EquationParams<K>, ExprError> {
    Ok(match params {
        ParamExprs::Gauss { a, b, c } => EquationParams::Gauss(HypergeometricParams::new(
            a.eval_scalar(env)?,
            b.eval_scalar(env)?,
            c.eval_scalar(env)?,
        )),
        ParamExprs::Heun { t, q, a, b, c, d } => EquationParams::Heun(HeunParams::new(
            t.eval_scalar(env)?,
            q.eval_scalar(env)?,
            a.eval_scalar(env)?,
            b.eval_scalar(env)?,
            c.eval_scalar(env)?,
            d.eval_scalar(env)?,
        )),
    })
}

/// Conditions that force a resample rather than a verdict.
#[derive(Debug, Clone, Copy)]
enum SampleObstruction {
    Expression,
    Recurrence,
    Degenerate,
    PhiShape,
    ThetaShape,
}

fn record_phi<K: Scalar>(
    rec: &TransformationRecord,
    env: &impl Fn(&str) -> Option<K>,
) -> Result<RationalFunction<K>, SampleObstruction> {
    let num = rec
        .phi_num
        .as_ref()
        .expect("verifiable record has phi")
        .eval_ratfun("x", env)
        .map_err(|_| SampleObstruction::Expression)?;
    let den = rec
        .phi_den
        .as_ref()
        .expect("verifiable record has phi")
        .eval_ratfun("x", env)
        .map_err(|_| SampleObstruction::Expression)?;
    num.div(&den).map_err(|_| SampleObstruction::PhiShape)
}

/// Expand both sides at one sample; `Ok(None)` means they agree through
/// the requested order.
fn compare_at_sample<K: Scalar>(
    identity: &CatalogIdentity,
    order: usize,
    env: &impl Fn(&str) -> Option<K>,
) -> Result<Option<usize>, SampleObstruction> {
    let record = identity.record();
    let target = bind_params(
        record.target.as_ref().expect("verifiable record has target"),
        env,
    )
    .map_err(|_| SampleObstruction::Expression)?;
    let source = bind_params(
        record.source.as_ref().expect("verifiable record has source"),
        env,
    )
    .map_err(|_| SampleObstruction::Expression)?;
    for side in [&target, &source] {
        if let EquationParams::Heun(h) = side {
            if !h.is_nondegenerate() {
                return Err(SampleObstruction::Degenerate);
            }
        }
    }

    // Left side: the target family's normalized local solution at 0,
    // composed with the declared argument when there is one.
    let mut lhs = target
        .series(order)
        .map_err(|_| SampleObstruction::Recurrence)?;
    if let Some(arg) = &record.target_arg {
        let arg_jet = arg
            .eval_series("x", order, env)
            .map_err(|_| SampleObstruction::Expression)?;
        if !arg_jet.coeff(0).is_zero() {
            return Err(SampleObstruction::PhiShape);
        }
        lhs = lhs
            .compose(&arg_jet)
            .map_err(|_| SampleObstruction::PhiShape)?;
    }

    // Right side: theta * (source solution composed with phi).
    let source_jet = source
        .series(order)
        .map_err(|_| SampleObstruction::Recurrence)?;
    let (phi_jet, theta_jet) = match identity {
        CatalogIdentity::Stored(rec) => {
            let phi = record_phi(rec, env)?;
            let phi_jet = phi
                .series_at_zero(order)
                .map_err(|_| SampleObstruction::PhiShape)?;
            let theta_jet = rec
                .theta
                .as_ref()
                .expect("verifiable record has theta")
                .eval_series("x", order, env)
                .map_err(|_| SampleObstruction::Expression)?;
            (phi_jet, theta_jet)
        }
        CatalogIdentity::Paired {
            phi_num,
            phi_den,
            base_theta,
            k,
            one_minus_big_c,
            ..
        } => {
            let num = phi_num
                .eval_ratfun("x", env)
                .map_err(|_| SampleObstruction::Expression)?;
            let den = phi_den
                .eval_ratfun("x", env)
                .map_err(|_| SampleObstruction::Expression)?;
            let phi = num.div(&den).map_err(|_| SampleObstruction::PhiShape)?;
            // Expand k orders deeper so dividing by x^k leaves a full jet.
            let deep = phi
                .series_at_zero(order + k)
                .map_err(|_| SampleObstruction::PhiShape)?;
            if deep.valuation() != Some(*k) {
                return Err(SampleObstruction::PhiShape);
            }
            let lambda_inv = deep.coeff(*k).inv().expect("valuation coefficient nonzero");
            // u = phi / (lambda * x^k), a unit jet with u(0) = 1.
            let unit = TruncatedSeries::from_coeffs(
                (0..=order)
                    .map(|i| deep.coeff(i + k) * lambda_inv.clone())
                    .collect(),
            );
            let exponent = one_minus_big_c
                .eval_scalar(env)
                .map_err(|_| SampleObstruction::Expression)?;
            let radical = unit
                .pow_scalar(&exponent)
                .map_err(|_| SampleObstruction::ThetaShape)?;
            let base = base_theta
                .eval_series("x", order, env)
                .map_err(|_| SampleObstruction::Expression)?;
            (deep.truncate(order), base.mul(&radical))
        }
    };
    if !phi_jet.coeff(0).is_zero() {
        return Err(SampleObstruction::PhiShape);
    }
    if !theta_jet.coeff(0).is_one() {
        return Err(SampleObstruction::ThetaShape);
    }
    let composed = source_jet
        .compose(&phi_jet)
        .map_err(|_| SampleObstruction::PhiShape)?;
    let rhs = theta_jet.mul(&composed);

    for i in 0..=order {
        if lhs.coeff(i) != rhs.coeff(i) {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

const RESAMPLE_LIMIT: usize = 60;

fn verify_in_field<K: Scalar>(
    identity: &CatalogIdentity,
    opts: &VerifyOptions,
) -> Result<IdentityReport, VerifyError> {
    let record = identity.record();
    if !record.is_verifiable() {
        return Err(VerifyError::NotVerifiable(record.id.clone()));
    }
    if record.field == FieldTag::QOmega && K::cube_root_of_unity().is_none() {
        return Err(VerifyError::FieldTooSmall {
            id: record.id.clone(),
            field: K::FIELD_NAME,
        });
    }
    let mut symbols: BTreeSet<String> = record.free_symbols();
    if let CatalogIdentity::Paired {
        one_minus_big_c, ..
    } = identity
    {
        symbols.extend(one_minus_big_c.free_symbols());
        symbols.remove("x");
        symbols.remove("w");
    }
    let symbols: Vec<String> = symbols.into_iter().collect();

    let mut resamples = 0usize;
    let mut first_mismatch = None;
    'samples: for sample_index in 0..opts.samples {
        let mut rng = sample::rng_for(opts.seed, sample_index as u64);
        for _attempt in 0..RESAMPLE_LIMIT {
            let assignment: Vec<K> = symbols
                .iter()
                .map(|_| sample::lift::<K>(&sample::nonzero_rational(&mut rng, opts.height)))
                .collect();
            let env = |name: &str| -> Option<K> {
                if name == "w" {
                    return K::cube_root_of_unity();
                }
                symbols
                    .iter()
                    .position(|s| s == name)
                    .map(|i| assignment[i].clone())
            };
            match compare_at_sample(identity, opts.order, &env) {
                Ok(None) => continue 'samples,
                Ok(Some(coeff)) => {
                    first_mismatch = Some(Mismatch {
                        sample_index,
                        coefficient_index: coeff,
                    });
                    break 'samples;
                }
                Err(_) => {
                    resamples += 1;
                    continue;
                }
            }
        }
        return Err(VerifyError::SamplingExhausted {
            id: record.id.clone(),
            attempts: RESAMPLE_LIMIT,
        });
    }
    Ok(IdentityReport {
        id: record.id.clone(),
        field: K::FIELD_NAME,
        order: opts.order,
        samples_run: opts.samples,
        passed: first_mismatch.is_none(),
        first_mismatch,
        resamples,
    })
}

/// Verify a two-term identity by exact truncated-series comparison at
/// random rational parameter tuples.
pub fn verify_identity(
    identity: &CatalogIdentity,
    opts: &VerifyOptions,
) -> Result<IdentityReport, VerifyError> {
    let wants_omega = match opts.field {
        FieldChoice::Auto => identity.record().field == FieldTag::QOmega,
        FieldChoice::Rational => false,
        FieldChoice::OmegaExtension => true,
    };
    if wants_omega {
        verify_in_field::<OmegaRational>(identity, opts)
    } else {
        verify_in_field::<Rational>(identity, opts)
    }
}

/// Check that the stored accessory parameter of a Heun-target record
/// matches the jet formula `q = c*t*(mu + gamma_1*lambda)` at random
/// samples.  Records without a Heun target pass vacuously.
pub fn accessory_check(
    rec: &TransformationRecord,
    opts: &VerifyOptions,
) -> Result<bool, VerifyError> {
    match opts.field {
        FieldChoice::OmegaExtension => accessory_check_in::<OmegaRational>(rec, opts),
        FieldChoice::Rational => accessory_check_in::<Rational>(rec, opts),
        FieldChoice::Auto => {
            if rec.field == FieldTag::QOmega {
                accessory_check_in::<OmegaRational>(rec, opts)
            } else {
                accessory_check_in::<Rational>(rec, opts)
            }
        }
    }
}

fn accessory_check_in<K: Scalar>(
    rec: &TransformationRecord,
    opts: &VerifyOptions,
) -> Result<bool, VerifyError> {
    if !rec.is_verifiable() {
        return Err(VerifyError::NotVerifiable(rec.id.clone()));
    }
    if rec.field == FieldTag::QOmega && K::cube_root_of_unity().is_none() {
        return Err(VerifyError::FieldTooSmall {
            id: rec.id.clone(),
            field: K::FIELD_NAME,
        });
    }
    let is_heun_target = rec
        .target
        .as_ref()
        .map(|p| p.is_heun())
        .unwrap_or(false);
    if !is_heun_target {
        return Ok(true);
    }
    let symbols: Vec<String> = rec.free_symbols().into_iter().collect();
    for sample_index in 0..opts.samples {
        let mut rng = sample::rng_for(opts.seed, 0x0acc_0000 + sample_index as u64);
        let mut done = false;
        for _attempt in 0..RESAMPLE_LIMIT {
            let assignment: Vec<K> = symbols
                .iter()
                .map(|_| sample::lift::<K>(&sample::nonzero_rational(&mut rng, opts.height)))
                .collect();
            let env = |name: &str| -> Option<K> {
                if name == "w" {
                    return K::cube_root_of_unity();
                }
                symbols
                    .iter()
                    .position(|s| s == name)
                    .map(|i| assignment[i].clone())
            };
            let outcome = (|| -> Result<bool, SampleObstruction> {
                let source = bind_params(
                    rec.source.as_ref().expect("verifiable record has source"),
                    env_ref(&env),
                )
                .map_err(|_| SampleObstruction::Expression)?;
                let target = bind_params(
                    rec.target.as_ref().expect("verifiable record has target"),
                    env_ref(&env),
                )
                .map_err(|_| SampleObstruction::Expression)?;
                let EquationParams::Heun(heun) = &target else {
                    unreachable!("checked above");
                };
                let phi = record_phi(rec, &env)?;
                let jet = phi
                    .series_at_zero(1)
                    .map_err(|_| SampleObstruction::PhiShape)?;
                if !jet.coeff(0).is_zero() {
                    return Err(SampleObstruction::PhiShape);
                }
                let lambda = jet.coeff(1);
                let theta_jet = rec
                    .theta
                    .as_ref()
                    .expect("verifiable record has theta")
                    .eval_series("x", 1, &env)
                    .map_err(|_| SampleObstruction::Expression)?;
                if !theta_jet.coeff(0).is_one() {
                    return Err(SampleObstruction::ThetaShape);
                }
                let mu = theta_jet.coeff(1);
                let predicted =
                    accessory_for_pullback(&source, &heun.c, &heun.t, &lambda, &mu)
                        .map_err(|_| SampleObstruction::Degenerate)?;
                Ok(predicted == heun.q)
            })();
            match outcome {
                Ok(true) => {
                    done = true;
                    break;
                }
                Ok(false) => return Ok(false),
                Err(_) => continue,
            }
        }
        if !done {
            return Err(VerifyError::SamplingExhausted {
                id: rec.id.clone(),
                attempts: RESAMPLE_LIMIT,
            });
        }
    }
    Ok(true)
}

/// Work around closure-identity friction when passing `&impl Fn` twice.
fn env_ref<'a, K, F: Fn(&str) -> Option<K>>(f: &'a F) -> &'a F {
    f
}

// ---------------------------------------------------------------------------
// Paired identities (second local solutions, exponent 1-c)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairError {
    #[error("record `{0}` is signature-only; it has no pair")]
    NotVerifiable(String),
    #[error("record `{0}` does not have a hypergeometric source and Heun target")]
    UnsupportedShape(String),
    #[error("record `{0}`: covering has symbolic coefficients; pairing needs a numeric covering")]
    SymbolicCovering(String),
    #[error("record `{0}`: declared target argument is not supported for pairing")]
    HasTargetArgument(String),
    #[error("record `{id}`: exponent {exponent} at the origin is an integer, so the second local solution is not of power type")]
    IntegerExponent { id: String, exponent: String },
    #[error("record `{id}`: k*(1-C) != 1-c, so the radical factor has no well-defined asymptotic constant")]
    ExponentMismatch { id: String },
}

/// Build the paired identity of a Heun-target record: the identity
/// satisfied by the second local solutions (exponent `1-c` downstairs,
/// `1-C` upstairs).  Writing `phi(x) = lambda*x^k*(1 + O(x))`, the paired
/// prefactor is `theta * (phi/(lambda*x^k))^(1-C)` and the parameters move
/// by `(a,b,c) -> (1+a-c, 1+b-c, 2-c)` on both levels, with the accessory
/// parameter `q -> q - (c-1)*(a+b-c-d+d*t+1)`.
pub fn paired_identity(rec: &TransformationRecord) -> Result<CatalogIdentity, PairError> {
    if !rec.is_verifiable() {
        return Err(PairError::NotVerifiable(rec.id.clone()));
    }
    if rec.target_arg.is_some() {
        return Err(PairError::HasTargetArgument(rec.id.clone()));
    }
    let (Some(ParamExprs::Heun { t, q, a, b, c, d }), Some(ParamExprs::Gauss {
        a: big_a,
        b: big_b,
        c: big_c,
    })) = (&rec.target, &rec.source)
    else {
        return Err(PairError::UnsupportedShape(rec.id.clone()));
    };

    // The covering with all parameter symbols erased must evaluate; the
    // records this applies to store numeric coverings.
    let none_env = |name: &str| -> Option<Rational> {
        if name == "w" {
            None
        } else {
            None
        }
    };
    let phi_num = rec.phi_num.as_ref().expect("verifiable record has phi");
    let phi_den = rec.phi_den.as_ref().expect("verifiable record has phi");
    let phi = phi_num
        .eval_ratfun("x", &none_env)
        .and_then(|n| {
            phi_den
                .eval_ratfun("x", &none_env)
                .map(|d| n.div(&d).map_err(|_| ExprError::DivisionByZero))
        })
        .and_then(|r| r)
        .map_err(|_| PairError::SymbolicCovering(rec.id.clone()))?;
    let jet = phi
        .series_at_zero(phi.map_degree() + 1)
        .map_err(|_| PairError::SymbolicCovering(rec.id.clone()))?;
    let k = jet
        .valuation()
        .ok_or_else(|| PairError::SymbolicCovering(rec.id.clone()))?;
    let lambda = jet.coeff(k);

    // Preconditions at deterministic samples: 1-c and 1-C non-integer,
    // and the exponent match k*(1-C) = 1-c.
    let one = Expr::num_i64(1);
    let one_minus_c = one.clone().sub(c.clone());
    let one_minus_big_c = one.clone().sub(big_c.clone());
    let mut symbols: BTreeSet<String> = one_minus_c.free_symbols();
    symbols.extend(one_minus_big_c.free_symbols());
    symbols.remove("w");
    let symbols: Vec<String> = symbols.into_iter().collect();
    let mut rng = sample::rng_for(sample::DEFAULT_SEED, 0x9a17);
    let mut checked = 0usize;
    while checked < 3 {
        let assignment: Vec<Rational> = symbols
            .iter()
            .map(|_| sample::nonzero_rational(&mut rng, 50))
            .collect();
        let env = |name: &str| -> Option<Rational> {
            symbols
                .iter()
                .position(|s| s == name)
                .map(|i| assignment[i].clone())
        };
        let (vc, vbc) = match (one_minus_c.eval_scalar(&env), one_minus_big_c.eval_scalar(&env)) {
            (Ok(x), Ok(y)) => (x, y),
            _ => continue,
        };
        if vc.is_integer() {
            return Err(PairError::IntegerExponent {
                id: rec.id.clone(),
                exponent: format!("1 - ({})", c),
            });
        }
        if vbc.is_integer() {
            return Err(PairError::IntegerExponent {
                id: rec.id.clone(),
                exponent: format!("1 - ({})", big_c),
            });
        }
        if Rational::from_i64(k as i64) * vbc != vc {
            return Err(PairError::ExponentMismatch { id: rec.id.clone() });
        }
        checked += 1;
    }

    // Parameter motion on both levels.
    let shift = |x: &Expr, lower: &Expr| one.clone().add(x.clone()).sub(lower.clone());
    let two = Expr::num_i64(2);
    let a1 = shift(a, c);
    let b1 = shift(b, c);
    let c1 = two.clone().sub(c.clone());
    let d1 = d.clone();
    let t1 = t.clone();
    // q1 = q - (c-1)*(a+b-c-d+d*t+1)
    let bracket = a
        .clone()
        .add(b.clone())
        .sub(c.clone())
        .sub(d.clone())
        .add(d.clone().mul(t.clone()))
        .add(one.clone());
    let q1 = q
        .clone()
        .sub(c.clone().sub(one.clone()).mul(bracket));
    let big_a1 = shift(big_a, big_c);
    let big_b1 = shift(big_b, big_c);
    let big_c1 = two.sub(big_c.clone());

    let sig_source = vec![
        one.clone().sub(big_c1.clone()),
        big_c1.clone().sub(big_a1.clone()).sub(big_b1.clone()),
        big_b1.clone().sub(big_a1.clone()),
    ];
    let sig_target = vec![
        one.clone().sub(c1.clone()),
        one.clone().sub(d1.clone()),
        c1.clone().add(d1.clone()).sub(a1.clone()).sub(b1.clone()),
        b1.clone().sub(a1.clone()),
    ];

    // Display form of the paired prefactor
    // theta * (phi/(lambda*x^k))^(1-C); verification expands the radical
    // factor numerically per sample instead of through this tree.
    let base_theta = rec.theta.clone().expect("verifiable record has theta");
    let lambda_expr =
        Expr::parse(&format!("{lambda}")).expect("rational literal is parseable");
    let unit_expr = phi_num.clone().div(
        phi_den
            .clone()
            .mul(lambda_expr)
            .mul(Expr::sym("x").pow(Expr::num_i64(k as i64))),
    );
    let radical_expr = unit_expr.pow(one_minus_big_c.clone());
    let theta_display = if base_theta == Expr::num_i64(1) {
        radical_expr
    } else {
        base_theta.clone().mul(radical_expr)
    };

    let record = TransformationRecord::assemble(
        format!("{}-paired", rec.id),
        rec.kind,
        rec.field,
        rec.degree,
        rec.steps.clone(),
        Some(phi_num.clone()),
        Some(phi_den.clone()),
        Some(theta_display),
        None,
        Some(ParamExprs::Heun {
            t: t1,
            q: q1,
            a: a1,
            b: b1,
            c: c1,
            d: d1,
        }),
        Some(ParamExprs::Gauss {
            a: big_a1,
            b: big_b1,
            c: big_c1,
        }),
        sig_source,
        sig_target,
        Some(format!("paired identity of {}", rec.id)),
    );

    Ok(CatalogIdentity::Paired {
        record,
        phi_num: phi_num.clone(),
        phi_den: phi_den.clone(),
        base_theta,
        k,
        one_minus_big_c,
    })
}

// ---------------------------------------------------------------------------
// Record comparison at samples
// ---------------------------------------------------------------------------

/// Exact sample-based comparison of two records: parameter tuples slot by
/// slot, coverings as rational functions, and prefactors as jets.  The
/// records must be written in the same symbols; apply substitutions first
/// when they are not.
pub fn records_agree(
    left: &TransformationRecord,
    right: &TransformationRecord,
    samples: usize,
) -> bool {
    if !left.is_verifiable() || !right.is_verifiable() {
        return false;
    }
    let mut symbols: BTreeSet<String> = left.free_symbols();
    symbols.extend(right.free_symbols());
    let symbols: Vec<String> = symbols.into_iter().collect();
    let mut rng = sample::rng_for(sample::DEFAULT_SEED, 0xa9ee);
    let mut agreed = 0usize;
    let mut attempts = 0usize;
    while agreed < samples && attempts < 40 * samples.max(1) {
        attempts += 1;
        let assignment: Vec<OmegaRational> = symbols
            .iter()
            .map(|_| sample::lift(&sample::nonzero_rational(&mut rng, 50)))
            .collect();
        let env = |name: &str| -> Option<OmegaRational> {
            if name == "w" {
                return OmegaRational::cube_root_of_unity();
            }
            symbols
                .iter()
                .position(|s| s == name)
                .map(|i| assignment[i].clone())
        };
        let lt = bind_params(left.target.as_ref().unwrap(), &env);
        let rt = bind_params(right.target.as_ref().unwrap(), &env);
        let ls = bind_params(left.source.as_ref().unwrap(), &env);
        let rs = bind_params(right.source.as_ref().unwrap(), &env);
        let (Ok(lt), Ok(rt), Ok(ls), Ok(rs)) = (lt, rt, ls, rs) else {
            continue;
        };
        if !equation_params_equal(&lt, &rt) || !equation_params_equal(&ls, &rs) {
            return false;
        }
        let (Ok(lphi), Ok(rphi)) = (record_phi(left, &env), record_phi(right, &env)) else {
            continue;
        };
        // Cross-multiplied equality of the reduced fractions.
        let cross_left = lphi.num() * rphi.den();
        let cross_right = rphi.num() * lphi.den();
        if cross_left != cross_right {
            return false;
        }
        let order = 8;
        let (Ok(ltheta), Ok(rtheta)) = (
            left.theta.as_ref().unwrap().eval_series("x", order, &env),
            right.theta.as_ref().unwrap().eval_series("x", order, &env),
        ) else {
            continue;
        };
        if ltheta.coeffs() != rtheta.coeffs() {
            return false;
        }
        agreed += 1;
    }
    agreed == samples
}

/// Sample-based equality of the parameter tuples alone (target and
/// source), ignoring coverings and prefactors.
pub fn params_agree(
    left: &TransformationRecord,
    right: &TransformationRecord,
    samples: usize,
) -> bool {
    let mut symbols: BTreeSet<String> = left.free_symbols();
    symbols.extend(right.free_symbols());
    let symbols: Vec<String> = symbols.into_iter().collect();
    let mut rng = sample::rng_for(sample::DEFAULT_SEED, 0xbf01);
    let mut agreed = 0usize;
    let mut attempts = 0usize;
    while agreed < samples && attempts < 40 * samples.max(1) {
        attempts += 1;
        let assignment: Vec<OmegaRational> = symbols
            .iter()
            .map(|_| sample::lift(&sample::nonzero_rational(&mut rng, 50)))
            .collect();
        let env = |name: &str| -> Option<OmegaRational> {
            if name == "w" {
                return OmegaRational::cube_root_of_unity();
            }
            symbols
                .iter()
                .position(|s| s == name)
                .map(|i| assignment[i].clone())
        };
        let sides = (
            left.target.as_ref().map(|p| bind_params(p, &env)),
            right.target.as_ref().map(|p| bind_params(p, &env)),
            left.source.as_ref().map(|p| bind_params(p, &env)),
            right.source.as_ref().map(|p| bind_params(p, &env)),
        );
        let (Some(Ok(lt)), Some(Ok(rt)), Some(Ok(ls)), Some(Ok(rs))) = sides else {
            continue;
        };
        if !equation_params_equal(&lt, &rt) || !equation_params_equal(&ls, &rs) {
            return false;
        }
        agreed += 1;
    }
    agreed == samples
}

fn equation_params_equal<K: Scalar>(a: &EquationParams<K>, b: &EquationParams<K>) -> bool {
    match (a, b) {
        (EquationParams::Gauss(x), EquationParams::Gauss(y)) => {
            x.a == y.a && x.b == y.b && x.c == y.c
        }
        (EquationParams::Heun(x), EquationParams::Heun(y)) => {
            x.t == y.t && x.q == y.q && x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin_catalog, find_record};
    use crate::poly::Polynomial;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_i64(n).div_checked(&Rational::from_i64(d)).unwrap()
    }

    fn ratfun(num: &[Rational], den: &[Rational]) -> RationalFunction<Rational> {
        RationalFunction::new(
            Polynomial::from_coeffs(num.to_vec()),
            Polynomial::from_coeffs(den.to_vec()),
        )
        .unwrap()
    }

    fn gauss(a: Rational, b: Rational, c: Rational) -> EquationParams<Rational> {
        EquationParams::Gauss(HypergeometricParams::new(a, b, c))
    }

    #[test]
    fn transport_along_square_doubles_origin_exponents() {
        // phi = x^2, source exponents (0, 1-c) at z=0 become (0, 2-2c).
        let phi = ratfun(&[r(0, 1), r(0, 1), r(1, 1)], &[r(1, 1)]);
        let spec = PullbackSpec {
            phi,
            theta: vec![],
            source: gauss(r(1, 3), r(1, 5), r(1, 7)),
        };
        let reports = transport_exponents(&spec).unwrap();
        let at_zero = reports
            .iter()
            .find(|rep| rep.location == PointOnLine::Finite(Rational::from_i64(0)))
            .unwrap();
        assert_eq!(at_zero.branch_index, 2);
        assert_eq!(at_zero.image, PointOnLine::Finite(Rational::from_i64(0)));
        assert_eq!(at_zero.exponents.0, r(0, 1));
        // 2*(1 - 1/7) = 12/7
        assert_eq!(at_zero.exponents.1, r(12, 7));
    }

    #[test]
    fn transport_cubic_covering_classifies_relevant_and_irrelevant() {
        // phi = x*(4x-3)^2 over the source (a, b; 1/2): four relevant
        // points with differences (1/2, alpha, 2 alpha, 3 beta) and two
        // irrelevant branch points, all classifications automatic.
        let a = r(1, 3);
        let b = r(1, 5);
        let phi = ratfun(
            &[r(0, 1), r(9, 1), -r(24, 1), r(16, 1)],
            &[r(1, 1)],
        );
        let spec = PullbackSpec {
            phi,
            theta: vec![],
            source: gauss(a.clone(), b.clone(), r(1, 2)),
        };
        let reports = transport_exponents(&spec).unwrap();
        let alpha = r(1, 2) - a.clone() - b.clone();
        let beta = b.clone() - a.clone();
        let mut relevant: Vec<Rational> = reports
            .iter()
            .filter(|rep| rep.classification == SingularityClass::Relevant)
            .map(|rep| {
                (rep.exponents.1.clone() - rep.exponents.0.clone()).abs_canonical()
            })
            .collect();
        relevant.sort_by_key(|x| x.sort_key());
        let mut expected: Vec<Rational> = vec![
            r(1, 2),
            alpha.clone(),
            r(2, 1) * alpha.clone(),
            r(3, 1) * beta.clone(),
        ]
        .into_iter()
        .map(|x| x.abs_canonical())
        .collect();
        expected.sort_by_key(|x| x.sort_key());
        assert_eq!(relevant, expected);
        // One irrelevant point: the second preimage of z=0 at x=3/4,
        // branched with index 2 above exponent difference 1/2.
        let irrelevant: Vec<&SingularityReport<Rational>> = reports
            .iter()
            .filter(|rep| rep.classification == SingularityClass::Irrelevant)
            .collect();
        assert_eq!(irrelevant.len(), 1);
        let rep = irrelevant[0];
        assert_eq!(rep.location, PointOnLine::Finite(r(3, 4)));
        assert_eq!(rep.branch_index, 2);
        assert!(!rep.nonlog_assumed, "difference 1/2 image needs no assumption");
    }

    #[test]
    fn unfactorable_branch_locus_is_reported() {
        let records = builtin_catalog();
        let rec = find_record(&records, "gauss-degree-10").unwrap();
        let none_env = |_: &str| -> Option<Rational> { None };
        let num = rec.phi_num.as_ref().unwrap().eval_ratfun("x", &none_env).unwrap();
        let den = rec.phi_den.as_ref().unwrap().eval_ratfun("x", &none_env).unwrap();
        let phi = num.div(&den).unwrap();
        assert_eq!(phi.map_degree(), 10);
        let spec = PullbackSpec {
            phi,
            theta: vec![],
            source: gauss(r(1, 84), r(29, 84), r(6, 7)),
        };
        match transport_exponents(&spec) {
            Err(TransportError::UnfactorableBranchLocus { factor, .. }) => {
                assert!(!factor.is_empty());
            }
            other => panic!("expected unfactorable branch locus, got {other:?}"),
        }
    }

    #[test]
    fn degree_ten_point_count_and_signature_are_root_free() {
        let records = builtin_catalog();
        let rec = find_record(&records, "gauss-degree-10").unwrap();
        let none_env = |_: &str| -> Option<Rational> { None };
        let num = rec.phi_num.as_ref().unwrap().eval_ratfun("x", &none_env).unwrap();
        let den = rec.phi_den.as_ref().unwrap().eval_ratfun("x", &none_env).unwrap();
        let phi = num.div(&den).unwrap();
        let zero = PointOnLine::Finite(Rational::from_i64(0));
        let one = PointOnLine::Finite(Rational::from_i64(1));
        let inf = PointOnLine::<Rational>::Infinity;
        assert_eq!(fiber_point_count(&phi, &zero), 3);
        assert_eq!(fiber_point_count(&phi, &one), 5);
        assert_eq!(fiber_point_count(&phi, &inf), 4);
        assert_eq!(
            require_branching_within(&phi, &[zero.clone(), one.clone(), inf.clone()]),
            Ok(12)
        );
        // Signature from (1/7, 1/2, 1/3) downstairs: {1/7, 2/7, 1/3}.
        let sig = signature_of(
            &phi,
            &[(zero, r(1, 7)), (one, r(1, 2)), (inf, r(1, 3))],
        );
        let mut expected = vec![r(1, 7), r(2, 7), r(1, 3)];
        expected.sort_by_key(|x| x.sort_key());
        assert_eq!(sig, expected);
    }

    #[test]
    fn non_belyi_covering_is_refused() {
        // phi = x^3 - 3x branches above +-2, not above {0, 1, infinity}.
        let phi = ratfun(&[r(0, 1), -r(3, 1), r(0, 1), r(1, 1)], &[r(1, 1)]);
        let zero = PointOnLine::Finite(Rational::from_i64(0));
        let one = PointOnLine::Finite(Rational::from_i64(1));
        let inf = PointOnLine::<Rational>::Infinity;
        let err = require_branching_within(&phi, &[zero, one, inf]).unwrap_err();
        assert_eq!(err.degree, 3);
        assert!(err.count > err.expected);
        let message = err.to_string();
        assert!(message.contains("cyclic"));
        assert!(message.contains("dihedral"));
        assert!(message.contains("finite"));
    }

    #[test]
    fn prefactor_for_polynomial_covering_is_empty() {
        // Polynomial phi with a single point above infinity: nothing to
        // cancel at finite points above infinity.
        let phi = ratfun(&[r(0, 1), r(9, 1), -r(24, 1), r(16, 1)], &[r(1, 1)]);
        let choices = vec![ExponentChoice {
            location: PointOnLine::Infinity,
            chosen: r(1, 3),
            other: r(1, 5),
        }];
        assert_eq!(synthesize_prefactor(&phi, &choices).unwrap(), vec![]);
    }

    #[test]
    fn prefactor_cancels_pole_exponent() {
        // phi = x^3/(4-3x)^2: the double pole at x = 4/3 above infinity
        // with chosen exponent a gives (x - 4/3)^(-2a).
        let a = r(1, 3);
        let phi = ratfun(
            &[r(0, 1), r(0, 1), r(0, 1), r(1, 1)],
            &[r(16, 1), -r(24, 1), r(9, 1)],
        );
        let choices = vec![ExponentChoice {
            location: PointOnLine::Infinity,
            chosen: a.clone(),
            other: r(1, 5),
        }];
        let theta = synthesize_prefactor(&phi, &choices).unwrap();
        assert_eq!(theta, vec![(r(4, 3), r(2, 1) * a)]);
    }

    #[test]
    fn irrelevant_point_shifts_to_zero_one() {
        // phi = x*(4x-3)^2, chosen exponent 0 and other exponent -1/2 at
        // z=0: the double point x=3/4 would shift to (0, -1), so the
        // exponent drops by 1 and the factor becomes (x - 3/4)^(+1).
        let phi = ratfun(&[r(0, 1), r(9, 1), -r(24, 1), r(16, 1)], &[r(1, 1)]);
        let choices = vec![ExponentChoice {
            location: PointOnLine::Finite(Rational::from_i64(0)),
            chosen: r(0, 1),
            other: -r(1, 2),
        }];
        let theta = synthesize_prefactor(&phi, &choices).unwrap();
        assert_eq!(theta, vec![(r(3, 4), -r(1, 1))]);
        assert_eq!(prefactor_linear_jet(&theta), -r(4, 3));
    }

    #[test]
    fn accessory_from_jet_reproduces_known_values() {
        let a = r(2, 7);
        let b = r(3, 11);
        // Cubic polynomial pull-back: lambda = 9, mu = 0, C = c = a+b+1/2,
        // t = 3/4 gives 27ab/4.
        let c = a.clone() + b.clone() + r(1, 2);
        let q = accessory_from_jet(
            &c,
            &a,
            &b,
            &c,
            &r(3, 4),
            &r(9, 1),
            &r(0, 1),
        )
        .unwrap();
        assert_eq!(q, r(27, 4) * a.clone() * b.clone());
        // Branched origin: lambda = mu = 0 forces q = 0.
        let q0 = accessory_from_jet(&c, &a, &b, &r(1, 2), &r(-1, 1), &r(0, 1), &r(0, 1)).unwrap();
        assert_eq!(q0, r(0, 1));
        // Symmetric quadratic: lambda = 4, t = 1/2 gives 2ab.
        let q2 = accessory_from_jet(
            &r(5, 9),
            &a,
            &b,
            &r(5, 9),
            &r(1, 2),
            &r(4, 1),
            &r(0, 1),
        )
        .unwrap();
        assert_eq!(q2, r(2, 1) * a.clone() * b.clone());
        assert!(matches!(
            accessory_from_jet(&r(0, 1), &a, &b, &c, &r(1, 2), &r(4, 1), &r(0, 1)),
            Err(AccessoryError::ZeroLowerParameter)
        ));
    }

    #[test]
    fn verify_cubic_and_kuiken_records() {
        let records = builtin_catalog();
        let opts = VerifyOptions {
            order: 12,
            samples: 3,
            ..VerifyOptions::default()
        };
        for id in ["cubic-21-21-3-a", "quad-square", "quad-symmetric"] {
            let rec = find_record(&records, id).unwrap().clone();
            let report = verify_identity(&CatalogIdentity::Stored(rec), &opts).unwrap();
            assert!(report.passed, "{id} failed: {:?}", report.first_mismatch);
        }
    }

    #[test]
    fn perturbed_accessory_parameter_fails_at_first_coefficient() {
        let records = builtin_catalog();
        let mut rec = find_record(&records, "cubic-21-21-3-a").unwrap().clone();
        let Some(ParamExprs::Heun { t, q, a, b, c, d }) = rec.target.clone() else {
            panic!("cubic record has a Heun target");
        };
        rec.target = Some(ParamExprs::Heun {
            t,
            q: q.add(Expr::num_i64(1)),
            a,
            b,
            c,
            d,
        });
        let opts = VerifyOptions {
            order: 6,
            samples: 2,
            ..VerifyOptions::default()
        };
        let report = verify_identity(&CatalogIdentity::Stored(rec), &opts).unwrap();
        assert!(!report.passed);
        assert_eq!(
            report.first_mismatch,
            Some(Mismatch {
                sample_index: 0,
                coefficient_index: 1
            })
        );
    }

    #[test]
    fn accessory_oracle_validates_stored_records() {
        let records = builtin_catalog();
        let opts = VerifyOptions {
            samples: 3,
            ..VerifyOptions::default()
        };
        for id in ["quad-symmetric", "cubic-21-21-3-b", "lame-cubic", "heun-heun-quartic"] {
            let rec = find_record(&records, id).unwrap();
            assert_eq!(accessory_check(rec, &opts), Ok(true), "oracle failed on {id}");
        }
    }

    #[test]
    fn paired_identity_matches_companion_record() {
        let records = builtin_catalog();
        let base = find_record(&records, "cubic-21-21-3-a").unwrap();
        let paired = paired_identity(base).unwrap();
        // The paired identity passes verification on its own.
        let opts = VerifyOptions {
            order: 10,
            samples: 3,
            ..VerifyOptions::default()
        };
        let report = verify_identity(&paired, &opts).unwrap();
        assert!(report.passed, "paired identity failed: {:?}", report.first_mismatch);
        // Its parameters coincide with the stored companion record after
        // re-centering the free parameters by 1/6.
        let companion = find_record(&records, "cubic-21-21-3-b").unwrap();
        let mut shift = std::collections::BTreeMap::new();
        shift.insert(
            "a".to_string(),
            Expr::sym("a").add(Expr::num_i64(1).div(Expr::num_i64(6))),
        );
        shift.insert(
            "b".to_string(),
            Expr::sym("b").add(Expr::num_i64(1).div(Expr::num_i64(6))),
        );
        let companion_shifted = companion.substituted(&shift);
        assert!(params_agree(paired.record(), &companion_shifted, 5));
    }

    #[test]
    fn paired_identity_is_an_involution_on_parameters() {
        let records = builtin_catalog();
        let base = find_record(&records, "quad-chord").unwrap();
        let once = paired_identity(base).unwrap();
        let twice = paired_identity(once.record()).unwrap();
        assert!(params_agree(twice.record(), base, 5));
    }

    #[test]
    fn paired_identity_rejects_integer_origin_exponent() {
        // A record whose target c is the constant 1 has a logarithmic
        // second solution: no pair exists.
        let records = builtin_catalog();
        let mut rec = find_record(&records, "quad-chord").unwrap().clone();
        let Some(ParamExprs::Heun { t, q, a, b, d, .. }) = rec.target.clone() else {
            panic!("quad-chord has a Heun target");
        };
        rec.target = Some(ParamExprs::Heun {
            t,
            q,
            a,
            b,
            c: Expr::num_i64(1),
            d,
        });
        assert!(matches!(
            paired_identity(&rec),
            Err(PairError::IntegerExponent { .. })
        ));
    }
}
