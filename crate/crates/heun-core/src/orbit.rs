//! The fractional-linear solution-expression groups of the two equation
//! families: 24 expressions for a local solution of the Gauss equation
//! (Kummer's solutions) and 192 for the Heun equation.
//!
//! A [`SolutionRecord`] denotes, modulo a nonzero constant factor, the
//! function
//!
//! ```text
//!     y(x) = prod_i base_i(x)^gamma_i  *  S(params; mu(x))
//! ```
//!
//! where `S` is the normalized analytic local solution (value 1 at 0) of
//! the recorded equation and `mu` is a fractional-linear argument map.
//! Records are produced in two steps: the classical local bases at each
//! singular point seed the set, and the two-term rewrite rules (Pfaff and
//! Euler transformations for Gauss; exponent flips at the finite points
//! and permutations of `{1, t, oo}` for Heun) are closed over by breadth-
//! first search under a structural canonical form.
//!
//! Every record can be verified against the source equation by an exact
//! residual computation: substituting the inverse argument map reduces
//! the claim to a power-series identity at the origin, checked
//! coefficient by coefficient over the exact scalar field.

use crate::heun::HeunParams;
use crate::hpg::{HypergeometricParams, RecurrenceObstruction};
use crate::moebius::MoebiusMap;
use crate::poly::{render_poly, Polynomial};
use crate::scalar::Scalar;
use crate::scheme::{PointOnLine, RiemannScheme};
use crate::series::TruncatedSeries;
use std::fmt;
use thiserror::Error;

/// Parameters of either equation family.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum EquationParams<K: Scalar> {
    Gauss(HypergeometricParams<K>),
    Heun(HeunParams<K>),
}

impl<K: Scalar> EquationParams<K> {
    pub fn family(&self) -> &'static str {
        match self {
            EquationParams::Gauss(_) => "gauss",
            EquationParams::Heun(_) => "heun",
        }
    }

    pub fn scheme(&self) -> RiemannScheme<K> {
        match self {
            EquationParams::Gauss(p) => p.scheme(),
            EquationParams::Heun(p) => p.scheme(),
        }
    }

    pub fn series(&self, order: usize) -> Result<TruncatedSeries<K>, RecurrenceObstruction> {
        match self {
            EquationParams::Gauss(p) => p.series(order),
            EquationParams::Heun(p) => p.series(order),
        }
    }

    pub fn operator(&self) -> [Polynomial<K>; 3] {
        match self {
            EquationParams::Gauss(p) => p.operator(),
            EquationParams::Heun(p) => p.operator(),
        }
    }

    /// Degrees used to clear the operator coefficients under a
    /// fractional-linear substitution (maximal possible degrees).
    pub fn clearing_degrees(&self) -> [usize; 3] {
        match self {
            EquationParams::Gauss(_) => [2, 1, 0],
            EquationParams::Heun(_) => [3, 2, 1],
        }
    }

    pub fn canonical_order(&self) -> Self {
        match self {
            EquationParams::Gauss(p) => EquationParams::Gauss(p.canonical_order()),
            EquationParams::Heun(p) => EquationParams::Heun(p.canonical_order()),
        }
    }
}

impl<K: Scalar> fmt::Display for EquationParams<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquationParams::Gauss(p) => write!(f, "{p}"),
            EquationParams::Heun(p) => write!(f, "{p}"),
        }
    }
}

/// One factor `base(x)^exponent` of a record prefactor.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PowerFactor<K: Scalar> {
    pub base: Polynomial<K>,
    pub exponent: K,
}

impl<K: Scalar> PowerFactor<K> {
    pub fn new(base: Polynomial<K>, exponent: K) -> Self {
        assert!(!base.is_zero(), "prefactor base must be nonzero");
        PowerFactor { base, exponent }
    }
}

impl<K: Scalar> fmt::Display for PowerFactor<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})^({})", render_poly(&self.base, "x"), self.exponent)
    }
}

/// Product of power factors, understood modulo a nonzero constant.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Prefactor<K: Scalar> {
    pub factors: Vec<PowerFactor<K>>,
}

impl<K: Scalar> Prefactor<K> {
    pub fn one() -> Self {
        Prefactor { factors: vec![] }
    }

    pub fn from_factors(factors: Vec<PowerFactor<K>>) -> Self {
        Prefactor { factors }
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Canonical form: monic bases (constants are dropped — records live
    /// modulo constants), equal bases merged, zero exponents removed,
    /// factors sorted by a stable structural key.
    pub fn canonical(&self) -> Self {
        let mut merged: Vec<PowerFactor<K>> = Vec::new();
        for f in &self.factors {
            if f.base.degree_or_zero() == 0 {
                continue;
            }
            let base = f.base.monic();
            match merged.iter_mut().find(|g| g.base == base) {
                Some(g) => g.exponent = g.exponent.clone() + f.exponent.clone(),
                None => merged.push(PowerFactor {
                    base,
                    exponent: f.exponent.clone(),
                }),
            }
        }
        merged.retain(|f| !f.exponent.is_zero());
        merged.sort_by_key(|f| {
            (
                f.base.degree_or_zero(),
                f.base
                    .coeffs()
                    .iter()
                    .map(|c| c.sort_key())
                    .collect::<Vec<_>>(),
            )
        });
        Prefactor { factors: merged }
    }
}

impl<K: Scalar> fmt::Display for Prefactor<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for factor in &self.factors {
            write!(f, "{factor} * ")?;
        }
        Ok(())
    }
}

/// One expression of a solution: prefactor times the normalized local
/// solution of `params` evaluated at the fractional-linear argument.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SolutionRecord<K: Scalar> {
    pub prefactor: Prefactor<K>,
    pub map: MoebiusMap<K>,
    pub params: EquationParams<K>,
}

impl<K: Scalar> SolutionRecord<K> {
    pub fn canonical(&self) -> Self {
        SolutionRecord {
            prefactor: self.prefactor.canonical(),
            map: self.map.normalize(),
            params: self.params.canonical_order(),
        }
    }
}

impl<K: Scalar> fmt::Display for SolutionRecord<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{} with argument {}",
            self.prefactor,
            self.params,
            self.map.as_rational_function()
        )
    }
}

/// A two-term rewrite rule instantiated at concrete parameters: the local
/// solution satisfies  S(params; y) = prod rho_i(y)^gamma_i * S(new; nu(y)).
struct Rewrite<K: Scalar> {
    rho: Vec<PowerFactor<K>>,
    nu: MoebiusMap<K>,
    params: EquationParams<K>,
}

/// Push a linear factor `l0 + l1*y` through `y = mu(x)`, splitting into
/// linear factors of x and discarding constants.
fn pull_linear_factor<K: Scalar>(
    factor: &PowerFactor<K>,
    mu: &MoebiusMap<K>,
) -> Vec<PowerFactor<K>> {
    assert!(factor.base.degree_or_zero() <= 1);
    let l0 = factor.base.coeff(0);
    let l1 = factor.base.coeff(1);
    let n0 = l0.clone() * mu.s.clone() + l1.clone() * mu.q.clone();
    let n1 = l0 * mu.r.clone() + l1 * mu.p.clone();
    let mut out = Vec::new();
    let num = Polynomial::linear(n0, n1);
    assert!(!num.is_zero(), "invertible argument map cannot kill a factor");
    if num.degree_or_zero() >= 1 {
        out.push(PowerFactor::new(num, factor.exponent.clone()));
    }
    if !mu.r.is_zero() {
        out.push(PowerFactor::new(
            Polynomial::linear(mu.s.clone(), mu.r.clone()),
            -factor.exponent.clone(),
        ));
    }
    out
}

fn apply_rewrite<K: Scalar>(record: &SolutionRecord<K>, rw: &Rewrite<K>) -> SolutionRecord<K> {
    let mut factors = record.prefactor.factors.clone();
    for f in &rw.rho {
        factors.extend(pull_linear_factor(f, &record.map));
    }
    SolutionRecord {
        prefactor: Prefactor::from_factors(factors),
        map: rw.nu.compose(&record.map),
        params: rw.params.clone(),
    }
    .canonical()
}

fn one_minus_y<K: Scalar>() -> Polynomial<K> {
    Polynomial::linear(K::one(), -K::one())
}

fn one_minus_y_over<K: Scalar>(t: &K) -> Polynomial<K> {
    Polynomial::linear(K::one(), -t.inv().expect("movable point is nonzero"))
}

/// The Pfaff and Euler rewrites of a Gauss local solution.
fn gauss_rewrites<K: Scalar>(p: &HypergeometricParams<K>) -> Vec<Rewrite<K>> {
    let (a, b, c) = (p.a.clone(), p.b.clone(), p.c.clone());
    let to_own_half = MoebiusMap::new(K::one(), K::zero(), K::one(), -K::one()); // y/(y-1)
    vec![
        Rewrite {
            rho: vec![PowerFactor::new(one_minus_y(), -a.clone())],
            nu: to_own_half.clone(),
            params: EquationParams::Gauss(HypergeometricParams::new(
                a.clone(),
                c.clone() - b.clone(),
                c.clone(),
            )),
        },
        Rewrite {
            rho: vec![PowerFactor::new(one_minus_y(), -b.clone())],
            nu: to_own_half,
            params: EquationParams::Gauss(HypergeometricParams::new(
                c.clone() - a.clone(),
                b.clone(),
                c.clone(),
            )),
        },
        Rewrite {
            rho: vec![PowerFactor::new(
                one_minus_y(),
                c.clone() - a.clone() - b.clone(),
            )],
            nu: MoebiusMap::identity(),
            params: EquationParams::Gauss(HypergeometricParams::new(
                c.clone() - a.clone(),
                c.clone() - b,
                c,
            )),
        },
    ]
}

/// The eight two-term rewrites of a Heun local solution: three exponent
/// flips at 1 and t, five maps permuting the singular points 1, t, oo.
fn heun_rewrites<K: Scalar>(p: &HeunParams<K>) -> Vec<Rewrite<K>> {
    let (t, q, a, b, c, d) = (
        p.t.clone(),
        p.q.clone(),
        p.a.clone(),
        p.b.clone(),
        p.c.clone(),
        p.d.clone(),
    );
    let one = K::one();
    let two = K::from_i64(2);
    let e = p.e();
    let t_inv = t.inv().expect("movable point is nonzero");
    let tm1_inv = (t.clone() - one.clone())
        .inv()
        .expect("movable point is not 1");
    let hn = |t: K, q: K, a: K, b: K, c: K, d: K| {
        EquationParams::Heun(HeunParams::new(t, q, a, b, c, d))
    };
    vec![
        // interchange the exponents at x = 1
        Rewrite {
            rho: vec![PowerFactor::new(one_minus_y(), one.clone() - d.clone())],
            nu: MoebiusMap::identity(),
            params: hn(
                t.clone(),
                q.clone() - c.clone() * (d.clone() - one.clone()) * t.clone(),
                a.clone() - d.clone() + one.clone(),
                b.clone() - d.clone() + one.clone(),
                c.clone(),
                two.clone() - d.clone(),
            ),
        },
        // interchange the exponents at x = t
        Rewrite {
            rho: vec![PowerFactor::new(
                one_minus_y_over(&t),
                c.clone() + d.clone() - a.clone() - b.clone(),
            )],
            nu: MoebiusMap::identity(),
            params: hn(
                t.clone(),
                q.clone() - c.clone() * (a.clone() + b.clone() - c.clone() - d.clone()),
                c.clone() + d.clone() - a.clone(),
                c.clone() + d.clone() - b.clone(),
                c.clone(),
                d.clone(),
            ),
        },
        // interchange the exponents at both x = 1 and x = t
        Rewrite {
            rho: vec![
                PowerFactor::new(one_minus_y(), one.clone() - d.clone()),
                PowerFactor::new(
                    one_minus_y_over(&t),
                    c.clone() + d.clone() - a.clone() - b.clone(),
                ),
            ],
            nu: MoebiusMap::identity(),
            params: hn(
                t.clone(),
                q.clone()
                    - c.clone()
                        * (a.clone() + b.clone() - c.clone() - d.clone() + d.clone() * t.clone()
                            - t.clone()),
                c.clone() - a.clone() + one.clone(),
                c.clone() - b.clone() + one.clone(),
                c.clone(),
                two.clone() - d.clone(),
            ),
        },
        // swap 1 and t:  y -> y/t
        Rewrite {
            rho: vec![],
            nu: MoebiusMap::new(one.clone(), K::zero(), K::zero(), t.clone()),
            params: hn(
                t_inv.clone(),
                q.clone() * t_inv.clone(),
                a.clone(),
                b.clone(),
                c.clone(),
                e.clone(),
            ),
        },
        // swap 1 and oo:  y -> y/(y-1)
        Rewrite {
            rho: vec![PowerFactor::new(one_minus_y(), -a.clone())],
            nu: MoebiusMap::new(one.clone(), K::zero(), one.clone(), -one.clone()),
            params: hn(
                t.clone() * tm1_inv.clone(),
                (a.clone() * c.clone() * t.clone() - q.clone()) * tm1_inv.clone(),
                a.clone(),
                a.clone() - d.clone() + one.clone(),
                c.clone(),
                a.clone() - b.clone() + one.clone(),
            ),
        },
        // rotate t -> oo -> 1 -> t:  y -> y/(y-t)
        Rewrite {
            rho: vec![PowerFactor::new(one_minus_y_over(&t), -a.clone())],
            nu: MoebiusMap::new(one.clone(), K::zero(), one.clone(), -t.clone()),
            params: hn(
                -tm1_inv.clone(),
                (q.clone() - a.clone() * c.clone()) * tm1_inv.clone(),
                a.clone(),
                c.clone() + d.clone() - b.clone(),
                c.clone(),
                a.clone() - b.clone() + one.clone(),
            ),
        },
        // swap t and oo:  y -> (1-t)y/(y-t)
        Rewrite {
            rho: vec![PowerFactor::new(one_minus_y_over(&t), -a.clone())],
            nu: MoebiusMap::new(
                one.clone() - t.clone(),
                K::zero(),
                one.clone(),
                -t.clone(),
            ),
            params: hn(
                one.clone() - t.clone(),
                a.clone() * c.clone() - q.clone(),
                a.clone(),
                c.clone() + d.clone() - b.clone(),
                c.clone(),
                d.clone(),
            ),
        },
        // rotate 1 -> oo -> t -> 1:  y -> (t-1)y/(t(y-1))
        Rewrite {
            rho: vec![PowerFactor::new(one_minus_y(), -a.clone())],
            nu: MoebiusMap::new(
                t.clone() - one.clone(),
                K::zero(),
                t.clone(),
                -t.clone(),
            ),
            params: hn(
                one.clone() - t_inv.clone(),
                a.clone() * c.clone() - q.clone() * t_inv.clone(),
                a.clone(),
                a.clone() - d.clone() + one.clone(),
                c.clone(),
                e.clone(),
            ),
        },
    ]
}

fn rewrites_for<K: Scalar>(params: &EquationParams<K>) -> Vec<Rewrite<K>> {
    match params {
        EquationParams::Gauss(p) => gauss_rewrites(p),
        EquationParams::Heun(p) => heun_rewrites(p),
    }
}

fn identity_map<K: Scalar>() -> MoebiusMap<K> {
    MoebiusMap::identity()
}

fn one_minus_x_map<K: Scalar>() -> MoebiusMap<K> {
    MoebiusMap::new(-K::one(), K::one(), K::zero(), K::one())
}

fn reciprocal_map<K: Scalar>() -> MoebiusMap<K> {
    MoebiusMap::new(K::zero(), K::one(), K::one(), K::zero())
}

fn x_power<K: Scalar>(exponent: K) -> PowerFactor<K> {
    PowerFactor::new(Polynomial::linear(K::zero(), K::one()), exponent)
}

/// The six classical local solutions of the Gauss equation: two per
/// singular point, ordered (0, 1, oo) x (principal, companion).
pub fn gauss_local_records<K: Scalar>(
    p: &HypergeometricParams<K>,
) -> Vec<SolutionRecord<K>> {
    let (a, b, c) = (p.a.clone(), p.b.clone(), p.c.clone());
    let one = K::one();
    let two = K::from_i64(2);
    let gauss = |a: K, b: K, c: K| EquationParams::Gauss(HypergeometricParams::new(a, b, c));
    vec![
        SolutionRecord {
            prefactor: Prefactor::one(),
            map: identity_map(),
            params: gauss(a.clone(), b.clone(), c.clone()),
        },
        SolutionRecord {
            prefactor: Prefactor::from_factors(vec![x_power(one.clone() - c.clone())]),
            map: identity_map(),
            params: gauss(
                a.clone() - c.clone() + one.clone(),
                b.clone() - c.clone() + one.clone(),
                two - c.clone(),
            ),
        },
        SolutionRecord {
            prefactor: Prefactor::one(),
            map: one_minus_x_map(),
            params: gauss(
                a.clone(),
                b.clone(),
                a.clone() + b.clone() - c.clone() + one.clone(),
            ),
        },
        SolutionRecord {
            prefactor: Prefactor::from_factors(vec![PowerFactor::new(
                one_minus_y(),
                c.clone() - a.clone() - b.clone(),
            )]),
            map: one_minus_x_map(),
            params: gauss(
                c.clone() - a.clone(),
                c.clone() - b.clone(),
                c.clone() - a.clone() - b.clone() + one.clone(),
            ),
        },
        SolutionRecord {
            prefactor: Prefactor::from_factors(vec![x_power(-a.clone())]),
            map: reciprocal_map(),
            params: gauss(
                a.clone(),
                a.clone() - c.clone() + one.clone(),
                a.clone() - b.clone() + one.clone(),
            ),
        },
        SolutionRecord {
            prefactor: Prefactor::from_factors(vec![x_power(-b.clone())]),
            map: reciprocal_map(),
            params: gauss(
                b.clone(),
                b.clone() - c.clone() + one.clone(),
                b.clone() - a.clone() + one,
            ),
        },
    ]
}

/// The eight classical local solutions of the Heun equation: two per
/// singular point, ordered (0, 1, t, oo) x (principal, companion).
pub fn heun_local_records<K: Scalar>(p: &HeunParams<K>) -> Vec<SolutionRecord<K>> {
    let (t, q, a, b, c, d) = (
        p.t.clone(),
        p.q.clone(),
        p.a.clone(),
        p.b.clone(),
        p.c.clone(),
        p.d.clone(),
    );
    let one = K::one();
    let two = K::from_i64(2);
    let t_inv = t.inv().expect("movable point is nonzero");
    let hn = |t: K, q: K, a: K, b: K, c: K, d: K| {
        EquationParams::Heun(HeunParams::new(t, q, a, b, c, d))
    };
    let ab = a.clone() * b.clone();
    // accessory parameters of the companion/shifted local solutions
    let acc0 = q.clone()
        - (c.clone() - one.clone())
            * (a.clone() + b.clone() - c.clone() - d.clone() + d.clone() * t.clone()
                + one.clone());
    let acc1 = ab.clone()
        - q.clone()
        - (d.clone() - one.clone())
            * (a.clone() + b.clone() - c.clone() * t.clone() - d.clone() + one.clone());
    let acc_t = ab.clone() - q.clone() * t_inv.clone()
        + (c.clone() * t_inv.clone() - c.clone() - d.clone())
            * (a.clone() + b.clone() - c.clone() - d.clone());
    let acc_inf_a = q.clone() * t_inv.clone()
        + a.clone()
            * (a.clone() - b.clone() * t_inv.clone() - c.clone() - d.clone()
                + d.clone() * t_inv.clone()
                + one.clone());
    let acc_inf_b = q.clone() * t_inv.clone()
        + b.clone()
            * (b.clone() - a.clone() * t_inv.clone() - c.clone() - d.clone()
                + d.clone() * t_inv.clone()
                + one.clone());
    let e = p.e();
    let t_local_map = MoebiusMap::new(-t_inv.clone(), one.clone(), K::zero(), one.clone());
    vec![
        SolutionRecord {
            prefactor: Prefactor::one(),
            map: identity_map(),
            params: hn(
                t.clone(),
                q.clone(),
                a.clone(),
                b.clone(),
                c.clone(),
                d.clone(),
            ),
        },
        SolutionRecord {
            prefactor: Prefactor::from_factors(vec![x_power(one.clone() - c.clone())]),
            map: identity_map(),
            params: hn(
                t.clone(),
                acc0,
                a.clone() - c.clone() + one.clone(),
                b.clone() - c.clone() + one.clone(),
                two.clone() - c.clone(),
                d.clone(),
            ),
        },
        SolutionRecord {
            prefactor: Prefactor::one(),
            map: one_minus_x_map(),
            params: hn(
                one.clone() - t.clone(),
                ab.clone() - q.clone(),
                a.clone(),
                b.clone(),
                d.clone(),
                c.clone(),
            ),
        },
        SolutionRecord {
            prefactor: Prefactor::from_factors(vec![PowerFactor::new(
                one_minus_y(),
                one.clone() - d.clone(),
            )]),
            map: one_minus_x_map(),
            params: hn(
                one.clone() - t.clone(),
                acc1,
                a.clone() - d.clone() + one.clone(),
                b.clone() - d.clone() + one.clone(),
                two.clone() - d.clone(),
                c.clone(),
            ),
        },
        SolutionRecord {
            prefactor: Prefactor::one(),
            map: t_local_map.clone(),
            params: hn(
                one.clone() - t_inv.clone(),
                ab - q.clone() * t_inv.clone(),
                a.clone(),
                b.clone(),
                e.clone(),
                c.clone(),
            ),
        },
        SolutionRecord {
            prefactor: Prefactor::from_factors(vec![PowerFactor::new(
                one_minus_y_over(&t),
                c.clone() + d.clone() - a.clone() - b.clone(),
            )]),
            map: t_local_map,
            params: hn(
                one.clone() - t_inv.clone(),
                acc_t,
                c.clone() + d.clone() - a.clone(),
                c.clone() + d.clone() - b.clone(),
                two - e.clone(),
                c.clone(),
            ),
        },
        SolutionRecord {
            prefactor: Prefactor::from_factors(vec![x_power(-a.clone())]),
            map: reciprocal_map(),
            params: hn(
                t_inv.clone(),
                acc_inf_a,
                a.clone(),
                a.clone() - c.clone() + one.clone(),
                a.clone() - b.clone() + one.clone(),
                d.clone(),
            ),
        },
        SolutionRecord {
            prefactor: Prefactor::from_factors(vec![x_power(-b.clone())]),
            map: reciprocal_map(),
            params: hn(
                t_inv,
                acc_inf_b,
                b.clone(),
                b.clone() - c.clone() + one.clone(),
                b.clone() - a.clone() + one,
                d,
            ),
        },
    ]
}

fn local_records<K: Scalar>(source: &EquationParams<K>) -> Vec<SolutionRecord<K>> {
    match source {
        EquationParams::Gauss(p) => gauss_local_records(p),
        EquationParams::Heun(p) => heun_local_records(p),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalBasisError {
    #[error("{point} is not a singular point of the equation")]
    NotSingular { point: String },
    #[error(
        "exponent difference {difference} at {point} is an integer; \
         the companion solution may involve logarithms"
    )]
    IntegerExponentDifference { point: String, difference: String },
}

/// The two-dimensional local solution basis at a singular point, as
/// records.  Refuses resonant points (integer exponent difference), where
/// the companion power-series ansatz can break down.
pub fn local_basis<K: Scalar>(
    source: &EquationParams<K>,
    point: &PointOnLine<K>,
) -> Result<[SolutionRecord<K>; 2], LocalBasisError> {
    let scheme = source.scheme();
    let row = scheme
        .row_at(point)
        .ok_or_else(|| LocalBasisError::NotSingular {
            point: format!("{point}"),
        })?;
    if row.has_integer_difference() {
        return Err(LocalBasisError::IntegerExponentDifference {
            point: format!("{point}"),
            difference: format!("{}", row.difference()),
        });
    }
    let seeds = local_records(source);
    let index = scheme
        .rows
        .iter()
        .position(|r| &r.location == point)
        .unwrap();
    Ok([seeds[2 * index].clone(), seeds[2 * index + 1].clone()])
}

/// Closure of the local bases under the rewrite rules: all structurally
/// distinct solution expressions.  24 for a generic Gauss equation, 192
/// for a generic Heun equation; fewer when special parameters make
/// records coincide.
pub fn solution_orbit<K: Scalar>(source: &EquationParams<K>) -> Vec<SolutionRecord<K>> {
    let mut found: Vec<SolutionRecord<K>> = Vec::new();
    let mut frontier: Vec<SolutionRecord<K>> = Vec::new();
    for seed in local_records(source) {
        let c = seed.canonical();
        if !found.contains(&c) {
            found.push(c.clone());
            frontier.push(c);
        }
    }
    while let Some(rec) = frontier.pop() {
        for rw in rewrites_for(&rec.params) {
            let next = apply_rewrite(&rec, &rw);
            if !found.contains(&next) {
                found.push(next.clone());
                frontier.push(next);
            }
        }
    }
    found
}

pub struct OrbitReport<K: Scalar> {
    pub records: Vec<SolutionRecord<K>>,
    /// Generic orbit size for the family (24 or 192).
    pub expected: usize,
}

impl<K: Scalar> OrbitReport<K> {
    /// True when special parameter values made distinct expressions
    /// coincide.
    pub fn collapsed(&self) -> bool {
        self.records.len() < self.expected
    }
}

pub fn orbit_report<K: Scalar>(source: &EquationParams<K>) -> OrbitReport<K> {
    let expected = match source {
        EquationParams::Gauss(_) => 24,
        EquationParams::Heun(_) => 192,
    };
    OrbitReport {
        records: solution_orbit(source),
        expected,
    }
}

/// Outcome of the exact residual check of one record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualCheck {
    pub ok: bool,
    /// Order through which the residual series was computed exactly.
    pub checked_order: usize,
}

fn unit_linear<K: Scalar>(ratio: K, order: usize) -> TruncatedSeries<K> {
    let mut coeffs = vec![K::zero(); order + 1];
    coeffs[0] = K::one();
    if order >= 1 {
        coeffs[1] = ratio;
    }
    TruncatedSeries::from_coeffs(coeffs)
}

/// Verify that a record satisfies the source equation, exactly.
///
/// Substituting the inverse `m` of the record's argument map turns the
/// claim into a statement about `Y(u) = theta(m(u)) * S(params; u)`
/// near u = 0: writing `Y = u^L * W` with `W` an explicit product of
/// unit-series powers and the inner local solution, the pulled-back
/// operator applied to `Y` must vanish identically.  All retained series
/// coefficients are exact, so a true record yields an identically zero
/// residual and any corrupted record fails at low order.
pub fn verify_record<K: Scalar>(
    source: &EquationParams<K>,
    record: &SolutionRecord<K>,
    order: usize,
) -> Result<ResidualCheck, RecurrenceObstruction> {
    let order = order.max(4);
    let m = record.map.inverse();
    let delta = m.det();
    let inner = record.params.series(order)?;
    let mut w = inner;
    let mut lambda = K::zero();
    for f in &record.prefactor.factors {
        assert!(
            f.base.degree_or_zero() <= 1,
            "solution records carry linear prefactor bases"
        );
        let l0 = f.base.coeff(0);
        let l1 = f.base.coeff(1);
        let n0 = l0.clone() * m.s.clone() + l1.clone() * m.q.clone();
        let n1 = l0 * m.r.clone() + l1 * m.p.clone();
        if n0.is_zero() {
            assert!(!n1.is_zero(), "argument map is invertible");
            lambda = lambda + f.exponent.clone();
        } else if !n1.is_zero() {
            let unit = unit_linear(n1 * n0.inv().unwrap(), order);
            w = w.mul(&unit.pow_scalar(&f.exponent).unwrap());
        }
        if m.s.is_zero() {
            lambda = lambda - f.exponent.clone();
        } else if !m.r.is_zero() {
            let unit = unit_linear(m.r.clone() * m.s.inv().unwrap(), order);
            w = w.mul(&unit.pow_scalar(&(-f.exponent.clone())).unwrap());
        }
    }
    let [pa, pb, pc] = source.operator();
    let [da, db, dc] = source.clearing_degrees();
    let num = Polynomial::linear(m.q.clone(), m.p.clone());
    let den = Polynomial::linear(m.s.clone(), m.r.clone());
    let a_hom = pa.compose_fraction(&num, &den, da);
    let b_hom = pb.compose_fraction(&num, &den, db);
    let c_hom = pc.compose_fraction(&num, &den, dc);
    let sigma = den;
    let two_r = m.r.clone() + m.r.clone();
    let g2 = &a_hom * &(&sigma * &sigma);
    let g1 = &(&a_hom.scale(&two_r) + &b_hom.scale(&delta)) * &sigma;
    let g0 = c_hom.scale(&(delta.clone() * delta));
    let w1 = w.derivative();
    let w2 = w1.derivative();
    let x1 = Polynomial::<K>::x();
    let x2 = x1.shift_up(1);
    let lam_lam1 = lambda.clone() * (lambda.clone() - K::one());
    let two_lam = K::from_i64(2) * lambda.clone();
    let term2 = w
        .scale(&lam_lam1)
        .add(&w1.mul_polynomial(&x1).scale(&two_lam))
        .add(&w2.mul_polynomial(&x2));
    let term1 = w
        .mul_polynomial(&x1)
        .scale(&lambda)
        .add(&w1.mul_polynomial(&x2));
    let term0 = w.mul_polynomial(&x2);
    let residual = term2
        .mul_polynomial(&g2)
        .add(&term1.mul_polynomial(&g1))
        .add(&term0.mul_polynomial(&g0));
    Ok(ResidualCheck {
        ok: residual.is_zero(),
        checked_order: residual.order(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new_i64(n, d)
    }

    fn gauss_params() -> EquationParams<Rational> {
        EquationParams::Gauss(HypergeometricParams::new(q(1, 3), q(1, 7), q(2, 5)))
    }

    fn heun_params() -> EquationParams<Rational> {
        EquationParams::Heun(HeunParams::new(
            q(2, 7),
            q(3, 11),
            q(1, 3),
            q(1, 5),
            q(2, 5),
            q(3, 7),
        ))
    }

    #[test]
    fn gauss_orbit_has_24_records() {
        let orbit = solution_orbit(&gauss_params());
        assert_eq!(orbit.len(), 24);
    }

    #[test]
    fn heun_orbit_has_192_records() {
        let orbit = solution_orbit(&heun_params());
        assert_eq!(orbit.len(), 192);
    }

    #[test]
    fn every_gauss_record_satisfies_the_equation() {
        let source = gauss_params();
        for rec in solution_orbit(&source) {
            let check = verify_record(&source, &rec, 8).unwrap();
            assert!(check.ok, "record failed: {rec}");
            assert!(check.checked_order >= 6);
        }
    }

    #[test]
    fn every_heun_record_satisfies_the_equation() {
        let source = heun_params();
        for rec in solution_orbit(&source) {
            let check = verify_record(&source, &rec, 6).unwrap();
            assert!(check.ok, "record failed: {rec}");
        }
    }

    #[test]
    fn corrupted_record_fails_verification() {
        let source = heun_params();
        let orbit = solution_orbit(&source);
        let mut bad = orbit[10].clone();
        if let EquationParams::Heun(p) = &mut bad.params {
            p.q = p.q.clone() + Rational::one();
        }
        let check = verify_record(&source, &bad, 8).unwrap();
        assert!(!check.ok);
    }

    #[test]
    fn exponent_flip_at_one_is_an_involution() {
        let source = heun_params();
        let seed = heun_local_records(match &source {
            EquationParams::Heun(p) => p,
            _ => unreachable!(),
        })[0]
            .canonical();
        let rw = &rewrites_for(&seed.params)[0];
        let once = apply_rewrite(&seed, rw);
        let rw_back = &rewrites_for(&once.params)[0];
        let twice = apply_rewrite(&once, rw_back);
        assert_eq!(twice, seed);
        assert_ne!(once, seed);
    }

    #[test]
    fn orbit_collapses_for_special_parameters() {
        // equal upper parameters identify the two expressions at oo
        let source = EquationParams::Gauss(HypergeometricParams::new(q(1, 3), q(1, 3), q(2, 5)));
        let report = orbit_report(&source);
        assert!(report.collapsed());
        assert!(report.records.len() < 24);
    }

    #[test]
    fn local_basis_returns_verified_pairs() {
        let source = heun_params();
        for point in [
            PointOnLine::zero(),
            PointOnLine::one(),
            PointOnLine::Finite(q(2, 7)),
            PointOnLine::Infinity,
        ] {
            let basis = local_basis(&source, &point).unwrap();
            for rec in basis {
                let check = verify_record(&source, &rec, 8).unwrap();
                assert!(check.ok, "basis record at {point} failed: {rec}");
            }
        }
    }

    #[test]
    fn local_basis_rejects_resonant_and_ordinary_points() {
        let source = gauss_params();
        assert!(matches!(
            local_basis(&source, &PointOnLine::Finite(q(1, 2))),
            Err(LocalBasisError::NotSingular { .. })
        ));
        let resonant = EquationParams::Gauss(HypergeometricParams::new(q(1, 3), q(1, 7), q(1, 1)));
        assert!(matches!(
            local_basis(&resonant, &PointOnLine::zero()),
            Err(LocalBasisError::IntegerExponentDifference { .. })
        ));
    }

    #[test]
    fn prefactor_canonicalization_absorbs_constants() {
        let a = Prefactor::from_factors(vec![PowerFactor::new(
            Polynomial::linear(q(2, 1), q(-2, 1)),
            q(1, 3),
        )]);
        let b = Prefactor::from_factors(vec![PowerFactor::new(
            Polynomial::linear(q(1, 1), q(-1, 1)),
            q(1, 3),
        )]);
        assert_eq!(a.canonical(), b.canonical());
    }

    #[test]
    fn prefactor_merges_and_drops() {
        let p = Prefactor::from_factors(vec![
            PowerFactor::new(Polynomial::linear(q(0, 1), q(1, 1)), q(1, 2)),
            PowerFactor::new(Polynomial::linear(q(0, 1), q(3, 1)), q(-1, 2)),
            PowerFactor::new(Polynomial::constant(q(7, 1)), q(2, 1)),
        ]);
        // x^(1/2) * (3x)^(-1/2) * 7^2  ==  constant
        assert!(p.canonical().is_trivial());
    }
}
