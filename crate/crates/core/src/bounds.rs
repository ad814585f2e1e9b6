//! Turn a verified ideal filtration into a matching bound: the rate
//! function attached to the filtration, its infimum over lambda in (0,1),
//! and the resulting density and cardinality bounds, plus the soft
//! instability bound and the slice-rank count for a cube-zero subspace.
//!
//! Breakpoints are exact rationals and all coefficients are exact integer
//! dimensions; floating point enters only in the one-dimensional
//! minimization, whose result is cross-checked against a grid scan.

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, GroupAlgebra, Ideal};

/// The one-dimensional search runs over log-lambda in [ln(1e-9), 0].
const T_LO: f64 = -20.723_265_836_946_41; // ln(1e-9)
const GOLDEN_ITERS: usize = 120;
const GRID_POINTS: usize = 10_000;
const GRID_REL_TOL: f64 = 1e-9;

/// 2 - 3/2^(2/3): the density deficit per perpendicular-pair filtration
/// with a one-dimensional square-zero ideal, evaluated at runtime.
pub fn square_zero_constant() -> f64 {
    2.0 - 3.0 / 2f64.powf(2.0 / 3.0)
}

#[derive(Debug, Error)]
pub enum BoundError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("invalid filtration: {0}")]
    BadFiltration(String),
    #[error("vanishing condition fails at step triple ({i}, {j}, {l}) with breakpoints ({ai}, {aj}, {al}): product has dimension {product_dim}")]
    VanishingViolation {
        i: usize,
        j: usize,
        l: usize,
        ai: String,
        aj: String,
        al: String,
        product_dim: usize,
    },
    #[error("filtration is not vanishing-verified")]
    NotVerified,
    #[error("hypothesis record incomplete for an ambient-group bound: {0}")]
    HypothesisIncomplete(String),
    #[error("the group has nontrivial center, the ambient-group bound does not apply")]
    NontrivialCenter,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("minimizer missed the grid minimum ({found} vs {grid}); internal error")]
    GridCertification { found: f64, grid: f64 },
    #[error("ambient order overflows: {0}^{1}")]
    AmbientOverflow(usize, u32),
}

/// One step of a descending two-sided ideal chain with its breakpoint.
#[derive(Debug, Clone)]
pub struct FiltrationStep {
    pub alpha: Ratio<i64>,
    pub ideal: Ideal,
}

/// A descending chain J_1 over J_2 over ... with breakpoints
/// 0 < alpha_1 < ... < alpha_k = 1, for the group algebra F_p\[H\].
#[derive(Debug, Clone)]
pub struct Filtration {
    pub group_name: String,
    pub group_order: usize,
    pub p: u64,
    pub steps: Vec<FiltrationStep>,
    pub vanishing_verified: bool,
    pub aut_invariant_verified: bool,
}

impl Filtration {
    /// Validate shape and ideal containments; re-verifies two-sidedness
    /// for any step that does not carry the flag.
    pub fn new(
        ga: &GroupAlgebra,
        steps: Vec<FiltrationStep>,
        aut_invariant_verified: bool,
    ) -> Result<Self, BoundError> {
        if steps.is_empty() {
            return Err(BoundError::BadFiltration("no steps".into()));
        }
        let one = Ratio::from_integer(1);
        let zero = Ratio::from_integer(0);
        let mut prev = zero;
        for (i, step) in steps.iter().enumerate() {
            if step.alpha <= prev || step.alpha > one {
                return Err(BoundError::BadFiltration(format!(
                    "breakpoints must increase strictly inside (0, 1], step {i} has {}",
                    step.alpha
                )));
            }
            prev = step.alpha;
        }
        if steps.last().unwrap().alpha != one {
            return Err(BoundError::BadFiltration("last breakpoint must be 1".into()));
        }
        let mut checked = Vec::with_capacity(steps.len());
        for (i, mut step) in steps.into_iter().enumerate() {
            if !step.ideal.two_sided_verified {
                step.ideal = ga.verify_ideal(step.ideal.space)?;
            }
            if let Some(prev) = checked.last() {
                let prev: &FiltrationStep = prev;
                if !prev.ideal.space.contains(&step.ideal.space).map_err(AlgebraError::from)? {
                    return Err(BoundError::BadFiltration(format!(
                        "step {i} is not contained in step {}",
                        i - 1
                    )));
                }
            }
            checked.push(step);
        }
        Ok(Filtration {
            group_name: ga.group().name().to_string(),
            group_order: ga.dim(),
            p: ga.p(),
            steps: checked,
            vanishing_verified: false,
            aut_invariant_verified,
        })
    }

    pub fn step_dims(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.ideal.dim()).collect()
    }
}

/// Check the finite reduction of the vanishing condition: with J_0 the
/// whole algebra at breakpoint 0, every ordered index triple whose
/// breakpoints sum above 1 must have zero triple product. On each cell of
/// the piecewise-constant chain the supremum of the breakpoint sum is
/// attained at right endpoints, so this finite check covers the whole
/// continuously indexed condition.
///
/// Triples with no zero index are checked first, so a violation among the
/// actual steps is reported before one involving the full algebra.
pub fn verify_vanishing(ga: &GroupAlgebra, f: Filtration) -> Result<Filtration, BoundError> {
    if f.group_order != ga.dim() || f.p != ga.p() {
        return Err(BoundError::BadFiltration("filtration belongs to a different algebra".into()));
    }
    let k = f.steps.len();
    let alpha = |i: usize| -> Ratio<i64> {
        if i == 0 {
            Ratio::from_integer(0)
        } else {
            f.steps[i - 1].alpha
        }
    };
    let ideal = |i: usize| -> Ideal {
        if i == 0 {
            ga.full_ideal()
        } else {
            f.steps[i - 1].ideal.clone()
        }
    };
    let one = Ratio::from_integer(1);
    let mut triples: Vec<(usize, usize, usize)> = Vec::new();
    for i in 0..=k {
        for j in 0..=k {
            for l in 0..=k {
                if alpha(i) + alpha(j) + alpha(l) > one {
                    triples.push((i, j, l));
                }
            }
        }
    }
    // all-positive triples first, then the ones touching the full algebra
    triples.sort_by_key(|&(i, j, l)| {
        let zeros = (i == 0) as usize + (j == 0) as usize + (l == 0) as usize;
        (zeros, i, j, l)
    });
    // products repeat across triples (the pair with the full algebra is
    // the ideal itself, trailing factors recur), so results are pooled by
    // the subspace they equal rather than by index
    let mut pool: Vec<Ideal> = (0..=k).map(ideal).collect();
    let mut memo: std::collections::BTreeMap<(usize, usize), usize> =
        std::collections::BTreeMap::new();
    let mut product = |pool: &mut Vec<Ideal>, a: usize, b: usize| -> Result<usize, BoundError> {
        if let Some(&id) = memo.get(&(a, b)) {
            return Ok(id);
        }
        let prod = ga.ideal_product(&pool[a], &pool[b])?;
        let id = match pool.iter().position(|x| x.space == prod.space) {
            Some(id) => id,
            None => {
                pool.push(prod);
                pool.len() - 1
            }
        };
        memo.insert((a, b), id);
        Ok(id)
    };
    for (i, j, l) in triples {
        let pair = product(&mut pool, i, j)?;
        let triple = product(&mut pool, pair, l)?;
        if !pool[triple].space.is_zero() {
            return Err(BoundError::VanishingViolation {
                i,
                j,
                l,
                ai: alpha(i).to_string(),
                aj: alpha(j).to_string(),
                al: alpha(l).to_string(),
                product_dim: pool[triple].dim(),
            });
        }
    }
    Ok(Filtration { vanishing_verified: true, ..f })
}

/// One term `coeff * lambda^exponent` of the rate function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateTerm {
    pub coeff: u64,
    pub exponent: Ratio<i64>,
}

/// The rate function f(lambda) = dim(k\[H\]/J_1) + sum dim(J_i/J_{i+1})
/// lambda^{alpha_i} + dim(J_k) lambda. Zero coefficients are kept so the
/// shape stays auditable against the filtration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateFunction {
    pub h_order: usize,
    pub terms: Vec<RateTerm>,
}

impl RateFunction {
    pub fn evaluate(&self, lambda: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff as f64 * lambda.powf(ratio_f64(t.exponent)))
            .sum()
    }
}

pub(crate) fn ratio_f64(r: Ratio<i64>) -> f64 {
    r.to_f64().expect("breakpoint converts to f64")
}

pub fn rate_function(f: &Filtration) -> Result<RateFunction, BoundError> {
    let h = f.group_order;
    let dims = f.step_dims();
    let k = dims.len();
    let mut terms = Vec::with_capacity(k + 1);
    terms.push(RateTerm {
        coeff: (h - dims[0]) as u64,
        exponent: Ratio::from_integer(0),
    });
    for i in 0..k - 1 {
        terms.push(RateTerm {
            coeff: (dims[i] - dims[i + 1]) as u64,
            exponent: f.steps[i].alpha,
        });
    }
    terms.push(RateTerm {
        coeff: dims[k - 1] as u64,
        exponent: Ratio::from_integer(1),
    });
    let total: u64 = terms.iter().map(|t| t.coeff).sum();
    assert_eq!(total as usize, h, "rate coefficients must sum to |H|");
    Ok(RateFunction { h_order: h, terms })
}

/// Result of the one-dimensional minimization. `boundary` marks an
/// infimum approached at the edge of (0,1) rather than attained inside;
/// the reported lambda is then the search endpoint, not a minimizer.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateMinimum {
    pub lambda_star: f64,
    pub value: f64,
    pub boundary: bool,
}

/// Minimize g(lambda) = f(lambda) / lambda^(1/3) over (0,1).
///
/// In t = ln(lambda) the objective is a finite sum of exponentials with
/// nonnegative coefficients, hence convex, so a golden-section search on
/// [ln 1e-9, 0] converges; the result is certified against a grid scan.
pub fn minimize_rate(r: &RateFunction) -> Result<RateMinimum, BoundError> {
    let terms: Vec<(f64, f64)> = r
        .terms
        .iter()
        .map(|t| (t.coeff as f64, ratio_f64(t.exponent) - 1.0 / 3.0))
        .collect();
    minimize_log_convex(move |t| {
        terms.iter().map(|&(c, e)| c * (e * t).exp()).sum()
    })
}

/// Golden-section search over t = ln(lambda) plus grid certification.
/// The objective is called with t, i.e. g(e^t).
pub fn minimize_log_convex(g: impl Fn(f64) -> f64) -> Result<RateMinimum, BoundError> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (T_LO, 0.0);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    for _ in 0..GOLDEN_ITERS {
        if (hi - lo).abs() < 1e-12 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = g(x2);
        }
    }
    let t_star = 0.5 * (lo + hi);
    let mut value = g(t_star);
    // endpoints are admissible limits; take whichever is lowest
    for t in [T_LO, 0.0] {
        let v = g(t);
        if v < value {
            value = v;
        }
    }
    let boundary = !(T_LO + 1e-6..=-1e-6).contains(&t_star) || g(T_LO) <= value || g(0.0) <= value;
    let grid_min = (0..=GRID_POINTS)
        .map(|i| g(T_LO + (0.0 - T_LO) * i as f64 / GRID_POINTS as f64))
        .fold(f64::INFINITY, f64::min);
    if value > grid_min * (1.0 + GRID_REL_TOL) + f64::MIN_POSITIVE {
        return Err(BoundError::GridCertification { found: value, grid: grid_min });
    }
    Ok(RateMinimum { lambda_star: t_star.exp(), value, boundary })
}

/// Status of one hypothesis in a bound report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    /// Machine-checked on this run.
    Verified,
    /// Follows from a verified fact by an argument not re-enumerated here.
    Derived,
    /// Supplied by the caller and recorded, never checked.
    Asserted,
    NotApplicable,
}

/// Which hypotheses of the filtration bound were machine-verified.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisRecord {
    pub vanishing: CheckStatus,
    pub ideals_two_sided: CheckStatus,
    pub aut_invariance: CheckStatus,
    pub trivial_center: CheckStatus,
    pub ambient_normality: CheckStatus,
    pub ambient_indecomposability: CheckStatus,
    /// Set when the bound is applied to a proper ambient group: the
    /// transferred cube-zero ideal in the ambient algebra is used as a
    /// formula and never materialized.
    pub conditional_on_ideal_transfer: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateTermReport {
    pub coeff: u64,
    pub exponent: String,
    pub exponent_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepDimReport {
    pub alpha: String,
    pub dim: usize,
}

/// The bound statement for one group, filtration, and power.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub group: String,
    pub group_order: usize,
    pub p: u64,
    pub n: u32,
    pub ambient_order: u128,
    /// c = inf f(lambda)/lambda^(1/3); the per-factor matching bound.
    pub per_factor_rate: f64,
    pub lambda_star: f64,
    pub lambda_boundary: bool,
    /// delta = c / |H|, in (0, 1].
    pub per_factor_density: f64,
    /// ambient_order * delta^n.
    pub bound: f64,
    /// Soft instability density, when the last step ideal squares to zero.
    pub soft_delta: Option<f64>,
    /// For n = 1: the unamplified slice-rank count 3(|H| - dim J) with J
    /// the first step past breakpoint 1/3.
    pub pre_amplification: Option<f64>,
    pub rate_terms: Vec<RateTermReport>,
    pub step_dims: Vec<StepDimReport>,
    pub hypotheses: HypothesisRecord,
}

/// Compute the matching bound from a vanishing-verified filtration.
///
/// With `ambient_order` equal to |H|^n this is the plain power bound
/// c^n. Any other ambient order invokes the normal-subgroup form, which
/// additionally needs verified automorphism invariance and a trivial
/// center; normality and indecomposability of the ambient group are the
/// caller's assertions and are recorded as such.
pub fn bound_from_filtration(
    ga: &GroupAlgebra,
    f: &Filtration,
    n: u32,
    ambient_order: Option<u128>,
) -> Result<BoundReport, BoundError> {
    if !f.vanishing_verified {
        return Err(BoundError::NotVerified);
    }
    if n == 0 {
        return Err(BoundError::Precondition("power n must be at least 1".into()));
    }
    let h = f.group_order;
    let mut power: u128 = 1;
    for _ in 0..n {
        power = power
            .checked_mul(h as u128)
            .ok_or(BoundError::AmbientOverflow(h, n))?;
    }
    let ambient = ambient_order.unwrap_or(power);
    let proper_ambient = ambient != power;

    let rate = rate_function(f)?;
    let minimum = minimize_rate(&rate)?;
    let c = minimum.value;
    let density = c / h as f64;
    assert!(density <= 1.0 + 1e-12, "per-factor density cannot exceed 1");

    let (trivial_center, aut_status) = if proper_ambient {
        if !f.aut_invariant_verified {
            return Err(BoundError::HypothesisIncomplete(
                "automorphism invariance of the filtration is not verified".into(),
            ));
        }
        if ga.group().center().len() != 1 {
            return Err(BoundError::NontrivialCenter);
        }
        (CheckStatus::Verified, CheckStatus::Verified)
    } else {
        (
            CheckStatus::NotApplicable,
            if f.aut_invariant_verified { CheckStatus::Verified } else { CheckStatus::Asserted },
        )
    };

    let last = f.steps.last().unwrap();
    let soft_delta = if ga.is_nilpotent_square(&last.ideal.space)? {
        Some(soft_bound_density(h, last.ideal.dim()))
    } else {
        None
    };

    let pre_amplification = if n == 1 {
        let third = Ratio::new(1, 3);
        let j_dim = f
            .steps
            .iter()
            .find(|s| s.alpha > third)
            .map(|s| s.ideal.dim())
            .unwrap_or(0);
        Some(slice_rank_bound(h, j_dim)? as f64)
    } else {
        None
    };

    let bound = ambient as f64 * density.powi(n as i32);
    Ok(BoundReport {
        group: f.group_name.clone(),
        group_order: h,
        p: f.p,
        n,
        ambient_order: ambient,
        per_factor_rate: c,
        lambda_star: minimum.lambda_star,
        lambda_boundary: minimum.boundary,
        per_factor_density: density,
        bound,
        soft_delta,
        pre_amplification,
        rate_terms: rate
            .terms
            .iter()
            .map(|t| RateTermReport {
                coeff: t.coeff,
                exponent: t.exponent.to_string(),
                exponent_value: ratio_f64(t.exponent),
            })
            .collect(),
        step_dims: f
            .steps
            .iter()
            .map(|s| StepDimReport { alpha: s.alpha.to_string(), dim: s.ideal.dim() })
            .collect(),
        hypotheses: HypothesisRecord {
            vanishing: CheckStatus::Verified,
            ideals_two_sided: CheckStatus::Verified,
            aut_invariance: aut_status,
            trivial_center,
            ambient_normality: if proper_ambient {
                CheckStatus::Asserted
            } else {
                CheckStatus::NotApplicable
            },
            ambient_indecomposability: if proper_ambient {
                CheckStatus::Asserted
            } else {
                CheckStatus::NotApplicable
            },
            conditional_on_ideal_transfer: proper_ambient,
        },
    })
}

/// The closed-form per-factor density for a square-zero ideal of the
/// given dimension: 1 - (2 - 3/2^(2/3)) dim(I) / |H|.
pub fn square_zero_density(h_order: usize, dim_i: usize) -> Result<f64, BoundError> {
    if 2 * dim_i > h_order {
        return Err(BoundError::Precondition(format!(
            "a square-zero ideal sits inside its perpendicular, so 2 dim(I) <= |H|; got dim(I) = {dim_i}, |H| = {h_order}"
        )));
    }
    Ok(1.0 - square_zero_constant() * dim_i as f64 / h_order as f64)
}

/// Instability density exp(-2 (dim I / (3 dim R))^2) for I^2 = 0.
pub fn soft_bound_density(dim_r: usize, dim_i: usize) -> f64 {
    assert!(dim_i <= dim_r, "ideal dimension cannot exceed the algebra dimension");
    let inst = dim_i as f64 / (3.0 * dim_r as f64);
    (-2.0 * inst * inst).exp()
}

/// Slice-rank count 3(|G| - dim K) for a cube-zero subspace K.
pub fn slice_rank_bound(g_order: usize, dim_k: usize) -> Result<u64, BoundError> {
    if dim_k > g_order {
        return Err(BoundError::Precondition(format!(
            "dim K = {dim_k} exceeds |G| = {g_order}"
        )));
    }
    Ok(3 * (g_order - dim_k) as u64)
}

/// The two-step filtration (1/3: perpendicular of I, 1: I) attached to a
/// square-zero two-sided ideal, vanishing-verified.
pub fn square_zero_filtration(ga: &GroupAlgebra, ideal: Ideal) -> Result<Filtration, BoundError> {
    if !ideal.two_sided_verified {
        return Err(AlgebraError::NotTwoSided.into());
    }
    if !ga.is_nilpotent_square(&ideal.space)? {
        return Err(BoundError::Precondition(
            "the ideal must square to zero for the two-step filtration".into(),
        ));
    }
    let perp = ga.perp(&ideal)?;
    assert!(
        perp.space.contains(&ideal.space).map_err(AlgebraError::from)?,
        "a square-zero ideal sits inside its perpendicular"
    );
    let aut = ideal.aut_invariant_verified && perp.aut_invariant_verified;
    let f = Filtration::new(
        ga,
        vec![
            FiltrationStep { alpha: Ratio::new(1, 3), ideal: perp },
            FiltrationStep { alpha: Ratio::from_integer(1), ideal },
        ],
        aut,
    )?;
    verify_vanishing(ga, f)
}

/// Two-step filtration from the sum-of-all-elements ideal; needs p | |H|.
pub fn sum_element_filtration(ga: &GroupAlgebra) -> Result<Filtration, BoundError> {
    let ideal = ga.sum_element_ideal()?;
    square_zero_filtration(ga, ideal)
}
