//! Convergence certificates. For a polymer `x` and nonnegative reference
//! weights, two denominators turn the weights into an activity radius: the
//! partition function over the conflict neighborhood (the sharper one), and
//! the product of (1 + weight) over the same neighborhood (the classical
//! one). The first always dominates, giving a radius at least as large.

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{PolymerId, PolymerSystem};
use crate::numeric::{rational_to_f64, ratio_str, snap_to_rational, Rational};
use crate::partition::{z_recursive, ActivityVector, BRUTE_CAP};

/// Per-polymer nonnegative exact reference weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuVector {
    values: ActivityVector,
}

impl MuVector {
    pub fn from_values(values: Vec<Rational>) -> Result<Self> {
        let values = ActivityVector::from_values(values);
        values.check_nonnegative()?;
        Ok(MuVector { values })
    }

    pub fn uniform(n: usize, value: Rational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::NegativeActivity { id: 0, value: ratio_str(&value) });
        }
        Ok(MuVector { values: ActivityVector::uniform(n, value) })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, x: PolymerId) -> &Rational {
        self.values.get(x)
    }

    /// The same weights in the signed container, for Z evaluations.
    pub fn as_activities(&self) -> &ActivityVector {
        &self.values
    }

    pub fn check_matches(&self, system: &PolymerSystem, what: &'static str) -> Result<()> {
        self.values.check_matches(system, what)
    }
}

fn check_neighborhood_cap(system: &PolymerSystem, x: PolymerId, cap: usize) -> Result<()> {
    let size = system.closed_neighborhood(x).len();
    if size > cap {
        return Err(Error::CapExceeded {
            what: "conflict neighborhood",
            size,
            cap,
            hint: "raise --cap",
        });
    }
    Ok(())
}

/// Partition function over the closed conflict neighborhood of `x` at the
/// reference weights. Always at least 1 + mu_x.
pub fn fp_denominator(
    system: &PolymerSystem,
    x: PolymerId,
    mu: &MuVector,
    cap: usize,
) -> Result<Rational> {
    mu.check_matches(system, "reference weights")?;
    check_neighborhood_cap(system, x, cap)?;
    z_recursive(system, system.closed_neighborhood(x), mu.as_activities())
}

/// Product of (1 + mu_y) over the closed conflict neighborhood of `x`: the
/// unconstrained sum over all its subsets.
pub fn dobrushin_denominator(
    system: &PolymerSystem,
    x: PolymerId,
    mu: &MuVector,
    cap: usize,
) -> Result<Rational> {
    mu.check_matches(system, "reference weights")?;
    check_neighborhood_cap(system, x, cap)?;
    let mut prod = Rational::one();
    for &y in system.closed_neighborhood(x) {
        prod *= Rational::one() + mu.get(y);
    }
    Ok(prod)
}

/// Certified activity radius for `x` from the neighborhood partition
/// function: mu_x over the sharp denominator.
pub fn fp_radius(
    system: &PolymerSystem,
    x: PolymerId,
    mu: &MuVector,
    cap: usize,
) -> Result<Rational> {
    Ok(mu.get(x) / fp_denominator(system, x, mu, cap)?)
}

/// Radius from the product denominator; never exceeds `fp_radius`.
pub fn dobrushin_radius(
    system: &PolymerSystem,
    x: PolymerId,
    mu: &MuVector,
    cap: usize,
) -> Result<Rational> {
    Ok(mu.get(x) / dobrushin_denominator(system, x, mu, cap)?)
}

/// All per-polymer sharp radii, usable directly as an activity vector.
pub fn fp_radii(system: &PolymerSystem, mu: &MuVector, cap: usize) -> Result<ActivityVector> {
    let mut out = Vec::with_capacity(system.len());
    for x in 0..system.len() {
        out.push(fp_radius(system, x, mu, cap)?);
    }
    Ok(ActivityVector::from_values(out))
}

#[derive(Debug, Clone)]
pub struct RadiusRow {
    pub id: PolymerId,
    pub mu: Rational,
    pub fp: Rational,
    pub dobrushin: Rational,
}

#[derive(Debug, Clone)]
pub struct RadiiReport {
    pub rows: Vec<RadiusRow>,
    pub min_fp: Rational,
    pub min_dobrushin: Rational,
    /// Sharp radius at least the product radius for every polymer.
    pub domination_ok: bool,
}

pub fn radii_report(system: &PolymerSystem, mu: &MuVector, cap: usize) -> Result<RadiiReport> {
    if system.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut rows = Vec::with_capacity(system.len());
    for x in 0..system.len() {
        rows.push(RadiusRow {
            id: x,
            mu: mu.get(x).clone(),
            fp: fp_radius(system, x, mu, cap)?,
            dobrushin: dobrushin_radius(system, x, mu, cap)?,
        });
    }
    let min_fp = rows.iter().map(|r| r.fp.clone()).min().expect("nonempty");
    let min_dobrushin = rows.iter().map(|r| r.dobrushin.clone()).min().expect("nonempty");
    let domination_ok = rows.iter().all(|r| r.fp >= r.dobrushin);
    Ok(RadiiReport { rows, min_fp, min_dobrushin, domination_ok })
}

/// Which radius the scalar optimizer maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    FernandezProcacci,
    Dobrushin,
}

impl Objective {
    pub fn name(&self) -> &'static str {
        match self {
            Objective::FernandezProcacci => "fp",
            Objective::Dobrushin => "dobrushin",
        }
    }
}

/// Scan range for the uniform reference weight.
#[derive(Debug, Clone)]
pub struct MuGrid {
    pub lo: Rational,
    pub hi: Rational,
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct OptimumReport {
    pub objective: Objective,
    /// Rational snap of the maximizer; every reported value is exact at it.
    pub mu: Rational,
    pub radius: Rational,
    /// The argmax sat on the top grid end: the objective looks monotone and
    /// the true supremum may lie beyond the scanned range.
    pub at_upper_boundary: bool,
}

/// Worst-polymer radius at a uniform weight, the optimizer's objective.
pub fn uniform_objective(
    system: &PolymerSystem,
    objective: Objective,
    mu_scalar: &Rational,
    cap: usize,
) -> Result<Rational> {
    let mu = MuVector::uniform(system.len(), mu_scalar.clone())?;
    let mut worst: Option<Rational> = None;
    for x in 0..system.len() {
        let r = match objective {
            Objective::FernandezProcacci => fp_radius(system, x, &mu, cap)?,
            Objective::Dobrushin => dobrushin_radius(system, x, &mu, cap)?,
        };
        worst = Some(match worst {
            Some(w) => w.min(r),
            None => r,
        });
    }
    worst.ok_or(Error::EmptyFamily)
}

const SNAP_DENOMINATOR_LIMIT: u64 = 1_000_000;

/// Maximizes the worst-polymer radius over a uniform scalar weight: exact
/// comparisons on the grid, golden-section refinement between the grid
/// neighbors of the winner, then a rational snap re-evaluated exactly so the
/// reported certificate never depends on float rounding.
pub fn optimize_mu_uniform(
    system: &PolymerSystem,
    objective: Objective,
    grid: &MuGrid,
    refine_iters: usize,
    cap: usize,
) -> Result<OptimumReport> {
    if grid.lo.is_negative() {
        return Err(Error::DegenerateGrid("lower end must be nonnegative".into()));
    }
    if grid.hi <= grid.lo {
        return Err(Error::DegenerateGrid("upper end must exceed lower end".into()));
    }
    if grid.steps < 2 {
        return Err(Error::DegenerateGrid("need at least 2 grid steps".into()));
    }
    let span = &grid.hi - &grid.lo;
    let denom = Rational::from_integer((grid.steps as i64 - 1).into());
    let point = |i: usize| &grid.lo + &span * Rational::from_integer((i as i64).into()) / &denom;

    let mut best_i = 0usize;
    let mut best_val = uniform_objective(system, objective, &point(0), cap)?;
    for i in 1..grid.steps {
        let val = uniform_objective(system, objective, &point(i), cap)?;
        if val > best_val {
            best_val = val;
            best_i = i;
        }
    }

    let at_upper_boundary = best_i == grid.steps - 1;
    let mut mu_best = point(best_i);
    if !at_upper_boundary && best_i > 0 {
        let lo = rational_to_f64(&point(best_i - 1));
        let hi = rational_to_f64(&point(best_i + 1));
        let refined = golden_section(
            |m| {
                let q = Rational::from_float(m).unwrap_or_else(Rational::zero);
                uniform_objective(system, objective, &q, cap)
                    .map(|v| rational_to_f64(&v))
                    .unwrap_or(f64::NEG_INFINITY)
            },
            lo,
            hi,
            refine_iters,
        );
        let snapped = snap_to_rational(refined, SNAP_DENOMINATOR_LIMIT);
        let snapped = if snapped.is_negative() { Rational::zero() } else { snapped };
        // Keep the snap only if it is exactly at least as good.
        let snapped_val = uniform_objective(system, objective, &snapped, cap)?;
        if snapped_val >= best_val {
            best_val = snapped_val;
            mu_best = snapped;
        }
    }
    Ok(OptimumReport {
        objective,
        mu: mu_best,
        radius: best_val,
        at_upper_boundary,
    })
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Default cap for neighborhood enumerations, shared with the brute path.
pub const NEIGHBORHOOD_CAP: usize = BRUTE_CAP;
