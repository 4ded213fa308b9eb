//! Series-side quantities: cluster coefficients of log Z, truncated series
//! partial sums, per-polymer log-increments of Z, and the telescoping
//! decompositions that rebuild log Z and correlations from increments.
//!
//! Cluster coefficients and partial sums stay exact rationals; a log enters
//! only where the contract is a float.

use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{PolymerId, PolymerSubset, PolymerSystem};
use crate::numeric::{factorial, ln_ratio, rational_to_f64, ratio_str, Rational};
use crate::partition::{z_negated, z_recursive, ActivityVector};

/// Default ceiling for the general signed-subgraph enumeration.
pub const URSELL_CAP: usize = 7;

/// Enumeration guards for series sums.
#[derive(Debug, Clone, Copy)]
pub struct MayerLimits {
    /// Largest volume the tuple enumeration will walk.
    pub max_support: usize,
    /// Largest series order.
    pub max_order: usize,
    /// Tuple length ceiling for the general cluster-coefficient recursion;
    /// closed-form tuples (lone, disconnected, fully conflicting) are exempt.
    pub ursell_cap: usize,
}

impl Default for MayerLimits {
    fn default() -> Self {
        MayerLimits { max_support: 8, max_order: 6, ursell_cap: URSELL_CAP }
    }
}

impl MayerLimits {
    /// Raises both order-related guards to `order`, the CLI override.
    pub fn with_order(mut self, order: usize) -> Self {
        self.max_order = order;
        self.ursell_cap = self.ursell_cap.max(order);
        self
    }
}

/// Union-find over tuple positions, small enough to clone per branch.
#[derive(Clone)]
struct Components {
    parent: Vec<usize>,
}

impl Components {
    fn new(n: usize) -> Self {
        Components { parent: (0..n).collect() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, u: usize, v: usize) -> bool {
        let (ru, rv) = (self.find(u), self.find(v));
        if ru == rv {
            return false;
        }
        self.parent[ru] = rv;
        true
    }
}

/// Sum of (-1)^{edges} over connected spanning edge subsets, by branching on
/// each edge. A cycle edge splits completions into cancelling pairs, so that
/// branch contributes zero and is cut; what survives is tree growth.
fn signed_connected_sum(n: usize, edges: &[(usize, usize)]) -> i64 {
    fn go(
        edges: &[(usize, usize)],
        idx: usize,
        mut comps: Components,
        ncomp: usize,
        sign: i64,
        acc: &mut i64,
    ) {
        if ncomp == 1 {
            // Remaining edges all close cycles: only the all-excluded
            // completion pairs with nothing, and it pairs off too unless no
            // edges remain.
            if idx == edges.len() {
                *acc += sign;
            }
            return;
        }
        if edges.len() - idx < ncomp - 1 {
            return;
        }
        let (u, v) = edges[idx];
        if comps.find(u) == comps.find(v) {
            return;
        }
        go(edges, idx + 1, comps.clone(), ncomp, sign, acc);
        comps.union(u, v);
        go(edges, idx + 1, comps, ncomp - 1, -sign, acc);
    }
    let mut acc = 0;
    go(edges, 0, Components::new(n), n, 1, &mut acc);
    acc
}

fn tuple_position_edges(system: &PolymerSystem, tuple: &[PolymerId]) -> Vec<(usize, usize)> {
    let n = tuple.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if system.incompatible(tuple[i], tuple[j]) {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Cluster coefficient of an ordered polymer tuple: the signed count of
/// connected spanning subgraphs of the tuple's conflict graph. Zero when
/// that graph is disconnected; (-1)^(n-1) (n-1)! when it is complete (which
/// covers every repeated-single-polymer tuple, since conflict is reflexive).
/// Those closed forms apply at any length; only the general recursion is
/// capped.
pub fn ursell(system: &PolymerSystem, tuple: &[PolymerId], cap: usize) -> Result<Rational> {
    if tuple.is_empty() {
        return Err(Error::EmptyTuple);
    }
    let check: PolymerSubset = tuple.iter().copied().collect();
    system.check_volume(&check)?;
    let n = tuple.len();
    if n == 1 {
        return Ok(Rational::one());
    }
    let edges = tuple_position_edges(system, tuple);

    let mut comps = Components::new(n);
    let mut ncomp = n;
    for &(u, v) in &edges {
        if comps.union(u, v) {
            ncomp -= 1;
        }
    }
    if ncomp > 1 {
        return Ok(Rational::zero());
    }
    if edges.len() == n * (n - 1) / 2 {
        let mag = Rational::from_integer(factorial(n - 1));
        return Ok(if n % 2 == 0 { -mag } else { mag });
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what: "cluster-coefficient subgraph enumeration",
            size: n,
            cap,
            hint: "raise --order only for closed-form tuples",
        });
    }
    Ok(Rational::from_integer(BigInt::from(signed_connected_sum(n, &edges))))
}

/// Cumulative truncated series sums for log Z over the volume: entry k-1
/// holds the sum of all orders up to k. Tuples are walked as multisets; a
/// multiset with exponents k_x contributes its coefficient times
/// prod w_x^{k_x} / k_x!.
pub fn mayer_partial_sums(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    w: &ActivityVector,
    order: usize,
    limits: &MayerLimits,
) -> Result<Vec<Rational>> {
    w.check_matches(system, "activities")?;
    system.check_volume(volume)?;
    if order == 0 {
        return Err(Error::ZeroOrder);
    }
    if order > limits.max_order {
        return Err(Error::CapExceeded {
            what: "series order",
            size: order,
            cap: limits.max_order,
            hint: "raise --order",
        });
    }
    if volume.len() > limits.max_support {
        return Err(Error::CapExceeded {
            what: "series support",
            size: volume.len(),
            cap: limits.max_support,
            hint: "restrict the volume",
        });
    }
    let elems: Vec<PolymerId> = volume.iter().copied().collect();
    let mut by_order = vec![Rational::zero(); order + 1];
    let mut exponents = vec![0usize; elems.len()];
    walk_multisets(
        system,
        &elems,
        w,
        order,
        limits.ursell_cap,
        0,
        0,
        &mut exponents,
        &mut by_order,
    )?;
    let mut sums = Vec::with_capacity(order);
    let mut acc = Rational::zero();
    for term in by_order.into_iter().skip(1) {
        acc += term;
        sums.push(acc.clone());
    }
    Ok(sums)
}

#[allow(clippy::too_many_arguments)]
fn walk_multisets(
    system: &PolymerSystem,
    elems: &[PolymerId],
    w: &ActivityVector,
    order: usize,
    ursell_cap: usize,
    pos: usize,
    size: usize,
    exponents: &mut Vec<usize>,
    by_order: &mut [Rational],
) -> Result<()> {
    if size > 0 && pos == elems.len() {
        let mut tuple = Vec::with_capacity(size);
        let mut weight = Rational::one();
        let mut sym = BigInt::one();
        for (i, &k) in exponents.iter().enumerate() {
            for _ in 0..k {
                tuple.push(elems[i]);
                weight *= w.get(elems[i]);
            }
            sym *= factorial(k);
        }
        if !weight.is_zero() {
            let coeff = ursell(system, &tuple, ursell_cap)?;
            by_order[size] += coeff * weight / Rational::from_integer(sym);
        }
        return Ok(());
    }
    if pos == elems.len() {
        return Ok(());
    }
    for k in 0..=(order - size) {
        exponents[pos] = k;
        walk_multisets(
            system,
            elems,
            w,
            order,
            ursell_cap,
            pos + 1,
            size + k,
            exponents,
            by_order,
        )?;
    }
    exponents[pos] = 0;
    Ok(())
}

/// Float value of the order-N truncated series for log Z.
pub fn mayer_log_z(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    w: &ActivityVector,
    order: usize,
    limits: &MayerLimits,
) -> Result<f64> {
    if volume.is_empty() {
        return Ok(0.0);
    }
    let sums = mayer_partial_sums(system, volume, w, order, limits)?;
    Ok(rational_to_f64(sums.last().expect("order >= 1")))
}

fn positive_or_witness(value: Rational, what: &str) -> Result<Rational> {
    if value.is_positive() {
        Ok(value)
    } else {
        Err(Error::OutsidePositivity {
            witness: format!("{what} = {}", ratio_str(&value)),
        })
    }
}

/// log Z over the volume minus log Z without `x`: the single-polymer
/// increment. Exact ratio first, one log at the end.
pub fn log_z_increment(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    x: PolymerId,
    w: &ActivityVector,
) -> Result<f64> {
    if !volume.contains(&x) {
        return Err(Error::NotASubset { what: format!("increment pivot {x} in the volume") });
    }
    let whole = positive_or_witness(z_recursive(system, volume, w)?, "Z(volume)")?;
    let rest: PolymerSubset = volume.iter().copied().filter(|&y| y != x).collect();
    let without = positive_or_witness(z_recursive(system, &rest, w)?, "Z(volume minus pivot)")?;
    Ok(ln_ratio(&whole, &without))
}

/// Exact ratio behind the positive increment majorant: Z without `x` over Z
/// with it, both at negated activities. At most 1 + mu_x under a certified
/// radius; its log is the majorant value.
pub fn abs_increment_ratio(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    x: PolymerId,
    p: &ActivityVector,
) -> Result<Rational> {
    if !volume.contains(&x) {
        return Err(Error::NotASubset { what: format!("increment pivot {x} in the volume") });
    }
    let whole = positive_or_witness(z_negated(system, volume, p)?, "Z(volume at negated p)")?;
    let rest: PolymerSubset = volume.iter().copied().filter(|&y| y != x).collect();
    let without =
        positive_or_witness(z_negated(system, &rest, p)?, "Z(volume minus pivot at negated p)")?;
    Ok(without / whole)
}

/// Positive majorant of the increment at nonnegative `p`: equals the
/// negated-increment value wherever both are defined.
pub fn log_z_increment_abs(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    x: PolymerId,
    p: &ActivityVector,
) -> Result<f64> {
    p.check_nonnegative()?;
    let ratio = abs_increment_ratio(system, volume, x, p)?;
    Ok(crate::numeric::ln_rational(&ratio))
}

/// Rebuilds log Z as a sum of increments along prefix volumes of the given
/// ordering: each step adds one polymer and logs the exact ratio.
pub fn telescope_log_z(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    w: &ActivityVector,
    ordering: &[PolymerId],
) -> Result<f64> {
    let as_set: PolymerSubset = ordering.iter().copied().collect();
    if as_set.len() != ordering.len() || &as_set != volume {
        return Err(Error::BadOrdering);
    }
    let mut prefix = PolymerSubset::new();
    let mut prev = Rational::one();
    let mut total = 0.0;
    for &x in ordering {
        prefix.insert(x);
        let cur = positive_or_witness(z_recursive(system, &prefix, w)?, "Z(prefix volume)")?;
        total += ln_ratio(&cur, &prev);
        prev = cur;
    }
    Ok(total)
}

/// Evaluates the correlation of `S` through the increment form: the activity
/// product times exp of minus the increments that peel `S` out of the
/// volume. Matches the exact-ratio correlation wherever Z stays positive.
pub fn telescope_correlation(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    s: &PolymerSubset,
    w: &ActivityVector,
) -> Result<f64> {
    system.check_subset(s, volume, "correlation configuration")?;
    if !system.is_independent(s) {
        return Err(Error::DependentSubset(format!("{s:?}")));
    }
    let mut current = volume.clone();
    let mut increments = 0.0;
    // Peel in descending id order; the reassembled value is order-free.
    for &x in s.iter().rev() {
        increments += log_z_increment(system, &current, x, w)?;
        current.remove(&x);
    }
    let mut prod = Rational::one();
    for &x in s {
        prod *= w.get(x);
    }
    Ok(rational_to_f64(&prod) * (-increments).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{full_range, make_family, Family};
    use crate::numeric::{ln_rational, ratio};
    use crate::partition::correlation;

    fn lone() -> PolymerSystem {
        make_family(Family::Edgeless(1)).unwrap()
    }

    #[test]
    fn coefficient_base_cases() {
        let sys = make_family(Family::Path(3)).unwrap();
        assert_eq!(ursell(&sys, &[0], URSELL_CAP).unwrap(), ratio(1, 1));
        assert_eq!(ursell(&sys, &[0, 0], URSELL_CAP).unwrap(), ratio(-1, 1));
        assert_eq!(ursell(&sys, &[0, 2], URSELL_CAP).unwrap(), ratio(0, 1));
        assert_eq!(ursell(&sys, &[0, 1], URSELL_CAP).unwrap(), ratio(-1, 1));
        // Both conflict edges are needed to span three positions.
        assert_eq!(ursell(&sys, &[0, 1, 2], URSELL_CAP).unwrap(), ratio(1, 1));
        assert!(matches!(ursell(&sys, &[], URSELL_CAP), Err(Error::EmptyTuple)));
    }

    #[test]
    fn closed_forms_match_enumeration() {
        // Fully conflicting tuples: compare the factorial form against the
        // general recursion on complete conflict graphs.
        for n in 2..=6 {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    edges.push((i, j));
                }
            }
            let direct = signed_connected_sum(n, &edges);
            let closed = if n % 2 == 0 { -1i64 } else { 1 }
                * (1..n as i64).product::<i64>();
            assert_eq!(direct, closed, "complete on {n}");
        }
        // The closed form engages above the recursion cap.
        let sys = lone();
        let t = vec![0; 20];
        let val = ursell(&sys, &t, URSELL_CAP).unwrap();
        assert_eq!(val, -Rational::from_integer(factorial(19)));
    }

    #[test]
    fn general_recursion_is_capped() {
        let p3 = make_family(Family::Path(3)).unwrap();
        // Mixed tuple whose conflict graph is connected but incomplete.
        let mut t = vec![0, 1, 2];
        t.extend(std::iter::repeat(1).take(6));
        assert!(matches!(
            ursell(&p3, &t, URSELL_CAP),
            Err(Error::CapExceeded { size: 9, cap: URSELL_CAP, .. })
        ));
    }

    #[test]
    fn alternating_sign_small() {
        let sys = make_family(Family::Cycle(4)).unwrap();
        let ids = [0usize, 1, 2, 3];
        for n in 1..=3usize {
            let mut idx = vec![0usize; n];
            loop {
                let tuple: Vec<PolymerId> = idx.iter().map(|&i| ids[i]).collect();
                let v = ursell(&sys, &tuple, URSELL_CAP).unwrap();
                let signed = if n % 2 == 0 { -v.clone() } else { v.clone() };
                assert!(!signed.is_negative(), "tuple {tuple:?} gave {v}");
                let mut k = n;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < ids.len() {
                        break;
                    }
                    idx[k] = 0;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
    }

    #[test]
    fn series_partial_sums_single_polymer() {
        let sys = lone();
        let w = ActivityVector::uniform(1, ratio(1, 5));
        let limits = MayerLimits::default();
        let sums = mayer_partial_sums(&sys, &full_range(1), &w, 3, &limits).unwrap();
        assert_eq!(sums[0], ratio(1, 5));
        assert_eq!(sums[1], ratio(9, 50));
        assert_eq!(sums[2], ratio(137, 750));
    }

    #[test]
    fn series_partial_sums_conflicting_pair() {
        let k2 = make_family(Family::Complete(2)).unwrap();
        let w = ActivityVector::uniform(2, ratio(1, 10));
        let limits = MayerLimits::default();
        let sums = mayer_partial_sums(&k2, &full_range(2), &w, 2, &limits).unwrap();
        assert_eq!(sums[0], ratio(1, 5));
        assert_eq!(sums[1], ratio(9, 50));
    }

    #[test]
    fn series_guards() {
        let sys = lone();
        let w = ActivityVector::uniform(1, ratio(1, 5));
        let limits = MayerLimits::default();
        assert!(matches!(
            mayer_partial_sums(&sys, &full_range(1), &w, 0, &limits),
            Err(Error::ZeroOrder)
        ));
        assert!(matches!(
            mayer_partial_sums(&sys, &full_range(1), &w, 7, &limits),
            Err(Error::CapExceeded { .. })
        ));
        let wide = make_family(Family::Edgeless(9)).unwrap();
        let w9 = ActivityVector::uniform(9, ratio(1, 5));
        assert!(matches!(
            mayer_partial_sums(&wide, &full_range(9), &w9, 2, &limits),
            Err(Error::CapExceeded { .. })
        ));
        // The order override lifts both order guards.
        let sums =
            mayer_partial_sums(&sys, &full_range(1), &w, 20, &limits.with_order(20)).unwrap();
        let gap = rational_to_f64(&sums[19]) - ln_rational(&ratio(6, 5));
        assert!(gap.abs() < 1e-9);
    }

    #[test]
    fn increment_values() {
        let sys = lone();
        let w = ActivityVector::uniform(1, ratio(1, 2));
        let volume = full_range(1);
        let got = log_z_increment(&sys, &volume, 0, &w).unwrap();
        assert!((got - 1.5f64.ln()).abs() < 1e-14);

        let zero = ActivityVector::zeros(1);
        assert_eq!(log_z_increment(&sys, &volume, 0, &zero).unwrap(), 0.0);

        let p3 = make_family(Family::Path(3)).unwrap();
        let ones = ActivityVector::uniform(3, ratio(1, 1));
        let got = log_z_increment(&p3, &full_range(3), 1, &ones).unwrap();
        // Z over the whole path is 5; without the middle polymer the two
        // ends are compatible, so Z drops to 4.
        assert!((got - 1.25f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn positive_increment_majorant() {
        let sys = lone();
        let volume = full_range(1);
        // p = mu/(1+mu) at mu = 1 is the tight point: value log 2.
        let p = ActivityVector::uniform(1, ratio(1, 2));
        let got = log_z_increment_abs(&sys, &volume, 0, &p).unwrap();
        assert!((got - 2f64.ln()).abs() < 1e-14);
        assert_eq!(abs_increment_ratio(&sys, &volume, 0, &p).unwrap(), ratio(2, 1));

        let zero = ActivityVector::zeros(1);
        assert_eq!(log_z_increment_abs(&sys, &volume, 0, &zero).unwrap(), 0.0);

        let boundary = ActivityVector::uniform(1, ratio(1, 1));
        assert!(matches!(
            log_z_increment_abs(&sys, &volume, 0, &boundary),
            Err(Error::OutsidePositivity { .. })
        ));
    }

    #[test]
    fn negated_increment_agreement() {
        let p3 = make_family(Family::Path(3)).unwrap();
        let p = ActivityVector::uniform(3, ratio(1, 6));
        let volume = full_range(3);
        for x in 0..3 {
            let abs = log_z_increment_abs(&p3, &volume, x, &p).unwrap();
            let neg = log_z_increment(&p3, &volume, x, &p.negated()).unwrap();
            assert!((abs + neg).abs() < 1e-12);
        }
    }

    #[test]
    fn telescoping_log_z() {
        let p3 = make_family(Family::Path(3)).unwrap();
        let ones = ActivityVector::uniform(3, ratio(1, 1));
        let volume = full_range(3);
        let want = ln_rational(&ratio(5, 1));
        for ordering in [[0, 1, 2], [2, 0, 1], [1, 2, 0]] {
            let got = telescope_log_z(&p3, &volume, &ones, &ordering).unwrap();
            assert!((got - want).abs() < 1e-12);
        }
        assert!(matches!(
            telescope_log_z(&p3, &volume, &ones, &[0, 1]),
            Err(Error::BadOrdering)
        ));
        assert!(matches!(
            telescope_log_z(&p3, &volume, &ones, &[0, 1, 1]),
            Err(Error::BadOrdering)
        ));
        let empty = PolymerSubset::new();
        assert_eq!(telescope_log_z(&p3, &empty, &ones, &[]).unwrap(), 0.0);
    }

    #[test]
    fn telescoping_correlation() {
        let sys = lone();
        let w = ActivityVector::uniform(1, ratio(1, 2));
        let got = telescope_correlation(&sys, &full_range(1), &full_range(1), &w).unwrap();
        assert!((got - 1.0 / 3.0).abs() < 1e-14);

        let p3 = make_family(Family::Path(3)).unwrap();
        let ones = ActivityVector::uniform(3, ratio(1, 1));
        let s: PolymerSubset = [0, 2].into_iter().collect();
        let got = telescope_correlation(&p3, &full_range(3), &s, &ones).unwrap();
        let want = rational_to_f64(&correlation(&p3, &full_range(3), &s, &ones).unwrap());
        assert!((got - want).abs() < 1e-12);

        let dependent: PolymerSubset = [0, 1].into_iter().collect();
        assert!(matches!(
            telescope_correlation(&p3, &full_range(3), &dependent, &ones),
            Err(Error::DependentSubset(_))
        ));

        let empty = PolymerSubset::new();
        let got = telescope_correlation(&p3, &full_range(3), &empty, &ones).unwrap();
        assert_eq!(got, 1.0);
    }
}
