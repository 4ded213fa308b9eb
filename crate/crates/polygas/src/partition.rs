//! Exact partition functions: the weighted count of independent
//! configurations inside a volume, computed two independent ways, plus the
//! negated-activity transform, correlations, and log-subadditivity.
//!
//! All arithmetic here is exact rational; nothing in this module rounds.

use std::collections::HashMap;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{PolymerId, PolymerSubset, PolymerSystem};
use crate::numeric::{ratio_str, Rational};

/// Default ceiling for the brute-force subset enumeration.
pub const BRUTE_CAP: usize = 24;
/// Default ceiling for exhaustive all-subset verifier tables.
pub const EXHAUSTIVE_CAP: usize = 16;
/// Hard limit of the bitmask machinery.
pub const VOLUME_LIMIT: usize = 64;

/// Per-polymer exact rational values. The same container carries activities,
/// their negations, and nonnegative reference weights; the role is
/// contextual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityVector {
    values: Vec<Rational>,
}

impl ActivityVector {
    pub fn from_values(values: Vec<Rational>) -> Self {
        ActivityVector { values }
    }

    pub fn uniform(n: usize, value: Rational) -> Self {
        ActivityVector { values: vec![value; n] }
    }

    pub fn zeros(n: usize) -> Self {
        Self::uniform(n, Rational::zero())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, x: PolymerId) -> &Rational {
        &self.values[x]
    }

    pub fn set(&mut self, x: PolymerId, value: Rational) {
        self.values[x] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = &Rational> {
        self.values.iter()
    }

    /// Componentwise negation (the two signed roles of the same vector).
    pub fn negated(&self) -> Self {
        ActivityVector { values: self.values.iter().map(|v| -v).collect() }
    }

    /// One value per polymer of `system`.
    pub fn check_matches(&self, system: &PolymerSystem, what: &'static str) -> Result<()> {
        if self.len() == system.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch { what, got: self.len(), want: system.len() })
        }
    }

    pub fn check_nonnegative(&self) -> Result<()> {
        for (id, v) in self.values.iter().enumerate() {
            if v.is_negative() {
                return Err(Error::NegativeActivity { id, value: ratio_str(v) });
            }
        }
        Ok(())
    }
}

/// A volume projected onto dense bit positions, with conflict masks.
#[derive(Debug, Clone)]
pub(crate) struct DenseVolume {
    pub n: usize,
    /// Closed-neighborhood masks within the volume; bit `i` always set in
    /// `adj[i]`.
    pub adj: Vec<u64>,
    /// `back[i]` is the original id at bit `i`, increasing.
    pub back: Vec<PolymerId>,
}

impl DenseVolume {
    pub fn build(system: &PolymerSystem, volume: &PolymerSubset) -> Result<Self> {
        system.check_volume(volume)?;
        if volume.len() > VOLUME_LIMIT {
            return Err(Error::VolumeTooLarge(volume.len()));
        }
        let back: Vec<PolymerId> = volume.iter().copied().collect();
        let n = back.len();
        let mut adj = vec![0u64; n];
        for (i, &x) in back.iter().enumerate() {
            for (j, &y) in back.iter().enumerate() {
                if system.incompatible(x, y) {
                    adj[i] |= 1 << j;
                }
            }
        }
        Ok(DenseVolume { n, adj, back })
    }

    pub fn full_mask(&self) -> u64 {
        if self.n == VOLUME_LIMIT {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Per-bit weights for this volume.
    pub fn project(&self, w: &ActivityVector) -> Vec<Rational> {
        self.back.iter().map(|&x| w.get(x).clone()).collect()
    }

    /// Bitmask of a subset of the volume; caller guarantees containment.
    pub fn mask_of(&self, sub: &PolymerSubset) -> u64 {
        let mut mask = 0u64;
        for &x in sub {
            let i = self.back.binary_search(&x).expect("subset of the volume");
            mask |= 1 << i;
        }
        mask
    }

    /// True when no two distinct bits of `mask` conflict.
    pub fn mask_independent(&self, mask: u64) -> bool {
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            if self.adj[i] & mask != 1 << i {
                return false;
            }
            rest &= rest - 1;
        }
        true
    }
}

fn product_over(weights: &[Rational], mask: u64) -> Rational {
    let mut prod = Rational::one();
    let mut rest = mask;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        prod *= &weights[i];
        rest &= rest - 1;
    }
    prod
}

fn z_masked_brute(dv: &DenseVolume, weights: &[Rational]) -> Rational {
    let mut total = Rational::zero();
    for mask in 0..=dv.full_mask() {
        if dv.mask_independent(mask) {
            total += product_over(weights, mask);
        }
    }
    total
}

/// Deletion step of the recursion at pivot bit `i`: the volume without the
/// pivot, and the volume without the pivot's whole conflict neighborhood.
fn recurse(
    dv: &DenseVolume,
    weights: &[Rational],
    mask: u64,
    memo: &mut HashMap<u64, Rational>,
    pick: &dyn Fn(u64) -> u32,
) -> Rational {
    if mask == 0 {
        return Rational::one();
    }
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let i = pick(mask) as usize;
    debug_assert!(mask & (1 << i) != 0);
    let without = recurse(dv, weights, mask & !(1 << i), memo, pick);
    let reduced = recurse(dv, weights, mask & !dv.adj[i], memo, pick);
    let v = without + &weights[i] * reduced;
    memo.insert(mask, v.clone());
    v
}

/// Direct sum over all independent subsets of the volume. Exponential; the
/// cap keeps it honest, and the recursion covers larger volumes.
pub fn z_brute(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    w: &ActivityVector,
    cap: usize,
) -> Result<Rational> {
    w.check_matches(system, "activities")?;
    let dv = DenseVolume::build(system, volume)?;
    if dv.n > cap {
        return Err(Error::CapExceeded {
            what: "brute-force subset enumeration",
            size: dv.n,
            cap,
            hint: "use the subset recursion",
        });
    }
    Ok(z_masked_brute(&dv, &dv.project(w)))
}

/// Memoized deletion recursion, pivoting on the lowest id in the volume.
/// Agrees with `z_brute` exactly wherever both run.
pub fn z_recursive(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    w: &ActivityVector,
) -> Result<Rational> {
    w.check_matches(system, "activities")?;
    let dv = DenseVolume::build(system, volume)?;
    let weights = dv.project(w);
    let mut memo = HashMap::new();
    Ok(recurse(&dv, &weights, dv.full_mask(), &mut memo, &|m| {
        m.trailing_zeros()
    }))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Recursion with a seed-scrambled pivot choice; exercises the claim that
/// the identity holds for every pivot.
pub fn z_recursive_seeded(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    w: &ActivityVector,
    seed: u64,
) -> Result<Rational> {
    w.check_matches(system, "activities")?;
    let dv = DenseVolume::build(system, volume)?;
    let weights = dv.project(w);
    let mut memo = HashMap::new();
    let pick = move |mask: u64| {
        let k = (splitmix(mask ^ seed) % mask.count_ones() as u64) as u32;
        let mut rest = mask;
        for _ in 0..k {
            rest &= rest - 1;
        }
        rest.trailing_zeros()
    };
    Ok(recurse(&dv, &weights, dv.full_mask(), &mut memo, &pick))
}

/// Partition function at negated activities; defined for nonnegative input.
pub fn z_negated(
    system: &PolymerSystem,
    s: &PolymerSubset,
    p: &ActivityVector,
) -> Result<Rational> {
    p.check_nonnegative()?;
    z_recursive(system, s, &p.negated())
}

/// Checks the deletion identity at `x`: removing `x` splits the sum by
/// whether the configuration contains `x`.
pub fn check_fundamental_identity(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    x: PolymerId,
    w: &ActivityVector,
) -> Result<bool> {
    if !volume.contains(&x) {
        return Err(Error::NotASubset { what: format!("pivot {x} in the volume") });
    }
    let whole = z_recursive(system, volume, w)?;
    let without: PolymerSubset = volume.iter().copied().filter(|&y| y != x).collect();
    let reduced: PolymerSubset = volume
        .iter()
        .copied()
        .filter(|&y| !system.incompatible(x, y))
        .collect();
    let lhs = z_recursive(system, &without, w)? + w.get(x) * z_recursive(system, &reduced, w)?;
    Ok(whole == lhs)
}

/// Weighted occupation probability of configuration `S` inside the volume:
/// the product of activities over `S` times the ratio of the reduced and
/// full partition functions. Exactly zero when `S` has an internal conflict.
pub fn correlation(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    s: &PolymerSubset,
    w: &ActivityVector,
) -> Result<Rational> {
    system.check_subset(s, volume, "correlation configuration")?;
    if !system.is_independent(s) {
        return Ok(Rational::zero());
    }
    let z = z_recursive(system, volume, w)?;
    if z.is_zero() {
        return Err(Error::ZeroPartition);
    }
    let rest: PolymerSubset = volume.iter().copied().filter(|y| !s.contains(y)).collect();
    let z_rest = z_recursive(system, &rest, w)?;
    let mut prod = Rational::one();
    for &x in s {
        prod *= w.get(x);
    }
    Ok(prod * z_rest / z)
}

/// Exact comparison Z over the union vs the product of the parts, at
/// nonnegative weights. Always true; kept as a tripwire on the Z code.
pub fn log_subadditivity_holds(
    system: &PolymerSystem,
    s: &PolymerSubset,
    t: &PolymerSubset,
    mu: &ActivityVector,
) -> Result<bool> {
    mu.check_nonnegative()?;
    let union: PolymerSubset = s.union(t).copied().collect();
    let z_union = z_recursive(system, &union, mu)?;
    let z_s = z_recursive(system, s, mu)?;
    let z_t = z_recursive(system, t, mu)?;
    Ok(z_union <= z_s * z_t)
}

/// All-subset value tables over one volume, for exhaustive verifiers: entry
/// `m` is Z of the sub-volume with dense mask `m`, at the given weights.
pub struct SubsetTables {
    pub(crate) dense: DenseVolume,
    values: Vec<Rational>,
}

impl SubsetTables {
    pub fn build(
        system: &PolymerSystem,
        volume: &PolymerSubset,
        w: &ActivityVector,
        cap: usize,
    ) -> Result<Self> {
        w.check_matches(system, "activities")?;
        let dv = DenseVolume::build(system, volume)?;
        // 2^n table entries; 24 is the absolute ceiling whatever the cap.
        if dv.n > cap.min(24) {
            return Err(Error::CapExceeded {
                what: "exhaustive subset tables",
                size: dv.n,
                cap: cap.min(24),
                hint: "restrict the volume",
            });
        }
        let weights = dv.project(w);
        let mut values = Vec::with_capacity(1usize << dv.n);
        values.push(Rational::one());
        for mask in 1..(1u64 << dv.n) {
            let i = mask.trailing_zeros() as usize;
            let without = &values[(mask & !(1 << i)) as usize];
            let reduced = &values[(mask & !dv.adj[i]) as usize];
            values.push(without + &weights[i] * reduced);
        }
        Ok(SubsetTables { dense: dv, values })
    }

    pub fn len(&self) -> usize {
        self.dense.n
    }

    pub fn is_empty(&self) -> bool {
        self.dense.n == 0
    }

    pub fn full_mask(&self) -> u64 {
        self.dense.full_mask()
    }

    pub fn by_mask(&self, mask: u64) -> &Rational {
        &self.values[mask as usize]
    }

    pub fn by_subset(&self, sub: &PolymerSubset) -> &Rational {
        self.by_mask(self.dense.mask_of(sub))
    }

    /// Dense bit of one original id; zero if it is outside the volume.
    pub fn dense_mask_of_id(&self, id: PolymerId) -> u64 {
        match self.dense.back.binary_search(&id) {
            Ok(i) => 1u64 << i,
            Err(_) => 0,
        }
    }

    /// Dense mask of the ids that fall inside the volume.
    pub fn dense_mask_of(&self, ids: &PolymerSubset) -> u64 {
        ids.iter().map(|&id| self.dense_mask_of_id(id)).fold(0, |a, b| a | b)
    }

    /// Original ids of a dense mask, for witnesses.
    pub fn subset_of(&self, mask: u64) -> PolymerSubset {
        let mut out = PolymerSubset::new();
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            out.insert(self.dense.back[i]);
            rest &= rest - 1;
        }
        out
    }
}
