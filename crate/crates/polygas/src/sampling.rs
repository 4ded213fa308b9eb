//! Seeded instance generators for randomized checks. All randomness flows
//! through one reproducible stream per seed; every generated value is an
//! exact rational, so downstream comparisons stay exact.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::criteria::{fp_radii, MuVector};
use crate::error::{Error, Result};
use crate::model::PolymerSystem;
use crate::numeric::{ratio, Rational};
use crate::partition::ActivityVector;

/// Upper bound on sizes accepted by the exhaustive small-system sweep.
pub const SWEEP_CAP: usize = 5;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unordered pairs below `n`, in the fixed order bit positions refer to.
fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            out.push((x, y));
        }
    }
    out
}

pub fn pair_count(n: usize) -> usize {
    n * (n.saturating_sub(1)) / 2
}

/// System on `n` polymers whose conflict relation is given by one bit per
/// unordered pair, lexicographically: bit 0 is (0,1), bit 1 is (0,2), and
/// so on. Enumerating all bit patterns enumerates all systems on n ids.
pub fn system_with_edge_bits(n: usize, bits: u64) -> Result<PolymerSystem> {
    let np = pair_count(n);
    if np > 64 {
        return Err(Error::VolumeTooLarge(n));
    }
    let mut system = PolymerSystem::new(n);
    for (i, &(x, y)) in pairs(n).iter().enumerate() {
        if bits >> i & 1 == 1 {
            system.add_incompatibility(x, y)?;
        }
    }
    Ok(system)
}

/// Every system on 1..=max_n polymers, each conflict pattern once.
pub fn all_systems_up_to(max_n: usize) -> Result<Vec<PolymerSystem>> {
    if max_n == 0 || max_n > SWEEP_CAP {
        return Err(Error::CapExceeded {
            what: "exhaustive system sweep",
            size: max_n,
            cap: SWEEP_CAP,
            hint: "sample instead",
        });
    }
    let mut out = Vec::new();
    for n in 1..=max_n {
        for bits in 0..1u64 << pair_count(n) {
            out.push(system_with_edge_bits(n, bits)?);
        }
    }
    Ok(out)
}

/// Random system with size in 1..=max_n and each pair in conflict with
/// probability one half.
pub fn random_system(rng: &mut ChaCha8Rng, max_n: usize) -> Result<PolymerSystem> {
    if max_n == 0 {
        return Err(Error::EmptyFamily);
    }
    let n = rng.gen_range(1..=max_n);
    let np = pair_count(n);
    if np > 63 {
        return Err(Error::VolumeTooLarge(n));
    }
    let bits: u64 = if np == 0 { 0 } else { rng.gen_range(0..1u64 << np) };
    system_with_edge_bits(n, bits)
}

fn random_ratio_in(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(lo * den..=hi * den);
    ratio(num, den)
}

/// Signed activities in [-1, 1] with denominators up to 12.
pub fn random_activities(rng: &mut ChaCha8Rng, n: usize) -> ActivityVector {
    ActivityVector::from_values(
        (0..n).map(|_| random_ratio_in(rng, -1, 1, 12)).collect(),
    )
}

/// Strictly positive reference weights in (0, 2].
pub fn random_mu(rng: &mut ChaCha8Rng, n: usize) -> Result<MuVector> {
    let values: Vec<Rational> = (0..n)
        .map(|_| {
            let den = rng.gen_range(1..=8i64);
            ratio(rng.gen_range(1..=2 * den), den)
        })
        .collect();
    MuVector::from_values(values)
}

/// Nonnegative activities strictly below the sharp radii: each polymer gets
/// a random fraction k/64, k in 1..64, of its radius.
pub fn random_subradius_activities(
    rng: &mut ChaCha8Rng,
    system: &PolymerSystem,
    mu: &MuVector,
    cap: usize,
) -> Result<ActivityVector> {
    let radii = fp_radii(system, mu, cap)?;
    let values: Vec<Rational> = (0..system.len())
        .map(|x| ratio(rng.gen_range(1..64i64), 64) * radii.get(x))
        .collect();
    Ok(ActivityVector::from_values(values))
}
