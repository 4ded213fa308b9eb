//! Polymer systems: a finite set of polymers together with a symmetric,
//! reflexive incompatibility relation. Every polymer conflicts with itself,
//! so admissible configurations are exactly the independent sets of the
//! conflict graph.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

pub type PolymerId = usize;

/// Sorted set of polymer ids; used both for volumes and for configurations.
pub type PolymerSubset = BTreeSet<PolymerId>;

/// Builds the subset `{0, 1, .., n-1}`.
pub fn full_range(n: usize) -> PolymerSubset {
    (0..n).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolymerSystem {
    /// Closed neighborhoods: `neighbors[x]` always contains `x`.
    neighbors: Vec<BTreeSet<PolymerId>>,
    labels: Vec<String>,
}

impl PolymerSystem {
    /// A system of `n` mutually compatible polymers (each still conflicts
    /// with itself). `n = 0` is the empty system, legal as a restriction
    /// target.
    pub fn new(n: usize) -> Self {
        PolymerSystem {
            neighbors: (0..n).map(|x| BTreeSet::from([x])).collect(),
            labels: (0..n).map(|x| x.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    fn check_id(&self, id: PolymerId) -> Result<()> {
        if id < self.len() {
            Ok(())
        } else {
            Err(Error::InvalidPolymerId { id, len: self.len() })
        }
    }

    /// Declares `x` and `y` incompatible. `x == y` is already true in every
    /// system and is accepted as a no-op.
    pub fn add_incompatibility(&mut self, x: PolymerId, y: PolymerId) -> Result<()> {
        self.check_id(x)?;
        self.check_id(y)?;
        self.neighbors[x].insert(y);
        self.neighbors[y].insert(x);
        Ok(())
    }

    pub fn set_label(&mut self, x: PolymerId, label: impl Into<String>) -> Result<()> {
        self.check_id(x)?;
        self.labels[x] = label.into();
        Ok(())
    }

    pub fn label(&self, x: PolymerId) -> &str {
        &self.labels[x]
    }

    /// True when `x` and `y` conflict; reflexive by construction.
    pub fn incompatible(&self, x: PolymerId, y: PolymerId) -> bool {
        self.neighbors[x].contains(&y)
    }

    /// All polymers conflicting with `x`, including `x` itself.
    pub fn closed_neighborhood(&self, x: PolymerId) -> &BTreeSet<PolymerId> {
        &self.neighbors[x]
    }

    /// True when no two distinct members of `s` conflict.
    pub fn is_independent(&self, s: &PolymerSubset) -> bool {
        let mut seen: Vec<PolymerId> = Vec::with_capacity(s.len());
        for &x in s {
            if seen.iter().any(|&y| self.incompatible(x, y)) {
                return false;
            }
            seen.push(x);
        }
        true
    }

    pub fn full_volume(&self) -> PolymerSubset {
        full_range(self.len())
    }

    /// Validates that every id in `volume` names a polymer of this system.
    pub fn check_volume(&self, volume: &PolymerSubset) -> Result<()> {
        for &x in volume {
            self.check_id(x)?;
        }
        Ok(())
    }

    /// Validates `sub` against the system and requires `sub` inside `of`.
    pub fn check_subset(&self, sub: &PolymerSubset, of: &PolymerSubset, what: &str) -> Result<()> {
        self.check_volume(sub)?;
        if sub.is_subset(of) {
            Ok(())
        } else {
            Err(Error::NotASubset { what: what.to_string() })
        }
    }

    /// Projects the system onto `volume`, relabelling ids to `0..volume.len()`.
    /// The empty volume yields the empty system.
    pub fn restrict(&self, volume: &PolymerSubset) -> Result<Restriction> {
        self.check_volume(volume)?;
        let back: Vec<PolymerId> = volume.iter().copied().collect();
        let mut sys = PolymerSystem::new(back.len());
        for (i, &x) in back.iter().enumerate() {
            sys.set_label(i, self.label(x))?;
            for (j, &y) in back.iter().enumerate().skip(i + 1) {
                if self.incompatible(x, y) {
                    sys.add_incompatibility(i, j)?;
                }
            }
        }
        Ok(Restriction { system: sys, back })
    }
}

/// A system restricted to a volume, with the map back to original ids.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub system: PolymerSystem,
    /// `back[new_id] = original_id`, increasing.
    pub back: Vec<PolymerId>,
}

/// Named conflict-graph shapes used by the command line and the test sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Path(usize),
    Cycle(usize),
    Complete(usize),
    Edgeless(usize),
}

impl Family {
    pub fn size(&self) -> usize {
        match *self {
            Family::Path(n) | Family::Cycle(n) | Family::Complete(n) | Family::Edgeless(n) => n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Path(_) => "path",
            Family::Cycle(_) => "cycle",
            Family::Complete(_) => "complete",
            Family::Edgeless(_) => "edgeless",
        }
    }
}

pub fn make_family(family: Family) -> Result<PolymerSystem> {
    let n = family.size();
    if n == 0 {
        return Err(Error::EmptyFamily);
    }
    let mut sys = PolymerSystem::new(n);
    match family {
        Family::Edgeless(_) => {}
        Family::Path(_) => {
            for i in 1..n {
                sys.add_incompatibility(i - 1, i)?;
            }
        }
        Family::Cycle(_) => {
            for i in 1..n {
                sys.add_incompatibility(i - 1, i)?;
            }
            if n > 2 {
                sys.add_incompatibility(n - 1, 0)?;
            }
        }
        Family::Complete(_) => {
            for i in 0..n {
                for j in i + 1..n {
                    sys.add_incompatibility(i, j)?;
                }
            }
        }
    }
    Ok(sys)
}

/// Specification of a gas whose polymers are the connected site subsets of a
/// finite graph, conflicting exactly when they share a site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetGasSpec {
    pub sites: usize,
    /// Undirected site-graph edges, stored with `u < v`.
    pub site_edges: BTreeSet<(usize, usize)>,
    pub max_size: usize,
}

impl SubsetGasSpec {
    pub fn new(sites: usize, max_size: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::EmptySpace);
        }
        if max_size == 0 {
            return Err(Error::BadSubsetGasSpec("maxsize must be at least 1".into()));
        }
        Ok(SubsetGasSpec { sites, site_edges: BTreeSet::new(), max_size })
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::BadSubsetGasSpec(format!("self edge {u} {v}")));
        }
        if u >= self.sites || v >= self.sites {
            return Err(Error::BadSubsetGasSpec(format!(
                "edge {u} {v} outside space of {} sites",
                self.sites
            )));
        }
        self.site_edges.insert((u.min(v), u.max(v)));
        Ok(())
    }

    /// Path site graph on all sites, the stock example shape.
    pub fn with_path_edges(mut self) -> Result<Self> {
        for v in 1..self.sites {
            self.add_edge(v - 1, v)?;
        }
        Ok(self)
    }
}

/// A built subset gas: the conflict system plus each polymer's site set.
#[derive(Debug, Clone)]
pub struct SubsetGas {
    pub system: PolymerSystem,
    /// `members[x]` is the site set of polymer `x`.
    pub members: Vec<BTreeSet<usize>>,
    pub sites: usize,
}

const SUBSET_GAS_POLYMER_CAP: usize = 4096;

/// Enumerates the connected subsets of the site graph with sizes in
/// `1..=max_size`, ordered by (size, site list), and wires up the
/// share-a-site conflict relation.
pub fn build_subset_gas(spec: &SubsetGasSpec) -> Result<SubsetGas> {
    let n = spec.sites;
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let mut site_adj = vec![BTreeSet::new(); n];
    for &(u, v) in &spec.site_edges {
        site_adj[u].insert(v);
        site_adj[v].insert(u);
    }
    let mut members: Vec<BTreeSet<usize>> = Vec::new();
    for size in 1..=spec.max_size.min(n) {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let set: BTreeSet<usize> = combo.iter().copied().collect();
            if connected(&set, &site_adj) {
                if members.len() >= SUBSET_GAS_POLYMER_CAP {
                    return Err(Error::BadSubsetGasSpec(format!(
                        "more than {SUBSET_GAS_POLYMER_CAP} polymers"
                    )));
                }
                members.push(set);
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    if members.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut system = PolymerSystem::new(members.len());
    for (x, set) in members.iter().enumerate() {
        let inner: Vec<String> = set.iter().map(|v| v.to_string()).collect();
        system.set_label(x, format!("{{{}}}", inner.join(",")))?;
        for (y, other) in members.iter().enumerate().skip(x + 1) {
            if !set.is_disjoint(other) {
                system.add_incompatibility(x, y)?;
            }
        }
    }
    Ok(SubsetGas { system, members, sites: n })
}

/// Advances `combo` to the next lexicographic size-k combination of `0..n`,
/// returning false after the last one.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - (k - i) {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn connected(set: &BTreeSet<usize>, site_adj: &[BTreeSet<usize>]) -> bool {
    let start = match set.iter().next() {
        Some(&v) => v,
        None => return false,
    };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in &site_adj[v] {
            if set.contains(&w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == set.len()
}
