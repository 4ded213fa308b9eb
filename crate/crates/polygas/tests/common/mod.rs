//! Truncated multivariate polynomial arithmetic over exact rationals: an
//! independent oracle for the series identity exp(log-series) = Z. Terms of
//! total degree above the truncation are dropped eagerly, so exp stays
//! finite; coefficients below it are exact.

// Each test target compiles this module separately and uses a different slice.
#![allow(dead_code)]

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num::{One, Zero};
use polygas::mayer::ursell;
use polygas::{PolymerSubset, PolymerSystem, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub vars: usize,
    pub max_deg: u32,
    /// Exponent vector (one entry per variable) to nonzero coefficient.
    pub terms: BTreeMap<Vec<u8>, Rational>,
}

fn total_degree(exp: &[u8]) -> u32 {
    exp.iter().map(|&e| e as u32).sum()
}

impl Poly {
    pub fn zero(vars: usize, max_deg: u32) -> Self {
        Poly { vars, max_deg, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, max_deg: u32, c: Rational) -> Self {
        let mut p = Poly::zero(vars, max_deg);
        p.accumulate(vec![0; vars], c);
        p
    }

    fn accumulate(&mut self, exp: Vec<u8>, c: Rational) {
        if c.is_zero() || total_degree(&exp) > self.max_deg {
            return;
        }
        match self.terms.entry(exp) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!((self.vars, self.max_deg), (other.vars, other.max_deg));
        let mut out = self.clone();
        for (exp, c) in &other.terms {
            out.accumulate(exp.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!((self.vars, self.max_deg), (other.vars, other.max_deg));
        let mut out = Poly::zero(self.vars, self.max_deg);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u8> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.accumulate(exp, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        let mut out = Poly::zero(self.vars, self.max_deg);
        for (exp, v) in &self.terms {
            out.accumulate(exp.clone(), v * c);
        }
        out
    }

    /// exp of a polynomial with zero constant term, truncated.
    pub fn exp(&self) -> Poly {
        assert!(!self.terms.contains_key(&vec![0; self.vars]), "constant term must vanish");
        let mut out = Poly::constant(self.vars, self.max_deg, Rational::one());
        let mut power = Poly::constant(self.vars, self.max_deg, Rational::one());
        for k in 1..=self.max_deg as i64 {
            power = power.mul(self).scale(&Rational::new(1.into(), k.into()));
            if power.terms.is_empty() {
                break;
            }
            out = out.add(&power);
        }
        out
    }

    pub fn eval(&self, at: &[Rational]) -> Rational {
        assert_eq!(at.len(), self.vars);
        let mut sum = Rational::zero();
        for (exp, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in at.iter().zip(exp) {
                for _ in 0..e {
                    term *= x;
                }
            }
            sum += term;
        }
        sum
    }
}

/// Z as a polynomial in one activity variable per polymer: the sum of the
/// squarefree monomials of independent subsets, truncated.
pub fn z_polynomial(system: &PolymerSystem, volume: &PolymerSubset, max_deg: u32) -> Poly {
    let ids: Vec<usize> = volume.iter().copied().collect();
    assert!(ids.len() <= 16);
    let mut out = Poly::zero(system.len(), max_deg);
    for mask in 0u32..1 << ids.len() {
        let subset: PolymerSubset = ids
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &id)| id)
            .collect();
        if !system.is_independent(&subset) {
            continue;
        }
        let mut exp = vec![0u8; system.len()];
        for &id in &subset {
            exp[id] = 1;
        }
        out.accumulate(exp, Rational::one());
    }
    out
}

/// The log-series as a polynomial, from its defining sum over ordered
/// tuples: order n contributes (1/n!) times the cluster coefficient of each
/// tuple times its monomial.
pub fn mayer_polynomial(system: &PolymerSystem, volume: &PolymerSubset, order: u32) -> Poly {
    let ids: Vec<usize> = volume.iter().copied().collect();
    let mut out = Poly::zero(system.len(), order);
    if ids.is_empty() {
        return out;
    }
    let mut factorial = Rational::one();
    for n in 1..=order as usize {
        factorial *= Rational::from_integer(n.into());
        let inv = Rational::one() / &factorial;
        let mut tuple = vec![0usize; n];
        loop {
            let expanded: Vec<usize> = tuple.iter().map(|&i| ids[i]).collect();
            let phi = ursell(system, &expanded, order as usize).expect("within cap");
            if !phi.is_zero() {
                let mut exp = vec![0u8; system.len()];
                for &id in &expanded {
                    exp[id] += 1;
                }
                out.accumulate(exp, phi * &inv);
            }
            let mut k = n;
            let mut carried = true;
            while k > 0 {
                k -= 1;
                tuple[k] += 1;
                if tuple[k] < ids.len() {
                    carried = false;
                    break;
                }
                tuple[k] = 0;
            }
            if carried {
                break;
            }
        }
    }
    out
}

/// Full volume helper mirroring the library's id range.
pub fn everything(system: &PolymerSystem) -> PolymerSubset {
    system.full_volume()
}
