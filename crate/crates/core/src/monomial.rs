//! Monomials in the coefficient variables and enumeration of graded cells.

use std::cmp::Ordering;

use crate::error::{domain, Result};
use crate::form::{ComponentKey, FormSpec, Multidegree, Variable};

/// A monomial, stored as a dense exponent vector over the flattened
/// (form-major, coefficient-index-minor) variable list.
///
/// Ordering is graded lexicographic: total degree first, then the exponent
/// vectors compared left to right, a larger exponent on an earlier variable
/// winning.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Box<[u16]>,
}

impl Monomial {
    pub fn one(num_vars: usize) -> Self {
        Monomial {
            exps: vec![0; num_vars].into_boxed_slice(),
        }
    }

    pub fn from_exponents(exps: Vec<u16>) -> Self {
        Monomial {
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn variable(spec: &FormSpec, v: Variable) -> Result<Self> {
        let idx = spec.flat_index(v)?;
        let mut exps = vec![0; spec.num_vars()];
        exps[idx] = 1;
        Ok(Monomial::from_exponents(exps))
    }

    /// Builds a monomial from `(variable, exponent)` pairs; repeated variables accumulate.
    pub fn from_pairs(spec: &FormSpec, pairs: &[(Variable, u16)]) -> Result<Self> {
        let mut exps = vec![0u16; spec.num_vars()];
        for &(v, e) in pairs {
            exps[spec.flat_index(v)?] += e;
        }
        Ok(Monomial::from_exponents(exps))
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn num_vars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Non-zero `(flat index, exponent)` pairs.
    pub fn support(&self) -> impl Iterator<Item = (usize, u16)> + '_ {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (i, e))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a + b).collect(),
        }
    }

    /// `self * v_to / v_from`; the caller guarantees `v_from` divides `self`.
    pub(crate) fn shift(&self, from: usize, to: usize) -> Monomial {
        let mut exps = self.exps.clone();
        exps[from] -= 1;
        exps[to] += 1;
        Monomial { exps }
    }

    fn check_len(&self, spec: &FormSpec) -> Result<()> {
        if self.exps.len() != spec.num_vars() {
            return domain(format!(
                "monomial over {} variables used with a spec of {} variables",
                self.exps.len(),
                spec.num_vars()
            ));
        }
        Ok(())
    }

    /// Torus weight: `sum(e * (d_f - 2i))` over the variables `v_i` of form `f`.
    pub fn weight(&self, spec: &FormSpec) -> Result<i64> {
        self.check_len(spec)?;
        let mut w = 0i64;
        for (flat, e) in self.support() {
            w += e as i64 * spec.weight_of(spec.variable(flat))?;
        }
        Ok(w)
    }

    pub fn multidegree(&self, spec: &FormSpec) -> Result<Multidegree> {
        self.check_len(spec)?;
        Ok(Multidegree::new(
            (0..spec.num_forms())
                .map(|f| spec.form_range(f).map(|i| self.exps[i] as u32).sum())
                .collect(),
        ))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exponent vectors over `0..=d` with `sum(e) = m` and `sum(i * e_i) = s`.
fn form_blocks(d: u32, m: u32, s: u64) -> Vec<Vec<u16>> {
    fn rec(i: u32, d: u32, m: u32, s: u64, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if i == d {
            // The last slot takes every remaining factor.
            if s == m as u64 * d as u64 {
                cur.push(m as u16);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        // Remaining factors all have index >= i, and at most d.
        for e in (0..=m).rev() {
            let used = e as u64 * i as u64;
            if used > s {
                continue;
            }
            let rest_m = (m - e) as u64;
            let rest_s = s - used;
            if rest_s < rest_m * (i as u64 + 1) || rest_s > rest_m * d as u64 {
                continue;
            }
            cur.push(e as u16);
            rec(i + 1, d, m - e, rest_s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        if s == 0 {
            out.push(vec![m as u16]);
        }
        return out;
    }
    rec(0, d, m, s, &mut Vec::with_capacity(d as usize + 1), &mut out);
    out
}

/// Every monomial of multidegree `key.multidegree` and weight `key.order`,
/// in descending graded-lexicographic order.
pub fn component_monomials(spec: &FormSpec, key: &ComponentKey) -> Result<Vec<Monomial>> {
    key.check(spec)?;
    let Some(k) = key.index_sum(spec) else {
        return Ok(Vec::new());
    };
    Ok(monomials_with_index_sum(spec, &key.multidegree, k))
}

/// Monomials of multidegree `m` whose coefficient indices sum to `k`.
pub(crate) fn monomials_with_index_sum(spec: &FormSpec, m: &Multidegree, k: u64) -> Vec<Monomial> {
    let n = spec.num_forms();
    let mparts = m.parts();
    // Range of index sums available to each form: 0..=d*m.
    let max_sums: Vec<u64> = (0..n)
        .map(|f| spec.degree(f) as u64 * mparts[f] as u64)
        .collect();
    let mut out = Vec::new();
    let mut split = vec![0u64; n];

    fn rec(
        f: usize,
        remaining: u64,
        max_sums: &[u64],
        split: &mut Vec<u64>,
        emit: &mut dyn FnMut(&[u64]),
    ) {
        let n = max_sums.len();
        if f == n - 1 {
            if remaining <= max_sums[f] {
                split[f] = remaining;
                emit(split);
            }
            return;
        }
        let tail: u64 = max_sums[f + 1..].iter().sum();
        let lo = remaining.saturating_sub(tail);
        let hi = remaining.min(max_sums[f]);
        for s in lo..=hi {
            split[f] = s;
            rec(f + 1, remaining - s, max_sums, split, emit);
        }
    }

    let mut emit = |split: &[u64]| {
        let blocks: Vec<Vec<Vec<u16>>> = (0..n)
            .map(|f| form_blocks(spec.degree(f), mparts[f], split[f]))
            .collect();
        if blocks.iter().any(|b| b.is_empty()) {
            return;
        }
        // Cartesian product of the per-form blocks.
        let mut idx = vec![0usize; n];
        loop {
            let mut exps = Vec::with_capacity(spec.num_vars());
            for f in 0..n {
                exps.extend_from_slice(&blocks[f][idx[f]]);
            }
            out.push(Monomial::from_exponents(exps));
            let mut f = n;
            loop {
                if f == 0 {
                    return;
                }
                f -= 1;
                idx[f] += 1;
                if idx[f] < blocks[f].len() {
                    break;
                }
                idx[f] = 0;
            }
        }
    };
    rec(0, k, &max_sums, &mut split, &mut emit);
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Monomials of total degree `degree` and weight `weight` across all
/// multidegrees, in descending graded-lexicographic order.
pub fn slice_monomials(spec: &FormSpec, degree: u32, weight: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    for m in Multidegree::compositions(spec.num_forms(), degree) {
        let top = spec.top_weight(&m);
        if weight > top || (top - weight) % 2 != 0 || weight < -top {
            continue;
        }
        out.extend(monomials_with_index_sum(spec, &m, ((top - weight) / 2) as u64));
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}
