//! Binary-form data: degree tuples, coefficient variables and graded cells.

use std::fmt;

use crate::error::{domain, Result};

/// The degrees `d = (d_1, ..., d_n)` of the binary forms under study.
///
/// Also fixes the Jordan structure of the associated Weitzenböck derivation:
/// one nilpotent block of size `d_i + 1` per form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormSpec {
    degrees: Vec<u32>,
    offsets: Vec<usize>,
}

impl FormSpec {
    pub fn new(degrees: Vec<u32>) -> Result<Self> {
        if degrees.is_empty() {
            return domain("at least one binary form is required");
        }
        if let Some(pos) = degrees.iter().position(|&d| d == 0) {
            return domain(format!("form {pos} has degree 0; degrees must be >= 1"));
        }
        let mut offsets = Vec::with_capacity(degrees.len() + 1);
        let mut acc = 0;
        for &d in &degrees {
            offsets.push(acc);
            acc += d as usize + 1;
        }
        offsets.push(acc);
        Ok(FormSpec { degrees, offsets })
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn num_forms(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, form: usize) -> u32 {
        self.degrees[form]
    }

    /// Total number of coefficient variables, `sum(d_i + 1)`.
    pub fn num_vars(&self) -> usize {
        self.offsets[self.degrees.len()]
    }

    /// Position of `v` in the flattened, form-major variable list.
    pub fn flat_index(&self, v: Variable) -> Result<usize> {
        self.check(v)?;
        Ok(self.offsets[v.form] + v.index as usize)
    }

    pub fn variable(&self, flat: usize) -> Variable {
        let form = match self.offsets.binary_search(&flat) {
            Ok(f) => f,
            Err(f) => f - 1,
        };
        Variable {
            form,
            index: (flat - self.offsets[form]) as u32,
        }
    }

    /// Flat range of the variables belonging to `form`.
    pub fn form_range(&self, form: usize) -> std::ops::Range<usize> {
        self.offsets[form]..self.offsets[form + 1]
    }

    pub fn variables(&self) -> impl Iterator<Item = Variable> + '_ {
        (0..self.num_vars()).map(move |i| self.variable(i))
    }

    pub fn check(&self, v: Variable) -> Result<()> {
        if v.form >= self.degrees.len() {
            return domain(format!(
                "variable references form {} but only {} forms exist",
                v.form,
                self.degrees.len()
            ));
        }
        if v.index > self.degrees[v.form] {
            return domain(format!(
                "coefficient index {} exceeds degree {} of form {}",
                v.index, self.degrees[v.form], v.form
            ));
        }
        Ok(())
    }

    /// Torus weight `d_f - 2i` of the variable `v_i` of form `f`.
    pub fn weight_of(&self, v: Variable) -> Result<i64> {
        self.check(v)?;
        Ok(self.degrees[v.form] as i64 - 2 * v.index as i64)
    }

    /// `sum(d_i * m_i)`, the top weight reachable in multidegree `m`.
    pub fn top_weight(&self, m: &Multidegree) -> i64 {
        self.degrees
            .iter()
            .zip(m.parts())
            .map(|(&d, &mi)| d as i64 * mi as i64)
            .sum()
    }
}

/// Coefficient `v_index` of binary form `form`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub form: usize,
    pub index: u32,
}

impl Variable {
    pub fn new(form: usize, index: u32) -> Self {
        Variable { form, index }
    }
}

/// Per-form degrees of a multihomogeneous component.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multidegree(Vec<u32>);

impl Multidegree {
    pub fn new(parts: Vec<u32>) -> Self {
        Multidegree(parts)
    }

    pub fn zero(n: usize) -> Self {
        Multidegree(vec![0; n])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Multidegree) -> Multidegree {
        Multidegree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference, `None` if some part would go negative.
    pub fn checked_sub(&self, other: &Multidegree) -> Option<Multidegree> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Multidegree)
    }

    /// All multidegrees with `n` parts summing to `total`, in descending
    /// lexicographic order.
    pub fn compositions(n: usize, total: u32) -> Vec<Multidegree> {
        fn rec(n: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Multidegree>) {
            if n == 1 {
                prefix.push(total);
                out.push(Multidegree(prefix.clone()));
                prefix.pop();
                return;
            }
            for a in (0..=total).rev() {
                prefix.push(a);
                rec(n - 1, total - a, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(n, total, &mut Vec::with_capacity(n), &mut out);
        }
        out
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// One graded cell `(m, j)`: multidegree `m`, order (weight) `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentKey {
    pub multidegree: Multidegree,
    pub order: u32,
}

impl ComponentKey {
    pub fn new(multidegree: Multidegree, order: u32) -> Self {
        ComponentKey { multidegree, order }
    }

    /// The index sum `k = (sum(d_i m_i) - j) / 2` shared by every monomial of
    /// the cell, or `None` when parity or range rules the cell out.
    pub fn index_sum(&self, spec: &FormSpec) -> Option<u64> {
        let top = spec.top_weight(&self.multidegree);
        let j = self.order as i64;
        if j > top || (top - j) % 2 != 0 {
            None
        } else {
            Some(((top - j) / 2) as u64)
        }
    }

    pub fn check(&self, spec: &FormSpec) -> Result<()> {
        if self.multidegree.len() != spec.num_forms() {
            return domain(format!(
                "multidegree {} has {} parts but the spec has {} forms",
                self.multidegree,
                self.multidegree.len(),
                spec.num_forms()
            ));
        }
        Ok(())
    }
}

impl fmt::Display for ComponentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, order {})", self.multidegree, self.order)
    }
}
