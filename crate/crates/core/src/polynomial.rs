//! Sparse multivariate polynomials over a [`Field`], graded by multidegree and weight.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{domain, Result};
use crate::form::{ComponentKey, FormSpec, Multidegree, Variable};
use crate::monomial::Monomial;
use crate::scalar::{Field, ModP};

/// A polynomial in the coefficient variables of a [`FormSpec`].
///
/// Terms are kept in a map ordered by the graded-lex monomial order; no
/// stored coefficient is zero.
#[derive(Clone, PartialEq)]
pub struct Polynomial<F: Field> {
    spec: Arc<FormSpec>,
    terms: BTreeMap<Monomial, F>,
}

impl<F: Field> Polynomial<F> {
    pub fn zero(spec: Arc<FormSpec>) -> Self {
        Polynomial {
            spec,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(spec: Arc<FormSpec>, c: F) -> Self {
        let n = spec.num_vars();
        Self::from_terms(spec, [(Monomial::one(n), c)])
    }

    pub fn variable(spec: Arc<FormSpec>, v: Variable) -> Result<Self> {
        let m = Monomial::variable(&spec, v)?;
        Ok(Self::from_terms(spec, [(m, F::one())]))
    }

    /// Collects terms, summing duplicates and dropping zeros.
    pub fn from_terms(spec: Arc<FormSpec>, terms: impl IntoIterator<Item = (Monomial, F)>) -> Self {
        let mut p = Polynomial::zero(spec);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn spec(&self) -> &Arc<FormSpec> {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending monomial order (leading term first).
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> F {
        self.terms.get(m).cloned().unwrap_or_else(F::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &F)> {
        self.terms.iter().next_back()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn same_spec(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec {
            Ok(())
        } else {
            domain(format!(
                "polynomials over different form specs {:?} and {:?}",
                self.spec.degrees(),
                other.spec.degrees()
            ))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_spec(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_spec(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_spec(other)?;
        let mut acc: std::collections::HashMap<Monomial, F> =
            std::collections::HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca.clone() * cb.clone();
                match acc.get_mut(&m) {
                    Some(v) => *v = v.clone() + c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Ok(Self::from_terms(self.spec.clone(), acc))
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Polynomial::zero(self.spec.clone());
        }
        Polynomial {
            spec: self.spec.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-F::one())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Polynomial::constant(self.spec.clone(), F::one());
        for _ in 0..e {
            acc = acc.mul(self).expect("same spec");
        }
        acc
    }

    /// `(multidegree, weight)` shared by all terms, or `None` if the
    /// polynomial is zero or not homogeneous.
    pub fn homogeneous_key(&self) -> Option<(Multidegree, i64)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let md = first.multidegree(&self.spec).ok()?;
        let w = first.weight(&self.spec).ok()?;
        for m in it {
            if m.multidegree(&self.spec).ok()? != md || m.weight(&self.spec).ok()? != w {
                return None;
            }
        }
        Some((md, w))
    }

    pub fn is_homogeneous_of(&self, key: &ComponentKey) -> bool {
        match self.homogeneous_key() {
            Some((md, w)) => md == key.multidegree && w == key.order as i64,
            None => self.is_zero(),
        }
    }

    /// Evaluates at a point given as one value per flattened variable.
    pub fn evaluate(&self, point: &[F]) -> F {
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, e) in m.support() {
                for _ in 0..e {
                    t = t * point[i].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }
}

impl Polynomial<BigRational> {
    /// Integer polynomial from `(monomial, coefficient)` pairs.
    pub fn from_integer_terms(
        spec: Arc<FormSpec>,
        terms: impl IntoIterator<Item = (Monomial, i64)>,
    ) -> Self {
        Self::from_terms(
            spec,
            terms
                .into_iter()
                .map(|(m, c)| (m, BigRational::from_integer(BigInt::from(c)))),
        )
    }

    /// The rational multiple of `self` with coprime integer coefficients and a
    /// positive leading coefficient.
    pub fn primitive_normalize(&self) -> Result<Self> {
        if self.is_zero() {
            return domain("cannot normalize the zero polynomial");
        }
        let den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scaled: Vec<(Monomial, BigInt)> = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.numer() * (&den / c.denom())))
            .collect();
        let g = scaled
            .iter()
            .fold(BigInt::zero(), |g, (_, c)| g.gcd(c));
        let lead_negative = self.leading().map(|(_, c)| c.is_negative()).unwrap_or(false);
        let g = if lead_negative { -g } else { g };
        Ok(Polynomial {
            spec: self.spec.clone(),
            terms: scaled
                .into_iter()
                .map(|(m, c)| (m, BigRational::from_integer(c / &g)))
                .collect(),
        })
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Image in the prime field; `None` if some denominator vanishes mod p.
    pub fn to_modp(&self) -> Option<Polynomial<ModP>> {
        let mut out = Polynomial::zero(self.spec.clone());
        for (m, c) in &self.terms {
            let d = ModP::from_bigint(c.denom());
            if d.is_zero() {
                return None;
            }
            out.add_term(m.clone(), ModP::from_bigint(c.numer()) / d);
        }
        Some(out)
    }

    /// True if `other` is a nonzero rational multiple of `self`.
    pub fn is_scalar_multiple_of(&self, other: &Self) -> bool {
        if self.is_zero() || other.is_zero() || self.len() != other.len() {
            return false;
        }
        match (self.primitive_normalize(), other.primitive_normalize()) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

/// Anything that can render a variable name.
pub trait VariableNames {
    fn name(&self, v: Variable) -> String;
}

/// Plain `v{form}_{index}` naming.
pub struct IndexedNames;

impl VariableNames for IndexedNames {
    fn name(&self, v: Variable) -> String {
        format!("v{}_{}", v.form, v.index)
    }
}

impl<F: Field + fmt::Display> Polynomial<F> {
    /// Renders as `c*a^e*b + ...` in descending monomial order.
    pub fn render(&self, names: &dyn VariableNames) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms().enumerate() {
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, cs),
            };
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let factors: Vec<String> = m
                .support()
                .map(|(flat, e)| {
                    let n = names.name(self.spec.variable(flat));
                    if e == 1 {
                        n
                    } else {
                        format!("{n}^{e}")
                    }
                })
                .collect();
            if factors.is_empty() {
                s.push_str(&mag);
            } else {
                if mag != "1" {
                    s.push_str(&mag);
                    s.push('*');
                }
                s.push_str(&factors.join("*"));
            }
        }
        s
    }
}

impl<F: Field> fmt::Debug for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.terms().map(|(m, c)| (m.exponents(), c)))
            .finish()
    }
}
