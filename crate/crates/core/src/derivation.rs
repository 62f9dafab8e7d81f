//! The Weitzenböck derivation `D(v_i) = i * v_{i-1}` (one Jordan block per
//! form), its partner `E(v_i) = (d - i) * v_{i+1}`, and kernels of `D` on
//! graded cells.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};

use crate::error::{Error, Result};
use crate::form::{ComponentKey, FormSpec, Multidegree};
use crate::linalg::{Echelon, Eliminate, SparseRow};
use crate::monomial::{component_monomials, slice_monomials, Monomial};
use crate::polynomial::Polynomial;
use crate::repdim::{cell_dim_cached, QBinomialCache};
use crate::scalar::{Field, ModP};

/// The derivation attached to a [`FormSpec`].
#[derive(Debug, Clone)]
pub struct DerivationSpec {
    spec: Arc<FormSpec>,
}

impl DerivationSpec {
    pub fn new(spec: Arc<FormSpec>) -> Self {
        DerivationSpec { spec }
    }

    pub fn spec(&self) -> &Arc<FormSpec> {
        &self.spec
    }

    /// `(target flat index, multiplier)` for every variable moved by `D`
    /// (`raising = false`) or `E` (`raising = true`), keyed by source index.
    fn images(&self, raising: bool) -> Vec<Option<(usize, i64)>> {
        let spec = &self.spec;
        (0..spec.num_vars())
            .map(|flat| {
                let v = spec.variable(flat);
                let d = spec.degree(v.form) as i64;
                let i = v.index as i64;
                if raising {
                    (i < d).then(|| (flat + 1, d - i))
                } else {
                    (i > 0).then(|| (flat - 1, i))
                }
            })
            .collect()
    }

    /// Images of one monomial under the derivation, as `(monomial, multiplier)`.
    fn monomial_images<'a>(
        images: &'a [Option<(usize, i64)>],
        m: &Monomial,
    ) -> impl Iterator<Item = (Monomial, i64)> + 'a {
        let support: Vec<(usize, u16)> = m.support().collect();
        let m = m.clone();
        support.into_iter().filter_map(move |(flat, e)| {
            images[flat].map(|(to, mult)| (m.shift(flat, to), mult * e as i64))
        })
    }

    fn apply<F: Field>(&self, p: &Polynomial<F>, raising: bool) -> Polynomial<F> {
        self.apply_with(p, self.images(raising))
    }

    fn apply_with<F: Field>(&self, p: &Polynomial<F>, images: Vec<Option<(usize, i64)>>) -> Polynomial<F> {
        let mut out = Polynomial::zero(p.spec().clone());
        for (m, c) in p.terms() {
            for (img, mult) in Self::monomial_images(&images, m) {
                out.add_term(img, c.clone() * F::from_i64(mult).expect("small integer"));
            }
        }
        out
    }

    /// `D(p)`, extended from the variables by the Leibniz rule.
    pub fn apply_lowering<F: Field>(&self, p: &Polynomial<F>) -> Polynomial<F> {
        self.apply(p, false)
    }

    /// `E(p)`, the opposite root vector.
    pub fn apply_raising<F: Field>(&self, p: &Polynomial<F>) -> Polynomial<F> {
        self.apply(p, true)
    }

    /// `D'(v_i) = v_{i-1}`: the nilpotent map with unit Jordan blocks.
    pub fn apply_jordan<F: Field>(&self, p: &Polynomial<F>) -> Polynomial<F> {
        let images = self
            .images(false)
            .into_iter()
            .map(|im| im.map(|(to, _)| (to, 1)))
            .collect();
        self.apply_with(p, images)
    }

    /// Substitutes `v_i -> i! * v_i` in every form, which carries `ker D`
    /// onto `ker D'`; with `inverse` the substitution is `v_i -> v_i / i!`.
    pub fn to_jordan_basis(&self, p: &Polynomial<BigRational>, inverse: bool) -> Polynomial<BigRational> {
        let factorial: Vec<BigInt> = (0..self.spec.num_vars())
            .map(|flat| (1..=self.spec.variable(flat).index as u64).map(BigInt::from).product())
            .collect();
        let terms = p.terms().map(|(m, c)| {
            let mut scale = BigInt::from(1);
            for (flat, e) in m.support() {
                scale *= num_traits::pow(factorial[flat].clone(), e as usize);
            }
            let scale = BigRational::from_integer(scale);
            let c = if inverse { c / scale } else { c * scale };
            (m.clone(), c)
        });
        Polynomial::from_terms(p.spec().clone(), terms.collect::<Vec<_>>())
    }

    /// Checks membership in `ker D`; weight-zero kernel elements are also
    /// checked against `E`.
    pub fn verify_semi_invariant<F: Field>(&self, p: &Polynomial<F>) -> InvarianceReport {
        let in_kernel = self.apply_lowering(p).is_zero();
        let key = p.homogeneous_key();
        let order = key.as_ref().map(|(_, w)| *w);
        let full_invariant = in_kernel && order == Some(0) && self.apply_raising(p).is_zero();
        InvarianceReport {
            in_kernel,
            order,
            full_invariant,
        }
    }
}

/// Outcome of [`DerivationSpec::verify_semi_invariant`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvarianceReport {
    /// `D(p) = 0`.
    pub in_kernel: bool,
    /// Common weight of the terms, if homogeneous.
    pub order: Option<i64>,
    /// Order zero and killed by both `D` and `E`.
    pub full_invariant: bool,
}

/// A graded piece on which kernels are computed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    /// Fixed multidegree and order.
    Component(ComponentKey),
    /// Every weight-zero monomial of one total degree.
    InvariantSlice(u32),
}

impl Cell {
    pub fn total_degree(&self) -> u32 {
        match self {
            Cell::Component(k) => k.multidegree.total(),
            Cell::InvariantSlice(t) => *t,
        }
    }

    pub fn order(&self) -> u32 {
        match self {
            Cell::Component(k) => k.order,
            Cell::InvariantSlice(_) => 0,
        }
    }

    /// Ambient basis, descending monomial order.
    pub fn monomials(&self, spec: &FormSpec) -> Result<Vec<Monomial>> {
        match self {
            Cell::Component(k) => component_monomials(spec, k),
            Cell::InvariantSlice(t) => Ok(slice_monomials(spec, *t, 0)),
        }
    }

    /// Basis of the weight two higher, where `D` lands.
    pub fn target_monomials(&self, spec: &FormSpec) -> Result<Vec<Monomial>> {
        match self {
            Cell::Component(k) => {
                let top = spec.top_weight(&k.multidegree);
                if k.order as i64 + 2 > top {
                    return Ok(Vec::new());
                }
                component_monomials(spec, &ComponentKey::new(k.multidegree.clone(), k.order + 2))
            }
            Cell::InvariantSlice(t) => Ok(slice_monomials(spec, *t, 2)),
        }
    }

    /// Predicted kernel dimension from the Cayley–Sylvester count.
    pub fn expected_dim(&self, spec: &FormSpec, cache: &mut QBinomialCache) -> u64 {
        match self {
            Cell::Component(k) => cell_dim_cached(spec, k, cache),
            Cell::InvariantSlice(t) => Multidegree::compositions(spec.num_forms(), *t)
                .into_iter()
                .map(|m| cell_dim_cached(spec, &ComponentKey::new(m, 0), cache))
                .sum(),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Component(k) => write!(f, "{k}"),
            Cell::InvariantSlice(t) => write!(f, "(degree {t}, order 0)"),
        }
    }
}

/// Monomial basis of a cell with a reverse index.
pub struct CellCoordinates {
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl CellCoordinates {
    pub fn new(monomials: Vec<Monomial>) -> Self {
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        CellCoordinates { monomials, index }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinate row of `p`; `None` if `p` has a term outside the cell.
    pub fn coordinates<F: Field>(&self, p: &Polynomial<F>) -> Option<SparseRow<F>> {
        let mut row: SparseRow<F> = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            row.push((self.position(m)?, c.clone()));
        }
        row.sort_by_key(|(i, _)| *i);
        Some(row)
    }

    /// Integer coordinates of a polynomial with integral coefficients.
    pub fn integer_coordinates(&self, p: &Polynomial<BigRational>) -> Option<SparseRow<BigInt>> {
        let mut row: SparseRow<BigInt> = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            if !c.is_integer() {
                return None;
            }
            row.push((self.position(m)?, c.to_integer()));
        }
        row.sort_by_key(|(i, _)| *i);
        Some(row)
    }

    pub fn polynomial<F: Field>(&self, spec: Arc<FormSpec>, row: &SparseRow<F>) -> Polynomial<F> {
        Polynomial::from_terms(
            spec,
            row.iter().map(|(i, c)| (self.monomials[*i].clone(), c.clone())),
        )
    }
}

/// Matrix of `D` restricted to a cell: one sparse row per target monomial,
/// columns indexed by the source monomials.
fn lowering_rows<T: Eliminate>(
    dspec: &DerivationSpec,
    source: &CellCoordinates,
    target: &CellCoordinates,
    lift: impl Fn(i64) -> T,
) -> Result<Vec<SparseRow<T>>> {
    let images = dspec.images(false);
    let mut rows: Vec<Vec<(usize, i64)>> = vec![Vec::new(); target.len()];
    for (col, m) in source.monomials.iter().enumerate() {
        for (img, mult) in DerivationSpec::monomial_images(&images, m) {
            let r = target.position(&img).ok_or_else(|| {
                Error::Inconsistency("lowering left the target weight space".into())
            })?;
            rows[r].push((col, mult));
        }
    }
    Ok(rows
        .into_iter()
        .map(|mut r| {
            r.sort_by_key(|(c, _)| *c);
            let mut merged: Vec<(usize, i64)> = Vec::with_capacity(r.len());
            for (c, v) in r {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            merged
                .into_iter()
                .filter(|(_, v)| *v != 0)
                .map(|(c, v)| (c, lift(v)))
                .collect()
        })
        .collect())
}

/// Basis of `ker D` on one cell.
#[derive(Debug, Clone)]
pub struct CellBasis {
    pub cell: Cell,
    /// Primitive-normalized kernel vectors, ordered by their free monomial.
    pub basis: Vec<Polynomial<BigRational>>,
}

/// Exact kernel of `D` on `cell` by fraction-free elimination.
///
/// The dimension is checked against the Cayley–Sylvester count; a mismatch
/// is reported as [`Error::Inconsistency`].
pub fn kernel_cell_basis(dspec: &DerivationSpec, cell: &Cell) -> Result<CellBasis> {
    let spec = dspec.spec();
    let source = CellCoordinates::new(cell.monomials(spec)?);
    kernel_cell_basis_in(dspec, cell, &source)
}

pub(crate) fn kernel_cell_basis_in(
    dspec: &DerivationSpec,
    cell: &Cell,
    source: &CellCoordinates,
) -> Result<CellBasis> {
    let spec = dspec.spec();
    let target = CellCoordinates::new(cell.target_monomials(spec)?);
    let mut ech: Echelon<BigInt> = Echelon::new(source.len());
    for row in lowering_rows(dspec, source, &target, BigInt::from)? {
        ech.insert(row);
    }
    let basis = ech
        .nullspace()
        .into_iter()
        .map(|v| {
            let row: SparseRow<BigRational> = v
                .into_iter()
                .map(|(c, x)| (c, BigRational::from_integer(x)))
                .collect();
            source.polynomial(spec.clone(), &row).primitive_normalize()
        })
        .collect::<Result<Vec<_>>>()?;
    let expected = cell.expected_dim(spec, &mut QBinomialCache::default());
    if basis.len() as u64 != expected {
        return Err(Error::Inconsistency(format!(
            "kernel of D on {cell} has dimension {} but the Cayley-Sylvester count is {expected}",
            basis.len()
        )));
    }
    Ok(CellBasis {
        cell: cell.clone(),
        basis,
    })
}

/// Nullity of `D` on a cell over the prime field. Never smaller than the
/// rational nullity, so it certifies upper bounds.
pub fn kernel_dim_modp(dspec: &DerivationSpec, cell: &Cell) -> Result<usize> {
    let spec = dspec.spec();
    let source = CellCoordinates::new(cell.monomials(spec)?);
    kernel_dim_modp_in(dspec, cell, &source)
}

pub(crate) fn kernel_dim_modp_in(
    dspec: &DerivationSpec,
    cell: &Cell,
    source: &CellCoordinates,
) -> Result<usize> {
    let target = CellCoordinates::new(cell.target_monomials(dspec.spec())?);
    let mut ech: Echelon<ModP> = Echelon::new(source.len());
    for row in lowering_rows(dspec, source, &target, |v| ModP::from_i64(v).expect("small"))? {
        ech.insert(row);
    }
    Ok(source.len() - ech.rank())
}

/// Zero test for rational polynomials.
pub fn is_zero(p: &Polynomial<BigRational>) -> bool {
    p.terms().all(|(_, c)| c.is_zero())
}
