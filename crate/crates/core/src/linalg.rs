//! Sparse row echelon forms, exact rank and nullspace.
//!
//! [`Echelon`] is generic over [`Eliminate`], implemented for every
//! [`Field`] (monic pivots) and for [`BigInt`] (fraction-free: rows stay
//! primitive integer vectors, each elimination step cross-multiplies and
//! divides out the content).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Field;

/// Sparse row: `(column, value)` pairs with strictly increasing columns and
/// no zero values.
pub type SparseRow<T> = Vec<(usize, T)>;

/// Scalars admitting a pivoting elimination step.
pub trait Eliminate: Clone + Send + Sync + Zero + 'static {
    /// Brings a nonzero row into canonical pivot form.
    fn normalize(row: &mut SparseRow<Self>);
    /// Cancels the leading entry of `row` against `pivot` (same leading column,
    /// `pivot` already normalized). The result may be empty.
    fn eliminate(row: &SparseRow<Self>, pivot: &SparseRow<Self>, col: usize) -> SparseRow<Self>;
    /// Nullspace vector attached to the free column `free`, given
    /// `(pivot column, pivot value, entry in column free)` for every fully
    /// reduced pivot row with a nonzero entry in `free`.
    fn kernel_vector(free: usize, rows: &[(usize, Self, Self)]) -> SparseRow<Self>;
}

/// `a*x + b*y` on sparse rows, dropping zeros.
fn combine<T>(a: &T, x: &SparseRow<T>, b: &T, y: &SparseRow<T>) -> SparseRow<T>
where
    T: Clone + Zero + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take = match (x.get(i), y.get(j)) {
            (Some(p), Some(q)) => p.0.cmp(&q.0),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => unreachable!(),
        };
        let (col, v) = match take {
            std::cmp::Ordering::Less => {
                let (c, v) = &x[i];
                i += 1;
                (*c, a.clone() * v.clone())
            }
            std::cmp::Ordering::Greater => {
                let (c, v) = &y[j];
                j += 1;
                (*c, b.clone() * v.clone())
            }
            std::cmp::Ordering::Equal => {
                let c = x[i].0;
                let v = a.clone() * x[i].1.clone() + b.clone() * y[j].1.clone();
                i += 1;
                j += 1;
                (c, v)
            }
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    out
}

impl<F: Field> Eliminate for F {
    fn normalize(row: &mut SparseRow<F>) {
        let inv = row[0].1.inverse();
        for (_, v) in row.iter_mut() {
            *v = v.clone() * inv.clone();
        }
    }

    fn eliminate(row: &SparseRow<F>, pivot: &SparseRow<F>, col: usize) -> SparseRow<F> {
        let factor = row
            .iter()
            .find(|(c, _)| *c == col)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(F::zero);
        combine(&F::one(), row, &-factor, pivot)
    }

    fn kernel_vector(free: usize, rows: &[(usize, F, F)]) -> SparseRow<F> {
        let mut v: SparseRow<F> = rows
            .iter()
            .map(|(pc, lead, e)| (*pc, -(e.clone() / lead.clone())))
            .collect();
        v.push((free, F::one()));
        v.sort_by_key(|(c, _)| *c);
        v
    }
}

fn content(row: &SparseRow<BigInt>) -> BigInt {
    let mut g = BigInt::zero();
    for (_, v) in row {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    g
}

impl Eliminate for BigInt {
    fn normalize(row: &mut SparseRow<BigInt>) {
        let mut g = content(row);
        if row[0].1.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for (_, v) in row.iter_mut() {
                *v = &*v / &g;
            }
        }
    }

    fn eliminate(row: &SparseRow<BigInt>, pivot: &SparseRow<BigInt>, col: usize) -> SparseRow<BigInt> {
        let r = row
            .iter()
            .find(|(c, _)| *c == col)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(BigInt::zero);
        let p = &pivot[0].1;
        let g = r.gcd(p);
        // (p/g) * row - (r/g) * pivot kills column `col` with no fractions.
        let mut out = combine(&(p / &g), row, &-(r / &g), pivot);
        if !out.is_empty() {
            let c = content(&out);
            if !c.is_one() {
                for (_, v) in out.iter_mut() {
                    *v = &*v / &c;
                }
            }
        }
        out
    }

    fn kernel_vector(free: usize, rows: &[(usize, BigInt, BigInt)]) -> SparseRow<BigInt> {
        // x_free = L, x_pivot = -e * L / lead with L = lcm of the leads.
        let l = rows.iter().fold(BigInt::one(), |acc, (_, lead, _)| acc.lcm(lead));
        let mut v: SparseRow<BigInt> = rows
            .iter()
            .map(|(pc, lead, e)| (*pc, -(e * (&l / lead))))
            .collect();
        v.push((free, l));
        v.sort_by_key(|(c, _)| *c);
        let g = content(&v);
        if !g.is_one() {
            for (_, x) in v.iter_mut() {
                *x = &*x / &g;
            }
        }
        v
    }
}

/// Incrementally built row echelon form; pivots are leading columns.
#[derive(Clone)]
pub struct Echelon<T: Eliminate> {
    ncols: usize,
    rows: Vec<SparseRow<T>>,
    pivot_of: BTreeMap<usize, usize>,
}

impl<T: Eliminate> Echelon<T> {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
            pivot_of: BTreeMap::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` by the current pivots until its leading column is new
    /// (or the row vanishes).
    pub fn reduce(&self, mut row: SparseRow<T>) -> SparseRow<T> {
        while let Some(&(lead, _)) = row.first() {
            match self.pivot_of.get(&lead) {
                Some(&pi) => row = T::eliminate(&row, &self.rows[pi], lead),
                None => break,
            }
        }
        row
    }

    /// Adds a row; returns true if the rank grew.
    pub fn insert(&mut self, row: SparseRow<T>) -> bool {
        debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(row.last().is_none_or(|(c, _)| *c < self.ncols));
        let mut row = self.reduce(row);
        if row.is_empty() {
            return false;
        }
        T::normalize(&mut row);
        self.pivot_of.insert(row[0].0, self.rows.len());
        self.rows.push(row);
        true
    }

    /// True if `row` lies in the row span.
    pub fn contains(&self, row: SparseRow<T>) -> bool {
        self.reduce(row).is_empty()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivot_of.keys().copied().collect()
    }

    /// Fully reduced rows keyed by pivot column: each row is supported on
    /// its own pivot plus non-pivot columns.
    pub fn reduced_rows(&self) -> BTreeMap<usize, SparseRow<T>> {
        let mut done: BTreeMap<usize, SparseRow<T>> = BTreeMap::new();
        for (&pc, &ri) in self.pivot_of.iter().rev() {
            let mut row = self.rows[ri].clone();
            // Clear entries at later pivot columns using rows already reduced.
            loop {
                let hit = row
                    .iter()
                    .skip(1)
                    .map(|(c, _)| *c)
                    .find(|c| done.contains_key(c));
                let Some(c) = hit else { break };
                row = eliminate_at(&row, &done[&c], c);
            }
            T::normalize(&mut row);
            done.insert(pc, row);
        }
        done
    }

    /// Basis of the right nullspace, one vector per non-pivot column in
    /// increasing column order.
    pub fn nullspace(&self) -> Vec<SparseRow<T>> {
        let reduced = self.reduced_rows();
        let mut by_free: BTreeMap<usize, Vec<(usize, T, T)>> = BTreeMap::new();
        for (&pc, row) in &reduced {
            let lead = row[0].1.clone();
            for (c, v) in row.iter().skip(1) {
                by_free
                    .entry(*c)
                    .or_default()
                    .push((pc, lead.clone(), v.clone()));
            }
        }
        (0..self.ncols)
            .filter(|c| !self.pivot_of.contains_key(c))
            .map(|c| {
                let rows = by_free.remove(&c).unwrap_or_default();
                T::kernel_vector(c, &rows)
            })
            .collect()
    }
}

/// Eliminates the entry of `row` at column `col` (not necessarily leading)
/// using `pivot`, whose leading column is `col`.
fn eliminate_at<T: Eliminate>(row: &SparseRow<T>, pivot: &SparseRow<T>, col: usize) -> SparseRow<T> {
    T::eliminate(row, pivot, col)
}

/// Rank of a list of sparse rows.
pub fn rank<T: Eliminate>(ncols: usize, rows: impl IntoIterator<Item = SparseRow<T>>) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Sparse row from a dense slice.
pub fn sparse_from_dense<T: Clone + Zero>(dense: &[T]) -> SparseRow<T> {
    dense
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (i, v.clone()))
        .collect()
}
