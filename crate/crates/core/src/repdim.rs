//! Graded dimensions of the semi-invariant algebra and its Poincaré series.
//!
//! Cell dimensions come from the Cayley–Sylvester count: the monomials of
//! multidegree `m` and index sum `k` are counted by the coefficient of `t^k`
//! in a product of Gaussian binomials, and the semi-invariants of order `j`
//! number `N(k) - N(k-1)` with `k = (sum(d_i m_i) - j) / 2`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::form::{ComponentKey, FormSpec, Multidegree};

/// Which algebra a series or generating set describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Joint SL2-invariants: order 0 only.
    Invariants,
    /// Joint semi-invariants: every order.
    Semi,
}

/// Integer polynomial in `t`, lowest degree first.
pub type IntPoly = Vec<BigInt>;

fn trim(p: &mut IntPoly) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul_trunc(a: &[BigInt], b: &[BigInt], max_deg: Option<usize>) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return vec![BigInt::zero()];
    }
    let mut len = a.len() + b.len() - 1;
    if let Some(m) = max_deg {
        len = len.min(m + 1);
    }
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() || i >= len {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out
}

/// Gaussian binomial coefficient `[a choose b]_t`, built with the Pascal
/// recurrence `[a, b] = [a-1, b-1] + t^b [a-1, b]`.
pub fn qbinomial(a: u32, b: u32) -> Result<IntPoly> {
    if b > a {
        return domain(format!("qbinomial({a}, {b}) requires b <= a"));
    }
    let b = b.min(a - b) as usize;
    // row[c] holds [r, c] for the current r, for c <= b.
    let mut row: Vec<IntPoly> = vec![vec![BigInt::one()]];
    for r in 1..=a as usize {
        let mut next: Vec<IntPoly> = Vec::with_capacity(b + 1);
        for c in 0..=b.min(r) {
            if c == 0 || c == r {
                next.push(vec![BigInt::one()]);
                continue;
            }
            let left = &row[c - 1];
            let up = row.get(c).filter(|_| c < r);
            let mut p = left.clone();
            if let Some(up) = up {
                let need = up.len() + c;
                if p.len() < need {
                    p.resize(need, BigInt::zero());
                }
                for (i, v) in up.iter().enumerate() {
                    p[i + c] += v;
                }
            }
            next.push(p);
        }
        row = next;
    }
    Ok(row.swap_remove(b))
}

/// Memoizing source of Gaussian binomials.
#[derive(Default)]
pub struct QBinomialCache {
    cache: HashMap<(u32, u32), IntPoly>,
}

impl QBinomialCache {
    pub fn get(&mut self, a: u32, b: u32) -> &IntPoly {
        self.cache
            .entry((a, b))
            .or_insert_with(|| qbinomial(a, b).expect("b <= a by construction"))
    }
}

/// Number of monomials of multidegree `m` with coefficient-index sum `k`.
pub fn monomial_count(spec: &FormSpec, m: &Multidegree, k: u64, cache: &mut QBinomialCache) -> BigInt {
    let k = k as usize;
    let mut acc: IntPoly = vec![BigInt::one()];
    for (f, &mi) in m.parts().iter().enumerate() {
        let q = cache.get(spec.degree(f) + mi, mi);
        acc = poly_mul_trunc(&acc, q, Some(k));
    }
    acc.get(k).cloned().unwrap_or_else(BigInt::zero)
}

/// Dimension of the cell of semi-invariants of multidegree `m` and order `j`.
pub fn cell_dim(spec: &FormSpec, key: &ComponentKey) -> u64 {
    cell_dim_cached(spec, key, &mut QBinomialCache::default())
}

pub fn cell_dim_cached(spec: &FormSpec, key: &ComponentKey, cache: &mut QBinomialCache) -> u64 {
    if key.multidegree.len() != spec.num_forms() {
        return 0;
    }
    let Some(k) = key.index_sum(spec) else {
        return 0;
    };
    let here = monomial_count(spec, &key.multidegree, k, cache);
    let below = if k == 0 {
        BigInt::zero()
    } else {
        monomial_count(spec, &key.multidegree, k - 1, cache)
    };
    let diff = here - below;
    if diff.is_negative() {
        log::warn!("negative Cayley-Sylvester difference at {key}; clamped to 0");
        return 0;
    }
    diff.to_u64().expect("cell dimension fits in u64")
}

/// Nonzero cell dimensions, keyed by cell.
pub type MultivariateSeriesTable = BTreeMap<ComponentKey, u64>;

/// Orders admissible for multidegree `m`: `j = top, top-2, ..., >= 0`.
pub fn admissible_orders(spec: &FormSpec, m: &Multidegree, mode: Mode) -> Vec<u32> {
    let top = spec.top_weight(m);
    match mode {
        Mode::Invariants => {
            if top % 2 == 0 {
                vec![0]
            } else {
                vec![]
            }
        }
        Mode::Semi => (0..=top as u32).rev().step_by(2).collect(),
    }
}

/// Truncated multivariate Poincaré series: every nonzero cell with total
/// degree at most `degree_cap`.
pub fn poincare_table(spec: &FormSpec, mode: Mode, degree_cap: u32) -> Result<MultivariateSeriesTable> {
    if degree_cap < 1 {
        return Err(Error::Usage("degree cap must be at least 1".into()));
    }
    let mut cache = QBinomialCache::default();
    let mut table = BTreeMap::new();
    for total in 0..=degree_cap {
        for m in Multidegree::compositions(spec.num_forms(), total) {
            for j in admissible_orders(spec, &m, mode) {
                let key = ComponentKey::new(m.clone(), j);
                let d = cell_dim_cached(spec, &key, &mut cache);
                if d > 0 {
                    table.insert(key, d);
                }
            }
        }
    }
    Ok(table)
}

/// A power series in `t` known up to `t^truncation`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnivariateSeries {
    pub coeffs: Vec<BigInt>,
}

impl UnivariateSeries {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        UnivariateSeries { coeffs }
    }

    pub fn from_u64(coeffs: &[u64]) -> Self {
        UnivariateSeries::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn truncation_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

/// Poincaré series by total degree.
///
/// Counts monomials of each total degree by weight with a knapsack over the
/// variables, then takes the highest-weight differences: invariants are
/// `N(t, 0) - N(t, 2)`, semi-invariants `N(t, 0) + N(t, 1)`.
pub fn univariate_series(spec: &FormSpec, mode: Mode, cap: u32) -> UnivariateSeries {
    let cap = cap as usize;
    let dmax = spec.degrees().iter().copied().max().unwrap_or(0) as usize;
    let offset = cap * dmax;
    let width = 2 * offset + 1;
    // counts[t][w + offset]
    let mut counts = vec![vec![BigInt::zero(); width]; cap + 1];
    counts[0][offset] = BigInt::one();
    for v in spec.variables() {
        let w = spec.weight_of(v).expect("spec variable") as isize;
        // Unbounded knapsack in the variable: ascending degree reuses it.
        for t in 1..=cap {
            let (prev, cur) = counts.split_at_mut(t);
            let prev = &prev[t - 1];
            let cur = &mut cur[0];
            for (x, slot) in cur.iter_mut().enumerate() {
                let y = x as isize - w;
                if y >= 0 && (y as usize) < width && !prev[y as usize].is_zero() {
                    *slot += &prev[y as usize];
                }
            }
        }
    }
    let at = |t: usize, w: usize| counts[t].get(offset + w).cloned().unwrap_or_else(BigInt::zero);
    let coeffs = (0..=cap)
        .map(|t| match mode {
            Mode::Invariants => at(t, 0) - at(t, 2),
            Mode::Semi => at(t, 0) + at(t, 1),
        })
        .collect();
    UnivariateSeries::new(coeffs)
}

/// Collapses a multivariate table by total degree.
pub fn collapse_by_degree(table: &MultivariateSeriesTable, cap: u32) -> UnivariateSeries {
    let mut coeffs = vec![BigInt::zero(); cap as usize + 1];
    for (key, &d) in table {
        let t = key.multidegree.total() as usize;
        if t <= cap as usize {
            coeffs[t] += d;
        }
    }
    UnivariateSeries::new(coeffs)
}

/// `P(t) / Q(t)` in lowest terms with `Q(0) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalForm {
    pub numerator: IntPoly,
    pub denominator: IntPoly,
    /// `Q` written as a product of `(1 - t^a)^e`, as `(a, e)` pairs in
    /// decreasing `a`, when such a presentation exists.
    pub binomial_factors: Option<Vec<(u32, u32)>>,
}

impl RationalForm {
    /// Degree of the reduced denominator.
    pub fn beta(&self) -> usize {
        self.denominator.len() - 1
    }

    /// Power series of `P / Q` through `t^n`.
    pub fn expand(&self, n: usize) -> Vec<BigInt> {
        let q = &self.denominator;
        let mut out: Vec<BigInt> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut c = self.numerator.get(i).cloned().unwrap_or_else(BigInt::zero);
            for j in 1..q.len().min(i + 1) {
                c -= &q[j] * &out[i - j];
            }
            out.push(c);
        }
        out
    }
}

/// Terms required beyond `2L` before a recurrence of length `L` is trusted.
pub const RECONSTRUCTION_GUARD: usize = 8;

/// Berlekamp–Massey over the rationals: the shortest linear recurrence
/// generating `seq`, as its connection polynomial `C` with `C(0) = 1`, and
/// its length `L`.
fn berlekamp_massey(seq: &[BigRational]) -> (Vec<BigRational>, usize) {
    let mut c = vec![BigRational::one()];
    let mut b = vec![BigRational::one()];
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut last = BigRational::one();
    for n in 0..seq.len() {
        let mut delta = seq[n].clone();
        for i in 1..=l.min(c.len() - 1) {
            delta += &c[i] * &seq[n - i];
        }
        if delta.is_zero() {
            shift += 1;
            continue;
        }
        let coef = &delta / &last;
        let prev = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, BigRational::zero());
        }
        for (i, x) in b.iter().enumerate() {
            c[i + shift] -= &coef * x;
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = prev;
            last = delta;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    (c, l)
}

fn to_integral(p: &[BigRational]) -> Option<IntPoly> {
    p.iter()
        .map(|c| c.is_integer().then(|| c.to_integer()))
        .collect()
}

/// Exact quotient of `a` by `b` over the integers, if `b` divides `a`.
fn exact_div(a: &[BigInt], b: &[BigInt]) -> Option<IntPoly> {
    let mut rem = a.to_vec();
    trim(&mut rem);
    let db = b.len() - 1;
    let lead = &b[db];
    if rem.len() < b.len() {
        return if rem.iter().all(|c| c.is_zero()) {
            Some(vec![BigInt::zero()])
        } else {
            None
        };
    }
    let mut q = vec![BigInt::zero(); rem.len() - db];
    for i in (0..q.len()).rev() {
        let c = &rem[i + db];
        if c.is_zero() {
            continue;
        }
        let (qi, r) = c.div_rem(lead);
        if !r.is_zero() {
            return None;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &qi * bj;
        }
        q[i] = qi;
    }
    rem.iter().all(|c| c.is_zero()).then_some(q)
}

/// Cyclotomic polynomial `Phi_n`.
fn cyclotomic(n: u32, memo: &mut HashMap<u32, IntPoly>) -> IntPoly {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    // t^n - 1 divided by Phi_d for every proper divisor d.
    let mut p = vec![BigInt::zero(); n as usize + 1];
    p[0] = -BigInt::one();
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi = cyclotomic(d, memo);
            p = exact_div(&p, &phi).expect("cyclotomic divisibility");
        }
    }
    memo.insert(n, p.clone());
    p
}

/// Writes `q` as `prod (1 - t^a)^e` when possible, grouping cyclotomic
/// factors greedily from the largest index down.
pub fn binomial_factorization(q: &[BigInt]) -> Option<Vec<(u32, u32)>> {
    let deg = q.len().checked_sub(1)?;
    let mut memo = HashMap::new();
    let mut rest = q.to_vec();
    let mut mult: BTreeMap<u32, u32> = BTreeMap::new();
    for n in (1..=deg as u32).rev() {
        let phi = cyclotomic(n, &mut memo);
        if phi.len() > rest.len() {
            continue;
        }
        while let Some(next) = exact_div(&rest, &phi) {
            *mult.entry(n).or_default() += 1;
            rest = next;
        }
    }
    trim(&mut rest);
    if rest.len() != 1 || !rest[0].abs().is_one() {
        return None;
    }
    let mut factors: BTreeMap<u32, u32> = BTreeMap::new();
    while let Some((&top, _)) = mult.iter().next_back() {
        for d in (1..=top).filter(|d| top % d == 0) {
            let e = mult.get_mut(&d)?;
            *e -= 1;
            if *e == 0 {
                mult.remove(&d);
            }
        }
        *factors.entry(top).or_default() += 1;
    }
    Some(factors.into_iter().rev().collect())
}

/// Recovers the reduced rational form of a truncated series.
///
/// The minimal recurrence is trusted only when the series extends at least
/// [`RECONSTRUCTION_GUARD`] terms beyond twice its length; otherwise the
/// result is [`Error::InsufficientPrecision`].
pub fn rational_reconstruct(series: &UnivariateSeries) -> Result<RationalForm> {
    let seq: Vec<BigRational> = series
        .coeffs
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    let (conn, l) = berlekamp_massey(&seq);
    if 2 * l + RECONSTRUCTION_GUARD > seq.len() {
        return Err(Error::InsufficientPrecision {
            terms: seq.len(),
            degree: l,
        });
    }
    // P = S*Q mod t^L.
    let mut num: Vec<BigRational> = (0..l.max(1))
        .map(|i| {
            (0..=i.min(conn.len() - 1)).fold(BigRational::zero(), |acc, j| acc + &conn[j] * &seq[i - j])
        })
        .collect();
    while num.len() > 1 && num.last().is_some_and(|x| x.is_zero()) {
        num.pop();
    }
    let numerator = to_integral(&num).ok_or_else(|| {
        Error::Inconsistency("integer series produced a non-integral numerator".into())
    })?;
    let denominator = to_integral(&conn).ok_or_else(|| {
        Error::Inconsistency("integer series produced a non-integral denominator".into())
    })?;
    let binomial_factors = binomial_factorization(&denominator);
    let form = RationalForm {
        numerator,
        denominator,
        binomial_factors,
    };
    if form.expand(series.truncation_degree()) != series.coeffs {
        return Err(Error::Inconsistency(
            "reconstructed rational form does not reproduce the series".into(),
        ));
    }
    Ok(form)
}

/// Poincaré series of `spec` extended until its rational form is
/// identified, trying truncations `start, 2*start, ...` up to `max_terms`.
pub fn reconstruct_poincare(spec: &FormSpec, mode: Mode, start: u32, max_terms: u32) -> Result<RationalForm> {
    let mut t = start.max(RECONSTRUCTION_GUARD as u32 + 2);
    loop {
        let s = univariate_series(spec, mode, t);
        match rational_reconstruct(&s) {
            Ok(r) => return Ok(r),
            Err(Error::InsufficientPrecision { .. }) if t < max_terms => {
                t = (t * 2).min(max_terms);
            }
            Err(e) => return Err(e),
        }
    }
}
