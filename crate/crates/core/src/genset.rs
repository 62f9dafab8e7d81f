//! Minimal generating sets, degree by degree.
//!
//! For every cell the kernel of `D` is compared with the span of products of
//! generators found at lower degrees; whatever the products miss is new.
//! Cells whose products already fill the Cayley–Sylvester dimension are
//! settled by a prime-field certificate (evaluated products give a lower
//! bound on the rational rank, the modular nullity of `D` an upper bound on
//! the kernel). All other cells go through exact elimination.

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::derivation::{
    kernel_cell_basis_in, kernel_dim_modp_in, Cell, CellBasis, CellCoordinates, DerivationSpec,
};
use crate::error::{Error, Result};
use crate::form::{ComponentKey, FormSpec, Multidegree, Variable};
use crate::linalg::{Echelon, SparseRow};
use crate::polynomial::Polynomial;
use crate::repdim::{admissible_orders, reconstruct_poincare, Mode, QBinomialCache, RationalForm};
use crate::scalar::ModP;

/// Generator degrees are never scanned past this bound by default.
pub const HARD_DEGREE_CAP: u32 = 18;

/// Extra evaluation points beyond the cell dimension.
const EXTRA_POINTS: usize = 4;

/// Which algebra to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunMode {
    Invariants,
    SemiInvariants,
    /// Kernel of the Weitzenböck derivation with unit Jordan blocks,
    /// `v_i -> v_{i-1}`. Computed as [`RunMode::SemiInvariants`] and carried
    /// over by `v_i -> i! * v_i`.
    Kernel,
}

impl RunMode {
    pub fn series_mode(self) -> Mode {
        match self {
            RunMode::Invariants => Mode::Invariants,
            RunMode::SemiInvariants | RunMode::Kernel => Mode::Semi,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RunMode::Invariants => "invariants",
            RunMode::SemiInvariants => "semi-invariants",
            RunMode::Kernel => "kernel",
        }
    }
}

/// How cells are formed within one total degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunStrategy {
    /// One cell per multidegree and order.
    Multidegree,
    /// One cell per total degree (invariants only).
    TotalDegree,
}

impl RunStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStrategy::Multidegree => "multidegree",
            RunStrategy::TotalDegree => "total-degree",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenOptions {
    /// Replaces the default cap `min(18, beta)`.
    pub max_degree: Option<u32>,
    /// Worker threads for cells of one degree; 0 lets rayon decide.
    pub workers: usize,
    /// Cells with more ambient monomials than this log a cost warning.
    pub warn_threshold: usize,
    /// Certify the kernel dimension of cells settled by products alone.
    pub verify_kernel_dims: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            max_degree: None,
            workers: 0,
            warn_threshold: 200_000,
            verify_kernel_dims: true,
        }
    }
}

/// One irreducible generator.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorRecord {
    pub polynomial: Polynomial<BigRational>,
    pub multidegree: Multidegree,
    pub order: u32,
    pub total_degree: u32,
}

impl GeneratorRecord {
    pub fn key(&self) -> ComponentKey {
        ComponentKey::new(self.multidegree.clone(), self.order)
    }
}

/// How the kernel dimension of a visited cell was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelCheck {
    /// Exact nullspace of `D`.
    Exact,
    /// Modular nullity of `D` matched the rank of evaluated products.
    Modular,
    /// Not checked.
    Skipped,
}

/// Bookkeeping for one visited cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellReport {
    pub cell: Cell,
    /// Number of monomials spanning the cell.
    pub ambient: usize,
    /// Cayley–Sylvester dimension.
    pub expected_dim: u64,
    /// Dimension established by linear algebra, when checked.
    pub kernel_dim: Option<u64>,
    pub check: KernelCheck,
    /// Rank of the products of earlier generators.
    pub decomposable_rank: usize,
    pub new_generators: usize,
}

/// Result of a run.
#[derive(Debug, Clone)]
pub struct GeneratingSet {
    pub spec: Arc<FormSpec>,
    pub mode: RunMode,
    pub strategy: RunStrategy,
    pub cap_used: u32,
    pub beta: Option<usize>,
    pub series: Option<RationalForm>,
    /// Sorted by total degree, then discovery order.
    pub records: Vec<GeneratorRecord>,
    pub cells: Vec<CellReport>,
    pub warnings: Vec<String>,
}

impl GeneratingSet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn by_degree(&self) -> BTreeMap<u32, Vec<&GeneratorRecord>> {
        let mut out: BTreeMap<u32, Vec<&GeneratorRecord>> = BTreeMap::new();
        for r in &self.records {
            out.entry(r.total_degree).or_default().push(r);
        }
        out
    }

    /// Generator count for every degree that has generators.
    pub fn counts(&self) -> BTreeMap<u32, usize> {
        self.by_degree().into_iter().map(|(d, v)| (d, v.len())).collect()
    }
}

/// Hooks for streaming progress.
pub trait Progress: Sync {
    fn cap_chosen(&self, _cap: u32, _beta: Option<usize>) {}
    fn degree_started(&self, _degree: u32) {}
    fn generators_found(&self, _degree: u32, _records: &[GeneratorRecord]) {}
    fn cell_done(&self, _report: &CellReport) {}
}

/// Progress sink that ignores everything.
pub struct Silent;

impl Progress for Silent {}

/// What a product of generators must add up to.
#[derive(Debug, Clone)]
enum Target {
    Component(ComponentKey),
    Slice(u32),
}

impl Target {
    fn of(cell: &Cell) -> Self {
        match cell {
            Cell::Component(k) => Target::Component(k.clone()),
            Cell::InvariantSlice(t) => Target::Slice(*t),
        }
    }
}

/// Visits every multiset of `prior` (as sorted index lists, at least two
/// factors) whose grading adds up to `target`.
fn for_each_factorization(
    prior: &[GeneratorRecord],
    target: &Target,
    visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) {
    struct Remaining {
        md: Option<Multidegree>,
        degree: u32,
        order: u32,
    }
    let start = match target {
        Target::Component(k) => Remaining {
            md: Some(k.multidegree.clone()),
            degree: k.multidegree.total(),
            order: k.order,
        },
        Target::Slice(t) => Remaining {
            md: None,
            degree: *t,
            order: 0,
        },
    };
    let usable: Vec<usize> = (0..prior.len())
        .filter(|&i| {
            let r = &prior[i];
            r.total_degree < start.degree
                && r.order <= start.order
                && start
                    .md
                    .as_ref()
                    .is_none_or(|m| m.checked_sub(&r.multidegree).is_some())
        })
        .collect();

    fn rec(
        prior: &[GeneratorRecord],
        usable: &[usize],
        from: usize,
        rem: &Remaining,
        chosen: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if rem.degree == 0 {
            if rem.order == 0 && chosen.len() >= 2 {
                return visit(chosen);
            }
            return ControlFlow::Continue(());
        }
        for u in from..usable.len() {
            let r = &prior[usable[u]];
            if r.total_degree > rem.degree || r.order > rem.order {
                continue;
            }
            let md = match &rem.md {
                Some(m) => match m.checked_sub(&r.multidegree) {
                    Some(x) => Some(x),
                    None => continue,
                },
                None => None,
            };
            let next = Remaining {
                md,
                degree: rem.degree - r.total_degree,
                order: rem.order - r.order,
            };
            chosen.push(usable[u]);
            let flow = rec(prior, usable, u, &next, chosen, visit);
            chosen.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
    let _ = rec(prior, &usable, 0, &start, &mut Vec::new(), visit);
}

/// Products of earlier generators landing in `key`: a spanning list of the
/// decomposable part of the cell.
pub fn product_span(prior: &[GeneratorRecord], key: &ComponentKey) -> Vec<Polynomial<BigRational>> {
    decomposables(prior, &Target::Component(key.clone()))
}

fn decomposables(prior: &[GeneratorRecord], target: &Target) -> Vec<Polynomial<BigRational>> {
    let mut out = Vec::new();
    for_each_factorization(prior, target, &mut |idx| {
        let mut p = prior[idx[0]].polynomial.clone();
        for &i in &idx[1..] {
            p = p.mul(&prior[i].polynomial).expect("generators share one spec");
        }
        out.push(p);
        ControlFlow::Continue(())
    });
    out
}

/// Splits the kernel cell into decomposables and new generators: kernel
/// basis vectors are taken greedily, in basis order, whenever they enlarge
/// the span of the decomposables.
pub fn irreducible_complement(
    cell: &CellBasis,
    coords: &CellCoordinates,
    decomposables: &[Polynomial<BigRational>],
) -> Result<(usize, Vec<Polynomial<BigRational>>)> {
    let coords_of = |p: &Polynomial<BigRational>| {
        coords.integer_coordinates(p).ok_or_else(|| {
            Error::Inconsistency(format!("polynomial outside cell {} or not integral", cell.cell))
        })
    };
    let mut kernel: Echelon<num_bigint::BigInt> = Echelon::new(coords.len());
    for b in &cell.basis {
        kernel.insert(coords_of(b)?);
    }
    let mut span: Echelon<num_bigint::BigInt> = Echelon::new(coords.len());
    for d in decomposables {
        let row = coords_of(d)?;
        if !kernel.contains(row.clone()) {
            return Err(Error::Inconsistency(format!(
                "a product of generators is not in the kernel of D on {}",
                cell.cell
            )));
        }
        span.insert(row);
    }
    let rank = span.rank();
    let mut fresh = Vec::new();
    for b in &cell.basis {
        if span.insert(coords_of(b)?) {
            fresh.push(b.clone());
        }
    }
    if rank + fresh.len() != cell.basis.len() {
        return Err(Error::Inconsistency(format!(
            "decomposables ({rank}) and new generators ({}) do not fill the {}-dimensional cell {}",
            fresh.len(),
            cell.basis.len(),
            cell.cell
        )));
    }
    Ok((rank, fresh))
}

/// Deterministic evaluation points for one cell.
fn cell_points(cell: &Cell, count: usize, num_vars: usize) -> Vec<Vec<ModP>> {
    let mut seed: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut mix = |x: u64| {
        seed ^= x.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(seed << 6).wrapping_add(seed >> 2);
    };
    match cell {
        Cell::Component(k) => {
            for &p in k.multidegree.parts() {
                mix(p as u64);
            }
            mix(k.order as u64 + 1000);
        }
        Cell::InvariantSlice(t) => mix(*t as u64 + 2000),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..num_vars).map(|_| ModP::new(rng.gen::<u64>())).collect())
        .collect()
}

/// Rank of the evaluated products over the prime field, stopping once it
/// reaches `cap`.
fn modular_decomposable_rank(prior: &[GeneratorRecord], cell: &Cell, cap: usize, num_vars: usize) -> usize {
    if cap == 0 {
        return 0;
    }
    let npts = cap + EXTRA_POINTS;
    let points = cell_points(cell, npts, num_vars);
    let target = Target::of(cell);
    let mut values: Vec<Option<Vec<ModP>>> = vec![None; prior.len()];
    let mut ech: Echelon<ModP> = Echelon::new(npts);
    for_each_factorization(prior, &target, &mut |idx| {
        let mut row = vec![ModP::new(1); npts];
        for &i in idx {
            let vals = values[i].get_or_insert_with(|| {
                let p = prior[i]
                    .polynomial
                    .to_modp()
                    .expect("generators have integer coefficients");
                points.iter().map(|pt| p.evaluate(pt)).collect()
            });
            for (r, v) in row.iter_mut().zip(vals.iter()) {
                *r = *r * *v;
            }
        }
        let sparse: SparseRow<ModP> = row
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .collect();
        ech.insert(sparse);
        if ech.rank() >= cap {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    ech.rank()
}

struct CellOutcome {
    report: CellReport,
    fresh: Vec<GeneratorRecord>,
    warning: Option<String>,
}

fn process_cell(
    dspec: &DerivationSpec,
    cell: &Cell,
    expected: u64,
    prior: &[GeneratorRecord],
    opts: &GenOptions,
) -> Result<CellOutcome> {
    let spec = dspec.spec();
    let coords = CellCoordinates::new(cell.monomials(spec)?);
    let warning = (coords.len() > opts.warn_threshold).then(|| {
        let w = format!(
            "cell {cell} spans {} monomials (warning threshold {})",
            coords.len(),
            opts.warn_threshold
        );
        log::warn!("{w}");
        w
    });
    let dim = expected as usize;

    let fast_rank = modular_decomposable_rank(prior, cell, dim, spec.num_vars());
    if fast_rank == dim {
        let (kernel_dim, check) = if opts.verify_kernel_dims {
            let nullity = kernel_dim_modp_in(dspec, cell, &coords)?;
            if nullity != dim {
                return Err(Error::Inconsistency(format!(
                    "modular nullity of D on {cell} is {nullity}, expected {dim}"
                )));
            }
            (Some(expected), KernelCheck::Modular)
        } else {
            (None, KernelCheck::Skipped)
        };
        return Ok(CellOutcome {
            report: CellReport {
                cell: cell.clone(),
                ambient: coords.len(),
                expected_dim: expected,
                kernel_dim,
                check,
                decomposable_rank: dim,
                new_generators: 0,
            },
            fresh: Vec::new(),
            warning,
        });
    }

    let basis = kernel_cell_basis_in(dspec, cell, &coords)?;
    let decomp = decomposables(prior, &Target::of(cell));
    let (rank, fresh) = irreducible_complement(&basis, &coords, &decomp)?;
    let fresh = fresh
        .into_iter()
        .map(|p| {
            let (multidegree, weight) = p.homogeneous_key().ok_or_else(|| {
                Error::Inconsistency(format!("kernel vector of {cell} is not multihomogeneous"))
            })?;
            Ok(GeneratorRecord {
                total_degree: multidegree.total(),
                multidegree,
                order: weight as u32,
                polynomial: p,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CellOutcome {
        report: CellReport {
            cell: cell.clone(),
            ambient: coords.len(),
            expected_dim: expected,
            kernel_dim: Some(basis.basis.len() as u64),
            check: KernelCheck::Exact,
            decomposable_rank: rank,
            new_generators: fresh.len(),
        },
        fresh,
        warning,
    })
}

/// Cells of one total degree with nonzero expected dimension, in a fixed order.
fn cells_of_degree(
    spec: &FormSpec,
    mode: RunMode,
    strategy: RunStrategy,
    degree: u32,
    cache: &mut QBinomialCache,
) -> Vec<(Cell, u64)> {
    let cells: Vec<Cell> = match strategy {
        RunStrategy::TotalDegree => vec![Cell::InvariantSlice(degree)],
        RunStrategy::Multidegree => Multidegree::compositions(spec.num_forms(), degree)
            .into_iter()
            .flat_map(|m| {
                admissible_orders(spec, &m, mode.series_mode())
                    .into_iter()
                    .map(move |j| Cell::Component(ComponentKey::new(m.clone(), j)))
            })
            .collect(),
    };
    cells
        .into_iter()
        .map(|c| {
            let d = c.expected_dim(spec, cache);
            (c, d)
        })
        .filter(|(_, d)| *d > 0)
        .collect()
}

/// Degree-one generators of the semi-invariant algebra: the leading
/// coefficient `v_0` of every form.
fn seed_records(spec: &Arc<FormSpec>) -> Vec<GeneratorRecord> {
    (0..spec.num_forms())
        .map(|f| {
            let mut md = vec![0; spec.num_forms()];
            md[f] = 1;
            GeneratorRecord {
                polynomial: Polynomial::variable(spec.clone(), Variable::new(f, 0))
                    .expect("v_0 exists"),
                multidegree: Multidegree::new(md),
                order: spec.degree(f),
                total_degree: 1,
            }
        })
        .collect()
}

/// Computes the irreducible generators up to the degree cap.
pub fn minimal_generating_set(
    spec: Arc<FormSpec>,
    mode: RunMode,
    strategy: RunStrategy,
    opts: &GenOptions,
    progress: &dyn Progress,
) -> Result<GeneratingSet> {
    if strategy == RunStrategy::TotalDegree && mode != RunMode::Invariants {
        return Err(Error::Usage(
            "the total-degree strategy applies to invariants only".into(),
        ));
    }
    if opts.max_degree == Some(0) {
        return Err(Error::Usage("max degree must be at least 1".into()));
    }
    let series = match reconstruct_poincare(&spec, mode.series_mode(), 32, 256) {
        Ok(r) => Some(r),
        Err(Error::InsufficientPrecision { terms, degree }) => {
            log::warn!(
                "Poincare series not identified from {terms} terms (recurrence length {degree}); using cap {HARD_DEGREE_CAP}"
            );
            None
        }
        Err(e) => return Err(e),
    };
    let beta = series.as_ref().map(|r| r.beta());
    let cap = opts
        .max_degree
        .unwrap_or_else(|| beta.map_or(HARD_DEGREE_CAP, |b| (b as u32).clamp(1, HARD_DEGREE_CAP)));
    progress.cap_chosen(cap, beta);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    let dspec = DerivationSpec::new(spec.clone());
    let mut cache = QBinomialCache::default();
    let mut records: Vec<GeneratorRecord> = Vec::new();
    let mut cells = Vec::new();
    let mut warnings = Vec::new();

    if mode != RunMode::Invariants {
        progress.degree_started(1);
        let seeds = seed_records(&spec);
        progress.generators_found(1, &seeds);
        records.extend(seeds);
    }
    for degree in 2..=cap {
        progress.degree_started(degree);
        let todo = cells_of_degree(&spec, mode, strategy, degree, &mut cache);
        let prior = &records;
        let outcomes: Vec<Result<CellOutcome>> = pool.install(|| {
            todo.par_iter()
                .map(|(cell, dim)| process_cell(&dspec, cell, *dim, prior, opts))
                .collect()
        });
        let mut fresh_here = Vec::new();
        for o in outcomes {
            let o = o?;
            progress.cell_done(&o.report);
            cells.push(o.report);
            warnings.extend(o.warning);
            fresh_here.extend(o.fresh);
        }
        progress.generators_found(degree, &fresh_here);
        records.extend(fresh_here);
    }

    if mode == RunMode::Kernel {
        for r in &mut records {
            r.polynomial = dspec.to_jordan_basis(&r.polynomial, false).primitive_normalize()?;
        }
    }
    Ok(GeneratingSet {
        spec,
        mode,
        strategy,
        cap_used: cap,
        beta,
        series,
        records,
        cells,
        warnings,
    })
}

/// Re-checks a finished run: every generator lies in `ker D` (and in
/// `ker E` when of order 0), and none lies in the span of products of
/// generators of strictly smaller degree. Kernel-mode generators are
/// checked against the unit Jordan-block derivation.
pub fn verify_generating_set(set: &GeneratingSet) -> Result<()> {
    let dspec = DerivationSpec::new(set.spec.clone());
    let records: Vec<GeneratorRecord> = if set.mode == RunMode::Kernel {
        set.records
            .iter()
            .map(|r| {
                if !dspec.apply_jordan(&r.polynomial).is_zero() {
                    return Err(Error::Inconsistency(format!(
                        "kernel generator of multidegree {} is not killed by the Jordan derivation",
                        r.multidegree
                    )));
                }
                let mut r = r.clone();
                r.polynomial = dspec.to_jordan_basis(&r.polynomial, true).primitive_normalize()?;
                Ok(r)
            })
            .collect::<Result<_>>()?
    } else {
        set.records.clone()
    };
    for (i, g) in records.iter().enumerate() {
        let report = dspec.verify_semi_invariant(&g.polynomial);
        if !report.in_kernel || report.order != Some(g.order as i64) {
            return Err(Error::Inconsistency(format!(
                "generator {i} of multidegree {} is not a semi-invariant of order {}",
                g.multidegree, g.order
            )));
        }
        if g.order == 0 && !report.full_invariant {
            return Err(Error::Inconsistency(format!(
                "order-0 generator {i} of multidegree {} is not killed by E",
                g.multidegree
            )));
        }
        if !g.polynomial.is_homogeneous_of(&g.key()) {
            return Err(Error::Inconsistency(format!("generator {i} is not homogeneous")));
        }
        let lower: Vec<GeneratorRecord> = records
            .iter()
            .filter(|r| r.total_degree < g.total_degree)
            .cloned()
            .collect();
        let key = g.key();
        let coords = CellCoordinates::new(crate::monomial::component_monomials(&set.spec, &key)?);
        let mut span: Echelon<num_bigint::BigInt> = Echelon::new(coords.len());
        for p in product_span(&lower, &key) {
            span.insert(coords.integer_coordinates(&p).ok_or_else(|| {
                Error::Inconsistency("product outside its cell".into())
            })?);
        }
        let row = coords
            .integer_coordinates(&g.polynomial)
            .ok_or_else(|| Error::Inconsistency("generator outside its cell".into()))?;
        if span.contains(row) {
            return Err(Error::Inconsistency(format!(
                "generator {i} of multidegree {} is a combination of products of lower generators",
                g.multidegree
            )));
        }
    }
    Ok(())
}

/// True if `p` is a nonzero rational multiple of some generator.
pub fn matches_some_generator(set: &GeneratingSet, p: &Polynomial<BigRational>) -> bool {
    set.records.iter().any(|r| r.polynomial.is_scalar_multiple_of(p))
}
