//! One pass/fail line per acceptance criterion.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use forge_core::derivation::CellCoordinates;
use forge_core::genset::{product_span, Silent};
use forge_core::linalg::Echelon;
use forge_core::monomial::component_monomials;
use forge_core::repdim::{rational_reconstruct, univariate_series};
use forge_core::{
    minimal_generating_set, verify_generating_set, ComponentKey, DerivationSpec, FormSpec, GenOptions,
    GeneratingSet, Mode, Monomial, Multidegree, Polynomial, RunMode, RunStrategy, Variable,
};
use num_bigint::BigInt;
use num_rational::BigRational;

type Check = Result<String, String>;

/// Parses `3*x0^2*y1 - 4*x1*x3` with letters x, y, u, v, w for forms 0..4.
fn parse(spec: &Arc<FormSpec>, s: &str) -> Polynomial<BigRational> {
    let s = s.replace(' ', "").replace('-', "+-");
    let mut terms = Vec::new();
    for term in s.split('+').filter(|t| !t.is_empty()) {
        let (sign, body) = match term.strip_prefix('-') {
            Some(b) => (-1, b),
            None => (1, term),
        };
        let mut coeff = BigInt::from(sign);
        let mut pairs = Vec::new();
        for f in body.split('*') {
            if let Ok(n) = f.parse::<i64>() {
                coeff *= n;
                continue;
            }
            let (var, e) = match f.split_once('^') {
                Some((v, e)) => (v, e.parse::<u16>().unwrap()),
                None => (f, 1),
            };
            let form = "xyuvw".find(&var[..1]).expect("known letter");
            let index: u32 = var[1..].parse().unwrap();
            pairs.push((Variable::new(form, index), e));
        }
        terms.push((Monomial::from_pairs(spec, &pairs).unwrap(), BigRational::from_integer(coeff)));
    }
    Polynomial::from_terms(spec.clone(), terms)
}

fn run(d: &[u32], mode: RunMode, strategy: RunStrategy, cap: Option<u32>, workers: usize) -> GeneratingSet {
    let spec = Arc::new(FormSpec::new(d.to_vec()).unwrap());
    let opts = GenOptions {
        max_degree: cap,
        workers,
        ..GenOptions::default()
    };
    minimal_generating_set(spec, mode, strategy, &opts, &Silent).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn histogram(set: &GeneratingSet) -> BTreeMap<u32, usize> {
    set.counts()
}

fn all_match(set: &GeneratingSet, polys: &[&str]) -> Result<(), String> {
    for p in polys {
        let q = parse(&set.spec, p);
        ensure(forge_core::genset::matches_some_generator(set, &q), || {
            format!("no generator is a multiple of {p}")
        })?;
    }
    Ok(())
}

fn pairs(set: &GeneratingSet) -> Vec<(Vec<u32>, u32)> {
    let mut v: Vec<_> = set
        .records
        .iter()
        .map(|r| (r.multidegree.parts().to_vec(), r.order))
        .collect();
    v.sort();
    v
}

fn in_span(spec: &Arc<FormSpec>, key: &ComponentKey, span: &[Polynomial<BigRational>], p: &Polynomial<BigRational>) -> bool {
    let coords = CellCoordinates::new(component_monomials(spec, key).unwrap());
    let mut ech: Echelon<BigInt> = Echelon::new(coords.len());
    for s in span {
        ech.insert(coords.integer_coordinates(s).unwrap());
    }
    ech.contains(coords.integer_coordinates(p).unwrap())
}

const QUARTIC: [&str; 2] = [
    "6*x2^2 + 2*x0*x4 - 8*x1*x3",
    "-6*x2^3 - 6*x0*x3^2 - 6*x1^2*x4 + 6*x0*x2*x4 + 12*x1*x2*x3",
];

const INV5_2: &str = "6*x1^2*x3^2*y0+18*x1^2*x2^2*y2-12*x1^3*x3*y2-12*x1^3*x2*y3+6*x0^2*x2^2*y4+6*x2^4*y0+6*x1^4*y4+12*x1^2*x2*x3*y1-12*x0*x1*x3^2*y1+12*x0*x2^2*x3*y1+12*x0*x1^2*x3*y3-12*x0*x1^2*x2*y4-12*x0^2*x2*x3*y3-12*x1*x2^2*x3*y0+12*x0*x1*x2^2*y3-12*x0*x2^3*y2+6*x0^2*x3^2*y2-12*x1*x2^3*y1";

const COV: [&str; 10] = [
    "x0",
    "y0",
    "u0",
    "-x0*y1+x1*y0",
    "-y1*u0+y0*u1",
    "-x1*u0+x0*u1",
    "2*u0*u2-2*u1^2",
    "-2*y0*y1*u1+y1^2*u0+y0^2*u2",
    "-x1*y1*u0+x1*y0*u1+x0*y1*u1-x0*y0*u2",
    "x1^2*u0+x0^2*u2-2*x0*x1*u1",
];

const KER3: [&str; 3] = [
    "-6*y0^2*y3+6*y0*y1*y2-2*y1^3",
    "4*x1*y0*y2-6*x0*y0*y3+2*x0*y1*y2-2*x1*y1^2",
    "-2*x0^2*y2-x1^2*y0+2*x0*x1*y1",
];

const FIVE_FORMS_DEG3: [&str; 12] = [
    "3*y0^2*v2-6*y0*y1*v1+3*y1^2*v0",
    "3*y0^2*w2+3*y1^2*w0-6*y0*y1*w1",
    "6*u0*u1*w1-3*u0^2*w2-3*u1^2*w0",
    "-6*y0*u0*v2-6*y1*u1*v0+6*y1*u0*v1+6*y0*u1*v1",
    "-6*y0*u0*w2-6*y1*u1*w0+6*y0*u1*w1+6*y1*u0*w1",
    "6*u0*u1*v1-3*u1^2*v0-3*u0^2*v2",
    "6*u1*x0*v1+6*u0*x1*v1-6*u0*x0*v2-6*u1*x1*v0",
    "6*y1*x0*w1-6*y1*x1*w0-6*y0*x0*w2+6*y0*x1*w1",
    "-6*u1*x1*w0-6*u0*x0*w2+6*u0*x1*w1+6*u1*x0*w1",
    "6*y0*x1*v1-6*y1*x1*v0+6*y1*x0*v1-6*y0*x0*v2",
    "-3*x1^2*v0+6*x0*x1*v1-3*x0^2*v2",
    "-3*x0^2*w2+6*x0*x1*w1-3*x1^2*w0",
];

fn within(limit: Duration, started: Instant) -> Result<(), String> {
    let t = started.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn criterion_1(sets: &mut Vec<GeneratingSet>) -> Check {
    let t = Instant::now();
    let g = run(&[4], RunMode::Invariants, RunStrategy::Multidegree, None, 0);
    within(Duration::from_secs(1), t)?;
    ensure(histogram(&g) == BTreeMap::from([(2, 1), (3, 1)]), || format!("counts {:?}", g.counts()))?;
    all_match(&g, &QUARTIC)?;
    verify_generating_set(&g).map_err(|e| e.to_string())?;
    let msg = format!("2 generators at degrees 2, 3 in {:.2?}", t.elapsed());
    sets.push(g);
    Ok(msg)
}

fn criterion_2(sets: &mut Vec<GeneratingSet>) -> Check {
    let t = Instant::now();
    let g = run(&[3, 4], RunMode::Invariants, RunStrategy::Multidegree, None, 0);
    let elapsed = t.elapsed();
    within(Duration::from_secs(300), t)?;
    let want = BTreeMap::from([(2, 1), (3, 1), (4, 1), (5, 2), (6, 2), (7, 3), (8, 3), (9, 4), (10, 2), (11, 1)]);
    ensure(histogram(&g) == want, || format!("counts {:?}", g.counts()))?;
    let mut logged: Vec<(Vec<u32>, u32)> = [
        [0, 2], [0, 3], [4, 0], [4, 1], [2, 3], [4, 2], [4, 2], [4, 3], [4, 3], [4, 3],
        [6, 2], [4, 4], [4, 4], [6, 3], [6, 3], [6, 3], [4, 5], [6, 4], [6, 4], [6, 5],
    ]
    .iter()
    .map(|m| (m.to_vec(), 0))
    .collect();
    logged.sort();
    ensure(pairs(&g) == logged, || format!("multidegrees {:?}", pairs(&g)))?;

    let inv = parse(&g.spec, INV5_2);
    let dspec = DerivationSpec::new(g.spec.clone());
    let report = dspec.verify_semi_invariant(&inv);
    ensure(report.in_kernel && report.full_invariant, || "displayed degree-5 polynomial is not invariant".into())?;
    let key = ComponentKey::new(Multidegree::new(vec![4, 1]), 0);
    let lower: Vec<_> = g.records.iter().filter(|r| r.total_degree < 5).cloned().collect();
    let mut span = product_span(&lower, &key);
    ensure(!in_span(&g.spec, &key, &span, &inv), || "displayed degree-5 polynomial is decomposable".into())?;
    span.extend(g.records.iter().filter(|r| r.key() == key).map(|r| r.polynomial.clone()));
    ensure(in_span(&g.spec, &key, &span, &inv), || "displayed degree-5 polynomial outside our [4, 1] cell".into())?;
    verify_generating_set(&g).map_err(|e| e.to_string())?;
    let msg = format!("20 generators, cap {} (beta {:?}) in {elapsed:.2?}", g.cap_used, g.beta);
    sets.push(g);
    Ok(msg)
}

fn criterion_3(sets: &mut Vec<GeneratingSet>) -> Check {
    let t = Instant::now();
    let g = run(&[1, 1, 2], RunMode::SemiInvariants, RunStrategy::Multidegree, None, 0);
    within(Duration::from_secs(10), t)?;
    ensure(histogram(&g) == BTreeMap::from([(1, 3), (2, 4), (3, 3)]), || format!("counts {:?}", g.counts()))?;
    all_match(&g, &COV)?;
    verify_generating_set(&g).map_err(|e| e.to_string())?;
    let msg = format!("10 generators, all displayed ones matched, in {:.2?}", t.elapsed());
    sets.push(g);
    Ok(msg)
}

fn criterion_4(sets: &mut Vec<GeneratingSet>) -> Check {
    let t = Instant::now();
    let g = run(&[1, 3], RunMode::Kernel, RunStrategy::Multidegree, None, 0);
    within(Duration::from_secs(30), t)?;
    let mut want: Vec<(Vec<u32>, u32)> = [
        ([1, 0], 1), ([0, 1], 3), ([1, 1], 2), ([0, 2], 2), ([2, 1], 1), ([0, 3], 3), ([1, 2], 1),
        ([2, 2], 0), ([3, 1], 0), ([0, 4], 0), ([1, 3], 2), ([2, 3], 1), ([3, 3], 0),
    ]
    .iter()
    .map(|(m, j)| (m.to_vec(), *j))
    .collect();
    want.sort();
    ensure(pairs(&g) == want, || format!("pairs {:?}", pairs(&g)))?;
    all_match(&g, &KER3)?;
    verify_generating_set(&g).map_err(|e| e.to_string())?;
    let msg = format!("13 generators with the logged multidegree/order pairs in {:.2?}", t.elapsed());
    sets.push(g);
    Ok(msg)
}

fn criterion_5(sets: &mut Vec<GeneratingSet>) -> Check {
    let t = Instant::now();
    let g = run(&[1, 1, 1, 2, 2], RunMode::Invariants, RunStrategy::TotalDegree, Some(6), 0);
    within(Duration::from_secs(120), t)?;
    ensure(histogram(&g) == BTreeMap::from([(2, 6), (3, 12), (4, 6)]), || format!("counts {:?}", g.counts()))?;
    all_match(&g, &FIVE_FORMS_DEG3)?;
    verify_generating_set(&g).map_err(|e| e.to_string())?;
    let msg = format!("24 generators (6, 12, 6) up to degree 6 in {:.2?}", t.elapsed());
    sets.push(g);
    Ok(msg)
}

fn criterion_6(sets: &[GeneratingSet]) -> Check {
    ensure(sets.len() == 5, || "earlier criteria did not all produce a run".into())?;
    let mut cells = 0;
    for s in sets {
        for c in &s.cells {
            cells += 1;
            ensure(c.kernel_dim == Some(c.expected_dim), || {
                format!("cell {} of {:?}: kernel {:?} vs {}", c.cell, s.spec.degrees(), c.kernel_dim, c.expected_dim)
            })?;
        }
    }
    Ok(format!("{cells} cells, kernel dimension equals the counting formula in each"))
}

fn spans_agree(a: &GeneratingSet, b: &GeneratingSet) -> bool {
    if a.counts() != b.counts() {
        return false;
    }
    // Compare cell by cell modulo products of lower generators.
    let mut keys: Vec<ComponentKey> = a.records.iter().chain(&b.records).map(|r| r.key()).collect();
    keys.sort();
    keys.dedup();
    keys.iter().all(|key| {
        let lower: Vec<_> = a.records.iter().filter(|r| r.total_degree < key.multidegree.total()).cloned().collect();
        let base = product_span(&lower, key);
        let of = |s: &GeneratingSet| -> Vec<_> {
            s.records.iter().filter(|r| &r.key() == key).map(|r| r.polynomial.clone()).collect()
        };
        let (pa, pb) = (of(a), of(b));
        let with = |extra: &[Polynomial<BigRational>]| {
            let mut v = base.clone();
            v.extend_from_slice(extra);
            v
        };
        pa.iter().all(|p| in_span(&a.spec, key, &with(&pb), p)) && pb.iter().all(|p| in_span(&a.spec, key, &with(&pa), p))
    })
}

fn criterion_7() -> Check {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let spec = Arc::new(FormSpec::new(vec![1, 2, 3]).unwrap());
    let dspec = DerivationSpec::new(spec.clone());
    let random_poly = |rng: &mut rand_chacha::ChaCha8Rng| {
        let terms: Vec<_> = (0..4)
            .map(|_| {
                let e: Vec<u16> = (0..spec.num_vars()).map(|_| rng.gen_range(0..3)).collect();
                (Monomial::from_exponents(e), BigRational::from_integer(rng.gen_range(-5..6).into()))
            })
            .collect();
        Polynomial::from_terms(spec.clone(), terms)
    };
    for _ in 0..50 {
        let (p, q) = (random_poly(&mut rng), random_poly(&mut rng));
        let pq = p.mul(&q).unwrap();
        let lhs = dspec.apply_lowering(&pq);
        let rhs = dspec
            .apply_lowering(&p)
            .mul(&q)
            .unwrap()
            .add(&p.mul(&dspec.apply_lowering(&q)).unwrap())
            .unwrap();
        ensure(lhs == rhs, || "Leibniz rule fails".into())?;
        for (x, y) in [(&p, &q), (&q, &p)] {
            if let (Some((mx, wx)), Some((my, wy))) = (x.homogeneous_key(), y.homogeneous_key()) {
                let k = x.mul(y).unwrap().homogeneous_key();
                ensure(x.mul(y).unwrap().is_zero() || k == Some((mx.add(&my), wx + wy)), || "grading not additive".into())?;
            }
        }
        let n = p.primitive_normalize();
        if let Ok(n) = n {
            ensure(n.primitive_normalize().unwrap() == n, || "normalization not idempotent".into())?;
        }
    }
    for v in spec.variables() {
        let x = Polynomial::<BigRational>::variable(spec.clone(), v).unwrap();
        let de = dspec.apply_lowering(&dspec.apply_raising(&x));
        let ed = dspec.apply_raising(&dspec.apply_lowering(&x));
        let h = x.scale(&BigRational::from_integer(spec.weight_of(v).unwrap().into()));
        ensure(de.sub(&ed).unwrap() == h, || format!("[D, E] differs from the weight on {v:?}"))?;
    }
    for d in [&[4][..], &[1, 1, 2][..]] {
        let a = run(d, RunMode::Invariants, RunStrategy::Multidegree, None, 1);
        let b = run(d, RunMode::Invariants, RunStrategy::TotalDegree, None, 1);
        ensure(spans_agree(&a, &b), || format!("strategies disagree on {d:?}"))?;
    }
    let one = run(&[1, 1, 2], RunMode::SemiInvariants, RunStrategy::Multidegree, None, 1);
    let four = run(&[1, 1, 2], RunMode::SemiInvariants, RunStrategy::Multidegree, None, 4);
    ensure(one.records == four.records, || "results depend on the worker count".into())?;
    Ok("Leibniz, [D, E] = weight, grading, normalization, strategy equivalence, determinism".into())
}

fn criterion_8() -> Check {
    let g = run(&[2], RunMode::Invariants, RunStrategy::Multidegree, None, 0);
    ensure(g.len() == 1 && g.records[0].total_degree == 2, || "V2 should have one quadratic generator".into())?;
    ensure(g.records[0].polynomial.is_scalar_multiple_of(&parse(&g.spec, "x0*x2 - x1^2")), || {
        "V2 generator is not the discriminant".into()
    })?;
    let g = run(&[1, 1], RunMode::Invariants, RunStrategy::Multidegree, None, 0);
    ensure(g.len() == 1, || "V1 + V1 should have one generator".into())?;
    ensure(g.records[0].polynomial.is_scalar_multiple_of(&parse(&g.spec, "x0*y1 - x1*y0")), || {
        "V1 + V1 generator is not the determinant".into()
    })?;
    let spec = FormSpec::new(vec![4]).unwrap();
    let r = rational_reconstruct(&univariate_series(&spec, Mode::Invariants, 40)).map_err(|e| e.to_string())?;
    ensure(r.beta() == 5, || format!("beta {} for V4", r.beta()))?;
    Ok("V2 discriminant, V1 + V1 determinant, beta(V4) = 5".into())
}

fn main() {
    let mut sets = Vec::new();
    let results: Vec<(u32, &str, Check)> = vec![
        (1, "quartic invariants", criterion_1(&mut sets)),
        (2, "cubic and quartic invariants", criterion_2(&mut sets)),
        (3, "two linear forms and a quadratic, semi-invariants", criterion_3(&mut sets)),
        (4, "kernel for degrees (1, 3)", criterion_4(&mut sets)),
        (5, "three linear and two quadratic forms, total-degree strategy", criterion_5(&mut sets)),
        (6, "kernel dimensions against the counting formula", criterion_6(&sets)),
        (7, "property suite", criterion_7()),
        (8, "known algebras", criterion_8()),
    ];
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(msg) => println!("PASS criterion {n} ({name}): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {msg}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
