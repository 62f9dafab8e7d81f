use std::sync::Arc;

use forge_core::derivation::{kernel_cell_basis, kernel_dim_modp};
use forge_core::genset::Silent;
use forge_core::monomial::component_monomials;
use forge_core::repdim::{
    cell_dim, collapse_by_degree, poincare_table, qbinomial, rational_reconstruct, univariate_series,
    UnivariateSeries,
};
use forge_core::{
    minimal_generating_set, Cell, ComponentKey, DerivationSpec, FormSpec, GenOptions, Mode, Monomial,
    Multidegree, Polynomial, RunMode, RunStrategy,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = Arc<FormSpec>> {
    prop::collection::vec(1u32..=4, 1..=3).prop_map(|d| Arc::new(FormSpec::new(d).unwrap()))
}

fn poly_strategy(spec: Arc<FormSpec>) -> impl Strategy<Value = Polynomial<BigRational>> {
    let n = spec.num_vars();
    prop::collection::vec((prop::collection::vec(0u16..3, n), -6i64..7, 1i64..4), 0..5).prop_map(move |terms| {
        Polynomial::from_terms(
            spec.clone(),
            terms
                .into_iter()
                .map(|(e, a, b)| (Monomial::from_exponents(e), BigRational::new(a.into(), b.into())))
                .collect::<Vec<_>>(),
        )
    })
}

fn spec_and_polys() -> impl Strategy<Value = (Arc<FormSpec>, Polynomial<BigRational>, Polynomial<BigRational>)> {
    spec_strategy().prop_flat_map(|s| (Just(s.clone()), poly_strategy(s.clone()), poly_strategy(s)))
}

fn homogeneous(spec: Arc<FormSpec>) -> impl Strategy<Value = Polynomial<BigRational>> {
    // A single term is always multihomogeneous.
    let n = spec.num_vars();
    (prop::collection::vec(0u16..3, n), 1i64..9).prop_map(move |(e, c)| {
        Polynomial::from_terms(spec.clone(), [(Monomial::from_exponents(e), BigRational::from_integer(c.into()))])
    })
}

/// Gaussian binomial from the product formula, by exact division.
fn qbinomial_by_division(a: u32, b: u32) -> Vec<BigInt> {
    let mul = |p: &[BigInt], q: &[BigInt]| {
        let mut out = vec![BigInt::zero(); p.len() + q.len() - 1];
        for (i, x) in p.iter().enumerate() {
            for (j, y) in q.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    };
    let one_minus = |k: u32| {
        let mut v = vec![BigInt::zero(); k as usize + 1];
        v[0] = BigInt::one();
        v[k as usize] -= 1;
        v
    };
    let mut num = vec![BigInt::one()];
    let mut den = vec![BigInt::one()];
    for i in 0..b {
        num = mul(&num, &one_minus(a - i));
        den = mul(&den, &one_minus(i + 1));
    }
    // Long division by a monic-at-zero polynomial.
    let qlen = num.len() - den.len() + 1;
    let mut quo = vec![BigInt::zero(); qlen];
    let mut rem = num;
    for i in 0..qlen {
        let c = rem[i].clone();
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= &c * d;
        }
        quo[i] = c;
    }
    assert!(rem.iter().all(|x| x.is_zero()));
    quo
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leibniz_rule((spec, p, q) in spec_and_polys()) {
        let d = DerivationSpec::new(spec);
        let lhs = d.apply_lowering(&p.mul(&q).unwrap());
        let rhs = d.apply_lowering(&p).mul(&q).unwrap().add(&p.mul(&d.apply_lowering(&q)).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn commutator_is_weight_on_variables(spec in spec_strategy()) {
        let d = DerivationSpec::new(spec.clone());
        for v in spec.variables() {
            let x = Polynomial::<BigRational>::variable(spec.clone(), v).unwrap();
            let de = d.apply_lowering(&d.apply_raising(&x));
            let ed = d.apply_raising(&d.apply_lowering(&x));
            let w = BigRational::from_integer(spec.weight_of(v).unwrap().into());
            prop_assert_eq!(de.sub(&ed).unwrap(), x.scale(&w));
        }
    }

    #[test]
    fn grading_is_additive(
        (p, q) in spec_strategy().prop_flat_map(|s| (homogeneous(s.clone()), homogeneous(s)))
    ) {
        let (mp, wp) = p.homogeneous_key().unwrap();
        let (mq, wq) = q.homogeneous_key().unwrap();
        prop_assert_eq!(p.mul(&q).unwrap().homogeneous_key(), Some((mp.add(&mq), wp + wq)));
    }

    #[test]
    fn derivation_shifts_weight_by_two(p in spec_strategy().prop_flat_map(homogeneous)) {
        let d = DerivationSpec::new(p.spec().clone());
        let (m, w) = p.homogeneous_key().unwrap();
        let dp = d.apply_lowering(&p);
        prop_assert!(dp.is_zero() || dp.homogeneous_key() == Some((m, w + 2)));
    }

    #[test]
    fn normalization_is_idempotent_and_scale_free((_, p, _) in spec_and_polys(), a in 1i64..20, b in 1i64..20) {
        prop_assume!(!p.is_zero());
        let n = p.primitive_normalize().unwrap();
        prop_assert!(n.is_integral());
        prop_assert_eq!(n.primitive_normalize().unwrap(), n.clone());
        let scaled = p.scale(&BigRational::new((-a).into(), b.into()));
        prop_assert_eq!(scaled.primitive_normalize().unwrap(), n);
    }

    #[test]
    fn addition_cancels((_, p, q) in spec_and_polys()) {
        prop_assert_eq!(p.add(&q).unwrap().sub(&q).unwrap(), p);
    }

    #[test]
    fn component_monomials_match_brute_force(spec in spec_strategy(), parts in prop::collection::vec(0u32..3, 3), j in 0u32..6) {
        let m = Multidegree::new(parts[..spec.num_forms()].to_vec());
        let key = ComponentKey::new(m.clone(), j);
        let listed = component_monomials(&spec, &key).unwrap();
        // Every product of per-form monomials of the right degree, filtered by weight.
        let mut brute = vec![Monomial::one(spec.num_vars())];
        for f in 0..spec.num_forms() {
            let range = spec.form_range(f);
            let parts = Multidegree::compositions(range.len(), m.parts()[f]);
            let mut next = Vec::new();
            for b in &brute {
                for c in &parts {
                    let mut e = b.exponents().to_vec();
                    for (k, &x) in c.parts().iter().enumerate() {
                        e[range.start + k] = x as u16;
                    }
                    next.push(Monomial::from_exponents(e));
                }
            }
            brute = next;
        }
        brute.retain(|x| x.weight(&spec).unwrap() == j as i64);
        let mut listed_sorted = listed.clone();
        listed_sorted.sort();
        brute.sort();
        prop_assert_eq!(listed_sorted, brute);
    }

    #[test]
    fn qbinomial_matches_product_formula(a in 0u32..14, b in 0u32..14) {
        prop_assume!(b <= a);
        let q = qbinomial(a, b).unwrap();
        prop_assert_eq!(&q, &qbinomial_by_division(a, b));
        prop_assert_eq!(&q, &qbinomial(a, a - b).unwrap());
        let mut rev = q.clone();
        rev.reverse();
        prop_assert_eq!(rev, q);
    }

    #[test]
    fn planted_rational_forms_are_recovered(
        num in prop::collection::vec(-3i64..4, 1..4),
        factors in prop::collection::vec(1u32..6, 1..4),
    ) {
        let mut num: Vec<BigInt> = num.into_iter().map(BigInt::from).collect();
        num[0] = BigInt::one();
        let mut den = vec![BigInt::one()];
        for &a in &factors {
            let mut next = vec![BigInt::zero(); den.len() + a as usize];
            for (i, c) in den.iter().enumerate() {
                next[i] += c;
                next[i + a as usize] -= c;
            }
            den = next;
        }
        let len = 2 * (num.len() + den.len()) + 20;
        let mut coeffs: Vec<BigInt> = Vec::with_capacity(len);
        for i in 0..len {
            let mut c = num.get(i).cloned().unwrap_or_default();
            for j in 1..den.len().min(i + 1) {
                c -= &den[j] * &coeffs[i - j];
            }
            coeffs.push(c);
        }
        let r = rational_reconstruct(&UnivariateSeries::new(coeffs.clone())).unwrap();
        prop_assert_eq!(r.expand(len - 1), coeffs);
        prop_assert!(r.beta() < den.len());
    }

    #[test]
    fn univariate_series_agrees_with_table(spec in spec_strategy(), semi in any::<bool>()) {
        let mode = if semi { Mode::Semi } else { Mode::Invariants };
        let cap = 7;
        let table = poincare_table(&spec, mode, cap).unwrap();
        prop_assert_eq!(univariate_series(&spec, mode, cap), collapse_by_degree(&table, cap));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_dimension_matches_count(spec in spec_strategy(), parts in prop::collection::vec(0u32..4, 3), j in 0u32..8) {
        let m = Multidegree::new(parts[..spec.num_forms()].to_vec());
        prop_assume!(m.total() > 0 && m.total() <= 6);
        let key = ComponentKey::new(m, j);
        let want = cell_dim(&spec, &key);
        let d = DerivationSpec::new(spec.clone());
        let cell = Cell::Component(key);
        let basis = kernel_cell_basis(&d, &cell).unwrap();
        prop_assert_eq!(basis.basis.len() as u64, want);
        prop_assert_eq!(kernel_dim_modp(&d, &cell).unwrap() as u64, want);
        for b in &basis.basis {
            prop_assert!(d.apply_lowering(b).is_zero());
        }
    }

    #[test]
    fn strategies_and_workers_agree(d in prop::collection::vec(1u32..=3, 1..=3), workers in 1usize..4) {
        let spec = Arc::new(FormSpec::new(d).unwrap());
        let opts = |w| GenOptions { max_degree: Some(6), workers: w, ..GenOptions::default() };
        let a = minimal_generating_set(spec.clone(), RunMode::Invariants, RunStrategy::Multidegree, &opts(1), &Silent).unwrap();
        let b = minimal_generating_set(spec.clone(), RunMode::Invariants, RunStrategy::TotalDegree, &opts(1), &Silent).unwrap();
        let c = minimal_generating_set(spec, RunMode::Invariants, RunStrategy::Multidegree, &opts(workers), &Silent).unwrap();
        prop_assert_eq!(a.counts(), b.counts());
        prop_assert_eq!(&a.records, &c.records);
    }
}
