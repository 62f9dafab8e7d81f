//! Versioned JSON schema for generating sets.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use forge_core::{FormSpec, GeneratingSet, Monomial, Polynomial, Variable};
use num_rational::BigRational;
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub schema: u32,
    pub degrees: Vec<u32>,
    pub mode: String,
    pub strategy: String,
    pub cap_used: u32,
    pub beta: Option<usize>,
    pub generators: Vec<GeneratorJson>,
    pub counts: BTreeMap<u32, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub multidegree: Vec<u32>,
    pub order: u32,
    pub total_degree: u32,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub exponents: Exponents,
}

/// `"f:i" -> e` pairs in variable order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Exponents(pub Vec<(Variable, u16)>);

impl Serialize for Exponents {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (v, e) in &self.0 {
            map.serialize_entry(&format!("{}:{}", v.form, v.index), e)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Exponents {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Exponents;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from \"form:index\" to an exponent")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Exponents, A::Error> {
                let mut out = Vec::new();
                while let Some((k, e)) = map.next_entry::<String, u16>()? {
                    let (f, i) = k
                        .split_once(':')
                        .and_then(|(f, i)| Some((f.parse().ok()?, i.parse().ok()?)))
                        .ok_or_else(|| serde::de::Error::custom(format!("bad variable key {k:?}")))?;
                    out.push((Variable::new(f, i), e));
                }
                Ok(Exponents(out))
            }
        }
        d.deserialize_map(V)
    }
}

impl GeneratorJson {
    pub fn from_polynomial(p: &Polynomial<BigRational>, order: u32) -> Option<Self> {
        let (md, _) = p.homogeneous_key()?;
        let spec = p.spec();
        Some(GeneratorJson {
            total_degree: md.total(),
            multidegree: md.parts().to_vec(),
            order,
            terms: p
                .terms()
                .map(|(m, c)| TermJson {
                    coeff: c.to_string(),
                    exponents: Exponents(m.support().map(|(flat, e)| (spec.variable(flat), e)).collect()),
                })
                .collect(),
        })
    }

    pub fn polynomial(&self, spec: &Arc<FormSpec>) -> Result<Polynomial<BigRational>, String> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let c = BigRational::from_str(&t.coeff).map_err(|e| format!("bad coefficient {:?}: {e}", t.coeff))?;
            let m = Monomial::from_pairs(spec, &t.exponents.0).map_err(|e| e.to_string())?;
            terms.push((m, c));
        }
        Ok(Polynomial::from_terms(spec.clone(), terms))
    }
}

impl Document {
    pub fn from_set(set: &GeneratingSet) -> Self {
        Document {
            schema: SCHEMA_VERSION,
            degrees: set.spec.degrees().to_vec(),
            mode: set.mode.as_str().into(),
            strategy: set.strategy.as_str().into(),
            cap_used: set.cap_used,
            beta: set.beta,
            generators: set
                .records
                .iter()
                .map(|r| {
                    GeneratorJson::from_polynomial(&r.polynomial, r.order)
                        .expect("generators are homogeneous")
                })
                .collect(),
            counts: set.counts(),
        }
    }

    /// Rebuilds every generator polynomial.
    pub fn polynomials(&self) -> Result<Vec<Polynomial<BigRational>>, String> {
        let spec = Arc::new(FormSpec::new(self.degrees.clone()).map_err(|e| e.to_string())?);
        self.generators.iter().map(|g| g.polynomial(&spec)).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_keys_keep_variable_order() {
        let e = Exponents(vec![(Variable::new(0, 2), 1), (Variable::new(0, 10), 3)]);
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"0:2":1,"0:10":3}"#);
        let back: Exponents = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn bad_key_is_rejected() {
        assert!(serde_json::from_str::<Exponents>(r#"{"x":1}"#).is_err());
    }

    #[test]
    fn generator_round_trip() {
        let spec = Arc::new(FormSpec::new(vec![4]).unwrap());
        let q = |n: i64| BigRational::from_integer(n.into());
        let p = Polynomial::from_terms(
            spec.clone(),
            [
                (Monomial::from_exponents(vec![0, 0, 2, 0, 0]), q(3)),
                (Monomial::from_exponents(vec![1, 0, 0, 0, 1]), q(1)),
                (Monomial::from_exponents(vec![0, 1, 0, 1, 0]), q(-4)),
            ],
        );
        let g = GeneratorJson::from_polynomial(&p, 0).unwrap();
        assert_eq!(g.total_degree, 2);
        assert_eq!(g.terms[2].coeff, "3");
        assert_eq!(g.polynomial(&spec).unwrap(), p);
    }
}
