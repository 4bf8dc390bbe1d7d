//! JSON code documents.
//!
//! A document lists the labeled points and exactly one of
//! `kernel_generators` (integer coordinates) or `dual_generators`
//! (fractions as `"a/b"` strings), both written per point on the
//! distinguished generators of the local homology (`gamma_1` for `A_n`,
//! `E_6`, `E_7`; `gamma_n` for odd `D_n`; `gamma_1, gamma_n` for even
//! `D_n`; nothing for `E_8`). Extended documents carry a `degree` (used
//! for `d' = gcd(d, lcm m_x)`) and one `h_values` entry per dual
//! generator. Fractions are strings so nothing ever goes through floating
//! point; emission normalizes them, and emit-then-parse is the identity.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::abelian::QmodZ;
use crate::ade::{DynkinFamily, DynkinLabel, PointChar};
use crate::codes::{CodeVector, LabeledCode, SingularPoint};
use crate::{input_err, Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PointDoc {
    pub id: String,
    #[serde(rename = "type")]
    pub family: String,
    pub index: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum NumOrFrac {
    Int(i64),
    Frac(String),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Default)]
pub struct CodeDocument {
    pub points: Vec<PointDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extended: Option<bool>,
    /// One entry per generator: per point, integer coordinates on the
    /// distinguished generators.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_generators: Option<Vec<Vec<Vec<i64>>>>,
    /// One entry per generator: per point, `"a/b"` values on the
    /// distinguished generators.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_generators: Option<Vec<Vec<Vec<NumOrFrac>>>>,
    /// Hyperplane values, one per dual generator (extended codes).
    #[serde(skip_serializing_if = "Option::is_none", alias = "h_value")]
    pub h_values: Option<Vec<NumOrFrac>>,
}

fn parse_frac(v: &NumOrFrac, what: &str) -> Result<QmodZ> {
    match v {
        NumOrFrac::Int(n) => Ok(QmodZ::new(BigInt::from(*n), BigInt::one())),
        NumOrFrac::Frac(s) => {
            let err = || Error::Input(format!("{what}: cannot parse fraction {s:?}"));
            let (num, den) = match s.split_once('/') {
                Some((a, b)) => (a, b),
                None => (s.as_str(), "1"),
            };
            let num: BigInt = num.trim().parse().map_err(|_| err())?;
            let den: BigInt = den.trim().parse().map_err(|_| err())?;
            if den == BigInt::from(0) {
                return Err(err());
            }
            Ok(QmodZ::new(num, den))
        }
    }
}

fn frac_string(q: &QmodZ) -> NumOrFrac {
    NumOrFrac::Frac(format!("{}/{}", q.numer(), q.denom()))
}

fn parse_label(p: &PointDoc, i: usize) -> Result<DynkinLabel> {
    let family = match p.family.as_str() {
        "A" | "a" => DynkinFamily::A,
        "D" | "d" => DynkinFamily::D,
        "E" | "e" => DynkinFamily::E,
        other => {
            return input_err(format!(
                "points[{i}].type: expected A, D or E, got {other:?}"
            ))
        }
    };
    DynkinLabel::new(family, p.index)
        .map_err(|e| Error::Input(format!("points[{i}]: {e}")))
}

/// Reconstructs the unique character with the given values on the
/// distinguished generators (they generate, so at most one exists).
fn char_from_distinguished(
    lh: &crate::ade::LocalHomology,
    values: &[QmodZ],
    what: &str,
) -> Result<PointChar> {
    if values.len() != lh.distinguished.len() {
        return input_err(format!(
            "{what}: expected {} values (one per distinguished generator), got {}",
            lh.distinguished.len(),
            values.len()
        ));
    }
    let duals = lh.group.dual_basis();
    let factors = lh.group.invariant_factors().to_vec();
    let mut coeffs = vec![BigInt::from(0); factors.len()];
    loop {
        let chi = crate::abelian::Character {
            values: duals
                .iter()
                .zip(&coeffs)
                .map(|(d, c)| d.values.iter().map(|v| v.scale(c)).collect::<Vec<_>>())
                .fold(vec![QmodZ::zero(); factors.len()], |acc, term| {
                    acc.iter().zip(&term).map(|(a, t)| a.add(t)).collect()
                }),
        };
        let ok = lh
            .distinguished
            .iter()
            .zip(values)
            .all(|(&v, want)| lh.group.eval_character(&chi, lh.gamma_of(v)) == *want);
        if ok {
            return Ok(lh.char_values(&chi));
        }
        let mut i = 0;
        loop {
            if i == factors.len() {
                return input_err(format!(
                    "{what}: no character takes these values on the distinguished generators"
                ));
            }
            coeffs[i] += 1;
            if coeffs[i] < BigInt::from(factors[i].clone()) {
                break;
            }
            coeffs[i] = BigInt::from(0);
            i += 1;
        }
    }
}

/// Builds the code described by a document. Returns the code and the
/// declared degree, if any.
pub fn from_document(doc: &CodeDocument) -> Result<(LabeledCode, Option<u64>)> {
    let mut points = Vec::new();
    for (i, p) in doc.points.iter().enumerate() {
        points.push(SingularPoint {
            id: p.id.clone(),
            label: parse_label(p, i)?,
        });
    }
    let extended = doc.extended.unwrap_or(false);
    let h_modulus = if extended {
        let Some(d) = doc.degree else {
            return input_err("extended documents need a degree to determine d'");
        };
        let mut m = BigUint::one();
        for p in &points {
            let lh = crate::ade::local_homology(&crate::ade::DynkinConfig::new(p.label));
            m = m.lcm(&lh.group.exponent());
        }
        Some(BigUint::from(d).gcd(&m))
    } else {
        if doc.h_values.is_some() {
            return input_err("h_values requires \"extended\": true");
        }
        None
    };

    let locals: Vec<crate::ade::LocalHomology> = points
        .iter()
        .map(|p| crate::ade::local_homology(&crate::ade::DynkinConfig::new(p.label)))
        .collect();

    match (&doc.kernel_generators, &doc.dual_generators) {
        (Some(_), Some(_)) | (None, None) => {
            input_err("exactly one of kernel_generators and dual_generators is required")
        }
        (Some(kernel), None) => {
            if doc.h_values.is_some() {
                return input_err("h_values only accompany dual_generators");
            }
            let total: usize = points.iter().map(|p| p.label.vertex_count()).sum();
            let ambient = total + usize::from(h_modulus.is_some());
            let mut gens = Vec::new();
            for (gi, g) in kernel.iter().enumerate() {
                if g.len() != points.len() {
                    return input_err(format!(
                        "kernel_generators[{gi}]: expected {} point entries, got {}",
                        points.len(),
                        g.len()
                    ));
                }
                let mut ambient_vec = vec![BigInt::from(0); ambient];
                let mut off = 0usize;
                for ((pi, coeffs), lh) in g.iter().enumerate().zip(&locals) {
                    if coeffs.len() != lh.distinguished.len() {
                        return input_err(format!(
                            "kernel_generators[{gi}][{pi}]: expected {} coordinates, got {}",
                            lh.distinguished.len(),
                            coeffs.len()
                        ));
                    }
                    for (&c, &v) in coeffs.iter().zip(&lh.distinguished) {
                        ambient_vec[off + v - 1] += BigInt::from(c);
                    }
                    off += points[pi].label.vertex_count();
                }
                gens.push(ambient_vec);
            }
            let code = LabeledCode::from_kernel_gamma(points, &gens, h_modulus)?;
            Ok((code, doc.degree))
        }
        (None, Some(duals)) => {
            if let Some(h) = &doc.h_values {
                if h.len() != duals.len() {
                    return input_err("h_values must have one entry per dual generator");
                }
            }
            let mut gens = Vec::new();
            for (gi, g) in duals.iter().enumerate() {
                if g.len() != points.len() {
                    return input_err(format!(
                        "dual_generators[{gi}]: expected {} point entries, got {}",
                        points.len(),
                        g.len()
                    ));
                }
                let mut chars = Vec::new();
                for ((pi, vals), lh) in g.iter().enumerate().zip(&locals) {
                    let what = format!("dual_generators[{gi}][{pi}]");
                    let parsed: Vec<QmodZ> = vals
                        .iter()
                        .map(|v| parse_frac(v, &what))
                        .collect::<Result<_>>()?;
                    chars.push(char_from_distinguished(lh, &parsed, &what)?);
                }
                let h_value = match (&h_modulus, &doc.h_values) {
                    (Some(_), Some(hs)) => Some(parse_frac(&hs[gi], &format!("h_values[{gi}]"))?),
                    (Some(_), None) => Some(QmodZ::zero()),
                    (None, _) => None,
                };
                gens.push(CodeVector { chars, h_value });
            }
            let code = LabeledCode::from_dual(points, gens, h_modulus)?;
            Ok((code, doc.degree))
        }
    }
}

/// Emits a code as a document (always on the dual side, normalized).
pub fn to_document(code: &LabeledCode, degree: Option<u64>) -> CodeDocument {
    let points = code
        .points()
        .iter()
        .map(|p| PointDoc {
            id: p.id.clone(),
            family: p.label.family.to_string(),
            index: p.label.index,
        })
        .collect();
    let mut dual = Vec::new();
    let mut h_values = Vec::new();
    for g in code.dual_generators() {
        let per_point: Vec<Vec<NumOrFrac>> = code
            .local()
            .iter()
            .zip(&g.chars)
            .map(|(lh, pc)| {
                lh.distinguished
                    .iter()
                    .map(|&v| frac_string(pc.value(v)))
                    .collect()
            })
            .collect();
        dual.push(per_point);
        if let Some(h) = &g.h_value {
            h_values.push(frac_string(h));
        }
    }
    CodeDocument {
        points,
        degree,
        extended: code.is_extended().then_some(true),
        kernel_generators: None,
        dual_generators: Some(dual),
        h_values: code.is_extended().then_some(h_values),
    }
}

pub fn parse_json(text: &str) -> Result<CodeDocument> {
    serde_json::from_str(text).map_err(|e| {
        Error::Input(format!(
            "JSON parse error at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

pub fn to_json(doc: &CodeDocument) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn parse_a_kernel_document() {
        let text = r#"{
            "points": [
                {"id": "p1", "type": "A", "index": 1},
                {"id": "p2", "type": "A", "index": 1}
            ],
            "kernel_generators": [[[1], [1]]]
        }"#;
        let doc = parse_json(text).unwrap();
        let (code, _) = from_document(&doc).unwrap();
        assert_eq!(code.k_order(), BigUint::from(2u32));
    }

    #[test]
    fn parse_a_dual_document_with_fractions() {
        let text = r#"{
            "points": [{"id": "x", "type": "A", "index": 2}],
            "dual_generators": [[["1/3"]]]
        }"#;
        let doc = parse_json(text).unwrap();
        let (code, _) = from_document(&doc).unwrap();
        assert_eq!(code.k_order(), BigUint::from(3u32));
        // The stored generator expands to the full gamma tuple (1/3, 2/3).
        let g = &code.dual_generators()[0].chars[0];
        assert_eq!(g.value(1), &QmodZ::new(BigInt::from(1), BigInt::from(3)));
        assert_eq!(g.value(2), &QmodZ::new(BigInt::from(2), BigInt::from(3)));
    }

    #[test]
    fn errors_carry_field_context() {
        let text = r#"{"points": [{"id": "x", "type": "Q", "index": 2}],
                       "dual_generators": [[["1/3"]]]}"#;
        let err = from_document(&parse_json(text).unwrap()).unwrap_err();
        assert!(err.to_string().contains("points[0]"));

        let text = r#"{"points": [{"id": "x", "type": "A", "index": 2}],
                       "dual_generators": [[["1/5"]]]}"#;
        let err = from_document(&parse_json(text).unwrap()).unwrap_err();
        assert!(err.to_string().contains("dual_generators[0][0]"));

        let text = r#"{"points": [{"id": "x", "type": "A", "index": 2}]}"#;
        let err = from_document(&parse_json(text).unwrap()).unwrap_err();
        assert!(err.to_string().contains("exactly one"));
    }

    #[test]
    fn catalog_codes_round_trip() {
        use num_traits::ToPrimitive;
        for name in catalog::names() {
            let e = catalog::get(name).unwrap();
            let deg = e.context.degree.as_ref().and_then(|d| d.to_u64());
            for code in [Some(&e.strict), e.extended.as_ref()] {
                let Some(code) = code else { continue };
                let doc = to_document(code, deg);
                let json = to_json(&doc);
                let doc2 = parse_json(&json).unwrap();
                assert_eq!(doc, doc2, "{name}: emit/parse document identity");
                let (code2, _) = from_document(&doc2).unwrap();
                assert_eq!(code.h1(), code2.h1(), "{name}: group survives");
                assert_eq!(
                    crate::codes::equivalent(code, &code2).unwrap().is_some(),
                    true,
                    "{name}: code survives"
                );
                // Emit again: byte-identical.
                let json2 = to_json(&to_document(&code2, deg));
                assert_eq!(json, json2, "{name}: byte-stable emission");
            }
        }
    }

    #[test]
    fn d_even_distinguished_pair() {
        // Even D labels carry two distinguished generators.
        let text = r#"{
            "points": [{"id": "d", "type": "D", "index": 4}],
            "dual_generators": [[["1/2", "0/1"]]]
        }"#;
        let (code, _) = from_document(&parse_json(text).unwrap()).unwrap();
        assert_eq!(code.k_order(), BigUint::from(2u32));
        let g = &code.dual_generators()[0].chars[0];
        assert_eq!(g.value(1), &QmodZ::new(BigInt::from(1), BigInt::from(2)));
        assert!(g.value(4).is_zero());
    }
}
