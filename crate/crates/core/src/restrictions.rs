//! Weight divisibility restrictions for code vectors of a surface.
//!
//! Each rule takes a vector of a specific prime order together with the
//! numerical context of the surface and reports pass/fail with the computed
//! residue. Rules that simply do not apply (composite order, missing
//! almost-simplicity) report `Inapplicable` — distinct from both pass and
//! fail, so unchecked vectors stay visible.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::ade::{delta_independent, DynkinFamily};
use crate::codes::{CodeVector, LabeledCode};
use crate::{input_err, Result};

/// Numerical invariants of the ambient surface feeding the checkers.
///
/// For a degree-`d` hypersurface these follow from `d`; for other surfaces
/// (e.g. non-polarized K3 quotients) the fields are supplied directly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceContext {
    /// `H^2`; needed by the extended rules, optional otherwise.
    pub degree: Option<BigInt>,
    pub k_s_dot_h: BigInt,
    /// Whether the canonical class is divisible by 2 in the Picard group.
    pub k_s_even: bool,
    pub b2: u64,
    pub chi_o: BigInt,
}

impl SurfaceContext {
    /// Context of a degree-`d` surface in projective 3-space.
    pub fn hypersurface(d: u64) -> Self {
        let di = d as i64;
        SurfaceContext {
            degree: Some(BigInt::from(d)),
            k_s_dot_h: BigInt::from(di * (di - 4)),
            k_s_even: d.is_multiple_of(2),
            b2: (di * di * di - 4 * di * di + 6 * di - 2) as u64,
            chi_o: BigInt::from((di - 1) * (di - 2) * (di - 3) / 6 + 1),
        }
    }

    /// A K3 surface without a chosen polarization degree.
    pub fn k3_unpolarized() -> Self {
        SurfaceContext {
            degree: None,
            k_s_dot_h: BigInt::zero(),
            k_s_even: true,
            b2: 22,
            chi_o: BigInt::from(2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleOutcome {
    Pass,
    Fail,
    Inapplicable(String),
}

#[derive(Clone, Debug)]
pub struct RuleResult {
    pub rule: String,
    pub outcome: RuleOutcome,
    pub residue: Option<BigInt>,
    pub modulus: Option<BigInt>,
    pub note: String,
}

impl RuleResult {
    fn decided(rule: &str, residue: BigInt, modulus: BigInt, note: impl Into<String>) -> Self {
        let outcome = if residue.mod_floor(&modulus).is_zero() {
            RuleOutcome::Pass
        } else {
            RuleOutcome::Fail
        };
        RuleResult {
            rule: rule.to_string(),
            outcome,
            residue: Some(residue),
            modulus: Some(modulus),
            note: note.into(),
        }
    }

    fn inapplicable(rule: &str, why: impl Into<String>) -> Self {
        let why = why.into();
        RuleResult {
            rule: rule.to_string(),
            outcome: RuleOutcome::Inapplicable(why.clone()),
            residue: None,
            modulus: None,
            note: why,
        }
    }

    fn fail_with(rule: &str, note: impl Into<String>) -> Self {
        RuleResult {
            rule: rule.to_string(),
            outcome: RuleOutcome::Fail,
            residue: None,
            modulus: None,
            note: note.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.outcome == RuleOutcome::Pass
    }
}

impl fmt::Display for RuleResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let state = match &self.outcome {
            RuleOutcome::Pass => "pass",
            RuleOutcome::Fail => "FAIL",
            RuleOutcome::Inapplicable(_) => "n/a",
        };
        write!(f, "{:<14} {state}", self.rule)?;
        if let (Some(r), Some(m)) = (&self.residue, &self.modulus) {
            write!(f, "  residue {r} mod {m}")?;
        }
        if !self.note.is_empty() {
            write!(f, "  ({})", self.note)?;
        }
        Ok(())
    }
}

/// The order-2 weighted sum: `sum_m ((m+1) t(A_{2m+1}) + m t(D_{2m},+))
/// + 2 t(D,-) + 3 t(E_7)`.
fn n2_weighted_sum(code: &LabeledCode, v: &CodeVector) -> BigInt {
    let w = code.weights(v);
    let t = w.t2.expect("order-2 vector has tallies");
    let mut acc = BigInt::zero();
    for (m, c) in &t.a_odd {
        acc += BigInt::from((m + 1) * c);
    }
    for (m, c) in &t.d_plus {
        acc += BigInt::from(m * c);
    }
    acc += BigInt::from(2 * t.d_minus);
    acc += BigInt::from(3 * t.e7);
    acc
}

/// The order-3 signed sum `sum_s s t(A_{3s-1}) - t(E_6)`.
fn n3_weighted_sum(code: &LabeledCode, v: &CodeVector) -> BigInt {
    let w = code.weights(v);
    let t = w.t3.expect("order-3 vector has tallies");
    let mut acc = BigInt::zero();
    for (s, c) in &t.a {
        acc += BigInt::from(s * c);
    }
    acc - BigInt::from(t.e6)
}

fn require_order(v: &CodeVector, n: u64) -> Result<()> {
    if v.order() != BigUint::from(n) {
        return input_err(format!("rule needs a vector of order {n}, got {}", v.order()));
    }
    Ok(())
}

fn require_strict(v: &CodeVector) -> Result<()> {
    if !v.is_strict() {
        return input_err("rule applies to strict vectors; use the extended variant");
    }
    Ok(())
}

/// Order-2 rule: the weighted sum must vanish mod 4, and mod 8 when the
/// canonical class is divisible by 2.
pub fn check_n2(code: &LabeledCode, v: &CodeVector, ctx: &SurfaceContext) -> Result<RuleResult> {
    require_order(v, 2)?;
    require_strict(v)?;
    let residue = n2_weighted_sum(code, v);
    let modulus = if ctx.k_s_even { 8 } else { 4 };
    Ok(RuleResult::decided("N=2", residue, BigInt::from(modulus), ""))
}

/// Order-3 rule: `sum_s s t(A_{3s-1}) - t(E_6)` vanishes mod 3.
pub fn check_n3(code: &LabeledCode, v: &CodeVector, _ctx: &SurfaceContext) -> Result<RuleResult> {
    require_order(v, 3)?;
    require_strict(v)?;
    let residue = n3_weighted_sum(code, v);
    Ok(RuleResult::decided("N=3", residue, BigInt::from(3), ""))
}

/// Order-5 rule on refined weights: the values 1, 4 count +1 and the
/// values 2, 3 count -1 on `A_{5s-1}` points; the signed total vanishes
/// mod 5.
pub fn check_n5(code: &LabeledCode, v: &CodeVector, _ctx: &SurfaceContext) -> Result<RuleResult> {
    require_order(v, 5)?;
    require_strict(v)?;
    let mut acc = BigInt::zero();
    for (p, chi) in code.points().iter().zip(&v.chars) {
        if chi.is_zero() {
            continue;
        }
        debug_assert!(p.label.family == DynkinFamily::A && (p.label.index + 1) % 5 == 0);
        let val = chi.value(1);
        let five = BigInt::from(5);
        debug_assert_eq!(*val.denom(), five);
        let k = val.numer().mod_floor(&five);
        if k == BigInt::one() || k == BigInt::from(4) {
            acc += 1;
        } else {
            acc -= 1;
        }
    }
    Ok(RuleResult::decided("N=5", acc, BigInt::from(5), ""))
}

/// Almost-simple rule for prime-power order above 4:
/// `sum_s s t(A_{Ns-1})` vanishes mod N. Composite non-prime-power orders
/// and vectors that are not almost simple are inapplicable.
pub fn check_ngt3(code: &LabeledCode, v: &CodeVector, _ctx: &SurfaceContext) -> Result<RuleResult> {
    let order = v.order();
    if order <= BigUint::from(4u32) {
        return input_err("rule needs order > 4");
    }
    require_strict(v)?;
    if !is_prime_power(&order) {
        return Ok(RuleResult::inapplicable(
            "N>4",
            format!("order {order} is not a prime power; check its primary parts"),
        ));
    }
    let w = code.weights(v);
    if !w.almost_simple {
        return Ok(RuleResult::inapplicable("N>4", "vector is not almost simple"));
    }
    let n_big = BigInt::from(order.clone());
    let mut acc = BigInt::zero();
    for (label, count) in &w.label_weights {
        debug_assert_eq!(label.family, DynkinFamily::A);
        let np1 = BigUint::from(label.index as u64 + 1);
        debug_assert!(np1.is_multiple_of(&order));
        let s = np1 / &order;
        acc += BigInt::from(s) * BigInt::from(*count);
    }
    Ok(RuleResult::decided("N>4", acc, n_big, ""))
}

/// Extended order-2 rule: the weighted sum minus `d/2 + K_S·H` vanishes
/// mod 4; an odd degree cannot carry an order-2 hyperplane value at all.
pub fn check_extended_n2(
    code: &LabeledCode,
    v: &CodeVector,
    ctx: &SurfaceContext,
) -> Result<RuleResult> {
    require_order(v, 2)?;
    if v.is_strict() {
        return input_err("vector is strict; use the strict order-2 rule");
    }
    let Some(d) = &ctx.degree else {
        return input_err("extended rules need the polarization degree");
    };
    if d.is_odd() {
        return Ok(RuleResult::fail_with(
            "N=2 ext",
            "degree is odd: 2 does not divide d', no order-2 hyperplane value exists",
        ));
    }
    let residue = n2_weighted_sum(code, v) - d / 2 - &ctx.k_s_dot_h;
    Ok(RuleResult::decided("N=2 ext", residue, BigInt::from(4), ""))
}

/// Extended order-3 rule: requires `3 | d`, and the signed sum plus
/// `d/3 + eps K_S·H` vanishes mod 3, with `eps` read off the hyperplane
/// value.
pub fn check_extended_n3(
    code: &LabeledCode,
    v: &CodeVector,
    ctx: &SurfaceContext,
) -> Result<RuleResult> {
    require_order(v, 3)?;
    if v.is_strict() {
        return input_err("vector is strict; use the strict order-3 rule");
    }
    let Some(d) = &ctx.degree else {
        return input_err("extended rules need the polarization degree");
    };
    if !d.is_multiple_of(&BigInt::from(3)) {
        return Ok(RuleResult::fail_with(
            "N=3 ext",
            "degree is not divisible by 3",
        ));
    }
    let h = v.h_value.as_ref().expect("extended vector");
    let eps = if *h == crate::abelian::QmodZ::new(BigInt::one(), BigInt::from(3)) {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    let residue = n3_weighted_sum(code, v) + d / 3 + eps * &ctx.k_s_dot_h;
    Ok(RuleResult::decided("N=3 ext", residue, BigInt::from(3), ""))
}

/// The binary dimension bound: `dim K[2] >= sum_x delta_x - floor(b_2/2)`.
#[derive(Clone, Debug)]
pub struct BInequality {
    pub k2_dim: usize,
    pub lower_bound: BigInt,
    pub pass: bool,
}

impl fmt::Display for BInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k[2] = {} >= {}: {}",
            self.k2_dim,
            self.lower_bound,
            if self.pass { "pass" } else { "FAIL" }
        )
    }
}

pub fn b_inequality(code: &LabeledCode, ctx: &SurfaceContext) -> Result<BInequality> {
    if code.is_extended() {
        return input_err("the dimension bound applies to the strict code");
    }
    let k2_dim = code.k2_dimension();
    let sum_delta: u64 = code
        .configs()
        .iter()
        .map(|c| delta_independent(c) as u64)
        .sum();
    let lower_bound = BigInt::from(sum_delta) - BigInt::from(ctx.b2 / 2);
    let pass = BigInt::from(k2_dim as u64) >= lower_bound;
    Ok(BInequality {
        k2_dim,
        lower_bound,
        pass,
    })
}

/// One checked multiple of a vector inside a [`RestrictionReport`].
#[derive(Clone, Debug)]
pub struct ReportEntry {
    /// The multiplier applied to the original vector.
    pub scale: BigUint,
    /// Order of the scaled vector.
    pub order: BigUint,
    pub strict: bool,
    pub result: RuleResult,
}

#[derive(Clone, Debug, Default)]
pub struct RestrictionReport {
    pub entries: Vec<ReportEntry>,
}

impl RestrictionReport {
    pub fn passed(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.result.outcome != RuleOutcome::Fail)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.entries
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "scale": e.scale.to_string(),
                        "order": e.order.to_string(),
                        "strict": e.strict,
                        "rule": e.result.rule,
                        "outcome": match &e.result.outcome {
                            RuleOutcome::Pass => "pass",
                            RuleOutcome::Fail => "fail",
                            RuleOutcome::Inapplicable(_) => "inapplicable",
                        },
                        "residue": e.result.residue.as_ref().map(BigInt::to_string),
                        "modulus": e.result.modulus.as_ref().map(BigInt::to_string),
                        "note": e.result.note,
                    })
                })
                .collect(),
        )
    }
}

/// Runs every applicable rule on a vector, reducing composite orders to
/// their prime-order multiples, and records explicitly when no rule covers
/// a multiple.
pub fn check_vector(code: &LabeledCode, v: &CodeVector, ctx: &SurfaceContext) -> Result<RestrictionReport> {
    let n = v.order();
    let mut report = RestrictionReport::default();
    if n.is_one() {
        return Ok(report);
    }
    // The vector itself, plus one multiple of prime order per prime factor.
    let mut scales = vec![BigUint::one()];
    for p in prime_factors(&n) {
        let s = &n / &p;
        if !s.is_one() && !scales.contains(&s) {
            scales.push(s);
        }
    }
    scales.sort();
    for scale in scales {
        let u = v.scale(&BigInt::from(scale.clone()));
        let order = u.order();
        let strict = u.is_strict();
        let result = match (order.to_u32_digits().first().copied().unwrap_or(0), strict) {
            (2, true) => check_n2(code, &u, ctx)?,
            (2, false) => check_extended_n2(code, &u, ctx)?,
            (3, true) => check_n3(code, &u, ctx)?,
            (3, false) => check_extended_n3(code, &u, ctx)?,
            (5, true) => check_n5(code, &u, ctx)?,
            _ if order > BigUint::from(4u32) && strict => check_ngt3(code, &u, ctx)?,
            _ => RuleResult::inapplicable(
                "none",
                format!(
                    "no applicable rule for order {order}{}",
                    if strict { "" } else { " (extended)" }
                ),
            ),
        };
        report.entries.push(ReportEntry {
            scale,
            order,
            strict,
            result,
        });
    }
    Ok(report)
}

/// Checks every nonzero vector of a code; entries are indexed by the
/// enumeration order of the code.
pub fn check_code(
    code: &LabeledCode,
    ctx: &SurfaceContext,
) -> Result<Vec<(usize, CodeVector, RestrictionReport)>> {
    let mut out = Vec::new();
    for (i, v) in code.all_vectors()?.into_iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let report = check_vector(code, &v, ctx)?;
        out.push((i, v, report));
    }
    Ok(out)
}

fn prime_factors(n: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut n = n.clone();
    let mut p = BigUint::from(2u32);
    while &p * &p <= n {
        if n.is_multiple_of(&p) {
            out.push(p.clone());
            while n.is_multiple_of(&p) {
                n /= &p;
            }
        }
        p += 1u32;
    }
    if n > BigUint::one() {
        out.push(n);
    }
    out
}

fn is_prime_power(n: &BigUint) -> bool {
    prime_factors(n).len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::QmodZ;
    use crate::ade::{
        branch_self_intersection, local_homology, DynkinConfig, DynkinLabel, PointChar,
    };
    use crate::codes::SingularPoint;
    use num_bigint::BigInt;

    fn a1_code(n: usize, support: &[usize]) -> (LabeledCode, CodeVector) {
        let points: Vec<SingularPoint> = (0..n)
            .map(|i| SingularPoint {
                id: format!("p{i}"),
                label: DynkinLabel::a(1),
            })
            .collect();
        let half = QmodZ::new(BigInt::one(), BigInt::from(2));
        let gen = CodeVector {
            chars: (0..n)
                .map(|i| PointChar {
                    values: vec![if support.contains(&i) {
                        half.clone()
                    } else {
                        QmodZ::zero()
                    }],
                })
                .collect(),
            h_value: None,
        };
        let code = LabeledCode::from_dual(points, vec![gen.clone()], None).unwrap();
        (code, gen)
    }

    #[test]
    fn n2_on_nodal_codes() {
        // Weight 8 on eight nodes passes mod 8 for even degree.
        let (code, v) = a1_code(8, &(0..8).collect::<Vec<_>>());
        let ctx = SurfaceContext::hypersurface(4);
        assert!(check_n2(&code, &v, &ctx).unwrap().passed());

        // Weight 4 passes mod 4 for the cubic.
        let (code, v) = a1_code(4, &[0, 1, 2, 3]);
        let ctx3 = SurfaceContext::hypersurface(3);
        assert!(check_n2(&code, &v, &ctx3).unwrap().passed());

        // Weight 2 fails.
        let (code, v) = a1_code(2, &[0, 1]);
        assert!(!check_n2(&code, &v, &ctx3).unwrap().passed());

        // Wrong order is an input error.
        let (code, _) = a1_code(2, &[0, 1]);
        assert!(check_n2(&code, &code.zero_vector(), &ctx3).is_err());
    }

    fn cusp_code(n: usize, values: &[i64]) -> (LabeledCode, CodeVector) {
        let points: Vec<SingularPoint> = (0..n)
            .map(|i| SingularPoint {
                id: format!("c{i}"),
                label: DynkinLabel::a(2),
            })
            .collect();
        let third = |a: i64| PointChar {
            values: vec![
                QmodZ::new(BigInt::from(a), BigInt::from(3)),
                QmodZ::new(BigInt::from(2 * a), BigInt::from(3)),
            ],
        };
        let gen = CodeVector {
            chars: values.iter().map(|&a| third(a)).collect(),
            h_value: None,
        };
        let code = LabeledCode::from_dual(points, vec![gen.clone()], None).unwrap();
        (code, gen)
    }

    #[test]
    fn n3_on_cusp_codes() {
        let ctx = SurfaceContext::hypersurface(3);
        let (code, v) = cusp_code(3, &[1, 1, 1]);
        assert!(check_n3(&code, &v, &ctx).unwrap().passed());

        let (code, v) = cusp_code(9, &[1; 9]);
        assert!(check_n3(&code, &v, &ctx).unwrap().passed());

        // A single E_6 point: residue -1 fails.
        let points = vec![SingularPoint {
            id: "e".into(),
            label: DynkinLabel::e(6),
        }];
        let code = crate::codes::LabeledCode::from_kernel_gamma(points, &[], None).unwrap();
        let v = code
            .all_vectors()
            .unwrap()
            .into_iter()
            .find(|v| !v.is_zero())
            .unwrap();
        assert!(!check_n3(&code, &v, &ctx).unwrap().passed());
    }

    fn a4_code(values: &[i64]) -> (LabeledCode, CodeVector) {
        let points: Vec<SingularPoint> = (0..values.len())
            .map(|i| SingularPoint {
                id: format!("q{i}"),
                label: DynkinLabel::a(4),
            })
            .collect();
        let fifth = |a: i64| PointChar {
            values: (1..=4)
                .map(|j| QmodZ::new(BigInt::from(a * j), BigInt::from(5)))
                .collect(),
        };
        let gen = CodeVector {
            chars: values.iter().map(|&a| fifth(a)).collect(),
            h_value: None,
        };
        let code = LabeledCode::from_dual(points, vec![gen.clone()], None).unwrap();
        (code, gen)
    }

    #[test]
    fn n5_signed_counts() {
        let ctx = SurfaceContext::hypersurface(5);
        let (code, v) = a4_code(&[1, 1, 1, 1, 1]);
        assert!(check_n5(&code, &v, &ctx).unwrap().passed());

        // 1 and 2 cancel.
        let (code, v) = a4_code(&[1, 2]);
        assert!(check_n5(&code, &v, &ctx).unwrap().passed());

        let (code, v) = a4_code(&[1]);
        assert!(!check_n5(&code, &v, &ctx).unwrap().passed());
    }

    fn a6_code(values: &[i64]) -> (LabeledCode, CodeVector) {
        let points: Vec<SingularPoint> = (0..values.len())
            .map(|i| SingularPoint {
                id: format!("q{i}"),
                label: DynkinLabel::a(6),
            })
            .collect();
        let seventh = |a: i64| PointChar {
            values: (1..=6)
                .map(|j| QmodZ::new(BigInt::from(a * j), BigInt::from(7)))
                .collect(),
        };
        let gen = CodeVector {
            chars: values.iter().map(|&a| seventh(a)).collect(),
            h_value: None,
        };
        let code = LabeledCode::from_dual(points, vec![gen.clone()], None).unwrap();
        (code, gen)
    }

    #[test]
    fn ngt3_rule() {
        let ctx = SurfaceContext::hypersurface(7);
        let (code, v) = a6_code(&[1; 7]);
        assert!(check_ngt3(&code, &v, &ctx).unwrap().passed());

        let (code, v) = a6_code(&[1]);
        let r = check_ngt3(&code, &v, &ctx).unwrap();
        assert_eq!(r.outcome, RuleOutcome::Fail);

        // Not almost simple: a value of 2/7 on one point.
        let (code, v) = a6_code(&[1, 2, 1, 1, 1, 1, 1]);
        let r = check_ngt3(&code, &v, &ctx).unwrap();
        assert!(matches!(r.outcome, RuleOutcome::Inapplicable(_)));

        // Order <= 4 is an input error.
        let points = vec![SingularPoint {
            id: "x".into(),
            label: DynkinLabel::a(3),
        }];
        let quarter = CodeVector {
            chars: vec![PointChar {
                values: (1..=3)
                    .map(|j| QmodZ::new(BigInt::from(j), BigInt::from(4)))
                    .collect(),
            }],
            h_value: None,
        };
        let code = LabeledCode::from_dual(points, vec![quarter.clone()], None).unwrap();
        assert!(check_ngt3(&code, &quarter, &ctx).is_err());
    }

    #[test]
    fn ngt3_composite_orders_are_inapplicable() {
        // Order 6 is above 4 but not a prime power: the rule declines and
        // points at the primary parts.
        let points = vec![SingularPoint {
            id: "z".into(),
            label: DynkinLabel::a(5),
        }];
        let code = crate::codes::LabeledCode::from_kernel_gamma(points, &[], None).unwrap();
        let v = code
            .all_vectors()
            .unwrap()
            .into_iter()
            .find(|v| v.order() == BigUint::from(6u32))
            .unwrap();
        let ctx = SurfaceContext::hypersurface(3);
        let r = check_ngt3(&code, &v, &ctx).unwrap();
        assert!(matches!(r.outcome, RuleOutcome::Inapplicable(_)));
        assert!(r.note.contains("primary"));
    }

    #[test]
    fn order_25_report_is_honest() {
        // A_24 has local group Z/25; a character with value 2/25 on the
        // generator is not almost simple, so the order-25 level carries no
        // rule, while its fifth multiple is checked at order 5.
        let points = vec![SingularPoint {
            id: "z".into(),
            label: DynkinLabel::a(24),
        }];
        let gen = CodeVector {
            chars: vec![PointChar {
                values: (1..=24)
                    .map(|j| QmodZ::new(BigInt::from(2 * j), BigInt::from(25)))
                    .collect(),
            }],
            h_value: None,
        };
        let code = LabeledCode::from_dual(points, vec![gen.clone()], None).unwrap();
        let ctx = SurfaceContext::hypersurface(5);
        let report = check_vector(&code, &gen, &ctx).unwrap();
        let level25 = report
            .entries
            .iter()
            .find(|e| e.order == BigUint::from(25u32))
            .unwrap();
        assert!(matches!(level25.result.outcome, RuleOutcome::Inapplicable(_)));
        let level5 = report
            .entries
            .iter()
            .find(|e| e.order == BigUint::from(5u32))
            .unwrap();
        assert_eq!(level5.result.rule, "N=5");
    }

    #[test]
    fn dispatcher_composite_orders() {
        // Order-6 full dual code on one A_5 point: the dispatcher runs an
        // order-2 and an order-3 subcheck on the multiples.
        let points = vec![SingularPoint {
            id: "z".into(),
            label: DynkinLabel::a(5),
        }];
        let code = crate::codes::LabeledCode::from_kernel_gamma(points, &[], None).unwrap();
        let v = code
            .all_vectors()
            .unwrap()
            .into_iter()
            .find(|v| v.order() == BigUint::from(6u32))
            .unwrap();
        let ctx = SurfaceContext::hypersurface(3);
        let report = check_vector(&code, &v, &ctx).unwrap();
        let orders: Vec<u64> = report
            .entries
            .iter()
            .map(|e| e.order.to_u64_digits().first().copied().unwrap_or(0))
            .collect();
        assert!(orders.contains(&2));
        assert!(orders.contains(&3));
        // The order-6 level itself has no rule.
        let six = report
            .entries
            .iter()
            .find(|e| e.order == BigUint::from(6u32))
            .unwrap();
        assert!(matches!(six.result.outcome, RuleOutcome::Inapplicable(_)));

        // Zero vector: empty report.
        let report = check_vector(&code, &code.zero_vector(), &ctx).unwrap();
        assert!(report.entries.is_empty());
    }

    #[test]
    fn b_inequality_values() {
        // Four nodes with the all-ones code: 1 >= 4 - 3 with equality.
        let (code, _) = a1_code(4, &[0, 1, 2, 3]);
        let ctx = SurfaceContext::hypersurface(3);
        let b = b_inequality(&code, &ctx).unwrap();
        assert_eq!(b.k2_dim, 1);
        assert_eq!(b.lower_bound, BigInt::from(1));
        assert!(b.pass);

        // Empty singular set: bound is nonpositive, trivially passes.
        let empty = crate::codes::LabeledCode::from_kernel_gamma(vec![], &[], None).unwrap();
        let b = b_inequality(&empty, &ctx).unwrap();
        assert!(b.pass);
        assert!(b.lower_bound <= BigInt::zero());
    }

    /// Independent derivation: branch divisor self-intersections computed
    /// from the Cartan matrix must match the classified tables, and the
    /// rule residues must match the `sum B_x^2` quantities they encode.
    #[test]
    fn residues_agree_with_branch_divisor_tables() {
        // Order 2: B_x is the reduced sum of curves with a nonzero value.
        for label in crate::ade::all_labels_up_to(9) {
            let cfg = DynkinConfig::new(label);
            let h = local_homology(&cfg);
            for chi in all_characters_of_order(&h, 2) {
                let pc = h.char_values(&chi);
                let table = branch_self_intersection(&label, &pc, 2).unwrap();
                let derived = cartan_square(&cfg, &pc, 2);
                assert_eq!(table, derived, "{label} order 2");
            }
            for chi in all_characters_of_order(&h, 3) {
                let pc = h.char_values(&chi);
                let table = branch_self_intersection(&label, &pc, 3).unwrap();
                let derived = cartan_square(&cfg, &pc, 3);
                assert_eq!(table, derived, "{label} order 3");
            }
        }
    }

    fn all_characters_of_order(
        h: &crate::ade::LocalHomology,
        n: u64,
    ) -> Vec<crate::abelian::Character> {
        let mut out = Vec::new();
        let factors = h.group.invariant_factors().to_vec();
        let mut coeffs = vec![BigInt::zero(); factors.len()];
        loop {
            let values: Vec<QmodZ> = factors
                .iter()
                .zip(&coeffs)
                .map(|(d, c)| QmodZ::new(c.clone(), BigInt::from(d.clone())))
                .collect();
            if let Ok(chi) = h.group.character(values) {
                let order = chi
                    .values
                    .iter()
                    .fold(BigUint::one(), |acc, v| acc.lcm(&v.order()));
                if order == BigUint::from(n) {
                    out.push(chi);
                }
            }
            // Increment the mixed-radix counter.
            let mut i = 0;
            loop {
                if i == factors.len() {
                    return out;
                }
                coeffs[i] += 1;
                if coeffs[i] < BigInt::from(factors[i].clone()) {
                    break;
                }
                coeffs[i] = BigInt::zero();
                i += 1;
            }
        }
    }

    /// `B_x^2` from the Cartan matrix: multiplicity +1 on curves with value
    /// 1/2 (order 2) resp. +1 / -1 on curves with value 1/3 / 2/3 (order 3).
    fn cartan_square(cfg: &DynkinConfig, pc: &PointChar, n: u64) -> BigInt {
        let mult: Vec<BigInt> = pc
            .values
            .iter()
            .map(|v| {
                if v.is_zero() {
                    BigInt::zero()
                } else if n == 2 {
                    BigInt::one()
                } else if *v == QmodZ::new(BigInt::one(), BigInt::from(3)) {
                    BigInt::one()
                } else {
                    -BigInt::one()
                }
            })
            .collect();
        let mut acc = BigInt::zero();
        for i in 0..cfg.vertex_count() {
            for j in 0..cfg.vertex_count() {
                acc += &mult[i] * &mult[j] * &cfg.cartan()[(i, j)];
            }
        }
        acc
    }

    /// The implemented residues are `sum B_x^2 / (-2)` (order 2) resp.
    /// `sum B_x^2 / (-6)` shifted by the E_6 count (order 3).
    #[test]
    fn residues_encode_branch_squares() {
        // Order 2 across a mixed code: A_3 + D_6 + E_7 points.
        let points = vec![
            SingularPoint { id: "a".into(), label: DynkinLabel::a(3) },
            SingularPoint { id: "d".into(), label: DynkinLabel::d(6) },
            SingularPoint { id: "e".into(), label: DynkinLabel::e(7) },
        ];
        let code = crate::codes::LabeledCode::from_kernel_gamma(points, &[], None).unwrap();
        let two = BigUint::from(2u32);
        for v in code.all_vectors().unwrap() {
            if v.order() != two {
                continue;
            }
            let sum = n2_weighted_sum(&code, &v);
            let mut bsum = BigInt::zero();
            for (i, chi) in v.chars.iter().enumerate() {
                if !chi.is_zero() {
                    bsum += branch_self_intersection(&code.points()[i].label, chi, 2).unwrap();
                }
            }
            assert_eq!(BigInt::from(-2) * &sum, bsum);
        }

        // Order 3: A_2 + A_5 + E_6 points.
        let points = vec![
            SingularPoint { id: "a".into(), label: DynkinLabel::a(2) },
            SingularPoint { id: "b".into(), label: DynkinLabel::a(5) },
            SingularPoint { id: "e".into(), label: DynkinLabel::e(6) },
        ];
        let code = crate::codes::LabeledCode::from_kernel_gamma(points, &[], None).unwrap();
        let three = BigUint::from(3u32);
        for v in code.all_vectors().unwrap() {
            if v.order() != three {
                continue;
            }
            let w = code.weights(&v);
            let t = w.t3.unwrap();
            let st: i64 = t.a.iter().map(|(s, c)| (s * c) as i64).sum();
            let raw = BigInt::from(st) + BigInt::from(2 * t.e6 as i64);
            let mut bsum = BigInt::zero();
            for (i, chi) in v.chars.iter().enumerate() {
                if !chi.is_zero() {
                    bsum += branch_self_intersection(&code.points()[i].label, chi, 3).unwrap();
                }
            }
            assert_eq!(BigInt::from(-6) * &raw, bsum);
            // And the implemented signed sum agrees mod 3.
            let implemented = n3_weighted_sum(&code, &v);
            assert!((raw - implemented).is_multiple_of(&BigInt::from(3)));
        }
    }

    #[test]
    fn extended_rules() {
        // Quartic, extended order-2 vector of weight 6: 6 - 2 - 0 = 4 passes.
        let points: Vec<SingularPoint> = (0..6)
            .map(|i| SingularPoint {
                id: format!("p{i}"),
                label: DynkinLabel::a(1),
            })
            .collect();
        let half = QmodZ::new(BigInt::one(), BigInt::from(2));
        let gen = CodeVector {
            chars: (0..6)
                .map(|_| PointChar {
                    values: vec![half.clone()],
                })
                .collect(),
            h_value: Some(half.clone()),
        };
        let code =
            LabeledCode::from_dual(points, vec![gen.clone()], Some(BigUint::from(2u32))).unwrap();
        let ctx = SurfaceContext::hypersurface(4);
        assert!(check_extended_n2(&code, &gen, &ctx).unwrap().passed());

        // Odd degree: automatic fail with a diagnostic.
        let ctx3 = SurfaceContext::hypersurface(3);
        let r = check_extended_n2(&code, &gen, &ctx3).unwrap();
        assert_eq!(r.outcome, RuleOutcome::Fail);
        assert!(r.note.contains("odd"));
    }

    #[test]
    fn extended_n3_cusp_example() {
        // Cubic with 3 cusps: t = 2, d = 3, K_S·H = -3, eps = +1:
        // 2 + 1 - 3 = 0 passes.
        let points: Vec<SingularPoint> = (0..3)
            .map(|i| SingularPoint {
                id: format!("c{i}"),
                label: DynkinLabel::a(2),
            })
            .collect();
        let third = |a: i64| PointChar {
            values: vec![
                QmodZ::new(BigInt::from(a), BigInt::from(3)),
                QmodZ::new(BigInt::from(2 * a), BigInt::from(3)),
            ],
        };
        let gen = CodeVector {
            chars: vec![third(1), third(2), third(0)],
            h_value: Some(QmodZ::new(BigInt::one(), BigInt::from(3))),
        };
        let code =
            LabeledCode::from_dual(points, vec![gen.clone()], Some(BigUint::from(3u32))).unwrap();
        let ctx = SurfaceContext::hypersurface(3);
        assert!(check_extended_n3(&code, &gen, &ctx).unwrap().passed());

        // t = 1 with eps = +1: 1 + 1 - 3 = -1 fails.
        let gen2 = CodeVector {
            chars: vec![third(1), third(0), third(0)],
            h_value: Some(QmodZ::new(BigInt::one(), BigInt::from(3))),
        };
        let code2 =
            LabeledCode::from_dual(code.points().to_vec(), vec![gen2.clone()], Some(BigUint::from(3u32)))
                .unwrap();
        assert!(!check_extended_n3(&code2, &gen2, &ctx).unwrap().passed());
    }
}
