//! Generalized labeled codes.
//!
//! A code is a finite set of labeled singular points together with a
//! surjection `k` from the direct sum of their local homology groups (plus
//! one `Z/d'` coordinate for extended codes) onto a finite group `H_1`.
//! The dual picture is primary here: the code `K` is the set of character
//! tuples annihilating `Ker(k)`, stored per point by values on all the
//! `gamma_i` and enumerated through the invariant factors of `H_1`.
//!
//! Shortening a point replaces it by the components of a vertex deletion,
//! keeps the vectors whose character dies on the deleted classes, and
//! re-expresses them on the new local groups.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::abelian::{subgroup, FinAbGroup, GroupElement, QmodZ};
use crate::ade::{
    delete_vertices, local_homology, DynkinConfig, DynkinFamily, DynkinLabel, LocalHomology,
    PointChar,
};
use crate::matrix::{kernel_basis, IntMatrix};
use crate::{input_err, Error, Result};

/// Hard bound on code enumeration; beyond it operations fail loudly
/// rather than returning partial answers.
pub const MAX_ENUMERATED_VECTORS: u64 = 1_000_000;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct SingularPoint {
    pub id: String,
    pub label: DynkinLabel,
}

/// An element of the dual code: one character per point, plus the
/// hyperplane coordinate for extended codes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct CodeVector {
    pub chars: Vec<PointChar>,
    pub h_value: Option<QmodZ>,
}

impl CodeVector {
    pub fn order(&self) -> BigUint {
        let mut n = BigUint::one();
        for c in &self.chars {
            n = n.lcm(&c.order());
        }
        if let Some(h) = &self.h_value {
            n = n.lcm(&h.order());
        }
        n
    }

    pub fn is_zero(&self) -> bool {
        self.chars.iter().all(PointChar::is_zero)
            && self.h_value.as_ref().is_none_or(QmodZ::is_zero)
    }

    /// A vector is strict when it has no hyperplane component.
    pub fn is_strict(&self) -> bool {
        self.h_value.as_ref().is_none_or(QmodZ::is_zero)
    }

    pub fn add(&self, other: &CodeVector) -> CodeVector {
        CodeVector {
            chars: self
                .chars
                .iter()
                .zip(&other.chars)
                .map(|(a, b)| a.add(b))
                .collect(),
            h_value: match (&self.h_value, &other.h_value) {
                (Some(a), Some(b)) => Some(a.add(b)),
                (Some(a), None) | (None, Some(a)) => Some(a.clone()),
                (None, None) => None,
            },
        }
    }

    pub fn scale(&self, k: &BigInt) -> CodeVector {
        CodeVector {
            chars: self.chars.iter().map(|c| c.scale(k)).collect(),
            h_value: self.h_value.as_ref().map(|h| h.scale(k)),
        }
    }
}

impl fmt::Display for CodeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .chars
            .iter()
            .map(|c| {
                let vals: Vec<String> = c.values.iter().map(|v| v.to_string()).collect();
                format!("({})", vals.join(","))
            })
            .collect();
        write!(f, "[{}]", parts.join(" "))?;
        if let Some(h) = &self.h_value {
            write!(f, " H={h}")?;
        }
        Ok(())
    }
}

/// Per-label tallies of an order-2 vector, keyed for the divisibility rules:
/// `A_{2m+1}` by `m`, subtype `(+)` of `D_{2m}` by `m`; odd `D_n` and
/// subtype `(-)` are lumped together.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TalliesN2 {
    pub a_odd: BTreeMap<usize, usize>,
    pub d_minus: usize,
    pub d_plus: BTreeMap<usize, usize>,
    pub e7: usize,
}

/// Per-label tallies of an order-3 vector: `A_{3s-1}` by `s`, plus `E_6`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TalliesN3 {
    pub a: BTreeMap<usize, usize>,
    pub e6: usize,
}

/// Weight data of one code vector.
#[derive(Clone, Debug)]
pub struct WeightReport {
    pub order: BigUint,
    pub hamming: usize,
    pub label_weights: BTreeMap<DynkinLabel, usize>,
    /// Refined weights: how often each (label, nonzero character) occurs.
    pub refined: BTreeMap<(DynkinLabel, PointChar), usize>,
    pub almost_simple: bool,
    pub t2: Option<TalliesN2>,
    pub t3: Option<TalliesN3>,
}

/// A generalized labeled code.
#[derive(Clone, Debug)]
pub struct LabeledCode {
    points: Vec<SingularPoint>,
    configs: Vec<DynkinConfig>,
    local: Vec<LocalHomology>,
    h_modulus: Option<BigUint>,
    h1: FinAbGroup,
    /// Projection from the gamma-coordinate ambient lattice (one column per
    /// gamma, plus one for the hyperplane slot of extended codes) onto `H_1`.
    k_ambient: IntMatrix,
    dual_generators: Vec<CodeVector>,
    /// Pullbacks of the dual basis of `H_1`, aligned with its invariant
    /// factors; the whole code is enumerated from these.
    dual_basis: Vec<CodeVector>,
}

impl LabeledCode {
    fn prepare_points(points: &[SingularPoint]) -> Result<(Vec<DynkinConfig>, Vec<LocalHomology>)> {
        let mut seen = BTreeSet::new();
        for p in points {
            if !seen.insert(p.id.clone()) {
                return input_err(format!("duplicate point id {}", p.id));
            }
        }
        let configs: Vec<DynkinConfig> = points.iter().map(|p| DynkinConfig::new(p.label)).collect();
        let local = configs.iter().map(local_homology).collect();
        Ok((configs, local))
    }

    fn gamma_offsets(configs: &[DynkinConfig]) -> Vec<usize> {
        let mut off = Vec::with_capacity(configs.len());
        let mut total = 0;
        for c in configs {
            off.push(total);
            total += c.vertex_count();
        }
        off
    }

    fn total_gamma(configs: &[DynkinConfig]) -> usize {
        configs.iter().map(DynkinConfig::vertex_count).sum()
    }

    /// Builds a code from kernel generators written in gamma coordinates
    /// (concatenated per point, with one extra residue for the hyperplane
    /// slot when `h_modulus` is given).
    pub fn from_kernel_gamma(
        points: Vec<SingularPoint>,
        kernel: &[Vec<BigInt>],
        h_modulus: Option<BigUint>,
    ) -> Result<LabeledCode> {
        let (configs, local) = Self::prepare_points(&points)?;
        let total = Self::total_gamma(&configs);
        let ambient = total + usize::from(h_modulus.is_some());
        for g in kernel {
            if g.len() != ambient {
                return input_err(format!(
                    "kernel generator has {} coordinates, ambient needs {ambient}",
                    g.len()
                ));
            }
        }
        // Relations: the Cartan block of every point, the hyperplane order,
        // and the requested kernel generators.
        let mut cols: Vec<Vec<BigInt>> = Vec::new();
        let offsets = Self::gamma_offsets(&configs);
        for (c, &off) in configs.iter().zip(&offsets) {
            let n = c.vertex_count();
            for j in 0..n {
                let mut col = vec![BigInt::zero(); ambient];
                for i in 0..n {
                    col[off + i] = c.cartan()[(i, j)].clone();
                }
                cols.push(col);
            }
        }
        if let Some(d) = &h_modulus {
            let mut col = vec![BigInt::zero(); ambient];
            col[total] = BigInt::from(d.clone());
            cols.push(col);
        }
        for g in kernel {
            cols.push(g.clone());
        }
        let rel = IntMatrix::from_fn(ambient, cols.len(), |i, j| cols[j][i].clone());
        let coker = crate::abelian::cokernel(&rel);
        let h1 = coker.group.clone();
        debug_assert!(h1.is_finite());
        let k_ambient = coker.projection.clone();
        let dual_basis = Self::basis_from_projection(&configs, &offsets, &h1, &k_ambient, &h_modulus);
        Ok(LabeledCode {
            points,
            configs,
            local,
            h_modulus,
            h1,
            k_ambient,
            dual_generators: dual_basis.clone(),
            dual_basis,
        })
    }

    /// Builds a code from generators of the dual side.
    pub fn from_dual(
        points: Vec<SingularPoint>,
        gens: Vec<CodeVector>,
        h_modulus: Option<BigUint>,
    ) -> Result<LabeledCode> {
        let (configs, local) = Self::prepare_points(&points)?;
        let total = Self::total_gamma(&configs);
        let ambient = total + usize::from(h_modulus.is_some());
        let mut validated = Vec::with_capacity(gens.len());
        for (gi, g) in gens.into_iter().enumerate() {
            if g.chars.len() != points.len() {
                return input_err(format!("dual generator {gi} has wrong point count"));
            }
            let mut chars = Vec::with_capacity(points.len());
            for (c, cfg) in g.chars.into_iter().zip(&configs) {
                chars.push(cfg.validate_char(c.values)?);
            }
            let h_value = match (&h_modulus, g.h_value) {
                (Some(d), Some(h)) => {
                    if !d.is_multiple_of(&h.order()) {
                        return input_err(format!(
                            "hyperplane value {h} has order not dividing d' = {d}"
                        ));
                    }
                    Some(h)
                }
                (Some(_), None) => Some(QmodZ::zero()),
                (None, Some(h)) if !h.is_zero() => {
                    return input_err("hyperplane value supplied for a strict code");
                }
                (None, _) => None,
            };
            validated.push(CodeVector { chars, h_value });
        }

        // Kernel lattice of the map the generators define on the ambient.
        let mut m = BigInt::one();
        for g in &validated {
            for c in &g.chars {
                for v in &c.values {
                    m = m.lcm(v.denom());
                }
            }
            if let Some(h) = &g.h_value {
                m = m.lcm(h.denom());
            }
        }
        let rows = validated.len();
        let t = IntMatrix::from_fn(rows, ambient, |g, j| {
            let v = Self::ambient_value(&validated[g], &configs, j, total);
            // v = p/q with q | m; integerize to p * (m / q).
            v.numer() * (&m / v.denom())
        });
        let scaled_id = IntMatrix::from_fn(rows, rows, |i, j| {
            if i == j {
                m.clone()
            } else {
                BigInt::zero()
            }
        });
        let combined = t.hconcat(&scaled_id);
        let ker = kernel_basis(&combined);
        let lattice_cols: Vec<Vec<BigInt>> = ker.iter().map(|v| v[..ambient].to_vec()).collect();
        let lattice = IntMatrix::from_fn(ambient, lattice_cols.len(), |i, j| {
            lattice_cols[j][i].clone()
        });
        let coker = crate::abelian::cokernel(&lattice);
        let h1 = coker.group.clone();
        if !h1.is_finite() {
            return input_err("dual generators do not define a finite code");
        }
        let offsets = Self::gamma_offsets(&configs);
        let k_ambient = coker.projection.clone();
        let dual_basis = Self::basis_from_projection(&configs, &offsets, &h1, &k_ambient, &h_modulus);
        Ok(LabeledCode {
            points,
            configs,
            local,
            h_modulus,
            h1,
            k_ambient,
            dual_generators: validated,
            dual_basis,
        })
    }

    /// Builds from kernel generators and validates that every supplied dual
    /// generator annihilates them.
    pub fn from_kernel_and_dual(
        points: Vec<SingularPoint>,
        kernel: &[Vec<BigInt>],
        duals: Vec<CodeVector>,
        h_modulus: Option<BigUint>,
    ) -> Result<LabeledCode> {
        let code = Self::from_kernel_gamma(points, kernel, h_modulus)?;
        let total = Self::total_gamma(&code.configs);
        for (di, d) in duals.iter().enumerate() {
            for g in kernel {
                let mut acc = QmodZ::zero();
                for (j, coeff) in g.iter().enumerate() {
                    let v = Self::ambient_value(d, &code.configs, j, total);
                    acc = acc.add(&v.scale(coeff));
                }
                if !acc.is_zero() {
                    return input_err(format!(
                        "dual generator {di} does not annihilate a kernel generator"
                    ));
                }
            }
        }
        Ok(LabeledCode {
            dual_generators: duals,
            ..code
        })
    }

    fn ambient_value(v: &CodeVector, configs: &[DynkinConfig], j: usize, total: usize) -> QmodZ {
        if j == total {
            return v.h_value.clone().unwrap_or_else(QmodZ::zero);
        }
        let mut idx = j;
        for (c, pc) in configs.iter().zip(&v.chars) {
            let n = c.vertex_count();
            if idx < n {
                return pc.values[idx].clone();
            }
            idx -= n;
        }
        unreachable!("ambient index out of range")
    }

    fn basis_from_projection(
        configs: &[DynkinConfig],
        offsets: &[usize],
        h1: &FinAbGroup,
        k: &IntMatrix,
        h_modulus: &Option<BigUint>,
    ) -> Vec<CodeVector> {
        let total: usize = configs.iter().map(DynkinConfig::vertex_count).sum();
        (0..h1.invariant_factors().len())
            .map(|t| {
                let d = BigInt::from(h1.invariant_factors()[t].clone());
                let chars: Vec<PointChar> = configs
                    .iter()
                    .zip(offsets)
                    .map(|(c, &off)| {
                        let values = (0..c.vertex_count())
                            .map(|i| QmodZ::new(k[(t, off + i)].clone(), d.clone()))
                            .collect();
                        c.validate_char(values)
                            .expect("pullback characters satisfy the gamma relations")
                    })
                    .collect();
                let h_value = h_modulus
                    .as_ref()
                    .map(|_| QmodZ::new(k[(t, total)].clone(), d.clone()));
                CodeVector { chars, h_value }
            })
            .collect()
    }

    pub fn points(&self) -> &[SingularPoint] {
        &self.points
    }

    pub fn configs(&self) -> &[DynkinConfig] {
        &self.configs
    }

    pub fn local(&self) -> &[LocalHomology] {
        &self.local
    }

    pub fn h1(&self) -> &FinAbGroup {
        &self.h1
    }

    pub fn h_modulus(&self) -> Option<&BigUint> {
        self.h_modulus.as_ref()
    }

    pub fn is_extended(&self) -> bool {
        self.h_modulus.is_some()
    }

    pub fn dual_generators(&self) -> &[CodeVector] {
        &self.dual_generators
    }

    pub fn point_index(&self, id: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p.id == id)
            .ok_or_else(|| Error::Input(format!("no point with id {id}")))
    }

    /// Number of exceptional curves: the sum of the label indices.
    pub fn rank(&self) -> usize {
        self.points.iter().map(|p| p.label.vertex_count()).sum()
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn k_order(&self) -> BigUint {
        self.h1.order().expect("code groups are finite")
    }

    /// Multiset of labels, e.g. `4xA1 + 1xA3`.
    pub fn label_multiset(&self) -> String {
        let mut counts: BTreeMap<DynkinLabel, usize> = BTreeMap::new();
        for p in &self.points {
            *counts.entry(p.label).or_default() += 1;
        }
        if counts.is_empty() {
            return "empty".to_string();
        }
        counts
            .iter()
            .map(|(l, c)| format!("{c}x{l}"))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn zero_vector(&self) -> CodeVector {
        CodeVector {
            chars: self.configs.iter().map(DynkinConfig::zero_char).collect(),
            h_value: self.h_modulus.as_ref().map(|_| QmodZ::zero()),
        }
    }

    /// Enumerates the whole dual code (all `|H_1|` vectors), in the
    /// mixed-radix order of the invariant factors.
    pub fn all_vectors(&self) -> Result<Vec<CodeVector>> {
        let order = self.k_order();
        if order > BigUint::from(MAX_ENUMERATED_VECTORS) {
            return Err(Error::ResourceCap(format!(
                "code has {order} vectors, enumeration cap is {MAX_ENUMERATED_VECTORS}"
            )));
        }
        let mut out = vec![self.zero_vector()];
        for (t, d) in self.h1.invariant_factors().iter().enumerate() {
            let d = BigInt::from(d.clone());
            let mut next = Vec::new();
            for v in &out {
                let mut a = BigInt::zero();
                while a < d {
                    next.push(v.add(&self.dual_basis[t].scale(&a)));
                    a += 1;
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Dimension of the 2-torsion subcode as an F_2 vector space; equals
    /// the number of even invariant factors of `H_1`.
    pub fn k2_dimension(&self) -> usize {
        self.h1
            .invariant_factors()
            .iter()
            .filter(|d| d.is_even())
            .count()
    }

    /// Weight data for one vector of this code.
    pub fn weights(&self, v: &CodeVector) -> WeightReport {
        let order = v.order();
        let mut hamming = 0usize;
        let mut label_weights: BTreeMap<DynkinLabel, usize> = BTreeMap::new();
        let mut refined: BTreeMap<(DynkinLabel, PointChar), usize> = BTreeMap::new();
        let mut almost_simple = true;
        let two = BigUint::from(2u32);
        let three = BigUint::from(3u32);
        let mut t2 = TalliesN2::default();
        let mut t3 = TalliesN3::default();
        for (p, chi) in self.points.iter().zip(&v.chars) {
            if chi.is_zero() {
                continue;
            }
            hamming += 1;
            *label_weights.entry(p.label).or_default() += 1;
            *refined.entry((p.label, chi.clone())).or_default() += 1;

            // Almost simple: cyclic local group with value +-1/N on the
            // distinguished generator.
            let lh = &self.local[self.point_index(&p.id).expect("point exists")];
            if lh.group.invariant_factors().len() > 1 {
                almost_simple = false;
            } else {
                let g = lh.distinguished[0];
                let val = chi.value(g);
                let plus = QmodZ::new(BigInt::one(), BigInt::from(order.clone()));
                if *val != plus && *val != plus.neg() {
                    almost_simple = false;
                }
            }

            if order == two {
                match p.label.family {
                    DynkinFamily::A => {
                        debug_assert!(p.label.index % 2 == 1);
                        let m = (p.label.index - 1) / 2;
                        *t2.a_odd.entry(m).or_default() += 1;
                    }
                    DynkinFamily::D => {
                        if p.label.index % 2 == 1 || chi.value(1).is_zero() {
                            t2.d_minus += 1;
                        } else {
                            *t2.d_plus.entry(p.label.index / 2).or_default() += 1;
                        }
                    }
                    DynkinFamily::E => {
                        debug_assert_eq!(p.label.index, 7);
                        t2.e7 += 1;
                    }
                }
            }
            if order == three {
                match p.label.family {
                    DynkinFamily::A => {
                        debug_assert_eq!((p.label.index + 1) % 3, 0);
                        let s = (p.label.index + 1) / 3;
                        *t3.a.entry(s).or_default() += 1;
                    }
                    DynkinFamily::E => {
                        debug_assert_eq!(p.label.index, 6);
                        t3.e6 += 1;
                    }
                    DynkinFamily::D => unreachable!("D has no order-3 characters"),
                }
            }
        }
        WeightReport {
            hamming,
            label_weights,
            refined,
            almost_simple,
            t2: (order == two).then_some(t2),
            t3: (order == three).then_some(t3),
            order,
        }
    }

    /// Shortens by deleting the vertex set `s` at point `point_id`.
    ///
    /// The point is replaced by the ADE components of the deletion; the new
    /// code keeps exactly the vectors whose character at the point vanishes
    /// on the deleted gamma classes, re-expressed on the component groups.
    pub fn shorten_geometric(&self, point_id: &str, s: &BTreeSet<usize>) -> Result<LabeledCode> {
        let z = self.point_index(point_id)?;
        let data = delete_vertices(&self.configs[z], s)?;

        let survivors: Vec<CodeVector> = self
            .all_vectors()?
            .into_iter()
            .filter(|v| s.iter().all(|&i| v.chars[z].value(i).is_zero()))
            .collect();

        let mut new_points = Vec::new();
        let mut rebuilt: Vec<CodeVector> = survivors
            .iter()
            .map(|v| CodeVector {
                chars: Vec::new(),
                h_value: v.h_value.clone(),
            })
            .collect();
        for (pi, p) in self.points.iter().enumerate() {
            if pi != z {
                new_points.push(p.clone());
                for (g, v) in rebuilt.iter_mut().zip(&survivors) {
                    g.chars.push(v.chars[pi].clone());
                }
                continue;
            }
            for (ci, comp) in data.components.iter().enumerate() {
                new_points.push(SingularPoint {
                    id: format!("{}:{}", p.id, ci + 1),
                    label: comp.config.label,
                });
                for (g, v) in rebuilt.iter_mut().zip(&survivors) {
                    let values: Vec<QmodZ> = comp
                        .vertex_map
                        .iter()
                        .map(|&orig| v.chars[z].value(orig).clone())
                        .collect();
                    let pc = comp
                        .config
                        .validate_char(values)
                        .expect("surviving characters restrict to valid characters");
                    g.chars.push(pc);
                }
            }
        }
        let gens = reduce_generators(&rebuilt);
        let code = LabeledCode::from_dual(new_points, gens, self.h_modulus.clone())?;

        // Duality cross-check: |K'| must equal |H_1 / k(M_z)| where M_z is
        // generated by the deleted gamma classes.
        let offsets = Self::gamma_offsets(&self.configs);
        let ambient = Self::total_gamma(&self.configs) + usize::from(self.is_extended());
        let imgs: Vec<GroupElement> = s
            .iter()
            .map(|&i| {
                let mut e = vec![BigInt::zero(); ambient];
                e[offsets[z] + i - 1] = BigInt::one();
                self.h1.reduce(self.k_ambient.mul_vec(&e))
            })
            .collect();
        let sub = subgroup(&self.h1, &imgs)?;
        debug_assert_eq!(
            code.k_order(),
            sub.quotient.order().expect("finite"),
            "shortened code order disagrees with the quotient of H_1"
        );

        Ok(code)
    }

    /// Full shortening: removes the point outright (deletes every vertex).
    pub fn shorten_full(&self, point_id: &str) -> Result<LabeledCode> {
        let z = self.point_index(point_id)?;
        let all: BTreeSet<usize> = self.configs[z].vertices().collect();
        self.shorten_geometric(point_id, &all)
    }

    /// Splits the code into its primary components, one per prime dividing
    /// `|H_1|`.
    pub fn primary_decomposition(&self) -> Result<BTreeMap<BigUint, LabeledCode>> {
        let order = self.k_order();
        let mut out = BTreeMap::new();
        for p in factor_primes(&order) {
            let mut gens = Vec::new();
            for (t, d) in self.h1.invariant_factors().iter().enumerate() {
                let mut q = BigUint::one();
                let mut rest = d.clone();
                while rest.is_multiple_of(&p) {
                    rest /= &p;
                    q *= &p;
                }
                if q > BigUint::one() {
                    gens.push(self.dual_basis[t].scale(&BigInt::from(rest)));
                }
            }
            let code = LabeledCode::from_dual(self.points.clone(), gens, self.h_modulus.clone())?;
            out.insert(p, code);
        }
        Ok(out)
    }

    /// The strict subcode of an extended code, as a standalone strict code
    /// on the same points.
    pub fn strict_part(&self) -> Result<LabeledCode> {
        if !self.is_extended() {
            return Ok(self.clone());
        }
        let strict: Vec<CodeVector> = self
            .all_vectors()?
            .into_iter()
            .filter(CodeVector::is_strict)
            .map(|v| CodeVector {
                chars: v.chars,
                h_value: None,
            })
            .collect();
        let gens = reduce_generators(&strict);
        LabeledCode::from_dual(self.points.clone(), gens, None)
    }

    /// Vectors of order dividing 2 (the binary part of the code).
    pub fn two_torsion(&self) -> Result<Vec<CodeVector>> {
        let two = BigUint::from(2u32);
        Ok(self
            .all_vectors()?
            .into_iter()
            .filter(|v| two.is_multiple_of(&v.order()))
            .collect())
    }
}

/// Greedy minimal generating subset of a list of vectors (exact closure).
pub fn reduce_generators(vectors: &[CodeVector]) -> Vec<CodeVector> {
    let mut gens: Vec<CodeVector> = Vec::new();
    let mut span: BTreeSet<CodeVector> = BTreeSet::new();
    let mut sorted: Vec<&CodeVector> = vectors.iter().collect();
    sorted.sort_by_key(|v| v.order());
    sorted.reverse();
    for v in sorted {
        if v.is_zero() || span.contains(v) {
            continue;
        }
        gens.push(v.clone());
        // Rebuild the closure.
        span.clear();
        let mut frontier = vec![zero_like(v)];
        span.insert(zero_like(v));
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = x.add(g);
                if span.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

fn zero_like(v: &CodeVector) -> CodeVector {
    CodeVector {
        chars: v
            .chars
            .iter()
            .map(|c| PointChar {
                values: vec![QmodZ::zero(); c.values.len()],
            })
            .collect(),
        h_value: v.h_value.as_ref().map(|_| QmodZ::zero()),
    }
}

fn factor_primes(n: &BigUint) -> Vec<BigUint> {
    let mut primes = Vec::new();
    let mut n = n.clone();
    let mut p = BigUint::from(2u32);
    while &p * &p <= n {
        if n.is_multiple_of(&p) {
            primes.push(p.clone());
            while n.is_multiple_of(&p) {
                n /= &p;
            }
        }
        p += 1u32;
    }
    if n > BigUint::one() {
        primes.push(n);
    }
    primes
}

/// Label-preserving equivalence: searches for a bijection of the point sets
/// under which the dual codes agree exactly (no local automorphisms, and
/// the hyperplane coordinate is pinned).
///
/// The search individualizes points one at a time while splitting paired
/// vector classes by the value at the matched points; a mismatch in any
/// split prunes the branch, so the common cases resolve without
/// backtracking.
pub fn equivalent(a: &LabeledCode, b: &LabeledCode) -> Result<Option<Vec<(String, String)>>> {
    if a.num_points() != b.num_points()
        || a.h_modulus() != b.h_modulus()
        || a.k_order() != b.k_order()
    {
        return Ok(None);
    }
    let mut la: Vec<DynkinLabel> = a.points.iter().map(|p| p.label).collect();
    let mut lb: Vec<DynkinLabel> = b.points.iter().map(|p| p.label).collect();
    la.sort();
    lb.sort();
    if la != lb {
        return Ok(None);
    }

    let ka = a.all_vectors()?;
    let kb = b.all_vectors()?;

    // Intern characters jointly so splits compare small integers.
    let mut dict: BTreeMap<PointChar, u32> = BTreeMap::new();
    let mut intern = |c: &PointChar| -> u32 {
        let next = dict.len() as u32;
        *dict.entry(c.clone()).or_insert(next)
    };
    let va: Vec<Vec<u32>> = ka
        .iter()
        .map(|v| v.chars.iter().map(&mut intern).collect())
        .collect();
    let vb: Vec<Vec<u32>> = kb
        .iter()
        .map(|v| v.chars.iter().map(&mut intern).collect())
        .collect();

    // Initial buckets: by order, hyperplane value, and the multiset of
    // (label, character) pairs. All are invariants of any equivalence.
    type VecKey = (Vec<u8>, String, Vec<(DynkinFamily, usize, u32)>);
    let key_of = |code: &LabeledCode, vecs: &[CodeVector], ids: &[Vec<u32>], i: usize| -> VecKey {
        let mut cells: Vec<(DynkinFamily, usize, u32)> = code
            .points
            .iter()
            .zip(&ids[i])
            .map(|(p, &c)| (p.label.family, p.label.index, c))
            .collect();
        cells.sort();
        let h = vecs[i]
            .h_value
            .as_ref()
            .map_or("-".to_string(), |h| h.to_string());
        (vecs[i].order().to_bytes_be(), h, cells)
    };
    let mut buckets_a: BTreeMap<VecKey, Vec<usize>> = BTreeMap::new();
    let mut buckets_b: BTreeMap<VecKey, Vec<usize>> = BTreeMap::new();
    for i in 0..ka.len() {
        buckets_a.entry(key_of(a, &ka, &va, i)).or_default().push(i);
    }
    for i in 0..kb.len() {
        buckets_b.entry(key_of(b, &kb, &vb, i)).or_default().push(i);
    }
    if buckets_a.len() != buckets_b.len() {
        return Ok(None);
    }
    let mut buckets: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for ((keya, ba), (keyb, bb)) in buckets_a.iter().zip(buckets_b.iter()) {
        if keya != keyb || ba.len() != bb.len() {
            return Ok(None);
        }
        buckets.push((ba.clone(), bb.clone()));
    }

    // Point profiles relative to the initial buckets.
    let profile = |ids: &[Vec<u32>], buckets: &[(Vec<usize>, Vec<usize>)], side_a: bool, x: usize| {
        let mut prof: Vec<Vec<u32>> = Vec::new();
        for (ba, bb) in buckets {
            let src = if side_a { ba } else { bb };
            let mut col: Vec<u32> = src.iter().map(|&v| ids[v][x]).collect();
            col.sort_unstable();
            prof.push(col);
        }
        prof
    };
    let prof_a: Vec<Vec<Vec<u32>>> = (0..a.num_points())
        .map(|x| profile(&va, &buckets, true, x))
        .collect();
    let prof_b: Vec<Vec<Vec<u32>>> = (0..b.num_points())
        .map(|x| profile(&vb, &buckets, false, x))
        .collect();

    // Process the most constrained points first.
    let mut order: Vec<usize> = (0..a.num_points()).collect();
    let candidate_count = |x: usize| {
        (0..b.num_points())
            .filter(|&y| b.points[y].label == a.points[x].label && prof_b[y] == prof_a[x])
            .count()
    };
    order.sort_by_key(|&x| candidate_count(x));

    struct Search<'s> {
        a: &'s LabeledCode,
        b: &'s LabeledCode,
        va: &'s [Vec<u32>],
        vb: &'s [Vec<u32>],
        prof_a: &'s [Vec<Vec<u32>>],
        prof_b: &'s [Vec<Vec<u32>>],
        order: &'s [usize],
        assigned: Vec<Option<usize>>,
        used: Vec<bool>,
    }

    impl Search<'_> {
        fn split(
            &self,
            buckets: &[(Vec<usize>, Vec<usize>)],
            x: usize,
            y: usize,
        ) -> Option<Vec<(Vec<usize>, Vec<usize>)>> {
            let mut out = Vec::new();
            for (ba, bb) in buckets {
                let mut parts_a: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
                for &v in ba {
                    parts_a.entry(self.va[v][x]).or_default().push(v);
                }
                let mut parts_b: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
                for &v in bb {
                    parts_b.entry(self.vb[v][y]).or_default().push(v);
                }
                if parts_a.len() != parts_b.len() {
                    return None;
                }
                for ((ca, pa), (cb, pb)) in parts_a.into_iter().zip(parts_b) {
                    if ca != cb || pa.len() != pb.len() {
                        return None;
                    }
                    out.push((pa, pb));
                }
            }
            Some(out)
        }

        fn solve(&mut self, depth: usize, buckets: Vec<(Vec<usize>, Vec<usize>)>) -> bool {
            if depth == self.order.len() {
                return true;
            }
            let x = self.order[depth];
            for y in 0..self.b.num_points() {
                if self.used[y]
                    || self.b.points[y].label != self.a.points[x].label
                    || self.prof_b[y] != self.prof_a[x]
                {
                    continue;
                }
                if let Some(next) = self.split(&buckets, x, y) {
                    self.assigned[x] = Some(y);
                    self.used[y] = true;
                    if self.solve(depth + 1, next) {
                        return true;
                    }
                    self.assigned[x] = None;
                    self.used[y] = false;
                }
            }
            false
        }
    }

    let mut search = Search {
        a,
        b,
        va: &va,
        vb: &vb,
        prof_a: &prof_a,
        prof_b: &prof_b,
        order: &order,
        assigned: vec![None; a.num_points()],
        used: vec![false; b.num_points()],
    };
    if search.solve(0, buckets) {
        let map = search
            .assigned
            .iter()
            .enumerate()
            .map(|(x, y)| {
                (
                    a.points[x].id.clone(),
                    b.points[y.expect("complete assignment")].id.clone(),
                )
            })
            .collect();
        Ok(Some(map))
    } else {
        Ok(None)
    }
}
