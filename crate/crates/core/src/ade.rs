//! ADE singularity labels, Dynkin configurations and local homology.
//!
//! Vertex numbering follows the resolution graphs:
//!
//! - `A_n`: chain `1 - 2 - ... - n`
//! - `D_n`: chain `1 - ... - (n-1)` with vertex `n` attached to `n-2`
//! - `E_6`: chain `1 - 2 - 3 - 5 - 6` with vertex `4` attached to `3`
//! - `E_7`: chain `1 - ... - 6` with vertex `7` attached to `4`
//! - `E_8`: chain `1 - ... - 7` with vertex `8` attached to `5`
//!
//! The local homology group of a singularity is the cokernel of its
//! intersection matrix (the negative definite Cartan matrix), and the
//! distinguished classes `gamma_i` are the images of the basis vectors.
//! Deleting exceptional curves ("vertices") produces smaller ADE
//! configurations together with the quotient and patch maps relating the
//! old and new local homology.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::abelian::{
    cokernel, direct_sum, subgroup, Character, CokernelData, DirectSumData, FinAbGroup,
    GroupElement, GroupHom, QmodZ,
};
use crate::matrix::IntMatrix;
use crate::{input_err, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum DynkinFamily {
    A,
    D,
    E,
}

impl fmt::Display for DynkinFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynkinFamily::A => write!(f, "A"),
            DynkinFamily::D => write!(f, "D"),
            DynkinFamily::E => write!(f, "E"),
        }
    }
}

/// An ADE label: `A_n` (n >= 1), `D_n` (n >= 4) or `E_6`, `E_7`, `E_8`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DynkinLabel {
    pub family: DynkinFamily,
    pub index: usize,
}

impl DynkinLabel {
    pub fn new(family: DynkinFamily, index: usize) -> Result<Self> {
        let ok = match family {
            DynkinFamily::A => index >= 1,
            DynkinFamily::D => index >= 4,
            DynkinFamily::E => (6..=8).contains(&index),
        };
        if !ok {
            return input_err(format!("invalid Dynkin label {family}{index}"));
        }
        Ok(DynkinLabel { family, index })
    }

    pub fn a(n: usize) -> Self {
        Self::new(DynkinFamily::A, n).unwrap()
    }

    pub fn d(n: usize) -> Self {
        Self::new(DynkinFamily::D, n).unwrap()
    }

    pub fn e(n: usize) -> Self {
        Self::new(DynkinFamily::E, n).unwrap()
    }

    /// Number of vertices (exceptional curves); also the rank contribution.
    pub fn vertex_count(&self) -> usize {
        self.index
    }
}

impl fmt::Display for DynkinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.index)
    }
}

/// A Dynkin diagram with its Cartan intersection matrix (diagonal -2,
/// off-diagonal 1 on edges). Vertices are 1-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DynkinConfig {
    pub label: DynkinLabel,
    edges: Vec<(usize, usize)>,
    cartan: IntMatrix,
}

impl DynkinConfig {
    pub fn new(label: DynkinLabel) -> Self {
        let n = label.vertex_count();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        match label.family {
            DynkinFamily::A => {
                for v in 1..n {
                    edges.push((v, v + 1));
                }
            }
            DynkinFamily::D => {
                for v in 1..n - 1 {
                    edges.push((v, v + 1));
                }
                edges.push((n - 2, n));
            }
            DynkinFamily::E => {
                let (chain, extra) = match n {
                    6 => (vec![1, 2, 3, 5, 6], (3, 4)),
                    7 => (vec![1, 2, 3, 4, 5, 6], (4, 7)),
                    8 => (vec![1, 2, 3, 4, 5, 6, 7], (5, 8)),
                    _ => unreachable!(),
                };
                for w in chain.windows(2) {
                    edges.push((w[0], w[1]));
                }
                edges.push(extra);
            }
        }
        let cartan = IntMatrix::from_fn(n, n, |i, j| {
            if i == j {
                BigInt::from(-2)
            } else if edges.contains(&(i + 1, j + 1)) || edges.contains(&(j + 1, i + 1)) {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        });
        DynkinConfig { label, edges, cartan }
    }

    pub fn vertex_count(&self) -> usize {
        self.label.vertex_count()
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        1..=self.vertex_count()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn cartan(&self) -> &IntMatrix {
        &self.cartan
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v)) || self.edges.contains(&(v, u))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.vertices().filter(|&u| self.adjacent(u, v)).collect()
    }

    /// Validates a tuple of Q/Z values (one per vertex) as a character of
    /// the local homology: every Cartan relation must evaluate to zero.
    pub fn validate_char(&self, values: Vec<QmodZ>) -> Result<PointChar> {
        if values.len() != self.vertex_count() {
            return input_err(format!(
                "character on {} needs {} values, got {}",
                self.label,
                self.vertex_count(),
                values.len()
            ));
        }
        for i in 0..self.vertex_count() {
            let mut acc = QmodZ::zero();
            for (j, v) in values.iter().enumerate() {
                acc = acc.add(&v.scale(&self.cartan[(i, j)]));
            }
            if !acc.is_zero() {
                return input_err(format!(
                    "values violate the gamma relations of {} at vertex {}",
                    self.label,
                    i + 1
                ));
            }
        }
        Ok(PointChar { values })
    }

    pub fn zero_char(&self) -> PointChar {
        PointChar {
            values: vec![QmodZ::zero(); self.vertex_count()],
        }
    }

    /// Diagram automorphisms that act as `±1` on the local homology group:
    /// the `A_n` mirror, the `E_6` mirror and the prong swap of `D_n` for
    /// odd `n`. These are exactly the symmetries that fix every character
    /// subgroup, so identifying vertex sets under them never merges
    /// genuinely different shortenings.
    pub fn sign_symmetries(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let ident: Vec<usize> = (1..=n).collect();
        let mut out = vec![ident];
        match self.label.family {
            DynkinFamily::A => {
                if n > 1 {
                    out.push((1..=n).rev().collect());
                }
            }
            DynkinFamily::D => {
                if n % 2 == 1 {
                    let mut p: Vec<usize> = (1..=n).collect();
                    p.swap(n - 2, n - 1);
                    out.push(p);
                }
            }
            DynkinFamily::E => {
                if n == 6 {
                    // 1<->6, 2<->5, fixing 3 and 4.
                    out.push(vec![6, 5, 3, 4, 2, 1]);
                }
            }
        }
        out
    }
}

/// A character of the local homology, stored redundantly by its values on
/// every `gamma_i`; construction goes through [`DynkinConfig::validate_char`]
/// so the gamma relations always hold.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct PointChar {
    pub values: Vec<QmodZ>,
}

impl PointChar {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(QmodZ::is_zero)
    }

    pub fn order(&self) -> BigUint {
        self.values
            .iter()
            .fold(BigUint::one(), |acc, v| num_integer::Integer::lcm(&acc, &v.order()))
    }

    pub fn add(&self, other: &PointChar) -> PointChar {
        PointChar {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> PointChar {
        PointChar {
            values: self.values.iter().map(|v| v.scale(k)).collect(),
        }
    }

    pub fn value(&self, vertex: usize) -> &QmodZ {
        &self.values[vertex - 1]
    }
}

/// Local homology of an ADE singularity: the cokernel of the Cartan matrix,
/// the classes `gamma_i`, and the distinguished generating subset.
#[derive(Clone, Debug)]
pub struct LocalHomology {
    pub group: FinAbGroup,
    pub gamma: Vec<GroupElement>,
    pub distinguished: Vec<usize>,
    pub coker: CokernelData,
}

impl LocalHomology {
    pub fn gamma_of(&self, vertex: usize) -> &GroupElement {
        &self.gamma[vertex - 1]
    }

    /// The values `chi(gamma_i)` of a character of the group.
    pub fn char_values(&self, chi: &Character) -> PointChar {
        PointChar {
            values: self
                .gamma
                .iter()
                .map(|g| self.group.eval_character(chi, g))
                .collect(),
        }
    }

    /// Recovers the character on the normal-form generators from its values
    /// on the `gamma_i` (valid point characters factor through the group).
    pub fn character_from_values(&self, pc: &PointChar) -> Character {
        let values = (0..self.group.gen_count())
            .map(|i| {
                let lift = self.coker.section.column(i);
                let mut acc = QmodZ::zero();
                for (j, c) in lift.iter().enumerate() {
                    acc = acc.add(&pc.values[j].scale(c));
                }
                acc
            })
            .collect();
        Character { values }
    }
}

/// Computes the local homology of a configuration from its Cartan matrix.
///
/// The distinguished generators follow the classical conventions
/// (`gamma_1` for `A_n`, `E_6`, `E_7`; `gamma_n` for odd `D_n`;
/// `gamma_1, gamma_n` for even `D_n`; nothing for `E_8`) and are verified
/// to generate the computed group.
pub fn local_homology(config: &DynkinConfig) -> LocalHomology {
    let coker = cokernel(config.cartan());
    let group = coker.group.clone();
    assert!(group.is_finite(), "Cartan matrices are nondegenerate");
    let n = config.vertex_count();
    let gamma: Vec<GroupElement> = (0..n)
        .map(|v| {
            let mut e = vec![BigInt::zero(); n];
            e[v] = BigInt::one();
            coker.project(&e)
        })
        .collect();
    let distinguished: Vec<usize> = match config.label.family {
        DynkinFamily::A => vec![1],
        DynkinFamily::D => {
            if config.label.index % 2 == 1 {
                vec![n]
            } else {
                vec![1, n]
            }
        }
        DynkinFamily::E => match config.label.index {
            6 | 7 => vec![1],
            _ => vec![],
        },
    };
    let gens: Vec<GroupElement> = distinguished.iter().map(|&v| gamma[v - 1].clone()).collect();
    let sub = subgroup(&group, &gens).expect("distinguished gammas lie in the group");
    assert!(
        sub.quotient.is_trivial(),
        "distinguished generators must generate H_1(x)"
    );
    LocalHomology {
        group,
        gamma,
        distinguished,
        coker,
    }
}

/// One connected component left after deleting vertices, re-identified as a
/// canonical ADE configuration. `vertex_map[i]` is the original vertex now
/// numbered `i + 1`.
#[derive(Clone, Debug)]
pub struct Component {
    pub config: DynkinConfig,
    pub vertex_map: Vec<usize>,
}

/// Result of deleting a vertex set: the components, the quotient map
/// `H_1(x) -> H'_1(x)`, and the patch map from the direct sum of the new
/// local groups onto `H'_1(x)`.
#[derive(Clone, Debug)]
pub struct ShorteningData {
    pub components: Vec<Component>,
    pub quotient_group: FinAbGroup,
    pub quotient: GroupHom,
    pub patch_sum: DirectSumData,
    pub patch: GroupHom,
}

/// Deletes the vertex set `s` from the diagram.
///
/// The components are relabeled deterministically: chains start at the end
/// with the lower original vertex index, the two prongs of a `D` fork are
/// ordered by original index, and for `E_6` the length-2 arm containing the
/// lower original leaf takes positions 2, 1.
pub fn delete_vertices(config: &DynkinConfig, s: &BTreeSet<usize>) -> Result<ShorteningData> {
    if s.is_empty() {
        return input_err("delete_vertices requires a nonempty vertex set");
    }
    for &v in s {
        if v == 0 || v > config.vertex_count() {
            return input_err(format!("vertex {v} is not in {}", config.label));
        }
    }
    let kept: Vec<usize> = config.vertices().filter(|v| !s.contains(v)).collect();

    // Connected components among the kept vertices, in order of their
    // smallest original vertex.
    let mut unvisited: BTreeSet<usize> = kept.iter().copied().collect();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    while let Some(&start) = unvisited.iter().next() {
        let mut stack = vec![start];
        let mut comp = BTreeSet::new();
        unvisited.remove(&start);
        comp.insert(start);
        while let Some(v) = stack.pop() {
            for u in config.neighbors(v) {
                if unvisited.remove(&u) {
                    comp.insert(u);
                    stack.push(u);
                }
            }
        }
        comps.push(comp.into_iter().collect());
    }

    let components: Vec<Component> = comps
        .iter()
        .map(|c| relabel_component(config, c))
        .collect::<Result<_>>()?;

    // H'_1(x) = H_1(x) / <gamma_i : i in s>
    let lh = local_homology(config);
    let gens: Vec<GroupElement> = s.iter().map(|&v| lh.gamma_of(v).clone()).collect();
    let sub = subgroup(&lh.group, &gens)?;
    let quotient_group = sub.quotient.clone();
    let quotient = sub.quotient_proj.clone();

    // Patch: each new gamma'_j maps to the class of the original gamma.
    let comp_homs: Vec<LocalHomology> = components.iter().map(|c| local_homology(&c.config)).collect();
    let groups: Vec<FinAbGroup> = comp_homs.iter().map(|h| h.group.clone()).collect();
    let patch_sum = direct_sum(&groups);
    let mut cols: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..patch_sum.group.gen_count() {
        let ambient = patch_sum.ambient_section.column(i);
        // Ambient coordinates run over the components' normal-form
        // generators; push each through gamma classes into H'_1(x).
        let mut acc = quotient_group.zero();
        let mut offset = 0usize;
        for (comp, homs) in components.iter().zip(&comp_homs) {
            for local_gen in 0..homs.group.gen_count() {
                let c = &ambient[offset + local_gen];
                if !c.is_zero() {
                    // The local generator lifts to a combination of the
                    // component's gammas, which are original gammas.
                    let lift = homs.coker.section.column(local_gen);
                    for (j, l) in lift.iter().enumerate() {
                        let orig = comp.vertex_map[j];
                        let img = quotient.apply(lh.gamma_of(orig));
                        acc = quotient_group.add(&acc, &quotient_group.scale(&(c * l), &img));
                    }
                }
            }
            offset += homs.group.gen_count();
        }
        cols.push(acc.coords);
    }
    let patch_matrix = IntMatrix::from_fn(quotient_group.gen_count(), cols.len(), |i, j| {
        cols[j][i].clone()
    });
    let patch = GroupHom::new(patch_sum.group.clone(), quotient_group.clone(), patch_matrix)?;
    assert!(patch.is_surjective(), "patch map must be onto H'_1(x)");

    Ok(ShorteningData {
        components,
        quotient_group,
        quotient,
        patch_sum,
        patch,
    })
}

fn relabel_component(config: &DynkinConfig, vertices: &[usize]) -> Result<Component> {
    let n = vertices.len();
    let deg = |v: usize| -> usize {
        vertices.iter().filter(|&&u| config.adjacent(u, v)).count()
    };
    let branch: Vec<usize> = vertices.iter().copied().filter(|&v| deg(v) >= 3).collect();

    let vertex_map: Vec<usize>;
    let label: DynkinLabel;
    match branch.len() {
        0 => {
            // A chain. Walk from the endpoint with the smaller original id.
            label = DynkinLabel::a(n);
            if n == 1 {
                vertex_map = vec![vertices[0]];
            } else {
                let ends: Vec<usize> = vertices.iter().copied().filter(|&v| deg(v) == 1).collect();
                assert_eq!(ends.len(), 2, "a chain has two endpoints");
                let start = *ends.iter().min().unwrap();
                vertex_map = walk_chain(config, vertices, start);
            }
        }
        1 => {
            let center = branch[0];
            assert_eq!(deg(center), 3, "ADE subdiagrams fork at most three ways");
            let mut arms: Vec<Vec<usize>> = config
                .neighbors(center)
                .into_iter()
                .filter(|v| vertices.contains(v))
                .map(|first| walk_arm(config, vertices, center, first))
                .collect();
            arms.sort_by_key(|a| (a.len(), *a.last().unwrap()));
            let lens: Vec<usize> = arms.iter().map(Vec::len).collect();
            match lens.as_slice() {
                [1, 1, k] => {
                    label = DynkinLabel::d(k + 3);
                    let mut map = vec![0usize; n];
                    if *k == 1 {
                        // D_4: center is vertex 2, the three leaves take
                        // 1, 3, 4 in original-id order.
                        let mut leaves: Vec<usize> = arms.iter().map(|a| a[0]).collect();
                        leaves.sort_unstable();
                        map[1] = center;
                        map[0] = leaves[0];
                        map[2] = leaves[1];
                        map[3] = leaves[2];
                    } else {
                        map[n - 3] = center; // vertex n-2
                        for (step, &v) in arms[2].iter().enumerate() {
                            map[n - 4 - step] = v; // n-3, n-4, ..., 1
                        }
                        let mut prongs = [arms[0][0], arms[1][0]];
                        prongs.sort_unstable();
                        map[n - 2] = prongs[0];
                        map[n - 1] = prongs[1];
                    }
                    vertex_map = map;
                }
                [1, 2, 2] => {
                    label = DynkinLabel::e(6);
                    let mut map = vec![0usize; 6];
                    map[2] = center;
                    map[3] = arms[0][0];
                    // arms[1] has the smaller leaf (sort key); it takes 2, 1.
                    map[1] = arms[1][0];
                    map[0] = arms[1][1];
                    map[4] = arms[2][0];
                    map[5] = arms[2][1];
                    vertex_map = map;
                }
                [1, 2, 3] => {
                    label = DynkinLabel::e(7);
                    let mut map = vec![0usize; 7];
                    map[3] = center;
                    map[6] = arms[0][0];
                    map[4] = arms[1][0];
                    map[5] = arms[1][1];
                    map[2] = arms[2][0];
                    map[1] = arms[2][1];
                    map[0] = arms[2][2];
                    vertex_map = map;
                }
                [1, 2, 4] => {
                    label = DynkinLabel::e(8);
                    let mut map = vec![0usize; 8];
                    map[4] = center;
                    map[7] = arms[0][0];
                    map[5] = arms[1][0];
                    map[6] = arms[1][1];
                    map[3] = arms[2][0];
                    map[2] = arms[2][1];
                    map[1] = arms[2][2];
                    map[0] = arms[2][3];
                    vertex_map = map;
                }
                other => unreachable!("arm profile {other:?} cannot arise from an ADE diagram"),
            }
        }
        _ => unreachable!("ADE subdiagrams have at most one branch vertex"),
    }

    let cfg = DynkinConfig::new(label);
    // The relabeling must be a graph isomorphism onto the canonical diagram.
    for i in 0..n {
        for j in 0..n {
            if i != j {
                debug_assert_eq!(
                    cfg.adjacent(i + 1, j + 1),
                    config.adjacent(vertex_map[i], vertex_map[j]),
                    "relabeling of {label} is not an isomorphism"
                );
            }
        }
    }
    Ok(Component {
        config: cfg,
        vertex_map,
    })
}

fn walk_chain(config: &DynkinConfig, vertices: &[usize], start: usize) -> Vec<usize> {
    let mut order = vec![start];
    let mut prev = 0usize;
    let mut cur = start;
    loop {
        let next = config
            .neighbors(cur)
            .into_iter()
            .find(|&u| u != prev && vertices.contains(&u));
        match next {
            Some(u) => {
                order.push(u);
                prev = cur;
                cur = u;
            }
            None => break,
        }
    }
    order
}

fn walk_arm(config: &DynkinConfig, vertices: &[usize], center: usize, first: usize) -> Vec<usize> {
    let mut arm = vec![first];
    let mut prev = center;
    let mut cur = first;
    loop {
        let next = config
            .neighbors(cur)
            .into_iter()
            .find(|&u| u != prev && vertices.contains(&u));
        match next {
            Some(u) => {
                arm.push(u);
                prev = cur;
                cur = u;
            }
            None => break,
        }
    }
    arm
}

/// Maximum number of pairwise nonadjacent vertices, by exact dynamic
/// programming on the tree.
pub fn delta_independent(config: &DynkinConfig) -> usize {
    let n = config.vertex_count();
    if n == 0 {
        return 0;
    }
    // dp[v] = (best excluding v, best including v) over the subtree at v.
    fn dp(config: &DynkinConfig, v: usize, parent: usize) -> (usize, usize) {
        let mut excl = 0;
        let mut incl = 1;
        for u in config.neighbors(v) {
            if u == parent {
                continue;
            }
            let (e, i) = dp(config, u, v);
            excl += e.max(i);
            incl += e;
        }
        (excl, incl)
    }
    let (e, i) = dp(config, 1, 0);
    e.max(i)
}

/// Self-intersection of the branch divisor of an order-`n` character,
/// from the classified tables (`n` must be 2 or 3).
///
/// For even `D_{2m}` the subtype is read off the character:
/// subtype `(-)` when `gamma_1` maps to zero (giving -4), subtype `(+)`
/// otherwise (giving -2m).
pub fn branch_self_intersection(
    label: &DynkinLabel,
    chi: &PointChar,
    n: u32,
) -> Result<BigInt> {
    let order = chi.order();
    if order != BigUint::from(n) {
        return input_err(format!(
            "character has order {order}, expected exactly {n}"
        ));
    }
    match (n, label.family) {
        (2, DynkinFamily::A) => {
            if label.index.is_multiple_of(2) {
                input_err(format!("{label} admits no order-2 character"))
            } else {
                let m = (label.index - 1) / 2;
                Ok(BigInt::from(-2 * (m as i64 + 1)))
            }
        }
        (2, DynkinFamily::D) => {
            // Odd D_n and subtype (-) of even D_n share the value -4.
            if label.index % 2 == 1 || chi.value(1).is_zero() {
                Ok(BigInt::from(-4))
            } else {
                Ok(BigInt::from(-(label.index as i64)))
            }
        }
        (2, DynkinFamily::E) if label.index == 7 => Ok(BigInt::from(-6)),
        (3, DynkinFamily::A) => {
            if !(label.index + 1).is_multiple_of(3) {
                input_err(format!("{label} admits no order-3 character"))
            } else {
                let s = (label.index + 1) / 3;
                Ok(BigInt::from(-6 * s as i64))
            }
        }
        (3, DynkinFamily::E) if label.index == 6 => Ok(BigInt::from(-12)),
        _ => input_err(format!(
            "no branch divisor table entry for {label} at order {n}"
        )),
    }
}

/// The closed-form local homology type, used as the exhaustive cross-check
/// target for [`local_homology`].
pub fn expected_local_group(label: &DynkinLabel) -> FinAbGroup {
    match label.family {
        DynkinFamily::A => FinAbGroup::cyclic(label.index as u64 + 1),
        DynkinFamily::D => {
            if label.index % 2 == 1 {
                FinAbGroup::cyclic(4)
            } else {
                FinAbGroup::from_cyclic_orders(&[BigUint::from(2u32), BigUint::from(2u32)])
            }
        }
        DynkinFamily::E => match label.index {
            6 => FinAbGroup::cyclic(3),
            7 => FinAbGroup::cyclic(2),
            _ => FinAbGroup::trivial(),
        },
    }
}

/// All ADE labels with index at most `max_index`.
pub fn all_labels_up_to(max_index: usize) -> Vec<DynkinLabel> {
    let mut out = Vec::new();
    for n in 1..=max_index {
        out.push(DynkinLabel::a(n));
    }
    for n in 4..=max_index {
        out.push(DynkinLabel::d(n));
    }
    for n in 6..=8.min(max_index) {
        out.push(DynkinLabel::e(n));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn lh(label: DynkinLabel) -> LocalHomology {
        local_homology(&DynkinConfig::new(label))
    }

    #[test]
    fn homology_matches_closed_form_up_to_index_12() {
        for label in all_labels_up_to(12) {
            let h = lh(label);
            assert_eq!(h.group, expected_local_group(&label), "label {label}");
        }
    }

    #[test]
    fn gamma_relations_a_series() {
        for n in 1..=12 {
            let h = lh(DynkinLabel::a(n));
            let g1 = h.gamma_of(1).clone();
            for j in 1..=n {
                let expect = h.group.scale(&BigInt::from(j), &g1);
                assert_eq!(*h.gamma_of(j), expect, "A_{n}: gamma_{j} = {j} gamma_1");
            }
        }
    }

    #[test]
    fn gamma_relations_d_series() {
        for n in 4..=12 {
            let h = lh(DynkinLabel::d(n));
            let g1 = h.gamma_of(1).clone();
            let gn = h.gamma_of(n).clone();
            let two = BigInt::from(2);
            assert!(h.group.is_zero_elem(&h.group.scale(&two, &g1)));
            assert_eq!(
                h.group.scale(&two, &gn),
                h.group.scale(&BigInt::from(n as i64 - 2), &g1)
            );
            assert_eq!(*h.gamma_of(n - 1), h.group.add(&g1, &gn));
            if n % 2 == 1 {
                assert_eq!(h.group.element_order(&gn).unwrap(), BigUint::from(4u32));
            }
        }
    }

    #[test]
    fn gamma_relations_e_series() {
        let h = lh(DynkinLabel::e(6));
        assert_eq!(h.gamma_of(1), h.gamma_of(5));
        let twice = h.group.scale(&BigInt::from(2), h.gamma_of(1));
        assert_eq!(*h.gamma_of(2), twice);
        assert_eq!(*h.gamma_of(6), twice);
        assert!(h.group.is_zero_elem(h.gamma_of(3)));
        assert!(h.group.is_zero_elem(h.gamma_of(4)));

        let h = lh(DynkinLabel::e(7));
        assert_eq!(h.gamma_of(1), h.gamma_of(3));
        assert_eq!(h.gamma_of(1), h.gamma_of(7));
        for v in [2, 4, 5, 6] {
            assert!(h.group.is_zero_elem(h.gamma_of(v)), "E7 gamma_{v} = 0");
        }

        let h = lh(DynkinLabel::e(8));
        assert!(h.group.is_trivial());
    }

    #[test]
    fn delete_middle_of_a5() {
        let cfg = DynkinConfig::new(DynkinLabel::a(5));
        let s: BTreeSet<usize> = [3].into_iter().collect();
        let data = delete_vertices(&cfg, &s).unwrap();
        let labels: Vec<DynkinLabel> = data.components.iter().map(|c| c.config.label).collect();
        assert_eq!(labels, vec![DynkinLabel::a(2), DynkinLabel::a(2)]);
        // gcd(m+1, n-m) with n = 5, m = 2.
        assert_eq!(data.quotient_group, FinAbGroup::cyclic(3));
        // Patch kernel order = lcm(n-m, m+1) = 3.
        let total = data.patch_sum.group.order().unwrap();
        let target = data.quotient_group.order().unwrap();
        assert_eq!(total / target, BigUint::from(3u32));
    }

    #[test]
    fn delete_center_of_e6() {
        let cfg = DynkinConfig::new(DynkinLabel::e(6));
        let s: BTreeSet<usize> = [3].into_iter().collect();
        let data = delete_vertices(&cfg, &s).unwrap();
        let mut labels: Vec<DynkinLabel> = data.components.iter().map(|c| c.config.label).collect();
        labels.sort();
        assert_eq!(
            labels,
            vec![DynkinLabel::a(1), DynkinLabel::a(2), DynkinLabel::a(2)]
        );
        // gamma_3 = 3 gamma_1 = 0 in Z/3, so the quotient keeps all of Z/3;
        // the two A_2 components patch onto it.
        assert_eq!(data.quotient_group, FinAbGroup::cyclic(3));

        // Deleting vertex 1 or 2 does kill the group (gamma_1, gamma_2
        // generate), yielding D_5 resp. A_1 + A_4.
        let d = delete_vertices(&cfg, &[1].into_iter().collect()).unwrap();
        assert!(d.quotient_group.is_trivial());
        assert_eq!(d.components[0].config.label, DynkinLabel::d(5));
        let d = delete_vertices(&cfg, &[2].into_iter().collect()).unwrap();
        assert!(d.quotient_group.is_trivial());
        let mut labels: Vec<DynkinLabel> = d.components.iter().map(|c| c.config.label).collect();
        labels.sort();
        assert_eq!(labels, vec![DynkinLabel::a(1), DynkinLabel::a(4)]);
    }

    #[test]
    fn delete_patterns_of_d_series() {
        // Deleting the prong n gives A_{n-1}.
        let cfg = DynkinConfig::new(DynkinLabel::d(6));
        let data = delete_vertices(&cfg, &[6].into_iter().collect()).unwrap();
        assert_eq!(data.components.len(), 1);
        assert_eq!(data.components[0].config.label, DynkinLabel::a(5));

        // Deleting an interior chain vertex gives D_m + A_{n-m-1}.
        let data = delete_vertices(&cfg, &[2].into_iter().collect()).unwrap();
        let mut labels: Vec<DynkinLabel> = data.components.iter().map(|c| c.config.label).collect();
        labels.sort();
        assert_eq!(labels, vec![DynkinLabel::a(1), DynkinLabel::d(4)]);

        // Deleting the fork vertex n-2 gives A_1 + A_1 + A_{n-3}.
        let data = delete_vertices(&cfg, &[4].into_iter().collect()).unwrap();
        let mut labels: Vec<DynkinLabel> = data.components.iter().map(|c| c.config.label).collect();
        labels.sort();
        assert_eq!(
            labels,
            vec![DynkinLabel::a(1), DynkinLabel::a(1), DynkinLabel::a(3)]
        );
    }

    #[test]
    fn delete_end_vertex_of_a5() {
        let cfg = DynkinConfig::new(DynkinLabel::a(5));
        let data = delete_vertices(&cfg, &[1].into_iter().collect()).unwrap();
        assert_eq!(data.components.len(), 1);
        assert_eq!(data.components[0].config.label, DynkinLabel::a(4));
        assert!(data.quotient_group.is_trivial());
    }

    #[test]
    fn shortening_quotient_table_for_a_series() {
        // H'_1 = Z/gcd(m+1, n-m) and the patch kernel has order
        // lcm(n-m, m+1), for every deleted vertex of every A_n.
        for n in 1..=10usize {
            let cfg = DynkinConfig::new(DynkinLabel::a(n));
            for del in 1..=n {
                let m = del - 1;
                let data = delete_vertices(&cfg, &[del].into_iter().collect()).unwrap();
                let g = num_integer::Integer::gcd(&(m + 1), &(n - m));
                let l = num_integer::Integer::lcm(&((n - m).max(1)), &(m + 1));
                assert_eq!(
                    data.quotient_group,
                    FinAbGroup::cyclic(g.max(1) as u64),
                    "A_{n} delete {del}"
                );
                let total = data.patch_sum.group.order().unwrap();
                let target = data.quotient_group.order().unwrap();
                assert_eq!(total / target, BigUint::from(l), "A_{n} delete {del} kernel");
            }
        }
    }

    #[test]
    fn rank_decreases_under_deletion() {
        for label in all_labels_up_to(8) {
            let cfg = DynkinConfig::new(label);
            for v in cfg.vertices() {
                let data = delete_vertices(&cfg, &[v].into_iter().collect()).unwrap();
                let new_rank: usize = data.components.iter().map(|c| c.config.vertex_count()).sum();
                assert_eq!(new_rank, label.vertex_count() - 1);
            }
        }
    }

    #[test]
    fn independent_set_sizes() {
        assert_eq!(delta_independent(&DynkinConfig::new(DynkinLabel::e(6))), 3);
        assert_eq!(delta_independent(&DynkinConfig::new(DynkinLabel::e(7))), 4);
        assert_eq!(delta_independent(&DynkinConfig::new(DynkinLabel::e(8))), 4);
        assert_eq!(delta_independent(&DynkinConfig::new(DynkinLabel::a(4))), 2);
        assert_eq!(delta_independent(&DynkinConfig::new(DynkinLabel::d(4))), 3);
    }

    #[test]
    fn independent_set_matches_brute_force() {
        // Independent oracle: enumerate all vertex subsets.
        fn brute(config: &DynkinConfig) -> usize {
            let n = config.vertex_count();
            let mut best = 0;
            for mask in 0u32..(1 << n) {
                let verts: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
                let ok = verts
                    .iter()
                    .all(|&u| verts.iter().all(|&v| u == v || !config.adjacent(u, v)));
                if ok {
                    best = best.max(verts.len());
                }
            }
            best
        }
        for label in all_labels_up_to(12) {
            let cfg = DynkinConfig::new(label);
            assert_eq!(delta_independent(&cfg), brute(&cfg), "label {label}");
        }
    }

    #[test]
    fn branch_self_intersections() {
        // A_3, order-2 character: -2(m+1) with m = 1.
        let cfg = DynkinConfig::new(DynkinLabel::a(3));
        let h = local_homology(&cfg);
        let chi = h.char_values(
            &h.group
                .character(vec![QmodZ::new(BigInt::from(1), BigInt::from(2))])
                .unwrap(),
        );
        assert_eq!(
            branch_self_intersection(&DynkinLabel::a(3), &chi, 2).unwrap(),
            BigInt::from(-4)
        );

        // D_6: subtype(-) when gamma_1 dies, subtype(+) otherwise.
        let cfg = DynkinConfig::new(DynkinLabel::d(6));
        let h = local_homology(&cfg);
        let mut found_minus = false;
        let mut found_plus = false;
        for chi in h.group.dual_basis() {
            // Run over all 3 nonzero characters of (Z/2)^2.
            for k in 1..4u32 {
                let a = BigInt::from(k & 1);
                let b = BigInt::from(k >> 1 & 1);
                let values = vec![
                    chi.values[0].scale(&a).add(&h.group.dual_basis()[1].values[0].scale(&b)),
                    chi.values[1].scale(&a).add(&h.group.dual_basis()[1].values[1].scale(&b)),
                ];
                let full = h.group.character(values).unwrap();
                let pc = h.char_values(&full);
                if pc.is_zero() {
                    continue;
                }
                let bx = branch_self_intersection(&DynkinLabel::d(6), &pc, 2).unwrap();
                if pc.value(1).is_zero() {
                    assert_eq!(bx, BigInt::from(-4));
                    found_minus = true;
                } else {
                    assert_eq!(bx, BigInt::from(-6));
                    found_plus = true;
                }
            }
            break;
        }
        assert!(found_minus && found_plus);

        // E_6, order-3 character: -12.
        let cfg = DynkinConfig::new(DynkinLabel::e(6));
        let h = local_homology(&cfg);
        let chi = h.char_values(&h.group.dual_basis()[0]);
        assert_eq!(
            branch_self_intersection(&DynkinLabel::e(6), &chi, 3).unwrap(),
            BigInt::from(-12)
        );

        // Order mismatch is an input error.
        assert!(branch_self_intersection(&DynkinLabel::e(6), &chi, 2).is_err());
    }

    #[test]
    fn char_validation_and_roundtrip() {
        let cfg = DynkinConfig::new(DynkinLabel::a(3));
        let h = local_homology(&cfg);
        // chi(gamma_j) = j/4 is a valid character of Z/4.
        let values: Vec<QmodZ> = (1..=3).map(|j| QmodZ::new(BigInt::from(j), BigInt::from(4))).collect();
        let pc = cfg.validate_char(values).unwrap();
        let chi = h.character_from_values(&pc);
        assert_eq!(h.char_values(&chi), pc);

        // chi(gamma_j) = 1/4 constant violates gamma_2 = 2 gamma_1.
        let bad: Vec<QmodZ> = (0..3).map(|_| QmodZ::new(BigInt::from(1), BigInt::from(4))).collect();
        assert!(cfg.validate_char(bad).is_err());
    }
}
