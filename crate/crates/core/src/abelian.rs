//! Finitely generated abelian groups in invariant-factor normal form.
//!
//! A group is `Z/d_1 + Z/d_2 + ... + Z/d_k + Z^f` with `d_1 | d_2 | ... | d_k`
//! and every `d_i >= 2`; the trivial group is the empty factor list with free
//! rank zero. Elements are coordinate tuples (torsion residues first, then
//! free integers), characters take values in Q/Z, and homomorphisms are
//! integer matrices acting on coordinates.
//!
//! Cokernels, subgroups, quotients and primary components all reduce to the
//! Smith normal form of an integer relation matrix; the unimodular transforms
//! give the projection onto the normal form and an explicit section back.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::matrix::{smith_normal_form, IntMatrix};
use crate::{input_err, Result};

/// An exact element of Q/Z, stored as a reduced fraction in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QmodZ(BigRational);

impl QmodZ {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Self::from_ratio(BigRational::new(num, den))
    }

    pub fn from_ratio(r: BigRational) -> Self {
        let f = r.floor();
        QmodZ(r - f)
    }

    pub fn zero() -> Self {
        QmodZ(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, other: &QmodZ) -> QmodZ {
        Self::from_ratio(&self.0 + &other.0)
    }

    pub fn neg(&self) -> QmodZ {
        Self::from_ratio(-self.0.clone())
    }

    pub fn scale(&self, k: &BigInt) -> QmodZ {
        Self::from_ratio(&self.0 * k)
    }

    /// The additive order, i.e. the reduced denominator.
    pub fn order(&self) -> BigUint {
        self.0
            .denom()
            .to_biguint()
            .expect("normalized denominator is positive")
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Display for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A finitely generated abelian group in invariant-factor normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinAbGroup {
    factors: Vec<BigUint>,
    free_rank: usize,
}

/// An element, as the coordinate tuple with respect to the normal-form
/// generators: one residue per invariant factor, then the free coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GroupElement {
    pub coords: Vec<BigInt>,
}

/// A character of the torsion part: one Q/Z value per invariant factor,
/// with the slot-`i` denominator dividing `d_i`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Character {
    pub values: Vec<QmodZ>,
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        FinAbGroup {
            factors: Vec::new(),
            free_rank: 0,
        }
    }

    pub fn free(rank: usize) -> Self {
        FinAbGroup {
            factors: Vec::new(),
            free_rank: rank,
        }
    }

    /// Constructs from invariant factors that already satisfy the chain.
    pub fn from_invariant_factors(factors: Vec<BigUint>, free_rank: usize) -> Result<Self> {
        for w in factors.windows(2) {
            if !w[1].is_multiple_of(&w[0]) {
                return input_err(format!("invariant factors violate divisibility: {} ∤ {}", w[0], w[1]));
            }
        }
        if factors.iter().any(|d| *d <= BigUint::one()) {
            return input_err("invariant factors must be >= 2");
        }
        Ok(FinAbGroup { factors, free_rank })
    }

    /// Normalizes an arbitrary list of cyclic orders into invariant factors,
    /// e.g. `[2, 3]` becomes `Z/6`.
    pub fn from_cyclic_orders(orders: &[BigUint]) -> Self {
        let n = orders.len();
        let m = IntMatrix::from_fn(n, n, |i, j| {
            if i == j {
                BigInt::from(orders[i].clone())
            } else {
                BigInt::zero()
            }
        });
        cokernel(&m).group
    }

    pub fn cyclic(n: u64) -> Self {
        assert!(n >= 1);
        if n == 1 {
            Self::trivial()
        } else {
            FinAbGroup {
                factors: vec![BigUint::from(n)],
                free_rank: 0,
            }
        }
    }

    pub fn invariant_factors(&self) -> &[BigUint] {
        &self.factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty() && self.free_rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Number of normal-form generators (torsion then free).
    pub fn gen_count(&self) -> usize {
        self.factors.len() + self.free_rank
    }

    pub fn order(&self) -> Option<BigUint> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.factors.iter().product())
    }

    /// Exponent of the torsion part (1 for torsion-free groups).
    pub fn exponent(&self) -> BigUint {
        self.factors.last().cloned().unwrap_or_else(BigUint::one)
    }

    /// Relation matrix: columns `d_i * e_i`, one per invariant factor.
    pub fn relations(&self) -> IntMatrix {
        IntMatrix::from_fn(self.gen_count(), self.factors.len(), |i, j| {
            if i == j {
                BigInt::from(self.factors[j].clone())
            } else {
                BigInt::zero()
            }
        })
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![BigInt::zero(); self.gen_count()],
        }
    }

    /// The `i`-th normal-form generator.
    pub fn generator(&self, i: usize) -> GroupElement {
        let mut z = self.zero();
        z.coords[i] = BigInt::one();
        z
    }

    pub fn reduce(&self, mut coords: Vec<BigInt>) -> GroupElement {
        assert_eq!(coords.len(), self.gen_count(), "coordinate length mismatch");
        for (i, d) in self.factors.iter().enumerate() {
            coords[i] = coords[i].mod_floor(&BigInt::from(d.clone()));
        }
        GroupElement { coords }
    }

    pub fn element(&self, coords: Vec<BigInt>) -> GroupElement {
        self.reduce(coords)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.reduce(
            a.coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| x + y)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.reduce(a.coords.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, k: &BigInt, a: &GroupElement) -> GroupElement {
        self.reduce(a.coords.iter().map(|x| x * k).collect())
    }

    pub fn is_zero_elem(&self, a: &GroupElement) -> bool {
        a.coords.iter().all(Zero::is_zero)
    }

    /// Additive order; `None` when the element has infinite order.
    pub fn element_order(&self, a: &GroupElement) -> Option<BigUint> {
        if a.coords[self.factors.len()..].iter().any(|c| !c.is_zero()) {
            return None;
        }
        let mut ord = BigUint::one();
        for (i, d) in self.factors.iter().enumerate() {
            let r = a.coords[i].to_biguint().expect("residues are reduced");
            if r.is_zero() {
                continue;
            }
            let o = d / r.gcd(d);
            ord = ord.lcm(&o);
        }
        Some(ord)
    }

    /// Iterates all elements of a finite group in mixed-radix order.
    pub fn elements(&self) -> Vec<GroupElement> {
        assert!(self.is_finite(), "cannot enumerate an infinite group");
        let mut out = vec![self.zero()];
        for (i, d) in self.factors.iter().enumerate() {
            let d = BigInt::from(d.clone());
            let mut next = Vec::new();
            for e in &out {
                let mut r = BigInt::zero();
                while r < d {
                    let mut c = e.coords.clone();
                    c[i] = r.clone();
                    next.push(GroupElement { coords: c });
                    r += 1;
                }
            }
            out = next;
        }
        out
    }

    /// Evaluates a character on an element of this group.
    pub fn eval_character(&self, chi: &Character, a: &GroupElement) -> QmodZ {
        assert_eq!(chi.values.len(), self.factors.len());
        let mut acc = QmodZ::zero();
        for (i, v) in chi.values.iter().enumerate() {
            acc = acc.add(&v.scale(&a.coords[i]));
        }
        acc
    }

    /// Validates that `values` defines a character (slot denominators divide
    /// the invariant factors).
    pub fn character(&self, values: Vec<QmodZ>) -> Result<Character> {
        if values.len() != self.factors.len() {
            return input_err("character value count must match invariant factors");
        }
        for (v, d) in values.iter().zip(&self.factors) {
            if !d.is_multiple_of(&v.order()) {
                return input_err(format!("character value {v} has order not dividing {d}"));
            }
        }
        Ok(Character { values })
    }

    /// The dual basis characters: `chi_i(g_j) = delta_ij / d_i`.
    pub fn dual_basis(&self) -> Vec<Character> {
        assert!(self.is_finite(), "characters of the torsion part only");
        (0..self.factors.len())
            .map(|i| Character {
                values: (0..self.factors.len())
                    .map(|j| {
                        if i == j {
                            QmodZ::new(BigInt::one(), BigInt::from(self.factors[i].clone()))
                        } else {
                            QmodZ::zero()
                        }
                    })
                    .collect(),
            })
            .collect()
    }

    /// The character group; abstractly isomorphic to the group itself.
    pub fn character_group(&self) -> FinAbGroup {
        assert!(self.is_finite());
        self.clone()
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        for _ in 0..self.free_rank {
            parts.push("Z".to_string());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A homomorphism between groups in normal form. Column `i` of `matrix` is
/// the image of the `i`-th source generator, in target coordinates.
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub source: FinAbGroup,
    pub target: FinAbGroup,
    pub matrix: IntMatrix,
}

impl GroupHom {
    /// Checks well-definedness: each source relation `d_i e_i` must map to
    /// zero in the target.
    pub fn new(source: FinAbGroup, target: FinAbGroup, matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != target.gen_count() || matrix.cols() != source.gen_count() {
            return input_err("homomorphism matrix shape mismatch");
        }
        let t_tors = target.invariant_factors().len();
        for (i, d) in source.invariant_factors().iter().enumerate() {
            let d = BigInt::from(d.clone());
            for r in 0..matrix.rows() {
                let x = &matrix[(r, i)] * &d;
                let ok = if r < t_tors {
                    x.is_multiple_of(&BigInt::from(target.invariant_factors()[r].clone()))
                } else {
                    x.is_zero()
                };
                if !ok {
                    return input_err(format!(
                        "matrix does not define a homomorphism: relation {d}·g_{i} survives"
                    ));
                }
            }
        }
        Ok(GroupHom { source, target, matrix })
    }

    pub fn apply(&self, a: &GroupElement) -> GroupElement {
        self.target.reduce(self.matrix.mul_vec(&a.coords))
    }

    pub fn compose(&self, inner: &GroupHom) -> Result<GroupHom> {
        if inner.target != self.source {
            return input_err("composition mismatch");
        }
        GroupHom::new(
            inner.source.clone(),
            self.target.clone(),
            self.matrix.mul(&inner.matrix),
        )
    }

    pub fn is_surjective(&self) -> bool {
        // Target modulo (image + target relations) must vanish.
        let stacked = self.matrix.hconcat(&self.target.relations());
        let coker = cokernel(&stacked);
        coker.group.is_trivial()
    }

    /// Pullback of a character on the target.
    pub fn pullback(&self, chi: &Character) -> Character {
        let values = (0..self.source.gen_count())
            .map(|i| {
                let img = self.target.reduce(self.matrix.column(i));
                self.target.eval_character(chi, &img)
            })
            .collect::<Vec<_>>();
        // Free source generators admit no torsion character slots; the
        // callers only pull back along maps out of finite groups or keep
        // the full value list for ambient free groups.
        Character { values }
    }
}

/// A cokernel `Z^n / im(M)` together with the projection from the ambient
/// `Z^n` and a section lifting each normal-form generator back to `Z^n`.
#[derive(Clone, Debug)]
pub struct CokernelData {
    pub group: FinAbGroup,
    /// `gen_count x n`: ambient coordinates to group coordinates.
    pub projection: IntMatrix,
    /// `n x gen_count`: integer lifts of the group generators.
    pub section: IntMatrix,
}

impl CokernelData {
    pub fn project(&self, v: &[BigInt]) -> GroupElement {
        self.group.reduce(self.projection.mul_vec(v))
    }

    pub fn lift(&self, a: &GroupElement) -> Vec<BigInt> {
        self.section.mul_vec(&a.coords)
    }

    /// The projection as a homomorphism from the free ambient group.
    pub fn projection_hom(&self) -> GroupHom {
        GroupHom::new(
            FinAbGroup::free(self.projection.cols()),
            self.group.clone(),
            self.projection.clone(),
        )
        .expect("projection is always a homomorphism from a free group")
    }
}

/// Cokernel of an integer matrix: `Z^rows / (column span of M)`.
pub fn cokernel(m: &IntMatrix) -> CokernelData {
    let snf = smith_normal_form(m);
    let n = m.rows();
    let mut torsion_slots = Vec::new();
    for i in 0..snf.rank {
        if snf.d[(i, i)] > BigInt::one() {
            torsion_slots.push(i);
        }
    }
    let free_slots: Vec<usize> = (snf.rank..n).collect();
    let factors: Vec<BigUint> = torsion_slots
        .iter()
        .map(|&i| snf.d[(i, i)].to_biguint().expect("diagonal is nonnegative"))
        .collect();
    let group = FinAbGroup {
        factors,
        free_rank: free_slots.len(),
    };
    let slots: Vec<usize> = torsion_slots.iter().chain(free_slots.iter()).copied().collect();
    let projection = IntMatrix::from_fn(slots.len(), n, |r, c| snf.u[(slots[r], c)].clone());
    let section = IntMatrix::from_fn(n, slots.len(), |r, c| snf.u_inv[(r, slots[c])].clone());
    CokernelData {
        group,
        projection,
        section,
    }
}

/// A subgroup `⟨gens⟩ <= A` with its abstract normal form, a membership
/// test, and the quotient `A/⟨gens⟩` with projection.
#[derive(Clone, Debug)]
pub struct SubgroupData {
    pub ambient: FinAbGroup,
    pub gens: Vec<GroupElement>,
    pub group: FinAbGroup,
    pub quotient: FinAbGroup,
    pub quotient_proj: GroupHom,
    gen_matrix: IntMatrix,
}

impl SubgroupData {
    pub fn contains(&self, v: &GroupElement) -> bool {
        let m = self.gen_matrix.hconcat(&self.ambient.relations());
        crate::matrix::solve(&m, &v.coords).is_some()
    }
}

pub fn subgroup(ambient: &FinAbGroup, gens: &[GroupElement]) -> Result<SubgroupData> {
    let k = ambient.gen_count();
    for g in gens {
        if g.coords.len() != k {
            return input_err("generator does not belong to the ambient group");
        }
        for (i, d) in ambient.invariant_factors().iter().enumerate() {
            let d = BigInt::from(d.clone());
            if g.coords[i].is_negative() || g.coords[i] >= d {
                return input_err("generator residues must be reduced");
            }
        }
    }
    let gen_matrix = IntMatrix::from_fn(k, gens.len(), |i, j| gens[j].coords[i].clone());
    let rel = ambient.relations();

    // Quotient A / <gens>.
    let coker = cokernel(&gen_matrix.hconcat(&rel));
    let quotient = coker.group.clone();
    let proj = IntMatrix::from_fn(quotient.gen_count(), k, |r, c| coker.projection[(r, c)].clone());
    let quotient_proj = GroupHom::new(ambient.clone(), quotient.clone(), proj)?;

    // Abstract subgroup: Z^g modulo the lattice of relations among the
    // generators inside A.
    let combined = gen_matrix.hconcat(&rel);
    let ker = crate::matrix::kernel_basis(&combined);
    let rel_cols: Vec<Vec<BigInt>> = ker.iter().map(|v| v[..gens.len()].to_vec()).collect();
    let rel_matrix = IntMatrix::from_fn(gens.len(), rel_cols.len(), |i, j| rel_cols[j][i].clone());
    let group = cokernel(&rel_matrix).group;

    Ok(SubgroupData {
        ambient: ambient.clone(),
        gens: gens.to_vec(),
        group,
        quotient,
        quotient_proj,
        gen_matrix,
    })
}

/// The `p`-primary (Sylow) summand of a finite group, with the inclusion
/// and the CRT projection realizing `A = A_p + A_p'`.
pub fn primary_component(a: &FinAbGroup, p: &BigUint) -> Result<(FinAbGroup, GroupHom, GroupHom)> {
    if !a.is_finite() {
        return input_err("primary components require a finite group");
    }
    if !is_prime(p) {
        return input_err(format!("{p} is not prime"));
    }
    let mut p_factors = Vec::new();
    let mut slots = Vec::new();
    let mut idempotents = Vec::new();
    for (i, d) in a.invariant_factors().iter().enumerate() {
        let mut q = BigUint::one();
        let mut rest = d.clone();
        while rest.is_multiple_of(p) {
            rest /= p;
            q *= p;
        }
        if q > BigUint::one() {
            // CRT idempotent e with e = 1 mod q, e = 0 mod rest.
            let e = if rest.is_one() {
                BigInt::one()
            } else {
                let inv = mod_inverse(&BigInt::from(rest.clone()), &BigInt::from(q.clone()))
                    .expect("rest is invertible modulo the p-part");
                (BigInt::from(rest.clone()) * inv).mod_floor(&BigInt::from(d.clone()))
            };
            p_factors.push(q);
            slots.push(i);
            idempotents.push(e);
        }
    }
    let comp = FinAbGroup {
        factors: p_factors,
        free_rank: 0,
    };
    let incl = IntMatrix::from_fn(a.gen_count(), comp.gen_count(), |r, c| {
        if r == slots[c] {
            idempotents[c].clone()
        } else {
            BigInt::zero()
        }
    });
    let proj = IntMatrix::from_fn(comp.gen_count(), a.gen_count(), |r, c| {
        if slots[r] == c {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    });
    let inclusion = GroupHom::new(comp.clone(), a.clone(), incl)?;
    let projection = GroupHom::new(a.clone(), comp.clone(), proj)?;
    Ok((comp, inclusion, projection))
}

/// Direct sum in normal form, with the inclusion of each summand.
#[derive(Clone, Debug)]
pub struct DirectSumData {
    pub group: FinAbGroup,
    pub inclusions: Vec<GroupHom>,
    /// Ambient coordinates: concatenation of the summands' generators.
    pub ambient_projection: IntMatrix,
    pub ambient_section: IntMatrix,
    pub summand_offsets: Vec<usize>,
}

pub fn direct_sum(groups: &[FinAbGroup]) -> DirectSumData {
    let mut offsets = Vec::new();
    let mut total = 0usize;
    for g in groups {
        offsets.push(total);
        total += g.gen_count();
    }
    let mut rel_cols: Vec<Vec<BigInt>> = Vec::new();
    for (g, &off) in groups.iter().zip(&offsets) {
        for (i, d) in g.invariant_factors().iter().enumerate() {
            let mut col = vec![BigInt::zero(); total];
            col[off + i] = BigInt::from(d.clone());
            rel_cols.push(col);
        }
    }
    let rel = IntMatrix::from_fn(total, rel_cols.len(), |i, j| rel_cols[j][i].clone());
    let coker = cokernel(&rel);
    let inclusions = groups
        .iter()
        .zip(&offsets)
        .map(|(g, &off)| {
            let m = IntMatrix::from_fn(coker.group.gen_count(), g.gen_count(), |r, c| {
                coker.projection[(r, off + c)].clone()
            });
            GroupHom::new(g.clone(), coker.group.clone(), m)
                .expect("inclusion into a direct sum is a homomorphism")
        })
        .collect();
    DirectSumData {
        group: coker.group,
        inclusions,
        ambient_projection: coker.projection,
        ambient_section: coker.section,
        summand_offsets: offsets,
    }
}

pub(crate) fn is_prime(n: &BigUint) -> bool {
    if *n < BigUint::from(2u32) {
        return false;
    }
    let two = BigUint::from(2u32);
    if n.is_multiple_of(&two) {
        return *n == two;
    }
    let mut d = BigUint::from(3u32);
    while &d * &d <= *n {
        if n.is_multiple_of(&d) {
            return false;
        }
        d += 2u32;
    }
    true
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}
