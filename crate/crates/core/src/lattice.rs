//! Even negative-definite ADE blocks with a polarization class,
//! discriminant forms, overlattice glue groups and saturation codes.
//!
//! The discriminant group of a nondegenerate Gram matrix is its cokernel,
//! with the class of `e_i` identified with the dual vector `G^{-1} e_i`;
//! bilinear values live in Q/Z and quadratic values in Q/2Z. Quadratic
//! values are only a well-defined form when the lattice is even, so the
//! overlattice search offers two isotropy notions: the even one (`q = 0`
//! in Q/2Z, for even ambient lattices) and the integral one (`b = 0` in
//! Q/Z, classifying integral overlattices of odd ones).

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::abelian::{cokernel, direct_sum, subgroup, FinAbGroup, GroupElement, QmodZ};
use crate::ade::DynkinConfig;
use crate::codes::{CodeVector, LabeledCode, SingularPoint};
use crate::matrix::{smith_normal_form, IntMatrix};
use crate::{input_err, Error, Result};

/// Default bound on the discriminant group size for subgroup enumeration.
pub const DEFAULT_DISCRIMINANT_CAP: u64 = 5000;

/// The lattice spanned by the exceptional curves of a list of singular
/// points and a polarization class of self-intersection `d`.
#[derive(Clone, Debug)]
pub struct PolarizedLattice {
    pub blocks: Vec<DynkinConfig>,
    pub degree: BigUint,
    gram: IntMatrix,
}

impl PolarizedLattice {
    pub fn new(blocks: Vec<DynkinConfig>, degree: BigUint) -> Result<Self> {
        if degree < BigUint::one() {
            return input_err("polarization degree must be at least 1");
        }
        let total: usize = blocks.iter().map(DynkinConfig::vertex_count).sum();
        let n = total + 1;
        let mut gram = IntMatrix::zero(n, n);
        let mut off = 0usize;
        for b in &blocks {
            let k = b.vertex_count();
            for i in 0..k {
                for j in 0..k {
                    gram[(off + i, off + j)] = b.cartan()[(i, j)].clone();
                }
            }
            off += k;
        }
        gram[(total, total)] = BigInt::from(degree.clone());
        Ok(PolarizedLattice { blocks, degree, gram })
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    /// Index of the hyperplane basis vector (the last one).
    pub fn h_index(&self) -> usize {
        self.gram.rows() - 1
    }

    pub fn discriminant(&self) -> Result<DiscriminantForm> {
        DiscriminantForm::of_gram(&self.gram)
    }
}

/// The finite quadratic/bilinear form on `L^v / L`.
#[derive(Clone, Debug)]
pub struct DiscriminantForm {
    pub group: FinAbGroup,
    /// Rational lifts of the generators into `L^v` (coordinates in the
    /// lattice basis).
    lifts: Vec<Vec<BigRational>>,
    gram: IntMatrix,
    /// All diagonal Gram entries even, i.e. the quadratic values are a
    /// well-defined form on the discriminant group.
    pub even: bool,
    /// Bilinear values on the generators, in Q/Z.
    pub gen_bilinear: Vec<Vec<QmodZ>>,
    /// Quadratic values of the generator lifts, normalized into [0, 2).
    pub gen_quadratic: Vec<BigRational>,
}

fn mod_one(r: &BigRational) -> BigRational {
    r - r.floor()
}

fn mod_two(r: &BigRational) -> BigRational {
    let two = BigRational::from(BigInt::from(2));
    let q = (r / &two).floor();
    r - q * two
}

impl DiscriminantForm {
    pub fn of_gram(gram: &IntMatrix) -> Result<DiscriminantForm> {
        if !gram.is_square() {
            return input_err("Gram matrix must be square");
        }
        if gram.det().is_zero() {
            return input_err("Gram matrix is degenerate");
        }
        let n = gram.rows();
        let coker = cokernel(gram);
        let group = coker.group.clone();
        // G^{-1} = V D^{-1} U from the Smith form of G.
        let snf = smith_normal_form(gram);
        let inv = |w: &[BigInt]| -> Vec<BigRational> {
            let uw = snf.u.mul_vec(w);
            let y: Vec<BigRational> = (0..n)
                .map(|i| BigRational::new(uw[i].clone(), snf.d[(i, i)].clone()))
                .collect();
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| BigRational::from(snf.v[(i, j)].clone()) * &y[j])
                        .sum()
                })
                .collect()
        };
        let lifts: Vec<Vec<BigRational>> = (0..group.gen_count())
            .map(|t| inv(&coker.section.column(t)))
            .collect();
        let even = (0..n).all(|i| gram[(i, i)].is_even());
        let pair = |a: &[BigRational], b: &[BigRational]| -> BigRational {
            let mut acc = BigRational::zero();
            for i in 0..n {
                for j in 0..n {
                    acc += &a[i] * BigRational::from(gram[(i, j)].clone()) * &b[j];
                }
            }
            acc
        };
        let gen_bilinear = lifts
            .iter()
            .map(|a| {
                lifts
                    .iter()
                    .map(|b| QmodZ::from_ratio(pair(a, b)))
                    .collect()
            })
            .collect();
        let gen_quadratic = lifts.iter().map(|a| mod_two(&pair(a, a))).collect();
        Ok(DiscriminantForm {
            group,
            lifts,
            gram: gram.clone(),
            even,
            gen_bilinear,
            gen_quadratic,
        })
    }

    pub fn order(&self) -> BigUint {
        self.group.order().expect("discriminant groups are finite")
    }

    /// Rational lift of an element (uses the reduced coordinates).
    pub fn lift(&self, e: &GroupElement) -> Vec<BigRational> {
        let n = self.gram.rows();
        let mut out = vec![BigRational::zero(); n];
        for (t, c) in e.coords.iter().enumerate() {
            for i in 0..n {
                let term = &self.lifts[t][i] * BigRational::from(c.clone());
                out[i] += term;
            }
        }
        out
    }

    fn pair_lifts(&self, a: &[BigRational], b: &[BigRational]) -> BigRational {
        let n = self.gram.rows();
        let mut acc = BigRational::zero();
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                acc += &a[i] * BigRational::from(self.gram[(i, j)].clone()) * &b[j];
            }
        }
        acc
    }

    /// Bilinear value in Q/Z.
    pub fn bilinear(&self, a: &GroupElement, b: &GroupElement) -> BigRational {
        mod_one(&self.pair_lifts(&self.lift(a), &self.lift(b)))
    }

    /// Quadratic value of the (reduced-coordinate) lift, in [0, 2).
    pub fn quadratic(&self, a: &GroupElement) -> BigRational {
        let l = self.lift(a);
        mod_two(&self.pair_lifts(&l, &l))
    }

    /// The class in the discriminant group of a dual vector, given by its
    /// integral pairings with the lattice basis.
    pub fn class_of_dual(&self, lam: &[BigRational]) -> Result<GroupElement> {
        let n = self.gram.rows();
        if lam.len() != n {
            return input_err("dual vector has wrong length");
        }
        let mut w = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = BigRational::zero();
            for j in 0..n {
                acc += BigRational::from(self.gram[(i, j)].clone()) * &lam[j];
            }
            if !acc.is_integer() {
                return input_err(format!(
                    "vector is not in the dual lattice: pairing with basis vector {i} is {acc}"
                ));
            }
            w.push(acc.to_integer());
        }
        // lam = sum w_i e_i^v, and e_i^v is the class of e_i.
        let coker = cokernel(&self.gram);
        Ok(coker.project(&w))
    }
}

/// Which isotropy notion an overlattice search uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsotropyKind {
    /// `q = 0` in Q/2Z on every element; classifies even overlattices and
    /// requires an even ambient lattice.
    Even,
    /// `b = 0` in Q/Z on all pairs; classifies integral overlattices and is
    /// the right notion over an odd lattice.
    Integral,
}

/// A subgroup of the discriminant group found by the isotropic search.
#[derive(Clone, Debug)]
pub struct IsotropicSubgroup {
    pub elements: Vec<GroupElement>,
    pub generators: Vec<GroupElement>,
    pub group: FinAbGroup,
}

/// Enumerates all subgroups of the given order on which the form vanishes.
///
/// Exhaustive over subgroups (grown by closure, deduplicated by element
/// set); discriminant groups larger than `cap` are an explicit error.
pub fn isotropic_subgroups(
    disc: &DiscriminantForm,
    order: &BigUint,
    kind: IsotropyKind,
    cap: u64,
) -> Result<Vec<IsotropicSubgroup>> {
    if kind == IsotropyKind::Even && !disc.even {
        return input_err("even isotropy requires an even lattice");
    }
    let total = disc.order();
    if total > BigUint::from(cap) {
        return Err(Error::ResourceCap(format!(
            "discriminant group has order {total}, cap is {cap}"
        )));
    }
    if !total.is_multiple_of(order) {
        return Ok(Vec::new());
    }

    // Candidate elements: isotropic singletons of order dividing the target.
    let elements = disc.group.elements();
    let candidates: Vec<GroupElement> = elements
        .iter()
        .filter(|e| {
            let eo = disc.group.element_order(e).expect("finite");
            if !order.is_multiple_of(&eo) {
                return false;
            }
            match kind {
                IsotropyKind::Even => disc.quadratic(e).is_zero(),
                IsotropyKind::Integral => disc.bilinear(e, e).is_zero(),
            }
        })
        .cloned()
        .collect();

    let closure = |gens: &[GroupElement]| -> Option<Vec<GroupElement>> {
        let mut set: BTreeSet<GroupElement> = BTreeSet::new();
        set.insert(disc.group.zero());
        let mut frontier = vec![disc.group.zero()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = disc.group.add(&x, g);
                if set.insert(y.clone()) {
                    if BigUint::from(set.len() as u64) > *order {
                        return None;
                    }
                    frontier.push(y);
                }
            }
        }
        Some(set.into_iter().collect())
    };
    let isotropic_set = |els: &[GroupElement]| -> bool {
        match kind {
            IsotropyKind::Even => els.iter().all(|e| disc.quadratic(e).is_zero()),
            IsotropyKind::Integral => els
                .iter()
                .enumerate()
                .all(|(i, a)| els[i..].iter().all(|b| disc.bilinear(a, b).is_zero())),
        }
    };

    // Grow subgroups by adjoining candidate elements; element sets key the
    // dedup, so the result is independent of discovery order.
    let mut seen: BTreeSet<Vec<GroupElement>> = BTreeSet::new();
    let trivial = vec![disc.group.zero()];
    seen.insert(trivial.clone());
    let mut frontier: Vec<(Vec<GroupElement>, Vec<GroupElement>)> = vec![(trivial, vec![])];
    let mut found: BTreeSet<Vec<GroupElement>> = BTreeSet::new();
    let mut gens_of: Vec<(Vec<GroupElement>, Vec<GroupElement>)> = Vec::new();
    while let Some((els, gens)) = frontier.pop() {
        if BigUint::from(els.len() as u64) == *order {
            if found.insert(els.clone()) {
                gens_of.push((els, gens));
            }
            continue;
        }
        for c in &candidates {
            if els.contains(c) {
                continue;
            }
            let mut g2 = gens.clone();
            g2.push(c.clone());
            let Some(bigger) = closure(&g2) else {
                continue;
            };
            if !order.is_multiple_of(&BigUint::from(bigger.len() as u64)) {
                continue;
            }
            if !seen.insert(bigger.clone()) {
                continue;
            }
            if !isotropic_set(&bigger) {
                continue;
            }
            frontier.push((bigger, g2));
        }
    }

    let mut out: Vec<IsotropicSubgroup> = gens_of
        .into_iter()
        .map(|(els, _)| {
            // Minimal generating set, greedily by element order.
            let mut gens: Vec<GroupElement> = Vec::new();
            let mut sorted = els.clone();
            sorted.sort_by_key(|e| std::cmp::Reverse(disc.group.element_order(e).expect("finite")));
            for e in sorted {
                if disc.group.is_zero_elem(&e) {
                    continue;
                }
                let span = closure(&gens).expect("subgroup closure stays within its order");
                if !span.contains(&e) {
                    gens.push(e);
                }
            }
            let group = subgroup(&disc.group, &gens)
                .expect("generators live in the discriminant group")
                .group;
            IsotropicSubgroup {
                elements: els,
                generators: gens,
                group,
            }
        })
        .collect();
    out.sort_by(|a, b| a.elements.cmp(&b.elements));
    Ok(out)
}

/// Saturation data: rational generators of `L^sat / L` and the glue group.
#[derive(Clone, Debug)]
pub struct SaturationData {
    pub generators: Vec<Vec<BigRational>>,
    pub glue: FinAbGroup,
}

/// Builds the extended code cut out by saturation generators.
///
/// Each generator must pair integrally with every lattice basis vector.
/// Its character values are read off coordinatewise: the value on
/// `gamma_j` of a point is the corresponding curve coefficient mod Z, and
/// the hyperplane value is the `H` coefficient mod Z; the gamma relations
/// are checked and a violation is an input error (it signals a mislabeled
/// basis).
pub fn code_from_saturation(
    lattice: &PolarizedLattice,
    points: Vec<SingularPoint>,
    gens: &[Vec<BigRational>],
) -> Result<(LabeledCode, SaturationData)> {
    if points.len() != lattice.blocks.len() {
        return input_err("one singular point per lattice block is required");
    }
    for (p, b) in points.iter().zip(&lattice.blocks) {
        if p.label != b.label {
            return input_err(format!(
                "point {} has label {}, lattice block has {}",
                p.id, p.label, b.label
            ));
        }
    }
    let disc = lattice.discriminant()?;
    let n = lattice.rank();

    // d' = gcd(d, lcm of the local exponents).
    let mut m = BigUint::one();
    for b in &lattice.blocks {
        let h = crate::ade::local_homology(b);
        m = m.lcm(&h.group.exponent());
    }
    let d_prime = lattice.degree.gcd(&m);

    let mut vectors = Vec::with_capacity(gens.len());
    let mut classes = Vec::with_capacity(gens.len());
    for lam in gens {
        if lam.len() != n {
            return input_err(format!(
                "saturation generator has {} coordinates, lattice rank is {n}",
                lam.len()
            ));
        }
        classes.push(disc.class_of_dual(lam)?);
        let mut chars = Vec::new();
        let mut off = 0usize;
        for b in &lattice.blocks {
            let k = b.vertex_count();
            let values: Vec<QmodZ> = (0..k)
                .map(|i| QmodZ::from_ratio(lam[off + i].clone()))
                .collect();
            chars.push(b.validate_char(values)?);
            off += k;
        }
        let h_value = QmodZ::from_ratio(lam[n - 1].clone());
        if !d_prime.is_multiple_of(&h_value.order()) {
            return input_err(format!(
                "hyperplane coefficient {h_value} has order not dividing d' = {d_prime}"
            ));
        }
        vectors.push(CodeVector {
            chars,
            h_value: Some(h_value),
        });
    }
    let code = LabeledCode::from_dual(points, vectors, Some(d_prime))?;

    let glue = subgroup(&disc.group, &classes)?.group;
    assert_eq!(
        &glue,
        code.h1(),
        "glue group and extended code group must agree"
    );
    Ok((
        code,
        SaturationData {
            generators: gens.to_vec(),
            glue,
        },
    ))
}

/// Covariants of a lattice action: the quotient of `Z^n` by the span of
/// all `(1 - g) x`, summed with the abelianized group for the semidirect
/// case.
pub fn covariants(action: &[IntMatrix], g_ab: &FinAbGroup) -> Result<FinAbGroup> {
    let Some(first) = action.first() else {
        return input_err("at least one group generator is required");
    };
    let n = first.rows();
    for g in action {
        if !g.is_square() || g.rows() != n {
            return input_err("action matrices must be square and of equal size");
        }
    }
    let mut stacked = IntMatrix::zero(n, 0);
    for g in action {
        let diff = IntMatrix::from_fn(n, n, |i, j| {
            let id = if i == j { BigInt::one() } else { BigInt::zero() };
            id - &g[(i, j)]
        });
        stacked = stacked.hconcat(&diff);
    }
    let lambda_g = cokernel(&stacked).group;
    Ok(direct_sum(&[g_ab.clone(), lambda_g]).group)
}
