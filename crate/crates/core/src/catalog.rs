//! Built-in ancestor surfaces and their codes.
//!
//! Each entry carries the surface context, the strict code, and the
//! extended code where one exists. Cubic entries come from the torus
//! quotient or blow-up geometry; the Kummer entries are the affine
//! evaluation code on `F_2^4` and its quadric extension; the nine-cusp
//! K3 is the affine evaluation code on `F_3^2`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::abelian::QmodZ;
use crate::ade::{DynkinConfig, DynkinLabel, PointChar};
use crate::codes::{CodeVector, LabeledCode, SingularPoint};
use crate::lattice::{
    code_from_saturation, isotropic_subgroups, IsotropyKind, PolarizedLattice,
    DEFAULT_DISCRIMINANT_CAP,
};
use crate::restrictions::SurfaceContext;
use crate::{input_err, Result};

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub context: SurfaceContext,
    pub strict: LabeledCode,
    pub extended: Option<LabeledCode>,
    pub notes: String,
}

pub const NAMES: [&str; 8] = [
    "cayley-cubic",
    "three-cusp-cubic",
    "e6-cubic",
    "a5a1-cubic",
    "kummer-quartic",
    "kummer-extended",
    "nine-cusp-k3",
    "quadric-cone",
];

pub fn names() -> &'static [&'static str] {
    &NAMES
}

pub fn get(name: &str) -> Result<CatalogEntry> {
    match name {
        "cayley-cubic" => cayley_cubic(),
        "three-cusp-cubic" => three_cusp_cubic(),
        "e6-cubic" => e6_cubic(),
        "a5a1-cubic" => a5a1_cubic(),
        "kummer-quartic" => kummer_quartic(),
        "kummer-extended" => kummer_extended(),
        "nine-cusp-k3" => nine_cusp_k3(),
        "quadric-cone" => quadric_cone(),
        _ => input_err(format!(
            "unknown catalog entry {name}; available: {}",
            NAMES.join(", ")
        )),
    }
}

fn half() -> QmodZ {
    QmodZ::new(BigInt::one(), BigInt::from(2))
}

fn third(a: i64) -> QmodZ {
    QmodZ::new(BigInt::from(a), BigInt::from(3))
}

fn node_points(ids: &[String]) -> Vec<SingularPoint> {
    ids.iter()
        .map(|id| SingularPoint {
            id: id.clone(),
            label: DynkinLabel::a(1),
        })
        .collect()
}

fn node_char(on: bool) -> PointChar {
    PointChar {
        values: vec![if on { half() } else { QmodZ::zero() }],
    }
}

fn cusp_char(a: i64) -> PointChar {
    PointChar {
        values: vec![third(a), third(2 * a)],
    }
}

/// The four-nodal cubic: `K = Z/2 (1,1,1,1)`, and `K' = K` since the
/// degree is odd.
fn cayley_cubic() -> Result<CatalogEntry> {
    let ids: Vec<String> = (1..=4).map(|i| format!("n{i}")).collect();
    let points = node_points(&ids);
    let mut kernel = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let mut g = vec![BigInt::zero(); 4];
            g[i] = BigInt::one();
            g[j] = BigInt::one();
            kernel.push(g);
        }
    }
    let strict = LabeledCode::from_kernel_gamma(points, &kernel, None)?;
    Ok(CatalogEntry {
        name: "cayley-cubic".into(),
        context: SurfaceContext::hypersurface(3),
        strict,
        extended: None,
        notes: "four nodes; code is the all-ones line; d odd so the extended code adds nothing"
            .into(),
    })
}

/// The three-cusp cubic (a quotient of the plane by Z/3): `K = Z/3` spanned
/// by the vector touching all three cusps, `K' = (Z/3)^2`.
fn three_cusp_cubic() -> Result<CatalogEntry> {
    let points: Vec<SingularPoint> = (1..=3)
        .map(|i| SingularPoint {
            id: format!("c{i}"),
            label: DynkinLabel::a(2),
        })
        .collect();

    let strict_gen = CodeVector {
        chars: vec![cusp_char(1), cusp_char(1), cusp_char(1)],
        h_value: None,
    };
    let strict = LabeledCode::from_dual(points.clone(), vec![strict_gen], None)?;

    // Extended code via the saturation lattice: the strict generator is the
    // class (1/3)(E_1 - E_2 + E_3 - E_4 + E_5 - E_6), and one extended
    // class (1/3)(E_1 - E_2 - E_3 + E_4 + H) joins it.
    let blocks: Vec<DynkinConfig> = points
        .iter()
        .map(|p| DynkinConfig::new(p.label))
        .collect();
    let lat = PolarizedLattice::new(blocks, BigUint::from(3u32))?;
    let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let lam_strict = vec![
        r(1, 3),
        r(-1, 3),
        r(1, 3),
        r(-1, 3),
        r(1, 3),
        r(-1, 3),
        r(0, 1),
    ];
    let lam_ext = vec![
        r(1, 3),
        r(-1, 3),
        r(-1, 3),
        r(1, 3),
        r(0, 1),
        r(0, 1),
        r(1, 3),
    ];
    let (extended, _) = code_from_saturation(&lat, points, &[lam_strict, lam_ext])?;
    Ok(CatalogEntry {
        name: "three-cusp-cubic".into(),
        context: SurfaceContext::hypersurface(3),
        strict,
        extended: Some(extended),
        notes: "plane quotient by Z/3; strict vector touches all three cusps".into(),
    })
}

/// The cubic with one `E_6` point: `K = 0`, `K' = Z/3` from the unique
/// glue type of the saturation.
fn e6_cubic() -> Result<CatalogEntry> {
    let points = vec![SingularPoint {
        id: "e6".into(),
        label: DynkinLabel::e(6),
    }];
    let strict = LabeledCode::from_dual(points.clone(), vec![], None)?;

    let blocks = vec![DynkinConfig::new(DynkinLabel::e(6))];
    let lat = PolarizedLattice::new(blocks, BigUint::from(3u32))?;
    let disc = lat.discriminant()?;
    let subs = isotropic_subgroups(
        &disc,
        &BigUint::from(3u32),
        IsotropyKind::Integral,
        DEFAULT_DISCRIMINANT_CAP,
    )?;
    let first = subs
        .first()
        .ok_or_else(|| crate::Error::Input("no isotropic glue for the E_6 cubic".into()))?;
    let gens: Vec<Vec<BigRational>> = first.generators.iter().map(|g| disc.lift(g)).collect();
    let (extended, _) = code_from_saturation(&lat, points, &gens)?;
    Ok(CatalogEntry {
        name: "e6-cubic".into(),
        context: SurfaceContext::hypersurface(3),
        strict,
        extended: Some(extended),
        notes: "one E_6 point; extended code from the integral isotropic glue of E_6 + <3>".into(),
    })
}

/// The cubic with an `A_5` and a disjoint `A_1`: `K' = Z/6` from the
/// explicit blow-up class, `K = Z/2`.
fn a5a1_cubic() -> Result<CatalogEntry> {
    let points = vec![
        SingularPoint {
            id: "a5".into(),
            label: DynkinLabel::a(5),
        },
        SingularPoint {
            id: "a1".into(),
            label: DynkinLabel::a(1),
        },
    ];
    let blocks: Vec<DynkinConfig> = points
        .iter()
        .map(|p| DynkinConfig::new(p.label))
        .collect();
    let lat = PolarizedLattice::new(blocks, BigUint::from(3u32))?;
    let sixth = |n: i64| BigRational::new(BigInt::from(n), BigInt::from(6));
    // (1/6)(-2H + 3E_6 - sum_{i=1..5} i E_i), basis E_1..E_5, E_6, H.
    let lam = vec![
        sixth(-1),
        sixth(-2),
        sixth(-3),
        sixth(-4),
        sixth(-5),
        sixth(3),
        sixth(-2),
    ];
    let (extended, _) = code_from_saturation(&lat, points, &[lam])?;
    let strict = extended.strict_part()?;
    Ok(CatalogEntry {
        name: "a5a1-cubic".into(),
        context: SurfaceContext::hypersurface(3),
        strict,
        extended: Some(extended),
        notes: "cubic from six infinitely-near points on a conic".into(),
    })
}

fn f2_points() -> (Vec<SingularPoint>, Vec<[u8; 4]>) {
    let mut coords = Vec::new();
    let mut points = Vec::new();
    for mask in 0u8..16 {
        let x = [
            (mask >> 3) & 1,
            (mask >> 2) & 1,
            (mask >> 1) & 1,
            mask & 1,
        ];
        coords.push(x);
        points.push(SingularPoint {
            id: format!("{}{}{}{}", x[0], x[1], x[2], x[3]),
            label: DynkinLabel::a(1),
        });
    }
    (points, coords)
}

fn kummer_strict_code() -> Result<LabeledCode> {
    let (points, coords) = f2_points();
    // Evaluations of 1, x_1, .., x_4 generate the affine functions.
    let mut gens = Vec::new();
    gens.push(CodeVector {
        chars: coords.iter().map(|_| node_char(true)).collect(),
        h_value: None,
    });
    for i in 0..4 {
        gens.push(CodeVector {
            chars: coords.iter().map(|x| node_char(x[i] == 1)).collect(),
            h_value: None,
        });
    }
    LabeledCode::from_dual(points, gens, None)
}

/// The 16-nodal quartic: nodes are the points of `F_2^4` and the strict
/// code is spanned by the affine functions (dimension 5).
fn kummer_quartic() -> Result<CatalogEntry> {
    Ok(CatalogEntry {
        name: "kummer-quartic".into(),
        context: SurfaceContext::hypersurface(4),
        strict: kummer_strict_code()?,
        extended: None,
        notes: "sixteen nodes indexed by F_2^4; strict code = affine functions".into(),
    })
}

/// The extended Kummer code: the strict code plus the indicator of the
/// zeros of `x_1 x_2 + x_3 x_4 + 1` with hyperplane value 1/2.
fn kummer_extended() -> Result<CatalogEntry> {
    let (points, coords) = f2_points();
    let strict = kummer_strict_code()?;
    let mut gens: Vec<CodeVector> = strict
        .dual_generators()
        .iter()
        .map(|g| CodeVector {
            chars: g.chars.clone(),
            h_value: Some(QmodZ::zero()),
        })
        .collect();
    gens.push(CodeVector {
        chars: coords
            .iter()
            .map(|x| node_char(x[0] * x[1] + x[2] * x[3] == 1))
            .collect(),
        h_value: Some(half()),
    });
    let extended = LabeledCode::from_dual(points, gens, Some(BigUint::from(2u32)))?;
    Ok(CatalogEntry {
        name: "kummer-extended".into(),
        context: SurfaceContext::hypersurface(4),
        strict,
        extended: Some(extended),
        notes: "reconstruction: the odd-quadric indicator with hyperplane value 1/2; validated \
                by the order-2 extended rule and the shortening class counts"
            .into(),
    })
}

/// The nine-cusp K3 (a torus quotient by Z/3): cusps are the points of
/// `F_3^2` and the code is spanned by the affine functions over F_3.
fn nine_cusp_k3() -> Result<CatalogEntry> {
    let mut points = Vec::new();
    let mut coords = Vec::new();
    for a in 0..3i64 {
        for b in 0..3i64 {
            coords.push((a, b));
            points.push(SingularPoint {
                id: format!("{a}{b}"),
                label: DynkinLabel::a(2),
            });
        }
    }
    let gens: Vec<CodeVector> = [
        Box::new(|_, _| 1i64) as Box<dyn Fn(i64, i64) -> i64>,
        Box::new(|a, _| a),
        Box::new(|_, b| b),
    ]
    .iter()
    .map(|f| CodeVector {
        chars: coords.iter().map(|&(a, b)| cusp_char(f(a, b))).collect(),
        h_value: None,
    })
    .collect();
    let strict = LabeledCode::from_dual(points, gens, None)?;
    Ok(CatalogEntry {
        name: "nine-cusp-k3".into(),
        context: SurfaceContext::k3_unpolarized(),
        strict,
        extended: None,
        notes: "quotient of a product of Fermat cubic curves by Z/3; cusps indexed by F_3^2"
            .into(),
    })
}

/// The quadric cone: a single node with trivial code (a nonzero vector
/// would have weight 1, failing the order-2 rule mod 8).
fn quadric_cone() -> Result<CatalogEntry> {
    let points = vec![SingularPoint {
        id: "n1".into(),
        label: DynkinLabel::a(1),
    }];
    let kernel = vec![vec![BigInt::one()]];
    let strict = LabeledCode::from_kernel_gamma(points, &kernel, None)?;
    Ok(CatalogEntry {
        name: "quadric-cone".into(),
        context: SurfaceContext::hypersurface(2),
        strict,
        extended: None,
        notes: "the only singular normal quadric; one node and no nonzero code vector".into(),
    })
}
