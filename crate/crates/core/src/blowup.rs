//! Constructors for cohomology models of iterated blowups of `P^3`.
//!
//! Every blowup appends one divisor class and one curve class to the bases,
//! so the pullback from the parent model is the inclusion of the leading
//! coordinates and the pushforward is truncation (see [`Blowdown`]).
//!
//! Blowup at a point adds the exceptional divisor `E` and a line `L` in it,
//! with `E.L = -1`, `E^2 = -L` and `K` gaining `2E`. Blowup along a smooth
//! rational curve `C` of class `g` with normal bundle degree `n` adds `E` and
//! a fiber `F` over `C`, with
//!
//! ```text
//! E.F = -1      p*a . F = 0      E . p*c = 0
//! p*a ^ p*b = p*(a ^ b)      p*a ^ E = (a.g) F      E ^ E = -p*g + n F
//! ```
//!
//! so that `E^3 = -n`, and `K` gains `E`.

use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::rat::Rat;
use crate::ring::{
    BlowupCenter, BlowupStep, CurveEntry, CurveFlags, H11Class, H22Class, ModelParts, VarietyModel,
};

/// How the normal bundle degree of a curve center is obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalDegree {
    Given(Rat),
    /// `n = -K.C - 2`, valid for smooth rational centers only.
    Derive,
}

/// Pairs of indices of the coordinate lines `x_i = x_j = 0` in `P^3`.
pub const COORDINATE_LINES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Registry name of the strict transform of the coordinate line `x_i = x_j = 0`.
pub fn sigma_name(i: usize, j: usize) -> String {
    format!("Sigma~_{{{i},{j}}}")
}

/// `P^3` with hyperplane class `H` and line class `H2`.
pub fn projective3() -> VarietyModel {
    VarietyModel::new(ModelParts {
        name: "P3".into(),
        h11_basis: vec!["H".into()],
        h22_basis: vec!["H2".into()],
        pairing: RatMatrix::from_int_rows(&[[1]]),
        cup: vec![H22Class::from_ints(&[1])],
        canonical: H11Class::from_ints(&[-4]),
        curves: vec![CurveEntry {
            name: "line".into(),
            class: H22Class::from_ints(&[1]),
            flags: CurveFlags::EFFECTIVE_RATIONAL,
        }],
        provenance: vec![],
    })
    .expect("P3 model is well formed")
}

/// Blows up a point. The new divisor is labelled `E{name}`, the line in it
/// `L{name}` and the point itself `e{name}`.
pub fn blowup_point(m: &VarietyModel, name: &str) -> Result<VarietyModel> {
    apply_step(
        m,
        &BlowupStep {
            center: BlowupCenter::Point {
                name: format!("e{name}"),
            },
            new_divisor: format!("E{name}"),
            new_curve: format!("L{name}"),
        },
    )
}

/// Blows up the registered smooth rational curve `center`. The new divisor is
/// labelled `E{tag}` and the fiber class `F{tag}`.
pub fn blowup_rational_curve(
    m: &VarietyModel,
    center: &str,
    normal_degree: NormalDegree,
    tag: &str,
) -> Result<VarietyModel> {
    let entry = m.curve(center)?;
    let normal_degree = match normal_degree {
        NormalDegree::Given(n) => n,
        NormalDegree::Derive => derive_normal_degree(m, entry)?,
    };
    apply_step(
        m,
        &BlowupStep {
            center: BlowupCenter::RationalCurve {
                name: center.to_string(),
                class: entry.class.clone(),
                normal_degree,
            },
            new_divisor: format!("E{tag}"),
            new_curve: format!("F{tag}"),
        },
    )
}

/// `deg N = -K.C - 2` for a smooth rational curve `C` (adjunction).
pub fn derive_normal_degree(m: &VarietyModel, curve: &CurveEntry) -> Result<Rat> {
    if !curve.flags.rational {
        return Err(Error::NormalDegreeUnavailable(curve.name.clone()));
    }
    Ok(-m.pair(m.canonical(), &curve.class)? - Rat::from(2))
}

/// Replays a recorded step on `m`, reproducing the model the step was taken from.
pub fn apply_step(m: &VarietyModel, step: &BlowupStep) -> Result<VarietyModel> {
    let n1 = m.h11();
    let n2 = m.h22();
    let parts = m.parts();
    if parts.h11_basis.contains(&step.new_divisor) {
        return Err(Error::DuplicateLabel(step.new_divisor.clone()));
    }
    if parts.h22_basis.contains(&step.new_curve) || m.curve(&step.new_curve).is_ok() {
        return Err(Error::DuplicateLabel(step.new_curve.clone()));
    }
    let new_curve = H22Class::basis(n2 + 1, n2);

    // Cup products of the new divisor with the old basis, and with itself.
    let (cross, self_cup, k_coeff, name) = match &step.center {
        BlowupCenter::Point { name } => {
            let cross = vec![H22Class::zero(n2 + 1); n1];
            (cross, -&new_curve, Rat::from(2), name.clone())
        }
        BlowupCenter::RationalCurve {
            name,
            class,
            normal_degree,
        } => {
            m.check_h22(class)?;
            let cross = (0..n1)
                .map(|i| {
                    let d = m.pair(&H11Class::basis(n1, i), class)?;
                    Ok(new_curve.scale(&d))
                })
                .collect::<Result<Vec<_>>>()?;
            let self_cup = (-&class.extended(n2 + 1)).add_scaled(normal_degree, &new_curve);
            (cross, self_cup, Rat::one(), name.clone())
        }
    };

    let mut pairing = RatMatrix::zeros(n1 + 1, n2 + 1);
    for i in 0..n1 {
        for j in 0..n2 {
            pairing[(i, j)] = parts.pairing[(i, j)].clone();
        }
    }
    pairing[(n1, n2)] = Rat::from(-1);

    let mut cup = Vec::with_capacity((n1 + 1) * (n1 + 1));
    for (i, c) in cross.iter().enumerate() {
        for j in 0..n1 {
            cup.push(m.cup_entry(i, j).extended(n2 + 1));
        }
        cup.push(c.clone());
    }
    cup.extend(cross.iter().cloned());
    cup.push(self_cup);

    let mut canonical = m.canonical().extended(n1 + 1);
    canonical = canonical.add_scaled(&k_coeff, &H11Class::basis(n1 + 1, n1));

    let mut curves: Vec<CurveEntry> = parts
        .curves
        .iter()
        .map(|c| CurveEntry {
            class: c.class.extended(n2 + 1),
            ..c.clone()
        })
        .collect();
    curves.push(CurveEntry {
        name: step.new_curve.clone(),
        class: new_curve,
        flags: CurveFlags::EFFECTIVE_RATIONAL,
    });

    let mut h11_basis = parts.h11_basis.clone();
    h11_basis.push(step.new_divisor.clone());
    let mut h22_basis = parts.h22_basis.clone();
    h22_basis.push(step.new_curve.clone());
    let mut provenance = parts.provenance.clone();
    provenance.push(step.clone());

    VarietyModel::new(ModelParts {
        name: format!("Bl_{name}({})", m.name()),
        h11_basis,
        h22_basis,
        pairing,
        cup,
        canonical,
        curves,
        provenance,
    })
}

/// `P^3` blown up at the four coordinate points, with the strict transforms of
/// the lines through them registered.
///
/// Registry order: `line`, `L0..L3`, `line_through_e{i}` (class `H2 - Li`),
/// then the six `Sigma~_{i,j}` (class `H2 - Lk - Ll`, `{k,l}` complementary
/// to `{i,j}`; the line `x_i = x_j = 0` passes through `e_k` and `e_l`).
pub fn standard_x() -> VarietyModel {
    let mut m = projective3();
    for i in 0..4 {
        m = blowup_point(&m, &i.to_string()).expect("fresh labels");
    }
    let mut parts = m.into_parts();
    parts.name = "X".into();
    let n2 = parts.h22_basis.len();
    let line = H22Class::basis(n2, 0);
    let l = |k: usize| H22Class::basis(n2, 1 + k);
    for i in 0..4 {
        parts.curves.push(CurveEntry {
            name: format!("line_through_e{i}"),
            class: &line - &l(i),
            flags: CurveFlags::EFFECTIVE_RATIONAL,
        });
    }
    for (i, j) in COORDINATE_LINES {
        let (k, kk) = complement(i, j);
        parts.curves.push(CurveEntry {
            name: sigma_name(i, j),
            class: &(&line - &l(k)) - &l(kk),
            flags: CurveFlags {
                indeterminacy_eligible: true,
                ..CurveFlags::EFFECTIVE_RATIONAL
            },
        });
    }
    VarietyModel::new(parts).expect("X model is well formed")
}

fn complement(i: usize, j: usize) -> (usize, usize) {
    let mut rest = (0..4).filter(|&k| k != i && k != j);
    (rest.next().unwrap(), rest.next().unwrap())
}

/// [`standard_x`] blown up along the six curves `Sigma~_{i,j}`, in
/// [`COORDINATE_LINES`] order, with tags `ij` (divisors `E01`, ..., fibers
/// `F01`, ...).
///
/// The six lines meet only at the blown-up points `e_k`, so their strict
/// transforms are disjoint and the result does not depend on the order.
pub fn standard_z() -> VarietyModel {
    standard_z_in_order(&COORDINATE_LINES).expect("Z model is well formed")
}

/// The Z construction with a caller-chosen blowup order.
pub fn standard_z_in_order(order: &[(usize, usize)]) -> Result<VarietyModel> {
    let mut m = standard_x();
    for &(i, j) in order {
        m = blowup_rational_curve(
            &m,
            &sigma_name(i, j),
            NormalDegree::Derive,
            &format!("{i}{j}"),
        )?;
    }
    Ok(m.renamed("Z"))
}

/// The blowdown `blown -> base` of an iterated blowup, acting on classes.
#[derive(Clone, Copy, Debug)]
pub struct Blowdown<'a> {
    blown: &'a VarietyModel,
    base: &'a VarietyModel,
}

impl<'a> Blowdown<'a> {
    /// Requires the bases of `base` to be leading segments of those of `blown`.
    pub fn new(blown: &'a VarietyModel, base: &'a VarietyModel) -> Result<Self> {
        let prefix = |long: &[String], short: &[String]| {
            long.len() >= short.len() && long[..short.len()] == *short
        };
        if !prefix(blown.h11_basis(), base.h11_basis())
            || !prefix(blown.h22_basis(), base.h22_basis())
        {
            return Err(Error::InvalidModel(format!(
                "{} is not an iterated blowup of {}",
                blown.name(),
                base.name()
            )));
        }
        Ok(Blowdown { blown, base })
    }

    pub fn blown(&self) -> &'a VarietyModel {
        self.blown
    }

    pub fn base(&self) -> &'a VarietyModel {
        self.base
    }

    /// Labels of the divisors contracted by the blowdown.
    pub fn exceptional_labels(&self) -> &'a [String] {
        &self.blown.h11_basis()[self.base.h11()..]
    }

    pub fn pullback11(&self, a: &H11Class) -> Result<H11Class> {
        self.base.check_h11(a)?;
        Ok(a.extended(self.blown.h11()))
    }

    pub fn pullback22(&self, c: &H22Class) -> Result<H22Class> {
        self.base.check_h22(c)?;
        Ok(c.extended(self.blown.h22()))
    }

    pub fn pushforward11(&self, a: &H11Class) -> Result<H11Class> {
        self.blown.check_h11(a)?;
        Ok(a.truncated(self.base.h11()))
    }

    pub fn pushforward22(&self, c: &H22Class) -> Result<H22Class> {
        self.blown.check_h22(c)?;
        Ok(c.truncated(self.base.h22()))
    }

    /// Matrix of the pullback on `H^{1,1}` (columns are images of base divisors).
    pub fn pullback11_matrix(&self) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.blown.h11(), self.base.h11());
        for i in 0..self.base.h11() {
            m[(i, i)] = Rat::one();
        }
        m
    }
}
