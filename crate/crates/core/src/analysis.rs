//! Cohomological side of the Monge-Ampère well-definedness question for a
//! pullback `f^*(theta)` under a pseudo-isomorphism.
//!
//! * [`condition_c_residual`] and [`condition_c_kernel`]: the intersection
//!   numbers `theta . C` for curves `C` in `I(f^-1)`, and the classes for
//!   which all of them vanish.
//! * [`blowdown_defect`]: for the blowup `p` of a curve `D` with fiber `F`,
//!   `p_*(p^* p_* a ^ b) - p_*(a ^ b) = (a.F)(b.F) [D]`.
//! * [`pullback_product_defect`]: `f^* t1 ^ f^* t2 - f^*(t1 ^ t2)`.
//! * [`ma_total_mass`]: `(f^* theta)^3`.
//! * [`nef_check`]: nonnegativity against the model's declared test curves.

use indexmap::IndexMap;

use crate::blowup::{apply_step, Blowdown};
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, RatMatrix};
use crate::map::PseudoIsoModel;
use crate::rat::Rat;
use crate::ring::{BlowupCenter, H11Class, H22Class, VarietyModel};

/// Outcome of a defect computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectReport {
    /// Which computation produced the report.
    pub context: String,
    pub defect_class: H22Class,
    /// Per-curve intersection numbers that govern the defect.
    pub per_curve_residuals: IndexMap<String, Rat>,
    /// `true` exactly when `defect_class` is zero.
    pub vanishes: bool,
}

impl DefectReport {
    fn new(
        context: &str,
        defect_class: H22Class,
        per_curve_residuals: IndexMap<String, Rat>,
    ) -> Self {
        DefectReport {
            context: context.to_string(),
            vanishes: defect_class.is_zero(),
            defect_class,
            per_curve_residuals,
        }
    }
}

/// Result of pairing a class against the declared nef-test curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NefVerdict {
    pub is_nef_on_generators: bool,
    /// First generator with a negative pairing.
    pub witness: Option<(String, Rat)>,
    /// Pairing with every generator, in registry order.
    pub values: Vec<(String, Rat)>,
}

/// `theta . C` for each curve `C` of `I(f^-1)`; theta lives on the target.
pub fn condition_c_residual(
    map: &PseudoIsoModel,
    theta: &H11Class,
) -> Result<IndexMap<String, Rat>> {
    let target = map.target();
    map.indeterminacy_backward()
        .iter()
        .map(|name| {
            let curve = target.curve(name)?;
            Ok((name.clone(), target.pair(theta, &curve.class)?))
        })
        .collect()
}

pub fn condition_c_holds(residuals: &IndexMap<String, Rat>) -> bool {
    residuals.values().all(Rat::is_zero)
}

/// Basis of the classes satisfying Condition (C), normalized to primitive
/// integer vectors with positive leading coefficient.
pub fn condition_c_kernel(map: &PseudoIsoModel) -> Result<Vec<H11Class>> {
    let target = map.target();
    let n = target.h11();
    let p = target.pairing_matrix();
    let mut rows = Vec::new();
    for name in map.indeterminacy_backward() {
        let c = &target.curve(name)?.class;
        rows.push(p.mul_vec(c.coeffs())?);
    }
    let constraints = if rows.is_empty() {
        RatMatrix::zeros(0, n)
    } else {
        RatMatrix::from_rows(rows)?
    };
    Ok(kernel_basis(&constraints)
        .into_iter()
        .map(H11Class::new)
        .collect())
}

/// The blowdown defect of the last step of `blown` over `parent`, computed
/// from the closed formula and, independently, through the ring operations.
/// The two must agree.
pub fn blowdown_defect(
    parent: &VarietyModel,
    blown: &VarietyModel,
    alpha: &H11Class,
    beta: &H11Class,
) -> Result<DefectReport> {
    let step = blown
        .provenance()
        .last()
        .ok_or_else(|| Error::StepMismatch("blown-up model has no blowup history".into()))?;
    let BlowupCenter::RationalCurve { class: center, .. } = &step.center else {
        return Err(Error::StepMismatch("last step is a point blowup".into()));
    };
    let mut replay = apply_step(parent, step)?.into_parts();
    replay.name = blown.name().to_string();
    if &replay != blown.parts() {
        return Err(Error::StepMismatch(format!(
            "{} is not {} blown up along {}",
            blown.name(),
            parent.name(),
            step.center.name()
        )));
    }
    blown.check_h11(alpha)?;
    blown.check_h11(beta)?;

    let fiber = blown.h22_basis_class(&step.new_curve)?;
    let alpha_f = blown.pair(alpha, &fiber)?;
    let beta_f = blown.pair(beta, &fiber)?;
    let formula = center.scale(&(&alpha_f * &beta_f));

    let bd = Blowdown::new(blown, parent)?;
    let pulled = bd.pullback11(&bd.pushforward11(alpha)?)?;
    let ring = &bd.pushforward22(&blown.cup(&pulled, beta)?)?
        - &bd.pushforward22(&blown.cup(alpha, beta)?)?;
    if ring != formula {
        return Err(Error::DefectMismatch {
            formula: parent.format_h22(&formula),
            ring: parent.format_h22(&ring),
        });
    }

    let mut residuals = IndexMap::new();
    residuals.insert(format!("alpha.{}", step.new_curve), alpha_f);
    residuals.insert(format!("beta.{}", step.new_curve), beta_f);
    Ok(DefectReport::new("blowdown", formula, residuals))
}

/// `f^* t1 ^ f^* t2 - f^*(t1 ^ t2)` on the source. The residual table is the
/// Condition (C) residual of `t1`; when it vanishes, so does the defect.
pub fn pullback_product_defect(
    map: &PseudoIsoModel,
    theta1: &H11Class,
    theta2: &H11Class,
) -> Result<DefectReport> {
    let source = map.source();
    let a = map.pullback11(theta1)?;
    let b = map.pullback11(theta2)?;
    let product_of_pullbacks = source.cup(&a, &b)?;
    let pullback_of_product = map.pullback22(&map.target().cup(theta1, theta2)?)?;
    let defect = &product_of_pullbacks - &pullback_of_product;
    Ok(DefectReport::new(
        "pullback-product",
        defect,
        condition_c_residual(map, theta1)?,
    ))
}

/// Total Monge-Ampère mass of `f^* theta`: its triple self-intersection.
pub fn ma_total_mass(map: &PseudoIsoModel, theta: &H11Class) -> Result<Rat> {
    map.source().cube(&map.pullback11(theta)?)
}

/// Nef on the declared generators. This is not a certificate for the whole
/// cone of curves.
pub fn nef_check(model: &VarietyModel, theta: &H11Class) -> Result<NefVerdict> {
    let mut values = Vec::new();
    for c in model.nef_generators() {
        values.push((c.name.clone(), model.pair(theta, &c.class)?));
    }
    if values.is_empty() {
        return Err(Error::NoNefGenerators {
            model: model.name().to_string(),
        });
    }
    let witness = values.iter().find(|(_, v)| v.is_negative()).cloned();
    Ok(NefVerdict {
        is_nef_on_generators: witness.is_none(),
        witness,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::{blowup_rational_curve, projective3, sigma_name, standard_x, NormalDegree};
    use crate::map::{standard_jx, MapParts};
    use std::sync::Arc;

    fn eta() -> H11Class {
        H11Class::from_ints(&[2, -1, -1, -1, -1])
    }

    #[test]
    fn residuals_of_jx() {
        let j = standard_jx();
        let x = j.target();
        let r = condition_c_residual(&j, &x.h11_basis_class("H").unwrap()).unwrap();
        assert_eq!(r.len(), 6);
        assert!(r.values().all(|v| v == &Rat::one()));
        assert!(condition_c_holds(
            &condition_c_residual(&j, &eta()).unwrap()
        ));

        let r = condition_c_residual(&j, &x.h11_basis_class("E0").unwrap()).unwrap();
        for (i, jj) in crate::blowup::COORDINATE_LINES {
            // Sigma~_{i,j} passes through e0 iff 0 is not in {i, j}.
            let expected = if i != 0 && jj != 0 {
                Rat::one()
            } else {
                Rat::zero()
            };
            assert_eq!(r[&sigma_name(i, jj)], expected);
        }
    }

    #[test]
    fn kernels() {
        assert_eq!(condition_c_kernel(&standard_jx()).unwrap(), vec![eta()]);

        let x = Arc::new(standard_x());
        let id = PseudoIsoModel::identity(x.clone());
        assert_eq!(condition_c_kernel(&id).unwrap().len(), 5);

        let mut parts = id.parts().clone();
        parts.indeterminacy_backward = vec!["L0".into()];
        let synthetic = PseudoIsoModel::new(parts).unwrap();
        let k = condition_c_kernel(&synthetic).unwrap();
        let expected: Vec<H11Class> = ["H", "E1", "E2", "E3"]
            .iter()
            .map(|l| x.h11_basis_class(l).unwrap())
            .collect();
        assert_eq!(k, expected);
    }

    #[test]
    fn unregistered_residual_curve() {
        // Registered names are enforced at map construction, so build one by hand.
        let x = Arc::new(standard_x());
        let parts = MapParts {
            indeterminacy_backward: vec!["missing".into()],
            ..PseudoIsoModel::identity(x).parts().clone()
        };
        assert!(matches!(
            PseudoIsoModel::new(parts),
            Err(Error::UnknownCurve(_))
        ));
    }

    #[test]
    fn blowdown_defect_on_line_blowup() {
        let p = projective3();
        let m = blowup_rational_curve(&p, "line", NormalDegree::Derive, "").unwrap();
        let e = m.h11_basis_class("E").unwrap();
        let r = blowdown_defect(&p, &m, &e, &e).unwrap();
        assert_eq!(r.defect_class, H22Class::from_ints(&[1]));
        assert!(!r.vanishes);
        assert_eq!(r.per_curve_residuals["alpha.F"], Rat::from(-1));

        let h = m.h11_basis_class("H").unwrap();
        assert!(blowdown_defect(&p, &m, &h, &e).unwrap().vanishes);
    }

    #[test]
    fn blowdown_defect_rejects_wrong_parent() {
        let p = projective3();
        let m = blowup_rational_curve(&p, "line", NormalDegree::Derive, "").unwrap();
        let x = standard_x();
        let e = m.h11_basis_class("E").unwrap();
        assert!(blowdown_defect(&x, &m, &e, &e).is_err());
        assert!(matches!(
            blowdown_defect(&p, &x, &H11Class::zero(5), &H11Class::zero(5)),
            Err(Error::StepMismatch(_))
        ));
        assert!(matches!(
            blowdown_defect(&p, &p, &H11Class::zero(1), &H11Class::zero(1)),
            Err(Error::StepMismatch(_))
        ));
    }

    #[test]
    fn pullback_product_examples() {
        let j = standard_jx();
        let h = j.source().h11_basis_class("H").unwrap();
        let hh = pullback_product_defect(&j, &h, &h).unwrap();
        assert_eq!(hh.defect_class, H22Class::from_ints(&[6, -3, -3, -3, -3]));
        assert!(!hh.vanishes);
        assert!(
            pullback_product_defect(&j, &eta(), &eta())
                .unwrap()
                .vanishes
        );
        assert!(pullback_product_defect(&j, &eta(), &h).unwrap().vanishes);
        let zero = H11Class::zero(5);
        assert!(pullback_product_defect(&j, &zero, &zero).unwrap().vanishes);
    }

    #[test]
    fn masses() {
        let j = standard_jx();
        let x = j.source().clone();
        let h_minus_e0 = x.h11_class(&[("H", 1), ("E0", -1)]).unwrap();
        assert_eq!(ma_total_mass(&j, &h_minus_e0).unwrap(), Rat::from(-3));
        assert_eq!(ma_total_mass(&j, &eta()).unwrap(), Rat::from(4));
        let id = PseudoIsoModel::identity(x.clone());
        assert_eq!(
            ma_total_mass(&id, &x.h11_basis_class("H").unwrap()).unwrap(),
            Rat::one()
        );
    }

    #[test]
    fn nef_examples() {
        let x = standard_x();
        let v = nef_check(&x, &eta()).unwrap();
        assert!(v.is_nef_on_generators);
        let values: Vec<i64> = v
            .values
            .iter()
            .map(|(_, q)| q.to_f64().unwrap() as i64)
            .collect();
        assert_eq!(values, [2, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0]);
        assert!(
            nef_check(&x, &x.h11_basis_class("H").unwrap())
                .unwrap()
                .is_nef_on_generators
        );
        let v = nef_check(&x, &x.h11_basis_class("E0").unwrap()).unwrap();
        assert!(!v.is_nef_on_generators);
        assert_eq!(v.witness, Some(("L0".to_string(), Rat::from(-1))));
    }

    #[test]
    fn nef_requires_generators() {
        let mut parts = projective3().into_parts();
        parts.curves.clear();
        let bare = VarietyModel::new(parts).unwrap();
        assert!(matches!(
            nef_check(&bare, &H11Class::from_ints(&[1])),
            Err(Error::NoNefGenerators { .. })
        ));
    }
}
