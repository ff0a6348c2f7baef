//! Pseudo-isomorphisms modelled by their action on cohomology.
//!
//! Matrices follow the column convention: column `j` of `m11` holds the
//! pullback of the `j`-th target basis divisor, written in source coordinates.
//! The same holds for `m22` on curve classes.

use std::sync::Arc;

use crate::blowup::{sigma_name, standard_x, Blowdown, COORDINATE_LINES};
use crate::error::{Error, Result};
use crate::linalg::{mat_inverse, solve_linear, RatMatrix, Solution};
use crate::rat::Rat;
use crate::ring::{H11Class, H22Class, VarietyModel};

/// Raw ingredients of a [`PseudoIsoModel`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapParts {
    pub name: String,
    pub source: Arc<VarietyModel>,
    pub target: Arc<VarietyModel>,
    pub m11: RatMatrix,
    pub m22: Option<RatMatrix>,
    pub involution: bool,
    /// Curves of the source registry making up `I(f)`.
    pub indeterminacy_forward: Vec<String>,
    /// Curves of the target registry making up `I(f^-1)`.
    pub indeterminacy_backward: Vec<String>,
}

/// A bimeromorphic map `f: source -> target` that is an isomorphism off
/// finitely many curves on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoIsoModel {
    parts: MapParts,
}

impl PseudoIsoModel {
    pub fn new(parts: MapParts) -> Result<Self> {
        let (s, t) = (&parts.source, &parts.target);
        let shape = |what: &str, m: &RatMatrix, rows: usize, cols: usize| {
            if m.rows() != rows || m.cols() != cols {
                Err(Error::InvalidMap(format!(
                    "{what} is {}x{}, expected {rows}x{cols}",
                    m.rows(),
                    m.cols()
                )))
            } else {
                Ok(())
            }
        };
        shape("m11", &parts.m11, s.h11(), t.h11())?;
        if let Some(m22) = &parts.m22 {
            shape("m22", m22, s.h22(), t.h22())?;
        }
        for c in &parts.indeterminacy_forward {
            s.curve(c)?;
        }
        for c in &parts.indeterminacy_backward {
            t.curve(c)?;
        }
        if parts.involution {
            if s != t {
                return Err(Error::InvalidMap("involution with source != target".into()));
            }
            if !(&parts.m11 * &parts.m11).is_identity() {
                return Err(Error::InvalidMap(
                    "m11 of an involution must square to the identity".into(),
                ));
            }
            if let Some(m22) = &parts.m22 {
                if !(m22 * m22).is_identity() {
                    return Err(Error::InvalidMap(
                        "m22 of an involution must square to the identity".into(),
                    ));
                }
            }
        }
        Ok(PseudoIsoModel { parts })
    }

    /// The identity map of `model`, with empty indeterminacy loci.
    pub fn identity(model: Arc<VarietyModel>) -> Self {
        let (n1, n2) = (model.h11(), model.h22());
        PseudoIsoModel {
            parts: MapParts {
                name: format!("id_{}", model.name()),
                source: model.clone(),
                target: model,
                m11: RatMatrix::identity(n1),
                m22: Some(RatMatrix::identity(n2)),
                involution: true,
                indeterminacy_forward: vec![],
                indeterminacy_backward: vec![],
            },
        }
    }

    pub fn parts(&self) -> &MapParts {
        &self.parts
    }

    pub fn name(&self) -> &str {
        &self.parts.name
    }

    pub fn source(&self) -> &Arc<VarietyModel> {
        &self.parts.source
    }

    pub fn target(&self) -> &Arc<VarietyModel> {
        &self.parts.target
    }

    pub fn m11(&self) -> &RatMatrix {
        &self.parts.m11
    }

    pub fn m22(&self) -> Option<&RatMatrix> {
        self.parts.m22.as_ref()
    }

    pub fn is_involution(&self) -> bool {
        self.parts.involution
    }

    pub fn indeterminacy_forward(&self) -> &[String] {
        &self.parts.indeterminacy_forward
    }

    pub fn indeterminacy_backward(&self) -> &[String] {
        &self.parts.indeterminacy_backward
    }

    /// `N = P^-1 M^T P`, the unique matrix with `pair(x, N y) = pair(M x, y)`.
    ///
    /// Only offered for involutions, where pullback and pushforward coincide
    /// and the duality therefore determines the action on curves.
    pub fn derive_pullback22(&self) -> Result<RatMatrix> {
        if !self.parts.involution {
            return Err(Error::NotAnInvolution);
        }
        let p = self.parts.source.pairing_matrix();
        let p_inv = mat_inverse(p)?;
        p_inv.try_mul(&self.parts.m11.transpose())?.try_mul(p)
    }

    /// Replaces `m22` with the duality-derived matrix.
    pub fn with_derived_pullback22(mut self) -> Result<Self> {
        self.parts.m22 = Some(self.derive_pullback22()?);
        Ok(self)
    }

    fn require_m22(&self) -> Result<&RatMatrix> {
        self.parts
            .m22
            .as_ref()
            .ok_or_else(|| Error::MissingPullback22(self.parts.name.clone()))
    }

    pub fn pullback11(&self, theta: &H11Class) -> Result<H11Class> {
        self.parts.target.check_h11(theta)?;
        Ok(H11Class::new(self.parts.m11.mul_vec(theta.coeffs())?))
    }

    pub fn pullback22(&self, c: &H22Class) -> Result<H22Class> {
        self.parts.target.check_h22(c)?;
        Ok(H22Class::new(self.require_m22()?.mul_vec(c.coeffs())?))
    }

    /// `f_* = (f^-1)^*`, the inverse of the pullback matrix.
    pub fn pushforward11(&self, theta: &H11Class) -> Result<H11Class> {
        self.parts.source.check_h11(theta)?;
        let inv = mat_inverse(&self.parts.m11)?;
        Ok(H11Class::new(inv.mul_vec(theta.coeffs())?))
    }

    pub fn pushforward22(&self, c: &H22Class) -> Result<H22Class> {
        self.parts.source.check_h22(c)?;
        let inv = mat_inverse(self.require_m22()?)?;
        Ok(H22Class::new(inv.mul_vec(c.coeffs())?))
    }
}

/// The lift `J_X` of the standard Cremona involution
/// `[x0:x1:x2:x3] -> [1/x0:1/x1:1/x2:1/x3]` to [`standard_x`].
///
/// ```text
/// J*(H)  = 3H - 2E0 - 2E1 - 2E2 - 2E3
/// J*(Ei) = H - sum of Ej over j != i
/// ```
///
/// Both indeterminacy loci are the six curves `Sigma~_{i,j}`; `m22` is derived
/// by duality.
pub fn standard_jx() -> PseudoIsoModel {
    let x = Arc::new(standard_x());
    let mut columns = vec![vec![3, -2, -2, -2, -2]];
    for i in 0..4 {
        let mut col = vec![1, -1, -1, -1, -1];
        col[1 + i] = 0;
        columns.push(col);
    }
    let columns: Vec<Vec<Rat>> = columns
        .into_iter()
        .map(|c| c.into_iter().map(Rat::from).collect())
        .collect();
    let sigmas: Vec<String> = COORDINATE_LINES
        .iter()
        .map(|&(i, j)| sigma_name(i, j))
        .collect();
    PseudoIsoModel::new(MapParts {
        name: "JX".into(),
        source: x.clone(),
        target: x,
        m11: RatMatrix::from_columns(&columns).expect("5 columns of length 5"),
        m22: None,
        involution: true,
        indeterminacy_forward: sigmas.clone(),
        indeterminacy_backward: sigmas,
    })
    .and_then(PseudoIsoModel::with_derived_pullback22)
    .expect("J_X data is consistent")
}

/// A resolution `Z` of the graph of `f: X -> Y` with projections `pi: Z -> X`
/// and `h: Z -> Y`, given by their pullbacks on divisors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionData {
    z: Arc<VarietyModel>,
    pi_pullback: RatMatrix,
    h_pullback: RatMatrix,
    exceptional: Vec<usize>,
}

impl ResolutionData {
    /// `pi_*` is taken to forget the exceptional coordinates and keep the
    /// remaining ones in order; it must be a left inverse of `pi_pullback`.
    pub fn new(
        z: Arc<VarietyModel>,
        pi_pullback: RatMatrix,
        h_pullback: RatMatrix,
        exceptional_labels: &[String],
    ) -> Result<Self> {
        let mut exceptional = Vec::with_capacity(exceptional_labels.len());
        for l in exceptional_labels {
            let i = z
                .h11_index(l)
                .ok_or_else(|| Error::UnknownLabel(l.clone()))?;
            if exceptional.contains(&i) {
                return Err(Error::InvalidMap(format!(
                    "exceptional label {l:?} listed twice"
                )));
            }
            exceptional.push(i);
        }
        if pi_pullback.rows() != z.h11() || h_pullback.rows() != z.h11() {
            return Err(Error::InvalidMap(
                "resolution pullbacks must land in H^(1,1)(Z)".into(),
            ));
        }
        let kept: Vec<usize> = (0..z.h11()).filter(|i| !exceptional.contains(i)).collect();
        if kept.len() != pi_pullback.cols() {
            return Err(Error::InvalidMap(format!(
                "{} non-exceptional classes on Z but h11(X) = {}",
                kept.len(),
                pi_pullback.cols()
            )));
        }
        let mut push = RatMatrix::zeros(kept.len(), z.h11());
        for (r, &i) in kept.iter().enumerate() {
            push[(r, i)] = Rat::one();
        }
        if !(&push * &pi_pullback).is_identity() {
            return Err(Error::InvalidMap(
                "pi_* pi^* is not the identity on H^(1,1)(X)".into(),
            ));
        }
        Ok(ResolutionData {
            z,
            pi_pullback,
            h_pullback,
            exceptional,
        })
    }

    /// Resolution of the identity of `base` by the iterated blowup `blown`:
    /// `pi = h` is the blowdown.
    pub fn trivial(blown: Arc<VarietyModel>, base: &VarietyModel) -> Result<Self> {
        let bd = Blowdown::new(&blown, base)?;
        let pi = bd.pullback11_matrix();
        let labels = bd.exceptional_labels().to_vec();
        Self::new(blown.clone(), pi.clone(), pi, &labels)
    }

    pub fn z(&self) -> &Arc<VarietyModel> {
        &self.z
    }

    pub fn pi_pullback(&self) -> &RatMatrix {
        &self.pi_pullback
    }

    pub fn h_pullback(&self) -> &RatMatrix {
        &self.h_pullback
    }

    pub fn exceptional_labels(&self) -> Vec<&str> {
        self.exceptional
            .iter()
            .map(|&i| self.z.h11_basis()[i].as_str())
            .collect()
    }

    /// Coefficients `lambda_j` with `pi^*(f^* theta) = h^* theta + sum_j lambda_j V_j`,
    /// one per exceptional divisor `V_j`, in the order they were given.
    pub fn exceptional_decomposition(
        &self,
        f_pullback: &RatMatrix,
        theta: &H11Class,
    ) -> Result<Vec<(String, Rat)>> {
        if f_pullback.rows() != self.pi_pullback.cols()
            || f_pullback.cols() != self.h_pullback.cols()
        {
            return Err(Error::DimensionMismatch {
                context: "f pullback against resolution",
                expected: self.pi_pullback.cols(),
                found: f_pullback.rows(),
            });
        }
        let f_theta = f_pullback.mul_vec(theta.coeffs())?;
        let lhs = self.pi_pullback.mul_vec(&f_theta)?;
        let h_theta = self.h_pullback.mul_vec(theta.coeffs())?;
        let diff: Vec<Rat> = lhs.iter().zip(&h_theta).map(|(a, b)| a - b).collect();

        let n = self.z.h11();
        let columns: Vec<Vec<Rat>> = self
            .exceptional
            .iter()
            .map(|&i| H11Class::basis(n, i).into_coeffs())
            .collect();
        let span = if columns.is_empty() {
            RatMatrix::zeros(n, 0)
        } else {
            RatMatrix::from_columns(&columns)?
        };
        let lambdas = match solve_linear(&span, &diff)? {
            Solution::Unique(v) => v,
            // Distinct basis vectors are independent.
            Solution::Underdetermined { .. } => unreachable!("exceptional classes are independent"),
            Solution::Inconsistent => return Err(Error::NotInExceptionalSpan),
        };
        Ok(self
            .exceptional_labels()
            .into_iter()
            .map(String::from)
            .zip(lambdas)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::{blowup_point, projective3, standard_z};

    #[test]
    fn jx_columns() {
        let j = standard_jx();
        assert_eq!(
            j.m11().column(0),
            H11Class::from_ints(&[3, -2, -2, -2, -2]).into_coeffs()
        );
        assert_eq!(
            j.m11().column(1),
            H11Class::from_ints(&[1, 0, -1, -1, -1]).into_coeffs()
        );
        assert!((j.m11() * j.m11()).is_identity());
    }

    #[test]
    fn duality_derivation() {
        let j = standard_jx();
        let n = j.derive_pullback22().unwrap();
        assert_eq!(
            n.column(0),
            H22Class::from_ints(&[3, -1, -1, -1, -1]).into_coeffs()
        );
        assert_eq!(
            n.column(1),
            H22Class::from_ints(&[2, 0, -1, -1, -1]).into_coeffs()
        );
        let x = j.source();
        for a in 0..5 {
            for c in 0..5 {
                let xa = H11Class::basis(5, a);
                let yc = H22Class::basis(5, c);
                let lhs = x
                    .pair(&xa, &H22Class::new(n.mul_vec(yc.coeffs()).unwrap()))
                    .unwrap();
                let rhs = x.pair(&j.pullback11(&xa).unwrap(), &yc).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn identity_duality() {
        let id = PseudoIsoModel::identity(Arc::new(standard_z()));
        assert!(id.derive_pullback22().unwrap().is_identity());
    }

    #[test]
    fn non_involution_refuses_duality() {
        let p = Arc::new(projective3());
        let map = PseudoIsoModel::new(MapParts {
            name: "scale".into(),
            source: p.clone(),
            target: p,
            m11: RatMatrix::from_int_rows(&[[2]]),
            m22: None,
            involution: false,
            indeterminacy_forward: vec![],
            indeterminacy_backward: vec![],
        })
        .unwrap();
        assert!(matches!(
            map.derive_pullback22(),
            Err(Error::NotAnInvolution)
        ));
        assert!(matches!(
            map.pullback22(&H22Class::from_ints(&[1])),
            Err(Error::MissingPullback22(_))
        ));
        assert_eq!(
            map.pushforward11(&H11Class::from_ints(&[1])).unwrap(),
            H11Class::new(vec![Rat::new(1, 2)])
        );
    }

    #[test]
    fn constructor_checks() {
        let x = Arc::new(standard_x());
        let base = standard_jx().parts().clone();

        let mut p = base.clone();
        p.m11 = RatMatrix::identity(4);
        assert!(PseudoIsoModel::new(p).is_err());

        let mut p = base.clone();
        p.indeterminacy_backward.push("nowhere".into());
        assert!(matches!(
            PseudoIsoModel::new(p),
            Err(Error::UnknownCurve(_))
        ));

        let mut p = base.clone();
        p.m11 = RatMatrix::diagonal(&H11Class::from_ints(&[2, 1, 1, 1, 1]).into_coeffs());
        p.m22 = None;
        assert!(PseudoIsoModel::new(p).is_err());

        let mut p = base;
        p.target = Arc::new(blowup_point(&x, "4").unwrap());
        assert!(PseudoIsoModel::new(p).is_err());
    }

    #[test]
    fn pullback_examples() {
        let j = standard_jx();
        let x = j.source();
        let h_minus_e0 = x.h11_class(&[("H", 1), ("E0", -1)]).unwrap();
        assert_eq!(
            j.pullback11(&h_minus_e0).unwrap(),
            H11Class::from_ints(&[2, -2, -1, -1, -1])
        );
        let eta = H11Class::from_ints(&[2, -1, -1, -1, -1]);
        assert_eq!(j.pullback11(&eta).unwrap(), eta);
        assert_eq!(
            j.pullback22(&x.h22_basis_class("H2").unwrap()).unwrap(),
            H22Class::from_ints(&[3, -1, -1, -1, -1])
        );
        let h = x.h11_basis_class("H").unwrap();
        assert_eq!(
            j.pushforward11(&h).unwrap(),
            H11Class::from_ints(&[3, -2, -2, -2, -2])
        );
        assert!(j.pullback11(&H11Class::zero(4)).is_err());
    }

    #[test]
    fn trivial_resolution_has_zero_lambdas() {
        let p = projective3();
        let z = Arc::new(blowup_point(&p, "0").unwrap());
        let res = ResolutionData::trivial(z, &p).unwrap();
        let lambdas = res
            .exceptional_decomposition(&RatMatrix::identity(1), &H11Class::from_ints(&[1]))
            .unwrap();
        assert_eq!(lambdas, vec![("E0".to_string(), Rat::zero())]);
    }

    #[test]
    fn synthetic_lambda() {
        // h^* = pi^* f^* - e_j on the first divisor: lambda_j = 1 for theta = H.
        let x = standard_x();
        let z = Arc::new(standard_z());
        let bd = Blowdown::new(&z, &x).unwrap();
        let pi = bd.pullback11_matrix();
        let f = standard_jx().m11().clone();
        let mut h = pi.try_mul(&f).unwrap();
        let j = z.h11_index("E12").unwrap();
        h[(j, 0)] -= Rat::one();
        let labels = bd.exceptional_labels().to_vec();
        let res = ResolutionData::new(z.clone(), pi, h, &labels).unwrap();
        let theta = x.h11_basis_class("H").unwrap();
        let lambdas = res.exceptional_decomposition(&f, &theta).unwrap();
        for (label, lambda) in &lambdas {
            let expected = if label == "E12" {
                Rat::one()
            } else {
                Rat::zero()
            };
            assert_eq!(lambda, &expected, "{label}");
        }
        let e0 = x.h11_basis_class("E0").unwrap();
        assert!(res
            .exceptional_decomposition(&f, &e0)
            .unwrap()
            .iter()
            .all(|(_, l)| l.is_zero()));
    }

    #[test]
    fn inconsistent_resolution_data() {
        let x = standard_x();
        let z = Arc::new(standard_z());
        let bd = Blowdown::new(&z, &x).unwrap();
        let pi = bd.pullback11_matrix();
        let mut h = pi.clone();
        h[(0, 0)] = Rat::from(2);
        let labels = bd.exceptional_labels().to_vec();
        let res = ResolutionData::new(z, pi, h, &labels).unwrap();
        let err = res
            .exceptional_decomposition(&RatMatrix::identity(5), &x.h11_basis_class("H").unwrap())
            .unwrap_err();
        assert!(matches!(err, Error::NotInExceptionalSpan));
    }

    #[test]
    fn resolution_invariant_enforced() {
        let x = standard_x();
        let z = Arc::new(standard_z());
        let bd = Blowdown::new(&z, &x).unwrap();
        let mut pi = bd.pullback11_matrix();
        pi[(1, 0)] = Rat::one();
        let labels = bd.exceptional_labels().to_vec();
        assert!(ResolutionData::new(z.clone(), pi.clone(), pi, &labels).is_err());
        let pi = bd.pullback11_matrix();
        assert!(ResolutionData::new(z, pi.clone(), pi, &labels[..5]).is_err());
    }
}
