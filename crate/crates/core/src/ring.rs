//! Finite models of the even cohomology of a smooth projective 3-fold.
//!
//! A [`VarietyModel`] records bases of `H^{1,1}` (divisor classes) and
//! `H^{2,2}` (curve classes), the intersection pairing between them, the cup
//! product of two divisor classes, the canonical class and a registry of named
//! curves. `H^{3,3}` is identified with the rationals, so pairings and triple
//! products are plain [`Rat`]s.

use std::collections::HashSet;
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::rat::Rat;

/// Degree marker for classes in `H^{1,1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Divisor;

/// Degree marker for classes in `H^{2,2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Curve;

/// A cohomology class given by its coordinates in a model's basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Class<D> {
    coeffs: Vec<Rat>,
    _degree: PhantomData<fn() -> D>,
}

pub type H11Class = Class<Divisor>;
pub type H22Class = Class<Curve>;

impl<D> Class<D> {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        Class {
            coeffs,
            _degree: PhantomData,
        }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rat::from(c)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![Rat::zero(); dim])
    }

    /// The `i`-th basis vector of a `dim`-dimensional space.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut c = Self::zero(dim);
        c.coeffs[i] = Rat::one();
        c
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rat> {
        self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    pub fn scale(&self, s: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Coordinates padded with zeros up to `dim` (pullback along a blowup).
    pub fn extended(&self, dim: usize) -> Self {
        debug_assert!(dim >= self.dim());
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(dim, Rat::zero());
        Self::new(coeffs)
    }

    /// The first `dim` coordinates (pushforward along a blowup).
    pub fn truncated(&self, dim: usize) -> Self {
        Self::new(self.coeffs[..dim].to_vec())
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: &Rat, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "class dimension mismatch");
        Self::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + &(s * b))
                .collect(),
        )
    }
}

impl<D> fmt::Debug for Class<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coeffs).finish()
    }
}

impl<D> Add for &Class<D> {
    type Output = Class<D>;
    fn add(self, rhs: &Class<D>) -> Class<D> {
        self.add_scaled(&Rat::one(), rhs)
    }
}

impl<D> Sub for &Class<D> {
    type Output = Class<D>;
    fn sub(self, rhs: &Class<D>) -> Class<D> {
        self.add_scaled(&Rat::from(-1), rhs)
    }
}

impl<D> Neg for &Class<D> {
    type Output = Class<D>;
    fn neg(self) -> Class<D> {
        Class::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl<D> Add for Class<D> {
    type Output = Class<D>;
    fn add(self, rhs: Class<D>) -> Class<D> {
        &self + &rhs
    }
}

impl<D> Sub for Class<D> {
    type Output = Class<D>;
    fn sub(self, rhs: Class<D>) -> Class<D> {
        &self - &rhs
    }
}

/// Renders `coeffs` as a linear combination such as `2H - E0 - 3/2E1`.
pub fn format_combination(labels: &[String], coeffs: &[Rat]) -> String {
    let mut out = String::new();
    for (label, c) in labels.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        if !mag.is_one() {
            out.push_str(&mag.to_string());
        }
        out.push_str(label);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Flags attached to a registered curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CurveFlags {
    pub effective: bool,
    /// Member of the list of curves a nef test pairs against.
    pub nef_generator: bool,
    /// May appear in the indeterminacy locus of a map.
    pub indeterminacy_eligible: bool,
    /// Smooth rational, so its normal bundle degree can be derived from `K`.
    pub rational: bool,
}

impl CurveFlags {
    pub const EFFECTIVE_RATIONAL: CurveFlags = CurveFlags {
        effective: true,
        nef_generator: true,
        indeterminacy_eligible: false,
        rational: true,
    };
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveEntry {
    pub name: String,
    pub class: H22Class,
    pub flags: CurveFlags,
}

/// Center of a single blowup.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BlowupCenter {
    Point {
        name: String,
    },
    RationalCurve {
        name: String,
        class: H22Class,
        /// Degree of the normal bundle of the center.
        normal_degree: Rat,
    },
}

impl BlowupCenter {
    pub fn name(&self) -> &str {
        match self {
            BlowupCenter::Point { name } | BlowupCenter::RationalCurve { name, .. } => name,
        }
    }
}

/// One step in the blowup history of a model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlowupStep {
    pub center: BlowupCenter,
    pub new_divisor: String,
    /// A line in the exceptional divisor (point case) or a fiber over the
    /// center (curve case).
    pub new_curve: String,
}

/// Raw ingredients of a [`VarietyModel`]. The cup table is indexed
/// `cup[i * h11 + j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelParts {
    pub name: String,
    pub h11_basis: Vec<String>,
    pub h22_basis: Vec<String>,
    pub pairing: RatMatrix,
    pub cup: Vec<H22Class>,
    pub canonical: H11Class,
    pub curves: Vec<CurveEntry>,
    pub provenance: Vec<BlowupStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyModel {
    parts: ModelParts,
}

fn check_unique<'a>(what: &str, labels: impl IntoIterator<Item = &'a String>) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::InvalidModel(format!("duplicate {what} {l:?}")));
        }
    }
    Ok(())
}

fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

impl VarietyModel {
    /// Checks shapes and label uniqueness. Algebraic consistency is the job
    /// of [`VarietyModel::validate`].
    pub fn new(parts: ModelParts) -> Result<Self> {
        let n1 = parts.h11_basis.len();
        let n2 = parts.h22_basis.len();
        check_unique("H^(1,1) label", &parts.h11_basis)?;
        check_unique("H^(2,2) label", &parts.h22_basis)?;
        check_unique("curve name", parts.curves.iter().map(|c| &c.name))?;
        if n1 != n2 {
            return Err(Error::InvalidModel(format!(
                "h11 = {n1} but h22 = {n2}; only square pairings are supported"
            )));
        }
        check_dim("pairing rows", n1, parts.pairing.rows())?;
        check_dim("pairing columns", n2, parts.pairing.cols())?;
        check_dim("cup table size", n1 * n1, parts.cup.len())?;
        for c in &parts.cup {
            check_dim("cup table entry", n2, c.dim())?;
        }
        check_dim("canonical class", n1, parts.canonical.dim())?;
        for c in &parts.curves {
            check_dim("curve class", n2, c.class.dim())?;
        }
        Ok(VarietyModel { parts })
    }

    pub fn parts(&self) -> &ModelParts {
        &self.parts
    }

    pub fn into_parts(self) -> ModelParts {
        self.parts
    }

    pub fn name(&self) -> &str {
        &self.parts.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.parts.name = name.into();
        self
    }

    pub fn h11(&self) -> usize {
        self.parts.h11_basis.len()
    }

    pub fn h22(&self) -> usize {
        self.parts.h22_basis.len()
    }

    pub fn h11_basis(&self) -> &[String] {
        &self.parts.h11_basis
    }

    pub fn h22_basis(&self) -> &[String] {
        &self.parts.h22_basis
    }

    pub fn pairing_matrix(&self) -> &RatMatrix {
        &self.parts.pairing
    }

    pub fn canonical(&self) -> &H11Class {
        &self.parts.canonical
    }

    pub fn curves(&self) -> &[CurveEntry] {
        &self.parts.curves
    }

    pub fn provenance(&self) -> &[BlowupStep] {
        &self.parts.provenance
    }

    pub fn curve(&self, name: &str) -> Result<&CurveEntry> {
        self.parts
            .curves
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCurve(name.to_string()))
    }

    /// Registered curves flagged as nef-test generators, in registry order.
    pub fn nef_generators(&self) -> impl Iterator<Item = &CurveEntry> {
        self.parts.curves.iter().filter(|c| c.flags.nef_generator)
    }

    pub fn h11_index(&self, label: &str) -> Option<usize> {
        self.parts.h11_basis.iter().position(|l| l == label)
    }

    pub fn h22_index(&self, label: &str) -> Option<usize> {
        self.parts.h22_basis.iter().position(|l| l == label)
    }

    pub fn h11_basis_class(&self, label: &str) -> Result<H11Class> {
        let i = self
            .h11_index(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        Ok(H11Class::basis(self.h11(), i))
    }

    pub fn h22_basis_class(&self, label: &str) -> Result<H22Class> {
        let i = self
            .h22_index(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        Ok(H22Class::basis(self.h22(), i))
    }

    /// Divisor class from `(label, coefficient)` terms.
    pub fn h11_class(&self, terms: &[(&str, i64)]) -> Result<H11Class> {
        let mut c = H11Class::zero(self.h11());
        for &(label, k) in terms {
            c = c.add_scaled(&Rat::from(k), &self.h11_basis_class(label)?);
        }
        Ok(c)
    }

    /// Curve class from `(label, coefficient)` terms.
    pub fn h22_class(&self, terms: &[(&str, i64)]) -> Result<H22Class> {
        let mut c = H22Class::zero(self.h22());
        for &(label, k) in terms {
            c = c.add_scaled(&Rat::from(k), &self.h22_basis_class(label)?);
        }
        Ok(c)
    }

    pub fn format_h11(&self, c: &H11Class) -> String {
        format_combination(&self.parts.h11_basis, c.coeffs())
    }

    pub fn format_h22(&self, c: &H22Class) -> String {
        format_combination(&self.parts.h22_basis, c.coeffs())
    }

    pub fn check_h11(&self, a: &H11Class) -> Result<()> {
        check_dim("H^(1,1) class", self.h11(), a.dim())
    }

    pub fn check_h22(&self, c: &H22Class) -> Result<()> {
        check_dim("H^(2,2) class", self.h22(), c.dim())
    }

    /// Cup product of two basis divisors, as stored.
    pub fn cup_entry(&self, i: usize, j: usize) -> &H22Class {
        &self.parts.cup[i * self.h11() + j]
    }

    /// Intersection number of a divisor class with a curve class.
    pub fn pair(&self, a: &H11Class, c: &H22Class) -> Result<Rat> {
        self.check_h11(a)?;
        self.check_h22(c)?;
        let p = &self.parts.pairing;
        let mut total = Rat::zero();
        for (i, ai) in a.coeffs().iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let row: Rat = p.row(i).iter().zip(c.coeffs()).map(|(x, y)| x * y).sum();
            total += ai * &row;
        }
        Ok(total)
    }

    pub fn cup(&self, a: &H11Class, b: &H11Class) -> Result<H22Class> {
        self.check_h11(a)?;
        self.check_h11(b)?;
        let mut out = H22Class::zero(self.h22());
        for (i, ai) in a.coeffs().iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs().iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                out = out.add_scaled(&(ai * bj), self.cup_entry(i, j));
            }
        }
        Ok(out)
    }

    /// `a . b . c`, computed as `pair(a, cup(b, c))`.
    pub fn triple(&self, a: &H11Class, b: &H11Class, c: &H11Class) -> Result<Rat> {
        self.pair(a, &self.cup(b, c)?)
    }

    /// Self-intersection `a^3`.
    pub fn cube(&self, a: &H11Class) -> Result<Rat> {
        self.triple(a, a, a)
    }

    /// Runs every structural consistency check and reports each outcome.
    pub fn validate(&self) -> ValidationReport {
        let mut checks = vec![
            self.check_cup_symmetry(),
            self.check_triple_symmetry(),
            self.check_nondegenerate(),
        ];
        if !self.parts.provenance.is_empty() {
            checks.push(self.check_exceptional_independence());
        }
        ValidationReport {
            model: self.parts.name.clone(),
            checks,
        }
    }

    fn check_cup_symmetry(&self) -> Check {
        let n = self.h11();
        let bad: Vec<String> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.cup_entry(i, j) != self.cup_entry(j, i))
            .map(|(i, j)| format!("{}*{}", self.parts.h11_basis[i], self.parts.h11_basis[j]))
            .collect();
        Check::new("cup symmetry", bad)
    }

    fn check_triple_symmetry(&self) -> Check {
        let n = self.h11();
        let p = &self.parts.pairing;
        // t[i][j][k] = e_i . cup(e_j, e_k)
        let t: Vec<Rat> = (0..n * n * n)
            .map(|idx| {
                let (i, j, k) = (idx / (n * n), (idx / n) % n, idx % n);
                p.row(i)
                    .iter()
                    .zip(self.cup_entry(j, k).coeffs())
                    .map(|(x, y)| x * y)
                    .sum()
            })
            .collect();
        let at = |i: usize, j: usize, k: usize| &t[(i * n + j) * n + k];
        let mut bad = Vec::new();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let v = at(i, j, k);
                    let perms = [
                        at(i, k, j),
                        at(j, i, k),
                        at(j, k, i),
                        at(k, i, j),
                        at(k, j, i),
                    ];
                    if perms.iter().any(|w| *w != v) {
                        let l = &self.parts.h11_basis;
                        bad.push(format!("{}.{}.{}", l[i], l[j], l[k]));
                    }
                }
            }
        }
        Check::new("triple-product symmetry", bad)
    }

    fn check_nondegenerate(&self) -> Check {
        let det = self
            .parts
            .pairing
            .determinant()
            .expect("pairing is square by construction");
        let bad = if det.is_zero() {
            vec!["pairing determinant is 0".to_string()]
        } else {
            vec![]
        };
        Check::new("pairing nondegeneracy", bad)
    }

    fn check_exceptional_independence(&self) -> Check {
        let mut rows = Vec::new();
        let mut bad = Vec::new();
        for step in &self.parts.provenance {
            match self.h11_basis_class(&step.new_divisor) {
                Ok(c) => rows.push(c.into_coeffs()),
                Err(_) => bad.push(format!(
                    "exceptional divisor {:?} missing",
                    step.new_divisor
                )),
            }
        }
        if bad.is_empty() && !rows.is_empty() {
            let count = rows.len();
            let rank = RatMatrix::from_rows(rows)
                .expect("equal-length rows")
                .rank();
            if rank != count {
                bad.push(format!("rank {rank} < {count} exceptional classes"));
            }
        }
        Check::new("exceptional independence", bad)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Offending entries when the check fails.
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: &'static str, failures: Vec<String>) -> Self {
        Check {
            name,
            passed: failures.is_empty(),
            failures,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub model: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model {}", self.model)?;
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            write!(f, "  {status} {}", c.name)?;
            if !c.failures.is_empty() {
                write!(f, ": {}", c.failures.join(", "))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
