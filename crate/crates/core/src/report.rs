//! Reports behind the `analyze` and `reproduce-paper` commands. Each report
//! renders as plain text and as JSON with exact rational strings.

use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Map, Value as Json};

use crate::analysis::{
    condition_c_holds, condition_c_kernel, condition_c_residual, ma_total_mass, nef_check,
    pullback_product_defect, NefVerdict,
};
use crate::blowup::{sigma_name, COORDINATE_LINES};
use crate::error::Result;
use crate::linalg::RatMatrix;
use crate::map::{MapParts, PseudoIsoModel};
use crate::rat::Rat;
use crate::ring::{H11Class, H22Class, VarietyModel};

fn labelled(labels: &[String], coeffs: &[Rat]) -> Json {
    let mut obj = Map::new();
    for (l, c) in labels.iter().zip(coeffs) {
        obj.insert(l.clone(), Json::String(c.to_string()));
    }
    Json::Object(obj)
}

fn rat_table<'a>(entries: impl IntoIterator<Item = (&'a String, &'a Rat)>) -> Json {
    let mut obj = Map::new();
    for (k, v) in entries {
        obj.insert(k.clone(), Json::String(v.to_string()));
    }
    Json::Object(obj)
}

/// Everything `analyze` reports about `f^* theta`.
#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub map: String,
    pub theta: H11Class,
    pub pullback: H11Class,
    pub residuals: indexmap::IndexMap<String, Rat>,
    pub condition_c: bool,
    pub kernel: Vec<H11Class>,
    pub defect: H22Class,
    pub defect_vanishes: bool,
    pub mass: Rat,
    pub nef: Option<NefVerdict>,
    source: Arc<VarietyModel>,
    target: Arc<VarietyModel>,
}

impl AnalysisReport {
    pub fn new(map: &PseudoIsoModel, theta: &H11Class) -> Result<Self> {
        let residuals = condition_c_residual(map, theta)?;
        let defect = pullback_product_defect(map, theta, theta)?;
        // Maps whose target declares no test curves simply skip the nef verdict.
        let nef = nef_check(map.target(), theta).ok();
        Ok(AnalysisReport {
            map: map.name().to_string(),
            theta: theta.clone(),
            pullback: map.pullback11(theta)?,
            condition_c: condition_c_holds(&residuals),
            residuals,
            kernel: condition_c_kernel(map)?,
            defect_vanishes: defect.vanishes,
            defect: defect.defect_class,
            mass: ma_total_mass(map, theta)?,
            nef,
            source: map.source().clone(),
            target: map.target().clone(),
        })
    }

    pub fn to_text(&self) -> String {
        let (s, t) = (&self.source, &self.target);
        let mut out = String::new();
        let _ = writeln!(out, "map: {}", self.map);
        let _ = writeln!(out, "theta: {}", t.format_h11(&self.theta));
        let _ = writeln!(out, "pullback: {}", s.format_h11(&self.pullback));
        let _ = writeln!(
            out,
            "condition (C): {}",
            if self.condition_c { "holds" } else { "fails" }
        );
        for (name, v) in &self.residuals {
            let _ = writeln!(out, "  theta.{name} = {v}");
        }
        let kernel: Vec<String> = self.kernel.iter().map(|k| t.format_h11(k)).collect();
        let _ = writeln!(out, "condition (C) kernel: [{}]", kernel.join(", "));
        let _ = writeln!(
            out,
            "pullback-product defect: {}{}",
            s.format_h22(&self.defect),
            if self.defect_vanishes {
                " (vanishes)"
            } else {
                ""
            }
        );
        let _ = writeln!(out, "total mass: {}", self.mass);
        match &self.nef {
            Some(v) => {
                let _ = write!(out, "nef on generators: {}", v.is_nef_on_generators);
                if let Some((c, q)) = &v.witness {
                    let _ = write!(out, " (witness {c}: {q})");
                }
                let _ = writeln!(out);
            }
            None => {
                let _ = writeln!(out, "nef on generators: n/a (no generators declared)");
            }
        }
        out
    }

    pub fn to_json(&self) -> Json {
        let (s, t) = (&self.source, &self.target);
        json!({
            "map": self.map,
            "theta": labelled(t.h11_basis(), self.theta.coeffs()),
            "pullback": labelled(s.h11_basis(), self.pullback.coeffs()),
            "condition_c": {
                "holds": self.condition_c,
                "residuals": rat_table(&self.residuals),
            },
            "kernel": self.kernel.iter().map(|k| labelled(t.h11_basis(), k.coeffs())).collect::<Vec<_>>(),
            "defect": {
                "class": labelled(s.h22_basis(), self.defect.coeffs()),
                "vanishes": self.defect_vanishes,
            },
            "mass": self.mass.to_string(),
            "nef": self.nef.as_ref().map(|v| json!({
                "is_nef_on_generators": v.is_nef_on_generators,
                "witness": v.witness.as_ref().map(|(c, q)| json!({"curve": c, "value": q.to_string()})),
                "values": rat_table(v.values.iter().map(|(c, q)| (c, q))),
            })),
        })
    }
}

/// One assertion of the worked example.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExampleCheck {
    pub name: &'static str,
    pub passed: bool,
    pub diffs: Vec<String>,
}

impl ExampleCheck {
    fn new(name: &'static str, diffs: Vec<String>) -> Self {
        ExampleCheck {
            name,
            passed: diffs.is_empty(),
            diffs,
        }
    }
}

const X_DIVISORS: [&str; 5] = ["H", "E0", "E1", "E2", "E3"];
const X_CURVES: [&str; 5] = ["H2", "L0", "L1", "L2", "L3"];

/// Reference tables of the Cremona example, written out independently of
/// the constructors.
fn expected_pairing() -> [[i64; 5]; 5] {
    [
        [1, 0, 0, 0, 0],
        [0, -1, 0, 0, 0],
        [0, 0, -1, 0, 0],
        [0, 0, 0, -1, 0],
        [0, 0, 0, 0, -1],
    ]
}

/// Column `j` is the pullback of the `j`-th divisor.
fn expected_jx11() -> [[i64; 5]; 5] {
    [
        [3, -2, -2, -2, -2],
        [1, 0, -1, -1, -1],
        [1, -1, 0, -1, -1],
        [1, -1, -1, 0, -1],
        [1, -1, -1, -1, 0],
    ]
}

fn expected_jx22() -> [[i64; 5]; 5] {
    [
        [3, -1, -1, -1, -1],
        [2, 0, -1, -1, -1],
        [2, -1, 0, -1, -1],
        [2, -1, -1, 0, -1],
        [2, -1, -1, -1, 0],
    ]
}

fn diff_columns(
    what: &str,
    col_labels: &[&str],
    row_labels: &[&str],
    expected: &[[i64; 5]; 5],
    found: &RatMatrix,
) -> Vec<String> {
    let mut diffs = Vec::new();
    if found.rows() != 5 || found.cols() != 5 {
        diffs.push(format!(
            "{what}: expected 5x5, found {}x{}",
            found.rows(),
            found.cols()
        ));
        return diffs;
    }
    for (j, col) in expected.iter().enumerate() {
        for (i, &e) in col.iter().enumerate() {
            let f = &found[(i, j)];
            if *f != Rat::from(e) {
                diffs.push(format!(
                    "{what}({})[{}]: expected {e}, found {f}",
                    col_labels[j], row_labels[i]
                ));
            }
        }
    }
    diffs
}

fn expect_eq(what: &str, expected: impl ToString, found: impl ToString) -> Vec<String> {
    let (e, f) = (expected.to_string(), found.to_string());
    if e == f {
        vec![]
    } else {
        vec![format!("{what}: expected {e}, found {f}")]
    }
}

/// Re-derives the Cremona example on `x` (normally [`crate::blowup::standard_x`])
/// from the `H^{1,1}` pullback matrix `m11`, checking every table and number
/// against the reference values.
pub fn reproduce_example(x: Arc<VarietyModel>, m11: &RatMatrix) -> Vec<ExampleCheck> {
    let mut checks = Vec::new();

    let labels_ok = x.h11_basis() == X_DIVISORS && x.h22_basis() == X_CURVES;
    checks.push(ExampleCheck::new(
        "bases",
        if labels_ok {
            vec![]
        } else {
            vec![format!(
                "expected [{}] / [{}], found [{}] / [{}]",
                X_DIVISORS.join(", "),
                X_CURVES.join(", "),
                x.h11_basis().join(", "),
                x.h22_basis().join(", ")
            )]
        },
    ));
    if !labels_ok {
        return checks;
    }

    let mut diffs = Vec::new();
    let p = x.pairing_matrix();
    for (i, row) in expected_pairing().iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            if p[(i, j)] != Rat::from(e) {
                diffs.push(format!(
                    "pairing[{}, {}]: expected {e}, found {}",
                    X_DIVISORS[i],
                    X_CURVES[j],
                    p[(i, j)]
                ));
            }
        }
    }
    checks.push(ExampleCheck::new("pairing table", diffs));

    checks.push(ExampleCheck::new(
        "J* on H^(1,1)",
        diff_columns("J*", &X_DIVISORS, &X_DIVISORS, &expected_jx11(), m11),
    ));

    let sigmas: Vec<String> = COORDINATE_LINES
        .iter()
        .map(|&(i, j)| sigma_name(i, j))
        .collect();
    let map = PseudoIsoModel::new(MapParts {
        name: "JX".into(),
        source: x.clone(),
        target: x.clone(),
        m11: m11.clone(),
        m22: None,
        involution: true,
        indeterminacy_forward: sigmas.clone(),
        indeterminacy_backward: sigmas,
    })
    .and_then(PseudoIsoModel::with_derived_pullback22);
    let map = match map {
        Ok(m) => m,
        Err(e) => {
            checks.push(ExampleCheck::new("map construction", vec![e.to_string()]));
            return checks;
        }
    };
    let m22 = map.m22().expect("derived above");
    checks.push(ExampleCheck::new(
        "J* on H^(2,2) by duality",
        diff_columns("J*", &X_CURVES, &X_CURVES, &expected_jx22(), m22),
    ));

    let mut diffs = Vec::new();
    if !(m11 * m11).is_identity() {
        diffs.push("m11^2 != I".to_string());
    }
    if !(m22 * m22).is_identity() {
        diffs.push("m22^2 != I".to_string());
    }
    checks.push(ExampleCheck::new("involution", diffs));

    let eta = H11Class::from_ints(&[2, -1, -1, -1, -1]);
    let fmt_list = |v: &[H11Class]| {
        v.iter()
            .map(|c| x.format_h11(c))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let diffs = match condition_c_kernel(&map) {
        Ok(k) => expect_eq("kernel", fmt_list(std::slice::from_ref(&eta)), fmt_list(&k)),
        Err(e) => vec![e.to_string()],
    };
    checks.push(ExampleCheck::new("condition (C) kernel", diffs));

    let diffs = match map.pullback11(&eta) {
        Ok(c) => expect_eq("J*(eta)", x.format_h11(&eta), x.format_h11(&c)),
        Err(e) => vec![e.to_string()],
    };
    checks.push(ExampleCheck::new("eta is J*-fixed", diffs));

    let h_minus_e0 = H11Class::from_ints(&[1, -1, 0, 0, 0]);
    let mut diffs = match map.pullback11(&h_minus_e0) {
        Ok(c) => expect_eq(
            "J*(H - E0)",
            x.format_h11(&H11Class::from_ints(&[2, -2, -1, -1, -1])),
            x.format_h11(&c),
        ),
        Err(e) => vec![e.to_string()],
    };
    match ma_total_mass(&map, &h_minus_e0) {
        Ok(m) => diffs.extend(expect_eq("mass", -3, m)),
        Err(e) => diffs.push(e.to_string()),
    }
    checks.push(ExampleCheck::new("total mass of J*(H - E0)", diffs));

    let mut diffs = Vec::new();
    match nef_check(&x, &eta) {
        Ok(v) if v.is_nef_on_generators => {}
        Ok(v) => diffs.push(format!("eta not nef, witness {:?}", v.witness)),
        Err(e) => diffs.push(e.to_string()),
    }
    match nef_check(&x, &H11Class::basis(5, 1)) {
        Ok(NefVerdict {
            witness: Some((_, q)),
            ..
        }) => diffs.extend(expect_eq("E0 witness value", -1, q)),
        Ok(_) => diffs.push("E0 reported nef".into()),
        Err(e) => diffs.push(e.to_string()),
    }
    checks.push(ExampleCheck::new("nef verdicts", diffs));

    let mut diffs = Vec::new();
    for (k, label) in X_DIVISORS.iter().enumerate() {
        match pullback_product_defect(&map, &eta, &H11Class::basis(5, k)) {
            Ok(r) if r.vanishes => {}
            Ok(r) => diffs.push(format!(
                "defect(eta, {label}) = {}",
                x.format_h22(&r.defect_class)
            )),
            Err(e) => diffs.push(e.to_string()),
        }
    }
    checks.push(ExampleCheck::new("defect(eta, .) vanishes", diffs));

    checks
}

pub fn example_text(checks: &[ExampleCheck]) -> String {
    let mut out = String::new();
    for c in checks {
        let _ = writeln!(out, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
        for d in &c.diffs {
            let _ = writeln!(out, "    {d}");
        }
    }
    out
}

pub fn example_json(checks: &[ExampleCheck]) -> Json {
    json!({
        "passed": checks.iter().all(|c| c.passed),
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "passed": c.passed,
            "diffs": c.diffs,
        })).collect::<Vec<_>>(),
    })
}
