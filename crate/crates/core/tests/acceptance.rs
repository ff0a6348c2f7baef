//! Acceptance gate: ten criteria, exact arithmetic, one PASS/FAIL line each.
//! Runs as a plain binary so the lines are always printed.

mod common;

use std::process::{Command, ExitCode};

use blowup_cohomology::analysis::{
    blowdown_defect, condition_c_kernel, ma_total_mass, nef_check, pullback_product_defect,
};
use blowup_cohomology::blowup::{
    blowup_rational_curve, projective3, sigma_name, standard_x, standard_z, Blowdown, NormalDegree,
};
use blowup_cohomology::io::{
    builtin_json, builtin_model, map_to_json, model_to_json, parse_map_file, parse_model,
};
use blowup_cohomology::map::standard_jx;
use blowup_cohomology::ring::BlowupCenter;
use blowup_cohomology::{H11Class, H22Class, Rat, RatMatrix, VarietyModel};
use common::{class, fixture, rng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ints(rows: &[[i64; 5]; 5]) -> RatMatrix {
    RatMatrix::from_int_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

fn pairing_table() -> Outcome {
    let x = standard_x();
    let want = ints(&[
        [1, 0, 0, 0, 0],
        [0, -1, 0, 0, 0],
        [0, 0, -1, 0, 0],
        [0, 0, 0, -1, 0],
        [0, 0, 0, 0, -1],
    ]);
    let mut bad = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            let a = x.h11_basis_class(&x.h11_basis()[i]).unwrap();
            let c = x.h22_basis_class(&x.h22_basis()[j]).unwrap();
            let got = x.pair(&a, &c).map_err(|e| e.to_string())?;
            if got != want[(i, j)] {
                bad.push(format!("{}.{} = {got}", x.h11_basis()[i], x.h22_basis()[j]));
            }
        }
    }
    ensure(bad.is_empty(), || bad.join(", "))?;
    Ok("25/25 entries".into())
}

fn duality_derivation() -> Outcome {
    let j = standard_jx();
    let m22 = j.derive_pullback22().map_err(|e| e.to_string())?;
    // Columns: J*H2 = 3H2 - sum L, J*Li = 2H2 - sum_{j != i} Lj.
    let want = ints(&[
        [3, 2, 2, 2, 2],
        [-1, 0, -1, -1, -1],
        [-1, -1, 0, -1, -1],
        [-1, -1, -1, 0, -1],
        [-1, -1, -1, -1, 0],
    ]);
    ensure(m22 == want, || format!("derived {m22:?}"))?;
    let x = j.source();
    let h2 = j
        .pullback22(&x.h22_basis_class("H2").unwrap())
        .map_err(|e| e.to_string())?;
    Ok(format!("J*(H2) = {}", x.format_h22(&h2)))
}

fn involution() -> Outcome {
    let j = standard_jx();
    let m22 = j.m22().ok_or("no H^(2,2) matrix")?;
    ensure((j.m11() * j.m11()).is_identity(), || "m11^2 != I".into())?;
    ensure((m22 * m22).is_identity(), || "m22^2 != I".into())?;
    Ok("m11^2 = m22^2 = I".into())
}

fn kernel() -> Outcome {
    let j = standard_jx();
    let k = condition_c_kernel(&j).map_err(|e| e.to_string())?;
    ensure(k.len() == 1, || format!("dimension {}", k.len()))?;
    ensure(k[0] == H11Class::from_ints(&[2, -1, -1, -1, -1]), || {
        format!("generator {}", j.target().format_h11(&k[0]))
    })?;
    Ok(format!("span of {}", j.target().format_h11(&k[0])))
}

fn total_mass() -> Outcome {
    let j = standard_jx();
    let theta = H11Class::from_ints(&[1, -1, 0, 0, 0]);
    let pulled = j.pullback11(&theta).map_err(|e| e.to_string())?;
    ensure(pulled == H11Class::from_ints(&[2, -2, -1, -1, -1]), || {
        format!("pullback {}", j.source().format_h11(&pulled))
    })?;
    let mass = ma_total_mass(&j, &theta).map_err(|e| e.to_string())?;
    ensure(mass == Rat::from(-3), || format!("mass {mass}"))?;
    Ok(format!(
        "J*(H - E0) = {}, mass {mass}",
        j.source().format_h11(&pulled)
    ))
}

fn nef() -> Outcome {
    let x = standard_x();
    let n = x.nef_generators().count();
    ensure(n == 15, || format!("{n} generators"))?;
    let eta =
        nef_check(&x, &H11Class::from_ints(&[2, -1, -1, -1, -1])).map_err(|e| e.to_string())?;
    ensure(eta.is_nef_on_generators, || {
        format!("eta witness {:?}", eta.witness)
    })?;
    let e0 = nef_check(&x, &H11Class::basis(5, 1)).map_err(|e| e.to_string())?;
    let (curve, value) = e0.witness.ok_or("E0 reported nef")?;
    ensure(!e0.is_nef_on_generators && value == Rat::from(-1), || {
        format!("witness {curve}: {value}")
    })?;
    Ok(format!(
        "eta nef on 15 generators; E0 fails at {curve} with {value}"
    ))
}

fn pullback_defect() -> Outcome {
    let j = standard_jx();
    let eta = H11Class::from_ints(&[2, -1, -1, -1, -1]);
    let mut r = rng(2024);
    let mut thetas: Vec<H11Class> = (0..5).map(|k| H11Class::basis(5, k)).collect();
    thetas.extend((0..100).map(|_| class(&mut r, 5)));
    for t in &thetas {
        let d = pullback_product_defect(&j, &eta, t).map_err(|e| e.to_string())?;
        ensure(d.vanishes, || {
            format!(
                "defect(eta, {}) = {:?}",
                j.target().format_h11(t),
                d.defect_class
            )
        })?;
    }

    let oracle: serde_json::Value = serde_json::from_str(&fixture("defect_JX_H_H.json")).unwrap();
    let x = j.source();
    let want = H22Class::new(
        x.h22_basis()
            .iter()
            .map(|l| oracle["defect"][l].as_str().unwrap().parse().unwrap())
            .collect(),
    );
    let h = H11Class::basis(5, 0);
    let got = pullback_product_defect(&j, &h, &h)
        .map_err(|e| e.to_string())?
        .defect_class;
    ensure(got == want, || {
        format!("defect(H, H) = {}", x.format_h22(&got))
    })?;
    Ok(format!(
        "{} vanishing defects; defect(H, H) = {}",
        thetas.len(),
        x.format_h22(&got)
    ))
}

fn blowdown_oracle() -> Outcome {
    let p3 = projective3();
    let x = standard_x();
    let models = [
        (
            blowup_rational_curve(&p3, "line", NormalDegree::Derive, "").unwrap(),
            p3,
        ),
        (
            blowup_rational_curve(&x, &sigma_name(0, 1), NormalDegree::Derive, "01").unwrap(),
            x,
        ),
    ];
    let mut r = rng(4);
    for (blown, base) in &models {
        let bd = Blowdown::new(blown, base).map_err(|e| e.to_string())?;
        let step = blown.provenance().last().unwrap();
        let BlowupCenter::RationalCurve { class: center, .. } = &step.center else {
            return Err("expected a curve blowup".into());
        };
        let fiber = blown.h22_basis_class(&step.new_curve).unwrap();
        for _ in 0..100 {
            let (a, b) = (class(&mut r, blown.h11()), class(&mut r, blown.h11()));
            let formula =
                center.scale(&(blown.pair(&a, &fiber).unwrap() * blown.pair(&b, &fiber).unwrap()));
            let up = bd.pullback11(&bd.pushforward11(&a).unwrap()).unwrap();
            let ring = &bd.pushforward22(&blown.cup(&up, &b).unwrap()).unwrap()
                - &bd.pushforward22(&blown.cup(&a, &b).unwrap()).unwrap();
            ensure(formula == ring, || {
                format!("{}: formula != ring", blown.name())
            })?;
            let report = blowdown_defect(base, blown, &a, &b).map_err(|e| e.to_string())?;
            ensure(report.defect_class == formula, || {
                format!("{}: report differs", blown.name())
            })?;
        }
    }
    Ok("200 random pairs on two models".into())
}

fn blowup_constructor() -> Outcome {
    let p3 = projective3();
    let x = standard_x();
    let z = standard_z();
    let line = blowup_rational_curve(&p3, "line", NormalDegree::Derive, "").unwrap();
    let mut r = rng(9);
    for (blown, base) in [(&x, &p3), (&z, &x), (&line, &p3)] {
        let bd = Blowdown::new(blown, base).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let v: Vec<H11Class> = (0..3).map(|_| class(&mut r, base.h11())).collect();
            let up: Vec<H11Class> = v.iter().map(|a| bd.pullback11(a).unwrap()).collect();
            ensure(
                blown.triple(&up[0], &up[1], &up[2]).unwrap()
                    == base.triple(&v[0], &v[1], &v[2]).unwrap(),
                || format!("projection formula fails on {}", blown.name()),
            )?;
        }
    }
    let e = line.h11_basis_class("E").unwrap();
    let e3 = line.cube(&e).unwrap();
    ensure(e3 == Rat::from(-2), || {
        format!("E^3 = {e3} on the line blowup")
    })?;
    let fib = &line.h11_basis_class("H").unwrap() - &e;
    ensure(line.cube(&fib).unwrap().is_zero(), || {
        "(H - E)^3 != 0".into()
    })?;
    let exc: Vec<&String> = z
        .h11_basis()
        .iter()
        .filter(|l| l.starts_with('E'))
        .collect();
    for l in exc.iter().skip(4) {
        let c = z.cube(&z.h11_basis_class(l).unwrap()).unwrap();
        ensure(c == Rat::from(2), || format!("{l}^3 = {c}"))?;
    }
    // Exceptional divisors against their fibers: a full-rank 10x10 block.
    let curves: Vec<&String> = z.h22_basis().iter().skip(1).collect();
    let block = RatMatrix::from_rows(
        exc.iter()
            .map(|a| {
                let a = z.h11_basis_class(a).unwrap();
                curves
                    .iter()
                    .map(|c| z.pair(&a, &z.h22_basis_class(c).unwrap()).unwrap())
                    .collect()
            })
            .collect(),
    )
    .unwrap();
    ensure(exc.len() == 10 && block.rank() == 10, || {
        format!("rank {} of {}", block.rank(), exc.len())
    })?;
    ensure(z.validate().passed(), || z.validate().to_string())?;
    Ok("projection formula x300; E^3 = -2 on the line blowup; E^3 = 2 on Z; rank 10".into())
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_blowcoh"))
            .arg("reproduce-paper")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.code() == Some(0), || {
        String::from_utf8_lossy(&a.stdout).into_owned()
    })?;
    ensure(a.stdout == b.stdout, || {
        "reproduce-paper output differs between runs".into()
    })?;
    for name in ["P3", "X", "Z"] {
        let text = fixture(&format!("{name}.json"));
        let m: VarietyModel = parse_model(&text).map_err(|e| e.to_string())?;
        ensure(model_to_json(&m) == text, || {
            format!("{name} does not round-trip")
        })?;
        ensure(builtin_json(name).as_deref() == Some(text.as_str()), || {
            format!("{name} fixture is stale")
        })?;
    }
    let text = fixture("JX.json");
    let j = parse_map_file(&text)
        .and_then(|f| f.into_map(|s| Ok(std::sync::Arc::new(builtin_model(s).unwrap()))))
        .map_err(|e| e.to_string())?;
    ensure(map_to_json(&j) == text, || "JX does not round-trip".into())?;
    Ok("reproduce-paper exits 0 twice with identical output; 4 files round-trip".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("pairing table", pairing_table),
        ("H^(2,2) pullback by duality", duality_derivation),
        ("involution", involution),
        ("condition (C) kernel", kernel),
        ("total mass", total_mass),
        ("nef verdicts", nef),
        ("pullback-product defect", pullback_defect),
        ("blowdown defect formula", blowdown_oracle),
        ("blowup constructor", blowup_constructor),
        ("determinism and round-trip", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
