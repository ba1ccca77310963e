//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use horolab::cocycle::{solve_coboundary, solve_transfer, split, splitting_r};
use horolab::distributions::{annihilator_project, decay_report, invariant_distributions, DistributionSet, DEFAULT_KERNEL_TOL};
use horolab::linalg::{CMat, C64};
use horolab::random::TestFunctions;
use horolab::rep::{bracket_report, build_rep, horocycle_map, RepParams, Space};
use horolab::tensor::{build_tensor, ComponentList, Factor, TensorRep};
use horolab::vector_field::{
    adjoint_identities_check, bbl_apply, cascade, constant_cohomology, constant_cohomology_with, pushforward_matrix,
    CascadeMode, MixingConvention, VfSection,
};
use horolab::{LabError, Result};
use nalgebra::Matrix3;
use num_rational::Ratio;

type Outcome = Result<(bool, String)>;

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn distributions(t: &TensorRep) -> Result<DistributionSet> {
    invariant_distributions(t.left(), t.t(), DEFAULT_KERNEL_TOL)?.with_duals()
}

fn ac1() -> Outcome {
    // Warm once so the measurement is not dominated by first-touch costs.
    adjoint_identities_check();
    let (rep, dt) = timed(adjoint_identities_check);
    let ok = rep.max() <= 1e-12 && rep.routes <= 1e-12 && dt < Duration::from_millis(1);
    Ok((ok, format!("max deviation {:.1e}, route gap {:.1e}, {:?}", rep.max(), rep.routes, dt)))
}

fn ac2() -> Outcome {
    let expected = Matrix3::new(1.0, 1.0, -1.0, 0.0, 1.0, -2.0, 0.0, 0.0, 1.0);
    let exact = pushforward_matrix(1.0) == expected;
    let mut unipotent = true;
    let mut group: f64 = 0.0;
    let times = [-2.0, -0.5, 0.0, 0.3, 1.0, 1.7];
    for &a in &times {
        let n = pushforward_matrix(a) - Matrix3::identity();
        unipotent &= n * n * n == Matrix3::zeros();
        for &b in &times {
            let d = pushforward_matrix(a) * pushforward_matrix(b) - pushforward_matrix(a + b);
            group = group.max(d.abs().max());
        }
    }
    let ok = exact && unipotent && group <= 1e-14;
    Ok((ok, format!("exact {exact}, unipotent {unipotent}, group law {group:.1e}")))
}

fn ac3() -> Outcome {
    let (results, dt) = timed(|| {
        [
            constant_cohomology(),
            constant_cohomology_with(MixingConvention::Display, Ratio::from_integer(1), Ratio::from_integer(1)),
        ]
    });
    let want: BTreeSet<&str> = ["F:V1", "F:U2", "Y:U1", "Y:V2"].into_iter().collect();
    let mut ok = dt < Duration::from_millis(10);
    let mut detail = Vec::new();
    for c in &results {
        let labels: BTreeSet<&str> = c.quotient_labels.iter().flatten().map(String::as_str).collect();
        ok &= c.exact_complex && (c.cocycle_dim, c.coboundary_dim, c.dim) == (8, 4, 4) && labels == want;
        detail.push(format!("{:?}: {}/{}/{}", c.convention, c.cocycle_dim, c.coboundary_dim, c.dim));
    }
    Ok((ok, format!("{}, quotient {:?}, {:?}", detail.join(", "), want, dt)))
}

fn ac4() -> Outcome {
    let (reports, dt) = timed(|| {
        [0.25, 5.0, -2.0]
            .iter()
            .map(|&mu| build_rep(RepParams::new(mu, 32).with_pad(32)).map(|r| bracket_report(&r).max()))
            .collect::<Result<Vec<_>>>()
    });
    let reports = reports?;
    let worst = reports.iter().copied().fold(0.0, f64::max);
    let ok = worst <= 1e-9 && dt < Duration::from_secs(1);
    Ok((ok, format!("worst residual {worst:.1e}, {dt:?}")))
}

fn ac5() -> Outcome {
    let mut worst: f64 = 0.0;
    for (mu, theta) in [(0.25, 0.25), (5.0, 5.0), (-2.0, 5.0)] {
        let t = build_tensor(RepParams::new(mu, 16), RepParams::new(theta, 16), 1.0, 1.0)?;
        for seed in 0..3 {
            let c = TestFunctions::new(seed).field(&t, Space::Window, Space::Window, 0);
            let d = t.l1(&t.l2(&c)?)? - t.l2(&t.l1(&c)?)?;
            worst = worst.max(d.norm() / c.norm());
        }
    }
    Ok((worst <= 1e-10, format!("relative defect {worst:.1e}")))
}

fn ac6() -> Outcome {
    let (out, dt) = timed(|| -> Result<(f64, f64, f64)> {
        let t = build_tensor(RepParams::new(0.25, 32), RepParams::new(0.25, 4), 1.0, 1.0)?;
        let rep = t.left();
        let ds = distributions(&t)?;
        let b = horocycle_map(rep, 1.0).minus_identity_on_window();
        let (mut res, mut kern, mut diff): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for seed in 0..20 {
            let g = TestFunctions::new(seed).vector(rep, Space::Window, 0);
            let f = annihilator_project(&ds, &(&b * &g))?;
            let sol = solve_coboundary(rep, &f, 1.0, &ds)?;
            let fnorm = f.norm();
            res = res.max((&b * &sol.p - &f).norm() / fnorm);
            kern = kern.max((&b * (&sol.p - &g)).norm() / fnorm);
            diff = diff.max((&sol.p - &g).norm() / g.norm());
        }
        Ok((res, kern, diff))
    });
    let (res, kern, diff) = out?;
    let ok = res <= 1e-8 && kern <= 1e-6 && dt < Duration::from_secs(5);
    Ok((ok, format!("residual {res:.1e}, kernel defect {kern:.1e}, |P-g|/|g| {diff:.1e}, {dt:?}")))
}

fn ac7() -> Outcome {
    let t = build_tensor(RepParams::new(0.25, 16), RepParams::new(5.0, 16), 1.0, 1.0)?;
    let ds = distributions(&t)?;
    let (mut r1, mut r2): (f64, f64) = (0.0, 0.0);
    let mut rejected = 0;
    for seed in 0..10 {
        let p0 = TestFunctions::new(seed).field(&t, Space::Window, Space::Window, 0);
        let f = t.l1(&p0)?;
        let g = t.l2(&p0)?;
        let sol = solve_transfer(&t, &f, &g, &ds)?;
        r1 = r1.max(sol.residual1 / f.norm());
        r2 = r2.max(sol.residual2 / g.norm());
        let mut bad = g.clone();
        bad[(seed as usize, 3)] += C64::new(1e-4 * g.norm(), 0.0);
        if matches!(solve_transfer(&t, &f, &bad, &ds), Err(LabError::CompatibilityViolation { .. })) {
            rejected += 1;
        }
    }
    let ok = r1 <= 1e-7 && r2 <= 1e-7 && rejected == 10;
    Ok((ok, format!("residuals {r1:.1e} / {r2:.1e}, {rejected}/10 incompatible inputs rejected")))
}

fn ac8() -> Outcome {
    let t = build_tensor(RepParams::new(0.25, 16), RepParams::new(5.0, 16), 1.0, 1.0)?;
    let ds = distributions(&t)?;
    let mut worst = [0.0f64; 4];
    for seed in 0..10 {
        let f = TestFunctions::new(seed).field(&t, Space::Padded, Space::Window, 0);
        let n = f.norm();
        let rf = splitting_r(&t, &f, &ds)?;
        let pairing = ds.pair_columns(&rf)? - ds.pair_columns(&f)?;
        let ann = &f - &rf;
        let on_ann = splitting_r(&t, &ann, &ds)?;
        let commute = splitting_r(&t, &t.l2(&f)?, &ds)? - t.l2(&rf)?;
        let proj = splitting_r(&t, &rf, &ds)? - &rf;
        for (w, v) in worst.iter_mut().zip([pairing.norm(), on_ann.norm(), commute.norm(), proj.norm()]) {
            *w = w.max(v / n);
        }
    }
    let ok = worst.iter().all(|&w| w <= 1e-8);
    Ok((
        ok,
        format!(
            "pairings {:.1e}, annihilator {:.1e}, L2 commutation {:.1e}, projection {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    ))
}

fn split_ratios(trunc: usize, comp: usize, seed: u64) -> Result<Vec<(String, f64, Option<f64>)>> {
    let list = ComponentList::preset(trunc, 1.0, 1.0)?;
    let t = &list.components()[comp].0;
    let ds = distributions(t)?;
    let gen = TestFunctions::new(seed);
    let f = gen.field(t, Space::Padded, Space::Window, 0);
    let g = gen.field(t, Space::Window, Space::Padded, 1);
    let s = split(t, &f, &g, &ds)?;
    Ok(s.report
        .into_iter()
        .filter(|row| row.quantity != "P/f")
        .map(|row| (row.quantity, row.r, row.log10_ratio))
        .collect())
}

fn ac9() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut finite = true;
    for comp in 0..3 {
        for seed in 0..3 {
            let a = split_ratios(16, comp, seed)?;
            let b = split_ratios(32, comp, seed)?;
            for (x, y) in a.iter().zip(&b) {
                match (x.2, y.2) {
                    (Some(p), Some(q)) => worst = worst.max((p - q).abs()),
                    _ => finite = false,
                }
            }
        }
    }
    let ok = finite && worst < 1.0;
    Ok((ok, format!("all finite {finite}, largest change {:.2}x", 10f64.powf(worst))))
}

fn ac10() -> Outcome {
    let t = build_tensor(RepParams::new(0.25, 16), RepParams::new(0.25, 16), 1.0, 1.0)?;
    let ds = distributions(&t)?;
    let conv = MixingConvention::Adjoint;
    let orders = [0.0];

    let gen = TestFunctions::new(1);
    let f = VfSection::from_fn(|i| gen.field(&t, Space::Padded, Space::Window, i as u64));
    let y = VfSection::from_fn(|i| gen.field(&t, Space::Window, Space::Padded, 6 + i as u64));
    let out = cascade(&t, &f, &y, &ds, CascadeMode::Split, conv, &orders)?;
    let recon = (out.report.reconstruction_f / f.norm()).max(out.report.reconstruction_y / y.norm());

    let h0 = VfSection::from_fn(|i| gen.field(&t, Space::Window, Space::Window, 20 + i as u64));
    let f0 = bbl_apply(&t, Factor::Left, &h0, conv)?;
    let y0 = bbl_apply(&t, Factor::Right, &h0, conv)?;
    let back = cascade(&t, &f0, &y0, &ds, CascadeMode::Split, conv, &orders)?;
    let dh = back.h.sub(&h0)?;
    let joint = (bbl_apply(&t, Factor::Left, &dh, conv)?.norm() + bbl_apply(&t, Factor::Right, &dh, conv)?.norm())
        / (f0.norm() + y0.norm());

    // gamma (x) w with gamma a dual of the left distributions and w the
    // right singular vector of (M_2 - I) with the smallest singular value.
    // A large multiple breaks compatibility; a multiple just above the
    // pairing bound passes compatibility and is caught column by column.
    let gamma = ds.duals().ok_or(LabError::MissingDuals)?.column(0).into_owned();
    let b2 = horocycle_map(t.right(), t.s()).minus_identity_on_window();
    let svd = b2.svd(false, true);
    let k = svd.singular_values.len() - 1;
    let w = svd.v_t.expect("requested").row(k).adjoint();
    let w_max = w.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let bump = |eps: f64| -> CMat { &gamma * w.transpose() * C64::new(eps, 0.0) };
    let cases = [
        (2, 1u8, 1u8, "f1", false),
        (1, 1, 2, "g1", false),
        (0, 1, 3, "h1", false),
        (5, 2, 1, "f3", false),
        (2, 1, 1, "f1", true),
        (5, 2, 1, "f3", true),
    ];
    let mut localised = 0;
    let mut column = 0;
    for (slot, factor, stage, name, small) in cases {
        let eps = if small {
            let bound = horolab::cocycle::SOLVE_TOL * f0.slots[slot].norm().max(y0.slots[slot].norm());
            3.0 * bound / w_max
        } else {
            1e-3 * f0.norm()
        };
        let mut bad = f0.clone();
        bad.slots[slot] += bump(eps);
        if let Err(LabError::StageObstruction {
            factor: fa,
            stage: st,
            coordinate,
            source,
        }) = cascade(&t, &bad, &y0, &ds, CascadeMode::Strict, conv, &orders)
        {
            let expected = if small {
                matches!(*source, LabError::ColumnObstruction { .. })
            } else {
                matches!(*source, LabError::CompatibilityViolation { .. })
            };
            if (fa, st, coordinate) == (factor, stage, name) && expected {
                localised += 1;
                column += usize::from(small);
            }
        }
    }
    let ok = recon <= 1e-12 && joint <= 1e-6 && localised == cases.len();
    Ok((
        ok,
        format!(
            "reconstruction {recon:.1e}, round-trip joint defect {joint:.1e}, {localised}/{} obstructions localised ({column} by column pairing)",
            cases.len()
        ),
    ))
}

fn ac11() -> Outcome {
    let rep = std::sync::Arc::new(build_rep(RepParams::new(0.25, 32))?);
    let ds = invariant_distributions(&rep, 1.0, DEFAULT_KERNEL_TOL)?;
    let mut ok = true;
    let mut slopes = Vec::new();
    for seed in 0..5 {
        let probe = TestFunctions::new(seed).vector(&rep, Space::Padded, 0);
        let report = decay_report(&ds, &probe, 0.0)?;
        let slope = report.slope;
        ok &= report.monotone && slope.is_some_and(|s| s <= -2.0 + 0.5);
        slopes.push(match slope {
            Some(s) => format!("{s:.1}{}", if report.monotone { "" } else { "*" }),
            None => "none".into(),
        });
    }
    Ok((ok, format!("slopes [{}] against target -2", slopes.join(", "))))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("AC1 adjoint identities", ac1),
        ("AC2 pushforward matrix", ac2),
        ("AC3 constant cohomology", ac3),
        ("AC4 model brackets", ac4),
        ("AC5 commutation", ac5),
        ("AC6 coboundary round-trip", ac6),
        ("AC7 transfer round-trip", ac7),
        ("AC8 splitting properties", ac8),
        ("AC9 splitting residual shape", ac9),
        ("AC10 cascade", ac10),
        ("AC11 distribution decay", ac11),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let (pass, detail) = match run() {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
