//! Subcommand implementations.

use anyhow::{Context, Result};
use apweights_core::poly::Polynomial;
use apweights_core::shift::find_shift;
use apweights_core::torus::{solve_conjugated, verify_solution};
use apweights_core::weights::{critical_exponent, sup_ap_quotient};
use apweights_core::{
    ApReport, Complex64, CriticalExponent, CubeFamily, GridFunction, LatticeWindow, QuadratureSpec,
    ShiftCertificate, SobolevIndex, SolveReport, Weight,
};
use serde::Serialize;
use serde_json::json;

use crate::report::{emit, num, read, render, to_json, Provenance, Table};
use crate::{AnalyzeArgs, ExampleArgs, Failed, ShiftArgs, SolveArgs, UsageError, VerifyArgs};

fn quadrature(dim: usize, nodes: Option<usize>) -> Result<QuadratureSpec> {
    Ok(match nodes {
        Some(n) => QuadratureSpec::midpoint(n)?,
        None => QuadratureSpec::default_for_dim(dim),
    })
}

#[derive(Debug, Serialize)]
struct AnalyzeReport {
    weight: Weight,
    family: String,
    family_size: usize,
    quadrature: QuadratureSpec,
    critical_exponent: CriticalExponent,
    sup_at_p: Option<ApReport>,
}

pub fn analyze(a: &AnalyzeArgs) -> Result<()> {
    let w = match (&a.weight, &a.poly) {
        (Some(path), _) => Weight::from_json(&read(path)?)
            .with_context(|| format!("parsing weight {}", path.display()))?,
        (None, Some(path)) => Weight::poly_modulus(
            Polynomial::from_json(&read(path)?)
                .with_context(|| format!("parsing polynomial {}", path.display()))?,
        ),
        (None, None) => return Err(UsageError("need --weight or --poly".into()).into()),
    };
    let q = quadrature(w.dim(), a.nodes)?;
    let family = CubeFamily::default_for_dim(w.dim())?;
    let critical = critical_exponent(&w, &family, &q, a.tol)?;
    let sup_at_p =
        a.p.map(|p| sup_ap_quotient(&w, &family, p, &q))
            .transpose()?;
    let report = AnalyzeReport {
        weight: w,
        family: family.label().to_string(),
        family_size: family.len(),
        quadrature: q,
        critical_exponent: critical,
        sup_at_p,
    };
    let prov = Provenance::new("analyze", a);
    let text = render(a.output.format, &report, &prov, || analyze_table(&report));
    emit(a.output.out.as_deref(), &text)
}

/// Per-cube quotients when an exponent was given, otherwise the exponent
/// summary.
fn analyze_table(r: &AnalyzeReport) -> Table {
    match &r.sup_at_p {
        Some(ap) => {
            let dim = r.weight.dim();
            let mut header: Vec<String> = (0..dim).map(|k| format!("center_{k}")).collect();
            header.extend([
                "halfwidth".to_string(),
                "p".to_string(),
                "quotient".to_string(),
            ]);
            let mut t = Table(vec![header]);
            for e in &ap.entries {
                let mut row: Vec<String> = e.cube.center().iter().map(|&c| num(c)).collect();
                row.extend([num(e.cube.halfwidth()), num(ap.p), num(e.quotient)]);
                t.row(row);
            }
            t
        }
        None => {
            let c = &r.critical_exponent;
            let mut t = Table::new(&["critical_exponent", "lower_bound", "tol", "steps"]);
            t.row(vec![
                num(c.exponent),
                num(c.lower_bound),
                num(c.tol),
                c.steps.to_string(),
            ]);
            t
        }
    }
}

pub fn shift(a: &ShiftArgs) -> Result<()> {
    let poly = Polynomial::from_json(&read(&a.poly)?)
        .with_context(|| format!("parsing polynomial {}", a.poly.display()))?;
    let cert = find_shift(
        &poly,
        a.p,
        LatticeWindow::new(a.window)?,
        a.resolution,
        a.seed,
    )?;
    if cert.window_limited {
        eprintln!(
            "warning: constant grows from {} to {} on the window {}; the certificate is window-limited",
            cert.c9, cert.recheck_c9, cert.recheck_window.max_norm()
        );
    }
    let prov = Provenance::new("shift", a);
    let text = render(a.output.format, &cert, &prov, || certificate_table(&cert));
    emit(a.output.out.as_deref(), &text)
}

fn certificate_table(c: &ShiftCertificate) -> Table {
    let mut header: Vec<String> = (0..c.dim()).map(|k| format!("xi0_{k}")).collect();
    let fields = [
        "p",
        "pprime",
        "M",
        "C9",
        "argmax",
        "lattice_sum",
        "min_divisor",
        "recheck_M",
        "recheck_C9",
        "window_limited",
    ];
    header.extend(fields.iter().map(|s| s.to_string()));
    let mut row: Vec<String> = c.xi0.iter().map(|&x| num(x)).collect();
    row.extend([
        num(c.p),
        num(c.pprime),
        c.window.max_norm().to_string(),
        num(c.c9),
        format!("{:?}", c.argmax),
        num(c.lattice_sum),
        num(c.min_divisor),
        c.recheck_window.max_norm().to_string(),
        num(c.recheck_c9),
        c.window_limited.to_string(),
    ]);
    Table(vec![header, row])
}

#[derive(Debug, Serialize)]
struct EstimateSummary {
    pass: bool,
    reports: Vec<SolveReport>,
}

fn load_certificate(path: &std::path::Path) -> Result<ShiftCertificate> {
    ShiftCertificate::from_json(&read(path)?)
        .with_context(|| format!("parsing certificate {}", path.display()))
}

fn load_grid(path: &std::path::Path) -> Result<GridFunction> {
    GridFunction::from_json(&read(path)?)
        .with_context(|| format!("parsing grid {}", path.display()))
}

fn check_all(
    cert: &ShiftCertificate,
    f: &GridFunction,
    u: &GridFunction,
    rho: &[f64],
) -> Result<EstimateSummary> {
    let reports = rho
        .iter()
        .map(|&r| verify_solution(cert, f, u, SobolevIndex(r)))
        .collect::<apweights_core::Result<Vec<_>>>()?;
    Ok(EstimateSummary {
        pass: reports.iter().all(|r| r.pass),
        reports,
    })
}

fn estimate_table(s: &EstimateSummary) -> Table {
    let mut t = Table::new(&[
        "rho",
        "loss",
        "norm_u_rho",
        "norm_f_rho_plus_np",
        "apriori_constant",
        "ratio",
        "modes_checked",
        "modewise_violations",
        "modes_beyond_window",
        "roundtrip_error",
        "verdict",
    ]);
    for r in &s.reports {
        t.row(vec![
            num(r.rho.0),
            num(r.loss),
            num(r.norm_u_rho),
            num(r.norm_f_rho_plus_np),
            num(r.apriori_constant),
            num(r.ratio),
            r.modes_checked.to_string(),
            r.modewise_violations.to_string(),
            r.modes_beyond_window.to_string(),
            num(r.roundtrip_error),
            r.verdict.clone(),
        ]);
    }
    t
}

fn finish_estimate(summary: &EstimateSummary) -> Result<()> {
    if summary.pass {
        Ok(())
    } else {
        Err(Failed("estimate check FAILED for at least one rho".into()).into())
    }
}

pub fn solve(a: &SolveArgs) -> Result<()> {
    let cert = load_certificate(&a.cert)?;
    let f = load_grid(&a.grid)?;
    let u = solve_conjugated(&cert, &f, a.eps_min)?;
    let prov = Provenance::new("solve", a);
    if let Some(path) = &a.out {
        emit(Some(path), &to_json(&u, &prov))?;
    }
    let summary = check_all(&cert, &f, &u, &a.rho)?;
    let text = render(a.format, &summary, &prov, || estimate_table(&summary));
    emit(a.report.as_deref(), &text)?;
    finish_estimate(&summary)
}

pub fn verify(a: &VerifyArgs) -> Result<()> {
    let cert = load_certificate(&a.cert)?;
    let f = load_grid(&a.grid)?;
    let u = load_grid(&a.solution)?;
    let summary = check_all(&cert, &f, &u, &a.rho)?;
    let prov = Provenance::new("verify", a);
    let text = render(a.output.format, &summary, &prov, || {
        estimate_table(&summary)
    });
    emit(a.output.out.as_deref(), &text)?;
    finish_estimate(&summary)
}

#[derive(Debug, Serialize)]
struct Stage {
    name: String,
    pass: bool,
    summary: String,
    detail: serde_json::Value,
}

#[derive(Debug, Serialize)]
struct ExampleReport {
    pass: bool,
    stages: Vec<Stage>,
}

fn parse_exponents(text: &str) -> Result<Vec<u32>> {
    let m: Vec<u32> = text
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|e| UsageError(format!("bad --m value `{text}`: {e}")))?;
    if m.is_empty() || m.len() > 3 {
        return Err(UsageError(format!("--m needs 1 to 3 exponents, got `{text}`")).into());
    }
    Ok(m)
}

/// One end-to-end run: symbol, exponent, data grid and shift search grid.
struct Case<'a> {
    label: &'a str,
    poly: &'a Polynomial,
    p: f64,
    sizes: Vec<usize>,
    band: i64,
    resolution: usize,
}

/// Shift, solve, persist, reload and verify one polynomial end to end.
fn pipeline(stages: &mut Vec<Stage>, case: Case, a: &ExampleArgs) -> Result<ShiftCertificate> {
    let Case {
        label,
        poly,
        p,
        sizes,
        band,
        resolution,
    } = case;
    let cert = find_shift(poly, p, LatticeWindow::new(a.window)?, resolution, a.seed)?;
    stages.push(Stage {
        name: format!("{label}: shift"),
        pass: cert.c9.is_finite() && !cert.window_limited,
        summary: format!(
            "xi0 = {:?}, C9 = {} (recheck at M = {}: {})",
            cert.xi0,
            cert.c9,
            cert.recheck_window.max_norm(),
            cert.recheck_c9
        ),
        detail: serde_json::to_value(&cert)?,
    });

    let f = GridFunction::band_limited(sizes, band, a.seed)?;
    let u = solve_conjugated(&cert, &f, None)?;
    let rho = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let direct = check_all(&cert, &f, &u, &rho)?;
    stages.push(Stage {
        name: format!("{label}: solve"),
        pass: direct.pass,
        summary: format!(
            "max ratio {} against C = {}",
            direct.reports.iter().map(|r| r.ratio).fold(0.0, f64::max),
            direct.reports[0].apriori_constant
        ),
        detail: serde_json::to_value(direct.reports.iter().map(|r| json!({
            "rho": r.rho.0, "ratio": r.ratio, "modewise_violations": r.modewise_violations,
            "roundtrip_error": r.roundtrip_error, "verdict": r.verdict,
        })).collect::<Vec<_>>())?,
    });

    // verify from serialized artifacts only
    let cert2 = ShiftCertificate::from_json(&cert.to_json())?;
    let f2 = GridFunction::from_json(&f.to_json())?;
    let u2 = GridFunction::from_json(&u.to_json())?;
    let reloaded = check_all(&cert2, &f2, &u2, &rho)?;
    let same = reloaded
        .reports
        .iter()
        .zip(&direct.reports)
        .all(|(x, y)| x.verdict == y.verdict && x.ratio == y.ratio);
    stages.push(Stage {
        name: format!("{label}: verify"),
        pass: reloaded.pass && same,
        summary: format!("verdicts reproduced from persisted artifacts: {same}"),
        detail: json!({ "pass": reloaded.pass }),
    });
    Ok(cert)
}

/// Accepted overshoot of the critical exponent above its exact value.
///
/// On a tensor grid the dual mean of a product weight is a product of
/// one-dimensional means, each still converging slowly at the default node
/// counts; their product settles later than either factor, so the sampled
/// exponent overshoots more in two and three dimensions.
fn exponent_band(dim: usize) -> f64 {
    if dim == 1 {
        0.3
    } else {
        0.5
    }
}

fn exponent_stage(stages: &mut Vec<Stage>, label: &str, w: &Weight, lo: f64) -> Result<()> {
    let family = CubeFamily::default_for_dim(w.dim())?;
    let q = QuadratureSpec::default_for_dim(w.dim());
    let c = critical_exponent(w, &family, &q, 0.01)?;
    let hi = lo + exponent_band(w.dim());
    stages.push(Stage {
        name: format!("{label}: critical exponent"),
        pass: (lo..=hi).contains(&c.exponent),
        summary: format!("{} in [{lo}, {hi}]", c.exponent),
        detail: serde_json::to_value(c)?,
    });
    Ok(())
}

fn sup_stage(stages: &mut Vec<Stage>, label: &str, w: &Weight, p: f64) -> Result<()> {
    let family = CubeFamily::default_for_dim(w.dim())?;
    let q = QuadratureSpec::default_for_dim(w.dim());
    let r = sup_ap_quotient(w, &family, p, &q)?;
    stages.push(Stage {
        name: format!("{label}: sup quotient at p = {p}"),
        pass: r.is_finite(),
        summary: format!("{} over {} cubes", num(r.sup_quotient), r.cubes_examined),
        detail: serde_json::to_value(&r)?,
    });
    Ok(())
}

pub fn example(a: &ExampleArgs) -> Result<()> {
    let products =
        a.m.iter()
            .map(|s| parse_exponents(s))
            .collect::<Result<Vec<_>>>()?;
    let mut stages = Vec::new();

    let xi_sq = Polynomial::monomial(vec![2], 1.0);
    let w1 = Weight::poly_modulus(xi_sq.clone());
    exponent_stage(&mut stages, "|xi|^2", &w1, 3.0)?;
    let case = Case {
        label: "|xi|^2",
        poly: &xi_sq,
        p: 3.5,
        sizes: vec![1024],
        band: 64,
        resolution: a.resolution,
    };
    let cert = pipeline(&mut stages, case, a)?;

    // constant data: P(xi0) = 1/4 at xi0 = ±1/2, so u = 4 identically
    let one = GridFunction::sample(vec![64], |_| Complex64::new(1.0, 0.0))?;
    let u = solve_conjugated(&cert, &one, None)?;
    let dev = u
        .values()
        .iter()
        .map(|v| (v - 4.0).norm())
        .fold(0.0, f64::max);
    stages.push(Stage {
        name: "|xi|^2: unit data".into(),
        pass: dev < 1e-12,
        summary: format!("max |u - 4| = {dev:e}"),
        detail: json!({ "max_deviation": dev }),
    });

    let xy = Polynomial::monomial(vec![2, 2], 1.0);
    let w2 = Weight::poly_modulus(xy.clone());
    sup_stage(&mut stages, "|xi1|^2 |xi2|^2", &w2, 3.5)?;
    let case = Case {
        label: "|xi1|^2 |xi2|^2",
        poly: &xy,
        p: 3.5,
        sizes: vec![64, 64],
        band: 8,
        resolution: (a.resolution / 4).max(8),
    };
    pipeline(&mut stages, case, a)?;

    for m in &products {
        let label = format!("m = {m:?}");
        let w = Weight::poly_modulus(Polynomial::monomial(m.clone(), 1.0));
        let m0 = f64::from(*m.iter().max().expect("nonempty"));
        sup_stage(&mut stages, &label, &w, m0 + 1.5)?;
        exponent_stage(&mut stages, &label, &w, m0 + 1.0)?;
    }

    let report = ExampleReport {
        pass: stages.iter().all(|s| s.pass),
        stages,
    };
    let prov = Provenance::new("example", a);
    let text = render(a.output.format, &report, &prov, || {
        let mut t = Table::new(&["stage", "pass", "summary"]);
        for s in &report.stages {
            t.row(vec![s.name.clone(), s.pass.to_string(), s.summary.clone()]);
        }
        t
    });
    emit(a.output.out.as_deref(), &text)?;
    for s in &report.stages {
        eprintln!(
            "{} {}: {}",
            if s.pass { "PASS" } else { "FAIL" },
            s.name,
            s.summary
        );
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failed("example reproduction has failing stages".into()).into())
    }
}
