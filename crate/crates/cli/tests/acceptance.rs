//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use gradssh::closedform::{
    case_iib_loci, classify_point, energies_n4, type1_loci, type2_loci, uncorrected, Case, IibBranch,
    DEFAULT_CLASSIFY_TOL,
};
use gradssh::dynamics::{edge_mass, evolve_until_converged, End, StateVector};
use gradssh::ep::{order_estimate, DegeneracyKind, EpRecord, OrderFitOptions};
use gradssh::spectral::{char_poly, multiset_distance};
use gradssh::sweep::{principal_sheet_count, read_json, SweepGrid};
use gradssh::{build_hamiltonian, eigenvalues, Axis, ChainParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_2024;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn spectrum(p: &ChainParams) -> Vec<Complex64> {
    eigenvalues(&build_hamiltonian(p).unwrap()).unwrap().eigenvalues
}

fn exceptional_gs(records: &[EpRecord], a: f64) -> Vec<f64> {
    let mut gs: Vec<f64> = records
        .iter()
        .filter(|r| r.kind == DegeneracyKind::Exceptional && (r.a - a).abs() < 1e-12)
        .map(|r| r.g)
        .collect();
    gs.sort_by(f64::total_cmp);
    gs.dedup_by(|x, y| (*x - *y).abs() < 1e-6);
    gs
}

/// Largest distance from an expected position to the nearest found one.
fn position_error(found: &[f64], expected: &[f64]) -> f64 {
    expected
        .iter()
        .map(|e| found.iter().map(|f| (f - e).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn closed_form_matches_numeric() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mut x = || rng.gen_range(-2.0..2.0);
        let p = ChainParams::new(x(), x(), x(), x(), 4).unwrap();
        let closed = energies_n4(&p).unwrap();
        worst = worst.max(multiset_distance(&closed, &spectrum(&p)));
    }
    outcome(worst < 1e-9, format!("1000 four-site sets, max multiset distance {worst:.2e} (tol 1e-9)"))
}

fn spectral_symmetry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst = 0.0f64;
    for n in [2, 4, 6, 8] {
        for _ in 0..500 {
            let mut x = || rng.gen_range(-2.0..2.0);
            let p = ChainParams::new(x(), x(), x(), x(), n).unwrap();
            let e = spectrum(&p);
            let neg: Vec<Complex64> = e.iter().map(|z| -z).collect();
            let conj: Vec<Complex64> = e.iter().map(|z| z.conj()).collect();
            worst = worst.max(multiset_distance(&e, &neg)).max(multiset_distance(&e, &conj));
        }
    }
    outcome(worst < 1e-9, format!("n in {{2,4,6,8}} x 500, max asymmetry {worst:.2e} (tol 1e-9)"))
}

fn scan_positions(v: f64, w: f64, a: f64, expected: &[f64]) -> (f64, Vec<f64>) {
    let p = ChainParams::new(v, w, 0.0, a, 4).unwrap();
    let cfg = gradssh::ep::ScanConfig::new(Axis::G, -2.0, 2.0, 401).unwrap();
    let records = gradssh::ep::scan_for_eps(&p, &cfg).unwrap();
    let found = exceptional_gs(&records, a);
    (position_error(&found, expected), found)
}

fn type_one_loci() -> Outcome {
    let expected = [-1.0, -0.4, 0.4, 1.0];
    let formula = type1_loci(1.0, 0.1, 0.3);
    let formula_err = position_error(&formula, &expected);
    let (err, found) = scan_positions(1.0, 0.1, 0.3, &expected);
    outcome(
        err < 1e-6 && formula_err < 1e-12 && found.len() == expected.len(),
        format!("found g = {found:?}, max error {err:.2e} (tol 1e-6)"),
    )
}

fn type_two_loci() -> Outcome {
    let r = (1.04f64 / 5.0).sqrt();
    let expected = [-1.0, -r, r, 1.0];
    let formula_err = position_error(&type2_loci(0.1, 1.0, 0.0), &[-r, r]);
    let (err, found) = scan_positions(0.1, 1.0, 0.0, &expected);
    let printed = uncorrected::type2_with_prefactor(0.1, 1.0);
    println!(
        "  note: prefactor form v*sqrt((2/5)(2v^2 + w^2/2)) gives g = {printed:.6}, \
         determinant locus gives {r:.6}"
    );
    outcome(
        err < 1e-6 && formula_err < 1e-12 && found.len() == expected.len(),
        format!("found g = {found:?}, max error {err:.2e} (tol 1e-6)"),
    )
}

fn quartic_point() -> Option<(f64, f64)> {
    case_iib_loci(1.0, 0.1)
        .into_iter()
        .find(|q| q.branch == IibBranch::FarLink && (q.a - 0.146071).abs() < 1e-4 && q.g > 0.0)
        .map(|q| (q.a, q.g))
}

fn fourth_order_point() -> Outcome {
    let Some((a, g)) = quartic_point() else {
        return outcome(false, "no quartic point near a = 0.146071");
    };
    let mut worst_coeff = 0.0f64;
    let mut exps = Vec::new();
    for g in [g, -g] {
        let p = ChainParams::new(1.0, 0.1, g, a, 4).unwrap();
        let cp = char_poly(&build_hamiltonian(&p).unwrap());
        let c = cp.coeffs();
        worst_coeff = worst_coeff.max(c[..c.len() - 1].iter().map(|x| x.abs()).fold(0.0, f64::max));
        match order_estimate(&p, Axis::G, &OrderFitOptions::default()) {
            Ok(e) => exps.push(e.exponent),
            Err(e) => return outcome(false, format!("order fit failed at g = {g}: {e}")),
        }
    }
    let pass = worst_coeff < 1e-9 && exps.iter().all(|e| (e - 0.25).abs() <= 0.03);
    outcome(
        pass,
        format!(
            "(a, g) = ({a:.6}, ±{g:.6}), lower coefficients <= {worst_coeff:.2e}, exponents {exps:.4?}"
        ),
    )
}

fn second_order_scaling() -> Outcome {
    let fit = |p: ChainParams, opts: OrderFitOptions| order_estimate(&p, Axis::G, &opts).map(|e| e.exponent);
    let case_i = ChainParams::new(1.0, 0.1, 1.0, 0.3, 4).unwrap();
    let case_iia = ChainParams::new(0.1, 1.0, (1.04f64 / 5.0).sqrt(), 0.0, 4).unwrap();
    let generic = ChainParams::new(1.0, 0.1, 0.2, 0.1, 4).unwrap();
    let labels = [
        classify_point(&case_i, DEFAULT_CLASSIFY_TOL).unwrap(),
        classify_point(&case_iia, DEFAULT_CLASSIFY_TOL).unwrap(),
        classify_point(&generic, DEFAULT_CLASSIFY_TOL).unwrap(),
    ];
    let target = spectrum(&generic)[0];
    let results = [
        fit(case_i, OrderFitOptions::default()),
        fit(case_iia, OrderFitOptions::default()),
        fit(generic, OrderFitOptions::default().with_target(target)),
    ];
    let [Ok(e1), Ok(e2), Ok(e3)] = results else {
        return outcome(false, format!("order fit failed: {results:?}"));
    };
    let pass = labels == [Case::I, Case::IIA, Case::Zero]
        && (e1 - 0.5).abs() <= 0.03
        && (e2 - 0.5).abs() <= 0.03
        && (e3 - 1.0).abs() <= 0.05;
    outcome(pass, format!("case I {e1:.4}, case IIA {e2:.4}, generic {e3:.4}"))
}

fn six_site_count() -> Outcome {
    let p = ChainParams::new(1.0, 0.1, 0.0, 0.0, 6).unwrap();
    let cfg = gradssh::ep::ScanConfig::new(Axis::G, -2.0, 2.0, 401).unwrap();
    let records = gradssh::ep::scan_for_eps(&p, &cfg).unwrap();
    let eps = records.iter().filter(|r| r.kind == DegeneracyKind::Exceptional).count();
    outcome(eps == 8, format!("{eps} exceptional records for g in [-2, 2]"))
}

fn hatano_nelson() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..=40 {
        let g = -0.975 + 0.04875 * i as f64;
        let p = ChainParams::new(1.0, 1.0, g, 0.0, 8).unwrap();
        let expected: Vec<Complex64> = (1..=8)
            .map(|k| Complex64::new(2.0 * (1.0 - g * g).sqrt() * (k as f64 * std::f64::consts::PI / 9.0).cos(), 0.0))
            .collect();
        worst = worst.max(multiset_distance(&spectrum(&p), &expected));
    }
    outcome(worst < 1e-9, format!("41 values of g in (-1, 1), max deviation {worst:.2e} (tol 1e-9)"))
}

fn funneling() -> Outcome {
    let run = |g: f64, end: End| {
        let p = ChainParams::new(1.0, 0.1, g, 0.0, 8).unwrap();
        evolve_until_converged(&p, &StateVector::uniform(8).unwrap(), 2, end, None).unwrap()
    };
    let left = run(0.9, End::Left);
    let right = run(0.9, End::Right);
    let (best, end) = if left.edge_mass >= right.edge_mass { (left, End::Left) } else { (right, End::Right) };
    let other = match end {
        End::Left => End::Right,
        End::Right => End::Left,
    };
    let mirror = run(-0.9, other);
    let flip = (edge_mass(&best.state, 2, end).unwrap() - mirror.edge_mass).abs();
    let pass = best.converged && best.edge_mass > 0.99 && flip < 1e-9;
    outcome(
        pass,
        format!(
            "edge mass {:.4} at the {end:?} end after {} steps (converged: {}), mirror difference {flip:.1e}",
            best.edge_mass, best.steps, best.converged
        ),
    )
}

fn winding() -> Outcome {
    let a = gradssh::sweep::winding_number(0.1, 1.0, 256).unwrap();
    let b = gradssh::sweep::winding_number(1.0, 0.1, 256).unwrap();
    let pass = a.winding.abs() == 1 && b.winding == 0 && a.closure_defect < 1e-6 && b.closure_defect < 1e-6;
    outcome(
        pass,
        format!("(0.1, 1) -> {}, (1, 0.1) -> {}, defects {:.1e} {:.1e}", a.winding, b.winding, a.closure_defect, b.closure_defect),
    )
}

fn recipe(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../recipes").join(format!("{name}.json"))
}

fn run_recipe(name: &str, sub: &str, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_gradssh"))
        .arg("--config")
        .arg(recipe(name))
        .arg(sub)
        .arg("--out")
        .arg(out)
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("recipe {name} exited with {status}"))
    }
}

fn sweep_recipe(name: &str, dir: &Path) -> Result<SweepGrid, String> {
    let out = dir.join(format!("{name}.json"));
    run_recipe(name, "sweep", &out)?;
    read_json(&out).map_err(|e| e.to_string())
}

fn recipes() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    let mut check = |ok: bool, note: String| {
        pass &= ok;
        notes.push(note);
    };

    let r = (1.04f64 / 5.0).sqrt();
    for (name, expected) in [("weak-intracell", vec![-1.0, -r, r, 1.0]), ("strong-intracell", vec![-1.0, -0.4, 0.4, 1.0])] {
        match sweep_recipe(name, dir.path()) {
            Ok(grid) => {
                let sheets = principal_sheet_count(&grid);
                let found = exceptional_gs(&grid.ep_annotations, grid.params.a);
                let err = position_error(&found, &expected);
                check(sheets == 3 && err < 1e-6, format!("{name}: {sheets} sheets, EP error {err:.1e}"));
            }
            Err(e) => check(false, e),
        }
    }

    match sweep_recipe("n4-sheets", dir.path()) {
        Ok(grid) => {
            let sheets = principal_sheet_count(&grid);
            let quartic = quartic_point();
            let matched = grid
                .ep_crossings
                .iter()
                .filter_map(|c| c.quartic_match)
                .filter(|q| quartic.is_some_and(|(a, g)| (q.a - a).abs() < 1e-9 && (q.g.abs() - g).abs() < 1e-9))
                .count();
            check(sheets == 3 && matched >= 2, format!("n4-sheets: {sheets} sheets, {matched} crossings at the quartic points"));
        }
        Err(e) => check(false, e),
    }

    match sweep_recipe("n6-section", dir.path()) {
        Ok(grid) => {
            let sheets = principal_sheet_count(&grid);
            check(sheets == 5, format!("n6-section: {sheets} sheets"));
        }
        Err(e) => check(false, e),
    }

    let out = dir.path().join("n6-eps.json");
    match run_recipe("n6-eps", "find-eps", &out) {
        Ok(()) => {
            let text = std::fs::read_to_string(&out).unwrap();
            let records: Vec<EpRecord> = serde_json::from_str(&text).unwrap();
            let eps = records.iter().filter(|r| r.kind == DegeneracyKind::Exceptional).count();
            check(eps == 8, format!("n6-eps: {eps} exceptional records"));
        }
        Err(e) => check(false, e),
    }

    outcome(pass, notes.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("closed-form four-site energies match numeric eigenvalues", closed_form_matches_numeric),
        ("spectrum symmetric under negation and conjugation", spectral_symmetry),
        ("one-way end-link loci at v=1, w=0.1, a=0.3", type_one_loci),
        ("pair-coalescence loci at v=0.1, w=1, a=0", type_two_loci),
        ("fourth-order point: char poly and splitting exponent", fourth_order_point),
        ("second-order and regular splitting exponents", second_order_scaling),
        ("six-site chain has eight EPs for g in [-2, 2]", six_site_count),
        ("uniform nonreciprocal chain spectrum", hatano_nelson),
        ("renormalised evolution funnels to one end and mirrors", funneling),
        ("winding number of the reciprocal chain", winding),
        ("CLI recipes reproduce sheet counts and EP positions", recipes),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!("{} {:>2}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
