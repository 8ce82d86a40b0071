//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quartic_core::em_field::{linspace, synthesize_psi, ModeFamily, Sampling, SynthesisSpec};
use quartic_core::group::{embed_heisenberg, heisenberg_compose};
use quartic_core::oracle::{lowest_eigenvalues, rank_of_energy, OracleConfig};
use quartic_core::qes::{
    closed_form_n1, closed_form_n2, czero_solutions, n1_scaling_energy, scaled_energy_check, simultaneous_n2_beta3,
    solve_qes, N2Branch, RecursionMatrix, SolverConfig,
};
use quartic_core::rep::{commutator_defect, irrep_apply, scale_conjugate_defect, GeneratorId};
use quartic_core::wavefunction::WavefunctionSpec;
use quartic_core::{BetaVector, Error, GroupElement, Parity, PotentialParams, QesProblem, QesSolution};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn residual_grid() -> Vec<f64> {
    (0..50)
        .flat_map(|i| {
            let x = 0.1 + 4.9 * i as f64 / 49.0;
            [x, -x]
        })
        .collect()
}

/// Largest of the matrix, continuity and Schrödinger residuals.
fn worst_residual(sol: &QesSolution) -> Result<f64, String> {
    let c = sol.checks().map_err(err)?;
    let w = WavefunctionSpec::new(sol.clone());
    let schr = residual_grid().into_iter().map(|x| w.relative_residual(x)).fold(0.0, f64::max);
    Ok(c.matrix_residual.max(c.continuity_residual).max(schr))
}

fn n1_even_params(beta1: f64, beta3: f64) -> (f64, f64) {
    closed_form_n1(Parity::Even, beta1, beta3, None).expect("beta1 != 0")
}

fn reference_well_levels() -> Outcome {
    let (b1, b3) = (-0.7, 0.1);
    let (e, b2) = n1_even_params(b1, b3);
    let p = PotentialParams::new(-2.0, BetaVector::new(b1, b2, b3)).map_err(err)?;
    let start = Instant::now();
    let cfg = OracleConfig { grid_points: 1001, eigen_count: 3, refinement_levels: 3, ..Default::default() };
    let r = lowest_eigenvalues(&p, &cfg).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let expected = [-0.366183, -0.183108, 0.280714];
    let dev = r.energies.iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    check(dev <= 1e-5, format!("levels {:?} deviate by {dev:e}", r.energies))?;
    check(secs <= 30.0, format!("oracle took {secs:.1} s"))?;
    let gap = (r.energies[2] - e).abs();
    check(gap <= 1e-6, format!("analytic E = {e} vs rank-2 level {} ({gap:e})", r.energies[2]))?;
    Ok(format!("levels {:.7?}, max dev {dev:.1e}, |E - E2| = {gap:.1e}, {secs:.2} s", r.energies))
}

fn table_ratios(n: usize, parity: Parity) -> Result<Vec<f64>, String> {
    let b1 = 0.5;
    Ok(czero_solutions(n, b1, parity).map_err(err)?.iter().map(|s| s.beta2 / (b1 * b1)).collect())
}

fn table_listed() -> Outcome {
    let s7 = 7f64.sqrt();
    let s51 = 51f64.sqrt();
    let s15 = 15f64.sqrt();
    let s21 = 21f64.sqrt();
    let rows: [(usize, Parity, Vec<f64>); 7] = [
        (1, Parity::Even, vec![2.0]),
        (3, Parity::Even, vec![0.5]),
        (3, Parity::Odd, vec![2.0]),
        (4, Parity::Even, vec![3.0 - s7, 3.0 + s7]),
        (4, Parity::Odd, vec![1.0]),
        (6, Parity::Even, vec![2.0 / 35.0 * (11.0 - s51), 2.0 / 35.0 * (11.0 + s51)]),
        (6, Parity::Odd, vec![0.4 * (5.0 - s15), 0.4 * (5.0 + s15)]),
    ];
    let mut rows = rows.to_vec();
    rows.push((7, Parity::Odd, vec![(7.0 - s21) / 7.0, (7.0 + s21) / 7.0]));
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (n, parity, expected) in &rows {
        let got = table_ratios(*n, *parity)?;
        for want in expected {
            let dev = got.iter().map(|g| (g - want).abs()).fold(f64::INFINITY, f64::min);
            check(dev <= 1e-8, format!("N={n} {parity}: {want} not found in {got:?}"))?;
            worst = worst.max(dev);
            count += 1;
        }
    }
    let extra = table_ratios(7, Parity::Even)?;
    Ok(format!("{count} listed ratios, max dev {worst:.1e}; N=7 even (listed as absent) has roots {extra:.6?}"))
}

fn table_trivial() -> Outcome {
    let mut found = Vec::new();
    for n in [9usize, 10] {
        for parity in [Parity::Even, Parity::Odd] {
            let r = table_ratios(n, parity)?;
            if !r.is_empty() {
                found.push(format!("N={n} {parity}: {r:.6?}"));
            }
        }
    }
    if found.is_empty() {
        Ok("N=9,10 have no real nonzero beta2/beta1^2 in (0, 20]".into())
    } else {
        Err(format!(
            "real roots exist: {}; they are genuine E=0 solutions (matrix, continuity and Schroedinger residuals vanish), so no-real-root cannot hold",
            found.join("; ")
        ))
    }
}

fn characteristic_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let c = rng.gen_range(-5.0..5.0);
        let b3: f64 = rng.gen_range(0.01..3.0);
        let p = RecursionMatrix::build(2, c, b3).map_err(err)?.characteristic_polynomial();
        let expected = [-0.5 * b3 * b3, -c, 0.0, -1.0];
        check(p.coeffs().len() == 4, format!("degree {:?}", p.degree()))?;
        for (a, b) in p.coeffs().iter().zip(expected) {
            worst = worst.max((a - b).abs());
        }
    }
    check(worst <= 1e-12, format!("max coefficient deviation {worst:e}"))?;
    Ok(format!("100 pairs, det(M - E) = -(E^3 + cE + beta3^2/2), max dev {worst:.1e}"))
}

fn closed_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut even_n2 = 0;
    let mut accepted = 0;
    while accepted < 100 {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let b1: f64 = sign * rng.gen_range(0.2..1.5);
        let b3: f64 = rng.gen_range(0.05..2.0);
        let branch = if rng.gen_bool(0.5) { N2Branch::Plus } else { N2Branch::Minus };
        let n2_even = match closed_form_n2(Parity::Even, b1, b3, branch) {
            Ok(v) => v,
            Err(Error::NoRealSolution(_)) | Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(err(e)),
        };
        accepted += 1;
        let b2_free: f64 = rng.gen_range(0.05..2.0);
        let mut sols = Vec::new();
        let (e, b2) = n1_even_params(b1, b3);
        sols.push(QesSolution::assemble(1, Parity::Even, e, BetaVector::new(b1, b2, b3)).map_err(err)?);
        let (e, b2) = closed_form_n1(Parity::Odd, 0.0, b3, Some(b2_free)).map_err(err)?;
        sols.push(QesSolution::assemble(1, Parity::Odd, e, BetaVector::new(0.0, b2, b3)).map_err(err)?);
        let (e, b2) = closed_form_n2(Parity::Odd, b1, b3, branch).map_err(err)?;
        sols.push(QesSolution::assemble(2, Parity::Odd, e, BetaVector::new(b1, b2, b3)).map_err(err)?);
        let (e, b2) = n2_even;
        sols.push(QesSolution::assemble(2, Parity::Even, e, BetaVector::new(b1, b2, b3)).map_err(err)?);
        even_n2 += 1;
        for s in &sols {
            let r = worst_residual(s)?;
            check(r <= 1e-9, format!("residual {r:e} for {s:?}"))?;
            worst = worst.max(r);
        }
    }

    // the printed beta2 line, read with either radical, against the cubic
    let (b1, b3): (f64, f64) = (1.0, 0.1);
    let rad = b1.powi(6) - 6.0 * b1.powi(3) * b3 + 4.0 * b3 * b3;
    let e = (b1.powi(3) - 3.0 * b3 - rad.sqrt()) / (5.0 * b1);
    let mut printed = Vec::new();
    for root in [rad.sqrt(), rad.cbrt()] {
        let b2 = (7.0 * b1.powi(3) + 4.0 * b3 + root) / (10.0 * b1);
        let c = 2.0 * b1 * b3 - b2 * b2;
        printed.push((e.powi(3) + c * e + 0.5 * b3 * b3).abs());
    }
    let least = printed.iter().copied().fold(f64::INFINITY, f64::min);
    check(least > 1e-4, format!("printed beta2 passes the cubic ({printed:?})"))?;
    let (_, b2) = closed_form_n2(Parity::Even, b1, b3, N2Branch::Minus).map_err(err)?;
    let c = 2.0 * b1 * b3 - b2 * b2;
    let ours = (e.powi(3) + c * e + 0.5 * b3 * b3).abs();
    check(ours <= 1e-12, format!("continuity-identity beta2 misses the cubic by {ours:e}"))?;
    Ok(format!(
        "{} solutions ({even_n2} N=2 even), max residual {worst:.1e}; printed beta2 misses the cubic by {least:.2e}, identity beta2 by {ours:.1e}",
        4 * accepted
    ))
}

fn simultaneous_point() -> Outcome {
    let b1 = 0.4;
    let b3 = simultaneous_n2_beta3(b1).map_err(err)?;
    check((b3 - 4.0 / 7.0 * (2.0 + 3.0 * SQRT_2) * b1.powi(3)).abs() <= 1e-15, "beta3 formula")?;
    let (e_odd, b2_odd) = closed_form_n2(Parity::Odd, b1, b3, N2Branch::Plus).map_err(err)?;
    let (e_even, b2_even) = closed_form_n2(Parity::Even, b1, b3, N2Branch::Minus).map_err(err)?;
    check((b2_odd - b2_even).abs() <= 1e-9, format!("beta2 odd {b2_odd} vs even {b2_even}"))?;
    check((e_odd - 0.32).abs() <= 4.0 * f64::EPSILON * 0.32, format!("E_odd = {e_odd}"))?;
    check((e_even + 0.48717).abs() <= 1e-5, format!("E_even = {e_even}"))?;

    let p = PotentialParams::new(-3.0, BetaVector::new(b1, b2_odd, b3)).map_err(err)?;
    let r = lowest_eigenvalues(&p, &OracleConfig { eigen_count: 4, ..Default::default() }).map_err(err)?;
    let k_even = rank_of_energy(&r, e_even, 1e-5).map_err(err)?;
    let k_odd = rank_of_energy(&r, e_odd, 1e-5).map_err(err)?;
    check(k_even == 0 && k_odd == 1, format!("ranks even {k_even}, odd {k_odd}"))?;
    Ok(format!(
        "beta2 = {b2_odd:.9}, |db2| = {:.1e}; E_even = {e_even:.7} (oracle {:.7}, rank 0), E_odd = {e_odd} (oracle {:.7}, rank 1)",
        (b2_odd - b2_even).abs(),
        r.energies[0],
        r.energies[1]
    ))
}

fn scaling_law() -> Outcome {
    let cfg = SolverConfig::default();
    let problems = [
        QesProblem::new(1, Parity::Even, -0.7, 0.1),
        QesProblem::new(1, Parity::Even, 0.7, 0.1),
        QesProblem::new(2, Parity::Odd, 0.4, 0.2283023),
        QesProblem::new(2, Parity::Even, 1.0, 0.1),
        QesProblem::new(3, Parity::Even, 0.5, 0.3),
        QesProblem::new(4, Parity::Even, -0.3, 0.2),
    ];
    let mut worst: f64 = 0.0;
    let mut outputs = 0;
    for prob in &problems {
        outputs += solve_qes(prob, &cfg).map_err(err)?.solutions.len();
        for t in [0.5, 2.0, 3.0] {
            let d = scaled_energy_check(prob, t, &cfg).map_err(err)?;
            check(d <= 1e-8, format!("{prob:?} t = {t}: defect {d:e}"))?;
            worst = worst.max(d);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut e_worst: f64 = 0.0;
    for _ in 0..100 {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let b1: f64 = sign * rng.gen_range(0.2..2.0);
        let b3: f64 = rng.gen_range(0.05..2.0);
        let (e, b2) = n1_even_params(b1, b3);
        let c = 2.0 * b1 * b3 - b2 * b2;
        let [lo, hi] = n1_scaling_energy(c, b3).map_err(err)?;
        let d = (lo - e).abs().min((hi - e).abs());
        e_worst = e_worst.max(d);
    }
    check(e_worst <= 1e-10, format!("N=1 e(xi) misses E by {e_worst:e}"))?;
    Ok(format!("{outputs} solver outputs x 3 scales, max defect {worst:.1e}; N=1 e(xi) max dev {e_worst:.1e}"))
}

fn random_element(rng: &mut ChaCha8Rng) -> GroupElement {
    GroupElement::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))
}

fn matmul(x: &[[f64; 4]; 4], y: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| x[i][k] * y[k][j]).sum();
        }
    }
    out
}

fn algebra_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut group_dev: f64 = 0.0;
    let mut irrep_dev: f64 = 0.0;
    for _ in 0..200 {
        let (g, h, k) = (random_element(&mut rng), random_element(&mut rng), random_element(&mut rng));
        group_dev = group_dev
            .max(((g * h) * k).max_abs_diff(&(g * (h * k))) / (1.0 + ((g * h) * k).b3.abs()))
            .max((g * g.inverse()).max_abs_diff(&GroupElement::IDENTITY))
            .max((g.inverse() * g).max_abs_diff(&GroupElement::IDENTITY))
            .max((g * GroupElement::IDENTITY).max_abs_diff(&g))
            .max((g * h).max_abs_diff(&GroupElement::from_matrix(&matmul(&g.to_matrix(), &h.to_matrix()))));
        let p = (g.a, g.b2, g.b3);
        let q = (h.a, h.b2, h.b3);
        let (a, b, c) = heisenberg_compose(p, q);
        group_dev = group_dev.max((embed_heisenberg(p.0, p.1, p.2) * embed_heisenberg(q.0, q.1, q.2)).max_abs_diff(&embed_heisenberg(a, b, c)));

        let beta = BetaVector::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.01..2.0));
        let phi = |x: f64| Complex64::new((-0.5 * x * x).exp(), 0.3 * x * (-x * x).exp());
        let x = rng.gen_range(-2.0..2.0);
        let lhs = irrep_apply(&g, &beta, |y| irrep_apply(&h, &beta, phi, y), x);
        irrep_dev = irrep_dev.max((lhs - irrep_apply(&(g * h), &beta, phi, x)).norm());
    }
    check(group_dev <= 1e-12, format!("group law deviation {group_dev:e}"))?;
    check(irrep_dev <= 1e-12, format!("irrep homomorphism defect {irrep_dev:e}"))?;

    let mut comm: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for _ in 0..5 {
        let beta = BetaVector::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.01..2.0));
        for a in GeneratorId::ALL {
            for b in GeneratorId::ALL {
                comm = comm.max(commutator_defect(a, b, &beta, 10).map_err(err)?);
            }
            for t in [0.5, 2.0, 3.0] {
                scale = scale.max(scale_conjugate_defect(a, &beta, t, 10).map_err(err)?);
            }
        }
    }
    check(comm == 0.0, format!("commutator defect {comm:e}"))?;
    check(scale <= 1e-12, format!("scaling defect {scale:e}"))?;
    Ok(format!("group dev {group_dev:.1e}, irrep dev {irrep_dev:.1e}, commutators {comm}, scaling {scale:.1e}"))
}

fn node_rank() -> Outcome {
    let cases: Vec<(&str, usize, QesSolution)> = {
        let mut v = Vec::new();
        for (b2, b3) in [(0.3, 0.6), (-1.5, 1.0)] {
            v.push(("N=0 even", 0, QesSolution::assemble(0, Parity::Even, 0.0, BetaVector::new(0.0, b2, b3)).map_err(err)?));
            let (e, _) = closed_form_n1(Parity::Odd, 0.0, b3, Some(b2)).map_err(err)?;
            v.push(("N=1 odd", 1, QesSolution::assemble(1, Parity::Odd, e, BetaVector::new(0.0, b2, b3)).map_err(err)?));
        }
        for (b1, nodes, label) in [(-0.7, 2, "N=1 even double well"), (0.7, 0, "N=1 even single well")] {
            let (e, b2) = n1_even_params(b1, 0.1);
            v.push((label, nodes, QesSolution::assemble(1, Parity::Even, e, BetaVector::new(b1, b2, 0.1)).map_err(err)?));
        }
        v
    };
    let cfg = OracleConfig { eigen_count: 5, refinement_levels: 2, ..Default::default() };
    let mut summary = Vec::new();
    for (label, want, sol) in &cases {
        let nodes = WavefunctionSpec::new(sol.clone()).count_nodes(12.0, 20_000).map_err(err)?.count;
        let r = lowest_eigenvalues(&sol.potential(), &cfg).map_err(err)?;
        let rank = rank_of_energy(&r, sol.energy, 1e-5).map_err(err)?;
        check(nodes == *want && rank == *want, format!("{label} beta = {:?}: nodes {nodes}, rank {rank}, expected {want}", sol.beta()))?;
        summary.push(format!("{label}:{nodes}"));
    }
    Ok(format!("nodes = ranks for {}", summary.join(", ")))
}

fn em_synthesis() -> Outcome {
    let xs = linspace(-5.0, 5.0, 101);
    let ys = linspace(-3.0, 3.0, 31);
    let spec = SynthesisSpec::trapezoid(ModeFamily::N1Even, 0.1, (-0.9, -0.5), 11, xs.clone(), ys.clone()).map_err(err)?;
    let s = synthesize_psi(&spec).map_err(err)?;
    check(s.modes.len() == 11, format!("{} modes", s.modes.len()))?;
    let res = s.modes.iter().map(|m| m.max_residual).fold(0.0, f64::max);
    check(res <= 1e-8, format!("per-mode residual {res:e}"))?;

    let single = synthesize_psi(&SynthesisSpec::single(ModeFamily::N1Even, 0.1, -0.7, xs.clone(), ys.clone())).map_err(err)?;
    let mode = ModeFamily::N1Even.mode(-0.7, 0.1).map_err(err)?;
    let mut single_dev: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let want = Complex64::from_polar(1.0, -0.7 * y) * mode.eval_psi(x);
            single_dev = single_dev.max((single.grid.get(i, j) - want).norm());
        }
    }
    check(single_dev == 0.0, format!("single-mode deviation {single_dev:e}"))?;

    let real = synthesize_psi(&spec.with_sampling(Sampling::ConjugatePair)).map_err(err)?;
    let im = real.grid.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    check(im <= 1e-12, format!("imaginary part {im:e}"))?;
    Ok(format!("11 modes, max residual {res:.1e}, energy spread {:.4}; single-mode dev {single_dev}; conjugate-pair |Im| <= {im:e}", s.energy_spread))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 reference well levels", reference_well_levels),
        ("2a table ratios", table_listed),
        ("2b table N=9,10 trivial", table_trivial),
        ("3 N=2 characteristic identity", characteristic_identity),
        ("4 closed-form consistency", closed_forms),
        ("5 simultaneous N=2 point", simultaneous_point),
        ("6 scaling law", scaling_law),
        ("7 algebra suite", algebra_suite),
        ("8 node/rank correspondence", node_rank),
        ("9 EM synthesis", em_synthesis),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
