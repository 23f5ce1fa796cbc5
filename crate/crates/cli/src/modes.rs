//! One function per run mode. Each resolves its inputs first (any problem
//! there is a validation error), then computes, turning numerical failures
//! into failed checks so that a report is always produced.

use gbdt::asymptotics::{empirical_growth_fit, growth_exponents, norm_samples, FitWindow, GrowthExponents};
use gbdt::continuous::{
    dynamical_solution, evolve_closed_form, evolve_ode, fit_sech2, l2_identity, transformed_potential,
    ContinuousState, DynamicalSolution,
};
use gbdt::discrete::{
    boundary_norm, build_initial_jacobi, discrete_solution, eigen_blocks, run_recursion, transform_jacobi,
    xi_tilde_checks, BOUNDARY_TOL,
};
use gbdt::linalg::{block, c};
use gbdt::report::{Check, Report, Section};
use gbdt::{verify, CMatrix, Error, ParameterTriple, Variant};

use crate::config::{Method, Mode, PotentialSpec, RunConfig, Tols};
use crate::error::CliError;
use crate::output::{float, matrix_cells, modulus_cells, Artifacts, Table};

pub struct Outcome {
    pub report: Report,
    pub artifacts: Artifacts,
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.mode {
        Mode::Continuous => continuous(cfg),
        Mode::Discrete => discrete(cfg),
        Mode::Asymptotics => asymptotics(cfg),
        Mode::Verify => Ok(Outcome {
            report: verify::run(cfg.seed),
            artifacts: Artifacts::default(),
        }),
    }
}

fn largest(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, gbdt::linalg::max_nan)
}

/// Runs `f`, recording an error as a failed check named `label`.
fn guarded<T>(section: &mut Section, label: &str, f: impl FnOnce(&mut Section) -> gbdt::Result<T>) -> Option<T> {
    match f(section) {
        Ok(v) => Some(v),
        Err(e) => {
            section.push(Check::error(label, e.to_string()));
            None
        }
    }
}

fn is_zero(m: &CMatrix) -> bool {
    m.iter().all(|z| *z == c(0.0, 0.0))
}

/// `κ` when the triple is the one-soliton triple `A = -κ²`, `Π₀ ∝ [-κ, 1]`.
fn soliton_kappa(t: &ParameterTriple, potential: &PotentialSpec) -> Option<f64> {
    if t.n() != 1 || t.h() != 1 || *potential != PotentialSpec::Zero {
        return None;
    }
    let a = t.a[(0, 0)];
    if a.im != 0.0 || a.re >= 0.0 {
        return None;
    }
    let kappa = (-a.re).sqrt();
    let (p1, p2) = (t.pi0[(0, 0)], t.pi0[(0, 1)]);
    ((p1 + p2 * kappa).norm() <= 1e-12 * t.pi0.norm()).then_some(kappa)
}

fn continuous(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tols = cfg.effective_tolerances();
    let lib = tols.library();
    let mut rng = cfg.rng();
    let triple = cfg.triple(Variant::Continuous, &mut rng)?;
    let grid = cfg.grid()?;
    let u = cfg.potential(triple.h())?;
    let method = cfg.method.unwrap_or(Method::ClosedForm);

    let mut report = Report::new(format!("gbdt run: continuous (n = {}, h = {})", triple.n(), triple.h()));
    let mut artifacts = Artifacts::default();

    let mut orbit = Section::new("generating identity along the orbit");
    let state = guarded(&mut orbit, "evolution", |section| {
        let state = match method {
            Method::ClosedForm => evolve_closed_form(&triple, &grid, &lib)?,
            Method::Ode => evolve_ode(&triple, &u, &grid, cfg.ode_step.unwrap_or(grid.xs()[1]), &lib)?,
        };
        section.push(Check::at_most(
            "max ‖AS - SA* - ΠjΠ*‖ / (1 + ‖A‖‖S‖) over the grid",
            state.relative_drift(),
            tols.id_tol,
        ));
        section.push(Check::at_least(
            "smallest eigenvalue of S(x) over the grid",
            state.min_s_eigenvalues().into_iter().fold(f64::INFINITY, f64::min),
            0.0,
        ));
        if method == Method::Ode && u.is_zero() {
            let closed = evolve_closed_form(&triple, &grid, &lib)?;
            section.push(Check::at_most(
                "integrated orbit against the closed form, relative",
                orbit_distance(&state, &closed),
                tols.ode_tol,
            ));
        }
        Ok(state)
    });
    report.sections.push(orbit);

    if let Some(state) = state {
        let mut transformed = Section::new("transformed potential and solutions");
        let sol = guarded(&mut transformed, "transformation", |section| {
            let sol = dynamical_solution(&state)?;
            continuous_checks(section, &state, &sol, cfg, &tols)?;
            Ok(sol)
        });
        if let Some(sol) = &sol {
            guarded(&mut transformed, "output tables", |_| {
                continuous_tables(&mut artifacts, &state, sol, &cfg.times)
            });
        }
        report.sections.push(transformed);
    }
    Ok(Outcome { report, artifacts })
}

fn orbit_distance(a: &ContinuousState, b: &ContinuousState) -> f64 {
    let pi = a.pi.iter().zip(&b.pi).map(|(x, y)| (x - y).norm() / (1.0 + y.norm()));
    let s = a
        .s
        .iter()
        .zip(&b.s)
        .map(|(x, y)| (x.as_matrix() - y.as_matrix()).norm() / (1.0 + y.norm()));
    largest(pi.chain(s))
}

fn continuous_checks(
    section: &mut Section,
    state: &ContinuousState,
    sol: &DynamicalSolution,
    cfg: &RunConfig,
    tols: &Tols,
) -> gbdt::Result<()> {
    section.push(Check::at_most(
        "analytic chain ‖-z₂'' + ũz₂ - z₂A‖",
        largest(sol.chain_residuals()),
        tols.pde_tol,
    ));
    if state.len() >= 3 && !cfg.times.is_empty() {
        section.push(Check::at_most(
            "central differences ‖iψ_t + ψ_xx - ũψ‖ at the requested times",
            sol.central_difference_residual(&cfg.times)?,
            tols.fd_tol,
        ));
    }
    let ell = state.grid.length();
    let l2 = l2_identity(state, ell)?;
    section.push(Check::at_most(
        format!("‖∫₀^ℓ z₂*z₂ dx - (S(0)⁻¹ - S(ℓ)⁻¹)‖, ℓ = {ell}"),
        l2.residual(),
        tols.quad_tol,
    ));
    section.push(Check::at_least("λ_min(S(ℓ)⁻¹), positive when the Gram matrix is below S(0)⁻¹", l2.bound_margin, 0.0));

    let triple = &state.triple;
    if is_zero(&triple.pi0) {
        let diff = largest((0..state.len()).map(|i| (sol.u_tilde[i].as_matrix() - &sol.u[i]).norm()));
        section.push(Check::at_most("Π₀ = 0: max ‖ũ - u‖", diff, 0.0));
        let psi = largest(sol.psi_grid(&cfg.times)?.iter().flatten().map(|m| m.norm()));
        section.push(Check::at_most("Π₀ = 0: max ‖ψ‖", psi, 0.0));
    }
    if let Some(kappa) = soliton_kappa(triple, &cfg.potential) {
        let values: Vec<f64> = transformed_potential(state)?.iter().map(|m| m[(0, 0)].re).collect();
        let fit = fit_sech2(state.xs(), &values, kappa)?;
        section.push(Check::at_most(
            format!("soliton κ = {kappa}: |amplitude + 2κ²|"),
            (fit.amplitude + 2.0 * kappa * kappa).abs(),
            tols.soliton_amplitude_tol,
        ));
        section.push(Check::at_most(
            format!("soliton κ = {kappa}: pointwise sech² fit error"),
            fit.max_error,
            tols.soliton_fit_tol,
        ));
        section.push(Check::diagnostic(format!("soliton κ = {kappa}: fitted shift φ"), fit.shift));
    }
    Ok(())
}

fn continuous_tables(
    artifacts: &mut Artifacts,
    state: &ContinuousState,
    sol: &DynamicalSolution,
    times: &[f64],
) -> gbdt::Result<()> {
    let (n, h) = (state.n(), state.h());
    let xs = state.xs();

    let mut u = Table::new(["x"]).with_matrix("u", h, h);
    let mut ut = Table::new(["x"]).with_matrix("u_tilde", h, h);
    let mut residuals = Table::new(["x", "identity_residual", "chain_residual"]);
    let identity = state.identity_residuals();
    let chain = sol.chain_residuals();
    for (i, &x) in xs.iter().enumerate() {
        u.row([vec![float(x)], matrix_cells(&sol.u[i])].concat());
        ut.row([vec![float(x)], matrix_cells(sol.u_tilde[i].as_matrix())].concat());
        residuals.row(vec![float(x), float(identity[i]), float(chain[i])]);
    }

    let mut psi = Table::new(["x", "t"]).with_matrix("psi", h, n);
    let mut psi_abs = Table::new(["x", "t"]).with_real("psi_abs", h, n);
    for (&t, column) in times.iter().zip(sol.psi_grid(times)?) {
        for (&x, m) in xs.iter().zip(&column) {
            psi.row([vec![float(x), float(t)], matrix_cells(m)].concat());
            psi_abs.row([vec![float(x), float(t)], modulus_cells(m)].concat());
        }
    }
    artifacts.table("u", &u);
    artifacts.table("u_tilde", &ut);
    artifacts.table("psi", &psi);
    artifacts.table("psi_abs", &psi_abs);
    artifacts.table("residuals", &residuals);
    Ok(())
}

fn discrete(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tols = cfg.effective_tolerances();
    let lib = tols.library();
    let mut rng = cfg.rng();
    let triple = cfg.triple(Variant::Discrete, &mut rng)?;
    let data = cfg.jacobi(triple.h(), &mut rng)?;
    let (n, h) = (triple.n(), triple.h());
    let norm = block(&triple.pi0, 0, 0, n, h).norm();
    let tolerance = BOUNDARY_TOL * triple.pi0.norm();
    if norm > tolerance {
        return Err(Error::BoundaryCondition { norm, tolerance }.into());
    }

    let n_steps = data.truncation();
    let mut report = Report::new(format!("gbdt run: discrete (n = {n}, h = {h}, N = {n_steps})"));
    let mut artifacts = Artifacts::default();
    let mut chain = Section::new("discrete identity chain");
    let mut eigen = Section::new("generalized eigenvector and solutions");

    guarded(&mut chain, "recursion", |chain| {
        let traj = run_recursion(&triple, &data, &lib)?;
        chain.push(Check::at_most(
            "max ‖AS_k - S_kA* - iΠ_kjΠ_k*‖ / (1 + ‖A‖‖S_k‖)",
            largest(traj.identity_residuals()),
            tols.id_tol,
        ));
        chain.push(Check::at_most("adjoint form of the recursion, relative", largest(traj.adjoint_form_residuals()?), tols.id_tol));
        chain.push(Check::at_most("j-algebra of ξ(k), P and ζ(k)", traj.algebra_residual()?, tols.id_tol));
        chain.push(Check::at_least(
            "smallest eigenvalue of the increments S_k - S_{k-1}",
            traj.increment_min_eigenvalues().into_iter().fold(f64::INFINITY, f64::min),
            -tols.id_tol,
        ));

        let tj = transform_jacobi(&traj, &lib)?;
        let rep = xi_tilde_checks(&traj, &tj, &lib)?;
        for (name, value) in rep.maxima() {
            match value {
                Some(v) => chain.push(Check::at_most(format!("ξ̃ checks: {name}"), v, tols.id_tol)),
                None => chain.push(
                    Check::diagnostic(format!("ξ̃ checks: {name}"), f64::NAN)
                        .with_note(rep.factorization_note.clone().unwrap_or_default()),
                ),
            }
        }
        chain.push(
            Check::diagnostic("‖C̆(k) - C(k)⁻¹‖, relative", largest(rep.lower_block_untransformed.iter().copied()))
                .with_note("equals ‖X₁₁(k)‖; not expected to vanish"),
        );
        chain.push(Check::at_most("C̃(k)Q̃(k)* = Q̃(k)C̃(k), relative", largest(tj.commutation_residuals()), tols.id_tol));
        chain.push(Check::at_most("b̃_k = b̃_k*", largest(tj.jacobi.hermitian_residuals()), tols.id_tol));
        if is_zero(&triple.pi0) {
            let original = build_initial_jacobi(&data)?;
            chain.push(Check::at_most("Π₀ = 0: ‖J̃ - J‖", (tj.jacobi.to_dense() - original.to_dense()).norm(), 0.0));
        }

        guarded(&mut eigen, "eigenvector", |eigen| {
            debug_assert!(boundary_norm(&traj) <= tolerance);
            let blocks = eigen_blocks(&traj, &tj)?;
            eigen.push(Check::at_most("rows 1..N-1 of J̃Y - YA", blocks.max_row_residual(), tols.eig_tol));
            eigen.push(
                Check::diagnostic("row N of the truncated J̃Y - YA", blocks.last_row_residual)
                    .with_note("the truncated product lacks the ã_N y_{N+1} term"),
            );
            let sol = discrete_solution(&blocks, &triple.a);
            let scale = 1.0 + triple.a.norm();
            let mut worst: f64 = 0.0;
            for &t in &cfg.times {
                worst = gbdt::linalg::max_nan(worst, sol.dynamical_residual(&tj.jacobi, t)? / scale);
            }
            eigen.push(Check::at_most("‖iΨ' - J̃Ψ‖ / (1 + ‖A‖) at the requested times", worst, tols.eig_tol));
            let psi = sol.psi_grid(&cfg.times)?;
            if is_zero(&triple.pi0) {
                eigen.push(Check::at_most("Π₀ = 0: max ‖Ψ‖", largest(psi.iter().flatten().map(|m| m.norm())), 0.0));
            }

            let mut c_t = Table::new(["k"]).with_matrix("c_tilde", h, h);
            for k in 1..=n_steps + 1 {
                c_t.row([vec![k.to_string()], matrix_cells(tj.c(k).as_matrix())].concat());
            }
            let mut q_t = Table::new(["k"]).with_matrix("q_tilde", h, h);
            let mut a_t = Table::new(["k"]).with_matrix("a_tilde", h, h);
            let mut b_t = Table::new(["k"]).with_matrix("b_tilde", h, h);
            let mut y = Table::new(["k"]).with_matrix("y", h, n);
            let mut rows = Table::new(["k", "residual", "truncated_row"]);
            for k in 1..=n_steps {
                let key = vec![k.to_string()];
                q_t.row([key.clone(), matrix_cells(tj.q(k))].concat());
                a_t.row([key.clone(), matrix_cells(tj.jacobi.a(k))].concat());
                b_t.row([key.clone(), matrix_cells(tj.jacobi.b(k))].concat());
                y.row([key, matrix_cells(&blocks.y[k - 1])].concat());
                let (r, last) = if k < n_steps {
                    (blocks.row_residuals[k - 1], "0")
                } else {
                    (blocks.last_row_residual, "1")
                };
                rows.row(vec![k.to_string(), float(r), last.to_string()]);
            }
            let mut psi_t = Table::new(["k", "t"]).with_matrix("psi", h, n);
            for (&t, column) in cfg.times.iter().zip(&psi) {
                for (k, m) in column.iter().enumerate() {
                    psi_t.row([vec![(k + 1).to_string(), float(t)], matrix_cells(m)].concat());
                }
            }
            artifacts.table("c_tilde", &c_t);
            artifacts.table("q_tilde", &q_t);
            artifacts.table("a_tilde", &a_t);
            artifacts.table("b_tilde", &b_t);
            artifacts.table("y", &y);
            artifacts.table("psi", &psi_t);
            artifacts.table("eigen_residuals", &rows);
            Ok(())
        });
        Ok(())
    });
    report.sections.push(chain);
    if !eigen.checks.is_empty() {
        report.sections.push(eigen);
    }
    Ok(Outcome { report, artifacts })
}

struct Direction {
    label: &'static str,
    sign: f64,
    tau: f64,
    r: usize,
}

fn directions(e: &GrowthExponents) -> [Direction; 2] {
    // For t → -∞ the norm behaves like e^{τ₋t}, i.e. e^{-τ₋s} in s = -t.
    [
        Direction {
            label: "+",
            sign: 1.0,
            tau: e.tau_plus,
            r: e.r_plus,
        },
        Direction {
            label: "-",
            sign: -1.0,
            tau: -e.tau_minus,
            r: e.r_minus,
        },
    ]
}

fn asymptotics(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tols = cfg.effective_tolerances();
    let lib = tols.library();
    let mut rng = cfg.rng();
    let triple = cfg.triple(Variant::Continuous, &mut rng)?;
    let grid = cfg.grid()?;
    let spectrum = cfg.jordan(&triple.a)?;
    let exponents = growth_exponents(&spectrum)?;
    let gs = cfg.g_vectors(triple.n(), &mut rng)?;

    let mut report = Report::new(format!("gbdt run: asymptotics (n = {}, h = {})", triple.n(), triple.h()));
    let mut artifacts = Artifacts::default();

    let mut table = Table::new(["direction", "tau", "r", "source"]);
    let source = format!("{:?}", spectrum.source).to_lowercase();
    for d in directions(&exponents) {
        let tau = if d.sign > 0.0 { exponents.tau_plus } else { exponents.tau_minus };
        table.row(vec![d.label.into(), float(tau), d.r.to_string(), source.clone()]);
    }
    artifacts.table("exponents", &table);

    let mut section = Section::new("empirical growth fit of ‖ψ(·, t)g‖");
    guarded(&mut section, "growth fit", |section| {
        let sol = dynamical_solution(&evolve_closed_form(&triple, &grid, &lib)?)?;
        let mut fits = Table::new(["g", "direction", "t_min", "t_max", "tau_fit", "r_fit", "c", "rms", "within_tolerance"]);
        let mut norms = Table::new(["g", "direction", "t", "norm"]);
        let needed = (cfg.fit_quorum * gs.len() as f64).ceil();
        for d in directions(&exponents) {
            let window = FitWindow::for_tau(d.tau);
            let ts: Vec<f64> = window.times().iter().map(|s| d.sign * s).collect();
            let mut passing = 0usize;
            for (index, g) in gs.iter().enumerate() {
                let samples = norm_samples(&sol, g, &ts)?;
                for &(t, v) in &samples {
                    norms.row(vec![index.to_string(), d.label.into(), float(t), float(v)]);
                }
                let unsigned: Vec<(f64, f64)> = samples.iter().map(|&(t, v)| (t.abs(), v)).collect();
                let fit = empirical_growth_fit(&unsigned)?;
                let ok = (fit.tau - d.tau).abs() <= tols.fit_tau_tol && (fit.r - d.r as f64).abs() <= tols.fit_r_tol;
                passing += usize::from(ok);
                fits.row(vec![
                    index.to_string(),
                    d.label.into(),
                    float(window.t_min),
                    float(window.t_max),
                    float(fit.tau),
                    float(fit.r),
                    float(fit.c),
                    float(fit.rms),
                    u8::from(ok).to_string(),
                ]);
            }
            section.push(
                Check::at_least(
                    format!(
                        "t → {}∞: fits within tolerance of τ = {}, r = {}",
                        d.label,
                        d.tau + 0.0,
                        d.r
                    ),
                    passing as f64,
                    needed,
                )
                .with_note(format!("window [{}, {}], {} vectors g", window.t_min, window.t_max, gs.len())),
            );
        }
        artifacts.table("fits", &fits);
        artifacts.table("norms", &norms);
        Ok(())
    });
    report.sections.push(section);
    Ok(Outcome { report, artifacts })
}
