//! The five subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::Instant;

use scalefn_core::{
    hitting_probability, laplace_invert_scale, mc_hitting_probability, phi_q, scale_derivative,
    scale_function, scale_integral, solve, validate, Matrix, Solution,
};

use crate::model::{self, ModelFile};
use crate::{CommonArgs, Failure};

fn load(args: &CommonArgs) -> Result<ModelFile, Failure> {
    model::read(&args.model)
}

fn solver_options(file: &ModelFile, args: &CommonArgs) -> (f64, usize) {
    (
        args.tol.unwrap_or(file.solver.tol),
        args.max_iter.unwrap_or(file.solver.max_iter),
    )
}

/// Data sink: `--out` when given, standard output otherwise.
fn sink(args: &CommonArgs) -> Result<Box<dyn Write>, Failure> {
    match &args.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| Failure::new(4, format!("{}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

/// 17 significant digits, enough to round-trip a double.
fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// `+ 0.0` folds negative zero so printed tables are sign-stable.
fn list(m: &Matrix) -> String {
    let items: Vec<String> = m.data().iter().map(|v| format!("{:?}", v + 0.0)).collect();
    format!("[{}]", items.join(", "))
}

fn rows(m: &Matrix) -> String {
    let mut out = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format!("{:?}", m[(i, j)] + 0.0)).collect();
        out.push(format!("[{}]", row.join(", ")));
    }
    format!("[{}]", out.join(", "))
}

pub fn repr(args: &CommonArgs) -> Result<(), Failure> {
    let file = load(args)?;
    let levy = file.build_model()?;
    let jump = levy.jump();
    if !args.quiet {
        match validate(jump) {
            Ok(diag) => eprintln!(
                "repr: density grid check {}",
                if diag.passes() { "passed" } else { "FAILED" }
            ),
            Err(e) => eprintln!("repr: density grid check skipped ({e})"),
        }
    }
    let mut w = sink(args)?;
    writeln!(w, "alpha = {}", list(jump.alpha()))?;
    writeln!(w, "T = {}", rows(jump.t_mat()))?;
    writeln!(w, "t = {}", list(jump.t_vec()))?;
    w.flush()?;
    Ok(())
}

pub fn psi(args: &CommonArgs) -> Result<(), Failure> {
    let file = load(args)?;
    let levy = file.build_model()?;
    let (tol, max_iter) = solver_options(&file, args);
    let root = phi_q(&levy, file.q)?;
    let sol = solve(&levy, file.q, tol, max_iter)?;
    let mut w = sink(args)?;
    writeln!(w, "phi = {:?}", root.root)?;
    writeln!(w, "slope = {:?}", root.slope)?;
    match &sol {
        Solution::Bv(s) => {
            writeln!(w, "Psi = {}", list(&s.psi))?;
            writeln!(w, "G = {}", rows(&s.g))?;
            writeln!(w, "nu = {}", list(&s.nu))?;
            writeln!(w, "iterations = {}", s.iterations)?;
            writeln!(w, "residual = {:e}", s.residual)?;
        }
        Solution::Uv(s) => {
            writeln!(w, "a = {:?}", s.a)?;
            writeln!(w, "b = {}", list(&s.b))?;
            writeln!(w, "omega = {:?}", s.omega)?;
            writeln!(w, "eta = {:?}", s.eta)?;
            writeln!(w, "Psi = {}", list(&s.psi))?;
            writeln!(w, "G = {}", rows(&s.g))?;
            writeln!(w, "nu = {}", list(&s.nu))?;
            writeln!(w, "iterations = {}", s.iterations)?;
            writeln!(w, "residual_scalar = {:e}", s.residual_scalar)?;
            writeln!(w, "residual_vector = {:e}", s.residual_vector)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn scale(args: &CommonArgs) -> Result<(), Failure> {
    let file = load(args)?;
    let levy = file.build_model()?;
    let grid = file.grid_points()?;
    let (tol, max_iter) = solver_options(&file, args);
    let started = Instant::now();
    let root = phi_q(&levy, file.q)?;
    let sol = solve(&levy, file.q, tol, max_iter)?;
    let mut quadrature_points = 0usize;
    let mut w = sink(args)?;
    writeln!(w, "x,W,Wprime,Wint,hitprob")?;
    for &x in &grid {
        let value = scale_function(&sol, &root, x)?;
        let deriv = scale_derivative(&sol, &root, x)?;
        let integral = scale_integral(&sol, &root, x)?;
        if integral.used_quadrature {
            quadrature_points += 1;
        }
        let hit = hitting_probability(&sol, x)?;
        writeln!(
            w,
            "{},{},{},{},{}",
            sci(x),
            sci(value),
            sci(deriv),
            sci(integral.value),
            sci(hit)
        )?;
    }
    w.flush()?;
    if !args.quiet {
        let note = if quadrature_points > 0 {
            format!(", {quadrature_points} integrals by quadrature")
        } else {
            String::new()
        };
        eprintln!(
            "scale: {} points in {:.1?} after {} iterations{note}",
            grid.len(),
            started.elapsed(),
            sol.iterations()
        );
    }
    Ok(())
}

pub fn verify(args: &CommonArgs) -> Result<(), Failure> {
    let file = load(args)?;
    let levy = file.build_model()?;
    let grid = file.grid_points()?;
    let (tol, max_iter) = solver_options(&file, args);
    let root = phi_q(&levy, file.q)?;
    let sol = solve(&levy, file.q, tol, max_iter)?;
    let mut w = sink(args)?;
    let mut failures: Vec<String> = Vec::new();

    let residual = match &sol {
        Solution::Bv(s) => s.residual,
        Solution::Uv(s) => s.residual_scalar.max(s.residual_vector),
    };
    let residual_tol = 1e-10;
    report(
        &mut w,
        &mut failures,
        format!("fixed-point residual {:e} (tolerance {:e})", residual, residual_tol),
        residual <= residual_tol,
    )?;

    let positive: Vec<f64> = grid.iter().copied().filter(|&x| x > 0.0).collect();
    if positive.is_empty() {
        writeln!(w, "inversion: skipped, no positive grid points")?;
    } else {
        let mut worst = 0.0_f64;
        let mut worst_x = positive[0];
        for &x in &positive {
            let direct = scale_function(&sol, &root, x)?;
            let inverted = laplace_invert_scale(&levy, file.q, x, file.oracle.terms)?;
            let dev = (direct - inverted).abs() / direct.abs().max(f64::MIN_POSITIVE);
            if dev > worst {
                worst = dev;
                worst_x = x;
            }
        }
        report(
            &mut w,
            &mut failures,
            format!(
                "inversion max relative deviation {:e} at x = {:?} (tolerance {:e})",
                worst, worst_x, file.oracle.rtol
            ),
            worst <= file.oracle.rtol,
        )?;
    }

    let wants_mc = file.oracle.mc.is_some() || args.paths.is_some() || args.seed.is_some();
    if wants_mc {
        let spec = file.oracle.mc.clone().unwrap_or_default();
        let cfg = model::sim_config(&spec, args.seed, args.paths);
        if !args.quiet {
            eprintln!(
                "verify: simulating {} paths per grid point on {} threads",
                cfg.n_paths, cfg.threads
            );
        }
        let mut worst = 0.0_f64;
        let mut worst_x = grid[0];
        for &x in &grid {
            let est = mc_hitting_probability(&levy, file.q, x, &cfg)?;
            let direct = hitting_probability(&sol, x)?;
            let units = (est.mean - direct).abs() / est.stderr.max(f64::MIN_POSITIVE);
            if est.stderr == 0.0 && est.mean == direct {
                continue;
            }
            if units > worst {
                worst = units;
                worst_x = x;
            }
        }
        report(
            &mut w,
            &mut failures,
            format!(
                "monte-carlo max deviation {:.2} standard errors at x = {:?} (tolerance 3)",
                worst, worst_x
            ),
            worst <= 3.0,
        )?;
    }

    w.flush()?;
    match failures.into_iter().next() {
        None => Ok(()),
        Some(first) => Err(Failure::new(3, first)),
    }
}

fn report(
    w: &mut dyn Write,
    failures: &mut Vec<String>,
    line: String,
    ok: bool,
) -> Result<(), Failure> {
    writeln!(w, "{line}: {}", if ok { "pass" } else { "FAIL" })?;
    if !ok {
        failures.push(line);
    }
    Ok(())
}

pub fn simulate(args: &CommonArgs) -> Result<(), Failure> {
    let file = load(args)?;
    let levy = file.build_model()?;
    let grid = file.grid_points()?;
    let spec = file.oracle.mc.clone().unwrap_or_default();
    let cfg = model::sim_config(&spec, args.seed, args.paths);
    if !args.quiet {
        eprintln!(
            "simulate: {} paths per grid point on {} threads, seed {}",
            cfg.n_paths, cfg.threads, cfg.seed
        );
    }
    let started = Instant::now();
    let mut w = sink(args)?;
    writeln!(w, "x,estimate,stderr,n,truncated")?;
    for &x in &grid {
        let est = mc_hitting_probability(&levy, file.q, x, &cfg)?;
        writeln!(
            w,
            "{},{},{},{},{}",
            sci(x),
            sci(est.mean),
            sci(est.stderr),
            est.n,
            est.truncated
        )?;
    }
    w.flush()?;
    if !args.quiet {
        eprintln!("simulate: done in {:.1?}", started.elapsed());
    }
    Ok(())
}
