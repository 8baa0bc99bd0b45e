//! Executes parsed configs and writes the artifacts: JSON for solutions,
//! CSV for tables. All writes go through a temp file in the target directory
//! followed by a rename, so readers never observe a half-written artifact
//! and identical config+seed reruns produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::{
    ConcentrationConfig, ConsistencyConfig, ConsistencyMeta, KernelConfig, PathConfig,
    SobolevConfig, SolutionArtifact, SolveConfig,
};
use crate::experiment::{path_diagnostics, run_consistency, RunOptions};
use crate::hoeffding::{violation_rate, ConcentrationSpec, Sampler};
use crate::loss::Loss;
use crate::rng::{derive_key, derive_rng};
use crate::sobolev::{PKernel, PiecewiseLinear};
use crate::solver::solve_primal;
use crate::{Error, Result};

/// What the caller needs for exit-code decisions: how many solves in this
/// run failed to reach tolerance.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunSummary {
    pub nonconverged: usize,
}

pub fn run_solve(cfg: &SolveConfig, out: &Path) -> Result<RunSummary> {
    let prob = cfg.build()?;
    let sol = solve_primal(&prob, cfg.tol, cfg.max_iter)?;
    let artifact = SolutionArtifact {
        u: sol.u.coeffs().to_vec(),
        objective: sol.objective,
        kkt_residual: sol.kkt_residual,
        duality_gap: sol.duality_gap,
        iterations: sol.iterations,
        converged: sol.converged,
    };
    let mut text = serde_json::to_string_pretty(&artifact).map_err(|e| Error::Json {
        context: "serializing solution".into(),
        source: e,
    })?;
    text.push('\n');
    atomic_write(out, text.as_bytes())?;
    Ok(RunSummary { nonconverged: usize::from(!sol.converged) })
}

pub fn run_consistency_cmd(
    cfg: &ConsistencyConfig,
    master_seed: u64,
    out: &Path,
) -> Result<RunSummary> {
    let (model, reg, schedule) = cfg.build()?;
    let opts = RunOptions { tol: cfg.tol, max_iter: cfg.max_iter, master_seed };
    let report = run_consistency(&model, &reg, schedule, &cfg.n_grid, &cfg.seeds, opts)?;

    let mut csv =
        String::from("n,seed,lambda,excess_risk,u_dist,kkt_residual,radius_bound,within_radius\n");
    for c in &report.cells {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            c.n,
            c.seed,
            c.lambda,
            c.excess_risk,
            c.u_dist,
            c.kkt_residual,
            c.radius_bound,
            c.within_radius
        )
        .expect("string writes cannot fail");
    }
    atomic_write(out, csv.as_bytes())?;

    let converged_cells = report.cells.iter().filter(|c| c.converged).count();
    let meta = ConsistencyMeta {
        lambda0: schedule.lambda0(),
        gamma: schedule.gamma(),
        weak: report.validity.weak,
        strong: report.validity.strong,
        cells: report.cells.len(),
        converged_cells,
    };
    let mut meta_text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Json {
        context: "serializing consistency metadata".into(),
        source: e,
    })?;
    meta_text.push('\n');
    atomic_write(&sidecar_path(out), meta_text.as_bytes())?;
    Ok(RunSummary { nonconverged: report.cells.len() - converged_cells })
}

/// `runs.csv` → `runs.meta.json` next to it.
pub fn sidecar_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

pub fn run_path_cmd(cfg: &PathConfig, master_seed: u64, out: &Path) -> Result<RunSummary> {
    let (model, reg) = cfg.build()?;
    let mut rng = derive_rng(master_seed, &[u64::from_le_bytes(*b"pathsamp")]);
    let (xs, ys) = model.draw(&mut rng, cfg.n)?;
    let loss = Loss::power(2.0, model.y_bound()?)?;
    let report = path_diagnostics(
        model.dict(),
        &reg,
        &loss,
        &xs,
        &ys,
        &cfg.lambdas,
        cfg.tol,
        cfg.max_iter,
    )?;

    let mut csv = String::from("lambda,risk,penalty,norm_u,growth_bound,kkt_residual,converged\n");
    for p in &report.points {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            p.lambda, p.risk, p.penalty, p.norm_u, p.growth_bound, p.kkt_residual, p.converged
        )
        .expect("string writes cannot fail");
    }
    atomic_write(out, csv.as_bytes())?;
    Ok(RunSummary { nonconverged: report.points.iter().filter(|p| !p.converged).count() })
}

pub fn run_concentration(
    cfg: &ConcentrationConfig,
    master_seed: u64,
    out: &Path,
) -> Result<RunSummary> {
    if cfg.n_grid.is_empty() || cfg.taus.is_empty() {
        return Err(Error::invalid("concentration needs at least one n and one tau"));
    }
    let sampler = Sampler::RademacherCoords { dim: cfg.dim };
    let mut csv = String::from("q,T,beta,n,tau,bound,empirical_rate,e_minus_tau\n");
    for &n in &cfg.n_grid {
        for &tau in &cfg.taus {
            let spec = ConcentrationSpec::new(cfg.q, cfg.t_const, cfg.beta, n, tau)?;
            let cell_seed = derive_key(master_seed, &[n as u64, tau.to_bits()]);
            let rate = violation_rate(&spec, &sampler, cfg.trials, cell_seed)?;
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                cfg.q,
                cfg.t_const,
                cfg.beta,
                n,
                tau,
                spec.bound(),
                rate,
                (-tau).exp()
            )
            .expect("string writes cannot fail");
        }
    }
    atomic_write(out, csv.as_bytes())?;
    Ok(RunSummary::default())
}

/// Kernel samples on an evenly spaced interior grid plus the two per-point
/// residual checks: the flux jump (must be 1) and the reproducing pairing
/// against a hat function centered at 1/2.
pub fn run_sobolev(cfg: &SobolevConfig, out: &Path) -> Result<RunSummary> {
    if cfg.grid < 2 {
        return Err(Error::invalid("sobolev grid needs at least 2 interior points"));
    }
    let kernel = PKernel::new(cfg.p)?;
    let probe = PiecewiseLinear::hat(0.5)?;
    let m = cfg.grid;
    let mut csv = String::from("x,x2,value,diag,flux_residual,reproducing_residual\n");
    for i in 1..=m {
        let x = i as f64 / (m + 1) as f64;
        let diag = kernel.diag(x)?;
        let flux_residual = kernel.flux_jump(x)? - 1.0;
        let repro_residual = kernel.reproducing_check(&probe, x)?;
        for j in 0..=m + 1 {
            let x2 = j as f64 / (m + 1) as f64;
            writeln!(
                csv,
                "{},{},{},{},{},{}",
                x,
                x2,
                kernel.value(x, x2)?,
                diag,
                flux_residual,
                repro_residual
            )
            .expect("string writes cannot fail");
        }
    }
    atomic_write(out, csv.as_bytes())?;
    Ok(RunSummary::default())
}

/// Dictionary-kernel samples with the diagonal identity and Hölder columns;
/// `holder_excess` is how far `|K(x,x2)|` pokes above
/// `K(x,x)^{1/r} K(x2,x2)^{1/r*}` (nonpositive up to roundoff).
pub fn run_kernel(cfg: &KernelConfig, out: &Path) -> Result<RunSummary> {
    if cfg.grid < 2 {
        return Err(Error::invalid("kernel grid needs at least 2 points"));
    }
    let dict = cfg.dictionary.build()?;
    let r = dict.r();
    let r_star = dict.r_star();
    let m = cfg.grid;
    let mut csv = String::from("x,x2,value,diag_x,diag_x2,holder_excess\n");
    for i in 0..m {
        let x = i as f64 / (m - 1) as f64;
        let diag_x = dict.kernel(x, x);
        for j in 0..m {
            let x2 = j as f64 / (m - 1) as f64;
            let diag_x2 = dict.kernel(x2, x2);
            let value = dict.kernel(x, x2);
            let holder_excess =
                value.abs() - diag_x.powf(1.0 / r) * diag_x2.powf(1.0 / r_star);
            writeln!(csv, "{},{},{},{},{},{}", x, x2, value, diag_x, diag_x2, holder_excess)
                .expect("string writes cannot fail");
        }
    }
    atomic_write(out, csv.as_bytes())?;
    Ok(RunSummary::default())
}

/// Write through a temp file in the destination directory, then rename.
/// Creates missing parent directories.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    use std::io::Write as _;
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    std::fs::create_dir_all(&parent)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&parent)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(path: &Path) -> String {
        std::fs::read_to_string(path).unwrap()
    }

    #[test]
    fn atomic_write_creates_directories_and_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("deep/nested/out.txt");
        atomic_write(&target, b"one").unwrap();
        assert_eq!(read(&target), "one");
        atomic_write(&target, b"two").unwrap();
        assert_eq!(read(&target), "two");
    }

    #[test]
    fn sidecar_next_to_csv() {
        assert_eq!(
            sidecar_path(Path::new("/tmp/runs.csv")),
            Path::new("/tmp/runs.meta.json")
        );
    }

    #[test]
    fn solve_artifact_round_trips_and_is_deterministic() {
        let cfg: SolveConfig = serde_json::from_str(
            r#"{
                "dictionary": {"type":"monomial","size":2,"r":2.0},
                "regularizer": {"r":2.0,"eta":0.5},
                "loss": {"kind":"power","p":2.0,"y_bound":2.0},
                "lambda": 0.1,
                "xs": [0.1, 0.5, 0.9],
                "ys": [0.2, 0.4, 0.6]
            }"#,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out_a = dir.path().join("a.json");
        let out_b = dir.path().join("b.json");
        run_solve(&cfg, &out_a).unwrap();
        run_solve(&cfg, &out_b).unwrap();
        assert_eq!(read(&out_a), read(&out_b));
        let parsed: SolutionArtifact = serde_json::from_str(&read(&out_a)).unwrap();
        assert!(parsed.converged);
        assert_eq!(parsed.u.len(), 2);
    }

    #[test]
    fn consistency_cmd_writes_csv_and_sidecar() {
        let cfg: ConsistencyConfig = serde_json::from_str(
            r#"{
                "dictionary": {"type":"trig","size":3,"r":2.0},
                "regularizer": {"r":2.0,"eta":0.5},
                "true_u": [1.0, 0.5, 0.25],
                "noise_sigma": 0.2,
                "lambda0": 0.5,
                "gamma": 0.25,
                "n_grid": [16, 32],
                "seeds": [0, 1],
                "tol": 1e-7,
                "max_iter": 20000
            }"#,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("runs.csv");
        let summary = run_consistency_cmd(&cfg, 7, &out).unwrap();
        assert_eq!(summary.nonconverged, 0);
        let csv = read(&out);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,seed,lambda,excess_risk,u_dist,kkt_residual,radius_bound,within_radius"
        );
        assert_eq!(lines.count(), 4);
        let meta: ConsistencyMeta = serde_json::from_str(&read(&sidecar_path(&out))).unwrap();
        assert!(meta.weak && meta.strong);
        assert_eq!(meta.cells, 4);

        // same master seed reproduces bytes; a different one does not
        let out2 = dir.path().join("runs2.csv");
        run_consistency_cmd(&cfg, 7, &out2).unwrap();
        assert_eq!(read(&out), read(&out2));
        let out3 = dir.path().join("runs3.csv");
        run_consistency_cmd(&cfg, 8, &out3).unwrap();
        assert_ne!(read(&out), read(&out3));
    }

    #[test]
    fn sobolev_diag_column_matches_green_function_at_p2() {
        let cfg = SobolevConfig { p: 2.0, grid: 9 };
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("k.csv");
        run_sobolev(&cfg, &out).unwrap();
        for line in read(&out).lines().skip(1) {
            let cols: Vec<f64> =
                line.split(',').take(5).map(|c| c.parse().unwrap()).collect();
            let (x, _x2, _v, diag, flux_residual) =
                (cols[0], cols[1], cols[2], cols[3], cols[4]);
            assert!((diag - x * (1.0 - x)).abs() <= 1e-14);
            assert!(flux_residual.abs() <= 1e-10);
        }
    }

    #[test]
    fn kernel_csv_has_no_holder_excess() {
        let cfg: KernelConfig = serde_json::from_str(
            r#"{"dictionary": {"type":"trig","size":5,"r":1.5}, "grid": 11}"#,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("kern.csv");
        run_kernel(&cfg, &out).unwrap();
        for line in read(&out).lines().skip(1) {
            let excess: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!(excess <= 1e-12, "Hölder violated: {line}");
        }
    }

    #[test]
    fn concentration_rates_stay_under_the_tail() {
        let cfg = ConcentrationConfig {
            q: 2.0,
            t_const: 1.0,
            beta: 1.0,
            dim: 8,
            n_grid: vec![50],
            taus: vec![1.0],
            trials: 2000,
        };
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("conc.csv");
        run_concentration(&cfg, 1, &out).unwrap();
        let body = read(&out);
        let row: Vec<&str> = body.lines().nth(1).unwrap().split(',').collect();
        let rate: f64 = row[6].parse().unwrap();
        let tail: f64 = row[7].parse().unwrap();
        assert!(rate <= tail + 3.0 * (tail * (1.0 - tail) / 2000.0).sqrt());
    }
}
