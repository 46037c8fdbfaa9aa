use std::fmt;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use svdlab_core::bench::{generate_symmetric, run_benchmark, BenchSpec, VALIDATION_TOL};
use svdlab_core::io::{format_matrix, read_matrix, write_matrix};
use svdlab_core::{decompose as run_decompose, DecomposeOptions, DenseMatrix, SymmetricMatrix};
use svdlab_eigenface::dataset::{load_dir, synthetic_eyes, write_dir};
use svdlab_eigenface::perclos::{parse_labels, window_perclos};
use svdlab_eigenface::pgm::read_pgm;
use svdlab_eigenface::{load_model, save_model, train};

use crate::{BenchArgs, DecomposeArgs, EigenfacesCommand, GenerateArgs, OutputFormat, PerclosArgs};

/// A result that came back but failed the residual or orthogonality check.
#[derive(Debug)]
pub struct ValidationFailure(String);

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationFailure {}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ValidationFailure>() {
            return 4;
        }
        let core = match cause.downcast_ref::<svdlab_eigenface::Error>() {
            Some(svdlab_eigenface::Error::Decomposition(e)) => Some(e),
            _ => cause.downcast_ref::<svdlab_core::Error>(),
        };
        if core.is_some_and(svdlab_core::Error::is_convergence_failure) {
            return 3;
        }
    }
    2
}

pub fn decompose(args: DecomposeArgs) -> Result<()> {
    let dense = read_matrix(&args.input)?;
    let a = SymmetricMatrix::new(dense).with_context(|| format!("{}", args.input.display()))?;
    let opts = DecomposeOptions { tol: args.tol, cutoff: args.cutoff, scheme: args.scheme, ..Default::default() };
    let s = run_decompose(&a, args.alg, &opts)?;
    write_output(&with_suffix(&args.out, "U"), &s.u)?;
    write_output(&with_suffix(&args.out, "S"), &DenseMatrix::from_diag(&s.sigma))?;
    write_output(&with_suffix(&args.out, "V"), &s.v)?;
    let residual = s.relative_residual(&a);
    let orth = s.orthogonality_defect();
    println!("{} n={} residual={residual:.3e} orth_defect={orth:.3e}", args.alg, a.order());
    if !(residual <= VALIDATION_TOL && orth <= VALIDATION_TOL) {
        return Err(ValidationFailure(format!(
            "residual {residual:.3e} or orthogonality defect {orth:.3e} above {VALIDATION_TOL:e}"
        ))
        .into());
    }
    Ok(())
}

fn with_suffix(prefix: &Path, factor: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(format!(".{factor}.txt"));
    PathBuf::from(name)
}

fn write_output(path: &Path, m: &DenseMatrix) -> Result<()> {
    write_matrix(path, m).with_context(|| format!("writing {}", path.display()))
}

pub fn bench(args: BenchArgs) -> Result<()> {
    let spec =
        BenchSpec { algorithms: args.algs, sizes: args.sizes, reps: args.reps, seed: args.seed, kind: args.kind };
    let result = run_benchmark(&spec)?;
    let text = match args.format {
        OutputFormat::Csv => result.to_csv(),
        OutputFormat::Table => result.to_table(),
    };
    print!("{text}");
    let failed: Vec<String> = result
        .cells
        .iter()
        .filter(|c| !c.is_valid())
        .map(|c| format!("{} n={}: {}", c.alg, c.n, c.failure.as_deref().unwrap_or("no valid runs")))
        .collect();
    if !failed.is_empty() {
        return Err(ValidationFailure(format!("invalid cells: {}", failed.join("; "))).into());
    }
    Ok(())
}

pub fn generate(args: GenerateArgs) -> Result<()> {
    anyhow::ensure!(args.n >= 1, "matrix order must be at least 1");
    let a = generate_symmetric(args.n, args.seed, args.kind);
    match args.out {
        Some(path) => write_output(&path, a.as_dense()),
        None => {
            std::io::stdout().write_all(format_matrix(a.as_dense()).as_bytes())?;
            Ok(())
        }
    }
}

pub fn eigenfaces(cmd: EigenfacesCommand) -> Result<()> {
    match cmd {
        EigenfacesCommand::Train { dir, k, alg, out } => {
            let samples = load_dir(&dir)?;
            let model = train(&samples, k, alg)?;
            save_model(&out, &model)?;
            let energy: f64 = model.energy_fractions.iter().sum();
            println!(
                "trained {} eigenfaces from {} images ({}x{}), {:.2}% of the energy",
                model.k(),
                model.training_count(),
                model.width,
                model.height,
                100.0 * energy
            );
            if model.is_capped() {
                println!("requested k={} capped at the data rank {}", model.requested_k, model.k());
            }
        }
        EigenfacesCommand::Classify { model, image, json } => {
            let model = load_model(&model)?;
            let c = model.classify(&read_pgm(&image)?)?;
            if json {
                let v = serde_json::json!({
                    "label": c.label,
                    "nearest": c.nearest,
                    "distance": c.distance,
                    "reconstruction_error": c.reconstruction_error,
                });
                println!("{v}");
            } else {
                println!("{} distance={:.6} reconstruction_error={:.6}", c.label, c.distance, c.reconstruction_error);
            }
        }
        EigenfacesCommand::Demo { out } => {
            let samples = synthetic_eyes();
            write_dir(&out, &samples)?;
            println!("wrote {} images to {}", samples.len(), out.display());
        }
    }
    Ok(())
}

pub fn perclos(args: PerclosArgs) -> Result<()> {
    let file = File::open(&args.labels).with_context(|| format!("opening {}", args.labels.display()))?;
    let frames = parse_labels(BufReader::new(file))?;
    let windows = window_perclos(&frames, args.window)?;
    let mut out = String::from("window_start,window_end,perclos_percent\n");
    for w in windows {
        out.push_str(&format!("{},{},{}\n", w.start, w.end, w.percent));
    }
    print!("{out}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use svdlab_core::Stage;

    #[test]
    fn exit_codes_follow_the_error_chain() {
        let conv = anyhow::Error::from(svdlab_core::Error::NoConvergence { stage: Stage::Jacobi, detail: 30 });
        assert_eq!(exit_code(&conv), 3);
        let wrapped = anyhow::Error::from(svdlab_eigenface::Error::from(svdlab_core::Error::SchemeFailure {
            scheme: "left",
            interval: 2,
        }));
        assert_eq!(exit_code(&wrapped.context("training")), 3);
        assert_eq!(exit_code(&ValidationFailure("residual".into()).into()), 4);
        assert_eq!(exit_code(&svdlab_core::Error::NonFinite.into()), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("anything else")), 2);
    }

    #[test]
    fn factor_paths_extend_the_prefix() {
        assert_eq!(with_suffix(Path::new("out/run.1"), "U"), PathBuf::from("out/run.1.U.txt"));
    }
}
