//! Command-line driver: graph/signal generation, decomposition and
//! reconstruction through files, the evaluation protocols, and the
//! verification commands.
//!
//! Every subcommand is deterministic for a fixed `--seed`, prints a
//! one-line summary to stdout, and on failure writes a machine-readable
//! error object to stderr and exits nonzero.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array1;

use graphfb::error::{Error, Result};
use graphfb::experiments::{
    monte_carlo, passband_trial, write_report_csv, write_spectrum_csv, ExperimentReport, Protocol,
};
use graphfb::filterbank::{
    analyze_octave, design_specs, synthesize_octave, SubbandPyramid,
};
use graphfb::filters::{verify_pr, write_filter_csv, FilterBankSpec, FilterDesign};
use graphfb::generate::{community_clusters, generate, GraphModel};
use graphfb::graph::{
    laplacian, read_edge_list, write_edge_list, Graph, OperatorKind, OperatorMatrix,
};
use graphfb::kron::{verify_theorem2, verify_theorem3};
use graphfb::signals::{
    add_noise, default_localized_ranges, gen_localized_signal, gen_mixed_signal,
    gen_smooth_signal, snr_db,
};
use graphfb::spectral::{eigendecompose, SpectralBasis};

#[derive(Parser)]
#[command(
    name = "graphfb",
    about = "Two-channel critically-sampled graph filter banks with spectral sampling",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DesignArg {
    Ideal,
    Meyer,
    Cdf97,
}

impl From<DesignArg> for FilterDesign {
    fn from(d: DesignArg) -> Self {
        match d {
            DesignArg::Ideal => FilterDesign::Ideal,
            DesignArg::Meyer => FilterDesign::MeyerOrtho,
            DesignArg::Cdf97 => FilterDesign::Cdf97Bior,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LaplacianArg {
    Combinatorial,
    Normalized,
}

impl From<LaplacianArg> for OperatorKind {
    fn from(k: LaplacianArg) -> Self {
        match k {
            LaplacianArg::Combinatorial => OperatorKind::Combinatorial,
            LaplacianArg::Normalized => OperatorKind::SymmetricNormalized,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphModelArg {
    Path,
    Ring,
    Sensor,
    SensorConcentrated,
    Community,
    SwissRoll,
    Bipartite,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignalModelArg {
    Smooth,
    Localized,
    Mixed,
}

/// Where the graph comes from: an edge-list file or a seeded generator.
#[derive(Args)]
struct GraphSource {
    /// Edge-list file (`n <count>` header, then `u v w` lines)
    #[arg(long, value_name = "FILE", conflicts_with = "graph")]
    graph_file: Option<PathBuf>,
    /// Generator model
    #[arg(long, value_enum)]
    graph: Option<GraphModelArg>,
    /// Vertex count for generated graphs
    #[arg(long)]
    n: Option<usize>,
    /// Neighbor count for sensor / swiss-roll graphs
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Cluster count for community graphs
    #[arg(long, default_value_t = 4)]
    clusters: usize,
    /// Cross-edge probability for bipartite graphs
    #[arg(long, default_value_t = 0.3)]
    edge_prob: f64,
}

impl GraphSource {
    fn load(&self, seed: u64) -> Result<Graph> {
        if let Some(path) = &self.graph_file {
            let file = File::open(path)?;
            return read_edge_list(BufReader::new(file));
        }
        let model = self.graph.ok_or_else(|| {
            Error::InvalidParameter("either --graph-file or --graph is required".into())
        })?;
        let n = self
            .n
            .ok_or_else(|| Error::InvalidParameter("--n is required with --graph".into()))?;
        let model = match model {
            GraphModelArg::Path => GraphModel::Path,
            GraphModelArg::Ring => GraphModel::Ring,
            GraphModelArg::Sensor => GraphModel::RandomSensor {
                k: self.k,
                concentrated: false,
            },
            GraphModelArg::SensorConcentrated => GraphModel::RandomSensor {
                k: self.k,
                concentrated: true,
            },
            GraphModelArg::Community => GraphModel::Community {
                clusters: self.clusters,
                p_intra: 0.3,
                p_inter: 0.002,
            },
            GraphModelArg::SwissRoll => GraphModel::SwissRoll { k: self.k },
            GraphModelArg::Bipartite => GraphModel::RandomBipartite {
                edge_prob: self.edge_prob,
            },
        };
        generate(&model, n, seed)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge-list file
    GenGraph {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Generate a test signal on a graph and write it as CSV
    GenSignal {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, value_enum, default_value = "smooth")]
        signal: SignalModelArg,
        #[arg(long, value_enum, default_value = "combinatorial")]
        laplacian: LaplacianArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Also dump the signal's spectrum as CSV (i, lambda, value)
        #[arg(long, value_name = "FILE")]
        spectrum_out: Option<PathBuf>,
        #[arg(long)]
        no_cache: bool,
    },
    /// Analyze a signal into a subband pyramid (JSON)
    Decompose {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, value_name = "FILE")]
        signal: PathBuf,
        #[arg(long, value_enum)]
        design: DesignArg,
        #[arg(long, value_enum, default_value = "combinatorial")]
        laplacian: LaplacianArg,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[arg(long)]
        no_cache: bool,
    },
    /// Synthesize a signal back from a subband pyramid
    Reconstruct {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, value_name = "FILE")]
        pyramid: PathBuf,
        #[arg(long, value_enum)]
        design: DesignArg,
        #[arg(long, value_enum, default_value = "combinatorial")]
        laplacian: LaplacianArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[arg(long)]
        no_cache: bool,
    },
    /// Nonlinear approximation over a list of kept fractions
    Nla {
        #[command(flatten)]
        source: GraphSource,
        /// Signal file; defaults to the smooth test signal
        #[arg(long, value_name = "FILE")]
        signal: Option<PathBuf>,
        /// Comma-separated kept fractions, e.g. 0.05,0.1,0.25
        #[arg(long, value_delimiter = ',', required = true)]
        fractions: Vec<f64>,
        #[arg(long, value_enum)]
        design: DesignArg,
        #[arg(long, value_enum, default_value = "combinatorial")]
        laplacian: LaplacianArg,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report file; `.json` gets the full report, anything else flat CSV
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long)]
        no_cache: bool,
    },
    /// Monte Carlo denoising at a fixed noise level
    Denoise {
        #[command(flatten)]
        source: GraphSource,
        /// Signal file; defaults to the smooth test signal
        #[arg(long, value_name = "FILE")]
        signal: Option<PathBuf>,
        #[arg(long)]
        sigma: f64,
        #[arg(long, value_enum)]
        design: DesignArg,
        #[arg(long, value_enum, default_value = "combinatorial")]
        laplacian: LaplacianArg,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report file; `.json` gets the full report, anything else flat CSV
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long)]
        no_cache: bool,
    },
    /// Check the perfect-reconstruction residuals of a design
    VerifyPr {
        #[arg(long, value_enum)]
        design: DesignArg,
        #[arg(long)]
        n: usize,
    },
    /// Check the downsampling equivalence on random bipartite graphs
    VerifyTheorem2 {
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        graphs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the vertex-domain transfer identity on a random bipartite graph
    VerifyTheorem3 {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, value_enum, default_value = "meyer")]
        design: DesignArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dump the four spectral gain vectors of a design as CSV
    FilterDump {
        #[arg(long, value_enum)]
        design: DesignArg,
        #[arg(long)]
        n: usize,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Compare each design's low-pass output with the value-ideal filter
    PassbandCompare {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 0.05)]
        sigma: f64,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long)]
        no_cache: bool,
    },
}

/// Eigendecomposes through a content-addressed cache: key is the operator
/// fingerprint, directory comes from `GRAPHFB_CACHE_DIR` (default: a
/// subdirectory of the system temp dir). Cache entries are revalidated on
/// load, so a stale file can only cost time, never correctness.
fn load_basis(op: &OperatorMatrix, no_cache: bool) -> Result<SpectralBasis> {
    if no_cache {
        return eigendecompose(op);
    }
    let dir = std::env::var_os("GRAPHFB_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("graphfb-basis-cache"));
    if std::fs::create_dir_all(&dir).is_err() {
        return eigendecompose(op);
    }
    let path = dir.join(format!("{}.json", op.fingerprint()));
    if path.exists() {
        if let Ok(basis) = SpectralBasis::load(&path, op) {
            return Ok(basis);
        }
    }
    let basis = eigendecompose(op)?;
    let _ = basis.save(&path);
    Ok(basis)
}

fn read_signal_csv(path: &Path) -> Result<Array1<f64>> {
    let file = File::open(path)?;
    let mut values = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let v = trimmed.parse::<f64>().map_err(|e| Error::Parse {
            line: idx + 1,
            message: format!("bad value: {e}"),
        })?;
        values.push(v);
    }
    Ok(Array1::from_vec(values))
}

fn write_signal_csv(path: &Path, values: &Array1<f64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# n={}", values.len())?;
    for v in values {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

fn write_report(report: &ExperimentReport, out: Option<&Path>) -> Result<()> {
    let Some(path) = out else { return Ok(()) };
    if path.extension().is_some_and(|e| e == "json") {
        let file = File::create(path)?;
        serde_json::to_writer_pretty(BufWriter::new(file), report)?;
    } else {
        let file = File::create(path)?;
        write_report_csv(report, BufWriter::new(file))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenGraph { source, seed, out } => {
            let g = source.load(seed)?;
            let file = File::create(&out)?;
            write_edge_list(&g, BufWriter::new(file))?;
            println!(
                "graph n={} edges={} seed={} -> {}",
                g.n(),
                g.edges().len(),
                seed,
                out.display()
            );
        }
        Command::GenSignal {
            source,
            signal,
            laplacian: kind,
            seed,
            out,
            spectrum_out,
            no_cache,
        } => {
            let g = source.load(seed)?;
            let op = laplacian(&g, kind.into())?;
            let basis = load_basis(&op, no_cache)?;
            let n = g.n();
            let f = match signal {
                SignalModelArg::Smooth => gen_smooth_signal(&basis),
                SignalModelArg::Localized => {
                    let clusters = community_clusters(n, 4);
                    gen_localized_signal(&basis, &clusters, &default_localized_ranges(n))?
                }
                SignalModelArg::Mixed => {
                    let ranges = default_localized_ranges(n);
                    gen_mixed_signal(&basis, ranges[1])?
                }
            };
            write_signal_csv(&out, &f)?;
            if let Some(spec_out) = spectrum_out {
                let spectrum = basis.gft(f.view())?;
                let file = File::create(&spec_out)?;
                write_spectrum_csv(
                    basis.eigenvalues().view(),
                    spectrum.view(),
                    BufWriter::new(file),
                )?;
            }
            println!(
                "signal n={n} norm={:.4} -> {}",
                f.dot(&f).sqrt(),
                out.display()
            );
        }
        Command::Decompose {
            source,
            signal,
            design,
            laplacian: kind,
            levels,
            seed,
            out,
            no_cache,
        } => {
            let g = source.load(seed)?;
            let f = read_signal_csv(&signal)?;
            let op = laplacian(&g, kind.into())?;
            let basis = load_basis(&op, no_cache)?;
            let specs = design_specs(design.into(), g.n(), levels)?;
            let pyramid = analyze_octave(&basis, &specs, f.view(), levels)?;
            let file = File::create(&out)?;
            serde_json::to_writer(BufWriter::new(file), &pyramid)?;
            println!(
                "decomposed n={} levels={levels} bands={} coefficients={} -> {}",
                pyramid.n,
                pyramid.bands.len(),
                pyramid.coefficient_count(),
                out.display()
            );
        }
        Command::Reconstruct {
            source,
            pyramid,
            design,
            laplacian: kind,
            seed,
            out,
            no_cache,
        } => {
            let g = source.load(seed)?;
            let file = File::open(&pyramid)?;
            let pyramid: SubbandPyramid = serde_json::from_reader(BufReader::new(file))?;
            pyramid.validate()?;
            let op = laplacian(&g, kind.into())?;
            let basis = load_basis(&op, no_cache)?;
            let specs = design_specs(design.into(), g.n(), pyramid.levels)?;
            let f = synthesize_octave(&basis, &specs, &pyramid)?;
            write_signal_csv(&out, &f)?;
            println!("reconstructed n={} -> {}", f.len(), out.display());
        }
        Command::Nla {
            source,
            signal,
            fractions,
            design,
            laplacian: kind,
            levels,
            seed,
            out,
            no_cache,
        } => {
            let g = source.load(seed)?;
            let op = laplacian(&g, kind.into())?;
            let basis = load_basis(&op, no_cache)?;
            let f = match signal {
                Some(path) => read_signal_csv(&path)?,
                None => gen_smooth_signal(&basis),
            };
            let specs = design_specs(design.into(), g.n(), levels)?;
            let mut reports = Vec::new();
            let mut summary = Vec::new();
            for &fraction in &fractions {
                let report = monte_carlo(
                    f.view(),
                    &basis,
                    &specs,
                    levels,
                    Protocol::Nla { fraction },
                    1,
                    seed,
                )?;
                summary.push(format!("{fraction}:{:.2}dB", report.mean_snr_db));
                reports.push(report);
            }
            if let Some(path) = &out {
                if path.extension().is_some_and(|e| e == "json") {
                    let file = File::create(path)?;
                    serde_json::to_writer_pretty(BufWriter::new(file), &reports)?;
                } else {
                    let file = File::create(path)?;
                    let mut w = BufWriter::new(file);
                    writeln!(w, "method,protocol,parameter,run,snr_db")?;
                    for r in &reports {
                        for rec in &r.runs {
                            writeln!(
                                w,
                                "{},{},{},{},{}",
                                r.method, r.protocol, r.parameter, rec.run, rec.snr_db
                            )?;
                        }
                    }
                }
            }
            println!(
                "nla {} levels={levels} snr {}",
                reports
                    .first()
                    .map(|r| r.method.clone())
                    .unwrap_or_default(),
                summary.join(" ")
            );
        }
        Command::Denoise {
            source,
            signal,
            sigma,
            design,
            laplacian: kind,
            levels,
            runs,
            seed,
            out,
            no_cache,
        } => {
            let g = source.load(seed)?;
            let op = laplacian(&g, kind.into())?;
            let basis = load_basis(&op, no_cache)?;
            let clean = match signal {
                Some(path) => read_signal_csv(&path)?,
                None => gen_smooth_signal(&basis),
            };
            let specs = design_specs(design.into(), g.n(), levels)?;
            let report = monte_carlo(
                clean.view(),
                &basis,
                &specs,
                levels,
                Protocol::Denoise { sigma },
                runs,
                seed,
            )?;
            let mut noisy_sum = 0.0;
            for run in 0..runs {
                let noisy = add_noise(clean.view(), sigma, seed.wrapping_add(run as u64))?;
                noisy_sum += snr_db(clean.view(), noisy.view())?;
            }
            write_report(&report, out.as_deref())?;
            println!(
                "denoise {} sigma={sigma} runs={runs}: mean snr {:.2} dB (noisy {:.2} dB)",
                report.method,
                report.mean_snr_db,
                noisy_sum / runs as f64
            );
        }
        Command::VerifyPr { design, n } => {
            let design: FilterDesign = design.into();
            let spec = FilterBankSpec::for_design(design, n)?;
            let report = verify_pr(&spec);
            let worst = report.max_residual_identity.max(report.max_residual_alias);
            println!(
                "verify-pr {} n={n}: identity residual {:.3e}, alias residual {:.3e} \
                 (tolerance {:.0e})",
                design.as_str(),
                report.max_residual_identity,
                report.max_residual_alias,
                design.pr_tolerance().max(f64::MIN_POSITIVE)
            );
            if worst > design.pr_tolerance() {
                return Err(Error::InvalidParameter(format!(
                    "PR residual {worst:e} exceeds the {} tolerance {:e}",
                    design.as_str(),
                    design.pr_tolerance()
                )));
            }
        }
        Command::VerifyTheorem2 { n, graphs, seed } => {
            let mut worst_dev = 0.0f64;
            let mut worst_diag = 0.0f64;
            for i in 0..graphs {
                let g = generate(&GraphModel::bipartite(), n, seed.wrapping_add(i as u64))?;
                let f = gen_smooth_signal(&eigendecompose(&laplacian(
                    &g,
                    OperatorKind::Combinatorial,
                )?)?);
                let report = verify_theorem2(&g, f.view())?;
                worst_dev = worst_dev.max(report.max_downsample_deviation);
                worst_diag = worst_diag.max(report.max_diagonalization_residual);
            }
            println!(
                "verify-theorem2 n={n} graphs={graphs}: max downsample deviation {worst_dev:.3e}, \
                 max diagonalization residual {worst_diag:.3e}"
            );
            if worst_dev > 1e-9 || worst_diag > 1e-8 {
                return Err(Error::InvalidParameter(format!(
                    "downsampling equivalence violated: {worst_dev:e} / {worst_diag:e}"
                )));
            }
        }
        Command::VerifyTheorem3 { n, design, seed } => {
            let g = generate(&GraphModel::bipartite(), n, seed)?;
            let spec = FilterBankSpec::for_design(design.into(), n)?;
            let report = verify_theorem3(&g, &spec)?;
            println!(
                "verify-theorem3 n={n} {}: eigenvalue symmetry residual {:.3e}, \
                 transfer residual {:.3e}",
                spec.design().as_str(),
                report.max_eigenvalue_symmetry_residual,
                report.max_transfer_residual
            );
            if report.max_eigenvalue_symmetry_residual > 1e-8
                || report.max_transfer_residual > 1e-8
            {
                return Err(Error::InvalidParameter(
                    "vertex-domain transfer identity violated".into(),
                ));
            }
        }
        Command::FilterDump { design, n, out } => {
            let spec = FilterBankSpec::for_design(design.into(), n)?;
            let file = File::create(&out)?;
            write_filter_csv(&spec, BufWriter::new(file))?;
            println!(
                "filters {} n={n} c^2={} -> {}",
                spec.design().as_str(),
                spec.c2(),
                out.display()
            );
        }
        Command::PassbandCompare {
            source,
            sigma,
            runs,
            seed,
            out,
            no_cache,
        } => {
            let g = source.load(seed)?;
            let op = laplacian(&g, OperatorKind::Combinatorial)?;
            let basis = load_basis(&op, no_cache)?;
            let designs = [
                FilterDesign::Ideal,
                FilterDesign::MeyerOrtho,
                FilterDesign::Cdf97Bior,
            ];
            let mut sums = [0.0f64; 3];
            let mut rows = Vec::new();
            for run in 0..runs {
                let entries =
                    passband_trial(&basis, sigma, seed.wrapping_add(run as u64), &designs)?;
                for (k, e) in entries.iter().enumerate() {
                    sums[k] += e.distance;
                    rows.push((run, e.design, e.distance));
                }
            }
            if let Some(path) = &out {
                let mut w = BufWriter::new(File::create(path)?);
                writeln!(w, "run,design,distance")?;
                for (run, design, distance) in &rows {
                    writeln!(w, "{run},{},{distance}", design.as_str())?;
                }
            }
            println!(
                "passband-compare n={} sigma={sigma} runs={runs}: mean distance \
                 ideal {:.4} meyer {:.4} cdf97 {:.4}",
                g.n(),
                sums[0] / runs as f64,
                sums[1] / runs as f64,
                sums[2] / runs as f64
            );
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        let payload = serde_json::json!({
            "error": { "kind": err.kind(), "message": err.to_string() }
        });
        eprintln!("{payload}");
        std::process::exit(1);
    }
}
