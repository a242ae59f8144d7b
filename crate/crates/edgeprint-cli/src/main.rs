//! `edgeprint` command-line pipeline.
//!
//! Subcommands are thin adapters over the library: `extract` prints one
//! feature vector, `enroll` builds or extends a gallery file, `identify`
//! reports the two-stage decision for a probe, `evaluate` and `sweep` score
//! a corpus directory, and `synth` writes a synthetic corpus.
//!
//! Exit codes: 0 success, 2 input or I/O error, 3 config mismatch,
//! 4 precondition violation. Data goes to stdout (or `--out`); diagnostics
//! go to stderr.

use clap::{Args, Parser, Subcommand};
use edgeprint::eval::EvalError;
use edgeprint::features::{FeatureError, GalleryError};
use edgeprint::imaging::PgmError;
use edgeprint::matcher::MatchError;
use edgeprint::synth::SynthError;
use edgeprint::{
    default_sweep_grids, evaluate, extract, format_eval_report, format_sweep_table,
    generate_synthetic, identify, load_pgm, save_pgm, sweep, Corpus, EdgeOperator,
    ExtractionConfig, Gallery, GrayImage, RegionGrid, SplitSpec, SynthSpec,
};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "edgeprint",
    version,
    about = "Texture-based palmprint identification: per-region connected-edge counts \
             matched by city-block distance"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the feature vector of one PGM image.
    Extract {
        /// Input PGM image (P5 or P2).
        image: PathBuf,
        #[command(flatten)]
        config: ConfigFlags,
        /// Write output here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add images to a class in a gallery file, creating the file if needed.
    Enroll {
        /// Class the images belong to.
        class_id: String,
        /// One or more PGM images.
        #[arg(required = true)]
        images: Vec<PathBuf>,
        /// Gallery file to create or extend.
        #[arg(long)]
        gallery: PathBuf,
        #[command(flatten)]
        config: ConfigFlags,
    },
    /// Match one probe image against a gallery and print the ranked report.
    Identify {
        /// Probe PGM image.
        image: PathBuf,
        /// Gallery file to match against.
        #[arg(long)]
        gallery: PathBuf,
        #[command(flatten)]
        config: ConfigFlags,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a corpus directory, enroll the training side, and score the rest.
    Evaluate {
        /// Corpus directory: one subdirectory per class holding PGM files.
        corpus: PathBuf,
        #[command(flatten)]
        config: ConfigFlags,
        #[command(flatten)]
        split: SplitFlags,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate every grid x operator cell and print the rate table.
    Sweep {
        /// Corpus directory: one subdirectory per class holding PGM files.
        corpus: PathBuf,
        /// Fixed edge threshold; omit for the automatic one.
        #[arg(long)]
        threshold: Option<f64>,
        /// Automatic threshold scale.
        #[arg(long)]
        threshold_k: Option<f64>,
        /// Minimum edge-component size that counts.
        #[arg(long)]
        min_component: Option<usize>,
        #[command(flatten)]
        split: SplitFlags,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic corpus of stroke images as PGM files.
    Synth {
        /// Directory to write `<class>/<sample>.pgm` trees into.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        class_count: usize,
        #[arg(long, default_value_t = 12)]
        samples_per_class: usize,
        #[arg(long, default_value_t = 384)]
        width: usize,
        #[arg(long, default_value_t = 284)]
        height: usize,
        /// Strokes per quadrant for the first class.
        #[arg(long, default_value_t = 2)]
        lines_min: usize,
        /// Strokes per quadrant for the last class.
        #[arg(long, default_value_t = 11)]
        lines_max: usize,
        #[arg(long, default_value_t = 3.0)]
        thickness: f64,
        #[arg(long, default_value_t = 0.1)]
        jitter: f64,
        #[arg(long, default_value_t = 8)]
        noise: u8,
        #[arg(long, default_value_t = 17)]
        seed: u64,
    },
}

/// Extraction settings; unset flags fall back to the library defaults, or to
/// the gallery's stored config where one is being matched against.
#[derive(Args)]
struct ConfigFlags {
    /// Edge operator: sobel, laplacian, or log.
    #[arg(long)]
    operator: Option<EdgeOperator>,
    /// Fixed edge threshold; omit for the automatic one.
    #[arg(long)]
    threshold: Option<f64>,
    /// Automatic threshold scale.
    #[arg(long)]
    threshold_k: Option<f64>,
    /// Minimum edge-component size that counts.
    #[arg(long)]
    min_component: Option<usize>,
    /// Region grid as ROWSxCOLS, e.g. 2x2, 2x4, 4x4.
    #[arg(long)]
    grid: Option<RegionGrid>,
}

impl ConfigFlags {
    /// `base` with every explicitly given flag applied over it.
    fn overlay(&self, base: &ExtractionConfig) -> ExtractionConfig {
        let mut config = base.clone();
        if let Some(op) = self.operator {
            config.operator = op;
        }
        if let Some(t) = self.threshold {
            config.threshold = Some(t);
        }
        if let Some(k) = self.threshold_k {
            config.threshold_k = k;
        }
        if let Some(m) = self.min_component {
            config.min_component = m;
        }
        if let Some(g) = self.grid {
            config.grid = g;
        }
        config
    }

    fn to_config(&self) -> Result<ExtractionConfig, CliError> {
        let config = self.overlay(&ExtractionConfig::default());
        config.validate()?;
        Ok(config)
    }

    /// Flags given alongside an existing gallery must agree with its config.
    fn check_against(&self, gallery: &Gallery) -> Result<(), CliError> {
        let effective = self.overlay(gallery.config());
        if effective.fingerprint() != gallery.fingerprint() {
            return Err(CliError {
                code: 3,
                message: format!(
                    "config mismatch: flags give \"{}\", gallery has \"{}\"",
                    effective.fingerprint(),
                    gallery.fingerprint()
                ),
            });
        }
        Ok(())
    }
}

#[derive(Args)]
struct SplitFlags {
    /// Training samples per class.
    #[arg(long, default_value_t = 6)]
    n_train: usize,
    /// Test samples per class.
    #[arg(long, default_value_t = 6)]
    n_test: usize,
    /// Split seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl SplitFlags {
    fn to_spec(&self) -> SplitSpec {
        SplitSpec {
            n_train: self.n_train,
            n_test: self.n_test,
            seed: self.seed,
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError {
            code: 2,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<FeatureError> for CliError {
    fn from(err: FeatureError) -> Self {
        let code = match err {
            FeatureError::FingerprintMismatch { .. } => 3,
            _ => 4,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

impl From<MatchError> for CliError {
    fn from(err: MatchError) -> Self {
        let code = match err {
            MatchError::Incomparable { .. } => 3,
            _ => 4,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(err: EvalError) -> Self {
        let code = match &err {
            EvalError::Match(MatchError::Incomparable { .. }) => 3,
            EvalError::Config(FeatureError::FingerprintMismatch { .. }) => 3,
            EvalError::Extraction {
                source: FeatureError::FingerprintMismatch { .. },
                ..
            } => 3,
            _ => 4,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(err: SynthError) -> Self {
        CliError {
            code: 4,
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Extract { image, config, out } => cmd_extract(&image, &config, out.as_deref()),
        Command::Enroll {
            class_id,
            images,
            gallery,
            config,
        } => cmd_enroll(&class_id, &images, &gallery, &config),
        Command::Identify {
            image,
            gallery,
            config,
            out,
        } => cmd_identify(&image, &gallery, &config, out.as_deref()),
        Command::Evaluate {
            corpus,
            config,
            split,
            out,
        } => cmd_evaluate(&corpus, &config, &split, out.as_deref()),
        Command::Sweep {
            corpus,
            threshold,
            threshold_k,
            min_component,
            split,
            out,
        } => {
            let config = ConfigFlags {
                operator: None,
                threshold,
                threshold_k,
                min_component,
                grid: None,
            };
            cmd_sweep(&corpus, &config, &split, out.as_deref())
        }
        Command::Synth {
            out,
            class_count,
            samples_per_class,
            width,
            height,
            lines_min,
            lines_max,
            thickness,
            jitter,
            noise,
            seed,
        } => {
            let spec = SynthSpec {
                class_count,
                samples_per_class,
                width,
                height,
                lines_min,
                lines_max,
                thickness,
                jitter,
                noise,
                seed,
            };
            cmd_synth(&spec, &out)
        }
    }
}

fn cmd_extract(image: &Path, flags: &ConfigFlags, out: Option<&Path>) -> Result<(), CliError> {
    let config = flags.to_config()?;
    let img = read_image(image)?;
    let vector = extract(&img, &config)?;
    let mut text = join_values(vector.values());
    text.push('\n');
    text.push_str(vector.fingerprint());
    text.push('\n');
    emit(out, &text)
}

fn cmd_enroll(
    class_id: &str,
    images: &[PathBuf],
    gallery_path: &Path,
    flags: &ConfigFlags,
) -> Result<(), CliError> {
    let mut gallery = if gallery_path.exists() {
        let gallery = read_gallery(gallery_path)?;
        flags.check_against(&gallery)?;
        gallery
    } else {
        Gallery::new(flags.to_config()?)?
    };
    for path in images {
        let img = read_image(path)?;
        let values = gallery.enroll(class_id, &img)?.values().to_vec();
        let index = gallery.classes()[class_id].len() - 1;
        println!("enrolled {class_id},{index}: {}", join_values(&values));
    }
    let bytes = gallery.to_bytes().map_err(|e| CliError {
        code: 4,
        message: e.to_string(),
    })?;
    fs::write(gallery_path, bytes).map_err(|e| CliError::io(gallery_path, e))?;
    println!(
        "gallery {}: {} classes, {} samples",
        gallery_path.display(),
        gallery.class_count(),
        gallery.sample_count()
    );
    Ok(())
}

fn cmd_identify(
    image: &Path,
    gallery_path: &Path,
    flags: &ConfigFlags,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let gallery = read_gallery(gallery_path)?;
    flags.check_against(&gallery)?;
    let img = read_image(image)?;
    let probe = extract(&img, gallery.config())?;
    let report = identify(&probe, &gallery)?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(out, &text)
}

fn cmd_evaluate(
    corpus_dir: &Path,
    flags: &ConfigFlags,
    split: &SplitFlags,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let config = flags.to_config()?;
    let corpus = load_corpus(corpus_dir)?;
    let result = evaluate(&corpus, &split.to_spec(), &config)?;
    emit(out, &format_eval_report(&result))
}

fn cmd_sweep(
    corpus_dir: &Path,
    flags: &ConfigFlags,
    split: &SplitFlags,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let base = flags.to_config()?;
    let corpus = load_corpus(corpus_dir)?;
    let results = sweep(
        &corpus,
        &split.to_spec(),
        &base,
        &default_sweep_grids(),
        &EdgeOperator::ALL,
    )?;
    emit(out, &format_sweep_table(&results))
}

fn cmd_synth(spec: &SynthSpec, out_dir: &Path) -> Result<(), CliError> {
    let corpus = generate_synthetic(spec)?;
    let pad = (spec.samples_per_class.saturating_sub(1))
        .to_string()
        .len()
        .max(2);
    for (class_id, samples) in corpus.classes() {
        let class_dir = out_dir.join(class_id);
        fs::create_dir_all(&class_dir).map_err(|e| CliError::io(&class_dir, e))?;
        for (i, image) in samples.iter().enumerate() {
            let path = class_dir.join(format!("{i:0pad$}.pgm"));
            fs::write(&path, save_pgm(image)).map_err(|e| CliError::io(&path, e))?;
        }
    }
    println!(
        "wrote {} classes x {} samples to {}",
        corpus.class_count(),
        spec.samples_per_class,
        out_dir.display()
    );
    Ok(())
}

fn read_image(path: &Path) -> Result<GrayImage, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    load_pgm(&bytes).map_err(|e: PgmError| CliError::io(path, e))
}

fn read_gallery(path: &Path) -> Result<Gallery, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Gallery::from_bytes(&bytes).map_err(|e: GalleryError| CliError::io(path, e))
}

/// Loads a corpus directory: every subdirectory is a class, every `.pgm`
/// file inside it a sample, both in name order.
fn load_corpus(dir: &Path) -> Result<Corpus, CliError> {
    let mut corpus = Corpus::new();
    for class_dir in sorted_entries(dir)? {
        if !class_dir.is_dir() {
            continue;
        }
        let class_id = class_dir
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| CliError::io(&class_dir, "class directory name is not UTF-8"))?
            .to_string();
        for file in sorted_entries(&class_dir)? {
            if file.extension().and_then(|e| e.to_str()) == Some("pgm") {
                corpus.add(&class_id, read_image(&file)?);
            }
        }
    }
    if corpus.class_count() == 0 {
        return Err(CliError {
            code: 4,
            message: format!("{}: no class directories with .pgm files", dir.display()),
        });
    }
    Ok(corpus)
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()
        .map_err(|e| CliError::io(dir, e))?;
    paths.sort();
    Ok(paths)
}

fn join_values(values: &[u32]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
