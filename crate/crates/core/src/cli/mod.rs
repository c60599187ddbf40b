//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::dataio::{self, synthetic, Dataset, NoiseKind};
use crate::error::{Error, Result};
use crate::pipeline::{self, Gallery, Model};
use crate::qcore::NormOrder;
use crate::solver::SolverConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARAM: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_STRICT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "g2dqpca", version, about = "Quaternion 2D PCA for color images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model on every image of a manifest.
    Train(TrainArgs),
    /// Repeated split/train/classify rounds; writes accuracy.csv.
    Evaluate(EvaluateArgs),
    /// Nearest-neighbour label of one or more images.
    Classify(ClassifyArgs),
    /// Project an image onto the leading directions and write it back.
    Reconstruct(ReconstructArgs),
    /// Mean reconstruction error per feature count; writes recon_error.csv.
    ReconCurve(ReconCurveArgs),
    /// Write noisy copies of a fraction of a dataset plus a new manifest.
    Noise(NoiseArgs),
    /// Print the header, configuration and diagnostics of a model file.
    ModelInfo(ModelInfoArgs),
    /// Generate the synthetic template benchmark as PPM files plus a manifest.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct IterArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub eps_perturb: f64,
    /// Exit with code 4 on non-convergence or a truncated basis.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct WeightArgs {
    /// Scale feature columns by the normalized direction weights (default).
    #[arg(long, overrides_with = "unweighted")]
    pub weighted: bool,
    #[arg(long, overrides_with = "weighted")]
    pub unweighted: bool,
}

impl WeightArgs {
    pub fn is_weighted(&self) -> bool {
        !self.unweighted
    }
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    /// Constraint norm order, p > 0 or `inf`.
    #[arg(long, default_value = "2")]
    pub p: NormOrder,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[command(flatten)]
    pub iter: IterArgs,
    #[arg(long)]
    pub out: PathBuf,
}

/// Feature counts given as `k`, `a..b` (inclusive) or `a,b,c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RRange(pub Vec<usize>);

impl FromStr for RRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param(format!("cannot parse feature range {s:?}"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let mut v: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(bad());
            }
            (a..=b).collect()
        } else {
            s.split(',').map(num).collect::<Result<_>>()?
        };
        v.sort_unstable();
        v.dedup();
        Ok(RRange(v))
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated s values; every (s, p) combination is evaluated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub s: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub p: Vec<NormOrder>,
    #[arg(long, default_value = "1..5")]
    pub r: RRange,
    #[arg(long, default_value_t = 3)]
    pub repetitions: usize,
    #[arg(long, default_value_t = 0.9)]
    pub train_fraction: f64,
    /// Pollute each training split with `block` or `saltpepper` noise.
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long, default_value_t = 0.2)]
    pub noise_fraction: f64,
    #[arg(long, default_value_t = 0.02)]
    pub density: f64,
    #[arg(long, default_value_t = 10)]
    pub min_block: usize,
    /// Draw a separate split for every (s, p) cell instead of sharing one per repetition.
    #[arg(long)]
    pub independent_splits: bool,
    #[command(flatten)]
    pub iter: IterArgs,
    /// Output directory for accuracy.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Gallery images.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, required = true)]
    pub image: Vec<PathBuf>,
    #[command(flatten)]
    pub weight: WeightArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReconCurveArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Clean images.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Defaults to 0 through the model rank.
    #[arg(long)]
    pub r: Option<RRange>,
    /// CSV path, or a directory that receives recon_error.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// `block` or `saltpepper`.
    #[arg(long)]
    pub kind: String,
    #[arg(long, default_value_t = 0.2)]
    pub fraction: f64,
    #[arg(long, default_value_t = 0.02)]
    pub density: f64,
    #[arg(long, default_value_t = 10)]
    pub min_block: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for the noisy copies and manifest.tsv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ModelInfoArgs {
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 5)]
    pub classes: usize,
    #[arg(long, default_value_t = 10)]
    pub per_class: usize,
    #[arg(long, default_value_t = 16)]
    pub height: usize,
    #[arg(long, default_value_t = 12)]
    pub width: usize,
    #[arg(long, default_value_t = 10.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Exit code for an error that escaped a subcommand.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. }
        | Error::Image { .. }
        | Error::Manifest { .. }
        | Error::Format(_)
        | Error::Version { .. }
        | Error::Checksum { .. } => EXIT_IO,
        Error::RankDeficient { .. } | Error::DegenerateDirection(_) => EXIT_STRICT,
        Error::InvalidParameter(_)
        | Error::Shape(_)
        | Error::MalformedRepresentation(_)
        | Error::EmptyDataset(_) => EXIT_PARAM,
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn say(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", line.as_ref());
    }

    fn warn(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.err, "warning: {}", line.as_ref());
    }
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARAM } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let mut io = Io { out, err };
    match execute(cli.command, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cmd: Command, io: &mut Io) -> Result<i32> {
    match cmd {
        Command::Train(a) => cmd_train(&a, io),
        Command::Evaluate(a) => cmd_evaluate(&a, io),
        Command::Classify(a) => cmd_classify(&a, io),
        Command::Reconstruct(a) => cmd_reconstruct(&a, io),
        Command::ReconCurve(a) => cmd_recon_curve(&a, io),
        Command::Noise(a) => cmd_noise(&a, io),
        Command::ModelInfo(a) => cmd_model_info(&a, io),
        Command::Synth(a) => cmd_synth(&a, io),
    }
}

fn solver_config(s: f64, p: NormOrder, r: usize, it: &IterArgs, seed: u64) -> Result<SolverConfig> {
    let config = SolverConfig {
        s,
        p,
        r,
        tol: it.tol,
        max_iter: it.max_iter,
        seed,
        eps_perturb: it.eps_perturb,
    };
    config.validate()?;
    Ok(config)
}

/// Describes convergence problems of a trained model, if any.
fn model_warning(model: &Model) -> Option<String> {
    let stalled: Vec<usize> = model
        .report
        .converged
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(t, _)| t + 1)
        .collect();
    let mut parts = Vec::new();
    if !stalled.is_empty() {
        parts.push(format!("directions {stalled:?} hit max_iter before converging"));
    }
    if model.report.truncated {
        parts.push(format!(
            "only {} of {} directions found (degenerate data)",
            model.rank(),
            model.config.r
        ));
    }
    (!parts.is_empty()).then(|| parts.join("; "))
}

fn create_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| Error::io(dir, e)),
        _ => Ok(()),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    create_parent(path)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn cmd_train(a: &TrainArgs, io: &mut Io) -> Result<i32> {
    let config = solver_config(a.s, a.p, a.r, &a.iter, a.iter.seed)?;
    let data = dataio::load_dataset(&a.manifest)?;
    if a.r > data.dims().1 {
        return Err(Error::param(format!("r = {} exceeds the image width {}", a.r, data.dims().1)));
    }
    let model = pipeline::train(&data, &config)?;
    create_parent(&a.out)?;
    dataio::save_model(&model, &a.out)?;
    io.say(format!(
        "trained on {} images of {}x{}, {} classes, s={} p={}",
        data.len(),
        data.dims().0,
        data.dims().1,
        data.classes().len(),
        config.s,
        config.p
    ));
    for t in 0..model.rank() {
        io.say(format!(
            "direction {}: iterations={} converged={} weight={} normalized={}",
            t + 1,
            model.report.iterations[t],
            model.report.converged[t],
            model.weights_raw[t],
            model.weights_norm[t]
        ));
    }
    io.say(format!("wrote {}", a.out.display()));
    Ok(finish_warning(model_warning(&model), a.iter.strict, io))
}

fn finish_warning(warning: Option<String>, strict: bool, io: &mut Io) -> i32 {
    match warning {
        Some(w) => {
            io.warn(&w);
            if strict {
                EXIT_STRICT
            } else {
                EXIT_OK
            }
        }
        None => EXIT_OK,
    }
}

fn noise_kind(name: &str, density: f64, min_block: usize) -> Result<NoiseKind> {
    Ok(match name.parse::<NoiseKind>()? {
        NoiseKind::Block { .. } => NoiseKind::Block { min_block },
        NoiseKind::SaltPepper { .. } => NoiseKind::SaltPepper { density },
    })
}

/// One row of accuracy.csv before the per-cell mean is attached.
#[derive(Debug, Clone)]
struct AccuracyRow {
    pair: usize,
    weighted: bool,
    r: usize,
    repetition: usize,
    seed: u64,
    accuracy: f64,
}

struct Cell {
    rows: Vec<AccuracyRow>,
    warnings: Vec<String>,
}

fn sorted_unique_s(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn sorted_unique_p(values: &[NormOrder]) -> Vec<NormOrder> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.as_f64().total_cmp(&b.as_f64()));
    v.dedup();
    v
}

fn cmd_evaluate(a: &EvaluateArgs, io: &mut Io) -> Result<i32> {
    if a.repetitions == 0 {
        return Err(Error::param("repetitions must be positive"));
    }
    let r_values = &a.r.0;
    let r_max = *r_values.last().ok_or_else(|| Error::param("empty feature range"))?;
    if r_values[0] == 0 {
        return Err(Error::param("feature counts must be positive"));
    }
    let pairs: Vec<(f64, NormOrder)> = sorted_unique_s(&a.s)
        .into_iter()
        .flat_map(|s| sorted_unique_p(&a.p).into_iter().map(move |p| (s, p)))
        .collect();
    for &(s, p) in &pairs {
        solver_config(s, p, r_max, &a.iter, a.iter.seed)?;
    }
    let noise = a
        .noise
        .as_deref()
        .map(|k| noise_kind(k, a.density, a.min_block))
        .transpose()?;
    if !(0.0..=1.0).contains(&a.noise_fraction) {
        return Err(Error::param(format!("noise fraction must lie in [0, 1], got {}", a.noise_fraction)));
    }
    let data = dataio::load_dataset(&a.manifest)?;
    if r_max > data.dims().1 {
        return Err(Error::param(format!("r = {r_max} exceeds the image width {}", data.dims().1)));
    }

    let prepare = |split_seed: u64, noise_seed: u64| -> Result<(Dataset, Dataset, Option<String>)> {
        let sp = dataio::split(&data, a.train_fraction, split_seed)?;
        if sp.test.is_empty() {
            return Err(Error::EmptyDataset("the split left no test images".into()));
        }
        let train = match noise {
            Some(kind) => dataio::pollute_fraction(&sp.train, a.noise_fraction, kind, noise_seed)?,
            None => sp.train,
        };
        Ok((train, sp.test, sp.warning))
    };
    let shared = if a.independent_splits {
        Vec::new()
    } else {
        (0..a.repetitions)
            .into_par_iter()
            .map(|rep| {
                let seed = a.iter.seed.wrapping_add(rep as u64);
                prepare(seed, seed)
            })
            .collect::<Result<Vec<_>>>()?
    };

    let jobs: Vec<(usize, usize)> = (0..pairs.len())
        .flat_map(|pi| (0..a.repetitions).map(move |rep| (pi, rep)))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(pi, rep)| -> Result<Cell> {
            let seed = a.iter.seed.wrapping_add(rep as u64);
            let owned;
            let (train, test, split_warning) = if a.independent_splits {
                let cell_seed = seed.wrapping_add(((pi as u64) + 1) << 32);
                owned = prepare(cell_seed, cell_seed)?;
                (&owned.0, &owned.1, &owned.2)
            } else {
                let sh = &shared[rep];
                (&sh.0, &sh.1, &sh.2)
            };
            let (s, p) = pairs[pi];
            let config = solver_config(s, p, r_max, &a.iter, seed)?;
            let full = pipeline::train(train, &config)?;
            let mut warnings: Vec<String> = split_warning.iter().cloned().collect();
            if let Some(w) = model_warning(&full) {
                warnings.push(format!("s={s} p={p} repetition {rep}: {w}"));
            }
            let mut rows = Vec::new();
            for weighted in [false, true] {
                for &r in r_values {
                    let model = full.truncated(r)?;
                    let gallery = Gallery::build(&model, train, weighted)?;
                    let ev = pipeline::evaluate(&model, &gallery, test)?;
                    rows.push(AccuracyRow {
                        pair: pi,
                        weighted,
                        r,
                        repetition: rep,
                        seed,
                        accuracy: ev.accuracy,
                    });
                }
            }
            Ok(Cell { rows, warnings })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut warnings = Vec::new();
    let mut rows = Vec::new();
    for c in cells {
        warnings.extend(c.warnings);
        rows.extend(c.rows);
    }
    warnings.dedup();
    rows.sort_by_key(|row| (row.pair, row.weighted, row.r, row.repetition));
    let mut means: BTreeMap<(usize, bool, usize), f64> = BTreeMap::new();
    for row in &rows {
        *means.entry((row.pair, row.weighted, row.r)).or_default() += row.accuracy / a.repetitions as f64;
    }

    let mut csv = String::from("s,p,weighted,r,repetition,seed,accuracy,mean_accuracy\n");
    for row in &rows {
        let (s, p) = pairs[row.pair];
        let mean = means[&(row.pair, row.weighted, row.r)];
        let _ = writeln!(
            csv,
            "{s},{p},{},{},{},{},{},{mean}",
            row.weighted, row.r, row.repetition, row.seed, row.accuracy
        );
    }
    let path = a.out.join("accuracy.csv");
    write_text(&path, &csv)?;
    for (&(pi, weighted, r), mean) in &means {
        let (s, p) = pairs[pi];
        io.say(format!("s={s} p={p} weighted={weighted} r={r} mean_accuracy={mean}"));
    }
    io.say(format!("wrote {} ({} rows)", path.display(), rows.len()));
    let warning = (!warnings.is_empty()).then(|| warnings.join("\n"));
    Ok(finish_warning(warning, a.iter.strict, io))
}

fn cmd_classify(a: &ClassifyArgs, io: &mut Io) -> Result<i32> {
    let model = dataio::load_model(&a.model)?;
    let data = dataio::load_dataset(&a.manifest)?;
    let gallery = Gallery::build(&model, &data, a.weight.is_weighted())?;
    for path in &a.image {
        let img = dataio::load_image(path)?;
        let pred = pipeline::classify(&model, &gallery, &img)?;
        io.say(format!(
            "{}\t{}\tindex={}\tdistance={}",
            path.display(),
            pred.label,
            pred.index,
            pred.distance
        ));
    }
    Ok(EXIT_OK)
}

fn cmd_reconstruct(a: &ReconstructArgs, io: &mut Io) -> Result<i32> {
    let model = dataio::load_model(&a.model)?;
    let img = dataio::load_image(&a.image)?;
    let rec = pipeline::reconstruct(&model, &img, a.r)?;
    create_parent(&a.out)?;
    dataio::save_image(&a.out, &rec)?;
    io.say(format!("wrote {} (r={})", a.out.display(), a.r));
    Ok(EXIT_OK)
}

fn cmd_recon_curve(a: &ReconCurveArgs, io: &mut Io) -> Result<i32> {
    let model = dataio::load_model(&a.model)?;
    let clean = dataio::load_dataset(&a.manifest)?.images();
    let rs = a.r.clone().map_or_else(|| (0..=model.rank()).collect(), |r| r.0);
    let errors = rs
        .par_iter()
        .map(|&r| pipeline::reconstruction_error(&model, &clean, r))
        .collect::<Result<Vec<_>>>()?;
    let (s, p) = (model.config.s, model.config.p);
    let mut csv = String::from("s,p,r,error\n");
    for (r, e) in rs.iter().zip(&errors) {
        let _ = writeln!(csv, "{s},{p},{r},{e}");
        io.say(format!("r={r} error={e}"));
    }
    let path = if a.out.is_dir() { a.out.join("recon_error.csv") } else { a.out.clone() };
    write_text(&path, &csv)?;
    io.say(format!("wrote {}", path.display()));
    Ok(EXIT_OK)
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn cmd_noise(a: &NoiseArgs, io: &mut Io) -> Result<i32> {
    let kind = noise_kind(&a.kind, a.density, a.min_block)?;
    let data = dataio::load_dataset(&a.manifest)?;
    let (noisy, chosen) = dataio::pollute_fraction_indices(&data, a.fraction, kind, a.seed)?;
    fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let mut records = Vec::with_capacity(noisy.len());
    for (k, s) in noisy.samples().iter().enumerate() {
        let src = Path::new(&s.source_path);
        let path = if s.noisy {
            let stem = src.file_stem().and_then(|x| x.to_str()).unwrap_or("image");
            let ext = src.extension().and_then(|x| x.to_str()).unwrap_or("ppm");
            let rel = format!("{}/{k:05}_{stem}.{ext}", sanitize(&s.label));
            let dest = a.out.join(&rel);
            create_parent(&dest)?;
            dataio::save_image(&dest, &s.image)?;
            rel
        } else {
            fs::canonicalize(src)
                .map_err(|e| Error::io(src, e))?
                .display()
                .to_string()
        };
        records.push((s.label.clone(), path));
    }
    let manifest = a.out.join("manifest.tsv");
    dataio::write_manifest(&manifest, records.iter().map(|(l, p)| (l.as_str(), p.as_str())))?;
    io.say(format!(
        "{kind}: corrupted {} of {} images (indices {chosen:?})",
        chosen.len(),
        data.len()
    ));
    io.say(format!("wrote {}", manifest.display()));
    Ok(EXIT_OK)
}

fn cmd_model_info(a: &ModelInfoArgs, io: &mut Io) -> Result<i32> {
    let model = dataio::load_model(&a.model)?;
    let c = &model.config;
    let (m, n) = model.dims();
    io.say(format!("format version {}", dataio::FORMAT_VERSION));
    io.say(format!("image {m}x{n}, rank {} (requested {})", model.rank(), c.r));
    io.say(format!(
        "s={} p={} tol={} max_iter={} seed={} eps_perturb={}",
        c.s, c.p, c.tol, c.max_iter, c.seed, c.eps_perturb
    ));
    io.say(format!("weights_raw {:?}", model.weights_raw));
    io.say(format!("weights_norm {:?}", model.weights_norm));
    io.say(format!("iterations {:?}", model.report.iterations));
    io.say(format!("converged {:?}", model.report.converged));
    io.say(format!("restarts {:?}", model.report.restarts));
    io.say(format!("truncated {}", model.report.truncated));
    io.say(format!("labels {:?}", model.label_space));
    Ok(EXIT_OK)
}

fn cmd_synth(a: &SynthArgs, io: &mut Io) -> Result<i32> {
    let spec = synthetic::SyntheticSpec {
        classes: a.classes,
        per_class: a.per_class,
        height: a.height,
        width: a.width,
        sigma: a.sigma,
        seed: a.seed,
    };
    let data = synthetic::generate(&spec)?;
    let manifest = synthetic::write_dataset(&data, &a.out)?;
    io.say(format!("wrote {} images and {}", data.len(), manifest.display()));
    Ok(EXIT_OK)
}
