//! Dataset, feature and benchmark tooling.
//!
//! Label files sit next to their framework as `<file>.<TASK>.labels`.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use afgnn::bench::{
    evaluate, time_pipeline, write_csv, ConstantPredictor, GroundedBaseline, LabelledInstance,
    NetworkPredictor, Predictor, RawInstance, Stage,
};
use afgnn::features::{build_embedding, FeatureLayout};
use afgnn::generate::erdos_renyi;
use afgnn::gnn::{load_model, save_model, GnnModel};
use afgnn::oracle::{read_labels, task_labels, write_labels};
use afgnn::solver::{InputFormat, Solver};
use afgnn::{grounded_labelling, ArgumentationFramework, Decision, Task};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "afgnn-bench",
    version,
    about = "Benchmark and dataset tools for afgnn"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write random frameworks in iccma23 format.
    Generate {
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Arguments per framework.
        #[arg(long, default_value_t = 12)]
        n: usize,
        /// Attack probability between distinct arguments.
        #[arg(long, default_value_t = 0.15)]
        p: f64,
        #[arg(long, default_value_t = 0.02)]
        p_self: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Label every argument with the exact oracle (at most 22 arguments).
    Label {
        #[arg(short = 'p', long)]
        task: Task,
        #[arg(long, default_value = "iccma23", value_parser = parse_format)]
        format: InputFormat,
        files: Vec<PathBuf>,
    },
    /// Export the feature matrix as CSV.
    Features {
        #[arg(long, default_value = "P11")]
        layout: FeatureLayout,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "iccma23", value_parser = parse_format)]
        format: InputFormat,
        file: PathBuf,
        /// Output path; standard output when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Per-instance and macro accuracy against label files.
    Evaluate {
        #[arg(short = 'p', long)]
        task: Task,
        #[arg(long, value_enum, default_value_t = PredictorKind::Hybrid)]
        predictor: PredictorKind,
        #[arg(short, long)]
        model: Option<PathBuf>,
        #[arg(long, default_value = "iccma23", value_parser = parse_format)]
        format: InputFormat,
        #[arg(long)]
        csv: Option<PathBuf>,
        files: Vec<PathBuf>,
    },
    /// Per-stage wall-clock timings.
    Time {
        /// Comma-separated subset of parse,grounded,features,inference.
        #[arg(long, value_delimiter = ',', value_enum)]
        stages: Vec<StageArg>,
        #[arg(short, long)]
        model: Option<PathBuf>,
        #[arg(long, default_value = "iccma23", value_parser = parse_format)]
        format: InputFormat,
        #[arg(long)]
        csv: Option<PathBuf>,
        files: Vec<PathBuf>,
    },
    /// Write a randomly initialised (or all-zero) model file.
    InitModel {
        #[arg(long, value_enum)]
        arch: ArchArg,
        #[arg(short = 'p', long)]
        task: Task,
        #[arg(long, default_value = "P11")]
        layout: FeatureLayout,
        /// GCN hidden width; defaults to the input width.
        #[arg(long)]
        hidden: Option<usize>,
        #[arg(long, default_value_t = 4)]
        blocks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        zero: bool,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PredictorKind {
    /// Grounded shortcut, network on UNDEC arguments.
    Hybrid,
    /// Network output for every argument.
    Network,
    /// Grounded labelling with the fallback answer on UNDEC.
    Grounded,
    AllYes,
    AllNo,
}

#[derive(Clone, Copy, ValueEnum)]
enum StageArg {
    Parse,
    Grounded,
    Features,
    Inference,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArchArg {
    Gcn,
    Gatv2,
}

fn parse_format(s: &str) -> Result<InputFormat, String> {
    s.parse()
}

fn label_path(file: &Path, task: Task) -> PathBuf {
    let mut name = file.as_os_str().to_owned();
    name.push(format!(".{task}.labels"));
    PathBuf::from(name)
}

fn read_af(file: &Path, format: InputFormat) -> Result<ArgumentationFramework> {
    let bytes = fs::read(file).with_context(|| format!("cannot read {}", file.display()))?;
    format
        .parse(&bytes)
        .with_context(|| format!("cannot parse {}", file.display()))
}

fn read_model(path: &Path) -> Result<GnnModel> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    load_model(&bytes).with_context(|| format!("invalid model {}", path.display()))
}

fn csv_sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate {
            count,
            n,
            p,
            p_self,
            seed,
            out_dir,
        } => {
            if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&p_self) {
                bail!("probabilities must lie in [0, 1]");
            }
            fs::create_dir_all(&out_dir)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..count {
                let af = erdos_renyi(&mut rng, n.max(1), p, p_self);
                fs::write(out_dir.join(format!("er-{i:05}.af")), af.to_iccma())?;
            }
        }
        Command::Label {
            task,
            format,
            files,
        } => {
            for file in &files {
                let af = read_af(file, format)?;
                let labels = task_labels(&af, task).with_context(|| file.display().to_string())?;
                let out = label_path(file, task);
                let mut w = BufWriter::new(File::create(&out)?);
                write_labels(&mut w, &labels)?;
                w.flush()?;
            }
        }
        Command::Features {
            layout,
            seed,
            format,
            file,
            out,
        } => {
            let af = read_af(&file, format)?;
            let features = build_embedding(&af, &grounded_labelling(&af), layout, seed);
            features.write_csv(csv_sink(out.as_deref())?)?;
        }
        Command::Evaluate {
            task,
            predictor,
            model,
            format,
            csv,
            files,
        } => {
            let mut instances = Vec::with_capacity(files.len());
            for file in &files {
                let af = read_af(file, format)?;
                let lpath = label_path(file, task);
                let reader = BufReader::new(
                    File::open(&lpath)
                        .with_context(|| format!("cannot open {}", lpath.display()))?,
                );
                let labels = read_labels(reader, af.num_arguments())
                    .with_context(|| lpath.display().to_string())?;
                instances.push(LabelledInstance {
                    name: file.display().to_string(),
                    af,
                    labels,
                });
            }
            let solver = model
                .as_deref()
                .map(read_model)
                .transpose()?
                .map(Solver::new);
            if let Some(s) = &solver {
                if s.model().task != task {
                    bail!(
                        "model was trained for {}, evaluation asks {task}",
                        s.model().task
                    );
                }
            }
            let needs_model = || anyhow!("this predictor needs --model");
            let report = match predictor {
                PredictorKind::Hybrid | PredictorKind::Network => {
                    let solver = solver.as_ref().ok_or_else(needs_model)?;
                    let p = NetworkPredictor {
                        solver,
                        shortcut: matches!(predictor, PredictorKind::Hybrid),
                    };
                    run_eval(&p, &instances, task)?
                }
                PredictorKind::Grounded => run_eval(&GroundedBaseline(task), &instances, task)?,
                PredictorKind::AllYes => {
                    run_eval(&ConstantPredictor(Decision::Yes), &instances, task)?
                }
                PredictorKind::AllNo => {
                    run_eval(&ConstantPredictor(Decision::No), &instances, task)?
                }
            };
            write_csv(csv_sink(csv.as_deref())?, &report.rows())?;
            let fmt =
                |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{:.2}%", 100.0 * x));
            eprintln!(
                "{task}: {} instances, macro accuracy {}, positive {}, negative {}, {:.1} ms total",
                report.instances.len(),
                fmt(report.macro_accuracy),
                fmt(report.pos_accuracy),
                fmt(report.neg_accuracy),
                report.wall_clock.total_ms,
            );
        }
        Command::Time {
            stages,
            model,
            format,
            csv,
            files,
        } => {
            let stages: Vec<Stage> = stages
                .into_iter()
                .map(|s| match s {
                    StageArg::Parse => Stage::Parse,
                    StageArg::Grounded => Stage::Grounded,
                    StageArg::Features => Stage::Features,
                    StageArg::Inference => Stage::Inference,
                })
                .collect();
            let solver = model
                .as_deref()
                .map(read_model)
                .transpose()?
                .map(Solver::new);
            let contents = files
                .iter()
                .map(|f| fs::read(f).with_context(|| format!("cannot read {}", f.display())))
                .collect::<Result<Vec<_>>>()?;
            let raw: Vec<RawInstance<'_>> = files
                .iter()
                .zip(&contents)
                .map(|(f, bytes)| RawInstance {
                    name: f.display().to_string(),
                    bytes,
                    format,
                })
                .collect();
            let rows = time_pipeline(&raw, &stages, solver.as_ref())?;
            write_csv(csv_sink(csv.as_deref())?, &rows)?;
        }
        Command::InitModel {
            arch,
            task,
            layout,
            hidden,
            blocks,
            seed,
            zero,
            out,
        } => {
            let model = match arch {
                ArchArg::Gcn => GnnModel::gcn_random(
                    task,
                    layout,
                    hidden.unwrap_or(layout.width()),
                    blocks,
                    seed,
                ),
                ArchArg::Gatv2 => {
                    if layout != FeatureLayout::P11 {
                        bail!("GATv2 models use the P11 layout");
                    }
                    GnnModel::gatv2_random(task, seed)
                }
            };
            let model = if zero { model.zeroed() } else { model };
            model.validate()?;
            fs::write(&out, save_model(&model))
                .with_context(|| format!("cannot write {}", out.display()))?;
        }
    }
    Ok(())
}

fn run_eval<P: Predictor>(
    p: &P,
    instances: &[LabelledInstance],
    task: Task,
) -> Result<afgnn::bench::AccuracyReport> {
    Ok(evaluate(p, instances, task)?)
}
