use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use sense_entail::convecs::save_model;
use sense_entail::corpus::{extract_from_text, load_occurrences, save_occurrences, DEFAULT_WINDOW};
use sense_entail::harness::{
    cluster_word, fit_fold, format_report, load_dataset, load_report, merge_reports, run_experiment, save_report,
    score_pairs, with_token_similarity, ExperimentConfig, FoldModel, LabeledPair,
};
use sense_entail::senses::{
    build_prototypes, filter_clusters, load_cluster_sets, load_inventory, save_cluster_sets, save_inventory,
    SenseInventory,
};
use sense_entail::vsm::save_latent;
use sense_entail::{Error, Result};

#[derive(Parser)]
#[command(name = "sense-entail", version, about = "Sense-aware lexical entailment")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Log progress (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Extract windowed occurrences of target words from a plain-text corpus.
    Ingest {
        /// One sentence per line.
        #[arg(long)]
        corpus: PathBuf,
        /// One word per line, or a dataset file whose words become targets.
        #[arg(long)]
        targets: PathBuf,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Cluster each word's occurrences.
    Cluster {
        #[arg(long)]
        occurrences: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// Only these words (default: all in the file).
        #[arg(long, value_delimiter = ',')]
        words: Vec<String>,
        #[command(flatten)]
        opts: ClusterOpts,
    },
    /// Turn cluster sets into a raw sense inventory.
    Prototypes {
        #[arg(long)]
        clusters: PathBuf,
        /// The occurrence file the clusters were built from.
        #[arg(long)]
        occurrences: PathBuf,
        #[arg(long)]
        min_frac: Option<String>,
        /// Prototype matrix; priors go next to it with a `.priors` extension.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Score word pairs against a sense inventory.
    Score {
        #[arg(long)]
        inventory: PathBuf,
        #[arg(long)]
        priors: Option<PathBuf>,
        /// `u<TAB>v[<TAB>label]` lines.
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// A single pair.
        #[arg(long, num_args = 2, value_names = ["U", "V"])]
        pair: Vec<String>,
        /// Labeled pairs to train on (tunes the balAPinc threshold; required for ConVecs).
        #[arg(long)]
        train: Option<PathBuf>,
        /// Write the trained ConVecs model here, and its latent rows next to it.
        #[arg(long)]
        save_model: Option<PathBuf>,
        #[command(flatten)]
        opts: ScoreOpts,
    },
    /// Run a cross-validated experiment from a `key = value` config file.
    Eval {
        config: PathBuf,
        /// Override a config entry, e.g. `--set clustering=tiered`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
    },
    /// Merge report files into one table.
    Report {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ClusterOpts {
    /// none, correlation or tiered.
    #[arg(long, default_value = "tiered")]
    backend: String,
    #[arg(long)]
    sigma: Option<String>,
    /// lowest or random.
    #[arg(long)]
    pivot: Option<String>,
    #[arg(long)]
    taxonomy: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    /// root or level.
    #[arg(long)]
    eta_role: Option<String>,
    #[arg(long)]
    iters: Option<String>,
    #[arg(long)]
    sample: Option<String>,
    #[arg(long)]
    top_features: Option<String>,
}

#[derive(Args)]
struct ScoreOpts {
    /// balapinc or convecs.
    #[arg(long, default_value = "balapinc")]
    scorer: String,
    #[arg(long, default_value = "AvgScore")]
    strategy: String,
    #[arg(long)]
    train_pairs: Option<String>,
    #[arg(long)]
    feature_cap: Option<String>,
    #[arg(long)]
    side_tagged: Option<String>,
    #[arg(long)]
    latent_dim: Option<String>,
    #[arg(long)]
    kernel_degree: Option<String>,
    #[arg(long)]
    regularization: Option<String>,
}

fn apply(cfg: &mut ExperimentConfig, entries: &[(&str, Option<&str>)]) -> Result<()> {
    for (k, v) in entries {
        if let Some(v) = v {
            cfg.set(k, v, Path::new(""))?;
        }
    }
    Ok(())
}

fn cluster_config(o: &ClusterOpts, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig {
        seed: seed.unwrap_or(0),
        taxonomy: o.taxonomy.clone(),
        ..Default::default()
    };
    apply(
        &mut cfg,
        &[
            ("backend", Some(&o.backend)),
            ("sigma", o.sigma.as_deref()),
            ("pivot", o.pivot.as_deref()),
            ("alpha", o.alpha.as_deref()),
            ("beta", o.beta.as_deref()),
            ("eta", o.eta.as_deref()),
            ("eta_role", o.eta_role.as_deref()),
            ("iters", o.iters.as_deref()),
            ("sample", o.sample.as_deref()),
            ("top_features", o.top_features.as_deref()),
        ],
    )?;
    cfg.correlation.validate()?;
    cfg.tiered.validate()?;
    Ok(cfg)
}

fn read_targets(path: &Path) -> Result<BTreeSet<String>> {
    let text = fs::read_to_string(path)?;
    if text.lines().any(|l| l.contains('\t') && !l.starts_with('#')) {
        let pairs = load_dataset(path)?;
        return Ok(pairs.into_iter().flat_map(|p| [p.u, p.v]).collect());
    }
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect())
}

/// Unlabeled pairs read as negatives; the label is only used for training.
fn read_pairs(path: &Path) -> Result<Vec<LabeledPair>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        match f.as_slice() {
            [u, v] => out.push(LabeledPair::new(*u, *v, false)),
            [u, v, l] => out.push(LabeledPair::new(*u, *v, *l == "1")),
            _ => return Err(Error::parse(path, i + 1, "expected u<TAB>v[<TAB>label]")),
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Ingest {
            corpus,
            targets,
            window,
            out,
        } => {
            let targets = read_targets(&targets)?;
            let text = fs::read_to_string(&corpus)?;
            let occs = extract_from_text(&text, &targets, window)?;
            for (t, o) in &occs {
                if o.is_empty() {
                    log::warn!("no occurrences of {t:?}");
                }
            }
            save_occurrences(&out, occs.values())?;
            let n: usize = occs.values().map(|o| o.len()).sum();
            println!("{n} occurrences of {} targets -> {}", occs.len(), out.display());
        }
        Cmd::Cluster {
            occurrences,
            out,
            words,
            opts,
        } => {
            let cfg = cluster_config(&opts, cli.seed)?;
            let occs = load_occurrences(&occurrences)?;
            let chosen: Vec<&String> = if words.is_empty() {
                occs.keys().collect()
            } else {
                words.iter().collect()
            };
            let sets = with_token_similarity(&cfg, |sim| {
                chosen
                    .iter()
                    .map(|w| {
                        let o = occs
                            .get(*w)
                            .ok_or_else(|| Error::InvalidArgument(format!("no occurrences of {w:?}")))?;
                        let (_, cs) = cluster_word(o, &cfg, sim)?;
                        info!("{w}: {} clusters", cs.clusters.len());
                        Ok(cs)
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            save_cluster_sets(&out, &sets)?;
            println!("{} cluster sets -> {}", sets.len(), out.display());
        }
        Cmd::Prototypes {
            clusters,
            occurrences,
            min_frac,
            out,
        } => {
            let mut cfg = ExperimentConfig::default();
            apply(&mut cfg, &[("min_frac", min_frac.as_deref())])?;
            let occs = load_occurrences(&occurrences)?;
            let bags: BTreeMap<_, _> = occs.values().flat_map(|o| o.full_bags()).collect();
            let mut inv = SenseInventory::new();
            for cs in load_cluster_sets(&clusters)? {
                let kept = filter_clusters(&cs, cfg.min_cluster_frac)?;
                inv.insert(cs.target.clone(), build_prototypes(&kept, &bags)?);
            }
            let priors = out.with_extension("priors");
            save_inventory(&out, &priors, &inv)?;
            println!("{} senses of {} words -> {}", inv.n_senses(), inv.len(), out.display());
        }
        Cmd::Score {
            inventory,
            priors,
            pairs,
            pair,
            train,
            save_model: model_out,
            opts,
        } => {
            let mut cfg = ExperimentConfig {
                seed: cli.seed.unwrap_or(0),
                ..Default::default()
            };
            apply(
                &mut cfg,
                &[
                    ("scorer", Some(&opts.scorer)),
                    ("strategy", Some(&opts.strategy)),
                    ("train_pairs", opts.train_pairs.as_deref()),
                    ("feature_cap", opts.feature_cap.as_deref()),
                    ("side_tagged", opts.side_tagged.as_deref()),
                    ("latent_dim", opts.latent_dim.as_deref()),
                    ("kernel_degree", opts.kernel_degree.as_deref()),
                    ("regularization", opts.regularization.as_deref()),
                ],
            )?;
            let priors = priors.unwrap_or_else(|| inventory.with_extension("priors"));
            let ppmi = load_inventory(&inventory, &priors)?.ppmi(cfg.side_tagged)?;
            let mut queries = match &pairs {
                Some(p) => read_pairs(p)?,
                None => Vec::new(),
            };
            for uv in pair.chunks(2) {
                queries.push(LabeledPair::new(uv[0].clone(), uv[1].clone(), false));
            }
            if queries.is_empty() {
                return Err(Error::InvalidArgument("give --pairs or --pair U V".into()));
            }
            let model = match &train {
                Some(t) => {
                    let tp = load_dataset(t)?;
                    let idx: Vec<usize> = (0..tp.len()).collect();
                    Some(fit_fold(&cfg, &ppmi, &tp, &idx, cfg.seed)?)
                }
                None => None,
            };
            if let (Some(path), Some(FoldModel::Convecs { latent, model })) = (&model_out, &model) {
                let latent_path = path.with_extension("latent");
                let mut model = model.clone();
                model.projection = latent_path.file_name().map(|n| n.to_string_lossy().into_owned());
                save_model(path, &model)?;
                save_latent(&latent_path, latent)?;
            }
            let scores = score_pairs(&cfg, &ppmi, &queries, model.as_ref())?;
            let mut stdout = io::stdout().lock();
            for (p, (s, pred)) in queries.iter().zip(scores) {
                match pred {
                    Some(b) => writeln!(stdout, "{}\t{}\t{s}\t{}", p.u, p.v, u8::from(b))?,
                    None => writeln!(stdout, "{}\t{}\t{s}", p.u, p.v)?,
                }
            }
        }
        Cmd::Eval { config, sets } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            for s in &sets {
                let (k, v) = s
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidArgument(format!("--set expects KEY=VALUE, got {s:?}")))?;
                cfg.set(k.trim(), v.trim(), Path::new(""))?;
            }
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let out = run_experiment(&cfg)?;
            print!("{}", format_report(&[out.row]));
        }
        Cmd::Report { inputs, out } => {
            let reports = inputs.iter().map(load_report).collect::<Result<Vec<_>>>()?;
            let merged = merge_reports(&reports);
            match out {
                Some(p) => save_report(&p, &merged)?,
                None => print!("{}", format_report(&merged)),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
