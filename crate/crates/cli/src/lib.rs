//! `patch-lineage` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

pub mod config;
pub mod server;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};
use lineage_core::baselines::{checksum_cluster, Overlap, PlusMinusScores};
use lineage_core::cluster::analyze;
use lineage_core::evaluation::{
    best_row, census, format_clusters, fowlkes_mallows, integration_durations, pair_counts, parse_clusters, purity,
    random_clustering, sweep, ParamRange, SweepGrid, SWEEP_CSV_HEADER,
};
use lineage_core::mail::{ingest_mails, parse_mbox, read_archive};
use lineage_core::repo::{load_commits_report, load_patch_dir};
use lineage_core::store::{CorpusStore, RESULT_FILE};
use lineage_core::{ClusterSet, Corpus, PatchId, PatchKind};

use config::{AnalysisFlags, Engine, Settings};

#[derive(Debug, Parser)]
#[command(name = "patch-lineage", version, about = "Track patches from mailing lists into a repository")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract patches from mbox archives (plain or gzip) into a store.
    IngestMbox {
        #[arg(long)]
        store: PathBuf,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Extract commits from a git repository, or a directory of <hash>.patch files.
    IngestRepo {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, conflicts_with = "patch_dir", required_unless_present = "patch_dir")]
        repo: Option<PathBuf>,
        #[arg(long, default_value = "HEAD")]
        range: String,
        #[arg(long)]
        patch_dir: Option<PathBuf>,
    },
    /// Cluster the stored mails and link them to commits.
    Analyze {
        #[arg(long)]
        store: PathBuf,
        /// Result file; defaults to clusters.txt inside the store.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: AnalysisFlags,
    },
    /// Score a parameter grid against a ground truth and write CSV.
    Sweep {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Ranges as lo:hi:step or a single value; defaults to the full evaluation grid.
        #[arg(long)]
        tf_range: Option<String>,
        #[arg(long)]
        th_range: Option<String>,
        #[arg(long)]
        dlr_range: Option<String>,
        #[arg(long)]
        w_range: Option<String>,
        #[arg(long)]
        ta_range: Option<String>,
        /// Only print the number of configurations.
        #[arg(long)]
        count_only: bool,
        #[command(flatten)]
        flags: AnalysisFlags,
    },
    /// Compare a result file with a ground truth.
    Evaluate {
        #[arg(long)]
        result: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Also score this many random clusterings with the truth's shape.
        #[arg(long, default_value_t = 0)]
        random_seeds: u64,
    },
    /// Integration-duration statistics of a result.
    Stats {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        result: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 0.75, 0.9])]
        quantiles: Vec<f64>,
    },
    /// Serve the review API.
    Serve {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        result: Option<PathBuf>,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        #[command(flatten)]
        flags: AnalysisFlags,
    },
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<lineage_core::Error> for Failure {
    fn from(e: lineage_core::Error) -> Self {
        match e {
            lineage_core::Error::InvalidConfig(m) | lineage_core::Error::EmptyGrid(m) => Failure::Usage(m),
            other => Failure::Data(other.into()),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command,
/// writing normal output to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            1
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn settings(flags: &AnalysisFlags) -> Result<Settings, Failure> {
    flags.resolve().map_err(Failure::Usage)
}

fn emit(out: &mut dyn std::io::Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes()).context("writing output")?;
    Ok(())
}

fn execute(cmd: Command, out: &mut dyn std::io::Write) -> Outcome {
    match cmd {
        Command::IngestMbox { store, paths } => {
            let mut mails = Vec::new();
            for path in &paths {
                let bytes = read_archive(path).with_context(|| format!("reading {}", path.display()))?;
                let mut parsed = parse_mbox(&bytes);
                let offset = mails.len();
                for m in &mut parsed {
                    m.archive_position += offset;
                }
                mails.extend(parsed);
            }
            let (patches, stats) = ingest_mails(&mails);
            CorpusStore::create(&store)?.replace(PatchKind::Mail, &patches)?;
            emit(out, &format!("mails={} patches={} warnings={}\n", stats.mails, stats.patches, stats.warnings))
        }
        Command::IngestRepo { store, repo, range, patch_dir } => {
            let patches = match (repo, patch_dir) {
                (Some(repo), _) => {
                    let (patches, stats) = load_commits_report(&repo, &range)?;
                    emit(out, &format!("commits={} merges={} empty={} ", stats.commits, stats.merges, stats.empty))?;
                    patches
                }
                (None, Some(dir)) => load_patch_dir(&dir)?,
                (None, None) => return Err(Failure::Usage("--repo or --patch-dir is required".into())),
            };
            CorpusStore::create(&store)?.replace(PatchKind::Commit, &patches)?;
            emit(out, &format!("patches={}\n", patches.len()))
        }
        Command::Analyze { store, out: result_path, flags } => {
            let s = settings(&flags)?;
            let store = open_store(&store)?;
            let corpus = store.load()?;
            let result = run_engine(&corpus, &s);
            let path = result_path.unwrap_or_else(|| store.path(RESULT_FILE));
            std::fs::write(&path, format_clusters(&result)).with_context(|| format!("writing {}", path.display()))?;
            emit(out, &format!("{}\n", census(&result)))
        }
        Command::Sweep {
            store,
            truth,
            out: csv_path,
            tf_range,
            th_range,
            dlr_range,
            w_range,
            ta_range,
            count_only,
            flags,
        } => {
            let s = settings(&flags)?;
            let mut grid = SweepGrid::full();
            for (slot, raw) in [
                (&mut grid.tf, tf_range),
                (&mut grid.th, th_range),
                (&mut grid.dlr, dlr_range),
                (&mut grid.w, w_range),
                (&mut grid.ta, ta_range),
            ] {
                if let Some(raw) = raw {
                    *slot = parse_range(&raw)?;
                }
            }
            grid.validate()?;
            if count_only && s.engine == Engine::Rate {
                return emit(out, &format!("{}\n", grid.cardinality()));
            }
            let corpus = open_store(&store)?.load()?;
            let truth = read_clusters(&truth)?;
            let csv = match s.engine {
                Engine::Rate => {
                    let rows = sweep(&grid, &corpus, &truth, s.window_days)?;
                    if let Some(best) = best_row(&rows) {
                        eprintln!("best: {}", best.csv_line());
                    }
                    let mut csv = String::with_capacity(rows.len() * 48);
                    csv.push_str(SWEEP_CSV_HEADER);
                    csv.push('\n');
                    for r in &rows {
                        csv.push_str(&r.csv_line());
                        csv.push('\n');
                    }
                    csv
                }
                Engine::Plusminus => plusminus_sweep(&corpus, &truth, s.window_days)?,
                Engine::Checksum => {
                    let result = checksum_cluster(&corpus, s.window_days);
                    let c = pair_counts(&restrict_to(&result, &truth)?, &truth)?;
                    format!("tp,fp,fn,fm\n{},{},{},{:.6}\n", c.tp, c.fp, c.fn_, fowlkes_mallows(&c))
                }
            };
            match csv_path {
                Some(p) => std::fs::write(&p, csv).with_context(|| format!("writing {}", p.display()))?,
                None => emit(out, &csv)?,
            }
            Ok(())
        }
        Command::Evaluate { result, truth, random_seeds } => {
            let truth = read_clusters(&truth)?;
            let result = restrict_to(&read_clusters(&result)?, &truth)?;
            let c = pair_counts(&result, &truth)?;
            let mut text = format!(
                "tp={} fp={} fn={} tn={}\nfm={:.6}\npurity={:.6}\n",
                c.tp,
                c.fp,
                c.fn_,
                c.tn,
                fowlkes_mallows(&c),
                purity(&result, &truth)?
            );
            if random_seeds > 0 {
                let universe: Vec<PatchId> = truth.universe().cloned().collect();
                let mut total = 0.0;
                for seed in 0..random_seeds {
                    let r = random_clustering(&result.shape(), &universe, seed)?;
                    total += fowlkes_mallows(&pair_counts(&r, &truth)?);
                }
                let _ = writeln!(text, "random_fm_mean={:.6} seeds={random_seeds}", total / random_seeds as f64);
            }
            emit(out, &text)
        }
        Command::Stats { store, result, quantiles } => {
            let store = open_store(&store)?;
            let corpus = store.load()?;
            let path = result.unwrap_or_else(|| store.path(RESULT_FILE));
            let cs = restrict_to(&read_clusters(&path)?, &ClusterSet::singletons(corpus.ids().cloned()))?;
            let report = integration_durations(&cs, &corpus);
            let mut text =
                format!("integrated={} negative={}\nquantile,seconds,days\n", report.durations.len(), report.negative);
            for q in quantiles {
                if !(q > 0.0 && q <= 1.0) {
                    return Err(Failure::Usage(format!("quantile {q} outside (0,1]")));
                }
                if let Some(v) = report.quantile(q) {
                    let _ = writeln!(text, "{q},{v},{:.2}", v as f64 / 86_400.0);
                }
            }
            emit(out, &text)
        }
        Command::Serve { store, result, port, bind, flags } => {
            let s = settings(&flags)?;
            let default_result = store.join(RESULT_FILE);
            let result = result.or_else(|| default_result.exists().then_some(default_result));
            let state = server::AppState::load(&store, result.as_deref(), &s)?;
            let _ = out.flush();
            let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
            rt.block_on(server::serve(state, SocketAddr::new(bind, port)))?;
            Ok(())
        }
    }
}

fn open_store(path: &Path) -> Result<CorpusStore, Failure> {
    Ok(CorpusStore::open(path)?)
}

fn read_clusters(path: &Path) -> Result<ClusterSet, Failure> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_clusters(&text).with_context(|| format!("parsing {}", path.display())).map_err(Failure::Data)
}

/// Restricts `result` to the universe of `truth`, which it must cover.
fn restrict_to(result: &ClusterSet, truth: &ClusterSet) -> Result<ClusterSet, Failure> {
    if let Some(missing) = truth.universe().find(|id| !result.contains(id)) {
        return Err(Failure::Data(anyhow::anyhow!("{missing} is in the ground truth but not in the result")));
    }
    Ok(result.restrict(truth.universe()))
}

pub fn run_engine(corpus: &Corpus, s: &Settings) -> ClusterSet {
    match s.engine {
        Engine::Rate => analyze(corpus, &s.cfg, s.window_days),
        Engine::Plusminus => PlusMinusScores::new(corpus, s.window_days, Overlap::Smaller).cluster(s.threshold),
        Engine::Checksum => checksum_cluster(corpus, s.window_days),
    }
}

fn plusminus_sweep(corpus: &Corpus, truth: &ClusterSet, window_days: u32) -> Result<String, Failure> {
    let scores = PlusMinusScores::new(corpus, window_days, Overlap::Smaller);
    let mut csv = String::from("threshold,tp,fp,fn,fm\n");
    for t in ParamRange::new(0.0, 1.0, 0.01).values() {
        let result = restrict_to(&scores.cluster(t), truth)?;
        let c = pair_counts(&result, truth)?;
        let _ = writeln!(csv, "{t},{},{},{},{:.6}", c.tp, c.fp, c.fn_, fowlkes_mallows(&c));
    }
    Ok(csv)
}

fn parse_range(raw: &str) -> Result<ParamRange, Failure> {
    let nums: Result<Vec<f64>, _> = raw.split(':').map(str::parse::<f64>).collect();
    match nums.map_err(|e| Failure::Usage(format!("range {raw:?}: {e}")))?.as_slice() {
        [v] => Ok(ParamRange::point(*v)),
        [lo, hi, step] => Ok(ParamRange::new(*lo, *hi, *step)),
        _ => Err(Failure::Usage(format!("range {raw:?} must be lo:hi:step or a single value"))),
    }
}
