//! `homeadv`: quantify home advantage in league football from flat files,
//! fit the quality-stratified logistic models, and validate the estimators
//! on synthetic seasons.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use homeadv_core::error::{DataError, Error, FitError};
use homeadv_core::ingest::{
    dataset_to_csv, exclude_neutral, gazetteer_to_csv, load_dataset, load_gazetteer, Dataset,
    Gazetteer,
};
use homeadv_core::metrics::{
    build_rankings, ha_per_points, ha_per_wins, league_record, QualityTable,
};
use homeadv_core::pipeline::{render_report, run_study, OutputFormat, StudyConfig};
use homeadv_core::synth::{generate, recovery_experiment, SimParams};

#[derive(Parser)]
#[command(
    name = "homeadv",
    version,
    about = "Home-advantage analytics for league football"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> OutputFormat {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct DataArgs {
    /// Directory holding matches.csv, teams.csv, stadiums.csv (and
    /// gazetteer.csv where required)
    #[arg(long, value_name = "DIR")]
    data: PathBuf,
    /// Study configuration file (key = value lines)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write documents into this directory instead of stdout
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimShapeArgs {
    #[arg(long, default_value_t = 12)]
    teams: usize,
    #[arg(long, default_value_t = 10)]
    seasons: usize,
    #[arg(long, default_value_t = 2001)]
    first_season: i32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// True home-advantage log-odds
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta_home: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta_fatigue: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta_density: f64,
    /// Probability mass of draws, in [0, 1)
    #[arg(long, default_value_t = 0.0)]
    draw_share: f64,
    /// Split teams into three strength tiers at +/- this log-odds gap
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    tier_gap: f64,
}

impl SimShapeArgs {
    fn params(&self) -> Result<SimParams, CliError> {
        if self.teams < 2 {
            return Err(CliError::Usage("--teams must be at least 2".into()));
        }
        if self.seasons < 1 {
            return Err(CliError::Usage("--seasons must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.draw_share) {
            return Err(CliError::Usage("--draw-share must lie in [0, 1)".into()));
        }
        let mut params = SimParams::new(self.teams, self.seasons, self.seed);
        params.first_season = self.first_season;
        params.beta_home = self.beta_home;
        params.beta_fatigue = self.beta_fatigue;
        params.beta_density = self.beta_density;
        params.draw_share = self.draw_share;
        if self.tier_gap != 0.0 {
            params = params.with_tiers(self.tier_gap);
        }
        Ok(params)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate the input files and summarize what was accepted
    Ingest(DataArgs),
    /// Per-team rankings: HA per wins, HA per points, technical quality
    Rank(DataArgs),
    /// The four quality-stratified logistic regressions
    Fit(DataArgs),
    /// Generate synthetic seasons in the ingest CSV schemas
    Simulate {
        #[command(flatten)]
        shape: SimShapeArgs,
        /// Directory to write matches/teams/stadiums/gazetteer.csv into
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Replicated estimator-recovery experiment on synthetic seasons
    Recover {
        #[command(flatten)]
        shape: SimShapeArgs,
        #[arg(long, default_value_t = 20)]
        replications: usize,
        /// Study configuration file; defaults to one covering the generated seasons
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Data(d) => d.into(),
            Error::Fit(f) => f.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest(args) => cmd_ingest(&args),
        Command::Rank(args) => cmd_rank(&args),
        Command::Fit(args) => cmd_fit(&args),
        Command::Simulate { shape, out } => cmd_simulate(&shape, &out),
        Command::Recover {
            shape,
            replications,
            config,
            format,
            out,
        } => cmd_recover(
            &shape,
            replications,
            config.as_deref(),
            format,
            out.as_deref(),
        ),
    }
}

fn load_config(path: Option<&Path>) -> Result<StudyConfig, CliError> {
    match path {
        Some(p) => Ok(StudyConfig::load(p)?),
        None => Ok(StudyConfig::default()),
    }
}

fn load_data(dir: &Path) -> Result<(Dataset, homeadv_core::IngestReport), CliError> {
    Ok(load_dataset(
        &dir.join("matches.csv"),
        &dir.join("teams.csv"),
        &dir.join("stadiums.csv"),
    )?)
}

fn load_gazetteer_required(dir: &Path) -> Result<Gazetteer, CliError> {
    let (gazetteer, warnings) = load_gazetteer(&dir.join("gazetteer.csv"))?;
    for w in &warnings {
        eprintln!("warning: {}:{}: {}", w.file, w.row, w.reason);
    }
    Ok(gazetteer)
}

/// Write the documents into `out`, or print them to stdout with separators.
fn emit(docs: Vec<(String, String)>, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))?;
            for (name, contents) in &docs {
                let path = dir.join(name);
                std::fs::write(&path, contents)
                    .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        None => {
            let many = docs.len() > 1;
            for (name, contents) in &docs {
                if many {
                    println!("== {name} ==");
                }
                print!("{contents}");
            }
            Ok(())
        }
    }
}

fn cmd_ingest(args: &DataArgs) -> Result<(), CliError> {
    let (dataset, mut report) = load_data(&args.data)?;
    let (kept, neutral) = exclude_neutral(&dataset);
    report.neutral_excluded = neutral;

    // A gazetteer is optional here; validate it when present.
    let gazetteer_path = args.data.join("gazetteer.csv");
    if gazetteer_path.exists() {
        let (gazetteer, warnings) = load_gazetteer(&gazetteer_path)?;
        report.rows_read += gazetteer.len() + warnings.len();
        report.rows_accepted += gazetteer.len();
        report.rows_rejected += warnings.len();
        report.warnings.extend(warnings);
    }

    let docs = match args.format.into() {
        OutputFormat::Json => vec![("ingest.json".to_owned(), report.to_json() + "\n")],
        OutputFormat::Csv => {
            let mut csv = String::from("file,row,reason\n");
            for w in &report.warnings {
                let _ = writeln!(csv, "{},{},{:?}", w.file, w.row, w.reason);
            }
            vec![("ingest_warnings.csv".to_owned(), csv)]
        }
        OutputFormat::Text => {
            let mut text = String::new();
            let _ = writeln!(text, "rows read:      {}", report.rows_read);
            let _ = writeln!(text, "rows accepted:  {}", report.rows_accepted);
            let _ = writeln!(text, "rows rejected:  {}", report.rows_rejected);
            let _ = writeln!(
                text,
                "neutral venues: {} of {} matches",
                report.neutral_excluded,
                dataset.matches.len()
            );
            let _ = writeln!(
                text,
                "kept: {} teams, {} stadiums, {} analyzable matches",
                kept.teams.len(),
                kept.stadiums.len(),
                kept.matches.len()
            );
            for d in &dataset.provenance {
                let _ = writeln!(text, "source {} fnv1a64 {}", d.file, d.fnv1a64);
            }
            for w in &report.warnings {
                let _ = writeln!(text, "warning {}:{}: {}", w.file, w.row, w.reason);
            }
            vec![("ingest.txt".to_owned(), text)]
        }
    };
    emit(docs, args.out.as_deref())
}

fn cmd_rank(args: &DataArgs) -> Result<(), CliError> {
    let config = load_config(args.config.as_deref())?;
    let (dataset, _) = load_data(&args.data)?;
    let (kept, _) = exclude_neutral(&dataset);
    let quality = QualityTable::from_dataset(&kept, config.quality_window);
    let rankings = build_rankings(&kept, &quality);

    let docs = match args.format.into() {
        OutputFormat::Json => vec![("rankings.json".to_owned(), rankings.to_json() + "\n")],
        OutputFormat::Csv => vec![("rankings.csv".to_owned(), rankings.to_csv())],
        OutputFormat::Text => {
            let mut text = rankings.to_text();
            let record = league_record(&kept);
            if let (Ok(wins), Ok(points)) = (ha_per_wins(&record), ha_per_points(&record)) {
                let _ = writeln!(
                    text,
                    "\nleague aggregate: HA per wins {wins:.1}, HA per points {points:.1}"
                );
            }
            for w in &rankings.warnings {
                let _ = writeln!(text, "warning: {w}");
            }
            vec![("rankings.txt".to_owned(), text)]
        }
    };
    emit(docs, args.out.as_deref())
}

fn cmd_fit(args: &DataArgs) -> Result<(), CliError> {
    let config = load_config(args.config.as_deref())?;
    let (dataset, _) = load_data(&args.data)?;
    let gazetteer = load_gazetteer_required(&args.data)?;
    let report = run_study(&dataset, &gazetteer, &config)?;
    emit(
        render_report(&report, args.format.into()),
        args.out.as_deref(),
    )
}

fn cmd_simulate(shape: &SimShapeArgs, out: &Path) -> Result<(), CliError> {
    let params = shape.params()?;
    let sim = generate(&params);
    let mut docs = dataset_to_csv(&sim.dataset);
    docs.push(("gazetteer.csv".to_owned(), gazetteer_to_csv(&sim.gazetteer)));
    emit(docs, Some(out))?;
    println!(
        "generated {} matches over {} seasons for {} teams (seed {})",
        sim.dataset.matches.len(),
        shape.seasons,
        shape.teams,
        shape.seed
    );
    Ok(())
}

fn cmd_recover(
    shape: &SimShapeArgs,
    replications: usize,
    config: Option<&Path>,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if replications < 1 {
        return Err(CliError::Usage("--replications must be at least 1".into()));
    }
    let params = shape.params()?;
    let config = match config {
        Some(p) => StudyConfig::load(p)?,
        None => params.study_config(),
    };
    let summary = recovery_experiment(&params, &config, replications);
    if summary.failures.len() == replications {
        return Err(CliError::Numerical(format!(
            "every replication failed; first: {}",
            summary
                .failures
                .first()
                .map(String::as_str)
                .unwrap_or("unknown")
        )));
    }
    let docs = match format.into() {
        OutputFormat::Json => vec![("recovery.json".to_owned(), summary.to_json() + "\n")],
        OutputFormat::Csv => vec![("recovery.csv".to_owned(), summary.to_csv())],
        OutputFormat::Text => vec![("recovery.txt".to_owned(), summary.to_text())],
    };
    emit(docs, out)
}
