//! End-to-end study: neutral exclusion, quality table, observation build,
//! the four quality-stratified fits, significance filtering, and report
//! rendering in text, CSV, or JSON.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{DataError, Error, FitError};
use crate::features::{
    build_observations, design_matrix, encode_coaches, Covariate, Observation, ObservationOptions,
};
use crate::glm::{fit_logistic, FitOptions, FitResult};
use crate::ingest::{exclude_neutral, Dataset, Gazetteer};
use crate::metrics::{build_rankings, QualityTable, Rankings, RtqBand, RtqBounds};

/// Full study configuration. The defaults reproduce the reference choices:
/// quality window 2003-2012, same-quality band [0.9, 1.1], coach dummy
/// threshold 10, significance filter p < 0.10.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    pub quality_window: (i32, i32),
    pub rtq_bounds: RtqBounds,
    pub coach_min_matches: usize,
    pub p_filter: f64,
    pub covariates: Vec<Covariate>,
    pub include_away_observations: bool,
    pub fit: FitOptions,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            quality_window: (2003, 2012),
            rtq_bounds: RtqBounds::default(),
            coach_min_matches: 10,
            p_filter: 0.10,
            covariates: Covariate::ALL.to_vec(),
            include_away_observations: false,
            fit: FitOptions::default(),
        }
    }
}

impl StudyConfig {
    /// Parse a `key = value` config file. Unknown keys are errors; `#` starts
    /// a comment. Keys:
    ///
    /// ```text
    /// quality_window_start = 2003
    /// quality_window_end   = 2012
    /// rtq_lower            = 0.9
    /// rtq_upper            = 1.1
    /// coach_min_matches    = 10
    /// p_filter             = 0.10
    /// covariates           = fatigue,density,own_fan_share,adv_fan_share,red_card_balance,fouls,adv_fouls
    /// include_away_observations = false
    /// max_iterations       = 50
    /// convergence_tol      = 1e-8
    /// ridge_epsilon        = 0
    /// separation_threshold = 15
    /// ```
    pub fn parse(text: &str, file: &str) -> Result<StudyConfig, DataError> {
        let mut config = StudyConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: String| DataError::BadConfig {
                file: file.to_owned(),
                line: i + 1,
                reason,
            };
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| bad("expected key = value".into()))?;
            macro_rules! parse_as {
                ($ty:ty) => {
                    value
                        .parse::<$ty>()
                        .map_err(|_| bad(format!("bad value for {key}: {value:?}")))?
                };
            }
            match key {
                "quality_window_start" => config.quality_window.0 = parse_as!(i32),
                "quality_window_end" => config.quality_window.1 = parse_as!(i32),
                "rtq_lower" => config.rtq_bounds.lower = parse_as!(f64),
                "rtq_upper" => config.rtq_bounds.upper = parse_as!(f64),
                "coach_min_matches" => config.coach_min_matches = parse_as!(usize),
                "p_filter" => config.p_filter = parse_as!(f64),
                "include_away_observations" => config.include_away_observations = parse_as!(bool),
                "max_iterations" => config.fit.max_iterations = parse_as!(usize),
                "convergence_tol" => config.fit.convergence_tol = parse_as!(f64),
                "score_tol" => config.fit.score_tol = parse_as!(f64),
                "ridge_epsilon" => config.fit.ridge_epsilon = parse_as!(f64),
                "separation_threshold" => config.fit.separation_threshold = parse_as!(f64),
                "covariates" => {
                    let mut list = Vec::new();
                    for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let c = Covariate::from_name(name)
                            .ok_or_else(|| bad(format!("unknown covariate {name:?}")))?;
                        if !list.contains(&c) {
                            list.push(c);
                        }
                    }
                    config.covariates = list;
                }
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        if config.quality_window.0 > config.quality_window.1 {
            return Err(DataError::BadConfig {
                file: file.to_owned(),
                line: 0,
                reason: "quality window start exceeds end".into(),
            });
        }
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<StudyConfig, DataError> {
        let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
            path: path.to_owned(),
            source,
        })?;
        let label = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        StudyConfig::parse(&text, &label)
    }
}

/// The four analysis slices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stratum {
    Inferior,
    Same,
    Superior,
    All,
}

impl Stratum {
    pub const ORDER: [Stratum; 4] = [
        Stratum::Inferior,
        Stratum::Same,
        Stratum::Superior,
        Stratum::All,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Stratum::Inferior => "inferior quality",
            Stratum::Same => "same quality",
            Stratum::Superior => "superior quality",
            Stratum::All => "no quality split",
        }
    }

    fn accepts(self, band: RtqBand) -> bool {
        match self {
            Stratum::Inferior => band == RtqBand::Inferior,
            Stratum::Same => band == RtqBand::Same,
            Stratum::Superior => band == RtqBand::Superior,
            Stratum::All => true,
        }
    }
}

/// A coefficient that survived the significance filter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignificantRow {
    pub variable: String,
    pub coefficient: f64,
    pub p_value: f64,
}

/// Fit outcome for one stratum: a model, or the reason there is none.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StratumFit {
    Fitted(FitResult),
    Degenerate { reason: String },
}

/// One stratum's full report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub stratum: Stratum,
    pub n_observations: usize,
    pub fit: StratumFit,
    /// Coefficients with p below the configured filter.
    pub significant: Vec<SignificantRow>,
    pub warnings: Vec<String>,
}

/// Everything `run_study` produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub neutral_excluded: usize,
    pub observations_total: usize,
    pub strata: Vec<AnalysisReport>,
    pub rankings: Rankings,
}

fn fit_stratum(
    stratum: Stratum,
    observations: &[Observation],
    config: &StudyConfig,
) -> AnalysisReport {
    let subset: Vec<Observation> = observations
        .iter()
        .filter(|o| stratum.accepts(o.rtq.band))
        .cloned()
        .collect();
    let mut warnings = Vec::new();
    if subset.is_empty() {
        return AnalysisReport {
            stratum,
            n_observations: 0,
            fit: StratumFit::Degenerate {
                reason: "no observations in stratum".into(),
            },
            significant: Vec::new(),
            warnings,
        };
    }
    let coaches = encode_coaches(&subset, config.coach_min_matches);
    let matrix = design_matrix(&subset, &config.covariates, &coaches);
    for dropped in &matrix.dropped_columns {
        warnings.push(format!("column {dropped} identically zero, dropped"));
    }
    let (fit, significant) = match fit_logistic(&matrix, &config.fit) {
        Ok(result) => {
            let significant = result
                .column_names
                .iter()
                .zip(result.coefficients.iter().zip(&result.p_values))
                .filter(|(_, (_, &p))| p < config.p_filter)
                .map(|(name, (&coefficient, &p_value))| SignificantRow {
                    variable: name.clone(),
                    coefficient,
                    p_value,
                })
                .collect();
            if !result.separation_warnings.is_empty() {
                warnings.push(format!(
                    "possible separation in: {}",
                    result.separation_warnings.join(", ")
                ));
            }
            if !result.converged {
                warnings.push("fit did not converge".into());
            }
            (StratumFit::Fitted(result), significant)
        }
        Err(
            e @ (FitError::DegenerateLabels
            | FitError::InsufficientData { .. }
            | FitError::SingularSystem(_)
            | FitError::EmptyMatrix),
        ) => (
            StratumFit::Degenerate {
                reason: e.to_string(),
            },
            Vec::new(),
        ),
        Err(e) => (
            StratumFit::Degenerate {
                reason: e.to_string(),
            },
            Vec::new(),
        ),
    };
    AnalysisReport {
        stratum,
        n_observations: subset.len(),
        fit,
        significant,
        warnings,
    }
}

/// Run the whole analysis: one pooled fit plus one per quality band, each with
/// its own significance table, and the three rankings.
///
/// Strata with single-class labels (or no data at all) produce a degenerate
/// notice instead of coefficients; that is a reporting outcome, not a failure.
pub fn run_study(
    d: &Dataset,
    gazetteer: &Gazetteer,
    config: &StudyConfig,
) -> Result<StudyReport, Error> {
    let (analyzable, neutral_excluded) = exclude_neutral(d);
    let quality = QualityTable::from_dataset(&analyzable, config.quality_window);
    let opts = ObservationOptions {
        rtq_bounds: config.rtq_bounds,
        include_away: config.include_away_observations,
    };
    let (observations, obs_warnings) = build_observations(&analyzable, &quality, gazetteer, &opts);

    let mut strata: Vec<AnalysisReport> = Stratum::ORDER
        .iter()
        .map(|&s| fit_stratum(s, &observations, config))
        .collect();
    if let Some(all) = strata.iter_mut().find(|r| r.stratum == Stratum::All) {
        all.warnings.extend(obs_warnings);
    }

    let rankings = build_rankings(&analyzable, &quality);
    Ok(StudyReport {
        neutral_excluded,
        observations_total: observations.len(),
        strata,
        rankings,
    })
}

/// Output format for every report-producing command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!(
                "unknown format {other:?} (expected text, csv, or json)"
            )),
        }
    }
}

/// Render a study report to named documents. Deterministic: identical inputs
/// produce identical bytes.
pub fn render_report(report: &StudyReport, format: OutputFormat) -> Vec<(String, String)> {
    match format {
        OutputFormat::Json => vec![(
            "report.json".to_owned(),
            serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        )],
        OutputFormat::Text => vec![("report.txt".to_owned(), report_text(report))],
        OutputFormat::Csv => vec![
            ("rankings.csv".to_owned(), report.rankings.to_csv()),
            ("fits.csv".to_owned(), fits_csv(report)),
        ],
    }
}

fn report_text(report: &StudyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Home advantage study");
    let _ = writeln!(
        out,
        "neutral matches excluded: {}; observations: {}",
        report.neutral_excluded, report.observations_total
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "Rankings");
    out.push_str(&report.rankings.to_text());
    for stratum_report in &report.strata {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "== {} (N = {}) ==",
            stratum_report.stratum.label(),
            stratum_report.n_observations
        );
        match &stratum_report.fit {
            StratumFit::Degenerate { reason } => {
                let _ = writeln!(out, "no model: {reason}");
            }
            StratumFit::Fitted(fit) => {
                if stratum_report.significant.is_empty() {
                    let _ = writeln!(out, "no significant variables");
                } else {
                    let width = stratum_report
                        .significant
                        .iter()
                        .map(|r| r.variable.len())
                        .max()
                        .unwrap_or(8)
                        .max(8);
                    let _ = writeln!(out, "{:<width$}  {:>12}", "variable", "coefficient");
                    for row in &stratum_report.significant {
                        let _ =
                            writeln!(out, "{:<width$}  {:>12.3}", row.variable, row.coefficient);
                    }
                }
                let _ = writeln!(
                    out,
                    "N = {}; Cox & Snell R2 = {:.3}; Nagelkerke R2 = {:.3}",
                    fit.n, fit.cox_snell, fit.nagelkerke
                );
            }
        }
        for w in &stratum_report.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
    }
    out
}

fn fits_csv(report: &StudyReport) -> String {
    let mut out = String::from("stratum,variable,coefficient,std_error,z,p_value,significant\n");
    for stratum_report in &report.strata {
        if let StratumFit::Fitted(fit) = &stratum_report.fit {
            for (j, name) in fit.column_names.iter().enumerate() {
                let significant = stratum_report
                    .significant
                    .iter()
                    .any(|r| r.variable == *name);
                let _ = writeln!(
                    out,
                    "{},{name},{:.10},{:.10},{:.6},{:.6},{significant}",
                    stratum_report.stratum.label().replace(' ', "_"),
                    fit.coefficients[j],
                    fit.std_errors[j],
                    fit.z_scores[j],
                    fit.p_values[j],
                );
            }
        }
    }
    out
}
