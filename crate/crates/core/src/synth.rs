//! Synthetic championships with known ground truth, for validating the
//! measurement and estimation pipeline end to end.
//!
//! The generator draws every match outcome from the same logistic model the
//! pipeline later fits: the host's win probability is
//! `sigmoid(beta_home + strength_host - strength_visitor +
//! beta_fatigue * fatigue + beta_density * density + coach effect)`, with a
//! configured draw mass carved out by scaling both win probabilities by
//! `1 - draw_share`. Covariates are drawn before the outcome so the fitted
//! model is correctly specified when `draw_share` is zero.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{coach_key, Date, Match, Stadium, StadiumId, TeamId, TeamRef};
use crate::geo::haversine_km;
use crate::ingest::{Dataset, Gazetteer};
use crate::metrics::RtqBand;
use crate::pipeline::{run_study, Stratum, StratumFit, StudyConfig};

/// Generative parameters for a block of synthetic seasons. The seed fully
/// determines the output.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub n_teams: usize,
    pub seasons: usize,
    pub first_season: i32,
    /// Per-team log-odds offsets, one per team.
    pub team_strengths: Vec<f64>,
    /// True home-advantage log-odds, added for every host.
    pub beta_home: f64,
    pub beta_fatigue: f64,
    pub beta_density: f64,
    /// Extra log-odds when the host's coach (by normalized key) is listed.
    pub coach_effects: BTreeMap<String, f64>,
    /// Restrict coach effects to matches whose true strength band matches:
    /// equal strengths are Same, a stronger host is Superior.
    pub coach_effect_band: Option<RtqBand>,
    /// How coaches are assigned to clubs across seasons.
    pub coach_plan: CoachPlan,
    /// Per-team (latitude, longitude) of the home city.
    pub geography: Vec<(f64, f64)>,
    /// Probability mass of draws, in `[0, 1)`.
    pub draw_share: f64,
    pub seed: u64,
}

/// Coach assignment scheme.
///
/// A lone career coach per club makes the coach dummies reconstruct club
/// identity, which is collinear with any per-club-constant covariate (fan
/// share). The default therefore rotates a shared pool across clubs, the way
/// real coaching careers move.
#[derive(Debug, Clone, PartialEq)]
pub enum CoachPlan {
    /// One career coach per club for the whole run.
    PerTeam,
    /// A pool of `n_teams + extra` coaches; club `t` in season `s` employs
    /// pool member `(t + s / stint_seasons) mod pool_size`.
    RotatingPool { extra: usize, stint_seasons: usize },
    /// Explicit per-club stint lists, served in contiguous blocks of seasons.
    Explicit(Vec<Vec<String>>),
}

impl SimParams {
    pub fn new(n_teams: usize, seasons: usize, seed: u64) -> SimParams {
        assert!(n_teams >= 2, "need at least two teams");
        assert!(seasons >= 1, "need at least one season");
        let geography = (0..n_teams)
            .map(|t| {
                let spread = t as f64 / (n_teams - 1).max(1) as f64;
                let scatter = ((t * 5) % n_teams) as f64 / n_teams as f64;
                (-30.0 + 26.0 * spread, -55.0 + 20.0 * scatter)
            })
            .collect();
        SimParams {
            n_teams,
            seasons,
            first_season: 2001,
            team_strengths: vec![0.0; n_teams],
            beta_home: 0.0,
            beta_fatigue: 0.0,
            beta_density: 0.0,
            coach_effects: BTreeMap::new(),
            coach_effect_band: None,
            coach_plan: CoachPlan::RotatingPool {
                extra: 3,
                stint_seasons: 2,
            },
            geography,
            draw_share: 0.0,
            seed,
        }
    }

    /// Split the league into three strength tiers at `+gap`, `0`, `-gap`.
    pub fn with_tiers(mut self, gap: f64) -> SimParams {
        let third = self.n_teams / 3;
        self.team_strengths = (0..self.n_teams)
            .map(|t| {
                if t < third {
                    gap
                } else if t < 2 * third {
                    0.0
                } else {
                    -gap
                }
            })
            .collect();
        self
    }

    pub fn season_range(&self) -> (i32, i32) {
        (
            self.first_season,
            self.first_season + self.seasons as i32 - 1,
        )
    }

    /// Study configuration whose quality window covers the generated seasons.
    pub fn study_config(&self) -> StudyConfig {
        StudyConfig {
            quality_window: self.season_range(),
            ..Default::default()
        }
    }

    fn validate(&self) {
        assert!(self.n_teams >= 2);
        assert_eq!(
            self.team_strengths.len(),
            self.n_teams,
            "one strength per team"
        );
        assert_eq!(self.geography.len(), self.n_teams, "one city per team");
        assert!(
            (0.0..1.0).contains(&self.draw_share),
            "draw share must lie in [0, 1)"
        );
        match &self.coach_plan {
            CoachPlan::Explicit(lists) => {
                assert_eq!(lists.len(), self.n_teams, "one coach list per team");
                assert!(
                    lists.iter().all(|c| !c.is_empty()),
                    "every team needs at least one coach"
                );
            }
            CoachPlan::RotatingPool { stint_seasons, .. } => {
                assert!(*stint_seasons >= 1, "stints last at least one season");
            }
            CoachPlan::PerTeam => {}
        }
    }

    fn coach_for(&self, team: usize, season_index: usize) -> String {
        match &self.coach_plan {
            CoachPlan::PerTeam => format!("coach{team:02}"),
            CoachPlan::RotatingPool {
                extra,
                stint_seasons,
            } => {
                let pool = self.n_teams + extra;
                let idx = (team + season_index / stint_seasons) % pool;
                format!("coach{idx:02}")
            }
            CoachPlan::Explicit(lists) => {
                let stints = &lists[team];
                let idx = (season_index * stints.len()) / self.seasons.max(1);
                stints[idx.min(stints.len() - 1)].clone()
            }
        }
    }

    fn true_band(&self, host: usize, visitor: usize) -> RtqBand {
        let delta = self.team_strengths[host] - self.team_strengths[visitor];
        if delta > 1e-9 {
            RtqBand::Superior
        } else if delta < -1e-9 {
            RtqBand::Inferior
        } else {
            RtqBand::Same
        }
    }
}

/// A generated dataset plus the gazetteer covering its cities.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub dataset: Dataset,
    pub gazetteer: Gazetteer,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Double round-robin pairings for one leg via the circle method; the phantom
/// slot handles odd team counts.
fn round_pairings(n_slots: usize, round: usize) -> Vec<(usize, usize)> {
    let m = n_slots - 1;
    (0..n_slots / 2)
        .map(|k| {
            let a = (round + k) % m;
            let b = if k == 0 { m } else { (round + m - k) % m };
            (a, b)
        })
        .collect()
}

/// Generate the full block of seasons described by the parameters.
///
/// Identical parameters give byte-identical output, and the emitted CSV files
/// pass every ingest validation.
pub fn generate(params: &SimParams) -> SimOutput {
    params.validate();
    let n = params.n_teams;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut teams = BTreeMap::new();
    let mut stadiums = BTreeMap::new();
    let mut gazetteer = Gazetteer::new();
    let share_total: f64 = (1..=n).sum::<usize>() as f64;
    for t in 0..n {
        let team_id = TeamId(format!("team{t:02}"));
        let stadium_id = StadiumId(format!("ground{t:02}"));
        let city = format!("city{t:02}");
        let (lat, lon) = params.geography[t];
        gazetteer.insert(&city, lat, lon);
        stadiums.insert(
            stadium_id.clone(),
            Stadium {
                id: stadium_id.clone(),
                name: format!("Ground {t:02}"),
                city: city.clone(),
                capacity: 20_000 + 2_500 * (t as u32 % 7),
                latitude: lat,
                longitude: lon,
            },
        );
        teams.insert(
            team_id.clone(),
            TeamRef {
                id: team_id,
                name: format!("Team {t:02}"),
                home_city: city,
                home_stadium: stadium_id,
                fan_share: 0.9 * (n - t) as f64 / share_total,
            },
        );
    }

    let slots = n + n % 2;
    let rounds_per_leg = slots - 1;
    let mut matches = Vec::new();

    for season_index in 0..params.seasons {
        let season = params.first_season + season_index as i32;
        let season_start = Date::new(season, 4, 1).unwrap().days_from_epoch();
        // Previous (city index, date) per team within this season.
        let mut prev: Vec<Option<(usize, i64)>> = vec![None; n];

        for leg in 0..2 {
            for r in 0..rounds_per_leg {
                let week = leg * rounds_per_leg + r;
                let date_days = season_start + 7 * week as i64;
                let date = Date::from_days_from_epoch(date_days);
                for (a, b) in round_pairings(slots, r) {
                    if a >= n || b >= n {
                        continue; // phantom slot: bye
                    }
                    let (host, visitor) = if leg == 0 { (a, b) } else { (b, a) };
                    let stadium = &stadiums[&StadiumId(format!("ground{host:02}"))];

                    // Covariates first, then the outcome.
                    let density_draw: f64 = 0.05 + 0.90 * rng.random::<f64>();
                    let attendance = (density_draw * f64::from(stadium.capacity)) as u32;
                    let density = f64::from(attendance) / f64::from(stadium.capacity);

                    let red = |rng: &mut ChaCha8Rng| -> u32 {
                        let u: f64 = rng.random();
                        if u < 0.92 {
                            0
                        } else if u < 0.99 {
                            1
                        } else {
                            2
                        }
                    };
                    let red_home = red(&mut rng);
                    let red_away = red(&mut rng);
                    let yellow_home = rng.random_range(0..=5);
                    let yellow_away = rng.random_range(0..=5);
                    let fouls_home = rng.random_range(8..=25);
                    let fouls_away = rng.random_range(8..=25);

                    let fatigue = match prev[host] {
                        None => 0.0,
                        Some((prev_city, prev_date)) => {
                            let (lat1, lon1) = params.geography[prev_city];
                            let (lat2, lon2) = params.geography[host];
                            let rest = (date_days - prev_date) as f64;
                            haversine_km(lat1, lon1, lat2, lon2) / rest
                        }
                    };

                    let coach = params.coach_for(host, season_index);
                    let coach_effect = match params.coach_effects.get(&coach_key(&coach)) {
                        Some(&effect) => {
                            let applies = params
                                .coach_effect_band
                                .is_none_or(|band| params.true_band(host, visitor) == band);
                            if applies {
                                effect
                            } else {
                                0.0
                            }
                        }
                        None => 0.0,
                    };

                    let eta = params.beta_home + params.team_strengths[host]
                        - params.team_strengths[visitor]
                        + params.beta_fatigue * fatigue
                        + params.beta_density * density
                        + coach_effect;
                    let host_win_share = sigmoid(eta);

                    let u: f64 = rng.random();
                    let (host_goals, visitor_goals) = if u < params.draw_share {
                        let g = rng.random_range(0..=2);
                        (g, g)
                    } else if u < params.draw_share + (1.0 - params.draw_share) * host_win_share {
                        let margin = 1 + u32::from(rng.random::<f64>() < 0.25);
                        let loser = rng.random_range(0..=1);
                        (loser + margin, loser)
                    } else {
                        let margin = 1 + u32::from(rng.random::<f64>() < 0.25);
                        let loser = rng.random_range(0..=1);
                        (loser, loser + margin)
                    };

                    for side in [host, visitor] {
                        prev[side] = Some((host, date_days));
                    }

                    let (home_idx, away_idx) = (host, visitor);
                    matches.push(Match {
                        season,
                        round: week as u32 + 1,
                        date,
                        home_team: TeamId(format!("team{home_idx:02}")),
                        away_team: TeamId(format!("team{away_idx:02}")),
                        stadium: StadiumId(format!("ground{home_idx:02}")),
                        goals_home: host_goals,
                        goals_away: visitor_goals,
                        attendance,
                        yellow_home,
                        yellow_away,
                        red_home,
                        red_away,
                        fouls_home,
                        fouls_away,
                        coach_home: params.coach_for(home_idx, season_index),
                        coach_away: params.coach_for(away_idx, season_index),
                    });
                }
            }
        }
    }

    matches.sort_by(|a, b| {
        (a.season, a.date, a.round, &a.home_team, &a.away_team).cmp(&(
            b.season,
            b.date,
            b.round,
            &b.home_team,
            &b.away_team,
        ))
    });

    SimOutput {
        dataset: Dataset {
            teams,
            stadiums,
            matches,
            provenance: Vec::new(),
        },
        gazetteer,
    }
}

/// How one coefficient was recovered across replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientRecovery {
    pub variable: String,
    pub truth: f64,
    pub mean_estimate: f64,
    pub bias: f64,
    pub mae: f64,
    pub rmse: f64,
    /// Fraction of replications whose 95% Wald interval covered the truth.
    pub coverage95: f64,
    /// Fraction of replications significant at the configured filter.
    pub significant_rate: f64,
    pub replicates: usize,
}

/// Aggregate of a replicated estimator-recovery experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoverySummary {
    pub replications: usize,
    pub failures: Vec<String>,
    pub coefficients: Vec<CoefficientRecovery>,
}

impl RecoverySummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "variable,truth,mean_estimate,bias,mae,rmse,coverage95,significant_rate,replicates\n",
        );
        for c in &self.coefficients {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.4},{:.4},{}",
                c.variable,
                c.truth,
                c.mean_estimate,
                c.bias,
                c.mae,
                c.rmse,
                c.coverage95,
                c.significant_rate,
                c.replicates
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "recovery over {} replications ({} failed)",
            self.replications,
            self.failures.len()
        );
        let _ = writeln!(
            out,
            "{:<18} {:>8} {:>10} {:>8} {:>8} {:>8} {:>8} {:>6}",
            "variable", "truth", "mean", "bias", "mae", "rmse", "cover95", "sig"
        );
        for c in &self.coefficients {
            let _ = writeln!(
                out,
                "{:<18} {:>8.3} {:>10.3} {:>8.3} {:>8.3} {:>8.3} {:>8.2} {:>6.2}",
                c.variable,
                c.truth,
                c.mean_estimate,
                c.bias,
                c.mae,
                c.rmse,
                c.coverage95,
                c.significant_rate
            );
        }
        for f in &self.failures {
            let _ = writeln!(out, "failure: {f}");
        }
        out
    }
}

fn truth_for(params: &SimParams, variable: &str) -> f64 {
    match variable {
        "intercept" => params.beta_home,
        "fatigue" => params.beta_fatigue,
        "density" => params.beta_density,
        _ => match variable.strip_prefix("coach:") {
            // A band-restricted effect has no constant pooled truth; report 0.
            Some(key) if params.coach_effect_band.is_none() => {
                params.coach_effects.get(key).copied().unwrap_or(0.0)
            }
            _ => 0.0,
        },
    }
}

/// Generate, fit, and score `replications` synthetic datasets; replication `i`
/// runs with seed `params.seed + i`. Fit failures are recorded per
/// replication and never abort the batch.
pub fn recovery_experiment(
    params: &SimParams,
    config: &StudyConfig,
    replications: usize,
) -> RecoverySummary {
    assert!(replications >= 1, "need at least one replication");
    let mut estimates: BTreeMap<String, Vec<(f64, f64, f64)>> = BTreeMap::new();
    let mut failures = Vec::new();

    for i in 0..replications {
        let mut rep = params.clone();
        rep.seed = params.seed + i as u64;
        let sim = generate(&rep);
        let report = match run_study(&sim.dataset, &sim.gazetteer, config) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("replication {i}: {e}"));
                continue;
            }
        };
        let all = report
            .strata
            .iter()
            .find(|s| s.stratum == Stratum::All)
            .expect("pooled stratum always present");
        match &all.fit {
            StratumFit::Fitted(fit) if fit.converged => {
                for (j, name) in fit.column_names.iter().enumerate() {
                    estimates.entry(name.clone()).or_default().push((
                        fit.coefficients[j],
                        fit.std_errors[j],
                        fit.p_values[j],
                    ));
                }
            }
            StratumFit::Fitted(_) => {
                failures.push(format!("replication {i}: fit did not converge"));
            }
            StratumFit::Degenerate { reason } => {
                failures.push(format!("replication {i}: {reason}"));
            }
        }
    }

    let coefficients = estimates
        .into_iter()
        .map(|(variable, rows)| {
            let truth = truth_for(params, &variable);
            let k = rows.len() as f64;
            let mean_estimate = rows.iter().map(|(b, _, _)| b).sum::<f64>() / k;
            let mae = rows.iter().map(|(b, _, _)| (b - truth).abs()).sum::<f64>() / k;
            let rmse = (rows
                .iter()
                .map(|(b, _, _)| (b - truth).powi(2))
                .sum::<f64>()
                / k)
                .sqrt();
            let coverage95 = rows
                .iter()
                .filter(|(b, se, _)| (b - truth).abs() <= 1.96 * se)
                .count() as f64
                / k;
            let significant_rate =
                rows.iter().filter(|(_, _, p)| *p < config.p_filter).count() as f64 / k;
            CoefficientRecovery {
                variable,
                truth,
                mean_estimate,
                bias: mean_estimate - truth,
                mae,
                rmse,
                coverage95,
                significant_rate,
                replicates: rows.len(),
            }
        })
        .collect();

    RecoverySummary {
        replications,
        failures,
        coefficients,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{dataset_to_csv, gazetteer_to_csv, load_dataset, load_gazetteer};
    use crate::metrics::{ha_per_points, league_record};

    #[test]
    fn identical_params_give_identical_datasets() {
        let params = SimParams::new(6, 3, 99);
        let a = generate(&params);
        let b = generate(&params);
        assert_eq!(a, b);
        // Byte-identical CSV emission too.
        assert_eq!(dataset_to_csv(&a.dataset), dataset_to_csv(&b.dataset));
        assert_eq!(
            gazetteer_to_csv(&a.gazetteer),
            gazetteer_to_csv(&b.gazetteer)
        );
        let c = generate(&SimParams::new(6, 3, 100));
        assert_ne!(a.dataset.matches, c.dataset.matches);
    }

    #[test]
    fn two_teams_play_twice_per_season() {
        let out = generate(&SimParams::new(2, 1, 1));
        assert_eq!(out.dataset.matches.len(), 2);
        let hosts: Vec<&str> = out
            .dataset
            .matches
            .iter()
            .map(|m| m.home_team.0.as_str())
            .collect();
        assert!(hosts.contains(&"team00") && hosts.contains(&"team01"));
    }

    #[test]
    fn double_round_robin_counts() {
        for n in [3usize, 4, 5, 12] {
            let out = generate(&SimParams::new(n, 1, 7));
            assert_eq!(out.dataset.matches.len(), n * (n - 1), "n = {n}");
            // Every ordered pair hosts exactly once.
            let mut seen = std::collections::BTreeSet::new();
            for m in &out.dataset.matches {
                assert!(seen.insert((m.home_team.clone(), m.away_team.clone())));
                assert_eq!(
                    m.stadium.0.trim_start_matches("ground"),
                    m.home_team.0.trim_start_matches("team"),
                    "host plays at its own ground"
                );
            }
        }
    }

    #[test]
    fn generated_csv_passes_ingest_validation() {
        let params = SimParams::new(8, 2, 42).with_tiers(0.8);
        let out = generate(&params);
        let dir = crate::ingest::tests::TempDir::new("synthvalid");
        let mut paths = BTreeMap::new();
        for (name, contents) in dataset_to_csv(&out.dataset) {
            paths.insert(name.clone(), dir.write(&name, &contents));
        }
        let gaz_path = dir.write("gazetteer.csv", &gazetteer_to_csv(&out.gazetteer));
        let (reloaded, report) = load_dataset(
            &paths["matches.csv"],
            &paths["teams.csv"],
            &paths["stadiums.csv"],
        )
        .unwrap();
        assert_eq!(report.rows_rejected, 0, "{:?}", report.warnings);
        assert_eq!(reloaded.matches, out.dataset.matches);
        let (gaz, gaz_warnings) = load_gazetteer(&gaz_path).unwrap();
        assert!(gaz_warnings.is_empty());
        assert_eq!(gaz, out.gazetteer);
    }

    #[test]
    fn no_advantage_truth_keeps_points_share_near_fifty() {
        let params = SimParams::new(12, 20, 11);
        let out = generate(&params);
        let share = ha_per_points(&league_record(&out.dataset)).unwrap();
        // 2640 decisive matches at p = 0.5: the share stays within a few
        // Monte Carlo standard errors of 50.
        assert!((share - 50.0).abs() < 3.0, "share = {share}");
    }

    #[test]
    fn points_share_increases_with_home_effect() {
        let mut shares = Vec::new();
        for (i, beta) in [0.3, 0.6, 0.9].into_iter().enumerate() {
            let mut params = SimParams::new(12, 20, 500 + i as u64);
            params.beta_home = beta;
            let out = generate(&params);
            shares.push(ha_per_points(&league_record(&out.dataset)).unwrap());
        }
        assert!(shares[0] > 50.0 && shares[2] < 100.0, "{shares:?}");
        assert!(shares[0] < shares[1] && shares[1] < shares[2], "{shares:?}");
    }

    #[test]
    fn coach_stints_are_contiguous() {
        let mut params = SimParams::new(4, 6, 3);
        let mut lists: Vec<Vec<String>> = (0..4).map(|t| vec![format!("career{t}")]).collect();
        lists[0] = vec!["first".into(), "second".into()];
        params.coach_plan = CoachPlan::Explicit(lists);
        let out = generate(&params);
        let mut seasons_by_coach: BTreeMap<String, Vec<i32>> = BTreeMap::new();
        for m in &out.dataset.matches {
            if m.home_team.0 == "team00" {
                seasons_by_coach
                    .entry(m.coach_home.clone())
                    .or_default()
                    .push(m.season);
            }
        }
        let firsts = &seasons_by_coach["first"];
        let seconds = &seasons_by_coach["second"];
        assert!(firsts.iter().max().unwrap() < seconds.iter().min().unwrap());
    }

    #[test]
    fn zero_truth_yields_zero_mean_home_advantage_per_wins() {
        // With every effect at zero and no draws, per-team win-rate
        // differences average out to zero across replications. Per-team
        // values inside one replication share the league's home-win total,
        // so the Monte Carlo error is taken at the replication level.
        let mut rep_means = Vec::new();
        for r in 0..16u64 {
            let out = generate(&SimParams::new(6, 4, 8_000 + r));
            let per_team: Vec<f64> = out
                .dataset
                .teams
                .values()
                .map(|team| {
                    let record = crate::metrics::team_record(&out.dataset, team);
                    crate::metrics::ha_per_wins(&record).unwrap()
                })
                .collect();
            rep_means.push(per_team.iter().sum::<f64>() / per_team.len() as f64);
        }
        let n = rep_means.len() as f64;
        let mean = rep_means.iter().sum::<f64>() / n;
        let var = rep_means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let mc_se = (var / n).sqrt();
        assert!(
            mean.abs() < 3.0 * mc_se,
            "mean {mean:.3} vs MC SE {mc_se:.3}"
        );
    }

    #[test]
    fn injected_coach_effect_is_detected_at_decade_scale() {
        // A 1.6 log-odds coach effect over roughly 1300 observations is
        // flagged significant in nearly every replication.
        let mut detected = 0;
        let replications = 10;
        for r in 0..replications {
            let mut params = SimParams::new(12, 10, 60_000 + r);
            params.beta_home = 0.4;
            params.coach_effects.insert("coach00".into(), 1.6);
            let sim = generate(&params);
            let config = params.study_config();
            let report = run_study(&sim.dataset, &sim.gazetteer, &config).unwrap();
            let all = report
                .strata
                .iter()
                .find(|s| s.stratum == Stratum::All)
                .unwrap();
            assert_eq!(all.n_observations, 1320);
            if all
                .significant
                .iter()
                .any(|row| row.variable == "coach:coach00")
            {
                detected += 1;
            }
        }
        assert!(
            detected >= 8,
            "coach effect detected in only {detected}/{replications} replications"
        );
    }

    #[test]
    fn null_truth_recovery_is_unbiased_and_sized() {
        let params = SimParams::new(8, 6, 777);
        let mut config = params.study_config();
        config.coach_min_matches = usize::MAX;
        let summary = recovery_experiment(&params, &config, 8);
        assert!(summary.failures.is_empty(), "{:?}", summary.failures);
        let intercept = summary
            .coefficients
            .iter()
            .find(|c| c.variable == "intercept")
            .unwrap();
        assert_eq!(intercept.replicates, 8);
        // 8 reps x 336 observations: the mean sits well within 2 MC standard
        // errors of zero, generously bounded.
        assert!(intercept.mean_estimate.abs() < 0.25, "{intercept:?}");
    }
}
