//! Regression inputs: one observation per (focal team, home match), the
//! covariate constructions, coach dummy encoding, and the design matrix.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::domain::{coach_key, venue_class, TeamId, VenueClass};
use crate::error::DataError;
use crate::ingest::{travel_distance_km, Dataset, Gazetteer};
use crate::metrics::{classify_rtq, QualityTable, Rtq, RtqBounds};

/// One regression row: did the focal team win its home match, and under what
/// conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub focal_team: TeamId,
    pub opponent: TeamId,
    pub season: i32,
    pub round: u32,
    /// 1 when the focal team won at home.
    pub label: bool,
    /// Travel km per rest day for the focal side; 0 for a season opener.
    pub fatigue: f64,
    /// True when there was no prior match to measure travel from.
    pub fatigue_no_prior: bool,
    /// Attendance over capacity, clamped to 1.
    pub density: f64,
    pub own_fan_share: f64,
    pub adv_fan_share: f64,
    /// Focal red cards minus opponent red cards.
    pub red_card_balance: i64,
    pub fouls: u32,
    pub adv_fouls: u32,
    /// Normalized coach key of the focal side.
    pub coach: String,
    pub rtq: Rtq,
}

/// Travel load: great-circle km from the previous match's city divided by
/// rest days. A missing previous match yields 0, flagged.
pub fn fatigue(
    prev_match_city: Option<&str>,
    current_city: &str,
    rest_days: i64,
    gazetteer: &Gazetteer,
) -> Result<(f64, bool), DataError> {
    let Some(prev) = prev_match_city else {
        return Ok((0.0, true));
    };
    if rest_days <= 0 {
        return Err(DataError::DegenerateRest);
    }
    let km = travel_distance_km(prev, current_city, gazetteer)?;
    Ok((km / rest_days as f64, false))
}

/// Attendance over capacity; above-capacity counts clamp to 1 and are flagged.
pub fn density(attendance: u32, capacity: u32) -> Result<(f64, bool), DataError> {
    if capacity == 0 {
        return Err(DataError::InvalidStadium);
    }
    let raw = f64::from(attendance) / f64::from(capacity);
    if raw > 1.0 {
        Ok((1.0, true))
    } else {
        Ok((raw, false))
    }
}

/// Focal reds minus opponent reds; negative means the opponent was punished more.
pub fn red_card_balance(red_focal: u32, red_opponent: u32) -> i64 {
    i64::from(red_focal) - i64::from(red_opponent)
}

/// Select which coaches get their own dummy column.
///
/// A coach is retained when it appears in at least `min_matches` observations;
/// everyone else pools into the implicit all-zeros baseline. Two collinearity
/// guards apply: a coach covering every observation is pooled (its dummy would
/// equal the intercept), and if the retained set would cover every observation
/// the coach with the most observations is pooled instead (ties broken by
/// dropping the lexicographically last key).
pub fn encode_coaches(observations: &[Observation], min_matches: usize) -> Vec<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for obs in observations {
        *counts.entry(obs.coach.as_str()).or_insert(0) += 1;
    }
    let n = observations.len();
    let mut retained: Vec<String> = counts
        .iter()
        .filter(|&(_, &c)| c >= min_matches.max(1) && c < n)
        .map(|(&k, _)| k.to_owned())
        .collect();
    let covered: usize = retained.iter().map(|k| counts[k.as_str()]).sum();
    if covered == n && !retained.is_empty() {
        let pooled = retained
            .iter()
            .max_by_key(|k| (counts[k.as_str()], k.as_str().to_owned()))
            .cloned()
            .expect("non-empty");
        retained.retain(|k| *k != pooled);
    }
    retained.sort();
    retained
}

/// Covariates available to the regression, in canonical column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Covariate {
    Fatigue,
    Density,
    OwnFanShare,
    AdvFanShare,
    RedCardBalance,
    Fouls,
    AdvFouls,
}

impl Covariate {
    pub const ALL: [Covariate; 7] = [
        Covariate::Fatigue,
        Covariate::Density,
        Covariate::OwnFanShare,
        Covariate::AdvFanShare,
        Covariate::RedCardBalance,
        Covariate::Fouls,
        Covariate::AdvFouls,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Covariate::Fatigue => "fatigue",
            Covariate::Density => "density",
            Covariate::OwnFanShare => "own_fan_share",
            Covariate::AdvFanShare => "adv_fan_share",
            Covariate::RedCardBalance => "red_card_balance",
            Covariate::Fouls => "fouls",
            Covariate::AdvFouls => "adv_fouls",
        }
    }

    pub fn from_name(name: &str) -> Option<Covariate> {
        Covariate::ALL.iter().copied().find(|c| c.name() == name)
    }

    pub fn extract(self, obs: &Observation) -> f64 {
        match self {
            Covariate::Fatigue => obs.fatigue,
            Covariate::Density => obs.density,
            Covariate::OwnFanShare => obs.own_fan_share,
            Covariate::AdvFanShare => obs.adv_fan_share,
            Covariate::RedCardBalance => obs.red_card_balance as f64,
            Covariate::Fouls => f64::from(obs.fouls),
            Covariate::AdvFouls => f64::from(obs.adv_fouls),
        }
    }
}

/// Dense design matrix with named columns and a binary label vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub column_names: Vec<String>,
    pub n_rows: usize,
    pub n_cols: usize,
    /// Row-major values, `n_rows * n_cols`.
    pub values: Vec<f64>,
    pub labels: Vec<f64>,
    /// Columns removed for being identically zero.
    pub dropped_columns: Vec<String>,
}

impl DesignMatrix {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }
}

/// Assemble the design matrix: intercept, the selected covariates in canonical
/// order, then one dummy per retained coach. Identically zero columns are
/// dropped and recorded.
pub fn design_matrix(
    observations: &[Observation],
    covariates: &[Covariate],
    coach_columns: &[String],
) -> DesignMatrix {
    let mut column_names = vec!["intercept".to_owned()];
    column_names.extend(covariates.iter().map(|c| c.name().to_owned()));
    column_names.extend(coach_columns.iter().map(|c| format!("coach:{c}")));

    let n_cols = column_names.len();
    let n_rows = observations.len();
    let mut values = Vec::with_capacity(n_rows * n_cols);
    let mut labels = Vec::with_capacity(n_rows);
    for obs in observations {
        values.push(1.0);
        for c in covariates {
            values.push(c.extract(obs));
        }
        for coach in coach_columns {
            values.push(if obs.coach == *coach { 1.0 } else { 0.0 });
        }
        labels.push(if obs.label { 1.0 } else { 0.0 });
    }

    // Drop identically zero columns (never the intercept).
    let mut keep = vec![true; n_cols];
    let mut dropped_columns = Vec::new();
    for j in 1..n_cols {
        let all_zero = (0..n_rows).all(|i| values[i * n_cols + j] == 0.0);
        if all_zero && n_rows > 0 {
            keep[j] = false;
            dropped_columns.push(column_names[j].clone());
        }
    }
    if dropped_columns.is_empty() {
        return DesignMatrix {
            column_names,
            n_rows,
            n_cols,
            values,
            labels,
            dropped_columns,
        };
    }
    let kept_names: Vec<String> = column_names
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(n, _)| n.clone())
        .collect();
    let kept_cols = kept_names.len();
    let mut kept_values = Vec::with_capacity(n_rows * kept_cols);
    for i in 0..n_rows {
        for j in 0..n_cols {
            if keep[j] {
                kept_values.push(values[i * n_cols + j]);
            }
        }
    }
    DesignMatrix {
        column_names: kept_names,
        n_rows,
        n_cols: kept_cols,
        values: kept_values,
        labels,
        dropped_columns,
    }
}

/// Knobs for observation construction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservationOptions {
    pub rtq_bounds: RtqBounds,
    /// Also emit away matches as label-0 observations. Off by default.
    pub include_away: bool,
}

/// Build the observation set from a neutral-excluded dataset.
///
/// One observation per (focal team, home match of that team), where a home
/// match is one held at the focal team's registered ground. Rows that cannot
/// be constructed (missing gazetteer city, missing quality, zero rest days)
/// are dropped with a warning, never silently.
pub fn build_observations(
    d: &Dataset,
    q: &QualityTable,
    gazetteer: &Gazetteer,
    opts: &ObservationOptions,
) -> (Vec<Observation>, Vec<String>) {
    let mut observations = Vec::new();
    let mut warnings = Vec::new();

    // Previous match (date, city) per team within the current season, relying
    // on the dataset's chronological order.
    let mut prev: BTreeMap<(TeamId, i32), (crate::domain::Date, String)> = BTreeMap::new();

    for m in &d.matches {
        let (Some(home), Some(away)) = (d.teams.get(&m.home_team), d.teams.get(&m.away_team))
        else {
            warnings.push(format!(
                "season {} round {}: unknown participant, skipped",
                m.season, m.round
            ));
            continue;
        };
        let Some(stadium) = d.stadiums.get(&m.stadium) else {
            warnings.push(format!(
                "season {} round {}: unknown stadium {}, skipped",
                m.season, m.round, m.stadium
            ));
            continue;
        };

        for (focal, opponent) in [(home, away), (away, home)] {
            let venue = venue_class(m, focal, opponent).expect("participants verified");
            let is_focal_listed_home = focal.id == m.home_team;
            let emit = match venue {
                VenueClass::Home => true,
                VenueClass::Away => opts.include_away,
                VenueClass::Neutral => false,
            };

            // Travel bookkeeping happens for every match the team plays,
            // regardless of whether an observation is emitted for it.
            let prev_entry =
                prev.insert((focal.id.clone(), m.season), (m.date, stadium.city.clone()));

            if !emit {
                continue;
            }

            let label = if venue == VenueClass::Home {
                let (gf, ga) = if is_focal_listed_home {
                    (m.goals_home, m.goals_away)
                } else {
                    (m.goals_away, m.goals_home)
                };
                gf > ga
            } else {
                // Away observations carry the dependent variable's negative
                // class by definition: no home win happened for this side.
                false
            };

            let fatigue_input = prev_entry
                .as_ref()
                .map(|(date, city)| (city.as_str(), date.days_until(m.date)));
            let fatigue_result = match fatigue_input {
                None => fatigue(None, &stadium.city, 1, gazetteer),
                Some((city, rest)) => fatigue(Some(city), &stadium.city, rest, gazetteer),
            };
            let (fatigue_value, fatigue_no_prior) = match fatigue_result {
                Ok(v) => v,
                Err(e) => {
                    warnings.push(format!(
                        "season {} round {} {}: dropped: {e}",
                        m.season, m.round, focal.id
                    ));
                    continue;
                }
            };

            let (density_value, overflow) = match density(m.attendance, stadium.capacity) {
                Ok(v) => v,
                Err(e) => {
                    warnings.push(format!(
                        "season {} round {} {}: dropped: {e}",
                        m.season, m.round, focal.id
                    ));
                    continue;
                }
            };
            if overflow {
                warnings.push(format!(
                    "season {} round {} {}: attendance {} exceeds capacity {}, density clamped",
                    m.season, m.round, focal.id, m.attendance, stadium.capacity
                ));
            }

            let (q_focal, q_opponent) = match (q.get(&focal.id), q.get(&opponent.id)) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    warnings.push(format!(
                        "season {} round {} {}: dropped: missing quality",
                        m.season, m.round, focal.id
                    ));
                    continue;
                }
            };
            let rtq = match classify_rtq(q_focal, q_opponent, opts.rtq_bounds) {
                Ok(r) => r,
                Err(e) => {
                    warnings.push(format!(
                        "season {} round {} {}: dropped: {e}",
                        m.season, m.round, focal.id
                    ));
                    continue;
                }
            };

            let (red_f, red_o, fouls_f, fouls_o, coach) = if is_focal_listed_home {
                (
                    m.red_home,
                    m.red_away,
                    m.fouls_home,
                    m.fouls_away,
                    &m.coach_home,
                )
            } else {
                (
                    m.red_away,
                    m.red_home,
                    m.fouls_away,
                    m.fouls_home,
                    &m.coach_away,
                )
            };

            observations.push(Observation {
                focal_team: focal.id.clone(),
                opponent: opponent.id.clone(),
                season: m.season,
                round: m.round,
                label,
                fatigue: fatigue_value,
                fatigue_no_prior,
                density: density_value,
                own_fan_share: focal.fan_share,
                adv_fan_share: opponent.fan_share,
                red_card_balance: red_card_balance(red_f, red_o),
                fouls: fouls_f,
                adv_fouls: fouls_o,
                coach: coach_key(coach),
                rtq,
            });
        }
    }
    (observations, warnings)
}

/// Flat CSV export of the observation set in design-matrix column order.
pub fn observations_to_csv(
    observations: &[Observation],
    covariates: &[Covariate],
    coach_columns: &[String],
) -> String {
    let mut out = String::from("focal_team,opponent,season,round,label");
    for c in covariates {
        let _ = write!(out, ",{}", c.name());
    }
    for coach in coach_columns {
        let _ = write!(out, ",coach:{coach}");
    }
    out.push('\n');
    for obs in observations {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            obs.focal_team,
            obs.opponent,
            obs.season,
            obs.round,
            u8::from(obs.label)
        );
        for c in covariates {
            let _ = write!(out, ",{}", c.extract(obs));
        }
        for coach in coach_columns {
            let _ = write!(out, ",{}", u8::from(obs.coach == *coach));
        }
        out.push('\n');
    }
    out
}
