//! Home-advantage measurement: the win-rate difference index, the points-share
//! index, long-run team quality, relative-quality classification, and the
//! three descending rankings built from them.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::domain::{match_outcome, points_for, MatchOutcome, Side, TeamId, TeamRef, VenueClass};
use crate::error::DataError;
use crate::ingest::Dataset;

/// A team's tallies split by venue.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HomeAwayRecord {
    pub wins_home: u32,
    pub games_home: u32,
    pub draws_home: u32,
    pub wins_away: u32,
    pub games_away: u32,
    pub draws_away: u32,
}

/// Win-rate difference in percentage points: home win rate minus away win rate.
///
/// Positive means home advantage, zero none, negative an away advantage.
pub fn ha_per_wins(r: &HomeAwayRecord) -> Result<f64, DataError> {
    if r.games_home == 0 || r.games_away == 0 {
        return Err(DataError::UndefinedRatio(
            "win-rate difference needs games on both venues",
        ));
    }
    let home_rate = f64::from(r.wins_home) / f64::from(r.games_home);
    let away_rate = f64::from(r.wins_away) / f64::from(r.games_away);
    Ok((home_rate - away_rate) * 100.0)
}

/// Share of league points earned at home, as a percentage. 50 means no advantage.
pub fn ha_per_points(r: &HomeAwayRecord) -> Result<f64, DataError> {
    let home_points = f64::from(3 * r.wins_home + r.draws_home);
    let away_points = f64::from(3 * r.wins_away + r.draws_away);
    let total = home_points + away_points;
    if total == 0.0 {
        return Err(DataError::UndefinedRatio(
            "points share needs at least one point earned",
        ));
    }
    Ok(home_points / total * 100.0)
}

/// Long-run quality: total points won over total points disputed, as a percentage.
///
/// `per_season` holds `(points_won, points_disputed)` pairs, one per season
/// inside the configured window; seasons a club did not play simply do not
/// appear.
pub fn team_quality(per_season: &[(u32, u32)]) -> Result<f64, DataError> {
    let won: u64 = per_season.iter().map(|&(w, _)| u64::from(w)).sum();
    let disputed: u64 = per_season.iter().map(|&(_, d)| u64::from(d)).sum();
    if per_season.is_empty() || disputed == 0 {
        return Err(DataError::UndefinedQuality("no points disputed in window"));
    }
    if per_season.iter().any(|&(w, d)| w > d) {
        return Err(DataError::UndefinedQuality(
            "points won exceed points disputed",
        ));
    }
    Ok(won as f64 / disputed as f64 * 100.0)
}

/// Relative technical quality band of a focal team versus its opponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum RtqBand {
    Inferior,
    Same,
    Superior,
}

impl std::fmt::Display for RtqBand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RtqBand::Inferior => "inferior",
            RtqBand::Same => "same",
            RtqBand::Superior => "superior",
        })
    }
}

/// Quality-ratio band classification with the underlying ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rtq {
    pub band: RtqBand,
    pub ratio: f64,
}

/// Inclusive band bounds for the "same quality" classification.
///
/// The default band `[0.9, 1.1]` is deliberately not symmetric under
/// inversion: a ratio in `(1.1, 1/0.9]` classifies Superior while its inverse
/// classifies Same. That sliver is the definition's own shape, kept as is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RtqBounds {
    pub lower: f64,
    pub upper: f64,
}

impl Default for RtqBounds {
    fn default() -> Self {
        RtqBounds {
            lower: 0.9,
            upper: 1.1,
        }
    }
}

/// Classify the focal team's quality against the opponent's. Bounds inclusive.
pub fn classify_rtq(q_focal: f64, q_opponent: f64, bounds: RtqBounds) -> Result<Rtq, DataError> {
    if q_opponent <= 0.0 || !q_opponent.is_finite() || !q_focal.is_finite() {
        return Err(DataError::UndefinedRatio(
            "opponent quality must be positive",
        ));
    }
    let ratio = q_focal / q_opponent;
    let band = if ratio < bounds.lower {
        RtqBand::Inferior
    } else if ratio > bounds.upper {
        RtqBand::Superior
    } else {
        RtqBand::Same
    };
    Ok(Rtq { band, ratio })
}

/// Per-team long-run quality over a season window.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityTable {
    q: BTreeMap<TeamId, f64>,
    pub window: (i32, i32),
    pub warnings: Vec<String>,
}

impl QualityTable {
    /// Compute each team's quality from every non-neutral match inside the window.
    ///
    /// A team with no matches in the window gets no entry (and a warning),
    /// mirroring how relegated seasons contribute nothing.
    pub fn from_dataset(d: &Dataset, window: (i32, i32)) -> QualityTable {
        let mut per_season: BTreeMap<TeamId, BTreeMap<i32, (u32, u32)>> = BTreeMap::new();
        for m in &d.matches {
            if m.season < window.0 || m.season > window.1 {
                continue;
            }
            let outcome = match_outcome(m);
            for (team, side) in [(&m.home_team, Side::Home), (&m.away_team, Side::Away)] {
                let entry = per_season
                    .entry(team.clone())
                    .or_default()
                    .entry(m.season)
                    .or_insert((0, 0));
                entry.0 += points_for(outcome, side);
                entry.1 += 3;
            }
        }
        let mut q = BTreeMap::new();
        let mut warnings = Vec::new();
        for id in d.teams.keys() {
            let seasons: Vec<(u32, u32)> = per_season
                .get(id)
                .map(|by_season| by_season.values().copied().collect())
                .unwrap_or_default();
            match team_quality(&seasons) {
                Ok(quality) => {
                    q.insert(id.clone(), quality);
                }
                Err(_) => warnings.push(format!(
                    "team {id} has no matches in quality window {}..={}",
                    window.0, window.1
                )),
            }
        }
        QualityTable {
            q,
            window,
            warnings,
        }
    }

    pub fn with_entries(
        entries: impl IntoIterator<Item = (TeamId, f64)>,
        window: (i32, i32),
    ) -> Self {
        QualityTable {
            q: entries.into_iter().collect(),
            window,
            warnings: Vec::new(),
        }
    }

    pub fn get(&self, team: &TeamId) -> Option<f64> {
        self.q.get(team).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TeamId, f64)> {
        self.q.iter().map(|(id, &q)| (id, q))
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }
}

/// Tally a team's venue-split record over a dataset.
///
/// Venue is classified per match from registered grounds; neutral fixtures
/// count toward neither side.
pub fn team_record(d: &Dataset, focal: &TeamRef) -> HomeAwayRecord {
    let mut r = HomeAwayRecord::default();
    for m in &d.matches {
        let (opponent_id, is_listed_home) = if m.home_team == focal.id {
            (&m.away_team, true)
        } else if m.away_team == focal.id {
            (&m.home_team, false)
        } else {
            continue;
        };
        let Some(opponent) = d.teams.get(opponent_id) else {
            continue;
        };
        let venue = crate::domain::venue_class(m, focal, opponent).expect("focal participates");
        let outcome = match_outcome(m);
        let won = matches!(
            (outcome, is_listed_home),
            (MatchOutcome::HomeWin, true) | (MatchOutcome::AwayWin, false)
        );
        let drew = outcome == MatchOutcome::Draw;
        match venue {
            VenueClass::Home => {
                r.games_home += 1;
                r.wins_home += u32::from(won);
                r.draws_home += u32::from(drew);
            }
            VenueClass::Away => {
                r.games_away += 1;
                r.wins_away += u32::from(won);
                r.draws_away += u32::from(drew);
            }
            VenueClass::Neutral => {}
        }
    }
    r
}

/// Pooled venue-perspective tallies over every non-neutral match: each match
/// contributes one home game and one away game to the league record.
pub fn league_record(d: &Dataset) -> HomeAwayRecord {
    let mut r = HomeAwayRecord::default();
    for m in &d.matches {
        let Some(home) = d.teams.get(&m.home_team) else {
            continue;
        };
        let Some(away) = d.teams.get(&m.away_team) else {
            continue;
        };
        // The venue-home side is whichever participant owns the ground.
        let host_is_listed_home = m.stadium == home.home_stadium;
        if !host_is_listed_home && m.stadium != away.home_stadium {
            continue;
        }
        let outcome = match_outcome(m);
        let host_won = matches!(
            (outcome, host_is_listed_home),
            (MatchOutcome::HomeWin, true) | (MatchOutcome::AwayWin, false)
        );
        let drew = outcome == MatchOutcome::Draw;
        r.games_home += 1;
        r.games_away += 1;
        r.wins_home += u32::from(host_won);
        r.wins_away += u32::from(!host_won && !drew);
        r.draws_home += u32::from(drew);
        r.draws_away += u32::from(drew);
    }
    r
}

/// One row of a descending ranking.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedRow {
    pub team: TeamId,
    pub name: String,
    pub value: f64,
}

/// The three rankings: HA per wins, HA per points, and quality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rankings {
    pub per_wins: Vec<RankedRow>,
    pub per_points: Vec<RankedRow>,
    pub quality: Vec<RankedRow>,
    pub warnings: Vec<String>,
}

fn sort_descending(rows: &mut [RankedRow]) {
    rows.sort_by(|a, b| {
        b.value
            .partial_cmp(&a.value)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.name.cmp(&b.name))
    });
}

/// Build all three rankings, descending, ties broken alphabetically by name.
///
/// Teams lacking a defined index or quality are excluded with a warning.
pub fn build_rankings(d: &Dataset, q: &QualityTable) -> Rankings {
    let mut per_wins = Vec::new();
    let mut per_points = Vec::new();
    let mut quality = Vec::new();
    let mut warnings = q.warnings.clone();
    for team in d.teams.values() {
        let record = team_record(d, team);
        match ha_per_wins(&record) {
            Ok(v) => per_wins.push(RankedRow {
                team: team.id.clone(),
                name: team.name.clone(),
                value: v,
            }),
            Err(e) => warnings.push(format!("{}: excluded from wins ranking: {e}", team.name)),
        }
        match ha_per_points(&record) {
            Ok(v) => per_points.push(RankedRow {
                team: team.id.clone(),
                name: team.name.clone(),
                value: v,
            }),
            Err(e) => warnings.push(format!("{}: excluded from points ranking: {e}", team.name)),
        }
        match q.get(&team.id) {
            Some(v) => quality.push(RankedRow {
                team: team.id.clone(),
                name: team.name.clone(),
                value: v,
            }),
            None => warnings.push(format!(
                "{}: excluded from quality ranking: no quality",
                team.name
            )),
        }
    }
    sort_descending(&mut per_wins);
    sort_descending(&mut per_points);
    sort_descending(&mut quality);
    Rankings {
        per_wins,
        per_points,
        quality,
        warnings,
    }
}

impl Rankings {
    /// JSON with stable key order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rankings serialize")
    }

    /// Flat CSV: one row per rank position across the three rankings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ranking,rank,team,name,value\n");
        for (label, rows) in [
            ("ha_per_wins", &self.per_wins),
            ("ha_per_points", &self.per_points),
            ("quality", &self.quality),
        ] {
            for (i, row) in rows.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{label},{},{},{},{:.4}",
                    i + 1,
                    row.team,
                    row.name,
                    row.value
                );
            }
        }
        out
    }

    /// Aligned three-ranking table, one rank per line.
    pub fn to_text(&self) -> String {
        let n = self
            .per_wins
            .len()
            .max(self.per_points.len())
            .max(self.quality.len());
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>3}  {:<22} {:>8}  {:<22} {:>8}  {:<22} {:>8}",
            "#", "Team", "HA wins", "Team", "HA pts", "Team", "Quality"
        );
        for i in 0..n {
            let cell = |rows: &Vec<RankedRow>| -> (String, String) {
                rows.get(i)
                    .map(|r| (r.name.clone(), format!("{:.2}", r.value)))
                    .unwrap_or_default()
            };
            let (w_name, w_val) = cell(&self.per_wins);
            let (p_name, p_val) = cell(&self.per_points);
            let (q_name, q_val) = cell(&self.quality);
            let _ = writeln!(
                out,
                "{:>3}  {:<22} {:>8}  {:<22} {:>8}  {:<22} {:>8}",
                i + 1,
                w_name,
                w_val,
                p_name,
                p_val,
                q_name,
                q_val
            );
        }
        out
    }
}
