//! Core vocabulary: teams, stadiums, matches, and the outcome/points/venue
//! derivations everything else is built on.
//!
//! All types here are immutable values and safe to share across threads.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DataError;

/// Identifier of a team, unique within one dataset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TeamId(pub String);

impl fmt::Display for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TeamId {
    fn from(s: &str) -> Self {
        TeamId(s.to_owned())
    }
}

/// Identifier of a stadium, unique within one dataset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StadiumId(pub String);

impl fmt::Display for StadiumId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for StadiumId {
    fn from(s: &str) -> Self {
        StadiumId(s.to_owned())
    }
}

/// Calendar date in the proleptic Gregorian calendar, ISO-8601 `YYYY-MM-DD`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    pub year: i32,
    pub month: u32,
    pub day: u32,
}

impl Date {
    pub fn new(year: i32, month: u32, day: u32) -> Option<Date> {
        if !(1..=12).contains(&month) || day < 1 || day > days_in_month(year, month) {
            return None;
        }
        Some(Date { year, month, day })
    }

    /// Strict `YYYY-MM-DD` parse; rejects impossible calendar dates.
    pub fn parse(s: &str) -> Option<Date> {
        let bytes = s.as_bytes();
        if bytes.len() != 10 || bytes[4] != b'-' || bytes[7] != b'-' {
            return None;
        }
        let year: i32 = s[0..4].parse().ok()?;
        let month: u32 = s[5..7].parse().ok()?;
        let day: u32 = s[8..10].parse().ok()?;
        Date::new(year, month, day)
    }

    /// Days since 1970-01-01 (civil-day count; negative before the epoch).
    pub fn days_from_epoch(self) -> i64 {
        let y = i64::from(self.year) - i64::from(self.month <= 2);
        let era = y.div_euclid(400);
        let yoe = y - era * 400;
        let mp = (i64::from(self.month) + 9) % 12;
        let doy = (153 * mp + 2) / 5 + i64::from(self.day) - 1;
        let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        era * 146_097 + doe - 719_468
    }

    /// Inverse of [`Date::days_from_epoch`].
    pub fn from_days_from_epoch(days: i64) -> Date {
        let z = days + 719_468;
        let era = z.div_euclid(146_097);
        let doe = z - era * 146_097;
        let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
        let y = yoe + era * 400;
        let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        let mp = (5 * doy + 2) / 153;
        let day = (doy - (153 * mp + 2) / 5 + 1) as u32;
        let month = ((mp + 2) % 12 + 1) as u32;
        let year = (y + i64::from(month <= 2)) as i32;
        Date { year, month, day }
    }

    /// Signed whole days from `self` to `other`.
    pub fn days_until(self, other: Date) -> i64 {
        other.days_from_epoch() - self.days_from_epoch()
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        2 => 28,
        _ => 0,
    }
}

fn is_leap(year: i32) -> bool {
    year % 4 == 0 && (year % 100 != 0 || year % 400 == 0)
}

/// A club: identity, home city, registered home ground, national fan share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamRef {
    pub id: TeamId,
    pub name: String,
    pub home_city: String,
    pub home_stadium: StadiumId,
    /// Fraction of the national supporter base, in `[0, 1]`.
    pub fan_share: f64,
}

/// A ground: location and seating capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stadium {
    pub id: StadiumId,
    pub name: String,
    pub city: String,
    pub capacity: u32,
    pub latitude: f64,
    pub longitude: f64,
}

/// One fixture with everything the covariates need.
#[derive(Debug, Clone, PartialEq)]
pub struct Match {
    pub season: i32,
    pub round: u32,
    pub date: Date,
    pub home_team: TeamId,
    pub away_team: TeamId,
    pub stadium: StadiumId,
    pub goals_home: u32,
    pub goals_away: u32,
    pub attendance: u32,
    pub yellow_home: u32,
    pub yellow_away: u32,
    pub red_home: u32,
    pub red_away: u32,
    pub fouls_home: u32,
    pub fouls_away: u32,
    pub coach_home: String,
    pub coach_away: String,
}

/// Result of a match from the fixture's (home, away) perspective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchOutcome {
    HomeWin,
    Draw,
    AwayWin,
}

/// Which listed side of a fixture a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Home,
    Away,
}

/// Venue relative to a focal team: its own ground, the opponent's, or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VenueClass {
    Home,
    Away,
    Neutral,
}

pub fn match_outcome(m: &Match) -> MatchOutcome {
    use std::cmp::Ordering::*;
    match m.goals_home.cmp(&m.goals_away) {
        Greater => MatchOutcome::HomeWin,
        Equal => MatchOutcome::Draw,
        Less => MatchOutcome::AwayWin,
    }
}

/// League points a side earns from an outcome: 3 for a win, 1 for a draw, 0 for a loss.
pub fn points_for(outcome: MatchOutcome, side: Side) -> u32 {
    match (outcome, side) {
        (MatchOutcome::HomeWin, Side::Home) | (MatchOutcome::AwayWin, Side::Away) => 3,
        (MatchOutcome::Draw, _) => 1,
        _ => 0,
    }
}

/// Classifies the venue for `focal`, given both participants' registered grounds.
///
/// A match is Home for `focal` only when played at its own registered ground,
/// Away when played at the opponent's, Neutral anywhere else — including a
/// club hosting at a borrowed stadium.
pub fn venue_class(
    m: &Match,
    focal: &TeamRef,
    opponent: &TeamRef,
) -> Result<VenueClass, DataError> {
    let pair_ok = (focal.id == m.home_team && opponent.id == m.away_team)
        || (focal.id == m.away_team && opponent.id == m.home_team);
    if !pair_ok {
        return Err(DataError::ParticipantMismatch(focal.id.to_string()));
    }
    if m.stadium == focal.home_stadium {
        Ok(VenueClass::Home)
    } else if m.stadium == opponent.home_stadium {
        Ok(VenueClass::Away)
    } else {
        Ok(VenueClass::Neutral)
    }
}

/// Normalized coach key: trimmed, case-folded. Coaches are keyed by name only.
pub fn coach_key(name: &str) -> String {
    name.trim().to_lowercase()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn team(id: &str, stadium: &str) -> TeamRef {
        TeamRef {
            id: id.into(),
            name: id.to_uppercase(),
            home_city: format!("{id}-city"),
            home_stadium: stadium.into(),
            fan_share: 0.1,
        }
    }

    fn fixture(stadium: &str, goals_home: u32, goals_away: u32) -> Match {
        Match {
            season: 2010,
            round: 1,
            date: Date::parse("2010-05-09").unwrap(),
            home_team: "a".into(),
            away_team: "b".into(),
            stadium: stadium.into(),
            goals_home,
            goals_away,
            attendance: 10_000,
            yellow_home: 1,
            yellow_away: 2,
            red_home: 0,
            red_away: 0,
            fouls_home: 12,
            fouls_away: 14,
            coach_home: "Coach A".into(),
            coach_away: "Coach B".into(),
        }
    }

    #[test]
    fn outcome_from_scores() {
        assert_eq!(match_outcome(&fixture("s1", 2, 1)), MatchOutcome::HomeWin);
        assert_eq!(match_outcome(&fixture("s1", 0, 0)), MatchOutcome::Draw);
        assert_eq!(match_outcome(&fixture("s1", 1, 3)), MatchOutcome::AwayWin);
    }

    #[test]
    fn points_per_regulation() {
        assert_eq!(points_for(MatchOutcome::HomeWin, Side::Home), 3);
        assert_eq!(points_for(MatchOutcome::Draw, Side::Away), 1);
        assert_eq!(points_for(MatchOutcome::HomeWin, Side::Away), 0);
        assert_eq!(points_for(MatchOutcome::AwayWin, Side::Away), 3);
    }

    #[test]
    fn venue_classification() {
        let a = team("a", "s1");
        let b = team("b", "s2");
        let at_own = fixture("s1", 1, 0);
        assert_eq!(venue_class(&at_own, &a, &b).unwrap(), VenueClass::Home);
        assert_eq!(venue_class(&at_own, &b, &a).unwrap(), VenueClass::Away);
        let at_third = fixture("s3", 1, 0);
        assert_eq!(venue_class(&at_third, &a, &b).unwrap(), VenueClass::Neutral);
        assert_eq!(venue_class(&at_third, &b, &a).unwrap(), VenueClass::Neutral);

        let c = team("c", "s9");
        assert!(matches!(
            venue_class(&at_own, &c, &b),
            Err(DataError::ParticipantMismatch(_))
        ));
    }

    #[test]
    fn borrowed_ground_is_neutral() {
        // "Home" fixture hosted at a third club's stadium classifies Neutral.
        let a = team("a", "s1");
        let b = team("b", "s2");
        let borrowed = fixture("s7", 2, 2);
        assert_eq!(venue_class(&borrowed, &a, &b).unwrap(), VenueClass::Neutral);
    }

    #[test]
    fn coach_keys_fold_case_and_space() {
        assert_eq!(coach_key("  Abel Braga "), "abel braga");
        assert_eq!(coach_key("ABEL BRAGA"), coach_key("abel braga"));
    }

    #[test]
    fn date_parse_and_format() {
        let d = Date::parse("2012-02-29").unwrap();
        assert_eq!(d.to_string(), "2012-02-29");
        assert!(Date::parse("2011-02-29").is_none());
        assert!(Date::parse("2011-13-01").is_none());
        assert!(Date::parse("2011-1-01").is_none());
        assert_eq!(Date::parse("1970-01-01").unwrap().days_from_epoch(), 0);
    }

    #[test]
    fn date_day_arithmetic() {
        let a = Date::parse("2003-12-28").unwrap();
        let b = Date::parse("2004-01-04").unwrap();
        assert_eq!(a.days_until(b), 7);
        assert_eq!(b.days_until(a), -7);
    }

    proptest! {
        #[test]
        fn outcomes_exhaustive_and_exclusive(gh in 0u32..30, ga in 0u32..30) {
            let m = fixture("s1", gh, ga);
            let o = match_outcome(&m);
            prop_assert_eq!(o == MatchOutcome::HomeWin, gh > ga);
            prop_assert_eq!(o == MatchOutcome::Draw, gh == ga);
            prop_assert_eq!(o == MatchOutcome::AwayWin, gh < ga);
        }

        #[test]
        fn points_sum_is_two_or_three(gh in 0u32..30, ga in 0u32..30) {
            let o = match_outcome(&fixture("s1", gh, ga));
            let total = points_for(o, Side::Home) + points_for(o, Side::Away);
            prop_assert!(total == 2 || total == 3);
            prop_assert_eq!(total == 2, gh == ga);
        }

        #[test]
        fn neutrality_is_symmetric(stadium in "s[1-9]") {
            let a = team("a", "s1");
            let b = team("b", "s2");
            let m = fixture(&stadium, 1, 1);
            let fa = venue_class(&m, &a, &b).unwrap();
            let fb = venue_class(&m, &b, &a).unwrap();
            prop_assert_eq!(fa == VenueClass::Neutral, fb == VenueClass::Neutral);
        }

        #[test]
        fn date_roundtrips_through_epoch_days(days in -30_000i64..40_000) {
            let d = Date::from_days_from_epoch(days);
            prop_assert_eq!(d.days_from_epoch(), days);
            let reparsed = Date::parse(&d.to_string()).unwrap();
            prop_assert_eq!(reparsed, d);
        }
    }
}
