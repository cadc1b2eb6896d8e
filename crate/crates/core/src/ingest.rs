//! Flat-file ingestion: parse and validate matches, teams, stadiums, and a
//! city gazetteer into an immutable [`Dataset`].
//!
//! Malformed rows are rejected with a reason, never repaired. Every rejection
//! is itemized in the [`IngestReport`]; nothing is dropped silently.
//!
//! Expected CSV schemas (header required, exact column names, any order):
//!
//! - `matches.csv`: season,round,date,home_team,away_team,stadium,goals_home,
//!   goals_away,attendance,yellow_home,yellow_away,red_home,red_away,
//!   fouls_home,fouls_away,coach_home,coach_away (date is ISO-8601)
//! - `teams.csv`: id,name,home_city,home_stadium,fan_share
//! - `stadiums.csv`: id,name,city,capacity,latitude,longitude
//! - `gazetteer.csv`: city,latitude,longitude

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::domain::{Date, Match, Stadium, StadiumId, TeamId, TeamRef};
use crate::error::DataError;
use crate::geo::haversine_km;

pub const MATCH_COLUMNS: &[&str] = &[
    "season",
    "round",
    "date",
    "home_team",
    "away_team",
    "stadium",
    "goals_home",
    "goals_away",
    "attendance",
    "yellow_home",
    "yellow_away",
    "red_home",
    "red_away",
    "fouls_home",
    "fouls_away",
    "coach_home",
    "coach_away",
];
pub const TEAM_COLUMNS: &[&str] = &["id", "name", "home_city", "home_stadium", "fan_share"];
pub const STADIUM_COLUMNS: &[&str] = &["id", "name", "city", "capacity", "latitude", "longitude"];
pub const GAZETTEER_COLUMNS: &[&str] = &["city", "latitude", "longitude"];

/// A validated, chronologically sorted collection of matches plus the team
/// and stadium tables they reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub teams: BTreeMap<TeamId, TeamRef>,
    pub stadiums: BTreeMap<StadiumId, Stadium>,
    /// Sorted by (season, date, round, home, away).
    pub matches: Vec<Match>,
    pub provenance: Vec<FileDigest>,
}

/// FNV-1a 64-bit digest of a source file, recorded for provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub file: String,
    pub fnv1a64: String,
}

/// One rejected or suspicious row and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowWarning {
    pub file: String,
    /// 1-based data-row number (header excluded); 0 for file-level warnings.
    pub row: usize,
    pub reason: String,
}

/// Counts and itemized warnings from one ingestion pass.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_accepted: usize,
    pub rows_rejected: usize,
    pub neutral_excluded: usize,
    pub warnings: Vec<RowWarning>,
}

impl IngestReport {
    /// JSON rendering with stable key order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    fn reject(&mut self, file: &str, row: usize, reason: impl Into<String>) {
        self.rows_rejected += 1;
        self.warnings.push(RowWarning {
            file: file.to_owned(),
            row,
            reason: reason.into(),
        });
    }

    fn warn(&mut self, file: &str, row: usize, reason: impl Into<String>) {
        self.warnings.push(RowWarning {
            file: file.to_owned(),
            row,
            reason: reason.into(),
        });
    }
}

/// City centroid lookup. Keys are trimmed and case-folded.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Gazetteer {
    cities: BTreeMap<String, (f64, f64)>,
}

impl Gazetteer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, city: &str, latitude: f64, longitude: f64) -> bool {
        self.cities
            .insert(normalize_city(city), (latitude, longitude))
            .is_none()
    }

    pub fn coords(&self, city: &str) -> Option<(f64, f64)> {
        self.cities.get(&normalize_city(city)).copied()
    }

    pub fn len(&self) -> usize {
        self.cities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cities.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &(f64, f64))> {
        self.cities.iter()
    }
}

pub fn normalize_city(city: &str) -> String {
    city.trim().to_lowercase()
}

/// Great-circle distance in km between two gazetteer cities.
pub fn travel_distance_km(
    from_city: &str,
    to_city: &str,
    gazetteer: &Gazetteer,
) -> Result<f64, DataError> {
    let (lat1, lon1) = gazetteer
        .coords(from_city)
        .ok_or_else(|| DataError::MissingGazetteerEntry(from_city.to_owned()))?;
    let (lat2, lon2) = gazetteer
        .coords(to_city)
        .ok_or_else(|| DataError::MissingGazetteerEntry(to_city.to_owned()))?;
    Ok(haversine_km(lat1, lon1, lat2, lon2))
}

fn fnv1a64(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

fn read_file(path: &Path) -> Result<Vec<u8>, DataError> {
    std::fs::read(path).map_err(|source| DataError::Io {
        path: path.to_owned(),
        source,
    })
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Column-name → index mapping; requires exactly the expected names.
struct Header {
    index: Vec<usize>,
}

impl Header {
    fn resolve(
        file: &str,
        record: &csv::StringRecord,
        expected: &[&str],
    ) -> Result<Self, DataError> {
        let found: Vec<&str> = record.iter().map(str::trim).collect();
        let mut index = Vec::with_capacity(expected.len());
        let bad = || DataError::BadHeader {
            file: file.to_owned(),
            expected: expected.join(","),
        };
        if found.len() != expected.len() {
            return Err(bad());
        }
        for name in expected {
            let pos = found.iter().position(|f| f == name).ok_or_else(bad)?;
            index.push(pos);
        }
        Ok(Header { index })
    }

    fn get<'r>(&self, record: &'r csv::StringRecord, col: usize) -> &'r str {
        record.get(self.index[col]).unwrap_or("").trim()
    }
}

struct CsvFile {
    label: String,
    digest: FileDigest,
    header: Header,
    records: Vec<csv::StringRecord>,
}

fn read_csv(path: &Path, expected: &[&str]) -> Result<CsvFile, DataError> {
    let bytes = read_file(path)?;
    let label = file_label(path);
    let digest = FileDigest {
        file: label.clone(),
        fnv1a64: fnv1a64(&bytes),
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes.as_slice());
    let header = match reader.headers() {
        Ok(h) => Header::resolve(&label, h, expected)?,
        Err(_) => {
            return Err(DataError::BadHeader {
                file: label,
                expected: expected.join(","),
            })
        }
    };
    let mut records = Vec::new();
    for rec in reader.records() {
        // A structurally broken record (e.g. unbalanced quotes) still counts
        // as a read row; represent it as an empty record so validation
        // rejects it with a reason.
        records.push(rec.unwrap_or_default());
    }
    Ok(CsvFile {
        label,
        digest,
        header,
        records,
    })
}

fn parse_count(field: &str, what: &str) -> Result<u32, String> {
    let v: i64 = field
        .parse()
        .map_err(|_| format!("malformed {what}: {field:?}"))?;
    if v < 0 {
        return Err(format!("negative {what}"));
    }
    u32::try_from(v).map_err(|_| format!("{what} out of range"))
}

fn parse_fraction(field: &str, what: &str) -> Result<f64, String> {
    let v: f64 = field
        .parse()
        .map_err(|_| format!("malformed {what}: {field:?}"))?;
    if !v.is_finite() || !(0.0..=1.0).contains(&v) {
        return Err(format!("{what} outside [0, 1]"));
    }
    Ok(v)
}

/// Load and cross-validate the three data files.
///
/// Rejected rows are counted and itemized in the report; the returned
/// [`Dataset`] satisfies all its invariants. Neutral-venue matches are kept —
/// apply [`exclude_neutral`] separately.
pub fn load_dataset(
    match_file: &Path,
    team_file: &Path,
    stadium_file: &Path,
) -> Result<(Dataset, IngestReport), DataError> {
    let stadium_csv = read_csv(stadium_file, STADIUM_COLUMNS)?;
    let team_csv = read_csv(team_file, TEAM_COLUMNS)?;
    let match_csv = read_csv(match_file, MATCH_COLUMNS)?;

    let mut report = IngestReport {
        rows_read: stadium_csv.records.len() + team_csv.records.len() + match_csv.records.len(),
        ..Default::default()
    };

    let stadiums = load_stadiums(&stadium_csv, &mut report);
    let teams = load_teams(&team_csv, &stadiums, &mut report);
    let matches = load_matches(&match_csv, &teams, &stadiums, &mut report);

    let dataset = Dataset {
        teams,
        stadiums,
        matches,
        provenance: vec![match_csv.digest, team_csv.digest, stadium_csv.digest],
    };
    Ok((dataset, report))
}

fn load_stadiums(csv: &CsvFile, report: &mut IngestReport) -> BTreeMap<StadiumId, Stadium> {
    let mut stadiums = BTreeMap::new();
    for (i, rec) in csv.records.iter().enumerate() {
        let row = i + 1;
        match parse_stadium(&csv.header, rec) {
            Ok(s) => {
                if stadiums.contains_key(&s.id) {
                    report.reject(&csv.label, row, format!("duplicate stadium id {}", s.id));
                } else {
                    stadiums.insert(s.id.clone(), s);
                    report.rows_accepted += 1;
                }
            }
            Err(reason) => report.reject(&csv.label, row, reason),
        }
    }
    stadiums
}

fn parse_stadium(h: &Header, rec: &csv::StringRecord) -> Result<Stadium, String> {
    if rec.len() < STADIUM_COLUMNS.len() {
        return Err(format!(
            "expected {} fields, found {}",
            STADIUM_COLUMNS.len(),
            rec.len()
        ));
    }
    let id = h.get(rec, 0);
    let name = h.get(rec, 1);
    let city = h.get(rec, 2);
    if id.is_empty() || name.is_empty() || city.is_empty() {
        return Err("empty id, name, or city".into());
    }
    let capacity: i64 = h
        .get(rec, 3)
        .parse()
        .map_err(|_| format!("malformed capacity: {:?}", h.get(rec, 3)))?;
    if capacity <= 0 {
        return Err("capacity must be positive".into());
    }
    let latitude: f64 = h
        .get(rec, 4)
        .parse()
        .map_err(|_| format!("malformed latitude: {:?}", h.get(rec, 4)))?;
    let longitude: f64 = h
        .get(rec, 5)
        .parse()
        .map_err(|_| format!("malformed longitude: {:?}", h.get(rec, 5)))?;
    if !(-90.0..=90.0).contains(&latitude) {
        return Err("latitude outside [-90, 90]".into());
    }
    if !(-180.0..=180.0).contains(&longitude) {
        return Err("longitude outside [-180, 180]".into());
    }
    Ok(Stadium {
        id: id.into(),
        name: name.to_owned(),
        city: city.to_owned(),
        capacity: capacity as u32,
        latitude,
        longitude,
    })
}

fn load_teams(
    csv: &CsvFile,
    stadiums: &BTreeMap<StadiumId, Stadium>,
    report: &mut IngestReport,
) -> BTreeMap<TeamId, TeamRef> {
    let mut teams = BTreeMap::new();
    for (i, rec) in csv.records.iter().enumerate() {
        let row = i + 1;
        match parse_team(&csv.header, rec) {
            Ok(t) => {
                if teams.contains_key(&t.id) {
                    report.reject(&csv.label, row, format!("duplicate team id {}", t.id));
                } else if !stadiums.contains_key(&t.home_stadium) {
                    report.reject(
                        &csv.label,
                        row,
                        format!("unknown home_stadium {}", t.home_stadium),
                    );
                } else {
                    teams.insert(t.id.clone(), t);
                    report.rows_accepted += 1;
                }
            }
            Err(reason) => report.reject(&csv.label, row, reason),
        }
    }
    let share_sum: f64 = teams.values().map(|t| t.fan_share).sum();
    if share_sum > 1.0 + 1e-9 {
        report.warn(
            &csv.label,
            0,
            format!("fan shares sum to {share_sum:.4}, exceeding 1"),
        );
    }
    teams
}

fn parse_team(h: &Header, rec: &csv::StringRecord) -> Result<TeamRef, String> {
    if rec.len() < TEAM_COLUMNS.len() {
        return Err(format!(
            "expected {} fields, found {}",
            TEAM_COLUMNS.len(),
            rec.len()
        ));
    }
    let id = h.get(rec, 0);
    let name = h.get(rec, 1);
    let home_city = h.get(rec, 2);
    let home_stadium = h.get(rec, 3);
    if id.is_empty() || name.is_empty() || home_city.is_empty() || home_stadium.is_empty() {
        return Err("empty id, name, home_city, or home_stadium".into());
    }
    let fan_share = parse_fraction(h.get(rec, 4), "fan_share")?;
    Ok(TeamRef {
        id: id.into(),
        name: name.to_owned(),
        home_city: home_city.to_owned(),
        home_stadium: home_stadium.into(),
        fan_share,
    })
}

fn load_matches(
    csv: &CsvFile,
    teams: &BTreeMap<TeamId, TeamRef>,
    stadiums: &BTreeMap<StadiumId, Stadium>,
    report: &mut IngestReport,
) -> Vec<Match> {
    let mut matches: Vec<Match> = Vec::new();
    let mut seen: BTreeSet<(i32, u32, TeamId, TeamId)> = BTreeSet::new();
    for (i, rec) in csv.records.iter().enumerate() {
        let row = i + 1;
        match parse_match(&csv.header, rec) {
            Ok(m) => {
                if !teams.contains_key(&m.home_team) {
                    report.reject(
                        &csv.label,
                        row,
                        format!("unknown home_team {}", m.home_team),
                    );
                } else if !teams.contains_key(&m.away_team) {
                    report.reject(
                        &csv.label,
                        row,
                        format!("unknown away_team {}", m.away_team),
                    );
                } else if !stadiums.contains_key(&m.stadium) {
                    report.reject(&csv.label, row, format!("unknown stadium {}", m.stadium));
                } else if !seen.insert((
                    m.season,
                    m.round,
                    m.home_team.clone(),
                    m.away_team.clone(),
                )) {
                    report.reject(
                        &csv.label,
                        row,
                        format!(
                            "duplicate fixture: season {} round {} {} vs {}",
                            m.season, m.round, m.home_team, m.away_team
                        ),
                    );
                } else {
                    matches.push(m);
                    report.rows_accepted += 1;
                }
            }
            Err(reason) => report.reject(&csv.label, row, reason),
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
    matches
}

fn parse_match(h: &Header, rec: &csv::StringRecord) -> Result<Match, String> {
    if rec.len() < MATCH_COLUMNS.len() {
        return Err(format!(
            "expected {} fields, found {}",
            MATCH_COLUMNS.len(),
            rec.len()
        ));
    }
    let season: i32 = h
        .get(rec, 0)
        .parse()
        .map_err(|_| format!("malformed season: {:?}", h.get(rec, 0)))?;
    let round = parse_count(h.get(rec, 1), "round")?;
    if round == 0 {
        return Err("round must be positive".into());
    }
    let date = Date::parse(h.get(rec, 2))
        .ok_or_else(|| format!("malformed date: {:?} (expected YYYY-MM-DD)", h.get(rec, 2)))?;
    if (date.year - season).abs() > 1 {
        return Err(format!("date {date} outside season {season} +/- 1"));
    }
    let home_team: TeamId = h.get(rec, 3).into();
    let away_team: TeamId = h.get(rec, 4).into();
    if home_team.0.is_empty() || away_team.0.is_empty() {
        return Err("empty team id".into());
    }
    if home_team == away_team {
        return Err("home and away team identical".into());
    }
    let stadium: StadiumId = h.get(rec, 5).into();
    if stadium.0.is_empty() {
        return Err("empty stadium id".into());
    }
    let goals_home = parse_count(h.get(rec, 6), "goals")?;
    let goals_away = parse_count(h.get(rec, 7), "goals")?;
    let attendance = parse_count(h.get(rec, 8), "attendance")?;
    let yellow_home = parse_count(h.get(rec, 9), "yellow cards")?;
    let yellow_away = parse_count(h.get(rec, 10), "yellow cards")?;
    let red_home = parse_count(h.get(rec, 11), "red cards")?;
    let red_away = parse_count(h.get(rec, 12), "red cards")?;
    let fouls_home = parse_count(h.get(rec, 13), "fouls")?;
    let fouls_away = parse_count(h.get(rec, 14), "fouls")?;
    let coach_home = h.get(rec, 15).to_owned();
    let coach_away = h.get(rec, 16).to_owned();
    if coach_home.is_empty() || coach_away.is_empty() {
        return Err("empty coach name".into());
    }
    Ok(Match {
        season,
        round,
        date,
        home_team,
        away_team,
        stadium,
        goals_home,
        goals_away,
        attendance,
        yellow_home,
        yellow_away,
        red_home,
        red_away,
        fouls_home,
        fouls_away,
        coach_home,
        coach_away,
    })
}

/// Load a gazetteer file; bad rows are returned as warnings, never dropped silently.
pub fn load_gazetteer(path: &Path) -> Result<(Gazetteer, Vec<RowWarning>), DataError> {
    let csv = read_csv(path, GAZETTEER_COLUMNS)?;
    let mut gazetteer = Gazetteer::new();
    let mut warnings = Vec::new();
    for (i, rec) in csv.records.iter().enumerate() {
        let row = i + 1;
        let city = csv.header.get(rec, 0);
        let reason = if rec.len() < GAZETTEER_COLUMNS.len() {
            Some(format!(
                "expected {} fields, found {}",
                GAZETTEER_COLUMNS.len(),
                rec.len()
            ))
        } else if city.is_empty() {
            Some("empty city".to_owned())
        } else {
            match (
                csv.header.get(rec, 1).parse::<f64>(),
                csv.header.get(rec, 2).parse::<f64>(),
            ) {
                (Ok(lat), Ok(lon))
                    if (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon) =>
                {
                    if gazetteer.insert(city, lat, lon) {
                        None
                    } else {
                        Some(format!("duplicate city {city:?}"))
                    }
                }
                _ => Some("malformed or out-of-range coordinates".to_owned()),
            }
        };
        if let Some(reason) = reason {
            warnings.push(RowWarning {
                file: csv.label.clone(),
                row,
                reason,
            });
        }
    }
    Ok((gazetteer, warnings))
}

/// Drop every match not held at a participant's registered ground.
///
/// Returns the filtered dataset and the number of matches removed.
/// Idempotent: a second application removes nothing.
pub fn exclude_neutral(d: &Dataset) -> (Dataset, usize) {
    let mut filtered = d.clone();
    let before = filtered.matches.len();
    filtered.matches.retain(|m| {
        let home_ground = d.teams.get(&m.home_team).map(|t| &t.home_stadium);
        let away_ground = d.teams.get(&m.away_team).map(|t| &t.home_stadium);
        home_ground == Some(&m.stadium) || away_ground == Some(&m.stadium)
    });
    let removed = before - filtered.matches.len();
    (filtered, removed)
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}

/// Serialize a dataset back to the ingest CSV schemas.
///
/// Returns `(filename, contents)` pairs for matches.csv, teams.csv, and
/// stadiums.csv. Output is deterministic: tables in key order, matches in
/// dataset order.
pub fn dataset_to_csv(d: &Dataset) -> Vec<(String, String)> {
    let mut matches = MATCH_COLUMNS.join(",") + "\n";
    for m in &d.matches {
        let _ = writeln!(
            matches,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            m.season,
            m.round,
            m.date,
            csv_escape(&m.home_team.0),
            csv_escape(&m.away_team.0),
            csv_escape(&m.stadium.0),
            m.goals_home,
            m.goals_away,
            m.attendance,
            m.yellow_home,
            m.yellow_away,
            m.red_home,
            m.red_away,
            m.fouls_home,
            m.fouls_away,
            csv_escape(&m.coach_home),
            csv_escape(&m.coach_away),
        );
    }
    let mut teams = TEAM_COLUMNS.join(",") + "\n";
    for t in d.teams.values() {
        let _ = writeln!(
            teams,
            "{},{},{},{},{}",
            csv_escape(&t.id.0),
            csv_escape(&t.name),
            csv_escape(&t.home_city),
            csv_escape(&t.home_stadium.0),
            t.fan_share,
        );
    }
    let mut stadiums = STADIUM_COLUMNS.join(",") + "\n";
    for s in d.stadiums.values() {
        let _ = writeln!(
            stadiums,
            "{},{},{},{},{},{}",
            csv_escape(&s.id.0),
            csv_escape(&s.name),
            csv_escape(&s.city),
            s.capacity,
            s.latitude,
            s.longitude,
        );
    }
    vec![
        ("matches.csv".to_owned(), matches),
        ("teams.csv".to_owned(), teams),
        ("stadiums.csv".to_owned(), stadiums),
    ]
}

/// Serialize a gazetteer to the ingest schema.
pub fn gazetteer_to_csv(g: &Gazetteer) -> String {
    let mut out = GAZETTEER_COLUMNS.join(",") + "\n";
    for (city, (lat, lon)) in g.iter() {
        let _ = writeln!(out, "{},{},{}", csv_escape(city), lat, lon);
    }
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use std::fs;
    use std::path::PathBuf;

    pub(crate) struct TempDir(PathBuf);

    impl TempDir {
        pub(crate) fn new(tag: &str) -> Self {
            let dir = std::env::temp_dir().join(format!(
                "homeadv-{tag}-{}-{}",
                std::process::id(),
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .unwrap()
                    .as_nanos()
            ));
            fs::create_dir_all(&dir).unwrap();
            TempDir(dir)
        }

        pub(crate) fn write(&self, name: &str, contents: &str) -> PathBuf {
            let p = self.0.join(name);
            fs::write(&p, contents).unwrap();
            p
        }

        pub(crate) fn path(&self) -> &Path {
            &self.0
        }
    }

    impl Drop for TempDir {
        fn drop(&mut self) {
            let _ = fs::remove_dir_all(&self.0);
        }
    }

    const STADIUMS: &str = "id,name,city,capacity,latitude,longitude\n\
        s1,Alpha Arena,alphaville,40000,-23.55,-46.63\n\
        s2,Beta Park,betatown,30000,-22.91,-43.17\n\
        s3,Gamma Field,gammaburg,20000,-19.92,-43.94\n";

    const TEAMS: &str = "id,name,home_city,home_stadium,fan_share\n\
        a,Alpha,alphaville,s1,0.2\n\
        b,Beta,betatown,s2,0.15\n";

    fn matches_csv(rows: &[&str]) -> String {
        let mut s = MATCH_COLUMNS.join(",") + "\n";
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    fn load(dir: &TempDir, matches: &str, teams: &str, stadiums: &str) -> (Dataset, IngestReport) {
        let m = dir.write("matches.csv", matches);
        let t = dir.write("teams.csv", teams);
        let s = dir.write("stadiums.csv", stadiums);
        load_dataset(&m, &t, &s).unwrap()
    }

    #[test]
    fn clean_rows_all_accepted() {
        let dir = TempDir::new("clean");
        let m = matches_csv(&[
            "2010,1,2010-05-08,a,b,s1,2,1,30000,1,2,0,0,10,12,Coach A,Coach B",
            "2010,2,2010-05-15,b,a,s2,0,0,20000,2,1,0,1,14,9,Coach B,Coach A",
            "2010,3,2010-05-22,a,b,s3,1,3,8000,0,0,0,0,11,11,Coach A,Coach B",
        ]);
        let (d, report) = load(&dir, &m, TEAMS, STADIUMS);
        assert_eq!(report.rows_read, 3 + 2 + 3);
        assert_eq!(report.rows_accepted, report.rows_read);
        assert_eq!(report.rows_rejected, 0);
        assert_eq!(d.matches.len(), 3);
        assert!(d.matches.windows(2).all(|w| {
            (w[0].season, w[0].date, w[0].round) <= (w[1].season, w[1].date, w[1].round)
        }));
    }

    #[test]
    fn negative_goals_rejected_with_reason() {
        let dir = TempDir::new("neg");
        let m = matches_csv(&["2010,1,2010-05-08,a,b,s1,-1,1,30000,1,2,0,0,10,12,Coach A,Coach B"]);
        let (d, report) = load(&dir, &m, TEAMS, STADIUMS);
        assert_eq!(d.matches.len(), 0);
        assert_eq!(report.rows_rejected, 1);
        assert!(report.warnings.iter().any(|w| w.reason == "negative goals"));
        assert_eq!(
            report.rows_read,
            report.rows_accepted + report.rows_rejected
        );
    }

    #[test]
    fn dangling_references_rejected() {
        let dir = TempDir::new("fk");
        let m = matches_csv(&[
            "2010,1,2010-05-08,a,zz,s1,2,1,30000,1,2,0,0,10,12,Coach A,Coach B",
            "2010,2,2010-05-15,a,b,s9,2,1,30000,1,2,0,0,10,12,Coach A,Coach B",
        ]);
        let (d, report) = load(&dir, &m, TEAMS, STADIUMS);
        assert_eq!(d.matches.len(), 0);
        assert_eq!(report.rows_rejected, 2);
        assert!(report
            .warnings
            .iter()
            .any(|w| w.reason.contains("unknown away_team")));
        assert!(report
            .warnings
            .iter()
            .any(|w| w.reason.contains("unknown stadium")));
    }

    #[test]
    fn duplicate_fixture_rejected() {
        let dir = TempDir::new("dup");
        let row = "2010,1,2010-05-08,a,b,s1,2,1,30000,1,2,0,0,10,12,Coach A,Coach B";
        let m = matches_csv(&[row, row]);
        let (d, report) = load(&dir, &m, TEAMS, STADIUMS);
        assert_eq!(d.matches.len(), 1);
        assert!(report
            .warnings
            .iter()
            .any(|w| w.reason.contains("duplicate fixture")));
    }

    #[test]
    fn header_must_match() {
        let dir = TempDir::new("hdr");
        let m = dir.write("matches.csv", "season,round\n2010,1\n");
        let t = dir.write("teams.csv", TEAMS);
        let s = dir.write("stadiums.csv", STADIUMS);
        assert!(matches!(
            load_dataset(&m, &t, &s),
            Err(DataError::BadHeader { .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let dir = TempDir::new("io");
        let t = dir.write("teams.csv", TEAMS);
        let s = dir.write("stadiums.csv", STADIUMS);
        let missing = dir.path().join("nope.csv");
        assert!(matches!(
            load_dataset(&missing, &t, &s),
            Err(DataError::Io { .. })
        ));
    }

    #[test]
    fn neutral_exclusion_counts_and_is_idempotent() {
        let dir = TempDir::new("neutral");
        let m = matches_csv(&[
            "2010,1,2010-05-08,a,b,s1,2,1,30000,1,2,0,0,10,12,Coach A,Coach B",
            "2010,2,2010-05-15,b,a,s2,0,0,20000,2,1,0,1,14,9,Coach B,Coach A",
            "2010,3,2010-05-22,a,b,s3,1,3,8000,0,0,0,0,11,11,Coach A,Coach B",
        ]);
        let (d, _) = load(&dir, &m, TEAMS, STADIUMS);
        let (kept, removed) = exclude_neutral(&d);
        assert_eq!(removed, 1);
        assert_eq!(kept.matches.len(), 2);
        let (again, removed_again) = exclude_neutral(&kept);
        assert_eq!(removed_again, 0);
        assert_eq!(again, kept);
    }

    #[test]
    fn all_neutral_annihilates() {
        let dir = TempDir::new("allneutral");
        let m = matches_csv(&[
            "2010,1,2010-05-08,a,b,s3,2,1,3000,1,2,0,0,10,12,Coach A,Coach B",
            "2010,2,2010-05-15,b,a,s3,0,0,2000,2,1,0,1,14,9,Coach B,Coach A",
        ]);
        let (d, _) = load(&dir, &m, TEAMS, STADIUMS);
        let (kept, removed) = exclude_neutral(&d);
        assert_eq!(removed, 2);
        assert!(kept.matches.is_empty());
    }

    #[test]
    fn mixed_ten_matches_two_neutral() {
        let dir = TempDir::new("mixed");
        let mut rows = Vec::new();
        for r in 1..=8 {
            let (h, a, s) = if r % 2 == 0 {
                ("a", "b", "s1")
            } else {
                ("b", "a", "s2")
            };
            rows.push(format!(
                "2010,{r},2010-05-{:02},{h},{a},{s},1,0,5000,0,0,0,0,10,10,Coach A,Coach B",
                r + 1
            ));
        }
        rows.push("2010,9,2010-05-20,a,b,s3,1,0,5000,0,0,0,0,10,10,Coach A,Coach B".into());
        rows.push("2010,10,2010-05-21,b,a,s3,1,0,5000,0,0,0,0,10,10,Coach B,Coach A".into());
        let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
        let (d, _) = load(&dir, &matches_csv(&refs), TEAMS, STADIUMS);
        assert_eq!(d.matches.len(), 10);
        let (kept, removed) = exclude_neutral(&d);
        assert_eq!(removed, 2);
        assert_eq!(kept.matches.len(), 8);
    }

    #[test]
    fn full_scale_neutral_exclusion_count() {
        // 1368 fixtures of which 260 sit at a third-party ground: 1108 remain
        // analyzable after the exclusion filter (counts verified by the
        // arithmetic here, independent of the filter).
        let dir = TempDir::new("scale");
        let mut rows = Vec::new();
        for i in 0..1368u32 {
            let neutral = i < 260;
            let stadium = if neutral {
                "s3"
            } else {
                if i % 2 == 0 {
                    "s1"
                } else {
                    "s2"
                }
            };
            let (home, away) = if i % 2 == 0 { ("a", "b") } else { ("b", "a") };
            let date = Date::from_days_from_epoch(
                Date::new(2010, 1, 1).unwrap().days_from_epoch() + i64::from(i % 300),
            );
            rows.push(format!(
                "2010,{},{date},{home},{away},{stadium},1,0,5000,0,0,0,0,10,10,Coach A,Coach B",
                i + 1
            ));
        }
        let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
        let (d, report) = load(&dir, &matches_csv(&refs), TEAMS, STADIUMS);
        assert_eq!(report.rows_rejected, 0);
        assert_eq!(d.matches.len(), 1368);
        let (kept, removed) = exclude_neutral(&d);
        assert_eq!(removed, 260);
        assert_eq!(kept.matches.len(), 1108);
    }

    #[test]
    fn load_serialize_load_roundtrips() {
        let dir = TempDir::new("roundtrip");
        let m = matches_csv(&[
            "2010,1,2010-05-08,a,b,s1,2,1,30000,1,2,0,0,10,12,Coach A,Coach B",
            "2010,2,2010-05-15,b,a,s2,0,0,20000,2,1,0,1,14,9,\"Coach, B\",Coach A",
        ]);
        let (d, _) = load(&dir, &m, TEAMS, STADIUMS);
        let dir2 = TempDir::new("roundtrip2");
        let mut paths = BTreeMap::new();
        for (name, contents) in dataset_to_csv(&d) {
            paths.insert(name.clone(), dir2.write(&name, &contents));
        }
        let (d2, report2) = load_dataset(
            &paths["matches.csv"],
            &paths["teams.csv"],
            &paths["stadiums.csv"],
        )
        .unwrap();
        assert_eq!(report2.rows_rejected, 0);
        assert_eq!(d.teams, d2.teams);
        assert_eq!(d.stadiums, d2.stadiums);
        assert_eq!(d.matches, d2.matches);
    }

    #[test]
    fn gazetteer_lookup_and_distance() {
        let dir = TempDir::new("gaz");
        let g = dir.write(
            "gazetteer.csv",
            "city,latitude,longitude\n\
             Sao Paulo,-23.55,-46.63\n\
             Rio de Janeiro,-22.91,-43.17\n\
             bad,91.0,0.0\n",
        );
        let (gaz, warnings) = load_gazetteer(&g).unwrap();
        assert_eq!(gaz.len(), 2);
        assert_eq!(warnings.len(), 1);
        let d = travel_distance_km("SAO PAULO", "rio de janeiro", &gaz).unwrap();
        assert!((d - 360.6238809880915).abs() < 1e-9);
        assert_eq!(
            travel_distance_km("x", "x", &gaz)
                .err()
                .map(|e| e.to_string()),
            Some("city \"x\" is missing from the gazetteer".into())
        );
        assert_eq!(
            travel_distance_km("Sao Paulo", "Sao Paulo", &gaz).unwrap(),
            0.0
        );
    }

    #[test]
    fn fan_share_overflow_warns() {
        let dir = TempDir::new("share");
        let teams = "id,name,home_city,home_stadium,fan_share\n\
            a,Alpha,alphaville,s1,0.7\n\
            b,Beta,betatown,s2,0.6\n";
        let (_, report) = load(&dir, &matches_csv(&[]), teams, STADIUMS);
        assert!(report
            .warnings
            .iter()
            .any(|w| w.reason.contains("fan shares sum")));
    }

    #[test]
    fn report_json_has_stable_keys() {
        let report = IngestReport {
            rows_read: 2,
            rows_accepted: 1,
            rows_rejected: 1,
            neutral_excluded: 0,
            warnings: vec![RowWarning {
                file: "matches.csv".into(),
                row: 2,
                reason: "negative goals".into(),
            }],
        };
        let json = report.to_json();
        let a = json.find("\"rows_read\"").unwrap();
        let b = json.find("\"rows_accepted\"").unwrap();
        let c = json.find("\"rows_rejected\"").unwrap();
        let d = json.find("\"neutral_excluded\"").unwrap();
        let e = json.find("\"warnings\"").unwrap();
        assert!(a < b && b < c && c < d && d < e);
    }
}
