//! Angle file ingestion and the bundled benchmark datasets.
//!
//! Angle files hold one angle per line; `#` starts a comment, and a comment
//! of the form `# unit: degrees` (or `radians`) declares the unit. A file
//! whose first data line has an `angle` column is read as CSV instead, with
//! an optional `label` column.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circular::AngleSample;
use crate::error::{Error, Result};

/// Environment variable naming a local copy of the larva dataset.
pub const LARVA_ENV: &str = "CIRCROBUST_LARVA_DATA";

const FROGS: &str = include_str!("../data/frogs.txt");
const SEASTARS: &str = include_str!("../data/seastars.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[default]
    Radians,
    Degrees,
}

impl AngleUnit {
    fn to_radians(self, x: f64) -> f64 {
        match self {
            AngleUnit::Radians => x,
            AngleUnit::Degrees => x.to_radians(),
        }
    }
}

impl FromStr for AngleUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rad" | "radian" | "radians" => Ok(AngleUnit::Radians),
            "deg" | "degree" | "degrees" => Ok(AngleUnit::Degrees),
            other => Err(Error::InvalidArgument(format!("unknown angle unit `{other}`"))),
        }
    }
}

impl fmt::Display for AngleUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AngleUnit::Radians => "radians",
            AngleUnit::Degrees => "degrees",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dataset {
    Frogs,
    SeaStars,
    Larva,
}

impl Dataset {
    pub const ALL: [Dataset; 3] = [Dataset::Frogs, Dataset::SeaStars, Dataset::Larva];

    pub fn name(self) -> &'static str {
        match self {
            Dataset::Frogs => "frogs",
            Dataset::SeaStars => "seastars",
            Dataset::Larva => "larva",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Dataset::ALL.into_iter().find(|d| d.name() == name.to_ascii_lowercase())
    }

    /// Loads the dataset. `larva` is not bundled and is read from the file
    /// named by [`LARVA_ENV`] when set.
    pub fn load(self) -> Result<AngleSample> {
        match self {
            Dataset::Frogs => parse_angles(FROGS, None),
            Dataset::SeaStars => parse_angles(SEASTARS, None),
            Dataset::Larva => match std::env::var_os(LARVA_ENV) {
                Some(p) => read_angles(Path::new(&p), None),
                None => Err(Error::DatasetUnavailable(format!(
                    "larva (set {LARVA_ENV} to a local angle file)"
                ))),
            },
        }
    }
}

/// A bundled dataset name or a file path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    Embedded(Dataset),
    File(PathBuf),
}

impl DataSource {
    pub fn parse(s: &str) -> Self {
        match Dataset::from_name(s) {
            Some(d) => DataSource::Embedded(d),
            None => DataSource::File(PathBuf::from(s)),
        }
    }

    /// Loads the angles; `unit` overrides any unit declared in the file.
    pub fn load(&self, unit: Option<AngleUnit>) -> Result<AngleSample> {
        match self {
            DataSource::Embedded(d) => match unit {
                None => d.load(),
                Some(_) => Err(Error::InvalidArgument(format!(
                    "bundled dataset `{}` has a fixed unit",
                    d.name()
                ))),
            },
            DataSource::File(p) => read_angles(p, unit),
        }
    }
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSource::Embedded(d) => f.write_str(d.name()),
            DataSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

pub fn read_angles(path: &Path, unit: Option<AngleUnit>) -> Result<AngleSample> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_angles(&text, unit)
}

fn unit_directive(comment: &str) -> Option<AngleUnit> {
    let rest = comment.trim_start_matches('#').trim();
    let (key, value) = rest.split_once(':')?;
    if !key.trim().eq_ignore_ascii_case("unit") {
        return None;
    }
    let word: String = value.trim().chars().take_while(|c| c.is_ascii_alphabetic()).collect();
    word.parse().ok()
}

/// Parses angle text; see the module docs for the format.
pub fn parse_angles(text: &str, unit: Option<AngleUnit>) -> Result<AngleSample> {
    let mut declared = None;
    let mut first_data = None;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('#') {
            declared = declared.or_else(|| unit_directive(t));
        } else if !t.is_empty() && first_data.is_none() {
            first_data = Some(i);
        }
    }
    let unit = unit.or(declared).unwrap_or_default();
    let Some(first) = first_data else {
        return Err(Error::EmptyDataset);
    };
    let header = text.lines().nth(first).unwrap_or_default();
    if header.split(',').any(|f| f.trim().eq_ignore_ascii_case("angle")) {
        return parse_csv(text, unit);
    }
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.split('#').next().unwrap_or_default().trim();
        if t.is_empty() {
            continue;
        }
        let x: f64 = t.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("`{t}` is not a number"),
        })?;
        if !x.is_finite() {
            return Err(Error::Parse { line: i + 1, message: format!("`{t}` is not finite") });
        }
        values.push(unit.to_radians(x));
    }
    AngleSample::new(values)
}

fn parse_csv(text: &str, unit: AngleUnit) -> Result<AngleSample> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let parse_err = |e: csv::Error| Error::Parse {
        line: e.position().map_or(0, |p| p.line() as usize),
        message: e.to_string(),
    };
    let headers = rdr.headers().map_err(parse_err)?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let angle_col = col("angle").ok_or(Error::Parse { line: 1, message: "no `angle` column".into() })?;
    let label_col = col("label");
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(parse_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = rec.get(angle_col).unwrap_or_default();
        let x: f64 = field
            .parse()
            .ok()
            .filter(|x: &f64| x.is_finite())
            .ok_or_else(|| Error::Parse { line, message: format!("`{field}` is not a finite number") })?;
        values.push(unit.to_radians(x));
        if let Some(c) = label_col {
            labels.push(rec.get(c).unwrap_or_default().to_string());
        }
    }
    let s = AngleSample::new(values)?;
    if label_col.is_some() {
        s.with_labels(labels)
    } else {
        Ok(s)
    }
}

/// Writes a sample in the plain angle format (radians, exact round trip).
pub fn write_angles(s: &AngleSample) -> String {
    let mut out = String::from("# unit: radians\n");
    for a in s.angles() {
        out.push_str(&format!("{a}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::CircularModel;

    #[test]
    fn embedded_sizes() {
        assert_eq!(Dataset::Frogs.load().unwrap().len(), 14);
        assert_eq!(Dataset::SeaStars.load().unwrap().len(), 22);
        let frogs = Dataset::Frogs.load().unwrap();
        assert!((frogs.angles()[13] - 316f64.to_radians() + std::f64::consts::TAU).abs() < 1e-12);
    }

    #[test]
    fn round_trip() {
        let s = CircularModel::von_mises(1.0, 2.0).unwrap().sample(50, 9).unwrap();
        assert_eq!(parse_angles(&write_angles(&s), None).unwrap(), s);
    }

    #[test]
    fn units_and_comments() {
        let s = parse_angles("# unit: degrees\n90\n\n180 # west\n", None).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.angles()[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let r = parse_angles("# unit: degrees\n90\n", Some(AngleUnit::Radians)).unwrap();
        assert!((r.angles()[0] - (90.0 - 14.0 * std::f64::consts::TAU)).abs() < 1e-9);
    }

    #[test]
    fn csv_with_labels() {
        let s = parse_angles("id,angle,label\n1,0.5,a\n2,-0.25,b\n", None).unwrap();
        assert_eq!(s.angles(), &[0.5, -0.25]);
        assert_eq!(s.labels().unwrap(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(
            parse_angles("# header\n0.1\nabc\n", None).unwrap_err(),
            Error::Parse { line: 3, message: "`abc` is not a number".into() }
        );
        match parse_angles("angle\n0.1\n0.2\nnope\n", None).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            e => panic!("{e}"),
        }
        assert_eq!(parse_angles("# only comments\n\n", None).unwrap_err(), Error::EmptyDataset);
        assert!(matches!(parse_angles("inf\n", None), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn sources() {
        assert_eq!(DataSource::parse("frogs"), DataSource::Embedded(Dataset::Frogs));
        assert_eq!(DataSource::parse("x.txt"), DataSource::File("x.txt".into()));
        assert!(DataSource::parse("frogs").load(Some(AngleUnit::Degrees)).is_err());
        assert!(matches!(
            DataSource::File("/nonexistent/angles.txt".into()).load(None),
            Err(Error::Io(_))
        ));
    }
}
