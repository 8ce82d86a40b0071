//! Parsers for individual flag values. Each type implements `FromStr` so the
//! same code serves command-line flags and config-file entries.

use std::fmt;
use std::str::FromStr;

use quartic_core::em_field::{LevelSet, ModeFamily, Sampling};
use quartic_core::qes::N2Branch;
use quartic_core::Parity;

/// Finite float; rejects `nan`, `inf` and empty input.
pub fn parse_finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityChoice {
    Even,
    Odd,
    Both,
}

impl ParityChoice {
    pub fn parities(&self) -> &'static [Parity] {
        match self {
            ParityChoice::Even => &[Parity::Even],
            ParityChoice::Odd => &[Parity::Odd],
            ParityChoice::Both => &[Parity::Even, Parity::Odd],
        }
    }
}

impl FromStr for ParityChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "both" | "all" => Ok(ParityChoice::Both),
            other => match other.parse::<Parity>() {
                Ok(Parity::Even) => Ok(ParityChoice::Even),
                Ok(Parity::Odd) => Ok(ParityChoice::Odd),
                Err(_) => Err(format!("unknown parity '{s}' (expected even, odd or both)")),
            },
        }
    }
}

impl fmt::Display for ParityChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityChoice::Even => "even",
            ParityChoice::Odd => "odd",
            ParityChoice::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (expected csv or json)")),
        }
    }
}

/// Figure number 1 to 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FigureId(u8);

impl FigureId {
    pub fn get(&self) -> u8 {
        self.0
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        let t = t.strip_prefix("fig").map(|r| r.trim_start_matches(['.', '-', '_'])).unwrap_or(t);
        match t.parse::<u8>() {
            Ok(k @ 1..=5) => Ok(FigureId(k)),
            _ => Err(format!("unknown figure id '{s}' (expected 1 to 5)")),
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn split_fields(s: &str, sep: char, expected: usize, shape: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(sep).collect();
    if parts.len() != expected {
        return Err(format!("'{s}' is not of the form {shape}"));
    }
    parts.iter().map(|p| parse_finite(p)).collect()
}

/// Open interval `lo:hi` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Interval {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = split_fields(s, ':', 2, "lo:hi")?;
        if v[0] < v[1] {
            Ok(Interval { lo: v[0], hi: v[1] })
        } else {
            Err(format!("empty interval '{s}' (need lo < hi)"))
        }
    }
}

/// Sample range `lo:hi:count`, evenly spaced and endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Largest sample count accepted for a single range.
pub const MAX_RANGE_COUNT: usize = 100_000;

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.hi } else { self.lo + i as f64 * step }).collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("'{s}' is not of the form lo:hi:count"));
        }
        let lo = parse_finite(parts[0])?;
        let hi = parse_finite(parts[1])?;
        let count: usize = parts[2].trim().parse().map_err(|_| format!("'{}' is not a sample count", parts[2]))?;
        if count == 0 || count > MAX_RANGE_COUNT {
            return Err(format!("sample count in '{s}' must be between 1 and {MAX_RANGE_COUNT}"));
        }
        let ok = if count == 1 { lo == hi } else { lo < hi };
        if !ok {
            return Err(format!("empty range '{s}' (need lo < hi, or lo = hi with count 1)"));
        }
        Ok(Range { lo, hi, count })
    }
}

/// Comma-separated list of positive scale factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Scales(pub Vec<f64>);

impl Default for Scales {
    fn default() -> Self {
        Scales(vec![0.5, 2.0, 3.0])
    }
}

impl FromStr for Scales {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = s.split(',').map(parse_finite).collect::<Result<Vec<f64>, String>>()?;
        if v.iter().all(|&t| t > 0.0) {
            Ok(Scales(v))
        } else {
            Err(format!("scale factors must be positive, got '{s}'"))
        }
    }
}

/// Mode family for field synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Family(pub ModeFamily);

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "n1-even" => Ok(Family(ModeFamily::N1Even)),
            "n2-even-plus" => Ok(Family(ModeFamily::N2Even(N2Branch::Plus))),
            "n2-even-minus" => Ok(Family(ModeFamily::N2Even(N2Branch::Minus))),
            "n2-odd" => Ok(Family(ModeFamily::N2Odd)),
            _ => Err(format!("unknown family '{s}' (expected n1-even, n2-even-plus, n2-even-minus or n2-odd)")),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            ModeFamily::N1Even => "n1-even",
            ModeFamily::N2Even(N2Branch::Plus) => "n2-even-plus",
            ModeFamily::N2Even(N2Branch::Minus) => "n2-even-minus",
            ModeFamily::N2Odd => "n2-odd",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingChoice(pub Sampling);

impl FromStr for SamplingChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "direct" => Ok(SamplingChoice(Sampling::Direct)),
            "conjugate-pair" => Ok(SamplingChoice(Sampling::ConjugatePair)),
            _ => Err(format!("unknown sampling '{s}' (expected direct or conjugate-pair)")),
        }
    }
}

impl fmt::Display for SamplingChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            Sampling::Direct => "direct",
            Sampling::ConjugatePair => "conjugate-pair",
        })
    }
}

/// `target:eps` with `eps > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSetArg(pub LevelSet);

impl FromStr for LevelSetArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = split_fields(s, ':', 2, "target:eps")?;
        if v[1] > 0.0 {
            Ok(LevelSetArg(LevelSet { target: v[0], eps: v[1] }))
        } else {
            Err(format!("level-set tolerance must be positive, got '{s}'"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_choices() {
        assert_eq!("Both".parse::<ParityChoice>().unwrap(), ParityChoice::Both);
        assert_eq!("-".parse::<ParityChoice>().unwrap(), ParityChoice::Odd);
        assert!("sideways".parse::<ParityChoice>().is_err());
    }

    #[test]
    fn ranges() {
        let r: Range = "-0.9:-0.5:5".parse().unwrap();
        assert_eq!(r.values(), vec![-0.9, -0.8, -0.7, -0.6, -0.5]);
        assert_eq!("1:1:1".parse::<Range>().unwrap().values(), vec![1.0]);
        for bad in ["1:0:3", "0:1:0", "1:1:2", "0:1", "0:nan:3", "0:1:x", "0:1:1"] {
            assert!(bad.parse::<Range>().is_err(), "{bad}");
        }
    }

    #[test]
    fn figure_ids() {
        assert_eq!("fig-3".parse::<FigureId>().unwrap().get(), 3);
        assert!("0".parse::<FigureId>().is_err());
        assert!("6".parse::<FigureId>().is_err());
    }

    #[test]
    fn scalars() {
        assert!(parse_finite("inf").is_err());
        assert!("0.5,-2".parse::<Scales>().is_err());
        assert!("1:0".parse::<LevelSetArg>().is_err());
        assert!("2:1".parse::<Interval>().is_err());
        assert_eq!("n2-odd".parse::<Family>().unwrap().to_string(), "n2-odd");
    }
}
