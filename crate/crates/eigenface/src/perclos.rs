//! PERCLOS: share of eye frames in a window labelled closed.

use std::io::Read;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Window length used when none is given.
pub const DEFAULT_WINDOW_S: f64 = 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EyeState {
    Open,
    Closed,
}

impl FromStr for EyeState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "open" => Ok(EyeState::Open),
            "closed" => Ok(EyeState::Closed),
            other => Err(Error::Labels(format!("unknown label '{other}' (expected open or closed)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub timestamp: f64,
    pub state: EyeState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowScore {
    pub start: f64,
    pub end: f64,
    pub frames: u64,
    pub closed: u64,
    pub percent: f64,
}

/// `(N_m − N_a)/N_m × 100` for `N_m` frames of which `N_a` are open. The
/// numerator is formed in integers, so the only rounding is the division.
pub fn perclos(total: u64, open: u64) -> Result<f64> {
    if total == 0 {
        return Err(Error::EmptyWindow { start: 0.0 });
    }
    if open > total {
        return Err(Error::Labels(format!("{open} open frames out of {total}")));
    }
    Ok(((total - open) as f64 * 100.0) / total as f64)
}

/// Reads `timestamp_s,label` rows. Timestamps must be finite, non-negative
/// and non-decreasing.
pub fn parse_labels(input: impl Read) -> Result<Vec<Frame>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers().map_err(|e| Error::Labels(e.to_string()))?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Labels(format!("missing column '{name}'")))
    };
    let (ts_col, label_col) = (col("timestamp_s")?, col("label")?);
    let mut frames: Vec<Frame> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Labels(e.to_string()))?;
        let line = i + 2;
        let field = |c: usize| rec.get(c).ok_or_else(|| Error::Labels(format!("line {line}: missing field")));
        let timestamp: f64 = field(ts_col)?
            .parse()
            .map_err(|_| Error::Labels(format!("line {line}: bad timestamp '{}'", &rec[ts_col])))?;
        if !timestamp.is_finite() || timestamp < 0.0 {
            return Err(Error::Labels(format!("line {line}: timestamp {timestamp} out of range")));
        }
        if frames.last().is_some_and(|f| f.timestamp > timestamp) {
            return Err(Error::Labels(format!("line {line}: timestamps decrease")));
        }
        let state = field(label_col)?.parse()?;
        frames.push(Frame { timestamp, state });
    }
    Ok(frames)
}

/// Tumbling windows `[jw, (j+1)w)` anchored at time zero. Windows without
/// frames are left out. Timestamps must be non-negative and non-decreasing.
pub fn window_perclos(frames: &[Frame], window: f64) -> Result<Vec<WindowScore>> {
    if !(window > 0.0 && window.is_finite()) {
        return Err(Error::Labels(format!("window length {window} must be positive")));
    }
    if frames.is_empty() {
        return Err(Error::EmptyWindow { start: 0.0 });
    }
    let mut out: Vec<WindowScore> = Vec::new();
    let mut current: Option<(u64, u64, u64)> = None;
    let mut flush = |slot: u64, total: u64, closed: u64| -> Result<()> {
        let start = slot as f64 * window;
        out.push(WindowScore {
            start,
            end: start + window,
            frames: total,
            closed,
            percent: perclos(total, total - closed)?,
        });
        Ok(())
    };
    let mut prev = 0.0;
    for f in frames {
        if !(f.timestamp >= prev && f.timestamp.is_finite()) {
            return Err(Error::Labels(format!("timestamp {} out of order", f.timestamp)));
        }
        prev = f.timestamp;
        let slot = (f.timestamp / window).floor() as u64;
        let closed = u64::from(f.state == EyeState::Closed);
        current = match current {
            Some((s, total, c)) if s == slot => Some((s, total + 1, c + closed)),
            Some((s, total, c)) => {
                flush(s, total, c)?;
                Some((slot, 1, closed))
            }
            None => Some((slot, 1, closed)),
        };
    }
    if let Some((s, total, c)) = current {
        flush(s, total, c)?;
    }
    Ok(out)
}
