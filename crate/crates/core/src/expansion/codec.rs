//! Text form of coded vertices: `V1:j:v:[p1,...,pK]` and `V0:v:[p1,...,pK]:i`.

use std::fmt;
use std::str::FromStr;

use super::ExpandedVertex;
use crate::error::Error;

fn write_profile(f: &mut fmt::Formatter<'_>, profile: &[u64]) -> fmt::Result {
    f.write_str("[")?;
    for (i, p) in profile.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{p}")?;
    }
    f.write_str("]")
}

impl fmt::Display for ExpandedVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpandedVertex::V1 {
                slot,
                base,
                profile,
            } => {
                write!(f, "V1:{slot}:{base}:")?;
                write_profile(f, profile)
            }
            ExpandedVertex::V0 { base, profile, pad } => {
                write!(f, "V0:{base}:")?;
                write_profile(f, profile)?;
                write!(f, ":{pad}")
            }
        }
    }
}

fn parse_int<T: FromStr>(s: &str, what: &str, code: &str) -> Result<T, Error> {
    s.parse()
        .map_err(|_| Error::Parse(format!("bad {what} {s:?} in vertex code {code:?}")))
}

fn parse_profile(s: &str, code: &str) -> Result<Vec<u64>, Error> {
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("profile must be bracketed in {code:?}")))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|p| parse_int(p.trim(), "profile entry", code))
        .collect()
}

impl FromStr for ExpandedVertex {
    type Err = Error;

    fn from_str(code: &str) -> Result<Self, Error> {
        if let Some(rest) = code.strip_prefix("V1:") {
            let mut parts = rest.splitn(3, ':');
            let (Some(slot), Some(base), Some(profile)) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::Parse(format!("truncated vertex code {code:?}")));
            };
            Ok(ExpandedVertex::V1 {
                slot: parse_int(slot, "slot", code)?,
                base: parse_int(base, "base vertex", code)?,
                profile: parse_profile(profile, code)?,
            })
        } else if let Some(rest) = code.strip_prefix("V0:") {
            let (base, rest) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("truncated vertex code {code:?}")))?;
            let (profile, pad) = rest
                .rsplit_once(':')
                .ok_or_else(|| Error::Parse(format!("truncated vertex code {code:?}")))?;
            Ok(ExpandedVertex::V0 {
                base: parse_int(base, "base vertex", code)?,
                profile: parse_profile(profile, code)?,
                pad: parse_int(pad, "pad index", code)?,
            })
        } else {
            Err(Error::Parse(format!(
                "vertex code {code:?} must start with V1: or V0:"
            )))
        }
    }
}
