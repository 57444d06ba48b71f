//! Plain-text system files.
//!
//! ```text
//! # comments and blank lines are ignored
//! ring zp p=5 cap=4          # or: ring fpt p=5 cap=3
//! vars X Y
//! poly f = X^2 - 6 + Y
//! poly g = Y - 5
//! point 1, 0                 # optional, defaults to the origin
//! square                     # or: implicit r=1 | variety dim=1
//! avoid X                    # optional
//! ```

use std::fmt;

use crate::mvpoly::MultiPoly;
use crate::parse::{parse_poly, parse_scalar_list, ParseError};
use crate::scalar::Scalar;
use crate::valued::{Backend, RingContext, RingError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Square,
    Implicit { r: usize },
    Variety { dim: usize },
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Square => f.write_str("square"),
            Role::Implicit { r } => write!(f, "implicit r={r}"),
            Role::Variety { dim } => write!(f, "variety dim={dim}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemSpec {
    pub ring: RingContext,
    pub vars: Vec<String>,
    pub polys: Vec<(String, MultiPoly)>,
    pub point: Option<Vec<Scalar>>,
    pub role: Option<Role>,
    pub avoid: Option<MultiPoly>,
}

impl SystemSpec {
    pub fn polynomials(&self) -> Vec<MultiPoly> {
        self.polys.iter().map(|(_, p)| p.clone()).collect()
    }

    /// The base point, or the origin when none was given.
    pub fn point_or_origin(&self) -> Vec<Scalar> {
        self.point.clone().unwrap_or_else(|| vec![self.ring.zero(); self.vars.len()])
    }

    pub fn at_origin(&self) -> bool {
        self.point.as_ref().is_none_or(|pt| pt.iter().all(Scalar::is_zero))
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let backend = match self.ring.backend() {
            Backend::PAdic => "zp",
            Backend::Series => "fpt",
        };
        writeln!(f, "ring {backend} p={} cap={}", self.ring.prime(), self.ring.cap())?;
        writeln!(f, "vars {}", self.vars.join(" "))?;
        for (name, poly) in &self.polys {
            writeln!(f, "poly {name} = {poly}")?;
        }
        if let Some(pt) = &self.point {
            let parts: Vec<String> = pt.iter().map(Scalar::to_string).collect();
            writeln!(f, "point {}", parts.join(", "))?;
        }
        if let Some(role) = &self.role {
            writeln!(f, "{role}")?;
        }
        if let Some(q) = &self.avoid {
            writeln!(f, "avoid {q}")?;
        }
        Ok(())
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Column (1-based) of the byte offset `at` within `line`.
fn column_of(line: &str, at: usize) -> usize {
    line[..at].chars().count() + 1
}

/// Parses `key=value` where value is an integer.
fn keyed<T: std::str::FromStr>(word: &str, key: &str, line_no: usize, column: usize) -> Result<T, ParseError> {
    word.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| ParseError::new(line_no, column, format!("expected {key}=<integer>, found '{word}'")))
}

/// Splits a line into words with their starting columns.
fn words(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((column_of(line, s), &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((column_of(line, s), &line[s..]));
    }
    out
}

fn parse_ring(line: &str, line_no: usize) -> Result<RingContext, ParseError> {
    let w = words(line);
    if w.len() != 4 {
        return Err(ParseError::new(line_no, 1, "expected 'ring <zp|fpt> p=<prime> cap=<digits>'"));
    }
    let backend = match w[1].1 {
        "zp" => Backend::PAdic,
        "fpt" => Backend::Series,
        other => return Err(ParseError::new(line_no, w[1].0, format!("unknown backend '{other}' (expected zp or fpt)"))),
    };
    let p: u64 = keyed(w[2].1, "p", line_no, w[2].0)?;
    let cap: u32 = keyed(w[3].1, "cap", line_no, w[3].0)?;
    RingContext::new(backend, p, cap).map_err(|e| {
        let column = if matches!(e, RingError::ZeroCap) { w[3].0 } else { w[2].0 };
        let message = match e {
            RingError::NotPrime(p) => format!("non-prime p = {p}"),
            RingError::ZeroCap => "cap must be at least 1".to_string(),
            other => other.to_string(),
        };
        ParseError::new(line_no, column, message)
    })
}

struct Builder {
    ring: Option<RingContext>,
    vars: Option<Vec<String>>,
    polys: Vec<(String, MultiPoly)>,
    point: Option<(usize, Vec<Scalar>)>,
    role: Option<(usize, Role)>,
    avoid: Option<MultiPoly>,
}

impl Builder {
    fn ring(&self, line_no: usize) -> Result<RingContext, ParseError> {
        self.ring.ok_or_else(|| ParseError::new(line_no, 1, "the 'ring' line must come first"))
    }

    fn vars(&self, line_no: usize) -> Result<&[String], ParseError> {
        self.vars.as_deref().ok_or_else(|| ParseError::new(line_no, 1, "'vars' must be declared before this line"))
    }
}

/// Parses a system file.
pub fn parse_system(text: &str) -> Result<SystemSpec, ParseError> {
    let mut b = Builder { ring: None, vars: None, polys: Vec::new(), point: None, role: None, avoid: None };
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        let line = line.trim_end();
        let body = &line[indent..];
        let keyword = body.split_whitespace().next().unwrap_or("");
        let rest_at = indent + keyword.len();
        let rest = &line[rest_at..];
        let rest_column = column_of(line, rest_at);
        let duplicate = |what: &str| ParseError::new(line_no, indent + 1, format!("duplicate '{what}' line"));
        match keyword {
            "ring" => {
                if b.ring.is_some() {
                    return Err(duplicate("ring"));
                }
                b.ring = Some(parse_ring(body, line_no)?);
            }
            "vars" => {
                let ring = b.ring(line_no)?;
                if b.vars.is_some() {
                    return Err(duplicate("vars"));
                }
                let mut names: Vec<String> = Vec::new();
                for (col, name) in words(rest) {
                    let column = rest_column + col - 1;
                    if !is_identifier(name) {
                        return Err(ParseError::new(line_no, column, format!("invalid variable name '{name}'")));
                    }
                    if name == "t" && ring.backend() == Backend::Series {
                        return Err(ParseError::new(line_no, column, "'t' is the uniformizer of the series backend and cannot be a variable"));
                    }
                    if names.iter().any(|n| n == name) {
                        return Err(ParseError::new(line_no, column, format!("variable '{name}' declared twice")));
                    }
                    names.push(name.to_string());
                }
                if names.is_empty() {
                    return Err(ParseError::new(line_no, rest_column, "expected at least one variable"));
                }
                b.vars = Some(names);
            }
            "poly" => {
                let ring = b.ring(line_no)?;
                let vars = b.vars(line_no)?;
                let Some(eq) = rest.find('=') else {
                    return Err(ParseError::new(line_no, rest_column, "expected 'poly <name> = <expression>'"));
                };
                let name = rest[..eq].trim();
                if !is_identifier(name) {
                    return Err(ParseError::new(line_no, rest_column, format!("invalid polynomial name '{name}'")));
                }
                if b.polys.iter().any(|(n, _)| n == name) {
                    return Err(ParseError::new(line_no, rest_column, format!("polynomial '{name}' defined twice")));
                }
                let expr_at = rest_at + eq + 1;
                let poly = parse_poly(&line[expr_at..], ring, vars, line_no, column_of(line, expr_at))?;
                b.polys.push((name.to_string(), poly));
            }
            "point" => {
                let ring = b.ring(line_no)?;
                let n = b.vars(line_no)?.len();
                if b.point.is_some() {
                    return Err(duplicate("point"));
                }
                let pt = parse_scalar_list(rest, ring, line_no, rest_column)?;
                if pt.len() != n {
                    return Err(ParseError::new(line_no, rest_column, format!("point has {} coordinates, expected {n}", pt.len())));
                }
                b.point = Some((line_no, pt));
            }
            "square" | "implicit" | "variety" => {
                if b.role.is_some() {
                    return Err(ParseError::new(line_no, indent + 1, "duplicate role line"));
                }
                let w = words(rest);
                let role = match (keyword, w.as_slice()) {
                    ("square", []) => Role::Square,
                    ("implicit", [(col, word)]) => Role::Implicit { r: keyed(word, "r", line_no, rest_column + col - 1)? },
                    ("variety", [(col, word)]) => Role::Variety { dim: keyed(word, "dim", line_no, rest_column + col - 1)? },
                    _ => {
                        let usage = match keyword {
                            "square" => "square",
                            "implicit" => "implicit r=<k>",
                            _ => "variety dim=<k>",
                        };
                        return Err(ParseError::new(line_no, indent + 1, format!("expected '{usage}'")));
                    }
                };
                b.role = Some((line_no, role));
            }
            "avoid" => {
                let ring = b.ring(line_no)?;
                let vars = b.vars(line_no)?;
                if b.avoid.is_some() {
                    return Err(duplicate("avoid"));
                }
                b.avoid = Some(parse_poly(rest, ring, vars, line_no, rest_column)?);
            }
            other => return Err(ParseError::new(line_no, indent + 1, format!("unknown directive '{other}'"))),
        }
    }
    let end = last_line.max(1);
    let ring = b.ring.ok_or_else(|| ParseError::new(end, 1, "missing 'ring' line"))?;
    let vars = b.vars.ok_or_else(|| ParseError::new(end, 1, "missing 'vars' line"))?;
    if b.polys.is_empty() {
        return Err(ParseError::new(end, 1, "no 'poly' lines"));
    }
    let n = vars.len();
    let s = b.polys.len();
    if let Some((line_no, role)) = b.role {
        let problem = match role {
            Role::Square if s != n => Some(format!("square system needs {n} polynomials, found {s}")),
            Role::Implicit { r } if r >= n => Some(format!("implicit r={r} must be below the number of variables {n}")),
            Role::Implicit { r } if s != n - r => Some(format!("implicit r={r} needs {} polynomials, found {s}", n - r)),
            Role::Variety { dim } if dim >= n => Some(format!("variety dim={dim} must be below the number of variables {n}")),
            _ => None,
        };
        if let Some(message) = problem {
            return Err(ParseError::new(line_no, 1, message));
        }
    }
    Ok(SystemSpec {
        ring,
        vars,
        polys: b.polys,
        point: b.point.map(|(_, pt)| pt),
        role: b.role.map(|(_, r)| r),
        avoid: b.avoid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_system_with_point() {
        let spec = parse_system("ring zp p=5 cap=4\nvars X\npoly f = X^2 - 6\npoint 1\n").unwrap();
        assert_eq!(spec.ring, RingContext::padic(5, 4).unwrap());
        assert_eq!(spec.point, Some(vec![spec.ring.scalar(1)]));
        assert_eq!(spec.role, None);
        assert_eq!(spec.to_string(), "ring zp p=5 cap=4\nvars X\npoly f = X^2 - 6\npoint 1\n");
        assert_eq!(parse_system(&spec.to_string()).unwrap(), spec);
    }

    #[test]
    fn series_implicit_system() {
        let spec = parse_system("ring fpt p=5 cap=3\nvars X Y\npoly g = Y - X^2\nimplicit r=1\n").unwrap();
        assert_eq!(spec.ring.backend(), Backend::Series);
        assert_eq!(spec.role, Some(Role::Implicit { r: 1 }));
        assert_eq!(parse_system(&spec.to_string()).unwrap(), spec);
    }

    #[test]
    fn comments_and_layout() {
        let text = "# header\n\n  ring zp p=3 cap=2   # trailing\nvars  A  B\npoly  p = A*B + 3*A  \nvariety dim=1\navoid A - B\n";
        let spec = parse_system(text).unwrap();
        assert_eq!(spec.vars, vec!["A", "B"]);
        assert_eq!(spec.role, Some(Role::Variety { dim: 1 }));
        assert!(spec.avoid.is_some());
        assert_eq!(parse_system(&spec.to_string()).unwrap(), spec);
    }

    fn err(text: &str) -> ParseError {
        parse_system(text).unwrap_err()
    }

    #[test]
    fn header_errors() {
        assert!(err("ring zp p=4 cap=2\nvars X\npoly f = X\n").message.contains("non-prime"));
        assert!(err("ring qp p=5 cap=2\n").message.contains("unknown backend"));
        assert!(err("ring zp p=5 cap=0\n").message.contains("cap"));
        assert!(err("ring zp p=5\n").message.contains("expected"));
        assert_eq!(err("vars X\n").line, 1);
        assert!(err("ring fpt p=5 cap=2\nvars X t\n").message.contains("uniformizer"));
    }

    #[test]
    fn body_errors_are_located() {
        let e = err("ring zp p=5 cap=2\nvars X\npoly f = X + Y\n");
        assert_eq!((e.line, e.column), (3, 14));
        assert!(e.message.contains("undefined variable 'Y'"));
        let e = err("ring zp p=5 cap=2\nvars X\npoly f = X^\n");
        assert_eq!(e.line, 3);
        assert!(e.message.contains("malformed exponent"));
        assert!(err("ring zp p=5 cap=2\nvars X Y\npoly f = X\nsquare\n").message.contains("needs 2"));
        assert!(err("ring zp p=5 cap=2\nvars X Y\npoly f = X\npoint 1\n").message.contains("coordinates"));
        assert!(err("ring zp p=5 cap=2\nvars X Y\npoly f = X\nimplicit r=2\n").message.contains("below"));
        assert!(err("ring zp p=5 cap=2\nvars X\npoly f = X\nfrobnicate\n").message.contains("unknown directive"));
        assert!(err("ring zp p=5 cap=2\nvars X\n").message.contains("no 'poly'"));
        assert!(err("ring zp p=5 cap=2\nvars X\npoly f = X\npoly f = X\n").message.contains("twice"));
    }
}
