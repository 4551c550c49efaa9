//! Plain-text instance format.
//!
//! ```text
//! # planted_opt 2
//! 6 2 3 1
//! 0 1 2
//! 3 4 5
//! ```
//!
//! The first non-comment line is `n m s t`, followed by one line per set. Lines
//! starting with `#` carry metadata and are otherwise ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::{ElementId, SetSystem};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct InstanceFile {
    pub system: SetSystem,
    pub planted_opt: Option<usize>,
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<InstanceFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_instance_str(&text)
}

pub fn read_instance_str(text: &str) -> Result<InstanceFile> {
    let mut header: Option<[usize; 4]> = None;
    let mut planted_opt = None;
    let mut sets: Vec<Vec<ElementId>> = Vec::new();
    let mut degree: Vec<usize> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if let Some(meta) = line.strip_prefix('#') {
            let mut words = meta.split_whitespace();
            if words.next() == Some("planted_opt") {
                let v = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| Error::parse(line_no, "planted_opt needs an integer value"))?;
                planted_opt = Some(v);
            }
            continue;
        }
        let Some([n, m, s, t]) = header else {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<usize> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(line_no, format!("header is not numeric: `{line}`")))?;
            let [n, m, s, t] = fields[..] else {
                return Err(Error::parse(line_no, "header must be `n m s t`"));
            };
            header = Some([n, m, s, t]);
            degree = vec![0; n];
            continue;
        };
        if sets.len() == m {
            if line.is_empty() {
                continue;
            }
            return Err(Error::parse(line_no, format!("more than the {m} sets declared in the header")));
        }
        let mut elems: Vec<ElementId> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(line_no, format!("malformed set line: `{line}`")))?;
        if elems.is_empty() {
            return Err(Error::parse(line_no, "empty set"));
        }
        if elems.len() > s {
            return Err(Error::parse(
                line_no,
                format!("set has {} elements but s = {s}", elems.len()),
            ));
        }
        elems.sort_unstable();
        if let Some(w) = elems.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::parse(line_no, format!("duplicate element {}", w[0])));
        }
        for &e in &elems {
            if e as usize >= n {
                return Err(Error::parse(line_no, format!("element {e} out of range (n = {n})")));
            }
            degree[e as usize] += 1;
            if degree[e as usize] > t {
                return Err(Error::parse(
                    line_no,
                    format!("element {e} appears in more than t = {t} sets"),
                ));
            }
        }
        sets.push(elems);
    }

    let Some([n, m, s, t]) = header else {
        return Err(Error::parse(last_line.max(1), "missing `n m s t` header"));
    };
    if sets.len() != m {
        return Err(Error::parse(
            last_line,
            format!("header declares {m} sets but the file has {}", sets.len()),
        ));
    }
    if let Some(e) = degree.iter().position(|&d| d == 0) {
        return Err(Error::parse(last_line, format!("element {e} is not in any set")));
    }
    let system = SetSystem::new(n, sets, s, t).map_err(|err| Error::parse(last_line, err.to_string()))?;
    Ok(InstanceFile { system, planted_opt })
}

pub fn write_instance_string(sys: &SetSystem, planted_opt: Option<usize>) -> String {
    let mut out = String::new();
    if let Some(opt) = planted_opt {
        writeln!(out, "# planted_opt {opt}").unwrap();
    }
    writeln!(out, "{} {} {} {}", sys.num_elements(), sys.num_sets(), sys.s(), sys.t()).unwrap();
    for set in sys.sets() {
        let mut first = true;
        for e in set {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{e}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_instance(sys: &SetSystem, planted_opt: Option<usize>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_instance_string(sys, planted_opt)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_written_instance() {
        let f = read_instance_str("4 3 3 2\n0 1 2\n2 3\n# comment\n3 0\n").unwrap();
        let sys = &f.system;
        assert_eq!(sys.num_elements(), 4);
        assert_eq!(sys.num_sets(), 3);
        assert_eq!(sys.set(0), &[0, 1, 2]);
        assert_eq!(sys.set(1), &[2, 3]);
        assert_eq!(sys.set(2), &[0, 3]);
        assert_eq!(sys.element(0), &[0, 2]);
        assert_eq!(sys.element(1), &[0]);
        assert_eq!(sys.element(2), &[0, 1]);
        assert_eq!(sys.element(3), &[1, 2]);
        assert_eq!(f.planted_opt, None);
    }

    #[test]
    fn planted_metadata_round_trips() {
        let f = read_instance_str("# planted_opt 2\n6 2 3 1\n0 1 2\n3 4 5\n").unwrap();
        assert_eq!(f.planted_opt, Some(2));
        let text = write_instance_string(&f.system, f.planted_opt);
        assert_eq!(text, "# planted_opt 2\n6 2 3 1\n0 1 2\n3 4 5\n");
    }

    fn line_of(text: &str) -> usize {
        match read_instance_str(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of("3 3 2 2\n0 1\n2\n"), 3); // too few sets
        assert_eq!(line_of("3 1 2 2\n0 1\n2\n"), 3); // too many sets
        assert_eq!(line_of("3 2 2 2\n0 x\n2\n"), 2);
        assert_eq!(line_of("3 2 2 2\n0 0\n1 2\n"), 2);
        assert_eq!(line_of("3 2 2 2\n0 1 2\n2\n"), 2);
        assert_eq!(line_of("3 2 2 1\n0 1\n1 2\n"), 3);
        assert_eq!(line_of("3 2\n0 1\n2\n"), 1);
        assert_eq!(line_of("3 2 2 2\n0 5\n2\n"), 2);
    }

    #[test]
    fn unsorted_sets_are_canonicalized() {
        let f = read_instance_str("3 1 3 1\n2 0 1\n").unwrap();
        assert_eq!(f.system.set(0), &[0, 1, 2]);
    }
}
