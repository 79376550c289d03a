//! Plain-text lattice files.
//!
//! ```text
//! 2
//! 1.0000000000000000e0 0.0000000000000000e0
//! 0.0000000000000000e0 1.0000000000000000e0
//! # prime=2147483647
//! # seed=7
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{Lattice, Provenance};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn write_lattice<T: Real>(lattice: &Lattice<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_lattice(lattice))?;
    Ok(())
}

pub fn read_lattice<T: Real>(path: impl AsRef<Path>) -> Result<Lattice<T>> {
    parse_lattice(&std::fs::read_to_string(path)?)
}

pub fn format_lattice<T: Real>(lattice: &Lattice<T>) -> String {
    let mut out = format!("{}\n", lattice.dim());
    for row in lattice.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{:.16e}", x.to_f64_lossy())).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    if let Some(p) = lattice.provenance() {
        if let Some(v) = p.prime {
            let _ = writeln!(out, "# prime={v}");
        }
        if let Some(v) = p.hecke_steps {
            let _ = writeln!(out, "# hecke_steps={v}");
        }
        if let Some(v) = p.seed {
            let _ = writeln!(out, "# seed={v}");
        }
        if let Some(v) = p.trial {
            let _ = writeln!(out, "# trial={v}");
        }
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_lattice<T: Real>(text: &str) -> Result<Lattice<T>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (ln, first) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| parse_err(1, "empty file, expected the dimension n"))?;
    let n: usize = first.parse().map_err(|_| parse_err(ln, format!("expected dimension n, found '{first}'")))?;
    if n == 0 {
        return Err(parse_err(ln, "dimension must be at least 1"));
    }
    let mut basis = Vec::with_capacity(n * n);
    let mut provenance = Provenance::default();
    let mut rows = 0;
    let mut last_line = ln;
    for (ln, line) in lines {
        last_line = ln;
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.trim().split_once('=') {
                let v: Option<u64> = v.trim().parse().ok();
                match k.trim() {
                    "prime" => provenance.prime = v,
                    "hecke_steps" => provenance.hecke_steps = v.and_then(|x| u32::try_from(x).ok()),
                    "seed" => provenance.seed = v,
                    "trial" => provenance.trial = v,
                    _ => {}
                }
            }
            continue;
        }
        if rows == n {
            return Err(parse_err(ln, format!("more than n = {n} basis rows")));
        }
        let vals: Vec<&str> = line.split_whitespace().collect();
        if vals.len() != n {
            return Err(parse_err(ln, format!("row has {} entries, expected n = {n}", vals.len())));
        }
        for v in vals {
            let x: f64 = v.parse().map_err(|_| parse_err(ln, format!("invalid number '{v}'")))?;
            basis.push(T::lit(x));
        }
        rows += 1;
    }
    if rows != n {
        return Err(parse_err(last_line, format!("found {rows} basis rows, expected n = {n}")));
    }
    let lat = Lattice::from_flat(n, basis)?;
    Ok(if provenance.is_empty() { lat } else { lat.with_provenance(provenance) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_integer_lattice() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z4.lat");
        let z = Lattice::<f64>::integer(4);
        write_lattice(&z, &path).unwrap();
        assert_eq!(read_lattice::<f64>(&path).unwrap(), z);
    }

    #[test]
    fn round_trip_is_bit_exact_with_provenance() {
        let a = 1.0f64 / 3.0;
        let l = Lattice::from_rows(vec![vec![a, 0.1], vec![0.7, 1.07 / a]])
            .unwrap()
            .with_provenance(Provenance { prime: Some(65537), hecke_steps: Some(2), seed: Some(3), trial: Some(11) });
        let back: Lattice<f64> = parse_lattice(&format_lattice(&l)).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn row_count_error_names_n() {
        let err = parse_lattice::<f64>("3\n1 0 0\n0 1 0\n").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("n = 3"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_lattice::<f64>("2\n1 0 0\n0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn covolume_violation_is_rejected() {
        let err = parse_lattice::<f64>("2\n2 0\n0 1\n").unwrap_err();
        assert!(matches!(err, Error::Covolume { .. }));
    }
}
