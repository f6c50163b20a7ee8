//! Plain-text grid serialization and CSV export.
//!
//! ```text
//! critdecay-grid 1
//! dim 2
//! lower -1 -1
//! upper 1 1
//! cells 4 4
//! 0e0
//! 1.5e0
//! ...
//! ```
//!
//! Values follow the header one per line in row-major order (last axis
//! fastest), printed with `{:e}` so that `f64` round-trips exactly. Blank
//! lines and lines starting with `#` are ignored.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Domain, GridFunction};
use crate::real::Real;

const MAGIC: &str = "critdecay-grid 1";

pub fn write_grid<T: Real, W: Write>(f: &GridFunction<T>, mut w: W) -> std::io::Result<()> {
    let d = f.domain();
    let join = |xs: &[T]| xs.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" ");
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "dim {}", d.dim())?;
    writeln!(w, "lower {}", join(d.lower()))?;
    writeln!(w, "upper {}", join(d.upper()))?;
    let cells: Vec<String> = d.cells_per_axis().iter().map(|m| m.to_string()).collect();
    writeln!(w, "cells {}", cells.join(" "))?;
    for v in f.values() {
        writeln!(w, "{v:e}")?;
    }
    Ok(())
}

fn parse_list<X: std::str::FromStr>(line: usize, key: &str, text: &str) -> Result<Vec<X>> {
    let rest = text
        .strip_prefix(key)
        .ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected `{key}`"),
        })?;
    rest.split_whitespace()
        .map(|tok| {
            tok.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad number `{tok}`"),
            })
        })
        .collect()
}

pub fn read_grid<T: Real, R: BufRead>(r: R) -> Result<GridFunction<T>> {
    let mut lines = r
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty() || s.trim_start().starts_with('#')));
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, Ok(s))) => Ok((i, s.trim().to_string())),
            Some((_, Err(e))) => Err(e.into()),
            None => Err(Error::Parse {
                line: 0,
                msg: format!("unexpected end of input, expected {what}"),
            }),
        }
    };
    let (i, magic) = next("header")?;
    if magic != MAGIC {
        return Err(Error::Parse {
            line: i,
            msg: format!("expected `{MAGIC}`"),
        });
    }
    let (i, s) = next("dim")?;
    let dim: Vec<usize> = parse_list(i, "dim", &s)?;
    let (i, s) = next("lower")?;
    let lower: Vec<T> = parse_list(i, "lower", &s)?;
    let (i, s) = next("upper")?;
    let upper: Vec<T> = parse_list(i, "upper", &s)?;
    let (i, s) = next("cells")?;
    let cells: Vec<usize> = parse_list(i, "cells", &s)?;
    if dim.len() != 1 || [lower.len(), upper.len(), cells.len()].iter().any(|&n| n != dim[0]) {
        return Err(Error::Parse {
            line: i,
            msg: "header lengths disagree with dim".into(),
        });
    }
    let domain = Domain::new(&lower, &upper, &cells)?;
    let mut values = Vec::with_capacity(domain.cell_count());
    for _ in 0..domain.cell_count() {
        let (i, s) = next("value")?;
        values.push(s.parse::<T>().map_err(|_| Error::Parse {
            line: i,
            msg: format!("bad value `{s}`"),
        })?);
    }
    if let Ok((i, _)) = next("end") {
        return Err(Error::Parse {
            line: i,
            msg: "trailing data after the last value".into(),
        });
    }
    GridFunction::new(domain, values)
}

pub fn save_grid<T: Real>(f: &GridFunction<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_grid(f, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_grid<T: Real>(path: impl AsRef<Path>) -> Result<GridFunction<T>> {
    read_grid(BufReader::new(File::open(path)?))
}

/// One row per cell: centre coordinates `x0, x1, ...` then `value`.
pub fn write_grid_csv<T: Real, W: Write>(f: &GridFunction<T>, mut w: W) -> std::io::Result<()> {
    let d = f.domain();
    let header: Vec<String> = (0..d.dim()).map(|a| format!("x{a}")).collect();
    writeln!(w, "{},value", header.join(","))?;
    for (idx, v) in f.values().iter().enumerate() {
        let c = d.center(idx);
        let coords: Vec<String> = c[..d.dim()].iter().map(|x| format!("{x:e}")).collect();
        writeln!(w, "{},{v:e}", coords.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, TestFunctionSpec};

    #[test]
    fn roundtrip_is_exact() {
        let d = Domain::new(&[-1.0, 0.0], &[1.0, 0.5], &[7, 5]).unwrap();
        let f = generate(
            &TestFunctionSpec::Noise {
                seed: 3,
                low: -2.0,
                high: 2.0,
                density: 0.7,
            },
            &d,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_grid(&f, &mut buf).unwrap();
        let back: GridFunction<f64> = read_grid(buf.as_slice()).unwrap();
        assert!(back.domain().same_grid(f.domain()));
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn rejects_malformed() {
        let short = "critdecay-grid 1\ndim 1\nlower 0\nupper 1\ncells 3\n1\n2\n";
        assert!(matches!(read_grid::<f64, _>(short.as_bytes()), Err(Error::Parse { .. })));
        let long = "critdecay-grid 1\ndim 1\nlower 0\nupper 1\ncells 1\n1\n2\n";
        assert!(read_grid::<f64, _>(long.as_bytes()).is_err());
        let bad = "critdecay-grid 1\ndim 1\nlower 0\nupper 1\ncells 1\nxyz\n";
        assert!(read_grid::<f64, _>(bad.as_bytes()).is_err());
        let comments = "# saved\ncritdecay-grid 1\ndim 1\n\nlower 0\nupper 1\ncells 1\n2.5\n";
        let f: GridFunction<f64> = read_grid(comments.as_bytes()).unwrap();
        assert_eq!(f.values(), &[2.5]);
    }

    #[test]
    fn csv_has_one_row_per_cell() {
        let d = Domain::cube(2, 0.0, 1.0, 3).unwrap();
        let f = GridFunction::zeros(d);
        let mut buf = Vec::new();
        write_grid_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 10);
        assert!(text.starts_with("x0,x1,value\n"));
    }
}
