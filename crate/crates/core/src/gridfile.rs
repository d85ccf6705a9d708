//! The `NLGRID v1` text format.
//!
//! ```text
//! NLGRID v1
//! d 2
//! dims 4 3
//! origin 0 0
//! spacing 0.25
//! encoding raw
//! 010
//! ...
//! ```
//!
//! `raw` payloads hold one row of `n_d` characters per line in cell order (last
//! axis fastest); `rle` payloads hold `<bit> <count>` pairs.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use bitvec::prelude::*;

use crate::error::{Error, Result};
use crate::grid::IndicatorGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Raw,
    Rle,
}

pub fn from_file(path: impl AsRef<Path>) -> Result<IndicatorGrid> {
    read_grid(std::fs::File::open(path)?)
}

pub fn to_file(grid: &IndicatorGrid, path: impl AsRef<Path>, encoding: Encoding) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_grid(grid, &mut f, encoding)?;
    f.flush()?;
    Ok(())
}

pub fn write_grid<W: Write>(grid: &IndicatorGrid, w: &mut W, encoding: Encoding) -> Result<()> {
    let mut s = String::new();
    let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(" ");
    writeln!(s, "NLGRID v1").unwrap();
    writeln!(s, "d {}", grid.dim()).unwrap();
    writeln!(s, "dims {}", join(&mut grid.dims().iter().map(|n| n.to_string()))).unwrap();
    writeln!(s, "origin {}", join(&mut grid.origin().iter().map(|o| format!("{o:?}")))).unwrap();
    writeln!(s, "spacing {:?}", grid.spacing()).unwrap();
    match encoding {
        Encoding::Raw => {
            writeln!(s, "encoding raw").unwrap();
            let n_last = *grid.dims().last().unwrap();
            for row in grid.bits().chunks(n_last) {
                s.extend(row.iter().map(|b| if *b { '1' } else { '0' }));
                s.push('\n');
            }
        }
        Encoding::Rle => {
            writeln!(s, "encoding rle").unwrap();
            let bits = grid.bits();
            let mut i = 0;
            while i < bits.len() {
                let b = bits[i];
                let run = bits[i..].iter().take_while(|x| **x == b).count();
                writeln!(s, "{} {}", b as u8, run).unwrap();
                i += run;
            }
        }
    }
    w.write_all(s.as_bytes())?;
    Ok(())
}

pub fn read_grid<R: Read>(r: R) -> Result<IndicatorGrid> {
    let mut lines = BufReader::new(r).lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((n, Ok(l))) => Ok((n, l)),
            Some((_, Err(e))) => Err(e.into()),
            None => Err(Error::Format { line: 0, msg: format!("unexpected end of file, expected {what}") }),
        }
    };

    let (n, magic) = next("header")?;
    if magic.trim() != "NLGRID v1" {
        return Err(fmt_err(n, "expected `NLGRID v1`"));
    }
    let (n, l) = next("d")?;
    let d: usize = keyed(n, &l, "d")?.first().map(|v| parse(n, v)).transpose()?.unwrap_or(0);
    if d == 0 {
        return Err(fmt_err(n, "dimension must be a positive integer"));
    }
    let (n, l) = next("dims")?;
    let dims: Vec<usize> = keyed(n, &l, "dims")?.iter().map(|v| parse(n, v)).collect::<Result<_>>()?;
    if dims.len() != d || dims.contains(&0) {
        return Err(fmt_err(n, "dims must list d positive counts"));
    }
    let (n, l) = next("origin")?;
    let origin: Vec<f64> = keyed(n, &l, "origin")?.iter().map(|v| parse(n, v)).collect::<Result<_>>()?;
    if origin.len() != d || origin.iter().any(|o: &f64| !o.is_finite()) {
        return Err(fmt_err(n, "origin must list d finite coordinates"));
    }
    let (n, l) = next("spacing")?;
    let sp = keyed(n, &l, "spacing")?;
    if sp.len() != 1 {
        return Err(fmt_err(n, "spacing takes one value"));
    }
    let spacing: f64 = parse(n, sp[0])?;
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(fmt_err(n, "spacing must be positive"));
    }
    let (n, l) = next("encoding")?;
    let enc = match keyed(n, &l, "encoding")?.as_slice() {
        ["raw"] => Encoding::Raw,
        ["rle"] => Encoding::Rle,
        _ => return Err(fmt_err(n, "encoding must be `raw` or `rle`")),
    };

    let total = dims.iter().try_fold(1usize, |a, &b| a.checked_mul(b)).ok_or_else(|| fmt_err(3, "grid too large"))?;
    let mut bits: BitVec = BitVec::with_capacity(total);
    match enc {
        Encoding::Raw => {
            let n_last = dims[d - 1];
            while bits.len() < total {
                let (n, l) = next("grid row")?;
                let row = l.trim_end();
                if row.len() != n_last {
                    return Err(fmt_err(n, &format!("row has {} cells, expected {n_last}", row.len())));
                }
                for c in row.chars() {
                    match c {
                        '0' => bits.push(false),
                        '1' => bits.push(true),
                        _ => return Err(fmt_err(n, &format!("unexpected character {c:?} in raw row"))),
                    }
                }
            }
        }
        Encoding::Rle => {
            while bits.len() < total {
                let (n, l) = next("run")?;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.is_empty() {
                    continue;
                }
                if !toks.len().is_multiple_of(2) {
                    return Err(fmt_err(n, "runs come in `<bit> <count>` pairs"));
                }
                for pair in toks.chunks(2) {
                    let bit = match pair[0] {
                        "0" => false,
                        "1" => true,
                        t => return Err(fmt_err(n, &format!("run bit must be 0 or 1, got {t:?}"))),
                    };
                    let count: usize = parse(n, pair[1])?;
                    if bits.len() + count > total {
                        return Err(fmt_err(n, &format!("runs exceed the {total} cells of the grid")));
                    }
                    bits.extend(std::iter::repeat_n(bit, count));
                }
            }
        }
    }
    for (n, l) in lines {
        if !l?.trim().is_empty() {
            return Err(fmt_err(n, "trailing data after the payload"));
        }
    }
    IndicatorGrid::new(origin, spacing, dims, bits)
}

fn keyed<'a>(n: usize, line: &'a str, key: &str) -> Result<Vec<&'a str>> {
    let mut toks = line.split_whitespace();
    if toks.next() != Some(key) {
        return Err(fmt_err(n, &format!("expected `{key}`")));
    }
    Ok(toks.collect())
}

fn parse<T: std::str::FromStr>(n: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| fmt_err(n, &format!("cannot parse {s:?}")))
}

fn fmt_err(line: usize, msg: &str) -> Error {
    Error::Format { line, msg: msg.to_string() }
}
