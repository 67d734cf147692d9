//! Plain-text signal files.
//!
//! ```text
//! # vcsig v1 n=<int> d=<int> x0=<float> dx=<float> p=<float-or-inf>
//! re im re im ...      (n lines, d complex values each)
//! ```
//!
//! Floats are written in shortest round-trip form, so write-then-read is bit-exact.
//!
//! Fields on the time–frequency–scale grid are stored as one text header line
//!
//! ```text
//! # vcfield v1 eta=<lo>,<step>,<n> y=<lo>,<step>,<n> t=<t_min>,<ratio>,<n> d=<int> p=<float-or-inf>
//! ```
//!
//! followed by the row-major node values as little-endian `f64` pairs `(re, im)`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::{Grid, SampledSignal};
use crate::space::NormedSpace;
use crate::tfs::{GeometricAxis, OuterField, TfsGrid, UniformAxis};

const MAGIC: &str = "# vcsig v1";
const FIELD_MAGIC: &str = "# vcfield v1";

fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

pub fn to_string(signal: &SampledSignal) -> String {
    let g = signal.grid();
    let mut out = format!(
        "{MAGIC} n={} d={} x0={} dx={} p={}\n",
        g.n,
        signal.dim(),
        fmt_f64(g.x0),
        fmt_f64(g.dx),
        fmt_f64(signal.space().p())
    );
    for k in 0..g.n {
        let row: Vec<String> = signal
            .sample(k)
            .iter()
            .flat_map(|z| [fmt_f64(z.re), fmt_f64(z.im)])
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_float(s: &str, line: usize, what: &str) -> Result<f64> {
    match s {
        "inf" | "+inf" => Ok(f64::INFINITY),
        _ => s
            .parse::<f64>()
            .map_err(|_| parse_err(line, format!("cannot parse {what} from {s:?}"))),
    }
}

pub fn from_str(text: &str) -> Result<SampledSignal> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| parse_err(1, format!("header must start with {MAGIC:?}")))?;
    let (mut n, mut d, mut x0, mut dx, mut p) = (None, None, None, None, None);
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("malformed header field {field:?}")))?;
        match key {
            "n" => n = Some(value.parse::<usize>().map_err(|_| parse_err(1, format!("bad n {value:?}")))?),
            "d" => d = Some(value.parse::<usize>().map_err(|_| parse_err(1, format!("bad d {value:?}")))?),
            "x0" => x0 = Some(parse_float(value, 1, "x0")?),
            "dx" => dx = Some(parse_float(value, 1, "dx")?),
            "p" => p = Some(parse_float(value, 1, "p")?),
            other => return Err(parse_err(1, format!("unknown header field {other:?}"))),
        }
    }
    let missing = |name: &str| parse_err(1, format!("header lacks {name}"));
    let (n, d) = (n.ok_or_else(|| missing("n"))?, d.ok_or_else(|| missing("d"))?);
    let (x0, dx, p) = (
        x0.ok_or_else(|| missing("x0"))?,
        dx.ok_or_else(|| missing("dx"))?,
        p.ok_or_else(|| missing("p"))?,
    );
    let grid = Grid::new(x0, dx, n).map_err(|e| parse_err(1, e.to_string()))?;
    let space = NormedSpace::new(d, p).map_err(|e| parse_err(1, e.to_string()))?;
    let mut values = Vec::with_capacity(n * d);
    let mut rows = 0;
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if rows == n {
            return Err(parse_err(lineno, format!("more than n = {n} data lines")));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 * d {
            return Err(parse_err(
                lineno,
                format!("expected {} values for d = {d}, found {}", 2 * d, fields.len()),
            ));
        }
        for pair in fields.chunks(2) {
            let re = parse_float(pair[0], lineno, "real part")?;
            let im = parse_float(pair[1], lineno, "imaginary part")?;
            if !re.is_finite() || !im.is_finite() {
                return Err(parse_err(lineno, "non-finite sample"));
            }
            values.push(Complex64::new(re, im));
        }
        rows += 1;
    }
    if rows != n {
        return Err(parse_err(text.lines().count() + 1, format!("found {rows} data lines, header says {n}")));
    }
    SampledSignal::new(grid, space, values)
}

pub fn write_signal(path: &Path, signal: &SampledSignal) -> Result<()> {
    fs::write(path, to_string(signal)).map_err(io_err(path))
}

pub fn read_signal(path: &Path) -> Result<SampledSignal> {
    from_str(&fs::read_to_string(path).map_err(io_err(path))?)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn field_to_bytes(field: &OuterField) -> Vec<u8> {
    let g = field.grid();
    let header = format!(
        "{FIELD_MAGIC} eta={},{},{} y={},{},{} t={},{},{} d={} p={}\n",
        fmt_f64(g.eta.lo),
        fmt_f64(g.eta.step),
        g.eta.n,
        fmt_f64(g.y.lo),
        fmt_f64(g.y.step),
        g.y.n,
        fmt_f64(g.t.t_min),
        fmt_f64(g.t.ratio),
        g.t.n,
        field.space().dim(),
        fmt_f64(field.space().p())
    );
    let mut out = header.into_bytes();
    out.reserve(field.values().len() * 16);
    for z in field.values() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

fn parse_triple(value: &str, what: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 3 {
        return Err(parse_err(1, format!("{what} needs three comma-separated entries, got {value:?}")));
    }
    let n = parts[2]
        .parse::<usize>()
        .map_err(|_| parse_err(1, format!("bad {what} count {:?}", parts[2])))?;
    Ok((parse_float(parts[0], 1, what)?, parse_float(parts[1], 1, what)?, n))
}

pub fn field_from_bytes(bytes: &[u8]) -> Result<OuterField> {
    let end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| parse_err(1, "missing header line"))?;
    let header = std::str::from_utf8(&bytes[..end]).map_err(|_| parse_err(1, "header is not UTF-8"))?;
    let rest = header
        .strip_prefix(FIELD_MAGIC)
        .ok_or_else(|| parse_err(1, format!("header must start with {FIELD_MAGIC:?}")))?;
    let (mut eta, mut y, mut t, mut d, mut p) = (None, None, None, None, None);
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("malformed header field {field:?}")))?;
        match key {
            "eta" => eta = Some(parse_triple(value, "eta")?),
            "y" => y = Some(parse_triple(value, "y")?),
            "t" => t = Some(parse_triple(value, "t")?),
            "d" => d = Some(value.parse::<usize>().map_err(|_| parse_err(1, format!("bad d {value:?}")))?),
            "p" => p = Some(parse_float(value, 1, "p")?),
            other => return Err(parse_err(1, format!("unknown header field {other:?}"))),
        }
    }
    let missing = |name: &str| parse_err(1, format!("header lacks {name}"));
    let (eta, y, t) = (eta.ok_or_else(|| missing("eta"))?, y.ok_or_else(|| missing("y"))?, t.ok_or_else(|| missing("t"))?);
    let space = NormedSpace::new(d.ok_or_else(|| missing("d"))?, p.ok_or_else(|| missing("p"))?)
        .map_err(|e| parse_err(1, e.to_string()))?;
    let grid = TfsGrid::new(
        UniformAxis { lo: eta.0, step: eta.1, n: eta.2 },
        UniformAxis { lo: y.0, step: y.1, n: y.2 },
        GeometricAxis { t_min: t.0, ratio: t.1, n: t.2 },
    );
    let body = &bytes[end + 1..];
    let expected = grid.len() * space.dim() * 16;
    if body.len() != expected {
        return Err(parse_err(2, format!("payload has {} bytes, header implies {expected}", body.len())));
    }
    let values = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect();
    OuterField::new(grid, space, values).map_err(|e| parse_err(2, e.to_string()))
}

pub fn write_field(path: &Path, field: &OuterField) -> Result<()> {
    fs::write(path, field_to_bytes(field)).map_err(io_err(path))
}

pub fn read_field(path: &Path) -> Result<OuterField> {
    field_from_bytes(&fs::read(path).map_err(io_err(path))?)
}
