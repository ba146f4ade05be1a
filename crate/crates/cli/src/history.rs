//! History CSV files.
//!
//! The first line is a comment carrying the run metadata:
//!
//! ```text
//! # fingerprint=3f0c… smoothness=1.0000000000000000e0 termination=converged
//! k,x1,x2,F1,F2,theta_fw,gamma,d_norm,theta_tilde
//! ```
//!
//! Floats are written with 17 significant digits. `gamma` is empty on the
//! final row and the `theta_tilde` column is present only when recorded.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use mfw_core::{IterateRecord, RunHistory, Termination};

use crate::{CliError, Result};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn header(n: usize, m: usize, theta_tilde: bool) -> Vec<String> {
    let mut h = vec!["k".to_string()];
    h.extend((1..=n).map(|i| format!("x{i}")));
    h.extend((1..=m).map(|j| format!("F{j}")));
    h.extend(["theta_fw", "gamma", "d_norm"].map(String::from));
    if theta_tilde {
        h.push("theta_tilde".into());
    }
    h
}

pub fn write<W: Write>(history: &RunHistory, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "# fingerprint={} smoothness={} termination={}",
        history.fingerprint,
        num(history.smoothness),
        history.termination
    )?;
    let first = &history.records[0];
    let tt = history.has_theta_tilde();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(first.x.len(), first.f_values.len(), tt))?;
    for r in &history.records {
        let mut row = vec![r.k.to_string()];
        row.extend(r.x.iter().map(|v| num(*v)));
        row.extend(r.f_values.iter().map(|v| num(*v)));
        row.push(num(r.theta_fw));
        row.push(r.gamma.map(num).unwrap_or_default());
        row.push(num(r.d_norm));
        if tt {
            row.push(num(r.theta_tilde.unwrap_or(f64::NAN)));
        }
        w.write_record(&row)?;
    }
    w.flush()
}

pub fn save(history: &RunHistory, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write(history, std::io::BufWriter::new(file)).map_err(|e| CliError::io(path, e))
}

pub fn load(path: &Path) -> Result<RunHistory> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read(file).map_err(|message| CliError::Parse {
        path: path.display().to_string(),
        message,
    })
}

fn field<'a>(meta: &'a str, key: &str) -> std::result::Result<&'a str, String> {
    meta.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
        .ok_or_else(|| format!("metadata line has no `{key}`"))
}

pub fn read<R: Read>(input: R) -> std::result::Result<RunHistory, String> {
    let mut input = BufReader::new(input);
    let mut meta = String::new();
    input.read_line(&mut meta).map_err(|e| e.to_string())?;
    let meta = meta
        .trim()
        .strip_prefix('#')
        .ok_or("first line must be the `# fingerprint=…` metadata comment")?;
    let fingerprint = field(meta, "fingerprint")?.to_string();
    let smoothness: f64 = field(meta, "smoothness")?
        .parse()
        .map_err(|e| format!("smoothness: {e}"))?;
    let termination = match field(meta, "termination")? {
        "converged" => Termination::Converged,
        "iteration-cap" => Termination::IterationCap,
        t => return Err(format!("unknown termination {t:?}")),
    };

    let mut rdr = csv::Reader::from_reader(input);
    let cols: Vec<String> = rdr
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(String::from)
        .collect();
    let n = cols.iter().filter(|c| c.starts_with('x')).count();
    let m = cols.iter().filter(|c| c.starts_with('F')).count();
    let tt = cols.last().map(String::as_str) == Some("theta_tilde");
    if n == 0 || m == 0 || cols != header(n, m, tt) {
        return Err(format!("unexpected header {}", cols.join(",")));
    }

    let mut records = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| e.to_string())?;
        let at = |i: usize| -> std::result::Result<f64, String> {
            row[i]
                .parse()
                .map_err(|e| format!("row {}, column {}: {e}", line + 1, cols[i]))
        };
        let k: usize = row[0]
            .parse()
            .map_err(|e| format!("row {}, column k: {e}", line + 1))?;
        let x = (1..=n).map(at).collect::<std::result::Result<_, _>>()?;
        let f_values = (n + 1..=n + m).map(at).collect::<std::result::Result<_, _>>()?;
        let base = n + m + 1;
        let gamma = if row[base + 1].is_empty() {
            None
        } else {
            Some(at(base + 1)?)
        };
        records.push(IterateRecord {
            k,
            x,
            f_values,
            theta_fw: at(base)?,
            gamma,
            d_norm: at(base + 2)?,
            theta_tilde: if tt { Some(at(base + 3)?) } else { None },
        });
    }
    if records.is_empty() {
        return Err("history has no rows".into());
    }
    Ok(RunHistory {
        records,
        termination,
        fingerprint,
        smoothness,
    })
}
