//! Sweep CSV files: `#` comment lines carrying the resolved config, then
//! one row per realization in grid order.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use ddanneal::analysis::{SweepRow, SweepRunner};
use rayon::prelude::*;

use crate::config::Resolved;

const CONFIG_PREFIX: &str = "# config: ";

pub fn header_lines(config: &Resolved) -> Result<Vec<String>> {
    Ok(vec![
        format!("{CONFIG_PREFIX}{}", serde_json::to_string(config)?),
        format!("# seed: {}", config.master_seed),
    ])
}

fn embedded_config(path: &Path) -> Result<Option<String>> {
    let reader = BufReader::new(File::open(path)?);
    for line in reader.lines() {
        let line = line?;
        if let Some(rest) = line.strip_prefix(CONFIG_PREFIX) {
            return Ok(Some(rest.to_string()));
        }
        if !line.starts_with('#') {
            break;
        }
    }
    Ok(None)
}

pub fn read_rows(path: &Path) -> Result<Vec<SweepRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<SweepRow>, _>>()
        .with_context(|| format!("reading sweep rows from {}", path.display()))
}

fn append_rows(path: &Path, rows: &[SweepRow], with_header: bool) -> Result<()> {
    let file = OpenOptions::new().append(true).open(path)?;
    let mut writer = csv::WriterBuilder::new().has_headers(with_header).from_writer(file);
    for r in rows {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

fn write_fresh(path: &Path, config: &Resolved) -> Result<()> {
    let mut file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    for line in header_lines(config)? {
        writeln!(file, "{line}")?;
    }
    Ok(())
}

/// Runs every grid cell not yet present in `path` and leaves the file with
/// all rows in grid order. Rows are appended after each (amplitude, pulse
/// count) group so an interrupted run can be resumed.
pub fn run_sweep(runner: &SweepRunner, config: &Resolved, path: &Path, resume: bool) -> Result<usize> {
    let spec = config.sweep_spec();
    let cells = spec.cells();
    let exists = path.exists() && std::fs::metadata(path)?.len() > 0;
    let mut done: HashMap<u64, SweepRow> = HashMap::new();
    if exists {
        if !resume {
            bail!("{} already exists; pass --resume to continue it", path.display());
        }
        let expected = serde_json::to_string(config)?;
        match embedded_config(path)? {
            Some(found) if found == expected => {}
            _ => bail!("{} was written with a different configuration", path.display()),
        }
        for row in read_rows(path)? {
            done.insert(row.seed, row);
        }
    } else {
        write_fresh(path, config)?;
    }

    let mut header_pending = done.is_empty();
    let mut computed = 0;
    for group in cells.chunks(spec.n_realizations) {
        let todo: Vec<_> = group.iter().filter(|c| !done.contains_key(&c.seed)).collect();
        if todo.is_empty() {
            continue;
        }
        let rows = todo
            .par_iter()
            .map(|c| runner.run_cell(c))
            .collect::<ddanneal::Result<Vec<_>>>()?;
        append_rows(path, &rows, header_pending)?;
        header_pending = false;
        computed += rows.len();
        for r in rows {
            done.insert(r.seed, r);
        }
    }

    // rewrite in grid order so resumed files match uninterrupted ones byte for byte
    let ordered: Vec<SweepRow> = cells
        .iter()
        .map(|c| done.remove(&c.seed).context("sweep row missing after run"))
        .collect::<Result<_>>()?;
    write_fresh(path, config)?;
    append_rows(path, &ordered, true)?;
    Ok(computed)
}
