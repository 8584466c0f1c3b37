//! The instance CSV: `index,sentence,option1,option2,answer,distance`,
//! comma separated with RFC 4180 quoting and `\n` line endings.
//!
//! Export assigns `index` positionally. Import uses it as the instance id.
//! The file carries no parent column, so every `distance > 0` row is
//! attached to the seed (`distance = 0` row) nearest to it by token edit
//! distance; ties go to the closest seed above it in the file, then below.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::perturb::token_edit_distance;
use crate::text::{tokenize, validate_instance, Choice, InstanceId, Source, WscInstance};

use super::StoreError;

pub const CSV_HEADER: [&str; 6] = ["index", "sentence", "option1", "option2", "answer", "distance"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub index: u64,
    pub sentence: String,
    pub option1: String,
    pub option2: String,
    pub answer: u8,
    pub distance: u32,
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn export_csv<W: Write>(instances: &[WscInstance], out: W) -> Result<(), StoreError> {
    let mut w = writer(out);
    w.write_record(CSV_HEADER)?;
    for (index, inst) in instances.iter().enumerate() {
        w.serialize(CsvRow {
            index: index as u64,
            sentence: inst.sentence(),
            option1: inst.option1.clone(),
            option2: inst.option2.clone(),
            answer: inst.answer.number(),
            distance: inst.depth,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_csv_bytes(instances: &[WscInstance]) -> Vec<u8> {
    let mut buf = Vec::new();
    export_csv(instances, &mut buf).expect("writing to memory cannot fail");
    buf
}

/// Writes to a sibling temp file and renames it over `path`.
pub fn write_csv_file(path: impl AsRef<Path>, instances: &[WscInstance]) -> Result<(), StoreError> {
    super::write_atomic(path.as_ref(), &export_csv_bytes(instances))
}

fn malformed(row: usize, column: &str, reason: impl Into<String>) -> StoreError {
    StoreError::MalformedCsv { row, column: column.to_string(), reason: reason.into() }
}

pub fn import_csv<R: Read>(input: R) -> Result<Vec<WscInstance>, StoreError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers().map_err(|e| malformed(0, "header", e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(StoreError::HeaderMismatch { found: header.iter().collect::<Vec<_>>().join(",") });
    }

    let mut out: Vec<WscInstance> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| malformed(row, "-", e.to_string()))?;
        if record.len() != CSV_HEADER.len() {
            return Err(malformed(row, "-", format!("expected 6 fields, found {}", record.len())));
        }
        let field = |c: usize| record.get(c).unwrap_or_default();
        let index: u64 = field(0).parse().map_err(|_| malformed(row, "index", format!("{:?} is not an integer", field(0))))?;
        let answer = field(4)
            .parse::<u8>()
            .ok()
            .and_then(Choice::from_number)
            .ok_or_else(|| malformed(row, "answer", format!("{:?} is not 1 or 2", field(4))))?;
        let distance: u32 =
            field(5).parse().map_err(|_| malformed(row, "distance", format!("{:?} is not an integer", field(5))))?;
        let tokens = tokenize(field(1)).map_err(|e| malformed(row, "sentence", e.to_string()))?;
        out.push(WscInstance {
            id: InstanceId(index),
            tokens,
            option1: field(2).to_string(),
            option2: field(3).to_string(),
            answer,
            depth: distance,
            parent_id: None,
            source: if distance == 0 { Source::Seed } else { Source::Human },
        });
    }

    let mut ids: Vec<u64> = out.iter().map(|i| i.id.0).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(malformed(0, "index", format!("index {} repeats", w[0])));
    }

    let seeds: Vec<usize> = (0..out.len()).filter(|&i| out[i].depth == 0).collect();
    for row in 0..out.len() {
        if out[row].depth > 0 {
            let seed = nearest_seed(&out, &seeds, row).ok_or_else(|| malformed(row + 1, "distance", "perturbed row but the file has no seed rows"))?;
            out[row].parent_id = Some(out[seed].id);
        }
        if let Err(v) = validate_instance(&out[row]) {
            let list = v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
            return Err(malformed(row + 1, "sentence", list));
        }
    }
    Ok(out)
}

/// Seed row closest to `row` by token edit distance. Candidates are visited
/// upward from `row` and then downward, so the first minimum found is the
/// preferred tie winner. A length-difference bound skips hopeless seeds.
fn nearest_seed(rows: &[WscInstance], seeds: &[usize], row: usize) -> Option<usize> {
    let split = seeds.partition_point(|&s| s < row);
    let order = seeds[..split].iter().rev().chain(seeds[split..].iter());
    let target = &rows[row].tokens;
    let mut best: Option<(usize, usize)> = None;
    for &s in order {
        let seed = &rows[s].tokens;
        if let Some((_, d)) = best {
            if seed.len().abs_diff(target.len()) >= d {
                continue;
            }
        }
        let d = token_edit_distance(seed, target);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((s, d));
        }
    }
    best.map(|(s, _)| s)
}

pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Vec<WscInstance>, StoreError> {
    let bytes = fs::read(path.as_ref()).map_err(|e| StoreError::io(path.as_ref(), e))?;
    import_csv(bytes.as_slice())
}
