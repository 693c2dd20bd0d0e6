//! Reading labelled tables and edge lists, writing results.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scree::ScreeTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    /// Real-valued measurements, observations in rows.
    Measurements,
    /// Nonnegative counts; all-zero rows and columns are dropped.
    Contingency,
    /// One group label per observation, read into a zero/one coding.
    Groups,
    /// Edge list, read into an adjacency matrix.
    Edges,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub matrix: DMatrix<f64>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub kind: DatasetKind,
    /// Non-fatal notes produced while reading (dropped lines).
    pub warnings: Vec<String>,
}

impl Dataset {
    /// Rows reordered to follow `labels`; every label must be present.
    pub fn aligned_to(&self, labels: &[String], path: &Path) -> Result<DMatrix<f64>> {
        let index: HashMap<&str, usize> = self.row_labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut rows = Vec::with_capacity(labels.len());
        for label in labels {
            match index.get(label.as_str()) {
                Some(&i) => rows.push(i),
                None => {
                    return Err(Error::InvalidInput(format!(
                        "{}: no row labelled {label:?}",
                        path.display()
                    )))
                }
            }
        }
        Ok(DMatrix::from_fn(labels.len(), self.matrix.ncols(), |i, j| self.matrix[(rows[i], j)]))
    }
}

/// First line decides: a tab means tab-separated, otherwise comma-separated.
fn sniff_delimiter(text: &str) -> Option<u8> {
    let first = text.lines().find(|l| !l.trim().is_empty())?;
    if first.contains('\t') {
        Some(b'\t')
    } else if first.contains(',') {
        Some(b',')
    } else {
        None
    }
}

fn records(text: &str, delimiter: u8) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        out.push(rec.iter().map(str::to_string).collect());
    }
    Ok(out)
}

fn check_unique(labels: &[String], path: &Path, axis: &'static str) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel {
                path: path.to_path_buf(),
                axis,
                label: l.clone(),
            });
        }
    }
    Ok(())
}

/// A labelled table: header row of column labels, first column of row labels.
/// `delimiter` forces the separator; otherwise tab or comma is detected.
pub fn read_table(path: impl AsRef<Path>, kind: DatasetKind, delimiter: Option<u8>) -> Result<Dataset> {
    let path = path.as_ref();
    if kind == DatasetKind::Edges {
        let g = read_edges_with(path, delimiter)?;
        return Ok(Dataset {
            matrix: g.adjacency().clone(),
            row_labels: g.labels().to_vec(),
            col_labels: g.labels().to_vec(),
            kind,
            warnings: Vec::new(),
        });
    }
    let text = fs::read_to_string(path)?;
    let delimiter = delimiter.or_else(|| sniff_delimiter(&text)).unwrap_or(b',');
    let mut recs = records(&text, delimiter)?.into_iter();
    let header = recs.next().ok_or_else(|| Error::EmptyTable(path.to_path_buf()))?;
    let col_labels: Vec<String> = header.into_iter().skip(1).collect();
    let body: Vec<Vec<String>> = recs.collect();
    if body.is_empty() || col_labels.is_empty() {
        return Err(Error::EmptyTable(path.to_path_buf()));
    }
    check_unique(&col_labels, path, "column")?;
    let row_labels: Vec<String> = body.iter().map(|r| r[0].clone()).collect();
    check_unique(&row_labels, path, "row")?;
    for (r, rec) in body.iter().enumerate() {
        if rec.len() != col_labels.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                row_labels[r],
                rec.len(),
                col_labels.len() + 1
            )));
        }
    }

    if kind == DatasetKind::Groups {
        return groups_dataset(path, row_labels, col_labels, &body);
    }

    let mut matrix = DMatrix::zeros(body.len(), col_labels.len());
    for (i, rec) in body.iter().enumerate() {
        for (j, cell) in rec[1..].iter().enumerate() {
            let bad = || Error::Parse {
                path: path.to_path_buf(),
                row: row_labels[i].clone(),
                column: col_labels[j].clone(),
                value: cell.clone(),
            };
            let v: f64 = cell.parse().map_err(|_| bad())?;
            if !v.is_finite() || (kind == DatasetKind::Contingency && v < 0.0) {
                return Err(bad());
            }
            matrix[(i, j)] = v;
        }
    }
    let mut data = Dataset {
        matrix,
        row_labels,
        col_labels,
        kind,
        warnings: Vec::new(),
    };
    if kind == DatasetKind::Contingency {
        drop_empty_lines(&mut data);
    }
    Ok(data)
}

fn drop_empty_lines(data: &mut Dataset) {
    let m = &data.matrix;
    let rows: Vec<usize> = (0..m.nrows()).filter(|&i| m.row(i).sum() != 0.0).collect();
    let cols: Vec<usize> = (0..m.ncols()).filter(|&j| m.column(j).sum() != 0.0).collect();
    if rows.len() == m.nrows() && cols.len() == m.ncols() {
        return;
    }
    for i in (0..m.nrows()).filter(|i| !rows.contains(i)) {
        data.warnings.push(format!("dropping all-zero row {}", data.row_labels[i]));
    }
    for j in (0..m.ncols()).filter(|j| !cols.contains(j)) {
        data.warnings.push(format!("dropping all-zero column {}", data.col_labels[j]));
    }
    data.matrix = DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]);
    data.row_labels = rows.iter().map(|&i| data.row_labels[i].clone()).collect();
    data.col_labels = cols.iter().map(|&j| data.col_labels[j].clone()).collect();
}

/// Group files carry one label column; the result is the zero/one coding with
/// groups in order of first appearance as columns.
fn groups_dataset(path: &Path, row_labels: Vec<String>, header: Vec<String>, body: &[Vec<String>]) -> Result<Dataset> {
    if header.len() != 1 {
        return Err(Error::InvalidInput(format!(
            "{}: a group file has exactly one label column, found {}",
            path.display(),
            header.len()
        )));
    }
    let mut groups: Vec<String> = Vec::new();
    let assignment: Vec<usize> = body
        .iter()
        .map(|rec| match groups.iter().position(|g| *g == rec[1]) {
            Some(k) => k,
            None => {
                groups.push(rec[1].clone());
                groups.len() - 1
            }
        })
        .collect();
    let matrix = DMatrix::from_fn(body.len(), groups.len(), |i, k| if assignment[i] == k { 1.0 } else { 0.0 });
    Ok(Dataset {
        matrix,
        row_labels,
        col_labels: groups,
        kind: DatasetKind::Groups,
        warnings: Vec::new(),
    })
}

fn is_edge_header(fields: &[String]) -> bool {
    const NAMES: [(&str, &str); 4] = [("source", "target"), ("from", "to"), ("node1", "node2"), ("u", "v")];
    if fields.first().is_some_and(|f| f.starts_with('#')) {
        return true;
    }
    fields.len() == 2
        && NAMES
            .iter()
            .any(|(a, b)| fields[0].eq_ignore_ascii_case(a) && fields[1].eq_ignore_ascii_case(b))
}

/// Undirected simple graph from a two-column list of node labels. A first line
/// starting with `#` or reading `source,target` (`from,to`, `node1,node2`, `u,v`)
/// is a header. Nodes are numbered in order of first appearance.
pub fn read_edges(path: impl AsRef<Path>) -> Result<Graph> {
    read_edges_with(path.as_ref(), None)
}

pub fn read_edges_with(path: &Path, delimiter: Option<u8>) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    let delimiter = match delimiter.or_else(|| sniff_delimiter(&text)) {
        Some(d) => d,
        None if text.trim().is_empty() => return Err(Error::EmptyTable(path.to_path_buf())),
        None => {
            return Err(Error::InvalidInput(format!(
                "{}: unknown delimiter (expected comma or tab)",
                path.display()
            )))
        }
    };
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut node = |name: &str, labels: &mut Vec<String>| {
        *index.entry(name.to_string()).or_insert_with(|| {
            labels.push(name.to_string());
            labels.len() - 1
        })
    };
    for (line, rec) in records(&text, delimiter)?.into_iter().enumerate() {
        if line == 0 && is_edge_header(&rec) {
            continue;
        }
        if rec.len() != 2 || rec[0].is_empty() || rec[1].is_empty() {
            return Err(Error::InvalidInput(format!(
                "{}: line {} is not a pair of node labels",
                path.display(),
                line + 1
            )));
        }
        if rec[0] == rec[1] {
            return Err(Error::SelfLoop {
                label: rec[0].clone(),
                line: line + 1,
            });
        }
        let a = node(&rec[0], &mut labels);
        let b = node(&rec[1], &mut labels);
        edges.push((a, b));
    }
    if labels.is_empty() {
        return Err(Error::EmptyTable(path.to_path_buf()));
    }
    Graph::from_edges(labels, &edges)
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidInput(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// 17 significant digits, enough to read back the same `f64`.
pub fn format_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "NaN".to_string()
    }
}

/// Tab-separated coordinates with a `label, axis1, …` header.
pub fn coordinates_tsv(labels: &[String], coords: &DMatrix<f64>) -> String {
    let mut out = String::from("label");
    for j in 0..coords.ncols() {
        out.push_str(&format!("\taxis{}", j + 1));
    }
    out.push('\n');
    for (i, label) in labels.iter().enumerate() {
        out.push_str(label);
        for j in 0..coords.ncols() {
            out.push('\t');
            out.push_str(&format_value(coords[(i, j)]));
        }
        out.push('\n');
    }
    out
}

pub fn write_coordinates(path: impl AsRef<Path>, labels: &[String], coords: &DMatrix<f64>) -> Result<()> {
    if labels.len() != coords.nrows() {
        return Err(Error::dims("coordinate labels", coords.nrows(), labels.len()));
    }
    write_atomic(path, &coordinates_tsv(labels, coords))
}

/// Reads a file written by [`write_coordinates`]; `NaN` marks a missing axis.
pub fn read_coordinates(path: impl AsRef<Path>) -> Result<(Vec<String>, DMatrix<f64>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let recs = records(&text, b'\t')?;
    let (header, body) = recs.split_first().ok_or_else(|| Error::EmptyTable(path.to_path_buf()))?;
    let k = header.len().saturating_sub(1);
    let mut labels = Vec::with_capacity(body.len());
    let mut m = DMatrix::zeros(body.len(), k);
    for (i, rec) in body.iter().enumerate() {
        if rec.len() != k + 1 {
            return Err(Error::InvalidInput(format!("{}: row {} is ragged", path.display(), i + 1)));
        }
        labels.push(rec[0].clone());
        for j in 0..k {
            m[(i, j)] = rec[j + 1].parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                row: rec[0].clone(),
                column: header[j + 1].clone(),
                value: rec[j + 1].clone(),
            })?;
        }
    }
    Ok((labels, m))
}

pub fn write_scree(path: impl AsRef<Path>, scree: &ScreeTable) -> Result<()> {
    write_atomic(path, &scree.to_string())
}

/// Plain `key: value` lines, in the given order.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        Manifest::default()
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path, &self.to_string())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let entries = text
            .lines()
            .filter_map(|l| l.split_once(':'))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        Ok(Manifest { entries })
    }
}

impl std::fmt::Display for Manifest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}: {v}")?;
        }
        Ok(())
    }
}

/// `<stem>_<suffix>`
pub fn output_path(stem: &Path, suffix: &str) -> PathBuf {
    let mut name = stem.as_os_str().to_os_string();
    name.push("_");
    name.push(suffix);
    PathBuf::from(name)
}
