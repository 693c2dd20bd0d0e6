//! Command-line front end. Every analysis first prints its scree table; the
//! coordinates are written only once `--axes` has been chosen.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{self, Graph};
use crate::io::{self, DatasetKind, Manifest};
use crate::linalg::{PIVOT_TOLERANCE, SYMMETRY_TOLERANCE, TIE_THRESHOLD, ZERO_THRESHOLD};
use crate::methods::{self, ContingencyTable, GroupCoding, MethodResult, PcaOptions};
use crate::scree::ScreeTable;

/// Relative eigenvalue gap below which the chosen number of axes is flagged.
pub const NEAR_TIE_GAP: f64 = 1e-3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "duality", version, about = "Multivariate analysis of (X, Q, D) triples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Number of axes to keep; without it only the scree table is printed.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    axes: Option<u32>,
    /// Observation weights: a table with one weight column, rows labelled like the data.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Field separator of the input tables (detected from the first line otherwise).
    #[arg(long, value_parser = parse_delimiter)]
    delimiter: Option<u8>,
    /// Output stem; files are <stem>_scree.tsv, <stem>_rows.tsv, <stem>_cols.tsv, <stem>_manifest.txt.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Principal component analysis.
    Pca {
        data: PathBuf,
        /// Use the inverse variances as column metric.
        #[arg(long)]
        standardize: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Correspondence analysis of a contingency table.
    Ca {
        table: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Linear discriminant analysis.
    Lda {
        data: PathBuf,
        /// Group file: row label, group label.
        #[arg(long)]
        groups: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// PCA of the predictors X with respect to the responses Y.
    Pcaiv {
        x: PathBuf,
        y: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Canonical correlation analysis of two blocks.
    Cca {
        x1: PathBuf,
        x2: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Local variance and Geary ratios of node variables.
    Geary {
        edges: PathBuf,
        covariates: PathBuf,
        #[arg(long, value_parser = parse_delimiter)]
        delimiter: Option<u8>,
        /// Also write <stem>_geary.tsv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral graph layout.
    Layout {
        edges: PathBuf,
        /// Analyze each connected component separately.
        #[arg(long)]
        per_component: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Regress the graph's smoothest eigenvectors on node covariates.
    GraphRegress {
        edges: PathBuf,
        covariates: PathBuf,
        /// Number of graph eigenvectors used as response.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_delimiter(s: &str) -> std::result::Result<u8, String> {
    match s {
        "," | "comma" => Ok(b','),
        "\t" | "\\t" | "tab" => Ok(b'\t'),
        ";" => Ok(b';'),
        _ => Err(format!("unsupported delimiter {s:?} (use ',', ';' or tab)")),
    }
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
    }
}

struct Report<'a> {
    method: &'a str,
    inputs: Vec<&'a Path>,
    result: &'a MethodResult,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    extra: Vec<(&'static str, String)>,
}

fn stem(common: &Common, first: &Path) -> PathBuf {
    common.out.clone().unwrap_or_else(|| first.with_extension(""))
}

fn warn_all(err: &mut dyn Write, warnings: &[String]) -> Result<()> {
    for w in warnings {
        writeln!(err, "warning: {w}")?;
    }
    Ok(())
}

fn read_weights(common: &Common, labels: &[String]) -> Result<Option<Vec<f64>>> {
    let Some(path) = &common.weights else { return Ok(None) };
    let data = io::read_table(path, DatasetKind::Measurements, common.delimiter)?;
    if data.matrix.ncols() != 1 {
        return Err(Error::InvalidInput(format!("{}: expected a single weight column", path.display())));
    }
    let w = data.aligned_to(labels, path)?;
    Ok(Some(w.iter().copied().collect()))
}

/// `true` when cutting after `q` of the `eigenvalues` separates two values whose
/// relative gap is below [`NEAR_TIE_GAP`].
pub fn splits_near_tie(eigenvalues: &[f64], q: usize) -> bool {
    if q == 0 || q >= eigenvalues.len() {
        return false;
    }
    let (a, b) = (eigenvalues[q - 1], eigenvalues[q]);
    a > 0.0 && (a - b) / a <= NEAR_TIE_GAP
}

fn print_scree(out: &mut dyn Write, scree: &ScreeTable) -> Result<()> {
    write!(out, "{scree}")?;
    Ok(())
}

fn finish(common: &Common, report: Report, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let res = report.result;
    let eig = res.eigenvalues();
    print_scree(out, &res.scree)?;
    writeln!(out, "total inertia\t{:.4}", res.decomposition.inertia)?;
    let Some(q) = common.axes.map(|q| q as usize) else {
        return Ok(());
    };
    if q > eig.len() {
        return Err(Error::RankOutOfRange {
            requested: q,
            max: eig.len(),
        });
    }
    if splits_near_tie(eig, q) {
        writeln!(
            err,
            "WARNING: axes {q} and {} have nearly equal eigenvalues ({:.5} vs {:.5}); the retained subspace is unstable",
            q + 1,
            eig[q - 1],
            eig[q]
        )?;
    }
    writeln!(out, "cumulative inertia at {q} axes: {:.2}%", res.scree.cumulative_at(q))?;

    let stem = stem(common, report.inputs[0]);
    let rows = res.row_coords.columns(0, q).into_owned();
    let cols = res.col_coords.columns(0, q).into_owned();
    io::write_scree(io::output_path(&stem, "scree.tsv"), &res.scree)?;
    io::write_coordinates(io::output_path(&stem, "rows.tsv"), &report.row_labels, &rows)?;
    io::write_coordinates(io::output_path(&stem, "cols.tsv"), &report.col_labels, &cols)?;

    let mut m = Manifest::new();
    m.set("method", report.method);
    for (i, p) in report.inputs.iter().enumerate() {
        m.set(&format!("input{}", i + 1), p.display());
    }
    if let Some(w) = &common.weights {
        m.set("weights", w.display());
    }
    m.set("axes", q)
        .set("rank", res.decomposition.rank)
        .set("inertia", io::format_value(res.decomposition.inertia))
        .set(
            "eigenvalues",
            eig.iter().map(|&l| io::format_value(l)).collect::<Vec<_>>().join(" "),
        )
        .set("cumulative_pct", format!("{:.2}", res.scree.cumulative_at(q)))
        .set("near_tie", splits_near_tie(eig, q))
        .set("zero_threshold", ZERO_THRESHOLD)
        .set("tie_threshold", TIE_THRESHOLD)
        .set("near_tie_gap", NEAR_TIE_GAP)
        .set("symmetry_tolerance", SYMMETRY_TOLERANCE)
        .set("pivot_tolerance", PIVOT_TOLERANCE);
    for (k, v) in report.extra {
        m.set(k, v);
    }
    m.set("version", env!("CARGO_PKG_VERSION"));
    m.write(io::output_path(&stem, "manifest.txt"))?;
    writeln!(out, "wrote {}_{{scree,rows,cols}}.tsv and {}_manifest.txt", stem.display(), stem.display())?;
    Ok(())
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Pca {
            data,
            standardize,
            common,
        } => {
            let d = io::read_table(&data, DatasetKind::Measurements, common.delimiter)?;
            let weights = read_weights(&common, &d.row_labels)?;
            let opts = PcaOptions {
                standardize,
                weights,
                rank: None,
                column_labels: Some(d.col_labels.clone()),
            };
            let res = methods::pca(&d.matrix, &opts)?;
            let report = Report {
                method: "pca",
                inputs: vec![&data],
                result: &res,
                row_labels: d.row_labels,
                col_labels: d.col_labels,
                extra: vec![("standardize", standardize.to_string())],
            };
            finish(&common, report, out, err)
        }
        Command::Ca { table, common } => {
            if common.weights.is_some() {
                return Err(Error::InvalidInput("ca takes its weights from the table margins".into()));
            }
            let d = io::read_table(&table, DatasetKind::Contingency, common.delimiter)?;
            warn_all(err, &d.warnings)?;
            let t = ContingencyTable::new(d.matrix, d.row_labels.clone(), d.col_labels.clone())?;
            let (chi2, dof) = methods::chi_square(&t);
            let res = methods::ca(&t, None)?;
            writeln!(out, "chi-square {chi2:.4} on {dof} degrees of freedom, n = {}", t.total())?;
            let report = Report {
                method: "ca",
                inputs: vec![&table],
                result: &res,
                row_labels: d.row_labels,
                col_labels: d.col_labels,
                extra: vec![("chi_square", io::format_value(chi2)), ("dof", dof.to_string())],
            };
            finish(&common, report, out, err)
        }
        Command::Lda { data, groups, common } => {
            let d = io::read_table(&data, DatasetKind::Measurements, common.delimiter)?;
            let g = io::read_table(&groups, DatasetKind::Groups, common.delimiter)?;
            let coding = g.aligned_to(&d.row_labels, &groups)?;
            // groups absent from the analysed rows would leave empty columns
            let keep: Vec<usize> = (0..coding.ncols()).filter(|&k| coding.column(k).sum() > 0.0).collect();
            let coding = DMatrix::from_fn(coding.nrows(), keep.len(), |i, k| coding[(i, keep[k])]);
            let labels = keep.iter().map(|&k| g.col_labels[k].clone()).collect();
            let coding = GroupCoding::new(coding, labels)?;
            let weights = read_weights(&common, &d.row_labels)?;
            let res = methods::lda(&d.matrix, &coding, weights.as_deref(), None)?;
            let report = Report {
                method: "lda",
                inputs: vec![&data, &groups],
                result: &res,
                row_labels: d.row_labels,
                col_labels: d.col_labels,
                extra: vec![("groups", coding.labels().join(" "))],
            };
            finish(&common, report, out, err)
        }
        Command::Pcaiv { x, y, common } => {
            let dx = io::read_table(&x, DatasetKind::Measurements, common.delimiter)?;
            let dy = io::read_table(&y, DatasetKind::Measurements, common.delimiter)?;
            let ym = dy.aligned_to(&dx.row_labels, &y)?;
            let weights = read_weights(&common, &dx.row_labels)?;
            let q = DMatrix::identity(ym.ncols(), ym.ncols());
            let res = methods::pcaiv(&dx.matrix, &ym, &q, weights.as_deref(), None)?;
            let report = Report {
                method: "pcaiv",
                inputs: vec![&x, &y],
                result: &res,
                row_labels: dx.row_labels,
                col_labels: dx.col_labels,
                extra: vec![("response_metric", "identity".to_string())],
            };
            finish(&common, report, out, err)
        }
        Command::Cca { x1, x2, common } => {
            let d1 = io::read_table(&x1, DatasetKind::Measurements, common.delimiter)?;
            let d2 = io::read_table(&x2, DatasetKind::Measurements, common.delimiter)?;
            let m2 = d2.aligned_to(&d1.row_labels, &x2)?;
            let weights = read_weights(&common, &d1.row_labels)?;
            let res = methods::cca(&d1.matrix, &m2, weights.as_deref(), None)?;
            if let methods::MethodExtras::Cca(e) = &res.extras {
                let rho: Vec<String> = e.correlations.iter().map(|r| format!("{r:.5}")).collect();
                writeln!(out, "canonical correlations: {}", rho.join(" "))?;
            }
            let report = Report {
                method: "cca",
                inputs: vec![&x1, &x2],
                result: &res,
                row_labels: d1.row_labels,
                col_labels: d1.col_labels,
                extra: Vec::new(),
            };
            finish(&common, report, out, err)
        }
        Command::Geary {
            edges,
            covariates,
            delimiter,
            out: stem,
        } => {
            let g = io::read_edges_with(&edges, delimiter)?;
            let c = io::read_table(&covariates, DatasetKind::Measurements, delimiter)?;
            let x = c.aligned_to(g.labels(), &covariates)?;
            let rows = graph::geary_columns(&g, &x)?;
            let mut table = String::from("variable\tlocal_variance\tvariance\tgeary\tgeneralized\n");
            let opt = |v: Option<f64>| v.map_or("NA".to_string(), |v| format!("{v:.6}"));
            for (name, r) in c.col_labels.iter().zip(&rows) {
                table.push_str(&format!(
                    "{name}\t{:.6}\t{:.6}\t{}\t{}\n",
                    r.local_variance,
                    r.variance,
                    opt(r.classical),
                    opt(r.generalized)
                ));
            }
            write!(out, "{table}")?;
            if let Some(stem) = stem {
                io::write_atomic(io::output_path(&stem, "geary.tsv"), &table)?;
            }
            Ok(())
        }
        Command::Layout {
            edges,
            per_component,
            common,
        } => layout(&edges, per_component, &common, out, err),
        Command::GraphRegress {
            edges,
            covariates,
            k,
            common,
        } => {
            if common.weights.is_some() {
                return Err(Error::InvalidInput("graph-regress uses uniform node weights".into()));
            }
            let g = io::read_edges_with(&edges, common.delimiter)?;
            let c = io::read_table(&covariates, DatasetKind::Measurements, common.delimiter)?;
            let x = c.aligned_to(g.labels(), &covariates)?;
            let res = graph::regress_on_covariates(&g, &x, k as usize, None)?;
            let mut extra = vec![("k", k.to_string())];
            if let methods::MethodExtras::GraphRegression(e) = &res.extras {
                let mu: Vec<String> = e.mu.iter().map(|m| format!("{m:.5}")).collect();
                let ex: Vec<String> = e.explained.iter().map(|v| format!("{v:.4}")).collect();
                writeln!(out, "graph eigenvalues: {}", mu.join(" "))?;
                writeln!(out, "explained by covariates: {}", ex.join(" "))?;
                extra.push(("mu", mu.join(" ")));
                extra.push(("explained", ex.join(" ")));
            }
            let report = Report {
                method: "graph-regress",
                inputs: vec![&edges, &covariates],
                result: &res,
                row_labels: g.labels().to_vec(),
                col_labels: c.col_labels,
                extra,
            };
            finish(&common, report, out, err)
        }
    }
}

fn write_mu_table(out: &mut dyn Write, mu: &[f64]) -> Result<()> {
    writeln!(out, "\tmu\t1 - mu")?;
    for (i, m) in mu.iter().enumerate() {
        writeln!(out, "{}\t{:.5}\t{:.5}", i + 1, m, 1.0 - m)?;
    }
    Ok(())
}

fn layout(edges: &Path, per_component: bool, common: &Common, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    if common.weights.is_some() {
        return Err(Error::InvalidInput("layout uses the node degrees as weights".into()));
    }
    let g = io::read_edges_with(edges, common.delimiter)?;
    let q = common.axes.map(|q| q as usize);
    let stem = stem(common, edges);
    let mut m = Manifest::new();
    m.set("method", "layout").set("input1", edges.display());

    let coords = if per_component {
        let per = graph::spectrum_per_component(&g, q.unwrap_or(g.n().saturating_sub(1)).max(1))?;
        let mut coords = DMatrix::from_element(g.n(), q.unwrap_or(0), f64::NAN);
        for (c, comp) in per.components.iter().enumerate() {
            writeln!(out, "component {} ({} nodes)", c + 1, comp.nodes.len())?;
            write_mu_table(out, comp.spectrum.nontrivial_mu())?;
            if let Some(q) = q {
                check_degenerate(err, comp.spectrum.nontrivial_mu(), q, Some(c + 1))?;
                for (i, &node) in comp.nodes.iter().enumerate() {
                    for j in 0..comp.spectrum.k().min(q) {
                        coords[(node, j)] = comp.spectrum.vectors[(i, j)];
                    }
                }
            }
        }
        if !per.isolated.is_empty() {
            let names: Vec<&str> = per.isolated.iter().map(|&i| g.labels()[i].as_str()).collect();
            writeln!(err, "warning: isolated nodes have no coordinates: {}", names.join(" "))?;
        }
        m.set("components", per.components.len()).set("isolated", per.isolated.len());
        coords
    } else {
        let full = graph::spectrum(&g, g.n() - 1)?;
        write_mu_table(out, full.nontrivial_mu())?;
        let Some(q) = q else { return Ok(()) };
        let lay = graph::layout_axes(&g, q)?;
        check_degenerate(err, full.nontrivial_mu(), q, None)?;
        m.set("mu", lay.spectrum.mu.iter().map(|v| io::format_value(*v)).collect::<Vec<_>>().join(" "));
        lay.coordinates
    };
    let Some(q) = q else { return Ok(()) };
    m.set("axes", q)
        .set("per_component", per_component)
        .set("degeneracy_threshold", graph::DEGENERACY_THRESHOLD)
        .set("version", env!("CARGO_PKG_VERSION"));
    let mut spectrum = String::new();
    write_mu_table_to_string(&mut spectrum, &g, per_component)?;
    io::write_atomic(io::output_path(&stem, "scree.tsv"), &spectrum)?;
    io::write_coordinates(io::output_path(&stem, "rows.tsv"), g.labels(), &coords)?;
    m.write(io::output_path(&stem, "manifest.txt"))?;
    writeln!(out, "wrote {}_{{scree,rows}}.tsv and {}_manifest.txt", stem.display(), stem.display())?;
    Ok(())
}

fn write_mu_table_to_string(buf: &mut String, g: &Graph, per_component: bool) -> Result<()> {
    let mut bytes = Vec::new();
    if per_component {
        let per = graph::spectrum_per_component(&g, g.n().saturating_sub(1).max(1))?;
        for (c, comp) in per.components.iter().enumerate() {
            writeln!(bytes, "# component {}", c + 1)?;
            write_mu_table(&mut bytes, comp.spectrum.nontrivial_mu())?;
        }
    } else {
        write_mu_table(&mut bytes, graph::spectrum(g, g.n() - 1)?.nontrivial_mu())?;
    }
    buf.push_str(&String::from_utf8_lossy(&bytes));
    Ok(())
}

/// Flags a cut after `q` of the ascending `mu` that separates (nearly) equal values.
fn check_degenerate(err: &mut dyn Write, mu: &[f64], q: usize, component: Option<usize>) -> Result<()> {
    if q == 0 || q >= mu.len() {
        return Ok(());
    }
    let (a, b) = (mu[q - 1], mu[q]);
    if (b - a).abs() <= NEAR_TIE_GAP * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
        let at = component.map(|c| format!(" in component {c}")).unwrap_or_default();
        writeln!(
            err,
            "WARNING: graph eigenvalues {q} and {} are nearly equal{at} ({a:.5} vs {b:.5}); the layout axes are not unique",
            q + 1
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_tie_detection() {
        assert!(splits_near_tie(&[1.0, 0.9995, 0.1], 1));
        assert!(splits_near_tie(&[1.0, 1.0], 1));
        assert!(!splits_near_tie(&[1.0, 0.99, 0.1], 1));
        assert!(!splits_near_tie(&[1.0, 0.9995], 2));
    }

    #[test]
    fn delimiters() {
        assert_eq!(parse_delimiter("tab"), Ok(b'\t'));
        assert!(parse_delimiter("|").is_err());
    }
}
