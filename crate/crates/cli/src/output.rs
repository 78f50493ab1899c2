use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub const UNITS: &str =
    "units: hbar = m = omega = 1; energies in hbar*omega, lengths in sqrt(hbar/(m*omega)), times in 1/omega";

/// Shortest-form `%.12g`: 12 significant digits, trailing zeros dropped.
pub fn fmt(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt_bool(b: bool) -> String {
    if b { "true" } else { "false" }.into()
}

/// Quote a field when it would break the comma-separated layout.
pub fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Columns plotted by the optional gnuplot script.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub x: usize,
    pub ys: Vec<usize>,
    pub xlabel: String,
    pub ylabel: String,
    pub logscale_y: bool,
}

#[derive(Debug, Clone)]
pub struct Table {
    /// File name suffix after the prefix.
    pub suffix: String,
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub plot: Option<PlotSpec>,
}

impl Table {
    pub fn new(suffix: impl Into<String>, header: &[&str]) -> Self {
        Self {
            suffix: suffix.into(),
            comments: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            plot: None,
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        let _ = writeln!(s, "{}", self.header.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| field(c)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    fn gnuplot(&self, csv: &Path) -> Option<String> {
        let p = self.plot.as_ref()?;
        let name = csv.file_name()?.to_string_lossy().into_owned();
        let png = name.trim_end_matches(".csv").to_string() + ".png";
        let mut s = String::new();
        let _ = writeln!(s, "set datafile separator ','");
        let _ = writeln!(s, "set datafile commentschars '#'");
        let _ = writeln!(s, "set key autotitle columnhead");
        let _ = writeln!(s, "set terminal pngcairo size 900,600");
        let _ = writeln!(s, "set output '{png}'");
        let _ = writeln!(s, "set xlabel '{}'", p.xlabel);
        let _ = writeln!(s, "set ylabel '{}'", p.ylabel);
        if p.logscale_y {
            let _ = writeln!(s, "set logscale y");
        }
        let series: Vec<String> =
            p.ys.iter()
                .map(|y| format!("'{name}' using {}:{} with linespoints", p.x + 1, y + 1))
                .collect();
        let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
        Some(s)
    }
}

/// Write each table to `<prefix>_<suffix>.csv` (plus a `.gp` script when
/// asked), or concatenate them on stdout when there is no prefix.
pub fn emit(tables: &[Table], prefix: Option<&str>, plot: bool) -> Result<Vec<PathBuf>, CliError> {
    let Some(prefix) = prefix else {
        if plot {
            return Err(CliError::Config(
                "`output.emit_plot_script` needs an output prefix".into(),
            ));
        }
        let mut out = String::new();
        for (i, t) in tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&t.render());
        }
        print!("{out}");
        return Ok(Vec::new());
    };
    let mut written = Vec::new();
    for t in tables {
        let path = PathBuf::from(format!("{prefix}_{}.csv", t.suffix));
        write_file(&path, &t.render())?;
        written.push(path.clone());
        if plot {
            if let Some(script) = t.gnuplot(&path) {
                let gp = path.with_extension("gp");
                write_file(&gp, &script)?;
                written.push(gp);
            }
        }
    }
    Ok(written)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, text).map_err(io)
}
