//! CSV tables, JSON metadata and gnuplot scripts.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::CliResult;

/// Formats with 9 significant digits, like C's `%.9g`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push_numbers(&mut self, row: impl IntoIterator<Item = f64>) {
        self.rows.push(row.into_iter().map(fmt_sig).collect());
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, out: W) -> CliResult<()> {
        let mut w = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::Necessary).from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// How the companion gnuplot script draws a table. Columns are 1-based.
#[derive(Debug, Clone)]
pub enum Plot {
    /// One line per y column against column `x`.
    Lines { x: usize, ys: Vec<usize>, xlabel: String, ylabel: String },
    /// Like `Lines` for a single y, with one curve per distinct value of
    /// the `group` column.
    Family { x: usize, y: usize, group: usize, values: Vec<f64>, xlabel: String, ylabel: String },
    /// Colour map of `z` over (`x`, `y`).
    Map { x: usize, y: usize, z: Vec<usize>, xlabel: String, ylabel: String },
    /// Unit impulses at the positions in column `x`.
    Impulses { x: usize, xlabel: String },
}

/// One CSV file plus its plot script.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub stem: String,
    pub title: String,
    pub table: Table,
    pub plot: Plot,
}

fn quote_gp(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

impl Artifact {
    pub fn plot_script(&self) -> String {
        let csv = quote_gp(&format!("{}.csv", self.stem));
        let mut s = String::new();
        s.push_str("set datafile separator ','\n");
        s.push_str("set key autotitle columnhead\n");
        s.push_str(&format!("set title {}\n", quote_gp(&self.title)));
        let head = |c: usize| self.table.headers.get(c - 1).cloned().unwrap_or_default();
        match &self.plot {
            Plot::Lines { x, ys, xlabel, ylabel } => {
                s.push_str(&format!("set xlabel {}\nset ylabel {}\n", quote_gp(xlabel), quote_gp(ylabel)));
                let parts: Vec<String> =
                    ys.iter().map(|y| format!("{csv} using {x}:{y} with lines title {}", quote_gp(&head(*y)))).collect();
                s.push_str(&format!("plot {}\n", parts.join(", \\\n     ")));
            }
            Plot::Family { x, y, group, values, xlabel, ylabel } => {
                s.push_str(&format!("set xlabel {}\nset ylabel {}\n", quote_gp(xlabel), quote_gp(ylabel)));
                let name = head(*group);
                let parts: Vec<String> = values
                    .iter()
                    .map(|v| {
                        let v = fmt_sig(*v);
                        format!(
                            "{csv} using {x}:(abs(column({group}) - ({v})) < 1e-9 * (1 + abs({v})) ? column({y}) : NaN) with lines title {}",
                            quote_gp(&format!("{name} = {v}"))
                        )
                    })
                    .collect();
                s.push_str(&format!("plot {}\n", parts.join(", \\\n     ")));
            }
            Plot::Map { x, y, z, xlabel, ylabel } => {
                s.push_str(&format!("set xlabel {}\nset ylabel {}\n", quote_gp(xlabel), quote_gp(ylabel)));
                s.push_str("set view map\nset palette rgbformulae 33,13,10\n");
                if z.len() > 1 {
                    s.push_str(&format!("set multiplot layout 1,{}\n", z.len()));
                }
                for zc in z {
                    s.push_str(&format!("set title {}\n", quote_gp(&head(*zc))));
                    s.push_str(&format!("plot {csv} using {x}:{y}:{zc} with points pt 5 ps 0.5 palette notitle\n"));
                }
                if z.len() > 1 {
                    s.push_str("unset multiplot\n");
                }
            }
            Plot::Impulses { x, xlabel } => {
                s.push_str(&format!("set xlabel {}\nunset ytics\n", quote_gp(xlabel)));
                s.push_str(&format!("plot {csv} using {x}:(1):xticlabels(1) with impulses notitle\n"));
            }
        }
        s.push_str("pause -1\n");
        s
    }
}

/// Run-level metadata written next to the tables.
#[derive(Debug, Serialize)]
pub struct Metadata<'a, C: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub library_version: &'a str,
    pub config: &'a C,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
    pub results: Value,
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.gp` for every artifact, then
/// `<dir>/<meta_stem>.json`. Returns the paths written.
pub fn write_outputs<C: Serialize>(
    dir: &Path,
    meta_stem: &str,
    artifacts: &[Artifact],
    meta: &mut Metadata<'_, C>,
) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for a in artifacts {
        let csv_path = dir.join(format!("{}.csv", a.stem));
        a.table.write_to(fs::File::create(&csv_path)?)?;
        let gp_path = dir.join(format!("{}.gp", a.stem));
        fs::write(&gp_path, a.plot_script())?;
        meta.outputs.push(format!("{}.csv", a.stem));
        meta.outputs.push(format!("{}.gp", a.stem));
        written.push(csv_path);
        written.push(gp_path);
    }
    let json_path = dir.join(format!("{meta_stem}.json"));
    let mut text = serde_json::to_string_pretty(meta)?;
    text.push('\n');
    fs::write(&json_path, text)?;
    written.push(json_path);
    Ok(written)
}
