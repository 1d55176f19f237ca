//! JSON and CSV writers. Floats are written in shortest round-trip form.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use serde::Serialize;

use qbessel::identities::{IdentityReport, KernelTable, LimitReport, Params};

use crate::eval::EvalOutput;
use crate::Format;

pub struct Sink {
    format: Format,
    out: Option<PathBuf>,
}

fn params_field(p: &Params) -> String {
    p.iter()
        .map(|(k, v)| format!("{k}={v:?}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn opt<T: std::fmt::Debug>(v: Option<T>) -> String {
    v.map(|v| format!("{v:?}")).unwrap_or_default()
}

impl Sink {
    pub fn new(format: Format, out: Option<PathBuf>) -> Self {
        Self { format, out }
    }

    fn write(&self, bytes: &[u8]) -> Result<(), String> {
        let res = match &self.out {
            Some(path) => File::create(path).and_then(|mut f| f.write_all(bytes)),
            None => io::stdout().lock().write_all(bytes),
        };
        res.map_err(|e| match &self.out {
            Some(path) => format!("cannot write {}: {e}", path.display()),
            None => format!("cannot write output: {e}"),
        })
    }

    fn json<T: Serialize + ?Sized>(&self, v: &T) -> Result<(), String> {
        let mut s = serde_json::to_string_pretty(v).map_err(|e| e.to_string())?;
        s.push('\n');
        self.write(s.as_bytes())
    }

    fn csv(&self, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| e.to_string();
        w.write_record(header).map_err(err)?;
        for row in rows {
            w.write_record(&row).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| e.to_string())?;
        self.write(&bytes)
    }

    pub fn eval(&self, r: &EvalOutput) -> Result<(), String> {
        match self.format {
            Format::Json => self.json(r),
            Format::Csv => self.csv(
                &["function", "params", "value_re", "value_im", "terms_used", "tail_bound"],
                [vec![
                    r.function.clone(),
                    params_field(&r.params),
                    format!("{:?}", r.value.re),
                    format!("{:?}", r.value.im),
                    opt(r.terms_used),
                    opt(r.tail_bound),
                ]],
            ),
        }
    }

    /// A single report is written as an object, a sweep as an array.
    pub fn reports(&self, reports: &[IdentityReport], as_list: bool) -> Result<(), String> {
        match self.format {
            Format::Json if as_list => self.json(reports),
            Format::Json => self.json(&reports[0]),
            Format::Csv => self.csv(
                &[
                    "identity",
                    "form",
                    "params",
                    "lhs_re",
                    "lhs_im",
                    "rhs_re",
                    "rhs_im",
                    "abs_residual",
                    "rel_residual",
                    "tail_budget",
                    "pass",
                ],
                reports.iter().map(|r| {
                    vec![
                        r.id.to_string(),
                        format!("{:?}", r.form).to_lowercase(),
                        params_field(&r.params),
                        format!("{:?}", r.lhs.re),
                        format!("{:?}", r.lhs.im),
                        format!("{:?}", r.rhs.re),
                        format!("{:?}", r.rhs.im),
                        format!("{:?}", r.abs_residual),
                        format!("{:?}", r.rel_residual),
                        format!("{:?}", r.tail_budget),
                        r.pass.to_string(),
                    ]
                }),
            ),
        }
    }

    pub fn kernel(&self, t: &KernelTable) -> Result<(), String> {
        match self.format {
            Format::Json => self.json(t),
            Format::Csv => self.csv(
                &["x", "y", "z", "delta", "sym_residual"],
                t.grid.iter().map(|c| {
                    vec![
                        c.x.to_string(),
                        c.y.to_string(),
                        c.z.to_string(),
                        format!("{:?}", c.delta),
                        format!("{:?}", c.sym_residual),
                    ]
                }),
            ),
        }
    }

    pub fn limit(&self, r: &LimitReport) -> Result<(), String> {
        match self.format {
            Format::Json => self.json(r),
            Format::Csv => self.csv(
                &["index", "residual"],
                r.index_values
                    .iter()
                    .zip(&r.residuals)
                    .map(|(i, res)| vec![i.to_string(), format!("{res:?}")]),
            ),
        }
    }
}
