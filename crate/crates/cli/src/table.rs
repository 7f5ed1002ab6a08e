use std::fmt::Write;

pub const COLUMNS: [&str; 11] = [
    "sweep_variable",
    "sweep_value",
    "sweep_value_si",
    "scheme",
    "quantity",
    "analytic",
    "asymptotic",
    "mc_mean",
    "mc_stderr",
    "units",
    "note",
];

/// One output line. Empty optional fields are written as empty cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultRow {
    pub sweep_variable: String,
    pub sweep_value: Option<f64>,
    pub sweep_value_si: Option<f64>,
    pub scheme: String,
    pub quantity: String,
    pub analytic: Option<f64>,
    pub asymptotic: Option<f64>,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub units: &'static str,
    pub note: String,
}

impl ResultRow {
    pub fn push_note(&mut self, note: impl AsRef<str>) {
        if !self.note.is_empty() {
            self.note.push_str("; ");
        }
        self.note.push_str(note.as_ref());
    }
}

fn number(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn plain(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV document: `#` metadata lines, a header, then rows in order.
pub fn render(metadata: &[String], rows: &[ResultRow]) -> String {
    let mut out = String::new();
    for line in metadata {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "{}", COLUMNS.join(","));
    for r in rows {
        let cells = [
            text(&r.sweep_variable),
            plain(r.sweep_value),
            number(r.sweep_value_si),
            text(&r.scheme),
            text(&r.quantity),
            number(r.analytic),
            number(r.asymptotic),
            number(r.mc_mean),
            number(r.mc_stderr),
            r.units.to_string(),
            text(&r.note),
        ];
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}
