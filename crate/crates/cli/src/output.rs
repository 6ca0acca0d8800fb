//! CSV and JSON rendering. Both are pure functions of the table and config.

use serde_json::{json, Map, Value};

use crate::commands::Table;
use crate::config::{Format, RunConfig};
use crate::CliError;

const CONVENTIONS: [(&str, &str); 3] = [
    ("squeezing", "squeezed quadrature variance = exp(-r)"),
    ("normalization", "X = a + a^dag, Y = -i(a - a^dag), vacuum variance = 1"),
    ("bounds", "vlf < 4, epr two-mode < 1, epr one-mode < 4, duan < 4 signal entanglement"),
];

pub fn render(cfg: &RunConfig, table: &Table) -> Result<String, CliError> {
    match cfg.format {
        Format::Csv => csv_text(cfg, table),
        Format::Json => json_text(cfg, table),
    }
}

fn csv_text(cfg: &RunConfig, table: &Table) -> Result<String, CliError> {
    let mut out = String::new();
    out.push_str(&format!("# cvtri {} {}\n", env!("CARGO_PKG_VERSION"), cfg.command));
    for (k, v) in CONVENTIONS {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    out.push_str(&format!("# config: {}\n", cfg.echo()));
    for (k, v) in &table.notes {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(&table.columns).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|c| c.to_csv())).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    out.push_str(std::str::from_utf8(&bytes).expect("csv output is utf-8"));
    Ok(out)
}

fn json_text(cfg: &RunConfig, table: &Table) -> Result<String, CliError> {
    let results: Vec<Value> = table
        .rows
        .iter()
        .zip(&table.reports)
        .map(|(row, report)| {
            let mut obj = Map::new();
            for (col, cell) in table.columns.iter().zip(row) {
                obj.insert((*col).to_string(), cell.to_json());
            }
            if let Some(r) = report {
                obj.insert("report".into(), serde_json::to_value(r).expect("report serializes"));
            }
            Value::Object(obj)
        })
        .collect();
    let conventions: Map<String, Value> = CONVENTIONS.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let mut doc = json!({
        "config": cfg.echo(),
        "conventions": conventions,
        "columns": table.columns,
        "results": results,
        "provenance": {
            "artifact": "cvtri",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": if cfg.command.uses_seed() { Some(cfg.seed) } else { None },
        },
    });
    if let Some(s) = &table.summary {
        doc["summary"] = s.clone();
    }
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}
