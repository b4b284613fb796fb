use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Task;

pub const SCHEMA_VERSION: &str = "shimorin-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskStatus {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub task: Task,
    pub status: TaskStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub files: Vec<String>,
}

/// Everything written to `report.json`. Wall-clock timings live in a
/// separate `timings.json` so that this file is reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: String,
    pub tasks: Vec<TaskReport>,
}

impl RunReport {
    pub fn succeeded(&self) -> bool {
        self.tasks.iter().all(|t| t.status == TaskStatus::Ok)
    }

    pub fn task(&self, task: Task) -> Option<&TaskReport> {
        self.tasks.iter().find(|t| t.task == task)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskTiming {
    pub task: Task,
    pub seconds: f64,
}

/// Decimal notation with 17 significant digits, enough to round-trip any
/// `f64`.
pub fn format_sig17(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.0000000000000000".to_string();
    }
    let sci = format!("{x:.16e}");
    let exponent: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (16 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Header plus rows; the first column is an integer index.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = (usize, Vec<f64>)>) -> csv::Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(header)?;
    for (n, values) in rows {
        let mut record = vec![n.to_string()];
        record.extend(values.into_iter().map(format_sig17));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
