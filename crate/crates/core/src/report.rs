//! Per-run metric aggregation keyed by (model tag, SNR), with CSV, JSON,
//! and plot-series emission.
//!
//! The wide CSV mirrors the report-table layout: one row per model tag with
//! paired per-SNR column blocks. The JSON form is an array of records.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// F1/recall averaging mode; recorded in every record because the choice of
/// macro averaging is a convention, not a given.
pub const AVERAGING_MODE: &str = "macro";

/// Metrics for one (model tag, SNR) cell. Fields a pipeline does not
/// produce stay `None`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MetricsRecord {
    pub model_tag: String,
    pub snr_db: f64,
    #[serde(default = "default_averaging")]
    pub averaging: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1_macro: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recall_macro: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "maybe_inf")]
    pub psnr_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ber: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compression_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iou: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mpa: Option<f64>,
    /// Externally computed scores (e.g. LPIPS, CLIP-S) carried through
    /// verbatim.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub external_scores: BTreeMap<String, f64>,
}

fn default_averaging() -> String {
    AVERAGING_MODE.to_string()
}

impl MetricsRecord {
    pub fn new(model_tag: impl Into<String>, snr_db: f64) -> Self {
        MetricsRecord {
            model_tag: model_tag.into(),
            snr_db,
            averaging: default_averaging(),
            accuracy: None,
            f1_macro: None,
            recall_macro: None,
            psnr_db: None,
            ber: None,
            compression_rate: None,
            iou: None,
            mpa: None,
            external_scores: BTreeMap::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        let rates = [
            ("accuracy", self.accuracy),
            ("f1_macro", self.f1_macro),
            ("recall_macro", self.recall_macro),
            ("ber", self.ber),
            ("iou", self.iou),
            ("mpa", self.mpa),
        ];
        for (name, v) in rates {
            if let Some(v) = v {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidConfig(format!(
                        "record ({}, {} dB): {name} = {v} outside [0, 1]",
                        self.model_tag, self.snr_db
                    )));
                }
            }
        }
        if let Some(p) = self.psnr_db {
            if p < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "record ({}, {} dB): psnr_db = {p} is negative",
                    self.model_tag, self.snr_db
                )));
            }
        }
        Ok(())
    }
}

/// Serialize PSNR values so the +inf sentinel survives JSON.
mod maybe_inf {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) if x.is_finite() => Repr::Num(*x).serialize(s),
            Some(x) if x.is_infinite() && *x > 0.0 => Repr::Str("inf".into()).serialize(s),
            Some(x) => Repr::Num(*x).serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        let repr = Option::<Repr>::deserialize(d)?;
        match repr {
            None => Ok(None),
            Some(Repr::Num(x)) => Ok(Some(x)),
            Some(Repr::Str(s)) if s == "inf" => Ok(Some(f64::INFINITY)),
            Some(Repr::Str(s)) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// All records of a run or a merge, unique per (model_tag, snr_db).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsReport {
    pub records: Vec<MetricsRecord>,
}

/// Group records by (model_tag, snr_db). Identical duplicates collapse;
/// conflicting duplicates are an error.
pub fn aggregate_report(records: Vec<MetricsRecord>) -> Result<MetricsReport> {
    let mut out: Vec<MetricsRecord> = Vec::new();
    for r in records {
        r.validate()?;
        match out
            .iter()
            .find(|e| e.model_tag == r.model_tag && e.snr_db.to_bits() == r.snr_db.to_bits())
        {
            Some(existing) if *existing == r => {}
            Some(_) => {
                return Err(Error::DuplicateRecord {
                    tag: r.model_tag,
                    snr_db: r.snr_db,
                })
            }
            None => out.push(r),
        }
    }
    Ok(MetricsReport { records: out })
}

/// Union several reports, erroring on conflicting duplicate keys.
pub fn merge_reports(reports: Vec<MetricsReport>) -> Result<MetricsReport> {
    aggregate_report(reports.into_iter().flat_map(|r| r.records).collect())
}

const METRIC_COLUMNS: [&str; 8] = [
    "accuracy",
    "f1",
    "recall",
    "psnr_db",
    "ber",
    "compression_rate",
    "iou",
    "mpa",
];

fn metric_value(r: &MetricsRecord, name: &str) -> Option<f64> {
    match name {
        "accuracy" => r.accuracy,
        "f1" => r.f1_macro,
        "recall" => r.recall_macro,
        "psnr_db" => r.psnr_db,
        "ber" => r.ber,
        "compression_rate" => r.compression_rate,
        "iou" => r.iou,
        "mpa" => r.mpa,
        other => r.external_scores.get(other).copied(),
    }
}

fn fmt_cell(v: Option<f64>) -> String {
    match v {
        None => String::new(),
        Some(x) if x == f64::INFINITY => "inf".to_string(),
        Some(x) => format!("{x}"),
    }
}

fn fmt_snr(snr: f64) -> String {
    if snr == snr.trunc() {
        format!("{}", snr as i64)
    } else {
        format!("{snr}")
    }
}

impl MetricsReport {
    /// Model tags in first-appearance order.
    pub fn model_tags(&self) -> Vec<String> {
        let mut tags = Vec::new();
        for r in &self.records {
            if !tags.contains(&r.model_tag) {
                tags.push(r.model_tag.clone());
            }
        }
        tags
    }

    /// Distinct SNR points in ascending order.
    pub fn snr_points(&self) -> Vec<f64> {
        let mut snrs: Vec<f64> = Vec::new();
        for r in &self.records {
            if !snrs.iter().any(|s| s.to_bits() == r.snr_db.to_bits()) {
                snrs.push(r.snr_db);
            }
        }
        snrs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        snrs
    }

    fn record(&self, tag: &str, snr: f64) -> Option<&MetricsRecord> {
        self.records
            .iter()
            .find(|r| r.model_tag == tag && r.snr_db.to_bits() == snr.to_bits())
    }

    fn external_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .records
            .iter()
            .flat_map(|r| r.external_scores.keys().cloned())
            .collect();
        names.sort();
        names.dedup();
        names
    }

    /// Wide CSV with paired per-SNR column blocks: one row per model tag,
    /// `metric@SNRdB` columns grouped by SNR in ascending order.
    pub fn to_csv_string(&self) -> String {
        let snrs = self.snr_points();
        let external = self.external_names();
        let mut columns: Vec<String> = METRIC_COLUMNS.iter().map(|s| s.to_string()).collect();
        columns.extend(external);

        let mut out = String::from("model_tag");
        for &snr in &snrs {
            for c in &columns {
                out.push_str(&format!(",{c}@{}dB", fmt_snr(snr)));
            }
        }
        out.push('\n');
        for tag in self.model_tags() {
            out.push_str(&tag);
            for &snr in &snrs {
                for c in &columns {
                    let v = self.record(&tag, snr).and_then(|r| metric_value(r, c));
                    out.push(',');
                    out.push_str(&fmt_cell(v));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.records)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json_str(text: &str) -> Result<MetricsReport> {
        let records: Vec<MetricsRecord> = serde_json::from_str(text)?;
        aggregate_report(records)
    }

    /// Long-form series for one metric: `snr_db,<metric>,model_tag` rows,
    /// grouped by tag in first-appearance order, suitable for any plotting
    /// tool.
    pub fn series_csv(&self, metric: &str) -> Option<String> {
        let snrs = self.snr_points();
        let mut rows = String::new();
        for tag in self.model_tags() {
            for &snr in &snrs {
                if let Some(v) = self.record(&tag, snr).and_then(|r| metric_value(r, metric)) {
                    rows.push_str(&format!("{},{},{tag}\n", fmt_snr(snr), fmt_cell(Some(v))));
                }
            }
        }
        if rows.is_empty() {
            return None;
        }
        Some(format!("snr_db,{metric},model_tag\n{rows}"))
    }

    /// Metrics that have at least one value in this report.
    pub fn populated_metrics(&self) -> Vec<String> {
        let mut names: Vec<String> = METRIC_COLUMNS
            .iter()
            .map(|s| s.to_string())
            .chain(self.external_names())
            .collect();
        names.retain(|m| {
            self.records
                .iter()
                .any(|r| metric_value(r, m).is_some())
        });
        names
    }

    /// Write report.csv, report.json, and series/<metric>.csv under `dir`.
    pub fn write_all(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv_path = dir.join("report.csv");
        fs::write(&csv_path, self.to_csv_string()).map_err(|e| Error::io(&csv_path, e))?;
        let json_path = dir.join("report.json");
        fs::write(&json_path, self.to_json_string()?).map_err(|e| Error::io(&json_path, e))?;
        let series_dir = dir.join("series");
        fs::create_dir_all(&series_dir).map_err(|e| Error::io(&series_dir, e))?;
        for metric in self.populated_metrics() {
            if let Some(content) = self.series_csv(&metric) {
                let p = series_dir.join(format!("{metric}.csv"));
                fs::write(&p, content).map_err(|e| Error::io(&p, e))?;
            }
        }
        Ok(())
    }
}

/// Load a records array from a JSON file.
pub fn load_report(path: impl AsRef<Path>) -> Result<MetricsReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    MetricsReport::from_json_str(&text)
}

/// Sidecar of externally computed scores: sample id -> {metric name ->
/// value}.
pub type ExternalScores = BTreeMap<String, BTreeMap<String, f64>>;

pub fn load_external_scores(path: impl AsRef<Path>) -> Result<ExternalScores> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
