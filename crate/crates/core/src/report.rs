//! Report serialization: a JSON document with a fixed field order (the
//! canonical format), a flat CSV projection, and a human-readable text
//! rendering. Big integers are emitted as decimal strings.

use serde::Serialize;

use crate::classgroup::QuadForm;
use crate::theorems::{ScanSummary, Status, VerificationReport};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub command: String,
    pub parameters: serde_json::Value,
    pub results: Vec<ReportRow>,
    pub summary: SummaryCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq, Eq)]
pub struct SummaryCounts {
    pub total: u64,
    pub pass: u64,
    pub fail: u64,
    pub skip: u64,
    pub out_of_lemma_scope: u64,
    pub resource_limit: u64,
}

impl SummaryCounts {
    pub fn from_reports(reports: &[VerificationReport]) -> Self {
        let mut s = SummaryCounts {
            total: reports.len() as u64,
            ..SummaryCounts::default()
        };
        for r in reports {
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::OutOfLemmaScope => s.out_of_lemma_scope += 1,
                Status::ResourceLimit => s.resource_limit += 1,
            }
        }
        s
    }

    pub fn from_scan(summary: &ScanSummary) -> Self {
        SummaryCounts {
            total: summary.total,
            pass: summary.pass,
            fail: summary.fail,
            skip: summary.skip,
            out_of_lemma_scope: summary.out_of_lemma_scope,
            resource_limit: summary.resource_limit,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionRow {
    pub x1: String,
    pub y1: String,
    pub z1: u64,
    pub t: u64,
    pub lambda1: i8,
    pub lambda2: i8,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub instance: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_divisor: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub derivation: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_number: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_witness: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

fn form_str(f: &QuadForm) -> String {
    format!("({},{},{})", f.a, f.b, f.c)
}

impl From<&VerificationReport> for ReportRow {
    fn from(r: &VerificationReport) -> Self {
        ReportRow {
            instance: r.instance.clone(),
            status: r.status.as_str().to_string(),
            n_value: r.n_value.as_ref().map(|v| v.to_string()),
            d: r.d.as_ref().map(|v| v.to_string()),
            s: r.s.as_ref().map(|v| v.to_string()),
            case: r.case.map(|c| c.as_str().to_string()),
            predicted_divisor: r.predicted_divisor,
            derivation: r.derivation.clone(),
            class_number: r.class_number,
            decomposition: r.decomposition.as_ref().map(|w| DecompositionRow {
                x1: w.x1.to_string(),
                y1: w.y1.to_string(),
                z1: w.z1,
                t: w.t,
                lambda1: w.lambda1,
                lambda2: w.lambda2,
            }),
            order_witness: r.order_witness.as_ref().map(form_str),
            notes: r.notes.clone(),
        }
    }
}

pub fn document(
    command: String,
    parameters: serde_json::Value,
    reports: &[VerificationReport],
    summary: SummaryCounts,
    timing: Option<Timing>,
) -> ReportDocument {
    ReportDocument {
        schema: REPORT_SCHEMA_VERSION,
        command,
        parameters,
        results: reports.iter().map(ReportRow::from).collect(),
        summary,
        timing,
    }
}

pub fn to_json(doc: &ReportDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
    s.push('\n');
    s
}

/// One row per result; list-valued fields joined with "; ".
pub fn to_csv(doc: &ReportDocument) -> String {
    let mut out = String::from(
        "instance,status,n_value,d,s,case,predicted_divisor,class_number,z1,t,order_witness,notes\n",
    );
    for row in &doc.results {
        let fields = [
            row.instance.clone(),
            row.status.clone(),
            row.n_value.clone().unwrap_or_default(),
            row.d.clone().unwrap_or_default(),
            row.s.clone().unwrap_or_default(),
            row.case.clone().unwrap_or_default(),
            row.predicted_divisor.map(|v| v.to_string()).unwrap_or_default(),
            row.class_number.map(|v| v.to_string()).unwrap_or_default(),
            row.decomposition.as_ref().map(|w| w.z1.to_string()).unwrap_or_default(),
            row.decomposition.as_ref().map(|w| w.t.to_string()).unwrap_or_default(),
            row.order_witness.clone().unwrap_or_default(),
            row.notes.join("; "),
        ];
        let escaped: Vec<String> = fields.iter().map(|f| csv_escape(f)).collect();
        out.push_str(&escaped.join(","));
        out.push('\n');
    }
    out
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn to_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    for row in &doc.results {
        out.push_str(&format!("[{}] {}", row.status, row.instance));
        if let Some(h) = row.class_number {
            out.push_str(&format!(" h={h}"));
        }
        if let Some(p) = row.predicted_divisor {
            out.push_str(&format!(" predicted={p}"));
        }
        for note in &row.notes {
            out.push_str(&format!(" | {note}"));
        }
        out.push('\n');
    }
    let s = &doc.summary;
    out.push_str(&format!(
        "summary: total={} pass={} fail={} skip={} out-of-lemma-scope={} resource-limit={}\n",
        s.total, s.pass, s.fail, s.skip, s.out_of_lemma_scope, s.resource_limit
    ));
    if let Some(t) = &doc.timing {
        out.push_str(&format!("elapsed: {} ms\n", t.elapsed_ms));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_doc() -> ReportDocument {
        let mut r = VerificationReport {
            instance: "ell=5 m=0 k=3 n=3".into(),
            n_value: Some(crate::intarith::big(-53)),
            d: Some(crate::intarith::big(53)),
            s: Some(crate::intarith::big(1)),
            case: Some(crate::theorems::CaseTag::I),
            predicted_divisor: Some(3),
            derivation: vec!["m = 0: full divisor n".into()],
            class_number: Some(6),
            decomposition: None,
            order_witness: None,
            status: Status::Pass,
            notes: vec![],
        };
        r.order_witness = Some(QuadForm::new(3, 2, 18).unwrap());
        document(
            "verify main".into(),
            serde_json::json!({"ell": 5}),
            &[r.clone(), r],
            SummaryCounts { total: 2, pass: 2, ..SummaryCounts::default() },
            None,
        )
    }

    #[test]
    fn json_is_deterministic_and_stringly_big() {
        let a = to_json(&sample_doc());
        let b = to_json(&sample_doc());
        assert_eq!(a, b);
        assert!(a.contains("\"n_value\": \"-53\""));
        assert!(a.contains("\"schema\": 1"));
        assert!(!a.contains("timing"));
    }

    #[test]
    fn csv_has_one_row_per_result() {
        let csv = to_csv(&sample_doc());
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().contains("pass"));
    }

    #[test]
    fn csv_escaping() {
        assert_eq!(csv_escape("plain"), "plain");
        assert_eq!(csv_escape("a,b"), "\"a,b\"");
        assert_eq!(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn timing_round_trips_when_present() {
        let mut doc = sample_doc();
        doc.timing = Some(Timing { elapsed_ms: 12 });
        assert!(to_json(&doc).contains("\"elapsed_ms\": 12"));
        assert!(to_text(&doc).contains("elapsed: 12 ms"));
    }
}
