//! Output rendering and atomic file writes.
//!
//! Every file is written to a temporary in the target directory and then
//! renamed into place, so a failing command never leaves a partial file.

use std::path::Path;

use lossprov::kde_overlap::OverlapMatrix;
use lossprov::metrics::EvalReport;
use lossprov::transform::LambdaSearchResult;
use serde::{Deserialize, Serialize};

/// Write bytes atomically (temp file + rename), creating parent dirs.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> lossprov::Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = parent {
        std::fs::create_dir_all(dir)?;
    }
    let dir = parent.unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    std::io::Write::write_all(&mut tmp, bytes)?;
    tmp.persist(path).map_err(|e| lossprov::Error::Io(e.error))?;
    Ok(())
}

/// Overlap matrix as CSV: header row/column carry the category names,
/// cells are formatted `%.4f`.
pub fn overlap_csv(matrix: &OverlapMatrix) -> String {
    let mut out = String::new();
    out.push_str(&format!(",{}\n", matrix.categories.join(",")));
    for (category, row) in matrix.categories.iter().zip(&matrix.values) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
        out.push_str(&format!("{category},{}\n", cells.join(",")));
    }
    out
}

/// Table-layout report CSV, one row per subset.
pub fn report_csv(reports: &[EvalReport]) -> String {
    let mut out =
        String::from("group,subset,precision,recall,f1,accuracy,tp,fp,fn,tn,lambda_star,strategy\n");
    for r in reports {
        let lambda = r.lambda_star.map(|l| l.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{:.4},{:.4},{:.4},{:.4},{},{},{},{},{},{}\n",
            r.group_name,
            r.subset,
            r.precision,
            r.recall,
            r.f1,
            r.accuracy,
            r.counts.true_pos,
            r.counts.false_pos,
            r.counts.false_neg,
            r.counts.true_neg,
            lambda,
            r.strategy,
        ));
    }
    out
}

/// λ-scan sidecar written next to models and transformed losses.
#[derive(Debug, Serialize, Deserialize)]
pub struct LambdaCurveDocument {
    pub strategy: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_star: Option<f64>,
    /// (λ, objective) pairs; degenerate grid points render as null.
    pub objective_curve: Vec<(f64, Option<f64>)>,
}

impl LambdaCurveDocument {
    pub fn from_search(search: &LambdaSearchResult, target: Option<f64>) -> Self {
        Self {
            strategy: search.strategy.to_string(),
            target,
            lambda_star: Some(search.lambda_star),
            objective_curve: search
                .objective_curve
                .iter()
                .map(|&(l, o)| (l, o.is_finite().then_some(o)))
                .collect(),
        }
    }

    pub fn fixed(label: &str) -> Self {
        Self {
            strategy: label.to_string(),
            target: None,
            lambda_star: None,
            objective_curve: Vec::new(),
        }
    }
}

/// The JSON report document: evaluation sections keyed by name
/// ("evaluation", or "train"/"test" for pipeline runs).
#[derive(Debug, Serialize, Deserialize)]
pub struct ReportDocument {
    pub group: String,
    pub strategy: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_star: Option<f64>,
    pub sections: Vec<ReportSection>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportSection {
    pub name: String,
    pub reports: Vec<EvalReport>,
}

fn pretty_subset(subset: &str) -> String {
    if subset == "photoshop" {
        return "Photoshop Modified".to_string();
    }
    if subset == "aggregate" {
        return "Aggregate Iteration".to_string();
    }
    if let Some(k) = subset.strip_suffix("-iter") {
        if k.chars().all(|c| c.is_ascii_digit()) {
            return format!("{k} Iteration");
        }
    }
    subset.to_string()
}

/// Plain-text summary of a report document.
pub fn render_summary(doc: &ReportDocument) -> String {
    let mut out = String::new();
    out.push_str(&format!("group: {}\n", doc.group));
    match doc.lambda_star {
        Some(l) => out.push_str(&format!("strategy: {}  lambda*: {l}\n", doc.strategy)),
        None => out.push_str(&format!("strategy: {}\n", doc.strategy)),
    }
    for section in &doc.sections {
        out.push_str(&format!(
            "\n{} (manipulated-as-positive metrics)\n",
            section.name
        ));
        out.push_str(&format!(
            "  {:<22} {:>9} {:>8} {:>8} {:>9} {:>6} {:>5} {:>5} {:>5}\n",
            "subset", "precision", "recall", "f1", "accuracy", "tp", "fp", "fn", "tn"
        ));
        for r in &section.reports {
            let mut line = format!(
                "  {:<22} {:>9.4} {:>8.4} {:>8.4} {:>9.4} {:>6} {:>5} {:>5} {:>5}",
                pretty_subset(&r.subset),
                r.precision,
                r.recall,
                r.f1,
                r.accuracy,
                r.counts.true_pos,
                r.counts.false_pos,
                r.counts.false_neg,
                r.counts.true_neg,
            );
            if r.zero_denominator.any() {
                line.push_str("  [zero denominator]");
            }
            line.push('\n');
            out.push_str(&line);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use lossprov::kde_overlap::OverlapMatrix;

    #[test]
    fn overlap_csv_layout() {
        let m = OverlapMatrix {
            categories: vec!["a".into(), "b".into()],
            values: vec![vec![1.0, 0.25], vec![0.25, 1.0]],
        };
        assert_eq!(overlap_csv(&m), ",a,b\na,1.0000,0.2500\nb,0.2500,1.0000\n");
    }

    #[test]
    fn pretty_labels() {
        assert_eq!(pretty_subset("photoshop"), "Photoshop Modified");
        assert_eq!(pretty_subset("3-iter"), "3 Iteration");
        assert_eq!(pretty_subset("aggregate"), "Aggregate Iteration");
        assert_eq!(pretty_subset("edit-2"), "edit-2");
    }
}
