//! Deterministic CSV and aligned text renderings of a comparison report.

use std::fmt::Write;

use beacon_nav_core::evalkit::{Comparison, Report, WilcoxonMethod};

const CSV_HEADER: &str =
    "section,row,n,mean_2d,mean_mr,shapiro_w,shapiro_p,wilcoxon_stat,wilcoxon_p,method,significant";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| v.to_string())
}

fn method(c: &Comparison) -> &'static str {
    match c.test.map(|t| t.method) {
        Some(WilcoxonMethod::Exact) => "exact",
        Some(WilcoxonMethod::Normal) => "normal",
        None => "n/a",
    }
}

fn significant(c: &Comparison) -> &'static str {
    match c.significant {
        Some(true) => "yes",
        Some(false) => "no",
        None => "n/a",
    }
}

fn csv_row(out: &mut String, section: &str, row: &str, c: &Comparison) {
    let _ = writeln!(
        out,
        "{section},{row},{},{},{},{},{},{},{},{},{}",
        c.n,
        c.mean_baseline,
        c.mean_mr,
        opt(c.normality.map(|s| s.w)),
        opt(c.normality.map(|s| s.p_value)),
        opt(c.test.map(|t| t.statistic)),
        opt(c.test.map(|t| t.p_value)),
        method(c),
        significant(c),
    );
}

/// One line per stage, overall and questionnaire row, full precision.
pub fn render_csv(report: &Report) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for table in &report.tables {
        for row in &table.rows {
            let label = row.stage.map_or_else(|| "overall".into(), |s| s.to_string());
            csv_row(&mut out, table.metric.key(), &label, &row.comparison);
        }
    }
    if let Some(c) = &report.sus_overall {
        csv_row(&mut out, "sus", "overall", c);
    }
    for (q, c) in report.sus_questions.iter().enumerate() {
        csv_row(&mut out, "sus", &format!("q{}", q + 1), c);
    }
    out
}

fn fixed(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.digits$}"))
}

fn text_table(out: &mut String, title: &str, rows: &[(String, &Comparison)]) {
    let header = ["Row", "2D", "MR", "n", "SW W", "SW p", "W", "p", "Sig."];
    let body: Vec<[String; 9]> = rows
        .iter()
        .map(|(label, c)| {
            [
                label.clone(),
                format!("{:.2}", c.mean_baseline),
                format!("{:.2}", c.mean_mr),
                c.n.to_string(),
                fixed(c.normality.map(|s| s.w), 4),
                fixed(c.normality.map(|s| s.p_value), 4),
                fixed(c.test.map(|t| t.statistic), 1),
                fixed(c.test.map(|t| t.p_value), 4),
                significant(c).into(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for r in &body {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let _ = writeln!(out, "{title}");
    let line = |cells: &[&str]| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if i == 0 {
                let _ = write!(s, "{cell:<w$}");
            } else {
                let _ = write!(s, "  {cell:>w$}");
            }
        }
        s
    };
    let _ = writeln!(out, "{}", line(&header));
    let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    for r in &body {
        let cells: Vec<&str> = r.iter().map(String::as_str).collect();
        let _ = writeln!(out, "{}", line(&cells));
    }
    out.push('\n');
}

/// Human-readable tables: one per metric, then questionnaire results.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Participants: {}  Stages: {}  Significance level: {}\n",
        report.participants.len(),
        report.stages.iter().map(u8::to_string).collect::<Vec<_>>().join(","),
        report.alpha
    );
    for table in &report.tables {
        let rows: Vec<(String, &Comparison)> = table
            .rows
            .iter()
            .map(|r| (r.stage.map_or_else(|| "Overall".into(), |s| format!("Stage {s}")), &r.comparison))
            .collect();
        text_table(&mut out, table.metric.title(), &rows);
    }
    if let Some(overall) = &report.sus_overall {
        let mut rows = vec![("Score".to_string(), overall)];
        rows.extend(report.sus_questions.iter().enumerate().map(|(q, c)| (format!("Q{}", q + 1), c)));
        text_table(&mut out, "System Usability Scale", &rows);
    }
    out
}
