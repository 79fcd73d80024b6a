// SPDX-License-Identifier: Apache-2.0

//! Ranked tables in the fixed 5-decimal layout, plus TSV.

use std::cmp::Ordering;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

/// Digits after the decimal point in human and TSV tables.
pub const DECIMALS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
    Tsv,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Table => "txt",
            OutputFormat::Json => "json",
            OutputFormat::Tsv => "tsv",
        }
    }
}

/// `x` with [`DECIMALS`] decimals; values that round to zero print unsigned.
pub fn fixed(x: f64) -> String {
    let s = format!("{x:.DECIMALS$}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scored {
    pub label: String,
    pub score: f64,
}

/// The `top` best-scoring labels, descending. Ordering uses the printed
/// (rounded) score with ties broken by label, so a table does not depend
/// on how the nodes happen to be numbered.
pub fn rank(labels: &[String], scores: &[f64], top: usize) -> Vec<Scored> {
    let scale = 10f64.powi(DECIMALS as i32);
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ra, rb) = ((scores[a] * scale).round(), (scores[b] * scale).round());
        rb.partial_cmp(&ra)
            .unwrap_or(Ordering::Equal)
            .then_with(|| labels[a].cmp(&labels[b]))
    });
    idx.into_iter()
        .take(top)
        .map(|i| Scored {
            label: labels[i].clone(),
            score: scores[i],
        })
        .collect()
}

/// Left-aligned columns separated by two spaces; no trailing blanks.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut l = String::new();
        for (i, (c, w)) in cells.iter().zip(&width).enumerate() {
            if i + 1 == cells.len() {
                l.push_str(c);
            } else {
                let _ = write!(l, "{c:<w$}  ");
            }
        }
        out.push_str(l.trim_end());
        out.push('\n');
    };
    line(headers.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}

pub fn tsv(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = headers.join("\t");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join("\t"));
        out.push('\n');
    }
    out
}

/// Side-by-side hub and authority rankings.
pub fn hub_authority_rows(hubs: &[Scored], authorities: &[Scored]) -> Vec<Vec<String>> {
    hubs.iter()
        .zip(authorities)
        .enumerate()
        .map(|(i, (h, a))| {
            vec![
                (i + 1).to_string(),
                h.label.clone(),
                fixed(h.score),
                a.label.clone(),
                fixed(a.score),
            ]
        })
        .collect()
}

pub const HUB_AUTHORITY_HEADERS: [&str; 5] = ["#", "company", "hub score", "company", "authority score"];
pub const HUB_AUTHORITY_TSV: [&str; 5] = [
    "rank",
    "hub_company",
    "hub_score",
    "authority_company",
    "authority_score",
];

pub fn hub_authority(format: OutputFormat, hubs: &[Scored], authorities: &[Scored]) -> String {
    let rows = hub_authority_rows(hubs, authorities);
    match format {
        OutputFormat::Tsv => tsv(&HUB_AUTHORITY_TSV, &rows),
        _ => table(&HUB_AUTHORITY_HEADERS, &rows),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_prints_unsigned() {
        assert_eq!(fixed(-0.000001), "0.00000");
        assert_eq!(fixed(-0.5), "-0.50000");
        assert_eq!(fixed(0.174174), "0.17417");
    }

    #[test]
    fn ties_go_to_label_order() {
        let labels: Vec<String> = ["d", "b", "c", "a"].iter().map(|s| s.to_string()).collect();
        let r = rank(&labels, &[0.5, 0.5, 0.9, 0.5 + 1e-12], 3);
        let got: Vec<&str> = r.iter().map(|s| s.label.as_str()).collect();
        assert_eq!(got, ["c", "a", "b"]);
    }

    #[test]
    fn table_alignment() {
        let t = table(
            &["#", "name"],
            &[vec!["1".into(), "long".into()], vec!["10".into(), "x".into()]],
        );
        assert_eq!(t, "#   name\n1   long\n10  x\n");
    }
}
