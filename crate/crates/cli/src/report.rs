//! Result serialization: the witness CSV, the oracle-comparison CSV,
//! and the JSON run manifest.

use phasespace_core::estimators::WitnessReport;
use phasespace_core::sde::Representation;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Column layout of the witness CSV (RFC 4180, LF line endings).
pub const CSV_HEADER: &str = "r,t,delta_ent,delta_ent_err,g_ent,E_m_c,E_m_c_err,E_c_m,E_c_m_err,gx_mc,gp_mc,gx_cm,gp_cm,representation";

/// One CSV row: a witness evaluation at one checkpoint for one
/// representation.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub r: f64,
    pub t: f64,
    pub delta_ent: f64,
    pub delta_ent_err: f64,
    pub g_ent: f64,
    pub e_m_c: f64,
    pub e_m_c_err: f64,
    pub e_c_m: f64,
    pub e_c_m_err: f64,
    pub gx_mc: f64,
    pub gp_mc: f64,
    pub gx_cm: f64,
    pub gp_cm: f64,
    pub representation: String,
}

impl CsvRow {
    pub fn from_report(w: &WitnessReport) -> CsvRow {
        CsvRow {
            r: w.r,
            t: w.t,
            delta_ent: w.delta_ent,
            delta_ent_err: w.delta_ent_err,
            g_ent: w.g_ent,
            e_m_c: w.e_m_given_c,
            e_m_c_err: w.e_m_given_c_err,
            e_c_m: w.e_c_given_m,
            e_c_m_err: w.e_c_given_m_err,
            gx_mc: w.gx_mc,
            gp_mc: w.gp_mc,
            gx_cm: w.gx_cm,
            gp_cm: w.gp_cm,
            representation: w.representation.label().to_string(),
        }
    }

    fn to_line(&self) -> String {
        format!(
            "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{}",
            self.r,
            self.t,
            self.delta_ent,
            self.delta_ent_err,
            self.g_ent,
            self.e_m_c,
            self.e_m_c_err,
            self.e_c_m,
            self.e_c_m_err,
            self.gx_mc,
            self.gp_mc,
            self.gx_cm,
            self.gp_cm,
            self.representation
        )
    }

    pub fn parse_line(line: &str) -> Result<CsvRow, String> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 14 {
            return Err(format!("expected 14 fields, got {}", fields.len()));
        }
        let num = |i: usize| -> Result<f64, String> {
            fields[i].parse().map_err(|_| format!("field {} (`{}`) is not a number", i, fields[i]))
        };
        Ok(CsvRow {
            r: num(0)?,
            t: num(1)?,
            delta_ent: num(2)?,
            delta_ent_err: num(3)?,
            g_ent: num(4)?,
            e_m_c: num(5)?,
            e_m_c_err: num(6)?,
            e_c_m: num(7)?,
            e_c_m_err: num(8)?,
            gx_mc: num(9)?,
            gp_mc: num(10)?,
            gx_cm: num(11)?,
            gp_cm: num(12)?,
            representation: fields[13].to_string(),
        })
    }
}

pub fn witness_csv(rows: &[CsvRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for row in rows {
        s.push_str(&row.to_line());
        s.push('\n');
    }
    s
}

pub fn parse_witness_csv(text: &str) -> Result<Vec<CsvRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(format!("unexpected CSV header {other:?}")),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| CsvRow::parse_line(l).map_err(|e| format!("line {}: {e}", i + 2)))
        .collect()
}

/// Ensemble statistics for one representation in the manifest.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReprStats {
    pub representation: String,
    pub n_traj: u64,
    pub diverged: u64,
    pub wall_time_s: f64,
}

/// JSON run manifest written next to every result set.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    pub ensembles: Vec<ReprStats>,
}

impl RunManifest {
    pub fn new(seed: u64, config_hash: String) -> RunManifest {
        RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config_hash,
            ensembles: Vec::new(),
        }
    }
}

/// Oracle-comparison CSV: one row per intracavity moment component.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentComparison {
    pub moment: &'static str,
    pub me_value: f64,
    pub pp_value: f64,
    pub pp_err: f64,
    pub wigner_value: f64,
    pub wigner_err: f64,
    /// Positive-P deviation from the oracle in units of its standard
    /// error.
    pub z_score: f64,
}

pub const COMPARE_HEADER: &str = "moment,me_value,pp_value,pp_err,wigner_value,wigner_err,z_score";

pub fn comparison_csv(rows: &[MomentComparison]) -> String {
    let mut s = String::from(COMPARE_HEADER);
    s.push('\n');
    for c in rows {
        // Moment labels contain spaces and angle brackets but no commas
        // or quotes; RFC 4180 quoting keeps readers honest anyway.
        writeln!(
            s,
            "\"{}\",{:?},{:?},{:?},{:?},{:?},{:?}",
            c.moment, c.me_value, c.pp_value, c.pp_err, c.wigner_value, c.wigner_err, c.z_score
        )
        .unwrap();
    }
    s
}

/// Group rows by representation label, preserving first-seen order.
pub fn by_representation(rows: &[CsvRow]) -> Vec<(String, Vec<&CsvRow>)> {
    let mut groups: Vec<(String, Vec<&CsvRow>)> = Vec::new();
    for row in rows {
        match groups.iter_mut().find(|(label, _)| *label == row.representation) {
            Some((_, v)) => v.push(row),
            None => groups.push((row.representation.clone(), vec![row])),
        }
    }
    groups
}

/// Label helper for manifest entries.
pub fn repr_label(repr: Representation) -> String {
    repr.label().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_row(repr: &str) -> CsvRow {
        CsvRow {
            r: 0.25,
            t: 45.0,
            delta_ent: 0.71,
            delta_ent_err: 0.01,
            g_ent: 0.8,
            e_m_c: 0.9,
            e_m_c_err: 0.02,
            e_c_m: 0.85,
            e_c_m_err: 0.015,
            gx_mc: -0.4,
            gp_mc: 0.4,
            gx_cm: -0.3,
            gp_cm: 0.3,
            representation: repr.to_string(),
        }
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![sample_row("pp"), sample_row("wigner")];
        let text = witness_csv(&rows);
        assert!(text.starts_with(CSV_HEADER));
        assert!(!text.contains('\r'), "LF line endings only");
        let back = parse_witness_csv(&text).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn header_is_exact() {
        assert_eq!(
            CSV_HEADER,
            "r,t,delta_ent,delta_ent_err,g_ent,E_m_c,E_m_c_err,E_c_m,E_c_m_err,gx_mc,gp_mc,gx_cm,gp_cm,representation"
        );
    }

    #[test]
    fn manifest_serializes() {
        let mut m = RunManifest::new(7, "abc".into());
        m.ensembles.push(ReprStats {
            representation: "pp".into(),
            n_traj: 1000,
            diverged: 0,
            wall_time_s: 1.5,
        });
        let json = serde_json::to_string_pretty(&m).unwrap();
        let back: RunManifest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
