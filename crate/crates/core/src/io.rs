//! CSV and JSON output. Reals are written with 17 significant digits.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticsRow, AVG_COUNTS, RHO_SUBDIVISIONS};
use crate::error::{Error, Result};
use crate::fields::AnyField;
use crate::surfaces::Region;
use crate::tables::TableCell;
use crate::volume::{GridSpec, Method, MethodOptions, PsiLadder, VolumeProfile};

/// `x` with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(w)
}

fn finish<W: Write>(mut wr: csv::Writer<W>) -> Result<()> {
    wr.flush().map_err(Error::from)
}

pub const PROFILE_HEADER: [&str; 5] = ["method", "region", "Psi", "dVdPsi", "V_cum"];

pub fn write_profile_csv<W: Write>(w: W, profiles: &[VolumeProfile]) -> Result<()> {
    let mut wr = writer(w);
    wr.write_record(PROFILE_HEADER)?;
    for p in profiles {
        for r in &p.rows {
            wr.write_record([
                p.method.name().to_string(),
                p.region.name().to_string(),
                fmt_real(r.psi),
                opt(r.dvdpsi),
                fmt_real(r.v_cum),
            ])?;
        }
    }
    finish(wr)
}

pub const TABLE_HEADER: [&str; 16] = [
    "table",
    "row",
    "region",
    "Psi1",
    "Psi2",
    "method",
    "N1",
    "N2",
    "V",
    "V_ref",
    "rel_err",
    "published_V",
    "published_rel_err",
    "published_seconds",
    "seconds",
    "error",
];

/// Table cells, one per record. The runtime column is left empty unless
/// `with_seconds`, so that repeated runs give identical files.
pub fn write_table_csv<W: Write>(w: W, cells: &[TableCell], with_seconds: bool) -> Result<()> {
    let mut wr = writer(w);
    wr.write_record(TABLE_HEADER)?;
    for c in cells {
        wr.write_record([
            c.table.to_string(),
            c.row.to_string(),
            c.region.name().to_string(),
            fmt_real(c.psi1),
            fmt_real(c.psi2),
            c.method.name().to_string(),
            c.n1.to_string(),
            c.n2.map(|n| n.to_string()).unwrap_or_default(),
            opt(c.volume),
            fmt_real(c.reference),
            opt(c.rel_err),
            fmt_real(c.published_volume),
            fmt_real(c.published_rel_err),
            fmt_real(c.published_seconds),
            if with_seconds {
                format!("{:.3}", c.seconds)
            } else {
                String::new()
            },
            c.error.clone().unwrap_or_default(),
        ])?;
    }
    finish(wr)
}

pub fn diagnostics_header() -> Vec<String> {
    let mut h = vec!["region".to_string(), "Psi".into(), "T".into()];
    h.extend(AVG_COUNTS.iter().map(|n| format!("T_avg_{n}")));
    h.extend(RHO_SUBDIVISIONS.iter().map(|q| format!("inv_rho_hat_{q}")));
    h.push("status".into());
    h
}

/// One surface per record; failed surfaces keep their label and carry the
/// error in the status column.
pub fn write_diagnostics_csv<W: Write>(w: W, rows: &[(Region, f64, Result<DiagnosticsRow>)]) -> Result<()> {
    let mut wr = writer(w);
    wr.write_record(diagnostics_header())?;
    for (region, psi, r) in rows {
        let mut rec = vec![region.name().to_string(), fmt_real(*psi)];
        match r {
            Ok(d) => {
                rec.push(fmt_real(d.t));
                rec.extend(d.t_avg.iter().map(|&x| fmt_real(x)));
                rec.extend(d.inv_rho_hat.iter().map(|&x| fmt_real(x)));
                rec.push("ok".into());
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(
                    String::new(),
                    1 + AVG_COUNTS.len() + RHO_SUBDIVISIONS.len(),
                ));
                rec.push(e.to_string());
            }
        }
        wr.write_record(rec)?;
    }
    finish(wr)
}

/// Sidecar describing how a CSV was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub command: String,
    pub field: AnyField,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_bounds: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ladder: Option<PsiLadder>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    pub options: MethodOptions,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Metadata {
    pub fn new(command: &str, field: AnyField, options: MethodOptions, seed: u64) -> Self {
        Metadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            field,
            method: None,
            region: None,
            psi_bounds: None,
            ladder: None,
            grid: None,
            options,
            seed,
            warnings: Vec::new(),
        }
    }
}

pub fn write_metadata_json<W: Write>(mut w: W, meta: &Metadata) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, meta).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::{integrate_profile, PsiLadder};

    #[test]
    fn reals_carry_seventeen_digits() {
        let s = fmt_real(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
        let x = 0.1 + 0.2;
        assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn profile_csv_layout() {
        let l = PsiLadder::uniform(Region::Island, -0.038, -0.037, 2).unwrap();
        let p = integrate_profile(Method::Thm4, &l, &[1.0, 2.0, 3.0]).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &[p]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "method,region,Psi,dVdPsi,V_cum");
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[1],
            format!(
                "thm4,island,{},1.0000000000000000e0,0.0000000000000000e0",
                fmt_real(-0.038)
            )
        );
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let last = rd.records().last().unwrap().unwrap();
        assert!((last[4].parse::<f64>().unwrap() - 0.002).abs() < 1e-15);
    }

    #[test]
    fn failed_diagnostics_rows_keep_their_label() {
        let rows = vec![(
            Region::Outer,
            -0.02,
            Err(Error::MaxTime {
                max_time: 1.0,
                found: 0,
                wanted: 1,
            }),
        )];
        let mut buf = Vec::new();
        write_diagnostics_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(rd.headers().unwrap().len(), 12);
        let rec = rd.records().next().unwrap().unwrap();
        assert_eq!(&rec[0], "outer");
        assert_eq!(&rec[2], "");
        assert!(rec[11].contains("max integration time"));
    }
}
