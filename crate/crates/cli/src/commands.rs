use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;

use fluxvol::checks::run_checks;
use fluxvol::diagnostics::diagnostics_row;
use fluxvol::io::{fmt_real, write_diagnostics_csv, write_metadata_json, write_profile_csv, write_table_csv, Metadata};
use fluxvol::surfaces::{critical_set, region_anchor, region_interval};
use fluxvol::tables::{table, TableId};
use fluxvol::volume::{integrate_profile, sample_ladder, volume_grid, ProfileRow};
use fluxvol::{AnyField, Axisymmetric, FieldModel, Method, PsiLadder, Region, VolumeProfile};

use crate::config::{ConfigError, FieldKind, Reference, RunConfig};
use crate::NumericalFailure;

/// Per-row numerical failures that did not stop the run.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub failures: usize,
}

fn paths(cfg: &RunConfig, default: &str) -> (PathBuf, PathBuf) {
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from(default));
    let meta = cfg.meta.clone().unwrap_or_else(|| out.with_extension("json"));
    (out, meta)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_meta(path: &Path, meta: &Metadata) -> Result<()> {
    write_metadata_json(create(path)?, meta)?;
    Ok(())
}

fn build(cfg: &RunConfig) -> Result<(AnyField, Box<dyn FieldModel>)> {
    cfg.validate()?;
    let any = cfg.any_field()?;
    let field = any.build()?;
    Ok((any, field))
}

pub fn volume(cfg: &RunConfig) -> Result<Outcome> {
    let (any, field) = build(cfg)?;
    if cfg.field == FieldKind::Helical && cfg.methods.contains(&Method::Thm1) {
        return Err(ConfigError::new("method", "thm1 needs the axisymmetric field").into());
    }
    let at = |y: Option<f64>| y.map(|y| field.section_psi([y, 0.0]));
    let psi2 = cfg
        .psi2
        .or(at(cfg.y2))
        .ok_or_else(|| ConfigError::new("psi2", "an outer label is required (--psi or --y2)"))?;
    let crit = critical_set(field.as_ref())?;
    let region = cfg.region.unwrap_or(Region::Inner);
    let psi1 = match cfg.psi1.or(at(cfg.y1)) {
        Some(p) => p,
        None => region_anchor(&crit, region).map_err(|e| ConfigError::new("region", e.to_string()))?,
    };
    let reference = match cfg.reference {
        Some(Reference::Exact) => Some(Axisymmetric::exact_volume(psi2) - Axisymmetric::exact_volume(psi1)),
        Some(Reference::Value(v)) => Some(v),
        None => None,
    }
    .map(f64::abs);

    let mut meta = Metadata::new("volume", any, cfg.options, cfg.seed);
    meta.region = Some(region);
    meta.psi_bounds = Some([psi1, psi2]);
    if let [m] = cfg.methods[..] {
        meta.method = Some(m);
    }
    let mut outcome = Outcome::default();
    let mut profiles = Vec::new();
    for &method in &cfg.methods {
        let profile = if method == Method::Grid {
            let grid = cfg.grid_spec(region)?;
            let mask = crit.has_island().then_some(region);
            let g = volume_grid(field.as_ref(), &crit, psi1, psi2, &grid, mask, cfg.tolerances())?;
            if g.empty {
                let w = format!("grid: no node has Psi strictly between {psi1} and {psi2}; volume is 0");
                eprintln!("warning: {w}");
                meta.warnings.push(w);
            }
            meta.grid = Some(grid);
            let row = |psi, v_cum| ProfileRow {
                psi,
                dvdpsi: None,
                v_cum,
                extrapolated: false,
            };
            VolumeProfile {
                method,
                region,
                rows: vec![row(psi1, 0.0), row(psi2, g.volume)],
            }
        } else {
            let ladder = match cfg.separatrix_clip {
                Some(d) => PsiLadder::with_clip(field.as_ref(), &crit, region, psi1, psi2, cfg.n, d)?,
                None => PsiLadder::new(field.as_ref(), &crit, region, psi1, psi2, cfg.n)?,
            };
            if ladder.clamped {
                let w = format!(
                    "{method}: bounds clamped to the {region} region [{}, {}]",
                    fmt_real(ladder.start),
                    fmt_real(ladder.end)
                );
                eprintln!("warning: {w}");
                meta.warnings.push(w);
            }
            let samples = sample_ladder(field.as_ref(), &crit, method, &ladder, &cfg.options);
            let mut failed = Vec::new();
            for (i, s) in samples.iter().enumerate() {
                if let Err(e) = s {
                    let w = format!("{method}: row {i} at Psi = {} failed: {e}", fmt_real(ladder.values[i]));
                    eprintln!("warning: {w}");
                    meta.warnings.push(w);
                    failed.push(i);
                }
            }
            outcome.failures += failed.len();
            let kept = ladder.without(&failed).map_err(|e| {
                NumericalFailure(format!(
                    "{method}: {} of {} rows failed ({e})",
                    failed.len(),
                    ladder.values.len()
                ))
            })?;
            let values: Vec<f64> = samples
                .iter()
                .enumerate()
                .filter(|(i, _)| !failed.contains(i))
                .map(|(_, s)| *s.as_ref().unwrap())
                .collect();
            let p = integrate_profile(method, &kept, &values)?;
            meta.ladder = Some(ladder);
            p
        };
        let v = profile.total();
        match reference {
            Some(r) => println!(
                "{method} {region} V = {}  rel_err = {:.3e}",
                fmt_real(v),
                (v - r).abs() / r
            ),
            None => println!("{method} {region} V = {}", fmt_real(v)),
        }
        profiles.push(profile);
    }
    let (out, meta_path) = paths(cfg, "volume.csv");
    write_profile_csv(create(&out)?, &profiles)?;
    write_meta(&meta_path, &meta)?;
    Ok(outcome)
}

pub fn table_cmd(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let cells = table(cfg.table, &cfg.options)?;
    let mut outcome = Outcome::default();
    for c in &cells {
        match (&c.volume, &c.error) {
            (Some(v), _) => println!(
                "{} row {} {:<7} V = {:.6}  V_ref = {:.6}  rel_err = {:.2e}  published = {:.6}",
                c.table,
                c.row,
                c.method,
                v,
                c.reference,
                c.rel_err.unwrap_or(f64::NAN),
                c.published_volume
            ),
            (None, e) => {
                outcome.failures += 1;
                println!(
                    "{} row {} {:<7} FAILED: {}",
                    c.table,
                    c.row,
                    c.method,
                    e.as_deref().unwrap_or("")
                );
            }
        }
    }
    let field = match cfg.table {
        TableId::Table1 => AnyField::Axisym(Default::default()),
        TableId::Table2 => AnyField::Helical(Default::default()),
    };
    let (out, meta_path) = paths(cfg, &format!("{}.csv", cfg.table));
    write_table_csv(create(&out)?, &cells, cfg.timings)?;
    let meta = Metadata::new(&format!("table {}", cfg.table), field, cfg.options, cfg.seed);
    write_meta(&meta_path, &meta)?;
    Ok(outcome)
}

pub fn diagnostics(cfg: &RunConfig) -> Result<Outcome> {
    let (any, field) = build(cfg)?;
    let crit = critical_set(field.as_ref())?;
    let regions: Vec<Region> = match cfg.region {
        Some(r) => vec![r],
        None if !cfg.levels.is_empty() => {
            return Err(ConfigError::new("region", "explicit levels need a region").into());
        }
        None if crit.has_island() => Region::ALL.to_vec(),
        None => vec![Region::Inner],
    };
    let mut jobs: Vec<(Region, f64)> = Vec::new();
    for &region in &regions {
        if !cfg.levels.is_empty() {
            jobs.extend(cfg.levels.iter().map(|&p| (region, p)));
            continue;
        }
        let anchor = region_anchor(&crit, region).map_err(|e| ConfigError::new("region", e.to_string()))?;
        let (lo, hi) = region_interval(field.as_ref(), &crit, region)?;
        let far = if (anchor - lo).abs() < (anchor - hi).abs() {
            hi
        } else {
            lo
        };
        let at = |y: Option<f64>| y.map(|y| field.section_psi([y, 0.0]));
        let a = cfg.psi1.or(at(cfg.y1)).unwrap_or(anchor);
        let b = cfg.psi2.or(at(cfg.y2)).unwrap_or(far);
        let ladder = PsiLadder::new(field.as_ref(), &crit, region, a, b, cfg.n)?;
        jobs.extend(
            (0..ladder.values.len())
                .filter(|&i| !ladder.is_extrapolated(i))
                .map(|i| (region, ladder.values[i])),
        );
    }
    let rows: Vec<_> = jobs
        .par_iter()
        .map(|&(region, psi)| {
            (
                region,
                psi,
                diagnostics_row(field.as_ref(), &crit, psi, region, cfg.tolerances()),
            )
        })
        .collect();
    let mut outcome = Outcome::default();
    for (region, psi, r) in &rows {
        match r {
            Ok(d) => println!(
                "{region:<6} Psi = {:>10.6}  T = {:.4}  T_avg_10 = {:.4}  1/rho_hat_6 = {:.6}",
                psi, d.t, d.t_avg[1], d.inv_rho_hat[2]
            ),
            Err(e) => {
                outcome.failures += 1;
                println!("{region:<6} Psi = {psi:>10.6}  FAILED: {e}");
            }
        }
    }
    let (out, meta_path) = paths(cfg, "diagnostics.csv");
    write_diagnostics_csv(create(&out)?, &rows)?;
    let mut meta = Metadata::new("diagnostics", any, cfg.options, cfg.seed);
    meta.region = cfg.region;
    write_meta(&meta_path, &meta)?;
    Ok(outcome)
}

/// Invariant suite; every failed check counts as a numerical failure.
pub fn check(cfg: &RunConfig) -> Result<Outcome> {
    let results = run_checks(cfg.seed);
    let mut outcome = Outcome::default();
    for r in &results {
        let cmp = if r.lower_bound { ">=" } else { "<=" };
        let status = if r.pass { "PASS" } else { "FAIL" };
        println!("{status} {:<24} {:.3e} {cmp} {:.1e}", r.name, r.value, r.bound);
        if !r.pass {
            outcome.failures += 1;
        }
    }
    let (out, meta_path) = paths(cfg, "check.csv");
    let mut wr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(create(&out)?);
    wr.write_record(["name", "value", "bound", "lower_bound", "pass"])?;
    for r in &results {
        wr.write_record([
            r.name.clone(),
            fmt_real(r.value),
            fmt_real(r.bound),
            r.lower_bound.to_string(),
            r.pass.to_string(),
        ])?;
    }
    wr.flush()?;
    let meta = Metadata::new("check", AnyField::Helical(Default::default()), cfg.options, cfg.seed);
    write_meta(&meta_path, &meta)?;
    Ok(outcome)
}
