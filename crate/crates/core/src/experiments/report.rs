use std::io::Write;

use crate::error::Result;

use super::bound::BoundReport;
use super::retrieval::RetrievalReport;

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per cell; missing metrics are left empty.
pub fn write_retrieval_csv<W: Write>(w: W, reports: &[RetrievalReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "dataset",
        "normalization",
        "alpha",
        "nu",
        "range_lo",
        "range_hi",
        "coeff_dist",
        "extent_vanishing",
        "success_rate",
        "trials",
    ])
    .map_err(csv_err)?;
    for r in reports {
        out.write_record([
            r.dataset.name().to_string(),
            r.normalization.short_name().to_string(),
            r.alpha.to_string(),
            r.nu.to_string(),
            opt(r.range.map(|x| x.0)),
            opt(r.range.map(|x| x.1)),
            opt(r.coeff_dist),
            opt(r.extent_vanishing),
            r.success_rate().to_string(),
            r.trials.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Every trial of every cell as a JSON array.
pub fn write_trial_log<W: Write>(w: W, reports: &[RetrievalReport]) -> Result<()> {
    let records: Vec<_> = reports.iter().flat_map(|r| &r.records).collect();
    serde_json::to_writer_pretty(w, &records)?;
    Ok(())
}

/// Two columns `beta,success` for one scale and trial.
pub fn write_beta_csv<W: Write>(w: W, report: &BoundReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["beta", "success"]).map_err(csv_err)?;
    for (b, s) in report.betas.iter().zip(&report.success) {
        out.write_record([b.to_string(), (*s as u8).to_string()]).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Summary of the bound check, one row per scale and trial.
pub fn write_bound_csv<W: Write>(w: W, reports: &[BoundReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["dataset", "alpha", "nu", "trial", "epsilon_ref", "xi", "min_success_beta", "holds"])
        .map_err(csv_err)?;
    for r in reports {
        out.write_record([
            r.dataset.name().to_string(),
            r.alpha.to_string(),
            r.nu.to_string(),
            r.trial.to_string(),
            opt(r.epsilon_ref),
            opt(r.xi.xi()),
            opt(r.min_success_beta()),
            r.holds().to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> crate::AbmError {
    crate::AbmError::InvalidInput(format!("csv output: {e}"))
}
