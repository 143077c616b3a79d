//! Evaluation of a selection against the full point set.
//!
//! The distance to a fixed hull is convex, so its maximum over `conv(P)` is
//! attained at a point of `P`; scanning the dataset points is enough.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caratheodory::{approx_project_among, exact_project_oracle_among, oracle};
use crate::error::{check_eps, Error, Result};
use crate::geometry::{exact_diameter, DotAccess, Query};
use crate::greedy_hull::HullApproximation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HausdorffMode {
    /// Exact face enumeration; needs coordinates and an oracle-sized selection.
    Oracle,
    /// Segment descent with accuracy `eps_fine * diam(T)`.
    Approximate { eps_fine: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMethod {
    Oracle,
    Approximate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub hausdorff_one_sided: f64,
    pub max_code_support: usize,
    pub mean_code_support: f64,
    pub selected_size: usize,
    pub eps_used: f64,
    pub method: EvalMethod,
}

/// `max_{p in P} dist(p, conv(selected))`.
///
/// The approximate mode overestimates by at most `eps_fine * diam(selected)`
/// and never underestimates.
pub fn hausdorff_one_sided(acc: &DotAccess, selected: &[usize], mode: HausdorffMode) -> Result<f64> {
    if selected.is_empty() {
        return Err(Error::EmptySelection);
    }
    for &s in selected {
        acc.check_index(s)?;
    }
    let n = acc.len();
    let dists: Vec<f64> = match mode {
        HausdorffMode::Oracle => {
            let ps = acc.coords().ok_or(Error::NeedsCoordinates)?;
            let faces = oracle::oracle_face_count(selected.len(), ps.dim());
            if faces > oracle::ORACLE_FACE_LIMIT {
                return Err(Error::OracleLimit { subsets: faces, limit: oracle::ORACLE_FACE_LIMIT });
            }
            (0..n)
                .into_par_iter()
                .map(|i| exact_project_oracle_among(ps.point(i), ps, selected).map(|r| r.distance))
                .collect::<Result<_>>()?
        }
        HausdorffMode::Approximate { eps_fine } => {
            check_eps(eps_fine)?;
            let diam = exact_diameter(acc, selected);
            (0..n)
                .into_par_iter()
                .map(|i| approx_project_among(acc, selected, Query::Point(i), eps_fine, diam, None).map(|r| r.distance))
                .collect::<Result<_>>()?
        }
    };
    Ok(dists.into_iter().fold(0.0, f64::max))
}

/// Hausdorff distance plus code statistics of a finished run.
pub fn evaluate(acc: &DotAccess, approx: &HullApproximation, mode: HausdorffMode, eps_used: f64) -> Result<EvalReport> {
    let hausdorff = hausdorff_one_sided(acc, &approx.selected, mode)?;
    let supports: Vec<usize> = approx
        .codes
        .as_deref()
        .unwrap_or_default()
        .iter()
        .map(|c| c.support.support_len())
        .collect();
    let max_code_support = supports.iter().copied().max().unwrap_or(0);
    let mean_code_support = if supports.is_empty() {
        0.0
    } else {
        supports.iter().sum::<usize>() as f64 / supports.len() as f64
    };
    Ok(EvalReport {
        hausdorff_one_sided: hausdorff,
        max_code_support,
        mean_code_support,
        selected_size: approx.selected.len(),
        eps_used,
        method: match mode {
            HausdorffMode::Oracle => EvalMethod::Oracle,
            HausdorffMode::Approximate { .. } => EvalMethod::Approximate,
        },
    })
}
