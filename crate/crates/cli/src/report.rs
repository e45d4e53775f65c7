//! Versioned report records written by the subcommands.

use num_rational::BigRational;
use primedir::incidence::{OverlapReport, ScanMethod, Variant};
use serde::Serialize;

pub const OVERLAP_SCHEMA: &str = "primedir.overlap/1";
pub const APPLY_SCHEMA: &str = "primedir.apply/1";
pub const CONSTRUCT_SCHEMA: &str = "primedir.construct/1";

#[derive(Serialize)]
pub struct ExactPoint {
    pub x: String,
    pub y: String,
}

#[derive(Serialize)]
pub struct WindowRecord {
    pub x0: String,
    pub y0: String,
    pub width: String,
    pub height: String,
}

#[derive(Serialize)]
pub struct ScanRecord {
    pub max_overlap: usize,
    pub method: ScanMethod,
    pub candidates: usize,
    /// Witness in the variant's coordinates.
    pub witness: ExactPoint,
    /// Witness on the unit torus.
    pub witness_unit: ExactPoint,
    pub witness_members: Vec<usize>,
    pub window: WindowRecord,
    pub r: Vec<u64>,
    pub replayed: Option<bool>,
}

#[derive(Serialize)]
pub struct OverlapFile {
    pub schema: &'static str,
    pub directions_hash: String,
    pub variant: Variant,
    pub s: u32,
    pub c1: u32,
    pub families: usize,
    pub assignments_scanned: usize,
    pub constructed: ScanRecord,
    pub baseline: Option<ScanRecord>,
}

/// `num/den` in lowest terms.
fn rat(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl ScanRecord {
    pub fn new(rep: &OverlapReport, r: Vec<u64>, replayed: Option<bool>) -> Self {
        let (wx, wy) = rep.witness_in_variant();
        ScanRecord {
            max_overlap: rep.max_overlap,
            method: rep.method,
            candidates: rep.candidates,
            witness: ExactPoint { x: rat(&wx), y: rat(&wy) },
            witness_unit: ExactPoint {
                x: rat(&rep.witness.xr()),
                y: rat(&rep.witness.yr()),
            },
            witness_members: rep.witness_members.clone(),
            window: WindowRecord {
                x0: rat(&rep.window.x0),
                y0: rat(&rep.window.y0),
                width: rat(&rep.window.w),
                height: rat(&rep.window.h),
            },
            r,
            replayed,
        }
    }
}

#[derive(Serialize)]
pub struct ApplyFile {
    pub schema: &'static str,
    pub side: usize,
    pub directions: usize,
    pub k_min: u32,
    pub k_max: u32,
    pub input: String,
    pub evaluation: &'static str,
    pub input_norm: f64,
    pub output_norm: f64,
    pub ratio: f64,
    pub delta_identity: Option<f64>,
    pub delta_relative_error: Option<f64>,
}

#[derive(Serialize)]
pub struct ConstructFile<'a> {
    pub schema: &'static str,
    pub status: &'static str,
    pub content_hash: &'a str,
    pub rules: &'a [&'static str],
    pub kappa: usize,
    pub a: String,
    pub a_tilde: String,
}
