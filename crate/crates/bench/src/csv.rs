//! CSV rendering of benchmark records.

use crate::timing::BenchRecord;

pub const HEADER: &str = "method,n,m,lambda,seed,repeats,median_s,min_s,rel_residual,status";

/// One CSV line, without the trailing newline. Only the two timing columns
/// vary between runs on fixed inputs.
pub fn format_record(r: &BenchRecord) -> String {
    format!(
        "{},{},{},{},{},{},{:.6e},{:.6e},{:.3e},{}",
        r.method, r.n, r.m, r.lambda, r.seed, r.repeats, r.median_seconds, r.min_seconds,
        r.rel_residual, r.status
    )
}
