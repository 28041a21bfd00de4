//! Scan CSV format: header `chi_rad,o_counts,h_counts,dwell_s`, one row per
//! phase point, decimal point `.`, no thousands separators, newline-terminated.
//! Parsing reports 1-based line numbers on every failure.

use cheshire_core::{Interferogram, SamplePoint};

use crate::error::CliError;

pub const CSV_HEADER: &str = "chi_rad,o_counts,h_counts,dwell_s";

/// Render an interferogram as CSV text (trailing newline included).
/// Plain `{}` float formatting is shortest-round-trip and deterministic,
/// so equal scans produce byte-identical files.
pub fn write_scan_csv(g: &Interferogram) -> String {
    let mut out = String::with_capacity(64 * (g.samples().len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in g.samples() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            p.chi, p.o_counts, p.h_counts, p.dwell
        ));
    }
    out
}

/// Parse scan CSV text back into an interferogram. `path_label` is used in
/// error messages only. The incident flux of external data is unknown, so the
/// result carries no flux calibration.
pub fn parse_scan_csv(text: &str, path_label: &str) -> Result<Interferogram, CliError> {
    let parse_err = |line: usize, message: String| CliError::InputParse {
        path: path_label.to_string(),
        line,
        message,
    };

    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        Some((_, header)) => {
            return Err(parse_err(
                1,
                format!("expected header '{CSV_HEADER}', got '{header}'"),
            ))
        }
        None => return Err(parse_err(1, "empty file".to_string())),
    }

    let mut samples: Vec<SamplePoint> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            return Err(parse_err(line_no, "empty line".to_string()));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(parse_err(
                line_no,
                format!("expected 4 comma-separated fields, got {}", fields.len()),
            ));
        }
        let mut parsed = [0.0_f64; 4];
        for (i, (field, name)) in fields
            .iter()
            .zip(["chi_rad", "o_counts", "h_counts", "dwell_s"])
            .enumerate()
        {
            parsed[i] = field
                .trim()
                .parse::<f64>()
                .map_err(|_| parse_err(line_no, format!("cannot parse {name} value '{field}'")))?;
        }
        let [chi, o_counts, h_counts, dwell] = parsed;
        if !chi.is_finite() {
            return Err(parse_err(line_no, format!("chi_rad {chi} is not finite")));
        }
        if let Some(prev) = samples.last() {
            if chi <= prev.chi {
                return Err(parse_err(
                    line_no,
                    format!(
                        "chi_rad must be strictly increasing ({chi} after {})",
                        prev.chi
                    ),
                ));
            }
        }
        if !(o_counts.is_finite() && o_counts >= 0.0) || !(h_counts.is_finite() && h_counts >= 0.0)
        {
            return Err(parse_err(line_no, "counts must be >= 0".to_string()));
        }
        if !(dwell > 0.0 && dwell.is_finite()) {
            return Err(parse_err(line_no, "dwell_s must be positive".to_string()));
        }
        samples.push(SamplePoint {
            chi,
            o_counts,
            h_counts,
            dwell,
        });
    }

    Interferogram::from_samples(samples, None)
        .map_err(|e| parse_err(1, format!("invalid interferogram: {e}")))
}
