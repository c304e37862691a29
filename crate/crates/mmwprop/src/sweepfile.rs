//! Plain-text sweep-set files.
//!
//! A sweep file is whitespace-delimited text. Set-level lines come first,
//! then one `record` header per acquisition followed by its delay/power
//! pairs:
//!
//! ```text
//! version 1
//! scenario free_space
//! tx_power_dbm -7.9
//! tx_gain_dbi 27
//! rx_gain_dbi 27
//! record <tx_az_deg> <tx_el_deg> <rx_az_deg> <rx_el_deg> <pol> <distance_m> <noise_floor_dbm> <n_bins> <bin_spacing_ns>
//! <delay_ns> <power_dbm>
//! ...
//! ```
//!
//! Angles are degrees, delays nanoseconds, and powers dBm on disk; powers are
//! converted to linear milliwatts on load (`-inf` encodes an empty bin).
//! Format violations are reported as line-numbered diagnostics rather than
//! hard failures so a whole file can be linted in one pass.

use crate::error::{Error, Result};
use crate::pdp::{Polarization, PowerDelayProfile, Scenario, SweepRecord, SweepSet};
use crate::units::{dbm_to_milliwatts, milliwatts_to_dbm};
use std::path::Path;

/// One line-numbered format violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Outcome of parsing: a valid sweep set or the list of problems found.
#[derive(Debug)]
pub enum ParseOutcome {
    Valid(SweepSet),
    Invalid(Vec<Diagnostic>),
}

struct HeaderFields {
    scenario: Option<Scenario>,
    tx_power_dbm: Option<f64>,
    tx_gain_dbi: Option<f64>,
    rx_gain_dbi: Option<f64>,
}

/// Parse sweep-file text into a [`ParseOutcome`].
pub fn parse_str(text: &str) -> ParseOutcome {
    let mut diags: Vec<Diagnostic> = Vec::new();
    let mut header = HeaderFields {
        scenario: None,
        tx_power_dbm: None,
        tx_gain_dbi: None,
        rx_gain_dbi: None,
    };
    let mut records: Vec<SweepRecord> = Vec::new();
    let mut record_lines: Vec<usize> = Vec::new();

    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0usize;
    while i < lines.len() {
        let lineno = i + 1;
        let line = lines[i].trim();
        i += 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap();
        match key {
            "version" => {
                if parts.next() != Some("1") {
                    diags.push(Diagnostic {
                        line: lineno,
                        message: "unsupported sweep file version (expected 1)".into(),
                    });
                }
            }
            "scenario" => match parts.next().map(str::parse::<Scenario>) {
                Some(Ok(s)) => header.scenario = Some(s),
                _ => diags.push(Diagnostic {
                    line: lineno,
                    message: "scenario must be free_space, foliage or ground_reflection".into(),
                }),
            },
            "tx_power_dbm" | "tx_gain_dbi" | "rx_gain_dbi" => {
                match parts.next().and_then(|v| v.parse::<f64>().ok()) {
                    Some(v) => match key {
                        "tx_power_dbm" => header.tx_power_dbm = Some(v),
                        "tx_gain_dbi" => header.tx_gain_dbi = Some(v),
                        _ => header.rx_gain_dbi = Some(v),
                    },
                    None => diags.push(Diagnostic {
                        line: lineno,
                        message: format!("{key} needs one numeric value"),
                    }),
                }
            }
            "record" => {
                if let Some(record) =
                    parse_record(&lines, lineno, &mut i, parts.collect::<Vec<_>>(), &mut diags)
                {
                    // Duplicate pointing tuples name both offending lines.
                    if let Some(idx) = records
                        .iter()
                        .position(|r| r.pointing_key() == record.pointing_key())
                    {
                        diags.push(Diagnostic {
                            line: lineno,
                            message: format!(
                                "duplicate pointing tuple {:?}, first seen at line {}",
                                record.pointing_key(),
                                record_lines[idx]
                            ),
                        });
                    } else {
                        if let Some(first) = records.first() {
                            if (record.distance_m - first.distance_m).abs() > 1e-9 {
                                diags.push(Diagnostic {
                                    line: lineno,
                                    message: format!(
                                        "distance {} differs from the set distance {}",
                                        record.distance_m, first.distance_m
                                    ),
                                });
                            }
                            if record.polarization != first.polarization {
                                diags.push(Diagnostic {
                                    line: lineno,
                                    message: "polarization differs within the set".into(),
                                });
                            }
                        }
                        records.push(record);
                        record_lines.push(lineno);
                    }
                }
            }
            other => diags.push(Diagnostic {
                line: lineno,
                message: format!("unknown directive {other:?}"),
            }),
        }
    }

    for (field, present) in [
        ("scenario", header.scenario.is_some()),
        ("tx_power_dbm", header.tx_power_dbm.is_some()),
        ("tx_gain_dbi", header.tx_gain_dbi.is_some()),
        ("rx_gain_dbi", header.rx_gain_dbi.is_some()),
    ] {
        if !present {
            diags.push(Diagnostic {
                line: 1,
                message: format!("missing required header line {field:?}"),
            });
        }
    }

    if !diags.is_empty() {
        return ParseOutcome::Invalid(diags);
    }
    match SweepSet::new(
        records,
        header.tx_gain_dbi.unwrap(),
        header.rx_gain_dbi.unwrap(),
        header.tx_power_dbm.unwrap(),
        header.scenario.unwrap(),
    ) {
        Ok(set) => ParseOutcome::Valid(set),
        Err(e) => ParseOutcome::Invalid(vec![Diagnostic {
            line: 1,
            message: e.to_string(),
        }]),
    }
}

fn parse_record(
    lines: &[&str],
    header_line: usize,
    i: &mut usize,
    fields: Vec<&str>,
    diags: &mut Vec<Diagnostic>,
) -> Option<SweepRecord> {
    if fields.len() != 9 {
        diags.push(Diagnostic {
            line: header_line,
            message: format!("record header needs 9 fields, got {}", fields.len()),
        });
        return None;
    }
    let num = |idx: usize, name: &str, diags: &mut Vec<Diagnostic>| -> Option<f64> {
        match fields[idx].parse::<f64>() {
            Ok(v) => Some(v),
            Err(_) => {
                diags.push(Diagnostic {
                    line: header_line,
                    message: format!("{name} is not a number: {:?}", fields[idx]),
                });
                None
            }
        }
    };
    let tx_az = num(0, "tx_az_deg", diags)?;
    let tx_el = num(1, "tx_el_deg", diags)?;
    let rx_az = num(2, "rx_az_deg", diags)?;
    let rx_el = num(3, "rx_el_deg", diags)?;
    let polarization = match fields[4].parse::<Polarization>() {
        Ok(p) => p,
        Err(_) => {
            diags.push(Diagnostic {
                line: header_line,
                message: format!("bad polarization {:?}", fields[4]),
            });
            return None;
        }
    };
    let distance = num(5, "distance_m", diags)?;
    let noise_floor = num(6, "noise_floor_dbm", diags)?;
    let n_bins = match fields[7].parse::<usize>() {
        Ok(n) if n > 0 => n,
        _ => {
            diags.push(Diagnostic {
                line: header_line,
                message: format!("n_bins must be a positive integer, got {:?}", fields[7]),
            });
            return None;
        }
    };
    let spacing = num(8, "bin_spacing_ns", diags)?;

    let mut delays = Vec::with_capacity(n_bins);
    let mut powers = Vec::with_capacity(n_bins);
    let mut ok = true;
    for k in 0..n_bins {
        let lineno = *i + 1;
        let Some(raw) = lines.get(*i) else {
            diags.push(Diagnostic {
                line: header_line,
                message: format!("record promises {n_bins} bins but the file ends after {k}"),
            });
            return None;
        };
        *i += 1;
        let cols: Vec<&str> = raw.split_whitespace().collect();
        if cols.len() != 2 {
            diags.push(Diagnostic {
                line: lineno,
                message: format!("bin line needs `delay_ns power_dbm`, got {} fields", cols.len()),
            });
            ok = false;
            continue;
        }
        let delay: f64 = match cols[0].parse() {
            Ok(v) => v,
            Err(_) => {
                diags.push(Diagnostic {
                    line: lineno,
                    message: format!("bad delay {:?}", cols[0]),
                });
                ok = false;
                continue;
            }
        };
        let power_dbm: f64 = match cols[1].parse() {
            Ok(v) => v,
            Err(_) => {
                diags.push(Diagnostic {
                    line: lineno,
                    message: format!("bad power {:?}", cols[1]),
                });
                ok = false;
                continue;
            }
        };
        if let Some(&prev) = delays.last() {
            if delay <= prev {
                diags.push(Diagnostic {
                    line: lineno,
                    message: format!("delay axis is not monotone: {delay} ns after {prev} ns"),
                });
                ok = false;
            }
        }
        delays.push(delay);
        powers.push(dbm_to_milliwatts(power_dbm));
    }
    if !ok {
        return None;
    }

    if !(0.0..360.0).contains(&tx_az) || !(0.0..360.0).contains(&rx_az) {
        diags.push(Diagnostic {
            line: header_line,
            message: format!("azimuths must lie in [0, 360), got tx={tx_az} rx={rx_az}"),
        });
        return None;
    }
    match PowerDelayProfile::new(delays, powers, noise_floor, spacing) {
        Ok(pdp) => {
            let record = SweepRecord {
                tx_az_deg: tx_az,
                tx_el_deg: tx_el,
                rx_az_deg: rx_az,
                rx_el_deg: rx_el,
                polarization,
                distance_m: distance,
                pdp,
            };
            if let Err(e) = record.validate() {
                diags.push(Diagnostic {
                    line: header_line,
                    message: e.to_string(),
                });
                return None;
            }
            Some(record)
        }
        Err(e) => {
            diags.push(Diagnostic {
                line: header_line,
                message: e.to_string(),
            });
            None
        }
    }
}

/// Read and parse a sweep file. I/O problems are hard errors; format
/// problems come back as diagnostics.
pub fn read_file(path: impl AsRef<Path>) -> Result<ParseOutcome> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_str(&text))
}

/// Render a sweep set in the file format.
pub fn write_str(set: &SweepSet) -> String {
    let mut out = String::new();
    out.push_str("version 1\n");
    out.push_str(&format!("scenario {}\n", set.scenario));
    out.push_str(&format!("tx_power_dbm {}\n", set.tx_power_dbm));
    out.push_str(&format!("tx_gain_dbi {}\n", set.tx_gain_dbi));
    out.push_str(&format!("rx_gain_dbi {}\n", set.rx_gain_dbi));
    for r in &set.records {
        out.push_str(&format!(
            "record {} {} {} {} {} {} {} {} {}\n",
            r.tx_az_deg,
            r.tx_el_deg,
            r.rx_az_deg,
            r.rx_el_deg,
            match r.polarization {
                Polarization::Vv => "vv",
                Polarization::Vh => "vh",
            },
            r.distance_m,
            r.pdp.noise_floor_dbm,
            r.pdp.delay_bins_ns.len(),
            r.pdp.bin_spacing_ns,
        ));
        for (d, p) in r.pdp.delay_bins_ns.iter().zip(&r.pdp.power_mw) {
            out.push_str(&format!("{} {}\n", d, milliwatts_to_dbm(*p)));
        }
    }
    out
}

/// Write a sweep set to disk.
pub fn write_file(set: &SweepSet, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_str(set))?;
    Ok(())
}

/// Parse a sweep file, demanding validity.
pub fn read_valid(path: impl AsRef<Path>) -> Result<SweepSet> {
    match read_file(path)? {
        ParseOutcome::Valid(set) => Ok(set),
        ParseOutcome::Invalid(diags) => Err(Error::InvalidData(
            diags
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        )),
    }
}
