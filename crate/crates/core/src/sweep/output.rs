use std::io::{Read, Write};
use std::path::Path;

use super::{Result, SweepRow, SweepTable};

pub const CSV_HEADER: [&str; 8] = [
    "axis_value",
    "coupling_l",
    "gain",
    "mq_optimal_db",
    "mq_phase_db",
    "mid_db",
    "above_threshold",
    "expansion_valid",
];

/// Twelve significant digits in scientific notation.
fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        x.to_string()
    }
}

pub fn write_csv<W: Write>(table: &SweepTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &table.rows {
        w.write_record([
            float(r.axis_value),
            float(r.coupling_l),
            float(r.gain),
            float(r.mq_optimal_db),
            float(r.mq_phase_db),
            float(r.mid_db),
            r.above_threshold.to_string(),
            r.expansion_valid.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(table: &SweepTable, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(table, std::io::BufWriter::new(file))
}

/// Parses rows written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(bad("unexpected CSV header"));
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let f = |i: usize| -> Result<f64> {
            record[i]
                .parse()
                .map_err(|_| bad(&format!("bad number '{}'", &record[i])))
        };
        let b = |i: usize| -> Result<bool> {
            record[i]
                .parse()
                .map_err(|_| bad(&format!("bad flag '{}'", &record[i])))
        };
        rows.push(SweepRow {
            axis_value: f(0)?,
            coupling_l: f(1)?,
            gain: f(2)?,
            mq_optimal_db: f(3)?,
            mq_phase_db: f(4)?,
            mid_db: f(5)?,
            above_threshold: b(6)?,
            expansion_valid: b(7)?,
        });
    }
    Ok(rows)
}

fn bad(msg: &str) -> super::SweepError {
    std::io::Error::new(std::io::ErrorKind::InvalidData, msg.to_string()).into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::SweepAxis;

    fn row(x: f64) -> SweepRow {
        SweepRow {
            axis_value: x,
            coupling_l: std::f64::consts::PI / 3.0,
            gain: f64::NAN,
            mq_optimal_db: -1.0 / 3.0,
            mq_phase_db: f64::INFINITY,
            mid_db: -8.450_980_400_142_567,
            above_threshold: x > 0.5,
            expansion_valid: true,
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let mut buf = Vec::new();
        let t = SweepTable {
            axis: SweepAxis::Eta,
            rows: vec![],
        };
        write_csv(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(float(-8.450_980_400_142_567), "-8.45098040014e0");
        assert_eq!(float(1e-300), "1.00000000000e-300");
        assert_eq!(float(f64::NAN), "NaN");
    }

    #[test]
    fn round_trip_at_printed_precision() {
        let t = SweepTable {
            axis: SweepAxis::Eta,
            rows: (0..20).map(|i| row(i as f64 / 19.0)).collect(),
        };
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), t.rows.len());
        let mut again = Vec::new();
        write_csv(
            &SweepTable {
                axis: t.axis,
                rows: back.clone(),
            },
            &mut again,
        )
        .unwrap();
        assert_eq!(buf, again);
        for (a, b) in t.rows.iter().zip(&back) {
            assert_eq!(float(a.axis_value).parse::<f64>().unwrap(), b.axis_value);
            assert_eq!(a.above_threshold, b.above_threshold);
            assert!(b.gain.is_nan());
        }
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let t = SweepTable {
            axis: SweepAxis::Eta,
            rows: vec![],
        };
        assert!(emit_csv(&t, Path::new("/nonexistent-dir/x.csv")).is_err());
    }
}
