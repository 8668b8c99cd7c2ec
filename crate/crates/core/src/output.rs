//! CSV encoding of sweep results.
//!
//! The long format has exactly the columns in [`CSV_HEADER`], one row per
//! `(scheme, m, mer_db, metric)`, floats in shortest round-trip decimal.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::estimator::Estimate;
use crate::sweep::{Metric, SweepResult, SweepRow};

pub const CSV_HEADER: [&str; 9] = [
    "scheme",
    "m",
    "mer_db",
    "metric",
    "mean",
    "std_err",
    "ci95_low",
    "ci95_high",
    "n_trials",
];

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes the long-format table to any writer.
pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in result.rows() {
        let e = &r.estimate;
        w.write_record([
            r.scheme.as_str().to_string(),
            r.m.to_string(),
            r.mer_db.to_string(),
            r.metric.as_str().to_string(),
            e.mean.to_string(),
            e.std_err.to_string(),
            e.ci95_low.to_string(),
            e.ci95_high.to_string(),
            e.n_trials.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_err(path))?;
    write_csv(result, BufWriter::new(file)).map_err(csv_err(path))
}

/// Parses a long-format table; `origin` names the source in error messages.
pub fn parse_csv<R: Read>(input: R, origin: &Path) -> Result<SweepResult> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(csv_err(origin))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            path: origin.to_path_buf(),
            line: 1,
            message: format!("expected header {}", CSV_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err(origin))?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| bad(format!("column {}: {e}", CSV_HEADER[i])))
        };
        let int = |i: usize| -> Result<u64> {
            rec[i]
                .parse::<u64>()
                .map_err(|e| bad(format!("column {}: {e}", CSV_HEADER[i])))
        };
        rows.push(SweepRow {
            scheme: rec[0].parse().map_err(|e: Error| bad(e.to_string()))?,
            m: int(1)? as usize,
            mer_db: num(2)?,
            metric: rec[3].parse().map_err(|e: Error| bad(e.to_string()))?,
            estimate: Estimate {
                mean: num(4)?,
                std_err: num(5)?,
                ci95_low: num(6)?,
                ci95_high: num(7)?,
                n_trials: int(8)?,
            },
        });
    }
    SweepResult::from_rows(rows)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<SweepResult> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    parse_csv(file, path)
}

/// Column label of a curve in the wide tables.
pub fn curve_label(scheme: crate::estimator::SchemeId, m: usize) -> String {
    if scheme.uses_nodes() {
        format!("{scheme}_m{m}")
    } else {
        scheme.to_string()
    }
}

/// One metric as a plot-ready table: `mer_db` then one mean column per curve.
/// Points a curve lacks are left empty.
pub fn write_wide_table<W: Write>(result: &SweepResult, metric: Metric, out: W) -> csv::Result<()> {
    let curves = result.curves();
    let mut mers: Vec<f64> = result
        .rows()
        .iter()
        .filter(|r| r.metric == metric)
        .map(|r| r.mer_db)
        .collect();
    mers.sort_by(f64::total_cmp);
    mers.dedup();

    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["mer_db".to_string()];
    header.extend(curves.iter().map(|&(s, m)| curve_label(s, m)));
    w.write_record(&header)?;
    for mer in mers {
        let mut rec = vec![mer.to_string()];
        rec.extend(curves.iter().map(|&(s, m)| {
            result
                .get(s, m, mer, metric)
                .map(|e| e.mean.to_string())
                .unwrap_or_default()
        }));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `ergodic_secrecy_capacity.csv` and `intercept_probability.csv`
/// wide tables into `dir`, returning their paths.
pub fn emit_wide_tables(result: &SweepResult, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut paths = Vec::new();
    for metric in Metric::ALL {
        let path = dir.join(format!("{metric}.csv"));
        let file = File::create(&path).map_err(io_err(&path))?;
        write_wide_table(result, metric, BufWriter::new(file)).map_err(csv_err(&path))?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::SchemeId;
    use proptest::prelude::*;

    fn row(scheme: SchemeId, m: usize, mer_db: f64, metric: Metric, e: Estimate) -> SweepRow {
        SweepRow {
            scheme,
            m,
            mer_db,
            metric,
            estimate: e,
        }
    }

    fn to_string(r: &SweepResult) -> String {
        let mut buf = Vec::new();
        write_csv(r, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_result_is_header_only() {
        let text = to_string(&SweepResult::default());
        assert_eq!(
            text,
            "scheme,m,mer_db,metric,mean,std_err,ci95_low,ci95_high,n_trials\n"
        );
    }

    #[test]
    fn two_rows_three_lines() {
        let r = SweepResult::from_rows(vec![
            row(
                SchemeId::Direct,
                0,
                3.0,
                Metric::InterceptProbability,
                Estimate::proportion(1, 4),
            ),
            row(
                SchemeId::Direct,
                0,
                3.0,
                Metric::ErgodicSecrecyCapacity,
                Estimate::new(1.5, 0.1, 4),
            ),
        ])
        .unwrap();
        let text = to_string(&r);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("direct,0,3,ergodic_secrecy_capacity,1.5,0.1,"));
        assert!(lines[2].starts_with("direct,0,3,intercept_probability,0.25,"));
        assert!(lines[2].ends_with(",4"));
    }

    #[test]
    fn emit_twice_identical_and_path_errors() {
        let dir = tempfile::tempdir().unwrap();
        let r = SweepResult::from_rows(vec![row(
            SchemeId::RelaySelection,
            2,
            -1.5,
            Metric::InterceptProbability,
            Estimate::proportion(3, 1000),
        )])
        .unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        emit_csv(&r, &a).unwrap();
        emit_csv(&r, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        assert_eq!(read_csv(&a).unwrap(), r);

        let missing = dir.path().join("no/such/dir/out.csv");
        let err = emit_csv(&r, &missing).unwrap_err();
        assert!(err.to_string().contains("no/such/dir/out.csv"));
    }

    #[test]
    fn bad_header_and_bad_cell() {
        let p = Path::new("x.csv");
        assert!(matches!(
            parse_csv("a,b\n1,2\n".as_bytes(), p),
            Err(Error::Parse { line: 1, .. })
        ));
        let text = format!(
            "{}\ndirect,0,zero,intercept_probability,0,0,0,0,1\n",
            CSV_HEADER.join(",")
        );
        assert!(matches!(
            parse_csv(text.as_bytes(), p),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn wide_table_layout() {
        let e = |v| Estimate::new(v, 0.0, 10);
        let r = SweepResult::from_rows(vec![
            row(
                SchemeId::Direct,
                0,
                0.0,
                Metric::InterceptProbability,
                e(0.5),
            ),
            row(
                SchemeId::Direct,
                0,
                3.0,
                Metric::InterceptProbability,
                e(0.25),
            ),
            row(
                SchemeId::RelaySelection,
                2,
                0.0,
                Metric::InterceptProbability,
                e(0.1),
            ),
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_wide_table(&r, Metric::InterceptProbability, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "mer_db,direct,relay_selection_m2\n0,0.5,0.1\n3,0.25,\n"
        );
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![
            -1e6..1e6f64,
            any::<f64>().prop_filter("finite", |v| v.is_finite())
        ]
    }

    proptest! {
        #[test]
        fn csv_round_trip(
            rows in prop::collection::vec(
                (0usize..6, 0usize..16, finite(), any::<bool>(), finite(), finite(), finite(), finite(), 1u64..u64::MAX),
                0..40,
            )
        ) {
            let rows: Vec<SweepRow> = rows
                .into_iter()
                .map(|(s, m, mer, ip, mean, se, lo, hi, n)| SweepRow {
                    scheme: SchemeId::ALL[s],
                    m,
                    mer_db: mer,
                    metric: if ip { Metric::InterceptProbability } else { Metric::ErgodicSecrecyCapacity },
                    estimate: Estimate { mean, std_err: se, ci95_low: lo, ci95_high: hi, n_trials: n },
                })
                .collect();
            // drop key collisions; from_rows rejects duplicates
            let mut uniq: Vec<SweepRow> = Vec::new();
            for r in rows {
                if !uniq.iter().any(|u| u.scheme == r.scheme && u.m == r.m && u.metric == r.metric && u.mer_db == r.mer_db) {
                    uniq.push(r);
                }
            }
            let result = SweepResult::from_rows(uniq).unwrap();
            let text = to_string(&result);
            let back = parse_csv(text.as_bytes(), Path::new("mem")).unwrap();
            prop_assert_eq!(back, result);
        }
    }
}
