//! CSV ingestion and emission for quarterly series and monthly indicators.
//!
//! Quarterly files carry a `period` column (`YYYYQn`) plus one column per
//! value coordinate; the GDP layout is `period,gdp_growth,climate`. Monthly
//! files are `month,value` with `YYYY-MM` labels. Lines starting with `#`
//! are comments.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::period::{Month, Quarter};
use super::timeseries::{TimeSeries, GDP_COLUMNS};
use crate::error::{Error, Result};

/// Which CSV columns hold the period label and the value coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub period: String,
    pub values: Vec<String>,
}

impl CsvSchema {
    pub fn gdp() -> Self {
        Self {
            period: "period".into(),
            values: GDP_COLUMNS.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn single(column: &str) -> Self {
        Self {
            period: "period".into(),
            values: vec![column.to_string()],
        }
    }
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self::gdp()
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::data(format!("missing column {name:?} in header")))
}

fn parse_real(field: &str, line: u64, column: &str) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("column {column}: {field:?} is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::data(format!(
            "line {line}: column {column} holds non-finite value {field:?}"
        )));
    }
    Ok(v)
}

/// Parse a quarterly series; rows are sorted by period before validation.
pub fn read_csv<R: Read>(input: R, schema: &CsvSchema) -> Result<TimeSeries> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    let period_col = column_index(&headers, &schema.period)?;
    let value_cols = schema
        .values
        .iter()
        .map(|c| column_index(&headers, c))
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<(Quarter, Vec<f64>)> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let period: Quarter = field(period_col).parse().map_err(|e| Error::Parse {
            line,
            message: format!("{e}"),
        })?;
        let values = value_cols
            .iter()
            .zip(&schema.values)
            .map(|(&i, name)| parse_real(field(i), line, name))
            .collect::<Result<Vec<_>>>()?;
        rows.push((period, values));
    }
    if rows.is_empty() {
        return Err(Error::data("no rows"));
    }
    rows.sort_by_key(|(p, _)| *p);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::data(format!("duplicate period {}", w[0].0)));
    }
    let periods = rows.iter().map(|(p, _)| *p).collect();
    let values = rows.into_iter().flat_map(|(_, v)| v).collect();
    TimeSeries::new(periods, schema.values.clone(), values)
}

pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema)
}

/// Write `period,<columns...>`. Values use the shortest representation that
/// parses back to the same `f64`.
pub fn write_csv<W: Write>(series: &TimeSeries, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["period".to_string()];
    header.extend(series.columns().iter().cloned());
    w.write_record(&header)?;
    for t in 0..series.len() {
        let mut rec = vec![series.period(t).to_string()];
        rec.extend(series.row(t).iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn save_csv(series: &TimeSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(series, file)
}

/// Parse a `month,value` file, sorted by month.
pub fn read_monthly_csv<R: Read>(input: R) -> Result<Vec<(Month, f64)>> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    let month_col = column_index(&headers, "month")?;
    let value_col = column_index(&headers, "value")?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let month: Month = record
            .get(month_col)
            .unwrap_or("")
            .parse()
            .map_err(|e| Error::Parse {
                line,
                message: format!("{e}"),
            })?;
        let value = parse_real(record.get(value_col).unwrap_or(""), line, "value")?;
        out.push((month, value));
    }
    if out.is_empty() {
        return Err(Error::data("no rows"));
    }
    out.sort_by_key(|(m, _)| *m);
    Ok(out)
}

pub fn load_monthly_csv(path: impl AsRef<Path>) -> Result<Vec<(Month, f64)>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_monthly_csv(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "period,gdp_growth,climate\n1988Q1,0.5,100\n1988Q2,0.7,101.5\n1988Q3,-0.1,98\n";

    #[test]
    fn parses_three_rows() {
        let s = read_csv(GOOD.as_bytes(), &CsvSchema::gdp()).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.period(2).to_string(), "1988Q3");
        assert_eq!(s.row(1), &[0.7, 101.5]);
        assert_eq!(s.empirical_bound(), 101.5);
    }

    #[test]
    fn sorts_unordered_rows() {
        let csv = "period,gdp_growth,climate\n1988Q2,2,2\n1988Q1,1,1\n";
        let s = read_csv(csv.as_bytes(), &CsvSchema::gdp()).unwrap();
        assert_eq!(s.column(0).collect::<Vec<_>>(), vec![1.0, 2.0]);
    }

    #[test]
    fn gap_names_missing_period() {
        let csv = "period,gdp_growth,climate\n1988Q1,1,1\n1988Q3,2,2\n";
        match read_csv(csv.as_bytes(), &CsvSchema::gdp()).unwrap_err() {
            Error::Gap { missing } => assert_eq!(missing, vec!["1988Q2"]),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn empty_file_is_no_rows() {
        let err = read_csv("period,gdp_growth,climate\n".as_bytes(), &CsvSchema::gdp()).unwrap_err();
        assert_eq!(err.to_string(), "data error: no rows");
        assert!(read_csv("".as_bytes(), &CsvSchema::gdp()).is_err());
    }

    #[test]
    fn malformed_period_names_line() {
        let csv = "period,gdp_growth,climate\n1988Q1,1,1\n1988-06,2,2\n";
        match read_csv(csv.as_bytes(), &CsvSchema::gdp()).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn nan_is_data_error() {
        let csv = "period,gdp_growth,climate\n1988Q1,NaN,1\n";
        assert!(matches!(
            read_csv(csv.as_bytes(), &CsvSchema::gdp()),
            Err(Error::Data(_))
        ));
        let csv = "period,gdp_growth,climate\n1988Q1,inf,1\n";
        assert!(matches!(
            read_csv(csv.as_bytes(), &CsvSchema::gdp()),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn duplicate_period_rejected() {
        let csv = "period,gdp_growth,climate\n1988Q1,1,1\n1988Q1,2,2\n";
        assert!(matches!(
            read_csv(csv.as_bytes(), &CsvSchema::gdp()),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn comment_lines_skipped() {
        let csv = format!("# run_config={{}}\n{GOOD}");
        assert_eq!(read_csv(csv.as_bytes(), &CsvSchema::gdp()).unwrap().len(), 3);
    }

    #[test]
    fn monthly_parse() {
        let m = read_monthly_csv("month,value\n2000-02,3\n2000-01,1\n".as_bytes()).unwrap();
        assert_eq!(m[0].0.to_string(), "2000-01");
        assert_eq!(m[1].1, 3.0);
    }
}
