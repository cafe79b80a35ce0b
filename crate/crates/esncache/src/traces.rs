//! CSV trace files with fixed headers.

use std::io::{Read, Write};

use esncache_core::data::{ContentTraceRow, DataError, MobilityTraceRow, CONTENT_HEADER, MOBILITY_HEADER};
use esncache_core::esn::CONTEXT_WIDTH;

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> DataError {
    DataError::Parse { line, column, message: message.into() }
}

fn csv_err(e: csv::Error) -> DataError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    parse_err(line, 0, e.to_string())
}

/// Records after a header that must match `header` exactly. An empty input
/// yields no records.
fn records<R: Read>(input: R, header: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut out = Vec::new();
    let mut first = true;
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if first {
            first = false;
            for (j, want) in header.iter().enumerate() {
                match rec.get(j) {
                    Some(got) if got == *want => {}
                    got => {
                        return Err(parse_err(line, j + 1, format!("expected header {want:?}, found {:?}", got.unwrap_or(""))))
                    }
                }
            }
            if rec.len() != header.len() {
                return Err(parse_err(line, header.len() + 1, format!("header has {} columns, expected {}", rec.len(), header.len())));
            }
            continue;
        }
        if rec.len() != header.len() {
            let column = rec.len().min(header.len()) + 1;
            return Err(parse_err(line, column, format!("expected {} columns, found {}", header.len(), rec.len())));
        }
        out.push((line, rec));
    }
    Ok(out)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, line: usize, j: usize, name: &str) -> Result<T, DataError> {
    let raw = rec.get(j).unwrap_or("");
    raw.trim()
        .parse()
        .map_err(|_| parse_err(line, j + 1, format!("{name}: cannot parse {raw:?}")))
}

/// Parse a content trace; `catalog` bounds the 1-based content ids.
pub fn read_content<R: Read>(input: R, catalog: Option<usize>) -> Result<Vec<ContentTraceRow>, DataError> {
    records(input, &CONTENT_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            let mut context = [0.0; CONTEXT_WIDTH];
            for (k, c) in context.iter_mut().enumerate() {
                *c = field(&rec, line, 2 + k, CONTENT_HEADER[2 + k])?;
            }
            let row = ContentTraceRow {
                user_id: field(&rec, line, 0, "user_id")?,
                slot: field(&rec, line, 1, "slot")?,
                context,
                content_id: field(&rec, line, 9, "content_id")?,
            };
            row.validate(catalog).map_err(|message| DataError::Invalid { line, message })?;
            Ok(row)
        })
        .collect()
}

/// Parse a mobility trace; positions must lie within `radius` of the origin.
pub fn read_mobility<R: Read>(input: R, radius: f64) -> Result<Vec<MobilityTraceRow>, DataError> {
    records(input, &MOBILITY_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            let row = MobilityTraceRow {
                user_id: field(&rec, line, 0, "user_id")?,
                t: field(&rec, line, 1, "t")?,
                x_m: field(&rec, line, 2, "x_m")?,
                y_m: field(&rec, line, 3, "y_m")?,
            };
            row.validate(radius).map_err(|message| DataError::Invalid { line, message })?;
            Ok(row)
        })
        .collect()
}

pub fn write_content<W: Write>(out: W, rows: &[ContentTraceRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CONTENT_HEADER)?;
    for r in rows {
        let mut rec = vec![r.user_id.to_string(), r.slot.to_string()];
        rec.extend(r.context.iter().map(f64::to_string));
        rec.push(r.content_id.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_mobility<W: Write>(out: W, rows: &[MobilityTraceRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MOBILITY_HEADER)?;
    for r in rows {
        w.write_record([r.user_id.to_string(), r.t.to_string(), r.x_m.to_string(), r.y_m.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_an_empty_stream() {
        assert!(read_content(&b""[..], None).unwrap().is_empty());
        assert!(read_mobility(&b""[..], 10.0).unwrap().is_empty());
    }

    #[test]
    fn short_row_reports_its_line() {
        let text = "user_id,t,x_m,y_m\n0,0,1,1\n1,0,2\n";
        match read_mobility(text.as_bytes(), 10.0) {
            Err(DataError::Parse { line: 3, column: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn out_of_disk_position_is_invalid() {
        let text = "user_id,t,x_m,y_m\n0,0,30,40\n";
        assert!(matches!(read_mobility(text.as_bytes(), 10.0), Err(DataError::Invalid { line: 2, .. })));
    }

    #[test]
    fn wrong_header_is_rejected() {
        let text = "user,t,x_m,y_m\n";
        assert!(matches!(read_mobility(text.as_bytes(), 10.0), Err(DataError::Parse { line: 1, column: 1, .. })));
    }
}
