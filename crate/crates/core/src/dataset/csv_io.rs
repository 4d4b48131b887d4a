use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::Dataset;
use crate::error::{Error, Result};

/// Column roles for CSV ingestion, by header name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub response: String,
    pub order: Vec<String>,
    pub intercept: Option<String>,
    /// Regressor columns in model order. `None` means every column except the
    /// response, in header order.
    pub regressors: Option<Vec<String>>,
}

impl Schema {
    pub fn new(response: impl Into<String>, order: &[&str], intercept: Option<&str>) -> Self {
        Self {
            response: response.into(),
            order: order.iter().map(|s| s.to_string()).collect(),
            intercept: intercept.map(str::to_string),
            regressors: None,
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema)
}

pub fn read_csv<R: Read>(reader: R, schema: &Schema) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();

    let find = |name: &str| -> Result<usize> {
        let mut hits = header.iter().enumerate().filter(|(_, h)| *h == name);
        match (hits.next(), hits.next()) {
            (Some((i, _)), None) => Ok(i),
            (None, _) => Err(Error::Schema(format!("column `{name}` not found in header {header:?}"))),
            (Some(_), Some(_)) => Err(Error::Schema(format!("column `{name}` appears more than once"))),
        }
    };

    let response_idx = find(&schema.response)?;
    let regressor_names: Vec<String> = match &schema.regressors {
        Some(list) => list.clone(),
        None => header
            .iter()
            .filter(|h| **h != schema.response)
            .cloned()
            .collect(),
    };
    let regressor_idx = regressor_names
        .iter()
        .map(|name| {
            if *name == schema.response {
                return Err(Error::Schema(format!("`{name}` is the response, not a regressor")));
            }
            find(name)
        })
        .collect::<Result<Vec<_>>>()?;
    let position = |name: &str| -> Result<usize> {
        regressor_names
            .iter()
            .position(|r| r == name)
            .ok_or_else(|| Error::Schema(format!("column `{name}` is not among the regressors")))
    };
    // Resolve names first so a missing column wins over a bad cell.
    for name in &schema.order {
        find(name)?;
    }
    if let Some(name) = &schema.intercept {
        find(name)?;
    }
    let order_columns = schema
        .order
        .iter()
        .map(|name| position(name))
        .collect::<Result<Vec<_>>>()?;
    let intercept_column = schema.intercept.as_deref().map(position).transpose()?;

    let p = regressor_idx.len();
    let mut values: Vec<f64> = Vec::new();
    let mut response: Vec<f64> = Vec::new();
    let parse = |record: &csv::StringRecord, row: usize, col: usize| -> Result<f64> {
        let raw = record.get(col).unwrap_or("");
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::Parse {
                row,
                column: header[col].clone(),
                value: raw.to_string(),
            }),
        }
    };
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        let row = k + 1;
        for &c in &regressor_idx {
            values.push(parse(&record, row, c)?);
        }
        response.push(parse(&record, row, response_idx)?);
    }
    let n = response.len();
    if n == 0 {
        return Err(Error::Validation("n ≥ 1 required: the file has a header but no data rows".into()));
    }
    let regressors = DMatrix::from_row_slice(n, p, &values);
    Dataset::new(
        regressor_names,
        schema.response.clone(),
        regressors,
        DVector::from_vec(response),
        order_columns,
        intercept_column,
    )
}

/// Write regressor columns followed by the response. Values use the shortest
/// decimal form that parses back to the identical `f64` (at most 17
/// significant digits).
pub fn write_csv_to<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = data.regressor_names().iter().map(String::as_str).collect();
    header.push(data.response_name());
    wtr.write_record(&header)?;
    let mut fields: Vec<String> = Vec::with_capacity(header.len());
    for i in 0..data.n() {
        fields.clear();
        fields.extend(data.regressors().row(i).iter().map(|v| v.to_string()));
        fields.push(data.response()[i].to_string());
        wtr.write_record(&fields)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn write_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(data, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> Schema {
        Schema::new("y", &["x"], Some("const"))
    }

    #[test]
    fn reads_three_rows() {
        let text = "x,const,y\n0.5,1,2\n0.25,1,3\n1.5,1,4\n";
        let d = read_csv(text.as_bytes(), &schema()).unwrap();
        assert_eq!((d.n(), d.p()), (3, 2));
        assert_eq!(d.order_columns(), &[0]);
        assert_eq!(d.intercept_column(), Some(1));
        assert_eq!(d.row(1), (vec![0.25, 1.0], 3.0));
    }

    #[test]
    fn intercept_must_be_one() {
        let text = "x,const,y\n0.5,1,2\n0.25,0.99,3\n";
        let err = read_csv(text.as_bytes(), &schema()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn header_only_is_rejected() {
        let err = read_csv("x,const,y\n".as_bytes(), &schema()).unwrap_err();
        assert!(err.to_string().contains("n ≥ 1 required"), "{err}");
    }

    #[test]
    fn missing_column_is_schema_error() {
        let err = read_csv("x,y\n1,2\n".as_bytes(), &schema()).unwrap_err();
        assert!(matches!(err, Error::Schema(_)), "{err}");
    }

    #[test]
    fn bad_cell_reports_location() {
        let err = read_csv("x,const,y\n1,1,2\n1,1,abc\n".as_bytes(), &schema()).unwrap_err();
        match err {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "y");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn explicit_regressor_list_skips_columns() {
        let text = "id,x,const,y\n7,0.5,1,2\n8,0.25,1,3\n";
        let mut s = schema();
        s.regressors = Some(vec!["x".into(), "const".into()]);
        let d = read_csv(text.as_bytes(), &s).unwrap();
        assert_eq!(d.p(), 2);
        assert_eq!(d.regressor_names(), &["x".to_string(), "const".to_string()]);
    }
}
