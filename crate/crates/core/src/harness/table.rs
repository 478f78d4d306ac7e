use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// A numeric CSV table with `#`-prefixed `key: value` metadata lines.
///
/// The header is written first, then the metadata, then the rows. Floats use
/// the shortest representation that parses back to the same `f64`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.header)?;
            w.flush()?;
        }
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {}", v.replace('\n', " "))?;
        }
        let mut w = csv::Writer::from_writer(&mut out);
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format!("{x:?}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut text = String::new();
        let mut metadata = Vec::new();
        for line in input.lines() {
            let line = line?;
            match line.strip_prefix('#') {
                Some(m) => {
                    let (k, v) = m.trim_start().split_once(':').ok_or_else(|| {
                        Error::InvalidArgument(format!("malformed metadata line '{line}'"))
                    })?;
                    metadata.push((k.to_string(), v.trim_start().to_string()));
                }
                None => {
                    text.push_str(&line);
                    text.push('\n');
                }
            }
        }
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| Error::InvalidArgument(format!("bad number '{f}': {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self {
            header,
            metadata,
            rows,
        })
    }
}
