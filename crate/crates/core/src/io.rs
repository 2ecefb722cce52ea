//! Feature CSV read/write.
//!
//! Layout: one `#` comment line carrying the format version and the
//! effective run configuration, then `id,label,<feature columns>` with
//! values printed to 12 significant digits. Readers skip `#` lines.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;

use crate::classify::FeatureBlock;
use crate::error::{Error, Result};

pub fn config_comment(config: &BTreeMap<String, String>) -> String {
    let body: Vec<String> = config.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# {} config: {}", crate::FORMAT_VERSION, body.join(" "))
}

pub fn write_feature_csv(
    block: &FeatureBlock,
    config: &BTreeMap<String, String>,
    path: &Path,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", config_comment(config))?;
    writeln!(w, "id,label,{}", block.columns.join(","))?;
    for (row, (id, label)) in block.ids.iter().zip(&block.labels).enumerate() {
        write!(w, "{id},{label}")?;
        for v in block.matrix.row(row) {
            write!(w, ",{v:.11e}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_feature_csv(path: &Path) -> Result<FeatureBlock> {
    let reader = BufReader::new(File::open(path)?);
    let mut header: Option<Vec<String>> = None;
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut width = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        match &header {
            None => {
                if fields.len() < 2 || fields[0] != "id" || fields[1] != "label" {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "feature CSV header must start with id,label".into(),
                    });
                }
                width = fields.len() - 2;
                header = Some(fields[2..].iter().map(|s| s.to_string()).collect());
            }
            Some(_) => {
                if fields.len() != width + 2 {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("expected {} fields, got {}", width + 2, fields.len()),
                    });
                }
                ids.push(fields[0].to_string());
                labels.push(fields[1].to_string());
                for f in &fields[2..] {
                    values.push(f.parse::<f64>().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("not a number: {f:?}"),
                    })?);
                }
            }
        }
    }
    let columns = header.ok_or(Error::Parse {
        line: 0,
        message: "feature CSV has no header".into(),
    })?;
    let rows = ids.len();
    let matrix = Array2::from_shape_vec((rows, width), values)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(FeatureBlock {
        ids,
        labels,
        columns,
        matrix,
    })
}
