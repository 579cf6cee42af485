// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use crate::error::{Error, Result};

use super::{RawDataset, Source};

const CLASSES: [&str; 3] = ["Iris-setosa", "Iris-versicolor", "Iris-virginica"];

/// Reads the UCI Iris CSV: four floats and a class name per row. Classes are numbered 1, 2, 3
/// in file order (setosa, versicolor, virginica).
pub fn load_iris(path: impl AsRef<Path>) -> Result<RawDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_iris(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}:{location}", path.display()),
            message,
        },
        other => other,
    })
}

pub fn parse_iris(text: &str) -> Result<RawDataset> {
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let loc = format!("line {}", i + 1);
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(Error::parse(
                &loc,
                format!("expected 5 fields, found {}", fields.len()),
            ));
        }
        for f in &fields[..4] {
            let x: f64 = f
                .parse()
                .map_err(|_| Error::parse(&loc, format!("bad number {f:?}")))?;
            if !x.is_finite() {
                return Err(Error::parse(&loc, "non-finite attribute"));
            }
            features.push(x);
        }
        let class = CLASSES
            .iter()
            .position(|&c| c == fields[4])
            .ok_or_else(|| Error::parse(&loc, format!("unknown class {:?}", fields[4])))?;
        labels.push(class as u8 + 1);
    }
    RawDataset::new(4, features, labels, Source::IrisCsv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rows_and_rejects_garbage() {
        let raw =
            parse_iris("5.1,3.5,1.4,0.2,Iris-setosa\n6.3,3.3,6.0,2.5,Iris-virginica\n\n").unwrap();
        assert_eq!(raw.labels, [1, 3]);
        assert_eq!(raw.row(1), [6.3, 3.3, 6.0, 2.5]);
        assert!(matches!(
            parse_iris("1,2,3,Iris-setosa"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_iris("1,2,x,4,Iris-setosa"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_iris("1,2,3,4,Rose"),
            Err(Error::Parse { .. })
        ));
    }
}
