//! Iris table reader.
//!
//! Format: UTF-8 CSV with a header row, four float columns
//! (`sepal_length, sepal_width, petal_length, petal_width`) and a string
//! species label, LF line endings. Labels map to indices in order of first
//! appearance.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use super::DataError;

const BUNDLED: &str = include_str!("../../data/iris.csv");

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }
}

pub fn load_iris(path: impl AsRef<Path>) -> Result<Dataset, DataError> {
    load_iris_from_reader(File::open(path)?)
}

/// The copy shipped with the crate.
pub fn bundled_iris() -> Dataset {
    load_iris_from_reader(BUNDLED.as_bytes()).expect("bundled table parses")
}

pub fn load_iris_from_reader<R: Read>(reader: R) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let mut data = Dataset {
        features: Vec::new(),
        labels: Vec::new(),
        class_names: Vec::new(),
    };
    for record in rdr.records() {
        let record = record.map_err(|e| DataError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |message: String| DataError::Parse { line, message };
        if record.len() != 5 {
            return Err(bad(format!("expected 5 fields, found {}", record.len())));
        }
        let row = (0..4)
            .map(|i| {
                let field = record[i].trim();
                match field.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(bad(format!("column {} is not a number: {field:?}", i + 1))),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let name = record[4].trim();
        if name.is_empty() {
            return Err(bad("empty label".into()));
        }
        let label = match data.class_names.iter().position(|c| c == name) {
            Some(k) => k,
            None => {
                data.class_names.push(name.to_string());
                data.class_names.len() - 1
            }
        };
        data.features.push(row);
        data.labels.push(label);
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_shape() {
        let d = bundled_iris();
        assert_eq!(d.len(), 150);
        assert_eq!(d.n_classes(), 3);
        for c in 0..3 {
            assert_eq!(d.labels.iter().filter(|&&l| l == c).count(), 50);
        }
        assert_eq!(d.labels[0], 0);
        assert_eq!(d.class_names[0], "Iris-setosa");
        assert!(d.features.iter().all(|r| r.len() == 4));
    }

    #[test]
    fn malformed_row_names_line() {
        let text = "a,b,c,d,e\n1,2,3,4,x\n1,2,oops,4,x\n";
        match load_iris_from_reader(text.as_bytes()) {
            Err(DataError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let short = "a,b,c,d,e\n1,2,3\n";
        assert!(matches!(
            load_iris_from_reader(short.as_bytes()),
            Err(DataError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn labels_by_first_appearance() {
        let text = "a,b,c,d,e\n1,1,1,1,z\n1,1,1,1,a\n1,1,1,1,z\n";
        let d = load_iris_from_reader(text.as_bytes()).unwrap();
        assert_eq!(d.labels, vec![0, 1, 0]);
        assert_eq!(d.class_names, vec!["z", "a"]);
    }
}
