//! Shared helpers for the integration suites.

use std::path::PathBuf;

use fastrcs::numkit::Matrix;
use fastrcs::Dataset;

/// Minimal reader for the plain numeric CSVs shipped in `data/`:
/// a header row naming the columns, comma separation, no quoting.
pub fn load_csv_dataset(path: &PathBuf, response: &str) -> Dataset {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().expect("empty csv").split(',').collect();
    let y_col = header
        .iter()
        .position(|&c| c == response)
        .unwrap_or_else(|| panic!("no column named {response}"));
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>().expect("numeric field"))
            .collect();
        assert_eq!(fields.len(), header.len());
        let mut row = Vec::with_capacity(fields.len() - 1);
        for (j, &v) in fields.iter().enumerate() {
            if j == y_col {
                y.push(v);
            } else {
                row.push(v);
            }
        }
        rows.push(row);
    }
    Dataset::new(Matrix::from_rows(&rows).unwrap(), y).unwrap()
}

/// The concrete slump-test case study shipped with the repository:
/// 59 mixes, 7 predictors, 28-day compressive strength as the response.
/// Rows 0..35 are the first measurement campaign, rows 35..59 the second.
pub fn load_slump() -> Dataset {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/slump.csv");
    let data = load_csv_dataset(&path, "strength");
    assert_eq!(data.n(), 59);
    assert_eq!(data.p(), 8);
    data
}
