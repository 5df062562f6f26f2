//! CSV ingestion, one-vs-rest labels and seeded subsampling.

use std::io::Read;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::LearnerError;

/// Where a dataset came from and how it was reduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub label_column: String,
    pub positive_class: String,
    /// Rows read from the file before dropping.
    pub rows_read: usize,
    /// Rows dropped for non-numeric feature cells.
    pub rows_dropped: usize,
    pub sample_seed: Option<u64>,
    pub sample_size: Option<usize>,
    /// Original row indices kept by sampling, ascending.
    pub sample_rows: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    features: Vec<Vec<f64>>,
    labels: Vec<i8>,
    provenance: Provenance,
}

impl Dataset {
    /// Builds a dataset from rows of features and `±1` labels.
    pub fn new(
        feature_names: Vec<String>,
        features: Vec<Vec<f64>>,
        labels: Vec<i8>,
        provenance: Provenance,
    ) -> Result<Self, LearnerError> {
        if features.is_empty() {
            return Err(LearnerError::EmptyDataset);
        }
        if features.len() != labels.len() {
            return Err(LearnerError::Shape(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if let Some(i) = features.iter().position(|r| r.len() != feature_names.len()) {
            return Err(LearnerError::Shape(format!(
                "row {i} has {} features, expected {}",
                features[i].len(),
                feature_names.len()
            )));
        }
        if labels.iter().any(|&y| y != 1 && y != -1) {
            return Err(LearnerError::Shape("labels must be +1 or -1".into()));
        }
        if features.iter().flatten().any(|x| !x.is_finite()) {
            return Err(LearnerError::Shape("features must be finite".into()));
        }
        if labels.iter().all(|&y| y == labels[0]) {
            return Err(LearnerError::SingleClass(provenance.positive_class.clone()));
        }
        Ok(Dataset {
            feature_names,
            features,
            labels,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i]
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Uniform sample of `size` rows without replacement, kept in original
    /// order. The generator is ChaCha8 seeded with `seed`.
    pub fn sample(&self, size: usize, seed: u64) -> Result<Dataset, LearnerError> {
        if size > self.len() {
            return Err(LearnerError::SampleTooLarge {
                size,
                available: self.len(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = rand::seq::index::sample(&mut rng, self.len(), size).into_vec();
        idx.sort_unstable();
        let original = |i: usize| match &self.provenance.sample_rows {
            Some(rows) => rows[i],
            None => i,
        };
        let provenance = Provenance {
            sample_seed: Some(seed),
            sample_size: Some(size),
            sample_rows: Some(idx.iter().map(|&i| original(i)).collect()),
            ..self.provenance.clone()
        };
        Dataset::new(
            self.feature_names.clone(),
            idx.iter().map(|&i| self.features[i].clone()).collect(),
            idx.iter().map(|&i| self.labels[i]).collect(),
            provenance,
        )
    }
}

/// Reads a dataset from a CSV file; see [`parse_csv`].
pub fn load_csv(
    path: &Path,
    label_column: &str,
    positive_class: &str,
) -> Result<Dataset, LearnerError> {
    let file = std::fs::File::open(path).map_err(|e| LearnerError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_csv(
        file,
        &path.display().to_string(),
        label_column,
        positive_class,
    )
}

/// Parses comma-separated data with a header row.
///
/// Rows whose label equals `positive_class` get `+1`, all others `-1`. Every
/// other column is a numeric feature; rows with a non-numeric feature cell
/// are dropped and counted, and a column with no numeric cell at all is an
/// error.
pub fn parse_csv<R: Read>(
    reader: R,
    source: &str,
    label_column: &str,
    positive_class: &str,
) -> Result<Dataset, LearnerError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| LearnerError::Csv(e.to_string()))?
        .clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| LearnerError::MissingColumn(label_column.to_string()))?;
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&c| c != label_idx).collect();
    if feature_cols.is_empty() {
        return Err(LearnerError::Shape("no feature columns".into()));
    }
    let feature_names: Vec<String> = feature_cols
        .iter()
        .map(|&c| headers[c].to_string())
        .collect();

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut rows_read = 0;
    let mut numeric_seen = vec![false; feature_cols.len()];
    for record in rdr.records() {
        let record = record.map_err(|e| LearnerError::Csv(e.to_string()))?;
        rows_read += 1;
        let parsed: Vec<Option<f64>> = feature_cols
            .iter()
            .map(|&c| {
                record
                    .get(c)
                    .and_then(|s| s.parse::<f64>().ok())
                    .filter(|x| x.is_finite())
            })
            .collect();
        for (seen, v) in numeric_seen.iter_mut().zip(&parsed) {
            *seen |= v.is_some();
        }
        let Some(row) = parsed.into_iter().collect::<Option<Vec<f64>>>() else {
            continue;
        };
        let label = record.get(label_idx).unwrap_or("");
        features.push(row);
        labels.push(if label == positive_class { 1 } else { -1 });
    }
    if rows_read > 0 {
        if let Some(c) = numeric_seen.iter().position(|&s| !s) {
            return Err(LearnerError::NonNumericColumn(feature_names[c].clone()));
        }
    }
    let provenance = Provenance {
        source: source.to_string(),
        label_column: label_column.to_string(),
        positive_class: positive_class.to_string(),
        rows_read,
        rows_dropped: rows_read - features.len(),
        sample_seed: None,
        sample_size: None,
        sample_rows: None,
    };
    Dataset::new(feature_names, features, labels, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;

    const IRIS: &str = include_str!("../../data/iris.csv");

    fn iris(positive: &str) -> Dataset {
        parse_csv(IRIS.as_bytes(), "iris.csv", "species", positive).unwrap()
    }

    #[test]
    fn bundled_iris() {
        let ds = iris("setosa");
        assert_eq!((ds.len(), ds.n_features()), (150, 4));
        assert_eq!(ds.labels().iter().filter(|&&y| y == 1).count(), 50);
        assert_eq!(ds.provenance().rows_dropped, 0);
        assert_eq!(ds.feature_names()[3], "petal_width");
    }

    #[test]
    fn bundled_wine() {
        let text = include_str!("../../data/wine.csv");
        let ds = parse_csv(text.as_bytes(), "wine.csv", "class", "class_0").unwrap();
        assert_eq!((ds.len(), ds.n_features()), (178, 13));
    }

    #[test]
    fn ingestion_errors() {
        let one = "a,b,y\n1,2,p\n";
        assert!(matches!(
            parse_csv(one.as_bytes(), "t", "y", "p"),
            Err(LearnerError::SingleClass(_))
        ));
        assert!(matches!(
            parse_csv(IRIS.as_bytes(), "t", "label", "setosa"),
            Err(LearnerError::MissingColumn(_))
        ));
        let words = "a,b,y\nx,2,p\nz,3,n\n";
        assert!(matches!(
            parse_csv(words.as_bytes(), "t", "y", "p"),
            Err(LearnerError::NonNumericColumn(c)) if c == "a"
        ));
        assert!(matches!(
            parse_csv("a,y\n".as_bytes(), "t", "y", "p"),
            Err(LearnerError::EmptyDataset)
        ));
    }

    #[test]
    fn bad_cells_drop_rows() {
        let text = "a,b,y\n1,2,p\n1,?,n\n3,4,n\n";
        let ds = parse_csv(text.as_bytes(), "t", "y", "p").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.provenance().rows_dropped, 1);
        assert_eq!(ds.labels(), &[1, -1]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let ds = iris("versicolor");
        let a = ds.sample(100, 7).unwrap();
        let b = ds.sample(100, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        assert_ne!(a, ds.sample(100, 8).unwrap());
        let rows = a.provenance().sample_rows.clone().unwrap();
        assert!(rows.windows(2).all(|w| w[0] < w[1]));
        let full = ds.sample(150, 1).unwrap();
        assert_eq!(full.features(), ds.features());
        assert!(matches!(
            ds.sample(151, 1),
            Err(LearnerError::SampleTooLarge { .. })
        ));
        // Nested samples report rows of the original file.
        let nested = a.sample(10, 3).unwrap();
        for (k, &orig) in nested
            .provenance()
            .sample_rows
            .as_ref()
            .unwrap()
            .iter()
            .enumerate()
        {
            assert_eq!(nested.row(k), ds.row(orig));
        }
    }
}
