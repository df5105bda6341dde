//! Manifest-driven feature extraction.

use std::fs;
use std::path::PathBuf;

use thiserror::Error;

use crate::features::{feature_vector, AnomalyPolicy, FeatureVector};
use crate::ingest::{parse_session, CorpusManifest, ParseError, ParseOptions, ParseWarning};
use crate::segmentation::{segment, SegmentationConfig};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
}

#[derive(Debug, Clone)]
pub struct CorpusFeatures {
    pub vectors: Vec<FeatureVector>,
    /// Parse warnings, tagged with the file they came from.
    pub warnings: Vec<(PathBuf, ParseWarning)>,
}

/// Parse, segment and featurise every recording of a manifest, in manifest order.
pub fn extract_corpus(
    manifest: &CorpusManifest,
    segmentation: &SegmentationConfig,
    policy: &AnomalyPolicy,
    options: ParseOptions,
) -> Result<CorpusFeatures, CorpusError> {
    let mut vectors = Vec::with_capacity(manifest.records.len());
    let mut warnings = Vec::new();
    for record in &manifest.records {
        let text = fs::read_to_string(&record.path)
            .map_err(|source| CorpusError::Io { path: record.path.clone(), source })?;
        let parsed = parse_session(&text, &record.path.display().to_string(), options)
            .map_err(|source| CorpusError::Parse { path: record.path.clone(), source })?;
        warnings.extend(parsed.warnings.into_iter().map(|w| (record.path.clone(), w)));
        let seg = segment(&parsed.stream, segmentation);
        vectors.push(feature_vector(&seg, policy, Some(record.clone())));
    }
    Ok(CorpusFeatures { vectors, warnings })
}
