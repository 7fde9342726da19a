//! JSON files. Instances are `{"n": 4, "edges": [[0, 1, 2], ...]}` with edge
//! ids given by position; demands are `{"demands": [[s, t, profit], ...]}`.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::IoError;
use crate::graph::{EdgeId, NodeId};

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IoError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<(), IoError> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// A spanning tree of an instance, by edge id: `{"edges": [0, 3, 4]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeEdgesFile {
    pub edges: Vec<EdgeId>,
}

/// A standalone capacitated tree: `{"n": 4, "edges": [[0, 1, 2], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeFile {
    pub n: usize,
    pub edges: Vec<(NodeId, NodeId, u64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{OuterplanarInstance, RawInstance};

    #[test]
    fn instance_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        let g = OuterplanarInstance::new(3, &[(0, 1, 2), (1, 2, 1), (0, 2, 5)]).unwrap();
        write_json(&path, &g.to_raw()).unwrap();
        let back: RawInstance = read_json(&path).unwrap();
        assert_eq!(back.validate().unwrap(), g);
        let text = std::fs::read_to_string(&path).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["edges"][2], serde_json::json!([0, 2, 5]));
    }

    #[test]
    fn parse_errors_name_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "{\"n\": 3").unwrap();
        let err = read_json::<RawInstance>(&path).unwrap_err();
        assert!(matches!(err, IoError::Parse { .. }));
        assert!(err.to_string().contains("bad.json"));
    }
}
