//! Serde adapters for maps with non-string keys (JSON-friendly pair lists).

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;

pub(crate) fn serialize<S, K>(map: &BTreeMap<K, f64>, ser: S) -> Result<S::Ok, S::Error>
where
    S: Serializer,
    K: Serialize + Ord,
{
    ser.collect_seq(map.iter())
}

pub(crate) fn deserialize<'de, D, K>(de: D) -> Result<BTreeMap<K, f64>, D::Error>
where
    D: Deserializer<'de>,
    K: Deserialize<'de> + Ord,
{
    let pairs: Vec<(K, f64)> = Vec::deserialize(de)?;
    Ok(pairs.into_iter().collect())
}
