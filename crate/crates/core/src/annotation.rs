//! Gold sentence labels per passage.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

/// Sentence label. Serialized names are case-sensitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Accurate,
    MinorInaccurate,
    MajorInaccurate,
}

impl Label {
    pub fn is_nonfactual(self) -> bool {
        !matches!(self, Label::Accurate)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Accurate => "accurate",
            Label::MinorInaccurate => "minor_inaccurate",
            Label::MajorInaccurate => "major_inaccurate",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationSet {
    #[serde(deserialize_with = "unique_passages")]
    pub passages: BTreeMap<String, Vec<Label>>,
}

impl AnnotationSet {
    pub fn len(&self) -> usize {
        self.passages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.passages.is_empty()
    }

    pub fn get(&self, passage_id: &str) -> Option<&[Label]> {
        self.passages.get(passage_id).map(Vec::as_slice)
    }
}

fn unique_passages<'de, D>(deserializer: D) -> Result<BTreeMap<String, Vec<Label>>, D::Error>
where
    D: Deserializer<'de>,
{
    struct UniqueMap;

    impl<'de> Visitor<'de> for UniqueMap {
        type Value = BTreeMap<String, Vec<Label>>;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a map from passage id to sentence labels")
        }

        fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
            let mut out = BTreeMap::new();
            while let Some((id, labels)) = access.next_entry::<String, Vec<Label>>()? {
                if out.contains_key(&id) {
                    return Err(serde::de::Error::custom(alloc::format!(
                        "duplicate passage_id {id:?}"
                    )));
                }
                out.insert(id, labels);
            }
            Ok(out)
        }
    }

    deserializer.deserialize_map(UniqueMap)
}
