//! Serde adapters writing integers as decimal strings. Readers accept either a string or a
//! JSON number.

use std::fmt::Display;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Deserialize)]
#[serde(untagged)]
enum Raw {
    Str(String),
    Int(i64),
    Uint(u64),
}

impl Raw {
    fn parse<T: FromStr, E: serde::de::Error>(self) -> Result<T, E> {
        let s = match self {
            Raw::Str(s) => s,
            Raw::Int(i) => i.to_string(),
            Raw::Uint(u) => u.to_string(),
        };
        s.trim().parse().map_err(|_| E::custom(format!("invalid integer {s:?}")))
    }
}

pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn deserialize<'de, T: FromStr, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
    Raw::deserialize(d)?.parse()
}

pub mod vec {
    use super::*;

    pub fn serialize<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(ToString::to_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, T: FromStr, D: Deserializer<'de>>(d: D) -> Result<Vec<T>, D::Error> {
        Vec::<Raw>::deserialize(d)?.into_iter().map(Raw::parse).collect()
    }
}

pub mod matrix {
    use super::*;

    pub fn serialize<T: Display, S: Serializer>(v: &[Vec<T>], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, T: FromStr, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<T>>, D::Error> {
        Vec::<Vec<Raw>>::deserialize(d)?.into_iter().map(|r| r.into_iter().map(Raw::parse).collect()).collect()
    }
}

pub mod option {
    use super::*;

    pub fn serialize<T: Display, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_some(&x.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, T: FromStr, D: Deserializer<'de>>(d: D) -> Result<Option<T>, D::Error> {
        match Option::<Raw>::deserialize(d)? {
            Some(r) => r.parse().map(Some),
            None => Ok(None),
        }
    }
}
