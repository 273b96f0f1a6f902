use alloc::string::{String, ToString};
use core::fmt;

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

const FORMAT: &str = "%Y-%m-%dT%H:%M:%S%.3fZ";

/// Milliseconds since the Unix epoch, UTC. Text form is
/// `YYYY-MM-DDTHH:MM:SS.sssZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Timestamp(i64);

impl Timestamp {
    pub const fn from_millis(millis: i64) -> Self {
        Self(millis)
    }

    pub const fn millis(self) -> i64 {
        self.0
    }

    pub const fn add_millis(self, millis: i64) -> Self {
        Self(self.0 + millis)
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let err = || ModelError::Timestamp(text.to_string());
        let parsed = NaiveDateTime::parse_from_str(text, FORMAT).map_err(|_| err())?;
        let ts = Timestamp(parsed.and_utc().timestamp_millis());
        // rejects non-canonical spellings such as a missing fraction
        if ts.to_string() != text {
            return Err(err());
        }
        Ok(ts)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match DateTime::from_timestamp_millis(self.0) {
            Some(dt) => write!(f, "{}", dt.format(FORMAT)),
            None => write!(f, "<out of range: {} ms>", self.0),
        }
    }
}

impl TryFrom<String> for Timestamp {
    type Error = ModelError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Timestamp::parse(&value)
    }
}

impl From<Timestamp> for String {
    fn from(ts: Timestamp) -> String {
        ts.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form() {
        let ts = Timestamp::parse("2018-06-08T08:08:08.500Z").unwrap();
        assert_eq!(ts.millis(), 1_528_445_288_500);
        assert_eq!(ts.add_millis(500).to_string(), "2018-06-08T08:08:09.000Z");
        assert_eq!(Timestamp::from_millis(0).to_string(), "1970-01-01T00:00:00.000Z");
    }

    #[test]
    fn rejects_other_spellings() {
        for bad in [
            "2018-06-08T08:08:08Z",
            "2018-06-08T08:08:08.5Z",
            "2018-06-08 08:08:08.500Z",
            "2018-06-08T08:08:08.500",
            "2018-06-08T08:08:08.500+00:00",
        ] {
            assert!(Timestamp::parse(bad).is_err(), "{bad}");
        }
    }
}
