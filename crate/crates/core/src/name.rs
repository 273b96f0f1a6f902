//! Account and action names.
//!
//! A name is 1 to 12 characters drawn from `a-z`, `1-5` and `.`, and may not
//! start or end with a dot. Dotted names (`eosio.token`, `eosio.ramfee`) are
//! the system accounts; the suffix-bidding rules of a real chain are not
//! modelled.

use alloc::string::String;
use core::borrow::Borrow;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

pub const MAX_NAME_LEN: usize = 12;

#[inline]
fn is_name_char(b: u8) -> bool {
    matches!(b, b'a'..=b'z' | b'1'..=b'5' | b'.')
}

/// Returns true iff `name` satisfies the account-name grammar.
pub fn validate_account_name(name: &str) -> bool {
    let bytes = name.as_bytes();
    !bytes.is_empty()
        && bytes.len() <= MAX_NAME_LEN
        && bytes.iter().all(|&b| is_name_char(b))
        && bytes[0] != b'.'
        && bytes[bytes.len() - 1] != b'.'
}

macro_rules! name_type {
    ($(#[$meta:meta])* $ty:ident, $err:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $ty(String);

        impl $ty {
            pub fn new(value: impl Into<String>) -> Result<Self, ModelError> {
                let value = value.into();
                if validate_account_name(&value) {
                    Ok(Self(value))
                } else {
                    Err(ModelError::$err(value))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $ty {
            type Error = ModelError;

            fn try_from(value: String) -> Result<Self, Self::Error> {
                Self::new(value)
            }
        }

        impl TryFrom<&str> for $ty {
            type Error = ModelError;

            fn try_from(value: &str) -> Result<Self, Self::Error> {
                Self::new(value)
            }
        }

        impl From<$ty> for String {
            fn from(name: $ty) -> String {
                name.0
            }
        }

        impl core::str::FromStr for $ty {
            type Err = ModelError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::new(s)
            }
        }

        impl AsRef<str> for $ty {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl Borrow<str> for $ty {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl PartialEq<str> for $ty {
            fn eq(&self, other: &str) -> bool {
                self.0 == other
            }
        }

        impl PartialEq<&str> for $ty {
            fn eq(&self, other: &&str) -> bool {
                self.0 == *other
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

name_type!(
    /// A validated account name.
    AccountName,
    AccountName
);

name_type!(
    /// A contract function name; same grammar as [`AccountName`].
    ActionName,
    ActionName
);
