//! Fixed-point token quantities.
//!
//! EOS is carried as integer units of 10⁻⁴ EOS. Sums over a whole chain stay
//! exact; floating point never touches an amount.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

pub const EOS_SYMBOL: &str = "EOS";
pub const EOS_PRECISION: u8 = 4;
const MAX_PRECISION: u8 = 18;
const MAX_SYMBOL_LEN: usize = 7;

/// An amount of EOS in units of 10⁻⁴ EOS.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EosAmount(i64);

impl EosAmount {
    pub const ZERO: EosAmount = EosAmount(0);

    pub const fn from_units(units: i64) -> Self {
        Self(units)
    }

    pub const fn units(self) -> i64 {
        self.0
    }
}

impl fmt::Display for EosAmount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:04} {EOS_SYMBOL}", abs / 10_000, abs % 10_000)
    }
}

impl TryFrom<String> for EosAmount {
    type Error = ModelError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        parse_eos_amount(&value)
    }
}

impl From<EosAmount> for String {
    fn from(amount: EosAmount) -> String {
        amount.to_string()
    }
}

/// Parses `"<digits>.<4 digits> EOS"`.
pub fn parse_eos_amount(text: &str) -> Result<EosAmount, ModelError> {
    let asset = Asset::parse(text)?;
    if asset.symbol != EOS_SYMBOL {
        return Err(amount_err(text, "symbol is not EOS"));
    }
    if asset.precision != EOS_PRECISION {
        return Err(amount_err(text, "EOS amounts need exactly 4 fractional digits"));
    }
    Ok(EosAmount(asset.units))
}

fn amount_err(text: &str, reason: &'static str) -> ModelError {
    ModelError::Amount {
        text: text.to_string(),
        reason,
    }
}

/// A token quantity such as `"1000.0000 ABC"`: integer units scaled by
/// `10^precision`, where the precision is the number of fractional digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Asset {
    pub units: i64,
    pub precision: u8,
    pub symbol: String,
}

impl Asset {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let (number, symbol) = text
            .split_once(' ')
            .ok_or_else(|| amount_err(text, "missing symbol"))?;
        if symbol.is_empty()
            || symbol.len() > MAX_SYMBOL_LEN
            || !symbol.bytes().all(|b| b.is_ascii_uppercase())
        {
            return Err(amount_err(text, "symbol must be 1-7 uppercase letters"));
        }
        if number.starts_with('-') {
            return Err(amount_err(text, "negative amount"));
        }
        let (int_part, frac_part) = match number.split_once('.') {
            Some((i, f)) if !f.is_empty() => (i, f),
            Some(_) => return Err(amount_err(text, "empty fraction")),
            None => (number, ""),
        };
        if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(amount_err(text, "integer part must be digits"));
        }
        if int_part.len() > 1 && int_part.starts_with('0') {
            return Err(amount_err(text, "leading zero"));
        }
        if !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(amount_err(text, "fraction must be digits"));
        }
        if frac_part.len() > MAX_PRECISION as usize {
            return Err(amount_err(text, "too many fractional digits"));
        }
        let precision = frac_part.len() as u8;
        let overflow = || amount_err(text, "amount out of range");
        let mut units: i64 = 0;
        for b in int_part.bytes().chain(frac_part.bytes()) {
            units = units
                .checked_mul(10)
                .and_then(|u| u.checked_add(i64::from(b - b'0')))
                .ok_or_else(overflow)?;
        }
        Ok(Asset {
            units,
            precision,
            symbol: symbol.to_string(),
        })
    }

    /// Symbol code in `"<precision>,<SYMBOL>"` form.
    pub fn symbol_code(&self) -> String {
        format!("{},{}", self.precision, self.symbol)
    }
}

impl fmt::Display for Asset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = 10u64.pow(u32::from(self.precision));
        let abs = self.units.unsigned_abs();
        let sign = if self.units < 0 { "-" } else { "" };
        if self.precision == 0 {
            write!(f, "{sign}{abs} {}", self.symbol)
        } else {
            write!(
                f,
                "{sign}{}.{:0width$} {}",
                abs / scale,
                abs % scale,
                self.symbol,
                width = usize::from(self.precision)
            )
        }
    }
}
