use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Writing system allowed when foreign-script tokens are filtered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Script {
    Latin,
    Cyrillic,
    Greek,
    Arabic,
    Hebrew,
}

impl Script {
    /// Whether a letter belongs to this script. Non-letters always pass.
    pub fn allows(self, c: char) -> bool {
        if !c.is_alphabetic() {
            return true;
        }
        let cp = c as u32;
        match self {
            Script::Latin => {
                c.is_ascii_alphabetic()
                    || matches!(cp, 0x00AA | 0x00BA | 0x00C0..=0x00D6 | 0x00D8..=0x00F6 | 0x00F8..=0x024F)
                    || matches!(cp, 0x1E00..=0x1EFF | 0x2C60..=0x2C7F | 0xA720..=0xA7FF | 0xFF21..=0xFF3A | 0xFF41..=0xFF5A)
            }
            Script::Cyrillic => {
                matches!(cp, 0x0400..=0x052F | 0x1C80..=0x1C8F | 0x2DE0..=0x2DFF | 0xA640..=0xA69F)
            }
            Script::Greek => matches!(cp, 0x0370..=0x03FF | 0x1F00..=0x1FFF),
            Script::Arabic => {
                matches!(cp, 0x0600..=0x06FF | 0x0750..=0x077F | 0x08A0..=0x08FF | 0xFB50..=0xFDFF | 0xFE70..=0xFEFF)
            }
            Script::Hebrew => matches!(cp, 0x0590..=0x05FF | 0xFB1D..=0xFB4F),
        }
    }

    /// True when every letter of `token` belongs to this script.
    pub fn admits(self, token: &str) -> bool {
        token.chars().all(|c| self.allows(c))
    }
}

impl FromStr for Script {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "latin" => Ok(Script::Latin),
            "cyrillic" => Ok(Script::Cyrillic),
            "greek" => Ok(Script::Greek),
            "arabic" => Ok(Script::Arabic),
            "hebrew" => Ok(Script::Hebrew),
            other => Err(Error::invalid(format!(
                "unknown script `{other}` (latin|cyrillic|greek|arabic|hebrew)"
            ))),
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Script::Latin => "latin",
            Script::Cyrillic => "cyrillic",
            Script::Greek => "greek",
            Script::Arabic => "arabic",
            Script::Hebrew => "hebrew",
        })
    }
}
