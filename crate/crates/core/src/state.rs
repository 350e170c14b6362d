//! Registry of the 50 US states with code/name resolution.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// USPS code and full name for every state, ordered by code. The index of a
/// row is the `UsState` discriminant, so deriving `Ord` on the index sorts
/// states alphabetically by code.
const STATES: [(&str, &str); 50] = [
    ("AK", "Alaska"),
    ("AL", "Alabama"),
    ("AR", "Arkansas"),
    ("AZ", "Arizona"),
    ("CA", "California"),
    ("CO", "Colorado"),
    ("CT", "Connecticut"),
    ("DE", "Delaware"),
    ("FL", "Florida"),
    ("GA", "Georgia"),
    ("HI", "Hawaii"),
    ("IA", "Iowa"),
    ("ID", "Idaho"),
    ("IL", "Illinois"),
    ("IN", "Indiana"),
    ("KS", "Kansas"),
    ("KY", "Kentucky"),
    ("LA", "Louisiana"),
    ("MA", "Massachusetts"),
    ("MD", "Maryland"),
    ("ME", "Maine"),
    ("MI", "Michigan"),
    ("MN", "Minnesota"),
    ("MO", "Missouri"),
    ("MS", "Mississippi"),
    ("MT", "Montana"),
    ("NC", "North Carolina"),
    ("ND", "North Dakota"),
    ("NE", "Nebraska"),
    ("NH", "New Hampshire"),
    ("NJ", "New Jersey"),
    ("NM", "New Mexico"),
    ("NV", "Nevada"),
    ("NY", "New York"),
    ("OH", "Ohio"),
    ("OK", "Oklahoma"),
    ("OR", "Oregon"),
    ("PA", "Pennsylvania"),
    ("RI", "Rhode Island"),
    ("SC", "South Carolina"),
    ("SD", "South Dakota"),
    ("TN", "Tennessee"),
    ("TX", "Texas"),
    ("UT", "Utah"),
    ("VA", "Virginia"),
    ("VT", "Vermont"),
    ("WA", "Washington"),
    ("WI", "Wisconsin"),
    ("WV", "West Virginia"),
    ("WY", "Wyoming"),
];

/// One of the 50 recognized US states.
///
/// Resolution accepts the two-letter USPS code or the full name,
/// case-insensitively. There is no fuzzy matching beyond that fixed table.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UsState(u8);

impl UsState {
    /// Resolve a code or full name to a state. Surrounding whitespace is
    /// ignored; anything else returns `None`.
    pub fn resolve(input: &str) -> Option<UsState> {
        let needle = input.trim();
        if needle.is_empty() {
            return None;
        }
        STATES
            .iter()
            .position(|(code, name)| {
                needle.eq_ignore_ascii_case(code) || needle.eq_ignore_ascii_case(name)
            })
            .map(|i| UsState(i as u8))
    }

    /// Two-letter USPS code.
    pub fn code(self) -> &'static str {
        STATES[self.0 as usize].0
    }

    /// Full state name.
    pub fn name(self) -> &'static str {
        STATES[self.0 as usize].1
    }

    /// All 50 states in code order.
    pub fn all() -> impl Iterator<Item = UsState> {
        (0..STATES.len() as u8).map(UsState)
    }
}

impl fmt::Debug for UsState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UsState({})", self.code())
    }
}

impl fmt::Display for UsState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for UsState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for UsState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        UsState::resolve(&raw).ok_or_else(|| D::Error::custom(format!("unknown state \"{raw}\"")))
    }
}
