use core::fmt;
use core::str::FromStr;

/// 128-bit globally unique beacon identifier, rendered as hyphenated
/// lowercase hex (`8-4-4-4-12`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BeaconId(u128);

impl BeaconId {
    pub const fn from_u128(v: u128) -> Self {
        Self(v)
    }

    pub const fn as_u128(&self) -> u128 {
        self.0
    }
}

impl fmt::Display for BeaconId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.0;
        write!(
            f,
            "{:08x}-{:04x}-{:04x}-{:04x}-{:012x}",
            (v >> 96) as u32,
            (v >> 80) as u16,
            (v >> 64) as u16,
            (v >> 48) as u16,
            v & 0xffff_ffff_ffff
        )
    }
}

impl fmt::Debug for BeaconId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BeaconId({self})")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("malformed beacon id")]
pub struct ParseBeaconIdError;

impl FromStr for BeaconId {
    type Err = ParseBeaconIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let b = s.as_bytes();
        if b.len() != 36 {
            return Err(ParseBeaconIdError);
        }
        let mut v: u128 = 0;
        for (i, &c) in b.iter().enumerate() {
            if matches!(i, 8 | 13 | 18 | 23) {
                if c != b'-' {
                    return Err(ParseBeaconIdError);
                }
                continue;
            }
            let d = (c as char).to_digit(16).ok_or(ParseBeaconIdError)?;
            v = (v << 4) | d as u128;
        }
        Ok(Self(v))
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for BeaconId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for BeaconId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = BeaconId;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a hyphenated 128-bit hex identifier")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<BeaconId, E> {
                v.parse().map_err(E::custom)
            }
        }
        d.deserialize_str(V)
    }
}

/// Source of fresh beacon identifiers.
pub trait IdSource {
    fn next_id(&mut self) -> BeaconId;
}

impl<F: FnMut() -> BeaconId> IdSource for F {
    fn next_id(&mut self) -> BeaconId {
        self()
    }
}

/// Deterministic id stream (splitmix64) shaped as version-4 GUIDs.
#[derive(Debug, Clone)]
pub struct SequentialIds {
    state: u64,
}

impl SequentialIds {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

impl IdSource for SequentialIds {
    fn next_id(&mut self) -> BeaconId {
        let raw = ((self.next_u64() as u128) << 64) | self.next_u64() as u128;
        // version 4, RFC 4122 variant
        let raw = (raw & !(0xf << 76)) | (0x4 << 76);
        let raw = (raw & !(0x3 << 62)) | (0x2 << 62);
        BeaconId(raw)
    }
}
