//! Element types for primitive buffers and the scalars decoded from them.

use std::fmt;
use std::str::FromStr;

/// Element type tag of a primitive buffer. All types are stored little-endian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DType {
    Bool,
    Int8,
    Int16,
    Int32,
    Int64,
    UInt8,
    UInt16,
    UInt32,
    UInt64,
    Float32,
    Float64,
}

impl DType {
    pub const ALL: [DType; 11] = [
        DType::Bool,
        DType::Int8,
        DType::Int16,
        DType::Int32,
        DType::Int64,
        DType::UInt8,
        DType::UInt16,
        DType::UInt32,
        DType::UInt64,
        DType::Float32,
        DType::Float64,
    ];

    /// Width of one element in bytes.
    pub const fn width(self) -> usize {
        match self {
            DType::Bool | DType::Int8 | DType::UInt8 => 1,
            DType::Int16 | DType::UInt16 => 2,
            DType::Int32 | DType::UInt32 | DType::Float32 => 4,
            DType::Int64 | DType::UInt64 | DType::Float64 => 8,
        }
    }

    /// Wire spelling used in form JSON (`"primitive"` key).
    pub const fn name(self) -> &'static str {
        match self {
            DType::Bool => "bool",
            DType::Int8 => "int8",
            DType::Int16 => "int16",
            DType::Int32 => "int32",
            DType::Int64 => "int64",
            DType::UInt8 => "uint8",
            DType::UInt16 => "uint16",
            DType::UInt32 => "uint32",
            DType::UInt64 => "uint64",
            DType::Float32 => "float32",
            DType::Float64 => "float64",
        }
    }

    /// Decodes the element at `index` from a little-endian byte buffer.
    ///
    /// The buffer need not be aligned. Panics if the element lies outside `bytes`.
    pub fn decode(self, bytes: &[u8], index: usize) -> Scalar {
        let w = self.width();
        let raw = &bytes[index * w..(index + 1) * w];
        match self {
            DType::Bool => Scalar::Bool(raw[0] != 0),
            DType::Int8 => Scalar::Int(i8::from_le_bytes([raw[0]]) as i64),
            DType::Int16 => Scalar::Int(i16::from_le_bytes(raw.try_into().unwrap()) as i64),
            DType::Int32 => Scalar::Int(i32::from_le_bytes(raw.try_into().unwrap()) as i64),
            DType::Int64 => Scalar::Int(i64::from_le_bytes(raw.try_into().unwrap())),
            DType::UInt8 => Scalar::UInt(raw[0] as u64),
            DType::UInt16 => Scalar::UInt(u16::from_le_bytes(raw.try_into().unwrap()) as u64),
            DType::UInt32 => Scalar::UInt(u32::from_le_bytes(raw.try_into().unwrap()) as u64),
            DType::UInt64 => Scalar::UInt(u64::from_le_bytes(raw.try_into().unwrap())),
            DType::Float32 => Scalar::Float(f32::from_le_bytes(raw.try_into().unwrap()) as f64),
            DType::Float64 => Scalar::Float(f64::from_le_bytes(raw.try_into().unwrap())),
        }
    }
}

impl fmt::Display for DType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown primitive type {0:?}")]
pub struct UnknownDType(pub String);

impl FromStr for DType {
    type Err = UnknownDType;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DType::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| UnknownDType(s.to_string()))
    }
}

/// A single decoded element. Signed and unsigned integers are widened to 64 bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Bool(bool),
    Int(i64),
    UInt(u64),
    Float(f64),
}

impl Scalar {
    pub fn as_f64(self) -> f64 {
        match self {
            Scalar::Bool(b) => b as u8 as f64,
            Scalar::Int(v) => v as f64,
            Scalar::UInt(v) => v as f64,
            Scalar::Float(v) => v,
        }
    }

    pub fn as_i64(self) -> Option<i64> {
        match self {
            Scalar::Int(v) => Some(v),
            Scalar::UInt(v) => i64::try_from(v).ok(),
            Scalar::Bool(b) => Some(b as i64),
            Scalar::Float(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Bool(b) => write!(f, "{b}"),
            Scalar::Int(v) => write!(f, "{v}"),
            Scalar::UInt(v) => write!(f, "{v}"),
            Scalar::Float(v) => write!(f, "{v}"),
        }
    }
}

/// Rust types that map one-to-one onto a [`DType`].
pub trait NativeType: Copy + Send + Sync + 'static {
    const DTYPE: DType;
    fn write_le(self, out: &mut Vec<u8>);
    /// Reads one element from exactly `DTYPE.width()` little-endian bytes.
    fn read_le(raw: &[u8]) -> Self;
}

macro_rules! native {
    ($ty:ty, $dtype:ident) => {
        impl NativeType for $ty {
            const DTYPE: DType = DType::$dtype;
            fn write_le(self, out: &mut Vec<u8>) {
                out.extend_from_slice(&self.to_le_bytes());
            }
            #[inline]
            fn read_le(raw: &[u8]) -> Self {
                <$ty>::from_le_bytes(raw.try_into().unwrap())
            }
        }
    };
}

native!(i8, Int8);
native!(i16, Int16);
native!(i32, Int32);
native!(i64, Int64);
native!(u8, UInt8);
native!(u16, UInt16);
native!(u32, UInt32);
native!(u64, UInt64);
native!(f32, Float32);
native!(f64, Float64);

impl NativeType for bool {
    const DTYPE: DType = DType::Bool;
    fn write_le(self, out: &mut Vec<u8>) {
        out.push(self as u8);
    }
    fn read_le(raw: &[u8]) -> Self {
        raw[0] != 0
    }
}
