//! Random well-formed arrays for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dtype::{DType, NativeType};
use crate::layout::{ArrayNode, ListOffsetArray, PrimitiveArray, RecordArray};

/// A random valid node with at most `max_depth` levels of nesting and an outer length of at
/// most `max_len`. Floats are always finite so materialized values compare equal.
///
/// Some list nodes are produced as slices of a larger array, so offsets need not start at 0.
pub fn random_node<R: Rng + ?Sized>(rng: &mut R, max_depth: usize, max_len: usize) -> ArrayNode {
    let len = rng.gen_range(0..=max_len);
    node_of_len(rng, max_depth.max(1), len)
}

fn node_of_len<R: Rng + ?Sized>(rng: &mut R, depth: usize, len: usize) -> ArrayNode {
    let choice = if depth <= 1 { 0 } else { rng.gen_range(0..3) };
    match choice {
        0 => random_primitive(rng, len).into(),
        1 => {
            let pad_front = if rng.gen_bool(0.25) {
                rng.gen_range(1..3)
            } else {
                0
            };
            let pad_back = if rng.gen_bool(0.25) {
                rng.gen_range(1..3)
            } else {
                0
            };
            let total = pad_front + len + pad_back;
            let counts: Vec<usize> = (0..total).map(|_| rng.gen_range(0..=4)).collect();
            let content = node_of_len(rng, depth - 1, counts.iter().sum());
            let full = ListOffsetArray::from_counts(counts, content).expect("well-formed");
            full.slice(pad_front, pad_front + len).into()
        }
        _ => {
            let n_fields = rng.gen_range(1..=3);
            let fields: Vec<(String, ArrayNode)> = (0..n_fields)
                .map(|i| (format!("f{i}"), node_of_len(rng, depth - 1, len)))
                .collect();
            RecordArray::try_with_length(fields, len)
                .expect("well-formed")
                .into()
        }
    }
}

fn values<T: NativeType, R: Rng + ?Sized>(
    rng: &mut R,
    len: usize,
    f: impl Fn(&mut R) -> T,
) -> PrimitiveArray {
    let v: Vec<T> = (0..len).map(|_| f(rng)).collect();
    PrimitiveArray::from_values(&v)
}

pub fn random_primitive<R: Rng + ?Sized>(rng: &mut R, len: usize) -> PrimitiveArray {
    let dtype = *DType::ALL.choose(rng).expect("non-empty");
    match dtype {
        DType::Bool => values(rng, len, |r| r.gen::<bool>()),
        DType::Int8 => values(rng, len, |r| r.gen::<i8>()),
        DType::Int16 => values(rng, len, |r| r.gen::<i16>()),
        DType::Int32 => values(rng, len, |r| r.gen::<i32>()),
        DType::Int64 => values(rng, len, |r| r.gen::<i64>()),
        DType::UInt8 => values(rng, len, |r| r.gen::<u8>()),
        DType::UInt16 => values(rng, len, |r| r.gen::<u16>()),
        DType::UInt32 => values(rng, len, |r| r.gen::<u32>()),
        DType::UInt64 => values(rng, len, |r| r.gen::<u64>()),
        DType::Float32 => values(rng, len, |r| r.gen_range(-1e6f32..1e6)),
        DType::Float64 => values(rng, len, |r| r.gen_range(-1e6..1e6)),
    }
}

/// A random list array over `float64`, for kernel tests.
pub fn random_float_lists<R: Rng + ?Sized>(rng: &mut R, max_len: usize) -> ListOffsetArray {
    let len = rng.gen_range(0..=max_len);
    let counts: Vec<usize> = (0..len).map(|_| rng.gen_range(0..=8)).collect();
    let total = counts.iter().sum();
    let content = values(rng, total, |r| r.gen_range(-100.0..100.0));
    ListOffsetArray::from_counts(counts, content).expect("well-formed")
}
