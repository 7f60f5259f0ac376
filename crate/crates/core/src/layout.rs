//! Ragged-array layout nodes: primitive leaves, offset-based lists, and records.
//!
//! Every node is an immutable view over reference-counted byte buffers. Cloning and slicing
//! only bump reference counts; element data is decoded on read and never cached, so a node
//! can be shared freely between threads.
//!
//! Constructors named `try_*` validate their input. The `from_parts` constructors accept
//! arbitrary buffers so that malformed layouts can be represented and diagnosed with
//! [`ArrayNode::validate`]; element access on a node that fails validation may panic.

use std::fmt;
use std::sync::Arc;

use bytes::Bytes;

use crate::dtype::{DType, NativeType, Scalar};
use crate::error::{BoundsError, FieldError, Rule, ValidationError};
use crate::value::Value;

const OFFSET_WIDTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Primitive,
    ListOffset,
    Record,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Primitive => "primitive",
            NodeKind::ListOffset => "list-offset",
            NodeKind::Record => "record",
        })
    }
}

/// A flat run of fixed-width elements.
#[derive(Debug, Clone)]
pub struct PrimitiveArray {
    dtype: DType,
    data: Bytes,
    length: usize,
}

impl PrimitiveArray {
    pub fn from_values<T: NativeType>(values: &[T]) -> Self {
        let mut buf = Vec::with_capacity(values.len() * T::DTYPE.width());
        for v in values {
            v.write_le(&mut buf);
        }
        PrimitiveArray {
            dtype: T::DTYPE,
            data: Bytes::from(buf),
            length: values.len(),
        }
    }

    pub fn empty(dtype: DType) -> Self {
        PrimitiveArray {
            dtype,
            data: Bytes::new(),
            length: 0,
        }
    }

    /// Wraps an existing buffer; its size must be a whole number of elements.
    pub fn try_new(dtype: DType, data: Bytes) -> Result<Self, ValidationError> {
        let length = data.len() / dtype.width();
        let node = PrimitiveArray::from_parts(dtype, data, length);
        node.validate_at("root")?;
        Ok(node)
    }

    pub fn from_parts(dtype: DType, data: Bytes, length: usize) -> Self {
        PrimitiveArray {
            dtype,
            data,
            length,
        }
    }

    pub fn dtype(&self) -> DType {
        self.dtype
    }

    pub fn data(&self) -> &Bytes {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    pub fn get(&self, i: usize) -> Result<Scalar, BoundsError> {
        if i >= self.length {
            return Err(BoundsError::zero_based(i, self.length));
        }
        Ok(self.dtype.decode(&self.data, i))
    }

    /// Unchecked-index variant of [`get`](Self::get); panics past the end.
    #[inline]
    pub fn value(&self, i: usize) -> Scalar {
        self.dtype.decode(&self.data, i)
    }

    pub fn iter(&self) -> impl Iterator<Item = Scalar> + '_ {
        (0..self.length).map(move |i| self.value(i))
    }

    /// Typed element iterator, `None` if `T` does not match the dtype.
    pub fn iter_as<T: NativeType>(&self) -> Option<impl Iterator<Item = T> + '_> {
        if T::DTYPE != self.dtype {
            return None;
        }
        let w = self.dtype.width();
        Some(self.data[..self.length * w].chunks_exact(w).map(T::read_le))
    }

    /// Typed read of element `i`. Panics if the dtype differs or `i` is past the end.
    #[inline]
    pub fn get_as<T: NativeType>(&self, i: usize) -> T {
        assert_eq!(T::DTYPE, self.dtype, "dtype mismatch");
        let w = self.dtype.width();
        T::read_le(&self.data[i * w..(i + 1) * w])
    }

    /// Zero-copy view of elements `[start, stop)`.
    pub fn slice(&self, start: usize, stop: usize) -> Self {
        assert!(
            start <= stop && stop <= self.length,
            "slice {start}..{stop} out of range"
        );
        let w = self.dtype.width();
        PrimitiveArray {
            dtype: self.dtype,
            data: self.data.slice(start * w..stop * w),
            length: stop - start,
        }
    }

    fn validate_at(&self, path: &str) -> Result<(), ValidationError> {
        let expected = self.length * self.dtype.width();
        if self.data.len() != expected {
            return Err(ValidationError {
                path: path.to_string(),
                rule: Rule::PrimitiveByteLength,
                detail: format!(
                    "{} elements of {} need {expected} bytes, buffer has {}",
                    self.length,
                    self.dtype,
                    self.data.len()
                ),
            });
        }
        Ok(())
    }
}

/// Variable-length lists: list `i` spans `content[offsets[i]..offsets[i + 1]]`.
#[derive(Debug, Clone)]
pub struct ListOffsetArray {
    offsets: Bytes,
    content: Arc<ArrayNode>,
    length: usize,
}

impl ListOffsetArray {
    pub fn try_new(
        offsets: &[i64],
        content: impl Into<ArrayNode>,
    ) -> Result<Self, ValidationError> {
        let node = ListOffsetArray::from_parts(
            PrimitiveArray::from_values(offsets).data,
            offsets.len().saturating_sub(1),
            content.into(),
        );
        node.validate_at("root")?;
        Ok(node)
    }

    /// Builds a list array from per-list lengths, laying the content out contiguously.
    pub fn from_counts(
        counts: impl IntoIterator<Item = usize>,
        content: impl Into<ArrayNode>,
    ) -> Result<Self, ValidationError> {
        let mut offsets = vec![0i64];
        for c in counts {
            offsets.push(offsets.last().unwrap() + c as i64);
        }
        ListOffsetArray::try_new(&offsets, content)
    }

    /// `offsets` holds little-endian `i64` values; only the first `length + 1` are used.
    pub fn from_parts(offsets: Bytes, length: usize, content: ArrayNode) -> Self {
        ListOffsetArray {
            offsets,
            content: Arc::new(content),
            length,
        }
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    pub fn content(&self) -> &ArrayNode {
        &self.content
    }

    pub fn offsets_bytes(&self) -> &Bytes {
        &self.offsets
    }

    #[inline]
    pub fn offset(&self, i: usize) -> i64 {
        i64::read_le(&self.offsets[i * OFFSET_WIDTH..(i + 1) * OFFSET_WIDTH])
    }

    pub fn offsets(&self) -> impl Iterator<Item = i64> + '_ {
        (0..=self.length).map(move |i| self.offset(i))
    }

    /// Zero-copy view of list `i` of the content.
    pub fn get_list(&self, i: usize) -> Result<ArrayNode, BoundsError> {
        if i >= self.length {
            return Err(BoundsError::zero_based(i, self.length));
        }
        Ok(self.list_unchecked(i))
    }

    pub(crate) fn list_unchecked(&self, i: usize) -> ArrayNode {
        let start = self.offset(i) as usize;
        let stop = self.offset(i + 1) as usize;
        self.content.slice(start, stop)
    }

    /// Zero-copy view of lists `[start, stop)`; the content is shared unchanged.
    pub fn slice(&self, start: usize, stop: usize) -> Self {
        assert!(
            start <= stop && stop <= self.length,
            "slice {start}..{stop} out of range"
        );
        ListOffsetArray {
            offsets: self
                .offsets
                .slice(start * OFFSET_WIDTH..(stop + 1) * OFFSET_WIDTH),
            content: Arc::clone(&self.content),
            length: stop - start,
        }
    }

    fn validate_at(&self, path: &str) -> Result<(), ValidationError> {
        let err = |rule, detail: String| ValidationError {
            path: path.to_string(),
            rule,
            detail,
        };
        let needed = (self.length + 1) * OFFSET_WIDTH;
        if self.offsets.len() < needed {
            return Err(err(
                Rule::OffsetsLength,
                format!(
                    "{} lists need {} offsets ({needed} bytes), buffer has {} bytes",
                    self.length,
                    self.length + 1,
                    self.offsets.len()
                ),
            ));
        }
        let first = self.offset(0);
        if first < 0 {
            return Err(err(
                Rule::NonNegativeFirstOffset,
                format!("offsets[0] = {first}"),
            ));
        }
        let mut prev = first;
        for i in 1..=self.length {
            let cur = self.offset(i);
            if cur < prev {
                return Err(err(
                    Rule::MonotonicOffsets,
                    format!("offsets[{}] = {prev} > offsets[{i}] = {cur}", i - 1),
                ));
            }
            prev = cur;
        }
        let content_len = self.content.len();
        if prev as u64 > content_len as u64 {
            return Err(err(
                Rule::FinalOffsetWithinContent,
                format!(
                    "offsets[{}] = {prev} exceeds content length {content_len}",
                    self.length
                ),
            ));
        }
        self.content.validate_at(&format!("{path}.content"))
    }
}

/// Struct-of-arrays: named, equal-length columns.
#[derive(Debug, Clone)]
pub struct RecordArray {
    fields: Arc<[(String, ArrayNode)]>,
    length: usize,
}

impl RecordArray {
    /// The record length is taken from the first field; use
    /// [`try_with_length`](Self::try_with_length) for a record without fields.
    pub fn try_new<S: Into<String>>(
        fields: impl IntoIterator<Item = (S, ArrayNode)>,
    ) -> Result<Self, ValidationError> {
        let fields: Vec<(String, ArrayNode)> =
            fields.into_iter().map(|(k, v)| (k.into(), v)).collect();
        let length = fields.first().map_or(0, |(_, c)| c.len());
        let node = RecordArray::from_parts(fields, length);
        node.validate_at("root")?;
        Ok(node)
    }

    pub fn try_with_length<S: Into<String>>(
        fields: impl IntoIterator<Item = (S, ArrayNode)>,
        length: usize,
    ) -> Result<Self, ValidationError> {
        let fields: Vec<(String, ArrayNode)> =
            fields.into_iter().map(|(k, v)| (k.into(), v)).collect();
        let node = RecordArray::from_parts(fields, length);
        node.validate_at("root")?;
        Ok(node)
    }

    pub fn from_parts(fields: Vec<(String, ArrayNode)>, length: usize) -> Self {
        RecordArray {
            fields: fields.into(),
            length,
        }
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    pub fn fields(&self) -> &[(String, ArrayNode)] {
        &self.fields
    }

    pub fn field_names(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|(k, _)| k.as_str())
    }

    /// The named column, shared with this record.
    pub fn field(&self, name: &str) -> Result<&ArrayNode, FieldError> {
        self.fields
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, c)| c)
            .ok_or_else(|| FieldError {
                requested: name.to_string(),
                available: self.field_names().map(str::to_string).collect(),
            })
    }

    /// Row `i` as a view that reads through to the column buffers.
    pub fn get_record(&self, i: usize) -> Result<RecordView<'_>, BoundsError> {
        if i >= self.length {
            return Err(BoundsError::zero_based(i, self.length));
        }
        Ok(RecordView {
            record: self,
            index: i,
        })
    }

    pub fn slice(&self, start: usize, stop: usize) -> Self {
        assert!(
            start <= stop && stop <= self.length,
            "slice {start}..{stop} out of range"
        );
        RecordArray {
            fields: self
                .fields
                .iter()
                .map(|(k, c)| (k.clone(), c.slice(start, stop)))
                .collect(),
            length: stop - start,
        }
    }

    fn validate_at(&self, path: &str) -> Result<(), ValidationError> {
        for (i, (name, content)) in self.fields.iter().enumerate() {
            let err = |rule, detail: String| ValidationError {
                path: path.to_string(),
                rule,
                detail,
            };
            if name.is_empty() {
                return Err(err(
                    Rule::EmptyFieldName,
                    format!("field {i} has an empty name"),
                ));
            }
            if self.fields[..i].iter().any(|(k, _)| k == name) {
                return Err(err(
                    Rule::UniqueFieldNames,
                    format!("field {name:?} repeats"),
                ));
            }
            if content.len() != self.length {
                return Err(err(
                    Rule::RecordFieldLength,
                    format!(
                        "field {name:?} has length {}, record has length {}",
                        content.len(),
                        self.length
                    ),
                ));
            }
            content.validate_at(&format!("{path}[{name:?}]"))?;
        }
        Ok(())
    }
}

/// One row of a [`RecordArray`].
#[derive(Debug, Clone, Copy)]
pub struct RecordView<'a> {
    record: &'a RecordArray,
    index: usize,
}

impl<'a> RecordView<'a> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn field(&self, name: &str) -> Result<Element<'a>, FieldError> {
        let column = self.record.field(name)?;
        Ok(column.element(self.index))
    }

    pub fn to_value(&self) -> Value {
        Value::Record(
            self.record
                .fields
                .iter()
                .map(|(k, c)| (k.clone(), c.element(self.index).to_value()))
                .collect(),
        )
    }
}

impl fmt::Display for RecordView<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_value().fmt(f)
    }
}

/// What indexing a node yields: a scalar, a nested list view, or a record row.
#[derive(Debug, Clone)]
pub enum Element<'a> {
    Scalar(Scalar),
    List(ArrayNode),
    Record(RecordView<'a>),
}

impl Element<'_> {
    pub fn to_value(&self) -> Value {
        match self {
            Element::Scalar(s) => Value::from(*s),
            Element::List(node) => node.to_list(),
            Element::Record(row) => row.to_value(),
        }
    }

    pub fn as_scalar(&self) -> Option<Scalar> {
        match self {
            Element::Scalar(s) => Some(*s),
            _ => None,
        }
    }
}

impl fmt::Display for Element<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_value().fmt(f)
    }
}

/// A layout tree node.
#[derive(Debug, Clone)]
pub enum ArrayNode {
    Primitive(PrimitiveArray),
    ListOffset(ListOffsetArray),
    Record(RecordArray),
}

impl From<PrimitiveArray> for ArrayNode {
    fn from(a: PrimitiveArray) -> Self {
        ArrayNode::Primitive(a)
    }
}

impl From<ListOffsetArray> for ArrayNode {
    fn from(a: ListOffsetArray) -> Self {
        ArrayNode::ListOffset(a)
    }
}

impl From<RecordArray> for ArrayNode {
    fn from(a: RecordArray) -> Self {
        ArrayNode::Record(a)
    }
}

impl ArrayNode {
    pub fn kind(&self) -> NodeKind {
        match self {
            ArrayNode::Primitive(_) => NodeKind::Primitive,
            ArrayNode::ListOffset(_) => NodeKind::ListOffset,
            ArrayNode::Record(_) => NodeKind::Record,
        }
    }

    /// Declared length of the outermost node.
    pub fn len(&self) -> usize {
        match self {
            ArrayNode::Primitive(a) => a.len(),
            ArrayNode::ListOffset(a) => a.len(),
            ArrayNode::Record(a) => a.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_primitive(&self) -> Option<&PrimitiveArray> {
        match self {
            ArrayNode::Primitive(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_list_offset(&self) -> Option<&ListOffsetArray> {
        match self {
            ArrayNode::ListOffset(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_record(&self) -> Option<&RecordArray> {
        match self {
            ArrayNode::Record(a) => Some(a),
            _ => None,
        }
    }

    /// Zero-copy view of elements `[start, stop)`. Panics if the range is out of bounds.
    pub fn slice(&self, start: usize, stop: usize) -> ArrayNode {
        match self {
            ArrayNode::Primitive(a) => a.slice(start, stop).into(),
            ArrayNode::ListOffset(a) => a.slice(start, stop).into(),
            ArrayNode::Record(a) => a.slice(start, stop).into(),
        }
    }

    /// Zero-based element access.
    pub fn get(&self, i: usize) -> Result<Element<'_>, BoundsError> {
        if i >= self.len() {
            return Err(BoundsError::zero_based(i, self.len()));
        }
        Ok(self.element(i))
    }

    pub(crate) fn element(&self, i: usize) -> Element<'_> {
        match self {
            ArrayNode::Primitive(a) => Element::Scalar(a.value(i)),
            ArrayNode::ListOffset(a) => Element::List(a.list_unchecked(i)),
            ArrayNode::Record(a) => Element::Record(RecordView {
                record: a,
                index: i,
            }),
        }
    }

    /// Deep materialization into plain nested values.
    pub fn to_list(&self) -> Value {
        Value::List(
            (0..self.len())
                .map(|i| self.element(i).to_value())
                .collect(),
        )
    }

    /// Checks every layout invariant recursively.
    pub fn validate(&self) -> Result<(), ValidationError> {
        self.validate_at("root")
    }

    fn validate_at(&self, path: &str) -> Result<(), ValidationError> {
        match self {
            ArrayNode::Primitive(a) => a.validate_at(path),
            ArrayNode::ListOffset(a) => a.validate_at(path),
            ArrayNode::Record(a) => a.validate_at(path),
        }
    }

    /// Byte buffers this node views, in pre-order. Used to check aliasing.
    pub fn buffers(&self) -> Vec<&Bytes> {
        let mut out = Vec::new();
        self.collect_buffers(&mut out);
        out
    }

    fn collect_buffers<'a>(&'a self, out: &mut Vec<&'a Bytes>) {
        match self {
            ArrayNode::Primitive(a) => out.push(a.data()),
            ArrayNode::ListOffset(a) => {
                out.push(a.offsets_bytes());
                a.content().collect_buffers(out);
            }
            ArrayNode::Record(a) => {
                for (_, c) in a.fields() {
                    c.collect_buffers(out);
                }
            }
        }
    }
}

impl fmt::Display for ArrayNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_list().fmt(f)
    }
}
