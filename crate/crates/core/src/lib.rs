//! Columnar ragged arrays with a zero-copy buffer interchange protocol.
//!
//! - [`layout`]: primitive, list-offset and record nodes over shared byte buffers
//! - [`forms`]: the schema tree describing a layout and its JSON wire format
//! - [`buffers`]: `to_buffers` / `from_buffers` and the on-disk container directory
//! - [`registry`]: priority-ordered conversion rules for tagged foreign values
//! - [`indexing`]: 0-based / 1-based access through an explicit [`Convention`]
//! - [`kernels`]: path-length sum and the dimuon invariant-mass selection
//!
//! ```
//! use ragged::{from_buffers, to_buffers, ListOffsetArray, PrimitiveArray};
//!
//! let array = ListOffsetArray::try_new(
//!     &[0, 3, 3, 5],
//!     PrimitiveArray::from_values(&[1.1, 2.2, 3.3, 4.4, 5.5]),
//! )
//! .unwrap()
//! .into();
//! let c = to_buffers(&array);
//! let back = from_buffers(&c.form, c.length, &c.buffers).unwrap();
//! assert_eq!(back.to_list().to_string(), "[[1.1, 2.2, 3.3], [], [4.4, 5.5]]");
//! ```

pub mod buffers;
pub mod dtype;
pub mod error;
pub mod forms;
pub mod generate;
pub mod indexing;
pub mod kernels;
pub mod layout;
pub mod registry;
pub mod value;

pub use buffers::{
    from_buffers, read_container, to_buffers, write_container, BufferSet, Container,
};
pub use dtype::{DType, NativeType, Scalar};
pub use error::{
    BoundsError, BufferError, ConvertError, FieldError, FormError, LayoutError, Rule,
    ValidationError,
};
pub use forms::{emit_form, form_of, parse_form, Form};
pub use indexing::Convention;
pub use layout::{
    ArrayNode, Element, ListOffsetArray, NodeKind, PrimitiveArray, RecordArray, RecordView,
};
pub use registry::{
    export, Conversion, ConversionRule, ForeignValue, Priority, Registry, TargetKind,
};
pub use value::Value;
