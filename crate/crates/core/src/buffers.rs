//! The `to_buffers` / `from_buffers` interchange protocol and the on-disk container.
//!
//! An array decomposes into a [`Form`], an explicit length, and a [`BufferSet`] of named byte
//! buffers. Decomposition and reassembly hand out views of the same reference-counted memory;
//! the only operations that duplicate bytes are the explicit `copy_*` methods on `BufferSet`,
//! and each of them adds to its copy counter.
//!
//! On disk a container is a directory:
//!
//! ```text
//! <dir>/form.json         compact form JSON
//! <dir>/length.txt        ASCII decimal length and a newline
//! <dir>/buffers/<name>    raw little-endian bytes, one file per buffer
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use bytes::Bytes;

use crate::error::BufferError;
use crate::forms::{data_buffer_name, emit_form, form_of, offsets_buffer_name, parse_form, Form};
use crate::layout::{ArrayNode, ListOffsetArray, PrimitiveArray, RecordArray};

pub const DEFAULT_KEY_PREFIX: &str = "node";

pub const FORM_FILE: &str = "form.json";
pub const LENGTH_FILE: &str = "length.txt";
pub const BUFFERS_DIR: &str = "buffers";

/// Named immutable byte buffers plus a count of bytes duplicated out of or into them.
///
/// Clones share the buffers and the counter.
#[derive(Debug, Clone, Default)]
pub struct BufferSet {
    entries: BTreeMap<String, Bytes>,
    copied: Arc<AtomicU64>,
}

impl BufferSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a buffer without copying it. Replaces any buffer of the same name.
    pub fn insert(&mut self, name: impl Into<String>, bytes: impl Into<Bytes>) {
        self.entries.insert(name.into(), bytes.into());
    }

    /// Adds a buffer by duplicating `bytes`; the copy is counted.
    pub fn copy_from_slice(&mut self, name: impl Into<String>, bytes: &[u8]) {
        self.record_copy(bytes.len());
        self.entries
            .insert(name.into(), Bytes::copy_from_slice(bytes));
    }

    /// Returns an owned duplicate of one buffer; the copy is counted.
    pub fn copy_out(&self, name: &str) -> Option<Vec<u8>> {
        let bytes = self.entries.get(name)?;
        self.record_copy(bytes.len());
        Some(bytes.to_vec())
    }

    /// A new set holding duplicates of every buffer. The copied bytes are counted here;
    /// the new set starts at zero.
    pub fn deep_copy(&self) -> BufferSet {
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), Bytes::copy_from_slice(v)))
            .collect();
        self.record_copy(self.total_bytes());
        BufferSet {
            entries,
            copied: Arc::default(),
        }
    }

    fn record_copy(&self, n: usize) {
        self.copied.fetch_add(n as u64, Ordering::Relaxed);
    }

    pub fn copy_counter(&self) -> u64 {
        self.copied.load(Ordering::Relaxed)
    }

    pub fn get(&self, name: &str) -> Option<&Bytes> {
        self.entries.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Bytes)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_bytes(&self) -> usize {
        self.entries.values().map(Bytes::len).sum()
    }
}

/// Equality compares names and contents, not the counter.
impl PartialEq for BufferSet {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

/// A decomposed array: `(form, length, buffers)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub form: Form,
    pub length: usize,
    pub buffers: BufferSet,
}

impl Container {
    pub fn from_node(node: &ArrayNode) -> Self {
        to_buffers(node)
    }

    pub fn to_node(&self) -> Result<ArrayNode, BufferError> {
        from_buffers(&self.form, self.length, &self.buffers)
    }

    pub fn form_json(&self) -> String {
        emit_form(&self.form)
    }
}

/// Decomposes a valid node into buffers named after pre-order form keys `node0`, `node1`, ...
pub fn to_buffers(node: &ArrayNode) -> Container {
    to_buffers_with_prefix(node, DEFAULT_KEY_PREFIX)
}

pub fn to_buffers_with_prefix(node: &ArrayNode, key_prefix: &str) -> Container {
    let form = form_of(node, key_prefix);
    let mut buffers = BufferSet::new();
    collect(node, &form, &mut buffers);
    Container {
        form,
        length: node.len(),
        buffers,
    }
}

fn collect(node: &ArrayNode, form: &Form, out: &mut BufferSet) {
    match (node, form) {
        (ArrayNode::Primitive(a), Form::Primitive { form_key, .. }) => {
            let used = a.len() * a.dtype().width();
            out.insert(data_buffer_name(form_key), a.data().slice(..used));
        }
        (ArrayNode::ListOffset(a), Form::ListOffset { form_key, content }) => {
            let used = (a.len() + 1) * 8;
            out.insert(
                offsets_buffer_name(form_key),
                a.offsets_bytes().slice(..used),
            );
            // content past the final offset is unreachable; drop it so the buffers are canonical
            let reachable = a.offset(a.len()) as usize;
            if reachable < a.content().len() {
                collect(&a.content().slice(0, reachable), content, out);
            } else {
                collect(a.content(), content, out);
            }
        }
        (ArrayNode::Record(a), Form::Record { fields, .. }) => {
            for ((_, child), (_, child_form)) in a.fields().iter().zip(fields) {
                collect(child, child_form, out);
            }
        }
        _ => unreachable!("form_of mirrors node structure"),
    }
}

/// Reassembles a node that views `buffers` directly. Buffers longer than needed are
/// truncated views; shorter ones are a [`BufferError::Size`].
pub fn from_buffers(
    form: &Form,
    length: usize,
    buffers: &BufferSet,
) -> Result<ArrayNode, BufferError> {
    form.check()?;
    let node = assemble(form, length, buffers)?;
    node.validate()?;
    Ok(node)
}

fn fetch(buffers: &BufferSet, name: String, required: usize) -> Result<Bytes, BufferError> {
    let bytes = buffers
        .get(&name)
        .ok_or_else(|| BufferError::MissingBuffer(name.clone()))?;
    if bytes.len() < required {
        return Err(BufferError::Size {
            name,
            required,
            actual: bytes.len(),
        });
    }
    Ok(bytes.slice(..required))
}

fn assemble(form: &Form, length: usize, buffers: &BufferSet) -> Result<ArrayNode, BufferError> {
    Ok(match form {
        Form::Primitive { dtype, form_key } => {
            let data = fetch(buffers, data_buffer_name(form_key), length * dtype.width())?;
            PrimitiveArray::from_parts(*dtype, data, length).into()
        }
        Form::ListOffset { content, form_key } => {
            let offsets = fetch(buffers, offsets_buffer_name(form_key), (length + 1) * 8)?;
            let last = i64::from_le_bytes(offsets[length * 8..].try_into().unwrap());
            // a negative final offset is reported by validation, not here
            let content_len = usize::try_from(last).unwrap_or(0);
            let content = assemble(content, content_len, buffers)?;
            ListOffsetArray::from_parts(offsets, length, content).into()
        }
        Form::Record { fields, .. } => {
            let children = fields
                .iter()
                .map(|(name, f)| Ok((name.clone(), assemble(f, length, buffers)?)))
                .collect::<Result<Vec<_>, BufferError>>()?;
            RecordArray::from_parts(children, length).into()
        }
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BufferError + '_ {
    move |source| BufferError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_container(c: &Container, dir: &Path) -> Result<(), BufferError> {
    let buffers_dir = dir.join(BUFFERS_DIR);
    fs::create_dir_all(&buffers_dir).map_err(io_err(&buffers_dir))?;

    let form_path = dir.join(FORM_FILE);
    fs::write(&form_path, c.form_json()).map_err(io_err(&form_path))?;

    let length_path = dir.join(LENGTH_FILE);
    fs::write(&length_path, format!("{}\n", c.length)).map_err(io_err(&length_path))?;

    for (name, bytes) in c.buffers.iter() {
        let path = buffer_path(&buffers_dir, name)?;
        fs::write(&path, bytes).map_err(io_err(&path))?;
    }
    Ok(())
}

fn buffer_path(buffers_dir: &Path, name: &str) -> Result<PathBuf, BufferError> {
    if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
        return Err(BufferError::Format(format!(
            "buffer name {name:?} is not a valid file name"
        )));
    }
    Ok(buffers_dir.join(name))
}

pub fn read_container(dir: &Path) -> Result<Container, BufferError> {
    if !dir.is_dir() {
        return Err(BufferError::Io {
            path: dir.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        });
    }

    let form_path = dir.join(FORM_FILE);
    if !form_path.is_file() {
        return Err(BufferError::Format(format!(
            "missing {}",
            form_path.display()
        )));
    }
    let form_text = fs::read_to_string(&form_path).map_err(io_err(&form_path))?;
    let form = parse_form(&form_text)?;

    let length_path = dir.join(LENGTH_FILE);
    if !length_path.is_file() {
        return Err(BufferError::Format(format!(
            "missing {}",
            length_path.display()
        )));
    }
    let length_text = fs::read_to_string(&length_path).map_err(io_err(&length_path))?;
    let length: usize = length_text.trim().parse().map_err(|_| {
        BufferError::Format(format!(
            "{} does not hold a non-negative integer: {:?}",
            length_path.display(),
            length_text.trim()
        ))
    })?;

    let mut buffers = BufferSet::new();
    let buffers_dir = dir.join(BUFFERS_DIR);
    if buffers_dir.is_dir() {
        for entry in fs::read_dir(&buffers_dir).map_err(io_err(&buffers_dir))? {
            let entry = entry.map_err(io_err(&buffers_dir))?;
            let path = entry.path();
            if !path.is_file() {
                continue;
            }
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
                continue;
            };
            let bytes = fs::read(&path).map_err(io_err(&path))?;
            buffers.insert(name.to_string(), bytes);
        }
    }
    if let Some(missing) = form
        .buffer_names()
        .into_iter()
        .find(|n| !buffers.contains(n))
    {
        return Err(BufferError::MissingBuffer(missing));
    }

    Ok(Container {
        form,
        length,
        buffers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Rule;
    use crate::value::Value;
    use crate::DType;

    fn ragged() -> ArrayNode {
        ListOffsetArray::try_new(
            &[0, 3, 3, 5],
            PrimitiveArray::from_values(&[1.1, 2.2, 3.3, 4.4, 5.5]),
        )
        .unwrap()
        .into()
    }

    fn le_i64(values: &[i64]) -> Vec<u8> {
        values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    fn le_f64(values: &[f64]) -> Vec<u8> {
        values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    #[test]
    fn to_buffers_names_and_bytes() {
        let c = to_buffers(&ragged());
        assert_eq!(c.length, 3);
        assert_eq!(
            c.buffers.names().collect::<Vec<_>>(),
            ["node0-offsets", "node1-data"]
        );
        assert_eq!(
            c.buffers.get("node0-offsets").unwrap()[..],
            le_i64(&[0, 3, 3, 5])
        );
        assert_eq!(
            c.buffers.get("node1-data").unwrap()[..],
            le_f64(&[1.1, 2.2, 3.3, 4.4, 5.5])
        );
        assert_eq!(c.buffers.copy_counter(), 0);
    }

    #[test]
    fn empty_primitive() {
        let c = to_buffers(&PrimitiveArray::empty(DType::Float64).into());
        assert_eq!(c.length, 0);
        assert_eq!(c.buffers.get("node0-data").unwrap().len(), 0);
        assert_eq!(c.to_node().unwrap().len(), 0);
    }

    #[test]
    fn round_trip_aliases_memory() {
        let node = ragged();
        let c = to_buffers(&node);
        let back = c.to_node().unwrap();
        assert_eq!(back.to_list(), node.to_list());
        let src: Vec<*const u8> = c.buffers.iter().map(|(_, b)| b.as_ptr()).collect();
        let viewed: Vec<*const u8> = back.buffers().iter().map(|b| b.as_ptr()).collect();
        assert_eq!(src, viewed);
        assert_eq!(c.buffers.copy_counter(), 0);
    }

    #[test]
    fn missing_buffer() {
        let mut c = to_buffers(&ragged());
        let mut only_data = BufferSet::new();
        only_data.insert("node1-data", c.buffers.get("node1-data").unwrap().clone());
        c.buffers = only_data;
        assert!(matches!(c.to_node(), Err(BufferError::MissingBuffer(n)) if n == "node0-offsets"));
    }

    #[test]
    fn short_offsets_is_size_error() {
        let c = to_buffers(&ragged());
        // four offsets present, length 4 needs five
        let err = from_buffers(&c.form, 4, &c.buffers).unwrap_err();
        assert!(
            matches!(
                err,
                BufferError::Size {
                    required: 40,
                    actual: 32,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn bad_offsets_are_validation_errors() {
        let c = to_buffers(&ragged());
        let mut buffers = BufferSet::new();
        buffers.insert("node0-offsets", le_i64(&[0, 5, 3]));
        buffers.insert("node1-data", c.buffers.get("node1-data").unwrap().clone());
        match from_buffers(&c.form, 2, &buffers) {
            Err(BufferError::Validation(e)) => assert_eq!(e.rule, Rule::MonotonicOffsets),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn longer_buffers_are_truncated_views() {
        let mut buffers = BufferSet::new();
        buffers.insert("node0-data", le_f64(&[1.0, 2.0, 3.0]));
        let form = Form::Primitive {
            dtype: DType::Float64,
            form_key: "node0".into(),
        };
        let node = from_buffers(&form, 2, &buffers).unwrap();
        assert_eq!(node.to_list(), Value::from(vec![1.0, 2.0]));
    }

    #[test]
    fn sliced_node_serializes_its_view() {
        let tail = ragged().slice(1, 3);
        let c = to_buffers(&tail);
        assert_eq!(
            c.buffers.get("node0-offsets").unwrap()[..],
            le_i64(&[3, 3, 5])
        );
        assert_eq!(c.to_node().unwrap().to_list(), tail.to_list());
    }

    #[test]
    fn explicit_copies_are_counted() {
        let c = to_buffers(&ragged());
        let dup = c.buffers.deep_copy();
        assert_eq!(c.buffers.copy_counter(), 72);
        assert_eq!(dup.copy_counter(), 0);
        assert_eq!(dup, c.buffers);
        assert_eq!(c.buffers.copy_out("node0-offsets").unwrap().len(), 32);
        assert_eq!(c.buffers.copy_counter(), 104);
    }

    #[test]
    fn container_directory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = to_buffers(&ragged());
        write_container(&c, dir.path()).unwrap();
        assert_eq!(
            fs::read_to_string(dir.path().join("length.txt")).unwrap(),
            "3\n"
        );
        assert_eq!(
            fs::metadata(dir.path().join("buffers/node0-offsets"))
                .unwrap()
                .len(),
            32
        );
        assert_eq!(
            fs::metadata(dir.path().join("buffers/node1-data"))
                .unwrap()
                .len(),
            40
        );
        assert_eq!(read_container(dir.path()).unwrap(), c);
    }

    #[test]
    fn read_container_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            read_container(dir.path()),
            Err(BufferError::Format(_))
        ));

        write_container(&to_buffers(&ragged()), dir.path()).unwrap();
        fs::write(dir.path().join("length.txt"), "abc\n").unwrap();
        assert!(matches!(
            read_container(dir.path()),
            Err(BufferError::Format(_))
        ));

        fs::write(dir.path().join("length.txt"), "3\n").unwrap();
        fs::remove_file(dir.path().join("buffers/node1-data")).unwrap();
        assert!(matches!(
            read_container(dir.path()),
            Err(BufferError::MissingBuffer(n)) if n == "node1-data"
        ));
    }

    #[test]
    fn unwritable_destination_names_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let err = write_container(&to_buffers(&ragged()), &blocker.join("sub")).unwrap_err();
        assert!(matches!(err, BufferError::Io { .. }));
        assert!(err.to_string().contains("file"), "{err}");
    }
}
