//! Form: the schema half of the buffer protocol, and its JSON wire format.
//!
//! Wire tokens follow the reference Awkward Array spelling so containers written here can be
//! read there and vice versa:
//!
//! | kind        | `"class"`           | extra keys                                   |
//! |-------------|---------------------|----------------------------------------------|
//! | primitive   | `"NumpyArray"`      | `"primitive"`: dtype name                    |
//! | list-offset | `"ListOffsetArray"` | `"offsets": "i64"`, `"content"`: form        |
//! | record      | `"RecordArray"`     | `"contents"`: forms, `"fields"`: names       |
//!
//! Every node carries a `"form_key"`. Unknown keys (`"parameters"`, `"inner_shape": []`, ...)
//! are ignored on parse.

use std::collections::HashSet;

use serde_json::{Map, Value as Json};

use crate::dtype::DType;
use crate::error::FormError;
use crate::layout::{ArrayNode, NodeKind};

pub const OFFSETS_TOKEN: &str = "i64";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Form {
    Primitive {
        dtype: DType,
        form_key: String,
    },
    ListOffset {
        content: Box<Form>,
        form_key: String,
    },
    Record {
        fields: Vec<(String, Form)>,
        form_key: String,
    },
}

impl Form {
    pub fn kind(&self) -> NodeKind {
        match self {
            Form::Primitive { .. } => NodeKind::Primitive,
            Form::ListOffset { .. } => NodeKind::ListOffset,
            Form::Record { .. } => NodeKind::Record,
        }
    }

    pub fn form_key(&self) -> &str {
        match self {
            Form::Primitive { form_key, .. }
            | Form::ListOffset { form_key, .. }
            | Form::Record { form_key, .. } => form_key,
        }
    }

    /// Names of the buffers this form needs, in pre-order: `<key>-data` for primitives,
    /// `<key>-offsets` for lists. Records own no buffer.
    pub fn buffer_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |f| match f {
            Form::Primitive { form_key, .. } => out.push(data_buffer_name(form_key)),
            Form::ListOffset { form_key, .. } => out.push(offsets_buffer_name(form_key)),
            Form::Record { .. } => {}
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Form)) {
        f(self);
        match self {
            Form::Primitive { .. } => {}
            Form::ListOffset { content, .. } => content.visit(f),
            Form::Record { fields, .. } => {
                for (_, c) in fields {
                    c.visit(f);
                }
            }
        }
    }

    /// Checks key uniqueness and record field names.
    pub fn check(&self) -> Result<(), FormError> {
        let mut keys = HashSet::new();
        let mut result = Ok(());
        self.visit(&mut |f| {
            if result.is_err() {
                return;
            }
            if !keys.insert(f.form_key()) {
                result = Err(FormError::Schema {
                    path: f.form_key().to_string(),
                    message: format!("form_key {:?} is not unique", f.form_key()),
                });
                return;
            }
            if let Form::Record { fields, form_key } = f {
                let mut names = HashSet::new();
                for (name, _) in fields {
                    if name.is_empty() || !names.insert(name.as_str()) {
                        result = Err(FormError::Schema {
                            path: form_key.clone(),
                            message: format!("field name {name:?} is empty or repeated"),
                        });
                        return;
                    }
                }
            }
        });
        result
    }
}

pub fn data_buffer_name(form_key: &str) -> String {
    format!("{form_key}-data")
}

pub fn offsets_buffer_name(form_key: &str) -> String {
    format!("{form_key}-offsets")
}

/// The form describing `node`, with keys `<prefix>0`, `<prefix>1`, ... assigned in pre-order.
pub fn form_of(node: &ArrayNode, key_prefix: &str) -> Form {
    let mut counter = 0usize;
    build_form(node, key_prefix, &mut counter)
}

fn build_form(node: &ArrayNode, prefix: &str, counter: &mut usize) -> Form {
    let form_key = format!("{prefix}{counter}");
    *counter += 1;
    match node {
        ArrayNode::Primitive(a) => Form::Primitive {
            dtype: a.dtype(),
            form_key,
        },
        ArrayNode::ListOffset(a) => Form::ListOffset {
            content: Box::new(build_form(a.content(), prefix, counter)),
            form_key,
        },
        ArrayNode::Record(a) => Form::Record {
            fields: a
                .fields()
                .iter()
                .map(|(name, c)| (name.clone(), build_form(c, prefix, counter)))
                .collect(),
            form_key,
        },
    }
}

pub fn parse_form(text: &str) -> Result<Form, FormError> {
    let json: Json = serde_json::from_str(text).map_err(|e| FormError::Parse {
        offset: byte_offset(text, e.line(), e.column()),
        message: e.to_string(),
    })?;
    let form = form_from_json(&json, "root")?;
    form.check()?;
    Ok(form)
}

// serde_json reports 1-based line and column; translate to a byte offset into `text`.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

fn form_from_json(json: &Json, path: &str) -> Result<Form, FormError> {
    let obj = json.as_object().ok_or_else(|| FormError::Schema {
        path: path.to_string(),
        message: "form must be a JSON object".to_string(),
    })?;
    let class = require_str(obj, "class", path)?;
    match class {
        "NumpyArray" => {
            let primitive = require_str(obj, "primitive", path)?;
            let dtype: DType = primitive.parse().map_err(|_| {
                FormError::UnsupportedLayout(format!("primitive type {primitive:?} at {path}"))
            })?;
            if let Some(shape) = obj.get("inner_shape") {
                if !shape.as_array().is_some_and(|s| s.is_empty()) {
                    return Err(FormError::UnsupportedLayout(format!(
                        "NumpyArray with inner_shape {shape} at {path}"
                    )));
                }
            }
            Ok(Form::Primitive {
                dtype,
                form_key: require_form_key(obj, path)?,
            })
        }
        "ListOffsetArray" => {
            let content_json = require(obj, "content", path)?;
            let offsets = require_str(obj, "offsets", path)?;
            if offsets != OFFSETS_TOKEN {
                return Err(FormError::UnsupportedLayout(format!(
                    "offsets type {offsets:?} at {path} (only \"i64\" is supported)"
                )));
            }
            let content = form_from_json(content_json, &format!("{path}.content"))?;
            Ok(Form::ListOffset {
                content: Box::new(content),
                form_key: require_form_key(obj, path)?,
            })
        }
        "RecordArray" => {
            let contents = require(obj, "contents", path)?
                .as_array()
                .ok_or_else(|| schema(path, "\"contents\" must be an array"))?;
            let names = match require(obj, "fields", path)? {
                Json::Null => {
                    return Err(FormError::UnsupportedLayout(format!(
                        "tuple RecordArray (fields: null) at {path}"
                    )))
                }
                Json::Array(names) => names
                    .iter()
                    .map(|n| {
                        n.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| schema(path, "\"fields\" must hold strings"))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                _ => return Err(schema(path, "\"fields\" must be an array or null")),
            };
            if names.len() != contents.len() {
                return Err(schema(
                    path,
                    &format!(
                        "{} field names for {} contents",
                        names.len(),
                        contents.len()
                    ),
                ));
            }
            let fields = names
                .into_iter()
                .zip(contents)
                .map(|(name, c)| {
                    let child = form_from_json(c, &format!("{path}[{name:?}]"))?;
                    Ok((name, child))
                })
                .collect::<Result<Vec<_>, FormError>>()?;
            Ok(Form::Record {
                fields,
                form_key: require_form_key(obj, path)?,
            })
        }
        other => Err(FormError::UnsupportedLayout(format!(
            "layout class {other:?} at {path}"
        ))),
    }
}

fn schema(path: &str, message: &str) -> FormError {
    FormError::Schema {
        path: path.to_string(),
        message: message.to_string(),
    }
}

fn require<'a>(obj: &'a Map<String, Json>, key: &str, path: &str) -> Result<&'a Json, FormError> {
    obj.get(key).ok_or_else(|| FormError::MissingKey {
        missing: key.to_string(),
        path: path.to_string(),
    })
}

fn require_str<'a>(
    obj: &'a Map<String, Json>,
    key: &str,
    path: &str,
) -> Result<&'a str, FormError> {
    require(obj, key, path)?
        .as_str()
        .ok_or_else(|| schema(path, &format!("{key:?} must be a string")))
}

fn require_form_key(obj: &Map<String, Json>, path: &str) -> Result<String, FormError> {
    match obj.get("form_key") {
        Some(Json::String(k)) => Ok(k.clone()),
        None | Some(Json::Null) => Err(FormError::MissingKey {
            missing: "form_key".to_string(),
            path: path.to_string(),
        }),
        Some(_) => Err(schema(path, "\"form_key\" must be a string")),
    }
}

/// Compact JSON with keys in the fixed order
/// `class, offsets, primitive, content, contents, fields, form_key`.
pub fn emit_form(form: &Form) -> String {
    let mut out = String::new();
    write_form(form, &mut out);
    out
}

fn write_form(form: &Form, out: &mut String) {
    let quote = |s: &str| serde_json::to_string(s).expect("strings always serialize");
    match form {
        Form::Primitive { dtype, form_key } => {
            out.push_str(r#"{"class":"NumpyArray","primitive":"#);
            out.push_str(&quote(dtype.name()));
            out.push_str(r#","form_key":"#);
            out.push_str(&quote(form_key));
        }
        Form::ListOffset { content, form_key } => {
            out.push_str(r#"{"class":"ListOffsetArray","offsets":"i64","content":"#);
            write_form(content, out);
            out.push_str(r#","form_key":"#);
            out.push_str(&quote(form_key));
        }
        Form::Record { fields, form_key } => {
            out.push_str(r#"{"class":"RecordArray","contents":["#);
            for (i, (_, c)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_form(c, out);
            }
            out.push_str(r#"],"fields":["#);
            for (i, (name, _)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&quote(name));
            }
            out.push_str(r#"],"form_key":"#);
            out.push_str(&quote(form_key));
        }
    }
    out.push('}');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{ListOffsetArray, PrimitiveArray, RecordArray};

    fn ragged() -> ArrayNode {
        ListOffsetArray::try_new(
            &[0, 3, 3, 5],
            PrimitiveArray::from_values(&[1.1, 2.2, 3.3, 4.4, 5.5]),
        )
        .unwrap()
        .into()
    }

    #[test]
    fn form_of_assigns_preorder_keys() {
        let f = form_of(&ragged(), "node");
        assert_eq!(
            f,
            Form::ListOffset {
                content: Box::new(Form::Primitive {
                    dtype: DType::Float64,
                    form_key: "node1".into()
                }),
                form_key: "node0".into()
            }
        );
        let p: ArrayNode = PrimitiveArray::from_values(&[1i64]).into();
        assert_eq!(form_of(&p, "node").form_key(), "node0");

        let rec: ArrayNode = RecordArray::try_new([
            ("a", PrimitiveArray::from_values(&[1i64, 2]).into()),
            ("b", PrimitiveArray::from_values(&[1.1, 2.2]).into()),
        ])
        .unwrap()
        .into();
        let f = form_of(&rec, "node");
        assert_eq!(f.buffer_names(), vec!["node1-data", "node2-data"]);
        assert_eq!(f.form_key(), "node0");
    }

    #[test]
    fn emit_exact_tokens() {
        let p = Form::Primitive {
            dtype: DType::Float64,
            form_key: "node0".into(),
        };
        assert_eq!(
            emit_form(&p),
            r#"{"class":"NumpyArray","primitive":"float64","form_key":"node0"}"#
        );
        assert_eq!(
            emit_form(&form_of(&ragged(), "node")),
            r#"{"class":"ListOffsetArray","offsets":"i64","content":{"class":"NumpyArray","primitive":"float64","form_key":"node1"},"form_key":"node0"}"#
        );
    }

    #[test]
    fn parse_primitive() {
        let f = parse_form(r#"{"class":"NumpyArray","primitive":"float64","form_key":"node1"}"#)
            .unwrap();
        assert_eq!(
            f,
            Form::Primitive {
                dtype: DType::Float64,
                form_key: "node1".into()
            }
        );
    }

    #[test]
    fn parse_reference_style_document() {
        // as emitted by the reference library: extra keys, different key order
        let text = r#"{"class": "RecordArray", "fields": ["a", "b"], "contents": [
            {"class": "NumpyArray", "primitive": "int64", "inner_shape": [], "parameters": {}, "form_key": "node1"},
            {"class": "NumpyArray", "primitive": "float64", "inner_shape": [], "parameters": {}, "form_key": "node2"}
        ], "parameters": {}, "form_key": "node0"}"#;
        let f = parse_form(text).unwrap();
        assert_eq!(f.kind(), NodeKind::Record);
        assert_eq!(parse_form(&emit_form(&f)).unwrap(), f);
    }

    #[test]
    fn parse_errors() {
        let union = parse_form(r#"{"class":"UnionArray","tags":"i8","index":"i64","contents":[]}"#);
        assert!(matches!(union, Err(FormError::UnsupportedLayout(_))));

        match parse_form(r#"{"class":"ListOffsetArray"}"#) {
            Err(FormError::MissingKey { missing, .. }) => assert_eq!(missing, "content"),
            other => panic!("{other:?}"),
        }

        match parse_form("{\"class\": \"NumpyArray\",\n \"primitive\": }") {
            Err(FormError::Parse { offset, .. }) => assert_eq!(offset, 38),
            other => panic!("{other:?}"),
        }

        let i32_offsets = r#"{"class":"ListOffsetArray","offsets":"i32","content":{"class":"NumpyArray","primitive":"int8","form_key":"b"},"form_key":"a"}"#;
        assert!(matches!(
            parse_form(i32_offsets),
            Err(FormError::UnsupportedLayout(_))
        ));

        let dup = r#"{"class":"ListOffsetArray","offsets":"i64","content":{"class":"NumpyArray","primitive":"int8","form_key":"a"},"form_key":"a"}"#;
        assert!(matches!(parse_form(dup), Err(FormError::Schema { .. })));

        let no_key = r#"{"class":"NumpyArray","primitive":"int8","form_key":null}"#;
        assert!(matches!(
            parse_form(no_key),
            Err(FormError::MissingKey { missing, .. }) if missing == "form_key"
        ));

        let tuple = r#"{"class":"RecordArray","fields":null,"contents":[],"form_key":"a"}"#;
        assert!(matches!(
            parse_form(tuple),
            Err(FormError::UnsupportedLayout(_))
        ));
    }

    #[test]
    fn form_depends_on_structure_only() {
        let a: ArrayNode = ListOffsetArray::try_new(&[0, 1], PrimitiveArray::from_values(&[9.0]))
            .unwrap()
            .into();
        assert_eq!(form_of(&a, "node"), form_of(&ragged(), "node"));
    }
}
