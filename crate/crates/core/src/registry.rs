//! Priority-ordered conversion rules for turning tagged foreign values into native nodes.
//!
//! Rules are keyed by a `"<module path>:<type name>"` string. For a given value, matching
//! rules are tried from the highest priority tier down, newest registration first within a
//! tier. A converter either returns [`Conversion::Converted`] or passes with
//! [`Conversion::Unconverted`]; the first conversion wins.

use std::any::Any;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::buffers::{to_buffers, Container};
use crate::error::ConvertError;
use crate::layout::{ArrayNode, NodeKind};

/// Type key of arrays exchanged through the buffer protocol.
pub const AWKWARD_ARRAY_KEY: &str = "awkward.highlevel:Array";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Priority {
    Fallback = 100,
    Standard = 200,
    Array = 300,
    Canonical = 400,
}

impl Priority {
    pub fn value(self) -> u16 {
        self as u16
    }
}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Priority::Fallback => "FALLBACK",
            Priority::Standard => "STANDARD",
            Priority::Array => "ARRAY",
            Priority::Canonical => "CANONICAL",
        };
        write!(f, "{name}={}", self.value())
    }
}

/// Which node kinds a rule produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetKind {
    Any,
    Kind(NodeKind),
}

impl TargetKind {
    fn admits(self, kind: NodeKind) -> bool {
        match self {
            TargetKind::Any => true,
            TargetKind::Kind(k) => k == kind,
        }
    }

    fn overlaps(self, other: TargetKind) -> bool {
        match (self, other) {
            (TargetKind::Any, _) | (_, TargetKind::Any) => true,
            (TargetKind::Kind(a), TargetKind::Kind(b)) => a == b,
        }
    }
}

/// A foreign object tagged with its type key. The payload is opaque to the registry; the
/// built-in rule expects a [`Container`].
#[derive(Clone)]
pub struct ForeignValue {
    type_key: String,
    payload: Arc<dyn Any + Send + Sync>,
}

impl ForeignValue {
    /// Panics if `type_key` is empty.
    pub fn new(type_key: impl Into<String>, payload: impl Any + Send + Sync) -> Self {
        let type_key = type_key.into();
        assert!(!type_key.is_empty(), "foreign type key must be non-empty");
        ForeignValue {
            type_key,
            payload: Arc::new(payload),
        }
    }

    pub fn type_key(&self) -> &str {
        &self.type_key
    }

    pub fn payload<T: Any>(&self) -> Option<&T> {
        self.payload.downcast_ref()
    }

    pub fn container(&self) -> Option<&Container> {
        self.payload()
    }
}

impl fmt::Debug for ForeignValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ForeignValue")
            .field("type_key", &self.type_key)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum Conversion {
    Converted(ArrayNode),
    Unconverted,
}

pub type Converter = Arc<dyn Fn(&ForeignValue) -> Result<Conversion, ConvertError> + Send + Sync>;

#[derive(Clone)]
pub struct ConversionRule {
    pub type_key: String,
    pub target: TargetKind,
    pub converter: Converter,
    pub priority: Priority,
}

impl ConversionRule {
    pub fn new<F>(type_key: impl Into<String>, target: TargetKind, priority: Priority, f: F) -> Self
    where
        F: Fn(&ForeignValue) -> Result<Conversion, ConvertError> + Send + Sync + 'static,
    {
        ConversionRule {
            type_key: type_key.into(),
            target,
            converter: Arc::new(f),
            priority,
        }
    }
}

impl fmt::Debug for ConversionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConversionRule")
            .field("type_key", &self.type_key)
            .field("target", &self.target)
            .field("priority", &self.priority)
            .finish_non_exhaustive()
    }
}

/// Rules kept sorted by (priority, registration sequence), both descending.
#[derive(Default)]
pub struct Registry {
    rules: RwLock<RuleList>,
}

#[derive(Default)]
struct RuleList {
    next_seq: u64,
    sorted: Vec<(u64, Arc<ConversionRule>)>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// A registry with the buffer-protocol rule for [`AWKWARD_ARRAY_KEY`] at the `Array` tier.
    pub fn with_builtin_rules() -> Self {
        let reg = Registry::new();
        reg.register_rule(ConversionRule::new(
            AWKWARD_ARRAY_KEY,
            TargetKind::Any,
            Priority::Array,
            convert_container,
        ));
        reg
    }

    pub fn register_rule(&self, rule: ConversionRule) {
        let mut list = self.rules.write().unwrap_or_else(|e| e.into_inner());
        let seq = list.next_seq;
        list.next_seq += 1;
        let pos = list
            .sorted
            .partition_point(|(s, r)| (r.priority, *s) > (rule.priority, seq));
        list.sorted.insert(pos, (seq, Arc::new(rule)));
    }

    pub fn len(&self) -> usize {
        self.snapshot().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn snapshot(&self) -> Vec<Arc<ConversionRule>> {
        let list = self.rules.read().unwrap_or_else(|e| e.into_inner());
        list.sorted.iter().map(|(_, r)| Arc::clone(r)).collect()
    }

    /// Matching rules for `type_key` in dispatch order.
    pub fn lookup(&self, type_key: &str, target: TargetKind) -> Vec<Arc<ConversionRule>> {
        self.snapshot()
            .into_iter()
            .filter(|r| r.type_key == type_key && r.target.overlaps(target))
            .collect()
    }

    pub fn convert(&self, value: &ForeignValue) -> Result<ArrayNode, ConvertError> {
        self.convert_to(value, TargetKind::Any)
    }

    /// Like [`convert`](Self::convert) but only accepts results of the requested kind.
    ///
    /// A converter whose result falls outside its own declared target, or outside
    /// `target`, is treated as having passed. Converter errors propagate immediately.
    pub fn convert_to(
        &self,
        value: &ForeignValue,
        target: TargetKind,
    ) -> Result<ArrayNode, ConvertError> {
        let mut tiers_tried = Vec::new();
        for rule in self.lookup(value.type_key(), target) {
            if tiers_tried.last() != Some(&rule.priority) {
                tiers_tried.push(rule.priority);
            }
            if let Conversion::Converted(node) = (rule.converter)(value)? {
                if rule.target.admits(node.kind()) && target.admits(node.kind()) {
                    return Ok(node);
                }
            }
        }
        Err(ConvertError::NoRule {
            type_key: value.type_key().to_string(),
            tiers_tried,
        })
    }
}

fn convert_container(value: &ForeignValue) -> Result<Conversion, ConvertError> {
    let container = value
        .container()
        .ok_or_else(|| ConvertError::Payload(value.type_key().to_string()))?;
    Ok(Conversion::Converted(container.to_node()?))
}

/// Wraps a node's buffers, without copying, as a foreign array value.
pub fn export(node: &ArrayNode) -> ForeignValue {
    ForeignValue::new(AWKWARD_ARRAY_KEY, to_buffers(node))
}
