//! Array-oriented physics kernels.
//!
//! Kernels take everything they need as arguments and touch no global state. The columnar
//! implementations read the flat little-endian buffers directly; `invariant_mass_rowwise`
//! materializes each event into a boxed struct and follows the per-event loop literally,
//! serving as the semantic oracle for the columnar version.

use std::f64::consts::PI;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dtype::{DType, NativeType};
use crate::error::{FieldError, LayoutError, ValidationError};
use crate::layout::{ArrayNode, ListOffsetArray, PrimitiveArray, RecordArray};
use crate::value::Value;

/// Selected masses must exceed this plain cut value; equality is rejected.
pub const MASS_CUT: f64 = 70.0;

/// Sum of every element of a list array over `float64`.
pub fn path_length(array: &ListOffsetArray) -> Result<f64, LayoutError> {
    let content = float64_content(array)?;
    if array.is_empty() {
        return Ok(0.0);
    }
    let start = array.offset(0) as usize;
    let stop = array.offset(array.len()) as usize;
    let flat = content.slice(start, stop);
    Ok(flat.iter_as::<f64>().expect("dtype checked").sum())
}

fn float64_content(array: &ListOffsetArray) -> Result<&PrimitiveArray, LayoutError> {
    match array.content() {
        ArrayNode::Primitive(p) if p.dtype() == DType::Float64 => Ok(p),
        other => Err(LayoutError {
            expected: "list-offset of float64".to_string(),
            found: describe(other),
        }),
    }
}

fn describe(node: &ArrayNode) -> String {
    match node {
        ArrayNode::Primitive(p) => format!("primitive {}", p.dtype()),
        other => other.kind().to_string(),
    }
}

pub const N_MUON: &str = "nMuon";
pub const MUON_CHARGE: &str = "Muon_charge";
pub const MUON_PT: &str = "Muon_pt";
pub const MUON_ETA: &str = "Muon_eta";
pub const MUON_PHI: &str = "Muon_phi";

#[derive(Debug, thiserror::Error)]
pub enum EventBatchError {
    #[error("event batch must be a record, found {0}")]
    NotRecord(String),
    #[error("event batch is missing field {0:?}")]
    MissingField(&'static str, #[source] FieldError),
    #[error("event batch field {field:?}: {source}")]
    FieldType {
        field: &'static str,
        #[source]
        source: LayoutError,
    },
    #[error("event {event}: {detail}")]
    Inconsistent { event: usize, detail: String },
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

/// Muon events as a record of columns: `nMuon` (int64) and per-muon lists `Muon_charge`
/// (int64), `Muon_pt`, `Muon_eta` and `Muon_phi` (radians), all float64.
#[derive(Debug, Clone)]
pub struct EventBatch {
    record: RecordArray,
    n_muon: PrimitiveArray,
    charge: ListOffsetArray,
    pt: ListOffsetArray,
    eta: ListOffsetArray,
    phi: ListOffsetArray,
}

impl EventBatch {
    /// Checks the layout, then that each event's four muon lists have `nMuon` entries.
    pub fn try_from_node(node: &ArrayNode) -> Result<Self, EventBatchError> {
        let record = node
            .as_record()
            .ok_or_else(|| EventBatchError::NotRecord(describe(node)))?
            .clone();
        node.validate()?;
        let field = |name: &'static str| {
            record
                .field(name)
                .map_err(|e| EventBatchError::MissingField(name, e))
        };
        let n_muon = match field(N_MUON)? {
            ArrayNode::Primitive(p) if p.dtype() == DType::Int64 => p.clone(),
            other => {
                return Err(EventBatchError::FieldType {
                    field: N_MUON,
                    source: LayoutError {
                        expected: "primitive int64".to_string(),
                        found: describe(other),
                    },
                })
            }
        };
        let list_of =
            |name: &'static str, dtype: DType| -> Result<ListOffsetArray, EventBatchError> {
                match field(name)? {
                    ArrayNode::ListOffset(l)
                        if l.content().as_primitive().map(PrimitiveArray::dtype) == Some(dtype) =>
                    {
                        Ok(l.clone())
                    }
                    other => Err(EventBatchError::FieldType {
                        field: name,
                        source: LayoutError {
                            expected: format!("list-offset of {dtype}"),
                            found: describe(other),
                        },
                    }),
                }
            };
        let batch = EventBatch {
            n_muon,
            charge: list_of(MUON_CHARGE, DType::Int64)?,
            pt: list_of(MUON_PT, DType::Float64)?,
            eta: list_of(MUON_ETA, DType::Float64)?,
            phi: list_of(MUON_PHI, DType::Float64)?,
            record,
        };
        batch.check_counts()?;
        Ok(batch)
    }

    fn check_counts(&self) -> Result<(), EventBatchError> {
        let lists = [
            (MUON_CHARGE, &self.charge),
            (MUON_PT, &self.pt),
            (MUON_ETA, &self.eta),
            (MUON_PHI, &self.phi),
        ];
        for event in 0..self.len() {
            let n = self.n_muon.get_as::<i64>(event);
            for (name, list) in lists {
                let count = list.offset(event + 1) - list.offset(event);
                if count != n {
                    return Err(EventBatchError::Inconsistent {
                        event,
                        detail: format!("nMuon = {n} but {name} holds {count} entries"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.record.len()
    }

    pub fn is_empty(&self) -> bool {
        self.record.len() == 0
    }

    pub fn record(&self) -> &RecordArray {
        &self.record
    }

    pub fn to_node(&self) -> ArrayNode {
        self.record.clone().into()
    }

    /// Zero-copy view of events `[start, stop)`.
    pub fn slice(&self, start: usize, stop: usize) -> EventBatch {
        EventBatch {
            record: self.record.slice(start, stop),
            n_muon: self.n_muon.slice(start, stop),
            charge: self.charge.slice(start, stop),
            pt: self.pt.slice(start, stop),
            eta: self.eta.slice(start, stop),
            phi: self.phi.slice(start, stop),
        }
    }
}

/// One event's muons, for building batches by hand.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Muons {
    pub charge: Vec<i64>,
    pub pt: Vec<f64>,
    pub eta: Vec<f64>,
    pub phi: Vec<f64>,
}

/// Assembles an [`EventBatch`] from per-event muon lists.
pub fn build_events(events: &[Muons]) -> Result<EventBatch, EventBatchError> {
    let counts: Vec<i64> = events.iter().map(|e| e.charge.len() as i64).collect();
    fn lists<T: NativeType>(
        events: &[Muons],
        get: impl Fn(&Muons) -> &[T],
    ) -> Result<ArrayNode, ValidationError> {
        let flat: Vec<T> = events.iter().flat_map(|e| get(e).iter().copied()).collect();
        let list = ListOffsetArray::from_counts(
            events.iter().map(|e| get(e).len()),
            PrimitiveArray::from_values(&flat),
        )?;
        Ok(list.into())
    }
    let record = RecordArray::try_with_length(
        [
            (N_MUON, PrimitiveArray::from_values(&counts).into()),
            (MUON_CHARGE, lists(events, |e| &e.charge)?),
            (MUON_PT, lists(events, |e| &e.pt)?),
            (MUON_ETA, lists(events, |e| &e.eta)?),
            (MUON_PHI, lists(events, |e| &e.phi)?),
        ],
        events.len(),
    )?;
    EventBatch::try_from_node(&record.into())
}

/// Deterministic synthetic events: 1 to 3 muons per event (2 most likely), pt in (0, 120],
/// eta in [-2.4, 2.4], phi in [-pi, pi), charge +-1.
pub fn gen_events(n: usize, seed: u64) -> EventBatch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let multiplicity = WeightedIndex::new([1u32, 2, 1]).expect("static weights");
    let events: Vec<Muons> = (0..n)
        .map(|_| {
            let k = multiplicity.sample(&mut rng) + 1;
            let mut m = Muons::default();
            for _ in 0..k {
                m.charge.push(if rng.gen_bool(0.5) { 1 } else { -1 });
                m.pt.push(120.0 * (1.0 - rng.gen::<f64>()));
                m.eta.push(rng.gen_range(-2.4..=2.4));
                m.phi.push(rng.gen_range(-PI..PI));
            }
            m
        })
        .collect();
    build_events(&events).expect("generated events are consistent")
}

#[inline]
pub fn dimuon_mass(pt: [f64; 2], eta: [f64; 2], phi: [f64; 2]) -> f64 {
    (2.0 * pt[0] * pt[1] * ((eta[0] - eta[1]).cosh() - (phi[0] - phi[1]).cos())).sqrt()
}

/// Invariant mass of every opposite-charge dimuon event above [`MASS_CUT`], in event order.
pub fn invariant_mass(events: &EventBatch) -> PrimitiveArray {
    let mut out = Vec::new();
    let charges = content_of(&events.charge);
    let pts = content_of(&events.pt);
    let etas = content_of(&events.eta);
    let phis = content_of(&events.phi);
    let n_muon = events.n_muon.iter_as::<i64>().expect("int64 column");
    for (i, n) in n_muon.enumerate() {
        if n != 2 {
            continue;
        }
        let pair_i64 = |list: &ListOffsetArray, content: &PrimitiveArray| {
            let o = list.offset(i) as usize;
            [content.get_as::<i64>(o), content.get_as::<i64>(o + 1)]
        };
        let pair_f64 = |list: &ListOffsetArray, content: &PrimitiveArray| {
            let o = list.offset(i) as usize;
            [content.get_as::<f64>(o), content.get_as::<f64>(o + 1)]
        };
        let q = pair_i64(&events.charge, charges);
        if q[0] == q[1] {
            continue;
        }
        let mass = dimuon_mass(
            pair_f64(&events.pt, pts),
            pair_f64(&events.eta, etas),
            pair_f64(&events.phi, phis),
        );
        if mass > MASS_CUT {
            out.push(mass);
        }
    }
    PrimitiveArray::from_values(&out)
}

fn content_of(list: &ListOffsetArray) -> &PrimitiveArray {
    list.content()
        .as_primitive()
        .expect("checked by EventBatch")
}

/// [`invariant_mass`] over `parts` contiguous slices on scoped threads, concatenated in order.
pub fn invariant_mass_partitioned(events: &EventBatch, parts: usize) -> PrimitiveArray {
    let parts = parts.max(1);
    let chunk = events.len().div_ceil(parts).max(1);
    let pieces: Vec<Vec<f64>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..events.len())
            .step_by(chunk)
            .map(|start| {
                let view = events.slice(start, (start + chunk).min(events.len()));
                s.spawn(move || {
                    invariant_mass(&view)
                        .iter_as::<f64>()
                        .expect("float64")
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    PrimitiveArray::from_values(&pieces.concat())
}

struct Event {
    n_muon: i64,
    charge: Vec<i64>,
    pt: Vec<f64>,
    eta: Vec<f64>,
    phi: Vec<f64>,
}

fn column_f64(v: &Value) -> Vec<f64> {
    v.as_list()
        .expect("list field")
        .iter()
        .map(|x| x.as_f64().expect("numeric"))
        .collect()
}

fn column_i64(v: &Value) -> Vec<i64> {
    v.as_list()
        .expect("list field")
        .iter()
        .map(|x| match x {
            Value::Int(q) => *q,
            other => panic!("expected int64, got {other}"),
        })
        .collect()
}

/// Per-event reference implementation; same contract as [`invariant_mass`].
pub fn invariant_mass_rowwise(events: &EventBatch) -> PrimitiveArray {
    let record = events.record();
    let mut layout = Vec::new();
    for i in 0..record.len() {
        let row = record.get_record(i).expect("in range").to_value();
        let get = |name| row.field(name).expect("EventBatch field");
        let event = Box::new(Event {
            n_muon: match get(N_MUON) {
                Value::Int(n) => *n,
                other => panic!("expected int64 nMuon, got {other}"),
            },
            charge: column_i64(get(MUON_CHARGE)),
            pt: column_f64(get(MUON_PT)),
            eta: column_f64(get(MUON_ETA)),
            phi: column_f64(get(MUON_PHI)),
        });
        if event.n_muon != 2 {
            continue;
        }
        if event.charge[0] == event.charge[1] {
            continue;
        }
        let result = (2.0
            * event.pt[0]
            * event.pt[1]
            * ((event.eta[0] - event.eta[1]).cosh() - (event.phi[0] - event.phi[1]).cos()))
        .sqrt();
        if result > 70.0 {
            layout.push(result);
        }
    }
    PrimitiveArray::from_values(&layout)
}
