#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

use ragged::kernels::{build_events, Muons};
use ragged::{
    to_buffers, write_container, ArrayNode, ListOffsetArray, PrimitiveArray, RecordArray,
};

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> serde_json::Value {
        serde_json::from_str(self.stdout.trim()).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }

    pub fn metric(&self, name: &str) -> f64 {
        self.json()["metrics"][name]
            .as_f64()
            .unwrap_or_else(|| panic!("no metric {name} in {}", self.stdout))
    }

    pub fn diagnostics(&self) -> String {
        self.json()["diagnostics"]
            .as_array()
            .unwrap()
            .iter()
            .map(|d| d.as_str().unwrap())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub fn ragged<I, S>(args: I) -> Run
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out = Command::new(env!("CARGO_BIN_EXE_ragged"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn list_example() -> ArrayNode {
    let content = PrimitiveArray::from_values(&[1.1f64, 2.2, 3.3, 4.4, 5.5]);
    ListOffsetArray::try_new(&[0, 3, 3, 5], content)
        .unwrap()
        .into()
}

pub fn record_example() -> ArrayNode {
    RecordArray::try_new(vec![
        ("a", PrimitiveArray::from_values(&[1i64, 2, 3, 4, 5]).into()),
        (
            "b",
            PrimitiveArray::from_values(&[1.1f64, 2.2, 3.3, 4.4, 5.5]).into(),
        ),
    ])
    .unwrap()
    .into()
}

fn two_muons(charge: [i64; 2], pt: f64) -> Muons {
    Muons {
        charge: charge.to_vec(),
        pt: vec![pt, pt],
        eta: vec![0.0, 0.0],
        phi: vec![0.0, PI],
    }
}

/// Mass 100 kept, same charge skipped, mass 20 cut.
pub fn hand_events() -> ArrayNode {
    build_events(&[
        two_muons([1, -1], 50.0),
        two_muons([1, 1], 50.0),
        two_muons([1, -1], 10.0),
    ])
    .unwrap()
    .to_node()
}

pub fn write(node: &ArrayNode, dir: &Path) {
    write_container(&to_buffers(node), dir).unwrap();
}
