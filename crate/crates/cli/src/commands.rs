use std::path::Path;
use std::time::Instant;

use ragged::kernels::{
    gen_events, invariant_mass, invariant_mass_rowwise, path_length, EventBatch,
};
use ragged::{read_container, to_buffers, write_container, ArrayNode, Container, PrimitiveArray};

use crate::report::{exit, CliError, Report};

pub type Outcome = Result<(), CliError>;

fn load(path: &Path) -> Result<(Container, ArrayNode), CliError> {
    let container = read_container(path)?;
    let node = container.to_node()?;
    Ok((container, node))
}

pub fn inspect(path: &Path, report: &mut Report) -> Outcome {
    let c = read_container(path)?;
    report.note(format!("form: {}", c.form_json()));
    report.note(format!("length: {}", c.length));
    report.metric("length", c.length as f64);
    for (name, bytes) in c.buffers.iter() {
        report.note(format!("buffer {name}: {} B", bytes.len()));
        report.metric(format!("buffer_bytes.{name}"), bytes.len() as f64);
    }
    report.metric("buffer_count", c.buffers.len() as f64);
    Ok(())
}

pub fn validate(path: &Path, report: &mut Report) -> Outcome {
    let (c, node) = load(path)?;
    report.note(format!("ok: {} ({} elements)", node.kind(), c.length));
    report.metric("length", c.length as f64);
    Ok(())
}

fn same_location(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => std::path::absolute(a).ok() == std::path::absolute(b).ok(),
    }
}

pub fn roundtrip(path: &Path, out: &Path, report: &mut Report) -> Outcome {
    if same_location(path, out) {
        return Err(CliError::new(
            exit::FORMAT,
            format!(
                "refusing to overwrite the input container {}",
                path.display()
            ),
        ));
    }
    let (c, node) = load(path)?;
    let expected = node.to_list();

    let again = to_buffers(&node);
    write_container(&again, out)?;
    let (reread, back) = load(out)?;

    let copied =
        c.buffers.copy_counter() + again.buffers.copy_counter() + reread.buffers.copy_counter();
    report.metric("bytes_copied", copied as f64);
    report.metric("length", node.len() as f64);
    report.metric("bytes_written", again.buffers.total_bytes() as f64);

    if back.to_list() != expected {
        return Err(CliError::new(
            exit::MISMATCH,
            "round trip changed the array contents",
        ));
    }
    if copied != 0 {
        return Err(CliError::new(
            exit::MISMATCH,
            format!("round trip duplicated {copied} bytes"),
        ));
    }
    report.note(format!(
        "round trip ok: {} -> {}",
        path.display(),
        out.display()
    ));
    Ok(())
}

pub fn sum(path: &Path, report: &mut Report) -> Outcome {
    let (_, node) = load(path)?;
    let lists = node.as_list_offset().ok_or_else(|| {
        CliError::new(
            exit::VALIDATION,
            format!(
                "LayoutError: expected list-offset of float64, found {}",
                node.kind()
            ),
        )
    })?;
    let total = path_length(lists)?;
    report.note(format!("sum: {total}"));
    report.metric("sum", total);
    Ok(())
}

pub struct DimuonArgs<'a> {
    pub path: Option<&'a Path>,
    pub gen: Option<usize>,
    pub seed: u64,
    pub bench: bool,
    pub out: Option<&'a Path>,
}

const BENCH_REPEATS: usize = 3;

fn best_of<T>(repeats: usize, mut f: impl FnMut() -> T) -> (T, f64) {
    let mut best = f64::INFINITY;
    let mut result = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let r = f();
        best = best.min(start.elapsed().as_secs_f64());
        result = Some(r);
    }
    (result.expect("at least one repeat"), best)
}

pub fn dimuon(args: DimuonArgs<'_>, report: &mut Report) -> Outcome {
    let batch = match (args.path, args.gen) {
        (Some(path), None) => {
            let (_, node) = load(path)?;
            EventBatch::try_from_node(&node)?
        }
        (None, Some(n)) => gen_events(n, args.seed),
        _ => {
            return Err(CliError::new(
                exit::FORMAT,
                "dimuon needs exactly one of PATH or --gen N",
            ))
        }
    };
    report.metric("events", batch.len() as f64);

    let repeats = if args.bench { BENCH_REPEATS } else { 1 };
    let (masses, columnar_s) = best_of(repeats, || invariant_mass(&batch));
    report.metric("selected", masses.len() as f64);

    if args.bench {
        let (rowwise, rowwise_s) = best_of(repeats, || invariant_mass_rowwise(&batch));
        report.metric("columnar_seconds", columnar_s);
        report.metric("rowwise_seconds", rowwise_s);
        report.metric("speedup", rowwise_s / columnar_s.max(f64::MIN_POSITIVE));
        let diff = max_relative_difference(&masses, &rowwise);
        if let Some(d) = diff {
            report.metric("max_relative_difference", d);
        }
        if diff.is_none_or(|d| d > 1e-12) {
            return Err(CliError::new(
                exit::MISMATCH,
                format!(
                    "columnar and row-wise selections differ ({} vs {} masses)",
                    masses.len(),
                    rowwise.len()
                ),
            ));
        }
    }

    if masses.len() <= 10 {
        let listed: Vec<String> = masses.iter().map(|m| m.to_string()).collect();
        report.note(format!("masses: [{}]", listed.join(", ")));
    }
    if let Some(out) = args.out {
        write_container(&to_buffers(&masses.into()), out)?;
        report.note(format!("wrote {}", out.display()));
    }
    Ok(())
}

/// `None` when the lengths differ.
fn max_relative_difference(a: &PrimitiveArray, b: &PrimitiveArray) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let xs = a.iter_as::<f64>()?;
    let ys = b.iter_as::<f64>()?;
    Some(
        xs.zip(ys)
            .map(|(x, y)| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max),
    )
}
