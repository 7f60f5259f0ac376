mod common;

use std::fs;

use common::{hand_events, list_example, ragged, record_example, write};
use ragged::{ListOffsetArray, PrimitiveArray};
use tempfile::tempdir;

#[test]
fn inspect_reports_buffer_sizes() {
    let dir = tempdir().unwrap();
    write(&list_example(), dir.path());
    let run = ragged(["inspect".as_ref(), dir.path().as_os_str()]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(
        run.stdout.contains("buffer node0-offsets: 32 B"),
        "{}",
        run.stdout
    );
    assert!(
        run.stdout.contains("buffer node1-data: 40 B"),
        "{}",
        run.stdout
    );
    assert!(run.stdout.contains("length: 3"));
}

#[test]
fn inspect_empty_primitive() {
    let dir = tempdir().unwrap();
    write(&PrimitiveArray::from_values::<f64>(&[]).into(), dir.path());
    let run = ragged([
        "--json".as_ref(),
        "inspect".as_ref(),
        dir.path().as_os_str(),
    ]);
    assert_eq!(run.code, 0);
    assert_eq!(run.metric("length"), 0.0);
    assert_eq!(run.metric("buffer_bytes.node0-data"), 0.0);
}

#[test]
fn inspect_without_form_is_a_format_error() {
    let dir = tempdir().unwrap();
    write(&list_example(), dir.path());
    fs::remove_file(dir.path().join("form.json")).unwrap();
    let run = ragged(["inspect".as_ref(), dir.path().as_os_str()]);
    assert_eq!(run.code, 2, "{}", run.stderr);
}

#[test]
fn inspect_missing_directory_is_an_io_error() {
    let dir = tempdir().unwrap();
    let run = ragged(["inspect".as_ref(), dir.path().join("nope").as_os_str()]);
    assert_eq!(run.code, 1, "{}", run.stderr);
}

#[test]
fn validate_accepts_good_container() {
    let dir = tempdir().unwrap();
    write(&record_example(), dir.path());
    let run = ragged(["validate".as_ref(), dir.path().as_os_str()]);
    assert_eq!(run.code, 0, "{}", run.stderr);
}

#[test]
fn validate_rejects_decreasing_offsets() {
    let dir = tempdir().unwrap();
    write(&list_example(), dir.path());
    let bad: Vec<u8> = [0i64, 5, 3, 5]
        .iter()
        .flat_map(|o| o.to_le_bytes())
        .collect();
    fs::write(dir.path().join("buffers/node0-offsets"), bad).unwrap();
    let run = ragged(["validate".as_ref(), dir.path().as_os_str()]);
    assert_eq!(run.code, 3);
    assert!(run.stderr.contains("monotonic offsets"), "{}", run.stderr);
}

#[test]
fn validate_rejects_truncated_data() {
    let dir = tempdir().unwrap();
    write(&list_example(), dir.path());
    let path = dir.path().join("buffers/node1-data");
    let data = fs::read(&path).unwrap();
    fs::write(&path, &data[..32]).unwrap();
    let run = ragged(["validate".as_ref(), dir.path().as_os_str()]);
    assert_eq!(run.code, 3);
    assert!(run.stderr.contains("SizeError"), "{}", run.stderr);
}

#[test]
fn validate_missing_buffer_is_a_format_error() {
    let dir = tempdir().unwrap();
    write(&list_example(), dir.path());
    fs::remove_file(dir.path().join("buffers/node1-data")).unwrap();
    let run = ragged(["validate".as_ref(), dir.path().as_os_str()]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("node1-data"), "{}", run.stderr);
}

#[test]
fn roundtrip_copies_nothing() {
    let dir = tempdir().unwrap();
    let src = dir.path().join("in");
    let out = dir.path().join("out");
    write(&record_example(), &src);
    let run = ragged([
        "--json".as_ref(),
        "roundtrip".as_ref(),
        src.as_os_str(),
        "--out".as_ref(),
        out.as_os_str(),
    ]);
    assert_eq!(run.code, 0, "{}", run.stdout);
    assert_eq!(run.metric("bytes_copied"), 0.0);
    for name in [
        "form.json",
        "length.txt",
        "buffers/node1-data",
        "buffers/node2-data",
    ] {
        assert_eq!(
            fs::read(src.join(name)).unwrap(),
            fs::read(out.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn roundtrip_rejects_corrupt_input() {
    let dir = tempdir().unwrap();
    let src = dir.path().join("in");
    write(&list_example(), &src);
    fs::write(src.join("buffers/node0-offsets"), [0u8; 7]).unwrap();
    let run = ragged([
        "roundtrip".as_ref(),
        src.as_os_str(),
        "--out".as_ref(),
        dir.path().join("out").as_os_str(),
    ]);
    assert_eq!(run.code, 3, "{}", run.stderr);
}

#[test]
fn roundtrip_refuses_to_overwrite_input() {
    let dir = tempdir().unwrap();
    write(&list_example(), dir.path());
    let run = ragged([
        "roundtrip".as_ref(),
        dir.path().as_os_str(),
        "--out".as_ref(),
        dir.path().as_os_str(),
    ]);
    assert_eq!(run.code, 2);
    assert!(dir.path().join("buffers/node1-data").exists());
}

#[test]
fn sum_of_list_example() {
    let dir = tempdir().unwrap();
    write(&list_example(), dir.path());
    let run = ragged(["--json".as_ref(), "sum".as_ref(), dir.path().as_os_str()]);
    assert_eq!(run.code, 0);
    assert!((run.metric("sum") - 16.5).abs() <= 1e-9 * 16.5);
}

#[test]
fn sum_of_empty_lists_is_zero() {
    let dir = tempdir().unwrap();
    let empty =
        ListOffsetArray::try_new(&[0, 0, 0], PrimitiveArray::from_values::<f64>(&[])).unwrap();
    write(&empty.into(), dir.path());
    let run = ragged(["--json".as_ref(), "sum".as_ref(), dir.path().as_os_str()]);
    assert_eq!(run.code, 0);
    assert_eq!(run.metric("sum"), 0.0);
}

#[test]
fn sum_rejects_records() {
    let dir = tempdir().unwrap();
    write(&record_example(), dir.path());
    let run = ragged(["sum".as_ref(), dir.path().as_os_str()]);
    assert_eq!(run.code, 3);
    assert!(run.stderr.contains("LayoutError"), "{}", run.stderr);
}

#[test]
fn dimuon_hand_events() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("masses");
    write(&hand_events(), &dir.path().join("events"));
    let run = ragged([
        "--json".as_ref(),
        "dimuon".as_ref(),
        dir.path().join("events").as_os_str(),
        "--out".as_ref(),
        out.as_os_str(),
    ]);
    assert_eq!(run.code, 0, "{}", run.stdout);
    assert_eq!(run.metric("events"), 3.0);
    assert_eq!(run.metric("selected"), 1.0);
    assert!(
        run.diagnostics().contains("masses: [100]"),
        "{}",
        run.stdout
    );
    let masses = ragged::read_container(&out).unwrap().to_node().unwrap();
    assert_eq!(masses.to_list(), vec![100.0].into());
}

#[test]
fn dimuon_rejects_non_event_container() {
    let dir = tempdir().unwrap();
    write(&record_example(), dir.path());
    let run = ragged(["dimuon".as_ref(), dir.path().as_os_str()]);
    assert_eq!(run.code, 3);
    assert!(run.stderr.contains("nMuon"), "{}", run.stderr);
}

#[test]
fn dimuon_needs_one_source() {
    assert_eq!(ragged(["dimuon"]).code, 2);
    let dir = tempdir().unwrap();
    write(&hand_events(), dir.path());
    assert_eq!(
        ragged([
            "dimuon".as_ref(),
            dir.path().as_os_str(),
            "--gen".as_ref(),
            "5".as_ref()
        ])
        .code,
        2
    );
}

#[test]
fn bench_emits_numeric_json() {
    let run = ragged([
        "--json", "dimuon", "--gen", "2000", "--seed", "3", "--bench",
    ]);
    assert_eq!(run.code, 0, "{}", run.stdout);
    assert_eq!(run.stdout.trim().lines().count(), 1);
    let json = run.json();
    assert_eq!(json["command"], "dimuon");
    assert_eq!(json["status"], "ok");
    let metrics = json["metrics"].as_object().unwrap();
    for key in [
        "columnar_seconds",
        "rowwise_seconds",
        "speedup",
        "max_relative_difference",
        "events",
        "selected",
    ] {
        assert!(metrics[key].is_number(), "{key}");
    }
    assert!(metrics.values().all(|v| v.is_number()));
}

#[test]
fn failures_still_print_json() {
    let dir = tempdir().unwrap();
    let run = ragged([
        "--json".as_ref(),
        "validate".as_ref(),
        dir.path().as_os_str(),
    ]);
    assert_eq!(run.code, 2);
    let json = run.json();
    assert_eq!(json["status"], "error");
    assert!(!json["diagnostics"].as_array().unwrap().is_empty());
}
