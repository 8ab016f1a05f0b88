use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ecbin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecbin")).args(args).output().unwrap()
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn encode_decode_with_default_names() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sample.txt");
    std::fs::write(&input, b"AABCBACBBACCABACB").unwrap();
    assert!(ecbin(&["encode", s(&input)]).status.success());
    let packed = dir.path().join("sample.txt.ecb");
    assert!(packed.exists());
    std::fs::remove_file(&input).unwrap();
    assert!(ecbin(&["decode", s(&packed)]).status.success());
    assert_eq!(std::fs::read(&input).unwrap(), b"AABCBACBBACCABACB");
}

#[test]
fn stdout_output_and_explicit_order() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    std::fs::write(&input, b"AABCBACBBACCABACB").unwrap();
    let out = ecbin(&["encode", s(&input), "-o", "-", "--order", "explicit:C,A,B"]);
    assert!(out.status.success());
    assert_eq!(&out.stdout[..4], b"ECB1");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("plane_bits=29"), "{stderr}");

    let packed = dir.path().join("in.ecb");
    std::fs::write(&packed, &out.stdout).unwrap();
    let back = ecbin(&["decode", s(&packed), "-o", "-"]);
    assert!(back.status.success());
    assert_eq!(back.stdout, b"AABCBACBBACCABACB");
}

#[test]
fn degenerate_inputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (name, data) in [("empty", Vec::new()), ("single", vec![b'Z'; 1000])] {
        let input = dir.path().join(name);
        let packed = dir.path().join(format!("{name}.ecb"));
        let restored = dir.path().join(format!("{name}.out"));
        std::fs::write(&input, &data).unwrap();
        assert!(ecbin(&["encode", s(&input), "-o", s(&packed)]).status.success());
        assert!(ecbin(&["decode", s(&packed), "-o", s(&restored)]).status.success());
        assert_eq!(std::fs::read(&restored).unwrap(), data, "{name}");
    }
}

#[test]
fn error_exit_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing");
    assert_eq!(ecbin(&["encode", s(&missing)]).status.code(), Some(3));

    let input = dir.path().join("abc");
    std::fs::write(&input, b"abcabc").unwrap();
    let bad_order = ecbin(&["encode", s(&input), "--order", "explicit:a,b"]);
    assert_eq!(bad_order.status.code(), Some(4));

    let junk = dir.path().join("junk.ecb");
    std::fs::write(&junk, b"NOPE and more").unwrap();
    assert_eq!(ecbin(&["decode", s(&junk)]).status.code(), Some(5));

    let empty = dir.path().join("empty");
    std::fs::write(&empty, b"").unwrap();
    assert_eq!(ecbin(&["analyze", s(&empty)]).status.code(), Some(7));

    assert_eq!(ecbin(&["encode"]).status.code(), Some(2));
}

#[test]
fn tampered_payload_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("data");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let data: Vec<u8> = (0..50_000).map(|_| rng.gen_range(0..4u8)).collect();
    std::fs::write(&input, &data).unwrap();
    let packed = dir.path().join("data.ecb");
    assert!(ecbin(&["encode", s(&input), "-o", s(&packed)]).status.success());

    let mut bytes = std::fs::read(&packed).unwrap();
    let last = bytes.len() - 1;
    bytes.truncate(last);
    std::fs::write(&packed, &bytes).unwrap();
    let out = ecbin(&["decode", s(&packed), "-o", s(&dir.path().join("x"))]);
    assert!(!out.status.success());
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn analyze_reports_conservation() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("t");
    std::fs::write(&input, b"AABCBACBBACCABACB").unwrap();
    let out = ecbin(&["analyze", s(&input)]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let h = report["h_source"].as_f64().unwrap();
    assert!((h - 1.579_863_401_068_534_4).abs() < 1e-12);
    assert!(report["residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(report["plane_weights"].as_array().unwrap().len(), 2);

    let csv = ecbin(&["analyze", s(&input), "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("h_source,h_weighted_sum,residual,plane_weights,plane_entropies\n"));
}

#[test]
fn uniform_bytes_cost_close_to_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("uniform");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut data = vec![0u8; 1 << 20];
    rng.fill(&mut data[..]);
    std::fs::write(&input, &data).unwrap();
    let packed = dir.path().join("uniform.ecb");
    assert!(ecbin(&["encode", s(&input), "-o", s(&packed)]).status.success());
    let size = std::fs::metadata(&packed).unwrap().len() as f64;
    // Empirical entropy of 1 MiB uniform bytes is within a hair of 8 bits.
    assert!(size <= data.len() as f64 * 1.01 + 1024.0, "{size}");
}

#[test]
fn bench_emits_csv_rows() {
    let out = ecbin(&["bench", "--sizes", "4096", "--dist", "geometric:0.5", "--alphabet", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("scheme,distribution,size,bits_per_symbol,source_entropy,ratio"));
    let schemes: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert!(schemes.contains(&"ecb"));
    assert!(schemes.contains(&"unary"));
}
