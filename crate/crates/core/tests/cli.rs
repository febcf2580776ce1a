//! The `dvc` binary: determinism, CSV provenance and exit codes.

use std::path::Path;
use std::process::Command;

fn dvc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dvc")).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let out = dvc(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    run_ok(&["construct", "--n", "16", "--out", s(&a)]);
    run_ok(&["construct", "--n", "16", "--out", s(&b)]);
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("16 0.001 0.0001 16\n"));
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn encode_decode_and_bd() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let video = ["--width", "32", "--height", "16", "--frames", "5", "--list-size", "4"];
    let mut enc = vec!["encode", "--gop", "4", "--f", "3", "--out"];
    let stream = d.join("s.json");
    enc.push(s(&stream));
    enc.extend_from_slice(&video);
    run_ok(&enc);
    let (out1, out2, csv) = (d.join("a.y4m"), d.join("b.yuv"), d.join("frames.csv"));
    run_ok(&["decode", "--stream", s(&stream), "--out", s(&out1), "--synthetic-reference", "--frames-csv", s(&csv), "--transcript", s(&d.join("transcript.csv"))]);
    run_ok(&["decode", "--stream", s(&stream), "--out", s(&out2)]);
    // Y4M and raw outputs carry the same luma.
    let y4m = polar_dvc::wz::read_y4m(&out1).unwrap();
    assert_eq!(y4m, polar_dvc::wz::read_raw(&out2, 32, 16, None).unwrap());
    let transcript = std::fs::read_to_string(d.join("transcript.csv")).unwrap();
    assert!(transcript.starts_with("band,level,chunks_requested,bits_sent,crc_pass,terminal_method\n"));
    assert!(transcript.lines().count() > 1);
    let frames_csv = std::fs::read_to_string(&csv).unwrap();
    assert!(frames_csv.starts_with("# dvc "));
    assert!(frames_csv.contains("\n# config {"));
    assert!(frames_csv.contains("frame,type,rate_bits,psnr_db,decode_seconds\n0,key,0,99.0000,"));

    let rd = d.join("rd.csv");
    let mut sweep = vec!["rd-sweep", "--f", "0,3,5,7", "--codec", "ldpca", "--out", s(&rd)];
    sweep.extend_from_slice(&video);
    run_ok(&sweep);
    let rd_text = std::fs::read_to_string(&rd).unwrap();
    assert_eq!(rd_text.lines().filter(|l| !l.starts_with('#')).count(), 5);
    assert_eq!(run_ok(&["bd", s(&rd), s(&rd)]).trim(), "0.000000");
    // Same flags again: bit-identical rows apart from timing.
    let rd2 = d.join("rd2.csv");
    let i = sweep.iter().position(|a| *a == s(&rd)).unwrap();
    sweep[i] = s(&rd2);
    run_ok(&sweep);
    let strip = |t: &str| -> Vec<String> {
        t.lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f.remove(9);
                f.join(",")
            })
            .collect()
    };
    assert_eq!(strip(&rd_text), strip(&std::fs::read_to_string(&rd2).unwrap()));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(dvc(&["encode", "--gop", "3", "--out", s(&d.join("x"))]).status.code(), Some(2));
    assert_eq!(dvc(&["swsim", "--codec", "turbo"]).status.code(), Some(2));
    assert_eq!(dvc(&["decode", "--stream", s(&d.join("missing.json")), "--out", s(&d.join("o"))]).status.code(), Some(3));
    let bad = d.join("bad.csv");
    std::fs::write(&bad, "rate_kbps,psnr_db\n1,30\n2,31\n").unwrap();
    assert_eq!(dvc(&["bd", s(&bad), s(&bad)]).status.code(), Some(2));
    std::fs::write(&bad, "rate_kbps,psnr_db\n1,x\n").unwrap();
    assert_eq!(dvc(&["bd", s(&bad), s(&bad)]).status.code(), Some(3));
    // A stream whose syndrome was truncated cannot be decoded.
    let stream = d.join("s.json");
    run_ok(&["encode", "--width", "16", "--height", "16", "--frames", "3", "--f", "0", "--codec", "ldpca", "--out", s(&stream)]);
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&stream).unwrap()).unwrap();
    v["wz"][0]["bands"][0]["encoding"]["planes"] = serde_json::json!([]);
    std::fs::write(&stream, v.to_string()).unwrap();
    assert_eq!(dvc(&["decode", "--stream", s(&stream), "--out", s(&d.join("o.yuv"))]).status.code(), Some(4));
}
