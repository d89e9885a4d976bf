use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rmarlin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmarlin"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("failed to launch rmarlin")
}

fn small_set(dir: &Path) {
    fs::write(
        dir.join("set.toml"),
        "k = 8\no = 2\nblock_size = 4096\n\n[[grid]]\nfamily = \"laplacian-residual\"\nfractions = [0.2, 0.5, 0.8]\n",
    )
    .unwrap();
    let out = rmarlin(&["build-dictset", "--config", "set.toml", "--out", "set.rmd"], dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.starts_with("index,source,shift,threshold,quotients,abr,eta"));
    assert_eq!(report.lines().count(), 4);
}

#[test]
fn compress_decompress_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_set(d);
    let data: Vec<u8> = (0..100_000u32)
        .map(|i| (i.wrapping_mul(2654435761) >> 29) as u8 ^ (i % 7) as u8)
        .collect();
    fs::write(d.join("in.bin"), &data).unwrap();
    let out = rmarlin(&["compress", "in.bin", "c.rmc", "--set", "set.rmd", "--serial"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = rmarlin(&["decompress", "c.rmc", "back.bin", "--set", "set.rmd"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(d.join("back.bin")).unwrap(), data);
}

#[test]
fn image_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_set(d);
    let (w, h) = (90usize, 70usize);
    let mut pgm = format!("P5\n# test\n{w} {h}\n255\n").into_bytes();
    pgm.extend((0..w * h).map(|i| ((i % w) / 3 + (i / w) * 2) as u8));
    fs::write(d.join("img.pgm"), &pgm).unwrap();
    assert!(
        rmarlin(&["compress", "img.pgm", "img.rmc", "--set", "set.rmd", "--image"], d)
            .status
            .success()
    );
    assert!(rmarlin(&["decompress", "img.rmc", "img2.pgm", "--set", "set.rmd"], d)
        .status
        .success());
    assert_eq!(fs::read(d.join("img2.pgm")).unwrap(), pgm);
}

#[test]
fn corrupt_input_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_set(d);
    fs::write(d.join("junk.rmc"), b"definitely not a container").unwrap();
    let out = rmarlin(&["decompress", "junk.rmc", "out.bin", "--set", "set.rmd"], d);
    assert_eq!(out.status.code(), Some(3));
    fs::write(d.join("junk.rmd"), b"RMDS\x01garbage").unwrap();
    let out = rmarlin(&["compress", "set.toml", "x.rmc", "--set", "junk.rmd"], d);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        rmarlin(&["build-dictset", "-k", "8", "-o", "9"], d).status.code(),
        Some(2)
    );
    assert_eq!(rmarlin(&["compress"], d).status.code(), Some(2));
    assert_eq!(rmarlin(&["no-such-command"], d).status.code(), Some(2));
}

#[test]
fn synthetic_study_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = rmarlin(
        &[
            "bench-synthetic",
            "--families",
            "laplacian",
            "--fractions",
            "0.5",
            "--sizes",
            "8",
            "--shifts",
            "1,2",
            "--sample-len",
            "200000",
            "--csv",
            "rows.csv",
        ],
        d,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(d.join("rows.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("family,entropy_fraction,dict_size"));
}
