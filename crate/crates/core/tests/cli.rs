use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn envcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_envcode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

#[test]
fn encode_decode_restores_the_list() {
    let dir = tempfile::tempdir().unwrap();
    let (input, packed) = (path(dir.path(), "in.txt"), path(dir.path(), "out.envc"));
    fs::write(&input, "3 1 4 1 5\n9 2 6 5 3 5\n\n 897932384 1\n").unwrap();
    for codec in [
        &["--alpha", "2", "--c-env", "1"][..],
        &["--codec", "adaptive", "--mu", "1.5"],
    ] {
        let mut args = vec!["encode"];
        args.extend_from_slice(codec);
        args.extend([input.as_str(), packed.as_str()]);
        assert!(envcode(&args).status.success());
        let out = envcode(&["decode", &packed]);
        assert!(out.status.success());
        assert_eq!(
            String::from_utf8(out.stdout).unwrap(),
            "3\n1\n4\n1\n5\n9\n2\n6\n5\n3\n5\n897932384\n1\n"
        );
    }
}

#[test]
fn binary_mode_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let (input, packed, restored) = (
        path(dir.path(), "in.u32"),
        path(dir.path(), "out.envc"),
        path(dir.path(), "back.u32"),
    );
    let raw: Vec<u8> = [7u32, 1, u32::MAX, 2, 2].iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(&input, &raw).unwrap();
    assert!(envcode(&["encode", "--binary", &input, &packed]).status.success());
    assert!(envcode(&["decode", "--binary", &packed, &restored]).status.success());
    assert_eq!(fs::read(&restored).unwrap(), raw);
}

#[test]
fn bounds_table_orders_lower_below_regret() {
    let out = envcode(&[
        "bounds",
        "--envelope",
        "powerlaw",
        "--alpha",
        "2",
        "--c-env",
        "4",
        "--n",
        "16384",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value = |name: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(name)).unwrap();
        line.split(',').nth(1).unwrap().parse().unwrap()
    };
    assert!(value("powerlaw_lower") <= value("regret_upper"));
    assert!(value("powerlaw_lower") <= value("powerlaw_upper"));
}

#[test]
fn bench_output_is_reproducible() {
    let args = [
        "bench", "--source", "zipf", "--alpha", "2", "--codec", "fixed", "--n", "16384", "--trials", "50", "--seed",
        "7",
    ];
    let first = envcode(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, envcode(&args).stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n,trials,mean_bits,std_bits,entropy_bits,mean_redundancy,bound_bits"
    );
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("16384,50,"));
}

#[test]
fn exit_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let missing = path(dir.path(), "missing");
    let garbage = path(dir.path(), "garbage.envc");
    fs::write(&garbage, b"ENVX\x01").unwrap();
    let zero = path(dir.path(), "zero.txt");
    fs::write(&zero, "1 0 2").unwrap();
    let out = path(dir.path(), "out.envc");

    assert_eq!(envcode(&["encode"]).status.code(), Some(1));
    assert_eq!(envcode(&["decode", &missing]).status.code(), Some(2));
    assert_eq!(envcode(&["decode", &garbage]).status.code(), Some(3));
    assert_eq!(envcode(&["encode", &zero, &out]).status.code(), Some(4));
    assert_eq!(envcode(&["encode", "--alpha", "1", &zero, &out]).status.code(), Some(4));
    assert_eq!(
        envcode(&["bench", "--source", "zipf", "--alpha", "0.9", "--n", "10"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(envcode(&["--help"]).status.code(), Some(0));
}
