use std::fs;

use matchkern::cli::run;

fn run_args(args: &[&str]) -> i32 {
    run(std::iter::once("matchkern").chain(args.iter().copied()))
}

#[test]
fn kernel_csv_has_unit_diagonal_and_index_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    let code = run_args(&[
        "kernel",
        "--n",
        "4",
        "--random",
        "5",
        "--seed",
        "1",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "index,0,1,2,3,4");
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[0], i.to_string());
        assert_eq!(cells[i + 1], "1");
    }
}

#[test]
fn kernel_reads_json_input_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("x.json");
    let out = dir.path().join("k.json");
    fs::write(&input, "[[[1,2],[3,4]], [[1,3],[2,4]]]").unwrap();
    let code = run_args(&[
        "kernel",
        "--n",
        "2",
        "--nu",
        "1.5",
        "--input",
        input.to_str().unwrap(),
        "--format",
        "json",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let m = doc["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 2);
    assert_eq!(m[0][1], m[1][0]);
}

#[test]
fn zsf_table_lists_every_distance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z.csv");
    assert_eq!(
        run_args(&[
            "zsf",
            "--n",
            "2",
            "--rho",
            "1,1",
            "--output",
            out.to_str().unwrap()
        ]),
        0
    );
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        "mu,fraction,value\n2,-1/2,-0.5\n1.1,1,1\n"
    );
}

#[test]
fn spectrum_and_error_tables() {
    let dir = tempfile::tempdir().unwrap();
    let spectrum = dir.path().join("s.csv");
    let err = dir.path().join("e.csv");
    assert_eq!(
        run_args(&["spectrum", "--n", "5", "--output", spectrum.to_str().unwrap()]),
        0
    );
    assert_eq!(fs::read_to_string(&spectrum).unwrap().lines().count(), 1 + 7);
    assert_eq!(
        run_args(&[
            "approx-error",
            "--n",
            "6",
            "--max-terms",
            "4",
            "--output",
            err.to_str().unwrap()
        ]),
        0
    );
    let text = fs::read_to_string(&err).unwrap();
    assert!(text.starts_with("terms,relative_error\n1,"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn tree_and_oracle_commands_report_success() {
    assert_eq!(
        run_args(&["tree", "encode", "--newick", "(((1,5),4),(3,2));"]),
        0
    );
    assert_eq!(
        run_args(&["tree", "decode", "--matching", "[[1,5],[2,3],[4,6],[7,8]]"]),
        0
    );
    assert_eq!(run_args(&["tree", "embed", "--newick", "((1,2),3);"]), 0);
    assert_eq!(
        run_args(&["tree", "nni-check", "--trials", "50", "--max-n", "8"]),
        0
    );
    assert_eq!(
        run_args(&["tree", "counterexample", "--prop", "6", "--n", "7"]),
        0
    );
    assert_eq!(
        run_args(&["tree", "counterexample", "--prop", "7", "--n", "9"]),
        0
    );
    assert_eq!(run_args(&["oracle", "--n", "3"]), 0);
    assert_ne!(run_args(&["tree", "encode", "--newick", "((1,1),2);"]), 0);
}

#[test]
fn bench_marks_skipped_backends() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let code = run_args(&[
        "bench",
        "--n-list",
        "3,7",
        "--backend-list",
        "zp,avg",
        "--matrix-size",
        "5",
        "--trials",
        "1",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("7,avg,0,,,,skipped"));
    assert!(text
        .lines()
        .any(|l| l.starts_with("7,zp,1,") && l.ends_with(",ok")));
}
