use std::process::{Command, Output};

fn cwforest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cwforest"))
        .args(args)
        .env_remove("CWFOREST_PRECISION_BITS")
        .env_remove("CWFOREST_WORKERS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn row_prints_figure_row() {
    let o = cwforest(&["row", "--u", "1", "--v", "1", "--root", "1/1", "--depth", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1/4\n4/3\n3/5\n5/2\n2/5\n5/3\n3/4\n4/1\n");
}

#[test]
fn locate_reports_root_depth_path() {
    let o = cwforest(&["locate", "--u", "1", "--v", "1", "7/5", "--format", "csv"]);
    assert_eq!(stdout(&o), "value,root,depth,path\n7/5,1/1,4,RLLR\n");
}

#[test]
fn closed_form_suite_exits_zero() {
    let o = cwforest(&["check", "--suite", "closed-form-11", "--max-depth", "12"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn violation_exits_two() {
    let o = cwforest(&["check", "--suite", "mcount", "--variant", "paper", "--u", "1", "--v", "1", "--max-depth", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_input_exits_one() {
    for args in [
        &["cf", "1/0"][..],
        &["locate", "--u", "1", "--v", "0", "3"],
        &["cf", "--decode", "[0,0]"],
        &["nope"],
        &["row", "--u", "1", "--v", "1", "--root", "abc", "--depth", "1"],
    ] {
        let o = cwforest(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn every_subcommand_emits_json_and_csv() {
    let cases: [&[&str]; 9] = [
        &["row", "--u", "1", "--v", "2", "--root", "2", "--depth", "2"],
        &["stats", "--u", "1", "--v", "2", "--root", "2", "--depth", "4"],
        &["mean", "--u", "2", "--v", "1", "--root", "1", "--max-depth", "4", "--mode", "enclosure"],
        &["locate", "--u", "2", "--v", "3", "17/5"],
        &["descendant", "--u", "1", "--v", "1", "--ancestor", "1", "--query", "3/5"],
        &["cf", "43/30"],
        &["cflen-hist", "--u", "1", "--v", "2", "--root", "2", "--depth", "5", "--variant", "corrected"],
        &["converge", "--u", "1", "--v", "2", "--roots", "1,3/2,2", "--max-depth", "3"],
        &["decay", "--u", "1", "--v", "2", "--z1", "1", "--z2", "2", "--max-depth", "8"],
    ];
    for args in cases {
        let j = cwforest(&[args, &["--format", "json"]].concat());
        assert!(j.status.success(), "{args:?}");
        let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
        assert_eq!(v["schema_version"], 1, "{args:?}");

        let c = cwforest(&[args, &["--format", "csv"]].concat());
        assert!(c.status.success(), "{args:?}");
        let text = stdout(&c);
        assert!(text.ends_with('\n') && !text.contains('\r'));
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let width = rdr.headers().unwrap().len();
        for rec in rdr.records() {
            assert_eq!(rec.unwrap().len(), width, "{args:?}");
        }
    }
}

#[test]
fn exact_output_is_identical_across_workers() {
    let base = ["stats", "--u", "2", "--v", "3", "--root", "5/2", "--depth", "12", "--format", "json"];
    let outs: Vec<Vec<u8>> = ["1", "2", "8"]
        .iter()
        .map(|w| cwforest(&[&base[..], &["--workers", w]].concat()).stdout)
        .collect();
    assert!(outs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn flags_override_environment() {
    let base = ["stats", "--u", "1", "--v", "2", "--root", "2", "--depth", "3", "--mode", "enclosure", "--format", "json"];
    let run = |env: &str, extra: &[&str]| {
        let o = Command::new(env!("CARGO_BIN_EXE_cwforest"))
            .args(base)
            .args(extra)
            .env("CWFOREST_PRECISION_BITS", env)
            .output()
            .unwrap();
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["sum"]["precision_bits"].as_u64().unwrap()
    };
    assert_eq!(run("40", &[]), 40);
    assert_eq!(run("40", &["--precision", "72"]), 72);
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("cwforest-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("row.csv");
    let o = cwforest(&["row", "--u", "1", "--v", "1", "--root", "1", "--depth", "1", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, "index,value,cf,int_part,cf_length\n0,1/2,\"[0,2]\",0,1\n1,2/1,[2],2,0\n");
    std::fs::remove_dir_all(dir).unwrap();
}
