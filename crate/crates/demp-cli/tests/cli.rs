//! Command-line behavior: exit codes, diagnostics format, stdin piping,
//! registry overrides and the management filter.

use std::io::Write;
use std::process::{Command, Stdio};

const SAMPLE_PATH: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../demp-core/tests/data/sample_meeting.demp"
);

fn demp(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_demp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn demp_with_stdin(args: &[&str], stdin: &str) -> std::process::Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_demp"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().expect("binary finishes")
}

fn write_temp(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f
}

#[test]
fn validate_is_quiet_and_zero_on_a_clean_file() {
    let out = demp(&["validate", SAMPLE_PATH]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(out.stderr.is_empty());
}

#[test]
fn validate_reports_errors_with_severity_locator_message() {
    let f = write_temp("# meeting: bad\n1|A|x|INTRO/SOLa\n2|B|y|ACC/HYP9\n");
    let out = demp(&["validate", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("error:2:dangling reference"),
        "stderr: {stderr}"
    );
}

#[test]
fn parse_failures_exit_one_with_the_line_number() {
    let f = write_temp("# meeting: bad\n1|A|x|WAT/SOLa\n");
    let out = demp(&["validate", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
    assert!(stderr.contains("WAT"), "stderr: {stderr}");
}

#[test]
fn missing_files_and_bad_usage_exit_two() {
    assert_eq!(demp(&["validate", "no_such.demp"]).status.code(), Some(2));
    assert_eq!(
        demp(&["stats", "--by", "activity", SAMPLE_PATH]).status.code(),
        Some(2),
        "--level is required for activity stats"
    );
    assert_eq!(
        demp(&["--format", "csv", "qoc", SAMPLE_PATH]).status.code(),
        Some(2),
        "qoc has no csv form"
    );
    assert_eq!(demp(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn normalize_pipes_into_segment() {
    let text = std::fs::read_to_string(SAMPLE_PATH).unwrap();
    let normalized = demp(&["normalize", SAMPLE_PATH]);
    assert!(normalized.status.success());
    let direct = demp(&["segment", SAMPLE_PATH]);
    let piped = demp_with_stdin(
        &["segment", "-"],
        &String::from_utf8(normalized.stdout).unwrap(),
    );
    assert!(piped.status.success());
    assert_eq!(piped.stdout, direct.stdout);
    // the sample is already normalized, so normalize is the identity on it
    let again = demp(&["normalize", SAMPLE_PATH]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn normalize_inserts_the_implicit_introduction() {
    let f = write_temp("# meeting: m\n52|B|why|REQ/JUSTIF/SOLed\n");
    let out = demp(&["normalize", f.path().to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("52.0|--||INTRO/SOLed\n"), "got: {stdout}");
    // after the repair nothing is left to warn about
    assert!(out.stderr.is_empty());
}

#[test]
fn management_sequences_are_excluded_unless_requested() {
    let f = write_temp(
        "# meeting: m\n\
         1|A|plan the week|MAN/MEET\n\
         2|B|agreed|MAN/PROJ\n\
         3|A|the parser|INTRO/SOLa\n\
         4|B|looks fine|EVAL+/INTRO3\n",
    );
    let path = f.path().to_str().unwrap().to_string();
    let default = demp(&["stats", "--by", "level", &path]);
    assert!(default.status.success());
    let table = String::from_utf8(default.stdout).unwrap();
    assert!(table.contains("0,1,"), "management excluded: {table}");

    let with_man = demp(&["--include-management", "stats", "--by", "level", &path]);
    let table = String::from_utf8(with_man.stdout).unwrap();
    assert!(table.contains("0,2,"), "management included: {table}");
}

#[test]
fn registry_override_renames_criteria() {
    let reg = write_temp("a = Crash safety, content\n");
    let out = Command::new(env!("CARGO_BIN_EXE_demp"))
        .args(["--format", "json", "qoc", SAMPLE_PATH])
        .env("DEMP_REGISTRY", reg.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("Crash safety"), "got: {stdout}");
    assert!(!stdout.contains("Functionality"));

    // a registry without the fixture's letters makes parsing fail
    let empty = write_temp("b = Something, form\n");
    let out = Command::new(env!("CARGO_BIN_EXE_demp"))
        .args(["validate", SAMPLE_PATH])
        .env("DEMP_REGISTRY", empty.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn kappa_measures_disagreement_between_two_codings() {
    let original = std::fs::read_to_string(SAMPLE_PATH).unwrap();
    // the second coder read the hypothesis at 57 as information
    let second = original.replace("HYP/INTRO51", "INFO/INTRO51");
    let f = write_temp(&second);
    let out = demp(&["kappa", SAMPLE_PATH, f.path().to_str().unwrap()]);
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("n_items,11"), "implicit move excluded: {table}");
    let kappa_line = table
        .lines()
        .find(|l| l.starts_with("kappa,"))
        .expect("kappa row");
    let value: f64 = kappa_line.trim_start_matches("kappa,").parse().unwrap();
    assert!(value > 0.0 && value < 1.0, "kappa = {value}");
}

#[test]
fn qoc_out_dir_writes_one_file_per_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let out = demp(&[
        "--format",
        "dot",
        "qoc",
        "--out-dir",
        dir.path().to_str().unwrap(),
        SAMPLE_PATH,
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["qoc_seq1.dot", "qoc_seq2.dot"]);
    let body = std::fs::read_to_string(dir.path().join("qoc_seq2.dot")).unwrap();
    assert!(body.starts_with("digraph qoc_seq2 {"));
}

#[test]
fn stats_level_table_carries_the_hand_counted_rows() {
    let out = demp(&["stats", "--by", "level", SAMPLE_PATH]);
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    let counts: Vec<String> = table
        .lines()
        .skip(1)
        .take(4)
        .map(|l| l.split(',').take(2).collect::<Vec<_>>().join(","))
        .collect();
    assert_eq!(counts, ["0,2", "1,8", "2,1", "3,1"]);
}

#[test]
fn lsa_windowed_counts_mode() {
    let out = demp(&["lsa", "--window", "2", SAMPLE_PATH]);
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.starts_with("antecedent,consequent,count\n"));
    // INTRO .. SYNCH occurs at gap 2 in the first sequence stream
    assert!(table.contains("INTRO,SYNCH,2"), "got: {table}");
}

#[test]
fn empty_transcript_validates_cleanly() {
    let f = write_temp("# meeting: empty\n");
    let out = demp(&["validate", f.path().to_str().unwrap()]);
    assert!(out.status.success());
}
