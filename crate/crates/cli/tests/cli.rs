use std::process::{Command, Output};

fn dtlf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtlf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn corpus(name: &str) -> String {
    format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn entail_verdicts_and_exit_codes() {
    let o = dtlf(&["entail", r"Bool ; <tt> /\ <ff> ; false"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ENTAILS"));

    let o = dtlf(&["entail", "Bool ; true ; <tt>"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("NOT-ENTAILS"));

    let o = dtlf(&["entail", r"Bool->Bool ; true -o (<tt> \/ <ff>) ; (true -o <tt>) \/ (true -o <ff>)"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn consistency() {
    let o = dtlf(&["consistent", "Bool ; <tt>"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "CONSISTENT d=(atom tt)");

    let o = dtlf(&["consistent", "Bool ; false"]);
    assert_eq!((o.status.code(), stdout(&o).trim().to_string()), (Some(1), "INCONSISTENT".into()));

    let o = dtlf(&["consistent", r"Bool->Bool ; (<tt> -o <ff>) /\ (true -o <tt>)"]);
    assert_eq!(o.status.code(), Some(1));

    // a disjunction is not conjunctive
    let o = dtlf(&["consistent", r"Bool ; <tt> \/ <ff>"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_examples() {
    let o = dtlf(&["eval", "fix x.x : Bool", "--fuel", "4"]);
    assert_eq!(stdout(&o).trim(), "(bot)");

    let o = dtlf(&["eval", "hd (tt :: fix s. ff :: s)", "--fuel", "4"]);
    assert_eq!(stdout(&o).trim(), "(atom tt)");

    let o = dtlf(&["eval", "fix s. tt :: s : Stream Bool", "--fuel", "3"]);
    assert_eq!(
        stdout(&o).trim(),
        "(fold (pair (atom tt) (fold (pair (atom tt) (fold (pair (atom tt) (bot)))))))"
    );

    let o = dtlf(&["eval", "hd ((tt :: fix s. ff :: s) : Stream Bool)", "--member", "<tt>"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("holds"));
}

#[test]
fn check_files_and_inline_judgments() {
    let o = dtlf(&["check", "⊢ tt : {Bool|<ff>}"]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("UNKNOWN") && s.contains("UNSOUND"), "{s}");

    let o = dtlf(&["check", &corpus("map.dtlf"), "--brief"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("4/4 derivable"));

    let o = dtlf(&["check", &corpus("filter.dtlf"), "--k", "1", "--brief"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = dtlf(&["check", &corpus("bft.dtlf"), "--k", "1", "--brief"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn oracle_sweeps_agree() {
    let o = dtlf(&["oracle", "--sweep", "Bool", "--size", "6", "--rank", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let last = stdout(&o).lines().last().unwrap_or_default().to_string();
    let (a, b) = last.trim_start_matches("agree: ").split_once('/').expect("agree line");
    assert_eq!(a, b);

    let o = dtlf(&["oracle", "Bool ; true ; <tt>"]);
    assert_eq!((o.status.code(), stdout(&o).contains("agree: 1/1")), (Some(0), true));

    let o = dtlf(&["oracle", "--sweep", "Bool", "--rank", "9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_is_deterministic() {
    let args = ["corpus", "--json", "map", "diag"];
    let a = dtlf(&args);
    let b = dtlf(&["--json", "corpus", "--sequential", "map", "diag"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).expect("valid json");
    assert_eq!(v["derivable"], 6);
    assert_eq!(v["judgments"][0]["verdict"], "derivable");
}

#[test]
fn malformed_input_exits_with_2() {
    for args in [
        &["entail", "Bool ; <tt"][..],
        &["entail", "Bool ; <tt>"],
        &["entail", "Bool ; <zz> ; true"],
        &["compile", "Stream Bool ; <tt>"],
        &["eval", "x y"],
        &["eval", ")("],
        &["check", "/nonexistent/file.dtlf"],
        &["check", "|- tt : Bool -> Bool"],
        &["corpus", "nosuchfile"],
        &["oracle"],
        &["frobnicate"],
        &["entail", "Bool ; true ; true", "--bases", "/nonexistent/bases"],
    ] {
        let o = dtlf(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn base_declarations() {
    let dir = std::env::temp_dir().join(format!("dtlf-bases-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("bases.txt");
    std::fs::write(&p, "base Color = red green blue\n").unwrap();
    let p = p.to_str().unwrap();
    let o = dtlf(&["--bases", p, "consistent", r"Color ; <red> /\ <blue>"]);
    assert_eq!(o.status.code(), Some(1));
    let o = dtlf(&["--bases", p, "entail", r"Color ; <red> ; <red> \/ <green>"]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).ok();
}
