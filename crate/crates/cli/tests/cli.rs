use std::path::PathBuf;
use std::process::{Command, Output};

fn selfsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selfsim"))
        .args(args)
        .output()
        .expect("run selfsim")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("selfsim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const ADDING: &str = "m 2\nstate a perm 2 1 to e a\ninit a\n";

#[test]
fn act_on_file_and_catalog() {
    let f = fixture("adding.aut", ADDING);
    let o = selfsim(&["act", "--aut", f.to_str().unwrap(), "2", "2", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1 1 2");
    let o = selfsim(&["act", "--aut", "catalog:adding:m=3", "3 3 1"]);
    assert_eq!(stdout(&o).trim(), "1 1 2");
}

#[test]
fn mul_inv_section_serialize() {
    let o = selfsim(&["inv", "--aut", "catalog:adding"]);
    assert_eq!(stdout(&o), "m 2\nstate q0 perm 2 1 to q0 e\ninit q0\n");
    let o = selfsim(&["section", "--aut", "catalog:double-adding", "2"]);
    assert!(stdout(&o).contains("perm 2 1 4 3 to e q0 e q0"));
    let o = selfsim(&["mul", "--aut", "catalog:adding", "--by", "catalog:adding"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("m 2\n"));
}

#[test]
fn states_of_family_member() {
    let o = selfsim(&["states", "--aut", "catalog:thm-c:index=4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("states 4\n"));
}

#[test]
fn orbits_and_factor() {
    let o = selfsim(&["orbits", "--aut", "catalog:double-adding"]);
    let s = stdout(&o);
    assert!(s.contains("orbits {1,2} {3,4}"));
    assert!(s.contains("orbit-type (2,2)"));
    let o = selfsim(&["factor", "--aut", "catalog:double-adding"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("factors 2"));
    assert!(stdout(&o).contains("PASS product of factors"));
}

#[test]
fn delta_close_counts() {
    let o = selfsim(&[
        "delta-close",
        "--aut",
        "catalog:double-adding",
        "--len",
        "2",
    ]);
    assert!(stdout(&o).starts_with("generators 7\n"));
}

#[test]
fn centralizer_against_brute_force() {
    let o = selfsim(&[
        "centralizer",
        "--aut",
        "catalog:adding",
        "--depth",
        "3",
        "--brute",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("order 8\n"));
    assert!(s.contains("PASS level-wise equals brute force"));
}

#[test]
fn conjugator_for_odd_power() {
    let o = selfsim(&[
        "conjugate",
        "--aut",
        "catalog:adding",
        "--power",
        "3",
        "--depth",
        "4",
    ]);
    assert!(stdout(&o).starts_with("conjugator "));
    let o = selfsim(&[
        "conjugate",
        "--aut",
        "catalog:adding",
        "--power",
        "2",
        "--depth",
        "3",
    ]);
    assert_eq!(stdout(&o).trim(), "absent at depth 3");
}

#[test]
fn verify_subcommands_pass() {
    for args in [
        &[
            "verify",
            "theorem-a",
            "--aut",
            "catalog:double-adding",
            "--depth",
            "3",
        ][..],
        &[
            "verify",
            "theorem-b",
            "--aut",
            "catalog:transposition",
            "--depth",
            "3",
        ],
        &[
            "verify",
            "prop-4-2",
            "--aut",
            "catalog:adding",
            "--depth",
            "3",
        ],
        &["verify", "t4", "--type", "2,2", "--exps", "1,-1,1,-1"],
        &["verify", "t4", "--type", "3,1", "--exps", "1,0,0,1"],
    ] {
        let o = selfsim(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}\n{}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL"));
    }
}

#[test]
fn gdata_subcommands() {
    let f = fixture("adding.gd", "rank 1\norbit 1 index 2\nH\n2\nf\n1/2\n");
    let p = f.to_str().unwrap();
    let s = stdout(&selfsim(&["gdata", "check", p]));
    assert!(s.contains("recurrent true"));
    assert!(s.contains("strongly recurrent true"));
    assert_eq!(
        stdout(&selfsim(&["gdata", "core", p])).trim(),
        "core trivial"
    );
    let s = stdout(&selfsim(&["gdata", "represent", p, "--depth", "2"]));
    assert!(s.contains("state q0 perm 2 1 to e q0"));
}

#[test]
fn catalog_list_and_show() {
    let s = stdout(&selfsim(&["catalog", "list"]));
    for name in [
        "adding",
        "double-adding",
        "multiplicity",
        "t4-cyclic",
        "thm-c",
    ] {
        assert!(
            s.lines().any(|l| l.starts_with(&format!("{name}\t"))),
            "{name}"
        );
    }
    let o = selfsim(&["catalog", "show", "adding:m=3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS self-similar"));
}

#[test]
fn dot_export() {
    let s = stdout(&selfsim(&["export-dot", "--aut", "catalog:double-adding"]));
    assert!(s.contains("n0 -> n0 [label=\"2|1,4|3\"]"));
    let s = stdout(&selfsim(&[
        "export-dot",
        "--aut",
        "catalog:double-adding",
        "--no-merge",
    ]));
    assert!(s.contains("n0 -> n0 [label=\"2|1\"]"));
    assert_eq!(s.matches("->").count(), 8);
}

#[test]
fn exit_codes() {
    let o = selfsim(&["act", "--aut", "/definitely/missing.aut", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = selfsim(&["act", "--aut", "catalog:adding", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let bad = fixture("bad.aut", "m 2\nstate a perm 1 1 to e a\ninit a\n");
    let o = selfsim(&["states", "--aut", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = selfsim(&["catalog", "show", "nonesuch"]);
    assert_eq!(o.status.code(), Some(2));
    let o = selfsim(&[
        "verify",
        "theorem-a",
        "--aut",
        "catalog:double-adding",
        "--depth",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn failing_assertion_exits_one() {
    // rooted (1 2) and (2 3) do not commute
    let f = fixture(
        "nonabelian.aut",
        "m 3\nstate a perm 2 1 3 to e e e\nstate b perm 1 3 2 to e e e\ninit a\ninit b\n",
    );
    let o = selfsim(&[
        "verify",
        "theorem-a",
        "--aut",
        f.to_str().unwrap(),
        "--depth",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL A abelian"));
}
