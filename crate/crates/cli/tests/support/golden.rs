//! Golden cases: a command line, an optional file fed to standard input and
//! the expected output stored under `tests/golden/<name>.json`.

#![allow(dead_code)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub stdin: Option<&'static str>,
}

pub const CASES: &[Case] = &[
    Case {
        name: "sq_reduce_1_1",
        args: &["sq", "reduce", "Sq^1 Sq^1"],
        stdin: None,
    },
    Case {
        name: "sq_reduce_2_3",
        args: &["sq", "reduce", "Sq^2 Sq^3"],
        stdin: None,
    },
    Case {
        name: "sq_conjugate_6",
        args: &["sq", "conjugate", "6"],
        stdin: None,
    },
    Case {
        name: "sq_multiply",
        args: &["sq", "multiply", "Sq^2 + Sq^1 Sq^1", "Sq^2"],
        stdin: None,
    },
    Case {
        name: "conley_7_3_2",
        args: &[
            "conley",
            "must-vanish",
            "--n",
            "7",
            "--m",
            "3",
            "--j",
            "2",
            "--trace",
        ],
        stdin: None,
    },
    Case {
        name: "conley_8_3_2",
        args: &[
            "conley",
            "must-vanish",
            "--n",
            "8",
            "--m",
            "3",
            "--j",
            "2",
            "--trace",
        ],
        stdin: None,
    },
    Case {
        name: "conley_8_4_3",
        args: &[
            "conley",
            "must-vanish",
            "--n",
            "8",
            "--m",
            "4",
            "--j",
            "3",
            "--trace",
        ],
        stdin: None,
    },
    Case {
        name: "conley_admissible_7",
        args: &["conley", "admissible", "--n", "7", "--jmax", "6"],
        stdin: None,
    },
    Case {
        name: "build_cp2_algebra",
        args: &["build", "cp2-algebra"],
        stdin: None,
    },
    Case {
        name: "build_cp2_thom_r7",
        args: &["build", "cp2-thom-r7"],
        stdin: None,
    },
    Case {
        name: "build_cp2_cap",
        args: &["build", "cp2-cap"],
        stdin: None,
    },
    Case {
        name: "build_application_3",
        args: &["build", "application", "--k", "3"],
        stdin: None,
    },
    Case {
        name: "build_sphere_4",
        args: &["build", "sphere", "--r", "4"],
        stdin: None,
    },
    Case {
        name: "build_suspend_thom",
        args: &["build", "suspend", "--d", "2"],
        stdin: Some("golden/build_cp2_thom_r7.json"),
    },
    Case {
        name: "bound_steenrod_auto",
        args: &["bound", "steenrod", "--n", "7", "--auto"],
        stdin: Some("golden/build_application_3.json"),
    },
    Case {
        name: "bound_steenrod_bare",
        args: &["bound", "steenrod", "--n", "7", "--allowed", "none"],
        stdin: Some("golden/build_application_3.json"),
    },
    Case {
        name: "bound_verify",
        args: &[
            "bound",
            "verify",
            "--module",
            "golden/build_application_3.json",
        ],
        stdin: Some("golden/bound_steenrod_auto.json"),
    },
    Case {
        name: "bound_cup_cp2",
        args: &["bound", "cup", "--algebra", "golden/build_cp2_algebra.json"],
        stdin: None,
    },
    Case {
        name: "bound_cap_cp2",
        args: &["bound", "cap"],
        stdin: Some("golden/build_cp2_cap.json"),
    },
    Case {
        name: "bound_rank",
        args: &["bound", "rank"],
        stdin: Some("golden/build_application_3.json"),
    },
    Case {
        name: "morse_homology_circle",
        args: &["morse", "homology", "--complex", "data/circle.json"],
        stdin: None,
    },
    Case {
        name: "morse_les_cancel",
        args: &[
            "morse",
            "les",
            "--complex",
            "data/cancel.json",
            "--thresholds",
            "2,1",
        ],
        stdin: None,
    },
    Case {
        name: "morse_validate_bad",
        args: &["morse", "validate", "--complex", "data/bad_action.json"],
        stdin: None,
    },
];

pub fn tests_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub fn golden_path(name: &str) -> PathBuf {
    tests_dir().join("golden").join(format!("{name}.json"))
}

/// Runs the binary from `tests/` with the given arguments and input.
pub fn run(args: &[&str], stdin: Option<&[u8]>) -> (Vec<u8>, i32) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_floerbound"))
        .args(args)
        .current_dir(tests_dir())
        .env_remove("FLOERBOUND_MAX_DEGREE")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    let input = stdin.map(<[u8]>::to_vec).unwrap_or_default();
    child.stdin.take().unwrap().write_all(&input).unwrap();
    let out = child.wait_with_output().unwrap();
    (out.stdout, out.status.code().unwrap_or(-1))
}

pub fn run_case(case: &Case) -> (Vec<u8>, i32) {
    let input = case
        .stdin
        .map(|p| std::fs::read(tests_dir().join(p)).expect("golden input exists"));
    run(case.args, input.as_deref())
}
