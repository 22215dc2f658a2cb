use std::path::PathBuf;

use tower_bubbles::cli::{main_with_args, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("btl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn btl(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("btl").chain(args.iter().copied()))
}

fn run_to(args: &[&str], name: &str) -> (i32, String) {
    let path = scratch(name);
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--out", &p]);
    let code = btl(&all);
    (code, std::fs::read_to_string(&path).unwrap_or_default())
}

#[test]
fn exit_codes() {
    assert_eq!(
        run_to(&["params", "--k", "3", "--p", "150"], "ok.json").0,
        EXIT_OK
    );
    assert_eq!(
        run_to(&["params", "--k", "3", "--p", "100"], "fail.json").0,
        EXIT_CHECK_FAILED
    );
    assert_eq!(btl(&["params", "--k", "0"]), EXIT_USAGE);
    assert_eq!(btl(&["bogus"]), EXIT_USAGE);
    assert_eq!(btl(&["params", "--eta", "2"]), EXIT_USAGE);
    assert_eq!(
        btl(&["params", "--config", "/nonexistent/btl.conf"]),
        EXIT_USAGE
    );
}

#[test]
fn json_is_deterministic() {
    let args = ["matrix", "--k", "3", "--p", "120"];
    let (c1, a) = run_to(&args, "det1.json");
    let (c2, b) = run_to(&args, "det2.json");
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["command"], "matrix");
}

#[test]
fn flags_override_config_file() {
    let conf = scratch("btl.conf");
    std::fs::write(&conf, "k = 1\np = 150\nformat = csv\n").unwrap();
    let c = conf.to_str().unwrap();
    let (code, text) = run_to(&["params", "--config", c, "--k", "2"], "override.csv");
    assert_eq!(code, EXIT_OK);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3, "{text}");
    let (_, text) = run_to(&["params", "--config", c], "plain.csv");
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn csv_headers() {
    let cases = [
        (
            vec!["params", "--k", "2", "--p", "150"],
            "j,alpha_j,s_j,eps_j,b_j,ln_delta_j,tau_j,ln_C_j",
        ),
        (
            vec!["profiles", "--alpha", "2", "--grid", "32"],
            "r,w0,w1,V,z",
        ),
        (
            vec!["residual", "--k", "1", "--p-list", "40,80", "--grid", "64"],
            "p,j,ln_r,U_p,rhoR_p",
        ),
        (
            vec!["integrals", "--alpha", "2"],
            "name,alpha,quadrature,closed_form,abs_err,rel_err,pass",
        ),
    ];
    for (i, (args, header)) in cases.into_iter().enumerate() {
        let mut a = args.clone();
        a.extend(["--format", "csv"]);
        let (_, text) = run_to(&a, &format!("h{i}.csv"));
        assert_eq!(text.lines().next(), Some(header), "{args:?}");
    }
}
