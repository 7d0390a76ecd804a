use std::path::Path;

use dynsched::alist::{parse_alist, write_alist};
use dynsched::base_graph::{parse_base_graph, write_base_graph};
use dynsched::config::{load_code, ConfigError, ExperimentConfig, SimArgs};
use dynsched_core::graph::BaseEntry;
use dynsched_core::{BaseGraph, CodeSpec, Granularity, LdpcCode, SchedulerKind, TannerGraph};
use proptest::prelude::*;

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn check_lists() -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
    (1usize..30, 1usize..15).prop_flat_map(|(n, m)| {
        let row = proptest::collection::btree_set(0..n, 0..=n.min(8)).prop_map(|s| s.into_iter().collect());
        (Just(n), proptest::collection::vec(row, m))
    })
}

proptest! {
    #[test]
    fn alist_round_trip((n, lists) in check_lists()) {
        let g = TannerGraph::from_check_lists(n, &lists).unwrap();
        let text = write_alist(&g);
        prop_assert_eq!(parse_alist(&text).unwrap(), g);
    }

    #[test]
    fn base_graph_round_trip(rows in 1usize..6, cols in 1usize..9, cells in proptest::collection::btree_map((0usize..6, 0usize..9), 0usize..400, 0..30)) {
        let entries: Vec<BaseEntry> = cells
            .into_iter()
            .filter(|&((r, c), _)| r < rows && c < cols)
            .map(|((row, col), shift)| BaseEntry { row, col, shift })
            .collect();
        let base = BaseGraph::new(rows, cols, entries).unwrap();
        prop_assert_eq!(parse_base_graph(&write_base_graph(&base)).unwrap(), base);
    }
}

#[test]
fn code_file_matches_builder() {
    let code = load_code(&data("small_bg1.toml")).unwrap();
    let direct = LdpcCode::from_spec(&CodeSpec::bg1(4, 8)).unwrap();
    assert_eq!(code.graph(), direct.graph());
    assert_eq!(code.roles(), direct.roles());
    let tiny = load_code(&data("tiny.toml")).unwrap();
    assert_eq!((tiny.graph().num_vars(), tiny.graph().num_checks()), (16, 8));
}

#[test]
fn base_graph_file_code() {
    let dir = tempfile::tempdir().unwrap();
    let base = dynsched_core::code::bg1(1);
    std::fs::write(dir.path().join("bg.txt"), write_base_graph(&base)).unwrap();
    std::fs::write(
        dir.path().join("code.toml"),
        "base = \"bg.txt\"\nlifting = 3\nbase_rows = 10\nshortened = 5\ntruncated = 4\n",
    )
    .unwrap();
    let code = load_code(&dir.path().join("code.toml")).unwrap();
    let spec = CodeSpec {
        shortened: 5,
        truncated: 4,
        ..CodeSpec::bg1(3, 10)
    };
    let want = LdpcCode::build(&base, &spec).unwrap();
    assert_eq!(code.graph(), want.graph());
    assert_eq!(code.blocklength(), 32 * 3 - 6 - 5 - 4);
}

#[test]
fn code_file_errors() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let unknown = write("a.toml", "base = \"bg1\"\nlifting = 4\ncolour = 1\n");
    assert!(matches!(load_code(&unknown), Err(ConfigError::Toml { .. })));
    let z17 = write("b.toml", "base = \"bg1\"\nlifting = 17\n");
    assert!(load_code(&z17).unwrap_err().to_string().contains("17"));
    let both = write("c.toml", "base = \"bg1\"\nalist = \"x\"\nlifting = 4\n");
    assert!(matches!(load_code(&both), Err(ConfigError::Invalid(_))));
    let bad_alist = write("d.alist", "2 1\n1 2\n1 1\n2\n1\n1\n1 3\n");
    let e = load_code(&write("e.toml", "alist = \"d.alist\"\n")).unwrap_err();
    assert!(e.to_string().contains("line 7"), "{e}");
    assert!(bad_alist.exists());
    assert!(matches!(
        load_code(&dir.path().join("missing.toml")),
        Err(ConfigError::Io { .. })
    ));
}

#[test]
fn flags_override_file_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    std::fs::write(
        &path,
        "code = \"codes/x.toml\"\nschedulers = [\"dyn-ebp\"]\nsnr_db = [-1.0, 0.5]\ntrials = 50\ngamma = 0.2\ngranularity = \"layer\"\n",
    )
    .unwrap();
    let args = SimArgs {
        config: Some(path.clone()),
        trials: Some(80),
        seed: Some(9),
        ..Default::default()
    };
    let cfg = args.resolve().unwrap();
    let defaults = ExperimentConfig::default();
    assert_eq!(cfg.code, Some(dir.path().join("codes/x.toml")));
    assert_eq!(cfg.schedulers, vec![SchedulerKind::DynEbp]);
    assert_eq!(cfg.snr_db, vec![-1.0, 0.5]);
    assert_eq!((cfg.trials, cfg.seed), (80, 9));
    assert_eq!(cfg.gamma, 0.2);
    assert_eq!(cfg.granularity, Granularity::Layer);
    assert_eq!(cfg.beta, defaults.beta);
    assert_eq!(cfg.stop_at_errors, 200);

    std::fs::write(&path, "trials = 5\nmax_iterations = 0\n").unwrap();
    assert!(args.resolve().is_err());
    std::fs::write(&path, "trails = 5\n").unwrap();
    assert!(matches!(args.resolve(), Err(ConfigError::Toml { .. })));
}
