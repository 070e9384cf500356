use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Duration;

use maxsat_cli::bench::{run_bench, BenchOptions, ComparisonTable, RunStatus, Timing, CSV_HEADER};
use maxsat_cli::generate::write_instances;
use maxsat_cli::solve::{self, read_instance, SolveOptions, EXIT_TIMEOUT, EXIT_UNSAT, EXIT_USAGE};
use maxsat_core::gen::{Family, GenSpec};
use maxsat_core::wcnf::parse_wcnf;
use maxsat_core::{solve, Algorithm, SolveStatus, SolverConfig};

fn benchmarks() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks")
}

fn example(name: &str) -> PathBuf {
    benchmarks().join("examples").join(format!("{name}.wcnf"))
}

fn maxsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxsat"))
        .args(args)
        .output()
        .expect("running maxsat")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Large enough that no strategy finishes within a second.
fn big_instance(dir: &Path) -> PathBuf {
    let spec = GenSpec {
        family: Family::WpMax3Sat,
        vars: 150,
        clauses: 1200,
        min_weight: 1,
        max_weight: 1000,
        hard_fraction: 0.0,
        seed: 3,
    };
    write_instances(&spec, 1, dir).unwrap().remove(0)
}

#[test]
fn linear_sat_prints_each_improvement() {
    let f = example("weighted-cycle");
    let o = maxsat(&["solve", "-a", "linear-sat", "-i", f.to_str().unwrap(), "--seed", "42"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().filter(|l| !l.starts_with('c')).collect();
    assert_eq!(&lines[..4], ["o 40", "o 30", "o 20", "s OPTIMUM FOUND"]);
    assert!(lines[4].starts_with("v "));
    assert_eq!(lines.len(), 5);
}

#[test]
fn v_line_is_a_model_of_the_reported_cost() {
    let f = example("wpm1-split");
    let o = maxsat(&["solve", "-a", "wpm2", "-i", f.to_str().unwrap()]);
    let out = stdout(&o);
    let v = out.lines().find(|l| l.starts_with("v ")).unwrap();
    let lits: Vec<i64> = v[2..].split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert_eq!(lits, [-1, 2, -3]);
    assert!(out.contains("o 4\n"));
}

#[test]
fn verify_appends_the_oracle_line() {
    let f = example("unit-cycle");
    let o = maxsat(&["solve", "-a", "cgbs", "-i", f.to_str().unwrap(), "--verify"]);
    assert_eq!(code(&o), 0);
    assert!(
        stdout(&o).ends_with("c verified against brute force\n"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn hard_contradiction_exits_20() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("unsat.wcnf");
    fs::write(&f, "p wcnf 1 3 9\n9 1 0\n9 -1 0\n1 1 0\n").unwrap();
    for a in Algorithm::ALL {
        let o = maxsat(&["solve", "-a", a.name(), "-i", f.to_str().unwrap()]);
        assert_eq!(code(&o), i32::from(EXIT_UNSAT), "{a}");
        assert!(stdout(&o).contains("s UNSATISFIABLE"), "{a}");
    }
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.wcnf");
    fs::write(&f, "p wcnf 2 1 5\n3 1 x 0\n").unwrap();
    let o = maxsat(&["solve", "-a", "wpm1", "-i", f.to_str().unwrap()]);
    assert_eq!(code(&o), i32::from(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let missing = dir.path().join("missing.wcnf");
    let o = maxsat(&["solve", "-a", "wpm1", "-i", missing.to_str().unwrap()]);
    assert_eq!(code(&o), i32::from(EXIT_USAGE));

    let weighted = example("weighted-cycle");
    let o = maxsat(&["solve", "-a", "fumalik", "-i", weighted.to_str().unwrap()]);
    assert_eq!(code(&o), i32::from(EXIT_USAGE));

    let o = maxsat(&["solve", "-a", "nope", "-i", weighted.to_str().unwrap()]);
    assert_eq!(code(&o), i32::from(EXIT_USAGE));
}

#[test]
fn timeout_reports_unknown_with_124() {
    let dir = tempfile::tempdir().unwrap();
    let f = big_instance(dir.path());
    for a in ["linear-sat", "wpm2"] {
        let start = std::time::Instant::now();
        let o = maxsat(&["solve", "-a", a, "-i", f.to_str().unwrap(), "--timeout", "1"]);
        assert_eq!(code(&o), i32::from(EXIT_TIMEOUT), "{a}: {}", stdout(&o));
        assert!(stdout(&o).contains("s UNKNOWN\n"), "{a}");
        assert!(start.elapsed() < Duration::from_secs(10), "{a} overran the deadline");
    }
}

#[test]
fn trace_flag_writes_the_iteration_log() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("run.trace");
    let f = example("weighted-cycle");
    let o = maxsat(&[
        "solve",
        "-a",
        "linear-unsat",
        "-i",
        f.to_str().unwrap(),
        "--trace",
        t.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let log = fs::read_to_string(&t).unwrap();
    let lbs: Vec<&str> = log
        .lines()
        .filter_map(|l| l.split_whitespace().find(|w| w.starts_with("lb=")))
        .collect();
    assert_eq!(lbs, ["lb=0", "lb=5", "lb=10", "lb=15", "lb=20", "lb=20"]);
}

#[test]
fn harness_cost_equals_library_cost() {
    let mut files: Vec<PathBuf> = fs::read_dir(benchmarks().join("examples"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.extend(
        fs::read_dir(benchmarks().join("wpmax3sat"))
            .unwrap()
            .map(|e| e.unwrap().path())
            .take(3),
    );
    files.sort();
    for f in &files {
        let inst = read_instance(f).unwrap();
        for a in Algorithm::ALL.into_iter().filter(|a| a.accepts(&inst)) {
            for seed in [0, 7] {
                let lib = solve(&inst, &SolverConfig::new(a).with_seed(seed)).unwrap();
                let mut opts = SolveOptions::new(a, f);
                opts.seed = seed;
                let cli = solve::run(&opts).unwrap();
                assert_eq!(cli.report, lib, "{a} on {}", f.display());
                let o = maxsat(&[
                    "solve",
                    "-a",
                    a.name(),
                    "-i",
                    f.to_str().unwrap(),
                    "--seed",
                    &seed.to_string(),
                ]);
                assert_eq!(stdout(&o), cli.text);
            }
        }
    }
}

fn write_family(root: &Path, count: u64) -> PathBuf {
    let mut spec = GenSpec::new(Family::WpMax2Sat, 10, 30);
    spec.seed = 7;
    let dir = root.join("wpmax2sat");
    write_instances(&spec, count, &dir).unwrap();
    dir
}

#[test]
fn bench_two_algorithms_one_family() {
    let root = tempfile::tempdir().unwrap();
    write_family(root.path(), 10);
    let csv = root.path().join("out.csv");
    let o = maxsat(&[
        "bench",
        "--dir",
        root.path().to_str().unwrap(),
        "--algorithms",
        "wpm1,bin",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert!(lines[1].starts_with("wpm1,wpmax2sat,10,10,100.0,"), "{text}");
    assert!(lines[3].starts_with("bin,wpmax2sat,10,10,100.0,"), "{text}");
    assert_eq!(lines.len(), 5, "two solvers, each with a family row and a total row");

    let table = stdout(&o);
    assert!(table.starts_with("Number of instances solved\n"));
    let header = table.lines().nth(1).unwrap();
    assert!(header.contains("wpmax2sat (10)"), "{header}");
    let rows: Vec<&str> = table.lines().skip(3).take_while(|l| !l.is_empty()).collect();
    assert_eq!(rows.len(), 2);
}

#[test]
fn all_timeouts_give_a_zero_row() {
    let root = tempfile::tempdir().unwrap();
    let dir = root.path().join("big");
    big_instance(&dir);
    let mut opts = BenchOptions::new(root.path(), vec![Algorithm::LinearSat]);
    opts.timeout = Duration::from_millis(5);
    let runs = run_bench(&opts).unwrap();
    assert!(runs.iter().all(|r| r.status == RunStatus::Timeout));
    let t = ComparisonTable::from_runs(&runs, &opts.algorithms, Timing::Wall);
    assert!(t.to_csv().contains("linear-sat,big,0,1,0.0,"));
    assert!(t.to_text().contains("0%"));

    // A strategy that refuses the whole family also scores zero.
    let runs = run_bench(&BenchOptions::new(
        benchmarks().join("wpmax2sat"),
        vec![Algorithm::FuMalik],
    ))
    .unwrap();
    assert!(runs.iter().all(|r| r.status == RunStatus::Error));
    let t = ComparisonTable::from_runs(&runs, &[Algorithm::FuMalik], Timing::None);
    assert!(t.to_csv().contains("fumalik,wpmax2sat,0,20,0.0,NA"));
}

#[test]
fn bench_rerun_is_byte_identical() {
    let root = tempfile::tempdir().unwrap();
    write_family(root.path(), 6);
    let run = |name: &str| {
        let csv = root.path().join(name);
        let o = maxsat(&[
            "bench",
            "--dir",
            root.path().to_str().unwrap(),
            "--algorithms",
            "all",
            "--timing",
            "none",
            "--seed",
            "3",
            "--csv",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        (fs::read(csv).unwrap(), o.stdout)
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn generate_is_stable_and_parseable() {
    let root = tempfile::tempdir().unwrap();
    let gen = |out: &Path, family: &str| {
        let o = maxsat(&[
            "generate",
            "--family",
            family,
            "--count",
            "10",
            "--vars",
            "10",
            "--clauses",
            "30",
            "--min-weight",
            "1",
            "--max-weight",
            "20",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
    };
    for family in ["wpmax2sat", "wpmax3sat"] {
        let (a, b) = (
            root.path().join(format!("{family}-a")),
            root.path().join(format!("{family}-b")),
        );
        gen(&a, family);
        gen(&b, family);
        let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert_eq!(names.len(), 10);
        let width = if family == "wpmax2sat" { 2 } else { 3 };
        for n in &names {
            let text = fs::read_to_string(a.join(n)).unwrap();
            assert_eq!(text, fs::read_to_string(b.join(n)).unwrap());
            let inst: maxsat_core::Instance = parse_wcnf(&text).unwrap();
            assert_eq!(inst.soft().len() + inst.hard().len(), 30);
            for c in inst.soft().iter().map(|s| &s.clause).chain(inst.hard()) {
                let mut vars: Vec<_> = c.lits().iter().map(|l| l.var()).collect();
                vars.sort();
                vars.dedup();
                assert_eq!(vars.len(), width);
            }
            assert!(inst.soft().iter().all(|s| (1..=20).contains(&s.weight)));
        }
    }
    let o = maxsat(&[
        "generate",
        "--family",
        "wpmax3sat",
        "--vars",
        "2",
        "--clauses",
        "4",
        "--out",
        "/tmp/x",
    ]);
    assert_eq!(code(&o), i32::from(EXIT_USAGE));
}

/// The generator settings behind `benchmarks/wpmax2sat` and
/// `benchmarks/wpmax3sat`.
fn shipped_specs() -> [GenSpec; 2] {
    let mut two = GenSpec::new(Family::WpMax2Sat, 16, 56);
    two.hard_fraction = 0.1;
    two.seed = 1;
    let mut three = GenSpec::new(Family::WpMax3Sat, 16, 72);
    three.hard_fraction = 0.1;
    three.seed = 2;
    [two, three]
}

#[test]
fn shipped_corpus_regenerates_identically() {
    let root = tempfile::tempdir().unwrap();
    for spec in shipped_specs() {
        let family = spec.family.name();
        let fresh = write_instances(&spec, 20, &root.path().join(family)).unwrap();
        let mut shipped: Vec<PathBuf> = fs::read_dir(benchmarks().join(family))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        shipped.sort();
        assert_eq!(shipped.len(), 20);
        for (a, b) in fresh.iter().zip(&shipped) {
            assert_eq!(a.file_name(), b.file_name());
            assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap(), "{}", b.display());
        }
    }
}

#[test]
fn generated_instances_agree_across_algorithms() {
    let mut spec = GenSpec::new(Family::WpMax3Sat, 10, 30);
    spec.seed = 7;
    spec.hard_fraction = 0.2;
    for inst in spec.instances(10).unwrap() {
        let costs: Vec<_> = Algorithm::ALL
            .into_iter()
            .filter(|a| a.accepts(&inst))
            .map(|a| solve(&inst, &SolverConfig::new(a)).unwrap())
            .map(|r| (r.status, r.cost))
            .collect();
        assert!(costs.windows(2).all(|p| p[0] == p[1]), "{costs:?}");
        assert_ne!(costs[0].0, SolveStatus::Timeout);
    }
}

/// Full trace logs of every applicable strategy on the example corpus,
/// checked against `benchmarks/golden`. Set `MAXSAT_BLESS=1` to rewrite.
#[test]
fn golden_traces() {
    let golden = benchmarks().join("golden");
    let bless = std::env::var_os("MAXSAT_BLESS").is_some();
    let mut files: Vec<PathBuf> = fs::read_dir(benchmarks().join("examples"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    for f in files {
        let inst = read_instance(&f).unwrap();
        let mut log = String::new();
        for a in Algorithm::ALL.into_iter().filter(|a| a.accepts(&inst)) {
            let r = solve(&inst, &SolverConfig::new(a)).unwrap();
            log.push_str(&r.trace_log());
        }
        let path = golden.join(f.file_stem().unwrap()).with_extension("trace");
        if bless {
            fs::create_dir_all(&golden).unwrap();
            fs::write(&path, &log).unwrap();
        } else {
            let want = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(log, want, "{}", path.display());
        }
    }
}
