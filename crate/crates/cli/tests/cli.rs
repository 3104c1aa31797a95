use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64 as C;
use tempfile::tempdir;

use relmon_cli::cache::{cache_key, Cache};
use relmon_cli::config::{fixture_config, LoopSource, RunConfig, SchemeSource, Source};
use relmon_cli::report::{parse_report, ClassifyBody, MonodromyBody, PeriodsBody, Report};
use relmon_core::affine::{AffineElement, Presentation, UniMat2};
use relmon_core::fixtures::{iso_example, noniso_example, remark_presentation, FIXTURE_NAMES};
use relmon_core::lattice::IntVector;
use relmon_core::periods::{basic_loops, loop_monodromy, EngineConfig};
use relmon_core::search::Verdict;

fn relmon(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relmon"))
        .args(args)
        .current_dir(dir)
        .env_remove(relmon_cli::CACHE_ENV)
        .output()
        .expect("binary runs")
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

fn write_config(dir: &Path, cfg: &RunConfig) -> String {
    let p = dir.join("run.json");
    std::fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn fixtures_expand_to_the_library_definitions() {
    for name in FIXTURE_NAMES {
        let r = fixture_config(name).unwrap().resolve().unwrap();
        assert_eq!(r.name, name);
        match (name, r.source) {
            ("ISO-EXAMPLE", Source::Scheme(s)) => assert_eq!(s, iso_example()),
            ("NONISO-EXAMPLE", Source::Scheme(s)) => assert_eq!(s, noniso_example()),
            ("REMARK-FIXTURE", Source::Synthetic(p)) => assert_eq!(p, remark_presentation()),
            (n, s) => panic!("{n} resolved to {s:?}"),
        }
    }
    // a config may name a fixture in place of a scheme
    let cfg = RunConfig {
        scheme: Some(SchemeSource::Named("NONISO-EXAMPLE".into())),
        ..fixture_config("ISO-EXAMPLE").unwrap()
    };
    assert!(matches!(cfg.resolve().unwrap().source, Source::Scheme(s) if s == noniso_example()));
    assert!(fixture_config("NOPE").is_err());
}

#[test]
fn periods_table() {
    let d = tempdir().unwrap();
    let mut cfg = fixture_config("ISO-EXAMPLE").unwrap();
    cfg.lambdas = vec![C::new(0.5, 0.0), C::new(0.3, 0.2), C::new(0.3, 0.2)];
    let path = write_config(d.path(), &cfg);
    let out = relmon(d.path(), &["periods", "--config", &path, "--out", "o"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Report<PeriodsBody> = parse_report(&read(d.path().join("o/periods.json")), "periods").unwrap();
    let rows = &r.body.rows;
    assert_eq!(rows.len(), 6);
    // τ(1/2) = i; the quadrature oracle of the core tests agrees to 1e-15
    assert!((rows[0].tau.unwrap() - C::new(0.0, 1.0)).norm() < 1e-9);
    assert_eq!(serde_json::to_string(&rows[2]).unwrap(), serde_json::to_string(&rows[4]).unwrap());
    assert!(String::from_utf8_lossy(&out.stdout).contains("tau"));
}

#[test]
fn puncture_gives_an_error_row() {
    let d = tempdir().unwrap();
    let mut cfg = fixture_config("ISO-EXAMPLE").unwrap();
    cfg.lambdas = vec![C::new(0.0, 0.0), C::new(0.5, 0.0)];
    let path = write_config(d.path(), &cfg);
    let strict = relmon(d.path(), &["periods", "--config", &path, "--out", "o"]);
    assert!(!strict.status.success());
    let lenient = relmon(d.path(), &["periods", "--config", &path, "--out", "o", "--keep-going"]);
    assert!(lenient.status.success());
    let r: Report<PeriodsBody> = parse_report(&read(d.path().join("o/periods.json")), "periods").unwrap();
    assert!(r.body.rows[0].error.is_some() && r.body.rows[0].tau.is_none());
    assert!(r.body.rows[2].error.is_none());
}

#[test]
fn synthetic_fixture_is_emitted_as_configured() {
    let d = tempdir().unwrap();
    let out = relmon(d.path(), &["monodromy", "--fixture", "REMARK-FIXTURE", "--out", "o"]);
    assert!(out.status.success());
    let r: Report<MonodromyBody> = parse_report(&read(d.path().join("o/monodromy.json")), "monodromy").unwrap();
    assert_eq!(r.body.presentation, remark_presentation());
    assert_eq!(r.schema, "relmon-report");
    assert_eq!(r.version, 1);
}

#[test]
fn automatic_loops_have_level_two_blocks_and_warm_cache_is_identical() {
    let d = tempdir().unwrap();
    let cold = relmon(d.path(), &["monodromy", "--fixture", "ISO-EXAMPLE", "--out", "a", "--cache", "c"]);
    assert!(cold.status.success());
    assert!(String::from_utf8_lossy(&cold.stderr).contains("0 hits, 13 misses"));
    let warm = relmon(d.path(), &["monodromy", "--fixture", "ISO-EXAMPLE", "--out", "b", "--cache", "c"]);
    assert!(String::from_utf8_lossy(&warm.stderr).contains("13 hits, 0 misses"));
    let (a, b) = (read(d.path().join("a/monodromy.json")), read(d.path().join("b/monodromy.json")));
    assert_eq!(a, b);
    assert_eq!(cold.stdout, warm.stdout);
    // and identical to a run without any cache
    relmon(d.path(), &["monodromy", "--fixture", "ISO-EXAMPLE", "--out", "n"]);
    assert_eq!(a, read(d.path().join("n/monodromy.json")));

    let r: Report<MonodromyBody> = parse_report(&a, "monodromy").unwrap();
    assert_eq!(r.body.presentation.len(), 13);
    for g in r.body.presentation.generators() {
        assert!(g.element.blocks().iter().all(|b| b.is_identity_mod(2)), "{}", g.name);
    }
}

#[test]
fn cache_environment_variable_wins() {
    let d = tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_relmon"))
        .args(["monodromy", "--fixture", "NONISO-EXAMPLE", "--out", "o", "--cache", "flag"])
        .current_dir(d.path())
        .env(relmon_cli::CACHE_ENV, d.path().join("env"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(std::fs::read_dir(d.path().join("env")).unwrap().count(), 9);
    assert!(!d.path().join("flag").exists());
}

#[test]
fn cache_keys_cover_tolerances_and_hits_are_exact() {
    let d = tempdir().unwrap();
    let scheme = iso_example();
    let cfg = EngineConfig::default();
    let basic = basic_loops(&scheme, &cfg).unwrap();
    let path = basic.iter().find(|l| l.name.contains("(1)")).unwrap();
    let tighter = EngineConfig {
        extraction_tolerance: 1e-8,
        ..cfg.clone()
    };
    assert_ne!(cache_key(&scheme, path, &cfg), cache_key(&scheme, path, &tighter));
    let renamed = relmon_core::periods::LoopPath {
        name: "other".into(),
        ..path.clone()
    };
    assert_eq!(cache_key(&scheme, path, &cfg), cache_key(&scheme, &renamed, &cfg));

    // the circuit around 1 closes on the section cover
    let cache = Cache::new(Some(d.path().to_path_buf())).unwrap();
    let first = cache.get_or_compute(&scheme, path, &cfg, || loop_monodromy(path, &scheme, &cfg)).unwrap();
    let second = cache.get_or_compute(&scheme, path, &cfg, || panic!("should hit")).unwrap();
    assert_eq!(first, second);
    assert_eq!(cache.stats(), (1, 1));
}

#[test]
fn classify_verdicts_and_exit_codes() {
    let d = tempdir().unwrap();
    for (name, expect) in [
        ("ISO-EXAMPLE", Verdict::Rank4Independent),
        ("NONISO-EXAMPLE", Verdict::Rank4Independent),
        ("REMARK-FIXTURE", Verdict::TorsionLike),
    ] {
        let out = relmon(d.path(), &["classify", "--fixture", name, "--out", name]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let r: Report<ClassifyBody> = parse_report(&read(d.path().join(name).join("classification.json")), "classify").unwrap();
        assert_eq!(r.body.report.verdict, expect, "{name}");
        if name == "REMARK-FIXTURE" {
            assert_eq!(r.body.report.depth_used, 12);
            assert!(r.body.report.caveats.iter().any(|c| c == "kernel search found nothing; consistent with trivial kernel"));
        }
        assert!(d.path().join(name).join("classification.txt").exists());
    }

    // an inconclusive verdict is still a successful run
    let t = UniMat2::identity();
    let mut p = Presentation::new(2);
    p.push("e", AffineElement::new(vec![t.clone(), t], IntVector::from_i64s(&[1, 0, 0, 0])).unwrap(), "").unwrap();
    let cfg = RunConfig {
        name: "rank-one".into(),
        scheme: None,
        presentation: Some(p),
        ..fixture_config("REMARK-FIXTURE").unwrap()
    };
    let path = write_config(d.path(), &cfg);
    let out = relmon(d.path(), &["classify", "--config", &path, "--out", "i", "--depth", "3"]);
    assert!(out.status.success());
    let r: Report<ClassifyBody> = parse_report(&read(d.path().join("i/classification.json")), "classify").unwrap();
    assert_eq!(r.body.report.verdict, Verdict::Inconclusive);

    // operational failures are not
    assert!(!relmon(d.path(), &["classify", "--fixture", "NOPE"]).status.success());
    assert!(!relmon(d.path(), &["classify", "--fixture", "ISO-EXAMPLE", "--prime", "4"]).status.success());
    assert!(!relmon(d.path(), &["classify"]).status.success());
}

#[test]
fn extraction_failure_names_the_loop() {
    let d = tempdir().unwrap();
    let scheme = iso_example();
    let basic = basic_loops(&scheme, &EngineConfig::default()).unwrap();
    // the circuit around 2 swaps the sheets of the section cover
    let open = basic.iter().find(|l| l.name.contains("(2)")).unwrap().clone();
    let closed = basic.iter().find(|l| l.name.contains("(1)")).unwrap().clone();
    let name = open.name.clone();
    let mut cfg = fixture_config("ISO-EXAMPLE").unwrap();
    cfg.loops = LoopSource::Explicit(vec![closed, open]);
    let path = write_config(d.path(), &cfg);
    let strict = relmon(d.path(), &["monodromy", "--config", &path, "--out", "o"]);
    assert!(!strict.status.success());
    assert!(String::from_utf8_lossy(&strict.stderr).contains(&name));

    let lenient = relmon(d.path(), &["classify", "--config", &path, "--out", "o", "--keep-going", "--depth", "2"]);
    assert!(lenient.status.success(), "{}", String::from_utf8_lossy(&lenient.stderr));
    let r: Report<ClassifyBody> = parse_report(&read(d.path().join("o/classification.json")), "classify").unwrap();
    assert_eq!(r.body.dropped_loops, vec![name]);
    assert_eq!(r.body.presentation.len(), 1);
}

#[test]
fn plots() {
    let d = tempdir().unwrap();
    let missing = relmon(d.path(), &["plot", "--fixture", "ISO-EXAMPLE", "--out", "o"]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing results"));

    relmon(d.path(), &["classify", "--fixture", "ISO-EXAMPLE", "--out", "o", "--depth", "4"]);
    assert!(relmon(d.path(), &["plot", "--fixture", "ISO-EXAMPLE", "--out", "o"]).status.success());
    let first = read(d.path().join("o/lambda-plane.svg"));
    for mark in [">0<", ">1<", ">2<", ">-1<"] {
        assert!(first.contains(mark), "figure lacks {mark}");
    }
    assert_eq!(first.matches("<polyline").count(), 13);
    assert!(read(d.path().join("o/translations.svg")).contains("factor 2 translations"));
    relmon(d.path(), &["plot", "--fixture", "ISO-EXAMPLE", "--out", "o"]);
    assert_eq!(first, read(d.path().join("o/lambda-plane.svg")));

    // no loops: punctures only
    let mut cfg = fixture_config("NONISO-EXAMPLE").unwrap();
    cfg.loops = LoopSource::Explicit(Vec::new());
    let path = write_config(d.path(), &cfg);
    assert!(relmon(d.path(), &["monodromy", "--config", &path, "--out", "p"]).status.success());
    assert!(relmon(d.path(), &["plot", "--config", &path, "--out", "p"]).status.success());
    let svg = read(d.path().join("p/lambda-plane.svg"));
    assert_eq!(svg.matches("<polyline").count(), 0);
    assert_eq!(svg.matches("<circle").count(), 3);
}
