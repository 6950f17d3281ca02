use fisher_bench::fmat::{self, FmatMatrix};
use fisher_bench::run_cli;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("fisher-solve").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn bench_prints_header_and_one_row() {
    let (code, out, err) = run(&[
        "bench", "--method", "chol", "--n", "16", "--m", "2000", "--lambda", "1e-3", "--seed", "0",
        "--repeats", "3", "--warmup", "1",
    ]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "method,n,m,lambda,seed,repeats,median_s,min_s,rel_residual,status");
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&cols[..6], &["chol", "16", "2000", "0.001", "0", "3"]);
    assert_eq!(cols[9], "ok");
}

#[test]
fn bench_csv_is_stable_outside_timing_columns() {
    let args = [
        "bench", "--method", "chol,eigh,cg", "--n", "4", "--m", "40", "--seed", "9", "--repeats",
        "1", "--warmup", "0",
    ];
    let strip = |s: String| -> Vec<String> {
        s.lines()
            .map(|l| {
                let mut c: Vec<&str> = l.split(',').collect();
                if c.len() == 10 && c[0] != "method" {
                    c[6] = "";
                    c[7] = "";
                }
                c.join(",")
            })
            .collect()
    };
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.0, 0);
    assert_eq!(strip(a.1), strip(b.1));
}

#[test]
fn bench_complex_realpart_and_refusal() {
    let (code, out, _) = run(&[
        "bench", "--method", "chol,naive", "--n", "3", "--m", "30", "--kind", "complex",
        "--variant", "realpart", "--repeats", "1",
    ]);
    assert_eq!(code, 0);
    assert!(out.lines().skip(1).all(|l| l.ends_with(",ok")), "{out}");

    let (code, out, _) =
        run(&["bench", "--method", "naive", "--n", "1", "--m", "5000", "--repeats", "1", "--warmup", "0"]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(1).unwrap().ends_with(",refused"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["bench", "--n", "4"][..],
        &["bench", "--method", "qr", "--n", "4", "--m", "8"],
        &["bench", "--n", "4", "--m", "8", "--lambda", "0"],
        &["bench", "--n", "4", "--m", "8", "--variant", "hermitian"],
        &["bench", "--method", "rvb", "--n", "4", "--m", "8"],
        &["scaling", "--fix", "n=4", "--vary", "n=8:64:3"],
        &["frobnicate"],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
    }
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("scaling"));
}

#[test]
fn check_passes_on_small_problem() {
    let (code, out, err) = run(&["check", "--n", "8", "--m", "64", "--seed", "42"]);
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.contains("all 13 comparisons passed"));
}

#[test]
fn check_fails_when_cg_is_starved() {
    let (code, out, _) = run(&["check", "--n", "8", "--m", "64", "--lambda", "1e-6", "--max-iter", "1"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"));
}

#[test]
fn scaling_reports_a_fit() {
    let (code, out, err) = run(&[
        "scaling", "--method", "chol", "--fix", "n=8", "--vary", "m=1000:16000:3", "--repeats", "3",
        "--warmup", "1",
    ]);
    assert_eq!(code, 0, "{err}");
    let rows: Vec<&str> = out.lines().filter(|l| l.starts_with("chol,")).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("chol,8,4000,"));
    let fit = out.lines().last().unwrap();
    assert!(fit.starts_with("# fit method=chol axis=m n=8 exponent="), "{fit}");
}

#[test]
fn scaling_with_narrow_span_fails() {
    let (code, _, err) = run(&["scaling", "--fix", "n=4", "--vary", "m=100:200:3", "--repeats", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("refused"));
}

#[test]
fn gen_then_solve_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let p = |name: &str| d.join(name).to_str().unwrap().to_owned();
    let (code, out, _) = run(&[
        "gen", "--n", "5", "--m", "40", "--lambda", "0.01", "--seed", "3", "--kind", "structured",
        "--out", d.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("f.fmat"));

    let mut reference = None;
    for method in ["naive", "chol", "eigh", "svd", "rvb", "cg"] {
        let (code, out, err) = run(&[
            "solve", "--s", &p("S.fmat"), "--v", &p("v.fmat"), "--f", &p("f.fmat"), "--lambda",
            "0.01", "--method", method, "--tol", "1e-12", "--out", &p("x.fmat"),
        ]);
        assert_eq!(code, 0, "{method}: {err}");
        assert!(out.starts_with(&format!("method={method} variant=plain n=5 m=40")));
        let x = fmat::load(p("x.fmat")).unwrap().into_real_vector().unwrap();
        assert_eq!(x.len(), 40);
        let r = reference.get_or_insert_with(|| x.clone());
        let d: f64 = x.iter().zip(r.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale: f64 = r.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(d <= 1e-7 * scale, "{method}: {d}");
    }
}

#[test]
fn solve_complex_variants() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let p = |name: &str| d.join(name).to_str().unwrap().to_owned();
    let (code, _, _) = run(&[
        "gen", "--n", "3", "--m", "20", "--kind", "complex", "--seed", "1", "--out",
        d.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (code, out, err) = run(&[
        "solve", "--s", &p("S.fmat"), "--v", &p("v.fmat"), "--lambda", "0.1", "--out", &p("x.fmat"),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("variant=hermitian"));
    assert!(matches!(fmat::load(p("x.fmat")).unwrap(), FmatMatrix::Complex(_)));

    // The generated v is complex, so the real-part variant refuses it.
    let (code, _, err) = run(&[
        "solve", "--s", &p("S.fmat"), "--v", &p("v.fmat"), "--lambda", "0.1", "--variant",
        "realpart", "--out", &p("x.fmat"),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("real right-hand side"));

    let v = fmat::load(p("v.fmat")).unwrap().into_complex_vector().unwrap();
    let re: Vec<f64> = v.iter().map(|z| z.re).collect();
    fmat::save(p("vr.fmat"), &FmatMatrix::real_vector(&re)).unwrap();
    let (code, out, err) = run(&[
        "solve", "--s", &p("S.fmat"), "--v", &p("vr.fmat"), "--lambda", "0.1", "--variant",
        "realpart", "--out", &p("x.fmat"),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("variant=realpart"));
    assert!(matches!(fmat::load(p("x.fmat")).unwrap(), FmatMatrix::Real(_)));
}

#[test]
fn solve_reports_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let p = |name: &str| d.join(name).to_str().unwrap().to_owned();
    std::fs::write(p("junk.fmat"), b"not a matrix at all....").unwrap();
    let (code, _, err) = run(&[
        "solve", "--s", &p("junk.fmat"), "--v", &p("junk.fmat"), "--lambda", "1", "--out",
        &p("x.fmat"),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("bad magic"));

    let (code, _, _) = run(&[
        "solve", "--s", &p("missing.fmat"), "--v", &p("missing.fmat"), "--lambda", "1", "--out",
        &p("x.fmat"),
    ]);
    assert_eq!(code, 1);
}
