use jetcurv_cli::specfile::{parse_seed, parse_spec, SpecError};

const BASE: &str = "[system]\nn = 2\nm = 1\nx = t, th\ny = r\n";

fn with(extra: &str) -> Result<jetcurv_cli::specfile::SystemSpec, SpecError> {
    parse_spec(&format!("{BASE}{extra}"))
}

fn invalid_at(r: Result<jetcurv_cli::specfile::SystemSpec, SpecError>) -> (usize, String) {
    match r {
        Err(SpecError::Invalid { line, key, .. }) => (line, key),
        Err(e) => panic!("unexpected error {e}"),
        Ok(_) => panic!("accepted"),
    }
}

#[test]
fn parses_lemniscate_file() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/specs/lemniscate.spec")).unwrap();
    let spec = parse_spec(&text).unwrap();
    assert_eq!((spec.n(), spec.m()), (2, 1));
    assert_eq!(spec.f.len(), 3);
    assert!(spec.warnings.is_empty());
    assert_eq!(spec.slices.len(), 2);
    assert_eq!(spec.slice("th").unwrap().v[1].to_string(), "1");
    let c = spec.connection();
    assert_eq!(c.f(0, 1, 0), c.f(0, 0, 1));
}

#[test]
fn missing_entries_warn() {
    let spec = with("[F]\nF[1][1][1] = r  # comment\n").unwrap();
    assert_eq!(
        spec.warnings,
        vec![
            "F[1][1][2] not given; using 0".to_string(),
            "F[1][2][2] not given; using 0".to_string()
        ]
    );
}

#[test]
fn errors_name_line_and_key() {
    assert_eq!(invalid_at(with("[F]\nF[1][2][1] = r\n")), (7, "F[1][2][1]".into()));
    assert_eq!(invalid_at(with("[F]\nF[2][1][1] = r\n")), (7, "F[2][1][1]".into()));
    assert_eq!(invalid_at(with("[F]\nF[1][1][1] = r +\n")), (7, "F[1][1][1]".into()));
    assert_eq!(
        invalid_at(with("[F]\nF[1][1][1] = r\nF[1][1][1] = 0\n")),
        (8, "F[1][1][1]".into())
    );
    assert_eq!(invalid_at(with("[slice a]\nphi = r, 0\nv = 1, 0\n")), (7, "phi".into()));
    assert_eq!(invalid_at(with("[slice a]\nphi = 1\n")), (7, "phi".into()));
    assert_eq!(invalid_at(with("[options]\nseed = xyz\n")), (7, "seed".into()));
    assert_eq!(invalid_at(with("[options]\ntol_sym = -1\n")), (7, "tol_sym".into()));
    assert_eq!(
        invalid_at(with("[metric g]\ng[1][2] = t\ng[2][1] = th\n")),
        (8, "g[2][1]".into())
    );
    assert_eq!(invalid_at(with("[bogus]\n")), (6, "[bogus]".into()));
}

#[test]
fn structural_errors() {
    assert_eq!(parse_spec("[F]\n").unwrap_err(), SpecError::MissingSection("system"));
    assert_eq!(
        parse_spec("[system]\nn = 1\nm = 1\nx = t\n").unwrap_err(),
        SpecError::MissingKey("y")
    );
    assert!(matches!(
        parse_spec("[system]\nn = 1\nm = 1\nx = t\ny = t\n"),
        Err(SpecError::Context(_))
    ));
    assert!(matches!(with("[slice a]\nphi = 1, 0\n"), Err(SpecError::Context(_))));
}

#[test]
fn options_and_metrics() {
    let spec = with("[options]\nseed = 2a\nprobe_points = 3\ntol_num = 0.001\n[metric h]\nh[1][1] = r^2\n").unwrap();
    assert_eq!(spec.options.seed, 0x2a);
    assert_eq!(spec.options.probe_points, 3);
    assert_eq!(spec.options.tol_num, 0.001);
    assert_eq!(spec.metric_h.unwrap()[0][0].to_string(), "r^2");
    assert_eq!(parse_seed("0x5EED"), Some(0x5eed));
    assert_eq!(parse_seed("g"), None);
}
