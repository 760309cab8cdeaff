use qnd_lab::verify::{self, Fault, Level, Options};

#[test]
fn quick_level_fails_only_the_asymptote_criteria() {
    let report = verify::run_verify(Options::new(Level::Quick));
    assert_eq!(report.results.len(), 10);
    assert_eq!(report.failed_ids(), vec![3, 8], "{report}");
    let csv = report.to_csv().unwrap();
    assert!(csv.starts_with("criterion,name,check,measured,tolerance,pass\n"));
}

#[test]
fn injected_sign_flip_is_caught() {
    let opts = Options { level: Level::Quick, fault: Some(Fault::FlipGammaDotSqueezeSign) };
    for id in [1, 5] {
        let r = verify::run_criterion(id, opts);
        assert!(!r.pass(), "{}", r.line());
        assert!(verify::run_criterion(id, Options::new(Level::Quick)).pass());
    }
}

#[test]
fn lines_name_the_criterion() {
    let r = verify::run_criterion(10, Options::new(Level::Quick));
    assert!(r.line().starts_with("criterion 10 PASS spin bath"), "{}", r.line());
}
