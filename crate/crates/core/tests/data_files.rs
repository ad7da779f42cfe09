use ompkit::ensemble::presets;
use ompkit::io::{parse_channel, parse_ensemble};
use ompkit::{QubitChannel, Tolerances, Vec3};

fn read(path: &str) -> String {
    std::fs::read_to_string(format!("{}/data/{path}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn ensemble_files_match_presets() {
    let tol = Tolerances::default();
    for (file, preset) in [
        ("bb84.json", presets::bb84()),
        ("three-mubs.json", presets::three_mubs()),
        ("sic.json", presets::sic()),
        ("one-basis.json", presets::one_basis(0.7)),
        ("unequal-3.json", presets::unequal_priors()),
    ] {
        let e = parse_ensemble(&read(file), &tol).unwrap();
        assert_eq!(e.len(), preset.len(), "{file}");
        for x in 0..e.len() {
            assert!((e.prior(x) - preset.prior(x)).abs() < 1e-15, "{file}");
            assert!((e.bloch(x) - preset.bloch(x)).amax() < 1e-15, "{file}");
        }
    }
}

#[test]
fn channel_files_parse() {
    assert_eq!(parse_channel(&read("channels/depolarizing-0.2.json")).unwrap(), QubitChannel::depolarizing(0.2).unwrap());
    let z = parse_channel(&read("channels/z-rotation.json")).unwrap();
    let (axis, angle) = z.rotation_axis_angle(1e-12).unwrap();
    assert!((axis - Vec3::z()).amax() < 1e-12);
    assert!((angle - std::f64::consts::PI / 7.0).abs() < 1e-12);
    let flip = parse_channel(&read("channels/bit-flip-reflection.json")).unwrap();
    assert!(!flip.is_cptp_choi(1e-9).is_cptp());
}
