use hexscat_web::{resolvent_decay_json, spectrum_heatmap_json, zeta_asymptotics_json};
use serde_json::Value;

#[test]
fn heatmap_has_the_band_top_and_a_near_dirac_minimum() {
    let v: Value = serde_json::from_str(&spectrum_heatmap_json(48).unwrap()).unwrap();
    let p: Vec<f64> = v["p"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(p.len(), 48 * 48);
    assert_eq!(p.iter().cloned().fold(0.0, f64::max), 3.0);
    assert!(v["min"].as_f64().unwrap() < 1e-12);
    assert!(spectrum_heatmap_json(8).is_err());
}

#[test]
fn decay_slopes_track_the_distances() {
    let v: Value = serde_json::from_str(&resolvent_decay_json(2, 1, 0, 0).unwrap()).unwrap();
    for e in v["entries"].as_array().unwrap() {
        if let Some(s) = e["slope"].as_f64() {
            assert!((s - e["target"].as_f64().unwrap()).abs() < 0.1, "{e}");
        }
    }
    assert!(resolvent_decay_json(20, 0, 0, 0).is_err());
}

#[test]
fn phases_approach_their_limits() {
    let v: Value = serde_json::from_str(&zeta_asymptotics_json(0.2, false).unwrap()).unwrap();
    let dev = v["deviation"].as_array().unwrap();
    let first = dev[0][1].as_f64().unwrap();
    let last = dev[dev.len() - 1][1].as_f64().unwrap();
    assert!(last < first * 1e-4);
    assert!(zeta_asymptotics_json(0.4, true).is_err());
}
