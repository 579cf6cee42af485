// SPDX-License-Identifier: Apache-2.0

use std::ffi::{CStr, CString};
use std::ptr;

use hqc_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(hqc_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn new_model(layout: HqcLayout, kind: HqcGateKind, n: usize) -> *mut HqcModel {
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { hqc_model_new(layout, kind, n, &mut m) },
        HqcStatus::Ok
    );
    assert!(!m.is_null());
    m
}

#[test]
fn identity_model_predicts_zero_outcome() {
    let m = new_model(HqcLayout::Mera, HqcGateKind::GeneralComplex, 8);
    unsafe {
        assert_eq!(hqc_model_num_qubits(m), 8);
        // 11 blocks of 15 generators plus a three-angle measurement rotation
        assert_eq!(hqc_model_num_params(m), 11 * 15 + 3);
        let (mut p, mut label) = (0.0, 9u8);
        assert_eq!(
            hqc_model_predict(m, [0.0; 8].as_ptr(), 8, &mut p, &mut label),
            HqcStatus::Ok
        );
        assert!((p - 1.0).abs() < 1e-12);
        assert_eq!(label, 1);
        // all inputs |1>: readout flips under the identity circuit
        let quarter = [std::f64::consts::FRAC_PI_2; 8];
        assert_eq!(
            hqc_model_predict(m, quarter.as_ptr(), 8, &mut p, ptr::null_mut()),
            HqcStatus::Ok
        );
        assert!(p.abs() < 1e-12);
        hqc_model_free(m);
    }
}

#[test]
fn params_round_trip_and_length_is_checked() {
    let m = new_model(HqcLayout::Ttn, HqcGateKind::SimpleReal, 4);
    unsafe {
        let n = hqc_model_num_params(m);
        let values: Vec<f64> = (0..n).map(|i| 0.1 * i as f64 - 0.3).collect();
        assert_eq!(hqc_model_set_params(m, values.as_ptr(), n), HqcStatus::Ok);
        let mut back = vec![0.0; n];
        assert_eq!(hqc_model_get_params(m, back.as_mut_ptr(), n), HqcStatus::Ok);
        assert_eq!(back, values);
        assert_eq!(
            hqc_model_set_params(m, values.as_ptr(), n - 1),
            HqcStatus::DimensionMismatch
        );
        assert!(last_error().contains("expected"));
        let bad = vec![f64::NAN; n];
        assert_eq!(
            hqc_model_set_params(m, bad.as_ptr(), n),
            HqcStatus::InvalidArgument
        );
        hqc_model_free(m);
    }
}

#[test]
fn save_and_load_preserve_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("m.json").to_str().unwrap()).unwrap();
    let m = new_model(HqcLayout::Ttn, HqcGateKind::AncillaReal, 4);
    unsafe {
        let n = hqc_model_num_params(m);
        let values: Vec<f64> = (0..n)
            .map(|i| ((i * 7919) % 13) as f64 / 13.0 - 0.5)
            .collect();
        hqc_model_set_params(m, values.as_ptr(), n);
        assert_eq!(hqc_model_save(m, path.as_ptr()), HqcStatus::Ok);
        let mut loaded = ptr::null_mut();
        assert_eq!(hqc_model_load(path.as_ptr(), &mut loaded), HqcStatus::Ok);
        let x = [0.2, 0.9, 1.3, 0.4];
        let (mut a, mut b) = (0.0, 0.0);
        hqc_model_predict(m, x.as_ptr(), 4, &mut a, ptr::null_mut());
        hqc_model_predict(loaded, x.as_ptr(), 4, &mut b, ptr::null_mut());
        assert_eq!(a.to_bits(), b.to_bits());
        hqc_model_free(m);
        hqc_model_free(loaded);
    }
}

#[test]
fn predict_state_matches_feature_encoding() {
    let m = new_model(HqcLayout::Ttn, HqcGateKind::GeneralReal, 2);
    unsafe {
        let n = hqc_model_num_params(m);
        let values: Vec<f64> = (0..n).map(|i| 0.3 * i as f64).collect();
        hqc_model_set_params(m, values.as_ptr(), n);
        let x = [0.4f64, 1.1];
        // product amplitudes, qubit 0 most significant
        let q = |t: f64| [t.cos(), t.sin()];
        let re: Vec<f64> = (0..4).map(|k| q(x[0])[k >> 1] * q(x[1])[k & 1]).collect();
        let im = [0.0; 4];
        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(
            hqc_model_predict(m, x.as_ptr(), 2, &mut a, ptr::null_mut()),
            HqcStatus::Ok
        );
        assert_eq!(
            hqc_model_predict_state(m, re.as_ptr(), im.as_ptr(), 4, &mut b, ptr::null_mut()),
            HqcStatus::Ok
        );
        assert!((a - b).abs() < 1e-12);
        let unnormalized = [1.0, 1.0, 0.0, 0.0];
        assert_eq!(
            hqc_model_predict_state(
                m,
                unnormalized.as_ptr(),
                im.as_ptr(),
                4,
                &mut b,
                ptr::null_mut()
            ),
            HqcStatus::InvalidArgument
        );
        hqc_model_free(m);
    }
}

#[test]
fn qasm_export_only_for_simple_real() {
    let m = new_model(HqcLayout::Ttn, HqcGateKind::SimpleReal, 4);
    let g = new_model(HqcLayout::Ttn, HqcGateKind::GeneralReal, 4);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(hqc_model_export_qasm(m, &mut s), HqcStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        hqc_string_free(s);
        assert!(text.starts_with("OPENQASM 2.0;"));
        assert!(text.contains("qreg q[4];"));
        let mut s2 = ptr::null_mut();
        assert_eq!(hqc_model_export_qasm(g, &mut s2), HqcStatus::Unsupported);
        assert!(s2.is_null());
        hqc_model_free(m);
        hqc_model_free(g);
    }
}

#[test]
fn errors_are_reported_not_raised() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(
            hqc_model_new(HqcLayout::Ttn, HqcGateKind::SimpleReal, 6, &mut m),
            HqcStatus::Unsupported
        );
        assert!(m.is_null());
        assert_eq!(
            hqc_model_new(HqcLayout::Ttn, HqcGateKind::SimpleReal, 4, ptr::null_mut()),
            HqcStatus::NullPointer
        );
        assert_eq!(hqc_model_load(ptr::null(), &mut m), HqcStatus::NullPointer);
        let missing = CString::new("/nonexistent/model.json").unwrap();
        assert_eq!(hqc_model_load(missing.as_ptr(), &mut m), HqcStatus::Io);
        assert!(!last_error().is_empty());
        assert_eq!(hqc_model_num_params(ptr::null()), 0);
        hqc_model_free(ptr::null_mut());
        hqc_string_free(ptr::null_mut());
    }
}

#[test]
fn version_mismatch_has_its_own_status() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("old.json");
    let m = new_model(HqcLayout::Ttn, HqcGateKind::SimpleReal, 2);
    let path = CString::new(p.to_str().unwrap()).unwrap();
    unsafe {
        hqc_model_save(m, path.as_ptr());
        hqc_model_free(m);
    }
    let text = std::fs::read_to_string(&p)
        .unwrap()
        .replace("\"format_version\": 1", "\"format_version\": 2");
    std::fs::write(&p, text).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { hqc_model_load(path.as_ptr(), &mut out) },
        HqcStatus::Version
    );
}

#[test]
fn generated_header_declares_the_api() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hqc.h")).unwrap();
    for symbol in [
        "typedef struct HqcModel HqcModel;",
        "HQC_STATUS_OK = 0",
        "HQC_STATUS_VERSION",
        "hqc_model_new(",
        "hqc_model_load(",
        "hqc_model_save(",
        "hqc_model_free(",
        "hqc_model_num_params(",
        "hqc_model_get_params(",
        "hqc_model_set_params(",
        "hqc_model_predict(",
        "hqc_model_export_qasm(",
        "hqc_string_free(",
        "hqc_last_error(",
    ] {
        assert!(header.contains(symbol), "missing {symbol}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(out) = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hqc.h"))
        .output()
    else {
        eprintln!("no C compiler on PATH; skipping");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
