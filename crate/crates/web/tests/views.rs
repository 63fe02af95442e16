use plab_web::{graph_view, half_derivative_view, heat_view};

#[test]
fn zero_amplitude_graph_is_flat() {
    let h = graph_view(0.0, 3, 8).unwrap();
    assert_eq!(h.width() * h.height(), h.values().len());
    assert!(h.values().iter().all(|&v| v == 0.0));
    assert_eq!(h.scalar(), 0.0);
}

#[test]
fn eta_is_linear_in_amplitude() {
    let a = graph_view(0.05, 2, 8).unwrap().scalar();
    let b = graph_view(0.1, 2, 8).unwrap().scalar();
    assert!(a > 0.0);
    assert!((b / a - 2.0).abs() < 1e-9, "{a} {b}");
}

#[test]
fn half_derivative_of_zero_is_zero() {
    assert_eq!(half_derivative_view(0.0, 2, 8).unwrap().scalar(), 0.0);
}

#[test]
fn heat_view_obeys_the_maximum_principle() {
    let h = heat_view(0.5, 0.2, 16).unwrap();
    assert!(h.scalar() > 0.0 && h.scalar() <= 1.0 + 1e-9, "{}", h.scalar());
}

#[test]
fn oversized_grids_are_rejected() {
    assert!(graph_view(0.1, 2, 1000).is_err());
    assert!(heat_view(0.5, 0.0, 16).is_err());
}
