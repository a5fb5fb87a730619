//! Published score rows used as metric-engine fixtures.

#![allow(dead_code)]

/// (label, perception or None when the stage has none, decision, steps,
/// step limit, composite, normalized composite)
pub type Row = (&'static str, Option<f64>, f64, f64, f64, f64, f64);

pub const CARGO_END_TO_END: [Row; 4] = [
    ("cargo e2e #1", Some(93.3), 84.1, 9.8, 25.0, 346.3, 60.2),
    ("cargo e2e #2", Some(74.1), 33.0, 20.6, 25.0, 130.0, 22.6),
    ("cargo e2e #3", Some(67.9), 62.3, 15.6, 25.0, 196.9, 34.2),
    ("cargo e2e #4", Some(70.0), 30.8, 25.0, 25.0, 50.4, 8.8),
];

pub const CARGO_STEP_BY_STEP: [Row; 12] = [
    ("cargo navigate #1", None, 100.0, 1.0, 5.0, 482.2, 100.0),
    ("cargo navigate #2", None, 100.0, 1.0, 5.0, 482.2, 100.0),
    ("cargo navigate #3", None, 100.0, 1.0, 5.0, 482.2, 100.0),
    ("cargo navigate #4", None, 100.0, 1.0, 5.0, 482.2, 100.0),
    ("cargo search #1", Some(100.0), 100.0, 2.0, 10.0, 482.2, 89.6),
    ("cargo search #2", Some(100.0), 100.0, 2.0, 10.0, 482.2, 89.6),
    ("cargo search #3", Some(100.0), 100.0, 2.0, 10.0, 482.2, 89.6),
    ("cargo search #4", Some(100.0), 26.9, 6.8, 10.0, 180.4, 33.5),
    ("cargo approach #1", Some(100.0), 96.9, 7.3, 20.0, 395.9, 69.6),
    ("cargo approach #2", Some(78.5), 40.2, 16.0, 20.0, 147.9, 26.0),
    ("cargo approach #3", Some(57.4), 47.3, 14.0, 20.0, 145.6, 25.6),
    ("cargo approach #4", Some(79.0), 27.6, 18.3, 20.0, 117.0, 20.6),
];

pub const FIRE_END_TO_END: [Row; 4] = [
    ("fire e2e #1", Some(85.0), 86.5, 10.2, 25.0, 328.9, 57.2),
    ("fire e2e #2", Some(39.1), 27.4, 23.6, 25.0, 70.7, 12.3),
    ("fire e2e #3", Some(0.0), 4.0, 25.0, 25.0, 2.0, 0.3),
    ("fire e2e #4", Some(65.0), 64.0, 25.0, 25.0, 64.5, 11.2),
];

pub const FIRE_STEP_BY_STEP: [Row; 12] = [
    ("fire navigate #1", None, 100.0, 1.0, 5.0, 482.2, 100.0),
    ("fire navigate #2", None, 100.0, 1.0, 5.0, 482.2, 100.0),
    ("fire navigate #3", None, 100.0, 1.0, 5.0, 482.2, 100.0),
    ("fire navigate #4", None, 100.0, 1.0, 5.0, 482.2, 100.0),
    ("fire locate #1", Some(100.0), 100.0, 3.0, 10.0, 432.0, 80.3),
    ("fire locate #2", Some(100.0), 100.0, 3.0, 10.0, 432.0, 80.3),
    ("fire locate #3", Some(100.0), 100.0, 3.0, 10.0, 432.0, 80.3),
    ("fire locate #4", Some(100.0), 100.0, 3.0, 10.0, 432.0, 80.3),
    ("fire execute #1", Some(81.7), 76.7, 5.0, 10.0, 274.5, 51.1),
    ("fire execute #2", Some(100.0), 100.0, 4.0, 10.0, 387.0, 71.9),
    ("fire execute #3", Some(55.0), 45.0, 10.0, 10.0, 50.0, 9.3),
    ("fire execute #4", Some(90.0), 90.0, 4.5, 10.0, 329.6, 61.2),
];

/// (perception, decision, composite)
pub const TRACKING: [(f64, f64, f64); 4] = [
    (21.1, 21.1, 21.1),
    (42.1, 36.8, 39.5),
    (26.3, 26.3, 26.3),
    (15.8, 15.8, 15.8),
];

pub fn all_rows() -> impl Iterator<Item = &'static Row> {
    CARGO_END_TO_END
        .iter()
        .chain(&CARGO_STEP_BY_STEP)
        .chain(&FIRE_END_TO_END)
        .chain(&FIRE_STEP_BY_STEP)
}

pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}
