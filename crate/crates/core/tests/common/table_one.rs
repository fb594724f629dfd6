//! Published meta-optimization runs: (w, phi_p, phi_g, R*, I*, rsum) in
//! design order.

pub const ROWS: [(f64, f64, f64, u64, u32, u64); 14] = [
    (0.0, 0.0, 2.0, 4_294_667_318, 5, 4_294_667_323),
    (0.9, 0.0, 2.0, 4_294_667_318, 4, 4_294_667_322),
    (0.0, 4.0, 2.0, 4_294_667_318, 29, 4_294_667_347),
    (0.9, 4.0, 2.0, 4_294_667_318, 30, 4_294_667_348),
    (0.0, 2.0, 0.0, 4_294_668_048, 31, 4_294_668_079),
    (0.9, 2.0, 0.0, 4_294_669_150, 31, 4_294_669_181),
    (0.0, 2.0, 4.0, 4_294_667_315, 7, 4_294_667_322),
    (0.9, 2.0, 4.0, 4_294_667_315, 6, 4_294_667_321),
    (0.45, 0.0, 0.0, 4_294_669_038, 31, 4_294_669_069),
    (0.45, 4.0, 0.0, 4_294_668_498, 31, 4_294_668_529),
    (0.45, 0.0, 4.0, 4_294_667_315, 5, 4_294_667_320),
    (0.45, 4.0, 4.0, 4_294_667_315, 5, 4_294_667_320),
    (0.45, 2.0, 2.0, 4_294_667_315, 18, 4_294_667_333),
    (0.45, 2.0, 2.0, 4_294_667_315, 16, 4_294_667_331),
];

pub fn rsum() -> Vec<f64> {
    ROWS.iter().map(|r| r.5 as f64).collect()
}

/// Coded levels in {-1, 0, 1}.
pub fn coded_rows() -> Vec<Vec<f64>> {
    ROWS.iter()
        .map(|&(w, p, g, ..)| vec![code(w, 0.45), code(p, 2.0), code(g, 2.0)])
        .collect()
}

fn code(v: f64, mid: f64) -> f64 {
    ((v - mid) / mid).round()
}
