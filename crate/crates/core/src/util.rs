/// `[n t]` for `t` in `[0,1]`, snapping products within rounding error of an
/// integer (so `floor(100 * 0.29)` is 29, not 28).
pub(crate) fn floor_index(n: usize, t: f64) -> usize {
    let x = n as f64 * t;
    let r = x.round();
    let k = if (x - r).abs() <= 1e-9 * r.max(1.0) { r } else { x.floor() };
    (k.max(0.0) as usize).min(n)
}

pub(crate) fn check_unit(t: f64, what: &str) -> crate::Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(crate::Error::InvalidArgument(format!("{what} = {t} is outside [0,1]")))
    }
}
