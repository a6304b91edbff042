/// Golden-section search for a maximum of `f` on `[a, b]`.
///
/// Shrinks the bracket until its width falls below
/// `rel_tol * max(|a|, |b|)` (with a small absolute floor) and returns the
/// best evaluated point. The bracket is assumed to contain a single local
/// maximum; on a multimodal bracket the search still terminates but may
/// settle on either peak.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> (f64, f64) {
    debug_assert!(b >= a);
    const INV_PHI: f64 = 0.618_033_988_749_894_8;

    let mut lo = a;
    let mut hi = b;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);

    let floor = 1e-300;
    while (hi - lo) > rel_tol * lo.abs().max(hi.abs()).max(floor) {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }

    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
