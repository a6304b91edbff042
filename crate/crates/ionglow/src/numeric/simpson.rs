use crate::error::{Error, Result};

const MAX_DEPTH: usize = 32;

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// The interval is first split into `initial_panels` equal panels so that
/// oscillatory integrands are sampled below their fringe period before any
/// adaptivity kicks in; each panel is then refined recursively until its
/// share of the global tolerance `max(rel_tol * |estimate|, abs_floor)` is
/// met. Richardson extrapolation of the two half-panel estimates gives the
/// returned value.
///
/// Fails with the best available estimate if any subinterval still exceeds
/// its tolerance at the recursion depth limit.
pub fn adaptive_simpson(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
    initial_panels: usize,
) -> Result<f64> {
    assert!(b > a, "integration bounds must be ordered");
    let panels = initial_panels.max(1);
    let width = (b - a) / panels as f64;

    // First pass: plain Simpson on each panel for a global estimate.
    let mut edges_f = Vec::with_capacity(panels + 1);
    for i in 0..=panels {
        edges_f.push(f(a + i as f64 * width));
    }
    let mut mids_f = Vec::with_capacity(panels);
    let mut rough = 0.0;
    for i in 0..panels {
        let fm = f(a + (i as f64 + 0.5) * width);
        mids_f.push(fm);
        rough += width / 6.0 * (edges_f[i] + 4.0 * fm + edges_f[i + 1]);
    }

    let tolerance = (rel_tol * rough.abs()).max(abs_floor);

    let mut total = 0.0;
    let mut ok = true;
    for i in 0..panels {
        let lo = a + i as f64 * width;
        let panel_tol = tolerance / panels as f64;
        let whole = width / 6.0 * (edges_f[i] + 4.0 * mids_f[i] + edges_f[i + 1]);
        let (value, converged) = refine(
            f,
            lo,
            lo + width,
            edges_f[i],
            mids_f[i],
            edges_f[i + 1],
            whole,
            panel_tol,
            MAX_DEPTH,
        );
        total += value;
        ok &= converged;
    }

    if ok {
        Ok(total)
    } else {
        Err(Error::QuadratureAccuracy { estimate: total })
    }
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> (f64, bool) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let h = b - a;
    let left = h / 12.0 * (fa + 4.0 * flm + fm);
    let right = h / 12.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;

    if delta.abs() <= 15.0 * tol {
        return (left + right + delta / 15.0, true);
    }
    if depth == 0 {
        return (left + right + delta / 15.0, false);
    }
    let (lv, lok) = refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    let (rv, rok) = refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    (lv + rv, lok && rok)
}
