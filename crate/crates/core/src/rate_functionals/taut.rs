//! Taut string through a tube of node gates.
//!
//! Among all piecewise-linear `g` with `g_0 = 0` and `lower_i ≤ g_i ≤ upper_i`,
//! the taut string minimizes `Σ φ(g_{i+1} − g_i)` simultaneously for every
//! convex `φ`. The right end is free; it settles on the increment closest to
//! `target`, which is optimal whenever `φ` is minimized at `target`.

/// Fill `out[a..=b]` along the segment from `(a, ya)` with the given slope.
fn fill(out: &mut [f64], a: usize, ya: f64, b: usize, slope: f64) {
    for (k, o) in out[a..=b].iter_mut().enumerate() {
        *o = ya + slope * k as f64;
    }
}

/// Taut string in index units: slopes are per node step.
pub(crate) fn taut_string(lower: &[f64], upper: &[f64], target: f64, out: &mut Vec<f64>) {
    let n = lower.len() - 1;
    out.clear();
    out.resize(n + 1, 0.0);
    let mut a = 0usize;
    let mut ya = 0.0f64;
    'outer: while a < n {
        let (mut lo_s, mut lo_j) = (f64::NEG_INFINITY, a);
        let (mut hi_s, mut hi_j) = (f64::INFINITY, a);
        for j in (a + 1)..=n {
            let dt = (j - a) as f64;
            let sl = (lower[j] - ya) / dt;
            let su = (upper[j] - ya) / dt;
            if sl > hi_s {
                fill(out, a, ya, hi_j, hi_s);
                a = hi_j;
                ya = upper[hi_j];
                out[a] = ya;
                continue 'outer;
            }
            if su < lo_s {
                fill(out, a, ya, lo_j, lo_s);
                a = lo_j;
                ya = lower[lo_j];
                out[a] = ya;
                continue 'outer;
            }
            if j == n {
                let c_lo = lo_s.max(sl);
                let c_hi = hi_s.min(su);
                let s = if target > c_hi {
                    if hi_s < su {
                        // Bend around the binding upper vertex and keep going.
                        fill(out, a, ya, hi_j, hi_s);
                        a = hi_j;
                        ya = upper[hi_j];
                        out[a] = ya;
                        continue 'outer;
                    }
                    c_hi
                } else if target < c_lo {
                    if lo_s > sl {
                        fill(out, a, ya, lo_j, lo_s);
                        a = lo_j;
                        ya = lower[lo_j];
                        out[a] = ya;
                        continue 'outer;
                    }
                    c_lo
                } else {
                    target
                };
                fill(out, a, ya, n, s);
                break 'outer;
            }
            if sl > lo_s {
                lo_s = sl;
                lo_j = j;
            }
            if su < hi_s {
                hi_s = su;
                hi_j = j;
            }
        }
    }
}
