//! Robust maximization of a one-dimensional function that is expected, but
//! not known, to be unimodal.

use alloc::vec::Vec;

const GRID_POINTS: usize = 64;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
    /// False when the seeding grid was not non-decreasing then
    /// non-increasing. The result is then the best of several refinements.
    pub unimodal: bool,
    pub evaluations: usize,
}

/// Maximizes `f` over `(lo, hi)`.
///
/// A 64-point scan at cell midpoints locates the peak; golden-section search
/// then refines the bracket formed by the neighbouring grid points until it
/// is narrower than `tol`. When the scan is not unimodal, the three highest
/// local maxima are refined and the best is kept. Non-finite values are
/// treated as `-inf`. The best point ever evaluated is returned.
pub fn maximize_concave<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Maximum {
    maximize_scanning(f, lo, hi, tol, None)
}

/// [`maximize_concave`] with an optional early stop of the grid scan.
///
/// With `patience = Some(k)` the grid is scanned from `lo` upward and the
/// scan ends once the values have strictly decreased `k` times in a row
/// after a finite positive peak. Grid points beyond that are never
/// evaluated, which matters when `f` gets expensive toward `hi`.
pub fn maximize_scanning<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    patience: Option<usize>,
) -> Maximum {
    assert!(lo < hi, "empty bracket");
    let mut evaluations = 0;
    let mut eval = |x: f64| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    let cell = (hi - lo) / GRID_POINTS as f64;
    let mut xs: Vec<f64> = Vec::with_capacity(GRID_POINTS);
    let mut fs: Vec<f64> = Vec::with_capacity(GRID_POINTS);
    let mut descents = 0;
    for i in 0..GRID_POINTS {
        let x = lo + (i as f64 + 0.5) * cell;
        let v = eval(x);
        descents = match fs.last() {
            Some(&prev) if v < prev => descents + 1,
            _ => 0,
        };
        xs.push(x);
        fs.push(v);
        let peaked = fs.iter().any(|&v| v > 0.0 && v.is_finite());
        if patience.is_some_and(|k| peaked && descents >= k) {
            break;
        }
    }
    let n = xs.len();

    let mut best = 0;
    for i in 1..n {
        if fs[i] > fs[best] {
            best = i;
        }
    }
    let unimodal =
        (1..=best).all(|i| fs[i] >= fs[i - 1]) && (best + 1..n).all(|i| fs[i] <= fs[i - 1]);

    let mut peaks: Vec<usize> = if unimodal {
        alloc::vec![best]
    } else {
        (0..n)
            .filter(|&i| {
                let left = if i == 0 { f64::NEG_INFINITY } else { fs[i - 1] };
                let right = if i + 1 == n {
                    f64::NEG_INFINITY
                } else {
                    fs[i + 1]
                };
                fs[i] > left && fs[i] >= right
            })
            .collect()
    };
    peaks.sort_by(|&a, &b| fs[b].total_cmp(&fs[a]));
    peaks.truncate(3);

    let mut result = (xs[best], fs[best]);
    for &i in &peaks {
        if fs[i] == f64::NEG_INFINITY {
            continue;
        }
        let a = if i == 0 { lo } else { xs[i - 1] };
        let b = if i + 1 == n {
            xs[i] + 0.5 * cell
        } else {
            xs[i + 1]
        };
        let (x, v) = golden_section(&mut eval, a, b, tol);
        if v > result.1 {
            result = (x, v);
        }
    }

    Maximum {
        arg: result.0,
        value: result.1,
        unimodal,
        evaluations,
    }
}

fn golden_section<F: FnMut(f64) -> f64>(f: &mut F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
