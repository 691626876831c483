//! Bounded scalar minimization: golden-section search, and a coarse grid
//! scan that picks the bracket for it.

/// Golden ratio conjugate, (√5 - 1)/2.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

/// Stop once the bracket is narrower than `rel·|x| + abs`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    fn width(&self, x: f64) -> f64 {
        self.rel * x.abs() + self.abs
    }
}

/// Golden-section search for a local minimum of `f` on `[lo, hi]`.
///
/// Assumes `f` is unimodal on the bracket; on anything else it still
/// terminates and returns the best point it evaluated.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: Tolerance) -> Minimum {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    // 200 iterations shrink any finite bracket below one ulp
    for _ in 0..200 {
        if b - a <= tol.width(0.5 * (a + b)) {
            break;
        }
        if fc <= fd {
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
    if fc <= fd {
        Minimum { x: c, value: fc }
    } else {
        Minimum { x: d, value: fd }
    }
}

/// Evaluates `f` on `grid` (sorted, either direction), then refines with
/// golden-section search between the neighbours of the best grid point.
///
/// Returns the refined point unless a grid point is at least as good, and
/// the full list of grid values for callers that inspect flatness.
pub fn scan_then_refine<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64], tol: Tolerance) -> (Minimum, Vec<f64>) {
    assert!(!grid.is_empty(), "scan grid must not be empty");
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v < values[best] { i } else { best });
    let grid_min = Minimum {
        x: grid[best],
        value: values[best],
    };
    if grid.len() < 2 {
        return (grid_min, values);
    }
    let left = grid[best.saturating_sub(1)];
    let right = grid[(best + 1).min(grid.len() - 1)];
    let refined = golden_section(&mut f, left, right, tol);
    let winner = if refined.value < grid_min.value {
        refined
    } else {
        grid_min
    };
    (winner, values)
}

/// `n` points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive (both > 0).
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut out: Vec<f64> = linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect();
    if let Some(first) = out.first_mut() {
        *first = lo;
    }
    if let Some(last) = out.last_mut() {
        *last = hi;
    }
    out
}
