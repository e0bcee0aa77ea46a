//! Quadrature rules for velocity averages: Gauss–Hermite for smooth
//! integrands against e^{−x²}, and adaptive Gauss–Kronrod (7/15) for
//! integrands with resonances much narrower than the weight.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Nodes and weights of an n-point Gauss–Hermite rule for ∫ e^{−x²} f(x) dx.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub–Welsch eigenvalues of the Jacobi matrix as starting points,
    /// polished by Newton steps on the orthonormal Hermite recurrence. The
    /// recurrence is rescaled as it grows so large orders do not overflow.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Hermite order must be positive");
        let jacobi = DMatrix::from_fn(n, n, |i, j| {
            if i.abs_diff(j) == 1 {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let mut guesses: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
        guesses.sort_by(|a, b| b.total_cmp(a));

        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for (i, &guess) in guesses.iter().enumerate().take(n.div_ceil(2)) {
            let mut z = guess;
            let (mut pp, mut log_scale) = hermite_derivative(n, z);
            for _ in 0..10 {
                let (p, dp, ls) = hermite_step(n, z);
                let z1 = z;
                z -= p / dp;
                (pp, log_scale) = (dp, ls);
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            if n % 2 == 1 && i == n / 2 {
                z = 0.0;
                (pp, log_scale) = hermite_derivative(n, z);
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            let w = (std::f64::consts::LN_2 - 2.0 * (pp.abs().ln() + log_scale)).exp();
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate<const N: usize>(&self, f: impl Fn(f64) -> [Complex64; N]) -> [Complex64; N] {
        let mut acc = [Complex64::new(0.0, 0.0); N];
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            if w == 0.0 {
                continue;
            }
            for (a, v) in acc.iter_mut().zip(f(x)) {
                *a += w * v;
            }
        }
        acc
    }
}

/// Orthonormal Hermite polynomial p_n(z) and its derivative, both divided
/// by e^{log_scale}.
fn hermite_step(n: usize, z: f64) -> (f64, f64, f64) {
    const PI_M4: f64 = 0.751_125_544_464_942_5;
    let mut p1 = PI_M4;
    let mut p2 = 0.0;
    let mut log_scale = 0.0;
    for j in 0..n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
        if p1.abs() > 1e150 {
            p1 *= 1e-150;
            p2 *= 1e-150;
            log_scale += 150.0 * std::f64::consts::LN_10;
        }
    }
    (p1, (2.0 * n as f64).sqrt() * p2, log_scale)
}

fn hermite_derivative(n: usize, z: f64) -> (f64, f64) {
    let (_, dp, ls) = hermite_step(n, z);
    (dp, ls)
}

/// Shared Gauss–Hermite rules of order 64·2^k, k = 0..=3.
pub fn gauss_hermite_cached(n: usize) -> &'static GaussHermite {
    static RULES: [OnceLock<GaussHermite>; 4] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let slot = match n {
        64 => 0,
        128 => 1,
        256 => 2,
        512 => 3,
        _ => panic!("no cached Gauss–Hermite rule of order {n}"),
    };
    RULES[slot].get_or_init(|| GaussHermite::new(n))
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<const N: usize>(
    f: &impl Fn(f64) -> [Complex64; N],
    a: f64,
    b: f64,
) -> ([Complex64; N], [f64; N]) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let zero = Complex64::new(0.0, 0.0);
    let mut kron = [zero; N];
    let mut gauss = [zero; N];
    let fc = f(center);
    for c in 0..N {
        kron[c] = WGK[7] * fc[c];
        gauss[c] = WG[3] * fc[c];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for c in 0..N {
            let s = f1[c] + f2[c];
            kron[c] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[c] += WG[j / 2] * s;
            }
        }
    }
    let mut err = [0.0; N];
    for c in 0..N {
        kron[c] *= half;
        gauss[c] *= half;
        err[c] = (kron[c] - gauss[c]).norm();
    }
    (kron, err)
}

struct Segment<const N: usize> {
    a: f64,
    b: f64,
    value: [Complex64; N],
    err: [f64; N],
    priority: f64,
}

impl<const N: usize> PartialEq for Segment<N> {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl<const N: usize> Eq for Segment<N> {}
impl<const N: usize> PartialOrd for Segment<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Segment<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

/// Globally adaptive Gauss–Kronrod integration of a vector-valued
/// integrand over [a, b], split first at `breakpoints`.
///
/// Converged when every component's error estimate is below
/// `rel_tol`·|value|. Returns `None` if `max_segments` is exhausted.
pub fn adaptive_kronrod<const N: usize>(
    f: impl Fn(f64) -> [Complex64; N],
    a: f64,
    b: f64,
    breakpoints: &[f64],
    rel_tol: f64,
    max_segments: usize,
) -> Option<[Complex64; N]> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > a && *x < b)
        .collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let zero = Complex64::new(0.0, 0.0);
    let mut heap = BinaryHeap::new();
    let mut total = [zero; N];
    let mut total_err = [0.0; N];
    let mut pending = Vec::new();
    for w in cuts.windows(2) {
        let (value, err) = kronrod(&f, w[0], w[1]);
        for c in 0..N {
            total[c] += value[c];
            total_err[c] += err[c];
        }
        pending.push((w[0], w[1], value, err));
    }
    let scale: [f64; N] = std::array::from_fn(|c| total[c].norm().max(f64::MIN_POSITIVE));
    let priority = |err: &[f64; N]| (0..N).map(|c| err[c] / scale[c]).fold(0.0, f64::max);
    for (a, b, value, err) in pending {
        heap.push(Segment {
            a,
            b,
            priority: priority(&err),
            value,
            err,
        });
    }

    let converged = |total: &[Complex64; N], total_err: &[f64; N]| {
        (0..N).all(|c| total_err[c] <= rel_tol * total[c].norm() || total_err[c] == 0.0)
    };

    while !converged(&total, &total_err) {
        if heap.len() >= max_segments {
            return None;
        }
        let seg = heap.pop()?;
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            return None;
        }
        for c in 0..N {
            total[c] -= seg.value[c];
            total_err[c] -= seg.err[c];
        }
        for (lo, hi) in [(seg.a, mid), (mid, seg.b)] {
            let (value, err) = kronrod(&f, lo, hi);
            for c in 0..N {
                total[c] += value[c];
                total_err[c] += err[c];
            }
            heap.push(Segment {
                a: lo,
                b: hi,
                priority: priority(&err),
                value,
                err,
            });
        }
        // Re-sum errors occasionally to stop cancellation drift.
        if heap.len() % 256 == 0 {
            total_err = [0.0; N];
            for s in heap.iter() {
                for c in 0..N {
                    total_err[c] += s.err[c];
                }
            }
        }
    }
    Some(total)
}
