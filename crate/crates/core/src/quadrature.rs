//! Adaptive quadrature for complex-valued integrands on a truncated real line.
//!
//! Two independent rule families share one adaptive bisection driver:
//! a 21-point Gauss–Kronrod pair (the production rule) and a 20-point
//! Gauss–Legendre rule whose error is estimated by comparing one panel with
//! its two halves. The second family exists so that results of the first can
//! be cross-checked by a different set of nodes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pulse::GaussianPulse;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Integration runs over `[-truncation, truncation]`.
    pub truncation: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            truncation: 10.0,
            max_subdivisions: 2000,
        }
    }
}

impl QuadSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, truncation: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            truncation,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("{v} must be positive and finite"),
                })
            }
        };
        positive("abs_tol", self.abs_tol)?;
        positive("rel_tol", self.rel_tol)?;
        positive("truncation", self.truncation)?;
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter {
                name: "max_subdivisions",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    pub fn with_truncation(self, truncation: f64) -> Self {
        Self { truncation, ..self }
    }

    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        Self { abs_tol, ..self }
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }

    pub fn with_max_subdivisions(self, max_subdivisions: usize) -> Self {
        Self {
            max_subdivisions,
            ..self
        }
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub err_estimate: f64,
    pub subdivisions: usize,
    pub evaluations: usize,
}

/// Truncation radius covering both the Gaussian spectrum of the pulse and the
/// Lorentzian of the single-photon pole at `-c`.
pub fn default_truncation(pulse: &GaussianPulse, c: Complex64) -> f64 {
    (10.0 / pulse.width()).max(c.re.abs() + 20.0 * c.im.abs())
}

/// Integrates `f` over `[-K, K]` with the Gauss–Kronrod driver.
pub fn integrate<F>(f: F, spec: &QuadSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    integrate_interval(f, -spec.truncation, spec.truncation, spec)
}

pub fn integrate_interval<F>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    adaptive(&f, a, b, spec, &GaussKronrod21)
}

/// Same contract as [`integrate`] but with Gauss–Legendre panels.
pub fn integrate_legendre<F>(f: F, spec: &QuadSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    adaptive(&f, -spec.truncation, spec.truncation, spec, &*GAUSS_LEGENDRE_20)
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

trait Rule {
    /// Returns (estimate, error estimate, evaluations) on `[a, b]`.
    fn apply(&self, f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64, usize);
}

const INITIAL_PANELS: usize = 8;

fn adaptive(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    spec: &QuadSpec,
    rule: &dyn Rule,
) -> Result<QuadResult> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::InvalidParameter {
            name: "interval",
            reason: format!("[{a}, {b}] is not a finite, non-empty interval"),
        });
    }

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let n0 = INITIAL_PANELS.min(spec.max_subdivisions);
    let h = (b - a) / n0 as f64;
    for i in 0..n0 {
        let lo = a + h * i as f64;
        let hi = if i + 1 == n0 { b } else { a + h * (i + 1) as f64 };
        let (value, err, n) = rule.apply(f, lo, hi);
        evaluations += n;
        heap.push(Panel { a: lo, b: hi, value, err });
    }

    let min_width = 64.0 * f64::EPSILON * a.abs().max(b.abs()).max(b - a);
    loop {
        let (value, err) = totals(&heap);
        if !(value.re.is_finite() && value.im.is_finite() && err.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "integrand",
                reason: "produced a non-finite value".into(),
            });
        }
        let target = spec.target(value);
        if err <= target {
            return Ok(QuadResult {
                value,
                err_estimate: err,
                subdivisions: heap.len(),
                evaluations,
            });
        }
        let worst = heap.peek().expect("heap holds at least one panel");
        if heap.len() >= spec.max_subdivisions || worst.b - worst.a < min_width {
            return Err(Error::NonConvergence {
                estimate_re: value.re,
                estimate_im: value.im,
                achieved: err,
                target,
                subdivisions: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err, n) = rule.apply(f, lo, hi);
            evaluations += n;
            heap.push(Panel { a: lo, b: hi, value, err });
        }
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (Complex64, f64) {
    // sum in interval order so that the result does not depend on heap layout
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    panels.iter().fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), p| {
        (v + p.value, e + p.err)
    })
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
#[allow(clippy::excessive_precision)]
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_460,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_958_109_831,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK21[1], [3], ..., [9].
#[allow(clippy::excessive_precision)]
const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

struct GaussKronrod21;

impl Rule for GaussKronrod21 {
    fn apply(&self, f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64, usize) {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let fc = f(center);
        let mut kronrod = fc * WGK21[10];
        let mut gauss = Complex64::new(0.0, 0.0);
        let mut res_abs = fc.norm() * WGK21[10];
        let mut values = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 10];
        for (j, slot) in values.iter_mut().enumerate() {
            let dx = half * XGK21[j];
            let f1 = f(center - dx);
            let f2 = f(center + dx);
            kronrod += (f1 + f2) * WGK21[j];
            res_abs += (f1.norm() + f2.norm()) * WGK21[j];
            if j % 2 == 1 {
                gauss += (f1 + f2) * WG10[j / 2];
            }
            *slot = (f1, f2);
        }
        let mean = kronrod * 0.5;
        let mut res_asc = (fc - mean).norm() * WGK21[10];
        for (j, (f1, f2)) in values.iter().enumerate() {
            res_asc += ((f1 - mean).norm() + (f2 - mean).norm()) * WGK21[j];
        }
        let scale = half.abs();
        let err = rescale_error(
            ((kronrod - gauss) * half).norm(),
            res_abs * scale,
            res_asc * scale,
        );
        (kronrod * half, err, 21)
    }
}

/// QUADPACK error rescaling: sharpens the raw Gauss/Kronrod difference and
/// floors it at the roundoff level of the panel.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err;
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

static GAUSS_LEGENDRE_20: std::sync::LazyLock<GaussLegendre> =
    std::sync::LazyLock::new(|| GaussLegendre::new(20));

impl GaussLegendre {
    /// Nodes and weights from Newton iteration on the Legendre recurrence.
    fn new(n: usize) -> Self {
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        Self { nodes, weights }
    }

    fn panel(&self, f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum_abs = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(center + half * x);
            sum += v * *w;
            sum_abs += v.norm() * w;
        }
        (sum * half, sum_abs * half.abs())
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

impl Rule for GaussLegendre {
    fn apply(&self, f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64, usize) {
        let mid = 0.5 * (a + b);
        let (whole, _) = self.panel(f, a, b);
        let (left, abs_l) = self.panel(f, a, mid);
        let (right, abs_r) = self.panel(f, mid, b);
        let fine = left + right;
        let err = (fine - whole).norm().max(50.0 * f64::EPSILON * (abs_l + abs_r));
        (fine, err, 3 * self.nodes.len())
    }
}
