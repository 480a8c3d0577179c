//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1) in decreasing order; the odd-indexed ones
// (and 0) are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Sum of the per-panel `|K15 - G7|` estimates.
    pub abs_error: f64,
    pub panels: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = r * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * r,
        error: ((kronrod - gauss) * r).abs(),
    }
}

/// Integrates `f` over `[a, b]`, split first at the interior `breaks`,
/// bisecting the worst panel until the summed error estimate is at most
/// `abs_tol` or `max_panels` is reached (an error).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Quadrature(format!("invalid interval [{a}, {b}]")));
    }
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![a];
    edges.extend(cuts);
    edges.push(b);
    let mut panels: Vec<Panel> = edges.windows(2).map(|w| gk15(&f, w[0], w[1])).collect();
    let mut evaluations = 15 * panels.len();
    loop {
        let (value, error) = panels
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite() {
            return Err(Error::Quadrature(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if error <= abs_tol {
            return Ok(QuadResult {
                value,
                abs_error: error,
                panels: panels.len(),
                evaluations,
            });
        }
        if panels.len() >= max_panels {
            let worst = panels.iter().max_by(|x, y| x.error.total_cmp(&y.error)).unwrap();
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}] after {} panels: error {error:.3e} > {abs_tol:.1e}, \
                 worst panel [{}, {}] with {:.3e}",
                panels.len(),
                worst.a,
                worst.b,
                worst.error
            )));
        }
        let (i, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .unwrap();
        let Panel { a: pa, b: pb, .. } = panels.swap_remove(i);
        let mid = 0.5 * (pa + pb);
        if !(mid > pa && mid < pb) {
            return Err(Error::Quadrature(format!(
                "panel [{pa}, {pb}] cannot be split further"
            )));
        }
        panels.push(gk15(&f, pa, mid));
        panels.push(gk15(&f, mid, pb));
        evaluations += 30;
    }
}
