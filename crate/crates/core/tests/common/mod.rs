#![allow(dead_code)]

use qqd::design::DesignSpec;
use qqd::search::random_utype;
use qqd::Design64;

/// Squared QQD straight from the kernel definition: mean of the product
/// kernel over all ordered row pairs minus the kernel's double integral.
/// Qualitative kernel: 3/2 on agreement, 5/4 otherwise; quantitative:
/// 3/2 - |t-z| + |t-z|^2 on stored values.
pub fn naive_qqd(design: &Design64) -> f64 {
    let spec = design.spec();
    let n = design.runs();
    let (p, q) = (spec.qualitative(), spec.quantitative());
    let mut integral = 1.0;
    for &s in spec.qualitative_levels() {
        // mean of the qualitative kernel over independent uniform levels
        integral *= (1.5 + 1.25 * (s as f64 - 1.0)) / s as f64;
    }
    // ∫∫ 3/2 - |t-z| + |t-z|^2 = 3/2 - 1/3 + 1/6 = 4/3
    integral *= (4.0f64 / 3.0).powi(q as i32);
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut k = 1.0;
            for f in 0..p {
                k *= if design.qual(i, f) == design.qual(j, f) {
                    1.5
                } else {
                    1.25
                };
            }
            for f in 0..q {
                let d = (design.quant(i, f) - design.quant(j, f)).abs();
                k *= 1.5 - d + d * d;
            }
            total += k;
        }
    }
    total / (n * n) as f64 - integral
}

/// Specs with at most 10^4 level combinations, mixing both factor kinds.
pub fn cross_specs() -> Vec<DesignSpec> {
    [
        (4, 1, 2, vec![4, 2, 2]),
        (8, 1, 2, vec![2, 8, 8]),
        (6, 1, 1, vec![2, 3]),
        (12, 2, 1, vec![2, 3, 4]),
        (9, 1, 2, vec![3, 3, 9]),
        (16, 2, 2, vec![2, 2, 4, 4]),
        (10, 1, 2, vec![2, 5, 10]),
        (12, 0, 3, vec![2, 3, 6]),
        (8, 3, 0, vec![2, 2, 4]),
        (6, 2, 2, vec![3, 2, 6, 3]),
        (16, 1, 2, vec![2, 16, 16]),
        (12, 1, 3, vec![4, 2, 3, 6]),
    ]
    .into_iter()
    .map(|(n, p, q, l)| DesignSpec::new(n, p, q, l).unwrap())
    .collect()
}

/// Specs of the form U(n, s^p 2^q).
pub fn balance_specs() -> Vec<DesignSpec> {
    [
        (4, 1, 2, 4),
        (8, 1, 2, 2),
        (8, 2, 3, 4),
        (12, 2, 2, 3),
        (6, 1, 1, 3),
        (16, 3, 2, 4),
        (8, 0, 4, 2),
    ]
    .into_iter()
    .map(|(n, p, q, s)| DesignSpec::symmetric(n, p, q, s, 2).unwrap())
    .collect()
}

pub fn draw(spec: &DesignSpec, seed: u64) -> Design64 {
    random_utype(spec, seed).unwrap()
}
