mod common;

use common::{cross_specs, draw};
use qqd::design::level_to_unit;
use qqd::discrepancy::qqd_squared;
use qqd::kernel::KernelFactor;
use qqd::{Config64, Design64};

#[test]
fn kernel_row_sums() {
    let config = Config64::default();
    for s in 2..=12usize {
        let sf = s as f64;
        let qual = KernelFactor::<f64>::qualitative(s, &config);
        let quant = KernelFactor::<f64>::quantitative(s);
        for i in 0..s {
            let q_row: f64 = (0..s).map(|j| *qual.get(i, j)).sum();
            let z_row: f64 = (0..s).map(|j| *quant.get(i, j)).sum();
            assert!((q_row - (1.5 + 1.25 * (sf - 1.0))).abs() < 1e-12, "qualitative s={s}");
            assert!(
                (z_row - (4.0 * sf / 3.0 + 1.0 / (6.0 * sf))).abs() < 1e-12,
                "quantitative s={s}"
            );
        }
    }
}

fn remap(d: &Design64, f: impl Fn(usize, usize) -> usize) -> Design64 {
    let spec = d.spec();
    let (p, q) = (spec.qualitative(), spec.quantitative());
    let qual: Vec<Vec<usize>> = (0..d.runs()).map(|i| d.qual_row(i).to_vec()).collect();
    let quant: Vec<Vec<f64>> = (0..d.runs())
        .map(|i| {
            (0..q)
                .map(|k| {
                    let s = spec.level(p + k);
                    level_to_unit(f(d.quant_level(i, k).unwrap(), s), s).unwrap()
                })
                .collect()
        })
        .collect();
    Design64::from_raw(spec.clone(), &qual, &quant).unwrap()
}

#[test]
fn wrap_symmetries() {
    let config = Config64::default();
    for spec in cross_specs().iter().filter(|s| s.quantitative() > 0) {
        for seed in 0..5 {
            let d = draw(spec, seed);
            let base = qqd_squared(&d, &config);
            let reflected = remap(&d, |l, s| s - 1 - l);
            assert!((qqd_squared(&reflected, &config) - base).abs() < 1e-12);
            for shift in 1..4 {
                let shifted = remap(&d, |l, s| (l + shift) % s);
                assert!((qqd_squared(&shifted, &config) - base).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn row_permutation_invariance() {
    let config = Config64::default();
    for spec in cross_specs() {
        let d = draw(&spec, 3);
        let order: Vec<usize> = (0..d.runs()).rev().collect();
        let permuted = d.select_rows(&order).unwrap();
        assert!((qqd_squared(&permuted, &config) - qqd_squared(&d, &config)).abs() < 1e-12);
    }
}
