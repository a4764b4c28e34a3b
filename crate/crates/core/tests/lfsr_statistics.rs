// SPDX-License-Identifier: Apache-2.0

use pccop::rng::{Lfsr21, LFSR_PERIOD};

// Upper 0.1% point of chi-square with 63 degrees of freedom.
const CHI2_63_P001: f64 = 103.44;

#[test]
fn draws_are_centered_and_uniform() {
    for start in [1u32, 0x1ABCDE, 0x0F00F1, 0x155555] {
        let mut l = Lfsr21::new(start).unwrap();
        let n = 1_000_000;
        let mut bins = [0u64; 64];
        let mut sum = 0.0;
        for _ in 0..n {
            let v = l.draw();
            let x = v.to_real();
            assert!((-1.0..1.0).contains(&x));
            sum += x;
            bins[((x + 1.0) * 32.0) as usize] += 1;
        }
        let mean = sum / n as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        let expected = n as f64 / 64.0;
        let chi2: f64 = bins
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < CHI2_63_P001, "chi-square {chi2}");
    }
}

#[test]
fn full_period_visits_every_nonzero_state_once() {
    let mut seen = vec![false; 1 << 21];
    let mut l = Lfsr21::new(0x1ABCDE).unwrap();
    for _ in 0..LFSR_PERIOD {
        l.step();
        let s = l.state() as usize;
        assert!(s != 0 && !seen[s]);
        seen[s] = true;
    }
    assert_eq!(l.state(), 0x1ABCDE);
}
