//! Shared fixtures for the criterion benches.

use homeadv_core::features::DesignMatrix;
use homeadv_core::synth::SimParams;

/// A decade of double round robins for 12 clubs.
pub fn decade_params(seed: u64) -> SimParams {
    let mut params = SimParams::new(12, 10, seed);
    params.beta_home = 0.5;
    params.beta_density = -0.8;
    params.draw_share = 0.25;
    params
}

/// Dense logistic design with `n` rows and `covariates + 1` columns.
pub fn synthetic_design(n: usize, covariates: usize, seed: u64) -> DesignMatrix {
    let mut state = seed
        .wrapping_mul(2862933555777941757)
        .wrapping_add(3037000493);
    let mut rand = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64) / ((1u64 << 53) as f64)
    };
    let p = covariates + 1;
    let mut values = Vec::with_capacity(n * p);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        values.push(1.0);
        let mut eta = 0.3;
        for j in 0..covariates {
            let x = 2.0 * rand() - 1.0;
            values.push(x);
            eta += x * if j % 2 == 0 { 0.6 } else { -0.4 };
        }
        labels.push(f64::from(rand() < 1.0 / (1.0 + (-eta).exp())));
    }
    DesignMatrix {
        column_names: (0..p)
            .map(|j| {
                if j == 0 {
                    "intercept".into()
                } else {
                    format!("x{j}")
                }
            })
            .collect(),
        n_rows: n,
        n_cols: p,
        values,
        labels,
        dropped_columns: Vec::new(),
    }
}
