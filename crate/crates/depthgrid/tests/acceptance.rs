//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them).
//!
//! Criterion 7 needs real Middlebury 2006 depth maps, which are not
//! redistributable here; it skips itself unless `DEPTHGRID_MIDDLEBURY_DIR`
//! points at a directory of PGM depth maps.

use std::num::NonZeroUsize;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use depthgrid::anfis::{self, AnfisModel, Dataset, Gaussian, Normalization, Rule, TrainConfig};
use depthgrid::bench::{self, refdata, BenchConfig, TableFormat};
use depthgrid::filters::{
    builtin_filter, dc_gain, lagrange_coefficients, rational, FilterKind, FilterSpec,
};
use depthgrid::holefill::{detect_holes, fill_holes, FillKernel};
use depthgrid::image::{DepthImage, RealImage};
use depthgrid::interp::{clamp_margin, downsample_real, upsample_bruteforce, upsample_real};
use depthgrid::metrics::{mse_real_with_margin, psnr, psnr_from_mse};
use depthgrid::synth::{synth_real, Combine, SynthKind, SyntheticSpec};

struct Criterion {
    number: u32,
    what: &'static str,
    started: Instant,
}

impl Criterion {
    fn start(number: u32, what: &'static str) -> Self {
        Self {
            number,
            what,
            started: Instant::now(),
        }
    }

    fn pass(self) {
        println!(
            "criterion {:02} PASS - {} ({:.1} ms)",
            self.number,
            self.what,
            self.started.elapsed().as_secs_f64() * 1000.0
        );
    }

    fn skip(self, why: &str) {
        println!(
            "criterion {:02} SKIP - {} ({})",
            self.number, self.what, why
        );
    }
}

#[test]
fn c01_lagrange_reproduces_grid_adaptive_taps() {
    let c = Criterion::start(
        1,
        "4-node half-sample Lagrange taps are (-1,9,9,-1)/16 exactly",
    );
    let coeffs = lagrange_coefficients(&[-1, 0, 1, 2], &rational(1, 2)).unwrap();
    let expect = vec![
        rational(-1, 16),
        rational(9, 16),
        rational(9, 16),
        rational(-1, 16),
    ];
    assert_eq!(coeffs, expect);
    assert_eq!(coeffs, builtin_filter(FilterKind::Grid4).taps());
    c.pass();
}

#[test]
fn c02_dc_gain_suite() {
    let c = Criterion::start(
        2,
        "built-in filters have exact unit gain; misprinted taps rejected",
    );
    for kind in FilterKind::ALL {
        let gain = builtin_filter(kind).dc_gain();
        assert_eq!(gain, rational(1, 1), "{kind}");
    }
    // The misprinted 6-tap variant with a leading -1 sums to 15/16 and must
    // fail the FilterSpec invariant.
    let misprint: Vec<_> = [-1i64, -5, 20, 20, -5, 1]
        .iter()
        .map(|&n| rational(n, 32))
        .collect();
    assert_eq!(dc_gain(&misprint), rational(15, 16));
    assert!(FilterSpec::new("misprint", misprint, vec![-2, -1, 0, 1, 2, 3]).is_err());
    c.pass();
}

#[test]
fn c03_oracle_equivalence() {
    let c = Criterion::start(3, "separable upsampling matches brute-force 2D evaluation");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..50 {
        let width = rng.random_range(9..=17);
        let height = rng.random_range(9..=17);
        let image = RealImage::from_fn(width, height, |_, _| rng.random_range(0.0..255.0)).unwrap();
        for kind in FilterKind::ALL {
            let filter = builtin_filter(kind);
            let separable = upsample_real(&image, &filter, 1, 1).unwrap();
            let direct = upsample_bruteforce(&image, &filter, 1, 1).unwrap();
            for (a, b) in separable.samples().iter().zip(direct.samples()) {
                assert!((a - b).abs() <= 1e-9, "case {case} {kind}: {a} vs {b}");
            }
        }
    }
    c.pass();
}

#[test]
fn c04_polynomial_reproduction() {
    let c = Criterion::start(
        4,
        "grid4 reproduces separable cubics (interior), linear average does not",
    );
    let spec = SyntheticSpec::new(
        SynthKind::Polynomial {
            row_coeffs: vec![40.0, 3.0, -0.5, 0.02],
            col_coeffs: vec![35.0, 2.0, -0.3, 0.015],
            combine: Combine::Mul,
        },
        33,
        33,
        65535,
    );
    let original = synth_real(&spec).unwrap();
    let down = downsample_real(&original).unwrap();

    let grid4 = builtin_filter(FilterKind::Grid4);
    let up = upsample_real(&down, &grid4, 1, 1).unwrap();
    let grid4_mse = mse_real_with_margin(&original, &up, clamp_margin(&grid4, 1)).unwrap();
    assert!(grid4_mse < 1e-9, "grid4 interior mse {grid4_mse}");

    let linear = builtin_filter(FilterKind::LinearAverage);
    let up = upsample_real(&down, &linear, 1, 1).unwrap();
    let linear_mse = mse_real_with_margin(&original, &up, clamp_margin(&linear, 1)).unwrap();
    assert!(linear_mse > 1e-6, "linear interior mse {linear_mse}");
    c.pass();
}

#[test]
fn c05_psnr_formula_checks() {
    let c = Criterion::start(
        5,
        "PSNR formula values, infinity sentinel, and form agreement",
    );
    let db = psnr_from_mse(1.0, 255);
    assert!((db - 48.1308).abs() <= 1e-3, "{db}");

    let img = DepthImage::new(4, 3, 255, (0..12).map(|i| i as u16 * 3).collect()).unwrap();
    let q = psnr(&img, &img).unwrap();
    assert_eq!(q.mse, 0.0);
    assert!(q.psnr_db.is_infinite() && q.psnr_db > 0.0);

    for mse in [1e-4, 0.37, 1.0, 9.5, 650.0, 65025.0] {
        let ten = 10.0 * (255.0f64 * 255.0 / mse).log10();
        let twenty = 20.0 * (255.0 / mse.sqrt()).log10();
        assert!((ten - twenty).abs() <= 1e-12);
        assert!((psnr_from_mse(mse, 255) - ten).abs() <= 1e-12);
    }
    c.pass();
}

#[test]
fn c06_holefill_properties() {
    let c = Criterion::start(
        6,
        "hole filling: idempotence, nested blocks, bit-preservation",
    );
    let passes = NonZeroUsize::new(64).unwrap();
    let kernel = FillKernel::binomial();

    // Idempotence on hole-free input.
    let clean = DepthImage::new(6, 5, 255, (1..=30).map(|i| i as u16).collect()).unwrap();
    let (out, report) = fill_holes(&clean, &kernel, passes);
    assert_eq!(out, clean);
    assert_eq!(report.passes_run, 0);

    // Nested 3x3 block in a constant field closes in exactly two passes.
    let mut samples = vec![50u16; 81];
    for row in 3..6 {
        for col in 3..6 {
            samples[row * 9 + col] = 0;
        }
    }
    let block = DepthImage::new(9, 9, 255, samples).unwrap();
    let (out, report) = fill_holes(&block, &kernel, passes);
    assert_eq!(report.passes_run, 2);
    assert_eq!(report.holes_remaining, 0);
    assert!(out.samples().iter().all(|&s| s == 50));

    // 100 random hole patterns: non-hole pixels survive bit-exactly.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let width = rng.random_range(4..12);
        let height = rng.random_range(4..12);
        let samples: Vec<u16> = (0..width * height)
            .map(|_| {
                if rng.random_bool(0.25) {
                    0
                } else {
                    rng.random_range(1..=255)
                }
            })
            .collect();
        let image = DepthImage::new(width, height, 255, samples.clone()).unwrap();
        let (filled, _) = fill_holes(&image, &kernel, passes);
        for (before, after) in samples.iter().zip(filled.samples()) {
            if *before != 0 {
                assert_eq!(before, after);
            }
        }
        assert!(!detect_holes(&filled).any() || detect_holes(&image).count() > 0);
    }
    c.pass();
}

#[test]
fn c07_reference_table_soft_reproduction() {
    let c = Criterion::start(
        7,
        "benchmark over real depth maps ranks the grid-adaptive filter on top",
    );
    let dir = match std::env::var("DEPTHGRID_MIDDLEBURY_DIR") {
        Ok(dir) if !dir.is_empty() => std::path::PathBuf::from(dir),
        _ => {
            let fallback = std::path::Path::new("testdata/middlebury");
            if fallback.is_dir() {
                fallback.to_path_buf()
            } else {
                c.skip("no depth maps present; set DEPTHGRID_MIDDLEBURY_DIR");
                return;
            }
        }
    };

    let outcome = bench::run_suite(&dir, &BenchConfig::default()).unwrap();
    assert!(!outcome.rows.is_empty());

    // Per image, grid4 places within the top two filters.
    let mut names: Vec<&str> = outcome.rows.iter().map(|r| r.image_name.as_str()).collect();
    names.dedup();
    for name in names {
        let mut scored: Vec<(f64, FilterKind)> = outcome
            .rows
            .iter()
            .filter(|r| r.image_name == name)
            .map(|r| (r.psnr_db, r.filter))
            .collect();
        scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let top_two: Vec<FilterKind> = scored.iter().take(2).map(|(_, k)| *k).collect();
        assert!(
            top_two.contains(&FilterKind::Grid4),
            "{name}: grid4 not in top two ({scored:?})"
        );
    }

    // Average ordering matches the published conclusion.
    let avg = |kind: FilterKind| -> f64 {
        outcome
            .summary
            .per_filter_avg
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, v)| *v)
            .expect("filter present")
    };
    assert!(avg(FilterKind::Grid4) >= avg(FilterKind::Avs4));
    assert!(avg(FilterKind::Grid4) >= avg(FilterKind::LinearAverage));
    c.pass();
}

fn random_model(rng: &mut ChaCha8Rng, n_rules: usize, n_inputs: usize) -> AnfisModel {
    let rules = (0..n_rules)
        .map(|_| Rule {
            premise: (0..n_inputs)
                .map(|_| Gaussian {
                    center: rng.random_range(-0.2..1.2),
                    sigma: rng.random_range(0.15..0.8),
                })
                .collect(),
            consequent: (0..=n_inputs)
                .map(|_| rng.random_range(-2.0..2.0))
                .collect(),
        })
        .collect();
    AnfisModel::new(n_inputs, rules, Normalization::identity(n_inputs)).unwrap()
}

#[test]
fn c08_anfis_structural_suite() {
    let c = Criterion::start(
        8,
        "normalized firing strengths and convex-combination bounds",
    );
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut calls = 0;
    while calls < 1000 {
        let n_rules = rng.random_range(1..6);
        let n_inputs = rng.random_range(1..4);
        let model = random_model(&mut rng, n_rules, n_inputs);
        for _ in 0..10 {
            let input: Vec<f64> = (0..n_inputs).map(|_| rng.random_range(-0.5..1.5)).collect();
            let trace = anfis::forward(&model, &input).unwrap();
            let total: f64 = trace.normalized_firing.iter().sum();
            assert!((total - 1.0).abs() <= 1e-12, "sum {total}");

            let min = trace
                .rule_outputs
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            let max = trace
                .rule_outputs
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            let slack = 1e-12 * (1.0 + max.abs().max(min.abs()));
            assert!(trace.output >= min - slack && trace.output <= max + slack);
            calls += 1;
        }
    }

    // Single-rule model: normalization forces the rule's own output.
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let single = random_model(&mut rng, 1, 2);
    for _ in 0..100 {
        let input = vec![rng.random_range(-1.0..2.0), rng.random_range(-1.0..2.0)];
        let trace = anfis::forward(&single, &input).unwrap();
        let expect = single.rules[0].consequent[0] * input[0]
            + single.rules[0].consequent[1] * input[1]
            + single.rules[0].consequent[2];
        assert_eq!(trace.output, expect);
    }

    // All-constant consequents collapse to that constant.
    let mut constant = random_model(&mut rng, 4, 1);
    for rule in &mut constant.rules {
        rule.consequent = vec![0.0, 3.25];
    }
    for _ in 0..100 {
        let input = vec![rng.random_range(-1.0..2.0)];
        let trace = anfis::forward(&constant, &input).unwrap();
        assert!((trace.output - 3.25).abs() <= 1e-12);
    }
    c.pass();
}

#[test]
fn c09_anfis_gradient_check() {
    let c = Criterion::start(
        9,
        "analytic premise gradients match central finite differences",
    );
    let h = 1e-5;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_rules = rng.random_range(1..4);
        let n_inputs = rng.random_range(1..3);
        let model = random_model(&mut rng, n_rules, n_inputs);
        let rows: Vec<(Vec<f64>, f64)> = (0..6)
            .map(|_| {
                (
                    (0..n_inputs).map(|_| rng.random_range(0.0..1.0)).collect(),
                    rng.random_range(-1.0..1.0),
                )
            })
            .collect();
        let data = Dataset::with_identity_normalization(rows.clone()).unwrap();
        let grad = anfis::grad_premise(&model, &data).unwrap();

        let sse = |m: &AnfisModel| -> f64 {
            rows.iter()
                .map(|(x, y)| {
                    let e = anfis::forward(m, x).unwrap().output - y;
                    e * e
                })
                .sum()
        };
        for k in 0..n_rules {
            for i in 0..n_inputs {
                for param in 0..2 {
                    let mut plus = model.clone();
                    let mut minus = model.clone();
                    if param == 0 {
                        plus.rules[k].premise[i].center += h;
                        minus.rules[k].premise[i].center -= h;
                    } else {
                        plus.rules[k].premise[i].sigma += h;
                        minus.rules[k].premise[i].sigma -= h;
                    }
                    let fd = (sse(&plus) - sse(&minus)) / (2.0 * h);
                    let analytic = if param == 0 {
                        grad.rules[k][i].0
                    } else {
                        grad.rules[k][i].1
                    };
                    let tol = 1e-4 * fd.abs().max(1.0);
                    assert!(
                        (analytic - fd).abs() <= tol,
                        "seed {seed} rule {k} input {i} param {param}: {analytic} vs {fd}"
                    );
                }
            }
        }
    }
    c.pass();
}

/// Gaussian elimination with partial pivoting; enough for the 5x5 oracle.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

#[test]
fn c10_anfis_lse_optimality() {
    let c = Criterion::start(
        10,
        "least-squares consequents match a pseudo-inverse oracle",
    );

    // 3 rules, 1 input, 5 points: 9 unknowns, 5 equations. The oracle builds
    // the design matrix from scratch and computes the minimum-norm solution
    // theta = A^T (A A^T)^-1 y by dense elimination.
    let centers = [0.0, 0.5, 1.0];
    let sigma = 0.3;
    let xs = [0.0, 0.25, 0.5, 0.75, 1.0];
    let ys = [0.1, 0.4, 0.35, 0.8, 0.95];

    let rules = centers
        .iter()
        .map(|&center| Rule {
            premise: vec![Gaussian { center, sigma }],
            consequent: vec![0.0, 0.0],
        })
        .collect();
    let model = AnfisModel::new(1, rules, Normalization::identity(1)).unwrap();
    let rows: Vec<(Vec<f64>, f64)> = xs.iter().zip(&ys).map(|(&x, &y)| (vec![x], y)).collect();
    let data = Dataset::with_identity_normalization(rows).unwrap();
    let (solved, info) = anfis::lse_consequents(&model, &data).unwrap();
    assert!(info.rank_deficient());

    // Oracle: memberships and weights recomputed independently.
    let mut a = vec![vec![0.0; 6]; 5];
    for (t, &x) in xs.iter().enumerate() {
        let mu: Vec<f64> = centers
            .iter()
            .map(|&c| (-(x - c) * (x - c) / (2.0 * sigma * sigma)).exp())
            .collect();
        let total: f64 = mu.iter().sum();
        for k in 0..3 {
            let w = mu[k] / total;
            a[t][2 * k] = w * x;
            a[t][2 * k + 1] = w;
        }
    }
    let mut aat = vec![vec![0.0; 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            aat[i][j] = (0..6).map(|k| a[i][k] * a[j][k]).sum();
        }
    }
    let z = solve_dense(aat, ys.to_vec());
    let mut theta = [0.0; 6];
    for (col, slot) in theta.iter_mut().enumerate() {
        *slot = (0..5).map(|t| a[t][col] * z[t]).sum();
    }

    for (k, rule) in solved.rules.iter().enumerate() {
        assert!((rule.consequent[0] - theta[2 * k]).abs() <= 1e-8);
        assert!((rule.consequent[1] - theta[2 * k + 1]).abs() <= 1e-8);
    }

    // Residual orthogonality on random overdetermined instances.
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..20 {
        let n_rules = rng.random_range(1..4);
        let model = random_model(&mut rng, n_rules, 1);
        let rows: Vec<(Vec<f64>, f64)> = (0..24)
            .map(|_| (vec![rng.random_range(0.0..1.0)], rng.random_range(0.0..1.0)))
            .collect();
        let data = Dataset::with_identity_normalization(rows).unwrap();
        let (solved, _) = anfis::lse_consequents(&model, &data).unwrap();
        let mut atr = vec![0.0; 2 * n_rules];
        for (x, y) in data.rows() {
            let trace = anfis::forward(&solved, x).unwrap();
            let residual = y - trace.output;
            for k in 0..n_rules {
                let w = trace.normalized_firing[k];
                atr[2 * k] += w * x[0] * residual;
                atr[2 * k + 1] += w * residual;
            }
        }
        for v in atr {
            assert!(v.abs() <= 1e-8, "{v}");
        }
    }
    c.pass();
}

#[test]
fn c11_anfis_end_to_end_on_bundled_rows() {
    let c = Criterion::start(11, "model fits the bundled 24-row measurement table");
    let data = refdata::dataset();
    assert_eq!(data.len(), 24);

    // Full-data fit.
    let config = TrainConfig {
        epochs: 50,
        n_rules: 9,
        seed: 0,
        ..TrainConfig::default()
    };
    let model = anfis::init_model(&data, &config).unwrap();

    // Initialization places nine distinct anchors with widths at or above
    // the floor.
    let mut anchors: Vec<Vec<u64>> = model
        .rules
        .iter()
        .map(|r| r.premise.iter().map(|g| g.center.to_bits()).collect())
        .collect();
    anchors.sort();
    anchors.dedup();
    assert_eq!(anchors.len(), 9);
    for rule in &model.rules {
        for g in &rule.premise {
            assert!(g.sigma >= 0.05);
        }
    }

    let (_, history) = anfis::train(model, &data, &config).unwrap();
    let final_train = history.last().unwrap().train_rmse;
    assert!(
        final_train <= 0.1,
        "final train rmse {final_train} above 0.1 normalized"
    );

    // 75/25 split.
    let config = TrainConfig {
        holdout_fraction: 0.25,
        ..config
    };
    let model = anfis::init_model(&data, &config).unwrap();
    let (_, history) = anfis::train(model, &data, &config).unwrap();
    let final_holdout = history.last().unwrap().holdout_rmse.unwrap();
    if final_holdout > 0.15 {
        println!(
            "criterion 11 FAIL - holdout rmse {final_holdout:.4} exceeds 0.15 \
             (9 first-order rules carry 27 consequent coefficients against 18 \
             training rows, so the exact minimum-norm consequent solve \
             interpolates training data and held-out behavior is unconstrained; \
             measured minimum over 2000 seeded splits is ~0.20)"
        );
    }
    assert!(
        final_holdout <= 0.15,
        "final holdout rmse {final_holdout} above 0.15 normalized: with 27 \
         consequent coefficients and 18 training rows the least-squares step \
         interpolates the training set exactly (training rmse 0), leaving the \
         premise gradient zero and held-out predictions unconstrained"
    );
    c.pass();
}

#[test]
fn c12_determinism() {
    let c = Criterion::start(
        12,
        "benchmark CSV and trained models are run-to-run identical",
    );

    // Benchmark: identical CSV bytes apart from the wall-time column.
    let dir = tempfile::tempdir().unwrap();
    for (name, coeffs) in [("ramp", vec![10.0, 2.0]), ("bump", vec![80.0, -1.0, 0.4])] {
        let spec = SyntheticSpec::new(
            SynthKind::Polynomial {
                row_coeffs: coeffs,
                col_coeffs: vec![5.0, 1.0],
                combine: Combine::Add,
            },
            13,
            11,
            255,
        )
        .with_holes(vec![(1, 1), (5, 7), (6, 7)]);
        let image = depthgrid::synth::synth_image(&spec).unwrap();
        depthgrid::pgm::save_pgm(
            &image,
            dir.path().join(format!("{name}.pgm")),
            depthgrid::pgm::PgmFormat::Binary,
        )
        .unwrap();
    }
    let strip_wall = |text: &str| -> String {
        text.lines()
            .map(|line| line.rsplit_once(',').unwrap().0.to_owned())
            .collect::<Vec<_>>()
            .join("\n")
    };
    let a = bench::run_suite(dir.path(), &BenchConfig::default()).unwrap();
    let b = bench::run_suite(dir.path(), &BenchConfig::default()).unwrap();
    assert_eq!(
        strip_wall(&bench::export_table(&a.rows, TableFormat::Csv)),
        strip_wall(&bench::export_table(&b.rows, TableFormat::Csv))
    );

    // Training: byte-identical model JSON for the same seed.
    let data = refdata::dataset();
    let config = TrainConfig {
        epochs: 25,
        n_rules: 9,
        seed: 7,
        holdout_fraction: 0.25,
        ..TrainConfig::default()
    };
    let run = || {
        let model = anfis::init_model(&data, &config).unwrap();
        anfis::train(model, &data, &config).unwrap().0.to_json()
    };
    assert_eq!(run(), run());
    c.pass();
}
