//! Acceptance gate: runs every criterion and prints one PASS/FAIL line each.
//! Exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinex::bench::{
    desk_algorithms, desk_datasets, estimate_complexity, normalize_and_rank, pareto_front, ranking_pareto,
    run_benchmark, run_complexity_analysis, spinex_variant, write_pareto_csv, write_ranking_csv, write_runs_csv,
    ClusterAlgorithm, ComplexityGrid, DESK_SEEDS,
};
use spinex::datasets::make_named;
use spinex::engine::{linkage_cut, merge_clusters, multi_level_trace, set_threshold};
use spinex::explain::{build_report_with, nearest_neighbors, Execution};
use spinex::metrics::{calinski_harabasz, completeness, davies_bouldin, homogeneity, silhouette, v_measure};
use spinex::types::canonicalize_labels;
use spinex::{DataMatrix, DecisionLog, SimilarityCache, SimilarityMatrix, SimilarityMethod, Spinex, SpinexConfig, ThresholdSpec};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> std::result::Result<(), String> {
    check(
        elapsed.as_secs_f64() < limit_secs as f64,
        format!("runtime {:.1}s exceeds {limit_secs}s", elapsed.as_secs_f64()),
    )
}

/// Labels 0..k all used, the rest random.
fn random_labels(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut l: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        l.swap(i, j);
    }
    l
}

fn c1_metric_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let n = rng.random_range(4..=30);
        let d = rng.random_range(1..=5);
        let k = rng.random_range(2..=(n - 1).min(6));
        let points: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
        let raw = random_labels(&mut rng, n, k);
        let kt = rng.random_range(1..=5usize.min(n));
        let truth = random_labels(&mut rng, n, kt);
        let x = DataMatrix::from_rows(&points).map_err(|e| e.to_string())?;
        let labels = canonicalize_labels(&raw);
        let pairs = [
            ("silhouette", silhouette(&x, &labels), common::silhouette(&points, &raw)),
            ("calinski_harabasz", calinski_harabasz(&x, &labels), common::calinski_harabasz(&points, &raw)),
            ("davies_bouldin", davies_bouldin(&x, &labels), common::davies_bouldin(&points, &raw)),
            ("homogeneity", homogeneity(&truth, &raw), common::homogeneity(&truth, &raw)),
            ("completeness", completeness(&truth, &raw), common::completeness(&truth, &raw)),
            ("v_measure", v_measure(&truth, &raw), common::v_measure(&truth, &raw)),
        ];
        for (name, got, want) in pairs {
            let got = got.map_err(|e| format!("case {case}: {name} errored: {e}"))?;
            let delta = (got - want).abs();
            worst = worst.max(delta);
            check(delta <= 1e-9, format!("case {case}: {name} = {got}, oracle {want}"))?;
        }
    }
    within(start.elapsed(), 30)?;
    Ok(format!("200 instances, max |delta| = {worst:.2e}"))
}

fn c2_fixtures() -> Outcome {
    let x = DataMatrix::from_column(&[0.0, 1.0, 10.0, 11.0]).map_err(|e| e.to_string())?;
    let l = canonicalize_labels(&[0usize, 0, 1, 1]);
    let s = silhouette(&x, &l).map_err(|e| e.to_string())?;
    let ch = calinski_harabasz(&x, &l).map_err(|e| e.to_string())?;
    let db = davies_bouldin(&x, &l).map_err(|e| e.to_string())?;
    check((s - 0.899749).abs() <= 1e-6, format!("silhouette {s}"))?;
    check((ch - 200.0).abs() <= 1e-9, format!("CH {ch}"))?;
    check((db - 0.1).abs() <= 1e-9, format!("DB {db}"))?;
    Ok(format!("silhouette {s:.6}, CH {ch}, DB {db}"))
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, discrete: bool) -> Vec<Vec<f64>> {
    let mut s = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = if discrete {
                rng.random_range(-2..=10) as f64 / 10.0
            } else {
                rng.random_range(-1.0..1.0)
            };
            s[i][j] = v;
            s[j][i] = v;
        }
    }
    s
}

fn c3_merge_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut multi = 0;
    for case in 0..500 {
        let n = rng.random_range(1..=8);
        let rows = random_symmetric(&mut rng, n, case % 2 == 0);
        let t = rng.random_range(-0.5..1.0);
        let s = SimilarityMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
        let got = merge_clusters(&s, t);
        let want = common::merge_oracle(&rows, t);
        check(
            got.assignments() == want.as_slice(),
            format!("case {case}: got {:?}, oracle {want:?}", got.assignments()),
        )?;
        if got.n_clusters() > 1 && got.n_clusters() < n {
            multi += 1;
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!("500 matrices identical ({multi} with non-trivial partitions)"))
}

fn c4_threshold_rule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let log = DecisionLog::new();
    for case in 0..100 {
        let n = rng.random_range(1..=12);
        let rows = if case % 10 == 0 {
            vec![vec![0.3; n]; n]
        } else {
            random_symmetric(&mut rng, n, case % 3 == 0)
        };
        let s = SimilarityMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
        let got = set_threshold(&s, ThresholdSpec::Auto, &log);
        let want = common::auto_threshold_oracle(&rows.concat());
        check((got - want).abs() <= 1e-12, format!("case {case}: {got} vs oracle {want}"))?;
    }
    Ok("100 matrices within 1e-12".into())
}

fn spinex_labels(cfg: &SpinexConfig, x: &DataMatrix) -> Result<Vec<usize>, String> {
    let mut sp = Spinex::new(cfg.clone()).map_err(|e| e.to_string())?;
    Ok(sp.fit_predict(x).map_err(|e| e.to_string())?.into_assignments())
}

fn c5_quality() -> Outcome {
    let start = Instant::now();
    let cfg = SpinexConfig {
        n_clusters: Some(4),
        ..Default::default()
    };
    let (mut h, mut v) = (0.0, 0.0);
    for seed in 0..10 {
        let ds = make_named("Blobs", seed).map_err(|e| e.to_string())?;
        let truth = ds.truth.clone().ok_or("Blobs has truth")?;
        let pred = spinex_labels(&cfg, &ds.x)?;
        h += common::homogeneity(&truth, &pred);
        v += common::v_measure(&truth, &pred);
    }
    let (h, v) = (h / 10.0, v / 10.0);
    let mut hd = 0.0;
    for seed in 0..10 {
        let ds = make_named("Disjoint Clusters", seed).map_err(|e| e.to_string())?;
        let truth = ds.truth.clone().ok_or("Disjoint Clusters has truth")?;
        hd += common::homogeneity(&truth, &spinex_labels(&cfg, &ds.x)?);
    }
    let hd = hd / 10.0;
    check(h >= 0.90, format!("Blobs mean homogeneity {h:.4} < 0.90"))?;
    check(v >= 0.90, format!("Blobs mean V-measure {v:.4} < 0.90"))?;
    check(hd >= 0.95, format!("Disjoint mean homogeneity {hd:.4} < 0.95"))?;
    within(start.elapsed(), 120)?;
    Ok(format!("Blobs h={h:.4} v={v:.4}; Disjoint h={hd:.4}"))
}

fn c6_linkage_counts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let log = DecisionLog::new();
    let mut cuts = 0;
    for case in 0..50 {
        let n = rng.random_range(2..=20);
        let rows = random_symmetric(&mut rng, n, case % 2 == 0);
        let s = SimilarityMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
        for k in 1..=n {
            let got = linkage_cut(&s, k, &log).n_clusters();
            check(got == k, format!("case {case}: n={n}, k={k} gave {got} clusters"))?;
            cuts += 1;
        }
    }
    Ok(format!("{cuts} cuts exact"))
}

fn c7_multi_level() -> Outcome {
    let within_block = |i: usize, j: usize| (i < 2) == (j < 2);
    let s = SimilarityMatrix::from_fn(4, |i, j| {
        if i == j {
            1.0
        } else if within_block(i, j) {
            0.9
        } else {
            0.1
        }
    })
    .map_err(|e| e.to_string())?;
    let out = multi_level_trace(&s, 0.5, 3).map_err(|e| e.to_string())?;
    check(
        out.labels.assignments() == [0, 0, 1, 1],
        format!("labels {:?}", out.labels.assignments()),
    )?;
    let blocks = [[0usize, 1], [2, 3]];
    let mut hand = [[0.0; 2]; 2];
    for (a, ba) in blocks.iter().enumerate() {
        for (b, bb) in blocks.iter().enumerate() {
            let mut sum = 0.0;
            for &i in ba {
                for &j in bb {
                    sum += s.get(i, j);
                }
            }
            hand[a][b] = sum / 4.0;
        }
    }
    let condensed = out
        .levels
        .first()
        .and_then(|l| l.condensed.clone())
        .ok_or("no condensed matrix after level 1")?;
    check(condensed.n() == 2, format!("condensed size {}", condensed.n()))?;
    for a in 0..2 {
        for b in 0..2 {
            let d = (condensed.get(a, b) - hand[a][b]).abs();
            check(d <= 1e-12, format!("entry ({a},{b}) = {} vs {}", condensed.get(a, b), hand[a][b]))?;
        }
    }
    Ok(format!("labels [0,0,1,1]; level-2 input {:?}", hand))
}

fn c8_pareto() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..1000 {
        let m = rng.random_range(1..=25);
        let k = rng.random_range(1..=6);
        let discrete = case % 2 == 0;
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                (0..k)
                    .map(|_| if discrete { rng.random_range(0..4) as f64 / 3.0 } else { rng.random::<f64>() })
                    .collect()
            })
            .collect();
        let entries: Vec<(String, Vec<f64>)> = rows.iter().enumerate().map(|(i, r)| (format!("a{i}"), r.clone())).collect();
        let got = pareto_front(&entries);
        let want: Vec<String> = common::pareto_oracle(&rows).into_iter().map(|i| format!("a{i}")).collect();
        check(got == want, format!("case {case}: {got:?} vs {want:?}"))?;
    }
    within(start.elapsed(), 10)?;
    Ok("1000 tables match".into())
}

fn c9_complexity() -> Outcome {
    let sizes = [100.0, 200.0, 400.0, 800.0, 1600.0, 3200.0];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_clean: f64 = 0.0;
    let mut worst_noisy: f64 = 0.0;
    for &planted in &[0.0, 1.0, 1.46, 2.0] {
        let clean: Vec<f64> = sizes.iter().map(|n: &f64| 2e-6 * n.powf(planted)).collect();
        let est = estimate_complexity(&sizes, &clean).map_err(|e| e.to_string())?;
        worst_clean = worst_clean.max((est.slope - planted).abs());
        let want_class = match planted {
            p if p == 0.0 => "O(1)",
            p if p == 1.0 => "O(n)",
            p if p == 1.46 => "O(n log n)",
            _ => "O(n^2)",
        };
        check(est.class == want_class, format!("slope {planted}: class {}", est.class))?;
        for _ in 0..20 {
            let noisy: Vec<f64> = clean.iter().map(|t| t * (1.0 + rng.random_range(-0.1..0.1))).collect();
            let e = estimate_complexity(&sizes, &noisy).map_err(|e| e.to_string())?;
            worst_noisy = worst_noisy.max((e.slope - planted).abs());
        }
    }
    check(worst_clean <= 0.05, format!("noise-free error {worst_clean}"))?;
    check(worst_noisy <= 0.15, format!("noisy error {worst_noisy}"))?;

    let start = Instant::now();
    let algs: Vec<Box<dyn ClusterAlgorithm>> = vec![Box::new(spinex_variant("default").map_err(|e| e.to_string())?)];
    let report = run_complexity_analysis(&algs, &ComplexityGrid::desk(), 0);
    check(report.failures.is_empty(), format!("failures: {:?}", report.failures))?;
    check(report.rows.len() == 2, format!("{} per-d rows", report.rows.len()))?;
    let slopes: Vec<String> = report.rows.iter().map(|r| format!("d={}: {:.2} {}", r.d, r.slope, r.class)).collect();
    for r in &report.rows {
        check((0.0..=2.2).contains(&r.slope), format!("SPINEX slope out of range: {slopes:?}"))?;
    }
    Ok(format!(
        "planted max err {worst_clean:.1e} clean / {worst_noisy:.3} noisy; SPINEX {} ({:.0}s)",
        slopes.join(", "),
        start.elapsed().as_secs_f64()
    ))
}

fn bench_bytes(dir: &std::path::Path) -> Result<[Vec<u8>; 3], String> {
    let runs = run_benchmark(&desk_algorithms(), &desk_datasets(), &DESK_SEEDS);
    let ranking = normalize_and_rank(&runs);
    let front = ranking_pareto(&ranking);
    let paths = [dir.join("runs.csv"), dir.join("ranking.csv"), dir.join("pareto.csv")];
    write_runs_csv(&runs, &paths[0]).map_err(|e| e.to_string())?;
    write_ranking_csv(&ranking, &paths[1]).map_err(|e| e.to_string())?;
    write_pareto_csv(&ranking, &front, &paths[2]).map_err(|e| e.to_string())?;
    let read = |p: &std::path::Path| std::fs::read(p).map_err(|e| e.to_string());
    Ok([read(&paths[0])?, read(&paths[1])?, read(&paths[2])?])
}

fn c10_determinism() -> Outcome {
    let start = Instant::now();
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = bench_bytes(a.path())?;
    let second = bench_bytes(b.path())?;
    for (name, (x, y)) in ["runs.csv", "ranking.csv", "pareto.csv"].iter().zip(first.iter().zip(&second)) {
        check(x == y, format!("{name} differs between runs"))?;
    }
    let rows = first[0].iter().filter(|&&c| c == b'\n').count() - 1;
    check(rows == 6 * 6 * 3, format!("{rows} run rows"))?;
    within(start.elapsed(), 300)?;
    Ok(format!("{rows} runs, byte-identical twice in {:.0}s", start.elapsed().as_secs_f64()))
}

fn c11_explainability() -> Outcome {
    // Twelve i.i.d. features so that no other row shares the duplicated
    // row's rank pattern; with few features Spearman legitimately ties at 1.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut rows: Vec<Vec<f64>> = (0..100)
        .map(|_| (0..12).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect())
        .collect();
    rows[37] = rows[5].clone();
    let x = DataMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
    let mut ranks: Vec<Vec<usize>> = rows
        .iter()
        .map(|r| {
            let mut idx: Vec<usize> = (0..12).collect();
            idx.sort_by(|&a, &b| r[a].total_cmp(&r[b]));
            idx
        })
        .collect();
    ranks.remove(37);
    ranks.sort();
    ranks.dedup();
    check(ranks.len() == 99, "fixture has repeated rank patterns")?;
    for method in SimilarityMethod::ALL {
        let nn = nearest_neighbors(&x, 5, 5, method, 1.0).map_err(|e| e.to_string())?;
        check(nn.nearest_neighbors[0] == 37, format!("{method}: top neighbor {}", nn.nearest_neighbors[0]))?;
        check(
            nn.neighbor_contributions[0].contributions.iter().all(|&c| c == 0.0),
            format!("{method}: non-zero contributions"),
        )?;
    }
    let cfg = SpinexConfig {
        enable_similarity_analysis: true,
        enable_neighbor_analysis: true,
        ..Default::default()
    };
    let cache = SimilarityCache::new();
    let log = DecisionLog::new();
    let seq = build_report_with(&x, &cfg, &cache, &log, Execution::Sequential).to_json();
    let par = build_report_with(&x, &cfg, &cache, &log, Execution::Parallel).to_json();
    check(seq == par, "parallel and sequential reports differ")?;
    Ok(format!("duplicate ranked first under 4 methods; reports identical ({} bytes)", seq.len()))
}

fn c12_cache() -> Outcome {
    let ds = make_named("Simple Blobs", 12).map_err(|e| e.to_string())?;
    let mut sp = Spinex::new(SpinexConfig::default()).map_err(|e| e.to_string())?;
    let first = sp.fit_predict(&ds.x).map_err(|e| e.to_string())?;
    let (misses, hits) = (sp.similarity_cache().misses(), sp.similarity_cache().hits());
    let second = sp.fit_predict(&ds.x).map_err(|e| e.to_string())?;
    let (misses2, hits2) = (sp.similarity_cache().misses(), sp.similarity_cache().hits());
    check(misses2 == misses, format!("recomputed: misses {misses} -> {misses2}"))?;
    check(hits2 > hits, format!("no cache hits: {hits} -> {hits2}"))?;
    check(first == second, "labels differ between runs")?;
    Ok(format!("misses stay {misses}, hits {hits} -> {hits2}, labels identical"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("1 metric oracle equivalence", c1_metric_oracle),
        ("2 hand-computed metric fixtures", c2_fixtures),
        ("3 merge oracle", c3_merge_oracle),
        ("4 auto threshold rule", c4_threshold_rule),
        ("5 clustering quality at desk scale", c5_quality),
        ("6 linkage cut cluster counts", c6_linkage_counts),
        ("7 multi-level fixture", c7_multi_level),
        ("8 Pareto oracle", c8_pareto),
        ("9 complexity recovery", c9_complexity),
        ("10 benchmark determinism", c10_determinism),
        ("11 explainability", c11_explainability),
        ("12 similarity cache", c12_cache),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
