//! Acceptance checks, one line per criterion. Runs as its own binary so the
//! lines appear in plain `cargo test` output; exits nonzero if any fails.

use std::time::Instant;

use rand::Rng as _;
use univpi::complex::{build, FilteredComplex, Flavor, Simplex};
use univpi::critical::{
    cech_critical_faces, euler_identity_check, forbidden_region_occupied, homology_change_count, isolated_edge_count,
    rips_block_changes, rips_critical_edges, rips_edge_multiplicity,
};
use univpi::density::{sample_binomial, sample_binomial_stream, sample_poisson, DensityModel, PointCloud, Process};
use univpi::error::Error;
use univpi::grid::Metric;
use univpi::harness::{convergence_study, run_universality, write_universality, ExperimentConfig, RmaxSpec};
use univpi::knn::{build_knn, cone_cover, degree_distribution, local_degree, locality_radius};
use univpi::persistence::{cascade_verify, reduce_with, stability_probe, Algorithm};
use univpi::rng;
use univpi::stats::{mean_sd, total_variation};
use univpi::theory::{cech_limit_curve, rips_limit_const, total_pi_mass, vdk_estimate};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn diameter(c: &PointCloud) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            m = m.max(univpi::geometry::dist(c.point(i), c.point(j)));
        }
    }
    m
}

/// The filtration without `s` and everything containing it.
fn without_star(fc: &FilteredComplex, s: &[u32]) -> FilteredComplex {
    let entries = fc
        .iter()
        .filter(|(t, _)| !s.iter().all(|v| t.contains(v)))
        .map(|(t, v)| (Simplex::from_sorted(t), v))
        .collect();
    FilteredComplex::from_entries(fc.flavor(), fc.r_max(), fc.max_dim(), entries).unwrap()
}

fn max_facet_value(fc: &FilteredComplex, s: &Simplex) -> f64 {
    if s.dim() == 0 {
        return 0.0;
    }
    s.facets().map(|f| fc.value(fc.index_of(f.vertices()).unwrap())).fold(0.0, f64::max)
}

fn euler_identity() -> Outcome {
    let t = Instant::now();
    let mut r = rng::stream(1001, 0);
    let mut bad = 0;
    for i in 0..200u64 {
        let d = 2 + (i % 2) as usize;
        let flavor = if i % 4 < 2 { Flavor::Cech } else { Flavor::Rips };
        let k = 1 + ((i / 4) % 2) as usize;
        let n = r.random_range(6..=if k == 2 && d == 3 { 40 } else { 64 });
        let c = sample_binomial(&DensityModel::uniform_cube(d), n, 5000 + i).unwrap();
        if !euler_identity_check(&c, flavor, k).unwrap().pass {
            bad += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(bad == 0 && secs < 120.0, format!("200 instances, {bad} mismatches, limit 120s"))
}

fn cech_morse() -> Outcome {
    let mut bad = 0;
    let mut degenerate = 0;
    for i in 0..100u64 {
        let n = 8 + (i % 33) as usize;
        let c = sample_binomial(&DensityModel::uniform_cube(2), n, 7000 + i).unwrap();
        let r_all = diameter(&c) + 1.0;
        for k in 1..=2 {
            let fc = build(&c, Flavor::Cech, r_all, k + 1).unwrap();
            let red = reduce_with(&fc, Algorithm::Cohomology);
            let rep = cech_critical_faces(&c, k, r_all).unwrap();
            degenerate += rep.degenerate;
            for &r in &[0.05, 0.1, 0.2, 0.4, r_all] {
                let geo: usize = rep.faces.iter().filter(|f| f.radius <= r).map(|f| f.multiplicity).sum();
                if geo != homology_change_count(&red.diagrams, k, r) {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0 && degenerate == 0, format!("100 instances, {bad} mismatches, {degenerate} degenerate faces"))
}

fn rips_link() -> Outcome {
    let mut bad = 0;
    let mut edges = 0;
    for i in 0..100u64 {
        let n = 6 + (i % 20) as usize;
        let d = 2 + (i % 2) as usize;
        let c = sample_binomial(&DensityModel::uniform_cube(d), n, 9000 + i).unwrap();
        let r_all = diameter(&c) + 1.0;
        for k in 1..=3 {
            let fc = build(&c, Flavor::Rips, r_all, k + 1).unwrap();
            let red = reduce_with(&fc, Algorithm::Cohomology);
            let crit = rips_critical_edges(&c, k, r_all, Metric::Euclidean).unwrap();
            for (e, _, plus, minus) in rips_block_changes(&fc, &red.pairing, k) {
                edges += 1;
                let m = crit.faces.iter().find(|f| f.simplex == e).map_or(0, |f| f.multiplicity);
                if m != plus + minus {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0, format!("{edges} edge checks over 100 instances, {bad} mismatches"))
}

fn stability() -> Outcome {
    let mut r = rng::stream(1004, 0);
    let mut bad = 0;
    let mut done = 0;
    let mut i = 0u64;
    while done < 500 {
        i += 1;
        let flavor = if i.is_multiple_of(2) { Flavor::Cech } else { Flavor::Rips };
        let k = 1 + i.is_multiple_of(3) as usize;
        let n = r.random_range(8..=18);
        let c = sample_binomial(&DensityModel::uniform_cube(2), n, 11000 + i).unwrap();
        let fc = build(&c, flavor, 0.45, k + 1).unwrap();
        // Vertex insertions use a fresh vertex; others re-insert a simplex of
        // the complex after deleting its star.
        let target = r.random_range(0..=k + 1);
        let (base, sigma) = if target == 0 {
            (fc.clone(), Simplex::from_sorted(&[n as u32]))
        } else {
            let cands: Vec<usize> = (0..fc.len()).filter(|&j| fc.dim(j) == target).collect();
            if cands.is_empty() {
                continue;
            }
            let s = Simplex::from_sorted(fc.simplex(cands[r.random_range(0..cands.len())]));
            (without_star(&fc, s.vertices()), s)
        };
        let lo = max_facet_value(&base, &sigma);
        let value = lo + r.random::<f64>() * 0.2;
        let alpha = 1.0 + r.random::<f64>();
        let cutoff = if r.random::<bool>() { Some(0.45) } else { None };
        let p = stability_probe(&base, &sigma, value, alpha, k, cutoff).unwrap();
        if !p.pass {
            bad += 1;
        }
        done += 1;
    }
    outcome(bad == 0, format!("500 insertions, {bad} violations"))
}

fn cascade() -> Outcome {
    let mut r = rng::stream(1005, 0);
    let (mut bad, mut done, mut skipped) = (0, 0, 0);
    let mut i = 0u64;
    while done < 200 {
        i += 1;
        let flavor = if i.is_multiple_of(2) { Flavor::Cech } else { Flavor::Rips };
        let n = r.random_range(8..=18);
        let c = sample_binomial(&DensityModel::uniform_cube(2), n, 13000 + i).unwrap();
        let fc = build(&c, flavor, 0.45, 2).unwrap();
        let dim = r.random_range(1..=2);
        let cands: Vec<usize> = (0..fc.len()).filter(|&j| fc.dim(j) == dim).collect();
        if cands.is_empty() {
            continue;
        }
        let s = Simplex::from_sorted(fc.simplex(cands[r.random_range(0..cands.len())]));
        let base = without_star(&fc, s.vertices());
        let value = max_facet_value(&base, &s) + r.random::<f64>() * 0.3;
        match cascade_verify(&base, &s, value) {
            Ok(rep) => {
                if !rep.pass() {
                    bad += 1;
                }
                done += 1;
            }
            Err(Error::NotNegative) => skipped += 1,
            Err(e) => panic!("{e}"),
        }
    }
    outcome(bad == 0, format!("200 negative insertions ({skipped} positive skipped), {bad} violations"))
}

fn forbidden_region() -> Outcome {
    let mut bad = 0;
    let mut occupied = 0;
    for i in 0..100u64 {
        let n = 10 + (i % 16) as usize;
        let c = sample_binomial(&DensityModel::uniform_cube(2), n, 15000 + i).unwrap();
        for a in 0..n {
            for b in a + 1..n {
                if forbidden_region_occupied(&c, a, b) {
                    occupied += 1;
                    for k in 1..=3 {
                        if rips_edge_multiplicity(&c, a, b, k, Metric::Euclidean).unwrap() != 0 {
                            bad += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(bad == 0 && occupied > 0, format!("{occupied} occupied edges, {bad} violations"))
}

fn figure1() -> Outcome {
    let t = Instant::now();
    let cfg = ExperimentConfig {
        d: 2,
        k: 1,
        flavor: Flavor::Cech,
        process: Process::Binomial { n: 5000 },
        densities: vec![
            DensityModel::uniform_cube(2),
            DensityModel::annulus_beta(2, 0.2, 0.6, 2.0),
            DensityModel::standard_gaussian(2),
        ],
        seeds: (1..=5).collect(),
        r_max: RmaxSpec::default(),
        alpha_grid: vec![1.0, 1.5, 2.0],
        outputs: None,
    };
    let rep = run_universality(&cfg).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let ks: Vec<String> =
        rep.pairwise.iter().map(|e| format!("{}/{} D={:.4} crit={:.4}", e.a, e.b, e.statistic, e.critical)).collect();
    let sizes: Vec<usize> = rep.densities.iter().map(|d| d.pooled_count).collect();
    outcome(rep.pass && secs < 900.0, format!("pooled {sizes:?}; {}; limit 900s", ks.join("; ")))
}

fn rips_constant() -> Outcome {
    let target = rips_limit_const(2, 1, 0, 0, 0).unwrap().f_star;
    let nu = 5000.0;
    let per: Vec<f64> = (0..10u64)
        .map(|s| {
            let c = sample_poisson(&DensityModel::uniform_cube(2), nu, 17000 + s).unwrap();
            isolated_edge_count(&c, (12.0 / nu).sqrt(), Metric::Torus { side: 1.0 }) as f64 / nu
        })
        .collect();
    let (m, sd) = mean_sd(&per);
    let rel = (m - target) / target;
    outcome(rel.abs() <= 0.05, format!("{m:.5} ± {:.5} vs {target:.5} ({:+.2}%)", sd / 10f64.sqrt(), 100.0 * rel))
}

fn cech_curve() -> Outcome {
    let (v21, _) = vdk_estimate(2, 1, 1_000_000, 1009).unwrap();
    let u = DensityModel::uniform_cube(2);
    let nu = 5000.0;
    let lambdas = [0.5, 1.0, 2.0, 4.0];
    let mut sim = [0.0; 4];
    for s in 0..10u64 {
        let c = sample_poisson(&u, nu, 19000 + s).unwrap();
        let rep = cech_critical_faces(&c, 1, (4.0 / nu).sqrt()).unwrap();
        for (acc, p) in sim.iter_mut().zip(rep.curve(&lambdas, nu)) {
            *acc += p.f as f64 / nu / 10.0;
        }
    }
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (l, s) in lambdas.iter().zip(sim) {
        let th = cech_limit_curve(*l, &u, 1, v21).unwrap();
        worst = worst.max(((s - th) / th).abs());
        parts.push(format!("λ={l}: {s:.4}/{th:.4}"));
    }
    outcome(worst <= 0.05, format!("{}; worst {:.2}%", parts.join(", "), 100.0 * worst))
}

fn knn_universality() -> Outcome {
    let k = 2;
    let cover = cone_cover(2).unwrap();
    let bound = cover.degree_bound(k);
    let models = [
        DensityModel::uniform_cube(2),
        DensityModel::standard_gaussian(2),
        DensityModel::annulus_beta(2, 0.2, 0.6, 2.0),
    ];
    let mut r = rng::stream(1010, 0);
    let mut hist = vec![vec![0.0; bound - k + 1]; models.len()];
    let (mut bound_bad, mut local_bad, mut local_checked, mut unbounded) = (0, 0, 0, 0);
    for (mi, m) in models.iter().enumerate() {
        for s in 0..10u64 {
            let c = sample_binomial_stream(m, 5000, 21000 + s, mi as u64).unwrap();
            let g = build_knn(&c, k).unwrap();
            bound_bad += (0..c.len()).filter(|&i| !(k..=bound).contains(&g.degree(i))).count();
            if let Ok(p) = degree_distribution(&g, bound) {
                for (h, f) in hist[mi].iter_mut().zip(p.fractions()) {
                    *h += f / 10.0;
                }
            }
            let mut checked = 0;
            while checked < 334 {
                let i = r.random_range(0..c.len());
                match locality_radius(&c, i, &cover, k) {
                    Ok(rad) => {
                        if local_degree(&c, i, k, rad).unwrap() != g.degree(i) {
                            local_bad += 1;
                        }
                        checked += 1;
                    }
                    Err(_) => unbounded += 1,
                }
            }
            local_checked += checked;
        }
    }
    let tv =
        [total_variation(&hist[0], &hist[1]), total_variation(&hist[0], &hist[2]), total_variation(&hist[1], &hist[2])];
    let pass = tv.iter().all(|&t| t <= 0.02) && bound_bad == 0 && local_bad == 0;
    outcome(
        pass,
        format!(
            "TV {:.4}/{:.4}/{:.4}; {bound_bad} bound violations; locality {local_bad} of {local_checked} wrong ({unbounded} uncertified draws skipped)",
            tv[0], tv[1], tv[2]
        ),
    )
}

fn convergence() -> Outcome {
    let target = total_pi_mass(&[rips_limit_const(2, 1, 0, 0, 0).unwrap().f_star]);
    let cfg = ExperimentConfig {
        d: 2,
        k: 1,
        flavor: Flavor::Rips,
        process: Process::Binomial { n: 500 },
        densities: vec![DensityModel::uniform_cube(2)],
        seeds: (0..10).map(|s| 23000 + s).collect(),
        r_max: RmaxSpec::default(),
        alpha_grid: vec![1.0],
        outputs: None,
    };
    let rows = convergence_study(&cfg, &[500.0, 1000.0, 2000.0, 4000.0]).unwrap();
    let dist: Vec<f64> = rows.iter().map(|r| (r.mean - target).abs()).collect();
    let monotone = dist.windows(2).all(|w| w[1] < w[0]);
    let last = dist[dist.len() - 1] / target;
    let means: Vec<String> = rows.iter().map(|r| format!("{:.4}", r.mean)).collect();
    outcome(
        monotone && last <= 0.10,
        format!("means [{}] vs {target:.5}; final off {:.1}%", means.join(", "), 100.0 * last),
    )
}

fn determinism() -> Outcome {
    let cfg = ExperimentConfig {
        d: 2,
        k: 1,
        flavor: Flavor::Rips,
        process: Process::Poisson { nu: 600.0 },
        densities: vec![DensityModel::uniform_cube(2), DensityModel::standard_gaussian(2)],
        seeds: vec![3, 4],
        r_max: RmaxSpec::default(),
        alpha_grid: vec![1.0, 2.0],
        outputs: None,
    };
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    write_universality(&run_universality(&cfg).unwrap(), &a).unwrap();
    // Second run from the serialized config, as a manifest re-run would.
    let manifest = serde_json::to_string(&cfg).unwrap();
    let again = ExperimentConfig::from_json(&manifest).unwrap();
    write_universality(&run_universality(&again).unwrap(), &b).unwrap();
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let same = names.iter().all(|f| std::fs::read(a.join(f)).unwrap() == std::fs::read(b.join(f)).unwrap());
    outcome(same && names.len() == 4, format!("{} files compared byte for byte", names.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("euler/morse count identity", euler_identity),
        ("cech morse consistency", cech_morse),
        ("rips link formula", rips_link),
        ("stability under one insertion", stability),
        ("cascade structure", cascade),
        ("forbidden region", forbidden_region),
        ("figure 1 universality (KS)", figure1),
        ("rips k=1 constant on the torus", rips_constant),
        ("cech F_1 curve vs formula", cech_curve),
        ("k-NN degree universality", knn_universality),
        ("convergence of total mass", convergence),
        ("determinism", determinism),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {} ({:.1}s)", i + 1, o.detail, t.elapsed().as_secs_f64());
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
