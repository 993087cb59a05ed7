//! Implementations of the CLI subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::Result;
use num_complex::Complex64;
use serde_json::json;

use bstlab::acceptance::{AcceptanceConfig, Suite, run_criterion};
use bstlab::config::{OutputFormat, RunConfig};
use bstlab::harness::{ReplicateSpec, par_samples, summarize};
use bstlab::report::SuiteReport;
use bstlab_core::bst::DepthChain;
use bstlab_core::exact::{
    expected_profile_recurrence, profile_depth_budget, quicksort_moments,
};
use bstlab_core::martingale::{
    bst_derivative_martingale, bst_martingale, critical_constants, depth_derivative_at_one, eta,
    lq_region, time_component, yule_martingale,
};
use bstlab_core::stats;
use bstlab_core::streams::replicate_stream;
use bstlab_core::tilted::{MarkedDepthChain, Tilt, biased_simulate, spine_statistics};
use bstlab_core::yule::{StopRule, simulate};

/// Output sink: a file or stdout.
pub enum Output {
    File(BufWriter<File>),
    Stdout(io::Stdout),
}

impl Output {
    pub fn create(path: Option<&Path>) -> Result<Self> {
        Ok(match path {
            Some(p) => Output::File(BufWriter::new(File::create(p)?)),
            None => Output::Stdout(io::stdout()),
        })
    }
}

impl Write for Output {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Output::File(f) => f.write(buf),
            Output::Stdout(s) => s.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Output::File(f) => f.flush(),
            Output::Stdout(s) => s.flush(),
        }
    }
}

fn config_json(cfg: &RunConfig) -> serde_json::Value {
    json!({
        "seed": cfg.seed,
        "n": cfg.n,
        "t": cfg.t,
        "z": cfg.z,
        "two_z": cfg.two_z,
        "replicates": cfg.replicates,
    })
}

pub fn constants(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let cc = critical_constants(1e-12);
    let eta_table: Vec<(f64, f64)> = (0..=24)
        .map(|i| {
            let x = i as f64 * 0.25;
            (x, eta(2.0, x))
        })
        .collect();
    // moment-region scan over the real axis for several exponents
    let qs = [1.2, 1.5, 1.8, 2.0];
    let mut region = Vec::new();
    for &q in &qs {
        let mut x = 0.05;
        while x <= 3.5 + 1e-9 {
            region.push((x, 0.0, q, lq_region(Complex64::new(x, 0.0), q)));
            x += 0.05;
        }
        if let Some((re, im)) = cfg.z_complex {
            region.push((re, im, q, lq_region(Complex64::new(re, im), q)));
        }
    }
    // real-axis boundary of the square-moment region: roots of f(., 2)
    let bisect = |mut lo: f64, mut hi: f64| {
        let f = |x: f64| lq_region(Complex64::new(x, 0.0), 2.0);
        let flo = f(lo);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid) * flo > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let l2_lo = bisect(0.01, 1.0);
    let l2_hi = bisect(3.0, 1.0);

    match cfg.format {
        OutputFormat::Json => {
            let doc = json!({
                "config": config_json(cfg),
                "constants": {
                    "c_prime": cc.c_prime,
                    "c": cc.c,
                    "z_minus": cc.z_minus,
                    "z_plus": cc.z_plus,
                },
                "square_moment_interval": { "lo": l2_lo, "hi": l2_hi },
                "eta": eta_table.iter().map(|&(x, v)| json!({"x": x, "value": v})).collect::<Vec<_>>(),
                "region": region
                    .iter()
                    .map(|&(re, im, q, f)| json!({"z_re": re, "z_im": im, "q": q, "f": f}))
                    .collect::<Vec<_>>(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        OutputFormat::Csv => {
            write!(out, "{}", cfg.echo_header("constants"))?;
            writeln!(out, "# c_prime={:.6} c={:.6}", cc.c_prime, cc.c)?;
            writeln!(out, "# z_minus={:.6} z_plus={:.6}", cc.z_minus, cc.z_plus)?;
            writeln!(out, "# square_moment_interval=({l2_lo:.6},{l2_hi:.6})")?;
            writeln!(out, "record,a,z_im,q,value")?;
            for (x, v) in eta_table {
                writeln!(out, "eta,{x},,,{v}")?;
            }
            for (re, im, q, f) in region {
                writeln!(out, "region,{re:.3},{im},{q},{f}")?;
            }
        }
    }
    Ok(())
}

pub fn simulate_bst(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let mut rng = replicate_stream(cfg.seed, 0);
    let mut chain = DepthChain::with_capacity(cfg.n);
    // running extremal depths
    let mut counts: Vec<u64> = vec![1];
    let mut sat = 0usize;
    let mut height = 0usize;
    write!(out, "{}", cfg.echo_header("simulate bst"))?;
    writeln!(out, "n,d,saturation,height")?;
    for step in 0..cfg.n {
        let d = chain.step(&mut rng) as usize;
        if counts.len() <= d + 1 {
            counts.resize(d + 2, 0);
        }
        counts[d] -= 1;
        counts[d + 1] += 2;
        height = height.max(d + 1);
        while counts[sat] == 0 {
            sat += 1;
        }
        writeln!(out, "{},{},{},{}", step + 1, d, sat, height)?;
    }
    Ok(())
}

pub fn simulate_yule(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let mut rng = replicate_stream(cfg.seed, 0);
    let path = simulate(StopRule::AtLeaves(cfg.n + 1), &mut rng);
    write!(out, "{}", cfg.echo_header("simulate yule"))?;
    writeln!(out, "n,tau,scaled_count")?;
    for (i, &tau) in path.times().iter().enumerate() {
        let n = i + 1;
        writeln!(out, "{n},{tau},{}", n as f64 * (-tau).exp())?;
    }
    Ok(())
}

pub fn simulate_biased(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let tilt = tilt_from(cfg)?;
    let mut rng = replicate_stream(cfg.seed, 0);
    let mut chain = MarkedDepthChain::new();
    write!(out, "{}", cfg.echo_header("simulate biased"))?;
    writeln!(out, "n,spine_depth")?;
    for step in 0..cfg.n {
        chain.step(tilt, &mut rng);
        writeln!(out, "{},{}", step + 1, chain.spine_depth())?;
    }
    Ok(())
}

fn tilt_from(cfg: &RunConfig) -> Result<Tilt> {
    Tilt::new(cfg.two_z).ok_or_else(|| anyhow::anyhow!("--two-z must be positive"))
}

pub fn profile(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let n = cfg.n;
    let mut rng = replicate_stream(cfg.seed, 0);
    let mut chain = DepthChain::with_capacity(n);
    chain.run_to(n, &mut rng);
    let profile = chain.profile();
    let expected = expected_profile_recurrence(n, profile_depth_budget(n));
    let ln_n = (n as f64).ln();
    let hi = expected
        .iter()
        .rposition(|&e| e > 1e-9)
        .unwrap_or(0)
        .max(profile.support().map(|(_, h)| h as usize).unwrap_or(0));
    let mart = |k: usize| {
        if k >= 1 && n >= 2 {
            bst_martingale(&profile, k as f64 / (2.0 * ln_n)).unwrap_or(f64::NAN)
        } else {
            f64::NAN
        }
    };
    match cfg.format {
        OutputFormat::Json => {
            let mut counts = serde_json::Map::new();
            for (k, c) in profile.iter() {
                counts.insert(k.to_string(), json!(c));
            }
            let mut expected_map = serde_json::Map::new();
            for (k, &e) in expected.iter().enumerate().take(hi + 1) {
                if e > 1e-12 {
                    expected_map.insert(k.to_string(), json!(e));
                }
            }
            let doc = json!({
                "config": config_json(cfg),
                "counts": counts,
                "expected": expected_map,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        OutputFormat::Csv => {
            write!(out, "{}", cfg.echo_header("profile"))?;
            writeln!(out, "k,count,expected,ratio,martingale")?;
            let mut total = 0u64;
            for k in 0..=hi {
                let count = profile.count(k as u32);
                total += count;
                let e = expected.get(k).copied().unwrap_or(0.0);
                let ratio = if e > 0.0 { count as f64 / e } else { 0.0 };
                writeln!(out, "{k},{count},{e},{ratio},{}", mart(k))?;
            }
            writeln!(out, "# total_count={total} (= n+1 = {})", n + 1)?;
        }
    }
    Ok(())
}

pub fn martingale(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let n = cfg.n;
    let mut rng = replicate_stream(cfg.seed, 0);
    let path = simulate(StopRule::AtLeaves(n + 1), &mut rng);
    let mut checkpoints: Vec<usize> = (0..)
        .map(|i| 1usize << i)
        .take_while(|&m| m < n)
        .collect();
    checkpoints.push(n);
    write!(out, "{}", cfg.echo_header("martingale"))?;
    writeln!(
        out,
        "n,tau,z,discrete,derivative,time_component,continuous,residual"
    )?;
    for &m in &checkpoints {
        let tau = path.jump_time(m).expect("simulated to n");
        let prof = path.profile_at_jump(m).expect("simulated to n");
        for &z in &cfg.z {
            let disc = bst_martingale(&prof, z)
                .map_err(|e| anyhow::anyhow!("z = {z}: {e}"))?;
            let deriv = bst_derivative_martingale(&prof, z)
                .map_err(|e| anyhow::anyhow!("z = {z}: {e}"))?;
            let tc = time_component(m as u64, tau, z)
                .map_err(|e| anyhow::anyhow!("z = {z}: {e}"))?;
            let cont = yule_martingale(&prof, tau, z);
            let residual = (cont - tc * disc).abs() / cont.abs().max(f64::MIN_POSITIVE);
            writeln!(out, "{m},{tau},{z},{disc},{deriv},{tc},{cont},{residual}")?;
        }
    }
    Ok(())
}

pub fn quicksort(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let n = cfg.n;
    let spec = ReplicateSpec::new(cfg.seed, cfg.replicates);
    let values = par_samples(spec, |_, rng| {
        let mut chain = DepthChain::with_capacity(n);
        chain.run_to(n, rng);
        depth_derivative_at_one(chain.external_path_length(), n as u64)
    });
    let summary = summarize(&values);
    let (_, target_var) = quicksort_moments();
    write!(out, "{}", cfg.echo_header("quicksort"))?;
    writeln!(
        out,
        "# mean={} std_error={} variance={} target_variance={}",
        summary.mean,
        summary.std_error,
        stats::variance(&values),
        target_var
    )?;
    writeln!(out, "replicate,value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{i},{v}")?;
    }
    Ok(())
}

pub fn spine(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let tilt = tilt_from(cfg)?;
    let n = cfg.n;
    let spec = ReplicateSpec::new(cfg.seed, cfg.replicates);
    let samples: Vec<u32> = par_samples(spec, |_, rng| {
        let mut chain = MarkedDepthChain::new();
        chain.run_to(n, tilt, rng);
        chain.spine_depth() as u32
    });
    let a_values: Vec<f64> = [1.5, 2.0, 2.5, 3.0]
        .iter()
        .map(|m| m * tilt.two_z())
        .collect();
    let mut rng = replicate_stream(cfg.seed, cfg.replicates as u64 + 1);
    let st = spine_statistics(&samples, n, tilt.two_z(), &a_values, &mut rng);
    match cfg.format {
        OutputFormat::Json => {
            let k_max = (3.0 * tilt.two_z().max(1.0) * (n as f64).ln()).ceil() as usize + 8;
            let pmf = bstlab_core::exact::spine_depth_pmf(n, tilt.two_z(), k_max);
            let doc = json!({
                "config": config_json(cfg),
                "exact_pmf": pmf,
                "stats": {
                    "lln_ratio": st.lln_ratio,
                    "lln_exact_ratio": st.lln_exact_ratio,
                    "clt_ks": st.clt_ks,
                    "ldp": st.ldp.iter().map(|p| json!({
                        "a": p.a,
                        "empirical_rate": p.empirical_rate,
                        "eta_rate": p.eta_rate,
                    })).collect::<Vec<_>>(),
                },
                "samples": samples,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        OutputFormat::Csv => {
            write!(out, "{}", cfg.echo_header("spine"))?;
            writeln!(
                out,
                "# lln_ratio={} lln_exact_ratio={} clt_ks={}",
                st.lln_ratio, st.lln_exact_ratio, st.clt_ks
            )?;
            for p in &st.ldp {
                writeln!(
                    out,
                    "# ldp a={} empirical_rate={} eta_rate={}",
                    p.a, p.empirical_rate, p.eta_rate
                )?;
            }
            writeln!(out, "replicate,spine_depth")?;
            for (i, s) in samples.iter().enumerate() {
                writeln!(out, "{i},{s}")?;
            }
        }
    }
    Ok(())
}

pub fn tilted(cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let tilt = tilt_from(cfg)?;
    let t = cfg.t;
    let spec = ReplicateSpec::new(cfg.seed, cfg.replicates);
    let rows = par_samples(spec, |_, rng| {
        let path = biased_simulate(tilt, StopRule::PastTime(t), rng);
        (path.leaves_at(t), path.spine_depth_at(t))
    });
    let scaled: Vec<f64> = rows.iter().map(|r| r.0 as f64 * (-t).exp()).collect();
    let summary = summarize(&scaled);
    write!(out, "{}", cfg.echo_header("tilted"))?;
    writeln!(
        out,
        "# mean_scaled_count={} expected={}",
        summary.mean,
        (1.0 + tilt.two_z() * (t.exp() - 1.0)) * (-t).exp()
    )?;
    writeln!(out, "replicate,count,spine_depth")?;
    for (i, (count, s)) in rows.iter().enumerate() {
        writeln!(out, "{i},{count},{s}")?;
    }
    Ok(())
}

pub fn verify(
    acc: &AcceptanceConfig,
    suite: Suite,
    criterion: Option<u32>,
    out: &mut Output,
) -> Result<bool> {
    let report = match criterion {
        Some(id) => {
            let c = run_criterion(id, acc)?;
            eprintln!("{}", c.console_line());
            SuiteReport::new(format!("criterion-{id}"), acc.seed, vec![c])
        }
        None => {
            let mut criteria = Vec::new();
            for id in suite.criterion_ids() {
                let c = run_criterion(id, acc)?;
                eprintln!("{}", c.console_line());
                criteria.push(c);
            }
            SuiteReport::new(suite.name(), acc.seed, criteria)
        }
    };
    writeln!(out, "{}", report.to_json())?;
    out.flush()?;
    Ok(report.pass)
}
