//! Criteria for the spine-marked tilted models.

use anyhow::Result;
use num_bigint::BigInt;
use num_traits::One;

use bstlab_core::exact::{
    Rational, rational, sample_tilted_depth, spine_depth_pmf_rational, tilted_depth_pmf,
};
use bstlab_core::stats;
use bstlab_core::streams::replicate_stream;
use bstlab_core::tilted::{
    MarkedDepthChain, Tilt, biased_simulate, change_of_measure_check, ldp_curve, spine_statistics,
};
use bstlab_core::yule::StopRule;

use super::AcceptanceConfig;
use crate::harness::{ReplicateSpec, par_samples};
use crate::report::{CheckReport, CriterionReport};

pub fn c11_spine_tilting(cfg: &AcceptanceConfig) -> Result<CriterionReport> {
    // (a) change-of-measure identity, exact enumeration
    let com_n_max = cfg.usize("c11.com_n_max")?;
    let tilts = [rational(1, 2), rational(1, 1), rational(2, 1), rational(3, 1)];
    let mut com_ok = true;
    let mut com_cases = 0u32;
    for n in 2..=com_n_max {
        for w in &tilts {
            com_cases += 1;
            // normalization
            let (lhs, rhs) = change_of_measure_check(n, w, &|_| Rational::one())?;
            if lhs != Rational::one() || rhs != Rational::one() {
                com_ok = false;
            }
            // spine depth as the statistic, cross-checked against the pmf mean
            let (lhs, rhs) = change_of_measure_check(n, w, &|m| {
                Rational::from(BigInt::from(m.spine_depth()))
            })?;
            let pmf = spine_depth_pmf_rational(n, w);
            let mean: Rational = pmf
                .iter()
                .enumerate()
                .map(|(k, p)| rational(k as i64, 1) * p)
                .sum();
            if lhs != rhs || lhs != mean {
                com_ok = false;
            }
        }
    }

    // (b) simulated spine-depth pmf
    let pmf_n = cfg.usize("c11.pmf_n")?;
    let pmf_two_z = cfg.f64("c11.pmf_two_z")?;
    let pmf_replicates = cfg.usize("c11.pmf_replicates")?;
    let tilt = Tilt::new(pmf_two_z).expect("positive tilt");
    let spec = ReplicateSpec::new(cfg.sub_seed(11, 0), pmf_replicates);
    let depths = par_samples(spec, |_, rng| {
        let mut chain = MarkedDepthChain::new();
        chain.run_to(pmf_n, tilt, rng);
        chain.spine_depth() as usize
    });
    let k_max = (3.0 * pmf_two_z.max(1.0) * (pmf_n as f64).ln()).ceil() as usize + 8;
    let mut cells = tilted_depth_pmf(pmf_n, pmf_two_z, k_max);
    let body: f64 = cells.iter().sum();
    cells.push((1.0 - body).max(0.0));
    let mut counts = vec![0u64; cells.len()];
    for d in depths {
        counts[d.min(k_max + 1)] += 1;
    }
    let chi2 = stats::chi_square(&counts, &cells)?;

    // (c) LLN at the unbiased tilt, against the exact finite-n mean
    let lln_n = cfg.usize("c11.lln_n")?;
    let lln_samples = cfg.usize("c11.lln_samples")?;
    let spec = ReplicateSpec::new(cfg.sub_seed(11, 1), lln_samples);
    let lln_draws: Vec<u32> = par_samples(spec, |_, rng| sample_tilted_depth(lln_n, 1.0, rng));
    let mut rng = replicate_stream(cfg.sub_seed(11, 2), 0);
    let lln_stats = spine_statistics(&lln_draws, lln_n, 1.0, &[], &mut rng);

    // (d) CLT at a strong tilt with exact standardization
    let clt_n = cfg.usize("c11.clt_n")?;
    let clt_samples = cfg.usize("c11.clt_samples")?;
    let clt_two_z = cfg.f64("c11.clt_two_z")?;
    let spec = ReplicateSpec::new(cfg.sub_seed(11, 3), clt_samples);
    let clt_draws: Vec<u32> =
        par_samples(spec, |_, rng| sample_tilted_depth(clt_n, clt_two_z, rng));
    let mut rng = replicate_stream(cfg.sub_seed(11, 4), 0);
    let clt_stats = spine_statistics(&clt_draws, clt_n, clt_two_z, &[], &mut rng);

    // (e) large-deviation rate from the exact pmf
    let ldp_n = cfg.usize("c11.ldp_n")?;
    let ldp_two_z = cfg.f64("c11.ldp_two_z")?;
    let a = 2.0 * ldp_two_z;
    let point = ldp_curve(ldp_n, ldp_two_z, &[a])[0];

    let checks = vec![
        CheckReport::exact(
            format!("change-of-measure identity exact for n <= {com_n_max}, four tilts"),
            com_ok,
        )
        .with_detail(format!("{com_cases} enumerations, two statistics each")),
        CheckReport::from_test(
            format!("simulated spine-depth pmf matches the exact law at n = {pmf_n}"),
            chi2,
            cfg.alpha,
        ),
        CheckReport::stat_at_most(
            format!("LLN ratio against the exact mean at n = {lln_n}"),
            (lln_stats.lln_ratio - lln_stats.lln_exact_ratio).abs(),
            cfg.f64("c11.lln_tol")?,
        ),
        CheckReport::stat_at_most(
            format!("KS distance to the normal limit at n = {clt_n}, tilt {clt_two_z}"),
            clt_stats.clt_ks,
            cfg.f64("c11.clt_ks_max")?,
        )
        .with_detail("exact standardization with lattice jitter"),
        CheckReport::stat_at_most(
            format!("tail rate vs the Poisson rate function at a = {a}, n = {ldp_n}"),
            (point.empirical_rate - point.eta_rate).abs(),
            cfg.f64("c11.ldp_tol")?,
        )
        .with_detail(format!(
            "exact-pmf rate {:.4} vs rate function {:.4}; log-scale prefactors decay \
             like 1/ln n, so the finite-size rate sits above the limit at desk sizes",
            point.empirical_rate, point.eta_rate
        )),
    ];
    Ok(CriterionReport::new(
        11,
        "spine tilting: change of measure, depth law, LLN/CLT/LDP",
        checks,
    ))
}

pub fn c12_tilted_counts(cfg: &AcceptanceConfig) -> Result<CriterionReport> {
    // (a) leaf count minus one is negative binomial under the tilt
    let t = cfg.f64("c12.nb_t")?;
    let two_z = cfg.f64("c12.nb_two_z")?;
    let replicates = cfg.usize("c12.nb_replicates")?;
    let tilt = Tilt::new(two_z).expect("positive tilt");
    let spec = ReplicateSpec::new(cfg.sub_seed(12, 0), replicates);
    let counts_raw = par_samples(spec, |_, rng| {
        let path = biased_simulate(tilt, StopRule::PastTime(t), rng);
        path.leaves_at(t) - 1
    });
    let p = (-t).exp();
    let k_max = 80usize;
    let mut cells: Vec<f64> = (0..k_max as u64)
        .map(|k| stats::negative_binomial_pmf(two_z, p, k))
        .collect();
    cells.push((1.0 - cells.iter().sum::<f64>()).max(0.0));
    let mut counts = vec![0u64; cells.len()];
    for c in counts_raw {
        counts[c.min(k_max)] += 1;
    }
    let chi2 = stats::chi_square(&counts, &cells)?;

    // (b) rescaled count converges to a gamma law of shape 2z
    let gamma_t = cfg.f64("c12.gamma_t")?;
    let gamma_replicates = cfg.usize("c12.gamma_replicates")?;
    let spec = ReplicateSpec::new(cfg.sub_seed(12, 1), gamma_replicates);
    let scaled = par_samples(spec, |_, rng| {
        let path = biased_simulate(tilt, StopRule::PastTime(gamma_t), rng);
        path.leaves_at(gamma_t) as f64 * (-gamma_t).exp()
    });
    let ks = stats::ks_test(&scaled, stats::gamma_cdf(two_z))?;

    let checks = vec![
        CheckReport::from_test(
            format!("count minus one is negative binomial (order {two_z}) at t = {t}"),
            chi2,
            cfg.alpha,
        ),
        CheckReport::stat_at_most(
            format!("KS distance of the rescaled count to the gamma law at t = {gamma_t}"),
            ks.statistic,
            cfg.f64("c12.gamma_ks_max")?,
        ),
    ];
    Ok(CriterionReport::new(
        12,
        "tilted leaf counts: negative binomial law and gamma limit",
        checks,
    ))
}
