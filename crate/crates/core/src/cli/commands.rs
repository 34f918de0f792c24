use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::report::{Report, RunConfig};
use super::{BbarArg, Command, ModeArg, RunArgs, DEFAULT_SEED, EXIT_CHECK_FAILED, EXIT_OK};
use crate::analysis::{
    clone_fidelity_formula, compare, fingerprint, output_cut_entropy, pair_grouping_cuts, ppt_min_eigenvalue, smolin_spectrum,
    stabilizer_suite, symmetry_report, unlock_ubes, unlock_ubes_sampled, verify_appendix_b, verify_appendix_c, Check, Relation,
};
use crate::channels::{beta_weighted_channel, smolin_like, ChannelResource, ChannelSpec, PRESETS};
use crate::error::{Error, Result};
use crate::measurement::swap_identity_check;
use crate::protocols::{
    clone_state, run_mm_ghz, run_mm_multiqudit, run_ric, run_telecloning, synth_distributed_state, teleportation_identity_check,
    BbarSource, CloneFamily, Mode, RicRun, TelecloneOptions,
};
use crate::statealg::{guard_density, PureState, Register};
use crate::C64;

const DEFAULT_TRIALS: usize = 100;
const INPUT_STREAM: u64 = 0;
const ENGINE_STREAM: u64 = 1;
const FIRST_TRIAL_STREAM: u64 = 2;

/// Generator for one independent stream of a run's seed.
fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

struct Ctx {
    d: usize,
    n: usize,
    l: Option<usize>,
    spec: Option<ChannelSpec>,
    mode: ModeArg,
    trials: usize,
    seed: u64,
    tol: Option<f64>,
    out: PathBuf,
    bbar: BbarArg,
}

impl Ctx {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn input(&self) -> Result<Vec<C64>> {
        let mut rng = stream_rng(self.seed, INPUT_STREAM);
        Ok(PureState::random(Register::new(self.d, ["in"])?, &mut rng)?.into_amps())
    }

    fn exhaustive(&self) -> bool {
        self.mode == ModeArg::AllBranches
    }

    /// Runs `f` once over the whole tree, or once per trial with its own stream.
    fn runs<T>(&self, mut f: impl FnMut(Mode, &mut ChaCha8Rng) -> Result<Vec<T>>) -> Result<Vec<T>> {
        match self.mode {
            ModeArg::AllBranches => f(Mode::AllBranches { budget: self.trials }, &mut stream_rng(self.seed, ENGINE_STREAM)),
            ModeArg::Sample => {
                let mut out = Vec::with_capacity(self.trials);
                for i in 0..self.trials as u64 {
                    out.extend(f(Mode::Sample { trials: 1 }, &mut stream_rng(self.seed, FIRST_TRIAL_STREAM + i))?);
                }
                Ok(out)
            }
        }
    }
}

fn resolve_channel(name: &str, d: Option<usize>, n: Option<usize>) -> Result<ChannelSpec> {
    if PRESETS.contains(&name) {
        return ChannelSpec::preset(name, d.unwrap_or(2), n.unwrap_or(2));
    }
    let text = std::fs::read_to_string(name).map_err(|e| {
        Error::InvalidArgument(format!("`{name}` is neither a preset ({}) nor a readable file: {e}", PRESETS.join(", ")))
    })?;
    let spec = ChannelSpec::from_json(&text)?;
    for (flag, given, file) in [("d", d, spec.d), ("N", n, spec.n_parties)] {
        if let Some(g) = given {
            if g != file {
                return Err(Error::InvalidArgument(format!("--{flag} {g} conflicts with {flag} = {file} in {name}")));
            }
        }
    }
    Ok(spec)
}

fn resolve(name: &str, args: &RunArgs, default_channel: Option<&str>, default_out: &str) -> Result<(Ctx, RunConfig)> {
    let channel = args.channel.clone().or(default_channel.map(str::to_string));
    let spec = channel.as_deref().map(|c| resolve_channel(c, args.d, args.n)).transpose()?;
    let d = spec.as_ref().map_or(args.d.unwrap_or(2), |s| s.d);
    let n = spec.as_ref().map_or(args.n.unwrap_or(2), |s| s.n_parties);
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("N must be at least 2 (got {n})")));
    }
    let trials = args.trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(Error::InvalidArgument("--trials must be at least 1".into()));
    }
    let mode = args.mode.unwrap_or(if args.trials.is_some() { ModeArg::Sample } else { ModeArg::AllBranches });
    if let Some(t) = args.tol {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidArgument(format!("--tol must be non-negative (got {t})")));
        }
    }
    let ctx = Ctx {
        d,
        n,
        l: args.l,
        spec,
        mode,
        trials,
        seed: args.seed.unwrap_or(DEFAULT_SEED),
        tol: args.tol,
        out: args.out.clone().unwrap_or_else(|| PathBuf::from(default_out)),
        bbar: args.bbar,
    };
    let config = RunConfig {
        command: name.to_string(),
        d,
        n,
        l: args.l,
        channel,
        mode: match mode {
            ModeArg::Sample => "sample".into(),
            ModeArg::AllBranches => "all-branches".into(),
        },
        trials,
        seed: ctx.seed,
        tol: args.tol,
    };
    Ok((ctx, config))
}

pub(super) fn dispatch(cmd: &Command) -> Result<i32> {
    let (name, args, channel, out) = match cmd {
        Command::Teleclone(a) => ("teleclone", a, None, "-"),
        Command::Ric(a) => ("ric", a, Some("ghz"), "-"),
        Command::RicMmGhz(a) => ("ric-mm-ghz", a, Some("bell-product"), "-"),
        Command::RicMmMulti(a) => ("ric-mm-multi", a, None, "-"),
        Command::Verify(a) => ("verify", a, None, "-"),
        Command::Stabilizers(a) => ("stabilizers", a, Some("ghz"), "-"),
        Command::Unlock(a) => ("unlock", a, None, "-"),
        Command::Report(a) => ("report", a, Some("ghz"), "qric-report.json"),
    };
    let (ctx, config) = resolve(name, args, channel, out)?;
    log::info!("{name}: d = {}, N = {}, seed = {}", ctx.d, ctx.n, ctx.seed);
    let mut report = Report::new(config, args.timings);
    match cmd {
        Command::Teleclone(_) => report.timed("teleclone", |r| teleclone(&ctx, r))?,
        Command::Ric(_) => report.timed("ric", |r| ric(&ctx, r))?,
        Command::RicMmGhz(_) => report.timed("ric-mm-ghz", |r| mm_ghz(&ctx, r))?,
        Command::RicMmMulti(_) => report.timed("ric-mm-multi", |r| mm_multi(&ctx, r))?,
        Command::Verify(_) => report.timed("verify", |r| verify(&ctx, r))?,
        Command::Stabilizers(_) => report.timed("stabilizers", |r| stabilizers(&ctx, r))?,
        Command::Unlock(_) => report.timed("unlock", |r| unlock(&ctx, r))?,
        Command::Report(_) => {
            report.timed("verify", |r| verify(&ctx, r))?;
            let tele = Ctx { mode: ModeArg::AllBranches, spec: None, ..clone_ctx(&ctx) };
            report.timed("teleclone", |r| teleclone(&tele, r))?;
            report.timed("ric", |r| ric(&ctx, r))?;
            report.timed("stabilizers", |r| stabilizers(&ctx, r))?;
        }
    }
    finish(&report, &ctx.out)
}

fn clone_ctx(c: &Ctx) -> Ctx {
    Ctx {
        d: c.d,
        n: c.n,
        l: c.l,
        spec: c.spec.clone(),
        mode: c.mode,
        trials: c.trials,
        seed: c.seed,
        tol: c.tol,
        out: c.out.clone(),
        bbar: c.bbar,
    }
}

fn finish(report: &Report, out: &Path) -> Result<i32> {
    report.write(out)?;
    report.summarize();
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn spec(ctx: &Ctx) -> Result<&ChannelSpec> {
    ctx.spec.as_ref().ok_or_else(|| Error::InvalidArgument("this subcommand needs --channel".into()))
}

fn teleclone(ctx: &Ctx, report: &mut Report) -> Result<()> {
    let want = clone_fidelity_formula(ctx.d, ctx.n)?;
    let input = PureState::qudit(ctx.d, "in", &ctx.input()?)?;
    let branches = ctx.runs(|mode, rng| run_telecloning(&input, ctx.n, TelecloneOptions { mode, ancilla_corrections: true }, rng))?;
    let clone_f: Vec<f64> = branches.iter().flat_map(|b| b.clone_fidelities.iter().copied()).collect();
    let min = clone_f.iter().copied().fold(f64::INFINITY, f64::min);
    let max = clone_f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let collective = branches.iter().map(|b| b.collective_fidelity).fold(f64::INFINITY, f64::min);
    let tol = ctx.tol(1e-9);
    report.check(Check::eq("teleclone.clone_fidelity.min", min, want, tol));
    report.check(Check::eq("teleclone.clone_fidelity.max", max, want, tol));
    report.check(Check::eq("teleclone.collective_fidelity.min", collective, 1.0, tol));
    if ctx.exhaustive() {
        let p: f64 = branches.iter().map(|b| b.transcript.branch_probability).sum();
        report.check(Check::eq("teleclone.probability_total", p, 1.0, tol));
    }
    report.result(
        "teleclone",
        &json!({ "formula": want, "branches": branches.len(), "clone_fidelity_min": min, "clone_fidelity_max": max }),
    )?;
    report.transcripts(branches.iter().map(|b| &b.transcript));
    Ok(())
}

fn record_run(ctx: &Ctx, report: &mut Report, prefix: &str, run: &RicRun, bits: f64) -> Result<()> {
    let tol = ctx.tol(1e-9);
    let ok = run.branches.iter().filter(|b| (b.transcript.fidelity - 1.0).abs() <= tol).count();
    report.check(Check::eq(format!("{prefix}.fidelity.min"), run.min_fidelity(), 1.0, tol));
    if run.coverage.exhaustive {
        report.check(Check::eq(format!("{prefix}.probability_total"), run.total_probability(), 1.0, tol));
    }
    let bits_gap = run.branches.iter().map(|b| (b.transcript.total_bits() - bits).abs()).fold(0.0, f64::max);
    report.check(Check::deviation(format!("{prefix}.classical_bits"), bits_gap, ctx.tol(1e-12)));
    report.result(
        prefix,
        &json!({
            "branches": run.branches.len(),
            "successful": ok,
            "min_fidelity": run.min_fidelity(),
            "coverage": run.coverage,
            "classical_bits": bits,
        }),
    )?;
    report.transcripts(run.branches.iter().map(|b| &b.transcript));
    Ok(())
}

fn merge(runs: Vec<RicRun>) -> Option<RicRun> {
    let mut it = runs.into_iter();
    let mut first = it.next()?;
    for r in it {
        first.coverage.visited += r.coverage.visited;
        first.branches.extend(r.branches);
    }
    Some(first)
}

fn ric(ctx: &Ctx, report: &mut Report) -> Result<()> {
    let channel = spec(ctx)?.build()?;
    let x = ctx.input()?;
    let clone = clone_state(&x, ctx.n)?;
    let reference = PureState::qudit(ctx.d, "phi", &x)?;
    let runs = ctx.runs(|mode, rng| Ok(vec![run_ric(&clone, &reference, &channel, mode, rng)?]))?;
    let run = merge(runs).expect("at least one run");
    let bits = (2 * ctx.n - 1) as f64 * 2.0 * (ctx.d as f64).log2();
    record_run(ctx, report, "ric", &run, bits)
}

fn legs(ctx: &Ctx) -> Result<usize> {
    let l = ctx.l.unwrap_or(2);
    if l == 0 {
        return Err(Error::InvalidArgument("--L must be at least 1".into()));
    }
    Ok(l)
}

fn mm_ghz(ctx: &Ctx, report: &mut Report) -> Result<()> {
    let s = spec(ctx)?;
    let table = s.pure_table()?;
    let l = legs(ctx)?;
    let x = ctx.input()?;
    let runs = ctx.runs(|mode, rng| Ok(vec![run_mm_ghz(&x, ctx.n, l, s.u, s.v, &table, mode, rng)?]))?;
    let run = merge(runs).expect("at least one run");
    let bits = (2 * ctx.n - 1) as f64 * 2.0 * (ctx.d as f64).log2();
    record_run(ctx, report, "ric_mm_ghz", &run, bits)
}

fn mm_multi(ctx: &Ctx, report: &mut Report) -> Result<()> {
    let l = legs(ctx)?;
    if l > ctx.n {
        return Err(Error::InvalidArgument(format!("--L {l} exceeds --N {}", ctx.n)));
    }
    let x = ctx.input()?;
    let family;
    let (beta, source) = if l < ctx.n {
        family = CloneFamily::extract(ctx.d, ctx.n - l + 1)?;
        let src = match ctx.bbar {
            BbarArg::Clone => BbarSource::CloneFamily(&family),
            BbarArg::Random => BbarSource::RandomOrthonormal { seed: ctx.seed },
        };
        (family.beta().clone(), src)
    } else {
        let mut e0 = vec![0.0; ctx.d];
        e0[0] = 1.0;
        (crate::channels::BetaVector::new(e0)?, BbarSource::RandomOrthonormal { seed: ctx.seed })
    };
    let distributed = synth_distributed_state(&x, ctx.n, l, &beta, source)?;
    let reference = PureState::qudit(ctx.d, "phi", &x)?;
    let runs = ctx.runs(|mode, rng| Ok(vec![run_mm_multiqudit(&distributed, &reference, ctx.n, l, mode, rng)?]))?;
    let run = merge(runs).expect("at least one run");
    let bits = (2 * ctx.n - l) as f64 * 2.0 * (ctx.d as f64).log2();
    record_run(ctx, report, "ric_mm_multi", &run, bits)
}

fn stabilizers(ctx: &Ctx, report: &mut Report) -> Result<()> {
    let channel = spec(ctx)?.build()?;
    let (u, v) = channel.residues();
    let table = match &channel {
        ChannelResource::Pure { state, .. } => stabilizer_suite(state, ctx.d, ctx.n)?,
        ChannelResource::Mixed(_) => stabilizer_suite(&channel.density()?, ctx.d, ctx.n)?,
    };
    for e in &table.entries {
        let want = crate::opsbasis::omega_pow(ctx.d, (v * e.m) as i64 - (u * e.n) as i64);
        let dev = (C64::new(e.re, e.im) - want).norm();
        report.check(Check::deviation(format!("stabilizer[{},{}]", e.m, e.n), dev, ctx.tol(1e-9)));
    }
    report.result("stabilizers", &table)
}

fn unlock(ctx: &Ctx, report: &mut Report) -> Result<()> {
    let r = match guard_density("Smolin-like channel", ctx.d, 2 * ctx.n) {
        Ok(_) => unlock_ubes(ctx.d, ctx.n)?,
        Err(_) => unlock_ubes_sampled(ctx.d, ctx.n, ctx.trials, &mut stream_rng(ctx.seed, ENGINE_STREAM))?,
    };
    unlock_checks(ctx, report, &r)?;
    report.result("unlock", &r)
}

fn unlock_checks(ctx: &Ctx, report: &mut Report, r: &crate::analysis::UnlockReport) -> Result<()> {
    let tol = ctx.tol(1e-9);
    report.check(Check::eq("unlock.purity.min", r.min_purity(), 1.0, tol));
    report.check(Check::deviation("unlock.entropy_gap", r.max_entropy_gap(), tol));
    let bf = r.outcomes.iter().map(|o| o.bell_fidelity).fold(f64::INFINITY, f64::min);
    report.check(Check::eq("unlock.bell_fidelity.min", bf, 1.0, tol));
    if r.exhaustive {
        report.check(Check::eq("unlock.probability_total", r.total_probability(), 1.0, ctx.tol(1e-10)));
    }
    Ok(())
}

/// Every index tuple in `0..d` of length 4, or `samples` random ones.
fn quads(d: usize, exhaustive: bool, samples: usize, rng: &mut ChaCha8Rng) -> Vec<[usize; 4]> {
    use rand::Rng;
    if exhaustive {
        (0..d.pow(4)).map(|i| [i / d.pow(3), (i / d / d) % d, (i / d) % d, i % d]).collect()
    } else {
        (0..samples).map(|_| std::array::from_fn(|_| rng.random_range(0..d))).collect()
    }
}

fn verify(ctx: &Ctx, report: &mut Report) -> Result<()> {
    let (d, n) = (ctx.d, ctx.n);
    let mut rng = stream_rng(ctx.seed, ENGINE_STREAM);
    let x = ctx.input()?;

    let mut swap = 0.0f64;
    for [m, nn, mp, np] in quads(d, d <= 3, 50, &mut rng) {
        swap = swap.max(swap_identity_check(d, m, nn, mp, np)?);
    }
    report.check(Check::deviation("identity.bell_swap", swap, ctx.tol(1e-12)));

    let mut tele = 0.0f64;
    for [m, nn, k, kp] in quads(d, d <= 3, 50, &mut rng) {
        tele = tele.max(teleportation_identity_check(&x, m, nn, k, kp)?);
    }
    report.check(Check::deviation("identity.teleportation", tele, ctx.tol(1e-12)));

    let family = CloneFamily::extract(d, n)?;
    let mut recon = 0.0f64;
    for _ in 0..20 {
        let xi = PureState::random(Register::new(d, ["in"])?, &mut rng)?.into_amps();
        recon = recon.max(family.reconstruction_deviation(&xi)?);
    }
    report.check(Check::deviation("decomposition.reconstruction", recon, ctx.tol(1e-9)));
    report.check(Check::deviation("decomposition.orthogonality", family.orthogonality_deviation(), ctx.tol(1e-12)));
    report.check(Check::deviation("decomposition.covariance", family.covariance_deviation()?, ctx.tol(1e-12)));
    report.check(Check::deviation("decomposition.bell_support", family.bell_support_leakage()?, ctx.tol(1e-12)));
    report.result("decomposition", &json!({ "beta": family.beta().values() }))?;

    report.check(Check::deviation("equivalence.ghz_reduction", verify_appendix_b(d, n)?, ctx.tol(1e-12)));
    let c = verify_appendix_c(d, n)?;
    if d == 2 {
        report.check(Check::eq("equivalence.telecloning_beta.overlap", c.overlap, 1.0, ctx.tol(1e-9)));
    } else {
        report.check(Check::new("equivalence.telecloning_beta.overlap", c.overlap, 1.0 - 1e-6, 0.0, Relation::Le));
    }
    report.result("telecloning_beta_overlap", &c)?;

    let beta_channel = beta_weighted_channel(&family, family.beta())?;
    let mut tables = serde_json::Map::new();
    for name in ["ghz", "beta", "bell-product", "smolin", "mixed-uniform"] {
        let channel = ChannelSpec::preset(name, d, n)?.build()?;
        let table = match &channel {
            ChannelResource::Pure { state, .. } => {
                let e = output_cut_entropy(state, n)?;
                report.check(Check::eq(format!("entanglement.output_cut.{name}"), e, (d as f64).log2(), ctx.tol(1e-8)));
                stabilizer_suite(state, d, n)?
            }
            ChannelResource::Mixed(_) => stabilizer_suite(&channel.density()?, d, n)?,
        };
        report.check(Check::deviation(format!("stabilizers.{name}"), table.max_deviation(0, 0), ctx.tol(1e-9)));
        tables.insert(name.into(), serde_json::to_value(&table)?);
    }
    report.result("stabilizers", &tables)?;

    let spectrum = smolin_spectrum(d, n)?;
    report.check(Check::eq("smolin.rank", spectrum.rank as f64, spectrum.expected_rank as f64, 0.0));
    report.check(Check::deviation("smolin.flatness", spectrum.flatness, ctx.tol(1e-10)));

    let rho = smolin_like(d, n)?;
    let mut ppt = f64::INFINITY;
    for cut in pair_grouping_cuts(n)? {
        ppt = ppt.min(ppt_min_eigenvalue(&rho, &cut)?);
    }
    report.check(Check::new("smolin.ppt_min_eigenvalue", ppt, 0.0, ctx.tol(1e-10), Relation::Ge));

    let sym = symmetry_report(&rho, n)?;
    report.check(Check::deviation("smolin.symmetry.within_groups", sym.max_within(), ctx.tol(1e-10)));
    if d == 2 {
        report.check(Check::deviation("smolin.symmetry.cross_group", sym.cross.distance, ctx.tol(1e-10)));
    } else {
        report.check(Check::new("smolin.symmetry.cross_group", sym.cross.distance, 1e-3, 0.0, Relation::Ge));
    }
    report.result("symmetry", &sym)?;

    let unlocked = unlock_ubes(d, n)?;
    unlock_checks(ctx, report, &unlocked)?;

    let ghz = crate::channels::ghz_channel(d, n)?;
    let distinct = compare(&fingerprint(&ghz)?, &fingerprint(&beta_channel)?);
    report.check(Check::eq("fingerprint.ghz_vs_beta_distinguishable", if distinct { 1.0 } else { 0.0 }, 1.0, 0.0));
    Ok(())
}
