//! One function per subcommand. Work over the function suite runs in
//! parallel; pieces are merged back in suite order so reports do not depend
//! on the thread count.

use anyhow::{bail, Context, Result};
use critdecay::decay::{constants_for_domain, level_contents, near_extremal_envelope, DecayReport};
use critdecay::io::write_grid_csv;
use critdecay::oneil::{
    default_samples, verify_holder, verify_holder_l1, verify_lemma14, verify_lemma15, HolderExponents, ProductInstance,
};
use critdecay::potentials::{
    fractional_maximal_default, hedberg_bound_check, truncated_kernel_weak_norm, truncated_kernel_weak_norm_empirical,
    truncated_kernel_weak_norm_sup, HedbergParams,
};
use critdecay::real::{e_pow_inv_e, log_space};
use critdecay::rearrangement::{calderon_compare, distribution_form_quasinorm, hardy_check, normalize_unit_lorentz};
use critdecay::*;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::output::{Output, RunReport};
use crate::LemmaId;

/// Output of one unit of work.
#[derive(Default)]
struct Piece {
    results: Vec<Value>,
    checks: Vec<Report>,
    csv: Vec<(String, Vec<u8>)>,
}

impl Piece {
    fn result(&mut self, v: impl Serialize) -> Result<()> {
        self.results.push(serde_json::to_value(v)?);
        Ok(())
    }

    fn csv(&mut self, name: String, write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        write(&mut buf)?;
        self.csv.push((name, buf));
        Ok(())
    }
}

fn merge(report: &mut RunReport, out: &mut Output, pieces: Vec<Piece>) -> Result<()> {
    for p in pieces {
        report.results.extend(p.results);
        for c in p.checks {
            report.check(c);
        }
        for (name, bytes) in p.csv {
            out.csv(&name, &bytes)?;
        }
    }
    Ok(())
}

fn par_pieces<I: Sync, F>(items: &[I], f: F) -> Result<Vec<Piece>>
where
    F: Fn(&I) -> Result<Piece> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

fn qlabel(q: Exponent<f64>) -> String {
    match q {
        Exponent::Infinite => "inf".into(),
        Exponent::Finite(v) => format!("{v}"),
    }
}

fn params_json(cfg: &ExperimentConfig) -> Value {
    json!({
        "domain": cfg.domain,
        "grid_file": cfg.grid_file,
        "params": cfg.params,
        "tgrid": cfg.tgrid,
        "tolerances": cfg.tolerances,
    })
}

fn start(name: &str, cfg: &ExperimentConfig) -> Result<RunReport> {
    RunReport::new(name, params_json(cfg))
}

type Suite = Vec<(String, GridFunction<f64>)>;

fn suite(cfg: &ExperimentConfig) -> Result<(Domain<f64>, Suite)> {
    cfg.functions()
}

pub fn rearrange(cfg: &ExperimentConfig, out: &mut Output) -> Result<RunReport> {
    let mut report = start("rearrange", cfg)?;
    let (_, fs) = suite(cfg)?;
    let pieces = par_pieces(&fs, |(label, f)| {
        let mut p = Piece::default();
        let fs = decreasing_rearrangement(f);
        let mut check = Report::new("|{|f| > y}| = |{f* > y}|", 0.0).param("function", label.as_str());
        for &y in fs.levels().iter().chain([&0.0]) {
            check.record(y, (distribution(f, y) - fs.distribution(y)).abs(), 0.0);
        }
        p.checks.push(check);
        p.result(json!({
            "function": label,
            "pieces": fs.piece_count(),
            "support": fs.support(),
            "sup": fs.levels().first().copied().unwrap_or(0.0),
            "integral": fs.integral(),
        }))?;
        p.csv(format!("rearrange_{label}.csv"), |w| fs.write_csv(w))?;
        Ok(p)
    })?;
    merge(&mut report, out, pieces)?;
    Ok(report)
}

fn norm_rows(cfg: &ExperimentConfig, label: &str, f: &GridFunction<f64>, p: &mut Piece, rel: Option<f64>) -> Result<()> {
    let mut lower = Report::new("|||f|||_{p,q} <= ||f||_{p,q}", 1e-9).param("function", label);
    let mut upper = Report::new("||f||_{p,q} <= p' |||f|||_{p,q}", 1e-9).param("function", label);
    let mut equiv = Report::new("|dist form - |||f||||| <= tol |||f|||", 0.0).param("function", label);
    let mut rows = String::from("p,q,quasinorm,norm,distribution_form\n");
    for &pp in &cfg.params.p {
        for q in cfg.params.qs() {
            let params = LorentzParams::new(pp, q)?;
            let quasi = lorentz_quasinorm(f, &params);
            let norm = critdecay::lorentz_norm(f, &params)?;
            let dist = distribution_form_quasinorm(f, &params);
            if let Some(pc) = params.p_conjugate() {
                lower.record(pp, quasi, norm);
                upper.record(pp, norm, pc * quasi);
            }
            if let Some(tol) = rel {
                equiv.record(pp, (dist - quasi).abs(), tol * quasi);
            }
            rows.push_str(&format!("{pp:e},{},{quasi:e},{norm:e},{dist:e}\n", qlabel(q)));
            p.result(json!({
                "function": label, "p": pp, "q": qlabel(q),
                "quasinorm": quasi, "norm": norm, "distribution_form": dist,
            }))?;
        }
    }
    p.checks.push(lower);
    p.checks.push(upper);
    if rel.is_some() {
        p.checks.push(equiv);
    }
    p.csv.push((format!("lorentz_norm_{label}.csv"), rows.into_bytes()));
    Ok(())
}

pub fn lorentz_norm(cfg: &ExperimentConfig, out: &mut Output) -> Result<RunReport> {
    let mut report = start("lorentz-norm", cfg)?;
    let (_, fs) = suite(cfg)?;
    let pieces = par_pieces(&fs, |(label, f)| {
        let mut p = Piece::default();
        norm_rows(cfg, label, f, &mut p, Some(cfg.tolerances.equivalence_rel))?;
        Ok(p)
    })?;
    merge(&mut report, out, pieces)?;
    Ok(report)
}

/// Mean of `u` over the cells whose centres are nearest the box centre.
fn center_value(u: &GridFunction<f64>) -> f64 {
    let d = u.domain();
    let mid: Vec<f64> = (0..d.dim()).map(|a| 0.5 * (d.lower()[a] + d.upper()[a])).collect();
    let dist = |i: usize| {
        let c = d.center(i);
        (0..d.dim()).map(|a| (c[a] - mid[a]).powi(2)).sum::<f64>()
    };
    let best = (0..d.cell_count()).map(dist).fold(f64::INFINITY, f64::min);
    let near: Vec<f64> = (0..d.cell_count())
        .filter(|&i| dist(i) <= best * (1.0 + 1e-9))
        .map(|i| u.values()[i])
        .collect();
    near.iter().sum::<f64>() / near.len() as f64
}

pub fn riesz(cfg: &ExperimentConfig, out: &mut Output) -> Result<RunReport> {
    let mut report = start("riesz", cfg)?;
    let (d, fs) = suite(cfg)?;
    let params = RieszParams::new(d.dim(), cfg.params.alpha)?;
    let pieces = par_pieces(&fs, |(label, f)| {
        let mut p = Piece::default();
        let u = riesz_potential(f, &params)?;
        p.result(json!({
            "function": label,
            "sup": u.sup_norm(),
            "center_value": center_value(&u),
            "gamma_alpha": params.gamma_alpha(),
        }))?;
        p.csv(format!("riesz_{label}.csv"), |w| write_grid_csv(&u, w))?;
        Ok(p)
    })?;
    merge(&mut report, out, pieces)?;
    Ok(report)
}

pub fn maximal(cfg: &ExperimentConfig, out: &mut Output) -> Result<RunReport> {
    let mut report = start("maximal", cfg)?;
    let (_, fs) = suite(cfg)?;
    let gamma = cfg.params.gamma;
    let pieces = par_pieces(&fs, |(label, f)| {
        let mut p = Piece::default();
        let m = fractional_maximal_default(f, gamma)?;
        p.result(json!({ "function": label, "gamma": gamma, "sup": m.sup_norm() }))?;
        p.csv(format!("maximal_{label}.csv"), |w| write_grid_csv(&m, w))?;
        Ok(p)
    })?;
    merge(&mut report, out, pieces)?;
    Ok(report)
}

fn t_grid(cfg: &ExperimentConfig, sup: f64) -> Result<Vec<f64>> {
    match &cfg.tgrid {
        Some(t) => t.points(),
        None if sup > 0.0 => Ok(log_space(sup / 64.0, sup, 64)),
        None => Ok(vec![1.0]),
    }
}

pub fn content(cfg: &ExperimentConfig, out: &mut Output) -> Result<RunReport> {
    let mut report = start("content", cfg)?;
    let (d, fs) = suite(cfg)?;
    let n = d.dim() as f64;
    let pieces = par_pieces(&fs, |(label, f)| {
        let mut p = Piece::default();
        let ts = t_grid(cfg, f.sup_norm())?;
        for &beta in &cfg.params.beta {
            let levels = level_contents(f, beta, &ts)?;
            let mut rows = String::from("t,content,measure\n");
            let mut check = Report::new("|{|f| > t}| <= H^N({|f| > t})", 1e-12).param("function", label.as_str());
            for (&t, &(c, m)) in ts.iter().zip(&levels) {
                rows.push_str(&format!("{t:e},{c:e},{m:e}\n"));
                if beta == n {
                    check.record(t, m, c);
                }
            }
            if beta == n {
                p.checks.push(check);
            }
            p.result(json!({
                "function": label, "beta": beta,
                "t": ts, "content": levels.iter().map(|l| l.0).collect::<Vec<_>>(),
            }))?;
            p.csv.push((format!("content_{label}_b{beta}.csv"), rows.into_bytes()));
        }
        Ok(p)
    })?;
    merge(&mut report, out, pieces)?;
    Ok(report)
}

pub fn choquet(cfg: &ExperimentConfig, out: &mut Output) -> Result<RunReport> {
    let mut report = start("choquet", cfg)?;
    let (d, fs) = suite(cfg)?;
    let full = CellSet::full(d.clone());
    let pieces = par_pieces(&fs, |(label, f)| {
        let mut p = Piece::default();
        let g = f.abs();
        for &beta in &cfg.params.beta {
            let value = choquet_integral(&g, beta)?;
            let omega = content_upper(&full, beta)?.value;
            let mut check = Report::new("int |f| dH^b <= sup|f| H^b(Omega)", 1e-12)
                .param("function", label.as_str())
                .param("beta", beta);
            check.record(beta, value, g.sup_norm() * omega);
            p.checks.push(check);
            p.result(json!({ "function": label, "beta": beta, "integral": value, "content_omega": omega }))?;
        }
        Ok(p)
    })?;
    merge(&mut report, out, pieces)?;
    Ok(report)
}

/// Adjacent pairs `(f_k, f_{k+1})` of the suite, cyclically.
fn pairs(fs: &Suite) -> Vec<(String, GridFunction<f64>, GridFunction<f64>)> {
    (0..fs.len())
        .map(|k| {
            let j = (k + 1) % fs.len();
            (format!("{}*{}", fs[k].0, fs[j].0), fs[k].1.clone(), fs[j].1.clone())
        })
        .collect()
}

fn finite_qs(cfg: &ExperimentConfig) -> Vec<f64> {
    cfg.params.qs().iter().filter_map(|q| q.finite()).filter(|&q| q >= 1.0).collect()
}

pub fn verify(lemma: LemmaId, cfg: &ExperimentConfig, out: &mut Output) -> Result<RunReport> {
    let name = format!("verify {}", lemma.name());
    let mut report = start(&name, cfg)?;
    let (d, fs) = suite(cfg)?;
    let alpha = cfg.params.alpha;
    let pieces = match lemma {
        LemmaId::Hardy => {
            let chi = StepFunction::indicator(1.0, 1.0)?;
            let r = hardy_check(&chi, 2.0, 2.0)?;
            report.result(json!({ "case": "indicator (0,1), p = q = 2", "lhs": r.lhs, "rhs": r.rhs }))?;
            let mut check = Report::new("hardy", 1e-9).param("function", "indicator");
            check.record(2.0, r.lhs, r.rhs);
            report.check(check);
            par_pieces(&fs, |(label, f)| {
                let mut p = Piece::default();
                let g = decreasing_rearrangement(f);
                let mut check = Report::new("||g||_{p,q} <= p' |||g|||_{p,q}", 1e-9).param("function", label.as_str());
                for &pp in cfg.params.p.iter().filter(|&&pp| pp > 1.0) {
                    for q in finite_qs(cfg) {
                        let r = hardy_check(&g, pp, q)?;
                        check.record(pp, r.lhs, r.rhs);
                    }
                }
                p.checks.push(check);
                Ok(p)
            })?
        }
        LemmaId::NormEquivalence | LemmaId::LorentzEquivalence => {
            let rel = (lemma == LemmaId::LorentzEquivalence).then_some(cfg.tolerances.equivalence_rel);
            par_pieces(&fs, |(label, f)| {
                let mut p = Piece::default();
                norm_rows(cfg, label, f, &mut p, rel)?;
                if rel.is_some() {
                    p.checks.drain(..2);
                }
                Ok(p)
            })?
        }
        LemmaId::Calderon => par_pieces(&fs, |(label, f)| {
            let mut p = Piece::default();
            let mut check = Report::new("||f||_{p,q} <= p' (qt/p)^{1/qt-1/q} ||f||_{p,qt}", 1e-9)
                .param("function", label.as_str());
            let mut factor = Report::new("(qt/p)^{1/qt-1/q} <= e^{1/e}", 1e-12).param("function", label.as_str());
            for &pp in cfg.params.p.iter().filter(|&&pp| pp > 1.0) {
                for q in cfg.params.qs() {
                    for qt in [1.0, 2.0].into_iter().filter(|&qt| q.finite().map_or(true, |qv| qt <= qv)) {
                        let r = calderon_compare(f, pp, q, qt)?;
                        check.record(pp, r.lhs, r.rhs);
                        factor.record(pp, r.factor, e_pow_inv_e::<f64>());
                    }
                }
            }
            p.checks.push(check);
            p.checks.push(factor);
            Ok(p)
        })?,
        LemmaId::Lemma15 | LemmaId::Lemma14 => par_pieces(&pairs(&fs), |(label, f, g)| {
            let mut p = Piece::default();
            for inst in [
                ProductInstance::pointwise(f.clone(), g.clone())?,
                ProductInstance::convolution(f.clone(), g.clone()).context("convolution needs |Omega| <= 1")?,
            ] {
                let xs = default_samples(&inst);
                let mut reps = if lemma == LemmaId::Lemma15 {
                    vec![verify_lemma15(&inst, &xs)]
                } else {
                    let r = verify_lemma14(&inst, f.sup_norm(), f.support_measure(), &xs)?;
                    vec![r.local, r.spread]
                };
                for r in &mut reps {
                    r.set_param("pair", label.as_str());
                }
                p.checks.extend(reps);
            }
            Ok(p)
        })?,
        LemmaId::Holder | LemmaId::HolderPrime => par_pieces(&pairs(&fs), |(label, f, g)| {
            let mut p = Piece::default();
            for &p1 in &cfg.params.p {
                for &p2 in &cfg.params.p {
                    let qs = |pp: f64| {
                        [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Finite(pp), Exponent::Infinite]
                    };
                    for q1 in qs(p1) {
                        for q2 in qs(p2) {
                            let rep = if lemma == LemmaId::Holder {
                                HolderExponents::natural(p1, q1, p2, q2)
                                    .ok()
                                    .map(|e| verify_holder(f, g, &e))
                            } else {
                                verify_holder_l1(f, g, p1, q1, p2, q2).ok().map(Ok)
                            };
                            if let Some(r) = rep {
                                let mut r = r?;
                                r.set_param("pair", label.as_str());
                                p.checks.push(r);
                            }
                        }
                    }
                }
            }
            Ok(p)
        })?,
        LemmaId::TruncatedKernel => {
            let n = d.dim() as f64;
            let riesz = RieszParams::new(d.dim(), alpha)?;
            let mut ps: Vec<f64> = cfg.params.p.iter().copied().filter(|&p| p > 1.0 && p < n / alpha).collect();
            if ps.is_empty() {
                ps.push(0.5 * (1.0 + n / alpha));
            }
            let r = cfg.params.radius;
            let sym = Domain::cube(d.dim(), -1.0, 1.0, cfg.domain.cells)?;
            let mut stated = Report::new("closed form = grid weak norm (relative tolerance)", 0.0);
            let mut upper = Report::new("grid weak norm <= closed form", 1e-9);
            for &pp in &ps {
                let closed = truncated_kernel_weak_norm(&riesz, pp, r)?;
                let exact = truncated_kernel_weak_norm_sup(&riesz, pp, r)?;
                let grid = truncated_kernel_weak_norm_empirical(&riesz, pp, r, &sym)?;
                let rel = (closed / grid - 1.0).abs();
                stated.record(pp, rel, cfg.tolerances.kernel_rel);
                upper.record(pp, grid, closed);
                report.result(json!({
                    "p": pp, "r": r, "closed_form": closed, "exact_sup": exact,
                    "grid": grid, "relative_gap": rel,
                }))?;
            }
            report.check(stated);
            report.check(upper);
            Vec::new()
        }
        LemmaId::Hedberg => {
            let riesz = RieszParams::new(d.dim(), alpha)?;
            let mut jobs = Vec::new();
            for &beta in &cfg.params.beta {
                let (eps, r) = choose_eps_r(d.dim(), alpha, beta)?;
                for (label, f) in &fs {
                    jobs.push((beta, eps, r, label.clone(), f.clone()));
                }
            }
            par_pieces(&jobs, |(beta, eps, r, label, f)| {
                let mut p = Piece::default();
                let hed = HedbergParams::new(&riesz, *eps, *r)?;
                let f = normalize_unit_lorentz(f, &LorentzParams::finite(*r, 1.0)?)?;
                let rep = hedberg_bound_check(&f, &riesz, &hed)?;
                p.result(json!({
                    "function": label, "beta": beta, "params": rep.params,
                    "tight_worst_ratio": rep.tight.worst_ratio,
                }))?;
                let mut check = rep.bound;
                check.set_param("function", label.as_str());
                check.set_param("beta", *beta);
                p.checks.push(check);
                Ok(p)
            })?
        }
        LemmaId::WeakType => par_pieces(&fs, |(label, f)| {
            let mut p = Piece::default();
            let mut check = weak_type_check(&f.abs(), cfg.params.gamma, None)?;
            check.set_param("function", label.as_str());
            p.checks.push(check);
            Ok(p)
        })?,
        LemmaId::Main2 | LemmaId::Corollary => {
            let mut jobs = Vec::new();
            for q in cfg.params.qs() {
                let params = LorentzParams::new(d.dim() as f64 / alpha, q)?;
                for (label, f) in &fs {
                    let f = normalize_unit_lorentz(f, &params)?;
                    for &beta in &cfg.params.beta {
                        jobs.push((q, beta, label.clone(), f.clone()));
                    }
                }
            }
            let ts = cfg.tgrid.as_ref().map(|t| t.points()).transpose()?;
            par_pieces(&jobs, |(q, beta, label, f)| {
                let mut p = Piece::default();
                if lemma == LemmaId::Main2 {
                    let rep = verify_main2(f, alpha, *beta, *q, ts.as_deref())?;
                    push_decay(&mut p, &format!("{label}_q{}_b{beta}", qlabel(*q)), rep)?;
                } else {
                    let c = constants_for_domain(f.domain(), alpha, *beta, *q)?.c;
                    for cp in [c / 4.0, c / 2.0, 0.75 * c] {
                        let rep = verify_corollary(f, alpha, *beta, *q, cp)?;
                        p.result(json!({
                            "function": label, "q": qlabel(*q), "beta": beta,
                            "c_prime": cp, "lhs": rep.lhs, "rhs": rep.rhs,
                        }))?;
                        let mut check = rep.check;
                        check.set_param("function", label.as_str());
                        p.checks.push(check);
                    }
                }
                Ok(p)
            })?
        }
        LemmaId::Main1 => {
            let s = d.dim() as f64 / alpha;
            let mut jobs = Vec::new();
            for (label, f) in &fs {
                let f = f.scale(f.lebesgue_norm(s).recip());
                for &beta in &cfg.params.beta {
                    jobs.push((beta, label.clone(), f.clone()));
                }
            }
            let ts = cfg.tgrid.as_ref().map(|t| t.points()).transpose()?;
            par_pieces(&jobs, |(beta, label, f)| {
                let mut p = Piece::default();
                let rep = verify_main1_main(f, alpha, *beta, ts.as_deref())?;
                let mut inflation = Report::new("||f||_{N/a,N/a} <= N/(N-a) ||f||_{N/a}", 1e-9);
                let n = d.dim() as f64;
                inflation.record(*beta, rep.lorentz_norm, n / (n - alpha) * rep.lebesgue_norm);
                p.checks.push(inflation);
                if let Some(m) = rep.measure.clone() {
                    p.checks.push(m);
                }
                let tag = format!("{label}_b{beta}");
                push_decay(&mut p, &format!("{tag}_scaled"), rep.scaled)?;
                push_decay(&mut p, &format!("{tag}_cbar"), rep.content)?;
                Ok(p)
            })?
        }
    };
    merge(&mut report, out, pieces)?;
    Ok(report)
}

fn push_decay(p: &mut Piece, tag: &str, rep: DecayReport<f64>) -> Result<()> {
    p.csv(format!("decay_{tag}.csv"), |w| rep.write_csv(w))?;
    p.result(json!({
        "experiment": tag,
        "norm": rep.norm,
        "chain": rep.chain,
        "fit": rep.fit,
        "margin": rep.check.margin(),
    }))?;
    let mut check = rep.check;
    check.set_param("experiment", tag);
    p.checks.push(check);
    Ok(())
}

pub fn decay(cfg: &ExperimentConfig, out: &mut Output) -> Result<RunReport> {
    let mut report = start("decay", cfg)?;
    let (d, fs) = suite(cfg)?;
    let alpha = cfg.params.alpha;
    let mut jobs = Vec::new();
    for q in cfg.params.qs() {
        for &beta in &cfg.params.beta {
            jobs.push((q, beta));
        }
    }
    let ts = cfg.tgrid.as_ref().map(|t| t.points()).transpose()?;
    let pieces = par_pieces(&jobs, |&(q, beta)| {
        let mut p = Piece::default();
        let env = near_extremal_envelope(&d, alpha, beta, q, None)?;
        let tag = format!("q{}_b{beta}", qlabel(q));
        let chain = &env.members[0].chain;
        let qc = chain.q_conjugate;
        let mut rows = String::from("t,content,bound\n");
        for &(t, c) in &env.envelope {
            rows.push_str(&format!("{t:e},{c:e},{:e}\n", chain.bound(t)));
        }
        p.csv.push((format!("decay_envelope_{tag}.csv"), rows.into_bytes()));
        let exponent = env.fit.as_ref().and_then(|f| f.exponent_emp);
        let mut fit_check = Report::new("0.85 q' <= fitted tail exponent", 0.0).param("experiment", tag.as_str());
        fit_check.record(qc, 0.85 * qc, exponent.unwrap_or(0.0));
        p.checks.push(fit_check);
        p.result(json!({
            "experiment": format!("envelope_{tag}"),
            "lambdas": env.lambdas,
            "fit": env.fit,
            "chain": chain,
            "margin": env.members.iter().map(|m| m.check.margin()).fold(f64::INFINITY, f64::min),
        }))?;
        for (k, m) in env.members.into_iter().enumerate() {
            let mut check = m.check;
            check.set_param("experiment", format!("envelope_{tag}_{k}"));
            p.checks.push(check);
        }
        let params = LorentzParams::new(d.dim() as f64 / alpha, q)?;
        for (label, f) in &fs {
            let f = normalize_unit_lorentz(f, &params)?;
            let rep = verify_main2(&f, alpha, beta, q, ts.as_deref())?;
            push_decay(&mut p, &format!("{label}_{tag}"), rep)?;
        }
        Ok(p)
    })?;
    merge(&mut report, out, pieces)?;
    Ok(report)
}

pub fn constants(cfg: &ExperimentConfig, volume: Option<f64>, out: &mut Output) -> Result<RunReport> {
    let mut report = start("constants", cfg)?;
    let d = cfg.domain()?;
    let alpha = cfg.params.alpha;
    if cfg.params.beta.is_empty() || cfg.params.q.is_empty() {
        bail!("constants needs at least one beta and one q");
    }
    for q in cfg.params.qs() {
        for &beta in &cfg.params.beta {
            let mut chain = constants_for_domain(&d, alpha, beta, q)?;
            if let Some(v) = volume {
                chain = critdecay::compute_constants(d.dim(), alpha, beta, q, v, chain.content_omega)?;
            }
            let mut check = Report::new("C1 delta_p^{-1/q'} >= 1 on [p0, N/alpha)", 0.0)
                .param("q", q.to_f64())
                .param("beta", beta);
            let top = d.dim() as f64 / alpha;
            for k in 0..100 {
                let p = chain.p0 + (top - chain.p0) * k as f64 / 100.0;
                check.record(p, 1.0, chain.c1_bound(p));
            }
            report.check(check);
            println!("{}", serde_json::to_string_pretty(&chain)?);
            report.result(&chain)?;
        }
    }
    let _ = out;
    Ok(report)
}
