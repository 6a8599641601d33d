//! `sigmalab analyze`: runs each requested analysis and writes
//! `<analysis>.json` (and `<analysis>.csv`) into the output directory.

use std::path::Path;

use serde::Serialize;
use sigmalab::gallery::{from_spec, Analysis, ScenarioSpec};
use sigmalab::lab::ae::{AeVerdict, DistanceRow, L1Verdict};
use sigmalab::lab::cover::CoverCrosscheck;
use sigmalab::lab::sets_profile::TailSetReport;
use sigmalab::lab::{
    ae_report, boylan_distance_capped, check_uniform_cover, tail_set_crosscheck, mu_approach_profile,
    pairing_profile, cover_crosscheck, uniform_cover_witness, wperp_witness, AeOptions, CoverVerdict,
    CoverWitness, PairingProfile, WperpWitness,
};
use sigmalab::seq::{last_quartile_start, limit_report};
use sigmalab::{best_approx, AlgebraSeq, DSet, LabError, Rat, Step};

use crate::output::{write_csv, write_json, Table};
use crate::{CliError, Format};

/// Longest window used for the explicit `wperp` witness.
const WITNESS_WINDOW: usize = 64;

#[derive(Serialize)]
struct Envelope<'a, T> {
    analysis: &'static str,
    sequence: &'a str,
    horizon: usize,
    result: T,
}

#[derive(Serialize)]
struct L1Result {
    window_start: usize,
    distances: Vec<DistanceRow>,
    l1_non_increasing: bool,
    verdicts: Vec<L1Verdict>,
}

#[derive(Serialize)]
struct BoylanRow {
    i: usize,
    j: usize,
    distance: Rat,
}

#[derive(Serialize)]
struct CoverEps {
    eps: Rat,
    set: CoverVerdict,
    complement: CoverVerdict,
    crosscheck: CoverCrosscheck,
}

#[derive(Serialize)]
struct CoverResult {
    threshold: Rat,
    set: CoverWitness,
    complement: CoverWitness,
    by_eps: Vec<CoverEps>,
}

#[derive(Serialize)]
struct MuApproachResult {
    set: DSet,
    /// `μ(A △ best_approx(A, 𝔄_n))`.
    profile: Vec<Rat>,
    tail_sets: TailSetReport,
}

#[derive(Serialize)]
struct WperpEps {
    profile: PairingProfile,
    witness: WperpWitness,
}

struct Context<'a> {
    spec: &'a ScenarioSpec,
    seq: AlgebraSeq,
    out: &'a Path,
    csv: bool,
    json: bool,
}

impl Context<'_> {
    fn emit<T: Serialize>(&self, analysis: Analysis, result: T, table: Option<Table>) -> Result<(), CliError> {
        let name = analysis.name();
        if self.json {
            let env = Envelope {
                analysis: name,
                sequence: self.seq.name(),
                horizon: self.spec.horizon,
                result,
            };
            write_json(&self.out.join(format!("{name}.json")), &env)?;
        }
        if let (true, Some(t)) = (self.csv, table) {
            write_csv(&self.out.join(format!("{name}.csv")), &t)?;
        }
        Ok(())
    }

    fn set(&self, analysis: Analysis) -> Result<&DSet, CliError> {
        self.spec.analysis_set().ok_or_else(|| {
            LabError::Invalid(format!(
                "`{}` needs a `set` or an indicator `function`",
                analysis.name()
            ))
            .into()
        })
    }
}

fn eps_header(prefix: &str, eps: &[Rat]) -> Vec<String> {
    eps.iter().map(|e| format!("{prefix}@{e}")).collect()
}

pub fn run(spec: &ScenarioSpec, out: &Path, formats: &[Format], verbose: bool) -> Result<(), CliError> {
    let seq = from_spec(spec)?;
    let ctx = Context {
        spec,
        seq,
        out,
        csv: formats.contains(&Format::Csv),
        json: formats.contains(&Format::Json),
    };
    let mut analyses = spec.analyses.clone();
    if analyses.is_empty() {
        analyses.push(Analysis::Ae);
    }
    analyses.sort_unstable();
    analyses.dedup();
    for analysis in analyses {
        if verbose {
            eprintln!("running {}", analysis.name());
        }
        let line = match analysis {
            Analysis::Ae => ae(&ctx)?,
            Analysis::L1 => l1(&ctx)?,
            Analysis::Boylan => boylan(&ctx)?,
            Analysis::Cover => cover(&ctx)?,
            Analysis::LiminfLimsup => liminf_limsup(&ctx)?,
            Analysis::MuApproach => mu_approach(&ctx)?,
            Analysis::Wperp => wperp(&ctx)?,
        };
        println!("{}: {line}", analysis.name());
    }
    Ok(())
}

fn ae_options(ctx: &Context) -> AeOptions {
    AeOptions {
        epsilons: ctx.spec.epsilons.clone(),
        join_cap: ctx.spec.caps.join_atoms,
        ..AeOptions::default()
    }
}

fn verdict_line<'a>(items: impl Iterator<Item = (&'a Rat, bool)>) -> String {
    items
        .map(|(eps, pass)| format!("eps {eps} {}", if pass { "pass" } else { "fail" }))
        .collect::<Vec<_>>()
        .join(", ")
}

fn ae(ctx: &Context) -> Result<String, CliError> {
    let f = ctx.spec.function.to_step();
    let report = ae_report(&ctx.seq, &f, &ctx.spec.target_step(), ctx.spec.horizon, &ae_options(ctx))?;
    let mut header = vec!["index".to_string(), "l1".into(), "l2_squared".into(), "sup".into()];
    header.extend(eps_header("exceedance", &ctx.spec.epsilons));
    let mut table = Table::new(&header);
    for d in &report.distances {
        let mut row = vec![d.index.to_string(), Table::dec(&d.l1), Table::dec(&d.l2_squared), Table::dec(&d.sup)];
        row.extend(report.exceedance.iter().map(|e| Table::dec(&e.by_start[d.index])));
        table.push(row);
    }
    let line = verdict_line(report.ae.iter().map(|v: &AeVerdict| (&v.eps, v.pass)));
    ctx.emit(Analysis::Ae, &report, Some(table))?;
    Ok(line)
}

fn l1(ctx: &Context) -> Result<String, CliError> {
    let f = ctx.spec.function.to_step();
    let opts = AeOptions {
        checkpoints: sigmalab::lab::Checkpoints::None,
        ..ae_options(ctx)
    };
    let report = ae_report(&ctx.seq, &f, &ctx.spec.target_step(), ctx.spec.horizon, &opts)?;
    let mut table = Table::new(&["index", "l1", "l2_squared"]);
    for d in &report.distances {
        table.push(vec![d.index.to_string(), Table::dec(&d.l1), Table::dec(&d.l2_squared)]);
    }
    let line = verdict_line(report.l1.iter().map(|v| (&v.eps, v.pass)));
    let result = L1Result {
        window_start: report.window_start,
        distances: report.distances,
        l1_non_increasing: report.l1_non_increasing,
        verdicts: report.l1,
    };
    ctx.emit(Analysis::L1, result, Some(table))?;
    Ok(line)
}

fn boylan(ctx: &Context) -> Result<String, CliError> {
    let terms = ctx.seq.terms(ctx.spec.horizon)?;
    let cap = ctx.spec.caps.boylan_atoms;
    let rows = terms
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            Ok(BoylanRow {
                i,
                j: i + 1,
                distance: boylan_distance_capped(&w[0], &w[1], cap)?,
            })
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let mut table = Table::new(&["i", "j", "distance"]);
    for r in &rows {
        table.push(vec![r.i.to_string(), r.j.to_string(), Table::dec(&r.distance)]);
    }
    let last = rows.last().map(|r| r.distance.to_string()).unwrap_or_default();
    ctx.emit(Analysis::Boylan, &rows, Some(table))?;
    Ok(format!("last consecutive distance {last}"))
}

fn cover(ctx: &Context) -> Result<String, CliError> {
    let a = ctx.set(Analysis::Cover)?;
    let (h, r) = (ctx.spec.horizon, &ctx.spec.threshold);
    let set = uniform_cover_witness(&ctx.seq, a, r, h)?;
    let complement = uniform_cover_witness(&ctx.seq, &a.complement(), r, h)?;
    let by_eps = ctx
        .spec
        .epsilons
        .iter()
        .map(|eps| {
            Ok(CoverEps {
                eps: eps.clone(),
                set: check_uniform_cover(&set, eps),
                complement: check_uniform_cover(&complement, eps),
                crosscheck: cover_crosscheck(&ctx.seq, a, r, h, eps)?,
            })
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let mut table = Table::new(&[
        "index",
        "set_tail_symdiff",
        "set_seminorm",
        "complement_tail_symdiff",
        "complement_seminorm",
    ]);
    for n in 0..=h {
        table.push(vec![
            n.to_string(),
            Table::dec(&set.tail_symdiff[n]),
            Table::dec(&set.seminorms[n]),
            Table::dec(&complement.tail_symdiff[n]),
            Table::dec(&complement.seminorms[n]),
        ]);
    }
    let line = verdict_line(by_eps.iter().map(|e| (&e.eps, e.set.pass && e.complement.pass)));
    ctx.emit(
        Analysis::Cover,
        CoverResult {
            threshold: r.clone(),
            set,
            complement,
            by_eps,
        },
        Some(table),
    )?;
    Ok(line)
}

fn liminf_limsup(ctx: &Context) -> Result<String, CliError> {
    let report = limit_report(&ctx.seq, ctx.spec.horizon, ctx.spec.caps.join_atoms)?;
    let mut table = Table::new(&["m", "meet_atoms", "join_atoms"]);
    for row in &report.table {
        table.push(vec![row.m.to_string(), row.meet.len().to_string(), row.join.len().to_string()]);
    }
    let line = format!(
        "liminf {} atoms, limsup {} atoms, {:?}",
        report.liminf.len(),
        report.limsup.len(),
        report.monotonicity
    );
    ctx.emit(Analysis::LiminfLimsup, &report, Some(table))?;
    Ok(line)
}

fn mu_approach(ctx: &Context) -> Result<String, CliError> {
    let a = ctx.set(Analysis::MuApproach)?;
    let h = ctx.spec.horizon;
    let profile = mu_approach_profile(&ctx.seq, a, h)?;
    let approx: Vec<DSet> = ctx.seq.terms(h)?.iter().map(|p| best_approx(a, p)).collect();
    let tail_sets = tail_set_crosscheck(&approx, a)?;
    let mut table = Table::new(&["index", "mu_symdiff", "tail_symdiff"]);
    for (n, (mu, tail)) in profile.iter().zip(&tail_sets.profile).enumerate() {
        table.push(vec![n.to_string(), Table::dec(mu), Table::dec(tail)]);
    }
    let line = format!(
        "μ(A △ A_H) = {}, tail profile at window {}",
        profile[h], tail_sets.profile_at_window
    );
    ctx.emit(
        Analysis::MuApproach,
        MuApproachResult {
            set: a.clone(),
            profile,
            tail_sets,
        },
        Some(table),
    )?;
    Ok(line)
}

fn wperp(ctx: &Context) -> Result<String, CliError> {
    let f: Step = ctx.spec.function.to_step();
    let h = ctx.spec.horizon;
    let start = last_quartile_start(h).max((h + 1).saturating_sub(WITNESS_WINDOW));
    let results = ctx
        .spec
        .epsilons
        .iter()
        .map(|eps| {
            Ok(WperpEps {
                profile: pairing_profile(&ctx.seq, &f, eps, h, ctx.spec.caps.join_atoms)?,
                witness: wperp_witness(&ctx.seq, &f, eps, (start, h + 1))?,
            })
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let mut header = vec!["start".to_string()];
    header.extend(eps_header("pairing", &ctx.spec.epsilons));
    header.extend(eps_header("union_measure", &ctx.spec.epsilons));
    let mut table = Table::new(&header);
    for n in 0..=h {
        let mut row = vec![n.to_string()];
        row.extend(results.iter().map(|r| Table::dec(&r.profile.pairing[n])));
        row.extend(results.iter().map(|r| Table::dec(&r.profile.union_measure[n])));
        table.push(row);
    }
    let line = results
        .iter()
        .map(|r| format!("eps {} pairing at window {}", r.profile.eps, r.profile.pairing[start]))
        .collect::<Vec<_>>()
        .join(", ");
    ctx.emit(Analysis::Wperp, &results, Some(table))?;
    Ok(line)
}
