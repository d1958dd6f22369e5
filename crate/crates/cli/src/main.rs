mod args;
mod expect;

use std::fs;
use std::process::ExitCode;
use std::str::FromStr;

use clap::Parser;
use conformal_core::analysis::{
    candidate_b, candidate_j, candidate_without, ideal_closure, is_ideal, simplicity_evidence_report, star_span_check,
    sum_window, EvidenceConfig, IdealKind, Target, TruncationPolicy, Truncation,
};
use conformal_core::coeff::{
    all_pairs, check_coeff_jacobi, coeff_closed_form_crosscheck, coeff_table, random_pairs, random_triples, sample_box,
};
use conformal_core::conformal::check_conformal_axioms;
use conformal_core::families::osborn_iso_check;
use conformal_core::gd::{check_gd_compatibility, check_lie_axioms, check_novikov_axioms, check_tortken, TortkenVariant};
use conformal_core::window::IndexKind;
use conformal_core::{
    make_family, BasisIndex, Built, DeltaGroup, DeltaVector, Error, FamilyKind, FamilyParams, PolyElement, Report,
    Result, Scalar, Status, Table, Window,
};

use args::{Candidate, Cli, Command, Common, Expect, Format};
use expect::Subject;

const SEED_ENV: &str = "CONFORMAL_FORGE_SEED";

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.command.common();
    let reports = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let rendered = render(&reports, common.format);
    match &common.output {
        Some(path) => {
            if let Err(e) = fs::write(path, &rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{rendered}"),
    }
    if reports.iter().all(Report::as_expected) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn render(reports: &[Report], format: Format) -> String {
    match format {
        Format::Json => {
            let values: Vec<String> = reports.iter().map(Report::to_json).collect();
            format!("[\n{}\n]\n", values.join(",\n"))
        }
        Format::Text => {
            let texts: Vec<String> = reports.iter().map(Report::to_text).collect();
            texts.join("\n")
        }
    }
}

fn parse<T: FromStr<Err = Error>>(s: &str) -> Result<T> {
    s.trim().parse()
}

fn parse_list(s: &str) -> Result<Vec<Scalar>> {
    s.split(',').map(parse).collect()
}

fn parse_matrix(s: &str) -> Result<Vec<Vec<Scalar>>> {
    s.split(';').map(parse_list).collect()
}

fn parse_range(s: &str) -> Result<(i64, i64)> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| Error::Parse(format!("expected a range \"lo..hi\", got {s:?}")))?;
    let num = |t: &str| t.trim().replace('\u{2212}', "-").parse::<i64>().map_err(|e| Error::Parse(format!("{t:?}: {e}")));
    let (lo, hi) = (num(lo)?, num(hi)?);
    if lo > hi {
        return Err(Error::Invalid(format!("empty range {lo}..{hi}")));
    }
    Ok((lo, hi))
}

fn seed(common: &Common) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|e| Error::Parse(format!("{SEED_ENV}={v:?}: {e}"))),
        Err(_) => Ok(common.seed),
    }
}

/// The algebra named by the flags, plus what predictions need to know about it.
struct Loaded {
    built: Built,
    subject: Subject,
    params: FamilyParams,
}

fn load(common: &Common) -> Result<Loaded> {
    let table = match &common.table {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
            Some(Table::from_json(&text)?)
        }
        None => None,
    };
    let family = common.family.as_deref().unwrap_or(if table.is_some() { "table" } else { "" });
    let delta = DeltaGroup::new(parse_list(&common.delta)?)?;
    let b: Scalar = parse(&common.b)?;
    if family.eq_ignore_ascii_case("table") {
        let t = table.ok_or_else(|| Error::Invalid("--family table needs --table PATH".into()))?;
        return Ok(Loaded {
            built: Built::Gd(t.into_gd()),
            subject: Subject { kind: None, delta: delta.clone(), b: b.clone() },
            params: FamilyParams::new(FamilyKind::Cur),
        });
    }
    if family.is_empty() {
        return Err(Error::Invalid("--family is required".into()));
    }
    let kind: FamilyKind = parse(family)?;
    let params = FamilyParams {
        kind,
        delta: delta.clone(),
        b: b.clone(),
        c: parse(&common.c)?,
        k: common.k.as_deref().map(parse).transpose()?,
        phi: common.phi.as_deref().map(parse_list).transpose()?,
        form: common.form.as_deref().map(parse_matrix).transpose()?,
        lie_table: table,
        allow_2b_in_delta: common.allow_2b_in_delta,
    };
    let built = make_family(&params)?;
    Ok(Loaded { built, subject: Subject { kind: Some(kind), delta, b }, params })
}

fn default_window(kind: &IndexKind) -> &'static str {
    match kind {
        IndexKind::Int => "-1..5",
        IndexKind::Vec { rank: 1 } => "-3..3",
        IndexKind::Vec { .. } => "-1..1 x -1..1",
        IndexKind::VecNat { rank: 1 } => "-2..2 x 0..2",
        IndexKind::VecNat { .. } => "-1..1 x -1..1 x 0..1",
        IndexKind::Sym { .. } => "all",
    }
}

fn window(common: &Common, kind: &IndexKind) -> Result<Window> {
    Window::parse(kind, common.window.as_deref().unwrap_or(default_window(kind)))
}

fn window_ext(common: &Common, loaded: &Loaded, w: &Window) -> Result<Window> {
    match &common.window_ext {
        Some(text) => Window::parse(&loaded.built.gd().index_kind(), text),
        None => Ok(sum_window(loaded.built.gd(), w)),
    }
}

fn zero_index(kind: &IndexKind) -> Result<BasisIndex> {
    match kind {
        IndexKind::Int => Ok(BasisIndex::Int(0)),
        IndexKind::Vec { rank } => Ok(BasisIndex::Vec(DeltaVector::zero(*rank))),
        IndexKind::VecNat { rank } => Ok(BasisIndex::VecNat(DeltaVector::zero(*rank), 0)),
        IndexKind::Sym { .. } => Err(Error::Invalid("table algebras have no zero index; pass --drop".into())),
    }
}

fn with_expect(mut r: Report, model: Option<Status>, common: &Common) -> Report {
    r.expected = match common.expect {
        Some(Expect::Pass) => Some(Status::Pass),
        Some(Expect::Fail) => Some(Status::Fail),
        Some(Expect::None) => None,
        None => model,
    };
    r
}

fn run(cmd: &Command) -> Result<Vec<Report>> {
    let common = cmd.common();
    if let Command::OsbornIso(c) = cmd {
        let delta = DeltaGroup::new(parse_list(&c.delta)?)?;
        let b: Scalar = parse(&c.b)?;
        let kind = IndexKind::VecNat { rank: delta.rank() };
        let w = Window::parse(&kind, c.window.as_deref().unwrap_or("-2..2 x 0..3"))?;
        let r = osborn_iso_check(&b, &delta, &w)?;
        return Ok(vec![with_expect(r, Some(Status::Pass), c)]);
    }
    let loaded = load(common)?;
    let gd = loaded.built.gd();
    let kind = gd.index_kind();
    let w = window(common, &kind)?;
    let s = &loaded.subject;
    let reports = match cmd {
        Command::CheckAxioms(_) => {
            let m = expect::identities(s);
            vec![
                with_expect(check_novikov_axioms(gd, &w)?, m, common),
                with_expect(check_lie_axioms(gd, &w)?, m, common),
                with_expect(check_gd_compatibility(gd, &w)?, m, common),
            ]
        }
        Command::CheckConformal(_) => {
            let r = check_conformal_axioms(&loaded.built.conformal(), &w)?;
            vec![with_expect(r, expect::identities(s), common)]
        }
        Command::CheckTortken { variant, .. } => {
            let v: TortkenVariant = parse(variant)?;
            let r = check_tortken(gd, &w, v)?;
            vec![with_expect(r, expect::tortken(s, v == TortkenVariant::Corrected), common)]
        }
        Command::Coeff { modes, samples, .. } => {
            let ca = loaded.built.conformal();
            let (lo, hi) = parse_range(modes)?;
            let points = sample_box(&w, lo, hi);
            let pairs = match samples {
                Some(n) => random_pairs(&points, *n, seed(common)?),
                None => all_pairs(&points),
            };
            let mut r = Report::new("coeff", &w).param("algebra", ca.description()).param("modes", modes);
            if let Some(n) = samples {
                r = r.param("samples", n).param("seed", seed(common)?);
            }
            let entries = coeff_table(&ca, &pairs)?;
            r.verdict = format!("{} mode brackets", entries.len());
            for e in entries {
                r.witnesses.push(conformal_core::report::Witness {
                    label: format!("[{}[{}], {}[{}]]", e.a, e.m, e.b, e.n),
                    detail: e.bracket.to_string(),
                });
            }
            vec![with_expect(r, None, common)]
        }
        Command::CoeffCrosscheck { modes, samples, .. } => {
            let (lo, hi) = parse_range(modes)?;
            let points = sample_box(&w, lo, hi);
            let (pairs, triples) = match samples {
                Some(n) => (random_pairs(&points, *n, seed(common)?), random_triples(&points, *n, seed(common)?)),
                None => (all_pairs(&points), random_triples(&points, 100, seed(common)?)),
            };
            let m = expect::identities(s);
            let mut cross = coeff_closed_form_crosscheck(&loaded.params, &pairs)?.param("modes", modes);
            let mut jac = check_coeff_jacobi(&loaded.built.conformal(), &triples)?.param("seed", seed(common)?);
            cross.window = w.labels();
            jac.window = w.labels();
            vec![with_expect(cross, m, common), with_expect(jac, m, common)]
        }
        Command::StarSpan { targets, .. } => {
            let t = match targets {
                Some(text) => Window::parse(&kind, text)?,
                None => w.clone(),
            };
            let r = star_span_check(gd, &w, &t)?;
            vec![with_expect(r, expect::star_span(s, &w, &t), common)]
        }
        Command::Closure { kind: k, generators, policy, .. } => {
            let ik: IdealKind = parse(k)?;
            let policy: TruncationPolicy = parse(policy)?;
            let gens = generators.iter().map(|g| parse::<PolyElement>(g)).collect::<Result<Vec<_>>>()?;
            let ext = window_ext(common, &loaded, &w)?;
            let ca = loaded.built.conformal();
            let target: Target = if ik == IdealKind::Conformal { (&ca).into() } else { gd.into() };
            let wit = ideal_closure(target, ik, &gens, &w, &ext, common.dpow, policy)?;
            let desc = if ik == IdealKind::Conformal { ca.description() } else { gd.description() };
            vec![with_expect(wit.to_report(&desc), None, common)]
        }
        Command::IsIdeal { kind: k, candidate, drop, elements, .. } => {
            let ik: IdealKind = parse(k)?;
            let ext = window_ext(common, &loaded, &w)?;
            let dpow = if ik == IdealKind::Conformal { common.dpow } else { 0 };
            let dropped = match (candidate, drop) {
                (Candidate::Drop, Some(d)) => Some(parse::<BasisIndex>(d)?),
                (Candidate::Drop, None) => Some(zero_index(&kind)?),
                _ => None,
            };
            let span = match candidate {
                Candidate::J => candidate_j(&s.delta, &s.b, &ext),
                Candidate::B => candidate_b(&s.delta, &s.b, &ext, dpow),
                Candidate::Full => Truncation::new(&ext, dpow).basis(),
                Candidate::Drop => candidate_without(&ext, dropped.as_ref().expect("set above")),
                Candidate::Span => elements.iter().map(|e| parse::<PolyElement>(e)).collect::<Result<Vec<_>>>()?,
            };
            let ca = loaded.built.conformal();
            let target: Target = if ik == IdealKind::Conformal { (&ca).into() } else { gd.into() };
            let r = is_ideal(target, ik, &span, &w, &ext, dpow)?.param("candidate", format!("{candidate:?}").to_uppercase());
            let model = expect::is_ideal(s, k, *candidate, dropped.as_ref());
            vec![with_expect(r, model, common)]
        }
        Command::SimplicityEvidence { trials, .. } => {
            let ca = loaded.built.conformal();
            let cfg = EvidenceConfig {
                window_ext: window_ext(common, &loaded, &w)?,
                window: w,
                dpow_bound: common.dpow,
                trials: *trials,
                seed: seed(common)?,
            };
            let (r, _) = simplicity_evidence_report(&ca, &cfg)?;
            vec![with_expect(r, expect::simplicity(s), common)]
        }
        Command::OsbornIso(_) => unreachable!("handled above"),
    };
    Ok(reports)
}
