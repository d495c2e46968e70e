use std::io::Write;

use serde::{Deserialize, Serialize};

use ellcert::cost::{
    check_against_published, format_eps, published_eps, render_csv, render_text, reproduce_table,
};
use ellcert::exact::rational::{parse_rational, to_decimal_string, to_fraction_string};
use ellcert::phi::{
    check_expansion_agreement, verify_bound_ordering, verify_bounds, verify_log_inequalities,
    BoundKind, BoundReport, ORDERING_CHAIN,
};
use ellcert::planner::{
    certificate_sharp_certified, compare_phi_to_threshold, ell_bf, ell_ps_with_precision,
    ell_star_search, plan,
};
use ellcert::testbed::{
    random_instance, ratio_report, CoverageInstance, RandomParams, RatioReport, MAX_BRUTE_GROUND,
};
use ellcert::{Comparison, EpsSpec, Precision, Rational};

use crate::args::{Cli, Command, Format, Rule, Suite};
use crate::output::{write_csv, write_pairs, write_record};
use crate::{CliError, Status};

/// Longest exact fraction printed in text output; longer ones appear as decimals only.
const FRACTION_TEXT_LIMIT: usize = 40;
const DECIMALS: usize = 12;
/// Upper limit on the number of points a `--grid` may expand to.
const GRID_LIMIT: usize = 1_000_000;

pub(crate) fn dispatch(
    cli: &Cli,
    policy: Precision,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Status, CliError> {
    let format = cli.run.format;
    match &cli.command {
        Command::Plan { eps, rule } => cmd_plan(&parse_eps(eps)?, *rule, policy, format, out),
        Command::Verify {
            suite,
            lmin,
            lmax,
            grid,
            ells,
        } => match suite {
            Suite::Bounds => verify_bounds_cmd(
                lmin.unwrap_or(1),
                lmax.unwrap_or(10_000),
                policy,
                format,
                out,
            ),
            Suite::Ordering => {
                verify_ordering_cmd(lmin.unwrap_or(2), lmax.unwrap_or(100), policy, format, out)
            }
            Suite::Logs => verify_logs_cmd(&parse_grid(grid)?, policy, format, out),
            Suite::Expansion => verify_expansion_cmd(ells, policy, format, out),
        },
        Command::Table { eps, check } => cmd_table(eps, *check, policy, format, out, err),
        Command::Certify { ell, eps } => cmd_certify(*ell, &parse_eps(eps)?, policy, format, out),
        Command::Testbed {
            instance,
            random,
            eps,
        } => {
            let inst = match (instance, random) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path).map_err(|e| {
                        CliError::Usage(format!("cannot read {}: {e}", path.display()))
                    })?;
                    CoverageInstance::from_json(&text)
                        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
                }
                (None, Some(n)) if *n > MAX_BRUTE_GROUND => {
                    return Err(CliError::Usage(format!(
                        "--random supports at most {MAX_BRUTE_GROUND} elements, got {n}"
                    )));
                }
                (None, Some(n)) => random_instance(
                    cli.run.seed.unwrap_or(0),
                    RandomParams {
                        n: *n,
                        ..RandomParams::default()
                    },
                ),
                (None, None) => {
                    return Err(CliError::Usage(
                        "one of --instance or --random is required".into(),
                    ))
                }
            };
            cmd_testbed(&inst, &parse_eps(eps)?, cli.run.seed, policy, format, out)
        }
    }
}

fn parse_eps(text: &str) -> Result<EpsSpec, CliError> {
    text.parse::<EpsSpec>()
        .map_err(|e| CliError::Usage(format!("--eps {text:?}: {e}")))
}

/// `a:b:step`, every endpoint an exact decimal or fraction.
fn parse_grid(text: &str) -> Result<Vec<Rational>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("--grid {text:?}: {why}"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(bad("expected a:b:step"));
    };
    let parse = |s: &str| parse_rational(s).map_err(|e| bad(&e.to_string()));
    let (a, b, step) = (parse(a)?, parse(b)?, parse(step)?);
    if step <= Rational::default() {
        return Err(bad("step must be positive"));
    }
    let mut points = Vec::new();
    let mut x = a;
    while x <= b {
        if points.len() == GRID_LIMIT {
            return Err(bad("too many points"));
        }
        points.push(x.clone());
        x += &step;
    }
    Ok(points)
}

/// Integers as is; other values as a short exact fraction and a truncated decimal.
fn show_rational(q: &Rational) -> String {
    let frac = to_fraction_string(q);
    if q.is_integer() {
        return frac;
    }
    let dec = to_decimal_string(q, DECIMALS);
    if frac.len() <= FRACTION_TEXT_LIMIT {
        format!("{frac} ≈ {dec}")
    } else {
        format!("≈ {dec}")
    }
}

fn show_eps(eps: &EpsSpec) -> String {
    let sci = format_eps(eps);
    let frac = eps.to_string();
    if sci == frac {
        frac
    } else {
        format!("{sci} = {frac}")
    }
}

/// A single ℓ from one rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleOutput {
    pub eps: EpsSpec,
    pub rule: String,
    pub ell: u64,
    pub precision_used: u32,
}

fn cmd_plan(
    eps: &EpsSpec,
    rule: Rule,
    policy: Precision,
    format: Format,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    if rule == Rule::All {
        let p = plan(eps, policy)?;
        match format {
            Format::Json => write_record(out, "plan", &p)?,
            Format::Csv => write_csv(
                out,
                &[
                    "eps",
                    "ell_bf",
                    "ell_ps",
                    "ell_star",
                    "rho_star",
                    "certificate_holds_at_star",
                    "precision_used",
                ],
                &[vec![
                    format_eps(eps),
                    p.ell_bf.to_string(),
                    p.ell_ps.to_string(),
                    p.ell_star.to_string(),
                    to_decimal_string(&p.rho_star, DECIMALS),
                    p.certificate_holds_at_star.to_string(),
                    p.precision_used.to_string(),
                ]],
            )?,
            Format::Text => write_pairs(
                out,
                &[
                    ("eps", show_eps(eps)),
                    ("ell_bf", p.ell_bf.to_string()),
                    ("ell_ps", p.ell_ps.to_string()),
                    ("ell_star", p.ell_star.to_string()),
                    ("rho(ell_star)", show_rational(&p.rho_star)),
                    (
                        "certificate at ell_star",
                        if p.certificate_holds_at_star {
                            "holds"
                        } else {
                            "does not hold (it is sufficient only)"
                        }
                        .to_string(),
                    ),
                    ("precision bits", p.precision_used.to_string()),
                ],
            )?,
        }
        return Ok(Status::Pass);
    }
    let (name, ell, bits) = match rule {
        Rule::Bf => ("bf", ell_bf(eps)?, 0),
        Rule::Ps => {
            let (ell, bits) = ell_ps_with_precision(eps, policy)?;
            ("ps", ell, bits)
        }
        Rule::Star => {
            let s = ell_star_search(eps, policy)?;
            ("star", s.ell_star, s.precision_bits)
        }
        Rule::All => unreachable!("handled above"),
    };
    let r = RuleOutput {
        eps: eps.clone(),
        rule: name.into(),
        ell,
        precision_used: bits,
    };
    match format {
        Format::Json => write_record(out, "ell", &r)?,
        Format::Csv => write_csv(
            out,
            &["eps", "rule", "ell", "precision_used"],
            &[vec![
                format_eps(eps),
                r.rule.clone(),
                ell.to_string(),
                bits.to_string(),
            ]],
        )?,
        Format::Text => writeln!(out, "ell_{name}  {ell}")?,
    }
    Ok(Status::Pass)
}

fn bound_status(r: &BoundReport) -> Status {
    if !r.failures.is_empty() {
        Status::Failure
    } else if !r.inconclusive.is_empty() {
        Status::Inconclusive
    } else {
        Status::Pass
    }
}

fn verify_bounds_cmd(
    lmin: u64,
    lmax: u64,
    policy: Precision,
    format: Format,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    if lmin == 0 || lmin > lmax {
        return Err(CliError::Usage(format!(
            "need 1 <= lmin <= lmax, got {lmin}..{lmax}"
        )));
    }
    let mut reports = verify_bounds(
        &[BoundKind::Sharp, BoundKind::PolyaSzego],
        lmin..=lmax,
        policy,
    )?;
    let loose_from = lmin.max(2);
    if loose_from <= lmax {
        reports.extend(verify_bounds(
            &[BoundKind::LooseRecip, BoundKind::LooseLinear],
            loose_from..=lmax,
            policy,
        )?);
    }
    let status = reports
        .iter()
        .map(bound_status)
        .max()
        .unwrap_or(Status::Pass);
    match format {
        Format::Json => {
            for r in &reports {
                write_record(out, "bound_report", r)?;
            }
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.kind.name().to_string(),
                        r.first_ell.to_string(),
                        r.last_ell.to_string(),
                        r.passed.to_string(),
                        r.failures.len().to_string(),
                        r.inconclusive.len().to_string(),
                        r.max_precision_bits.to_string(),
                        bound_status(r).label().to_string(),
                    ]
                })
                .collect();
            write_csv(
                out,
                &[
                    "bound",
                    "first_ell",
                    "last_ell",
                    "passed",
                    "failed",
                    "inconclusive",
                    "max_precision_bits",
                    "status",
                ],
                &rows,
            )?;
        }
        Format::Text => {
            for r in &reports {
                writeln!(
                    out,
                    "phi <= {:<12}  ell {}..{}  passed {}  failed {}  inconclusive {}  max bits {}  {}",
                    r.kind.name(),
                    r.first_ell,
                    r.last_ell,
                    r.passed,
                    r.failures.len(),
                    r.inconclusive.len(),
                    r.max_precision_bits,
                    bound_status(r).label()
                )?;
                for f in &r.failures {
                    writeln!(
                        out,
                        "  counterexample at ell = {}: phi is {} than the bound",
                        f.ell, f.comparison
                    )?;
                }
                for ell in &r.inconclusive {
                    writeln!(out, "  unresolved at ell = {ell}")?;
                }
            }
        }
    }
    Ok(status)
}

fn verify_ordering_cmd(
    lmin: u64,
    lmax: u64,
    policy: Precision,
    format: Format,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    if lmin < 2 || lmin > lmax {
        return Err(CliError::Usage(format!(
            "ordering needs 2 <= lmin <= lmax, got {lmin}..{lmax}"
        )));
    }
    let r = verify_bound_ordering(lmin..=lmax, policy)?;
    let status = if r
        .failures
        .iter()
        .any(|f| f.comparison == Comparison::Greater)
    {
        Status::Failure
    } else if !r.failures.is_empty() || r.exception_at_one == Comparison::Unresolved {
        Status::Inconclusive
    } else if r.exception_at_one != Comparison::Greater {
        Status::Failure
    } else {
        Status::Pass
    };
    let chain: Vec<&str> = std::iter::once(ORDERING_CHAIN[0].0.name())
        .chain(ORDERING_CHAIN.iter().map(|(_, u)| u.name()))
        .collect();
    match format {
        Format::Json => write_record(out, "ordering_report", &r)?,
        Format::Csv => write_csv(
            out,
            &[
                "chain",
                "first_ell",
                "last_ell",
                "passed",
                "failed",
                "exception_at_one",
                "status",
            ],
            &[vec![
                chain.join(" <= "),
                r.first_ell.to_string(),
                r.last_ell.to_string(),
                r.passed.to_string(),
                r.failures.len().to_string(),
                r.exception_at_one.to_string(),
                status.label().to_string(),
            ]],
        )?,
        Format::Text => {
            writeln!(
                out,
                "ordering {}  ell {}..{}  passed {}  failed {}  {}",
                chain.join(" <= "),
                r.first_ell,
                r.last_ell,
                r.passed,
                r.failures.len(),
                status.label()
            )?;
            for f in &r.failures {
                writeln!(
                    out,
                    "  ell = {}: {} is {} than {}",
                    f.ell,
                    f.lower.name(),
                    f.comparison,
                    f.upper.name()
                )?;
            }
            writeln!(
                out,
                "  exception at ell = 1: sharp is {} than polya_szego (expected greater)",
                r.exception_at_one
            )?;
        }
    }
    Ok(status)
}

fn verify_logs_cmd(
    points: &[Rational],
    policy: Precision,
    format: Format,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    let r = verify_log_inequalities(points, policy)?;
    let status = if r
        .failures
        .iter()
        .any(|f| f.comparison == Comparison::Greater)
    {
        Status::Failure
    } else if !r.failures.is_empty() {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    match format {
        Format::Json => write_record(out, "log_report", &r)?,
        Format::Csv => write_csv(
            out,
            &[
                "points",
                "checks",
                "passed",
                "exact_equalities",
                "failed",
                "status",
            ],
            &[vec![
                r.points.to_string(),
                (r.points * 3).to_string(),
                r.passed.to_string(),
                r.exact_equalities.to_string(),
                r.failures.len().to_string(),
                status.label().to_string(),
            ]],
        )?,
        Format::Text => {
            writeln!(
                out,
                "log_weak, log_pade, log_tail4  points {}  checks {}  passed {}  exact equalities {}  failed {}  {}",
                r.points,
                r.points * 3,
                r.passed,
                r.exact_equalities,
                r.failures.len(),
                status.label()
            )?;
            for f in &r.failures {
                writeln!(
                    out,
                    "  {} at x = {}: lower bound is {} than log(1+x)",
                    f.inequality.name(),
                    to_fraction_string(&f.x),
                    f.comparison
                )?;
            }
        }
    }
    Ok(status)
}

fn verify_expansion_cmd(
    ells: &[u64],
    policy: Precision,
    format: Format,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    let r = check_expansion_agreement(ells, policy)?;
    let point_status = |c: Comparison| match c {
        Comparison::Less => Status::Pass,
        Comparison::Unresolved => Status::Inconclusive,
        _ => Status::Failure,
    };
    let status = r
        .points
        .iter()
        .map(|p| point_status(p.within_envelope))
        .max()
        .unwrap_or(Status::Pass);
    match format {
        Format::Json => write_record(out, "expansion_report", &r)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = r
                .points
                .iter()
                .map(|p| {
                    vec![
                        p.ell.to_string(),
                        to_decimal_string(p.scaled_defect.lo(), 8),
                        to_decimal_string(p.scaled_defect.hi(), 8),
                        r.envelope.to_string(),
                        point_status(p.within_envelope).label().to_string(),
                    ]
                })
                .collect();
            write_csv(
                out,
                &[
                    "ell",
                    "scaled_defect_lo",
                    "scaled_defect_hi",
                    "envelope",
                    "status",
                ],
                &rows,
            )?;
        }
        Format::Text => {
            for p in &r.points {
                writeln!(
                    out,
                    "ell = {:<6}  ell^4 * defect in {:.8}  |.| < {}  {}",
                    p.ell,
                    p.scaled_defect,
                    r.envelope,
                    point_status(p.within_envelope).label()
                )?;
            }
        }
    }
    Ok(status)
}

fn cmd_table(
    eps: &[String],
    check: bool,
    policy: Precision,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Status, CliError> {
    let list = if eps.is_empty() {
        published_eps()
    } else {
        eps.iter().map(|e| parse_eps(e)).collect::<Result<_, _>>()?
    };
    let rows = reproduce_table(&list, policy)?;
    match format {
        Format::Json => {
            for r in &rows {
                write_record(out, "table_row", r)?;
            }
        }
        Format::Csv => write!(out, "{}", render_csv(&rows))?,
        Format::Text => write!(out, "{}", render_text(&rows))?,
    }
    if !check {
        return Ok(Status::Pass);
    }
    let mismatches = check_against_published(&rows);
    for m in &mismatches {
        writeln!(err, "check: mismatch: {m}")?;
    }
    if mismatches.is_empty() {
        writeln!(err, "check: every published cell matches")?;
        Ok(Status::Pass)
    } else {
        Ok(Status::Failure)
    }
}

/// The sufficient certificate next to the direct comparison it implies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifyOutput {
    pub ell: u64,
    pub eps: EpsSpec,
    /// `exp(1/(2ℓ) - 1/(3ℓ²) + 1/(4ℓ³)) <= 1 + eε`.
    pub certificate: bool,
    pub certificate_comparison: Comparison,
    /// `φ(ℓ)` against `1/e + ε`.
    pub direct_comparison: Comparison,
    pub certificate_is_sufficient_only: bool,
}

fn cmd_certify(
    ell: u64,
    eps: &EpsSpec,
    policy: Precision,
    format: Format,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    if ell == 0 {
        return Err(CliError::Usage("--ell must be at least 1".into()));
    }
    let cert = certificate_sharp_certified(ell, eps, policy)?;
    let direct = compare_phi_to_threshold(ell, eps, policy)?;
    let o = CertifyOutput {
        ell,
        eps: eps.clone(),
        certificate: cert.comparison.is_le(),
        certificate_comparison: cert.comparison,
        direct_comparison: direct.comparison,
        certificate_is_sufficient_only: true,
    };
    match format {
        Format::Json => write_record(out, "certify", &o)?,
        Format::Csv => write_csv(
            out,
            &[
                "ell",
                "eps",
                "certificate",
                "certificate_comparison",
                "direct_comparison",
            ],
            &[vec![
                ell.to_string(),
                format_eps(eps),
                o.certificate.to_string(),
                cert.comparison.to_string(),
                direct.comparison.to_string(),
            ]],
        )?,
        Format::Text => write_pairs(
            out,
            &[
                ("ell", ell.to_string()),
                ("eps", show_eps(eps)),
                (
                    "certificate",
                    format!(
                        "{} (exp(eta) is {} than 1 + e*eps)",
                        o.certificate, cert.comparison
                    ),
                ),
                (
                    "direct",
                    format!("phi(ell) is {} than 1/e + eps", direct.comparison),
                ),
                (
                    "note",
                    "the certificate is sufficient, not necessary; the direct comparison decides"
                        .into(),
                ),
            ],
        )?,
    }
    Ok(if direct.comparison == Comparison::Greater {
        Status::Failure
    } else {
        Status::Pass
    })
}

fn cmd_testbed(
    inst: &CoverageInstance,
    eps: &EpsSpec,
    seed: Option<u64>,
    policy: Precision,
    format: Format,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    let r: RatioReport = ratio_report(inst, eps, seed, policy)?;
    let check_ok = r.monotone_submodular.as_ref().is_none_or(|v| v.holds);
    let status = if !check_ok || r.rho_vs_threshold == Comparison::Less {
        Status::Failure
    } else if r.rho_vs_threshold == Comparison::Unresolved {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    let set = |names: &[String]| format!("{{{}}}", names.join(","));
    match format {
        Format::Json => write_record(out, "testbed_report", &r)?,
        Format::Csv => write_csv(
            out,
            &[
                "n",
                "rank",
                "eps",
                "opt_value",
                "greedy_value",
                "greedy_ratio",
                "ell_star",
                "target",
                "rho_certified",
                "calls_check",
                "calls_brute_force",
                "calls_greedy",
                "seed",
            ],
            &[vec![
                r.n.to_string(),
                r.rank.to_string(),
                format_eps(eps),
                to_fraction_string(&r.opt_value),
                to_fraction_string(&r.greedy_value),
                r.greedy_ratio.clone().unwrap_or_default(),
                r.ell_star.to_string(),
                to_decimal_string(&r.target, DECIMALS),
                r.rho_certified().to_string(),
                r.oracle_calls.check.to_string(),
                r.oracle_calls.brute_force.to_string(),
                r.oracle_calls.greedy.to_string(),
                r.seed.map(|s| s.to_string()).unwrap_or_default(),
            ]],
        )?,
        Format::Text => {
            let check = match &r.monotone_submodular {
                None => "skipped (ground set too large)".to_string(),
                Some(v) if v.holds => {
                    format!("monotone submodular ({} evaluations)", v.evaluations)
                }
                Some(v) => v.witness.map(|w| w.describe(inst)).unwrap_or_default(),
            };
            write_pairs(
                out,
                &[
                    ("ground size", r.n.to_string()),
                    ("matroid rank", r.rank.to_string()),
                    ("check", check),
                    (
                        "OPT",
                        format!(
                            "{} value {} ({} calls)",
                            set(&r.opt_set),
                            show_rational(&r.opt_value),
                            r.oracle_calls.brute_force
                        ),
                    ),
                    (
                        "greedy",
                        format!(
                            "{} value {} ratio {} ({} calls)",
                            set(&r.greedy_set),
                            show_rational(&r.greedy_value),
                            r.greedy_ratio.as_deref().unwrap_or("n/a"),
                            r.oracle_calls.greedy
                        ),
                    ),
                    ("eps", show_eps(eps)),
                    ("ell_star", r.ell_star.to_string()),
                    ("rho(ell_star)", show_rational(&r.rho)),
                    ("1 - 1/e - eps", format!("in {:.12}", r.threshold)),
                    (
                        "rho vs threshold",
                        format!(
                            "{} ({})",
                            r.rho_vs_threshold,
                            if r.rho_certified() {
                                "certified"
                            } else {
                                "not certified"
                            }
                        ),
                    ),
                    ("target rho*f(OPT)", show_rational(&r.target)),
                    ("local search", r.local_search_output.clone()),
                    (
                        "seed",
                        r.seed
                            .map(|s| s.to_string())
                            .unwrap_or_else(|| "none".into()),
                    ),
                ],
            )?;
        }
    }
    Ok(status)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0:10:0.125").unwrap();
        assert_eq!(g.len(), 81);
        assert_eq!(g[80], Rational::from_integer(10.into()));
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("1:0:1").unwrap().is_empty());
    }
}
