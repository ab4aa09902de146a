//! `shortdiv`: experiments on divisors in short intervals.
//!
//! Exit status is 0 on success, 1 when a check fails and 2 on bad
//! arguments.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use shortdiv_core::arith::{parse_biguint, set_default_precision};
use shortdiv_core::bounds::{
    alpha_closed_form, alpha_delta, alpha_delta_grid, alpha_oracle, pr2_holds, prop1_bound, sandwich_holds, xi,
    xi_grid,
};
use shortdiv_core::sieve::{count_unsolvable, sieve_window_check, unsolvable_bruteforce};
use shortdiv_core::split::{lemma1_check, lemma2_order, prefix_property, split_transcript, SplitOutcome};
use shortdiv_core::verify::{render, run_all, run_criterion, CriterionResult, CRITERIA};
use shortdiv_core::window::{conjecture_scan, integer_window};
use shortdiv_core::witness::{
    build_witness, build_witness_large_theta, prop4_witness, search_witness, stirling_diagnostic,
    LargeThetaOutcome, Prop4Witness, WitnessReport,
};
use shortdiv_core::{count_window, factorize, parse_ratio, Error, ExponentWindow};

#[derive(Parser, Debug)]
#[command(name = "shortdiv", version, about = "Divisors of integers in short intervals")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for sampled suites.
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,
    /// Starting precision, in bits, for certified comparisons.
    #[arg(long, env = "SHORTDIV_PRECISION_BITS", global = true)]
    precision_bits: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

type Ratio = BigRational;

fn ratio(s: &str) -> Result<Ratio, String> {
    parse_ratio(s).map_err(|e| e.to_string())
}

fn big(s: &str) -> Result<BigUint, String> {
    parse_biguint(s).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count divisors of n in [X, X+Y], given as X = n^theta, Y = n^eta or
    /// absolutely with --x/--y. CSV: n,lo,hi,count.
    Count {
        #[arg(long, value_parser = big)]
        n: BigUint,
        #[arg(long, value_parser = ratio, requires = "eta", conflicts_with_all = ["x", "y"])]
        theta: Option<Ratio>,
        #[arg(long, value_parser = ratio)]
        eta: Option<Ratio>,
        #[arg(long, value_parser = ratio, requires = "y")]
        x: Option<Ratio>,
        #[arg(long, value_parser = ratio)]
        y: Option<Ratio>,
    },
    /// Running maxima of D_n(n^theta, n^(theta-epsilon)). CSV: n,count,theta,epsilon.
    Scan {
        #[arg(long, default_value_t = 1)]
        min_n: u64,
        #[arg(long)]
        max_n: u64,
        #[arg(long, value_parser = ratio)]
        theta: Ratio,
        #[arg(long, value_parser = ratio)]
        epsilon: Ratio,
    },
    /// The exponent xi(theta, eta), or a grid of it. CSV: theta,eta,xi,case.
    Xi {
        #[arg(long, value_parser = ratio, required_unless_present = "grid")]
        theta: Option<Ratio>,
        #[arg(long, value_parser = ratio, required_unless_present = "grid")]
        eta: Option<Ratio>,
        /// Evaluate on theta = i/(g+1), eta = j*theta/(g+1).
        #[arg(long, conflicts_with_all = ["theta", "eta"])]
        grid: Option<u32>,
    },
    /// Closed-form alpha(theta, eta) against a numeric search.
    /// CSV: theta,eta,alpha,case,oracle,deviation.
    Alpha {
        #[arg(long, value_parser = ratio)]
        theta: Ratio,
        #[arg(long, value_parser = ratio)]
        eta: Ratio,
        /// Grid points for the numeric search.
        #[arg(long, default_value_t = 1000)]
        oracle_grid: u32,
    },
    /// alpha(theta, eta, delta) with the sandwich and quadratic checks.
    /// CSV: theta,eta,delta,alpha,candidate,sandwich,pr2.
    AlphaDelta {
        #[arg(long, value_parser = ratio, required_unless_present = "grid")]
        theta: Option<Ratio>,
        #[arg(long, value_parser = ratio, required_unless_present = "grid")]
        eta: Option<Ratio>,
        #[arg(long, value_parser = ratio, required_unless_present = "grid")]
        delta: Option<Ratio>,
        #[arg(long, conflicts_with_all = ["theta", "eta", "delta"])]
        grid: Option<u32>,
        /// Deltas for --grid.
        #[arg(long, value_delimiter = ',', value_parser = ratio, default_value = "0.01,0.05,0.1,0.5,1")]
        deltas: Vec<Ratio>,
    },
    /// The cap on D_n(n^theta, n^(theta^2-epsilon)); with --n, also the
    /// actual count. CSV: theta,epsilon,bound,n,count.
    Prop1 {
        #[arg(long, value_parser = ratio)]
        theta: Ratio,
        #[arg(long, value_parser = ratio)]
        epsilon: Ratio,
        #[arg(long, value_parser = big)]
        n: Option<BigUint>,
    },
    /// Split n = ab for the window (n^theta, n^eta) and check it.
    /// CSV: n,theta,eta,regime,a,b,s,tau_b,bound,passed.
    Split {
        #[arg(long, value_parser = big)]
        n: BigUint,
        #[arg(long, value_parser = ratio)]
        theta: Ratio,
        #[arg(long, value_parser = ratio)]
        eta: Ratio,
    },
    /// The lcm/gcd inequality for a list of integers. CSV: d,t,holds.
    Lemma1 {
        #[arg(long, value_delimiter = ',', value_parser = big, required = true)]
        d: Vec<BigUint>,
        #[arg(long, allow_hyphen_values = true)]
        t: i64,
    },
    /// Reorder pairs x:y so every prefix has sum(x) <= sum(y). CSV: position,index,x,y.
    Lemma2 {
        /// Comma-separated pairs `x:y`.
        #[arg(long, value_delimiter = ',', value_parser = pair, required = true)]
        pairs: Vec<(Ratio, Ratio)>,
    },
    /// Unsolvable classes of x^2 + p^v u mod p^(v+1): closed form against
    /// brute force. CSV: p,v,u,recurrence,bruteforce,match.
    Lemma4 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        v: u32,
        #[arg(long, allow_hyphen_values = true)]
        u: i64,
    },
    /// Divisors near sqrt(an/b) against the elementary and sieve caps.
    /// CSV: n,a,b,i,Q,count,cap_elementary,cap_sieve,H,passed.
    SieveBound {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        i: u64,
        #[arg(long = "q", short = 'Q')]
        q: u64,
    },
    /// Packing witness (theta <= 1/2), its mirror (theta > 1/2), or with
    /// --m a single-divisor witness. CSV: key,value.
    Witness {
        #[arg(long, value_parser = ratio)]
        theta: Ratio,
        #[arg(long, value_parser = ratio)]
        epsilon: Ratio,
        #[arg(long = "M", value_parser = big, default_value = "10000")]
        big_m: BigUint,
        /// Double M until the packing succeeds.
        #[arg(long, conflicts_with = "m")]
        search: bool,
        #[arg(long, value_parser = big)]
        m: Option<BigUint>,
    },
    /// Run the acceptance criteria. CSV: id,name,status,cases,detail.
    VerifyAll {
        /// Stop starting new criteria after this many seconds.
        #[arg(long, default_value_t = 600)]
        budget_secs: u64,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

fn pair(s: &str) -> Result<(Ratio, Ratio), String> {
    let (x, y) = s.split_once(':').ok_or_else(|| format!("expected x:y, got {s}"))?;
    Ok((ratio(x)?, ratio(y)?))
}

struct Outcome {
    ok: bool,
    text: String,
    json: Value,
    csv: String,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|c| csv_field(c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn run(cmd: Command, seed: u64) -> Result<Outcome, Error> {
    match cmd {
        Command::Count { n, theta, eta, x, y } => {
            let w = match (theta, eta, x, y) {
                (Some(t), Some(e), None, None) => ExponentWindow::exponent(t, e)?,
                (None, None, Some(x), Some(y)) => ExponentWindow::absolute(x, y)?,
                _ => return Err(Error::Argument("give --theta/--eta or --x/--y".into())),
            };
            let f = factorize(&n)?;
            let c = count_window(&f, &w)?;
            let (lo, hi) = integer_window(&n, &w)?;
            Ok(Outcome {
                ok: true,
                text: format!("n = {f}\ninteger window [{lo}, {hi}]\ncount {c}\n"),
                json: json!({"n": n.to_string(), "lo": lo.to_string(), "hi": hi.to_string(), "count": c}),
                csv: csv(&["n", "lo", "hi", "count"], &[vec![n.to_string(), lo.to_string(), hi.to_string(), c.to_string()]]),
            })
        }
        Command::Scan { min_n, max_n, theta, epsilon } => {
            let t = conjecture_scan(min_n, max_n, &theta, &epsilon)?;
            let mut text = format!("running maxima of D_n(n^{theta}, n^({theta}-{epsilon})) for {min_n} <= n <= {max_n}\n");
            for r in &t.rows {
                text.push_str(&format!("{:>12} {}\n", r.n, r.count));
            }
            for (n, e) in &t.errors {
                text.push_str(&format!("error at n={n}: {e}\n"));
            }
            Ok(Outcome {
                ok: t.errors.is_empty(),
                csv: t.to_csv(&theta.to_string(), &epsilon.to_string()),
                json: to_json(&t),
                text,
            })
        }
        Command::Xi { theta, eta, grid } => {
            let points = match (grid, theta, eta) {
                (Some(g), _, _) => xi_grid(g),
                (None, Some(t), Some(e)) => vec![(t, e)],
                _ => return Err(Error::Argument("give --theta and --eta, or --grid".into())),
            };
            let mut rows = Vec::new();
            let mut js = Vec::new();
            for (t, e) in &points {
                let v = xi(t, e)?;
                js.push(json!({"theta": t.to_string(), "eta": e.to_string(), "xi": v.value.to_string(), "case": v.case_label}));
                rows.push(vec![t.to_string(), e.to_string(), v.value.to_string(), v.case_label.to_string()]);
            }
            let text = if points.len() == 1 {
                format!("xi = {} ({})\n", rows[0][2], rows[0][3])
            } else {
                rows.iter().map(|r| format!("{:>8} {:>10} {:>14} {}\n", r[0], r[1], r[2], r[3])).collect()
            };
            let json = if points.len() == 1 { js.remove(0) } else { Value::Array(js) };
            Ok(Outcome { ok: true, text, json, csv: csv(&["theta", "eta", "xi", "case"], &rows) })
        }
        Command::Alpha { theta, eta, oracle_grid } => {
            let a = alpha_closed_form(&theta, &eta)?;
            let t = theta.to_f64().unwrap_or(f64::NAN);
            let e = eta.to_f64().unwrap_or(f64::NAN);
            let o = alpha_oracle(t, e, oracle_grid);
            let dev = (a.to_f64() - o).abs();
            let ok = dev <= 1e-4;
            Ok(Outcome {
                ok,
                text: format!(
                    "alpha = {} ({}) ~ {:.10}\noracle  {o:.10}\ndeviation {dev:.3e} {}\n",
                    a.value,
                    a.case_label,
                    a.to_f64(),
                    mark(ok)
                ),
                json: json!({"theta": theta.to_string(), "eta": eta.to_string(), "alpha": a.value.to_string(),
                    "case": a.case_label, "oracle": o, "deviation": dev, "agrees": ok}),
                csv: csv(
                    &["theta", "eta", "alpha", "case", "oracle", "deviation"],
                    &[vec![theta.to_string(), eta.to_string(), a.value.to_string(), a.case_label.to_string(), format!("{o:.12}"), format!("{dev:.3e}")]],
                ),
            })
        }
        Command::AlphaDelta { theta, eta, delta, grid, deltas } => {
            let points = match (grid, theta, eta, delta) {
                (Some(g), ..) => alpha_delta_grid(g, &deltas),
                (None, Some(t), Some(e), Some(d)) => vec![(t, e, d)],
                _ => return Err(Error::Argument("give --theta, --eta and --delta, or --grid".into())),
            };
            let mut rows = Vec::new();
            let mut js = Vec::new();
            let mut all = true;
            for (t, e, d) in &points {
                let a = alpha_delta(t, e, d)?;
                let sw = sandwich_holds(t, e, d)?;
                let lo = a.exact.lower_ratio(128)?;
                let p2 = pr2_holds(t, e, &a.epsilon_var, &lo, 1000);
                all &= sw && p2;
                let v = a.value.to_decimal_string(20);
                let mut j = to_json(&a);
                j["theta"] = json!(t.to_string());
                j["eta"] = json!(e.to_string());
                j["delta"] = json!(d.to_string());
                j["sandwich"] = json!(sw);
                j["pr2"] = json!(p2);
                js.push(j);
                rows.push(vec![t.to_string(), e.to_string(), d.to_string(), v, a.candidate.label().to_string(), sw.to_string(), p2.to_string()]);
            }
            let text = if points.len() == 1 {
                let r = &rows[0];
                format!(
                    "alpha = {} ({})\nsandwich xi - delta <= alpha <= xi: {}\nquadratic lower bound on 1000-point grid: {}\n",
                    r[3], r[4], mark(r[5] == "true"), mark(r[6] == "true")
                )
            } else {
                let mut s: String = rows
                    .iter()
                    .map(|r| format!("{:>6} {:>24} {:>6} {} {} sandwich={} pr2={}\n", r[0], r[1], r[2], r[3], r[4], r[5], r[6]))
                    .collect();
                s.push_str(&format!("{} points, all checks {}\n", rows.len(), mark(all)));
                s
            };
            let json = if points.len() == 1 { js.remove(0) } else { Value::Array(js) };
            Ok(Outcome {
                ok: all,
                text,
                json,
                csv: csv(&["theta", "eta", "delta", "alpha", "candidate", "sandwich", "pr2"], &rows),
            })
        }
        Command::Prop1 { theta, epsilon, n } => {
            let bound = prop1_bound(&theta, &epsilon)?;
            let mut text = format!("bound {} ~ {:.6}\n", bound, bound.to_f64().unwrap_or(f64::NAN));
            let mut ok = true;
            let mut count = None;
            if let Some(n) = &n {
                let eta = &theta * &theta - &epsilon;
                let c = count_window(&factorize(n)?, &ExponentWindow::exponent(theta.clone(), eta)?)?;
                ok = BigRational::from_integer(c.into()) <= bound;
                text.push_str(&format!("D_n(n^theta, n^(theta^2-epsilon)) = {c} for n = {n}: {}\n", mark(ok)));
                count = Some(c);
            }
            let opt = |v: Option<String>| v.unwrap_or_default();
            Ok(Outcome {
                ok,
                text,
                json: json!({"theta": theta.to_string(), "epsilon": epsilon.to_string(), "bound": bound.to_string(),
                    "n": n.as_ref().map(ToString::to_string), "count": count, "within_bound": ok}),
                csv: csv(
                    &["theta", "epsilon", "bound", "n", "count"],
                    &[vec![theta.to_string(), epsilon.to_string(), bound.to_string(), opt(n.map(|v| v.to_string())), opt(count.map(|c| c.to_string()))]],
                ),
            })
        }
        Command::Split { n, theta, eta } => {
            let f = factorize(&n)?;
            let t = split_transcript(&f, &theta, &eta)?;
            let ok = t.passed();
            let (regime, a, b, s) = match &t.outcome {
                SplitOutcome::Split(sp) => ("split", sp.a.to_string(), sp.b.to_string(), sp.s.to_string()),
                SplitOutcome::TrivialRegime => ("trivial", String::new(), String::new(), String::new()),
                SplitOutcome::Proposition1Regime => ("small_window", String::new(), String::new(), String::new()),
            };
            let bound = t.bound.map(|b| format!("{b:.6}")).unwrap_or_default();
            let mut text = format!("n = {f}\nregime {regime}\n");
            if let Some(sp) = t.outcome.split() {
                text.push_str(&format!(
                    "a = {}\nb = {}\ns = {}, alpha = {} ({}), delta = {}\ntau(b) = {} <= {bound}: {}\ninvariants: {}\n",
                    sp.a,
                    sp.b,
                    sp.s,
                    sp.alpha_used.to_decimal_string(12),
                    sp.candidate.label(),
                    sp.delta.to_decimal_string(12),
                    t.tau_b,
                    mark(t.tau_b_check == Some(true)),
                    mark(t.invariants == Some(true)),
                ));
                if let Some(d) = &t.did {
                    text.push_str(&format!(
                        "divisor identity: direct {} summed {} (guarded terms {}): {}\n",
                        d.direct,
                        d.summed,
                        d.guarded,
                        mark(d.holds())
                    ));
                }
            }
            Ok(Outcome {
                ok,
                text,
                json: to_json(&t),
                csv: csv(
                    &["n", "theta", "eta", "regime", "a", "b", "s", "tau_b", "bound", "passed"],
                    &[vec![n.to_string(), theta.to_string(), eta.to_string(), regime.into(), a, b, s, t.tau_b.clone(), bound, ok.to_string()]],
                ),
            })
        }
        Command::Lemma1 { d, t } => {
            let ok = lemma1_check(&d, t)?;
            let ds: Vec<String> = d.iter().map(ToString::to_string).collect();
            Ok(Outcome {
                ok,
                text: format!("[{}], t = {t}: {}\n", ds.join(", "), if ok { "holds" } else { "VIOLATED" }),
                json: json!({"d": ds, "t": t, "holds": ok}),
                csv: csv(&["d", "t", "holds"], &[vec![ds.join(" "), t.to_string(), ok.to_string()]]),
            })
        }
        Command::Lemma2 { pairs } => {
            let order = lemma2_order(&pairs)?;
            let ok = prefix_property(&pairs, &order);
            let rows: Vec<Vec<String>> = order
                .iter()
                .enumerate()
                .map(|(pos, &i)| vec![pos.to_string(), i.to_string(), pairs[i].0.to_string(), pairs[i].1.to_string()])
                .collect();
            let mut text: String = rows.iter().map(|r| format!("{:>4} {:>4} {:>10} {:>10}\n", r[0], r[1], r[2], r[3])).collect();
            text.push_str(&format!("prefix property: {}\n", mark(ok)));
            Ok(Outcome {
                ok,
                text,
                json: json!({"order": order, "prefix_property": ok}),
                csv: csv(&["position", "index", "x", "y"], &rows),
            })
        }
        Command::Lemma4 { p, v, u } => {
            let a = count_unsolvable(p, v, u)?;
            let b = unsolvable_bruteforce(p, v, u)?;
            let ok = a == b;
            let verdict = if ok { "MATCH" } else { "MISMATCH" };
            Ok(Outcome {
                ok,
                text: format!("recurrence {a}\nbrute force {b}\n{verdict}\n"),
                json: json!({"p": p, "v": v, "u": u, "recurrence": a, "bruteforce": b, "match": ok}),
                csv: csv(
                    &["p", "v", "u", "recurrence", "bruteforce", "match"],
                    &[vec![p.to_string(), v.to_string(), u.to_string(), a.to_string(), b.to_string(), ok.to_string()]],
                ),
            })
        }
        Command::SieveBound { n, a, b, i, q } => {
            let r = sieve_window_check(&factorize(&BigUint::from(n))?, a, b, i, q)?;
            let ok = r.passed();
            let text = format!(
                "divisors in window {}\nelementary cap {}\nsieve cap {} ~ {:.4} (Q = {}, H = {})\nmoduli {}\nexcluded classes avoided: {}\ninjective: {}\nidentity: {}\n",
                r.count,
                r.cap_elementary,
                r.cap_sieve,
                r.cap_sieve_f64(),
                r.q,
                r.h_total,
                r.moduli.iter().map(|m| m.modulus.to_string()).collect::<Vec<_>>().join(" "),
                mark(r.avoids_classes),
                mark(r.injective),
                mark(r.identity_holds),
            );
            Ok(Outcome {
                ok,
                text,
                json: to_json(&r),
                csv: csv(
                    &["n", "a", "b", "i", "Q", "count", "cap_elementary", "cap_sieve", "H", "passed"],
                    &[vec![n.to_string(), a.to_string(), b.to_string(), i.to_string(), q.to_string(), r.count.to_string(),
                        r.cap_elementary.to_string(), r.cap_sieve.to_string(), r.h_total.to_string(), ok.to_string()]],
                ),
            })
        }
        Command::Witness { theta, epsilon, big_m, search, m } => {
            if let Some(m) = m {
                let w = prop4_witness(&theta, &epsilon, &m)?;
                return Ok(single_divisor(&w));
            }
            let half = BigRational::new(1.into(), 2.into());
            if theta > half {
                if search {
                    return Err(Error::Argument("--search applies to theta <= 1/2".into()));
                }
                return Ok(match build_witness_large_theta(&theta, &epsilon, &big_m)? {
                    LargeThetaOutcome::Mirror(r) => packing(&r),
                    LargeThetaOutcome::SingleDivisor(w) => single_divisor(&w),
                });
            }
            let rep = if search {
                search_witness(&theta, &epsilon, &big_m, 64)?
                    .ok_or_else(|| Error::Construction("no success within 64 doublings".into()))?
            } else {
                build_witness(&theta, &epsilon, &big_m)?
            };
            Ok(packing(&rep))
        }
        Command::VerifyAll { budget_secs, only } => {
            let results: Vec<CriterionResult> = if only.is_empty() {
                run_all(seed, Some(Duration::from_secs(budget_secs)))
            } else {
                let mut v = Vec::new();
                for id in only {
                    v.push(run_criterion(id, seed).ok_or_else(|| {
                        Error::Argument(format!("criterion ids run from 1 to {}", CRITERIA - 1))
                    })?);
                }
                v
            };
            let ok = results.iter().all(|r| r.status != shortdiv_core::verify::Status::Fail);
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|r| vec![r.id.to_string(), r.name.into(), format!("{:?}", r.status).to_uppercase(), r.cases.to_string(), r.detail.clone()])
                .collect();
            Ok(Outcome {
                ok,
                text: render(&results),
                json: to_json(&results),
                csv: csv(&["id", "name", "status", "cases", "detail"], &rows),
            })
        }
    }
}

fn packing(r: &WitnessReport) -> Outcome {
    let primes: Vec<String> = r.primes.iter().map(ToString::to_string).collect();
    let stirling = stirling_diagnostic(r.s, r.r, &r.theta, &r.epsilon).ok();
    let mut text = String::new();
    text.push_str(&format!("construction {:?}, theta = {}, epsilon = {}\n", r.variant, r.theta, r.epsilon).to_lowercase());
    text.push_str(&format!("M = {}\nL = (ln M)^2 = {}\n", r.big_m, r.l.to_decimal_string(12)));
    text.push_str(&format!(
        "s = {}, r = {}{}; r-bound {}\n",
        r.s,
        r.r,
        if r.fractional_edge { " (theta*s integral)" } else { "" },
        mark(r.r_bound_holds)
    ));
    text.push_str(&format!("primes {}\n", primes.join(" ")));
    text.push_str(&format!("m = {} (extremal: {})\nN = m*N0 = {}\n", r.m, mark(r.m_extremal), r.n));
    text.push_str(&format!(
        "window [{}, {}]\ninteger window [{}, {}]\n",
        r.window_lo.to_decimal_string(12),
        r.window_hi.to_decimal_string(12),
        r.window_int_lo,
        r.window_int_hi
    ));
    text.push_str(&format!("products of size: {}\n", mark(r.product_size_holds)));
    if let Some(c) = r.complement_count {
        text.push_str(&format!("complements in [N^theta, N^theta + 1.2 N^(theta-epsilon)]: {c}\n"));
    }
    text.push_str(&format!("packed {} of {}: {}\n", r.packed_count, r.binom_target, if r.success { "success" } else { "FAILURE" }));
    if let Some(d) = &stirling {
        text.push_str(&format!("binom(s,r) = {}, closed-form estimate {:.6}\n", d.exact, d.closed_form));
    }
    let mut json = to_json(r);
    json["stirling"] = to_json(&stirling);
    let rows = vec![
        vec!["M".into(), r.big_m.to_string()],
        vec!["s".into(), r.s.to_string()],
        vec!["r".into(), r.r.to_string()],
        vec!["m".into(), r.m.to_string()],
        vec!["N".into(), r.n.to_string()],
        vec!["window_int_lo".into(), r.window_int_lo.to_string()],
        vec!["window_int_hi".into(), r.window_int_hi.to_string()],
        vec!["packed_count".into(), r.packed_count.to_string()],
        vec!["binom_target".into(), r.binom_target.to_string()],
        vec!["success".into(), r.success.to_string()],
    ];
    Outcome { ok: r.success, text, json, csv: csv(&["key", "value"], &rows) }
}

fn single_divisor(w: &Prop4Witness) -> Outcome {
    let text = format!(
        "m = {}\nv = {}\nn0 = {}\ndivisor {} in [n0^theta, n0^theta + n0^(theta-epsilon)]: {}\n",
        w.m,
        w.v,
        w.n0,
        w.divisor,
        mark(w.in_window)
    );
    let rows = vec![
        vec!["m".into(), w.m.to_string()],
        vec!["v".into(), w.v.to_string()],
        vec!["n0".into(), w.n0.to_string()],
        vec!["divisor".into(), w.divisor.to_string()],
        vec!["in_window".into(), w.in_window.to_string()],
    ];
    Outcome { ok: w.in_window, text, json: to_json(w), csv: csv(&["key", "value"], &rows) }
}

fn emit(out: &str, path: Option<&PathBuf>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, out),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(out.as_bytes())?;
            so.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    if let Some(bits) = g.precision_bits {
        if let Err(e) = set_default_precision(bits) {
            eprintln!("shortdiv: {e}");
            return ExitCode::from(2);
        }
    }
    if let Some(j) = g.jobs {
        if j == 0 {
            eprintln!("shortdiv: --jobs must be positive");
            return ExitCode::from(2);
        }
        // Fails only if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let outcome = match run(cli.command, g.seed) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("shortdiv: {e}");
            return ExitCode::from(match e {
                Error::Argument(_) => 2,
                _ => 1,
            });
        }
    };
    let body = match g.format {
        Format::Text => outcome.text,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.json).expect("json value");
            s.push('\n');
            s
        }
        Format::Csv => outcome.csv,
    };
    if let Err(e) = emit(&body, g.output.as_ref()) {
        eprintln!("shortdiv: cannot write output: {e}");
        return ExitCode::from(1);
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
