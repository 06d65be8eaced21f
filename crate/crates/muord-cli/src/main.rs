//! Command-line interface over the `muord` library.
//!
//! Every command reads a monodromy datum in key=value form — `m=5 r=4
//! a=1,1,1,2` for a cyclic cover, `G=2x6 r=4 a=(1,0);(1,1);(0,2);(0,3)`
//! for an abelian one — together with a prime `p=...`.  Output is
//! human-readable text by default; `--json` replaces it with a single
//! machine-readable document on stdout whose layout is versioned by its
//! `schema` field.  Machine documents contain no wall-clock data, so two
//! invocations with the same arguments and seed are byte-identical;
//! elapsed time goes to stderr.
//!
//! Exit codes: 0 on success (including a found witness), 2 when a witness
//! search exhausts its budget, 1 on input errors.

use std::env;
use std::process::ExitCode;
use std::time::Instant;

use muord::arith;
use muord::curve::{self, CurveCheck, OrbitCheck};
use muord::eo;
use muord::field::Fq;
use muord::hw;
use muord::monodromy::{self, AnyDatum, CharacterSystem, CyclicDatum};
use muord::newton::{self, NewtonPolygon};
use serde_json::{json, Value};

const SCHEMA: &str = "muord/1";

fn usage() -> String {
    "\
usage: muord <command> <datum> p=<prime> [options]

commands:
  analyze     validation, genus, signature table, Frobenius orbits,
              cyclic quotients, generic slope polygons
  hw          one symbolic matrix entry:
              hw <phi|psi> <datum> p=<prime> i=<char> e=<row>,<col>
  certify     corner-coefficient certificates for the extension blocks
  separation  leading-monomial separation report for each new orbit
  witness     seeded random search for an ordinary member of the family
  verify      witness search plus hypothesis warnings (r <= 5, p > |G|(r-2))
  eo-word     generic Ekedahl-Oort words, orbit by orbit

datum:
  m=<n> [r=<k>] a=<c1,...,ck>            cyclic cover of degree n
  G=<d1>x<d2>... [r=<k>] a=(t1);(t2);... abelian cover, one tuple per point

options:
  --json           machine-readable report on stdout
  --quiet          result lines only, no elapsed time
  --seed <n>       PRNG seed for witness/verify (also seed=<n>; default 0)
  --max-ext <n>    largest field extension degree searched
                   (default: twice the Frobenius orbit period)
  --trials <n>     samples per extension degree (default 500)

exit codes: 0 success or witness found, 2 search exhausted, 1 input error
"
    .to_string()
}

// --- argument parsing ---

struct Args {
    sub: String,
    /// `phi` or `psi`, for the hw command.
    which: Option<String>,
    /// Raw datum tokens (m=, G=, r=, a=), joined and parsed later.
    datum_text: Vec<String>,
    p: Option<u64>,
    i: Option<u64>,
    /// 1-based (row, column) of the requested matrix entry.
    entry: Option<(usize, usize)>,
    seed: u64,
    max_ext: Option<usize>,
    trials: u64,
    json: bool,
    quiet: bool,
}

fn parse_u64(text: &str, what: &str) -> Result<u64, String> {
    text.trim()
        .parse::<u64>()
        .map_err(|_| format!("{} wants an unsigned integer, got `{}`", what, text))
}

fn parse_args(raw: &[String]) -> Result<Args, String> {
    let mut args = Args {
        sub: raw[0].clone(),
        which: None,
        datum_text: Vec::new(),
        p: None,
        i: None,
        entry: None,
        seed: 0,
        max_ext: None,
        trials: 500,
        json: false,
        quiet: false,
    };
    let known = ["analyze", "hw", "certify", "separation", "witness", "verify", "eo-word"];
    if !known.contains(&args.sub.as_str()) {
        return Err(format!(
            "unknown command `{}`; expected one of: {}",
            args.sub,
            known.join(", ")
        ));
    }
    let mut k = 1;
    while k < raw.len() {
        let tok = &raw[k];
        if let Some(flag) = tok.strip_prefix("--") {
            let (name, inline) = match flag.split_once('=') {
                Some((n, v)) => (n, Some(v.to_string())),
                None => (flag, None),
            };
            match name {
                "json" => args.json = true,
                "quiet" => args.quiet = true,
                "seed" | "max-ext" | "max_ext" | "trials" => {
                    let value = match inline {
                        Some(v) => v,
                        None => {
                            k += 1;
                            raw.get(k)
                                .cloned()
                                .ok_or_else(|| format!("--{} needs a value", name))?
                        }
                    };
                    match name {
                        "seed" => args.seed = parse_u64(&value, "--seed")?,
                        "trials" => args.trials = parse_u64(&value, "--trials")?,
                        _ => args.max_ext = Some(parse_u64(&value, "--max-ext")? as usize),
                    }
                }
                _ => return Err(format!("unknown flag --{}", name)),
            }
        } else if let Some((key, val)) = tok.split_once('=') {
            match key {
                "m" | "G" | "r" | "a" => args.datum_text.push(tok.clone()),
                "p" => args.p = Some(parse_u64(val, "p")?),
                "i" => args.i = Some(parse_u64(val, "i")?),
                "seed" => args.seed = parse_u64(val, "seed")?,
                "trials" => args.trials = parse_u64(val, "trials")?,
                "max-ext" | "max_ext" => {
                    args.max_ext = Some(parse_u64(val, "max-ext")? as usize)
                }
                "e" => {
                    let (a, b) = val
                        .split_once(',')
                        .ok_or_else(|| "e= wants <row>,<col>".to_string())?;
                    let jp = parse_u64(a, "e")? as usize;
                    let j = parse_u64(b, "e")? as usize;
                    if jp == 0 || j == 0 {
                        return Err("entry indices in e= are 1-based".to_string());
                    }
                    args.entry = Some((jp, j));
                }
                _ => return Err(format!("unknown key `{}`", key)),
            }
        } else if args.sub == "hw" && args.which.is_none() && (tok == "phi" || tok == "psi") {
            args.which = Some(tok.clone());
        } else {
            return Err(format!("unexpected argument `{}`", tok));
        }
        k += 1;
    }
    Ok(args)
}

// --- output plumbing ---

struct Report {
    doc: Value,
    lines: Vec<String>,
    /// Subset shown under --quiet.
    headline: Vec<String>,
    exit: u8,
}

type CmdResult = Result<Report, (String, Vec<String>)>;

fn emit(args: &Args, report: &Report) -> u8 {
    if args.json {
        println!("{}", report.doc);
    } else {
        let lines = if args.quiet { &report.headline } else { &report.lines };
        for line in lines {
            println!("{}", line);
        }
    }
    report.exit
}

/// Input errors: violation list to stderr, and a structured error
/// document on stdout when machine output was requested.
fn fail(json_mode: bool, sub: &str, msg: &str, violations: &[String]) -> u8 {
    if json_mode {
        let doc = json!({
            "schema": SCHEMA,
            "command": sub,
            "error": msg,
            "violations": violations,
        });
        println!("{}", doc);
    }
    eprintln!("error: {}", msg);
    for v in violations {
        eprintln!("  - {}", v);
    }
    1
}

// --- shared input handling ---

fn load(args: &Args) -> Result<(AnyDatum, u64), (String, Vec<String>)> {
    if args.datum_text.is_empty() {
        return Err((
            "missing datum: give m=<n> a=<...> (cyclic) or G=<d1>x<d2> a=<...> (abelian)"
                .to_string(),
            Vec::new(),
        ));
    }
    let datum = monodromy::parse_datum(&args.datum_text.join(" "))
        .map_err(|e| (e.to_string(), Vec::new()))?;
    let violations = datum.violations();
    if !violations.is_empty() {
        return Err(("invalid monodromy datum".to_string(), violations));
    }
    let Some(p) = args.p else {
        return Err(("missing p=<prime>".to_string(), Vec::new()));
    };
    if !arith::is_prime(p) {
        return Err((format!("p = {} is not prime", p), Vec::new()));
    }
    datum
        .character_system(p)
        .map_err(|e| (e.to_string(), Vec::new()))?;
    Ok((datum, p))
}

fn require_cyclic<'a>(
    datum: &'a AnyDatum,
    what: &str,
) -> Result<&'a CyclicDatum, (String, Vec<String>)> {
    match datum {
        AnyDatum::Cyclic(d) => Ok(d),
        AnyDatum::Abelian(_) => Err((
            format!(
                "{} works on cyclic data; run it on each cyclic quotient listed by analyze",
                what
            ),
            Vec::new(),
        )),
    }
}

fn group_order(datum: &AnyDatum) -> u64 {
    match datum {
        AnyDatum::Cyclic(d) => d.m,
        AnyDatum::Abelian(d) => d.group_order(),
    }
}

fn group_exponent(datum: &AnyDatum) -> u64 {
    match datum {
        AnyDatum::Cyclic(d) => d.m,
        AnyDatum::Abelian(d) => d.exponent(),
    }
}

fn branch_count(datum: &AnyDatum) -> usize {
    match datum {
        AnyDatum::Cyclic(d) => d.r(),
        AnyDatum::Abelian(d) => d.r(),
    }
}

/// Hypotheses of the existence theorem for ordinary members.  Outside
/// them the rank machinery still runs, only the guarantee of success is
/// lost, so these are warnings rather than errors.
fn hypothesis_warnings(datum: &AnyDatum, p: u64) -> Vec<String> {
    let r = branch_count(datum) as u64;
    let order = group_order(datum);
    let mut out = Vec::new();
    if r > 5 {
        out.push(format!(
            "r = {} exceeds 5: existence of an ordinary member is not guaranteed; searching anyway",
            r
        ));
    }
    let bound = order * (r - 2);
    if p <= bound {
        out.push(format!(
            "p = {} is not above |G|(r-2) = {}: existence of an ordinary member is not guaranteed; searching anyway",
            p, bound
        ));
    }
    out
}

// --- polygon formatting ---

fn polygon_json(poly: &NewtonPolygon) -> Value {
    let parts: Vec<Value> = poly
        .parts()
        .iter()
        .map(|&(num, den, mult)| json!({"num": num, "den": den, "mult": mult}))
        .collect();
    json!({
        "parts": parts,
        "height": poly.height(),
        "symmetric": poly.is_symmetric(),
        "ordinary": poly.is_ordinary(),
    })
}

fn polygon_line(poly: &NewtonPolygon) -> String {
    if poly.parts().is_empty() {
        return "(empty)".to_string();
    }
    poly.parts()
        .iter()
        .map(|&(num, den, mult)| format!("{}/{} x {}", num, den, mult))
        .collect::<Vec<_>>()
        .join(", ")
}

// --- analyze ---

fn cmd_analyze(datum: &AnyDatum, p: u64) -> CmdResult {
    let cs = datum
        .character_system(p)
        .map_err(|e| (e.to_string(), Vec::new()))?;
    let genus = datum.genus();
    let orbit_set = cs.orbits();
    let base = format!("muord analyze {} p={}", datum, p);

    // Characters generating the full dual group; for a group with two or
    // more invariant factors no single character does.
    let tuples = match datum {
        AnyDatum::Abelian(d) => Some(monodromy::enumerate_tuples(&d.invariant_factors)),
        AnyDatum::Cyclic(_) => None,
    };
    let is_new = |t: usize| -> bool {
        match datum {
            AnyDatum::Cyclic(d) => arith::gcd(t as u64, d.m) == 1,
            AnyDatum::Abelian(d) => {
                d.element_order(&tuples.as_ref().unwrap()[t]) == d.group_order()
            }
        }
    };

    let mut lines = vec![
        format!("command: {}", base),
        format!("datum: {}", datum),
        "valid: yes".to_string(),
        format!("p: {}", p),
        format!("genus: {}", genus),
    ];

    let sig: Vec<Value> = (0..cs.n())
        .map(|t| json!({"label": cs.labels[t], "f": cs.f[t]}))
        .collect();
    lines.push("signature (character: dimension of its part of the differentials):".to_string());
    for t in 0..cs.n() {
        lines.push(format!("  {}: {}", cs.labels[t], cs.f[t]));
    }

    let mut orbits_json = Vec::new();
    lines.push(format!("orbits ({}):", orbit_set.orbits.len()));
    for (oi, orbit) in orbit_set.orbits.iter().enumerate() {
        let labels: Vec<String> = orbit.iter().map(|&t| cs.labels[t].clone()).collect();
        let prof = cs.orbit_profile(orbit);
        let reps: Vec<String> = prof
            .representatives
            .iter()
            .map(|&t| cs.labels[t].clone())
            .collect();
        let poly = newton::orbit_polygon(&cs, orbit);
        let new = is_new(orbit[0]);
        orbits_json.push(json!({
            "members": labels,
            "length": orbit.len(),
            "new": new,
            "g": prof.g,
            "dual_signature_values": prof.f_values,
            "representatives": reps,
            "polygon": polygon_json(&poly),
        }));
        lines.push(format!(
            "  orbit {} ({}, length {}): {}",
            oi,
            if new { "new" } else { "old" },
            orbit.len(),
            labels.join(" ")
        ));
        lines.push(format!(
            "    g = {}, dual signature values {:?}, representatives [{}]",
            prof.g,
            prof.f_values,
            reps.join(", ")
        ));
        lines.push(format!("    polygon: {}", polygon_line(&poly)));
    }

    let quotients = datum.quotients();
    let mut quot_json = Vec::new();
    lines.push(format!("cyclic quotients ({}):", quotients.len()));
    for q in &quotients {
        let inflated: Vec<u64> = q.char_map.iter().map(|&idx| cs.f[idx]).collect();
        quot_json.push(json!({
            "rep_label": q.rep_label,
            "degree": q.degree,
            "datum": q.datum.to_string(),
            "dropped_points": q.dropped,
            "trivial": q.trivial,
            "inflated_signature": inflated,
        }));
        let mut extra = String::new();
        if !q.dropped.is_empty() {
            extra.push_str(&format!(", drops points {:?}", q.dropped));
        }
        if q.trivial {
            extra.push_str(", nothing to check");
        }
        lines.push(format!(
            "  by kernel of {} (degree {}): {}{}",
            q.rep_label, q.degree, q.datum, extra
        ));
    }

    let total = newton::mu_ordinary_total(datum, p).map_err(|e| (e.to_string(), Vec::new()))?;
    lines.push("generic polygon (whole Jacobian):".to_string());
    for &(num, den, mult) in total.parts() {
        lines.push(format!("  {}/{} x {}", num, den, mult));
    }
    lines.push(format!(
        "  height {}, {}symmetric, {}ordinary",
        total.height(),
        if total.is_symmetric() { "" } else { "not " },
        if total.is_ordinary() { "" } else { "not " }
    ));

    let headline = vec![format!(
        "genus {}; generic polygon: {}; height {}",
        genus,
        polygon_line(&total),
        total.height()
    )];
    let doc = json!({
        "schema": SCHEMA,
        "command": "analyze",
        "datum": datum.to_string(),
        "p": p,
        "replay": format!("{} --json", base),
        "valid": true,
        "genus": genus,
        "signature": sig,
        "orbits": orbits_json,
        "quotients": quot_json,
        "polygon": polygon_json(&total),
    });
    Ok(Report { doc, lines, headline, exit: 0 })
}

// --- hw ---

fn cmd_hw(args: &Args, datum: &AnyDatum, p: u64) -> CmdResult {
    let d = require_cyclic(datum, "hw")?;
    let which = args
        .which
        .clone()
        .ok_or_else(|| ("hw needs `phi` or `psi` before the datum".to_string(), Vec::new()))?;
    let i = args
        .i
        .ok_or_else(|| ("hw needs i=<character index>".to_string(), Vec::new()))?;
    let (jp, j) = args
        .entry
        .ok_or_else(|| ("hw needs e=<row>,<col> (1-based)".to_string(), Vec::new()))?;
    let poly = match which.as_str() {
        "phi" => hw::phi_entry(d, p, i, jp, j),
        _ => hw::psi_prime_entry(d, p, i, jp, j),
    }
    .map_err(|e| (e.to_string(), Vec::new()))?;

    let terms: Vec<Value> = poly
        .terms()
        .map(|(exps, c)| json!({"exponents": exps, "coefficient": c}))
        .collect();
    let degree = poly.homogeneous_degree();
    let text = poly.to_string();
    let base = format!(
        "muord hw {} {} p={} i={} e={},{}",
        which, datum, p, i, jp, j
    );
    let described = format!(
        "{}[i={}] entry ({},{}) over F_{}: {} terms{}",
        which,
        i,
        jp,
        j,
        p,
        poly.num_terms(),
        degree
            .map(|deg| format!(", homogeneous of degree {}", deg))
            .unwrap_or_default()
    );
    let doc = json!({
        "schema": SCHEMA,
        "command": "hw",
        "datum": datum.to_string(),
        "p": p,
        "replay": format!("{} --json", base),
        "which": which,
        "i": i,
        "entry": [jp, j],
        "polynomial": text,
        "num_terms": poly.num_terms(),
        "homogeneous_degree": degree,
        "terms": terms,
    });
    let lines = vec![format!("command: {}", base), described, text.clone()];
    Ok(Report { doc, lines, headline: vec![text], exit: 0 })
}

// --- certify ---

fn cmd_certify(datum: &AnyDatum, p: u64) -> CmdResult {
    let d = require_cyclic(datum, "certify")?;
    let base = format!("muord certify {} p={}", datum, p);
    let mut lines = vec![format!("command: {}", base)];
    let mut rows = Vec::new();
    let mut certified = 0u64;
    let mut declined = 0u64;
    for i in 1..d.m {
        if arith::gcd(i, d.m) != 1 {
            continue;
        }
        match hw::psi11_certificate(d, p, i).map_err(|e| (e.to_string(), Vec::new()))? {
            hw::CertificateOutcome::Certified { residue } => {
                certified += 1;
                rows.push(json!({"i": i, "certified": true, "residue": residue}));
                lines.push(format!(
                    "  i={}: certified, corner coefficient {} mod {}",
                    i, residue, p
                ));
            }
            hw::CertificateOutcome::Declined { reason } => {
                declined += 1;
                rows.push(json!({"i": i, "certified": false, "reason": reason}));
                lines.push(format!("  i={}: declined ({})", i, reason));
            }
        }
    }
    let summary = format!(
        "certified {} of {} new characters ({} declined)",
        certified,
        certified + declined,
        declined
    );
    lines.push(summary.clone());
    let doc = json!({
        "schema": SCHEMA,
        "command": "certify",
        "datum": datum.to_string(),
        "p": p,
        "replay": format!("{} --json", base),
        "characters": rows,
        "certified": certified,
        "declined": declined,
    });
    Ok(Report { doc, lines, headline: vec![summary], exit: 0 })
}

// --- separation ---

fn cmd_separation(datum: &AnyDatum, p: u64) -> CmdResult {
    let d = require_cyclic(datum, "separation")?;
    let cs = CharacterSystem::from_cyclic(d, p).map_err(|e| (e.to_string(), Vec::new()))?;
    let orbit_set = cs.orbits();
    let base = format!("muord separation {} p={}", datum, p);
    let mut lines = vec![format!("command: {}", base)];
    let mut rows = Vec::new();
    let mut separated = 0u64;
    let mut declined = 0u64;
    let mut total = 0u64;
    for orbit in &orbit_set.orbits {
        if arith::gcd(orbit[0] as u64, d.m) != 1 {
            continue;
        }
        total += 1;
        let labels: Vec<String> = orbit.iter().map(|&t| cs.labels[t].clone()).collect();
        match hw::monomial_separation(d, p, orbit) {
            Ok(rep) => {
                if rep.separated {
                    separated += 1;
                }
                rows.push(json!({
                    "members": labels,
                    "chain_start": cs.labels[rep.chain_char],
                    "length": rep.length,
                    "theorem_applicable": rep.theorem_applicable,
                    "vacuous": rep.vacuous,
                    "total_paths": rep.total_paths,
                    "zero_paths": rep.zero_paths,
                    "separated": rep.separated,
                    "all_ones_path_nonzero": rep.all_ones_nonzero,
                    "valuations_bounded": rep.valuations_ok,
                }));
                lines.push(format!(
                    "  orbit {{{}}}: separated={} paths={} (zero {}) valuations<=p-1={} applicable={}",
                    labels.join(" "),
                    rep.separated,
                    rep.total_paths,
                    rep.zero_paths,
                    rep.valuations_ok,
                    rep.theorem_applicable
                ));
            }
            Err(hw::HwError::Declined(reason)) => {
                declined += 1;
                rows.push(json!({"members": labels, "declined": reason}));
                lines.push(format!("  orbit {{{}}}: declined ({})", labels.join(" "), reason));
            }
            Err(e) => return Err((e.to_string(), Vec::new())),
        }
    }
    let summary = format!(
        "separated {} of {} new orbits ({} declined)",
        separated, total, declined
    );
    lines.push(summary.clone());
    let doc = json!({
        "schema": SCHEMA,
        "command": "separation",
        "datum": datum.to_string(),
        "p": p,
        "replay": format!("{} --json", base),
        "orbits": rows,
        "separated": separated,
        "declined": declined,
        "total": total,
    });
    Ok(Report { doc, lines, headline: vec![summary], exit: 0 })
}

// --- witness / verify ---

fn orbit_check_json(o: &OrbitCheck) -> Value {
    let reps: Vec<String> = o
        .representatives
        .iter()
        .map(|&t| {
            let pos = o.orbit.iter().position(|&u| u == t).unwrap();
            o.labels[pos].clone()
        })
        .collect();
    json!({
        "members": o.labels,
        "g": o.g,
        "dual_signature_values": o.f_values,
        "representatives": reps,
        "ranks": o.ranks,
        "pass": o.pass,
    })
}

fn check_json(c: &CurveCheck) -> Value {
    let quotients: Vec<Value> = c
        .quotients
        .iter()
        .map(|q| {
            let orbits: Vec<Value> = q.orbits.iter().map(orbit_check_json).collect();
            json!({
                "rep_label": q.rep_label,
                "degree": q.degree,
                "vacuous": q.vacuous,
                "orbits": orbits,
                "pass": q.pass,
            })
        })
        .collect();
    json!({"ordinary": c.ordinary, "quotients": quotients})
}

fn check_lines(c: &CurveCheck, lines: &mut Vec<String>) {
    for q in &c.quotients {
        if q.vacuous {
            lines.push(format!(
                "  quotient by kernel of {} (degree {}): nothing to check",
                q.rep_label, q.degree
            ));
            continue;
        }
        lines.push(format!(
            "  quotient by kernel of {} (degree {}): {}",
            q.rep_label,
            q.degree,
            if q.pass { "pass" } else { "FAIL" }
        ));
        for o in &q.orbits {
            lines.push(format!(
                "    orbit {{{}}}: chain ranks {:?}, targets {:?}, {}",
                o.labels.join(" "),
                o.ranks,
                o.f_values,
                if o.pass { "pass" } else { "FAIL" }
            ));
        }
    }
}

fn cmd_search(args: &Args, datum: &AnyDatum, p: u64, verify: bool) -> CmdResult {
    let name = if verify { "verify" } else { "witness" };
    let warnings = if verify {
        hypothesis_warnings(datum, p)
    } else {
        Vec::new()
    };
    let exponent = group_exponent(datum);
    let default_ext = 2 * arith::mult_order(p % exponent, exponent) as usize;
    let max_ext = args.max_ext.unwrap_or(default_ext).max(1);
    let base = format!(
        "muord {} {} p={} seed={} --max-ext {} --trials {}",
        name, datum, p, args.seed, max_ext, args.trials
    );
    let mut lines = vec![format!("command: {}", base)];
    for w in &warnings {
        lines.push(format!("warning: {}", w));
    }
    let outcome = curve::witness_search(datum, p, args.seed, max_ext, args.trials)
        .map_err(|e| (e.to_string(), Vec::new()))?;
    let attempts: Vec<Value> = outcome
        .attempts
        .iter()
        .map(|a| json!({"s": a.s, "trials": a.trials, "skipped": a.skipped}))
        .collect();

    match &outcome.witness {
        Some(w) => {
            let record = w.record();
            let found_line = format!("witness found: {}", record);
            lines.push(found_line.clone());
            check_lines(&w.check, &mut lines);
            lines.push(
                "verdict: the family is generically ordinary (the criterion holds at the witness)"
                    .to_string(),
            );
            let doc = json!({
                "schema": SCHEMA,
                "command": name,
                "datum": datum.to_string(),
                "p": p,
                "seed": args.seed,
                "max_ext": max_ext,
                "trials": args.trials,
                "replay": format!("{} --json", base),
                "warnings": warnings,
                "found": true,
                "witness": {
                    "s": w.s,
                    "trial": w.trial,
                    "points": w.points,
                    "record": record,
                },
                "verdict": check_json(&w.check),
                "attempts": attempts,
            });
            Ok(Report { doc, lines, headline: vec![found_line], exit: 0 })
        }
        None => {
            let total: u64 = outcome.attempts.iter().map(|a| a.trials).sum();
            let line = format!(
                "search exhausted: no witness within extension degrees 1..={} at {} trials per level ({} checks); exhaustion is not a disproof",
                max_ext, args.trials, total
            );
            lines.push(line.clone());
            let doc = json!({
                "schema": SCHEMA,
                "command": name,
                "datum": datum.to_string(),
                "p": p,
                "seed": args.seed,
                "max_ext": max_ext,
                "trials": args.trials,
                "replay": format!("{} --json", base),
                "warnings": warnings,
                "found": false,
                "attempts": attempts,
            });
            Ok(Report { doc, lines, headline: vec![line], exit: 2 })
        }
    }
}

// --- eo-word ---

fn cmd_eo_word(datum: &AnyDatum, p: u64) -> CmdResult {
    let cs = datum
        .character_system(p)
        .map_err(|e| (e.to_string(), Vec::new()))?;
    let fq = Fq::new(p, 1).map_err(|e| (e.to_string(), Vec::new()))?;
    let orbit_set = cs.orbits();
    let base = format!("muord eo-word {} p={}", datum, p);
    let mut lines = vec![format!("command: {}", base)];
    let mut orbits_json = Vec::new();
    let mut all_maximal = true;
    let mut n_words = 0u64;
    for orbit in &orbit_set.orbits {
        let labels: Vec<String> = orbit.iter().map(|&t| cs.labels[t].clone()).collect();
        let prof = cs.orbit_profile(orbit);
        lines.push(format!("orbit {{{}}} (g = {}):", labels.join(" "), prof.g));
        if prof.g == 0 {
            orbits_json.push(json!({"members": labels, "g": 0, "words": []}));
            lines.push("  (no cohomology: empty words)".to_string());
            continue;
        }
        let blocks = eo::OrbitBlocks::new(&cs, orbit);
        let md = eo::build_ordinary_module(&fq, &blocks);
        let words = eo::eo_word_from_module(&md).map_err(|e| (e.to_string(), Vec::new()))?;
        let mut word_rows = Vec::new();
        for (tau, w) in &words.words {
            let maximal = eo::is_maximal(&w.w, w.f_actual);
            all_maximal &= maximal;
            n_words += 1;
            lines.push(format!("  {}", eo::word_line(&cs.labels[*tau], w)));
            word_rows.push(json!({
                "label": cs.labels[*tau],
                "w": w.w,
                "jumps": w.jumps,
                "f": w.f_actual,
                "maximal": maximal,
                "refined": w.refined,
            }));
        }
        orbits_json.push(json!({"members": labels, "g": prof.g, "words": word_rows}));
    }
    let summary = format!(
        "{} generic words across {} orbits; all maximal: {}",
        n_words,
        orbit_set.orbits.len(),
        all_maximal
    );
    lines.push(summary.clone());
    let doc = json!({
        "schema": SCHEMA,
        "command": "eo-word",
        "datum": datum.to_string(),
        "p": p,
        "replay": format!("{} --json", base),
        "orbits": orbits_json,
        "all_maximal": all_maximal,
    });
    Ok(Report { doc, lines, headline: vec![summary], exit: 0 })
}

// --- entry point ---

fn run(raw: &[String]) -> u8 {
    let started = Instant::now();
    if raw.is_empty() {
        eprint!("{}", usage());
        return 1;
    }
    if raw[0] == "--help" || raw[0] == "-h" || raw[0] == "help" {
        print!("{}", usage());
        return 0;
    }
    let json_guess = raw.iter().any(|t| t == "--json");
    let args = match parse_args(raw) {
        Ok(a) => a,
        Err(msg) => return fail(json_guess, &raw[0], &msg, &[]),
    };
    let result: CmdResult = match load(&args) {
        Ok((datum, p)) => match args.sub.as_str() {
            "analyze" => cmd_analyze(&datum, p),
            "hw" => cmd_hw(&args, &datum, p),
            "certify" => cmd_certify(&datum, p),
            "separation" => cmd_separation(&datum, p),
            "witness" => cmd_search(&args, &datum, p, false),
            "verify" => cmd_search(&args, &datum, p, true),
            _ => cmd_eo_word(&datum, p),
        },
        Err(e) => Err(e),
    };
    match result {
        Ok(report) => {
            let code = emit(&args, &report);
            if !args.quiet {
                eprintln!("elapsed: {} ms", started.elapsed().as_millis());
            }
            code
        }
        Err((msg, violations)) => fail(args.json, &args.sub, &msg, &violations),
    }
}

fn main() -> ExitCode {
    let raw: Vec<String> = env::args().skip(1).collect();
    ExitCode::from(run(&raw))
}
