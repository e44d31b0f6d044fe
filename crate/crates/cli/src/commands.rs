use std::fmt::Write as _;
use std::io::Read as _;
use std::path::Path;

use serde_json::{json, Value};

use geomtype::cover::{self, ArcCycle, Orientation, Side};
use geomtype::cycles::{self, CompareMode, GeometricTypeWithCycles};
use geomtype::equivalence;
use geomtype::format;
use geomtype::layout::{self, LayoutMode};
use geomtype::paths::{self, PathStep, Reduction};
use geomtype::surgery::{self, ProngData, SurgeryMatrix};
use geomtype::symbolic;
use geomtype::GeometricType;

use crate::cli::{Command, LayoutArg, SideArg};
use crate::error::CliError;

/// What a command produced: text for people, JSON for scripts, and an exit code.
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome { text, json, code: 0 }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    let mut s = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| s = t)
    };
    res.map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    Ok(s)
}

fn load_any(path: &Path) -> Result<GeometricType, CliError> {
    format::parse(&read(path)?).map_err(|source| CliError::Parse { path: path.display().to_string(), source })
}

fn load(path: &Path) -> Result<GeometricType, CliError> {
    let g = load_any(path)?;
    g.ensure_valid()?;
    Ok(g)
}

fn load_gtc(path: &Path) -> Result<GeometricTypeWithCycles, CliError> {
    let (g, cycles) = format::parse_gtc(&read(path)?)
        .map_err(|source| CliError::Parse { path: path.display().to_string(), source })?;
    g.ensure_valid()?;
    Ok(GeometricTypeWithCycles::new(g, cycles.into_iter().map(|(_, c)| c))?)
}

fn side(s: SideArg) -> Side {
    match s {
        SideArg::Top => Side::Top,
        SideArg::Bottom => Side::Bottom,
        SideArg::Left => Side::Left,
        SideArg::Right => Side::Right,
    }
}

fn matrix_text(m: &[Vec<i64>]) -> String {
    m.iter()
        .map(|r| r.iter().map(|x| format!("{x:>3}")).collect::<String>())
        .collect::<Vec<_>>()
        .join("\n")
}

fn witness_json(w: &equivalence::EquivalenceWitness) -> Value {
    json!({ "sigma": w.sigma, "eps": w.eps, "eps_prime": w.eps_prime })
}

fn cycle_text(c: &ArcCycle) -> String {
    let o = match c.orientation {
        Orientation::Positive => "positive",
        Orientation::Negative => "negative",
    };
    let ok = if c.checks.all() { "ok" } else { "FAILS" };
    format!("{o} L={:?} path={:?} conditions {ok}", c.rects, c.path)
}

pub fn run(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Validate { file } => {
            let g = load_any(file)?;
            let report = g.validate();
            let valid = report.is_valid();
            let json = json!({ "valid": valid, "violations": report.violations });
            Ok(Outcome { text: report.to_string().trim_end().to_string(), json, code: if valid { 0 } else { 2 } })
        }
        Command::Canon { file } => {
            let g = load(file)?;
            let text = format::serialize(&equivalence::canonical_form(&g));
            let json = json!({ "canonical": text });
            Ok(Outcome::ok(text.trim_end().to_string(), json))
        }
        Command::Equiv { a, b, equality } => {
            let (g1, g2) = (load(a)?, load(b)?);
            let w = if *equality { equivalence::is_equal(&g1, &g2) } else { equivalence::is_equivalent(&g1, &g2) };
            let word = if *equality { "equal" } else { "equivalent" };
            let text = match &w {
                Some(w) => format!("{word}\n{w}"),
                None => format!("not {word}"),
            };
            let json = json!({ word: w.is_some(), "witness": w.as_ref().map(witness_json) });
            Ok(Outcome { text, json, code: if w.is_some() { 0 } else { 1 } })
        }
        Command::Class { file } => {
            let g = load(file)?;
            let mut members: Vec<String> = equivalence::enumerate_class(&g).iter().map(format::serialize).collect();
            members.sort();
            let text = format!("{} members\n\n{}", members.len(), members.join("\n")).trim_end().to_string();
            let json = json!({ "size": members.len(), "members": members });
            Ok(Outcome::ok(text, json))
        }
        Command::Matrix { file } => {
            let g = load(file)?;
            let tm = symbolic::transition_matrix(&g)?;
            let lambda = symbolic::spectral_radius(&tm.m);
            let text = format!("M\n{}\nMu\n{}\nlambda {lambda:.12}", matrix_text(&tm.m), matrix_text(&tm.mu));
            let json = json!({ "M": tm.m, "Mu": tm.mu, "lambda": lambda });
            Ok(Outcome::ok(text, json))
        }
        Command::Entropy { file } => {
            let g = load(file)?;
            let tm = symbolic::transition_matrix(&g)?;
            let lambda = symbolic::spectral_radius(&tm.m);
            let entropy = symbolic::entropy(&g)?;
            let text = format!("lambda {lambda:.12}\nentropy {entropy:.12}");
            Ok(Outcome::ok(text, json!({ "lambda": lambda, "entropy": entropy })))
        }
        Command::Orbits { file, period } => {
            let g = load(file)?;
            let counts = (1..=*period).map(|m| symbolic::count_closed_words(&g, m)).collect::<Result<Vec<_>, _>>()?;
            let mut text = String::from("closed symbolic words (not flow orbits)\n");
            for (m, c) in counts.iter().enumerate() {
                writeln!(text, "period {:>2}: {c}", m + 1).expect("string write");
            }
            let counts: Vec<String> = counts.iter().map(u128::to_string).collect();
            let json = json!({ "kind": "symbolic", "period": period, "closed_words": counts });
            Ok(Outcome::ok(text.trim_end().to_string(), json))
        }
        Command::Layout { file, mode } => {
            let g = load(file)?;
            let mode = match mode {
                LayoutArg::Perron => LayoutMode::Perron,
                LayoutArg::Uniform => LayoutMode::Uniform,
            };
            let lay = layout::layout(&g, mode)?;
            let mut text = format!("lambda ~ {:.12}\n", lay.lambda_approx);
            for (i, r) in lay.rects.iter().enumerate() {
                writeln!(text, "rect {}: {:.6} x {:.6}", i + 1, r.width.to_f64(), r.height.to_f64())
                    .expect("string write");
            }
            Ok(Outcome::ok(text.trim_end().to_string(), serde_json::to_value(&lay)?))
        }
        Command::Cover { file, depth, ty } => {
            let g = load(file)?;
            let (mut patch, r0) = cover::origin(&g, *ty)?;
            patch.explore(r0, *depth)?;
            let dump = patch.dump();
            let mut text = format!(
                "{} rectangles, {} identifications, {} guards\n",
                patch.len(),
                patch.identifications().len(),
                patch.guards().len()
            );
            for r in &dump.rects {
                let [x0, x1, y0, y1] = r.approx;
                writeln!(
                    text,
                    "{:>4} type {} gen {:>3} [{x0:.6}, {x1:.6}] x [{y0:.6}, {y1:.6}]",
                    r.id, r.ty, r.generation
                )
                .expect("string write");
            }
            Ok(Outcome::ok(text.trim_end().to_string(), serde_json::to_value(&dump)?))
        }
        Command::Arcpoints { file, ty, depth, rect, side: s } => {
            let g = load(file)?;
            let (mut patch, r0) = cover::origin(&g, *ty)?;
            patch.explore(r0, *depth)?;
            let points = patch.arc_points(*rect, side(*s))?;
            let mut text = String::new();
            let mut items = Vec::new();
            for a in points {
                writeln!(text, "({:.6}, {:.6}) incident {:?}", a.x.to_f64(), a.y.to_f64(), a.incident)
                    .expect("string write");
                let mut cycles = Vec::new();
                if let Some(l0) = patch.cycle_base(&a) {
                    for o in [Orientation::Positive, Orientation::Negative] {
                        match patch.arc_point_cycle(&a.x, &a.y, l0, o) {
                            Ok(c) => {
                                writeln!(text, "  {}", cycle_text(&c)).expect("string write");
                                cycles.push(serde_json::to_value(&c)?);
                            }
                            Err(e @ geomtype::error::CoverError::Budget { .. }) => return Err(e.into()),
                            Err(e) => {
                                writeln!(text, "  {o:?}: {e}").expect("string write");
                                cycles.push(json!({ "orientation": o, "error": e.to_string() }));
                            }
                        }
                    }
                }
                items.push(json!({ "point": a, "cycles": cycles }));
            }
            if items.is_empty() {
                text.push_str("no arc points");
            }
            Ok(Outcome::ok(text.trim_end().to_string(), json!({ "arc_points": items })))
        }
        Command::ReducePath { file, path, ty, depth } => {
            let g = load(file)?;
            let steps: Vec<PathStep> = serde_json::from_str(&read(path)?)?;
            let (mut patch, _) = cover::origin(&g, *ty)?;
            let p = paths::path_from_steps(&mut patch, &steps)?;
            let res = paths::reduce(&mut patch, &p, *depth)?;
            let (text, code) = match &res {
                Reduction::Trivial { moves } => (format!("trivial after {} moves", moves.len()), 0),
                Reduction::Exhausted { depth, remaining } => (
                    format!("not reduced within C-depth {depth}; left with {:?}", remaining.rects()),
                    3,
                ),
            };
            let mut json = serde_json::to_value(&res)?;
            if let Reduction::Exhausted { remaining, .. } = &res {
                json["remaining"] = serde_json::to_value(paths::path_steps(&patch, remaining))?;
            }
            Ok(Outcome { text, json, code })
        }
        Command::CyclesCheck { file } => {
            let a = load_gtc(file)?;
            let mut text = String::new();
            let mut reports = Vec::new();
            for c in &a.cycles {
                let r = cycles::check_cycle(&a.g, c);
                let verdict = if r.cycle_shaped { "cycle-shaped" } else { "not cycle-shaped" };
                writeln!(
                    text,
                    "{}: length {}, {} runs, {verdict}",
                    format::serialize_cycle(c),
                    r.stats.length,
                    r.stats.runs
                )
                .expect("string write");
                for p in &r.problems {
                    writeln!(text, "  {p}").expect("string write");
                }
                reports.push(json!({ "cycle": format::serialize_cycle(c), "report": r }));
            }
            if reports.is_empty() {
                text.push_str("no cycles");
            }
            Ok(Outcome::ok(text.trim_end().to_string(), json!({ "cycles": reports })))
        }
        Command::CyclesEquiv { a, b, raw } => {
            let (a1, a2) = (load_gtc(a)?, load_gtc(b)?);
            let mode = if *raw { CompareMode::Raw } else { CompareMode::Rotation };
            let w = cycles::cycles_equivalent(&a1, &a2, mode);
            let text = match &w {
                Some(w) => format!("equivalent\n{w}"),
                None => "not equivalent".to_string(),
            };
            let json = json!({ "equivalent": w.is_some(), "mode": mode, "witness": w.as_ref().map(witness_json) });
            Ok(Outcome { text, json, code: if w.is_some() { 0 } else { 1 } })
        }
        Command::Surgery { prongs, matrix } => {
            let p = ProngData::new(prongs.0, prongs.1)?;
            let (a, b, c, d) = *matrix;
            let m = SurgeryMatrix::new(a, b, c, d)?;
            let res = surgery::prong_after_surgery(p, m)?;
            let (n2, k2) = res.raw();
            let text = match &res {
                surgery::ProngResult::Valid { gcd, .. } => format!("n2={n2} k2={k2} gcd={gcd}"),
                surgery::ProngResult::OneProng { .. } => format!("n2={n2} k2={k2}: one-prong, not allowed"),
                surgery::ProngResult::Invalid { reason, .. } => format!("invalid: {reason}"),
            };
            Ok(Outcome::ok(text, serde_json::to_value(&res)?))
        }
    }
}
