use serde_json::{json, Value};

use jsonlogic::automaton::{automaton_accepts, jnl_to_automaton, jsl_to_automaton, recursive_to_automaton, JAutomaton};
use jsonlogic::jnl::{compile_find_filter, eval_unary, parse_jnl};
use jsonlogic::jsl::{parse_jsl, validate as validate_jsl};
use jsonlogic::recursive::{eval_recursive, is_well_formed, parse_rjsl, precedence_graph, RecursiveJsl};
use jsonlogic::sat::{sat_bounded_with_budget, Bounds, SatInput, SatVerdict, StrategyRegistry};
use jsonlogic::schema::{jsl_to_schema, parse_schema, rjsl_to_schema, schema_to_jsl, validate_schema, Compiled};
use jsonlogic::translate::{jnl_to_jsl, jnl_to_rjsl, jsl_to_jnl};
use jsonlogic::{parse_document, JsonTree};

use crate::{read_input, CliError, Format, Language, Logic, Outcome, Source, Via};

fn document(path: &str) -> Result<JsonTree, CliError> {
    Ok(parse_document(&read_input(path)?)?)
}

fn emit(format: Format, text: impl FnOnce() -> String, value: impl FnOnce() -> Value) {
    match format {
        Format::Text => println!("{}", text()),
        Format::Json => println!("{}", value()),
    }
}

fn verdict(yes: bool) -> Outcome {
    if yes {
        Outcome::Yes
    } else {
        Outcome::No
    }
}

pub fn query(format: Format, doc: &str, formula: &Source, at: Option<&str>) -> Result<Outcome, CliError> {
    let t = document(doc)?;
    let phi = parse_jnl(&formula.text()?)?;
    let set = eval_unary(&t, &phi);
    if let Some(path) = at {
        let n = t
            .resolve_display_path(path)
            .ok_or_else(|| CliError::Usage(format!("no node at `{path}`")))?;
        let member = set.contains(n);
        let word = if member { "MEMBER" } else { "NOT_MEMBER" };
        emit(format, || word.to_string(), || json!({ "node": path, "verdict": word }));
        return Ok(verdict(member));
    }
    let paths: Vec<String> = set.iter().map(|n| t.display_path(n)).collect();
    let found = !paths.is_empty();
    emit(format, || paths.join("\n"), || json!({ "nodes": paths }));
    Ok(verdict(found))
}

pub fn validate(format: Format, doc: &str, against: &Source, logic: Language, via: Option<Via>) -> Result<Outcome, CliError> {
    let t = document(doc)?;
    let text = against.text()?;
    let ok = match (logic, via) {
        (Language::Schema, None) => validate_schema(&t, &parse_schema(&text)?)?,
        (Language::Schema, Some(Via::Jsl)) => match schema_to_jsl(&parse_schema(&text)?)? {
            Compiled::Plain(phi) => validate_jsl(&t, &phi),
            Compiled::Recursive(e) => eval_recursive(&e, &t)?,
        },
        (Language::Jsl, None) => validate_jsl(&t, &parse_jsl(&text)?),
        (Language::Rjsl, None) => eval_recursive(&parse_rjsl(&text)?, &t)?,
        (Language::Jnl, None) => eval_unary(&t, &parse_jnl(&text)?).contains(t.root()),
        (Language::Find, None) => eval_unary(&t, &compile_find_filter(&parse_document(&text)?)?).contains(t.root()),
        (_, Some(_)) => return Err(CliError::Usage("--via applies to schemas only".into())),
    };
    let word = if ok { "VALID" } else { "INVALID" };
    emit(format, || word.to_string(), || json!({ "verdict": word }));
    Ok(verdict(ok))
}

/// Parsed input of `compile`.
enum Artifact {
    Schema(jsonlogic::schema::SchemaDocument),
    Jsl(jsonlogic::jsl::JslFormula),
    Rjsl(RecursiveJsl),
    Jnl(jsonlogic::jnl::JnlUnary),
}

impl Artifact {
    fn parse(lang: Language, text: &str) -> Result<Artifact, CliError> {
        Ok(match lang {
            Language::Schema => Artifact::Schema(parse_schema(text)?),
            Language::Jsl => Artifact::Jsl(parse_jsl(text)?),
            Language::Rjsl => Artifact::Rjsl(parse_rjsl(text)?),
            Language::Jnl => Artifact::Jnl(parse_jnl(text)?),
            Language::Find => Artifact::Jnl(compile_find_filter(&parse_document(text)?)?),
        })
    }

    fn text(&self) -> String {
        match self {
            Artifact::Schema(s) => s.to_string(),
            Artifact::Jsl(phi) => phi.to_string(),
            Artifact::Rjsl(e) => e.to_string(),
            Artifact::Jnl(phi) => phi.to_string(),
        }
    }

    fn into_jsl(self) -> Result<Artifact, CliError> {
        Ok(match self {
            Artifact::Schema(s) => match schema_to_jsl(&s)? {
                Compiled::Plain(phi) => Artifact::Jsl(phi),
                Compiled::Recursive(e) => Artifact::Rjsl(e),
            },
            Artifact::Jnl(phi) if phi.has_star() => Artifact::Rjsl(jnl_to_rjsl(&phi)?),
            Artifact::Jnl(phi) => Artifact::Jsl(jnl_to_jsl(&phi)?),
            other => other,
        })
    }

    fn convert(self, to: Language) -> Result<Artifact, CliError> {
        Ok(match to {
            Language::Schema => match self.into_jsl()? {
                Artifact::Jsl(phi) => Artifact::Schema(jsl_to_schema(&phi)?),
                Artifact::Rjsl(e) => Artifact::Schema(rjsl_to_schema(&e)?),
                other => other,
            },
            Language::Jsl => match self.into_jsl()? {
                Artifact::Rjsl(e) if !e.definitions.is_empty() => {
                    return Err(CliError::Usage("the input needs recursion; use --to rjsl".into()))
                }
                Artifact::Rjsl(e) => Artifact::Jsl(e.base),
                other => other,
            },
            Language::Rjsl => match self.into_jsl()? {
                Artifact::Jsl(phi) => Artifact::Rjsl(RecursiveJsl::plain(phi)),
                other => other,
            },
            Language::Jnl => match self {
                Artifact::Jnl(phi) => Artifact::Jnl(phi),
                other => match other.into_jsl()? {
                    Artifact::Jsl(phi) => Artifact::Jnl(jsl_to_jnl(&phi)?),
                    Artifact::Rjsl(e) if e.definitions.is_empty() => Artifact::Jnl(jsl_to_jnl(&e.base)?),
                    _ => return Err(CliError::Usage("recursive expressions have no JNL translation".into())),
                },
            },
            Language::Find => return Err(CliError::Usage("find filters are an input language only".into())),
        })
    }
}

pub fn compile(format: Format, input: &Source, from: Language, to: Language) -> Result<Outcome, CliError> {
    let out = Artifact::parse(from, &input.text()?)?.convert(to)?;
    let text = out.text();
    match (format, &out) {
        (Format::Text, _) => println!("{text}"),
        (Format::Json, Artifact::Schema(_)) => println!("{}", json!({ "schema": text })),
        (Format::Json, _) => println!("{}", json!({ "formula": text })),
    }
    Ok(Outcome::Yes)
}

fn sat_input(logic: Logic, text: &str) -> Result<SatInput, CliError> {
    Ok(match logic {
        Logic::Jnl => SatInput::Jnl(parse_jnl(text)?),
        Logic::Jsl => SatInput::Jsl(parse_jsl(text)?),
        Logic::Rjsl => SatInput::Rjsl(parse_rjsl(text)?),
    })
}

pub fn sat(
    format: Format,
    formula: &Source,
    logic: Logic,
    bounds: Bounds,
    budget: u64,
    strategy: Option<&str>,
) -> Result<Outcome, CliError> {
    let input = sat_input(logic, &formula.text()?)?;
    let result = match strategy {
        None => sat_bounded_with_budget(&input, &bounds, budget)?,
        Some(name) => StrategyRegistry::default().get(name)?.solve(&input, &bounds, budget)?,
    };
    let value = || match &result {
        SatVerdict::Sat(t) => json!({
            "verdict": "SAT",
            "witness": serde_json::from_str::<Value>(t.canonical()).expect("canonical text is JSON"),
        }),
        SatVerdict::UnsatUpToBound(b) => json!({
            "verdict": "UNSAT",
            "bounds": { "max_depth": b.max_depth, "max_width": b.max_width, "max_atoms": b.max_atoms },
        }),
    };
    emit(format, || result.to_string(), value);
    Ok(verdict(result.is_sat()))
}

pub fn check_wf(format: Format, expr: &Source) -> Result<Outcome, CliError> {
    let e = parse_rjsl(&expr.text()?)?;
    let g = precedence_graph(&e);
    let ok = is_well_formed(&e);
    let cycle = g.find_cycle();
    let text = || {
        let mut s = g.to_string();
        match &cycle {
            None => s.push_str("well-formed"),
            Some(c) => s.push_str(&format!("ill-formed, cycle: {}", c.join(" -> "))),
        }
        s
    };
    let value = || {
        let edges: Vec<Value> = g.edges.iter().map(|&(a, b)| json!([g.symbols[a], g.symbols[b]])).collect();
        json!({
            "symbols": g.symbols,
            "edges": edges,
            "verdict": if ok { "WELL_FORMED" } else { "ILL_FORMED" },
            "cycle": cycle.clone().unwrap_or_default(),
        })
    };
    emit(format, text, value);
    Ok(verdict(ok))
}

pub fn automaton(format: Format, doc: &str, formula: &Source, logic: Logic, show: bool) -> Result<Outcome, CliError> {
    let t = document(doc)?;
    let text = formula.text()?;
    let a: JAutomaton = match logic {
        Logic::Jsl => jsl_to_automaton(&parse_jsl(&text)?),
        Logic::Rjsl => recursive_to_automaton(&parse_rjsl(&text)?)?,
        Logic::Jnl => jnl_to_automaton(&parse_jnl(&text)?)?,
    };
    let accepted = automaton_accepts(&a, &t);
    let word = if accepted { "ACCEPT" } else { "REJECT" };
    let text = || if show { format!("{}\n{word}", a.to_string().trim_end()) } else { word.to_string() };
    let value = || {
        let mut v = json!({ "verdict": word, "states": a.state_count() });
        if show {
            v["automaton"] = json!(a.to_string());
        }
        v
    };
    emit(format, text, value);
    Ok(verdict(accepted))
}
