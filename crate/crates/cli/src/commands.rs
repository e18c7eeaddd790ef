use std::path::Path;

use gibbs_rigidity::gibbs::{COHOMOLOGY_TOLERANCE, PERRON_TOLERANCE, STOCHASTIC_TOLERANCE};
use gibbs_rigidity::rigidity::VALUE_TOLERANCE;
use gibbs_rigidity::spectrum::{uniform_grid, CHAR_POLY_TOLERANCE, CURVE_TOLERANCE};
use gibbs_rigidity::{
    char_poly_family_equal, cohomologous_with_constant, counterexample_pair, in_g,
    induce_conjugacy, normalize, reconstruct_word, snr_certificate, AutomorphismResult, Error,
    GMembership, RationalChain, SnrParams, Word,
};
use serde_json::{json, Value};

use crate::input::Problem;
use crate::output::{edge, edge_matrix, one_based, potential, transition_matrix, word};
use crate::{CliError, Outcome};

type Result<T> = std::result::Result<T, CliError>;

fn load(path: &Path) -> Result<Problem> {
    Problem::load(path)
}

fn rational_rows(chain: &RationalChain) -> Value {
    json!(chain
        .entries()
        .iter()
        .map(|row| row
            .iter()
            .map(|x| x.as_ref().map(|x| x.to_string()))
            .collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn automorphisms(result: &AutomorphismResult) -> Value {
    match result {
        AutomorphismResult::Trivial => json!({ "result": "trivial" }),
        AutomorphismResult::Inconclusive {
            graph_group,
            amalgamation_proper,
        } => json!({
            "result": "inconclusive",
            "graph_group": graph_group.iter().map(|p| one_based(p)).collect::<Vec<_>>(),
            "amalgamation_proper": amalgamation_proper,
        }),
    }
}

fn membership(m: &GMembership) -> Value {
    json!({
        "member": m.member,
        "collision": m.collision.map(|(a, b)| [edge(a), edge(b)]),
    })
}

pub fn obstruction(command: &str, err: &Error) -> Value {
    let mut doc = json!({ "command": command, "message": err.to_string() });
    match err {
        Error::ValueSetMismatch {
            only_first,
            only_second,
        } => {
            doc["obstruction"] = "value_set_mismatch".into();
            doc["only_first"] = json!(only_first);
            doc["only_second"] = json!(only_second);
        }
        Error::NotInvertible(_) => doc["obstruction"] = "not_invertible".into(),
        _ => doc["obstruction"] = "other".into(),
    }
    doc
}

pub fn shift_info(path: &Path) -> Result<Outcome> {
    let p = load(path)?;
    let a = &p.base;
    let s = a.structure();
    let condition = a.check_cycle_condition();
    Ok(Outcome::ok(json!({
        "matrix": transition_matrix(a),
        "primitive": a.is_primitive(),
        "edge_count": a.edge_count(),
        "in_degrees": s.delta,
        "v0": one_based(&s.v0),
        "e0": s.e0.iter().map(|&e| edge(e)).collect::<Vec<_>>(),
        "cycle_condition": {
            "holds": condition.holds,
            "violations": condition.violations.iter().map(|v| json!({
                "first": word(&v.first),
                "second": word(&v.second),
                "disjoint": v.disjoint,
                "ratio_too_large": v.ratio_too_large,
            })).collect::<Vec<_>>(),
        },
    })))
}

pub fn shift_cycles(path: &Path) -> Result<Outcome> {
    let cycles = load(path)?.base.simple_cycles();
    Ok(Outcome::ok(json!({
        "count": cycles.len(),
        "cycles": cycles.to_strings(),
    })))
}

pub fn shift_amalgamate(path: &Path) -> Result<Outcome> {
    let am = load(path)?.base.total_amalgamation();
    Ok(Outcome::ok(json!({
        "identity": am.is_identity(),
        "matrix": transition_matrix(&am.matrix),
        "classes": am.classes.iter().map(|c| one_based(c)).collect::<Vec<_>>(),
        "symbol_map": one_based(&am.symbol_map),
    })))
}

pub fn shift_autos(path: &Path) -> Result<Outcome> {
    let result = load(path)?.base.automorphisms()?;
    Ok(Outcome::ok(automorphisms(&result)))
}

pub fn gibbs_normalize(path: &Path) -> Result<Outcome> {
    let p = load(path)?;
    let (chain, perron) = p.chain()?;
    let a = chain.base();
    let mut doc = json!({
        "mode": p.mode(),
        "lambda": perron.lambda,
        "pressure": perron.lambda.ln(),
        "p": perron.p,
        "v": perron.v,
        "q": edge_matrix(a, chain.q()),
        "pi": chain.pi(),
        "normalized_potential": potential(&chain.normalized_potential()),
        "e0_values": chain.e0_values().iter().map(|&(e, x)| json!({ "edge": edge(e), "value": x })).collect::<Vec<_>>(),
    });
    if let Some(exact) = &p.exact {
        doc["q_exact"] = rational_rows(exact);
    }
    Ok(Outcome::ok(doc))
}

pub fn gibbs_measure(path: &Path, w: &str) -> Result<Outcome> {
    let p = load(path)?;
    let w: Word = w.parse()?;
    if w.is_empty() {
        return Err(Error::InvalidArgument("--word must be nonempty".into()).into());
    }
    if w.symbols().iter().any(|&s| s >= p.base.size()) {
        return Err(Error::InvalidArgument(format!(
            "word {w} uses a symbol outside 1..={}",
            p.base.size()
        ))
        .into());
    }
    let (chain, _) = p.chain()?;
    Ok(Outcome::ok(json!({
        "mode": p.mode(),
        "word": word(&w),
        "admissible": p.base.is_admissible(&w),
        "measure": chain.cylinder_measure(&w),
    })))
}

pub fn gibbs_entropy(path: &Path) -> Result<Outcome> {
    let p = load(path)?;
    let (chain, perron) = p.chain()?;
    Ok(Outcome::ok(json!({
        "mode": p.mode(),
        "ks_entropy": chain.ks_entropy(),
        "pressure": perron.lambda.ln(),
    })))
}

pub fn gibbs_cohomology(path: &Path, other: &Path) -> Result<Outcome> {
    let (f, g) = (load(path)?, load(other)?);
    let doc = match (&f.exact, &g.exact) {
        (Some(rf), Some(rg)) => {
            let witness = rf.cohomology_witness(rg)?;
            json!({
                "mode": "exact",
                "cohomologous": witness.is_none(),
                "witness": witness.as_ref().map(word),
            })
        }
        _ => {
            let check = cohomologous_with_constant(&f.potential, &g.potential)?;
            json!({
                "mode": "numerical",
                "cohomologous": check.cohomologous,
                "witness": check.witness.as_ref().map(word),
                "max_deviation": check.max_deviation,
                "tolerance": COHOMOLOGY_TOLERANCE,
            })
        }
    };
    Ok(Outcome::ok(doc))
}

pub fn spectrum_curve(
    path: &Path,
    q_min: f64,
    q_max: f64,
    steps: usize,
    table: &Path,
) -> Result<Outcome> {
    let p = load(path)?;
    let (chain, _) = p.chain()?;
    let curve = gibbs_rigidity::spectrum_curve(&chain, q_min, q_max, steps)?;
    std::fs::write(table, curve.to_csv())
        .map_err(|e| CliError::Io(format!("{}: {e}", table.display())))?;
    Ok(Outcome::ok(json!({
        "mode": p.mode(),
        "table": table.display().to_string(),
        "samples": curve.samples.iter().map(|s| json!({
            "q": s.q,
            "alpha": s.alpha,
            "entropy": s.entropy,
        })).collect::<Vec<_>>(),
    })))
}

pub fn spectrum_compare(
    path: &Path,
    other: &Path,
    q_min: f64,
    q_max: f64,
    steps: usize,
) -> Result<Outcome> {
    let (f, g) = (load(path)?, load(other)?);
    let doc = match (&f.exact, &g.exact) {
        (Some(rf), Some(rg)) => json!({
            "mode": "exact",
            "equal": rf.base() == rg.base() && rf.family_equal(rg),
        }),
        _ => {
            if !(q_min < q_max) || steps < 2 {
                return Err(Error::InvalidArgument(format!(
                    "need qmin < qmax and steps >= 2 (got {q_min}, {q_max}, {steps})"
                ))
                .into());
            }
            let (cf, _) = f.chain()?;
            let (cg, _) = g.chain()?;
            let r = char_poly_family_equal(
                &cf,
                &cg,
                &uniform_grid(q_min, q_max, steps),
                CHAR_POLY_TOLERANCE,
            )?;
            json!({
                "mode": "numerical",
                "equal": r.equal,
                "max_deviation": r.max_deviation,
                "worst_q": r.worst_q,
                "tolerance": CHAR_POLY_TOLERANCE,
            })
        }
    };
    Ok(Outcome::ok(doc))
}

pub fn check_g(path: &Path) -> Result<Outcome> {
    let p = load(path)?;
    let (chain, _) = p.chain()?;
    let m = match &p.exact {
        Some(exact) => exact.in_g(),
        None => in_g(&chain),
    };
    let mut doc = membership(&m);
    doc["mode"] = p.mode().into();
    doc["e0_values"] = chain
        .e0_values()
        .iter()
        .map(|&(e, x)| json!({ "edge": edge(e), "value": x }))
        .collect();
    Ok(Outcome::ok(doc))
}

pub fn sample_g(path: &Path, samples: usize, seed: u64) -> Result<Outcome> {
    let p = load(path)?;
    let fraction = gibbs_rigidity::sample_g(&p.base, samples, seed)?;
    Ok(Outcome::ok(json!({
        "samples": samples,
        "seed": seed,
        "fraction": fraction,
    })))
}

pub fn reconstruct(path: &Path, values: &[f64]) -> Result<Outcome> {
    let p = load(path)?;
    let (chain, _) = p.chain()?;
    let w = reconstruct_word(&chain, values)?;
    Ok(Outcome::ok(json!({ "mode": p.mode(), "word": word(&w) })))
}

pub fn conjugacy(path: &Path, other: &Path) -> Result<Outcome> {
    let (f, g) = (load(path)?, load(other)?);
    let (cf, _) = f.chain()?;
    let (cg, _) = g.chain()?;
    let code = induce_conjugacy(&cf, &cg)?;
    let table: serde_json::Map<String, Value> = code
        .table()
        .iter()
        .map(|(block, &s)| (block.to_string(), json!(s + 1)))
        .collect();
    Ok(Outcome::ok(json!({
        "window": code.window(),
        "identity": code.is_identity(),
        "table": table,
    })))
}

pub fn counterexample(path: &Path) -> Result<Outcome> {
    let p = load(path)?;
    let (chain, _) = p.chain()?;
    let params = SnrParams::from_chain(&chain)?;
    let a = &p.base;
    let doc = match &p.exact {
        Some(exact) => {
            let g = exact.counterexample_pair()?;
            json!({
                "mode": "exact",
                "params": params_value(&params),
                "q_f": rational_rows(exact),
                "q_g": rational_rows(&g),
                "partner": { "matrix": transition_matrix(a), "potential": { "q_matrix": rational_rows(&g) } },
            })
        }
        None => {
            let g = counterexample_pair(&p.potential)?;
            let (cg, _) = normalize(&g)?;
            json!({
                "mode": "numerical",
                "params": params_value(&params),
                "q_f": edge_matrix(a, chain.q()),
                "q_g": edge_matrix(a, cg.q()),
                "partner": { "matrix": transition_matrix(a), "potential": { "log_values": potential(&g) } },
            })
        }
    };
    Ok(Outcome::ok(doc))
}

fn params_value(p: &SnrParams) -> Value {
    json!({ "a1": p.a1, "a2": p.a2, "a3": p.a3, "b1": p.b1, "b2": p.b2 })
}

pub fn certificate(path: &Path) -> Result<Outcome> {
    let p = load(path)?;
    let cert = match &p.exact {
        Some(exact) => exact.snr_certificate()?,
        None => snr_certificate(&p.potential)?,
    };
    let a = &p.base;
    let vs = &cert.value_sets;
    let mut doc = json!({
        "tool": "gibbs-rigidity",
        "version": env!("CARGO_PKG_VERSION"),
        "input_sha256": p.digest,
        "mode": p.mode(),
        "tolerances": {
            "perron": PERRON_TOLERANCE,
            "stochastic": STOCHASTIC_TOLERANCE,
            "value_match": VALUE_TOLERANCE,
            "cohomology": COHOMOLOGY_TOLERANCE,
            "char_poly": CHAR_POLY_TOLERANCE,
            "curve": CURVE_TOLERANCE,
        },
        "verdict": cert.verdict,
        "checks": {
            "f_in_g": cert.checks.f_in_g,
            "spectra_equal": cert.checks.spectra_equal,
            "not_cohomologous": cert.checks.not_cohomologous,
            "aut_trivial": cert.checks.aut_trivial,
            "e0_value_sets_differ": cert.checks.e0_value_sets_differ,
        },
        "collision": cert.collision.map(|(x, y)| [edge(x), edge(y)]),
        "spectra_max_deviation": cert.spectra_max_deviation,
        "witness_cycle": cert.witness_cycle.as_ref().map(word),
        "cycle_sum_f": cert.cycle_sum_f,
        "cycle_sum_g": cert.cycle_sum_g,
        "automorphisms": automorphisms(&cert.automorphisms),
        "amalgamation_is_identity": cert.amalgamation_is_identity,
        "value_sets": {
            "f": vs.first,
            "g": vs.second,
            "only_f": vs.only_first,
            "only_g": vs.only_second,
        },
        "f": potential(&cert.f),
        "g": potential(&cert.g),
        "q_f": edge_matrix(a, &cert.q_f),
        "q_g": edge_matrix(a, &cert.q_g),
    });
    if let Some(exact) = &p.exact {
        doc["q_f_exact"] = rational_rows(exact);
        doc["q_g_exact"] = rational_rows(&exact.counterexample_pair()?);
    }
    let code = if cert.verdict { 0 } else { 4 };
    Ok(Outcome { doc, code })
}
