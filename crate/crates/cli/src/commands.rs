//! Dispatch of each command to the library.

use std::io::Read;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use njk_core::algebroid::{
    algebroid_mc_residual, delta_njld, homological_field_q, phi_map, validate_algebroid, validate_phi_chain_map,
    ConePair, GradedField,
};
use njk_core::brace::{mc_residual, MaurerCartanCandidate};
use njk_core::cochain::{ComplexKind, NijenhuisComplexes};
use njk_core::exact::{rat, sign_pow};
use njk_core::fn_geometry::{check_homotopy, fn_betti};
use njk_core::forms::VectorValuedForm;
use njk_core::lie::{
    is_zero_vec, validate_lie, validate_nijenhuis, validate_nijenhuis_representation, validate_representation,
    Endomorphism, NijenhuisLieAlgebra,
};
use njk_core::sample::{random_field, random_vector_form, rng};

use crate::config::{AlgebroidCommand, CheckCommand, Command, Complex, InputArg, RunConfig};
use crate::error::CliError;
use crate::input::{form_to_file, parse_json, AlgebroidFile, AlgebroidInput, FormsFile, FormsInput, LieFile, LieInput};
use crate::report::{check_json, check_line, Report, Verdict};

/// What a command produced, before the common fields are attached.
struct Outcome {
    verdict: Verdict,
    result: Value,
    summary: Vec<String>,
}

/// Read a file, or stdin for `-`.
pub fn read_input(path: &Path) -> Result<String, CliError> {
    let shown = path.display().to_string();
    let mut text = String::new();
    let res = if shown == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|source| CliError::Io { path: shown, source })?;
    Ok(text)
}

fn load_lie(input: &InputArg) -> Result<LieInput, CliError> {
    LieInput::from_file(&parse_json::<LieFile>(&read_input(&input.file)?)?)
}

fn load_algebroid(input: &InputArg) -> Result<AlgebroidInput, CliError> {
    AlgebroidInput::from_file(&parse_json::<AlgebroidFile>(&read_input(&input.file)?)?)
}

fn required<'a, T>(v: &'a Option<T>, field: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::Input { field: field.into(), msg: "required by this command".into() })
}

/// Command echo and input path.
fn describe(cmd: &Command) -> (String, Option<&InputArg>) {
    let (name, input) = match cmd {
        Command::Check(c) => match c {
            CheckCommand::Lie(i) => ("check lie", Some(i)),
            CheckCommand::Nijenhuis(i) => ("check nijenhuis", Some(i)),
            CheckCommand::Rep(i) => ("check rep", Some(i)),
            CheckCommand::Algebroid(i) => ("check algebroid", Some(i)),
        },
        Command::Cohomology { input, .. } => ("cohomology", Some(input)),
        Command::Mc { input, .. } => ("mc", Some(input)),
        Command::FnBracket { input } => ("fn-bracket", Some(input)),
        Command::Torsion { input } => ("torsion", Some(input)),
        Command::Poincare { .. } => ("poincare", None),
        Command::Algebroid(a) => match a {
            AlgebroidCommand::Phi { input, .. } => ("algebroid phi", Some(input)),
            AlgebroidCommand::Njld { input, .. } => ("algebroid njld", Some(input)),
            AlgebroidCommand::Mc(i) => ("algebroid mc", Some(i)),
        },
        Command::Les { input, .. } => ("les", Some(input)),
    };
    (name.to_string(), input)
}

/// Run one command. A failed precondition of the library (for instance an operator
/// that is not Nijenhuis) becomes an `invalid` report; other failures are errors.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let (command, input) = describe(&config.command);
    let outcome = match dispatch(config) {
        Ok(o) => o,
        Err(CliError::Core(njk_core::Error::Precondition(msg))) => Outcome {
            verdict: Verdict::Invalid,
            result: json!({ "reason": msg }),
            summary: vec![format!("precondition failed: {msg}")],
        },
        Err(e) => return Err(e),
    };
    Ok(Report {
        command,
        input: input.map(|i| i.file.display().to_string()),
        seed: config.seed,
        verdict: outcome.verdict,
        result: outcome.result,
        summary: outcome.summary,
        timing_ms: config.timing.then(|| start.elapsed().as_millis()),
    })
}

fn dispatch(config: &RunConfig) -> Result<Outcome, CliError> {
    match &config.command {
        Command::Check(c) => match c {
            CheckCommand::Lie(i) => check_lie(&load_lie(i)?),
            CheckCommand::Nijenhuis(i) => check_nijenhuis(&load_lie(i)?),
            CheckCommand::Rep(i) => check_rep(&load_lie(i)?),
            CheckCommand::Algebroid(i) => check_algebroid(&load_algebroid(i)?),
        },
        Command::Cohomology { complex, max_degree, input } => cohomology(&load_lie(input)?, *complex, *max_degree),
        Command::Mc { n_max, input } => mc(&load_lie(input)?, *n_max as usize),
        Command::FnBracket { input } => {
            fn_bracket(&FormsInput::from_file(&parse_json::<FormsFile>(&read_input(&input.file)?)?)?)
        }
        Command::Torsion { input } => torsion(&load_algebroid(input)?),
        Command::Poincare { n, max_poly_deg } => poincare(*n as usize, *max_poly_deg as u32),
        Command::Algebroid(a) => match a {
            AlgebroidCommand::Phi { max_arity, max_poly_deg, input } => {
                algebroid_phi(&load_algebroid(input)?, *max_arity as usize, *max_poly_deg as u32)
            }
            AlgebroidCommand::Njld { samples, max_arity, input } => {
                algebroid_njld(&load_algebroid(input)?, *samples as usize, *max_arity as usize, config.seed)
            }
            AlgebroidCommand::Mc(i) => algebroid_mc(&load_algebroid(i)?),
        },
        Command::Les { max_degree, input } => les(&load_lie(input)?, *max_degree),
    }
}

fn check_lie(l: &LieInput) -> Result<Outcome, CliError> {
    let r = validate_lie(&l.algebra);
    Ok(Outcome {
        verdict: Verdict::from_bool(r.valid),
        summary: vec![format!("dimension {}", l.algebra.dim()), check_line("Jacobi identity", &r)],
        result: json!({ "dim": l.algebra.dim(), "jacobi": check_json(&r) }),
    })
}

fn check_nijenhuis(l: &LieInput) -> Result<Outcome, CliError> {
    let p = required(&l.nijenhuis, "nijenhuis")?;
    let jac = validate_lie(&l.algebra);
    let tor = validate_nijenhuis(&l.algebra, p)?;
    Ok(Outcome {
        verdict: Verdict::from_bool(jac.valid && tor.valid),
        summary: vec![check_line("Jacobi identity", &jac), check_line("vanishing torsion", &tor)],
        result: json!({ "jacobi": check_json(&jac), "torsion": check_json(&tor) }),
    })
}

fn check_rep(l: &LieInput) -> Result<Outcome, CliError> {
    let m = required(&l.representation, "representation")?;
    let jac = validate_lie(&l.algebra);
    let rep = validate_representation(&l.algebra, m)?;
    let mut result = json!({ "jacobi": check_json(&jac), "representation": check_json(&rep) });
    let mut summary = vec![check_line("Jacobi identity", &jac), check_line("representation axioms", &rep)];
    let mut ok = jac.valid && rep.valid;
    if let (Some(p), Some(pm)) = (&l.nijenhuis, &l.rep_nijenhuis) {
        let nl = NijenhuisLieAlgebra::new(l.algebra.clone(), p.clone())?;
        let r = validate_nijenhuis_representation(&nl, m, pm)?;
        summary.push(check_line("Nijenhuis representation", &r));
        result["nijenhuis_representation"] = check_json(&r);
        ok &= r.valid;
    }
    Ok(Outcome { verdict: Verdict::from_bool(ok), result, summary })
}

fn check_algebroid(a: &AlgebroidInput) -> Result<Outcome, CliError> {
    let r = validate_algebroid(&a.algebroid);
    let mut summary = vec![
        format!("base dimension {}, rank {}", a.algebroid.base_dim(), a.algebroid.rank()),
        format!("axioms: {}", if r.axioms_valid { "hold" } else { "fail" }),
        format!("[Q,Q] = 0: {}", r.qq_vanishes),
    ];
    if let Some(f) = &r.failure {
        summary.push(format!("first failure: {f}"));
    }
    let mut result = json!({
        "axioms_valid": r.axioms_valid,
        "qq_vanishes": r.qq_vanishes,
        "routes_agree": r.routes_agree(),
        "failure": r.failure,
    });
    let mut ok = r.valid();
    if let Some(p) = &a.nijenhuis {
        let t = a.algebroid.torsion_coefficients(p)?.is_zero();
        summary.push(format!("operator torsion vanishes: {t}"));
        result["torsion_vanishes"] = json!(t);
        ok &= t;
    }
    Ok(Outcome { verdict: Verdict::from_bool(ok), result, summary })
}

/// Complexes of the adjoint module, or of the given representation.
fn complexes(l: &LieInput, kind: ComplexKind) -> Result<(NijenhuisComplexes, &'static str), CliError> {
    let n = l.algebra.dim();
    let p = match (&l.nijenhuis, kind) {
        (Some(p), _) => p.clone(),
        (None, ComplexKind::Ce) => Endomorphism::zero(n),
        (None, _) => return Err(CliError::Input { field: "nijenhuis".into(), msg: "required by this complex".into() }),
    };
    let nl = NijenhuisLieAlgebra::new(l.algebra.clone(), p)?;
    match &l.representation {
        None => Ok((NijenhuisComplexes::adjoint(&nl)?, "adjoint")),
        Some(m) => {
            let pm = match (&l.rep_nijenhuis, kind) {
                (Some(pm), _) => pm.clone(),
                (None, ComplexKind::Ce) => Endomorphism::zero(m.dim_m),
                (None, _) => {
                    return Err(CliError::Input {
                        field: "rep_nijenhuis".into(),
                        msg: "required by this complex".into(),
                    })
                }
            };
            Ok((NijenhuisComplexes::new(&nl, m, &pm)?, "representation"))
        }
    }
}

fn degree_bound(arg: &str, k: u64, dim: usize) -> Result<usize, CliError> {
    if k as usize > dim {
        return Err(CliError::Argument { arg: arg.into(), msg: format!("{k} exceeds the dimension {dim}") });
    }
    Ok(k as usize)
}

fn cohomology(l: &LieInput, complex: Complex, max_degree: u64) -> Result<Outcome, CliError> {
    let kind = match complex {
        Complex::Ce => ComplexKind::Ce,
        Complex::Njo => ComplexKind::NjO,
        Complex::Njl => ComplexKind::NjL,
    };
    let k = degree_bound("--max-degree", max_degree, l.algebra.dim())?;
    let (cx, module) = complexes(l, kind)?;
    let b = cx.betti(kind, k)?;
    let entries: Vec<Value> = b
        .entries
        .iter()
        .map(|e| json!({ "degree": e.degree, "dim": e.dim, "rank": e.rank, "betti": e.betti }))
        .collect();
    let mut summary = vec![format!("complex {} with {module} coefficients", kind.name()), "n  dim  rank  betti".into()];
    summary.extend(b.entries.iter().map(|e| format!("{}  {}  {}  {}", e.degree, e.dim, e.rank, e.betti)));
    Ok(Outcome {
        verdict: Verdict::Computed,
        result: json!({
            "complex": kind.name(),
            "module": module,
            "max_degree": k,
            "entries": entries,
            "betti": b.betti_numbers(),
        }),
        summary,
    })
}

fn mc(l: &LieInput, n_max: usize) -> Result<Outcome, CliError> {
    let cand = MaurerCartanCandidate::from_lie(&l.algebra, l.nijenhuis.as_ref());
    let res = mc_residual(&cand, n_max)?;
    let equations: Vec<Value> = res
        .iter()
        .map(|r| {
            let nonzero = r.residual.values().values().filter(|v| !is_zero_vec(v)).count();
            json!({ "equation": r.equation, "arity": r.arity, "vanishes": nonzero == 0, "nonzero_entries": nonzero })
        })
        .collect();
    let vanishes = res.iter().all(|r| r.residual.is_zero());
    let direct = validate_lie(&l.algebra).valid
        && match &l.nijenhuis {
            Some(p) => validate_nijenhuis(&l.algebra, p)?.valid,
            None => true,
        };
    let mut summary = vec![format!("n_max {n_max}, {} residuals", res.len())];
    summary.extend(
        res.iter()
            .filter(|r| !r.residual.is_zero())
            .map(|r| format!("equation {} arity {} nonzero", r.equation, r.arity)),
    );
    summary.push(format!("residuals vanish: {vanishes}; direct check: {direct}"));
    Ok(Outcome {
        verdict: Verdict::from_bool(vanishes),
        result: json!({
            "n_max": n_max,
            "with_operator": l.nijenhuis.is_some(),
            "equations": equations,
            "vanishes": vanishes,
            "direct_check": direct,
        }),
        summary,
    })
}

fn form_json(f: &VectorValuedForm) -> Value {
    serde_json::to_value(form_to_file(f)).expect("forms serialize")
}

fn fn_bracket(f: &FormsInput) -> Result<Outcome, CliError> {
    let t = njk_core::algebroid::PolyAlgebroid::tangent(f.n);
    let (k, l) = (&f.left, &f.right);
    let kl = t.fn_bracket(k, l);
    let routes = kl == t.fn_bracket_decomposable(k, l);
    let sign = rat(sign_pow((k.degree() * l.degree()) as i64).into());
    let antisym = kl.combine(&t.fn_bracket(l, k), &sign).is_zero();
    let mut summary = vec![format!("[K,L] has degree {}", kl.degree())];
    summary.extend(form_to_file(&kl).components.iter().map(|(key, p)| format!("{key}: {p}")));
    summary.push(format!("routes agree: {routes}; graded antisymmetry: {antisym}"));
    Ok(Outcome {
        verdict: Verdict::from_bool(routes && antisym),
        result: json!({
            "bracket": form_json(&kl),
            "routes_agree": routes,
            "antisymmetric": antisym,
        }),
        summary,
    })
}

fn torsion(a: &AlgebroidInput) -> Result<Outcome, CliError> {
    let p = required(&a.nijenhuis, "nijenhuis")?;
    let t = &a.algebroid;
    let direct = t.nijenhuis_torsion_form(p)?;
    let coeffs = t.torsion_coefficients(p)?;
    let half_fn = t.fn_bracket(p, p).scale(&njk_core::exact::ratio(1, 2));
    let routes = direct == coeffs && coeffs == half_fn;
    let vanishes = direct.is_zero();
    let mut summary = vec![format!("torsion vanishes: {vanishes}")];
    summary.extend(form_to_file(&direct).components.iter().map(|(key, p)| format!("{key}: {p}")));
    summary.push(format!("definition, coefficients and [P,P]/2 agree: {routes}"));
    Ok(Outcome {
        verdict: Verdict::from_bool(vanishes),
        result: json!({
            "torsion": form_json(&direct),
            "vanishes": vanishes,
            "routes_agree": routes,
            "algebroid_valid": validate_algebroid(t).valid(),
        }),
        summary,
    })
}

fn poincare(n: usize, d: u32) -> Result<Outcome, CliError> {
    let degrees: Vec<usize> = (0..=n).collect();
    let h = check_homotopy(n, d, &degrees);
    let b = fn_betti(n, d, n)?;
    let entries: Vec<Value> = b
        .entries
        .iter()
        .map(|e| {
            json!({
                "form_degree": e.form_degree,
                "poly_degree": e.poly_degree,
                "dim": e.dim,
                "rank_out": e.rank_out,
                "betti": e.betti,
            })
        })
        .collect();
    let all_zero = b.all_zero();
    let mut summary =
        vec![if all_zero { "all Betti numbers 0".to_string() } else { "nonzero Betti numbers".to_string() }];
    summary.extend(
        b.entries
            .iter()
            .filter(|e| e.betti != 0)
            .map(|e| format!("H at form degree {}, poly degree {}: {}", e.form_degree, e.poly_degree, e.betti)),
    );
    summary.push(match &h.failure {
        None => format!("homotopy identity d h + h d = id verified on {} basis forms", h.checked),
        Some(f) => format!("homotopy identity fails: {f}"),
    });
    Ok(Outcome {
        verdict: Verdict::from_bool(all_zero && h.valid()),
        result: json!({
            "n": n,
            "max_poly_deg": d,
            "entries": entries,
            "all_zero": all_zero,
            "homotopy": { "checked": h.checked, "valid": h.valid(), "failure": h.failure },
        }),
        summary,
    })
}

fn algebroid_phi(a: &AlgebroidInput, max_arity: usize, max_deg: u32) -> Result<Outcome, CliError> {
    let p = required(&a.nijenhuis, "nijenhuis")?;
    let t = &a.algebroid;
    let (m, n) = (t.base_dim(), t.rank());
    let samples: Vec<GradedField> = (0..=max_arity)
        .flat_map(|b| (0..=max_deg).flat_map(move |d| GradedField::monomial_basis(m, n, b, d)))
        .collect();
    let chain = validate_phi_chain_map(t, p, &samples)?;
    let phi_q = phi_map(t, p, &homological_field_q(t))? == t.nijenhuis_torsion_form(p)?;
    Ok(Outcome {
        verdict: Verdict::from_bool(chain.valid && phi_q),
        result: json!({
            "samples": samples.len(),
            "chain_map": check_json(&chain),
            "phi_q_is_torsion": phi_q,
        }),
        summary: vec![
            format!("{} monomial fields, arity ≤ {max_arity}, degree ≤ {max_deg}", samples.len()),
            check_line("Φ(d_Q X) = [P, Φ(X)]", &chain),
            format!("Φ(Q) = N_P: {phi_q}"),
        ],
    })
}

fn algebroid_njld(a: &AlgebroidInput, samples: usize, max_arity: usize, seed: u64) -> Result<Outcome, CliError> {
    let p = required(&a.nijenhuis, "nijenhuis")?;
    let t = &a.algebroid;
    let (m, n) = (t.base_dim(), t.rank());
    let mut r = rng(seed);
    let mut first_failure = None;
    let mut nonzero_images = 0;
    for s in 0..samples {
        let b = 1 + s % max_arity;
        let pair =
            ConePair::new(random_field(&mut r, m, n, b, 2, 0.4), random_vector_form(&mut r, m, n, b - 1, 2, 0.4))?;
        let once = delta_njld(t, p, &pair)?;
        nonzero_images += usize::from(!once.is_zero());
        if first_failure.is_none() && !delta_njld(t, p, &once)?.is_zero() {
            first_failure = Some(s);
        }
    }
    let ok = first_failure.is_none();
    Ok(Outcome {
        verdict: Verdict::from_bool(ok),
        result: json!({
            "samples": samples,
            "max_arity": max_arity,
            "nonzero_images": nonzero_images,
            "squares_to_zero": ok,
            "first_failure": first_failure,
        }),
        summary: vec![
            format!("{samples} random cone elements, arity ≤ {max_arity}, {nonzero_images} with nonzero image"),
            match first_failure {
                None => "δ² = 0 on every sample".to_string(),
                Some(s) => format!("δ² ≠ 0 on sample {s}"),
            },
        ],
    })
}

fn algebroid_mc(a: &AlgebroidInput) -> Result<Outcome, CliError> {
    let p = required(&a.nijenhuis, "nijenhuis")?;
    let res = algebroid_mc_residual(&a.algebroid, p)?;
    let (qq, tor) = (res.qq.is_zero(), res.torsion_brace.is_zero());
    Ok(Outcome {
        verdict: Verdict::from_bool(res.vanishes()),
        result: json!({
            "qq_vanishes": qq,
            "torsion_vanishes": tor,
            "routes_agree": res.routes_agree(),
            "vanishes": res.vanishes(),
        }),
        summary: vec![
            format!("[Q,Q] = 0: {qq}"),
            format!("torsion brace = 0: {tor}"),
            format!("brace and coefficient routes agree: {}", res.routes_agree()),
        ],
    })
}

fn les(l: &LieInput, max_degree: u64) -> Result<Outcome, CliError> {
    let k = degree_bound("--max-degree", max_degree, l.algebra.dim())?;
    let (cx, module) = complexes(l, ComplexKind::NjL)?;
    let r = cx.les_verify(k)?;
    let nodes: Vec<Value> = r
        .nodes
        .iter()
        .map(|x| {
            json!({
                "label": x.label,
                "image_dim": x.image_dim,
                "kernel_dim": x.kernel_dim,
                "composite_zero": x.composite_zero,
            })
        })
        .collect();
    let mut summary = vec![format!("{module} coefficients, degrees ≤ {k}")];
    summary.push(format!("betti lie {:?}, njo {:?}, njl {:?}", r.betti_lie, r.betti_njo, r.betti_njl));
    summary.extend(r.nodes.iter().map(|x| format!("{}: im {} ker {}", x.label, x.image_dim, x.kernel_dim)));
    summary.push(format!("exact: {}; Euler characteristics consistent: {}", r.exact, r.euler_ok));
    Ok(Outcome {
        verdict: Verdict::from_bool(r.exact && r.euler_ok),
        result: json!({
            "module": module,
            "max_degree": k,
            "exact": r.exact,
            "euler_ok": r.euler_ok,
            "nodes": nodes,
            "betti_lie": r.betti_lie,
            "betti_njo": r.betti_njo,
            "betti_njl": r.betti_njl,
        }),
        summary,
    })
}
