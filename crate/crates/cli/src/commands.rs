//! One function per subcommand; each parses its input, calls the core, and
//! serializes what comes back.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use heislift_core::atlas::{build_parabolic, involution_properties, verify_fixed_points, ClassicalGroupSpec, Family};
use heislift_core::cochain::{
    assemble_truncated_system, check_in_realization, classify_extensions, cohomology, count_matrix_extensions, cup_pairing, hl_predicates,
    Cohomology,
};
use heislift_core::delta::{dimension_bounds, is_classical, nontriviality_transfer_check, ClassicalWitness};
use heislift_core::heisenberg::{check_h1, check_h2, enumerate_mod_p, verify, LiftPlan, ModPSolution};
use heislift_core::padic::RootMethod;
use heislift_core::zmod::{ModMatrix, ResidueRing};

use crate::formats::{matrix_to_doc, resolve, AtlasDump, ModuleFile, PairFile, ScalarDoc, SolutionDoc, SystemFile};
use crate::report::{Failure, Outcome};
use crate::{Cli, Command};

const DEFAULT_PRECISION: u32 = 32;
const DEFAULT_ATLAS_PRIME: u64 = 5;
/// Solution lists longer than this are summarized by their count.
const LIST_LIMIT: usize = 256;

pub fn dispatch(cli: &Cli, input: Option<&[u8]>) -> Result<Outcome, Failure> {
    let bytes = || input.ok_or_else(|| Failure::input("missing input"));
    match &cli.command {
        Command::HeisCheck { .. } => heis_check(cli, bytes()?),
        Command::HeisEnumerate { .. } => heis_enumerate(cli, bytes()?),
        Command::HeisSolve { xbar, ybar, .. } => heis_solve(cli, bytes()?, xbar.clone(), ybar.clone()),
        Command::CohCompute { .. } => coh_compute(bytes()?),
        Command::CohCup { .. } => coh_cup(cli, bytes()?),
        Command::CohClassify { oracle, .. } => coh_classify(cli, bytes()?, *oracle),
        Command::AtlasDump { family, n, k } => atlas_dump(cli, family, *n, *k),
        Command::AtlasVerify { family, n, k } => atlas_verify(cli, family, *n, *k),
        Command::DimBounds { degree, a, b } => {
            let d = dimension_bounds(*degree, *a, *b);
            Ok(Outcome::ok(json!({ "h1_lower": d.h1_lower, "h2_upper": d.h2_upper, "note": "arithmetic on declared inputs" })))
        }
    }
}

fn parse<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, Failure> {
    serde_json::from_slice(bytes).map_err(|e| Failure::input(format!("malformed input: {e}")))
}

fn load_system(cli: &Cli, bytes: &[u8]) -> Result<(SystemFile, heislift_core::heisenberg::HeisenbergSystem), Failure> {
    let file: SystemFile = parse(bytes)?;
    let prime = match resolve("prime", file.prime, cli.opts.prime, 0)? {
        0 => return Err(Failure::usage("no prime in the file or flags")),
        p => p,
    };
    let precision = resolve("precision", file.precision, cli.opts.precision, DEFAULT_PRECISION)?;
    let sys = file.to_system(prime, precision)?;
    Ok((file, sys))
}

fn heis_check(cli: &Cli, bytes: &[u8]) -> Result<Outcome, Failure> {
    let (_, sys) = load_system(cli, bytes)?;
    let h1 = check_h1(&sys)?;
    let mut results = json!({
        "h1": h1.holds,
        "cokernel": { "torsion": h1.cokernel.torsion, "free_rank": h1.cokernel.free_rank },
        "n": h1.adapted.as_ref().and_then(|a| a.n),
    });
    let mut failure = None;
    if h1.holds {
        let w = check_h2(&sys, cli.opts.budget)?;
        results["h2"] = json!(w.is_some());
        results["witness"] = json!(w);
        if w.is_none() {
            failure = Some(heislift_core::Error::NotHeisenbergH2.into());
        }
    } else {
        results["h2"] = Value::Null;
        failure = Some(heislift_core::Error::NotHeisenbergH1.into());
    }
    Ok(Outcome { results, failure, ..Default::default() })
}

fn heis_enumerate(cli: &Cli, bytes: &[u8]) -> Result<Outcome, Failure> {
    let (_, sys) = load_system(cli, bytes)?;
    let mut sols = enumerate_mod_p(&sys, cli.opts.budget)?;
    sols.sort();
    let docs: Vec<SolutionDoc> = sols.iter().map(SolutionDoc::from).collect();
    Ok(Outcome::ok(json!({ "count": docs.len(), "solutions": docs })))
}

/// Flags, then the file, then an enumerated solution: the first with `x != 0`, or a seeded random one.
fn choose_solution(cli: &Cli, file: &SystemFile, sys: &heislift_core::heisenberg::HeisenbergSystem, xbar: Option<Vec<u64>>, ybar: Option<Vec<u64>>) -> Result<ModPSolution, Failure> {
    if let Some(x) = xbar {
        return Ok(ModPSolution { xbar: x, ybar: ybar.unwrap_or_else(|| vec![0; sys.t()]) });
    }
    if let Some(s) = &file.solution {
        return Ok(s.clone().into());
    }
    let mut sols = enumerate_mod_p(sys, cli.opts.budget)?;
    sols.sort();
    if sols.is_empty() {
        return Err(Failure::no_solution());
    }
    let idx = match cli.opts.seed {
        Some(seed) => ChaCha8Rng::seed_from_u64(seed).gen_range(0..sols.len()),
        None => sols.iter().position(|s| s.xbar.iter().any(|&v| v != 0)).unwrap_or(0),
    };
    Ok(sols.swap_remove(idx))
}

fn method_name(m: RootMethod) -> &'static str {
    match m {
        RootMethod::ZeroConstant => "zero-constant",
        RootMethod::Hensel => "hensel",
        RootMethod::Discriminant => "discriminant",
    }
}

fn heis_solve(cli: &Cli, bytes: &[u8], xbar: Option<Vec<u64>>, ybar: Option<Vec<u64>>) -> Result<Outcome, Failure> {
    let (file, sys) = load_system(cli, bytes)?;
    let sol = choose_solution(cli, &file, &sys, xbar, ybar)?;
    let plan = LiftPlan::new(&sys, cli.opts.budget)?;
    let lift = plan.lift(&sol)?;
    let rep = verify(&sys, &lift.x, &lift.y);
    let results = json!({
        "solution": SolutionDoc::from(&sol),
        "field": lift.field.name(),
        "method": method_name(lift.method),
        "witness": lift.witness,
        "lambda": ScalarDoc::from(&lift.lambda),
        "x": lift.x.iter().map(ScalarDoc::from).collect::<Vec<_>>(),
        "y": lift.y.iter().map(ScalarDoc::from).collect::<Vec<_>>(),
        "residual_min": rep.min.to_string(),
        "meets_achieved_prec": rep.meets(lift.achieved_prec),
        "reduces_to_solution": lift.reduces_to(&sol),
    });
    let failure = (!rep.meets(lift.achieved_prec)).then(|| Failure::verify("residual below the achieved precision"));
    Ok(Outcome {
        results,
        residual_valuations: Some(rep.residuals.iter().map(|v| v.to_string()).collect()),
        achieved_prec: Some(lift.achieved_prec),
        failure,
    })
}

fn coh_compute(bytes: &[u8]) -> Result<Outcome, Failure> {
    let file: ModuleFile = parse(bytes)?;
    let ring = file.ring.ring()?;
    let m = file.module.to_module(ring)?;
    let mut degrees = Vec::new();
    for d in 0..3 {
        degrees.push(match cohomology(&m, d)? {
            Cohomology::Field(h) => json!({ "degree": d, "dim": h.dim(), "representatives": h.representatives }),
            Cohomology::Ring { invariant_factors } => json!({ "degree": d, "length": invariant_factors.iter().sum::<u32>(), "invariant_factors": invariant_factors }),
        });
    }
    Ok(Outcome::ok(json!({ "prime": ring.prime(), "precision": ring.exponent(), "degrees": degrees })))
}

fn witness_json(w: &Option<ClassicalWitness>) -> Value {
    match w {
        None => Value::Null,
        Some(ClassicalWitness::SwapFails { degree, summand, cocycle }) => json!({ "swap_fails": { "degree": degree, "summand": summand, "cocycle": cocycle } }),
        Some(ClassicalWitness::CupIncompatible { u, v }) => json!({ "cup_incompatible": { "u": u, "v": v } }),
    }
}

fn coh_cup(cli: &Cli, bytes: &[u8]) -> Result<Outcome, Failure> {
    let file: PairFile = parse(bytes)?;
    let loaded = file.load()?;
    let field = loaded.pair.ring().residue_field();
    let reduced = loaded.pair.reduce_to(field);
    let cp = cup_pairing(&reduced)?;
    let mut results = json!({
        "h1_dim": cp.h1.dim(),
        "h2_dim": cp.h2.dim(),
        "h1_basis": cp.h1.representatives,
        "pairing": cp.matrices.iter().map(matrix_to_doc).collect::<Vec<_>>(),
        "trivial": cp.is_trivial(),
    });
    if let Some(action) = &loaded.action {
        let red = heislift_core::delta::DeltaAction::new(action.j1.reduce_to(field), action.j0.reduce_to(field), action.summands)?;
        let cls = is_classical(&reduced, &red)?;
        results["classical"] = json!(cls.classical);
        results["classical_witness"] = witness_json(&cls.witness);
        if cls.classical {
            let t = nontriviality_transfer_check(&reduced, &red)?;
            results["transfer"] = json!({ "on_invariants": t.on_invariants, "overall": t.overall, "hypothesis": t.hypothesis });
        }
    }
    if let Some((h, bar)) = file.hl_vectors()? {
        let hl = hl_predicates(&loaded.pair, &h, &bar)?;
        results["hl"] = json!({ "hl1": hl.hl1, "hl2": hl.hl2, "hl3": hl.hl3 });
        let ts = assemble_truncated_system(&loaded.pair, &h)?;
        let h1 = check_h1(&ts.system)?;
        let h2 = if h1.holds { Some(check_h2(&ts.system, cli.opts.budget)?.is_some()) } else { None };
        results["truncation"] = json!({ "r": ts.system.r(), "s": ts.system.s(), "t": ts.system.t(), "h1": h1.holds, "h2": h2 });
    }
    Ok(Outcome::ok(results))
}

fn coh_classify(cli: &Cli, bytes: &[u8], oracle: bool) -> Result<Outcome, Failure> {
    let file: PairFile = parse(bytes)?;
    let loaded = file.load()?;
    let cls = classify_extensions(&loaded.pair, cli.opts.budget)?;
    let mut results = json!({
        "solutions": cls.cocycles.len(),
        "class_count": cls.class_count,
        "closed_under_conjugation": cls.closed_under_conjugation,
    });
    if cls.cocycles.len() <= LIST_LIMIT {
        results["cocycles"] = json!(cls.cocycles.iter().map(|z| json!({ "c1": z.c1, "c0": z.c0 })).collect::<Vec<_>>());
    }
    if oracle {
        let (real, f, g) = loaded.realization.as_ref().ok_or_else(|| Failure::usage("--oracle needs a realization in the pair file"))?;
        let (commuting, intertwining) = count_matrix_extensions(real, f, g, cli.opts.budget)?;
        let check = check_in_realization(real, f, g, &cls)?;
        results["oracle"] = json!({
            "commuting_pairs": commuting,
            "intertwining_pairs": intertwining,
            "matches_commuting": commuting == cls.cocycles.len(),
            "matches_intertwining": intertwining == cls.cocycles.len(),
            "solutions_failing_commutation": check.commutation_failures,
            "solutions_failing_intertwining": check.intertwining_failures,
        });
    }
    Ok(Outcome::ok(results))
}

fn atlas_spec(cli: &Cli, family: &str, n: usize, k: usize) -> Result<ClassicalGroupSpec, Failure> {
    let fam = Family::from_name(family).ok_or_else(|| Failure::usage(format!("unknown family `{family}` (expected gsp, go or unitary)")))?;
    let ring = ResidueRing::field(cli.opts.prime.unwrap_or(DEFAULT_ATLAS_PRIME))?;
    Ok(ClassicalGroupSpec::new(fam, n, k, ring)?)
}

fn atlas_dump(cli: &Cli, family: &str, n: usize, k: usize) -> Result<Outcome, Failure> {
    let data = build_parabolic(&atlas_spec(cli, family, n, k)?)?;
    Ok(Outcome::ok(serde_json::to_value(AtlasDump::from(&data)).expect("dump serializes")))
}

fn atlas_verify(cli: &Cli, family: &str, n: usize, k: usize) -> Result<Outcome, Failure> {
    let spec = atlas_spec(cli, family, n, k)?;
    let data = build_parabolic(&spec)?;
    let fp = verify_fixed_points(&data)?;
    let f = data.levi_element(&ModMatrix::scalar(spec.ring, k, 2))?;
    let g = data.levi_element(&ModMatrix::identity(spec.ring, k))?;
    let inv = involution_properties(&data, Some((&f, &g)))?;
    let results = json!({
        "fixed_dim": fp.fixed_dim,
        "lie_dim": fp.lie_dim,
        "formula_dim": fp.formula_dim,
        "fixed_in_lie": fp.fixed_in_lie,
        "exp_membership": fp.exp_membership,
        "involutive": inv.involutive,
        "swaps_summands": inv.swaps_summands,
        "bracket_compatible": inv.bracket_compatible,
        "classical": inv.classical,
    });
    let pass = fp.passes && inv.all_pass();
    let failure = (!pass).then(|| Failure::verify("parabolic verification failed"));
    Ok(Outcome { results, failure, ..Default::default() })
}
