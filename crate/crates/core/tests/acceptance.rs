//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Each criterion also has a wall-clock budget.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use qmatroid::derive::{
    automorphism_group, block_count, check_aut_transfer, check_circuit_count_identity, derive_design,
    lambda_independent, DerivedKind, TransferOutcome,
};
use qmatroid::design::{
    desarguesian_spread, exhaustive_intersection_counts, induced_flat_family, induced_rank_oracle, is_qpmd,
    supplementary_design, verify_design, SteinerSystem,
};
use qmatroid::flats::{check_flat_axioms, cryptomorphism_roundtrip, flats_from_rank, roundtrip_family, Flats};
use qmatroid::linalg::all_subspaces;
use qmatroid::qcount::{corollary_sts_params, intersection_number, is_admissible, sts_admissible, DesignParams};
use qmatroid::qmatroid::{check_rank_axioms, check_rank_axioms_sampled, PairSampling, RankOracle};
use qmatroid::{tables, FieldSpec, Limits, Matrix};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn f2() -> FieldSpec {
    FieldSpec::new(2, 1).unwrap()
}

fn spread(n: usize, k: usize) -> Result<SteinerSystem, String> {
    desarguesian_spread(n, k, &f2(), &Limits::default()).map_err(|e| e.to_string())
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn tables_reproduced() -> Outcome {
    let expected_t1 = ["2-(13,4,692912;2)", "2-(13,4,5115;2)", "2-(13,9,6347715;2)"];
    let expected_t2 = [
        (2, ["2-(7,4,80;2)", "2-(7,4,75;2)", "2-(7,3,15;2)"]),
        (3, ["2-(7,4,810;3)", "2-(7,4,400;3)", "2-(7,3,40;3)"]),
        (4, ["2-(7,4,4352;4)", "2-(7,4,1445;4)", "2-(7,3,85;4)"]),
        (5, ["2-(7,4,16250;5)", "2-(7,4,4056;5)", "2-(7,3,156;5)"]),
    ];
    let t1 = tables::table1().map_err(|e| e.to_string())?;
    ensure!(t1 == expected_t1, "table 1 rows {t1:?}");
    let t2 = tables::table2().map_err(|e| e.to_string())?;
    ensure!(t2.len() == 4, "table 2 has {} rows", t2.len());
    for ((q, rows), (eq, erows)) in t2.iter().zip(expected_t2) {
        ensure!(*q == eq && rows == &erows, "table 2 q={q}: {rows:?}");
    }
    let text = tables::render().map_err(|e| e.to_string())?;
    let found = text.split_whitespace().filter(|w| w.starts_with("2-(")).count();
    ensure!(found == 15, "rendered tables list {found} parameter sets");
    for e in expected_t1.iter().chain(expected_t2.iter().flat_map(|(_, r)| r.iter())) {
        ensure!(text.contains(e), "rendered tables lack {e}");
    }
    Ok("15 parameter sets exact".into())
}

fn independent_examples() -> Outcome {
    for (n, lambda, blocks) in [(13u64, 2046u64, 3_267_963_270u64), (7, 30, 11_430)] {
        let p = DesignParams::steiner(2, 3, n, 2).map_err(|e| e.to_string())?;
        let l = lambda_independent(&p).map_err(|e| e.to_string())?;
        ensure!(l == BigUint::from(lambda), "S(2,3,{n};2): λ = {l}");
        let b = block_count(&l, n, 2, 3, 2).map_err(|e| e.to_string())?;
        ensure!(b == BigUint::from(blocks), "S(2,3,{n};2): b = {b}");
    }
    Ok("λ 2046, b 3267963270; λ 30, b 11430".into())
}

fn admissibility() -> Outcome {
    for n in 3..=100 {
        ensure!(sts_admissible(n) == matches!(n % 6, 1 | 3), "sts_admissible({n})");
    }
    let mut cases = 0;
    for q in [2u64, 3, 4, 5] {
        for n in 7..=40 {
            let c = corollary_sts_params(n, q).map_err(|e| e.to_string())?;
            let expected = matches!(n % 6, 0 | 1 | 3 | 4);
            ensure!(c.admissible == expected, "verdict for n={n} q={q}");
            let sweep = is_admissible(&c.sets[2]).map_err(|e| e.to_string())?.admissible;
            ensure!(sweep == expected, "integrality sweep disagrees for n={n} q={q}");
            for set in &c.sets[..2] {
                let ok = is_admissible(set).map_err(|e| e.to_string())?.admissible;
                ensure!(ok || !expected, "{set} fails integrality at admissible n={n}");
            }
            cases += 1;
        }
    }
    Ok(format!("98 congruences, {cases} implied parameter triples"))
}

fn steiner_end_to_end() -> Outcome {
    let limits = Limits::default();
    let cases: [((usize, usize), Option<[u64; 3]>); 3] =
        [((4, 2), Some([6, 1, 0])), ((6, 3), Some([28, 3, 56])), ((6, 2), None)];
    let mut summary = Vec::new();
    for ((n, k), want) in cases {
        let name = format!("S(1,{k},{n};2)");
        let s = spread(n, k)?;
        let fam = induced_flat_family(&s);
        let fa = check_flat_axioms(&fam, &limits).map_err(|e| e.to_string())?;
        ensure!(fa.passed(), "{name}: flat axioms {:?}", fa.violation);
        let m = induced_rank_oracle(&s).memoized();
        let ra = if n == 4 {
            check_rank_axioms(&m, &limits)
        } else {
            let sampling = PairSampling { max_pair_dim: 3, random_pairs: 100_000, seed: 0x5eed };
            check_rank_axioms_sampled(&m, &sampling, &limits)
        }
        .map_err(|e| e.to_string())?;
        ensure!(ra.passed(), "{name}: rank axioms {:?}", ra.violation);
        ensure!(n == 4 || ra.pairs >= 100_000, "{name}: only {} pairs", ra.pairs);
        let pmd = is_qpmd(&m, &limits).map_err(|e| e.to_string())?;
        ensure!(pmd.passed(), "{name}: not a perfect matroid design");
        let mut lambdas = Vec::new();
        for kind in DerivedKind::ALL {
            let calc = kind.lambda(s.params()).map_err(|e| e.to_string())?;
            let d = derive_design(&s, kind, &limits).map_err(|e| e.to_string())?;
            ensure!(d.params().lambda == calc, "{name} {kind}: λ {} vs {calc}", d.params().lambda);
            let v = verify_design(&d, &limits).map_err(|e| e.to_string())?;
            ensure!(v.passed(), "{name} {kind}: {:?}", v.failure);
            lambdas.push(calc.to_string());
        }
        if let Some(w) = want {
            let got: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            ensure!(lambdas == got, "{name}: λ {lambdas:?}, expected {got:?}");
        }
        summary.push(format!("{name} λ={}", lambdas.join("/")));
    }
    Ok(summary.join(", "))
}

/// The four families of the round-trip criterion, as (name, oracle, validated flats).
fn roundtrip_cases() -> Result<Vec<(String, RankOracle, Flats)>, String> {
    let f = f2();
    let limits = Limits::default();
    let f4 = FieldSpec::new(2, 2).unwrap();
    let g = Matrix::from_rows(&f4, &[[1, 0, 2, 3], [0, 1, 3, 2]]).unwrap();
    let oracles = vec![
        RankOracle::uniform(&f, 4, 2).map_err(|e| e.to_string())?,
        RankOracle::free(&f, 3),
        RankOracle::representable(&g, &f).map_err(|e| e.to_string())?.memoized(),
        induced_rank_oracle(&spread(4, 2)?).memoized(),
    ];
    oracles
        .into_iter()
        .map(|m| {
            let flats = flats_from_rank(&m, &limits).and_then(|fam| fam.validate(&limits)).map_err(|e| e.to_string())?;
            Ok((m.name().to_string(), m, flats))
        })
        .collect()
}

fn cryptomorphism() -> Outcome {
    let limits = Limits::default();
    let mut checked = 0;
    for (name, m, flats) in roundtrip_cases()? {
        let total = all_subspaces(m.field(), m.ambient_dim(), &limits).map_err(|e| e.to_string())?.len() as u64;
        let r = cryptomorphism_roundtrip(&m, &limits).map_err(|e| e.to_string())?;
        ensure!(r.passed(), "{name}: {:?}", r.mismatch);
        ensure!(r.checked >= total, "{name}: {} of {total} subspaces checked", r.checked);
        let back = roundtrip_family(&flats, &limits).map_err(|e| e.to_string())?;
        ensure!(back.passed(), "{name}: family round trip {:?}", back.mismatch);
        checked += r.checked + back.checked;
    }
    Ok(format!("4 matroids, {checked} comparisons"))
}

fn lattice_properties() -> Outcome {
    for (name, _, flats) in roundtrip_cases()? {
        ensure!(flats.check_semimodular(), "{name}: {:?}", flats.semimodular_violation());
        ensure!(flats.check_jordan_dedekind(), "{name}: {:?}", flats.jordan_dedekind_violation());
    }
    Ok("4 flat lattices".into())
}

fn intersection_numbers() -> Outcome {
    let s = spread(4, 2)?;
    let mut seen = Vec::new();
    for (i, j) in [(0, 0), (1, 0), (0, 1)] {
        let counts =
            exhaustive_intersection_counts(s.design(), i, j, &Limits::default()).map_err(|e| e.to_string())?;
        let want = intersection_number(s.params(), i as u64, j as u64).map_err(|e| e.to_string())?;
        ensure!(counts.len() == 1, "λ_{{{i},{j}}} not constant: {counts:?}");
        let got = *counts.iter().next().unwrap();
        ensure!(int(got) == want, "λ_{{{i},{j}}}: counted {got}, formula {want}");
        seen.push(format!("λ_{{{i},{j}}}={got}"));
    }
    Ok(seen.join(" "))
}

fn automorphism_transfer() -> Outcome {
    let limits = Limits::default();
    let s = spread(4, 2)?;
    let rep = check_aut_transfer(&s, &limits).map_err(|e| e.to_string())?;
    for (what, o) in [
        ("independent", &rep.independent_t1),
        ("circuit_t1", &rep.circuit_t1),
        ("supplementary", &rep.supplementary),
    ] {
        ensure!(*o == TransferOutcome::Equal, "{what}: {:?}", o);
    }
    let sup = supplementary_design(s.design(), &limits).map_err(|e| e.to_string())?;
    let g = automorphism_group(&sup, &limits).map_err(|e| e.to_string())?;
    ensure!(g.matrix_set() == rep.group.matrix_set(), "Aut of the supplementary spread design differs");
    Ok(format!("|Aut| = {} over GL(4,2)", rep.group.order()))
}

fn circuit_count_identity() -> Outcome {
    let s = spread(6, 3)?;
    let rep = check_circuit_count_identity(&s, &Limits::default()).map_err(|e| e.to_string())?;
    ensure!(rep.passed(), "{:?}", rep.failure);
    ensure!(rep.t_spaces == 63, "{} t-spaces", rep.t_spaces);
    Ok(format!("{} t-spaces, N(A) ∈ {:?}, λ(A) ∈ {:?}", rep.t_spaces, rep.n_values, rep.lambda_values))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("parameter tables", Duration::from_secs(1), tables_reproduced),
        ("independent-space design examples", Duration::from_secs(1), independent_examples),
        ("admissibility", Duration::from_secs(10), admissibility),
        ("end-to-end on spreads", Duration::from_secs(300), steiner_end_to_end),
        ("flats/rank round trip", Duration::from_secs(30), cryptomorphism),
        ("semimodularity and Jordan-Dedekind", Duration::from_secs(30), lattice_properties),
        ("intersection numbers", Duration::from_secs(10), intersection_numbers),
        ("automorphism transfer", Duration::from_secs(120), automorphism_transfer),
        ("circuit pair count", Duration::from_secs(60), circuit_count_identity),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let elapsed = start.elapsed();
        let verdict = match result {
            Ok(_) if elapsed > *budget => Err(format!("took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match verdict {
            Ok(detail) => println!("PASS  {}. {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}. {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
