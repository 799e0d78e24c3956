use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use qmatroid::derive::{self, DerivedKind, TransferOutcome};
use qmatroid::design::{self, Design, SteinerSystem, VerifyStrategy};
use qmatroid::flats::{self, FlatFamily};
use qmatroid::qcount::{self, DesignParams};
use qmatroid::qmatroid::{self as qm, PairSampling, RankOracle};
use qmatroid::{io, tables, Error, FieldSpec, Limits, Subspace};

use crate::report::{pass_fail, yes_no, Report};
use crate::{Cli, Command, DesignArgs, MatroidArgs, OptDesignArgs, Strategy};

pub enum CliError {
    Usage(String),
    Lib(Error),
}

impl CliError {
    /// 1 when the input was well formed but failed a check, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(Error::Verification(_) | Error::NotAMatroid(_) | Error::FlatAxioms(_)) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

pub fn run(cli: &Cli) -> CliResult<ExitCode> {
    configure_jobs(&cli.jobs)?;
    let ctx = Ctx {
        machine: cli.machine,
        limits: Limits { max_subspaces: cli.max_subspaces, max_group_order: cli.max_group_order },
    };
    match &cli.command {
        Command::Qbinom { big_n, m, q } => ctx.qbinom(*big_n, *m, *q),
        Command::Params(a) => ctx.params(a),
        Command::Admissible { design, sts } => ctx.admissible(design, *sts),
        Command::Spread { n, k, q, output } => ctx.spread(*n, *k, *q, output.as_deref()),
        Command::Verify { input, strategy } => ctx.verify(input.as_deref(), *strategy),
        Command::Derive { kind, input, output } => ctx.derive(kind, input.as_deref(), output.as_deref()),
        Command::Flats { input, matroid } => match &matroid.matroid {
            Some(spec) => ctx.write_flats(&MatroidArgs { matroid: spec.clone(), n: matroid.n, q: matroid.q }),
            None => ctx.check_flats(input.as_deref()),
        },
        Command::Rank { matroid, subspace } => ctx.rank(matroid, subspace),
        Command::Axioms { matroid, sampled, pair_dim, pairs, seed, roundtrip } => {
            let sampling =
                sampled.then_some(PairSampling { max_pair_dim: *pair_dim, random_pairs: *pairs, seed: *seed });
            ctx.axioms(matroid, sampling, *roundtrip)
        }
        Command::Aut { input, transfer } => ctx.aut(input.as_deref(), *transfer),
        Command::Tables => ctx.tables(),
    }
}

fn configure_jobs(jobs: &str) -> CliResult<()> {
    let n = match jobs {
        "auto" => return Ok(()),
        s => s.parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| usage(format!("--jobs {s:?}: expected a positive integer or auto")))?,
    };
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| usage(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

/// Reads a file, or stdin for `None` and `-`.
fn read_input(path: Option<&Path>) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    match path {
        Some(p) if p != Path::new("-") => {
            buf = fs::read(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        }
        _ => {
            std::io::stdin().read_to_end(&mut buf).map_err(|e| usage(format!("stdin: {e}")))?;
        }
    }
    Ok(buf)
}

fn read_text(path: Option<&Path>) -> CliResult<(String, String)> {
    let bytes = read_input(path)?;
    let hash = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    let text = String::from_utf8(bytes).map_err(|_| usage("input is not UTF-8"))?;
    Ok((text, hash))
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        _ => std::io::stdout().write_all(text.as_bytes()).map_err(|e| usage(format!("stdout: {e}"))),
    }
}

fn writes_to_stdout(path: Option<&Path>) -> bool {
    path.is_none_or(|p| p == Path::new("-"))
}

fn subspace_text(s: &Subspace) -> String {
    if s.is_zero() {
        "-".into()
    } else {
        s.to_string()
    }
}

fn parse_lambda(s: &str) -> CliResult<BigUint> {
    s.parse().map_err(|_| usage(format!("--lambda {s:?}: expected a nonnegative integer")))
}

fn field_of(q: u64) -> CliResult<FieldSpec> {
    Ok(FieldSpec::of_order(q)?)
}

struct Ctx {
    machine: bool,
    limits: Limits,
}

impl Ctx {
    fn report(&self) -> Report {
        Report::new(self.machine)
    }

    fn emit(&self, r: &Report) {
        print!("{}", r.render());
    }

    fn qbinom(&self, big_n: u64, m: u64, q: u64) -> CliResult<ExitCode> {
        if qmatroid::field::prime_power(q).is_none() {
            return Err(Error::NotPrimePower(q).into());
        }
        let mut r = self.report();
        r.put(format!("[{big_n},{m}]_{q}"), qcount::gaussian_binomial(big_n, m, q));
        self.emit(&r);
        Ok(ExitCode::SUCCESS)
    }

    fn params(&self, a: &DesignArgs) -> CliResult<ExitCode> {
        let p = DesignParams::new(a.t, a.n, a.k, parse_lambda(&a.lambda)?, a.q)?;
        let mut r = self.report();
        r.put("params", &p);
        r.put("blocks", p.block_count().map_or("non-integral".to_string(), |b| b.to_string()));
        let adm = qcount::is_admissible(&p)?;
        r.put("admissible", yes_no(adm.admissible));
        for (i, l) in adm.lambdas.iter().enumerate() {
            r.put(format!("lambda_{i}"), l);
        }
        match qcount::supplementary_params(&p) {
            Ok(s) => r.put("supplementary", s),
            Err(e) => r.put("supplementary", format!("none ({e})")),
        }
        match qcount::dual_params(&p) {
            Ok(d) => r.put("dual", d),
            Err(e) => r.put("dual", format!("none ({e})")),
        }
        if p.lambda == BigUint::from(1u32) {
            for kind in DerivedKind::ALL {
                let d = kind.block_dim(p.t as usize) as u64;
                let entry = kind.lambda(&p).and_then(|l| {
                    let b = derive::block_count(&l, p.n, p.t, d, p.q)?;
                    Ok(format!("{}-({},{},{};{}) blocks={b}", p.t, p.n, d, l, p.q))
                });
                match entry {
                    Ok(s) => r.put(format!("derived.{kind}"), s),
                    Err(e) => r.put(format!("derived.{kind}"), format!("none ({e})")),
                }
            }
        }
        self.emit(&r);
        Ok(ExitCode::SUCCESS)
    }

    fn admissible(&self, a: &OptDesignArgs, sts: Option<u64>) -> CliResult<ExitCode> {
        let mut r = self.report();
        if let Some(n) = sts {
            let ok = qcount::sts_admissible(n);
            r.put("sts", format!("STS({n};q)"));
            r.put("admissible", yes_no(ok));
            let mut verdict = ok;
            if let Some(q) = a.q {
                let c = qcount::corollary_sts_params(n, q)?;
                r.put("implied_admissible", yes_no(c.admissible));
                for (i, p) in c.sets.iter().enumerate() {
                    r.put(format!("implied.{}", i + 1), p);
                }
                verdict &= c.admissible;
            }
            self.emit(&r);
            return Ok(status(verdict));
        }
        let need = |v: Option<u64>, name: &str| v.ok_or_else(|| usage(format!("--{name} is required without --sts")));
        let lambda = parse_lambda(a.lambda.as_deref().unwrap_or("1"))?;
        let p = DesignParams::new(need(a.t, "t")?, need(a.n, "n")?, need(a.k, "k")?, lambda, need(a.q, "q")?)?;
        let adm = qcount::is_admissible(&p)?;
        r.put("params", &p);
        r.put("admissible", yes_no(adm.admissible));
        if let Some(i) = adm.first_failure {
            r.put("first_failure", format!("lambda_{i} = {}", adm.lambdas[i as usize]));
        }
        self.emit(&r);
        Ok(status(adm.admissible))
    }

    fn spread(&self, n: usize, k: usize, q: u64, output: Option<&Path>) -> CliResult<ExitCode> {
        let s = design::desarguesian_spread(n, k, &field_of(q)?, &self.limits)?;
        write_output(output, &io::write_design(s.design(), &[]))?;
        if !writes_to_stdout(output) {
            let mut r = self.report();
            r.put("params", s.params());
            r.put("blocks", s.len());
            self.emit(&r);
        }
        Ok(ExitCode::SUCCESS)
    }

    fn verify(&self, input: Option<&Path>, strategy: Strategy) -> CliResult<ExitCode> {
        let (text, _) = read_text(input)?;
        let d = io::read_design(&text)?.design;
        let start = Instant::now();
        let rep = match strategy {
            Strategy::Auto => design::verify_design(&d, &self.limits)?,
            Strategy::Superspaces => design::verify_design_with(&d, VerifyStrategy::Superspaces, &self.limits)?,
            Strategy::BlockScan => design::verify_design_with(&d, VerifyStrategy::BlockScan, &self.limits)?,
        };
        let mut r = self.report();
        r.put("params", d.params());
        r.put("blocks", d.len());
        r.put("strategy", format!("{:?}", rep.strategy).to_lowercase());
        r.put("t_subspaces", rep.t_subspaces);
        r.put("verified", pass_fail(rep.passed()));
        if let Some((t, c)) = &rep.failure {
            r.put("failing_t_space", subspace_text(t));
            r.put("failing_count", c);
        }
        self.emit(&r);
        eprintln!("elapsed_ms={}", start.elapsed().as_millis());
        Ok(status(rep.passed()))
    }

    fn steiner(&self, text: &str) -> CliResult<SteinerSystem> {
        let d = io::read_design(text)?.design;
        Ok(SteinerSystem::new(d, &self.limits)?)
    }

    fn derive(&self, kind: &str, input: Option<&Path>, output: Option<&Path>) -> CliResult<ExitCode> {
        let kind: DerivedKind = kind.parse()?;
        let (text, hash) = read_text(input)?;
        let start = Instant::now();
        let s = self.steiner(&text)?;
        let d = derive::derive_design(&s, kind, &self.limits)?;
        let rep = design::verify_design(&d, &self.limits)?;
        let out = io::write_design(&d, &[io::derived_comment(kind, &hash)]);
        let mut r = self.report();
        r.put("source", s.params());
        r.put("kind", kind);
        r.put("params", d.params());
        r.put("lambda", &d.params().lambda);
        r.put("blocks", d.len());
        r.put("verified", pass_fail(rep.passed()));
        if let Some((t, c)) = &rep.failure {
            r.put("failing_t_space", subspace_text(t));
            r.put("failing_count", c);
        }
        write_output(output, &out)?;
        if writes_to_stdout(output) {
            eprint!("{}", r.render());
        } else {
            self.emit(&r);
        }
        eprintln!("elapsed_ms={}", start.elapsed().as_millis());
        Ok(status(rep.passed()))
    }

    fn matroid(&self, a: &MatroidArgs) -> CliResult<RankOracle> {
        let (kind, arg) = a.matroid.split_once(':').unwrap_or((a.matroid.as_str(), ""));
        let ambient = || -> CliResult<(FieldSpec, usize)> {
            let q = a.q.ok_or_else(|| usage(format!("--q is required for {kind}")))?;
            let n = a.n.ok_or_else(|| usage(format!("--n is required for {kind}")))?;
            Ok((field_of(q)?, n))
        };
        match kind {
            "uniform" => {
                let k = arg.parse().map_err(|_| usage(format!("uniform:{arg}: expected uniform:<k>")))?;
                let (f, n) = ambient()?;
                Ok(RankOracle::uniform(&f, n, k)?)
            }
            "free" => {
                let (f, n) = ambient()?;
                Ok(RankOracle::free(&f, n))
            }
            "representable" => {
                let (text, _) = read_text(Some(Path::new(arg)))?;
                let g = io::read_matrix(&text)?;
                let base = field_of(a.q.unwrap_or(g.field().p() as u64))?;
                Ok(RankOracle::representable(&g, &base)?.memoized())
            }
            "steiner" => {
                let (text, _) = read_text(Some(Path::new(arg)))?;
                Ok(design::induced_rank_oracle(&self.steiner(&text)?).memoized())
            }
            _ => Err(usage(format!(
                "--matroid {:?}: expected uniform:<k>, free, representable:<file> or steiner:<file>",
                a.matroid
            ))),
        }
    }

    fn check_flats(&self, input: Option<&Path>) -> CliResult<ExitCode> {
        let (text, _) = read_text(input)?;
        let fam = io::read_flats(&text)?;
        self.report_family(&fam)
    }

    fn report_family(&self, fam: &FlatFamily) -> CliResult<ExitCode> {
        let ax = flats::check_flat_axioms(fam, &self.limits)?;
        let mut r = self.report();
        r.put("members", ax.members);
        r.put("flat_axioms", pass_fail(ax.passed()));
        let mut ok = ax.passed();
        if let Some(v) = &ax.violation {
            r.put("violation", format!("{:?}: {}", v.axiom, v.detail));
            r.put("witnesses", v.witnesses.iter().map(subspace_text).collect::<Vec<_>>().join(" | "));
        } else {
            let f = fam.validate(&self.limits)?;
            let semi = f.check_semimodular();
            let jd = f.check_jordan_dedekind();
            r.put("semimodular", pass_fail(semi));
            r.put("jordan_dedekind", pass_fail(jd));
            r.put("rank", f.rank(&Subspace::full(f.field(), f.ambient_dim())));
            let rt = flats::roundtrip_family(&f, &self.limits)?;
            r.put("roundtrip", pass_fail(rt.passed()));
            ok = semi && jd && rt.passed();
        }
        self.emit(&r);
        Ok(status(ok))
    }

    fn write_flats(&self, a: &MatroidArgs) -> CliResult<ExitCode> {
        let m = self.matroid(a)?;
        let fam = flats::flats_from_rank(&m, &self.limits)?;
        let members = fam.members(&self.limits)?;
        write_output(None, &io::write_flats(m.field(), m.ambient_dim(), &members))?;
        Ok(ExitCode::SUCCESS)
    }

    fn rank(&self, a: &MatroidArgs, subspace: &str) -> CliResult<ExitCode> {
        let m = self.matroid(a)?;
        let s = Subspace::parse(m.field(), m.ambient_dim(), subspace)?;
        let mut r = self.report();
        r.put("matroid", m.name());
        r.put("subspace", subspace_text(&s));
        r.put("dim", s.dim());
        r.put("rank", m.try_rank(&s)?);
        r.put("independent", yes_no(qm::is_independent(&m, &s)));
        r.put("circuit", yes_no(qm::is_circuit(&m, &s)));
        r.put("flat", yes_no(qm::is_flat(&m, &s)));
        r.put("closure", subspace_text(&qm::closure(&m, &s)?));
        self.emit(&r);
        Ok(ExitCode::SUCCESS)
    }

    fn axioms(&self, a: &MatroidArgs, sampling: Option<PairSampling>, roundtrip: bool) -> CliResult<ExitCode> {
        let m = self.matroid(a)?;
        let rep = match &sampling {
            Some(s) => qm::check_rank_axioms_sampled(&m, s, &self.limits)?,
            None => qm::check_rank_axioms(&m, &self.limits)?,
        };
        let mut r = self.report();
        r.put("matroid", m.name());
        r.put("mode", if sampling.is_some() { "sampled" } else { "exhaustive" });
        r.put("subspaces", rep.subspaces);
        r.put("pairs", rep.pairs);
        r.put("rank_axioms", pass_fail(rep.passed()));
        let mut ok = rep.passed();
        if let Some(v) = &rep.violation {
            r.put("violation", format!("{:?}: {}", v.axiom, v.detail));
            r.put("a", subspace_text(&v.a));
            if let Some(b) = &v.b {
                r.put("b", subspace_text(b));
            }
        } else {
            let pmd = design::is_qpmd(&m, &self.limits)?;
            let dims: Vec<String> = pmd
                .dims_by_rank
                .iter()
                .map(|(rk, ds)| format!("{rk}:{}", ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")))
                .collect();
            r.put("qpmd", yes_no(pmd.passed()));
            r.put("flat_dims_by_rank", dims.join(" "));
            if roundtrip {
                let rt = flats::cryptomorphism_roundtrip(&m, &self.limits)?;
                r.put("roundtrip", pass_fail(rt.passed()));
                r.put("roundtrip_checked", rt.checked);
                if let Some(msg) = &rt.mismatch {
                    r.put("roundtrip_mismatch", msg);
                }
                ok &= rt.passed();
            }
        }
        self.emit(&r);
        Ok(status(ok))
    }

    fn aut(&self, input: Option<&Path>, transfer: bool) -> CliResult<ExitCode> {
        let (text, _) = read_text(input)?;
        let mut r = self.report();
        if transfer {
            let s = self.steiner(&text)?;
            let rep = derive::check_aut_transfer(&s, &self.limits)?;
            r.put("params", s.params());
            r.put("order", rep.group.order());
            let outcomes = [
                ("independent_t1", &rep.independent_t1),
                ("circuit_t1", &rep.circuit_t1),
                ("circuit_t2", &rep.circuit_t2),
                ("supplementary", &rep.supplementary),
            ];
            for (name, o) in outcomes {
                r.put(format!("transfer.{name}"), o.label());
                if let TransferOutcome::Differ(m) = o {
                    r.put(format!("transfer.{name}.witness"), format!("{:?}", m.to_rows()));
                }
            }
            r.put("verified", pass_fail(rep.passed()));
            self.emit(&r);
            return Ok(status(rep.passed()));
        }
        let d: Design = io::read_design(&text)?.design;
        let g = derive::automorphism_group(&d, &self.limits)?;
        r.put("params", d.params());
        r.put("order", g.order());
        if let Some(gl) = derive::gl_order(d.n(), d.field().q() as u64) {
            r.put("gl_order", gl);
        }
        self.emit(&r);
        Ok(ExitCode::SUCCESS)
    }

    fn tables(&self) -> CliResult<ExitCode> {
        let text = if self.machine { tables::render_machine()? } else { tables::render()? };
        print!("{text}");
        Ok(ExitCode::SUCCESS)
    }
}
