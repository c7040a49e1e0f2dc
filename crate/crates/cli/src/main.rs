//! `cyclic-hom`: Hochschild, cyclic and periodic cyclic homology of small
//! algebras, Tate homology, the cube construction and Witt-vector checks.
//!
//! Exit status: 0 success, 1 a verdict failed, 2 bad input, 3 size budget
//! exceeded.

mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use cyclic_hom::algebra::{w2_lift_obstruction, Algebra};
use cyclic_hom::cartier::{cartier_check, qf_group_algebra};
use cyclic_hom::cube::{
    build_cube_with_budget, cube_size, k_flat_is_w2, symmetric_cocycle_dim, witt_ring, FiniteVS,
};
use cyclic_hom::cyclic::{a_sharp, connes_check, hodge_from, CyclicHomology, HpWindow};
use cyclic_hom::tate::{is_free, tate_dims, verify_votimesp};
use cyclic_hom::{Error, FieldSpec};

use input::{Input, ParseError};
use report::{Format, Report};

#[derive(Parser, Debug)]
#[command(name = "cyclic-hom", version, about = "Exact cyclic homology and characteristic-p checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Highest degree to report.
    #[arg(long, global = true, default_value_t = 6)]
    max_degree: usize,
    /// Prime for the tate, votimesp, cube, cocycles and witt paths.
    #[arg(short = 'p', long, global = true)]
    prime: Option<u32>,
    /// Dimension of V for votimesp, cube and cocycles.
    #[arg(long, global = true, default_value_t = 1)]
    dim: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Refuse computations whose largest chain group exceeds this many cells.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget: u64,
}

#[derive(Args, Debug)]
struct InputFile {
    /// Input file with [field] and [algebra] (or [module]) sections.
    input: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hochschild homology dimensions.
    Hh(InputFile),
    /// Cyclic homology dimensions.
    Hc(InputFile),
    /// Periodic cyclic homology read off the u-tower.
    Hp(InputFile),
    /// Degeneration of the Hodge spectral sequence by dimension count.
    Hodge(InputFile),
    /// Connes' exact sequence, degree by degree.
    Connes(InputFile),
    /// Tate homology of a Z/p-module given by σ.
    Tate(InputFile),
    /// Tate homology of V^{⊗p} against V.
    Votimesp,
    /// Homology of the coinvariant cube complex of GF(p)^dim.
    Cube,
    /// Symmetric 2-cocycles against the degree-1 term of V^♭.
    Cocycles,
    /// Second Witt vectors and the ring k^♭₀₁.
    Witt,
    /// Inverse Cartier comparison for a group algebra.
    Cartier(InputFile),
    /// Obstruction to lifting the algebra to W₂.
    W2lift(InputFile),
}

enum Failure {
    Input(String),
    Budget { needed: u64, budget: u64 },
    Computation(Error),
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Input(format!("parse error: {e}"))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SizeBudgetExceeded { needed, budget } => Failure::Budget { needed, budget },
            Error::Invalid(_)
            | Error::InvalidPrime(_)
            | Error::NotPrimeField
            | Error::FieldMismatch
            | Error::ShapeMismatch(_)
            | Error::DegreeOutOfRange(_)
            | Error::TruncationTooShallow { .. } => Failure::Input(e.to_string()),
            other => Failure::Computation(other),
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_algebra(path: &PathBuf) -> Result<Algebra, Failure> {
    let text = read_input(path)?;
    Ok(Input::parse(&text)?.algebra()?)
}

fn require_prime(cli: &Cli) -> Result<u32, Failure> {
    let p = cli.prime.ok_or_else(|| Failure::Input("this subcommand needs --prime".into()))?;
    FieldSpec::prime(p)?;
    Ok(p)
}

fn check_budget(needed: u64, budget: u64) -> Result<(), Failure> {
    if needed > budget {
        Err(Failure::Budget { needed, budget })
    } else {
        Ok(())
    }
}

/// `A^{⊗(D+2)}`, the deepest level of the cyclic bicomplex.
fn cyclic_homology(a: Algebra, cli: &Cli) -> Result<CyclicHomology, Failure> {
    let d = cli.max_degree;
    let needed = (a.dim() as u64).checked_pow(d as u32 + 2).unwrap_or(u64::MAX);
    check_budget(needed, cli.budget)?;
    let e = a_sharp(Arc::new(a), d + 2);
    Ok(CyclicHomology::compute(&e, d)?)
}

fn describe(a: &Algebra) -> String {
    format!("algebra of dimension {} over {}", a.dim(), a.field())
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let mut r = Report::new();
    let d = cli.max_degree;
    match &cli.command {
        Command::Hh(f) => {
            let a = load_algebra(&f.input)?;
            r.note(describe(&a));
            let h = cyclic_homology(a, cli)?;
            r.values("HH", &h.hh_dims(), Some(h.trusted));
        }
        Command::Hc(f) => {
            let a = load_algebra(&f.input)?;
            r.note(describe(&a));
            let h = cyclic_homology(a, cli)?;
            r.values("HC", &h.hc_dims(), Some(h.trusted));
        }
        Command::Hp(f) => {
            let a = load_algebra(&f.input)?;
            r.note(describe(&a));
            let h = cyclic_homology(a, cli)?;
            let w = HpWindow::from_data(d, h.hc_dims(), h.u_ranks()?);
            r.values("HC", &w.hc, Some(d));
            for (i, u) in w.u_ranks.iter().enumerate() {
                if let Some(u) = u {
                    r.value("URANK", i as i64, *u, Some(d));
                }
            }
            for parity in 0..2 {
                match w.stable[parity] {
                    Some((start, dim)) => {
                        r.note(format!("parity {parity} stable from degree {start}"));
                        r.value("HP", parity as i64, dim, Some(d));
                    }
                    None => r.note(format!("parity {parity} not stable through degree {d}")),
                }
            }
            let stable = w.stable.iter().all(Option::is_some);
            r.verdict("hp-stable", if stable { "yes" } else { "no" }, stable);
        }
        Command::Hodge(f) => {
            let a = load_algebra(&f.input)?;
            r.note(describe(&a));
            let h = cyclic_homology(a, cli)?;
            let report = hodge_from(h.hh_dims(), h.hc_dims(), d);
            r.values("HH", &report.hh, Some(d));
            r.values("HC", &report.hc, Some(d));
            r.values("E1", &report.e1, Some(d));
            if report.degenerate() {
                r.verdict("degenerate", d, true);
            } else {
                let first = report.degenerate_up_to.map_or(0, |k| k + 1);
                r.verdict("not-degenerate", first, false);
            }
        }
        Command::Connes(f) => {
            let a = load_algebra(&f.input)?;
            r.note(describe(&a));
            let needed = (a.dim() as u64).checked_pow(d as u32 + 2).unwrap_or(u64::MAX);
            check_budget(needed, cli.budget)?;
            let rows = connes_check(&a_sharp(Arc::new(a), d + 2), d)?;
            for row in &rows {
                let i = row.degree as i64;
                r.value("HH", i, row.hh, Some(d));
                r.value("HC", i, row.hc, Some(d));
                r.value("IOTA", i, row.iota_rank, Some(d));
                r.value("URANK", i, row.u_rank, Some(d));
            }
            match rows.iter().find(|row| !(row.exact && row.composite_zero)) {
                None => r.verdict("connes", "exact", true),
                Some(row) => r.verdict("connes-fails", row.degree, false),
            }
        }
        Command::Tate(f) => {
            let text = read_input(&f.input)?;
            let m = Input::parse(&text)?.module()?;
            r.note(format!("Z/{}-module of dimension {}", m.order(), m.dim()));
            let degrees: Vec<i64> = (-(d as i64)..=d as i64).collect();
            for (i, v) in degrees.iter().zip(tate_dims(&m, &degrees)) {
                r.value("TATE", *i, v, None);
            }
            r.verdict("free", if is_free(&m) { "yes" } else { "no" }, true);
        }
        Command::Votimesp => {
            let p = require_prime(cli)?;
            let field = FieldSpec::prime(p)?;
            check_budget((cli.dim as u64).checked_pow(p).unwrap_or(u64::MAX), cli.budget)?;
            let degrees: Vec<i64> = (-(d as i64)..=d as i64).collect();
            let rep = verify_votimesp(field, cli.dim, p as usize, &degrees)?;
            r.note(format!("V = GF({p})^{}, Z/{p} permuting the factors of V^⊗{p}", cli.dim));
            for (i, v) in &rep.tate {
                r.value("TATE", *i, *v, None);
            }
            let ok = rep.passes();
            r.verdict("votimesp", if ok { "pass" } else { "fail" }, ok);
        }
        Command::Cube => {
            let p = require_prime(cli)?;
            let space = FiniteVS::new(p, cli.dim)?;
            r.note(format!(
                "V = GF({p})^{}; top cube has {} labellings",
                cli.dim,
                cube_size(&space, d).map_or("too many".to_string(), |s| s.to_string())
            ));
            let cube = build_cube_with_budget(&space, d, cli.budget)?;
            for n in 0..=d {
                r.value("QPRIME", n as i64, cube.prime_dim(n) as usize, None);
                r.value("QBAR", n as i64, cube.coinvariant_dim(n), None);
            }
            let h = cube.homology_dims();
            let trusted = d.checked_sub(1);
            r.values("H", &h, trusted);
            let vanishing = 2 * p as usize - 2;
            let ok = h.iter().enumerate().all(|(i, v)| match i {
                0 | 1 => *v == cli.dim,
                i if i < vanishing => *v == 0,
                _ => true,
            });
            r.verdict("low-homology", if ok { "holds" } else { "fails" }, ok);
        }
        Command::Cocycles => {
            let p = require_prime(cli)?;
            let space = FiniteVS::new(p, cli.dim)?;
            match symmetric_cocycle_dim(&space) {
                Ok(c) => {
                    r.value("COCYCLES", 1, c.dim(), None);
                    r.value("FLAT", 1, c.flat_dim, None);
                    let six = c.six_term_holds();
                    r.verdict("cocycles", "match", true);
                    r.verdict("six-term", if six { "holds" } else { "fails" }, six);
                }
                Err(Error::Mismatch(msg)) => {
                    r.note(msg);
                    r.verdict("cocycles", "mismatch", false);
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Witt => {
            let p = require_prime(cli)?;
            let w = witt_ring(p)?;
            let failures = w.to_finite_ring().axiom_failures();
            r.verdict("witt-ring", if failures.is_empty() { "ok" } else { "fails" }, failures.is_empty());
            match k_flat_is_w2(p) {
                Ok(cert) => {
                    for (x, w) in &cert.map {
                        r.note(format!("({}, {}) ↦ ({}, {})", x.0, x.1, w.a0, w.a1));
                    }
                    r.value("CANDIDATES", 0, cert.candidates_tried, None);
                    r.verdict("w2-iso", "found", true);
                }
                Err(Error::NoIsomorphismFound(msg)) => {
                    r.note(msg);
                    r.verdict("w2-iso", "none", false);
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Cartier(f) => {
            let a = load_algebra(&f.input)?;
            r.note(describe(&a));
            let p = a.field().characteristic() as u32;
            // the p-fold tensor power at the deepest level of the p-subdivision
            let needed = (a.dim() as u64).checked_pow(p.saturating_mul(d as u32 + 3)).unwrap_or(u64::MAX);
            check_budget(needed, cli.budget)?;
            let q = qf_group_algebra(Arc::new(a))?;
            let rep = cartier_check(&q, d, d + 1)?;
            for (level, dim, free) in &rep.levelwise_free {
                r.value("COKER", *level as i64, *dim, None);
                r.value("FREE", *level as i64, usize::from(*free), None);
            }
            r.values("HC-SOURCE", &rep.source_window.hc, Some(rep.trusted));
            r.values("HC-TARGET", &rep.target_window.hc, Some(rep.trusted));
            for c in &rep.comparison {
                r.value("RANK", c.degree as i64, c.rank, Some(rep.trusted));
            }
            r.note(format!("working basis: {:?}; shuffle: {:?}", rep.basis, rep.shuffle));
            let ok = rep.passes();
            r.verdict("levelwise-free", rep.all_free(), rep.all_free());
            r.verdict("iso-on-window", rep.iso_on_window(), rep.iso_on_window());
            r.verdict("consistent", rep.consistent(), rep.consistent());
            r.verdict("cartier", if ok { "pass" } else { "fail" }, ok);
        }
        Command::W2lift(f) => {
            let a = load_algebra(&f.input)?;
            r.note(describe(&a));
            check_budget((a.dim() as u64).pow(4), cli.budget)?;
            let rep = w2_lift_obstruction(&a)?;
            let ok = rep.vanishes && rep.corrected_lift_associative;
            r.verdict("w2-obstruction", if rep.vanishes { "vanishes" } else { "nonzero" }, rep.vanishes);
            r.verdict("lift-associative", rep.corrected_lift_associative, ok);
        }
    }
    Ok(r)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            ExitCode::from(if report.failed() { 1 } else { 0 })
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget { needed, budget }) => {
            eprintln!("error: size budget exceeded: {needed} cells needed, budget {budget}");
            ExitCode::from(3)
        }
        Err(Failure::Computation(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
