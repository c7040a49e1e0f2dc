//! Acceptance suite: one PASS/FAIL line per criterion, all comparisons exact.
//!
//! Run with `cargo test -p cyclic-hom-cli --test acceptance -- --nocapture`.

use std::collections::HashMap;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use cyclic_hom::algebra::{self, hochschild_complex, w2_lift_obstruction, Algebra, Bimodule};
use cyclic_hom::cartier::{cartier_check, qf_group_algebra};
use cyclic_hom::complexes::{Bicomplex, ChainComplex};
use cyclic_hom::cube::{
    build_cube, k_flat_is_w2, symmetric_cocycle_dim, witt_ring, CubeComplex, FiniteVS, FlatComplex, WittPair,
};
use cyclic_hom::cyclic::{self, a_sharp, connes_check, hodge_report, pullback, Along, CyclicHomology, LambdaMor};
use cyclic_hom::simplicial::check_identities;
use cyclic_hom::tate::verify_votimesp;
use cyclic_hom::FieldSpec;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

type Outcome = Result<(), String>;

struct Suite {
    failures: Vec<usize>,
}

impl Suite {
    fn run(&mut self, n: usize, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let mut outcome = f();
        let elapsed = start.elapsed();
        if let (Ok(()), Some(limit)) = (&outcome, limit) {
            if elapsed > limit {
                outcome = Err(format!("took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(()) => println!("criterion {n:>2}: PASS  {title} ({elapsed:.2?})"),
            Err(why) => {
                println!("criterion {n:>2}: FAIL  {title} ({elapsed:.2?}): {why}");
                self.failures.push(n);
            }
        }
    }
}

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn err(e: impl std::fmt::Debug) -> String {
    format!("{e:?}")
}

fn gf(p: u32) -> FieldSpec {
    FieldSpec::prime(p).unwrap()
}

fn vs(p: u32, d: usize) -> FiniteVS {
    FiniteVS::new(p, d).unwrap()
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclic-hom"))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = binary().args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn input_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    std::io::Write::write_all(&mut f, text.as_bytes()).unwrap();
    f
}

/// Every `d_{n-1} d_n` of the complex, multiplied out.
fn square_zero(c: &ChainComplex) -> Outcome {
    for n in c.lo() + 2..=c.hi() {
        let dd = c.differential(n - 1).mul(&c.differential(n)).map_err(err)?;
        ensure(dd.is_zero(), || format!("d∘d ≠ 0 out of degree {n}"))?;
    }
    Ok(())
}

/// Vertical and horizontal composites vanish and squares commute, cell by cell.
fn bicomplex_square_zero(b: &Bicomplex, top: usize) -> Outcome {
    for q in 0..=top {
        for n in 0..=top - q {
            if let (Some(v), Some(v2)) = (b.vertical(q, n), n.checked_sub(1).and_then(|m| b.vertical(q, m))) {
                ensure(v2.mul(v).map_err(err)?.is_zero(), || format!("vertical² ≠ 0 at ({q},{n})"))?;
            }
            if let (Some(h), Some(h2)) = (b.horizontal(q, n), q.checked_sub(1).and_then(|m| b.horizontal(m, n))) {
                ensure(h2.mul(h).map_err(err)?.is_zero(), || format!("horizontal² ≠ 0 at ({q},{n})"))?;
            }
            if let (Some(v), Some(h)) = (b.vertical(q, n), b.horizontal(q, n)) {
                let hv = b.horizontal(q, n - 1).expect("cell below").mul(v).map_err(err)?;
                let vh = b.vertical(q - 1, n).expect("cell left").mul(h).map_err(err)?;
                ensure(hv == vh, || format!("square at ({q},{n}) does not commute"))?;
            }
        }
    }
    Ok(())
}

/// Full structural audit of a computed cyclic homology: both complexes and the bicomplex.
fn audit_homology(h: &CyclicHomology) -> Outcome {
    square_zero(&h.hochschild)?;
    square_zero(&h.total)?;
    let b = &h.bicomplex().bicomplex;
    bicomplex_square_zero(b, b.max_total())
}

fn audit_cube(c: &CubeComplex) -> Outcome {
    square_zero(c.quotient_complex())?;
    square_zero(c.complex())
}

#[test]
fn acceptance() {
    let mut suite = Suite { failures: Vec::new() };
    let mut audits: Vec<(String, Outcome)> = Vec::new();
    let z2_gf3 = Arc::new(Algebra::cyclic_group(gf(3), 2).unwrap());

    let ground = "[field]\nprime 5\n[algebra]\nkind ground\n";
    suite.run(1, "ground-field cyclic homology", Some(Duration::from_secs(1)), || {
        let file = input_file(ground);
        let path = file.path().to_str().unwrap();
        let (code, out) = run_cli(&["--format", "tsv", "--max-degree", "8", "hc", path]);
        ensure(code == 0, || format!("exit status {code}"))?;
        let dims: Vec<usize> = String::from_utf8(out)
            .map_err(err)?
            .lines()
            .filter(|l| l.starts_with("HC\t"))
            .map(|l| l.split('\t').nth(2).unwrap().parse().unwrap())
            .collect();
        let expect: Vec<usize> = (0..=8).map(|i| usize::from(i % 2 == 0)).collect();
        ensure(dims == expect, || format!("HC = {dims:?}"))
    });

    suite.run(2, "subdivision preserves HH and HC", Some(Duration::from_secs(180)), || {
        let e = a_sharp(z2_gf3.clone(), 12);
        let ie = pullback(&e, Along::I, 2, 6).map_err(err)?;
        let (hh, hh_i) = (cyclic::hh_dims(&e, 5).map_err(err)?, cyclic::hh_dims(&ie, 5).map_err(err)?);
        ensure(hh == hh_i, || format!("HH {hh:?} vs {hh_i:?}"))?;
        let ih = CyclicHomology::compute(&ie, 4).map_err(err)?;
        let (hc, hc_i) = (cyclic::hc_dims(&e, 4).map_err(err)?, ih.hc_dims());
        audits.push(("i*A_# bicomplex".into(), audit_homology(&ih)));
        audits.push(("i*A_# relations".into(), expect_empty(ie.check_relations().map_err(err))));
        ensure(hc == hc_i, || format!("HC {hc:?} vs {hc_i:?}"))
    });

    suite.run(3, "π-pullback computes periodic HH", None, || {
        let e = a_sharp(z2_gf3.clone(), 8);
        let hh = algebra::hh_dims(&z2_gf3, 7);
        let pe = pullback(&e, Along::Pi, 2, 8).map_err(err)?;
        let ph = CyclicHomology::compute(&pe, 6).map_err(err)?;
        audits.push(("π*A_# bicomplex".into(), audit_homology(&ph)));
        audits.push(("π*A_# relations".into(), expect_empty(pe.check_relations().map_err(err))));
        let hc = ph.hc_dims();
        let expect: Vec<usize> = (0..=6).map(|i| cyclic::periodic_sum(&hh, i)).collect();
        ensure(hc == expect, || format!("HC {hc:?}, expected {expect:?}"))
    });

    suite.run(4, "Connes exact sequence", None, || {
        let algebras = [
            ("GF(5)", Algebra::ground_field(gf(5))),
            ("GF(2)[x]/x²", Algebra::truncated_polynomial(gf(2), 2).unwrap()),
            ("M_2(GF(3))", Algebra::matrix_algebra(gf(3), 2).unwrap()),
        ];
        for (name, a) in algebras {
            let a = Arc::new(a);
            let e = a_sharp(a.clone(), 8);
            audits.push((format!("{name} relations"), expect_empty(e.check_relations().map_err(err))));
            audits.push((format!("{name} bicomplex"), CyclicHomology::compute(&e, 6).map_err(err).and_then(|h| audit_homology(&h))));
            let hoch = hochschild_complex(&a, &Bimodule::diagonal(&a), 5).map_err(err);
            audits.push((format!("{name} Hochschild simplicial identities"), hoch.map(|s| check_identities(&s)).and_then(|v| expect_empty(Ok(v)))));
            for row in connes_check(&e, 6).map_err(err)? {
                ensure(row.exact && row.composite_zero, || format!("{name}: {row:?}"))?;
            }
        }
        Ok(())
    });

    suite.run(5, "Hodge degeneration for liftable algebras", None, || {
        let algebras = [
            ("GF(5)×GF(5)", Algebra::product(&Algebra::ground_field(gf(5)), &Algebra::ground_field(gf(5))).unwrap()),
            ("UT_2(GF(5))", Algebra::upper_triangular(gf(5), 2).unwrap()),
            ("M_2(GF(5))", Algebra::matrix_algebra(gf(5), 2).unwrap()),
        ];
        for (name, a) in algebras {
            let lift = w2_lift_obstruction(&a).map_err(err)?;
            ensure(lift.vanishes && lift.corrected_lift_associative, || format!("{name}: W₂ lift obstructed"))?;
            let r = hodge_report(&a_sharp(Arc::new(a), 10), 8).map_err(err)?;
            ensure(r.degenerate(), || format!("{name}: HC {:?} vs E_1 {:?}", r.hc, r.e1))?;
        }
        Ok(())
    });

    suite.run(6, "Tate homology of V^⊗p", Some(Duration::from_secs(10)), || {
        let degrees: Vec<i64> = (-3..=3).collect();
        for (dim_v, p) in [(1, 2), (2, 2), (3, 2), (1, 3), (2, 3)] {
            let r = verify_votimesp(gf(p as u32), dim_v, p, &degrees).map_err(err)?;
            ensure(r.passes() && r.tate.iter().all(|&(_, d)| d == dim_v), || format!("{r:?}"))?;
        }
        Ok(())
    });

    suite.run(7, "cube homology", Some(Duration::from_secs(120)), || {
        for (p, d) in [(2, 1), (2, 2), (3, 1)] {
            let cube = build_cube(&vs(p, d), 3).map_err(err)?;
            audits.push((format!("cube F_{p}^{d}"), audit_cube(&cube)));
            let h = cube.homology_dims();
            ensure(h[0] == d && h[1] == d, || format!("F_{p}^{d}: H = {h:?}"))?;
            if (p, d) == (3, 1) {
                ensure(h[2] == 0, || format!("H_2(F_3) = {}", h[2]))?;
                ensure(cube.prime_dim(3) == 6560, || format!("dim Q'_3(F_3) = {}", cube.prime_dim(3)))?;
            }
        }
        Ok(())
    });

    suite.run(8, "symmetric cocycles vs V^♭_1", None, || {
        for (p, d) in [(2, 1), (2, 2), (3, 1)] {
            let space = vs(p, d);
            let flat = FlatComplex::new(&space).map_err(err)?.dim1();
            let cocycles = symmetric_cocycle_dim(&space).map_err(err)?;
            ensure(cocycles.dim() == flat, || format!("F_{p}^{d}: {} cocycles vs dim {flat}", cocycles.dim()))?;
        }
        Ok(())
    });

    suite.run(9, "k^♭₀₁ is W₂(F_p)", None, || {
        for p in [2u32, 3] {
            let cert = k_flat_is_w2(p).map_err(err)?;
            ensure(cert.map.len() == (p * p) as usize, || format!("p = {p}: {} elements", cert.map.len()))?;
            let w = witt_ring(p).map_err(err)?;
            let m = u64::from(p * p);
            // ghost-component oracle on integer lifts
            let phi = |a: WittPair| (u64::from(a.a0).pow(p) + u64::from(p) * u64::from(a.a1)) % m;
            let mut images: Vec<u64> = w.elements().map(phi).collect();
            images.sort_unstable();
            ensure(images == (0..m).collect::<Vec<_>>(), || format!("p = {p}: not a bijection onto Z/p²"))?;
            for a in w.elements() {
                for b in w.elements() {
                    ensure(phi(w.add(a, b)) == (phi(a) + phi(b)) % m && phi(w.mul(a, b)) == phi(a) * phi(b) % m, || {
                        format!("p = {p}: {a:?}, {b:?}")
                    })?;
                }
            }
        }
        Ok(())
    });

    suite.run(10, "inverse Cartier comparison", Some(Duration::from_secs(600)), || {
        for (p, n) in [(3, 2), (2, 3)] {
            let a = Arc::new(Algebra::cyclic_group(gf(p), n).unwrap());
            let r = cartier_check(&qf_group_algebra(a).map_err(err)?, 4, 5).map_err(err)?;
            ensure(r.all_free() && r.iso_on_window() && r.consistent(), || format!("GF({p})[Z/{n}]: {r:?}"))?;
        }
        Ok(())
    });

    suite.run(11, "property suites", None, || {
        let mut rng = StdRng::seed_from_u64(11);
        let mut cache: HashMap<(usize, usize, usize), Vec<LambdaMor>> = HashMap::new();
        for _ in 0..1000 {
            let p = rng.gen_range(1..=3);
            let objs: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=4)).collect();
            let mut pick = |i: usize| {
                let all = cache.entry((p, objs[i], objs[i + 1])).or_insert_with(|| LambdaMor::enumerate(p, objs[i], objs[i + 1]));
                all.choose(&mut rng).unwrap().clone()
            };
            let (f, g, h) = (pick(0), pick(1), pick(2));
            let left = f.then(&g).and_then(|fg| fg.then(&h)).map_err(err)?;
            let right = g.then(&h).and_then(|gh| f.then(&gh)).map_err(err)?;
            ensure(left == right, || format!("({f:?}·{g:?})·{h:?} ≠ {f:?}·({g:?}·{h:?})"))?;
        }
        for (what, outcome) in audits.drain(..) {
            outcome.map_err(|why| format!("{what}: {why}"))?;
        }
        let e = a_sharp(z2_gf3.clone(), 6);
        expect_empty(e.simplicial_part().map(|s| check_identities(&s)).map_err(err)).map_err(|w| format!("A_#: {w}"))?;

        let module = input_file("[field]\nprime 3\n[module]\njordan 1 3 2\n");
        let dual = input_file("[field]\nprime 3\n[algebra]\nkind truncated-polynomial\ndegree 2\n");
        let (m, a) = (module.path().to_str().unwrap(), dual.path().to_str().unwrap());
        let runs: [&[&str]; 6] = [
            &["--format", "tsv", "hp", a],
            &["hodge", a],
            &["--format", "tsv", "connes", a],
            &["tate", m],
            &["--dim", "1", "-p", "3", "--max-degree", "3", "cube"],
            &["-p", "3", "witt"],
        ];
        for args in runs {
            let (c1, o1) = run_cli(args);
            let (c2, o2) = run_cli(args);
            ensure(c1 == c2 && o1 == o2 && !o1.is_empty(), || format!("output of {args:?} differs between runs"))?;
        }
        Ok(())
    });

    assert!(suite.failures.is_empty(), "failed criteria: {:?}", suite.failures);
}

fn expect_empty(v: Result<Vec<String>, String>) -> Outcome {
    let v = v?;
    ensure(v.is_empty(), || v.join("; "))
}
