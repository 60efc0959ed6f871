//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;

use common::{binom, coeff, exact, factor, mono, q, rng, tail, truncated, Hp};
use hahn::analytic::{binomial_series, hensel_solve_from, power, solve_unit_eq, unit_eq_power_series};
use hahn::diffpoly::{make_pc, solve_pc, u_check};
use hahn::numeric::{eval_germ, residual_decay_check, GermAssignment};
use hahn::{Bound, Derivation, Generator, GeneratorContext, QSeries, Rational};
use num_traits::Signed;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn plain(name: &str) -> Arc<GeneratorContext> {
    GeneratorContext::new(vec![Generator::plain(name)]).unwrap()
}

/// Truncated product of coefficient vectors.
fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len();
    let mut out = vec![q(0, 1); n];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn binomial_identity() -> Outcome {
    const N: usize = 20;
    let ctx = plain("Z");
    for c in [q(1, 2), q(-2, 1), q(7, 3), q(5, 1)] {
        // c log(1+Z), then exp of it, both as plain coefficient vectors
        let mut l = vec![q(0, 1); N];
        for (n, slot) in l.iter_mut().enumerate().skip(1) {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            *slot = &c * q(sign, n as i64);
        }
        let mut composite = vec![q(0, 1); N];
        let mut power = vec![q(0, 1); N];
        power[0] = q(1, 1);
        let mut fact = q(1, 1);
        for k in 0..N {
            if k > 0 {
                power = poly_mul(&power, &l);
                fact *= Rational::from_integer(k.into());
            }
            for (slot, p) in composite.iter_mut().zip(&power) {
                *slot += p / &fact;
            }
        }
        let series = binomial_series::<Rational>(&ctx, &c);
        for (n, expected) in composite.iter().enumerate() {
            let a = series.coeff(n).map_err(|e| e.to_string())?;
            ensure!(
                a.is_exact() && a.len() <= 1,
                "coefficient {n} for c = {c} is not a constant"
            );
            ensure!(
                a.constant_term() == *expected,
                "c = {c}, n = {n}: {} vs {expected}",
                a.constant_term()
            );
        }
    }
    Ok("c in {1/2, -2, 7/3, 5}, 20 coefficients each".into())
}

/// `(-(2+t) + sqrt(4+t^2))/2 = -t/2 + Σ_{k>=1} binom(1/2,k) t^(2k) / 4^k`
/// through weight `n`.
fn quadratic_oracle(ctx: &Arc<GeneratorContext>, n: i64) -> QSeries {
    let t = ctx.gen(0);
    let mut terms = vec![(t.clone(), q(-1, 2))];
    for k in 1..=(n / 2) {
        let c = binom(&q(1, 2), k as usize) / Rational::from_integer(4.into()).pow(k as i32);
        terms.push((t.pow(&q(2 * k, 1)), c));
    }
    QSeries::from_terms(ctx, terms, Bound::Through(q(n, 1))).unwrap()
}

fn hensel_closed_form() -> Outcome {
    let ctx = plain("t");
    let t = QSeries::generator(&ctx, 0);
    let z = solve_unit_eq(&q(1, 1), &t, &q(12, 1)).map_err(|e| e.to_string())?;
    let oracle = quadratic_oracle(&ctx, 12);
    ensure!(z == oracle, "solve_unit_eq(1, t, 12) = {z:?}");
    ensure!(
        z.coeff(&ctx.gen(0).pow(&q(3, 1))).is_none(),
        "t^3 coefficient is nonzero"
    );
    Ok(format!(
        "{} terms through weight 12, bound {}",
        z.len(),
        z.known_below()
    ))
}

/// `±(e^(x/2) sqrt(1 + e^-x/4)) - 1/2` through weight `n` in `E = e^(-x/2)`.
fn pc_oracle(ctx: &Arc<GeneratorContext>, sign: i64, n: i64) -> QSeries {
    let mut terms = vec![(ctx.one(), q(-1, 2))];
    for k in 0..=((n + 1) / 2) {
        let c = binom(&q(1, 2), k as usize) / Rational::from_integer(4.into()).pow(k as i32);
        terms.push((mono(2 * (2 * k - 1), 0), c * q(sign, 1)));
    }
    QSeries::from_terms(ctx, terms, Bound::Exact)
        .unwrap()
        .truncate(&q(n, 1))
}

fn pc_closed_form() -> Outcome {
    let ctx = GeneratorContext::transseries(&q(1, 1)).unwrap();
    let d = Derivation::standard(&ctx);
    let n = q(10, 1);
    for (b, a) in [(1, 1), (-1, -1)] {
        let y = solve_pc(&d, &q(1, 1), &q(b, 1), &n).map_err(|e| e.to_string())?;
        ensure!(
            y == pc_oracle(&ctx, b, 10),
            "b = {b}: {}",
            hahn::text::format_series(&y)
        );
        let lead = y.leading_term().map_err(|e| e.to_string())?;
        ensure!(
            lead == (q(b, 1), ctx.exp_monomial(&q(1, 2)).unwrap()),
            "b = {b}: leading term {lead:?}"
        );
        let chk = u_check(&d, &y, &q(1, 1), &n).map_err(|e| e.to_string())?;
        ensure!(chk.residual.is_zero(), "b = {b}: residual {:?}", chk.residual);
        ensure!(chk.is_zero_certificate(), "b = {b}: U(y) e^-x = {:?}", chk.unit);
        ensure!(chk.a == Some(q(a, 1)), "b = {b}: a = {:?}", chk.a);
    }
    Ok("b = 1 gives a = 1, b = -1 gives a = -1, both through weight 10".into())
}

fn zero_certificates() -> Outcome {
    let mut cases = 0;
    for c in [q(1, 2), q(1, 1), q(2, 1), q(3, 1)] {
        let ctx = GeneratorContext::transseries(&c).unwrap();
        let d = Derivation::standard(&ctx);
        let pc = make_pc(&ctx, &c).unwrap();
        for b in [q(1, 1), q(-1, 1), q(2, 1), q(-2, 1), q(1, 3)] {
            let y = solve_pc(&d, &c, &b, &q(8, 1)).map_err(|e| format!("c = {c}, b = {b}: {e}"))?;
            let r = pc.eval(&y, &d).map_err(|e| e.to_string())?;
            ensure!(r.is_zero(), "c = {c}, b = {b}: P_c(y) = {r:?}");
            let m = ctx.exp_monomial(&(q(1, 1) / (&c + q(1, 1)))).unwrap();
            ensure!(
                y.leading_term().unwrap() == (b.clone(), m),
                "c = {c}, b = {b}: leading term"
            );
            cases += 1;
        }
    }
    Ok(format!("{cases} (c, b) pairs"))
}

fn contraction() -> Outcome {
    let ctx = plain("t");
    let t = QSeries::generator(&ctx, 0);
    let qs = unit_eq_power_series(&q(1, 1), &t);
    let depth = q(12, 1);
    let oracle = quadratic_oracle(&ctx, 12);
    let mut r = rng(5);
    let mut max_iter = 0;
    for i in 0..50 {
        let n = r.gen_range(1..=4);
        let terms: Vec<_> = (0..n)
            .map(|_| (ctx.gen(0).pow(&q(r.gen_range(1..=12), 2)), coeff(&mut r)))
            .collect();
        let seed = QSeries::from_terms(&ctx, terms, Bound::Exact).unwrap();
        let run = hensel_solve_from(&qs, &depth, &seed).map_err(|e| format!("seed {i}: {e}"))?;
        ensure!(run.root == oracle, "seed {i} ({seed:?}) converged to {:?}", run.root);
        ensure!(
            run.residual_cuts.windows(2).all(|w| w[0] < w[1]),
            "seed {i}: residual valuations {:?} not strictly increasing",
            run.residual_cuts
        );
        max_iter = max_iter.max(run.iterations);
    }
    Ok(format!("50 seeds, at most {max_iter} iterations"))
}

fn algebraic_invariants() -> Outcome {
    const CASES: usize = 500;
    let ctx = GeneratorContext::transseries(&q(1, 1)).unwrap();
    let d = Derivation::standard(&ctx);
    let one = QSeries::one(&ctx);
    let mut r = rng(6);

    for i in 0..CASES {
        let (f, g, h) = (
            truncated(&mut r, &ctx),
            truncated(&mut r, &ctx),
            truncated(&mut r, &ctx),
        );
        ensure!(&f + &g == &g + &f && &f * &g == &g * &f, "case {i}: commutativity");
        ensure!(
            (&(&f + &g) + &h) == (&f + &(&g + &h)),
            "case {i}: additive associativity"
        );
        ensure!(
            (&(&f * &g) * &h).agrees_with(&(&f * &(&g * &h))),
            "case {i}: associativity"
        );
        ensure!(
            (&f * &(&g + &h)).agrees_with(&(&(&f * &g) + &(&f * &h))),
            "case {i}: distributivity"
        );
        let copy = f.clone();
        ensure!((&f - &copy).is_zero(), "case {i}: f - f");
    }

    for i in 0..CASES {
        let f = truncated(&mut r, &ctx);
        let w = f.min_weight().unwrap();
        let depth = f.known_below().value().unwrap() - &w - &w;
        let p = &f * &f.invert(&depth).map_err(|e| e.to_string())?;
        ensure!(
            p.known_below().contains(&q(0, 1)) && p.agrees_with(&one),
            "case {i}: f * inv(f) = {p:?}"
        );
    }

    for i in 0..CASES {
        let (f, g) = (truncated(&mut r, &ctx), truncated(&mut r, &ctx));
        let lhs = d.derive(&(&f * &g)).unwrap();
        let rhs = &(&d.derive(&f).unwrap() * &g) + &(&f * &d.derive(&g).unwrap());
        ensure!(lhs.agrees_with(&rhs), "case {i}: Leibniz");
    }

    let n = q(6, 1);
    for i in 0..CASES {
        let (f, g) = (truncated(&mut r, &ctx), truncated(&mut r, &ctx));
        let lhs = d.log_derivative(&(&f * &g), &n).map_err(|e| e.to_string())?;
        let rhs = &d.log_derivative(&f, &n).unwrap() + &d.log_derivative(&g, &n).unwrap();
        ensure!(lhs.agrees_with(&rhs), "case {i}: (fg)† = f† + g†");
    }

    let scales = [q(1, 1), q(4, 1), q(9, 1), q(1, 4)];
    let exps = [q(1, 2), q(-1, 2), q(3, 2), q(2, 1), q(-3, 1), q(5, 2), q(-5, 2)];
    for i in 0..CASES {
        let m = mono(r.gen_range(-4..=4), r.gen_range(-4..=4));
        let body = &one + &tail(&mut r, &ctx, 4);
        let f = body
            .mul_monomial(&m)
            .scale(&scales[r.gen_range(0..4)])
            .truncate(&(ctx.weight(&m) + q(4, 1)));
        let c = &exps[r.gen_range(0..exps.len())];
        let fc = power(&f, c, &(c * ctx.weight(&m) + q(4, 1))).map_err(|e| format!("case {i}: {e}"))?;
        let lhs = d.log_derivative(&fc, &n).unwrap();
        let rhs = d.log_derivative(&f, &n).unwrap().scale(c);
        ensure!(lhs.agrees_with(&rhs), "case {i}: (f^{c})† = {c} f†");
    }

    let mut premises = [0usize; 6];
    for i in 0..CASES {
        let h = exact(&mut r, &ctx, 3);
        let g = &h * &factor(&mut r, &ctx);
        let f = &g * &factor(&mut r, &ctx);
        let (fg, gh, fh) = (
            f.dominance(&g).unwrap(),
            g.dominance(&h).unwrap(),
            f.dominance(&h).unwrap(),
        );
        if fg.prec && gh.prec {
            premises[0] += 1;
            ensure!(fh.prec, "case {i}: ≺ not transitive");
        }
        if fg.asymp && gh.asymp {
            premises[1] += 1;
            ensure!(fh.asymp, "case {i}: ≍ not transitive");
        }
        if fg.sim && gh.sim {
            premises[2] += 1;
            ensure!(fh.sim, "case {i}: ∼ not transitive");
        }
        if fg.sim {
            premises[3] += 1;
            ensure!(fg.asymp, "case {i}: ∼ without ≍");
        }
        if fg.prec {
            premises[4] += 1;
            ensure!(
                !g.preceq(&f).unwrap() && (&f + &g).sim(&g).unwrap(),
                "case {i}: ≺ compatibility"
            );
        }
        if (fg.asymp && gh.prec) || (fg.prec && gh.asymp) {
            premises[5] += 1;
            ensure!(fh.prec, "case {i}: ≍/≺ compatibility");
        }
    }
    ensure!(
        premises.iter().all(|&p| p > 0),
        "some relation premise never occurred: {premises:?}"
    );

    for i in 0..CASES {
        let c = q(r.gen_range(1..=40), r.gen_range(1..=12));
        let cx = GeneratorContext::transseries(&c).unwrap();
        let dc = Derivation::standard(&cx);
        let p = make_pc(&cx, &c).unwrap();
        let zero = p.eval(&QSeries::zero(&cx), &dc).unwrap();
        let minus_one = p.eval(&-QSeries::one(&cx), &dc).unwrap();
        ensure!(
            zero.is_exact_zero() && minus_one.is_exact_zero(),
            "case {i}: P_{c}(0) or P_{c}(-1) nonzero"
        );
    }

    Ok(format!("{CASES} cases per family; relation premises hit {premises:?}"))
}

fn calculus_invariants() -> Outcome {
    const PAIRS: usize = 200;
    let ctx = GeneratorContext::transseries(&q(1, 1)).unwrap();
    let d = Derivation::standard(&ctx);
    let one = QSeries::one(&ctx);
    let mut r = rng(7);

    let mut done = 0;
    while done < PAIRS {
        let g = exact(&mut r, &ctx, 3);
        if g.asymp(&one).unwrap() {
            continue;
        }
        let mut t = tail(&mut r, &ctx, 3);
        if t.is_zero() {
            t = QSeries::monomial(&ctx, mono(0, 1), coeff(&mut r));
        }
        let f = &g * &t;
        ensure!(f.prec(&g).unwrap(), "constructed f is not ≺ g");
        let (fp, gp) = (d.derive(&f).unwrap(), d.derive(&g).unwrap());
        ensure!(fp.prec(&gp).unwrap(), "f ≺ g but f' not ≺ g' for g = {g:?}, f = {f:?}");
        done += 1;
    }

    let mut done_pos = 0;
    while done_pos < PAIRS {
        let (a, b) = (r.gen_range(-6..=0), r.gen_range(-6..=6));
        let m = mono(a, b);
        if !one.prec(&QSeries::monomial(&ctx, m.clone(), q(1, 1))).unwrap() {
            continue;
        }
        let f = (&one + &tail(&mut r, &ctx, 4))
            .mul_monomial(&m)
            .scale(&coeff(&mut r).abs());
        let fp = d.derive(&f).unwrap();
        ensure!(fp.sign() > 0, "f > 0, f ≻ 1 but f' = {fp:?}");
        done_pos += 1;
    }
    Ok(format!(
        "{PAIRS} pairs for f ≺ g ⇒ f' ≺ g', {PAIRS} series for f ≻ 1 ⇒ f' > 0"
    ))
}

fn numeric_cross_validation() -> Outcome {
    let depths = [q(2, 1), q(4, 1), q(6, 1), q(8, 1)];
    let report = residual_decay_check(&q(1, 1), &q(1, 1), &depths, &10.0f64).map_err(|e| e.to_string())?;
    ensure!(report.pass, "decay report failed: {report:?}");
    ensure!(
        report.entries.windows(2).all(|w| w[1].residual < w[0].residual),
        "residuals not strictly decreasing: {report:?}"
    );

    let ctx = GeneratorContext::transseries(&q(1, 1)).unwrap();
    let d = Derivation::standard(&ctx);
    let a = GermAssignment::from_context(&ctx);
    let y8 = solve_pc(&d, &q(1, 1), &q(1, 1), &q(8, 1)).unwrap();
    let deeper = solve_pc(&d, &q(1, 1), &q(1, 1), &q(12, 1)).unwrap();
    let (m, c) = deeper
        .terms()
        .find(|(m, _)| ctx.weight(m) > q(8, 1))
        .ok_or("no omitted term")?;
    let omitted = QSeries::monomial(&ctx, m.clone(), c.clone());

    let t = <Hp as hahn::numeric::Real>::from_f64(10.0);
    use hahn::numeric::Real;
    let exact = (Hp::from_f64(-1.0)
        + ((Hp::from_f64(1.0) + Hp::from_f64(4.0) * t.exp()).ln() / Hp::from_f64(2.0)).exp())
        / Hp::from_f64(2.0);
    let value: Hp = eval_germ(&y8, &a, &t).unwrap();
    let rel_err = ((value - exact.clone()) / exact.clone()).abs();
    let estimate = (eval_germ::<_, Hp>(&omitted, &a, &t).unwrap() / exact).abs();
    let f64_err = {
        let v: f64 = eval_germ(&y8, &a, &10.0).unwrap();
        let e = (-1.0 + (1.0 + 4.0 * 10f64.exp()).sqrt()) / 2.0;
        ((v - e) / e).abs()
    };
    ensure!(
        rel_err < estimate && rel_err > Hp::from_f64(0.0),
        "relative error {:e} vs first omitted term {:e}",
        rel_err.to_f64(),
        estimate.to_f64()
    );
    let ratios: Vec<String> = report
        .entries
        .iter()
        .filter_map(|e| e.decay_ratio)
        .map(|r| format!("{r:.2e}"))
        .collect();
    Ok(format!(
        "decay ratios [{}]; 256-bit relative error {:.8e} < first omitted term {:.8e} (f64 error {:.1e})",
        ratios.join(", "),
        rel_err.to_f64(),
        estimate.to_f64(),
        f64_err
    ))
}

fn cli_golden_files() -> Outcome {
    let golden = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");
    let cases: [(&str, &[&str]); 3] = [
        ("solve_pc", &["solve-pc", "--c", "1", "--b", "1", "-N", "4"]),
        ("unit_eq", &["unit-eq", "--c", "0", "--eps", "t", "-N", "4"]),
        ("dominance", &["dominance", "-f", "exp1+1", "-g", "exp1"]),
    ];
    for (name, args) in cases {
        for (ext, extra) in [("txt", None), ("json", Some("--json"))] {
            let out = Command::new(env!("CARGO_BIN_EXE_hahn"))
                .args(args)
                .args(extra)
                .output()
                .map_err(|e| e.to_string())?;
            let expected = std::fs::read(format!("{golden}/{name}.{ext}")).map_err(|e| e.to_string())?;
            ensure!(out.status.success(), "{name} {ext}: exit {:?}", out.status.code());
            ensure!(
                out.stdout == expected,
                "{name}.{ext} differs:\n{}",
                String::from_utf8_lossy(&out.stdout)
            );
        }
    }
    Ok("3 commands, text and JSON".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("binomial series = exp(c log1p) composite", binomial_identity),
        ("Hensel solver vs quadratic closed form", hensel_closed_form),
        ("P_c zero vs closed form and sign rule", pc_closed_form),
        ("zero certificates over (c, b) grid", zero_certificates),
        ("contraction from random seeds", contraction),
        ("randomized algebraic invariants", algebraic_invariants),
        ("calculus invariants on the transseries preset", calculus_invariants),
        ("numeric cross-validation", numeric_cross_validation),
        ("CLI golden files", cli_golden_files),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
