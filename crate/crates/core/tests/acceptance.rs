//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symproj::amp::{plan, simulate_aa};
use symproj::cost::{femoco_estimate, scaling_table, sector_overlap, Method};
use symproj::gqsp::{build_pms_gqsp, build_pn_gqsp, complementary_poly, find_phases, reconstruct, unitarity_error, ComplexPoly};
use symproj::gqsvt::build_symmetry_gqsvt;
use symproj::lcu::{build_pms_lcu, build_pn_lcu, build_psms_composite};
use symproj::oracle::{block_extract, exact_projector, fidelity_vec, op_norm_diff, projection_fidelity, CLUSTER_TOL};
use symproj::quad::{min_nodes_n, min_nodes_sz};
use symproj::sim::{quantize_angles, Role};
use symproj::{BlockEncoding, Circuit, Gate, Statevector, Symmetry};

type Check = Result<String, String>;

/// `2·Ŝz` of a basis index: α occupations minus β occupations.
fn twice_sz(i: usize, n_so: usize) -> i64 {
    (0..n_so).map(|q| if i >> q & 1 == 1 { if q % 2 == 0 { 1 } else { -1 } } else { 0 }).sum()
}

fn parity_of(m: f64) -> u32 {
    ((2.0 * m).round() as i64).rem_euclid(2) as u32
}

/// `sub·B·sub = P·sub`, idempotent and Hermitian to `tol`.
fn projector_error(b: &M, p: &M, sub: &M) -> f64 {
    let bs = sub * b * sub;
    op_norm_diff(&bs, &(p * sub)).max(op_norm_diff(&(&bs * &bs), &bs)).max(op_norm_diff(&bs.adjoint(), &bs))
}

fn scaled(be: &BlockEncoding) -> M {
    block_extract(be).unwrap() * c(be.alpha)
}

fn exactness_at_aliasing_minimum() -> Check {
    let mut worst: f64 = 0.0;
    for n in [4, 8, 12] {
        let n_phi = n / 2 + 1;
        let bes = [build_pms_lcu(n, 0.0, n_phi).unwrap(), build_pms_gqsp(n, 0.0, n_phi).unwrap()];
        for seed in 0..20 {
            // The Fourier sum is exact on the electron-number parity that
            // matches 2·M_S, i.e. even here.
            let s = Statevector::<f64>::random_in(n, seed, |i| i.count_ones() % 2 == 0).unwrap();
            let want: Vec<Complex64> = s.to_complex64().iter().enumerate().map(|(i, a)| if twice_sz(i, n) == 0 { *a } else { c(0.0) }).collect();
            for be in &bes {
                let (got, _) = be.apply(&s).unwrap();
                worst = worst.max((1.0 - fidelity_vec(&got.to_complex64(), &want).unwrap()).abs());
            }
        }
    }
    let msg = format!("max |1 - F| = {worst:.1e} over n_so 4/8/12, 20 seeds, LCU+GQSP");
    if worst <= 1e-8 { Ok(msg) } else { Err(msg) }
}

fn beta_node_saturation() -> Check {
    let n = 8;
    let s2 = spin_operators(n).s2;
    let uniform = Statevector::<f64>::uniform_in(n, |i| twice_sz(i, n) == 0).unwrap();
    let mut out = Vec::new();
    for (s, n_beta, want, tol) in [(0.0, 2, 0.0, 1e-6), (2.0, 3, 6.0, 1e-4)] {
        let be = build_psms_composite(n, s, 0.0, n_beta, n / 2 + 1).unwrap();
        let (psi, _) = be.apply(&uniform).unwrap();
        let v = nalgebra::DVector::from_vec(psi.to_complex64());
        let e = (v.adjoint() * &s2 * &v)[(0, 0)].re;
        out.push(((e - want).abs() <= tol, format!("S={s} N_b={n_beta}: <S2>={e:.3e}")));
    }
    let msg = out.iter().map(|o| o.1.clone()).collect::<Vec<_>>().join(", ");
    if out.iter().all(|o| o.0) { Ok(msg) } else { Err(msg) }
}

fn backend_equivalence() -> Check {
    let (mut lg, mut gv): (f64, f64) = (0.0, 0.0);
    for n in [2, 4, 6] {
        let sp = spin_operators(n);
        for m2 in -(n as i64 / 2)..=(n as i64 / 2) {
            let m = m2 as f64 / 2.0;
            let k = min_nodes_sz(n, m).unwrap();
            let g = block_extract(&build_pms_gqsp(n, m, k).unwrap()).unwrap();
            let l = block_extract(&build_pms_lcu(n, m, k).unwrap()).unwrap();
            lg = lg.max(op_norm_diff(&g, &l));
        }
        for (sym, op) in [(Symmetry::Number, &sp.n), (Symmetry::SpinZ, &sp.sz), (Symmetry::TotalSpin, &sp.s2)] {
            let spec = sym.spectrum(n);
            // One interior and one edge eigenvalue keep the n_so = 6 total-spin run short.
            let targets: Vec<f64> = if n < 6 { spec.clone() } else { vec![spec[0], spec[spec.len() / 2]] };
            for t in targets {
                let b = scaled(&build_symmetry_gqsvt(sym, n, t).unwrap());
                gv = gv.max(op_norm_diff(&b, &exact_projector(op, t, CLUSTER_TOL).unwrap()));
            }
        }
    }
    let msg = format!("|LCU - GQSP| = {lg:.1e} (tol 1e-8), |GQSVT - oracle| = {gv:.1e} (tol 1e-6)");
    if lg <= 1e-8 && gv <= 1e-6 { Ok(msg) } else { Err(msg) }
}

/// Mean fidelity over 20 half-filled random states with every rotation of
/// the listed roles rounded to `eps`.
fn rounded_fidelity(be: &BlockEncoding, eps: f64, n: usize) -> f64 {
    let scope = [Role::Select, Role::Prep, Role::Processing];
    let q = BlockEncoding { circuit: quantize_angles(&be.circuit, eps, &scope).unwrap(), ..be.clone() };
    let sz = Symmetry::SpinZ.operator(n).unwrap();
    let f: f64 = (0..20)
        .map(|seed| {
            let s = Statevector::<f64>::random_in(n, seed, |i| i.count_ones() as usize == n / 2).unwrap();
            projection_fidelity(&q, &s, &[(&sz, 0.0)]).unwrap().0
        })
        .sum();
    f / 20.0
}

fn precision_thresholds() -> Check {
    let n = 8;
    let lcu = build_pms_lcu(n, 0.0, n / 2 + 1).unwrap();
    let gqsp = build_pms_gqsp(n, 0.0, n / 2 + 1).unwrap();
    let gqsvt = build_symmetry_gqsvt(Symmetry::SpinZ, n, 0.0).unwrap();
    let checks = [
        ("LCU@1e-1", rounded_fidelity(&lcu, 1e-1, n), true),
        ("GQSP@1e-2", rounded_fidelity(&gqsp, 1e-2, n), true),
        ("GQSVT@2e-4", rounded_fidelity(&gqsvt, 2e-4, n), true),
        ("GQSVT@1e-2", rounded_fidelity(&gqsvt, 1e-2, n), false),
    ];
    let msg = checks.iter().map(|(l, f, hi)| format!("{l} F={f:.5} (want {}0.99)", if *hi { ">=" } else { "<" })).collect::<Vec<_>>().join(", ");
    if checks.iter().all(|(_, f, hi)| (*f >= 0.99) == *hi) { Ok(msg) } else { Err(msg) }
}

fn ry_layer(n: usize, angles: &[f64]) -> Circuit {
    let mut c = Circuit::new(n);
    for (q, &a) in angles.iter().enumerate() {
        c.push(Gate::ry(q, a)).unwrap();
    }
    c
}

fn amplification_closed_form() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for n in [2, 4, 6] {
        let ne = n / 2;
        let k = min_nodes_n(n, ne).unwrap();
        for be in [build_pn_lcu(n, ne, k).unwrap(), build_pn_gqsp(n, ne, k).unwrap()] {
            let angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..2.9)).collect();
            let init = ry_layer(n, &angles);
            let p0 = simulate_aa(&be, &init, 0).unwrap().1;
            let theta = p0.sqrt().asin();
            for m in 0..=3 {
                let p = simulate_aa(&be, &init, m).unwrap().1;
                worst = worst.max((p - ((2 * m + 1) as f64 * theta).sin().powi(2)).abs());
            }
        }
    }
    let (q1, q2) = (plan(0.036).unwrap().queries, plan(0.068).unwrap().queries);
    let msg = format!("max |p - sin^2((2m+1)theta)| = {worst:.1e}, plan(0.036) -> {q1}, plan(0.068) -> {q2}");
    if worst <= 1e-9 && q1 == 7 && q2 == 5 { Ok(msg) } else { Err(msg) }
}

fn femoco_table() -> Check {
    let rows = [(54, 54, 0.0, 0.036, 1.5e7), (76, 113, 1.5, 0.068, 1.1e7), (76, 113, 0.5, 0.035, 1.5e7)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (orb, ne, s, p_ref, t_ref) in rows {
        let p = sector_overlap(ne, s).unwrap();
        let e = femoco_estimate(orb, ne, s, s, 1e-2).unwrap();
        let ratio = e.total_t as f64 / t_ref;
        ok &= (p - p_ref).abs() <= 1e-3 && (1.0 / 3.0..=3.0).contains(&ratio);
        parts.push(format!("S={s}: p={p:.4} q={} T={:.2e} (x{ratio:.2})", e.queries, e.total_t as f64));
    }
    let msg = parts.join(", ");
    if ok { Ok(msg) } else { Err(msg) }
}

/// Rotation precision per method from the precision thresholds above.
fn scaling_fits() -> Check {
    let ns = [8, 16, 32, 64];
    let cases = [
        (Symmetry::SpinZ, Method::Lcu, 1e-1, 4.0, 1.7..=2.3),
        (Symmetry::SpinZ, Method::Gqsp, 1e-2, 4.0, 1.7..=2.3),
        (Symmetry::TotalSpin, Method::Gqsvt, 2e-4, 36.5, 2.7..=3.3),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (sym, method, eps, a_ref, b_range) in cases {
        let t = scaling_table(sym, method, &ns, eps).unwrap();
        let (a, b) = (t.t_fit.a, t.t_fit.b);
        let good = b_range.contains(&b) && (a_ref / 2.0..=a_ref * 2.0).contains(&a);
        ok &= good;
        parts.push(format!("{method} {sym:?} eps={eps:e}: a={a:.2} b={b:.3}{}", if good { "" } else { " (out)" }));
    }
    let msg = parts.join(", ");
    if ok { Ok(msg) } else { Err(msg) }
}

fn property_suite() -> Check {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in [2, 4, 6] {
        let sp = spin_operators(n);
        let id = M::identity(1 << n, 1 << n);
        let ne = n / 2;
        let kn = min_nodes_n(n, ne).unwrap();
        let pn = exact_projector(&sp.n, ne as f64, CLUSTER_TOL).unwrap();
        let mut check = |b: M, p: &M, sub: &M| {
            worst = worst.max(projector_error(&b, p, sub));
            cases += 1;
        };
        check(scaled(&build_pn_lcu(n, ne, kn).unwrap()), &pn, &id);
        check(scaled(&build_pn_gqsp(n, ne, kn).unwrap()), &pn, &id);
        for m in [0.0, 0.5] {
            let k = min_nodes_sz(n, m).unwrap();
            let p = exact_projector(&sp.sz, m, CLUSTER_TOL).unwrap();
            let sub = parity_projector(n, parity_of(m));
            check(scaled(&build_pms_lcu(n, m, k).unwrap()), &p, &sub);
            check(scaled(&build_pms_gqsp(n, m, k).unwrap()), &p, &sub);
        }
        // Total spin with M_S = S, S = 0 and 1/2; nodes exact over the whole sector.
        for s in [0.0, 0.5] {
            let n_beta = ((s + n as f64 / 4.0 + 1.0) / 2.0).ceil() as usize;
            let k = min_nodes_sz(n, s).unwrap();
            let p = exact_projector(&sp.sz, s, CLUSTER_TOL).unwrap() * exact_projector(&sp.s2, s * (s + 1.0), CLUSTER_TOL).unwrap();
            let sub = parity_projector(n, parity_of(s));
            check(scaled(&build_psms_composite(n, s, s, n_beta, k).unwrap()), &p, &sub);
            let pm = build_pms_gqsp(n, s, k).unwrap();
            let ps = symproj::lcu::build_ps_lcu(n, s, s, n_beta).unwrap();
            check(scaled(&pm.then(&ps).unwrap().then(&pm).unwrap()), &p, &sub);
        }
        for (sym, op, t) in [(Symmetry::Number, &sp.n, ne as f64), (Symmetry::SpinZ, &sp.sz, 0.0), (Symmetry::TotalSpin, &sp.s2, 0.0)] {
            check(scaled(&build_symmetry_gqsvt(sym, n, t).unwrap()), &exact_projector(op, t, CLUSTER_TOL).unwrap(), &id);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut residual: f64 = 0.0;
    for _ in 0..50 {
        let d = rng.random_range(1..=32);
        let p = ComplexPoly::new((0..=d).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect());
        let p = p.scale(c(rng.random_range(0.3..0.95) / p.max_on_circle(8192)));
        let q = complementary_poly(&p).map_err(|e| format!("complement failed at degree {d}: {e}"))?;
        let (p2, q2) = reconstruct(&find_phases(&p, &q).map_err(|e| format!("phases failed at degree {d}: {e}"))?);
        residual = residual.max(p2.max_coeff_diff(&p)).max(q2.max_coeff_diff(&q)).max(unitarity_error(&p2, &q2));
    }
    let msg = format!("{cases} projector cases, worst error {worst:.1e} (tol 1e-8); phase round trip residual {residual:.1e} (tol 1e-9)");
    if worst <= 1e-8 && residual <= 1e-9 { Ok(msg) } else { Err(msg) }
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 8] = [
        ("1 exactness at aliasing minimum", exactness_at_aliasing_minimum, Duration::from_secs(60)),
        ("2 beta-node saturation", beta_node_saturation, Duration::from_secs(120)),
        ("3 backend equivalence", backend_equivalence, Duration::from_secs(120)),
        ("4 precision thresholds", precision_thresholds, Duration::from_secs(300)),
        ("5 amplitude amplification", amplification_closed_form, Duration::from_secs(120)),
        ("6 overlap and cost table", femoco_table, Duration::from_secs(1)),
        ("7 scaling fits", scaling_fits, Duration::from_secs(120)),
        ("8 property suite", property_suite, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let t0 = Instant::now();
        let result = run();
        let dt = t0.elapsed();
        let (ok, msg) = match result {
            Ok(m) => (dt <= budget, m),
            Err(m) => (false, m),
        };
        failed += usize::from(!ok);
        println!("{} criterion {name}: {msg} [{:.2}s, budget {}s]", if ok { "PASS" } else { "FAIL" }, dt.as_secs_f64(), budget.as_secs());
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
