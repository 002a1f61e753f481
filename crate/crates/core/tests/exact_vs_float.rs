use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use qlancaster::connect::{linearize, r_to_h, CoeffKind};
use qlancaster::exactpoly::registry::Form;
use qlancaster::exactpoly::symbolic::sym_family_sequence;
use qlancaster::exactpoly::*;
use qlancaster::kernels::{d_n, gamma_nu, phi_n, w_poly, DnForm};
use qlancaster::polyfam::{eval_sequence, PolyFamily};
use qlancaster::qcore::{q_binomial, q_poch};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Point {
    exact: Vec<(Var, BigRational)>,
}

impl Point {
    fn random(rng: &mut ChaCha8Rng) -> Point {
        let mut exact = Vec::new();
        for v in [Var::X, Var::Y, Var::Q, Var::R1, Var::R2, Var::A, Var::B, Var::T, Var::Beta] {
            let num: i64 = rng.gen_range(-17..=17);
            exact.push((v, BigRational::new(BigInt::from(num), BigInt::from(20))));
        }
        Point { exact }
    }

    fn get(&self, v: Var) -> f64 {
        self.exact.iter().find(|p| p.0 == v).unwrap().1.to_f64().unwrap()
    }

    fn value(&self, rf: &RationalFn) -> f64 {
        let e = rf.eval(&self.exact).unwrap();
        let (n, d) = (e.num.as_constant().unwrap(), e.den.as_constant().unwrap());
        (n / d).to_f64().unwrap()
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0)
}

fn forms(id: IdentityId, idx: &[usize]) -> Vec<Form> {
    identity_forms(id, idx).unwrap()
}

fn points() -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..3).map(|_| Point::random(&mut rng)).collect()
}

#[test]
fn families_match_recurrences() {
    for p in points() {
        let (x, q, b) = (p.get(Var::X), p.get(Var::Q), p.get(Var::Beta));
        for (sym, fam) in [
            (SymFamily::QHermite, PolyFamily::QHermite),
            (SymFamily::UltraR, PolyFamily::UltraR { beta: b }),
            (SymFamily::BPoly, PolyFamily::BPoly),
        ] {
            let exact = sym_family_sequence(sym, 12).unwrap();
            let float = eval_sequence(&fam, 12, x, q).unwrap();
            for n in 0..=12 {
                let e = p.value(&RationalFn::poly(exact[n].clone()));
                assert!(close(e, float[n]), "{sym:?} n={n}: {e} vs {}", float[n]);
            }
        }
    }
}

#[test]
fn kernel_coefficients_match() {
    for p in points() {
        let (y, q, r1, r2) = (p.get(Var::Y), p.get(Var::Q), p.get(Var::R1), p.get(Var::R2));
        for n in 0..=6 {
            let f = forms(IdentityId::Spec1, &[n]);
            assert!(close(p.value(&f[0].lhs), phi_n(n, r1, r2, q).unwrap()));
            for k in 0..=n / 2 {
                let g = forms(IdentityId::GammaPhi, &[n, k]);
                assert!(close(p.value(&g[0].lhs), gamma_nu(n, k, r1, r2, q).unwrap()));
            }
            for m in 0..=3 {
                let w = forms(IdentityId::WmShift, &[n, m]);
                assert!(close(p.value(&w[1].lhs), w_poly(n, m, r1, r2, q)));
            }
        }
        for n in 0..=5 {
            let d = forms(IdentityId::DnEquiv, &[n]);
            assert!(close(p.value(&d[0].lhs), d_n(n, y, r1, r2, q, DnForm::Direct).unwrap()));
            assert!(close(p.value(&d[0].rhs), d_n(n, y, r1, r2, q, DnForm::Expanded).unwrap()));
        }
    }
}

#[test]
fn connection_tables_match() {
    for p in points() {
        let (x, q, b) = (p.get(Var::X), p.get(Var::Q), p.get(Var::Beta));
        for n in 0..=6 {
            let c = forms(IdentityId::ConnRoundtrip, &[n]);
            assert!(close(p.value(&c[0].rhs), r_to_h(n, b, q).unwrap().expand(x).unwrap()));
            for m in 0..=4 {
                for (id, kind) in [
                    (IdentityId::LinRr, CoeffKind::RRtoR),
                    (IdentityId::LinHrH, CoeffKind::HRtoH),
                    (IdentityId::LinHrR, CoeffKind::HRtoR),
                ] {
                    let f = forms(id, &[n, m]);
                    let num = linearize(kind, n, m, b, q).unwrap().expand(x).unwrap();
                    assert!(close(p.value(&f[0].rhs), num), "{id} n={n} m={m}");
                }
            }
        }
    }
}

#[test]
fn section_six_sums_match() {
    for p in points() {
        let (q, a, b, r1, r2) = (p.get(Var::Q), p.get(Var::A), p.get(Var::B), p.get(Var::R1), p.get(Var::R2));
        let tri = |k: usize| q.powi((k * k.saturating_sub(1) / 2) as i32);
        for n in 0..=6 {
            let aux: f64 = (0..=n)
                .map(|j| {
                    q_binomial(n, j, q) * (-b).powi(j as i32) * tri(j) * q_poch(a, q, j)
                        * q_poch(a * b * q.powi(j as i32), q, n - j)
                })
                .sum();
            assert!(close(p.value(&forms(IdentityId::Aux2, &[n])[0].lhs), aux));
        }
        for m in 0..=4 {
            for t in 0..=3 {
                let (s1, s2) = (r1 * r1, r2 * r2);
                let l: f64 = (0..=m)
                    .map(|k| {
                        q_binomial(m, k, q) * (-s2).powi(k as i32) * tri(k) * q_poch(s1, q, t + m + k)
                            / q_poch(s1 * s2, q, t + m + k)
                    })
                    .sum();
                assert!(close(p.value(&forms(IdentityId::Skrt, &[m, t])[0].lhs), l));
            }
        }
    }
}
