mod common;

use std::sync::Arc;

use common::expm;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qrel::histories::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hermitian(d: usize, entries: &[f64]) -> CMatrix {
    let mut h = CMatrix::zeros(d, d);
    let mut it = entries.iter().cycle();
    for i in 0..d {
        h[(i, i)] = c(*it.next().unwrap(), 0.0);
        for j in i + 1..d {
            let z = c(*it.next().unwrap(), *it.next().unwrap());
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

fn unit_vector(d: usize, entries: &[f64]) -> CVector {
    let v = CVector::from_iterator(
        d,
        (0..d).map(|i| {
            c(
                entries[2 * i % entries.len()],
                entries[(2 * i + 1) % entries.len()],
            )
        }),
    );
    let n = v.norm();
    v.unscale(n)
}

fn masks(d: usize, bits: u32) -> Operator {
    Operator::indicator((0..d).map(|i| bits >> (i % 32) & 1 == 1))
}

prop_compose! {
    fn setup(d: usize)(h1 in prop::collection::vec(-1.0f64..1.0, d * d), h2 in prop::collection::vec(-1.0f64..1.0, d * d),
                       psi in prop::collection::vec(-1.0f64..1.0, 2 * d), t in 0.1f64..3.0,
                       b1 in any::<u32>(), b2 in any::<u32>(), b3 in any::<u32>(), b4 in any::<u32>())
        -> (Arc<Schedule>, [Operator; 4])
    {
        let u1 = unitary_from_hamiltonian(&hermitian(d, &h1), t).unwrap();
        let u2 = unitary_from_hamiltonian(&hermitian(d, &h2), 0.7 * t).unwrap();
        let psi = unit_vector(d, &psi);
        let s = Arc::new(Schedule::pure(psi, vec![Operator::Dense(u1), Operator::Dense(u2)]).unwrap());
        (s, [masks(d, b1), masks(d, b2), masks(d, b3), masks(d, b4)])
    }
}

proptest! {
    #[test]
    fn inner_product_is_hermitian((s, p) in setup(4)) {
        let [a, b, x, y] = p.map(Arc::new);
        let h1 = History::new(s.clone(), vec![a, b]).unwrap();
        let h2 = History::new(s, vec![x, y]).unwrap();
        let ab = history_inner_product(&h1, &h2).unwrap();
        let ba = history_inner_product(&h2, &h1).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-14);
        prop_assert!((history_inner_product(&h1, &h1).unwrap().re - h1.weight()).abs() < 1e-14);
        prop_assert!(h1.weight() >= -1e-15);
    }

    #[test]
    fn identity_slots_do_not_change_inner_products(
        h in prop::collection::vec(-1.0f64..1.0, 16),
        psi in prop::collection::vec(-1.0f64..1.0, 6),
        bits in prop::collection::vec(any::<u32>(), 4),
        t in 0.1f64..3.0,
    ) {
        let d = 3;
        let u1 = Operator::Dense(unitary_from_hamiltonian(&hermitian(d, &h), t).unwrap());
        let u2 = Operator::Dense(unitary_from_hamiltonian(&hermitian(d, &h[5..]), 0.4 * t).unwrap());
        let psi = unit_vector(d, &psi);
        let p: Vec<Arc<Operator>> = bits.iter().map(|&b| Arc::new(masks(d, b))).collect();
        let id = Arc::new(Operator::Identity(d));
        let two = Arc::new(Schedule::pure(psi.clone(), vec![u1.clone(), u2.clone()]).unwrap());
        let three = Arc::new(Schedule::pure(psi, vec![u1, Operator::Identity(d), u2]).unwrap());
        let a2 = History::new(two.clone(), vec![p[0].clone(), p[1].clone()]).unwrap();
        let b2 = History::new(two, vec![p[2].clone(), p[3].clone()]).unwrap();
        let a3 = History::new(three.clone(), vec![p[0].clone(), id.clone(), p[1].clone()]).unwrap();
        let b3 = History::new(three, vec![p[2].clone(), id, p[3].clone()]).unwrap();
        let before = history_inner_product(&a2, &b2).unwrap();
        let after = history_inner_product(&a3, &b3).unwrap();
        prop_assert!((before - after).norm() < 1e-15);
    }

    #[test]
    fn complete_family_weights_sum_to_one((s, p) in setup(4)) {
        let [a, b, ..] = p;
        let a_perp = a.complement();
        let b_perp = b.complement();
        let hs: Vec<History> = [(&a, &b), (&a, &b_perp), (&a_perp, &b), (&a_perp, &b_perp)]
            .iter()
            .map(|(x, y)| History::new(s.clone(), vec![Arc::new((*x).clone()), Arc::new((*y).clone())]).unwrap())
            .collect();
        let fam = HistoryFamily::new(hs).unwrap();
        // sum over a complete family of the full decoherence functional is 1
        let mut total = Complex64::new(0.0, 0.0);
        for x in fam.histories() {
            for y in fam.histories() {
                total += history_inner_product(x, y).unwrap();
            }
        }
        prop_assert!((total - 1.0).norm() < 1e-12);
        let report = check_consistency(&fam, 1e-8).unwrap();
        if report.consistent {
            prop_assert!((fam.weights().iter().sum::<f64>() - 1.0).abs() < 1e-8 * 6.0 + 1e-12);
        }
    }

    #[test]
    fn exponential_agrees_with_taylor_oracle(h in prop::collection::vec(-2.0f64..2.0, 9), t in 0.0f64..4.0) {
        let hm = hermitian(3, &h);
        let u = unitary_from_hamiltonian(&hm, t).unwrap();
        let reference = expm(&(hm * c(0.0, -t)));
        prop_assert!((u - reference).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn theta_family_weights_sum_to_one((s, p) in setup(4)) {
        let [a, b, ..] = p;
        let fam = HistoryFamily::theta(s, vec![a, b]).unwrap();
        let w = fam.weights();
        let report = check_consistency(&fam, 1e-8).unwrap();
        match survival_and_lifetime(&fam) {
            Ok(surv) => {
                prop_assert!(report.consistent);
                prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-8);
                prop_assert!((surv.r_of_t[1] - w[2]).abs() < 1e-14);
                prop_assert!(surv.r_of_t[1] <= surv.r_of_t[0] + 1e-14);
            }
            Err(qrel::Error::Inconsistent { max_violation }) => {
                prop_assert!(!report.consistent);
                prop_assert!(max_violation > 1e-8);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

#[test]
fn dense_and_diagonal_projectors_agree() {
    let d = 5;
    let h: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
    let u = unitary_from_hamiltonian(&hermitian(d, &h), 1.1).unwrap();
    let psi = unit_vector(d, &h);
    let s = Arc::new(Schedule::pure(psi, vec![Operator::Dense(u)]).unwrap());
    let diag = Operator::indicator([true, false, true, true, false]);
    let dense = Operator::Dense(diag.to_dense());
    let h1 = History::new(s.clone(), vec![Arc::new(diag)]).unwrap();
    let h2 = History::new(s, vec![Arc::new(dense)]).unwrap();
    assert!((h1.weight() - h2.weight()).abs() < 1e-15);
}

#[test]
fn mixed_state_is_a_convex_combination() {
    let d = 3;
    let h: Vec<f64> = (0..20).map(|i| (i as f64 * 0.91).cos()).collect();
    let u = Operator::Dense(unitary_from_hamiltonian(&hermitian(d, &h), 0.8).unwrap());
    let e0 = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let e1 = CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let rho = (&e0 * e0.adjoint()).scale(0.3) + (&e1 * e1.adjoint()).scale(0.7);
    let p = Arc::new(Operator::indicator([true, false, true]));
    let weight = |s: Schedule| History::new(Arc::new(s), vec![p.clone()]).unwrap().weight();
    let mixed = weight(Schedule::mixed(rho, vec![u.clone()]).unwrap());
    let w0 = weight(Schedule::pure(e0, vec![u.clone()]).unwrap());
    let w1 = weight(Schedule::pure(e1, vec![u]).unwrap());
    assert!((mixed - (0.3 * w0 + 0.7 * w1)).abs() < 1e-13);
}

#[test]
fn chain_operator_is_the_explicit_product() {
    let d = 3;
    let h: Vec<f64> = (0..20).map(|i| (i as f64 * 1.3).sin()).collect();
    let u1 = unitary_from_hamiltonian(&hermitian(d, &h), 0.5).unwrap();
    let u2 = unitary_from_hamiltonian(&hermitian(d, &h[3..]), 0.9).unwrap();
    let psi = unit_vector(d, &h);
    let s = Arc::new(
        Schedule::pure(
            psi,
            vec![Operator::Dense(u1.clone()), Operator::Dense(u2.clone())],
        )
        .unwrap(),
    );
    let y1 = Operator::indicator([true, true, false]);
    let y2 = Operator::indicator([false, true, true]);
    let expect = y2.to_dense() * &u2 * y1.to_dense() * &u1;
    let h = History::new(s, vec![Arc::new(y1), Arc::new(y2)]).unwrap();
    assert!((chain_operator(&h) - expect)
        .iter()
        .all(|z| z.norm() < 1e-14));
}

#[test]
fn large_unitaries_are_checked_by_probes() {
    let d = 300;
    let h = DMatrix::from_fn(d, d, |i, j| {
        let x = ((i * 7 + j * 13) % 17) as f64 / 17.0 + ((i + j) % 5) as f64 * 0.1;
        c(x, 0.0)
    });
    let h = (&h + h.adjoint()).scale(0.5);
    let u = unitary_from_hamiltonian(&h, 0.3).unwrap();
    assert!(Operator::Dense(u.clone()).check_unitary(1e-12).is_ok());
    let mut broken = u;
    broken[(3, 3)] += c(1e-6, 0.0);
    assert!(Operator::Dense(broken).check_unitary(1e-12).is_err());
}

#[test]
fn mixed_state_validation() {
    let bad_trace = CMatrix::identity(2, 2);
    assert!(Schedule::mixed(bad_trace, vec![]).is_err());
    let not_positive =
        CMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
    assert!(Schedule::mixed(not_positive, vec![]).is_err());
}
