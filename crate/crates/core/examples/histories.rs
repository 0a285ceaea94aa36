//! Consistent histories on a decaying two-level system and on the
//! discretized apparatus.
//!
//! ```text
//! cargo run --release --example histories
//! ```

use std::sync::Arc;

use num_complex::Complex64;
use qrel::histories::{
    check_consistency, survival_and_lifetime, unitary_from_hamiltonian, CMatrix, CVector,
    HistoryFamily, Operator, Schedule,
};
use qrel::model::ModelParams;
use qrel::oracle::discretize_pipeline;
use qrel::reliability::measurement_pipeline;

fn main() -> qrel::Result<()> {
    // Rabi flopping checked against |0> at four equally spaced times. The
    // failure histories interfere, so no probabilities exist.
    let h = CMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0].map(|x| Complex64::new(x, 0.0)));
    let u = Operator::Dense(unitary_from_hamiltonian(&h, 0.4)?);
    let psi = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let schedule = Arc::new(Schedule::pure(psi.clone(), vec![u.clone(); 4])?);
    let stay = Operator::indicator([true, false]);
    let fam = HistoryFamily::theta(schedule, vec![stay.clone(); 4])?;
    let report = check_consistency(&fam, 1e-8)?;
    println!("two-level: max off-diagonal {:.3e}", report.max_violation);
    match survival_and_lifetime(&fam) {
        Ok(s) => println!(
            "  R(t) = {:?}\n  lifetime pmf = {:?}",
            s.r_of_t, s.lifetime_pmf
        ),
        Err(e) => println!("  no probabilities: {e}"),
    }
    let single = Arc::new(Schedule::pure(psi, vec![u])?);
    let s = survival_and_lifetime(&HistoryFamily::theta(single, vec![stay])?)?;
    println!("one checkpoint: R = {:.6}", s.r_of_t[0]);

    let p = ModelParams::default().with_k0_b(12.0, 36.0);
    let d = discretize_pipeline(&p, 1024)?;
    let report = check_consistency(&d.family, 1e-8)?;
    let w = d.family.weights();
    println!(
        "\napparatus (dim 1024): consistent = {}, W(F1) = {:.6}, W(F2) = {:.6}, W(R) = {:.6}",
        report.consistent, w[0], w[1], w[2]
    );
    println!("closed-form R = {:.6}", measurement_pipeline(&p)?.r);
    Ok(())
}
