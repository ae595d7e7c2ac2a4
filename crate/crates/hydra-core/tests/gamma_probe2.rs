use hydra_core::budget::Budget;
use hydra_core::fbc::make_gamma;

#[test]
fn probe_d_conjugate() {
    let b = Budget::default();
    let gamma = make_gamma(1, b).unwrap();
    let full = gamma.full_alphabet().clone();
    let lhs = gamma.nf_str("t d t^-1").unwrap();
    println!("t d t^-1 body      = {}", lhs.body.render());
    let rhs = gamma.nf_str("b5 c5^-1 c3 d b3^-1").unwrap();
    println!("b5 c5^-1 c3 d b3^-1 = {}", rhs.body.render());
    let _ = full;
}
