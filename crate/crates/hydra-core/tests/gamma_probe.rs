use hydra_core::budget::Budget;
use hydra_core::fbc::{gamma_pieces, make_gamma};

#[test]
fn probe_gamma_relations() {
    let b = Budget::default();
    let gamma = make_gamma(1, b).unwrap();
    let full = gamma.full_alphabet().clone();
    let pieces = gamma_pieces(1, &b).unwrap();

    // s = c3 d b3^-1 t
    let s = "c3 d b3^-1 t";
    let s_inv = "t^-1 b3 d^-1 c3^-1";

    // does s^-1 c_i s = psi(c_i) hold, for i = 1 and 5?
    for i in [1u32, 3, 5] {
        let lhs = full
            .parse_word(&format!("{s_inv} c{i} {s}"))
            .unwrap();
        let psi_ci = pieces.psi_images[&hydra_core::word::Generator::C(i)]
            .reinterpret(&full)
            .unwrap();
        let holds = gamma.equal_words(&lhs, &psi_ci).unwrap();
        println!("s^-1 c{i} s = psi(c{i}) : {holds}");
    }

    // the square relation image: s^-1 c3 t^-1 b5 = t^-1 b3 s^-1 c5
    let lhs = full.parse_word(&format!("{s_inv} c3 t^-1 b5")).unwrap();
    let rhs = full.parse_word(&format!("t^-1 b3 {s_inv} c5")).unwrap();
    println!(
        "square relation: {}",
        gamma.equal_words(&lhs, &rhs).unwrap()
    );

    // directly: t d t^-1 vs b5 c5^-1 c3 d b3^-1 (my derivation)
    let lhs = full.parse_word("t d t^-1").unwrap();
    let rhs = full.parse_word("b5 c5^-1 c3 d b3^-1").unwrap();
    println!("t d t^-1 = b5 c5^-1 c3 d b3^-1 : {}", gamma.equal_words(&lhs, &rhs).unwrap());

    // paper-printed variant: b5 c5^-1 c3^-1 d b3^-1?? (from the c3^-1 display)
    let rhs = full.parse_word("b5 c5^-1 c3^-1 d b3^-1").unwrap();
    println!("t d t^-1 = b5 c5^-1 c3^-1 d b3^-1 : {}", gamma.equal_words(&lhs, &rhs).unwrap());
}
