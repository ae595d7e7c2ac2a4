use hydra_core::budget::Budget;
use hydra_core::endo::FreeEndo;
use hydra_core::word::{Alphabet, Generator, Word};
use std::collections::BTreeMap;
use std::sync::Arc;

fn lot_images(al: &Arc<Alphabet>, gen: fn(u32) -> Generator) -> BTreeMap<Generator, Word> {
    let mut images = BTreeMap::new();
    for i in 1..=7u32 {
        let raw: Vec<(Generator, i64)> = (i..=8).map(|j| (gen(j), 1)).collect();
        images.insert(gen(i), Word::from_runs(al, &raw).unwrap());
    }
    let mut raw: Vec<(Generator, i64)> = (1..=8u32).rev().map(|j| (gen(j), -1)).collect();
    raw.push((gen(8), 1));
    images.insert(gen(8), Word::from_runs(al, &raw).unwrap());
    images
}

#[test]
fn probe_alternative_d_row() {
    let budget = Budget::default();
    let mut gens: Vec<Generator> = (1..=8).map(Generator::B).collect();
    gens.extend((1..=8).map(Generator::C));
    gens.push(Generator::D);
    let bcd = Alphabet::new(gens);
    let phi_images = lot_images(&bcd, Generator::B);
    let psi_images = lot_images(&bcd, Generator::C);
    let phi = |i: u32| phi_images[&Generator::B(i)].clone();
    let psi = |i: u32| psi_images[&Generator::C(i)].clone();
    let d = Word::single(&bcd, Generator::D, 1).unwrap();

    // candidate from the square-relation fixed point:
    // theta(d) = phi(b5)^-1 d psi(c5) psi(c3)^-1 phi(b3)
    let theta_d = phi(5)
        .inverse()
        .concat(&d).unwrap()
        .concat(&psi(5)).unwrap()
        .concat(&psi(3).inverse()).unwrap()
        .concat(&phi(3)).unwrap();

    // w = psi(c3)^-1 theta(b3) theta(d)^-1
    let w = psi(3)
        .inverse()
        .concat(&phi(3)).unwrap()
        .concat(&theta_d.inverse()).unwrap();
    println!("w = {}", w.render());

    let mut theta_images = phi_images.clone();
    theta_images.insert(Generator::D, theta_d);
    for i in 1..=8u32 {
        let img = w.inverse().concat(&psi(i)).unwrap().concat(&w).unwrap();
        theta_images.insert(Generator::C(i), img);
    }
    let theta_bcd = FreeEndo::new(&bcd, theta_images).unwrap();
    // is it an automorphism?
    match theta_bcd.invert(&budget) {
        Ok(_) => println!("theta_bcd with alternative d-row: automorphism"),
        Err(e) => println!("theta_bcd with alternative d-row: NOT automorphism ({e})"),
    }

    // build the k=1 group inline and check square + hexagon-ish pieces
    let k = 1u32;
    let u_seed = bcd.parse_word("c7^-1 c3 d b3^-1").unwrap();
    let v_seed = bcd.parse_word("b3 d^-1 c3^-1 c1").unwrap();
    let u = theta_bcd.power_apply(k as i64, &u_seed, &budget).unwrap();
    let v = theta_bcd.power_apply(k as i64, &v_seed, &budget).unwrap();

    let mut gens: Vec<Generator> = (0..=k).map(Generator::A).collect();
    gens.extend(bcd.generators().iter().copied());
    let f = Alphabet::new(gens);
    let mut images = BTreeMap::new();
    images.insert(
        Generator::A(0),
        u.reinterpret(&f).unwrap()
            .concat(&Word::single(&f, Generator::A(1), 1).unwrap()).unwrap()
            .concat(&v.reinterpret(&f).unwrap()).unwrap(),
    );
    images.insert(Generator::A(1), Word::single(&f, Generator::A(0), 1).unwrap());
    for &g in bcd.generators() {
        images.insert(g, theta_bcd.image(g).unwrap().reinterpret(&f).unwrap());
    }
    let theta = FreeEndo::new(&f, images).unwrap().invert(&budget).unwrap();

    // normal-form equality through direct theta-folding
    let full = {
        let mut gens = f.generators().to_vec();
        gens.push(Generator::T);
        Alphabet::new(gens)
    };
    let nf = |text: &str| -> (i64, String) {
        let wd = full.parse_word(text).unwrap();
        let mut t_exp = 0i64;
        let mut body = Word::empty(&f);
        for &(g, e) in wd.runs() {
            if g == Generator::T {
                t_exp += e;
                body = theta.power_apply(e, &body, &budget).unwrap();
            } else {
                body = body.concat(&Word::single(&f, g, e).unwrap()).unwrap();
            }
        }
        (t_exp, body.render())
    };
    // square: s^-1 c3 t^-1 b5 = t^-1 b3 s^-1 c5 with s = c3 d b3^-1 t
    let lhs = nf("t^-1 b3 d^-1 c3^-1 c3 t^-1 b5");
    let rhs = nf("t^-1 b3 t^-1 b3 d^-1 c3^-1 c5");
    println!("square holds: {}", lhs == rhs);
    // hexagon with alpha_1 -> u_{k-1} = a_1 (k=1): alpha1 gamma1 tau = tau gamma7 alpha1
    // alpha1 -> a1, gamma_i -> s^-1 c_i, tau -> t^-1
    let lhs = nf("a1 t^-1 b3 d^-1 c3^-1 c1 t^-1");
    let rhs = nf("t^-1 t^-1 b3 d^-1 c3^-1 c7 a1");
    println!("hexagon holds: {}", lhs == rhs);
}
