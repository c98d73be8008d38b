//! The worked example processes, instantiated with concrete rates.
//!
//! Symbolic rates are fixed as `r = 1`, `s = 2`, `s' = 3`, `u = 4`,
//! `t = s + s' = 5` and the error `ε = 1/10`. The shipped `models/*.json`
//! files carry the same numbers.

use crate::kernel::Kernel;
use crate::rate::{rate, Rate};

pub fn r() -> Rate {
    rate("1")
}
pub fn s() -> Rate {
    rate("2")
}
pub fn s_prime() -> Rate {
    rate("3")
}
pub fn u() -> Rate {
    rate("4")
}
pub fn t() -> Rate {
    rate("5")
}
pub fn epsilon() -> Rate {
    rate("1/10")
}

fn build(states: &[&str], edges: &[(&str, &str, Rate)]) -> Kernel {
    let idx = |name: &str| states.iter().position(|s| *s == name).expect("known state");
    Kernel::new(
        states.iter().copied(),
        edges.iter().map(|(a, b, r)| (idx(a), idx(b), r.clone())),
    )
    .expect("fixture is valid")
}

/// `m` with branches to `m1` (r), `m4` (s) and `m2` (s'); `m2` and `m4` each
/// move at rate `u` to `m3` and `m5`.
pub fn figure1() -> Kernel {
    build(
        &["m", "m1", "m2", "m3", "m4", "m5"],
        &[
            ("m", "m1", r()),
            ("m", "m4", s()),
            ("m", "m2", s_prime()),
            ("m2", "m3", u()),
            ("m4", "m5", u()),
        ],
    )
}

/// `n`: `r+ε` to `n1`, `t+ε` to `n2`, then `u-ε` to `n3`.
pub fn figure3_n() -> Kernel {
    let e = epsilon();
    build(
        &["n", "n1", "n2", "n3"],
        &[
            ("n", "n1", r() + &e),
            ("n", "n2", t() + &e),
            ("n2", "n3", u().checked_sub(&e).unwrap()),
        ],
    )
}

/// `o`: every branch of `m` raised by `ε/3`, second steps raised by `ε`.
pub fn figure3_o() -> Kernel {
    let e = epsilon();
    let third = e.div_int(3);
    build(
        &["o", "o1", "o2", "o3", "o4", "o5"],
        &[
            ("o", "o1", r() + &third),
            ("o", "o2", s_prime() + &third),
            ("o", "o4", s() + &third),
            ("o2", "o3", u() + &e),
            ("o4", "o5", u() + &e),
        ],
    )
}

/// `n`: `r+ε/2` to `n1`, `t+ε/2` to `n2`, then `u-ε` to `n3`.
pub fn figure4_n() -> Kernel {
    let e = epsilon();
    let half = e.div_int(2);
    build(
        &["n", "n1", "n2", "n3"],
        &[
            ("n", "n1", r() + &half),
            ("n", "n2", t() + &half),
            ("n2", "n3", u().checked_sub(&e).unwrap()),
        ],
    )
}

/// `o`: every transition of `m` raised by `ε`.
pub fn figure4_o() -> Kernel {
    let e = epsilon();
    build(
        &["o", "o1", "o2", "o3", "o4", "o5"],
        &[
            ("o", "o1", r() + &e),
            ("o", "o2", s_prime() + &e),
            ("o", "o4", s() + &e),
            ("o2", "o3", u() + &e),
            ("o4", "o5", u() + &e),
        ],
    )
}

/// One state looping on itself at rate `r`.
pub fn single_loop(r: Rate) -> Kernel {
    Kernel::new(["m"], [(0, 0, r)]).expect("fixture is valid")
}
