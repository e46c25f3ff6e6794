//! The nine acceptance criteria, one test and one PASS/FAIL line each.

use meridian_lab::verify::run_criterion;

fn criterion(id: u8) {
    let o = run_criterion(id);
    println!("{}", o.summary_line());
    for c in &o.checks {
        println!("    {} {} = {:e} ({})", if c.passed { "ok  " } else { "FAIL" }, c.label, c.value, c.bound);
    }
    assert!(o.passed, "{}", o.summary_line());
}

#[test]
fn criterion_1_oracle_agreement() {
    criterion(1);
}

#[test]
fn criterion_2_harmonic_elliptic() {
    criterion(2);
}

#[test]
fn criterion_3_harmonic_hyperbolic() {
    criterion(3);
}

#[test]
fn criterion_4_first_kind_anchor() {
    criterion(4);
}

#[test]
fn criterion_5_first_kind_ode_profiles() {
    criterion(5);
}

#[test]
fn criterion_6_second_kind_anchor() {
    criterion(6);
}

#[test]
fn criterion_7_linear_profiles() {
    criterion(7);
}

#[test]
fn criterion_8_constant_q_nonexistence() {
    criterion(8);
}

#[test]
fn criterion_9_frame_equations() {
    criterion(9);
}
