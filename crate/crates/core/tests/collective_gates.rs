// Gate programs on multi-atom ensembles. The microwave phase reference is
// calibrated once per ensemble size; afterwards the simulated logical action
// must match the ideal matrices entrywise for N > 1 as well.

use std::f64::consts::FRAC_PI_2;

use superatom_core::gates::{
    action_deviation, calibrate_mw_phase, cnot_type, hadamard, not_x, simulated_logical_action,
    single_qubit_rotation, GateTiming,
};
use superatom_core::propagator::EvolveOptions;
use superatom_core::build_basis;

fn opts() -> EvolveOptions {
    EvolveOptions::with_tol(1e-9).samples(2)
}

#[test]
fn calibrated_gates_hold_for_two_atom_ensembles() {
    let opts = opts();
    let t1 = calibrate_mw_phase(&GateTiming::long_pulse(), 1, &opts).unwrap();
    let t2 = calibrate_mw_phase(&GateTiming::long_pulse(), 2, &opts).unwrap();
    println!(
        "mw phase ref: N=1 {:+.5} rad, N=2 {:+.5} rad",
        t1.mw_phase_ref, t2.mw_phase_ref
    );
    let basis = build_basis(&[2]).unwrap();
    for prog in [
        hadamard(&t2, 0).unwrap(),
        not_x(&t2, 0).unwrap(),
        single_qubit_rotation(FRAC_PI_2, 0.3, &t2, 0).unwrap(),
    ] {
        let u = simulated_logical_action(&basis, &prog, &opts).unwrap();
        let dev = action_deviation(&u, &prog.ideal);
        println!("N=2 {}: deviation {dev:.2e}", prog.name);
        assert!(dev < 1e-3, "{}: deviation {dev:.2e}", prog.name);
    }
}

#[test]
fn cnot_with_two_atom_control_matches_ideal() {
    let opts = opts();
    // the sandwiched pulse acts on the target ensemble (N = 1 here)
    let t = calibrate_mw_phase(&GateTiming::long_pulse(), 1, &opts).unwrap();
    let basis = build_basis(&[2, 1]).unwrap();
    let prog = cnot_type(&t).unwrap();
    let u = simulated_logical_action(&basis, &prog, &opts).unwrap();
    let dev = action_deviation(&u, &prog.ideal);
    println!("(2,1) cnot_type deviation {dev:.2e}");
    assert!(dev < 1e-3, "deviation {dev:.2e}");
}
