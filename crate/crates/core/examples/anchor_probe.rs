use ene_core::consts::*;
use ene_core::fieldsolver::SolveOptions;
use ene_core::geometry::{CrossSectionGeometry, GridSpec, Mode};
use ene_core::resonator::{coupling_ratio, solve_mode, CouplingInputs};

fn main() {
    let geom = CrossSectionGeometry::si_default().with_trench_depth(75e-9);
    let t0 = std::time::Instant::now();
    let sol = solve_mode(&geom, Mode::Differential, &GridSpec::default(), &SolveOptions::default(), 5e-9).unwrap();
    println!("solve took {:?}", t0.elapsed());
    println!("Etilde middle = {:.6e} 1/m", sol.etilde_middle);
    println!("Etilde side   = {:.6e} 1/m", sol.etilde_side);
    println!("C  = {:.6e} F/m   C0 = {:.6e} F/m   Zr = {:.3} Ohm", sol.c, sol.c0, sol.z_r);
    let omega = 2.0 * std::f64::consts::PI * 4.9251e9;
    let g_over_omega = coupling_ratio(&CouplingInputs {
        mu: dipole_from_e_angstrom(30.0),
        omega,
        kappa: 1.0,
        etilde: sol.etilde_middle,
        z_r: sol.z_r,
    });
    println!("g/2pi = {:.4} MHz  (window [1.01, 4.04])", g_over_omega * 4.9251e9 / 1e6);

    let cm = solve_mode(&geom, Mode::Common, &GridSpec::default(), &SolveOptions::default(), 5e-9).unwrap();
    println!("CM: Etilde_mid={:.3e}  Etilde_side={:.3e}  Zr={:.3}", cm.etilde_middle, cm.etilde_side, cm.z_r);
    println!("CM/DM middle ratio = {:.4}", cm.etilde_middle / sol.etilde_middle);
    println!("CM/DM side ratio   = {:.4}", cm.etilde_side / sol.etilde_side);
}
