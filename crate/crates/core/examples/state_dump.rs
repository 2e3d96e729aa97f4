use ene_core::consts::*;
use ene_core::morphology::*;
use ene_core::trapstates::*;
use ene_core::util::derive_seed;

fn main() {
    let window = SynthWindow::default();
    let master = 42u64;
    let sub = synth_substrate(SubstrateKind::SapphireSmooth, &window, &SiEtchParams::default(),
        &SapphireParams::default(), derive_seed(master, "sapphire-substrate", 0)).unwrap();
    let profile = grow_film(&sub, &FilmGrowthParams::default(), derive_seed(master, "sapphire-film", 0)).unwrap();
    let opts = ContrastOptions::default();
    for f in [1e4, 3.16e4] {
        println!("== F = {f:.2e} V/m ==");
        let pot = effective_potential(&profile, f).unwrap();
        let s = solve_bound_states_refining(&pot, 20, 4).unwrap();
        println!("threshold = {:.3} GHz, n_bound = {}", s.escape_threshold/PLANCK/1e9, s.n_bound);
        let center = |i: usize| -> f64 {
            let psi = &s.wavefunctions[i];
            let mut m = 0.0;
            for k in 0..psi.len() { m += psi[k]*psi[k]*s.dx*s.x(k); }
            m
        };
        let dip = |i: usize, j: usize| ELEMENTARY_CHARGE * s.position_element(i,j).abs();
        let confined: Vec<bool> = (0..s.energies.len()).map(|i| s.spread(i) <= opts.max_spread).collect();
        for i in 0..s.n_bound {
            if !confined[i] { continue; }
            if (0..i).any(|k| dip(k,i) >= opts.min_dipole) { continue; }
            for j in i+1..s.n_bound {
                if !confined[j] { continue; }
                let fq = (s.energies[j]-s.energies[i])/PLANCK;
                if fq >= 1e9 && fq <= 1e10 && dip(i,j) >= opts.min_dipole {
                    println!("TRIGGER pair ({i},{j}): E_i={:.3} E_j={:.3} GHz f={:.2} GHz mu={:.1} eA",
                        s.energies[i]/PLANCK/1e9, s.energies[j]/PLANCK/1e9, fq/1e9, dipole_to_e_angstrom(dip(i,j)));
                    println!("  state {i}: center {:.0} nm spread {:.0} nm", center(i)*1e9, s.spread(i)*1e9);
                    println!("  state {j}: center {:.0} nm spread {:.0} nm", center(j)*1e9, s.spread(j)*1e9);
                    // potential landscape around the pair
                    let c = center(i);
                    let i0 = (((c - 300e-9) - pot.x0)/pot.dx).max(0.0) as usize;
                    let i1 = ((((c + 300e-9) - pot.x0)/pot.dx) as usize).min(pot.len()-1);
                    let vmin = pot.v[i0..i1].iter().cloned().fold(f64::INFINITY, f64::min);
                    let vmax = pot.v[i0..i1].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    println!("  local V range (+-300nm): [{:.2}, {:.2}] GHz", vmin/PLANCK/1e9, vmax/PLANCK/1e9);
                }
            }
        }
    }
}
