use ene_core::morphology::*;
use ene_core::trapstates::*;
use ene_core::util::derive_seed;

fn main() {
    let t0 = std::time::Instant::now();
    let window = SynthWindow::default();
    let si_params = SiEtchParams::default();
    let sap_params = SapphireParams::default();
    let film = FilmGrowthParams::default();
    let master = 42u64;
    let n_seeds = 20;

    let mut si = Vec::new();
    let mut sap = Vec::new();
    for k in 0..n_seeds {
        let s1 = synth_substrate(SubstrateKind::SiEtched, &window, &si_params, &sap_params,
            derive_seed(master, "si-substrate", k)).unwrap();
        si.push(grow_film(&s1, &film, derive_seed(master, "si-film", k)).unwrap());
        let s2 = synth_substrate(SubstrateKind::SapphireSmooth, &window, &si_params, &sap_params,
            derive_seed(master, "sapphire-substrate", k)).unwrap();
        sap.push(grow_film(&s2, &film, derive_seed(master, "sapphire-film", k)).unwrap());
    }
    let opts = ContrastOptions::default();
    let summary = morphology_contrast(&si, &sap, &opts).unwrap();
    println!("elapsed: {:?}", t0.elapsed());
    println!("si seed fraction: {:.2}", summary.si_seed_fraction);
    println!("sapphire seed fraction: {:.2}", summary.sapphire_seed_fraction);
    println!("contrast: {}", summary.contrast);
    // per-field breakdown
    for (kind, entries) in [("si", &summary.si_like), ("sapphire", &summary.sapphire_like)] {
        print!("{kind:>9}: ");
        for &f in &opts.f_perp {
            let hits = entries.iter().filter(|e| e.f_perp == f && e.in_band).count();
            print!("{hits:>3}");
        }
        println!("   (hits per F over {n_seeds} seeds)");
    }
    print!("   fields: ");
    for &f in &opts.f_perp { print!("{:>3.0}", f.log10()*10.0); }
    println!("   (10*log10 F)");
    // sample some sapphire in-band details if any
    for e in summary.sapphire_like.iter().filter(|e| e.in_band).take(5) {
        println!("sapphire hit: seed {} F {:.2e} n_bound {} f01 {:?} mu01_eA {:?}",
            e.profile_index, e.f_perp, e.n_bound,
            e.f01.map(|f| f/1e9), e.mu01.map(ene_core::consts::dipole_to_e_angstrom));
    }
}
