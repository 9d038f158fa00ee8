use meshpush::mesh::{make_icosphere, Vec3};
use meshpush::pushing::{push_step, DeformStep, PushConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
fn main() {
    let m = make_icosphere(1).unwrap();
    let cfg = PushConfig::default().resolved(&m);
    let mut found = 0; let mut tried=0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: [f64; 3] = UnitSphere.sample(&mut rng);
        let dmin: Vec<f64> = (0..m.num_vertices()).map(|_| if rng.random::<f64>()<0.3 {rng.random_range(0.0..1.5)} else {0.0}).collect();
        let base = match push_step(&m, &DeformStep::new(Vec3::from(u), dmin.clone()), &cfg) { Ok(r)=>r, Err(_)=>continue };
        for v in 0..m.num_vertices() {
            let mut d2 = dmin.clone(); d2[v] += 0.5;
            let Ok(r) = push_step(&m, &DeformStep::new(Vec3::from(u), d2), &cfg) else {continue};
            tried+=1;
            let drop = base.d.iter().zip(&r.d).map(|(a,b)| a-b).fold(0.0f64, f64::max);
            if drop > 1e-6 { found+=1; if found<5 {println!("seed {seed} v {v} drop {drop}");} }
        }
    }
    println!("found {found} of {tried}");
}
