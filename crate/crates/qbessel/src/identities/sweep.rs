use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::check_identity_form;
use super::report::{Form, IdentityId, IdentityReport, Params};
use crate::error::Result;
use crate::qcore::{QBase, TruncationPolicy};

fn disc<R: Rng>(rng: &mut R, radius: f64, p: &mut Params, key: &str) {
    let r = radius * rng.gen::<f64>().sqrt();
    let th = rng.gen_range(0.0..std::f64::consts::TAU);
    p.insert(key.into(), r * th.cos());
    p.insert(format!("{key}_im"), r * th.sin());
}

fn int<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> f64 {
    rng.gen_range(lo..=hi) as f64
}

/// One random parameter set inside the documented domain of `id`.
pub fn sample_params<R: Rng>(id: IdentityId, q: QBase, rng: &mut R) -> Params {
    let qv = q.value();
    let mut p = Params::new();
    p.insert("q".into(), qv);
    let t_max = (0.95 / qv).min(1.5);
    match id {
        IdentityId::Prop21 => {
            p.insert("n".into(), int(rng, -6, 6));
            disc(rng, 0.9, &mut p, "a");
            disc(rng, 0.9, &mut p, "z");
        }
        IdentityId::Transform27 => {
            disc(rng, 0.95, &mut p, "a");
            disc(rng, 0.95, &mut p, "z");
            loop {
                disc(rng, 0.95, &mut p, "w");
                if p["w"].hypot(p["w_im"]) > 1e-3 {
                    break;
                }
            }
        }
        IdentityId::JacobiOrth => {
            p.insert("m".into(), int(rng, 0, 5));
            p.insert("n".into(), int(rng, 0, 5));
            p.insert("alpha".into(), rng.gen_range(-0.5..3.0));
            p.insert("beta".into(), rng.gen_range(-0.5..3.0));
        }
        IdentityId::KrawtchoukOrth => {
            let n = rng.gen_range(1..=8i64);
            p.insert("N".into(), n as f64);
            p.insert("n".into(), int(rng, 0, n));
            p.insert("m".into(), int(rng, 0, n));
            p.insert("t".into(), rng.gen_range(0.05..t_max));
        }
        IdentityId::LimitJacobiBessel => {
            p.insert("alpha".into(), rng.gen_range(-0.5..2.0));
            p.insert("beta".into(), rng.gen_range(-0.5..2.0));
            p.insert("x".into(), rng.gen_range(0.0..2.0));
            p.insert("n".into(), int(rng, 30, 50));
        }
        IdentityId::LimitKrawtchoukBigBessel => {
            let n = rng.gen_range(0..=5i64);
            p.insert("N".into(), n as f64);
            p.insert("z".into(), int(rng, 0, n));
            p.insert("x".into(), int(rng, 0, n));
            p.insert("t".into(), rng.gen_range(0.05..t_max));
            p.insert("m".into(), 40.0);
        }
        IdentityId::FlorisKoelinkAddition | IdentityId::JacobiAddition => {
            let l = rng.gen_range(0..=3i64);
            let n = rng.gen_range(l..=6);
            p.insert("l".into(), l as f64);
            if id == IdentityId::FlorisKoelinkAddition {
                p.insert("m".into(), int(rng, 0, 3));
            }
            p.insert("N".into(), n as f64);
            p.insert("z".into(), int(rng, 0, n - l));
            p.insert("x".into(), int(rng, 0, n));
            p.insert("nu".into(), rng.gen_range(0.2..3.0));
            p.insert("t".into(), rng.gen_range(0.1..t_max));
        }
        IdentityId::Theorem41 | IdentityId::Corollary43 => loop {
            let l = if id == IdentityId::Theorem41 {
                rng.gen_range(0..=1i64)
            } else {
                0
            };
            let z = rng.gen_range(0..=2i64);
            let t: f64 = rng.gen_range(0.1..t_max);
            if t * qv.powi((z - l) as i32) >= 0.9 {
                continue;
            }
            if id == IdentityId::Theorem41 {
                p.insert("l".into(), l as f64);
            }
            p.insert("z".into(), z as f64);
            let n = rng.gen_range(z.max(1)..=z + 3);
            p.insert("N".into(), n as f64);
            p.insert("x".into(), int(rng, 0, n));
            p.insert("nu".into(), rng.gen_range(0.3..3.0));
            p.insert("t".into(), t);
            break;
        },
        IdentityId::AdditionNInfinity => loop {
            let z = rng.gen_range(0..=2i64);
            let mu: f64 = rng.gen_range(-0.5..2.0);
            if (z as f64) + mu <= 0.2 {
                continue;
            }
            p.insert("z".into(), z as f64);
            p.insert("mu".into(), mu);
            p.insert("x".into(), int(rng, 0, 3));
            p.insert("nu".into(), rng.gen_range(0.3..3.0));
            break;
        },
        IdentityId::Prop51 => {
            p.insert("m".into(), int(rng, 0, 2));
            p.insert("z".into(), int(rng, 0, 2));
            p.insert("k".into(), int(rng, 0, 2));
            p.insert("y".into(), int(rng, 0, 2));
            p.insert("nu".into(), rng.gen_range(0.5..3.0));
            p.insert("t".into(), rng.gen_range(0.1..t_max));
            p.insert("window".into(), 10.0);
        }
        IdentityId::ProductFormula52 => {
            p.insert("x".into(), int(rng, 0, 3));
            p.insert("y".into(), int(rng, 0, 3));
            p.insert("nu".into(), *[0.5, 1.0, 1.5, 2.0, 3.0].choose(rng).expect("nonempty"));
        }
        IdentityId::KernelSymmetry | IdentityId::KernelPositivity => {
            p.insert("x".into(), int(rng, 0, 4));
            p.insert("y".into(), int(rng, 0, 4));
            let z_lo = if id == IdentityId::KernelPositivity { -4 } else { 0 };
            p.insert("z".into(), int(rng, z_lo, if z_lo < 0 { 10 } else { 4 }));
            p.insert("nu".into(), rng.gen_range(0.3..3.0));
            if id == IdentityId::KernelSymmetry {
                p.insert("swap".into(), int(rng, 0, 1));
            }
        }
        IdentityId::Bound24 => {
            p.insert("alpha".into(), rng.gen_range(0.05..3.0));
            p.insert("n".into(), int(rng, 0, 30));
        }
        IdentityId::Bound25 => {
            p.insert("m".into(), int(rng, 0, 10));
            p.insert("n".into(), int(rng, 0, 15));
        }
        IdentityId::BoundLemma42 => {
            let r = rng.gen_range(0..=7i64);
            let n = rng.gen_range(0..=7i64);
            p.insert("r".into(), r as f64);
            p.insert("s".into(), int(rng, 0, r));
            p.insert("N".into(), n as f64);
            p.insert("z".into(), int(rng, 0, n));
            p.insert("nu".into(), rng.gen_range(0.1..3.0));
        }
        IdentityId::BoundProp32 => {
            let n = rng.gen_range(0..=8i64);
            p.insert("N".into(), n as f64);
            p.insert("z".into(), int(rng, 0, n));
            p.insert("t".into(), rng.gen_range(0.05..t_max));
            p.insert("x".into(), rng.gen_range(-2.0..6.0));
        }
    }
    p
}

/// `count` seeded random instances of `id`, evaluated in parallel and
/// returned in sampling order. Parameter sequences depend only on `seed`.
pub fn sweep(
    id: IdentityId,
    form: Form,
    count: usize,
    seed: u64,
    q: QBase,
    policy: &TruncationPolicy,
    tol: f64,
) -> Result<Vec<IdentityReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<Params> = (0..count).map(|_| sample_params(id, q, &mut rng)).collect();
    params
        .par_iter()
        .map(|p| check_identity_form(id, form, p, policy, tol))
        .collect()
}
