use cyclic_hom::cyclic::LambdaMor;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

#[test]
fn random_compositions_are_associative_and_functorial() {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut cache = std::collections::HashMap::new();
    let mut pick = |rng: &mut StdRng, p: usize, n: usize, m: usize| -> LambdaMor {
        let all = cache.entry((p, n, m)).or_insert_with(|| LambdaMor::enumerate(p, n, m));
        all.choose(rng).unwrap().clone()
    };
    for _ in 0..1000 {
        let p = rng.gen_range(1..=3);
        let objs: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=4)).collect();
        let f = pick(&mut rng, p, objs[0], objs[1]);
        let g = pick(&mut rng, p, objs[1], objs[2]);
        let h = pick(&mut rng, p, objs[2], objs[3]);
        let left = f.then(&g).unwrap().then(&h).unwrap();
        let right = f.then(&g.then(&h).unwrap()).unwrap();
        assert_eq!(left, right);
        let fg = f.then(&g).unwrap();
        assert_eq!(fg.functor_i(), f.functor_i().then(&g.functor_i()).unwrap());
        assert_eq!(fg.functor_pi(), f.functor_pi().then(&g.functor_pi()).unwrap());
        assert_eq!(f.then(&LambdaMor::identity(p, objs[1])).unwrap(), f);
        assert_eq!(LambdaMor::identity(p, objs[0]).then(&f).unwrap(), f);
    }
}

#[test]
fn rotation_orders() {
    for p in 1..=3 {
        for n in 1..=5 {
            let tau = LambdaMor::tau(p, n);
            let mut acc = LambdaMor::identity(p, n);
            for k in 1..=p * n {
                acc = acc.then(&tau).unwrap();
                assert_eq!(acc == LambdaMor::identity(p, n), k == p * n);
            }
        }
    }
}
