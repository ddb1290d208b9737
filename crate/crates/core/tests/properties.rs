use kronecker_nc::algebra::{FoliationParams, Kronecker, TimeRegistry};
use kronecker_nc::calculus::random_element;
use kronecker_nc::hilbert::{check_equal, Assembled, Geometry, Window};
use kronecker_nc::report::Status;
use kronecker_nc::scalar::Exact;
use kronecker_nc::torus::{random_torus_element, TorusGeometry, TorusParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn geo() -> Geometry<Exact> {
    let p = FoliationParams::pythagorean(3, 4)
        .unwrap()
        .with_generic(true);
    let reg = TimeRegistry::new(&[("T1", 0.7), ("T2", 1.3)]).unwrap();
    Geometry::new(Kronecker::new(p, reg).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_is_associative(seed in any::<u64>()) {
        let g = geo();
        let ctx = g.ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (random_element(ctx, &mut rng, 3, 2), random_element(ctx, &mut rng, 3, 2), random_element(ctx, &mut rng, 3, 2));
        let lhs = ctx.multiply(&ctx.multiply(&x, &y).unwrap(), &z).unwrap();
        let rhs = ctx.multiply(&x, &ctx.multiply(&y, &z).unwrap()).unwrap();
        prop_assert!(ctx.equals(&lhs, &rhs).unwrap());
    }

    #[test]
    fn star_is_an_antimultiplicative_involution(seed in any::<u64>()) {
        let g = geo();
        let ctx = g.ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (random_element(ctx, &mut rng, 3, 2), random_element(ctx, &mut rng, 3, 2));
        let lhs = ctx.star(&ctx.multiply(&x, &y).unwrap());
        let rhs = ctx.multiply(&ctx.star(&y), &ctx.star(&x)).unwrap();
        prop_assert!(ctx.equals(&lhs, &rhs).unwrap());
        prop_assert!(ctx.equals(&ctx.star(&ctx.star(&x)), &x).unwrap());
    }

    #[test]
    fn representation_is_multiplicative(seed in any::<u64>()) {
        let g = geo();
        let ctx = g.ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (random_element(ctx, &mut rng, 3, 2), random_element(ctx, &mut rng, 3, 2));
        let lhs = g.represent(&ctx.multiply(&x, &y).unwrap());
        let rhs = g.represent(&x).compose(&g.represent(&y));
        let r = check_equal("rep", &lhs, &rhs, &Window::new(2).modes(4), g.env(), 0.0);
        prop_assert_eq!(r.status, Status::Exact);
    }

    #[test]
    fn commutator_is_a_derivation(seed in any::<u64>()) {
        let g = geo();
        let ctx = g.ctx();
        let q = g.assemble(Assembled::Qtilde);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (random_element(ctx, &mut rng, 2, 2), random_element(ctx, &mut rng, 2, 2));
        let lhs = g.commutator(&q, &ctx.multiply(&x, &y).unwrap());
        let rhs = g.commutator(&q, &x).compose(&g.represent(&y)).add(&g.represent(&x).compose(&g.commutator(&q, &y)));
        let r = check_equal("leibniz", &lhs, &rhs, &Window::new(2).modes(4), g.env(), 0.0);
        prop_assert_eq!(r.status, Status::Exact);
    }

    #[test]
    fn torus_product_is_associative(seed in any::<u64>(), theta in 0.01f64..0.99) {
        let g = TorusGeometry::<Exact>::new(TorusParams::new(theta).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (random_torus_element(&g, &mut rng), random_torus_element(&g, &mut rng), random_torus_element(&g, &mut rng));
        prop_assert_eq!(g.multiply(&g.multiply(&x, &y), &z), g.multiply(&x, &g.multiply(&y, &z)));
        prop_assert_eq!(g.star(&g.multiply(&x, &y)), g.multiply(&g.star(&y), &g.star(&x)));
    }
}
