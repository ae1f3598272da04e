use sicframe::heisenberg::{parity_operator, zauner7_operator, HWGroup, OrbitIndex};
use sicframe::numcore::{inner, phase_ratio, sample_fs};
use sicframe::RngStream;

#[test]
fn displacements_compose_up_to_phase() {
    for n in 2..=8 {
        let g = HWGroup::new(n).unwrap();
        let all: Vec<_> = OrbitIndex::all(n).map(|k| (k, g.displacement(k))).collect();
        for (a, da) in &all {
            assert!(da.unitarity_defect() <= 1e-12);
            for (b, db) in &all {
                let product = da.mul(db).unwrap();
                let target = g.displacement(a.add(*b, n));
                let phase = phase_ratio(&product, &target, 1e-10)
                    .unwrap_or_else(|| panic!("N={n} {a:?}*{b:?}"));
                assert!((phase.norm() - 1.0).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn orbit_overlaps_depend_only_on_index_difference() {
    let mut rng = RngStream::new(5, 0);
    for n in 2..=6 {
        let g = HWGroup::new(n).unwrap();
        let orbit = g.orbit(&sample_fs(n, &mut rng)).unwrap();
        let idx: Vec<_> = OrbitIndex::all(n).collect();
        for (x, ix) in idx.iter().enumerate() {
            for (y, iy) in idx.iter().enumerate() {
                let diff = iy.add(ix.neg(n), n);
                let base = idx.iter().position(|k| *k == diff).unwrap();
                let lhs = inner(&orbit[x], &orbit[y]).unwrap().norm();
                let rhs = inner(&orbit[0], &orbit[base]).unwrap().norm();
                assert!((lhs - rhs).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn clifford_elements_normalize_the_group() {
    let mut cases = vec![zauner7_operator()];
    for n in [3, 5, 7, 9] {
        cases.push(parity_operator(n).unwrap());
    }
    for u in cases {
        let n = u.dim();
        let g = HWGroup::new(n).unwrap();
        for k in OrbitIndex::all(n) {
            let image = u.conjugate(&g.displacement(k)).unwrap();
            let hits = OrbitIndex::all(n)
                .filter(|&m| phase_ratio(&image, &g.displacement(m), 1e-10).is_some())
                .count();
            assert_eq!(hits, 1, "{:?} N={n} {k:?}", u.kind());
        }
    }
}

#[test]
fn eigenspace_dimensions_add_up() {
    for n in [3, 5, 7, 9, 11] {
        let dims = parity_operator(n).unwrap().eigenspace_dims();
        assert_eq!(dims, vec![n.div_ceil(2), n / 2]);
    }
    assert_eq!(zauner7_operator().eigenspace_dims(), vec![3, 2, 2]);
}
