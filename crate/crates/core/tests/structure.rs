mod common;

use common::{maps_onto, to_mat, transitions};
use mdiqkd_core::opsets::{
    build_catalog, check_well_defined, coding_bit, CatalogKind, Cell, CodingScheme, OperatorCatalog, OperatorLabel,
};
use mdiqkd_core::qmath::{BasisLabel, RandomStream, Unitary};
use rand::Rng;

fn labels(cat: &OperatorCatalog) -> Vec<String> {
    cat.labels().map(|l| l.to_string()).collect()
}

#[test]
fn six_state_partition_over_all_cells() {
    let cat = build_catalog(CatalogKind::SixState, None).unwrap();
    let cells = cat.cells();
    assert_eq!(cells.len(), 9);
    for cell in &cells {
        let kept: Vec<_> = cat.kept_in(*cell).unwrap();
        assert_eq!(kept.len(), 8, "{cell:?}");
        let oracle = cat
            .entries()
            .iter()
            .filter(|e| maps_onto(&to_mat(&e.unitary), cell.source, cell.target))
            .count();
        assert_eq!(oracle, 8);
    }
    // each operator lands in exactly one target per source
    for e in cat.entries() {
        for s in [BasisLabel::Z, BasisLabel::X, BasisLabel::Y] {
            let hits = [BasisLabel::Z, BasisLabel::X, BasisLabel::Y]
                .iter()
                .filter(|t| cat.is_kept(&e.label, Cell::new(s, **t)).unwrap())
                .count();
            assert_eq!(hits, 1);
        }
    }
    let zz: Vec<String> = cat
        .kept_in(Cell::new(BasisLabel::Z, BasisLabel::Z))
        .unwrap()
        .iter()
        .map(|l| l.to_string())
        .collect();
    assert_eq!(zz, ["I", "X", "Z", "XZ", "H2", "H2X", "H2Z", "H2XZ"]);
}

#[test]
fn general_validity_table_for_random_angles() {
    let mut rng = RandomStream::from_seed(31);
    let expected: [(&[&str], [[bool; 2]; 2]); 6] = [
        (&["I", "XZ"], [[true, false], [false, true]]),
        (&["U", "UXZ"], [[false, true], [true, false]]),
        (&["X", "Z"], [[true, false], [false, false]]),
        (&["UX", "UZ"], [[false, true], [false, false]]),
        (&["XU", "ZU"], [[false, false], [true, false]]),
        (&["UXU", "UZU"], [[false, false], [false, true]]),
    ];
    for _ in 0..10 {
        // keep away from the BB84 angle where the table collapses
        let theta = loop {
            let t = rng.random_range(0.05..std::f64::consts::FRAC_PI_2 - 0.05);
            if (t - std::f64::consts::FRAC_PI_4).abs() > 0.05 {
                break t;
            }
        };
        let cat = build_catalog(CatalogKind::General, Some(theta)).unwrap();
        let b = [BasisLabel::Z, BasisLabel::General(theta)];
        for (names, table) in expected {
            for name in names {
                let op: OperatorLabel = name.parse().unwrap();
                let u = to_mat(&cat.entry(cat.index_of(&op).unwrap()).unitary);
                for s in 0..2 {
                    for t in 0..2 {
                        assert_eq!(cat.is_kept(&op, Cell::new(b[s], b[t])).unwrap(), table[s][t], "{name} θ={theta}");
                        assert_eq!(maps_onto(&u, b[s], b[t]), table[s][t], "oracle {name} θ={theta}");
                    }
                }
            }
        }
        assert_eq!(labels(&cat).len(), 12);
    }
}

#[test]
fn general_at_quarter_pi_reduces_to_hadamard() {
    let cat = build_catalog(CatalogKind::General, Some(std::f64::consts::FRAC_PI_4)).unwrap();
    let u = &cat.entry(cat.index_of(&"U".parse().unwrap()).unwrap()).unitary;
    assert!(u.approx_eq(&Unitary::hadamard(), 1e-12));
}

#[test]
fn u_is_an_involution() {
    let mut rng = RandomStream::from_seed(32);
    for _ in 0..100 {
        let theta = rng.random_range(1e-3..std::f64::consts::FRAC_PI_2 - 1e-3);
        let cat = build_catalog(CatalogKind::General, Some(theta)).unwrap();
        let u = &cat.entry(cat.index_of(&"U".parse().unwrap()).unwrap()).unitary;
        assert!(u.mul(u).unwrap().approx_eq(&Unitary::identity(2), 1e-12));
    }
}

#[test]
fn bb84_matrices_span_two_dimensions() {
    // stack the four operators as vectors in C^4 and row-reduce
    let cat = build_catalog(CatalogKind::Bb84Four, None).unwrap();
    let mut rows: Vec<Vec<_>> = cat.entries().iter().map(|e| e.unitary.entries().to_vec()).collect();
    let mut rank = 0;
    for col in 0..4 {
        let Some(p) = (rank..rows.len()).max_by(|&a, &b| rows[a][col].norm().total_cmp(&rows[b][col].norm())) else {
            break;
        };
        if rows[p][col].norm() < 1e-12 {
            continue;
        }
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank {
                let f = row[col] / pivot[col];
                for k in 0..4 {
                    row[k] -= f * pivot[k];
                }
            }
        }
        rank += 1;
    }
    assert_eq!(rank, 2);
}

/// Exhaustive: two kept operators whose outcome statistics agree on both legal
/// inputs of the cell must carry the same bit.
fn assert_well_defined(cat: &OperatorCatalog, scheme: CodingScheme) {
    assert!(check_well_defined(cat, scheme).is_empty());
    for cell in cat.cells() {
        let kept = cat.kept_in(cell).unwrap();
        for a in &kept {
            for b in &kept {
                let ua = to_mat(&cat.entry(cat.index_of(a).unwrap()).unitary);
                let ub = to_mat(&cat.entry(cat.index_of(b).unwrap()).unitary);
                let (ta, tb) = (
                    transitions(&ua, cell.source, cell.target),
                    transitions(&ub, cell.source, cell.target),
                );
                let same = (0..2).all(|j| (0..2).all(|k| (ta[j][k] - tb[j][k]).abs() < 1e-9));
                if same {
                    assert_eq!(
                        coding_bit(scheme, cat, a, cell).unwrap(),
                        coding_bit(scheme, cat, b, cell).unwrap(),
                        "{:?} {a} {b} {cell:?}",
                        cat.kind()
                    );
                }
            }
        }
    }
}

#[test]
fn default_coding_is_well_defined_everywhere() {
    for kind in CatalogKind::ALL {
        let cat = build_catalog(kind, (kind == CatalogKind::General).then_some(0.4)).unwrap();
        assert_well_defined(&cat, CodingScheme::default_for(kind));
        assert_well_defined(&cat, CodingScheme::FlipParityPerCell);
    }
    let cat = build_catalog(CatalogKind::Bb84Four, None).unwrap();
    assert_well_defined(&cat, CodingScheme::FixedPerOperator);
}

#[test]
fn fixed_coding_breaks_bb84_eight_in_xx() {
    let cat = build_catalog(CatalogKind::Bb84Eight, None).unwrap();
    let v = check_well_defined(&cat, CodingScheme::FixedPerOperator);
    assert!(v.iter().any(|x| x.cell == Cell::new(BasisLabel::X, BasisLabel::X)));
}

#[test]
fn every_kept_cell_carries_both_bits() {
    for kind in CatalogKind::ALL {
        let cat = build_catalog(kind, (kind == CatalogKind::General).then_some(0.4)).unwrap();
        let scheme = CodingScheme::default_for(kind);
        for cell in cat.cells() {
            let bits: Vec<u8> = cat
                .kept_in(cell)
                .unwrap()
                .iter()
                .map(|op| coding_bit(scheme, &cat, op, cell).unwrap())
                .collect();
            if !bits.is_empty() {
                assert!(bits.contains(&0) && bits.contains(&1), "{kind} {cell:?}");
            }
        }
    }
}
