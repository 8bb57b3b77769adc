use blowdown::catalog::{donaldson_closed_form, parse_spec, sw_closed_form, witten_catalog};
use blowdown::lattice::{basis_convert, boundary, plumbing_matrix, rel_pairing, Basis, RelClassCp};
use blowdown::moduli::dim_moduli;
use blowdown::rational::{rat, to_i64};
use blowdown::swinv::{witten_check, SWMap};
use blowdown::transform::ManifoldSeries;
use proptest::prelude::*;

fn rel_class() -> impl Strategy<Value = RelClassCp> {
    (2i64..=6).prop_flat_map(|p| {
        prop::collection::vec(-4i64..=4, (p - 1) as usize)
            .prop_map(move |d| RelClassCp::new(p, d).unwrap())
    })
}

fn shift(e: &RelClassCp, z: &[i64]) -> RelClassCp {
    let pm = plumbing_matrix(e.p).unwrap();
    let gamma: Vec<i64> = e
        .gamma()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let row: i64 = (0..z.len())
                .map(|j| to_i64(&(&pm[i][j] * rat(z[j]))).unwrap())
                .sum();
            g + row
        })
        .collect();
    RelClassCp::from_coords(e.p, gamma, Basis::Gamma).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn equal_boundary_dimension_difference(e in rel_class(), z in prop::collection::vec(-2i64..=2, 5)) {
        let z = &z[..(e.p - 1) as usize];
        let e2 = shift(&e, z);
        prop_assert_eq!(boundary(&e), boundary(&e2));
        let sq = rel_pairing(&e, &e).unwrap();
        let sq2 = rel_pairing(&e2, &e2).unwrap();
        let lhs = rat(dim_moduli(&e2).unwrap() - dim_moduli(&e).unwrap());
        prop_assert_eq!(lhs, rat(-2) * (sq2 - sq));
    }

    #[test]
    fn dimension_is_even_under_negation(e in rel_class()) {
        prop_assert_eq!(dim_moduli(&e.neg()).unwrap(), dim_moduli(&e).unwrap());
    }

    #[test]
    fn boundary_is_basis_independent(e in rel_class()) {
        let via_gamma = RelClassCp::from_coords(e.p, basis_convert(&e.delta, Basis::Delta, Basis::Gamma), Basis::Gamma).unwrap();
        prop_assert_eq!(boundary(&via_gamma), boundary(&e));
    }
}

#[test]
fn witten_survives_blowup() {
    let mut checked = 0;
    for spec in witten_catalog() {
        let blown = parse_spec(&format!("blowup({spec},1)")).unwrap();
        let (Ok(d), Ok(sw)) = (donaldson_closed_form(&blown), sw_closed_form(&blown)) else {
            continue;
        };
        assert!(witten_check(&d, &sw).unwrap(), "{blown}");
        checked += 1;
    }
    assert!(checked >= 30, "{checked}");
}

#[test]
fn series_and_sw_round_trip_through_json() {
    for s in ["E(3;2,5)", "W(4)", "Y(6)", "H(5)", "blowup(E(2;3),2)"] {
        let spec = parse_spec(s).unwrap();
        let d = donaldson_closed_form(&spec).unwrap();
        let back: ManifoldSeries =
            serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d, "{s}");
        let sw = sw_closed_form(&spec).unwrap();
        let back: SWMap = serde_json::from_str(&serde_json::to_string(&sw).unwrap()).unwrap();
        assert_eq!(back, sw, "{s}");
    }
}
