use interferometry::circuits::{
    approximate_ratio, build_ev, build_hofmann_context, build_hofmann_qsl, parse, parse_unchecked,
    serialize, AmplitudeSpec, BombMode, Circuit, Element, Source,
};
use interferometry::BeamsplitterRatio;
use proptest::prelude::*;

fn arb_amplitude() -> impl Strategy<Value = AmplitudeSpec> {
    prop_oneof![
        (-1000i32..=1000).prop_map(|v| AmplitudeSpec::Decimal(f64::from(v) / 997.0)),
        (any::<bool>(), 0u64..=50, 1u64..=50)
            .prop_map(|(neg, num, den)| AmplitudeSpec::sqrt(neg, num, den)),
    ]
}

fn arb_element(paths: usize, label: usize) -> impl Strategy<Value = Element> {
    let pair = (0..paths, 1..paths).prop_map(move |(u, d)| (u, (u + d) % paths));
    prop_oneof![
        (pair, 1u64..=64, 0u64..=64).prop_map(|((upper, lower), n, k)| Element::Beamsplitter {
            upper,
            lower,
            ratio: BeamsplitterRatio::new(k % (n + 1), n).unwrap(),
        }),
        (0..paths, any::<bool>()).prop_map(|(path, live)| Element::Bomb { path, live }),
        (0..paths).prop_map(|path| Element::Dephaser { path }),
        (0..paths).prop_map(move |path| Element::Detector {
            path,
            label: format!("d{label}")
        }),
    ]
}

fn arb_circuit() -> impl Strategy<Value = Circuit> {
    (2usize..=6).prop_flat_map(|paths| {
        let source = prop_oneof![
            (0..paths).prop_map(Source::Path),
            proptest::collection::vec(arb_amplitude(), paths).prop_map(Source::Superposition),
        ];
        let modulus = proptest::option::of(2u64..=60);
        let elements = (0usize..12)
            .prop_flat_map(move |len| (0..len).map(|i| arb_element(paths, i)).collect::<Vec<_>>());
        (source, modulus, elements).prop_map(move |(source, modulus, elements)| {
            let mut c = Circuit::new(paths, source).unwrap().with_modulus(modulus);
            for e in elements {
                c.push(e).unwrap();
            }
            c
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn serialize_then_parse_is_identity(circuit in arb_circuit()) {
        let text = serialize(&circuit);
        let back = parse_unchecked(&text).unwrap();
        prop_assert_eq!(&back, &circuit);
        prop_assert_eq!(serialize(&back), text);
        prop_assert_eq!(parse(&serialize(&circuit)).is_ok(), circuit.validate().is_ok());
    }

    #[test]
    fn approximation_is_optimal(target in 0.0f64..=1.0, max_den in 2u64..=40) {
        let r = approximate_ratio(target, max_den).unwrap();
        let err = (r.stay_probability() - target).abs();
        prop_assert!(r.denominator() <= max_den);
        prop_assert!(err <= 1.0 / (2.0 * max_den as f64) + 1e-15);
        for n in 1..=max_den {
            for k in 0..=n {
                let other = (k as f64 / n as f64 - target).abs();
                prop_assert!(err <= other + 1e-15, "{}/{} beats {}", k, n, r);
            }
        }
    }
}

#[test]
fn builders_survive_round_trip() {
    let mut circuits = vec![];
    for mode in [BombMode::Dud, BombMode::Live, BombMode::Dephase] {
        circuits.push(build_ev(BeamsplitterRatio::new(2, 7).unwrap(), mode).unwrap());
    }
    for c in 1..=5 {
        circuits.push(build_hofmann_context(c).unwrap());
        circuits.push(build_hofmann_qsl(24, c).unwrap());
    }
    for c in circuits {
        assert_eq!(parse(&serialize(&c)).unwrap(), c);
    }
}

#[test]
fn diagnostics_carry_line_numbers() {
    let text = "paths 2\nsource 0\nbs 0 1 1/2\nbs 0 1 3/2\nbomb 0 sometimes\n\ndetect 5 a\n";
    let err = parse(text).unwrap_err();
    let lines: Vec<usize> = err.diagnostics.iter().map(|d| d.line).collect();
    assert_eq!(lines, vec![4, 5, 7]);
    assert_eq!(err.first_line(), 4);
    assert!(err.to_string().starts_with("line 4: "));

    let late = parse("paths 2\nsource 0\ndetect 0 a\nbs 0 1 1/2\n").unwrap_err();
    assert_eq!(late.first_line(), 4);
}

#[test]
fn rejects_malformed_headers() {
    for text in [
        "",
        "source 0\n",
        "paths 1\nsource 0\n",
        "paths 2\nmodulus 1\nsource 0\n",
        "paths 2\nsource 2\n",
        "paths 2\nsource-superposition 1\n",
    ] {
        assert!(parse(text).is_err(), "{text:?}");
    }
}
