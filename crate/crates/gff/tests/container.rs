use gff::container::{ContainerHeader, FieldContainer, LevelEntry, MAGIC};
use gff::GffError;
use proptest::prelude::*;

fn sample() -> FieldContainer {
    let header = ContainerHeader {
        nu: 3,
        p: 1,
        seed: 42,
        replicas: 2,
        levels: vec![LevelEntry { centers: 1, radius: 1.0 }, LevelEntry { centers: 8, radius: 0.5 }],
    };
    FieldContainer::new(header, 3, vec![0.1, -0.2, 3.5, f64::MIN_POSITIVE, -0.0, 1e300]).unwrap()
}

#[test]
fn header_layout() {
    let b = sample().to_bytes();
    assert_eq!(&b[..4], &MAGIC);
    assert_eq!(u32::from_le_bytes(b[4..8].try_into().unwrap()), 1);
    assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 3);
    assert_eq!(u32::from_le_bytes(b[12..16].try_into().unwrap()), 1);
    assert_eq!(u64::from_le_bytes(b[16..24].try_into().unwrap()), 42);
    assert_eq!(u64::from_le_bytes(b[24..32].try_into().unwrap()), 2);
    assert_eq!(u32::from_le_bytes(b[32..36].try_into().unwrap()), 2);
    assert_eq!(u64::from_le_bytes(b[36..44].try_into().unwrap()), 1);
    assert_eq!(f64::from_le_bytes(b[44..52].try_into().unwrap()), 1.0);
    assert_eq!(b.len(), 36 + 2 * 16 + 6 * 8);
    assert_eq!(f64::from_le_bytes(b[68..76].try_into().unwrap()), 0.1);
}

#[test]
fn round_trip_is_bit_exact() {
    let c = sample();
    let back = FieldContainer::from_bytes(&c.to_bytes()).unwrap();
    assert_eq!(back.header, c.header);
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&back.values), bits(&c.values));
    assert_eq!(back.row(1), &c.values[3..]);
}

#[test]
fn malformed_input_is_rejected() {
    let good = sample().to_bytes();
    let mut bad = good.clone();
    bad[0] = b'X';
    assert!(matches!(FieldContainer::from_bytes(&bad), Err(GffError::Format(_))));
    let mut bad = good.clone();
    bad[4] = 9;
    assert!(FieldContainer::from_bytes(&bad).is_err());
    assert!(FieldContainer::from_bytes(&good[..30]).is_err());
    assert!(FieldContainer::from_bytes(&good[..good.len() - 3]).is_err());
    // one value short of a whole row
    assert!(FieldContainer::from_bytes(&good[..good.len() - 8]).is_err());
    assert!(FieldContainer::new(sample().header, 4, vec![0.0; 6]).is_err());
}

proptest! {
    #[test]
    fn round_trip_any(
        nu in 1u32..8, seed in any::<u64>(), reps in 0u64..4, row in 0usize..6,
        radii in proptest::collection::vec((0u64..1000, 1e-300f64..1.0), 0..5),
        fill in any::<u64>(),
    ) {
        let header = ContainerHeader {
            nu, p: 1, seed, replicas: reps,
            levels: radii.iter().map(|&(centers, radius)| LevelEntry { centers, radius }).collect(),
        };
        let values: Vec<f64> = (0..reps as usize * row).map(|i| f64::from_bits(fill.rotate_left(i as u32) & 0x7fef_ffff_ffff_ffff)).collect();
        let c = FieldContainer::new(header, row, values).unwrap();
        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();
        let back = FieldContainer::read_from(buf.as_slice()).unwrap();
        prop_assert_eq!(&back.header, &c.header);
        prop_assert_eq!(back.values.len(), c.values.len());
        for (a, b) in back.values.iter().zip(&c.values) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        if reps > 0 {
            prop_assert_eq!(back.row_len, row);
        }
    }
}
