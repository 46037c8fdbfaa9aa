use proptest::prelude::*;
use svdlab_eigenface::perclos::{parse_labels, perclos, window_perclos, EyeState, Frame, DEFAULT_WINDOW_S};
use svdlab_eigenface::Error;

fn stream(seconds: usize, fps: usize, closed_every: usize) -> Vec<Frame> {
    (0..seconds * fps)
        .map(|i| Frame {
            timestamp: i as f64 / fps as f64,
            state: if i % closed_every == 0 { EyeState::Closed } else { EyeState::Open },
        })
        .collect()
}

#[test]
fn per_minute_example() {
    assert_eq!(perclos(60, 54).unwrap(), 10.0);
}

#[test]
fn boundaries_are_exact() {
    assert_eq!(perclos(37, 37).unwrap(), 0.0);
    assert_eq!(perclos(37, 0).unwrap(), 100.0);
}

#[test]
fn invalid_counts() {
    assert!(matches!(perclos(0, 0), Err(Error::EmptyWindow { .. })));
    assert!(perclos(5, 6).is_err());
}

#[test]
fn ten_minutes_in_three_minute_windows() {
    let frames = stream(600, 10, 4);
    let w = window_perclos(&frames, DEFAULT_WINDOW_S).unwrap();
    assert_eq!(w.len(), 600usize.div_ceil(180));
    assert_eq!(w.iter().map(|s| s.frames).sum::<u64>(), 6000);
    assert_eq!((w[0].start, w[0].end), (0.0, 180.0));
    assert_eq!(w[3].frames, 600);
    for s in &w {
        assert_eq!(s.percent, 25.0);
    }
}

#[test]
fn empty_windows_are_skipped() {
    let frames =
        vec![Frame { timestamp: 1.0, state: EyeState::Closed }, Frame { timestamp: 400.0, state: EyeState::Open }];
    let w = window_perclos(&frames, 180.0).unwrap();
    assert_eq!(w.len(), 2);
    assert_eq!((w[1].start, w[1].percent), (360.0, 0.0));
    assert_eq!(w[0].percent, 100.0);
}

#[test]
fn window_validation() {
    let frames = stream(10, 1, 2);
    assert!(window_perclos(&frames, 0.0).is_err());
    assert!(window_perclos(&[], 180.0).is_err());
    let mut back = frames.clone();
    back.swap(2, 3);
    assert!(window_perclos(&back, 180.0).is_err());
}

#[test]
fn csv_parsing() {
    let text = "timestamp_s,label\n0.0,open\n0.1, closed\n0.2,open\n";
    let f = parse_labels(text.as_bytes()).unwrap();
    assert_eq!(f.len(), 3);
    assert_eq!(f[1], Frame { timestamp: 0.1, state: EyeState::Closed });
    let swapped = "label,timestamp_s\nopen,3\n";
    assert_eq!(parse_labels(swapped.as_bytes()).unwrap()[0].timestamp, 3.0);
}

#[test]
fn csv_errors() {
    for bad in [
        "time,label\n0,open\n",
        "timestamp_s,label\n0,blink\n",
        "timestamp_s,label\nx,open\n",
        "timestamp_s,label\n2,open\n1,open\n",
        "timestamp_s,label\n-1,open\n",
    ] {
        assert!(matches!(parse_labels(bad.as_bytes()), Err(Error::Labels(_))), "{bad}");
    }
}

proptest! {
    #[test]
    fn within_window_order_does_not_matter(states in prop::collection::vec(any::<bool>(), 1..200), seed in any::<u64>()) {
        let frames: Vec<Frame> = states
            .iter()
            .enumerate()
            .map(|(i, &c)| Frame { timestamp: i as f64 * 0.5, state: if c { EyeState::Closed } else { EyeState::Open } })
            .collect();
        let mut shuffled_states = states.clone();
        let len = shuffled_states.len();
        for i in 0..len {
            let j = (seed.wrapping_mul(i as u64 + 1) % len as u64) as usize;
            shuffled_states.swap(i, j);
        }
        let shuffled: Vec<Frame> = frames
            .iter()
            .zip(&shuffled_states)
            .map(|(f, &c)| Frame { timestamp: f.timestamp, state: if c { EyeState::Closed } else { EyeState::Open } })
            .collect();
        let a = window_perclos(&frames, 1000.0).unwrap();
        let b = window_perclos(&shuffled, 1000.0).unwrap();
        prop_assert_eq!(a, b);
        let closed = states.iter().filter(|&&c| c).count() as u64;
        let p = perclos(states.len() as u64, states.len() as u64 - closed).unwrap();
        prop_assert!((0.0..=100.0).contains(&p));
    }
}
