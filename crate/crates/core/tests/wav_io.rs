use std::io::Write;
use std::path::Path;

use csaudio::signal::quantize;
use csaudio::{read_wav_frame, write_wav, Error, Frame};
use proptest::prelude::*;

/// Hand-assembled RIFF/WAVE with optional extra chunks before `data`.
fn wav_bytes(format: u16, channels: u16, bits: u16, samples: &[u8], extra: &[(&[u8; 4], &[u8])]) -> Vec<u8> {
    let rate = 8000u32;
    let block = channels * bits / 8;
    let mut fmt = Vec::new();
    fmt.extend_from_slice(&format.to_le_bytes());
    fmt.extend_from_slice(&channels.to_le_bytes());
    fmt.extend_from_slice(&rate.to_le_bytes());
    fmt.extend_from_slice(&(rate * block as u32).to_le_bytes());
    fmt.extend_from_slice(&block.to_le_bytes());
    fmt.extend_from_slice(&bits.to_le_bytes());

    let mut body = b"WAVE".to_vec();
    let mut chunk = |tag: &[u8; 4], data: &[u8]| {
        body.extend_from_slice(tag);
        body.extend_from_slice(&(data.len() as u32).to_le_bytes());
        body.extend_from_slice(data);
        if data.len() % 2 == 1 {
            body.push(0);
        }
    };
    chunk(b"fmt ", &fmt);
    for (tag, data) in extra {
        chunk(tag, data);
    }
    chunk(b"data", samples);

    let mut out = b"RIFF".to_vec();
    out.extend_from_slice(&(body.len() as u32).to_le_bytes());
    out.extend_from_slice(&body);
    out
}

fn pcm16(values: &[i16]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::File::create(&path).unwrap().write_all(bytes).unwrap();
    path
}

#[test]
fn pcm_values_map_to_amplitudes() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(
        dir.path(),
        "a.wav",
        &wav_bytes(1, 1, 16, &pcm16(&[16384, 0, -32768, 32767]), &[]),
    );
    let f = read_wav_frame(&path, 0, 4).unwrap();
    assert_eq!(f.samples(), &[0.5, 0.0, -1.0, 32767.0 / 32768.0]);
    assert_eq!(f.sample_rate(), 8000);
    let tail = read_wav_frame(&path, 2, 2).unwrap();
    assert_eq!(tail.samples(), &[-1.0, 32767.0 / 32768.0]);
}

#[test]
fn extra_chunks_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let list: &[u8] = b"INFOISFT\x05\x00\x00\x00test\x00\x00";
    let fact: &[u8] = &3u32.to_le_bytes();
    let bytes = wav_bytes(1, 1, 16, &pcm16(&[1, 2, 3]), &[(b"LIST", list), (b"fact", fact)]);
    let path = write_file(dir.path(), "chunks.wav", &bytes);
    let f = read_wav_frame(&path, 0, 3).unwrap();
    assert_eq!(f.samples(), &[1.0 / 32768.0, 2.0 / 32768.0, 3.0 / 32768.0]);
}

#[test]
fn stereo_uses_first_channel() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(
        dir.path(),
        "st.wav",
        &wav_bytes(1, 2, 16, &pcm16(&[100, -5, 200, -6, 300, -7]), &[]),
    );
    let f = read_wav_frame(&path, 1, 2).unwrap();
    assert_eq!(f.samples(), &[200.0 / 32768.0, 300.0 / 32768.0]);
}

#[test]
fn errors_are_distinct() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        read_wav_frame(dir.path().join("missing.wav"), 0, 1),
        Err(Error::Read { .. })
    ));

    let eight_bit = write_file(dir.path(), "u8.wav", &wav_bytes(1, 1, 8, &[1, 2, 3, 4], &[]));
    assert!(matches!(
        read_wav_frame(&eight_bit, 0, 2),
        Err(Error::UnsupportedEncoding { .. })
    ));
    let float = write_file(dir.path(), "f32.wav", &wav_bytes(3, 1, 32, &[0; 8], &[]));
    assert!(matches!(
        read_wav_frame(&float, 0, 2),
        Err(Error::UnsupportedEncoding { .. })
    ));

    let ok = write_file(dir.path(), "ok.wav", &wav_bytes(1, 1, 16, &pcm16(&[1, 2, 3]), &[]));
    assert!(matches!(
        read_wav_frame(&ok, 2, 2),
        Err(Error::FrameOutOfRange {
            start: 2,
            len: 2,
            available: 3
        })
    ));
    assert!(matches!(
        read_wav_frame(&ok, usize::MAX, 2),
        Err(Error::FrameOutOfRange { .. })
    ));

    let garbage = write_file(dir.path(), "junk.wav", b"definitely not a wav file");
    assert!(matches!(
        read_wav_frame(&garbage, 0, 1),
        Err(Error::MalformedWav { .. })
    ));
}

#[test]
fn write_clamps_and_rejects_bad_paths() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.wav");
    let frame = Frame::new(vec![1.5, -3.0, 0.5, 0.0], 8000).unwrap();
    write_wav(&path, &frame).unwrap();
    let back = read_wav_frame(&path, 0, 4).unwrap();
    assert_eq!(back.samples(), &[32767.0 / 32768.0, -1.0, 0.5, 0.0]);

    let bad = dir.path().join("no/such/dir/out.wav");
    assert!(matches!(write_wav(&bad, &frame), Err(Error::Write { .. })));
    assert!(matches!(Frame::new(vec![], 8000), Err(Error::EmptyFrame)));
}

#[test]
fn quantize_handles_rails() {
    assert_eq!(quantize(1.5), 32767);
    assert_eq!(quantize(-1.0), -32768);
    assert_eq!(quantize(32767.4 / 32768.0), 32767);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_within_one_lsb(values in prop::collection::vec(-1.0f64..=1.0, 1..300)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.wav");
        let frame = Frame::new(values.clone(), 16000).unwrap();
        write_wav(&path, &frame).unwrap();
        let back = read_wav_frame(&path, 0, values.len()).unwrap();
        prop_assert_eq!(back.sample_rate(), 16000);
        for (a, b) in values.iter().zip(back.samples()) {
            prop_assert!((a - b).abs() <= 1.0 / 32768.0, "{} -> {}", a, b);
        }
    }
}
