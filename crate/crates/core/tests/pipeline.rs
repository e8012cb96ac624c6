mod common;

use common::random_frame;
use rand::rngs::StdRng;
use rand::SeedableRng;
use seamcarve::bench::{generate, jitter, photo_like, SyntheticKind, SyntheticSpec};
use seamcarve::energy::gradient_energy;
use seamcarve::pipeline::{replay_batches, VideoRetargeter};
use seamcarve::scpl::scpl_carve;
use seamcarve::temporal::{BufferPolicy, PushOutcome, SpatioTemporalBuffer};
use seamcarve::{
    motion_energy, retarget_image, retarget_video, BlendWeights, Frame, Mode, RetargetConfig,
};

fn corpus(kind: SyntheticKind, w: usize, h: usize, frames: usize, seed: u64) -> Vec<Frame> {
    generate(&SyntheticSpec {
        kind,
        width: w,
        height: h,
        frames,
        seed,
    })
}

#[test]
fn scpl_needs_no_more_passes_than_raw() {
    let mut rng = StdRng::seed_from_u64(32);
    let f = random_frame(&mut rng, 32, 32, 3);
    let (a, raw) = retarget_image(&f, &RetargetConfig::new(16, 32, Mode::Raw)).unwrap();
    let (b, scpl) = retarget_image(&f, &RetargetConfig::new(16, 32, Mode::Scpl)).unwrap();
    assert_eq!(raw.dp_passes, 16);
    assert!(scpl.dp_passes <= raw.dp_passes);
    assert_eq!(a.dimensions(), b.dimensions());
}

#[test]
fn identical_frames_pass_counts() {
    let f = photo_like(40, 24, 3);
    let single = retarget_video(
        vec![f.clone()],
        &RetargetConfig::new(30, 24, Mode::Buffered),
    )
    .unwrap()
    .1;
    for n in [2, 5, 12] {
        let frames = vec![f.clone(); n];
        let (out, buffered) =
            retarget_video(frames.clone(), &RetargetConfig::new(30, 24, Mode::Buffered)).unwrap();
        assert_eq!(buffered.dp_passes, single.dp_passes);
        assert!(out.windows(2).all(|p| p[0] == p[1]));
        let (_, raw) = retarget_video(frames, &RetargetConfig::new(30, 24, Mode::Raw)).unwrap();
        assert_eq!(raw.dp_passes, n * 10);
    }
}

#[test]
fn replay_reproduces_reference_carve() {
    let f = photo_like(30, 20, 4);
    let energy = gradient_energy(&f).unwrap();
    let (carved, batches) = scpl_carve(&f, &energy, 21).unwrap();
    assert_eq!(
        replay_batches(std::slice::from_ref(&f), &batches).unwrap(),
        vec![carved.clone()]
    );

    let other = photo_like(30, 20, 5);
    let out = replay_batches(&[f.clone(), other, f], &batches).unwrap();
    assert!(out.iter().all(|g| g.dimensions() == (21, 20)));
    assert_eq!(out[0], out[2]);
    assert_eq!(out[0], carved);
}

#[test]
fn replay_rejects_wrong_dimensions() {
    let f = photo_like(30, 20, 4);
    let (_, batches) = scpl_carve(&f, &gradient_energy(&f).unwrap(), 25).unwrap();
    assert!(replay_batches(&[photo_like(28, 20, 1)], &batches).is_err());
}

#[test]
fn unit_buffer_matches_per_frame_scpl() {
    let frames = corpus(SyntheticKind::MovingBox, 36, 28, 7, 21);
    let mut buffered = RetargetConfig::new(27, 22, Mode::Buffered);
    buffered.policy = BufferPolicy::new(0.2, 1).unwrap();
    let scpl = RetargetConfig::new(27, 22, Mode::Scpl);
    let (a, ma) = retarget_video(frames.clone(), &buffered).unwrap();
    let (b, mb) = retarget_video(frames, &scpl).unwrap();
    assert_eq!(a, b);
    assert_eq!(ma.dp_passes, mb.dp_passes);
}

#[test]
fn pass_count_dominance_on_corpora() {
    for kind in [
        SyntheticKind::Static,
        SyntheticKind::MovingBox,
        SyntheticKind::BrightnessRamp,
    ] {
        let frames = corpus(kind, 48, 32, 20, 5);
        let run = |mode| {
            retarget_video(frames.clone(), &RetargetConfig::new(36, 28, mode))
                .unwrap()
                .1
        };
        let (raw, scpl, buffered) = (run(Mode::Raw), run(Mode::Scpl), run(Mode::Buffered));
        assert!(buffered.dp_passes <= scpl.dp_passes, "{kind:?}");
        assert!(scpl.dp_passes <= raw.dp_passes, "{kind:?}");
        assert_eq!(raw.frames_out, 20);
        assert_eq!(scpl.frames_out, 20);
        assert_eq!(buffered.frames_out, 20);
    }
}

#[test]
fn brightness_ramp_forces_asde_flushes() {
    let frames = corpus(SyntheticKind::BrightnessRamp, 40, 30, 40, 3);
    let policy = BufferPolicy::new(0.2, 1000).unwrap();
    let weights = BlendWeights::default();
    let mut buffer = SpatioTemporalBuffer::new();
    let mut flushes = 0;
    let mut prev: Option<Frame> = None;
    for f in frames {
        let e = motion_energy(&f, Some(prev.as_ref().unwrap_or(&f)), weights).unwrap();
        prev = Some(f.clone());
        if let PushOutcome::Flushed(_) = buffer.push(f, e, &policy).unwrap() {
            flushes += 1;
        }
    }
    assert!(flushes >= 2, "only {flushes} flushes");
}

#[test]
fn streaming_emits_every_frame_in_order() {
    let frames = corpus(SyntheticKind::BrightnessRamp, 24, 18, 30, 8);
    let mut config = RetargetConfig::new(20, 18, Mode::Buffered);
    config.policy = BufferPolicy::new(0.2, 6).unwrap();
    let mut r = VideoRetargeter::new(config.clone());
    let mut streamed = Vec::new();
    for f in frames.clone() {
        streamed.extend(r.push(f).unwrap());
    }
    let (tail, metrics) = r.finish().unwrap();
    streamed.extend(tail);
    assert_eq!(streamed.len(), 30);
    assert_eq!(metrics.frames_out, 30);
    let (batch, _) = retarget_video(frames, &config).unwrap();
    assert_eq!(streamed, batch);
    let reported = jitter(&streamed, 4).unwrap().value;
    assert!((metrics.jitter - reported).abs() < 1e-12);
}
