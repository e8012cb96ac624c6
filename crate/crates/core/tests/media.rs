mod common;

use common::random_frame;
use rand::rngs::StdRng;
use rand::SeedableRng;
use seamcarve::media_io::{
    open_source, read_frames, write_frames, FrameSink, FrameSource, FrameWriter,
};
use seamcarve::{Error, Frame};

#[test]
fn directory_sorted_by_numeric_index() {
    let dir = tempfile::tempdir().unwrap();
    let a = Frame::filled(3, 2, 3, 10).unwrap();
    let b = Frame::filled(3, 2, 3, 20).unwrap();
    let c = Frame::filled(3, 2, 3, 30).unwrap();
    write_frames(
        &FrameSink::File(dir.path().join("f_010.ppm")),
        std::slice::from_ref(&c),
    )
    .unwrap();
    write_frames(
        &FrameSink::File(dir.path().join("f_001.ppm")),
        std::slice::from_ref(&b),
    )
    .unwrap();
    write_frames(
        &FrameSink::File(dir.path().join("f_000.ppm")),
        std::slice::from_ref(&a),
    )
    .unwrap();
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let frames = read_frames(&FrameSource::Directory(dir.path().into())).unwrap();
    assert_eq!(frames, vec![a, b, c]);
}

#[test]
fn directory_sink_round_trip() {
    let mut rng = StdRng::seed_from_u64(1);
    let frames: Vec<Frame> = (0..5).map(|_| random_frame(&mut rng, 7, 4, 3)).collect();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("frames");
    write_frames(&FrameSink::Directory(out.clone()), &frames).unwrap();
    assert!(out.join("frame_000004.ppm").is_file());
    assert_eq!(read_frames(&FrameSource::Directory(out)).unwrap(), frames);
}

#[test]
fn png_round_trip_rgb_and_gray() {
    let mut rng = StdRng::seed_from_u64(2);
    let dir = tempfile::tempdir().unwrap();
    for channels in [1, 3] {
        let frame = random_frame(&mut rng, 9, 5, channels);
        let path = dir.path().join(format!("img{channels}.png"));
        write_frames(&FrameSink::File(path.clone()), std::slice::from_ref(&frame)).unwrap();
        assert_eq!(read_frames(&FrameSource::File(path)).unwrap(), vec![frame]);
    }
}

#[test]
fn png_holds_one_frame() {
    let dir = tempfile::tempdir().unwrap();
    let f = Frame::filled(3, 3, 3, 0).unwrap();
    let err =
        write_frames(&FrameSink::File(dir.path().join("x.png")), &[f.clone(), f]).unwrap_err();
    assert!(err.is_io());
}

#[test]
fn concatenated_file_streams_lazily() {
    let mut rng = StdRng::seed_from_u64(3);
    let frames: Vec<Frame> = (0..4).map(|_| random_frame(&mut rng, 5, 6, 3)).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("clip.ppm");
    write_frames(&FrameSink::File(path.clone()), &frames).unwrap();
    let mut stream = open_source(&FrameSource::File(path)).unwrap();
    assert_eq!(stream.next().unwrap().unwrap(), frames[0]);
    assert_eq!(stream.count(), 3);
}

#[test]
fn empty_stream_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.ppm");
    write_frames(&FrameSink::File(path.clone()), &[]).unwrap();
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 0);
    assert!(read_frames(&FrameSource::File(path)).unwrap().is_empty());
}

#[test]
fn one_record_on_stream_sink() {
    let buf = std::rc::Rc::new(std::cell::RefCell::new(Vec::new()));
    struct Shared(std::rc::Rc<std::cell::RefCell<Vec<u8>>>);
    impl std::io::Write for Shared {
        fn write(&mut self, b: &[u8]) -> std::io::Result<usize> {
            self.0.borrow_mut().extend_from_slice(b);
            Ok(b.len())
        }
        fn flush(&mut self) -> std::io::Result<()> {
            Ok(())
        }
    }
    let mut w = FrameWriter::from_writer(Shared(buf.clone()));
    w.write(&Frame::rgb(2, 2, (0..12).collect()).unwrap())
        .unwrap();
    let mut expected = b"P6\n2 2\n255\n".to_vec();
    expected.extend(0u8..12);
    assert_eq!(*buf.borrow(), expected);
}

#[test]
fn directory_dimension_change_reports_index() {
    let dir = tempfile::tempdir().unwrap();
    write_frames(
        &FrameSink::File(dir.path().join("a_0.ppm")),
        &[Frame::filled(3, 3, 3, 0).unwrap()],
    )
    .unwrap();
    write_frames(
        &FrameSink::File(dir.path().join("a_1.ppm")),
        &[Frame::filled(3, 3, 3, 0).unwrap()],
    )
    .unwrap();
    write_frames(
        &FrameSink::File(dir.path().join("a_2.ppm")),
        &[Frame::filled(4, 3, 3, 0).unwrap()],
    )
    .unwrap();
    match read_frames(&FrameSource::Directory(dir.path().into())) {
        Err(Error::Format { index: 2, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn missing_file_is_io_error() {
    let err = read_frames(&FrameSource::File("/nonexistent/x.ppm".into())).unwrap_err();
    assert!(err.is_io());
}
