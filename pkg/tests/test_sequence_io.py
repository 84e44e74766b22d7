import numpy as np
import pytest
from PIL import Image

from vartrack.errors import (
    EmptySequenceError,
    SequenceFormatError,
    SequenceIOError,
)
from vartrack.sequence_io import (
    load_ground_truth,
    load_sequence,
    read_detections,
    read_image,
    write_detections,
    write_image,
)


def write_pgm_ascii(path, rows):
    header = f"P2\n{len(rows[0])} {len(rows)}\n255\n"
    body = "\n".join(" ".join(str(v) for v in row) for row in rows)
    path.write_text(header + body + "\n")


def write_pgm_binary(path, array):
    array = np.asarray(array, dtype=np.uint8)
    header = f"P5\n{array.shape[1]} {array.shape[0]}\n255\n".encode()
    path.write_bytes(header + array.tobytes())


class TestLoadSequence:
    def test_uniform_pgm_sequence(self, tmp_path):
        for i in range(4):
            write_pgm_binary(tmp_path / f"frame_{i:03d}.pgm", np.full((8, 8), i * 10))
        frames = load_sequence(tmp_path, "*.pgm")
        assert [f.index for f in frames] == [1, 2, 3, 4]
        assert all(f.width == 8 and f.height == 8 for f in frames)
        assert frames[2].pixels[0, 0] == 20.0

    def test_ascii_pgm_supported(self, tmp_path):
        write_pgm_ascii(tmp_path / "a.pgm", [[0, 128, 255], [10, 20, 30]])
        (frame,) = load_sequence(tmp_path, "*.pgm")
        assert frame.pixels.tolist() == [[0.0, 128.0, 255.0], [10.0, 20.0, 30.0]]

    def test_rgb_png_converted_by_bt601(self, tmp_path):
        Image.fromarray(
            np.full((1, 2, 3), (255, 0, 0), dtype=np.uint8), mode="RGB"
        ).save(tmp_path / "red.png")
        (frame,) = load_sequence(tmp_path, "*.png")
        # 0.299 * 255 = 76.245, round half up -> 76
        assert np.all(frame.pixels == 76.0)

    def test_lexicographic_order(self, tmp_path):
        write_pgm_binary(tmp_path / "b.pgm", np.full((2, 2), 2))
        write_pgm_binary(tmp_path / "a.pgm", np.full((2, 2), 1))
        frames = load_sequence(tmp_path, "*.pgm")
        assert frames[0].pixels[0, 0] == 1.0

    def test_empty_directory_raises(self, tmp_path):
        with pytest.raises(EmptySequenceError):
            load_sequence(tmp_path, "*.pgm")

    def test_missing_directory_raises(self, tmp_path):
        with pytest.raises(SequenceIOError):
            load_sequence(tmp_path / "nope", "*")

    def test_mixed_resolution_names_offender(self, tmp_path):
        write_pgm_binary(tmp_path / "a.pgm", np.zeros((4, 4)))
        write_pgm_binary(tmp_path / "b.pgm", np.zeros((4, 5)))
        with pytest.raises(SequenceFormatError, match="b.pgm"):
            load_sequence(tmp_path, "*.pgm")

    def test_deterministic_reload(self, tmp_path):
        rng = np.random.default_rng(0)
        write_pgm_binary(tmp_path / "x.pgm", rng.integers(0, 256, (16, 16)))
        first = load_sequence(tmp_path, "*.pgm")[0].pixels
        second = load_sequence(tmp_path, "*.pgm")[0].pixels
        assert np.array_equal(first, second)


class TestImageRoundTrip:
    def test_pgm_write_read(self, tmp_path):
        data = np.arange(64, dtype=np.float64).reshape(8, 8)
        write_image(tmp_path / "out.pgm", data)
        assert np.array_equal(read_image(tmp_path / "out.pgm"), data)

    def test_png_write_read(self, tmp_path):
        data = np.arange(64, dtype=np.float64).reshape(8, 8) * 3
        write_image(tmp_path / "out.png", data)
        assert np.array_equal(read_image(tmp_path / "out.png"), data)

    def test_values_clamped_on_ingest(self, tmp_path):
        write_image(tmp_path / "c.pgm", np.full((4, 4), 300.0))
        assert read_image(tmp_path / "c.pgm").max() == 255.0


class TestLoadGroundTruth:
    def test_comma_line(self, tmp_path):
        path = tmp_path / "gt.txt"
        path.write_text("10,20,30,40\n")
        (box,) = load_ground_truth(path)
        assert (box.frame_index, box.x, box.y, box.w, box.h) == (1, 10, 20, 30, 40)

    def test_tab_separated(self, tmp_path):
        path = tmp_path / "gt.txt"
        path.write_text("5\t5\t2\t2\n")
        (box,) = load_ground_truth(path)
        assert (box.x, box.y, box.w, box.h) == (5, 5, 2, 2)

    def test_arity_violation_cites_line(self, tmp_path):
        path = tmp_path / "gt.txt"
        path.write_text("10,20\n")
        with pytest.raises(SequenceFormatError, match=":1"):
            load_ground_truth(path)

    def test_non_positive_dimensions_rejected(self, tmp_path):
        path = tmp_path / "gt.txt"
        path.write_text("10,20,0,40\n")
        with pytest.raises(SequenceFormatError):
            load_ground_truth(path)

    def test_all_zero_line_marks_absence(self, tmp_path):
        path = tmp_path / "gt.txt"
        path.write_text("1,1,4,4\n0,0,0,0\n2,2,4,4\n")
        boxes = load_ground_truth(path)
        assert [b.frame_index for b in boxes] == [1, 3]

    def test_line_count_matches_box_count_without_gaps(self, tmp_path):
        path = tmp_path / "gt.txt"
        path.write_text("\n".join(f"{i},{i},3,3" for i in range(1, 6)))
        assert len(load_ground_truth(path)) == 5

    def test_missing_file(self, tmp_path):
        with pytest.raises(SequenceIOError):
            load_ground_truth(tmp_path / "gone.txt")


class TestWriteDetections:
    def test_row_format(self, tmp_path):
        path = tmp_path / "det.csv"
        write_detections(path, [(5, 1, 3, 4, 10, 12)])
        assert path.read_text().splitlines() == ["frame,id,x,y,w,h", "5,1,3,4,10,12"]

    def test_rows_ordered_by_frame_then_id(self, tmp_path):
        path = tmp_path / "det.csv"
        write_detections(path, [(1, 2, 0, 0, 1, 1), (1, 1, 0, 0, 1, 1)])
        lines = path.read_text().splitlines()
        assert lines[1].startswith("1,1") and lines[2].startswith("1,2")

    def test_frames_without_tracks_absent(self, tmp_path):
        path = tmp_path / "det.csv"
        write_detections(path, [(2, 1, 0, 0, 1, 1)])
        assert len(path.read_text().splitlines()) == 2

    def test_round_trip(self, tmp_path):
        rows = [(1, 1, 5, 6, 7, 8), (2, 1, 6, 6, 7, 8), (2, 3, 1, 1, 2, 2)]
        path = tmp_path / "det.csv"
        write_detections(path, rows)
        assert read_detections(path) == rows

    def test_unwritable_path_raises(self, tmp_path):
        with pytest.raises(SequenceIOError):
            write_detections(tmp_path / "missing" / "det.csv", [])
