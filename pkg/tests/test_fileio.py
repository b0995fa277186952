import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from shapelet_scope import ImageFormatError, InvalidConfiguration
from shapelet_scope.fileio import (
    ImageReadError,
    load_field_csv,
    load_image,
    load_mask,
    read_calibration_csv,
    save_field,
    save_image16,
    to_uint16,
    write_json,
)
from shapelet_scope.shapelets import ShapeletIndex


def _pgm_p5(path, arr, maxval):
    arr = np.asarray(arr)
    dtype = ">u2" if maxval > 255 else "u1"
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode()
    path.write_bytes(header + arr.astype(dtype).tobytes())


def test_8bit_pgm_all_white(tmp_path):
    p = tmp_path / "white.pgm"
    _pgm_p5(p, np.full((5, 7), 255), 255)
    img = load_image(p)
    assert img.shape == (5, 7)
    assert np.all(img == 1.0)


def test_16bit_pgm_value(tmp_path):
    p = tmp_path / "mid.pgm"
    _pgm_p5(p, np.full((3, 4), 32768), 65535)
    assert load_image(p)[1, 2] == 32768 / 65535


def test_ascii_pgm(tmp_path):
    p = tmp_path / "ascii.pgm"
    p.write_text("P2\n3 2\n255\n0 51 255\n102 204 153\n")
    np.testing.assert_array_equal(load_image(p), np.array([[0, 51, 255], [102, 204, 153]]) / 255)


def test_png_8_and_16_bit(tmp_path):
    a8 = np.array([[0, 128], [255, 7]], np.uint8)
    Image.fromarray(a8).save(tmp_path / "a.png")
    np.testing.assert_array_equal(load_image(tmp_path / "a.png"), a8 / 255)
    a16 = np.array([[0, 1000], [65535, 32768]], np.uint16)
    save_image16(a16, tmp_path / "b.png")
    np.testing.assert_array_equal(load_image(tmp_path / "b.png"), a16 / 65535)


def test_rgb_png_names_mode(tmp_path):
    Image.new("RGB", (4, 4)).save(tmp_path / "rgb.png")
    with pytest.raises(ImageFormatError, match="RGB"):
        load_image(tmp_path / "rgb.png")


def test_missing_and_garbage_files(tmp_path):
    with pytest.raises(ImageReadError, match="not found"):
        load_image(tmp_path / "nope.png")
    (tmp_path / "junk.png").write_bytes(b"definitely not an image")
    with pytest.raises(ImageReadError, match="decodable"):
        load_image(tmp_path / "junk.png")


def test_unsupported_container(tmp_path):
    Image.new("L", (4, 4)).save(tmp_path / "x.bmp")
    with pytest.raises(ImageFormatError, match="BMP"):
        load_image(tmp_path / "x.bmp")


def test_mask_threshold(tmp_path):
    Image.fromarray(np.array([[0, 127, 128, 255]], np.uint8)).save(tmp_path / "m.png")
    np.testing.assert_array_equal(load_mask(tmp_path / "m.png"), [[False, False, True, True]])


def test_constant_field_normalises_to_zero(tmp_path):
    p = tmp_path / "c.png"
    save_field(np.full((6, 6), 3.3), p, "normalized_image")
    assert np.all(np.asarray(Image.open(p)) == 0)


def test_normalized_image_range(tmp_path):
    f = np.linspace(-2, 5, 20).reshape(4, 5)
    for suffix in (".png", ".pgm"):
        p = tmp_path / f"f{suffix}"
        save_field(f, p, "normalized_image")
        back = load_image(p) * 65535
        assert back.min() == 0 and back.max() == 65535
        np.testing.assert_array_equal(back, to_uint16(f))


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)), elements=st.floats(-1e300, 1e300)))
def test_raw_csv_round_trip(tmp_path_factory, a):
    p = tmp_path_factory.mktemp("csv") / "f.csv"
    save_field(a, p, "raw_csv")
    back = load_field_csv(p)
    assert back.shape == a.shape
    assert np.array_equal(back, a)


def test_vector_field_csv(tmp_path):
    a = np.random.default_rng(0).random((3, 2, 4))
    save_field(a, tmp_path / "v.csv")
    lines = (tmp_path / "v.csv").read_text().split("\n")
    assert lines[0] == "x,y,v1,v2,v3,v4"
    assert np.array_equal(load_field_csv(tmp_path / "v.csv"), a)


def test_2x2_csv_rows(tmp_path):
    save_field(np.arange(4.0).reshape(2, 2), tmp_path / "s.csv")
    text = (tmp_path / "s.csv").read_bytes()
    assert b"\r" not in text
    lines = text.decode().splitlines()
    assert lines == ["x,y,value", "0,0,0.0", "1,0,1.0", "0,1,2.0", "1,1,3.0"]


def test_errors(tmp_path):
    with pytest.raises(InvalidConfiguration):
        save_field(np.array([[np.nan]]), tmp_path / "n.csv")
    with pytest.raises(InvalidConfiguration):
        save_field(np.zeros((2, 2)), tmp_path / "missing_dir" / "x.csv")
    with pytest.raises(InvalidConfiguration):
        save_field(np.zeros((2, 2)), tmp_path / "x.tif", "normalized_image")
    with pytest.raises(InvalidConfiguration):
        save_field(np.zeros((2, 2)), tmp_path / "x.csv", "hdf5")


def test_calibration_csv(tmp_path):
    p = tmp_path / "cal.csv"
    p.write_text("m,n,C,λ_set,deviation_from_paper\n1,0,1.5,16;32,0.08\n", encoding="utf-8")
    assert read_calibration_csv(p) == {ShapeletIndex(0, 1): 1.5}
    (tmp_path / "bad.csv").write_text("a,b\n1,2\n")
    with pytest.raises(InvalidConfiguration):
        read_calibration_csv(tmp_path / "bad.csv")


def test_json_unicode(tmp_path):
    write_json(tmp_path / "s.json", {"λ": 1.5})
    text = (tmp_path / "s.json").read_text(encoding="utf-8")
    assert "λ" in text and text.endswith("\n")
    assert json.loads(text) == {"λ": 1.5}
