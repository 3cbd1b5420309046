import io

import numpy as np
import pytest
from PIL import Image

from chplane.errors import DecodeError, ManifestError, UnsupportedFormat
from chplane.image_io import decode_image, load_manifest, to_grayscale, write_manifest, CorpusRecord


def _png_bytes(arr, mode="RGB"):
    buf = io.BytesIO()
    Image.fromarray(arr, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


def test_decode_1x1_png_identity():
    img = decode_image(_png_bytes(np.array([[[10, 20, 30]]], dtype=np.uint8)))
    assert (img.width, img.height, img.channels) == (1, 1, 3)
    assert img.data.tolist() == [[[10, 20, 30]]]


def test_decode_grayscale_png_expands_channels():
    src = np.array([[0, 100], [200, 255]], dtype=np.uint8)
    img = decode_image(_png_bytes(src, mode="L"))
    assert img.data.shape == (2, 2, 3)
    # reference codec round trip: every pixel has R = G = B = source value
    assert np.array_equal(img.data[:, :, 0], src)
    assert np.array_equal(img.data[:, :, 1], src)
    assert np.array_equal(img.data[:, :, 2], src)


def test_decode_truncated_jpeg_raises():
    buf = io.BytesIO()
    Image.fromarray(np.full((40, 40, 3), 120, dtype=np.uint8)).save(buf, format="JPEG")
    with pytest.raises(DecodeError):
        decode_image(buf.getvalue()[:80])


def test_decode_garbage_raises():
    with pytest.raises(DecodeError):
        decode_image(b"definitely not an image")


def test_decode_unsupported_format():
    buf = io.BytesIO()
    Image.fromarray(np.zeros((4, 4, 3), dtype=np.uint8)).save(buf, format="BMP")
    with pytest.raises(UnsupportedFormat):
        decode_image(buf.getvalue())


def test_png_round_trip_lossless(rng):
    arr = rng.integers(0, 256, size=(9, 7, 3), dtype=np.uint8)
    img = decode_image(_png_bytes(arr))
    assert np.array_equal(img.data, arr)


def test_rgba_alpha_dropped():
    rgba = np.zeros((1, 1, 4), dtype=np.uint8)
    rgba[0, 0] = [200, 100, 50, 0]  # fully transparent
    img = decode_image(_png_bytes(rgba, mode="RGBA"))
    assert img.data[0, 0].tolist() == [200, 100, 50]


def test_grayscale_known_values():
    white = decode_image(_png_bytes(np.full((1, 1, 3), 255, dtype=np.uint8)))
    black = decode_image(_png_bytes(np.zeros((1, 1, 3), dtype=np.uint8)))
    red = decode_image(_png_bytes(np.array([[[255, 0, 0]]], dtype=np.uint8)))
    assert to_grayscale(white)[0, 0] == pytest.approx(255.0, abs=1e-12)
    assert to_grayscale(black)[0, 0] == 0.0
    assert to_grayscale(red)[0, 0] == pytest.approx(76.245, abs=1e-9)


def test_grayscale_idempotent_on_gray_pixels(rng):
    vals = rng.integers(0, 256, size=(5, 5), dtype=np.uint8)
    rgb = np.repeat(vals[:, :, None], 3, axis=2)
    gray = to_grayscale(decode_image(_png_bytes(rgb)))
    assert np.allclose(gray, vals.astype(float), atol=1e-9)


def test_grayscale_monotone_in_each_channel():
    base = np.array([[[50, 80, 110]]], dtype=np.uint8)
    g0 = to_grayscale(decode_image(_png_bytes(base)))[0, 0]
    for ch in range(3):
        brighter = base.copy()
        brighter[0, 0, ch] += 40
        g1 = to_grayscale(decode_image(_png_bytes(brighter)))[0, 0]
        assert g1 > g0


def test_manifest_empty_data_section(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("id,path,group,year,fields\n")
    assert load_manifest(path) == []


def test_manifest_rows_order_and_fields(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text(
        "id,path,group,year,fields\n"
        "a,x/a.png,g1,2010,painting;digital\n"
        "b,x/b.png,g1,2011,\n"
        "c,x/c.png,g2,2012,photo\n"
    )
    records = load_manifest(path)
    assert [r.id for r in records] == ["a", "b", "c"]
    assert records[0].fields == ("painting", "digital")
    assert records[1].fields == ()
    assert records[0].path == (tmp_path / "x/a.png").resolve()
    assert records[2].year == 2012


def test_manifest_bad_year_reports_row(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("id,path,group,year,fields\na,a.png,g,2010,\nb,b.png,g,not-a-year,\n")
    with pytest.raises(ManifestError) as err:
        load_manifest(path)
    assert err.value.row == 3


def test_manifest_duplicate_id_rejected(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("id,path,group,year,fields\na,a.png,g,2010,\na,b.png,g,2011,\n")
    with pytest.raises(ManifestError) as err:
        load_manifest(path)
    assert err.value.row == 3


def test_manifest_write_read_round_trip(tmp_path):
    records = [
        CorpusRecord("r1", tmp_path / "img/r1.png", "g", 2015, ("a", "b")),
        CorpusRecord("r2", tmp_path / "img/r2.png", "g", 2016, ()),
    ]
    path = tmp_path / "m.csv"
    write_manifest(path, records)
    back = load_manifest(path)
    assert [(r.id, r.group, r.year, r.fields) for r in back] == [
        ("r1", "g", 2015, ("a", "b")),
        ("r2", "g", 2016, ()),
    ]
