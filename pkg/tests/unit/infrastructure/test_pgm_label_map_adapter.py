"""
Tests de l'adaptateur des cartes d'étiquettes PGM.
"""

import numpy as np
import pytest

from conftest import FIXTURES_ROOT
from surgtc.domain.errors import DataError, FormatError, MissingInputError, ShapeError
from surgtc.infrastructure.adapters.pgm_label_map_adapter import (
    PgmLabelMapAdapter,
    read_label_map,
    write_label_map,
)

GROUNDTRUTH = FIXTURES_ROOT / "evaluate_half" / "input" / "groundtruth" / "halves"


def test_reads_the_fixture(vocabulary):
    np.testing.assert_array_equal(read_label_map(GROUNDTRUTH / "000000.pgm", vocabulary), [[1, 0], [1, 0]])
    np.testing.assert_array_equal(read_label_map(GROUNDTRUTH / "000001.pgm", vocabulary), [[2, 0], [2, 0]])


def test_written_header_and_payload(tmp_path):
    path = tmp_path / "000000.pgm"
    write_label_map(np.array([[1, 0], [1, 0]]), path)
    assert path.read_bytes() == (GROUNDTRUTH / "000000.pgm").read_bytes()


def test_round_trip(tmp_path, vocabulary, rng):
    grid = rng.integers(0, 8, size=(9, 13)).astype(np.uint8)
    adapter = PgmLabelMapAdapter()
    adapter.write(grid, tmp_path / "sub" / "map.pgm")
    read = adapter.read(tmp_path / "sub" / "map.pgm", vocabulary)
    assert read.dtype == np.uint8
    np.testing.assert_array_equal(read, grid)


def test_ascii_pgm_rejected(tmp_path, vocabulary):
    path = tmp_path / "map.pgm"
    path.write_bytes(b"P2\n2 1\n255\n0 1\n")
    with pytest.raises(FormatError, match="P5"):
        read_label_map(path, vocabulary)


def test_small_maxval_keeps_class_ids(tmp_path, vocabulary):
    """Une carte de maxval 7 n'est pas remise à l'échelle vers 255."""
    path = tmp_path / "map.pgm"
    path.write_bytes(b"P5\n2 2\n7\n" + bytes([0, 1, 2, 7]))
    np.testing.assert_array_equal(read_label_map(path, vocabulary), [[0, 1], [2, 7]])


def test_header_comments(tmp_path, vocabulary):
    path = tmp_path / "map.pgm"
    path.write_bytes(b"P5\n# exported\n3 1 # width height\n255\n" + bytes([3, 0, 1]))
    np.testing.assert_array_equal(read_label_map(path, vocabulary), [[3, 0, 1]])


def test_pixel_above_maxval(tmp_path, vocabulary):
    path = tmp_path / "map.pgm"
    path.write_bytes(b"P5\n2 1\n3\n" + bytes([0, 4]))
    with pytest.raises(FormatError, match="maxval"):
        read_label_map(path, vocabulary)


def test_trailing_bytes(tmp_path, vocabulary):
    path = tmp_path / "map.pgm"
    path.write_bytes(b"P5\n2 1\n255\n" + bytes([0, 1, 2]))
    with pytest.raises(FormatError):
        read_label_map(path, vocabulary)


def test_sixteen_bit_rejected(tmp_path, vocabulary):
    path = tmp_path / "map.pgm"
    path.write_bytes(b"P5\n2 1\n65535\n" + b"\x00\x01\x00\x02")
    with pytest.raises(FormatError):
        read_label_map(path, vocabulary)


def test_truncated_payload(tmp_path, vocabulary):
    path = tmp_path / "map.pgm"
    path.write_bytes(b"P5\n4 4\n255\n\x00\x01")
    with pytest.raises(FormatError):
        read_label_map(path, vocabulary)


def test_value_outside_vocabulary(tmp_path, vocabulary):
    path = tmp_path / "map.pgm"
    write_label_map(np.array([[0, 8]]), path)
    with pytest.raises(DataError, match=r"\[8\]"):
        read_label_map(path, vocabulary)


def test_missing_file(tmp_path, vocabulary):
    with pytest.raises(MissingInputError):
        read_label_map(tmp_path / "absent.pgm", vocabulary)


def test_write_rejects_bad_grids(tmp_path):
    with pytest.raises(ShapeError):
        write_label_map(np.zeros((2, 2, 3)), tmp_path / "a.pgm")
    with pytest.raises(DataError):
        write_label_map(np.array([[0, 256]]), tmp_path / "b.pgm")
