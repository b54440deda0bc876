import io
import json
import math

import numpy as np
import pytest

from zeropair.characters import character
from zeropair.store import (
    CacheChecksumError,
    CacheFormatError,
    CacheInvariantError,
    CacheOverwriteError,
    CacheVersionError,
    ZeroCache,
    emit_table,
    read_zero_set,
    write_zero_set,
)
from zeropair.zeros import ZeroSet, scan_zeros


@pytest.fixture(scope="module")
def sample_set() -> ZeroSet:
    return scan_zeros(character(4, 3), 15.0)


class TestRoundTrip:
    def test_bytes_identical(self, sample_set, tmp_path):
        p1 = tmp_path / "a.zc"
        p2 = tmp_path / "b.zc"
        write_zero_set(p1, sample_set)
        loaded = read_zero_set(p1)
        write_zero_set(p2, loaded)
        assert p1.read_bytes() == p2.read_bytes()

    def test_fields_survive(self, sample_set, tmp_path):
        p = tmp_path / "a.zc"
        write_zero_set(p, sample_set)
        loaded = read_zero_set(p)
        assert loaded.label == sample_set.label
        assert loaded.conductor == sample_set.conductor
        assert loaded.parity == sample_set.parity
        assert loaded.height == sample_set.height
        assert loaded.mesh_step == sample_set.mesh_step
        assert loaded.tolerance == sample_set.tolerance
        assert loaded.branch == sample_set.branch
        assert loaded.certified == sample_set.certified
        assert loaded.expected_count == sample_set.expected_count
        assert np.array_equal(loaded.ordinates, sample_set.ordinates)

    def test_empty_set(self, tmp_path):
        zs = scan_zeros(character(3, 2), 0.5)
        p = tmp_path / "empty.zc"
        write_zero_set(p, zs)
        loaded = read_zero_set(p)
        assert loaded.count == 0 and loaded.certified


class TestCorruption:
    def test_flipped_payload_byte(self, sample_set, tmp_path):
        p = tmp_path / "a.zc"
        write_zero_set(p, sample_set)
        raw = bytearray(p.read_bytes())
        raw[80] ^= 0xFF  # inside the ordinate payload (header is 76 bytes)
        p.write_bytes(bytes(raw))
        with pytest.raises(CacheChecksumError):
            read_zero_set(p)

    def test_truncated_file(self, sample_set, tmp_path):
        p = tmp_path / "a.zc"
        write_zero_set(p, sample_set)
        p.write_bytes(p.read_bytes()[:-9])
        with pytest.raises(CacheFormatError):
            read_zero_set(p)

    def test_bad_magic(self, sample_set, tmp_path):
        p = tmp_path / "a.zc"
        write_zero_set(p, sample_set)
        raw = bytearray(p.read_bytes())
        raw[0:4] = b"NOPE"
        p.write_bytes(bytes(raw))
        with pytest.raises(CacheFormatError):
            read_zero_set(p)

    def test_unknown_version(self, sample_set, tmp_path):
        p = tmp_path / "a.zc"
        write_zero_set(p, sample_set)
        raw = bytearray(p.read_bytes())
        raw[4] = 99  # version field, little endian
        # keep the checksum honest so only the version trips
        import zlib

        raw[-4:] = zlib.crc32(bytes(raw[:-4])).to_bytes(4, "little")
        p.write_bytes(bytes(raw))
        with pytest.raises(CacheVersionError):
            read_zero_set(p)

    def test_unsorted_payload_rejected(self, sample_set, tmp_path):
        import struct
        import zlib

        p = tmp_path / "a.zc"
        write_zero_set(p, sample_set)
        raw = bytearray(p.read_bytes())
        hdr = 4 + 2 + 4 + 4 + 4 + 1 + 1 + 16 + 8 * 4 + 8
        first = struct.unpack_from("<d", raw, hdr)[0]
        second = struct.unpack_from("<d", raw, hdr + 8)[0]
        struct.pack_into("<d", raw, hdr, second)
        struct.pack_into("<d", raw, hdr + 8, first)
        raw[-4:] = zlib.crc32(bytes(raw[:-4])).to_bytes(4, "little")
        p.write_bytes(bytes(raw))
        with pytest.raises(CacheInvariantError):
            read_zero_set(p)


class TestOverwritePolicy:
    def test_uncertified_cannot_replace_certified(self, sample_set, tmp_path):
        from dataclasses import replace

        p = tmp_path / "a.zc"
        assert sample_set.certified
        write_zero_set(p, sample_set)
        weaker = replace(sample_set, certified=False)
        with pytest.raises(CacheOverwriteError):
            write_zero_set(p, weaker)
        # force wins
        write_zero_set(p, weaker, force=True)
        assert read_zero_set(p).certified is False

    def test_certified_can_replace(self, sample_set, tmp_path):
        p = tmp_path / "a.zc"
        write_zero_set(p, sample_set)
        write_zero_set(p, sample_set)  # idempotent rewrite is fine


class TestCacheDirectory:
    def test_layout(self, tmp_path):
        cache = ZeroCache(tmp_path)
        label = character(4, 3).label
        p = cache.path_for(label, 100.0)
        assert p == tmp_path / "zeros" / "q4" / "chi3_T100.zc"
        p2 = cache.path_for(label, 0.5)
        assert p2.name == "chi3_T0.5.zc"

    def test_load_or_scan_caches(self, tmp_path):
        cache = ZeroCache(tmp_path)
        chi = character(4, 3)
        zs1 = cache.load_or_scan(chi, 15.0)
        path = cache.path_for(chi.label, 15.0)
        assert path.exists()
        before = path.read_bytes()
        zs2 = cache.load_or_scan(chi, 15.0)
        assert path.read_bytes() == before
        assert np.array_equal(zs1.ordinates, zs2.ordinates)

    def test_load_or_scan_propagates_corruption(self, tmp_path):
        cache = ZeroCache(tmp_path)
        chi = character(4, 3)
        cache.load_or_scan(chi, 15.0)
        path = cache.path_for(chi.label, 15.0)
        raw = bytearray(path.read_bytes())
        raw[60] ^= 0x55
        path.write_bytes(bytes(raw))
        with pytest.raises(CacheChecksumError):
            cache.load_or_scan(chi, 15.0)
        # explicit force rescans over the bad file
        zs = cache.load_or_scan(chi, 15.0, force=True)
        assert zs.certified

    def test_missing_returns_none(self, tmp_path):
        cache = ZeroCache(tmp_path)
        assert cache.load(character(4, 3).label, 33.0) is None


class TestEmitTable:
    def test_csv_determinism_and_parse(self, tmp_path):
        rows = [
            {"q": 4, "a": 1, "value": math.pi, "kind": "demo"},
            {"q": 4, "a": 3, "value": -1.0 / 3, "kind": "demo"},
        ]
        p1, p2 = tmp_path / "t1.csv", tmp_path / "t2.csv"
        emit_table(rows, p1, "csv")
        emit_table(rows, p2, "csv")
        assert p1.read_bytes() == p2.read_bytes()
        lines = p1.read_text().strip().splitlines()
        assert lines[0] == "q,a,value,kind"
        assert float(lines[1].split(",")[2]) == math.pi  # 17 digits round-trip

    def test_json_round_trip_exact(self, tmp_path):
        rows = [{"x": 0.1 + 0.2, "n": 7, "s": "a,b", "flag": True}]
        p = tmp_path / "t.json"
        emit_table(rows, p, "json")
        back = json.loads(p.read_text())
        assert back == [{"x": 0.1 + 0.2, "n": 7, "s": "a,b", "flag": True}]

    def test_empty_rows(self, tmp_path):
        p = tmp_path / "empty.csv"
        emit_table([], p, "csv")
        assert p.read_text() == ""
        emit_table([], p, "csv", header=["x", "y"])
        assert p.read_text() == "x,y\n"
        pj = tmp_path / "empty.json"
        emit_table([], pj, "json")
        assert json.loads(pj.read_text()) == []

    def test_header_pins_column_order(self, tmp_path):
        p = tmp_path / "ordered.csv"
        emit_table([{"x": 1, "y": 2}], p, "csv", header=["y", "x"])
        assert p.read_text().splitlines()[0] == "y,x"

    def test_streaming_many_rows(self, tmp_path):
        def gen():
            for i in range(100000):
                yield {"i": i, "v": i * 0.5}

        p = tmp_path / "big.csv"
        emit_table(gen(), p, "csv")
        with open(p) as fh:
            assert sum(1 for _ in fh) == 100001

    def test_mismatched_keys_rejected(self):
        buf = io.StringIO()
        with pytest.raises(ValueError):
            emit_table([{"a": 1}, {"b": 2}], buf, "csv")

    def test_unsupported_value_rejected(self):
        buf = io.StringIO()
        with pytest.raises(TypeError):
            emit_table([{"a": 1 + 2j}], buf, "csv")

    def test_bad_format_rejected(self):
        with pytest.raises(ValueError):
            emit_table([], io.StringIO(), "xml")
