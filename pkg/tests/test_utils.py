"""
Unit Tests for shared utilities

Tests for random streams, the worker pool, output helpers and the
exception hierarchy.
"""

import json

import numpy as np
import pandas as pd
import pytest

from utils.exceptions import AbcToolkitError, ConfigError, DomainError, EmptyPosteriorError
from utils.io_utils import file_checksum, write_csv, write_json_atomic
from utils.parallel import chunk_indices, parallel_map
from utils.rng import OBSERVED_STREAM, PROPOSAL_STREAM, make_generator


@pytest.mark.unit
class TestRandomStreams:
    """Test suite for make_generator."""

    def test_same_stream_same_numbers(self):
        """Test that a stream is reproducible."""
        a = make_generator(7, PROPOSAL_STREAM, 12).standard_normal(5)
        b = make_generator(7, PROPOSAL_STREAM, 12).standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_streams_independent(self):
        """Test that purpose tags and indices select different streams."""
        base = make_generator(7, PROPOSAL_STREAM, 12).standard_normal(5)
        assert not np.array_equal(base, make_generator(7, OBSERVED_STREAM, 12).standard_normal(5))
        assert not np.array_equal(base, make_generator(7, PROPOSAL_STREAM, 13).standard_normal(5))

    def test_negative_seed(self):
        """Test that a negative seed is refused."""
        with pytest.raises(ValueError):
            make_generator(-1)


@pytest.mark.unit
class TestParallel:
    """Test suite for chunking and the worker pool."""

    def test_chunk_indices(self):
        """Test contiguous chunks covering every index once."""
        chunks = chunk_indices(10, 4)
        assert [c.tolist() for c in chunks] == [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9]]
        assert chunk_indices(0, 4) == []

    def test_parallel_map_keeps_order(self):
        """Test that results come back in item order for any worker count."""
        items = [-3, 1, -4, 1, -5, 9, -2, 6]
        assert parallel_map(abs, items, workers=1) == parallel_map(abs, items, workers=2)
        assert parallel_map(abs, items, workers=2)[4] == 5


@pytest.mark.unit
class TestOutput:
    """Test suite for CSV and JSON output."""

    def test_json_non_finite(self, tmp_path):
        """Test that inf and nan are written as strings."""
        path = write_json_atomic({"a": float("inf"), "b": np.float64("nan"), "c": np.arange(2)}, tmp_path / "x.json")
        payload = json.loads(path.read_text())
        assert payload == {"a": "inf", "b": "nan", "c": [0, 1]}

    def test_json_leaves_no_temp_files(self, tmp_path):
        """Test that only the target file remains."""
        write_json_atomic({"a": 1}, tmp_path / "x.json")
        assert [p.name for p in tmp_path.iterdir()] == ["x.json"]

    def test_csv_float_format_and_checksum(self, tmp_path):
        """Test the fixed float format and that equal content gives equal checksums."""
        frame = pd.DataFrame({"x": [1.0 / 3.0]})
        first = write_csv(frame, tmp_path / "a.csv")
        second = write_csv(frame, tmp_path / "b.csv")
        assert first.read_text().splitlines() == ["x", "0.333333333333"]
        assert file_checksum(first) == file_checksum(second)


@pytest.mark.unit
class TestExceptions:
    """Test suite for the exception hierarchy."""

    def test_hierarchy(self):
        """Test that every toolkit error shares one base."""
        assert issubclass(DomainError, AbcToolkitError)
        assert issubclass(DomainError, ValueError)
        assert issubclass(EmptyPosteriorError, AbcToolkitError)

    def test_config_error_location(self):
        """Test that ConfigError reports line, column and field."""
        error = ConfigError("Cannot parse", field="delta", line=3, column=8)
        assert str(error) == "Cannot parse (line 3, column 8, field 'delta')"
        assert error.line == 3
