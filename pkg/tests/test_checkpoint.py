import json

import numpy as np
import pytest

from src.checkpoint import FORMAT, VERSION, load_checkpoint, save_checkpoint
from src.exceptions import CheckpointError
from src.models import Mode
from src.qsim import TWO_PI


def _rewrite_header(path, **changes):
    head, _, body = path.read_bytes().partition(b"\n")
    data = json.loads(head)
    data.update(changes)
    path.write_bytes(json.dumps(data).encode() + b"\n" + body)


class TestRoundTrip:
    """Test saving and loading models"""

    def test_qtrl_model(self, qt_model, tmp_path):
        """Test a generated model survives save and load"""
        path = save_checkpoint(tmp_path / "model.ckpt", qt_model, Mode.QTRL_CENTRIC, seed=7)
        header, loaded = load_checkpoint(path)
        assert header.mode is Mode.QTRL_CENTRIC
        assert header.n == 10
        assert header.layers == 1
        assert header.k == 909
        assert header.sizes == {"phi": 30, "beta": 241}
        assert header.seed == 7
        np.testing.assert_array_equal(loaded.parameters(), qt_model.parameters())
        np.testing.assert_array_equal(loaded.generate_theta(), qt_model.generate_theta())

    def test_classical_model(self, classical_model, tmp_path):
        """Test the baseline survives save and load"""
        path = save_checkpoint(tmp_path / "c.ckpt", classical_model, Mode.CLASSICAL_BASELINE)
        header, loaded = load_checkpoint(path)
        assert header.mode is Mode.CLASSICAL_BASELINE
        assert header.n is None
        assert header.sizes == {"theta": 4835}
        np.testing.assert_array_equal(loaded.parameters(), classical_model.parameters())

    def test_distributed_agent_count(self, qt_model, tmp_path):
        """Test the agent count is stored"""
        path = save_checkpoint(tmp_path / "d.ckpt", qt_model, Mode.QTRL_DISTRIBUTED, agents=4)
        header, _ = load_checkpoint(path)
        assert header.agents == 4

    def test_resave_is_byte_identical(self, qt_model, tmp_path):
        """Test saving a loaded model writes the same bytes"""
        first = save_checkpoint(tmp_path / "a.ckpt", qt_model, Mode.QTRL_CENTRIC)
        _, loaded = load_checkpoint(first)
        second = save_checkpoint(tmp_path / "b.ckpt", loaded, Mode.QTRL_CENTRIC)
        assert first.read_bytes() == second.read_bytes()

    def test_angles_are_folded(self, qt_model, tmp_path):
        """Test angles are folded into [0, 2π) without changing θ"""
        flat = qt_model.parameters()
        flat[:30] += 2 * TWO_PI
        shifted = qt_model.with_parameters(flat)
        _, loaded = load_checkpoint(
            save_checkpoint(tmp_path / "f.ckpt", shifted, Mode.QTRL_CENTRIC)
        )
        assert np.all((loaded.phi.angles >= 0) & (loaded.phi.angles < TWO_PI))
        np.testing.assert_allclose(
            loaded.generate_theta(), qt_model.generate_theta(), atol=1e-9
        )

    def test_creates_parent_directories(self, classical_model, tmp_path):
        """Test missing directories are created"""
        path = save_checkpoint(tmp_path / "deep" / "run" / "model.ckpt", classical_model, Mode.CLASSICAL_BASELINE)
        assert path.exists()

    def test_header_is_sorted_json(self, qt_model, tmp_path):
        """Test the header is sorted JSON with format and version"""
        path = save_checkpoint(tmp_path / "h.ckpt", qt_model, Mode.QTRL_CENTRIC)
        head = json.loads(path.read_bytes().partition(b"\n")[0])
        assert head["format"] == FORMAT
        assert head["version"] == VERSION
        assert list(head) == sorted(head)


class TestCorruption:
    """Test rejection of damaged checkpoints"""

    @pytest.fixture
    def saved(self, qt_model, tmp_path):
        return save_checkpoint(tmp_path / "model.ckpt", qt_model, Mode.QTRL_CENTRIC)

    def test_missing_file(self, tmp_path):
        """Test a missing file is reported"""
        with pytest.raises(CheckpointError, match="Cannot read"):
            load_checkpoint(tmp_path / "absent.ckpt")

    def test_truncated_payload(self, saved):
        """Test a short payload is rejected"""
        saved.write_bytes(saved.read_bytes()[:-8])
        with pytest.raises(CheckpointError, match="payload"):
            load_checkpoint(saved)

    def test_no_header_line(self, tmp_path):
        """Test a file without a header line is rejected"""
        path = tmp_path / "bad.ckpt"
        path.write_bytes(b"not a checkpoint")
        with pytest.raises(CheckpointError, match="no header line"):
            load_checkpoint(path)

    def test_malformed_header(self, tmp_path):
        """Test an unparsable header is rejected"""
        path = tmp_path / "bad.ckpt"
        path.write_bytes(b"{oops\n")
        with pytest.raises(CheckpointError, match="Malformed"):
            load_checkpoint(path)

    def test_wrong_format(self, saved):
        """Test a foreign format tag is rejected"""
        _rewrite_header(saved, format="something-else")
        with pytest.raises(CheckpointError, match="Not a checkpoint"):
            load_checkpoint(saved)

    def test_wrong_version(self, saved):
        """Test an unknown version is rejected"""
        _rewrite_header(saved, version=99)
        with pytest.raises(CheckpointError, match="version 99"):
            load_checkpoint(saved)

    def test_sizes_disagree_with_shape(self, saved):
        """Test header sizes must match n and L"""
        _rewrite_header(saved, L=2)
        with pytest.raises(CheckpointError, match="do not match"):
            load_checkpoint(saved)

    def test_topology_disagrees_with_k(self, saved):
        """Test k must match the policy topology"""
        _rewrite_header(saved, k=900)
        with pytest.raises(CheckpointError, match="k=900"):
            load_checkpoint(saved)

    def test_missing_key(self, saved):
        """Test a header missing a key is rejected"""
        head, _, body = saved.read_bytes().partition(b"\n")
        data = json.loads(head)
        del data["seed"]
        saved.write_bytes(json.dumps(data).encode() + b"\n" + body)
        with pytest.raises(CheckpointError, match="Incomplete"):
            load_checkpoint(saved)
