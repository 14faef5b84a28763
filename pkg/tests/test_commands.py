import csv

from typer.testing import CliRunner

from src.checkpoint import load_checkpoint, save_checkpoint
from src.commands import (
    bench_speedup,
    cmd_bench_speedup,
    cmd_eval,
    cmd_params,
    cmd_train,
    cmd_verify,
    describe_parameters,
    reference_key,
    run_label,
)
from src.config import ExperimentConfig
from src.exceptions import CheckpointError
from src.main import app
from src.metrics import METRICS_COLUMNS
from src.models import Mode

runner = CliRunner()


def _config(tmp_path, **overrides):
    settings = {"out_dir": str(tmp_path), "sequential": True, "max_rounds": 2}
    settings.update(overrides)
    return ExperimentConfig(**settings)


class TestLabels:
    """Test run labels and reference keys"""

    def test_run_label(self):
        """Test human-readable labels per mode"""
        assert run_label(Mode.CLASSICAL_BASELINE, 3, 1) == "Classical"
        assert run_label(Mode.QTRL_CENTRIC, 7, 1) == "Centric QTRL-7"
        assert run_label(Mode.QTRL_DISTRIBUTED, 3, 4) == "Distributed QTRL-3 (4 agents)"

    def test_reference_key(self):
        """Test keys into the reference tables"""
        assert reference_key(Mode.CLASSICAL_BASELINE, None, 1) == "classical"
        assert reference_key(Mode.QTRL_CENTRIC, 13, 1) == "centric-13"
        assert reference_key(Mode.QTRL_DISTRIBUTED, 3, 4) == "distributed-3x4"

    def test_describe_parameters(self, qt_model, classical_model):
        """Test parameter descriptions for both model kinds"""
        assert describe_parameters(qt_model) == (
            "Trainable parameters: 271 (circuit 30 + mapping 241), "
            "generated: 909 on 10 qubits"
        )
        assert describe_parameters(classical_model) == (
            "Trainable parameters: 4835 for topology (147-32, 32-3)"
        )


class TestTrainCommand:
    """Test the train command"""

    def test_zero_rounds_writes_outputs(self, tmp_path, capsys):
        """Test a zero-round run still writes metrics and a checkpoint"""
        config = _config(tmp_path, max_rounds=0)
        assert cmd_train(config) == 0
        out = capsys.readouterr().out
        assert "Trainable parameters: 331" in out
        assert "no rounds run" in out
        with open(config.metrics_path, newline="") as f:
            assert list(csv.reader(f)) == [list(METRICS_COLUMNS)]
        header, _ = load_checkpoint(config.checkpoint_path)
        assert header.layers == 3

    def test_classical_parameter_count(self, tmp_path, capsys):
        """Test the baseline reports 4835 parameters"""
        config = _config(tmp_path, mode=Mode.CLASSICAL_BASELINE, max_rounds=0)
        assert cmd_train(config) == 0
        assert "Trainable parameters: 4835" in capsys.readouterr().out

    def test_sequential_runs_are_byte_identical(self, tmp_path):
        """Test seeded sequential runs write identical files"""
        first = _config(tmp_path / "a", mode=Mode.QTRL_DISTRIBUTED, agents=2)
        second = _config(tmp_path / "b", mode=Mode.QTRL_DISTRIBUTED, agents=2)
        assert cmd_train(first) == 0
        assert cmd_train(second) == 0
        assert first.metrics_path.read_bytes() == second.metrics_path.read_bytes()
        assert first.checkpoint_path.read_bytes() == second.checkpoint_path.read_bytes()
        rows = first.metrics_path.read_text().splitlines()
        assert len(rows) == 1 + 2 * 3

    def test_checkpoint_failure(self, tmp_path, mocker):
        """Test a checkpoint error gives a non-zero status"""
        mocker.patch("src.commands.save_checkpoint", side_effect=CheckpointError("disk full"))
        assert cmd_train(_config(tmp_path, max_rounds=0)) == 1


class TestBenchSpeedup:
    """Test the speedup benchmark"""

    def test_unreached_target_gives_undefined_speedup(self, tmp_path):
        """Test speedup is undefined when no run reaches the target"""
        config = _config(
            tmp_path, bench_agents=(2,), target_reward=1.0, target_window=1
        )
        rows = bench_speedup(config)
        assert [r.agents for r in rows] == [1, 2]
        assert rows[0].label == "Centric QTRL-3"
        assert all(r.rounds_to_target is None for r in rows)
        assert all(r.speedup_rounds is None for r in rows)
        assert rows[1].reference == 2.06

    def test_writes_report(self, tmp_path, capsys):
        """Test the report is printed and written"""
        config = _config(
            tmp_path, bench_agents=(2,), target_reward=1.0, target_window=1, max_rounds=1
        )
        assert cmd_bench_speedup(config) == 0
        assert config.speedup_path.exists()
        assert "Speedup to target" in capsys.readouterr().out


class TestOtherCommands:
    """Test verify, eval and params"""

    def test_verify_env(self, capsys):
        """Test the environment suite passes"""
        assert cmd_verify(["env"]) == 0
        assert "checks passed" in capsys.readouterr().out

    def test_verify_unknown_suite(self):
        """Test an unknown suite fails"""
        assert cmd_verify(["bogus"]) == 1

    def test_eval(self, tmp_path, classical_model, capsys):
        """Test evaluation prints measured and reported rewards"""
        path = save_checkpoint(tmp_path / "model.ckpt", classical_model, Mode.CLASSICAL_BASELINE)
        assert cmd_eval(path, episodes=5, seed=1) == 0
        out = capsys.readouterr().out
        assert "Evaluation of Classical over 5 episodes" in out
        assert "Reported reward: 0.9244" in out

    def test_eval_needs_episodes(self, tmp_path, classical_model):
        """Test zero evaluation episodes are refused"""
        path = save_checkpoint(tmp_path / "model.ckpt", classical_model, Mode.CLASSICAL_BASELINE)
        assert cmd_eval(path, episodes=0) == 1

    def test_eval_missing_checkpoint(self, tmp_path):
        """Test a missing checkpoint fails"""
        assert cmd_eval(tmp_path / "absent.ckpt", episodes=5) == 1

    def test_params(self, capsys):
        """Test every parameter count is printed"""
        assert cmd_params([3, 7, 13]) == 0
        out = capsys.readouterr().out
        for value in ("331", "451", "631", "4835"):
            assert value in out

    def test_params_rejects_zero_layers(self):
        """Test zero layers fail"""
        assert cmd_params([0]) == 1


class TestCli:
    """Test the typer application"""

    def test_params(self):
        """Test the params command"""
        result = runner.invoke(app, ["params", "--layers", "3"])
        assert result.exit_code == 0
        assert "331" in result.output

    def test_train(self, tmp_path):
        """Test the train command writes its outputs"""
        result = runner.invoke(
            app, ["train", "--max-rounds", "0", "--out", str(tmp_path), "--sequential"]
        )
        assert result.exit_code == 0
        assert (tmp_path / "metrics.csv").exists()
        assert (tmp_path / "model.ckpt").exists()

    def test_train_past_target_flag(self, tmp_path, mocker):
        """Test --train-past-target turns off stopping at the target"""
        train = mocker.patch("src.main.cmd_train", return_value=0)
        result = runner.invoke(app, ["train", "--out", str(tmp_path), "--train-past-target"])
        assert result.exit_code == 0
        assert train.call_args.args[0].stop_at_target is False

    def test_train_stops_at_target_by_default(self, tmp_path, mocker):
        """Test training stops at the target unless told otherwise"""
        train = mocker.patch("src.main.cmd_train", return_value=0)
        runner.invoke(app, ["train", "--out", str(tmp_path)])
        assert train.call_args.args[0].stop_at_target is True

    def test_invalid_mode(self, tmp_path):
        """Test an unknown mode is a usage error"""
        result = runner.invoke(app, ["train", "--mode", "quantum", "--out", str(tmp_path)])
        assert result.exit_code == 2

    def test_verify_unknown_suite(self):
        """Test an unknown suite exits non-zero"""
        result = runner.invoke(app, ["verify", "bogus"])
        assert result.exit_code == 1
