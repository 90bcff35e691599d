import logging
import math

import numpy as np
import pandas as pd
import pytest

from broadcastkit.utils.config_utils import RunConfig, load_config_file, parse_bool, resolve_config
from broadcastkit.utils.io_utils import PathUtils, safe_csv_save, safe_text_save
from broadcastkit.utils.log_utils import configure_logging, level_for
from broadcastkit.utils.report_utils import render_report
from broadcastkit.utils.validation_utils import ParamValidator


class TestParamValidator:
    def test_int(self):
        assert ParamValidator.validate_int(" 12 ", "budget") == 12
        with pytest.raises(ValueError, match="budget"):
            ParamValidator.validate_int("1.5", "budget")
        with pytest.raises(ValueError, match="at least 2"):
            ParamValidator.validate_int(1, "M", minimum=2)
        with pytest.raises(ValueError):
            ParamValidator.validate_int(True, "M")

    def test_float_rejects_non_finite(self):
        assert ParamValidator.validate_float("0.25", "theta") == 0.25
        with pytest.raises(ValueError, match="theta"):
            ParamValidator.validate_float("nan", "theta")
        with pytest.raises(ValueError, match="theta"):
            ParamValidator.validate_float("abc", "theta")

    def test_probability_and_levels(self):
        assert ParamValidator.validate_probability("0") == 0.0
        with pytest.raises(ValueError, match="lambda"):
            ParamValidator.validate_probability(1.01)
        assert ParamValidator.validate_levels("0.6, 0.9,") == [0.6, 0.9]
        assert ParamValidator.validate_levels("") == []
        assert ParamValidator.validate_levels([1, 0.5]) == [1.0, 0.5]
        with pytest.raises(ValueError, match="levels"):
            ParamValidator.validate_levels("0.0")

    def test_angle(self):
        assert ParamValidator.validate_angle("180", "omega", degrees=True) == pytest.approx(math.pi)
        assert ParamValidator.validate_angle("1.5", "omega") == 1.5

    def test_machine_and_dimensions(self):
        assert ParamValidator.validate_machine(" GM ") == "gm"
        with pytest.raises(ValueError, match="machine"):
            ParamValidator.validate_machine("xerox")
        with pytest.raises(ValueError):
            ParamValidator.validate_gm_copies(7)
        with pytest.raises(ValueError, match="d"):
            ParamValidator.validate_ancilla_dim(16)
        assert ParamValidator.validate_threads(None) is None
        with pytest.raises(ValueError, match="threads"):
            ParamValidator.validate_threads(0)


class TestConfig:
    def test_load_config_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# comment\n\nM = 3\nlevels = 0.6,0.7\n", encoding="utf-8")
        values, error = load_config_file(path)
        assert error is None
        assert values == {"M": "3", "levels": "0.6,0.7"}

    def test_load_config_file_errors(self, tmp_path):
        missing, error = load_config_file(tmp_path / "nope.cfg")
        assert missing is None and "not found" in error

        path = tmp_path / "bad.cfg"
        path.write_text("M 3\n", encoding="utf-8")
        values, error = load_config_file(path)
        assert values is None and "key=value" in error

        path.write_text("colour = red\n", encoding="utf-8")
        values, error = load_config_file(path)
        assert values is None and "colour" in error

    def test_defaults(self):
        config = resolve_config()
        assert config == RunConfig()
        assert config.seed == 42
        assert config.levels[0] == pytest.approx(0.55)
        assert config.levels[-1] == pytest.approx(1.0)

    def test_precedence(self):
        config = resolve_config({"budget": "50", "seed": "3"}, {"budget": 70, "seed": None})
        assert config.budget == 70
        assert config.seed == 3

    def test_invalid_value_names_field(self):
        with pytest.raises(ValueError, match="lambda"):
            resolve_config({"lambda": "2"})
        with pytest.raises(ValueError, match="unknown"):
            resolve_config(flag_values={"colour": "red"})

    def test_degrees_from_file(self):
        config = resolve_config({"degrees": "yes", "omega": "90", "fixed_theta": "45"})
        assert config.omega == pytest.approx(math.pi / 2)
        assert config.fixed_theta == pytest.approx(math.pi / 4)
        assert config.fixed_omega is None

    def test_angles_are_validated(self):
        with pytest.raises(ValueError, match="machine_theta"):
            resolve_config({"machine_theta": "quarter"})
        with pytest.raises(ValueError, match="omega"):
            resolve_config(flag_values={"omega": "inf", "degrees": True})
        assert resolve_config({"fixed_omega": "none"}).fixed_omega is None

    def test_parse_bool(self):
        assert parse_bool("On", "degrees") is True
        assert parse_bool("0", "degrees") is False
        with pytest.raises(ValueError, match="degrees"):
            parse_bool("maybe", "degrees")

    def test_to_dict_uses_lambda_key(self):
        data = RunConfig(lam=0.3).to_dict()
        assert data["lambda"] == 0.3
        assert "lam" not in data
        assert "lambda: 0.3" in RunConfig(lam=0.3).to_yaml()


class TestIO:
    def test_check_writable(self, tmp_path):
        assert PathUtils.check_writable(tmp_path / "out.csv") == (True, None)
        ok, error = PathUtils.check_writable(tmp_path)
        assert not ok and "directory" in error

        blocker = tmp_path / "file"
        blocker.write_text("x", encoding="utf-8")
        ok, error = PathUtils.check_writable(blocker / "out.csv")
        assert not ok

    def test_safe_csv_save_creates_parents(self, tmp_path):
        path = tmp_path / "nested" / "deeper" / "out.csv"
        frame = pd.DataFrame({"a": [1.0 / 3.0], "b": [np.nan]})
        ok, error = safe_csv_save(path, frame)
        assert ok and error is None
        assert path.read_text(encoding="utf-8") == "a,b\n0.33333333333333331,\n"
        assert not path.with_suffix(".csv.tmp").exists()

    def test_safe_csv_save_rejects_non_frames(self, tmp_path):
        ok, error = safe_csv_save(tmp_path / "out.csv", [[1, 2]])
        assert not ok and "DataFrame" in error

    def test_safe_text_save(self, tmp_path):
        path = tmp_path / "note.md"
        assert safe_text_save(path, "line\n") == (True, None)
        assert path.read_bytes() == b"line\n"


def test_render_report():
    text = render_report(
        command="clone",
        config={"seed": 42, "fixed_omega": None},
        summary=["worst clone fidelity 0.8"],
        columns=["copy", "fidelity"],
        rows=[(0, 0.8333333333333334), (1, None), (2, math.nan)],
        evidence_note="evidence only",
    )
    assert text.startswith("# broadcastkit run: clone")
    assert "> evidence only" in text
    assert "| seed | 42 |" in text
    assert "| copy | fidelity |" in text
    assert "| 0 | 0.8333333333 |" in text
    assert "| 1 | n/a |" in text
    assert "| 2 | n/a |" in text


def test_logging_levels():
    assert level_for(0) == logging.WARNING
    assert level_for(1) == logging.INFO
    assert level_for(5) == logging.DEBUG
    logger = configure_logging(1)
    configure_logging(2)
    assert len(logger.handlers) == 1
    assert logger.level == logging.DEBUG
