import logging
import time

import click
import pytest
from click.testing import CliRunner

from wlab import config
from wlab.aop import _cache, audit, cache, metrics, validate_with
from wlab.schemas import Report, RunConfig


@pytest.fixture(autouse=True)
def clear_cache():
    yield
    _cache.clear()


# --- Tests for aspects ---


def test_cache_decorator():
    """Test @cache for hit, miss, and TTL expiration."""
    calls = []

    @cache(ttl=60)
    def expensive(lam):
        calls.append(lam)
        return [lam]

    # 1. Cache Miss
    first = expensive(1.0)
    # 2. Cache Hit
    second = expensive(1.0)
    assert first is second
    assert calls == [1.0]

    # 3. Cache Expiration
    key = "expensive:(1.0,):[]"
    _cache[key] = (_cache[key][0], time.time() - 70)
    third = expensive(1.0)
    assert third is not first
    assert calls == [1.0, 1.0]


def test_metrics_logs_even_on_failure(caplog):
    @metrics
    def failing():
        raise RuntimeError("boom")

    with caplog.at_level(logging.INFO, logger="wlab.aop"):
        with pytest.raises(RuntimeError):
            failing()
    assert "METRICAS para 'failing'" in caplog.text


def test_audit_logs_action(caplog):
    @audit("mesh")
    def command(**kwargs):
        return kwargs["surface"]

    with caplog.at_level(logging.INFO, logger="wlab.aop"):
        assert command(surface="plane") == "plane"
    assert "AUDITORIA: acción 'mesh'" in caplog.text


def _validated_command():
    @click.command()
    @click.option("--tol", type=float)
    @click.option("--line-samples", type=int)
    @click.pass_context
    @validate_with(RunConfig)
    def run(ctx, **_):
        cfg = ctx.obj["run_config"]
        click.echo(f"{cfg.tol} {cfg.line_samples} {cfg.surface}")

    return run


def test_validate_with_decorator_success():
    """Test @validate_with merges the loaded config with command options."""
    result = CliRunner().invoke(
        _validated_command(), ["--tol", "1e-6"], obj={"config": {"surface": "helicoid"}}
    )
    assert result.exit_code == 0
    assert result.output.strip() == "1e-06 64 helicoid"


@pytest.mark.parametrize("args", [["--tol", "-1"], ["--line-samples", "48"]])
def test_validate_with_decorator_failure(args):
    """Test @validate_with turns a validation error into a usage error."""
    result = CliRunner().invoke(_validated_command(), args, obj={"config": {}})
    assert result.exit_code == 2
    assert "Error de validación" in result.output


# --- Tests for configuration ---


def test_build_config_layers(tmp_path, monkeypatch):
    path = tmp_path / "lab.toml"
    path.write_text('[wlab]\nsurface = "riemann:λ=2"\nns = 32\n', encoding="utf-8")
    monkeypatch.delenv("WLAB_THREADS", raising=False)
    cfg = config.build_config(path)
    assert cfg["surface"] == "riemann:λ=2"
    assert cfg["ns"] == 32
    assert cfg["nt"] == config.DEFAULTS["nt"]


def test_test_config_skips_instance_file(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / config.INSTANCE_FILE).write_text("ns = 8\n", encoding="utf-8")
    monkeypatch.delenv("WLAB_THREADS", raising=False)
    assert config.build_config(test_config={"nt": 16})["ns"] == config.DEFAULTS["ns"]
    assert config.build_config()["ns"] == 8


def test_missing_config_file_is_rejected(tmp_path):
    with pytest.raises(click.BadParameter):
        config.build_config(tmp_path / "missing.toml")


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv("WLAB_THREADS", "4")
    assert config.build_config(test_config={})["threads"] == 4


def test_init_config_writes_loadable_defaults(tmp_path):
    path = tmp_path / "wlab.toml"
    result = CliRunner().invoke(config.init_config_command, [str(path)])
    assert result.exit_code == 0
    assert "Configuración inicializada" in result.output
    assert config.load_file(path) == config.DEFAULTS


# --- Tests for reports ---


def test_report_checks():
    report = Report(command="mesh", surface="plane")
    report.check("residuo", "period-closure", 1e-12, 1e-8)
    assert report.passed
    report.check("flujo horizontal", "flux-vector", 0.0, 1e-6, upper=False)
    assert not report.passed
    assert report.failures() == ["flujo horizontal"]
