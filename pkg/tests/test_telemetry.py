from robust_localization import telemetry
from robust_localization.lp_solver import LinearProgram, Relation, Sense, solve
from robust_localization.telemetry import NoOpTelemetry, TelemetryManager, get_telemetry


def test_disabled_manager_is_a_no_op():
    manager = TelemetryManager(enabled=False)
    assert not manager.enabled
    assert isinstance(manager.duration_histogram, NoOpTelemetry)
    manager.record_solve("optimal", 3)
    with manager.track_duration("lp.solve", {"variables": 1}):
        pass


def test_global_instance_honours_otel_enabled(monkeypatch):
    monkeypatch.setattr(telemetry, "_telemetry_instance", None)
    monkeypatch.setenv("OTEL_ENABLED", "false")
    manager = get_telemetry()
    assert not manager.enabled
    assert get_telemetry() is manager


def test_solves_are_counted(monkeypatch):
    calls = []

    class Recorder(TelemetryManager):
        def record_solve(self, status, pivots):
            calls.append((status, pivots))

    monkeypatch.setattr(telemetry, "_telemetry_instance", Recorder(enabled=False))
    outcome = solve(LinearProgram.build([1], Sense.MAX, [([1], Relation.LE, 5)], lower=[0]))
    assert calls == [("optimal", outcome.pivots)]
