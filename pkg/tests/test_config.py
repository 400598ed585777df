import pytest

from twptr.closed_loop import DelayTarget, ScenarioKind
from twptr.config import KEYS, RunConfig, config_keys, format_config, load_config, parse_config
from twptr.dynamics import PlantModel, RobotParams
from twptr.errors import ParseError, UnknownKey, ValidationError


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("")
    cfg = load_config(path)
    r = cfg.robot
    assert (r.r, r.l, r.m, r.M, r.I_w, r.I_p, r.g) == (0.2, 1.0, 4.0, 100.0, 0.07, 86.67, 10.0)
    assert cfg == RunConfig()


def test_values_and_comments():
    cfg = parse_config(
        """
        # vehicle
        r = 0.25        # bigger wheels
        scenario = mpc-delay
        plant_model = as_printed
        command_delay_target = torque
        delay_samples = 3
        realtime = true
        disturbance_a1 = 0
        """
    )
    assert cfg.robot.r == 0.25
    assert cfg.scenario.kind is ScenarioKind.MPC_DELAYED
    assert cfg.scenario.plant_model is PlantModel.AS_PRINTED
    assert cfg.scenario.delay_target is DelayTarget.TORQUE
    assert cfg.motor.delay_samples == 3 and cfg.scenario.motor.delay_samples == 3
    assert cfg.session.realtime is True
    assert cfg.scenario.disturbance.a1 == 0.0
    assert cfg.scenario.robot is cfg.robot


def test_motor_inertia_follows_wheel_inertia():
    assert parse_config("I_w = 0.1").motor.I_w == 0.1
    assert parse_config("I_w = 0.1\nmotor_I_w = 0.3").motor.I_w == 0.3


def test_validation_names_key():
    with pytest.raises(ValidationError) as info:
        parse_config("r = -1")
    assert info.value.key == "r"
    with pytest.raises(ValidationError) as info:
        parse_config("motor_K = 0")
    assert info.value.key == "motor_K"
    with pytest.raises(ValidationError) as info:
        parse_config("duration = 0.015")
    assert info.value.key == "duration"


def test_unknown_key():
    with pytest.raises(UnknownKey) as info:
        parse_config("\nwheel_radius = 0.2")
    assert info.value.key == "wheel_radius" and info.value.lineno == 2


@pytest.mark.parametrize(
    "text, lineno",
    [("r 0.2", 1), ("\n\nr = abc", 3), ("r =", 1), ("= 3", 1), ("r = 1\nr = 2", 2), ("realtime = maybe", 1),
     ("scenario = fancy", 1), ("delay_samples = 1.5", 1), ("r = nan", 1)],
)
def test_parse_errors_report_line(text, lineno):
    with pytest.raises(ParseError) as info:
        parse_config(text)
    assert info.value.lineno == lineno
    assert f"line {lineno}" in str(info.value)


def test_format_round_trip():
    cfg = parse_config("r = 0.3\nscenario = mpc\nreport_sync = true\nendpoint = 0.0.0.0:9000\nsubsteps = 4")
    assert parse_config(format_config(cfg)) == cfg


def test_key_list_is_complete():
    keys = [k for k, _ in config_keys()]
    assert keys == list(KEYS)
    assert dict(config_keys())["I_p"] == repr(RobotParams().I_p)
