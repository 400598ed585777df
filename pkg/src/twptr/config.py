"""Plain ``key = value`` run configuration.

Every key is optional; anything left out takes its default (the robot block
defaults to the published vehicle parameters). ``#`` starts a comment, blank
lines are ignored, keys are case-sensitive and may appear at most once.
"""

import math
from dataclasses import dataclass, field, fields

from twptr.closed_loop import DelayTarget, Disturbance, DisturbanceMode, ScenarioConfig, ScenarioKind
from twptr.dynamics import PlantModel, RobotParams
from twptr.errors import ParseError, UnknownKey, ValidationError
from twptr.hil import SessionConfig
from twptr.motor import MotorParams


def _float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"not a finite number: {text!r}")
    return value


def _int(text):
    return int(text)


def _bool(text):
    lowered = text.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _choice(enum_cls):
    def parse(text):
        try:
            return enum_cls(text)
        except ValueError:
            allowed = ", ".join(m.value for m in enum_cls)
            raise ValueError(f"expected one of {allowed}, got {text!r}") from None

    return parse


def _str(text):
    return text


# key -> (group, field name, parser)
KEYS = {
    "r": ("robot", "r", _float),
    "l": ("robot", "l", _float),
    "m": ("robot", "m", _float),
    "M": ("robot", "M", _float),
    "I_w": ("robot", "I_w", _float),
    "I_p": ("robot", "I_p", _float),
    "g": ("robot", "g", _float),
    "b_pw": ("robot", "b_pw", _float),
    "Ts": ("robot", "Ts", _float),
    "motor_K": ("motor", "K", _float),
    "motor_R": ("motor", "R", _float),
    "motor_L": ("motor", "L", _float),
    "motor_b_m": ("motor", "b_m", _float),
    "motor_I_w": ("motor", "I_w", _float),
    "delay_samples": ("motor", "delay_samples", _int),
    "scenario": ("scenario", "kind", _choice(ScenarioKind)),
    "duration": ("scenario", "duration", _float),
    "plant_model": ("scenario", "plant_model", _choice(PlantModel)),
    "disturbance_mode": ("scenario", "disturbance_mode", _choice(DisturbanceMode)),
    "command_delay_target": ("scenario", "delay_target", _choice(DelayTarget)),
    "substeps": ("scenario", "substeps", _int),
    "disturbance_a1": ("disturbance", "a1", _float),
    "disturbance_w1": ("disturbance", "w1", _float),
    "disturbance_a2": ("disturbance", "a2", _float),
    "disturbance_w2": ("disturbance", "w2", _float),
    "endpoint": ("session", "endpoint", _str),
    "tick_period": ("session", "tick_period", _float),
    "realtime": ("session", "realtime", _bool),
    "timeout": ("session", "timeout", _float),
    "accept_timeout": ("session", "accept_timeout", _float),
    "sync_speed_threshold": ("session", "speed_threshold", _float),
    "sync_phase_threshold": ("session", "phase_threshold", _float),
    "report_sync": ("session", "report_sync", _bool),
}

_FIELD_TO_KEY = {(group, name): key for key, (group, name, _) in KEYS.items()}


@dataclass(frozen=True)
class RunConfig:
    robot: RobotParams = field(default_factory=RobotParams)
    motor: MotorParams = field(default_factory=MotorParams)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    session: SessionConfig = field(default_factory=SessionConfig)


def parse_config_text(text):
    """Parse config text into ``{key: (value, lineno)}`` without validating."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ParseError(lineno, f"expected 'key = value', got {raw.strip()!r}")
        if not key:
            raise ParseError(lineno, "missing key")
        if key not in KEYS:
            raise UnknownKey(key, lineno)
        if not value:
            raise ParseError(lineno, f"missing value for {key!r}")
        if key in entries:
            raise ParseError(lineno, f"duplicate key {key!r} (first set on line {entries[key][1]})")
        try:
            parsed = KEYS[key][2](value)
        except ValueError as exc:
            raise ParseError(lineno, f"{key}: {exc}") from None
        entries[key] = (parsed, lineno)
    return entries


def _build(cls, group, entries, extra=None):
    kwargs = dict(extra or {})
    for (g, name), key in _FIELD_TO_KEY.items():
        if g == group and key in entries:
            kwargs[name] = entries[key][0]
    try:
        return cls(**kwargs)
    except ValidationError as exc:
        key = _FIELD_TO_KEY.get((group, exc.key), exc.key)
        raise ValidationError(key, exc.message) from None


def build_config(entries):
    """Assemble and validate a :class:`RunConfig` from parsed entries."""
    robot = _build(RobotParams, "robot", entries)
    # The rotor inertia follows the robot's wheel inertia unless set explicitly.
    motor = _build(MotorParams, "motor", entries, {"I_w": robot.I_w})
    disturbance = _build(Disturbance, "disturbance", entries)
    scenario = _build(
        ScenarioConfig, "scenario", entries, {"robot": robot, "motor": motor, "disturbance": disturbance}
    )
    session = _build(SessionConfig, "session", entries)
    return RunConfig(robot, motor, scenario, session)


def parse_config(text):
    return build_config(parse_config_text(text))


def load_config(path):
    """Read and validate a config file.

    Raises:
        ParseError: malformed line (carries the line number).
        UnknownKey: a key outside :data:`KEYS`.
        ValidationError: a value breaks an invariant (carries the key).
    """
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def format_config(config):
    """Render every key of ``config`` in the file format (round-trips)."""
    groups = {
        "robot": config.robot,
        "motor": config.motor,
        "scenario": config.scenario,
        "disturbance": config.scenario.disturbance,
        "session": config.session,
    }
    lines = []
    for key, (group, name, _) in KEYS.items():
        value = getattr(groups[group], name)
        if hasattr(value, "value"):
            value = value.value
        elif isinstance(value, bool):
            value = str(value).lower()
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def config_keys():
    """``(key, default)`` pairs, in documentation order."""
    defaults = format_config(RunConfig()).splitlines()
    return [tuple(part.strip() for part in line.split("=", 1)) for line in defaults]


__all__ = ["KEYS", "RunConfig", "build_config", "config_keys", "format_config", "load_config", "parse_config"]
