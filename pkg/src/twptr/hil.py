"""Lockstep software-in-the-loop harness.

The plant process owns the pendulum, the actuator delay and the motor; the
controller process owns the predictive layer and the voltage law. They talk
over a reliable byte stream in newline-terminated ASCII records::

    GYRO <seq> <t> <omega>          plant -> controller
    VOLT <seq> <v>                  controller -> plant
    SPD <seq> <wheel_rate>          plant -> controller
    SYNC <seq> <speed_diff> <phase_diff>   controller -> plant (optional)
    END <seq>                       plant -> controller

Floats are written with 17 significant digits, which round-trips IEEE
doubles exactly, so a networked run reproduces the in-process run bit for
bit. Each tick is strictly request/response: the plant never sends the next
GYRO before the previous VOLT has arrived.
"""

import math
import re
import socket
import time
from dataclasses import dataclass, field

from twptr.closed_loop import ControllerSide, DelayTarget, PlantSide, ScenarioKind, Trajectory
from twptr.errors import HilTimeout, MalformedFrame, ProtocolError, ScenarioAborted, SequenceMismatch, TwptrError
from twptr.errors import ValidationError
from twptr.motor import DelayLine, MotorState, delay_push, motor_step
from twptr.mpc import GyroSample
from twptr.ode import StepSpec

MAX_LINE = 4096


@dataclass(frozen=True)
class Gyro:
    seq: int
    t: float
    omega: float


@dataclass(frozen=True)
class Volt:
    seq: int
    v: float


@dataclass(frozen=True)
class Spd:
    seq: int
    wheel_rate: float


@dataclass(frozen=True)
class Sync:
    seq: int
    speed_diff: float
    phase_diff: float


@dataclass(frozen=True)
class End:
    seq: int


_LAYOUT = {"GYRO": (Gyro, 2), "VOLT": (Volt, 1), "SPD": (Spd, 1), "SYNC": (Sync, 2), "END": (End, 0)}
_TAGS = {cls: tag for tag, (cls, _) in _LAYOUT.items()}
_INT = re.compile(r"[0-9]+\Z")
_FLOAT = re.compile(r"[+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)([eE][+-]?[0-9]+)?\Z")


def encode(msg):
    """Render one message as an ASCII line (bytes, newline-terminated)."""
    tag = _TAGS[type(msg)]
    values = [getattr(msg, name) for name in msg.__dataclass_fields__][1:]
    parts = [tag, str(int(msg.seq))] + [f"{float(v):.16e}" for v in values]
    return (" ".join(parts) + "\n").encode("ascii")


def decode(line):
    """Parse one line produced by :func:`encode`.

    Raises:
        MalformedFrame: unknown tag, wrong field count, or a field that is
            not a plain decimal number (non-finite values included).
    """
    if isinstance(line, str):
        try:
            line = line.encode("ascii")
        except UnicodeEncodeError as exc:
            raise MalformedFrame(f"non-ASCII frame: {line!r}") from exc
    if line.endswith(b"\n"):
        line = line[:-1]
    try:
        text = line.decode("ascii")
    except UnicodeDecodeError as exc:
        raise MalformedFrame(f"non-ASCII frame: {line!r}") from exc
    parts = text.split(" ")
    layout = _LAYOUT.get(parts[0])
    if layout is None:
        raise MalformedFrame(f"unknown tag in {text!r}")
    cls, n_floats = layout
    if len(parts) != 2 + n_floats:
        raise MalformedFrame(f"{parts[0]} expects {1 + n_floats} fields, got {len(parts) - 1}: {text!r}")
    if not _INT.match(parts[1]):
        raise MalformedFrame(f"bad sequence number {parts[1]!r}")
    values = []
    for token in parts[2:]:
        if not _FLOAT.match(token):
            raise MalformedFrame(f"bad number {token!r}")
        value = float(token)
        if not math.isfinite(value):
            raise MalformedFrame(f"non-finite number {token!r}")
        values.append(value)
    return cls(int(parts[1]), *values)


@dataclass(frozen=True)
class SyncThresholds:
    speed: float = 0.01
    phase: float = 0.01


@dataclass(frozen=True)
class SyncVerdict:
    in_sync: bool
    speed_diff: float
    phase_diff: float
    message: Sync


def wrap_phase(angle):
    """Wrap to the half-open interval (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def sync_check(expected_rate, measured_rate, expected_phase, measured_phase, thresholds=SyncThresholds(), seq=0):
    speed_diff = measured_rate - expected_rate
    phase_diff = wrap_phase(measured_phase - expected_phase)
    ok = abs(speed_diff) <= thresholds.speed and abs(phase_diff) <= thresholds.phase
    return SyncVerdict(ok, speed_diff, phase_diff, Sync(seq, speed_diff, phase_diff))


@dataclass(frozen=True)
class SessionConfig:
    endpoint: str = "127.0.0.1:5555"
    tick_period: float = 0.01
    realtime: bool = False
    timeout: float = 0.1
    accept_timeout: float = 30.0
    speed_threshold: float = 0.01
    phase_threshold: float = 0.01
    report_sync: bool = False

    def __post_init__(self):
        for name in ("tick_period", "timeout", "accept_timeout", "speed_threshold", "phase_threshold"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(name, f"must be > 0, got {value!r}")
        parse_endpoint(self.endpoint)

    @property
    def thresholds(self):
        return SyncThresholds(self.speed_threshold, self.phase_threshold)


def parse_endpoint(endpoint):
    host, sep, port = endpoint.rpartition(":")
    if not sep or not host or not port.isdigit() or int(port) > 65535:
        raise ValidationError("endpoint", f"expected host:port, got {endpoint!r}")
    return host.strip("[]"), int(port)


class LineChannel:
    """Newline-framed message stream over a connected socket."""

    def __init__(self, sock, transcript=None):
        self.sock = sock
        self.reader = sock.makefile("rb")
        self.transcript = transcript

    def settimeout(self, timeout):
        self.sock.settimeout(timeout)

    def send(self, msg):
        data = encode(msg)
        if self.transcript is not None:
            self.transcript.append(data)
        self.sock.sendall(data)

    def recv(self):
        try:
            line = self.reader.readline(MAX_LINE)
        except socket.timeout as exc:
            raise HilTimeout("no reply from peer within the deadline") from exc
        if not line:
            raise ProtocolError("peer closed the connection")
        if not line.endswith(b"\n"):
            raise MalformedFrame(f"unterminated or oversized frame: {line[:80]!r}")
        if self.transcript is not None:
            self.transcript.append(line)
        return decode(line)

    def close(self):
        self.reader.close()
        self.sock.close()


def _expect(msg, cls, seq):
    if not isinstance(msg, cls):
        raise ProtocolError(f"expected {_TAGS[cls]} {seq}, got {msg!r}")
    if msg.seq != seq:
        raise SequenceMismatch(f"expected {_TAGS[cls]} seq {seq}, got {msg.seq}")
    return msg


def plant_session(channel, session, scenario):
    """Drive one lockstep session as the plant; returns the recorded trajectory."""
    scenario = scenario.with_kind(ScenarioKind.HIERARCHICAL)
    plant = PlantSide(scenario)
    traj = Trajectory()
    if session.realtime:
        channel.settimeout(session.timeout)
    start = time.monotonic()
    n = scenario.n_samples
    for k in range(n):
        if session.realtime:
            delay = start + k * session.tick_period - time.monotonic()
            if delay > 0:
                time.sleep(delay)
        try:
            if k > 0:
                plant.advance()
            gyro = plant.gyro()
        except (TwptrError, ArithmeticError, ValueError) as exc:
            _send_end(channel, k)
            raise ScenarioAborted(k, exc) from exc
        channel.send(Gyro(k, gyro.t, gyro.omega))
        volt = _expect(channel.recv(), Volt, k)
        plant.actuate(0.0, volt.v)
        speed = plant.encoder_speed()
        channel.send(Spd(k, speed))
        if session.report_sync:
            _expect(channel.recv(), Sync, k)
        try:
            sample = plant.record(gyro, volt.v)
        except ArithmeticError as exc:
            _send_end(channel, k)
            raise ScenarioAborted(k, exc) from exc
        traj.samples.append(sample)
        traj.encoder.append(speed)
    channel.send(End(n))
    return traj


def _send_end(channel, seq):
    try:
        channel.send(End(seq))
    except OSError:
        pass


class MotorReference:
    """Controller-side copy of the actuator chain, used for the sync check."""

    def __init__(self, motor, Ts, delay_target=DelayTarget.VOLTAGE, substeps=1):
        self.motor = motor
        self.spec = StepSpec(Ts, substeps)
        depth = motor.delay_samples if DelayTarget(delay_target) is DelayTarget.VOLTAGE else 0
        self.line = DelayLine(depth)
        self.state = MotorState()
        self.voltage = 0.0

    def advance(self):
        for _ in range(self.spec.substeps):
            self.state = motor_step(self.motor, self.state, self.voltage, self.spec.dt)

    def push(self, v):
        self.voltage, self.line = delay_push(self.line, v)


@dataclass
class CommandLog:
    seq: list = field(default_factory=list)
    tau_cmd: list = field(default_factory=list)
    v_cmd: list = field(default_factory=list)
    speed: list = field(default_factory=list)
    sync: list = field(default_factory=list)

    def __len__(self):
        return len(self.seq)


def controller_session(channel, session, params, motor, delay_target=DelayTarget.VOLTAGE, substeps=1):
    """Answer GYRO records with VOLT records until END; returns the command log."""
    ctl = ControllerSide(params, motor, ScenarioKind.HIERARCHICAL, delay_target)
    reference = MotorReference(motor, params.Ts, delay_target, substeps)
    log = CommandLog()
    expected_phase = measured_phase = 0.0
    prev_expected = prev_measured = 0.0
    if session.realtime:
        channel.settimeout(session.timeout + session.tick_period)
    while True:
        msg = channel.recv()
        if isinstance(msg, End):
            return log
        if not isinstance(msg, Gyro):
            raise ProtocolError(f"expected GYRO or END, got {msg!r}")
        if msg.seq > 0:
            reference.advance()
        tau, v = ctl.command(GyroSample(msg.seq, msg.t, msg.omega))
        channel.send(Volt(msg.seq, v))
        reference.push(v)
        spd = _expect(channel.recv(), Spd, msg.seq)
        ctl.observe_speed(spd.wheel_rate)

        expected = reference.state.theta_dot
        if msg.seq > 0:
            expected_phase += params.Ts * (prev_expected + expected) / 2.0
            measured_phase += params.Ts * (prev_measured + spd.wheel_rate) / 2.0
        prev_expected, prev_measured = expected, spd.wheel_rate
        verdict = sync_check(expected, spd.wheel_rate, expected_phase, measured_phase, session.thresholds, msg.seq)
        if session.report_sync:
            channel.send(verdict.message)

        log.seq.append(msg.seq)
        log.tau_cmd.append(tau)
        log.v_cmd.append(v)
        log.speed.append(spd.wheel_rate)
        log.sync.append(verdict)


def plant_serve(config, scenario, ready=None, transcript=None):
    """Listen on ``config.endpoint``, serve one controller, return the trajectory.

    ``ready`` is called with the bound ``(host, port)`` once listening, which
    lets callers use port 0.
    """
    host, port = parse_endpoint(config.endpoint)
    with socket.create_server((host, port)) as server:
        server.settimeout(config.accept_timeout)
        if ready is not None:
            ready(server.getsockname()[:2])
        try:
            conn, _ = server.accept()
        except socket.timeout as exc:
            raise HilTimeout(f"no controller connected to {config.endpoint} within {config.accept_timeout}s") from exc
    conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
    conn.settimeout(None)
    channel = LineChannel(conn, transcript)
    try:
        return plant_session(channel, config, scenario)
    finally:
        channel.close()


def controller_client(config, params, motor, delay_target=DelayTarget.VOLTAGE, substeps=1, transcript=None):
    """Connect to a plant at ``config.endpoint`` and run until END."""
    host, port = parse_endpoint(config.endpoint)
    deadline = time.monotonic() + config.accept_timeout
    while True:
        try:
            conn = socket.create_connection((host, port), timeout=config.accept_timeout)
            break
        except ConnectionRefusedError:
            if time.monotonic() > deadline:
                raise
            time.sleep(0.05)
        except socket.timeout as exc:
            raise HilTimeout(f"could not reach plant at {config.endpoint}") from exc
    conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
    conn.settimeout(None)
    channel = LineChannel(conn, transcript)
    try:
        return controller_session(channel, config, params, motor, delay_target, substeps)
    finally:
        channel.close()
