"""Run configuration: INI file with one section per subsystem.

Example (every key is optional; defaults mirror the 3D-MIMO setup of
128 BS antennas, 7 users with 8 antennas and 2 streams each)::

    [run]
    config_version = 1
    master_seed = 2016
    output_dir = out

    [scenario]
    bs_n_azimuth = 8
    bs_n_elevation = 8
    ue_antennas = 8
    n_rays = 12

    [link]
    num_users = 7
    streams_per_user = 2
    snr_db = 0, 10, 20, 30, 40
    drops = 100

    [methods]
    direct_svd = true
    method1_l = 2, 4, 6, 8

    [flops]
    nt = 32:256:8          ; start:stop:step, stop inclusive

    [bound]
    nt = 64
    m = 8
    spectra = flat, geometric, harmonic, two_level, rank_deficient
    spectrum.custom = 1, 0.5, 0.25    ; extra named spectrum
    trials = 1000

Lists are comma separated.  Validation is exhaustive: every problem is
collected and reported together in one :class:`~chanrecon.errors.ConfigError`.
"""

import configparser
import dataclasses
from dataclasses import dataclass, field

from .bound import standard_spectra
from .channel3d import ScenarioConfig
from .errors import ConfigError

__all__ = ["CONFIG_VERSION", "RunConfig", "parse_config", "load_config"]

CONFIG_VERSION = 1


@dataclass
class LinkSection:
    num_users: int = 7
    streams_per_user: int = 2
    snr_db: tuple = (0.0, 10.0, 20.0, 30.0, 40.0)
    drops: int = 100
    tx_power: float = 1.0
    bandwidth_hz: float = 20e6


@dataclass
class MethodsSection:
    direct_svd: bool = True
    method1_l: tuple = (2, 4, 6, 8)


@dataclass
class FlopsSection:
    nt: tuple = tuple(range(32, 257, 8))
    n_sub: int = 1


@dataclass
class BoundSection:
    nt: int = 64
    m: int = 8
    spectra: tuple = ("flat", "geometric", "harmonic", "two_level", "rank_deficient")
    custom_spectra: dict = field(default_factory=dict)
    trials: int = 1000
    slack: float = 0.05


@dataclass
class RunConfig:
    config_version: int = CONFIG_VERSION
    master_seed: int = 2016
    output_dir: str = "out"
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    link: LinkSection = field(default_factory=LinkSection)
    methods: MethodsSection = field(default_factory=MethodsSection)
    flops: FlopsSection = field(default_factory=FlopsSection)
    bound: BoundSection = field(default_factory=BoundSection)

    def problems(self):
        """Every constraint violation, as human-readable strings."""
        out = []
        if self.config_version != CONFIG_VERSION:
            out.append(f"[run] config_version {self.config_version} is not supported (expected {CONFIG_VERSION})")
        if not 0 <= self.master_seed < 2**64:
            out.append("[run] master_seed must be an unsigned 64-bit integer")
        sc, ln = self.scenario, self.link
        m, s, k = sc.ue_antennas, ln.streams_per_user, ln.num_users
        if k < 1:
            out.append("[link] num_users must be >= 1")
        if s < 1:
            out.append("[link] streams_per_user must be >= 1")
        if s > m:
            out.append(f"[link] streams_per_user S={s} exceeds user antennas M={m}")
        try:
            nt = sc.nt
        except ValueError:
            nt = None
        if nt is not None and k * s > nt:
            out.append(f"[link] ZF feasibility K*S <= Nt violated ({k}*{s} > {nt})")
        if ln.drops < 1:
            out.append("[link] drops must be >= 1")
        if not ln.tx_power > 0:
            out.append("[link] tx_power must be > 0")
        if not ln.snr_db:
            out.append("[link] snr_db list is empty")
        for l in self.methods.method1_l:
            if not m >= l >= s:
                out.append(f"[methods] method1_l={l}: M >= L >= S violated (M={m}, L={l}, S={s})")
        if not self.methods.direct_svd and not self.methods.method1_l:
            out.append("[methods] no method enabled")
        if not self.flops.nt or any(n < 1 for n in self.flops.nt):
            out.append("[flops] nt must be a non-empty list of positive integers")
        if self.flops.n_sub < 1:
            out.append("[flops] n_sub must be >= 1")
        bd = self.bound
        if bd.m < 3:
            out.append("[bound] m must be >= 3 (need d + p <= m with p >= 2)")
        if bd.m > bd.nt:
            out.append(f"[bound] m={bd.m} exceeds nt={bd.nt}")
        if bd.trials < 100:
            out.append("[bound] trials must be >= 100")
        if bd.slack < 0:
            out.append("[bound] slack must be >= 0")
        known = set(standard_spectra(max(bd.m, 1)))
        for name in bd.spectra:
            if name not in known and name not in bd.custom_spectra:
                out.append(f"[bound] unknown spectrum {name!r}")
        for name, sv in bd.custom_spectra.items():
            if len(sv) != bd.m:
                out.append(f"[bound] spectrum.{name} has {len(sv)} values, expected m={bd.m}")
            if any(x < 0 for x in sv) or any(b > a for a, b in zip(sv, sv[1:])):
                out.append(f"[bound] spectrum.{name} must be non-negative and non-increasing")
        return out

    def validate(self):
        problems = self.problems()
        if problems:
            raise ConfigError(problems)
        return self

    def bound_spectra(self):
        """Ordered ``(name, singular values)`` pairs for the bound check."""
        std = standard_spectra(self.bound.m)
        names = list(self.bound.spectra) + [n for n in self.bound.custom_spectra if n not in self.bound.spectra]
        return [(n, tuple(float(x) for x in (self.bound.custom_spectra.get(n) or std[n]))) for n in names]


# -- parsing -------------------------------------------------------------------

def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int(text):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        value = float(text)
    if not value.is_integer():
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


def _int_list(text):
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = [_int(p) for p in text.split(":")]
        if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] < 1):
            raise ValueError(f"range must be start:stop[:step] with step >= 1, got {text!r}")
        step = parts[2] if len(parts) == 3 else 1
        return tuple(range(parts[0], parts[1] + 1, step))
    return tuple(_int(p) for p in text.split(","))


def _float_list(text):
    text = text.strip()
    return tuple(float(p) for p in text.split(",")) if text else ()


def _str_list(text):
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _converter(default):
    if isinstance(default, bool):
        return _bool
    if isinstance(default, int):
        return _int
    if isinstance(default, float):
        return float
    if isinstance(default, tuple):
        if default and all(isinstance(x, str) for x in default):
            return _str_list
        if default and all(isinstance(x, int) for x in default):
            return _int_list
        return _float_list
    return str


def _read_section(parser, section, defaults, problems, extra=None):
    """Apply ``[section]`` onto a dict of defaults, collecting errors."""
    values = dict(defaults)
    if not parser.has_section(section):
        return values
    for key, raw in parser.items(section):
        if extra is not None and extra(key, raw, values, problems):
            continue
        if key not in defaults:
            problems.append(f"[{section}] unknown key {key!r}")
            continue
        try:
            values[key] = _converter(defaults[key])(raw)
        except ValueError as exc:
            problems.append(f"[{section}] {key}: {exc}")
    return values


def parse_config(text, source="<config>"):
    """Parse and validate INI text into a :class:`RunConfig`.

    Raises
    ------
    ConfigError
        With every parse or validation problem found.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError([f"parse error: {exc}"]) from exc

    problems = []
    known = {"run", "scenario", "link", "methods", "flops", "bound"}
    for sec in parser.sections():
        if sec not in known:
            problems.append(f"unknown section [{sec}]")

    run = _read_section(parser, "run", {"config_version": CONFIG_VERSION, "master_seed": 2016,
                                        "output_dir": "out"}, problems)

    scen_defaults = {f.name: getattr(ScenarioConfig(), f.name) for f in dataclasses.fields(ScenarioConfig)}
    scen = _read_section(parser, "scenario", scen_defaults, problems)
    scen["zod_range_deg"] = tuple(scen["zod_range_deg"])
    if len(scen["zod_range_deg"]) != 2:
        problems.append("[scenario] zod_range_deg needs exactly two values")
        scen["zod_range_deg"] = scen_defaults["zod_range_deg"]
    scenario_ok = True
    try:
        scenario = ScenarioConfig(**scen)
    except ValueError as exc:
        problems.extend(f"[scenario] {p}" for p in str(exc).split("; "))
        scenario, scenario_ok = ScenarioConfig(), False

    link = LinkSection(**_read_section(parser, "link", dataclasses.asdict(LinkSection()), problems))
    methods = MethodsSection(**_read_section(parser, "methods", dataclasses.asdict(MethodsSection()), problems))
    flops = FlopsSection(**_read_section(parser, "flops", dataclasses.asdict(FlopsSection()), problems))

    def spectrum_key(key, raw, values, errs):
        if not key.startswith("spectrum."):
            return False
        try:
            values["custom_spectra"] = {**values["custom_spectra"], key[len("spectrum."):]: _float_list(raw)}
        except ValueError as exc:
            errs.append(f"[bound] {key}: {exc}")
        return True

    bdefaults = dataclasses.asdict(BoundSection())
    bdefaults.pop("custom_spectra")
    bvals = _read_section(parser, "bound", {**bdefaults, "custom_spectra": {}}, problems, extra=spectrum_key)
    bound = BoundSection(**bvals)

    cfg = RunConfig(config_version=run["config_version"], master_seed=run["master_seed"],
                    output_dir=run["output_dir"], scenario=scenario, link=link,
                    methods=methods, flops=flops, bound=bound)
    # cross-section checks against a rejected scenario would only add noise
    problems.extend(p for p in cfg.problems() if scenario_ok or not p.startswith("[link]"))
    if problems:
        raise ConfigError(problems)
    return cfg


def load_config(path):
    """Read and validate a config file; ``None`` gives the defaults."""
    if path is None:
        return RunConfig().validate()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError([f"cannot read config {path}: {exc}"]) from exc
    return parse_config(text, source=str(path))
