"""
Shared plumbing for the rpss management commands.

Exit codes: 0 success, 1 usage error (bad options, bad jitter source),
2 runtime error (engine guard, numerical failure, I/O). Machine output goes
to stdout; summaries, echoed seeds and logs go to stderr.
"""
import argparse
import logging
import secrets
import sys
from dataclasses import dataclass, field
from functools import partial

from django.core.management.base import BaseCommand, CommandError

from rpss.conf import get_setting
from rpss.exceptions import ConfigurationError, JitterModelError, RpssError
from rpss.jitter import describe, get_preset, load_jitter_file, preset_names
from rpss.models import RpssConfig

logger = logging.getLogger(__name__)

MODE_SIM = 'sim'
MODE_REAL = 'real'


def _usage_error(parser, message):
    if getattr(parser, 'called_from_command_line', False):
        parser.print_usage(sys.stderr)
        parser.exit(1, f"{parser.prog}: error: {message}\n")
    raise CommandError(f"Error: {message}", returncode=1)


def random_seed():
    return secrets.randbits(64)


@dataclass
class CommandConfig:
    """Resolved options of one command run."""
    subcommand: str
    array_size: int
    success_count: int
    bits: int | None
    modulus: int
    mode: str = MODE_SIM
    engine_seed: int | None = None
    timer_seed: int | None = None
    pipeline_seed: int | None = None
    jitter: object = None
    jitter_label: str | None = None
    count: int = 0
    output: str | None = None
    trace: bool = False
    reseed: bool = True
    probe_t: bool = False
    streams: int = 1
    fmt: str = 'text'
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.mode not in (MODE_SIM, MODE_REAL):
            raise ConfigurationError(f"mode must be 'sim' or 'real', got {self.mode!r}")
        if self.mode == MODE_SIM and self.jitter is None:
            raise ConfigurationError("sim mode needs --jitter or --jitter-file")
        if self.mode == MODE_REAL and self.timer_seed is not None:
            raise ConfigurationError("real mode reads a hardware timer; --timer-seed is not allowed")
        if self.count < 0:
            raise ConfigurationError(f"count must be >= 0, got {self.count}")
        if self.streams < 1:
            raise ConfigurationError(f"streams must be >= 1, got {self.streams}")
        self.rpss_config()

    def rpss_config(self):
        return RpssConfig(self.array_size, self.success_count, self.modulus, self.bits)

    def fill_seeds(self):
        """Draw any seed left unset; sim mode needs a timer seed too."""
        if self.engine_seed is None:
            self.engine_seed = random_seed()
        if self.pipeline_seed is None:
            self.pipeline_seed = random_seed()
        if self.mode == MODE_SIM and self.timer_seed is None:
            self.timer_seed = random_seed()

    def seed_summary(self):
        parts = [f"engine_seed={self.engine_seed}"]
        if self.mode == MODE_SIM:
            parts.append(f"timer_seed={self.timer_seed}")
        parts.append(f"pipeline_seed={self.pipeline_seed}")
        return ' '.join(parts)

    def system_summary(self):
        return (
            f"N={self.array_size} m={self.success_count} R={self.modulus}"
            + (f" n={self.bits}" if self.bits is not None else '')
        )


def seed_type(text):
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 bits, got {text}")
    return value


class RpssCommand(BaseCommand):
    """
    Base for every rpss command.

    Subclasses implement build_config(options) -> CommandConfig and
    run(config). Option errors surface as exit code 1, everything the
    library raises afterwards as exit code 2.
    """
    requires_system_checks = []
    uses_bits = True
    uses_modulus = False
    uses_jitter = True

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = partial(_usage_error, parser)
        return parser

    # -------------------------------------------------------------------------
    # Shared option groups
    # -------------------------------------------------------------------------

    def add_system_arguments(self, parser):
        parser.add_argument(
            '--array-size', '-N',
            type=int,
            default=get_setting('RPSS_ARRAY_SIZE'),
            help='Array size N (2..20)'
        )
        parser.add_argument(
            '--success-count', '-m',
            type=int,
            default=get_setting('RPSS_SUCCESS_COUNT'),
            help='Sorted arrangements per cycle m'
        )
        if self.uses_bits:
            parser.add_argument(
                '--bits', '-n',
                type=int,
                default=None,
                help=f"Bits per residue n in {{1,2,4,8}}; sets R = 2^n "
                     f"(default {get_setting('RPSS_OUTPUT_BITS')})"
            )
        if self.uses_modulus:
            parser.add_argument(
                '--modulus', '-R',
                type=int,
                default=None,
                help='Residue modulus R; overrides --bits'
            )

    def add_seed_arguments(self, parser, timer=True):
        parser.add_argument('--engine-seed', type=seed_type, help='Seed of the engine rng')
        if timer:
            parser.add_argument('--timer-seed', type=seed_type, help='Seed of the simulated timer')
        parser.add_argument('--pipeline-seed', type=seed_type, help='Initial pipeline seed s_0')

    def add_jitter_arguments(self, parser):
        source = parser.add_mutually_exclusive_group()
        source.add_argument(
            '--jitter',
            help=f"Jitter preset, e.g. {get_setting('RPSS_DEFAULT_JITTER')} "
                 f"(one of: {', '.join(preset_names())})"
        )
        source.add_argument(
            '--jitter-file',
            help='JSON jitter law {"ticks": [...], "probs"|"counts": [...]}'
        )

    def add_format_argument(self, parser, choices=('text', 'json'), default='text'):
        parser.add_argument('--format', dest='fmt', choices=choices, default=default)

    # -------------------------------------------------------------------------
    # Resolution
    # -------------------------------------------------------------------------

    def resolve_system(self, options):
        """(bits, modulus) from --bits/--modulus and the configured default."""
        bits = options.get('bits')
        modulus = options.get('modulus')
        if modulus is not None:
            if bits is not None and modulus != 2 ** bits:
                raise ConfigurationError(f"--modulus {modulus} contradicts --bits {bits}")
            if bits is None and modulus >= 2 and modulus & (modulus - 1) == 0:
                candidate = modulus.bit_length() - 1
                bits = candidate if candidate in (1, 2, 4, 8) else None
            return bits, modulus
        if bits is None:
            bits = get_setting('RPSS_OUTPUT_BITS')
        if bits not in (1, 2, 4, 8):
            raise ConfigurationError(f"--bits must be one of 1, 2, 4, 8, got {bits}")
        return bits, 2 ** bits

    def resolve_jitter(self, options):
        if options.get('jitter'):
            return get_preset(options['jitter']), options['jitter']
        if options.get('jitter_file'):
            return load_jitter_file(options['jitter_file']), options['jitter_file']
        return None, None

    def base_config(self, options, mode=MODE_SIM):
        bits, modulus = self.resolve_system(options)
        jitter, label = self.resolve_jitter(options) if self.uses_jitter else (None, None)
        return CommandConfig(
            subcommand=self.subcommand_name,
            array_size=options['array_size'],
            success_count=options['success_count'],
            bits=bits,
            modulus=modulus,
            mode=mode,
            engine_seed=options.get('engine_seed'),
            timer_seed=options.get('timer_seed'),
            pipeline_seed=options.get('pipeline_seed'),
            jitter=jitter,
            jitter_label=label,
            fmt=options.get('fmt', 'text'),
        )

    @property
    def subcommand_name(self):
        return self.__class__.__module__.rsplit('.', 1)[-1]

    # -------------------------------------------------------------------------
    # Execution
    # -------------------------------------------------------------------------

    def handle(self, *args, **options):
        try:
            config = self.build_config(options)
            config.validate()
        except (ConfigurationError, JitterModelError) as exc:
            raise CommandError(str(exc), returncode=1) from exc

        try:
            self.run(config)
        except (RpssError, OSError) as exc:
            logger.error(f"{config.subcommand} failed: {exc}")
            raise CommandError(str(exc), returncode=2) from exc

    def build_config(self, options):
        raise NotImplementedError

    def run(self, config):
        raise NotImplementedError

    def echo(self, message):
        """Human-facing line on stderr."""
        self.stderr.write(message)

    def echo_config(self, config):
        self.echo(f"{config.subcommand}: {config.system_summary()} mode={config.mode}")
        if config.jitter is not None:
            self.echo(f"  jitter {config.jitter_label}: {describe(config.jitter)}")
        if config.engine_seed is not None:
            self.echo(f"  seeds {config.seed_summary()}")

    def write_text(self, text, path=None):
        """Machine output to a file or stdout."""
        if path:
            with open(path, 'w', encoding='utf-8', newline='') as handle:
                handle.write(text)
        else:
            self.stdout.write(text, ending='')
