"""
Management command producing raw QPP-RNG bytes.

Usage:
    python manage.py generate --jitter fat-like --count 1048576 --output out.bin \
        --engine-seed 1 --timer-seed 2 --pipeline-seed 3
    python manage.py generate --mode real --count 100000 > out.bin

Bytes go to --output or stdout with no framing; the run summary, including
every effective seed, goes to stderr.
"""
import argparse
import sys

from rpss.exceptions import ConfigurationError
from rpss.management.base import MODE_REAL, MODE_SIM, RpssCommand
from rpss.models import OutputSource
from rpss.pipeline import build_real, build_simulated
from rpss.rng import WORD_MASK


class Command(RpssCommand):
    help = 'Generate raw random bytes from permutation counts (n_p mod R)'

    def add_arguments(self, parser):
        self.add_system_arguments(parser)
        parser.add_argument(
            '--mode',
            choices=(MODE_SIM, MODE_REAL),
            default=MODE_SIM,
            help='sim: seeded jitter model; real: hardware timer'
        )
        self.add_seed_arguments(parser)
        self.add_jitter_arguments(parser)
        parser.add_argument('--count', type=int, default=1024, help='Bytes to write')
        parser.add_argument('--output', '-o', help='Output file (default: stdout)')
        parser.add_argument(
            '--reseed',
            action=argparse.BooleanOptionalAction,
            default=True,
            help='Feed each cycle\'s tick total back into the engine seed'
        )
        parser.add_argument(
            '--probe-t',
            action='store_true',
            help='Emit t mod R instead of n_p mod R (diagnostic only)'
        )
        parser.add_argument(
            '--streams',
            type=int,
            default=1,
            help='Independent pipelines, written to <output>.<i>'
        )

    def build_config(self, options):
        config = self.base_config(options, mode=options['mode'])
        config.count = options['count']
        config.output = options.get('output')
        config.reseed = options['reseed']
        config.probe_t = options['probe_t']
        config.streams = options['streams']
        if config.streams > 1 and not config.output:
            raise ConfigurationError("--streams needs --output")
        if config.bits is None:
            raise ConfigurationError("byte output needs R = 2^n with n in {1, 2, 4, 8}")
        return config

    def build_stream(self, config, index):
        cfg = config.rpss_config()
        source = OutputSource.ELAPSED if config.probe_t else OutputSource.PERMUTATIONS
        engine_seed = (config.engine_seed + index) & WORD_MASK
        pipeline_seed = (config.pipeline_seed + index) & WORD_MASK
        if config.mode == MODE_REAL:
            return build_real(cfg, engine_seed, pipeline_seed, config.reseed, source)
        timer_seed = (config.timer_seed + index) & WORD_MASK
        return build_simulated(
            cfg, config.jitter, engine_seed, timer_seed, pipeline_seed, config.reseed, source
        )

    def run(self, config):
        config.fill_seeds()
        self.echo_config(config)

        for index in range(config.streams):
            stream = self.build_stream(config, index)
            data = stream.generate(config.count)
            if config.streams > 1:
                path = f"{config.output}.{index}"
            else:
                path = config.output
            if path:
                with open(path, 'wb') as handle:
                    handle.write(data)
            else:
                sys.stdout.buffer.write(data)
                sys.stdout.buffer.flush()
            self.echo(
                f"  stream {index}: {len(data)} bytes, {stream.state.cycle_index} cycles"
                + (f" -> {path}" if path else '')
            )

        self.stderr.write(self.style.SUCCESS(
            f"Wrote {config.count * config.streams} bytes "
            f"({'t probe' if config.probe_t else 'n_p'}, reseed {'on' if config.reseed else 'off'})"
        ))
