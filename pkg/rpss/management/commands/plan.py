"""
Management command listing (N, m) configurations for an output width.

Usage:
    python manage.py plan --bits 8 --threshold 0.01
    python manage.py plan --published --format csv
"""
from django.core.management.base import CommandError

from rpss.exceptions import ConfigurationError
from rpss.management.base import CommandConfig, RpssCommand
from rpss.planner import plan, published_plan
from rpss.reports import text_table, to_csv, to_json

COLUMNS = (
    ('n', 'bits'),
    ('R', 'modulus'),
    ('N', 'array_size'),
    ('m', 'success_count'),
    ('N!', 'factorial'),
    ('M', 'expected_trials'),
    ('rho_N^m', 'rho_n_pow_m'),
    ('bound', 'bound'),
    ('C_cycle', 'cycle_cost'),
    ('C_byte', 'byte_cost'),
    ('min_m', 'minimal_m'),
    ('published', 'published_rho_n_pow_m'),
    ('diff', 'published_diff'),
)


class Command(RpssCommand):
    help = 'Enumerate (N, m) with rho_N^m below a threshold, cheapest byte first'
    uses_jitter = False

    def add_arguments(self, parser):
        parser.add_argument('--bits', '-n', type=int, default=8, help='Output bits n')
        parser.add_argument('--threshold', type=float, default=0.01, help='Upper limit on rho_N^m')
        parser.add_argument('--min-array-size', type=int, default=2)
        parser.add_argument('--max-array-size', type=int, default=6)
        parser.add_argument('--min-success-count', type=int, default=1)
        parser.add_argument('--max-success-count', type=int, default=8)
        parser.add_argument(
            '--published',
            action='store_true',
            help='Recompute the published parameter rows instead of searching'
        )
        self.add_format_argument(parser, choices=('text', 'csv', 'json'))

    def build_config(self, options):
        bits = options['bits']
        if bits not in (1, 2, 4, 8):
            raise ConfigurationError(f"--bits must be one of 1, 2, 4, 8, got {bits}")
        # the planner sweeps N and m itself; these only satisfy validation
        config = CommandConfig(
            subcommand=self.subcommand_name,
            array_size=2,
            success_count=1,
            bits=bits,
            modulus=2 ** bits,
            fmt=options['fmt'],
        )
        config.extra = {
            key: options[key]
            for key in (
                'threshold', 'min_array_size', 'max_array_size',
                'min_success_count', 'max_success_count', 'published',
            )
        }
        return config

    def search(self, config):
        extra = config.extra
        try:
            return plan(
                config.bits,
                threshold=extra['threshold'],
                max_array_size=extra['max_array_size'],
                max_success_count=extra['max_success_count'],
                min_array_size=extra['min_array_size'],
                min_success_count=extra['min_success_count'],
            )
        except ConfigurationError as exc:
            raise CommandError(str(exc), returncode=1) from exc

    def run(self, config):
        if config.extra['published']:
            rows = published_plan()
        else:
            rows = self.search(config)
            if not rows:
                raise CommandError(
                    f"no (N, m) within bounds reaches rho_N^m < {config.extra['threshold']}; "
                    "widen --max-array-size or --max-success-count",
                    returncode=1,
                )

        headers = [label for label, _ in COLUMNS]
        values = [[getattr(row, attr) for _, attr in COLUMNS] for row in rows]

        if config.fmt == 'json':
            self.stdout.write(to_json([row.as_dict() for row in rows]))
        elif config.fmt == 'csv':
            self.stdout.write(to_csv(headers, values), ending='')
        else:
            self.stdout.write(text_table(headers, values), ending='')
            for row in rows:
                if row.note:
                    self.stdout.write(f"  N={row.array_size} m={row.success_count}: {row.note}")

        self.echo(f"plan: {len(rows)} rows for n={config.bits}")
