"""
Management command reporting the statistics of a raw byte file.

Usage:
    python manage.py analyze out.bin
    python manage.py analyze out.bin --bits 4 --format json --histogram-csv hist.csv

With --bits below 8 every byte is split into 8/n residues (high bits first)
and the alphabet is 2^n. The command reports; it never fails a stream on
statistical grounds.
"""
from pathlib import Path

from rpss.management.base import CommandConfig, RpssCommand
from rpss.pipeline import disassemble_bytes
from rpss.reports import histogram_csv, stats_report_text, to_json
from rpss.stats import analyze


class Command(RpssCommand):
    help = 'Entropy, chi-square, moments and serial correlation of a raw byte file'
    uses_jitter = False

    def add_arguments(self, parser):
        parser.add_argument('input', help='Raw byte file')
        parser.add_argument(
            '--bits', '-n',
            type=int,
            default=8,
            choices=(1, 2, 4, 8),
            help='Bits per symbol (default 8)'
        )
        self.add_format_argument(parser)
        parser.add_argument('--histogram-csv', help='Also write symbol,count CSV here')

    def build_config(self, options):
        # analyze reads no engine parameters; N and m are placeholders
        config = CommandConfig(
            subcommand=self.subcommand_name,
            array_size=2,
            success_count=1,
            bits=options['bits'],
            modulus=2 ** options['bits'],
            fmt=options['fmt'],
        )
        config.extra = {
            'input': options['input'],
            'histogram_csv': options.get('histogram_csv'),
        }
        return config

    def run(self, config):
        data = Path(config.extra['input']).read_bytes()
        if config.bits == 8:
            symbols = data
        else:
            symbols = disassemble_bytes(data, config.bits)
        report = analyze(symbols, config.modulus)

        if config.fmt == 'json':
            payload = report.as_dict()
            payload['input'] = config.extra['input']
            self.stdout.write(to_json(payload))
        else:
            self.stdout.write(stats_report_text(report), ending='')

        if config.extra['histogram_csv']:
            self.write_text(histogram_csv(report.histogram), config.extra['histogram_csv'])

        self.echo(
            f"analyze: {report.sample_count} symbols from {config.extra['input']}, "
            f"H={report.shannon_entropy_bits:.6f} p={report.p_value:.4g}"
        )
