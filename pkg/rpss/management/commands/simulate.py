"""
Management command dumping simulated cycles as CSV.

Usage:
    python manage.py simulate -N 4 -m 4 -R 16 --jitter fat-like --cycles 10000 \
        --engine-seed 1 --timer-seed 2 --output cycles.csv --histogram-dir hist/
    python manage.py simulate --jitter ultra-skinny-like --cycles 5000 --summary --trace

The main CSV is `cycle,n_p,t_ticks`. --histogram-dir adds n_p.csv, t.csv,
n_p_mod.csv and t_mod.csv; with --trace it also gets trial_ticks.csv in
the measured-table layout (`tick,count`, Too-Big deltas left out).
"""
from pathlib import Path

from rpss.engine import SortingEngine, verify_segment
from rpss.jitter import tick_histogram
from rpss.management.base import RpssCommand
from rpss.reports import histogram_csv, sparse_histogram_csv, to_csv, to_json
from rpss.rng import Pcg64Rng
from rpss.stats import sample_summary
from rpss.timers import SimulatedTimer


class Command(RpssCommand):
    help = 'Simulate sorting cycles and dump n_p / t_ticks as CSV'
    uses_modulus = True

    def add_arguments(self, parser):
        self.add_system_arguments(parser)
        self.add_jitter_arguments(parser)
        self.add_seed_arguments(parser)
        parser.add_argument('--cycles', type=int, default=1000, help='Cycles to simulate')
        parser.add_argument('--output', '-o', help='Cycle CSV file (default: stdout)')
        parser.add_argument('--histogram-dir', help='Directory for histogram CSVs')
        parser.add_argument(
            '--trace',
            action='store_true',
            help='Keep per-trial ticks and write their histogram'
        )
        parser.add_argument(
            '--check-composition',
            action='store_true',
            help='Record applied permutations and verify every success segment'
        )
        parser.add_argument(
            '--summary',
            action='store_true',
            help='Print location/shape statistics of N_p and T to stderr'
        )

    def build_config(self, options):
        config = self.base_config(options)
        config.count = options['cycles']
        config.output = options.get('output')
        config.trace = options['trace']
        config.extra = {
            'histogram_dir': options.get('histogram_dir'),
            'check_composition': options['check_composition'],
            'summary': options['summary'],
        }
        return config

    def run(self, config):
        cfg = config.rpss_config()
        config.fill_seeds()
        self.echo_config(config)

        engine = SortingEngine(
            cfg,
            Pcg64Rng(config.engine_seed),
            SimulatedTimer(config.jitter, config.timer_seed),
        )
        check = config.extra['check_composition']

        rows = []
        trial_ticks = []
        oversized = 0
        segments_checked = 0
        segments_failed = 0
        for index, sample in enumerate(
            engine.cycles(config.count, trace=config.trace, record_permutations=check)
        ):
            rows.append((index, sample.n_p, sample.t_ticks))
            oversized += sample.oversized_trials
            if config.trace:
                trial_ticks.extend(sample.trial_ticks)
            if check:
                for segment in sample.segments:
                    segments_checked += 1
                    if not verify_segment(segment):
                        segments_failed += 1

        self.write_text(to_csv(('cycle', 'n_p', 't_ticks'), rows), config.output)

        if config.extra['histogram_dir']:
            self.write_histograms(Path(config.extra['histogram_dir']), cfg.modulus, rows, trial_ticks)

        if config.extra['summary'] and rows:
            summaries = {
                'n_p': sample_summary([r[1] for r in rows]).as_dict(),
                't_ticks': sample_summary([r[2] for r in rows]).as_dict(),
            }
            self.echo(to_json(summaries))

        if check:
            self.echo(f"  composition: {segments_checked} segments, {segments_failed} failed")
        if oversized:
            self.echo(f"  {oversized} trials above the Too-Big cutoff (kept in t_ticks)")
        self.stderr.write(self.style.SUCCESS(f"Simulated {len(rows)} cycles"))

    def write_histograms(self, directory, modulus, rows, trial_ticks):
        directory.mkdir(parents=True, exist_ok=True)
        n_values = [r[1] for r in rows]
        t_values = [r[2] for r in rows]
        self.write_text(sparse_histogram_csv(n_values, 'n_p'), directory / 'n_p.csv')
        self.write_text(sparse_histogram_csv(t_values, 't_ticks'), directory / 't.csv')

        n_mod = [0] * modulus
        t_mod = [0] * modulus
        for n_p, t_ticks in zip(n_values, t_values):
            n_mod[n_p % modulus] += 1
            t_mod[t_ticks % modulus] += 1
        self.write_text(histogram_csv(n_mod, 'residue'), directory / 'n_p_mod.csv')
        self.write_text(histogram_csv(t_mod, 'residue'), directory / 't_mod.csv')

        if trial_ticks:
            counts, excluded = tick_histogram(trial_ticks)
            self.write_text(histogram_csv(counts, 'tick'), directory / 'trial_ticks.csv')
            if excluded:
                self.echo(f"  trial_ticks.csv leaves out {excluded} Too-Big deltas")
