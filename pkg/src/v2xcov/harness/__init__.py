from .configfile import load_config
from .output import emit_csv, emit_svg, read_csv
from .sweep import CoverageCurve, Series, SweepSpec, run_sweep
