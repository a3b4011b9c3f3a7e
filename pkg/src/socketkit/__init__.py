"""Socket groups, free-group witnesses, finite-index subgroups and girth-certified graph covers."""

__version__ = "0.1.0"
