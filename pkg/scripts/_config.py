"""Tiny helper: expose a dataclass config as command-line flags."""

import argparse
import dataclasses
from fractions import Fraction


def _parse_tuple(kind):
    def parse(text):
        return tuple(kind(t) for t in text.split(",") if t.strip())
    return parse


def from_args(cls, description=None, argv=None):
    ap = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        flag = "--" + f.name.replace("_", "-")
        if isinstance(default, bool):
            ap.add_argument(flag, action="store_true" if not default else "store_false")
        elif isinstance(default, tuple):
            kind = type(default[0]) if default else float
            ap.add_argument(flag, type=_parse_tuple(kind), default=default)
        elif isinstance(default, Fraction):
            ap.add_argument(flag, type=Fraction, default=default)
        else:
            ap.add_argument(flag, type=type(default), default=default)
    return cls(**vars(ap.parse_args(argv)))
