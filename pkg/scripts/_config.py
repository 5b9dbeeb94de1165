"""Tiny helper: expose the fields of a dataclass config as command-line flags."""

import argparse
import dataclasses
import json


def parse_config(cls, description):
    ap = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        if isinstance(default, (list, tuple)):
            ap.add_argument(f"--{f.name.replace('_', '-')}", type=json.loads, default=default,
                            help=f"JSON list (default {json.dumps(default)})")
        else:
            ap.add_argument(f"--{f.name.replace('_', '-')}", type=type(default), default=default)
    ap.add_argument("--out", help="write the JSON report here instead of stdout")
    args = vars(ap.parse_args())
    out = args.pop("out")
    return cls(**args), out


def emit(report, out):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
