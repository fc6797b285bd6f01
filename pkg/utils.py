import csv
import os
import json
import time
import random
import numpy as np
import torch


def set_random_seed(seed):
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)


def format_float(value):
    """17 significant digits, enough to round-trip any binary64 value"""
    if isinstance(value, str):
        return value
    return "%.17g" % value


def create_dir(directory):
    if not os.path.exists(directory):
        os.makedirs(directory)
        print("Created %s" % directory)
    else:
        print("%s Already Exists!" % directory)


def _to_builtin(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError("Cannot serialise %s" % type(value).__name__)


def write_log_to_json(path, log):
    with open(path, "w") as outfile:
        json.dump(log, outfile, sort_keys=True, indent=4, separators=(",", ": "), default=_to_builtin)
    print("Saved log file: %s" % path)


def write_csv(path, header, rows):
    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        create_dir(directory)
    with open(path, "w", newline="") as outfile:
        writer = csv.writer(outfile, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(value) for value in row])
    print("Saved csv file: %s" % path)


def format_seconds(seconds):
    minutes, seconds = divmod(seconds, 60.0)
    hours, minutes = divmod(minutes, 60.0)
    return "%d hr %d min %0.2f sec" % (hours, minutes, seconds)


class TimeIt:
    """Wall-clock stopwatch; `tic` returns the seconds since the previous tic"""

    def __init__(self, print_str=""):
        self.start = time.perf_counter()
        self.last = self.start
        self.print_str = print_str

    def tic(self):
        now = time.perf_counter()
        elapsed = now - self.last
        self.last = now
        return elapsed

    def time_since_init(self, print_str=None):
        elapsed = time.perf_counter() - self.start
        print("%s Time: %s" % (print_str or self.print_str, format_seconds(elapsed)))
        return elapsed
