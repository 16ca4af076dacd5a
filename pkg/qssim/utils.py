import os
import sys
from collections import OrderedDict

# Exit codes of the qssim command
EXIT_CONFIG_ERROR = 2
EXIT_IO_ERROR = 3


class ProgrammerError(RuntimeError):
    pass


def user_error(msg: str, code=EXIT_CONFIG_ERROR):
    print("Error: " + msg, file=sys.stderr)
    sys.exit(code)


def mkdir(path: str):
    os.makedirs(path, exist_ok=True)


def pad_left(s, n) -> str:
    return s if len(s) >= n else " " * (n - len(s)) + s


def pad_right(s, n) -> str:
    return s if len(s) >= n else s + " " * (n - len(s))


def read_file(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except FileNotFoundError:
        return None


def save_file(path, data):
    above = os.path.dirname(path)
    if above:
        mkdir(above)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(data)


def round_half_up(x: float) -> int:
    """Python's round() rounds halves to even; sample sizes round halves up"""
    return int(x + 0.5)


def parse_bool(value) -> bool:
    if value in (True, False):
        return value
    text = str(value).strip().lower()
    if text in ("on", "yes", "true", "1"):
        return True
    if text in ("off", "no", "false", "0"):
        return False
    raise ValueError("expected on/off, not '%s'" % value)


def parse_int_list(value) -> list:
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return [int(v) for v in str(value).replace(" ", "").split(",") if v]


def cache(func):
    """Memoization decorator similar to functools.cache (Python 3.9+)"""
    memo = {}

    def wrapper(*args, **kwargs):
        kwargs = OrderedDict(sorted(kwargs.items()))
        key = str({"args": args, "kwargs": kwargs})
        if key not in memo:
            memo[key] = func(*args, **kwargs)
        return memo[key]

    return wrapper
