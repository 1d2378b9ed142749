#!/usr/bin/env python3
"""
Utility functions
Console status lines, banner and JSON helpers
"""

import json

import pyfiglet
from colorama import Fore, init

init(autoreset=True)

APP_NAME = "FunkInvert"
APP_TAGLINE = "Funk transform, weighted transforms and two-data inversion on the sphere"

_quiet = False


def set_quiet(quiet):
    """Suppress [*] progress lines; errors and results are always printed"""
    global _quiet
    _quiet = bool(quiet)


def info(message):
    if not _quiet:
        print(Fore.YELLOW + f"[*] {message}")


def success(message):
    print(Fore.GREEN + f"[+] {message}")


def warn(message):
    print(Fore.YELLOW + f"[!] {message}")


def error(message):
    print(Fore.RED + f"[!] {message}")


def display_banner():
    """Print the application banner"""
    fig = pyfiglet.Figlet(font="slant")
    print(Fore.CYAN + fig.renderText(APP_NAME))
    print(Fore.YELLOW + APP_TAGLINE)
    print(Fore.CYAN + "=" * 60)


def save_json(data, file_path):
    """
    Save data to a JSON file with sorted keys so repeated runs give identical bytes

    Args:
        data: JSON-ready data
        file_path: Path to save to
    """
    with open(file_path, "w") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")


def load_json(file_path):
    """
    Load data from a JSON file

    Args:
        file_path: Path to load from

    Returns:
        Loaded data
    """
    with open(file_path, "r") as f:
        return json.load(f)
