#!/usr/bin/env python

"""
Write the installed project version to a (Bash) file, for the documentation build.

Usage: get_proj_ver.py [PROJECT] FILE   (PROJECT defaults to PyQSense)
"""

import sys
from importlib.metadata import version


def main():
    args = sys.argv[1:]
    proj_name, file_name = args if len(args) == 2 else ("PyQSense", args[0])
    with open(file_name, "wt", encoding="utf-8") as f:
        f.write(f"export PROJ_VER={version(proj_name)}\n")


if __name__ == "__main__":
    main()
